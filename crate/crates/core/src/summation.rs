//! Fixed-order reductions.
//!
//! Every sum in the crate goes through [`pairwise_sum_by`], which splits the
//! index range at its midpoint until blocks of [`BLOCK`] terms remain and adds
//! those sequentially. The tree shape depends only on the length, so row
//! partials computed on any number of threads combine to the same bits.

use rayon::prelude::*;

/// Leaf size of the summation tree.
pub const BLOCK: usize = 8;

/// Rows at or above this count are evaluated on the rayon pool.
pub const PARALLEL_ROWS: usize = 128;

pub fn pairwise_sum(values: &[f64]) -> f64 {
    pairwise_sum_by(values.len(), |i| values[i])
}

pub fn pairwise_sum_by<F>(len: usize, term: F) -> f64
where
    F: Fn(usize) -> f64,
{
    fn go<F: Fn(usize) -> f64>(lo: usize, hi: usize, term: &F) -> f64 {
        if hi - lo <= BLOCK {
            let mut acc = 0.0;
            for i in lo..hi {
                acc += term(i);
            }
            acc
        } else {
            let mid = lo + (hi - lo) / 2;
            go(lo, mid, term) + go(mid, hi, term)
        }
    }
    go(0, len, &term)
}

/// Evaluates `row(i)` for every row and returns the partials in row order.
pub fn row_values<F>(rows: usize, row: F) -> Vec<f64>
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    if rows >= PARALLEL_ROWS {
        (0..rows).into_par_iter().map(row).collect()
    } else {
        (0..rows).map(row).collect()
    }
}

/// Pairwise sum of per-row partials.
pub fn sum_rows<F>(rows: usize, row: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    pairwise_sum(&row_values(rows, row))
}
