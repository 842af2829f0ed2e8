//! The variable-exponent Lebesgue modular, the Gagliardo double sum and the
//! full fractional Sobolev modular, all with midpoint quadrature.
//!
//! ```text
//! lebesgue(u)  = sum_i |u_i|^q_i h^n
//! gagliardo(u) = sum_{i != j} |u_i - u_j|^p_ij / d_ij^(n + s p_ij) h^2n
//! ```
//!
//! Diagonal pairs contribute nothing. Sums follow the fixed tree order of
//! [`crate::summation`], so results do not depend on the thread count.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::ExponentField;
use crate::function::GridFunction;
use crate::grid::Grid;
use crate::summation::{pairwise_sum_by, row_values, sum_rows};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ModularBreakdown {
    pub lebesgue_term: f64,
    pub gagliardo_term: f64,
    pub total: f64,
}

impl ModularBreakdown {
    fn new(lebesgue_term: f64, gagliardo_term: f64) -> Self {
        ModularBreakdown {
            lebesgue_term,
            gagliardo_term,
            total: lebesgue_term + gagliardo_term,
        }
    }
}

#[inline]
pub(crate) fn abs_pow(x: f64, p: f64) -> f64 {
    let a = x.abs();
    if p == 2.0 {
        a * a
    } else {
        a.powf(p)
    }
}

/// `d/dx |x|^p = p |x|^(p-1) sgn(x)`, zero at the origin.
#[inline]
fn abs_pow_derivative(x: f64, p: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else if p == 2.0 {
        2.0 * x
    } else {
        p * x.abs().powf(p - 1.0) * x.signum()
    }
}

pub fn check_order(s: f64) -> Result<()> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Parameter(format!("s must lie in (0, 1), got {s}")));
    }
    Ok(())
}

/// The modular of a fixed grid, exponent field and order `s`, with the
/// exponents and kernel weights tabulated once.
#[derive(Clone, Debug)]
pub struct SobolevModular {
    grid: Arc<Grid>,
    s: f64,
    cell_measure: f64,
    q: Vec<f64>,
    /// Row-major `p(x_i, x_j)`.
    p: Vec<f64>,
    /// Row-major `h^2n / d_ij^(n + s p_ij)`, zero on the diagonal.
    weights: Vec<f64>,
}

impl SobolevModular {
    pub fn new(grid: &Arc<Grid>, field: &ExponentField, s: f64) -> Result<Self> {
        check_order(s)?;
        let n = grid.num_cells();
        let dim = grid.dim() as f64;
        let h = grid.cell_measure();
        let q = grid
            .cells()
            .iter()
            .map(|c| field.eval_q(c.center))
            .collect::<Result<Vec<_>>>()?;
        let mut p = vec![0.0; n * n];
        let mut weights = vec![0.0; n * n];
        for i in 0..n {
            let xi = grid.cell_center(i);
            for j in i..n {
                let xj = grid.cell_center(j);
                let pij = field.eval_p(xi, xj)?;
                p[i * n + j] = pij;
                p[j * n + i] = pij;
                if i != j {
                    let d = ((xi[0] - xj[0]).powi(2) + (xi[1] - xj[1]).powi(2)).sqrt();
                    let w = h * h / d.powf(dim + s * pij);
                    weights[i * n + j] = w;
                    weights[j * n + i] = w;
                }
            }
        }
        Ok(SobolevModular {
            grid: grid.clone(),
            s,
            cell_measure: h,
            q,
            p,
            weights,
        })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn order(&self) -> f64 {
        self.s
    }

    pub fn num_cells(&self) -> usize {
        self.q.len()
    }

    fn check(&self, u: &GridFunction) -> Result<()> {
        if !(Arc::ptr_eq(u.grid(), &self.grid) || **u.grid() == *self.grid) {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// `sum_i |scale * u_i|^q_i h^n` on raw cell values.
    pub fn lebesgue_cells(&self, cells: &[f64], scale: f64) -> f64 {
        let q = &self.q;
        pairwise_sum_by(cells.len(), |i| abs_pow(scale * cells[i], q[i])) * self.cell_measure
    }

    /// Gagliardo double sum of `scale * u` on raw cell values.
    pub fn gagliardo_cells(&self, cells: &[f64], scale: f64) -> f64 {
        let n = cells.len();
        let (p, w) = (&self.p, &self.weights);
        sum_rows(n, |i| {
            let ui = cells[i];
            let row = i * n;
            pairwise_sum_by(n, |j| {
                let wij = w[row + j];
                if wij == 0.0 {
                    0.0
                } else {
                    wij * abs_pow(scale * (ui - cells[j]), p[row + j])
                }
            })
        })
    }

    pub fn breakdown_cells(&self, cells: &[f64], scale: f64) -> ModularBreakdown {
        ModularBreakdown::new(
            self.lebesgue_cells(cells, scale),
            self.gagliardo_cells(cells, scale),
        )
    }

    pub fn total_cells(&self, cells: &[f64]) -> f64 {
        self.breakdown_cells(cells, 1.0).total
    }

    /// Gradient of the total modular with respect to the cell values.
    pub fn gradient_cells(&self, cells: &[f64]) -> Vec<f64> {
        let n = cells.len();
        let (p, w, q, h) = (&self.p, &self.weights, &self.q, self.cell_measure);
        row_values(n, |i| {
            let ui = cells[i];
            let row = i * n;
            let pair = pairwise_sum_by(n, |j| {
                let wij = w[row + j];
                if wij == 0.0 {
                    0.0
                } else {
                    wij * abs_pow_derivative(ui - cells[j], p[row + j])
                }
            });
            abs_pow_derivative(ui, q[i]) * h + 2.0 * pair
        })
    }

    pub fn lebesgue(&self, u: &GridFunction) -> Result<f64> {
        self.check(u)?;
        finite(self.lebesgue_cells(u.cells(), 1.0), "Lebesgue modular")
    }

    pub fn gagliardo(&self, u: &GridFunction) -> Result<f64> {
        self.check(u)?;
        finite(self.gagliardo_cells(u.cells(), 1.0), "Gagliardo modular")
    }

    pub fn evaluate(&self, u: &GridFunction) -> Result<ModularBreakdown> {
        self.check(u)?;
        let b = self.breakdown_cells(u.cells(), 1.0);
        finite(b.total, "Sobolev modular")?;
        Ok(b)
    }

    /// Nodewise gradient; boundary entries are zero because boundary values
    /// do not enter the modular.
    pub fn gradient(&self, u: &GridFunction) -> Result<GridFunction> {
        self.check(u)?;
        let g = self.gradient_cells(u.cells());
        GridFunction::new(&self.grid, g, vec![0.0; self.grid.num_boundary()])
    }
}

fn finite(v: f64, what: &'static str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(what))
    }
}

/// Lebesgue modular of `u` with the `q` of `field`.
pub fn lebesgue_modular(u: &GridFunction, field: &ExponentField) -> Result<f64> {
    let grid = u.grid();
    let q = grid
        .cells()
        .iter()
        .map(|c| field.eval_q(c.center))
        .collect::<Result<Vec<_>>>()?;
    let cells = u.cells();
    let v = pairwise_sum_by(cells.len(), |i| abs_pow(cells[i], q[i])) * grid.cell_measure();
    finite(v, "Lebesgue modular")
}

pub fn gagliardo_modular(u: &GridFunction, field: &ExponentField, s: f64) -> Result<f64> {
    SobolevModular::new(u.grid(), field, s)?.gagliardo(u)
}

pub fn sobolev_modular(
    u: &GridFunction,
    field: &ExponentField,
    s: f64,
) -> Result<ModularBreakdown> {
    SobolevModular::new(u.grid(), field, s)?.evaluate(u)
}

pub fn modular_gradient(u: &GridFunction, field: &ExponentField, s: f64) -> Result<GridFunction> {
    SobolevModular::new(u.grid(), field, s)?.gradient(u)
}
