//! Empirical verification of the outer-measure and Choquet properties of the
//! discrete capacity over a finite family of sets.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::capacity::CapacitySolver;
use crate::error::{Error, Result};
use crate::grid::SetMask;

/// Relative tolerance applied to every margin, scaled by the largest capacity
/// in the family.
pub const AXIOM_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomCheck {
    pub property: String,
    /// Smallest slack over all instances; nonnegative means the inequality
    /// holds exactly.
    pub margin: f64,
    pub instances: usize,
    pub passed: bool,
    /// Indices into the family of the worst instance.
    pub worst: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub capacities: Vec<f64>,
    pub tolerance: f64,
    pub checks: Vec<AxiomCheck>,
    /// Solves that hit the iteration cap; their best iterates were used.
    pub unconverged: usize,
    pub all_passed: bool,
}

impl AxiomReport {
    pub fn check(&self, property: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.property == property)
    }
}

struct Tally {
    property: &'static str,
    margin: f64,
    instances: usize,
    worst: Vec<usize>,
}

impl Tally {
    fn new(property: &'static str) -> Self {
        Tally {
            property,
            margin: f64::INFINITY,
            instances: 0,
            worst: Vec::new(),
        }
    }

    fn record(&mut self, margin: f64, which: &[usize]) {
        self.instances += 1;
        if margin < self.margin {
            self.margin = margin;
            self.worst = which.to_vec();
        }
    }

    fn finish(self, tolerance: f64) -> AxiomCheck {
        let margin = if self.instances == 0 {
            0.0
        } else {
            self.margin
        };
        AxiomCheck {
            property: self.property.to_string(),
            margin,
            instances: self.instances,
            passed: margin >= -tolerance,
            worst: self.worst,
        }
    }
}

/// Capacities of many sets, solving each distinct hull once. Solves run in
/// parallel; results come back in input order.
pub fn capacities_of(solver: &CapacitySolver, sets: &[SetMask]) -> Result<(Vec<f64>, usize)> {
    let grid = solver.grid();
    let mut hulls = Vec::with_capacity(sets.len());
    for set in sets {
        hulls.push(grid.open_neighborhood(set)?);
    }
    let unique: Vec<SetMask> = {
        let mut v = hulls.clone();
        v.sort();
        v.dedup();
        v
    };
    let solved: Vec<Result<(f64, bool)>> = unique
        .par_iter()
        .map(|hull| match solver.capacity_relative_open(hull) {
            Ok(r) => Ok((r.value, true)),
            Err(Error::NotConverged(best)) => Ok((best.value, false)),
            Err(e) => Err(e),
        })
        .collect();
    let mut table = BTreeMap::new();
    let mut unconverged = 0;
    for (hull, res) in unique.into_iter().zip(solved) {
        let (value, converged) = res?;
        if !converged {
            unconverged += 1;
        }
        table.insert(hull, value);
    }
    Ok((hulls.iter().map(|h| table[h]).collect(), unconverged))
}

/// Checks the empty-set value, monotonicity over nested pairs, finite and
/// strong subadditivity over all pairs, and the measure lower bound.
pub fn verify_capacity_axioms(solver: &CapacitySolver, sets: &[SetMask]) -> Result<AxiomReport> {
    if sets.len() < 2 {
        return Err(Error::Parameter(
            "axiom verification needs at least two sets".into(),
        ));
    }
    let grid = solver.grid();
    for set in sets {
        grid.check_mask(set)?;
    }
    let k = sets.len();
    let mut family: Vec<SetMask> = sets.to_vec();
    family.push(grid.empty_mask());
    for i in 0..k {
        for j in i + 1..k {
            family.push(sets[i].union(&sets[j]));
            family.push(sets[i].intersection(&sets[j]));
        }
    }
    let (caps, unconverged) = capacities_of(solver, &family)?;
    let max_cap = caps.iter().copied().fold(0.0, f64::max);
    let tolerance = AXIOM_TOLERANCE * max_cap;

    let mut empty = Tally::new("empty_set");
    empty.record(-caps[k].abs(), &[]);

    let mut monotone = Tally::new("monotonicity");
    let mut finite = Tally::new("finite_subadditivity");
    let mut strong = Tally::new("strong_subadditivity");
    let mut pair = k + 1;
    for i in 0..k {
        for j in i + 1..k {
            let (union, inter) = (caps[pair], caps[pair + 1]);
            pair += 2;
            if sets[i].is_subset(&sets[j]) {
                monotone.record(caps[j] - caps[i], &[i, j]);
            }
            if sets[j].is_subset(&sets[i]) && sets[i] != sets[j] {
                monotone.record(caps[i] - caps[j], &[j, i]);
            }
            finite.record(caps[i] + caps[j] - union, &[i, j]);
            strong.record(caps[i] + caps[j] - union - inter, &[i, j]);
        }
    }

    let mut measure = Tally::new("measure_bound");
    for (i, set) in sets.iter().enumerate() {
        measure.record(caps[i] - grid.measure(set)?, &[i]);
    }

    let checks: Vec<AxiomCheck> = [empty, monotone, finite, strong, measure]
        .into_iter()
        .map(|t| t.finish(tolerance))
        .collect();
    let all_passed = checks.iter().all(|c| c.passed);
    Ok(AxiomReport {
        capacities: caps[..k].to_vec(),
        tolerance,
        checks,
        unconverged,
        all_passed,
    })
}

/// Countable subadditivity truncated to the given sets:
/// `C(union) <= sum of C(E_i)`.
pub fn check_countable_subadditivity(
    solver: &CapacitySolver,
    sets: &[SetMask],
) -> Result<AxiomCheck> {
    let grid = solver.grid();
    let mut family = sets.to_vec();
    let union = sets.iter().fold(grid.empty_mask(), |acc, s| acc.union(s));
    family.push(union);
    let (caps, _) = capacities_of(solver, &family)?;
    let n = sets.len();
    let total: f64 = caps[..n].iter().sum();
    let mut t = Tally::new("countable_subadditivity");
    t.record(total - caps[n], &(0..n).collect::<Vec<_>>());
    Ok(t.finish(AXIOM_TOLERANCE * caps.iter().copied().fold(0.0, f64::max)))
}

/// Decreasing chain: capacities are non-increasing and the capacity of the
/// intersection is at least the last term.
pub fn check_decreasing_chain(solver: &CapacitySolver, chain: &[SetMask]) -> Result<AxiomCheck> {
    for w in chain.windows(2) {
        if !w[1].is_subset(&w[0]) {
            return Err(Error::Parameter("chain is not decreasing".into()));
        }
    }
    let grid = solver.grid();
    let mut family = chain.to_vec();
    family.push(
        chain
            .iter()
            .fold(grid.full_mask(), |acc, s| acc.intersection(s)),
    );
    let (caps, _) = capacities_of(solver, &family)?;
    let n = chain.len();
    let mut t = Tally::new("decreasing_chain");
    for i in 1..n {
        t.record(caps[i - 1] - caps[i], &[i - 1, i]);
    }
    if n > 0 {
        t.record(caps[n] - caps[n - 1], &[n - 1]);
    }
    Ok(t.finish(AXIOM_TOLERANCE * caps.iter().copied().fold(0.0, f64::max)))
}

/// Increasing chain: the capacity of the union equals the last term.
pub fn check_increasing_chain(solver: &CapacitySolver, chain: &[SetMask]) -> Result<AxiomCheck> {
    for w in chain.windows(2) {
        if !w[0].is_subset(&w[1]) {
            return Err(Error::Parameter("chain is not increasing".into()));
        }
    }
    let grid = solver.grid();
    let mut family = chain.to_vec();
    family.push(chain.iter().fold(grid.empty_mask(), |acc, s| acc.union(s)));
    let (caps, _) = capacities_of(solver, &family)?;
    let n = chain.len();
    let mut t = Tally::new("increasing_chain");
    for i in 1..n {
        t.record(caps[i] - caps[i - 1], &[i - 1, i]);
    }
    if n > 0 {
        t.record(-(caps[n] - caps[n - 1]).abs(), &[n - 1]);
    }
    Ok(t.finish(AXIOM_TOLERANCE * caps.iter().copied().fold(0.0, f64::max)))
}
