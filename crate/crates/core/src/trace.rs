//! Quasi-uniform convergence certificates, boundary traces, boundary polarity
//! and removable sets, all expressed through discrete capacities.
//!
//! "Quasi everywhere" becomes "outside a set of capacity at most a tolerance":
//! at a fixed resolution every nonempty cell set has positive capacity, so
//! verdicts are tolerance-parameterized and polarity is read off a
//! refinement series.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::axioms::capacities_of;
use crate::capacity::{CapacitySolver, SolverOptions};
use crate::error::{Error, Result};
use crate::exponent::{ExponentField, ExponentSpec, PairExponentSpec};
use crate::function::GridFunction;
use crate::grid::{Domain, Grid, MaskIndices, SetMask};

/// Slack on the per-index bound `4^-i` for the bisection error of the norms
/// that enter the gap precondition.
pub const CERTIFICATE_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateStep {
    /// One-based index of the gap `u_{i+1} - u_i`.
    pub index: usize,
    pub gap: f64,
    /// `2^-i`: nodes where the gap exceeds this form the exceptional set.
    pub threshold: f64,
    pub exceptional: MaskIndices,
    /// Modular of `2^i |u_{i+1} - u_i|`, admissible for the exceptional set.
    pub bound: f64,
    /// `4^-i`.
    pub limit: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceCertificate {
    pub steps: Vec<CertificateStep>,
    pub tail_start: usize,
    /// Union of the exceptional sets from `tail_start` on. Outside it the
    /// sequence converges uniformly.
    pub tail_set: MaskIndices,
    /// Sum of the recorded bounds from `tail_start` on.
    pub tail_bound: f64,
    /// Sum of `4^-i` over the same indices.
    pub tail_limit: f64,
    pub verdict: bool,
}

/// Checks that consecutive Sobolev-norm gaps are at most `8^-i` and bounds
/// the capacity of each set `{|u_{i+1} - u_i| > 2^-i}` by `4^-i`.
pub fn quasi_convergence_certificate(
    solver: &CapacitySolver,
    sequence: &[GridFunction],
    tail_start: usize,
) -> Result<ConvergenceCertificate> {
    if sequence.len() < 2 {
        return Err(Error::Parameter(
            "a certificate needs at least two functions".into(),
        ));
    }
    if tail_start == 0 || tail_start >= sequence.len() {
        return Err(Error::Parameter(format!(
            "tail start must lie in 1..{}, got {tail_start}",
            sequence.len()
        )));
    }
    let grid = solver.grid();
    let modular = solver.modular();
    let mut steps = Vec::with_capacity(sequence.len() - 1);
    let mut tail = grid.empty_mask();
    let mut tail_bound = 0.0;
    let mut tail_limit = 0.0;

    for (k, pair) in sequence.windows(2).enumerate() {
        let index = k + 1;
        let diff = pair[1].sub(&pair[0])?.abs();
        let gap = modular.sobolev_norm(&diff)?;
        let allowed = 8f64.powi(-(index as i32));
        if !(gap <= allowed * (1.0 + 1e-12)) {
            return Err(Error::CertificateInapplicable {
                index,
                gap,
                threshold: allowed,
            });
        }
        let threshold = 0.5f64.powi(index as i32);
        let cells: Vec<bool> = diff.cells().iter().map(|&d| d > threshold).collect();
        let boundary: Vec<bool> = diff.boundary().iter().map(|&d| d > threshold).collect();
        let exceptional = SetMask::from_flags(cells, boundary);
        let bound =
            solver.capacity_upper_bound(&diff.scaled(2f64.powi(index as i32)), &exceptional)?;
        let limit = 0.25f64.powi(index as i32);
        if index >= tail_start {
            tail = tail.union(&exceptional);
            tail_bound += bound;
            tail_limit += limit;
        }
        steps.push(CertificateStep {
            index,
            gap,
            threshold,
            exceptional: exceptional.to_indices(),
            bound,
            limit,
            holds: bound <= limit + CERTIFICATE_SLACK,
        });
    }
    let verdict = steps.iter().all(|s| s.holds);
    Ok(ConvergenceCertificate {
        steps,
        tail_start,
        tail_set: tail.to_indices(),
        tail_bound,
        tail_limit,
        verdict,
    })
}

/// Boundary nodes where `|u| > eps`.
pub fn boundary_superlevel(u: &GridFunction, eps: f64) -> SetMask {
    let grid = u.grid();
    let boundary = u.boundary().iter().map(|v| v.abs() > eps).collect();
    SetMask::from_flags(vec![false; grid.num_cells()], boundary)
}

/// Capacity of the boundary nodes where `|u| > eps`.
pub fn boundary_trace_deficiency(
    solver: &CapacitySolver,
    u: &GridFunction,
    eps: f64,
) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::Parameter(format!("eps must be positive, got {eps}")));
    }
    if !Arc::ptr_eq(u.grid(), solver.grid()) && **u.grid() != **solver.grid() {
        return Err(Error::GridMismatch);
    }
    let set = boundary_superlevel(u, eps);
    if set.is_empty() {
        return Ok(0.0);
    }
    Ok(solver.capacity_set(&set)?.value)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroTraceReport {
    pub member: bool,
    pub deficiency: f64,
    pub offending: MaskIndices,
}

/// Whether `u` vanishes on the boundary outside a set of capacity at most
/// `delta`, at level `eps`.
pub fn zero_trace_membership(
    solver: &CapacitySolver,
    u: &GridFunction,
    eps: f64,
    delta: f64,
) -> Result<ZeroTraceReport> {
    if !(delta > 0.0) {
        return Err(Error::Parameter(format!(
            "delta must be positive, got {delta}"
        )));
    }
    let deficiency = boundary_trace_deficiency(solver, u, eps)?;
    Ok(ZeroTraceReport {
        member: deficiency <= delta,
        deficiency,
        offending: boundary_superlevel(u, eps).to_indices(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub resolution: usize,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarityReport {
    pub series: Vec<SeriesPoint>,
    pub non_increasing: bool,
    /// Ratio of the last value to the first.
    pub retained: f64,
    /// Relative decrease over the last refinement step.
    pub last_step_decrease: f64,
    pub verdict: String,
}

/// A series still losing at least this fraction on its last refinement step
/// is read as tending to zero.
pub const POLARITY_DECAY: f64 = 0.01;

/// A series that has stopped decaying is read as bounded away from zero when
/// its finest value keeps at least this fraction of the coarsest.
pub const POLARITY_RETAINED: f64 = 0.5;

/// Capacity of the whole boundary over a sequence of resolutions. In two
/// dimensions each resolution is used on both axes.
pub fn boundary_polarity_check(
    domain: &Domain,
    resolutions: &[usize],
    q: &ExponentSpec,
    p: &PairExponentSpec,
    s: f64,
    options: &SolverOptions,
) -> Result<PolarityReport> {
    if resolutions.len() < 3 {
        return Err(Error::Parameter(
            "a refinement series needs at least three resolutions".into(),
        ));
    }
    let mut series = Vec::with_capacity(resolutions.len());
    for &n in resolutions {
        let res = if domain.dim() == 1 { [n, 1] } else { [n, n] };
        let grid = Grid::build(domain, res)?;
        let field = ExponentField::new(&grid, q.clone(), p.clone())?;
        let solver = CapacitySolver::new(&grid, &field, s, options.clone())?;
        let value = solver.capacity_set(&grid.boundary_mask())?.value;
        series.push(SeriesPoint {
            resolution: n,
            value,
        });
    }
    let non_increasing = series
        .windows(2)
        .all(|w| w[1].value <= w[0].value * (1.0 + 1e-9));
    let first = series[0].value;
    let last = series[series.len() - 1].value;
    let retained = if first > 0.0 { last / first } else { 0.0 };
    let before = series[series.len() - 2].value;
    let last_step_decrease = if before > 0.0 {
        (before - last) / before
    } else {
        0.0
    };
    let verdict = if non_increasing && last_step_decrease >= POLARITY_DECAY {
        "tending to zero"
    } else if retained >= POLARITY_RETAINED && last_step_decrease < POLARITY_DECAY {
        "bounded away from zero"
    } else {
        "inconclusive"
    };
    Ok(PolarityReport {
        series,
        non_increasing,
        retained,
        last_step_decrease,
        verdict: verdict.to_string(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RemovabilityReport {
    pub removed: MaskIndices,
    pub capacity_of_removed: f64,
    /// Test-set capacities in the full domain.
    pub full: Vec<f64>,
    /// Test-set capacities with the removed cells deleted.
    pub reduced: Vec<f64>,
    pub max_discrepancy: f64,
    pub tolerance: f64,
    pub removable: bool,
}

/// Compares test-set capacities in the domain with and without the cells of
/// `removed`. The set counts as removable at `tolerance` when both its own
/// capacity and the largest discrepancy are within it.
pub fn removable_set_check(
    field: &ExponentField,
    s: f64,
    options: &SolverOptions,
    removed: &SetMask,
    tests: &[SetMask],
    tolerance: f64,
) -> Result<RemovabilityReport> {
    let grid = field.grid();
    grid.check_mask(removed)?;
    if removed.num_boundary() > 0 {
        return Err(Error::Usage(
            "the removed set may contain cells only".into(),
        ));
    }
    if !(tolerance >= 0.0) {
        return Err(Error::Parameter(format!(
            "tolerance must be nonnegative, got {tolerance}"
        )));
    }
    for (k, t) in tests.iter().enumerate() {
        grid.check_mask(t)?;
        if t.intersection(removed).num_cells() > 0 {
            return Err(Error::Usage(format!(
                "test set {k} intersects the removed set"
            )));
        }
    }
    let solver = CapacitySolver::new(grid, field, s, options.clone())?;
    let capacity_of_removed = solver.capacity_relative_open(removed)?.value;
    let (full, _) = capacities_of(&solver, tests)?;

    let reduced = if removed.is_empty() {
        full.clone()
    } else {
        let small = grid.without_cells(removed)?;
        let small_solver =
            CapacitySolver::new(&small, &field.restrict_to(&small)?, s, options.clone())?;
        let mapped = tests
            .iter()
            .map(|t| transfer_mask(grid, &small, t))
            .collect::<Result<Vec<_>>>()?;
        capacities_of(&small_solver, &mapped)?.0
    };
    let max_discrepancy = full
        .iter()
        .zip(&reduced)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(RemovabilityReport {
        removed: removed.to_indices(),
        capacity_of_removed,
        full,
        reduced,
        max_discrepancy,
        tolerance,
        removable: capacity_of_removed <= tolerance && max_discrepancy <= tolerance,
    })
}

/// Carries a mask to a grid with some cells deleted: cells by lattice
/// position, boundary nodes by location.
fn transfer_mask(from: &Grid, to: &Grid, mask: &SetMask) -> Result<SetMask> {
    let mut out = to.empty_mask();
    for ci in mask.cell_indices() {
        let target = to
            .cell_at_lattice(from.cells()[ci].lattice)
            .ok_or_else(|| Error::Usage(format!("cell {ci} does not survive the deletion")))?;
        out.set_cell(target, true);
    }
    for bi in mask.boundary_indices() {
        let point = from.boundary_nodes()[bi].point;
        let target = to
            .boundary_nodes()
            .binary_search_by(|n| n.point.partial_cmp(&point).expect("finite coordinates"))
            .map_err(|_| {
                Error::Usage(format!("boundary node {bi} does not survive the deletion"))
            })?;
        out.set_boundary(target, true);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interval(n: usize) -> Arc<Grid> {
        Grid::build(&Domain::interval(0.0, 1.0).unwrap(), [n, 1]).unwrap()
    }

    fn solver(g: &Arc<Grid>, s: f64, p: f64) -> CapacitySolver {
        let f = ExponentField::constant(g, 2.0, p).unwrap();
        CapacitySolver::new(g, &f, s, SolverOptions::default()).unwrap()
    }

    #[test]
    fn constant_sequence_certificate() {
        let g = interval(8);
        let cs = solver(&g, 0.5, 2.0);
        let u = GridFunction::from_expr(&g, "x").unwrap();
        let c = quasi_convergence_certificate(&cs, &[u.clone(), u.clone(), u], 1).unwrap();
        assert!(c.verdict);
        assert!(c
            .steps
            .iter()
            .all(|s| s.bound == 0.0 && s.exceptional.cells.is_empty()));
        assert_eq!(c.tail_bound, 0.0);
        assert!((c.tail_limit - (0.25 + 0.0625)).abs() < 1e-15);
    }

    #[test]
    fn large_gap_is_rejected_at_its_index() {
        let g = interval(8);
        let cs = solver(&g, 0.5, 2.0);
        let z = GridFunction::zeros(&g);
        let one = GridFunction::constant(&g, 1.0);
        match quasi_convergence_certificate(&cs, &[z.clone(), z.clone(), one], 1) {
            Err(Error::CertificateInapplicable { index, .. }) => assert_eq!(index, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn deficiency_examples() {
        let g = interval(8);
        let cs = solver(&g, 0.5, 2.0);
        let mut u = GridFunction::constant(&g, 1.0);
        let full = boundary_trace_deficiency(&cs, &u, 0.5).unwrap();
        let hull = cs.capacity_set(&g.boundary_mask()).unwrap().value;
        assert_eq!(full, hull);
        assert!(full > 0.0);
        assert!(
            !zero_trace_membership(&cs, &u, 0.5, full / 2.0)
                .unwrap()
                .member
        );
        u.boundary_mut().iter_mut().for_each(|b| *b = 0.0);
        assert_eq!(boundary_trace_deficiency(&cs, &u, 1e-12).unwrap(), 0.0);
        assert!(zero_trace_membership(&cs, &u, 1e-3, 1e-9).unwrap().member);
        assert!(boundary_trace_deficiency(&cs, &u, 0.0).is_err());
    }

    #[test]
    fn empty_removed_set_gives_exact_zeros() {
        let g = interval(8);
        let f = ExponentField::constant(&g, 2.0, 2.0).unwrap();
        let tests = vec![SetMask::from_cells(&g, &[2, 3]).unwrap(), g.boundary_mask()];
        let r = removable_set_check(
            &f,
            0.5,
            &SolverOptions::default(),
            &g.empty_mask(),
            &tests,
            0.0,
        )
        .unwrap();
        assert_eq!(r.capacity_of_removed, 0.0);
        assert_eq!(r.max_discrepancy, 0.0);
        assert!(r.removable);
    }

    #[test]
    fn removal_changes_capacities() {
        let g = interval(8);
        let f = ExponentField::constant(&g, 2.0, 2.0).unwrap();
        let removed = SetMask::from_cells(&g, &[4]).unwrap();
        let tests = vec![
            SetMask::from_cells(&g, &[2, 3]).unwrap(),
            SetMask::from_indices(&g, &[], &[1]).unwrap(),
        ];
        let r = removable_set_check(&f, 0.5, &SolverOptions::default(), &removed, &tests, 1e-6)
            .unwrap();
        assert!(r.capacity_of_removed > 1e-4);
        assert!(r.max_discrepancy > 0.0);
        assert!(!r.removable);
        let clash = vec![SetMask::from_cells(&g, &[4]).unwrap()];
        assert!(matches!(
            removable_set_check(&f, 0.5, &SolverOptions::default(), &removed, &clash, 1e-6),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn polarity_report_shape() {
        let d = Domain::interval(0.0, 1.0).unwrap();
        let r = boundary_polarity_check(
            &d,
            &[4, 8, 16],
            &ExponentSpec::Constant(2.0),
            &PairExponentSpec::Constant(2.0),
            0.5,
            &SolverOptions::default(),
        )
        .unwrap();
        assert_eq!(r.series.len(), 3);
        assert!(!r.verdict.is_empty());
    }
}
