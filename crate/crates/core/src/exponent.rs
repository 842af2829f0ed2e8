//! Variable exponents `q(x)` and `p(x, y)`.
//!
//! Bounds stored on an [`ExponentField`] are guaranteed enclosures: exact for
//! constant and tabulated rules, interval-arithmetic enclosures over the
//! domain box for expressions. [`ExponentField::exponent_bounds`] returns the
//! sampled extrema instead.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{Expr, Interval};
use crate::grid::{Grid, Point};

/// How `q` is given.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExponentSpec {
    Constant(f64),
    Expr(String),
    /// One value per grid cell.
    Table(Vec<f64>),
}

/// How `p` is given. Tables are square over grid cells; a `null` entry takes
/// the value of its transpose.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairExponentSpec {
    Constant(f64),
    Expr(String),
    Table(Vec<Vec<Option<f64>>>),
}

#[derive(Clone, Debug)]
enum PointRule {
    Constant(f64),
    Expr(Expr),
    Table(Vec<f64>),
}

#[derive(Clone, Debug)]
enum PairRule {
    Constant(f64),
    Expr(Expr),
    Table { n: usize, values: Vec<f64> },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentBounds {
    pub q_minus: f64,
    pub q_plus: f64,
    pub p_minus: f64,
    pub p_plus: f64,
}

/// Sampled modulus of continuity for the log-Hölder or (B-B) condition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularityEstimate {
    pub samples: usize,
    /// Smallest constant satisfying the inequality on the sampled pairs.
    pub modulus: f64,
    /// A maximizing pair, when the modulus is positive. For the two-point
    /// condition this is `((x, y), (x', y'))` flattened to four points.
    pub witness: Vec<Point>,
    pub pairs_checked: usize,
}

/// Moduli at increasing sample densities and whether they appear unbounded.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularityTrend {
    pub estimates: Vec<RegularityEstimate>,
    pub diverging: bool,
}

#[derive(Clone, Debug)]
pub struct ExponentField {
    grid: Arc<Grid>,
    q: PointRule,
    p: PairRule,
    q_spec: ExponentSpec,
    p_spec: PairExponentSpec,
    bounds: ExponentBounds,
}

const SYMMETRY_TOL: f64 = 1e-12;

fn check_range(name: &str, lo: f64, hi: f64) -> Result<()> {
    if !(lo > 1.0) || !hi.is_finite() {
        return Err(Error::InvalidExponent(format!(
            "{name} must satisfy 1 < {name}- <= {name}+ < inf, got range [{lo}, {hi}]"
        )));
    }
    Ok(())
}

impl ExponentField {
    pub fn new(grid: &Arc<Grid>, q: ExponentSpec, p: PairExponentSpec) -> Result<Self> {
        let domain = grid.domain();
        let dim = domain.dim();
        let boxes = [
            Interval::new(domain.lower()[0], domain.upper()[0]),
            Interval::new(domain.lower()[1], domain.upper()[1]),
        ];
        let dist = Interval::new(0.0, domain.diameter());

        let (q_rule, q_lo, q_hi) = match &q {
            ExponentSpec::Constant(c) => (PointRule::Constant(*c), *c, *c),
            ExponentSpec::Expr(src) => {
                let e = Expr::parse(src)?;
                if e.uses_second_point() {
                    return Err(Error::InvalidExponent(format!(
                        "q expression {src:?} may only read the coordinates of x"
                    )));
                }
                if e.max_axis().is_some_and(|a| a >= dim) {
                    return Err(Error::InvalidExponent(format!(
                        "q expression {src:?} reads a coordinate beyond dimension {dim}"
                    )));
                }
                let enc = e.enclose(boxes, dist);
                (PointRule::Expr(e), enc.lo, enc.hi)
            }
            ExponentSpec::Table(values) => {
                if values.len() != grid.num_cells() {
                    return Err(Error::InvalidExponent(format!(
                        "q table has {} entries, grid has {} cells",
                        values.len(),
                        grid.num_cells()
                    )));
                }
                let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidExponent(
                        "q table has non-finite entries".into(),
                    ));
                }
                (PointRule::Table(values.clone()), lo, hi)
            }
        };
        check_range("q", q_lo, q_hi)?;

        let (p_rule, p_lo, p_hi) = match &p {
            PairExponentSpec::Constant(c) => (PairRule::Constant(*c), *c, *c),
            PairExponentSpec::Expr(src) => {
                let e = Expr::parse(src)?;
                if e.max_axis().is_some_and(|a| a >= dim) {
                    return Err(Error::InvalidExponent(format!(
                        "p expression {src:?} reads a coordinate beyond dimension {dim}"
                    )));
                }
                check_pair_symmetry(&e, grid)?;
                let enc = e.enclose(boxes, dist);
                (PairRule::Expr(e), enc.lo, enc.hi)
            }
            PairExponentSpec::Table(rows) => {
                let n = grid.num_cells();
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(Error::InvalidExponent(format!(
                        "p table must be {n} x {n} over grid cells"
                    )));
                }
                let mut values = vec![0.0; n * n];
                for i in 0..n {
                    for j in i..n {
                        let v = match (rows[i][j], rows[j][i]) {
                            (Some(a), Some(b)) if a != b => {
                                return Err(Error::InvalidExponent(format!(
                                    "p table conflict at ({i}, {j}): {a} vs {b}"
                                )))
                            }
                            (Some(a), _) | (None, Some(a)) => a,
                            (None, None) => {
                                return Err(Error::InvalidExponent(format!(
                                    "p table has no value for pair ({i}, {j})"
                                )))
                            }
                        };
                        if !v.is_finite() {
                            return Err(Error::InvalidExponent(
                                "p table has non-finite entries".into(),
                            ));
                        }
                        values[i * n + j] = v;
                        values[j * n + i] = v;
                    }
                }
                let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                (PairRule::Table { n, values }, lo, hi)
            }
        };
        check_range("p", p_lo, p_hi)?;

        Ok(ExponentField {
            grid: grid.clone(),
            q: q_rule,
            p: p_rule,
            q_spec: q,
            p_spec: p,
            bounds: ExponentBounds {
                q_minus: q_lo,
                q_plus: q_hi,
                p_minus: p_lo,
                p_plus: p_hi,
            },
        })
    }

    pub fn constant(grid: &Arc<Grid>, q: f64, p: f64) -> Result<Self> {
        Self::new(
            grid,
            ExponentSpec::Constant(q),
            PairExponentSpec::Constant(p),
        )
    }

    /// The same field on a grid obtained from this one by deleting cells.
    /// Tabulated exponents are carried over by lattice position.
    pub fn restrict_to(&self, grid: &Arc<Grid>) -> Result<Self> {
        if grid.resolution() != self.grid.resolution()
            || grid.domain().lower() != self.grid.domain().lower()
            || grid.domain().upper() != self.grid.domain().upper()
        {
            return Err(Error::GridMismatch);
        }
        let old_index = grid
            .cells()
            .iter()
            .map(|c| {
                self.grid
                    .cell_at_lattice(c.lattice)
                    .ok_or(Error::GridMismatch)
            })
            .collect::<Result<Vec<_>>>()?;
        let q = match &self.q_spec {
            ExponentSpec::Table(v) => {
                ExponentSpec::Table(old_index.iter().map(|&i| v[i]).collect())
            }
            other => other.clone(),
        };
        let p = match &self.p_spec {
            PairExponentSpec::Table(rows) => PairExponentSpec::Table(
                old_index
                    .iter()
                    .map(|&i| {
                        old_index
                            .iter()
                            .map(|&j| rows[i][j].or(rows[j][i]))
                            .collect()
                    })
                    .collect(),
            ),
            other => other.clone(),
        };
        Self::new(grid, q, p)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn q_spec(&self) -> &ExponentSpec {
        &self.q_spec
    }

    pub fn p_spec(&self) -> &PairExponentSpec {
        &self.p_spec
    }

    /// Guaranteed bounds fixed at construction.
    pub fn bounds(&self) -> ExponentBounds {
        self.bounds
    }

    pub fn eval_q(&self, x: Point) -> Result<f64> {
        if !self.grid.domain().contains_closed(x) {
            return Err(Error::OutsideDomain(x));
        }
        Ok(match &self.q {
            PointRule::Constant(c) => *c,
            PointRule::Expr(e) => e.eval(x, x),
            PointRule::Table(v) => v[self.grid.locate(x).ok_or(Error::OutsideDomain(x))?],
        })
    }

    /// `p(x, y)`; bitwise symmetric because the arguments are put in
    /// lexicographic order before evaluation.
    pub fn eval_p(&self, x: Point, y: Point) -> Result<f64> {
        let domain = self.grid.domain();
        if !domain.contains_closed(x) {
            return Err(Error::OutsideDomain(x));
        }
        if !domain.contains_closed(y) {
            return Err(Error::OutsideDomain(y));
        }
        let (a, b) = if (x[0], x[1]) <= (y[0], y[1]) {
            (x, y)
        } else {
            (y, x)
        };
        Ok(match &self.p {
            PairRule::Constant(c) => *c,
            PairRule::Expr(e) => e.eval(a, b),
            PairRule::Table { n, values } => {
                let i = self.grid.locate(a).ok_or(Error::OutsideDomain(a))?;
                let j = self.grid.locate(b).ok_or(Error::OutsideDomain(b))?;
                values[i * n + j]
            }
        })
    }

    pub fn is_constant_q(&self) -> bool {
        matches!(self.q, PointRule::Constant(_))
    }

    pub fn is_constant_p(&self) -> bool {
        matches!(self.p, PairRule::Constant(_))
    }

    /// Lattice of `samples` points per axis spanning the domain box, kept where
    /// it meets the closed domain. With `samples = 2N + 1` on an `N`-cell axis
    /// this is the set of cell centres and faces.
    pub fn sample_lattice(&self, samples: usize) -> Vec<Point> {
        let domain = self.grid.domain();
        let dim = domain.dim();
        let coords = |axis: usize| -> Vec<f64> {
            let (lo, hi) = (domain.lower()[axis], domain.upper()[axis]);
            if samples == 1 {
                vec![0.5 * (lo + hi)]
            } else {
                (0..samples)
                    .map(|k| lo + (hi - lo) * k as f64 / (samples - 1) as f64)
                    .collect()
            }
        };
        let xs = coords(0);
        let ys = if dim == 2 { coords(1) } else { vec![0.0] };
        let mut pts = Vec::with_capacity(xs.len() * ys.len());
        for &x in &xs {
            for &y in &ys {
                let pt = [x, y];
                if domain.contains_closed(pt) {
                    pts.push(pt);
                }
            }
        }
        pts
    }

    /// Essential bounds: exact for constant and tabulated rules, min/max over
    /// the sample lattice for expressions.
    pub fn exponent_bounds(&self, samples: usize) -> Result<ExponentBounds> {
        if samples == 0 {
            return Err(Error::Parameter("samples must be at least 1".into()));
        }
        let lattice = self.sample_lattice(samples);
        let (q_minus, q_plus) = match &self.q {
            PointRule::Constant(c) => (*c, *c),
            PointRule::Table(v) => minmax(v.iter().copied()),
            PointRule::Expr(_) => {
                let vals = lattice
                    .iter()
                    .map(|&x| self.eval_q(x))
                    .collect::<Result<Vec<_>>>()?;
                minmax(vals)
            }
        };
        let (p_minus, p_plus) = match &self.p {
            PairRule::Constant(c) => (*c, *c),
            PairRule::Table { values, .. } => minmax(values.iter().copied()),
            PairRule::Expr(_) => {
                let mut vals = Vec::with_capacity(lattice.len() * lattice.len());
                for &x in &lattice {
                    for &y in &lattice {
                        vals.push(self.eval_p(x, y)?);
                    }
                }
                minmax(vals)
            }
        };
        if !(q_minus > 1.0) {
            return Err(Error::InvalidExponent(format!(
                "sampled q reaches {q_minus} <= 1"
            )));
        }
        if !(p_minus > 1.0) {
            return Err(Error::InvalidExponent(format!(
                "sampled p reaches {p_minus} <= 1"
            )));
        }
        Ok(ExponentBounds {
            q_minus,
            q_plus,
            p_minus,
            p_plus,
        })
    }

    /// `sup |q(x) - q(y)| * (-log |x - y|)` over lattice pairs with
    /// `0 < |x - y| <= 1/2`.
    pub fn check_log_holder(&self, samples: usize) -> Result<RegularityEstimate> {
        if samples < 2 {
            return Err(Error::Parameter(
                "log-Hölder check needs at least 2 samples".into(),
            ));
        }
        let lattice = self.sample_lattice(samples);
        let values = lattice
            .iter()
            .map(|&x| self.eval_q(x))
            .collect::<Result<Vec<_>>>()?;
        let mut best = RegularityEstimate {
            samples,
            modulus: 0.0,
            witness: Vec::new(),
            pairs_checked: 0,
        };
        for i in 0..lattice.len() {
            for j in (i + 1)..lattice.len() {
                let d = distance(lattice[i], lattice[j]);
                if d == 0.0 || d > 0.5 {
                    continue;
                }
                best.pairs_checked += 1;
                let m = (values[i] - values[j]).abs() * -d.ln();
                if m > best.modulus {
                    best.modulus = m;
                    best.witness = vec![lattice[i], lattice[j]];
                }
            }
        }
        Ok(best)
    }

    /// `sup |p(x, y) - p(x', y')| * (-log(|x - x'| + |y - y'|))` over lattice
    /// quadruples with `0 < |x - x'| + |y - y'| <= 1/2`.
    pub fn check_bb_condition(&self, samples: usize) -> Result<RegularityEstimate> {
        if samples < 2 {
            return Err(Error::Parameter(
                "(B-B) check needs at least 2 samples".into(),
            ));
        }
        let lattice = self.sample_lattice(samples);
        let m = lattice.len();
        let mut table = vec![0.0; m * m];
        for i in 0..m {
            for j in 0..m {
                table[i * m + j] = self.eval_p(lattice[i], lattice[j])?;
            }
        }
        let mut dists = vec![0.0; m * m];
        for i in 0..m {
            for j in 0..m {
                dists[i * m + j] = distance(lattice[i], lattice[j]);
            }
        }
        let mut best = RegularityEstimate {
            samples,
            modulus: 0.0,
            witness: Vec::new(),
            pairs_checked: 0,
        };
        for a in 0..m * m {
            let (x, y) = (a / m, a % m);
            for b in (a + 1)..m * m {
                let (xp, yp) = (b / m, b % m);
                let dx = dists[x * m + xp];
                if dx > 0.5 {
                    continue;
                }
                let d = dx + dists[y * m + yp];
                if d == 0.0 || d > 0.5 {
                    continue;
                }
                best.pairs_checked += 1;
                let v = (table[a] - table[b]).abs() * -d.ln();
                if v > best.modulus {
                    best.modulus = v;
                    best.witness = vec![lattice[x], lattice[y], lattice[xp], lattice[yp]];
                }
            }
        }
        Ok(best)
    }

    pub fn log_holder_refinement(&self, samples: &[usize]) -> Result<RegularityTrend> {
        let estimates = samples
            .iter()
            .map(|&s| self.check_log_holder(s))
            .collect::<Result<Vec<_>>>()?;
        Ok(RegularityTrend::from_estimates(estimates))
    }

    pub fn bb_refinement(&self, samples: &[usize]) -> Result<RegularityTrend> {
        let estimates = samples
            .iter()
            .map(|&s| self.check_bb_condition(s))
            .collect::<Result<Vec<_>>>()?;
        Ok(RegularityTrend::from_estimates(estimates))
    }
}

impl RegularityTrend {
    /// Flags divergence when the modulus keeps growing at a non-decaying rate
    /// per e-fold of sample density: a bounded modulus saturates, a jump grows
    /// like its height times `log(samples)`.
    pub fn from_estimates(estimates: Vec<RegularityEstimate>) -> Self {
        let slopes: Vec<f64> = estimates
            .windows(2)
            .map(|w| {
                let dl = (w[1].samples as f64).ln() - (w[0].samples as f64).ln();
                (w[1].modulus - w[0].modulus) / dl
            })
            .collect();
        let diverging = match (slopes.first(), slopes.last(), estimates.last()) {
            (Some(&first), Some(&last), Some(fin)) => {
                slopes.iter().all(|&s| s > 0.0) && last >= 0.5 * first && last >= 0.05 * fin.modulus
            }
            _ => false,
        };
        RegularityTrend {
            estimates,
            diverging,
        }
    }
}

fn minmax(values: impl IntoIterator<Item = f64>) -> (f64, f64) {
    values
        .into_iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        })
}

fn distance(a: Point, b: Point) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// Rejects pair expressions that are not symmetric on the grid's cell centres
/// and boundary nodes.
fn check_pair_symmetry(e: &Expr, grid: &Grid) -> Result<()> {
    let mut pts: Vec<Point> = grid.cells().iter().map(|c| c.center).collect();
    pts.extend(grid.boundary_nodes().iter().map(|b| b.point));
    let stride = (pts.len() / 256).max(1);
    let pts: Vec<Point> = pts.into_iter().step_by(stride).collect();
    for (i, &x) in pts.iter().enumerate() {
        for &y in &pts[i + 1..] {
            let a = e.eval(x, y);
            let b = e.eval(y, x);
            if (a - b).abs() > SYMMETRY_TOL * (1.0 + a.abs()) {
                return Err(Error::InvalidExponent(format!(
                    "p expression is not symmetric: p({x:?}, {y:?}) = {a} but p(y, x) = {b}"
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Domain;

    fn interval(n: usize) -> Arc<Grid> {
        Grid::build(&Domain::interval(0.0, 1.0).unwrap(), [n, 1]).unwrap()
    }

    fn expr_field(g: &Arc<Grid>, q: &str, p: &str) -> ExponentField {
        ExponentField::new(
            g,
            ExponentSpec::Expr(q.into()),
            PairExponentSpec::Expr(p.into()),
        )
        .unwrap()
    }

    #[test]
    fn eval_examples() {
        let g = interval(4);
        let c = ExponentField::constant(&g, 2.0, 2.0).unwrap();
        assert_eq!(c.eval_q([0.3, 0.0]).unwrap(), 2.0);
        assert_eq!(c.eval_p([0.3, 0.0], [0.9, 0.0]).unwrap(), 2.0);

        let e = expr_field(&g, "2 + x", "2 + |x-y|");
        assert_eq!(e.eval_q([0.5, 0.0]).unwrap(), 2.5);
        assert_eq!(e.eval_p([0.0, 0.0], [1.0, 0.0]).unwrap(), 3.0);

        let t = ExponentField::new(
            &g,
            ExponentSpec::Table(vec![2.0, 3.0, 2.0, 3.0]),
            PairExponentSpec::Constant(2.0),
        )
        .unwrap();
        assert_eq!(t.eval_q(g.cell_center(1)).unwrap(), 3.0);
    }

    #[test]
    fn outside_domain_is_an_error() {
        let g = interval(4);
        let c = ExponentField::constant(&g, 2.0, 2.0).unwrap();
        assert!(matches!(c.eval_q([1.5, 0.0]), Err(Error::OutsideDomain(_))));
        assert!(matches!(
            c.eval_p([0.5, 0.0], [-0.5, 0.0]),
            Err(Error::OutsideDomain(_))
        ));
    }

    #[test]
    fn rejects_exponents_at_or_below_one() {
        let g = interval(4);
        assert!(ExponentField::constant(&g, 1.0, 2.0).is_err());
        assert!(ExponentField::constant(&g, 2.0, 0.5).is_err());
        assert!(ExponentField::new(
            &g,
            ExponentSpec::Expr("1 + x".into()),
            PairExponentSpec::Constant(2.0)
        )
        .is_err());
        assert!(ExponentField::new(
            &g,
            ExponentSpec::Expr("2 + dist".into()),
            PairExponentSpec::Constant(2.0)
        )
        .is_err());
    }

    #[test]
    fn asymmetric_pair_expression_rejected() {
        let g = interval(4);
        let r = ExponentField::new(
            &g,
            ExponentSpec::Constant(2.0),
            PairExponentSpec::Expr("2 + x".into()),
        );
        assert!(matches!(r, Err(Error::InvalidExponent(_))));
        // symmetric combination of coordinates is fine
        expr_field(&g, "2", "2 + x + y");
    }

    #[test]
    fn table_symmetrization() {
        let g = interval(2);
        let f = ExponentField::new(
            &g,
            ExponentSpec::Constant(2.0),
            PairExponentSpec::Table(vec![vec![Some(2.0), Some(3.0)], vec![None, Some(2.5)]]),
        )
        .unwrap();
        let (a, b) = (g.cell_center(0), g.cell_center(1));
        assert_eq!(f.eval_p(a, b).unwrap(), 3.0);
        assert_eq!(f.eval_p(b, a).unwrap(), 3.0);
        let conflict = ExponentField::new(
            &g,
            ExponentSpec::Constant(2.0),
            PairExponentSpec::Table(vec![vec![Some(2.0), Some(3.0)], vec![Some(4.0), Some(2.5)]]),
        );
        assert!(conflict.is_err());
    }

    #[test]
    fn bounds_examples() {
        let g = interval(4);
        let c = ExponentField::constant(&g, 2.0, 3.0).unwrap();
        let b = c.exponent_bounds(5).unwrap();
        assert_eq!(
            (b.q_minus, b.q_plus, b.p_minus, b.p_plus),
            (2.0, 2.0, 3.0, 3.0)
        );

        let e = expr_field(&g, "2 + x", "2");
        let b = e.exponent_bounds(1001).unwrap();
        assert!((b.q_minus - 2.0).abs() < 1e-3 && (b.q_plus - 3.0).abs() < 1e-3);

        let g3 = interval(3);
        let t = ExponentField::new(
            &g3,
            ExponentSpec::Table(vec![2.0, 5.0, 3.0]),
            PairExponentSpec::Constant(2.0),
        )
        .unwrap();
        let b = t.exponent_bounds(3).unwrap();
        assert_eq!((b.q_minus, b.q_plus), (2.0, 5.0));
        assert!(t.exponent_bounds(0).is_err());
    }

    #[test]
    fn constant_field_has_zero_modulus() {
        let g = interval(4);
        let c = ExponentField::constant(&g, 2.5, 3.0).unwrap();
        assert_eq!(c.check_log_holder(21).unwrap().modulus, 0.0);
        assert_eq!(c.check_bb_condition(9).unwrap().modulus, 0.0);
    }

    #[test]
    fn linear_q_matches_lattice_oracle() {
        let g = interval(4);
        let e = expr_field(&g, "2 + x", "2");
        let samples = 41;
        let est = e.check_log_holder(samples).unwrap();
        // |q(x)-q(y)| = |x-y| = t on the lattice t = k/40
        let oracle = (1..=20)
            .map(|k| {
                let t = k as f64 / 40.0;
                t * -t.ln()
            })
            .fold(0.0, f64::max);
        assert!((est.modulus - oracle).abs() < 1e-6);
        assert!(est.modulus <= 1.0 / std::f64::consts::E + 1e-12);
    }

    #[test]
    fn jump_in_q_diverges_linear_q_does_not() {
        let g2 = interval(2);
        let jump = ExponentField::new(
            &g2,
            ExponentSpec::Table(vec![2.0, 3.0]),
            PairExponentSpec::Constant(2.0),
        )
        .unwrap();
        let trend = jump.log_holder_refinement(&[11, 21, 41]).unwrap();
        assert!(trend.diverging, "{trend:?}");
        assert!(trend.estimates[2].modulus > trend.estimates[0].modulus + 1.0);

        let g = interval(4);
        let smooth = expr_field(&g, "2 + x", "2");
        assert!(
            !smooth
                .log_holder_refinement(&[11, 21, 41])
                .unwrap()
                .diverging
        );
    }

    #[test]
    fn bb_examples() {
        let g = interval(4);
        let e = expr_field(&g, "2", "2 + |x-y|");
        let samples = 9;
        let est = e.check_bb_condition(samples).unwrap();
        // oracle: brute force over all quadruples of the lattice k/8
        let pts: Vec<f64> = (0..samples).map(|k| k as f64 / 8.0).collect();
        let mut oracle: f64 = 0.0;
        for &x in &pts {
            for &y in &pts {
                for &xp in &pts {
                    for &yp in &pts {
                        let d = (x - xp).abs() + (y - yp).abs();
                        if d > 0.0 && d <= 0.5 {
                            let num = ((x - y).abs() - (xp - yp).abs()).abs();
                            oracle = oracle.max(num * -d.ln());
                        }
                    }
                }
            }
        }
        assert!(
            (est.modulus - oracle).abs() < 1e-6,
            "{} vs {oracle}",
            est.modulus
        );

        let g2 = interval(2);
        let jump = ExponentField::new(
            &g2,
            ExponentSpec::Constant(2.0),
            PairExponentSpec::Table(vec![vec![Some(2.0), Some(3.0)], vec![Some(3.0), Some(2.0)]]),
        )
        .unwrap();
        assert!(jump.bb_refinement(&[5, 9, 17]).unwrap().diverging);
        assert!(!e.bb_refinement(&[5, 9, 17]).unwrap().diverging);
    }

    #[test]
    fn symmetric_on_random_pairs() {
        use rand::{Rng, SeedableRng};
        let g = Grid::build(&Domain::unit_square(), [4, 4]).unwrap();
        let e = expr_field(&g, "2 + 0.5*x0*x1", "2 + 0.3*dist + 0.1*(x0 + y0)");
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let a = [rng.gen::<f64>(), rng.gen::<f64>()];
            let b = [rng.gen::<f64>(), rng.gen::<f64>()];
            assert_eq!(
                e.eval_p(a, b).unwrap().to_bits(),
                e.eval_p(b, a).unwrap().to_bits()
            );
        }
    }

    #[test]
    fn values_within_constructed_bounds() {
        let g = Grid::build(&Domain::unit_square(), [6, 6]).unwrap();
        let e = expr_field(&g, "2 + max(x0, x1) * 0.5", "1.5 + min(dist, 0.7)");
        let b = e.bounds();
        for c in g.cells() {
            let q = e.eval_q(c.center).unwrap();
            assert!(b.q_minus <= q && q <= b.q_plus);
            for d in g.cells() {
                let p = e.eval_p(c.center, d.center).unwrap();
                assert!(b.p_minus <= p && p <= b.p_plus);
            }
        }
    }
}
