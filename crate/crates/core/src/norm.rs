//! Luxembourg-type norms by bisection on the scaling `lambda -> rho(u / lambda)`.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exponent::ExponentField;
use crate::function::GridFunction;
use crate::modular::{abs_pow, SobolevModular};
use crate::summation::pairwise_sum_by;

/// Bisection stops once the bracket is narrower than this fraction of its
/// lower end.
pub const RELATIVE_WIDTH: f64 = 1e-10;
const LOWER_START: f64 = 1e-300;
const MAX_BISECTIONS: usize = 5000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub value: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
    /// `|rho(u / value) - 1|`, zero for the zero function.
    pub residual: f64,
}

impl NormReport {
    fn zero() -> Self {
        NormReport {
            value: 0.0,
            bracket: (0.0, 0.0),
            iterations: 0,
            residual: 0.0,
        }
    }
}

/// `inf { lambda > 0 : rho(u / lambda) <= 1 }` where `rho_at(t)` evaluates the
/// modular of `t * u`, `rho_one = rho(u)` and `sup = max |u|`.
pub fn luxembourg_root<F: Fn(f64) -> f64>(rho_at: F, rho_one: f64, sup: f64) -> NormReport {
    if rho_one == 0.0 {
        return NormReport::zero();
    }
    let mut iterations = 0;
    let mut hi = rho_one.max(1.0) * (1.0 + sup);
    while rho_at(1.0 / hi) > 1.0 {
        hi *= 2.0;
        iterations += 1;
    }
    let mut lo = LOWER_START;
    while hi - lo > RELATIVE_WIDTH * lo && iterations < MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if rho_at(1.0 / mid) <= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    let value = 0.5 * (lo + hi);
    NormReport {
        value,
        bracket: (lo, hi),
        iterations,
        residual: (rho_at(1.0 / value) - 1.0).abs(),
    }
}

impl SobolevModular {
    pub fn luxembourg_norm(&self, u: &GridFunction) -> Result<NormReport> {
        let rho_one = self.lebesgue(u)?;
        let cells = u.cells();
        Ok(luxembourg_root(
            |t| self.lebesgue_cells(cells, t),
            rho_one,
            u.sup_norm_cells(),
        ))
    }

    pub fn gagliardo_seminorm(&self, u: &GridFunction) -> Result<NormReport> {
        let rho_one = self.gagliardo(u)?;
        let cells = u.cells();
        Ok(luxembourg_root(
            |t| self.gagliardo_cells(cells, t),
            rho_one,
            u.sup_norm_cells(),
        ))
    }

    /// `||u||_{L^q} + [u]_{s,p}`.
    pub fn sobolev_norm(&self, u: &GridFunction) -> Result<f64> {
        Ok(self.luxembourg_norm(u)?.value + self.gagliardo_seminorm(u)?.value)
    }

    /// Norm induced by the full modular.
    pub fn modular_norm(&self, u: &GridFunction) -> Result<NormReport> {
        let rho_one = self.evaluate(u)?.total;
        let cells = u.cells();
        Ok(luxembourg_root(
            |t| self.breakdown_cells(cells, t).total,
            rho_one,
            u.sup_norm_cells(),
        ))
    }
}

/// Luxembourg norm of `u` in `L^q`.
pub fn luxembourg_norm(u: &GridFunction, field: &ExponentField) -> Result<NormReport> {
    let grid = u.grid();
    let q = grid
        .cells()
        .iter()
        .map(|c| field.eval_q(c.center))
        .collect::<Result<Vec<_>>>()?;
    let cells = u.cells();
    let h = grid.cell_measure();
    let rho = |t: f64| pairwise_sum_by(cells.len(), |i| abs_pow(t * cells[i], q[i])) * h;
    let rho_one = rho(1.0);
    if !rho_one.is_finite() {
        return Err(crate::Error::NonFinite("Lebesgue modular"));
    }
    Ok(luxembourg_root(rho, rho_one, u.sup_norm_cells()))
}

pub fn gagliardo_seminorm(u: &GridFunction, field: &ExponentField, s: f64) -> Result<NormReport> {
    SobolevModular::new(u.grid(), field, s)?.gagliardo_seminorm(u)
}

pub fn sobolev_norm(u: &GridFunction, field: &ExponentField, s: f64) -> Result<f64> {
    SobolevModular::new(u.grid(), field, s)?.sobolev_norm(u)
}

pub fn modular_norm(u: &GridFunction, field: &ExponentField, s: f64) -> Result<NormReport> {
    SobolevModular::new(u.grid(), field, s)?.modular_norm(u)
}
