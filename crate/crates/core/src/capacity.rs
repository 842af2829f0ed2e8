//! Relative capacity by projected-gradient minimization of the modular over
//! grid functions that equal one on the set and lie in `[0, 1]` elsewhere.
//!
//! Truncation to `[0, 1]` never increases the modular and keeps admissibility,
//! so the box constraint leaves the infimum unchanged. The iteration uses a
//! Barzilai-Borwein trial step along the projection arc with Armijo
//! backtracking. Boundary values do not enter the modular; in the
//! equilibrium potential they are one on the set and zero elsewhere.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::ExponentField;
use crate::function::{FunctionValues, GridFunction};
use crate::grid::{Grid, MaskIndices, SetMask};
use crate::modular::SobolevModular;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    /// Stop once the projected-gradient norm falls below this.
    pub gradient_tolerance: f64,
    /// Stop once the relative objective decrease stays below this for
    /// `stall_window` consecutive iterations and the projected-gradient norm
    /// is below `stall_residual`.
    pub objective_tolerance: f64,
    pub stall_window: usize,
    pub stall_residual: f64,
    pub max_iterations: usize,
    pub armijo_slope: f64,
    pub backtrack_factor: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            gradient_tolerance: 1e-8,
            objective_tolerance: 1e-10,
            stall_window: 5,
            stall_residual: 1e-6,
            max_iterations: 50_000,
            armijo_slope: 1e-4,
            backtrack_factor: 0.5,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        let ok = self.gradient_tolerance > 0.0
            && self.objective_tolerance >= 0.0
            && self.stall_window >= 1
            && self.stall_residual >= self.gradient_tolerance
            && self.max_iterations >= 1
            && self.armijo_slope > 0.0
            && self.armijo_slope < 1.0
            && self.backtrack_factor > 0.0
            && self.backtrack_factor < 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Parameter(format!("invalid solver options {self:?}")))
        }
    }
}

#[derive(Clone, Debug)]
pub struct CapacityResult {
    pub value: f64,
    pub equilibrium: GridFunction,
    pub iterations: usize,
    /// Euclidean norm of the projected gradient at the returned iterate.
    pub residual: f64,
    pub admissible_set: SetMask,
}

/// Serializable form of a [`CapacityResult`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapacityRecord {
    pub value: f64,
    pub iterations: usize,
    pub residual: f64,
    pub admissible_set: MaskIndices,
    pub equilibrium: FunctionValues,
}

impl CapacityResult {
    pub fn to_record(&self) -> CapacityRecord {
        CapacityRecord {
            value: self.value,
            iterations: self.iterations,
            residual: self.residual,
            admissible_set: self.admissible_set.to_indices(),
            equilibrium: self.equilibrium.to_values(),
        }
    }
}

/// Capacity computations for one grid, exponent field and order.
#[derive(Clone, Debug)]
pub struct CapacitySolver {
    modular: SobolevModular,
    options: SolverOptions,
}

impl CapacitySolver {
    pub fn new(
        grid: &Arc<Grid>,
        field: &ExponentField,
        s: f64,
        options: SolverOptions,
    ) -> Result<Self> {
        options.validate()?;
        Ok(CapacitySolver {
            modular: SobolevModular::new(grid, field, s)?,
            options,
        })
    }

    pub fn from_modular(modular: SobolevModular, options: SolverOptions) -> Result<Self> {
        options.validate()?;
        Ok(CapacitySolver { modular, options })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.modular.grid()
    }

    pub fn modular(&self) -> &SobolevModular {
        &self.modular
    }

    pub fn options(&self) -> &SolverOptions {
        &self.options
    }

    /// Capacity of a relatively open set given directly as a mask, starting
    /// from its indicator function.
    pub fn capacity_relative_open(&self, open: &SetMask) -> Result<CapacityResult> {
        self.grid().check_mask(open)?;
        let start: Vec<f64> = open
            .cell_flags()
            .iter()
            .map(|&f| if f { 1.0 } else { 0.0 })
            .collect();
        self.minimize(open, start)
    }

    /// As [`Self::capacity_relative_open`] from a caller-chosen start, which
    /// is projected onto the admissible box first.
    pub fn capacity_relative_open_from(
        &self,
        open: &SetMask,
        initial: &GridFunction,
    ) -> Result<CapacityResult> {
        self.grid().check_mask(open)?;
        if !(Arc::ptr_eq(initial.grid(), self.grid()) || **initial.grid() == **self.grid()) {
            return Err(Error::GridMismatch);
        }
        self.minimize(open, initial.cells().to_vec())
    }

    /// Capacity of an arbitrary set: that of its one-ring open hull.
    pub fn capacity_set(&self, set: &SetMask) -> Result<CapacityResult> {
        let hull = self.grid().open_neighborhood(set)?;
        self.capacity_relative_open(&hull)
    }

    pub fn equilibrium_potential(&self, open: &SetMask) -> Result<GridFunction> {
        Ok(self.capacity_relative_open(open)?.equilibrium)
    }

    /// Modular of the admissible function obtained from `u` by clamping to
    /// `[0, 1]` and setting one on `open`; an upper bound for the capacity of
    /// `open`. Requires `u >= 1` on `open`.
    pub fn capacity_upper_bound(&self, u: &GridFunction, open: &SetMask) -> Result<f64> {
        let grid = self.grid();
        grid.check_mask(open)?;
        if !(Arc::ptr_eq(u.grid(), grid) || **u.grid() == **grid) {
            return Err(Error::GridMismatch);
        }
        if let Some(i) = open.cell_indices().find(|&i| !(u.cells()[i] >= 1.0)) {
            return Err(Error::Admissibility(format!(
                "u = {} < 1 on cell {i} of the set",
                u.cells()[i]
            )));
        }
        if let Some(i) = open.boundary_indices().find(|&i| !(u.boundary()[i] >= 1.0)) {
            return Err(Error::Admissibility(format!(
                "u = {} < 1 on boundary node {i} of the set",
                u.boundary()[i]
            )));
        }
        let cells: Vec<f64> = u
            .cells()
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                if open.has_cell(i) {
                    1.0
                } else {
                    v.clamp(0.0, 1.0)
                }
            })
            .collect();
        Ok(self.modular.total_cells(&cells))
    }

    fn finish(
        &self,
        open: &SetMask,
        cells: Vec<f64>,
        value: f64,
        iterations: usize,
        residual: f64,
    ) -> Result<CapacityResult> {
        let boundary = open
            .boundary_flags()
            .iter()
            .map(|&f| if f { 1.0 } else { 0.0 })
            .collect();
        Ok(CapacityResult {
            value,
            equilibrium: GridFunction::new(self.grid(), cells, boundary)?,
            iterations,
            residual,
            admissible_set: open.clone(),
        })
    }

    fn minimize(&self, open: &SetMask, start: Vec<f64>) -> Result<CapacityResult> {
        let n = self.modular.num_cells();
        if open.is_empty() {
            return self.finish(open, vec![0.0; n], 0.0, 0, 0.0);
        }
        let free: Vec<usize> = (0..n).filter(|&i| !open.has_cell(i)).collect();
        let project = |x: &mut [f64]| {
            for (i, v) in x.iter_mut().enumerate() {
                *v = if open.has_cell(i) {
                    1.0
                } else {
                    v.clamp(0.0, 1.0)
                };
            }
        };
        let mut x = start;
        project(&mut x);
        let mut f = self.modular.total_cells(&x);
        if free.is_empty() {
            return self.finish(open, x, f, 0, 0.0);
        }
        let mut g = self.modular.gradient_cells(&x);

        let pg_norm = |x: &[f64], g: &[f64]| -> f64 {
            free.iter()
                .map(|&i| {
                    let d = (x[i] - g[i]).clamp(0.0, 1.0) - x[i];
                    d * d
                })
                .sum::<f64>()
                .sqrt()
        };

        let opts = &self.options;
        let pg0 = free
            .iter()
            .map(|&i| ((x[i] - g[i]).clamp(0.0, 1.0) - x[i]).abs())
            .fold(0.0, f64::max);
        let mut alpha = if pg0 > 0.0 {
            (1.0 / pg0).clamp(1e-12, 1e12)
        } else {
            1.0
        };
        let mut stall = 0;
        let mut trial = x.clone();

        for iteration in 0..opts.max_iterations {
            let residual = pg_norm(&x, &g);
            if residual < opts.gradient_tolerance
                || (stall >= opts.stall_window && residual < opts.stall_residual)
            {
                return self.finish(open, x, f, iteration, residual);
            }

            // d = P(x - alpha g) - x on free cells
            let mut dir = vec![0.0; n];
            let mut slope = 0.0;
            for &i in &free {
                dir[i] = (x[i] - alpha * g[i]).clamp(0.0, 1.0) - x[i];
                slope += g[i] * dir[i];
            }
            if !(slope < 0.0) {
                // the scaled step collapsed onto the box; retry with unit scaling
                alpha = 1.0;
                stall += 1;
                continue;
            }

            let mut t = 1.0;
            let mut accepted = None;
            for _ in 0..80 {
                for i in 0..n {
                    trial[i] = x[i] + t * dir[i];
                }
                let ft = self.modular.total_cells(&trial);
                if ft <= f + opts.armijo_slope * t * slope {
                    accepted = Some(ft);
                    break;
                }
                t *= opts.backtrack_factor;
            }
            let Some(f_new) = accepted else {
                // no representable decrease left
                return self.finish(open, x, f, iteration, residual);
            };

            let g_new = self.modular.gradient_cells(&trial);
            let mut ss = 0.0;
            let mut sy = 0.0;
            for &i in &free {
                let si = trial[i] - x[i];
                ss += si * si;
                sy += si * (g_new[i] - g[i]);
            }
            alpha = if sy > 0.0 {
                (ss / sy).clamp(1e-12, 1e12)
            } else {
                1e12
            };

            let decrease = (f - f_new) / f_new.abs().max(f64::MIN_POSITIVE);
            if decrease < opts.objective_tolerance {
                stall += 1;
            } else {
                stall = 0;
            }
            std::mem::swap(&mut x, &mut trial);
            f = f_new;
            g = g_new;
        }

        let residual = pg_norm(&x, &g);
        let best = self.finish(open, x, f, opts.max_iterations, residual)?;
        Err(Error::NotConverged(Box::new(best)))
    }
}
