//! Grid functions: one value per cell and one per boundary node.
//!
//! Boundary values never enter the integrals; they only take part in
//! admissibility constraints and trace checks.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::grid::{Grid, SetMask};

#[derive(Clone, Debug)]
pub struct GridFunction {
    grid: Arc<Grid>,
    cells: Vec<f64>,
    boundary: Vec<f64>,
}

/// Flat serialized values: cells first, then boundary nodes, both in grid order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionValues {
    pub cells: Vec<f64>,
    pub boundary: Vec<f64>,
}

impl PartialEq for GridFunction {
    fn eq(&self, other: &Self) -> bool {
        same_grid(&self.grid, &other.grid)
            && self.cells == other.cells
            && self.boundary == other.boundary
    }
}

fn same_grid(a: &Arc<Grid>, b: &Arc<Grid>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl GridFunction {
    pub fn new(grid: &Arc<Grid>, cells: Vec<f64>, boundary: Vec<f64>) -> Result<Self> {
        if cells.len() != grid.num_cells() || boundary.len() != grid.num_boundary() {
            return Err(Error::Usage(format!(
                "function has {} cell and {} boundary values, grid has {} and {}",
                cells.len(),
                boundary.len(),
                grid.num_cells(),
                grid.num_boundary()
            )));
        }
        if cells.iter().chain(&boundary).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("grid function values"));
        }
        Ok(GridFunction {
            grid: grid.clone(),
            cells,
            boundary,
        })
    }

    /// Flat array in node order: all cells, then all boundary nodes.
    pub fn from_flat(grid: &Arc<Grid>, values: &[f64]) -> Result<Self> {
        let nc = grid.num_cells();
        if values.len() != nc + grid.num_boundary() {
            return Err(Error::Usage(format!(
                "expected {} values ({} cells + {} boundary nodes), got {}",
                nc + grid.num_boundary(),
                nc,
                grid.num_boundary(),
                values.len()
            )));
        }
        Self::new(grid, values[..nc].to_vec(), values[nc..].to_vec())
    }

    pub fn constant(grid: &Arc<Grid>, c: f64) -> Self {
        GridFunction {
            grid: grid.clone(),
            cells: vec![c; grid.num_cells()],
            boundary: vec![c; grid.num_boundary()],
        }
    }

    pub fn zeros(grid: &Arc<Grid>) -> Self {
        Self::constant(grid, 0.0)
    }

    /// Characteristic function of a mask.
    pub fn indicator(grid: &Arc<Grid>, mask: &SetMask) -> Result<Self> {
        grid.check_mask(mask)?;
        Ok(GridFunction {
            grid: grid.clone(),
            cells: mask
                .cell_flags()
                .iter()
                .map(|&f| if f { 1.0 } else { 0.0 })
                .collect(),
            boundary: mask
                .boundary_flags()
                .iter()
                .map(|&f| if f { 1.0 } else { 0.0 })
                .collect(),
        })
    }

    /// Samples a closed-form expression of the point `x` at every node.
    pub fn from_expr(grid: &Arc<Grid>, src: &str) -> Result<Self> {
        let e = Expr::parse(src)?;
        if e.uses_second_point() {
            return Err(Error::Expression(format!(
                "function expression {src:?} may only read the coordinates of x"
            )));
        }
        if e.max_axis().is_some_and(|a| a >= grid.dim()) {
            return Err(Error::Expression(format!(
                "function expression {src:?} reads a coordinate beyond dimension {}",
                grid.dim()
            )));
        }
        let cells = grid
            .cells()
            .iter()
            .map(|c| e.eval(c.center, c.center))
            .collect();
        let boundary = grid
            .boundary_nodes()
            .iter()
            .map(|b| e.eval(b.point, b.point))
            .collect();
        Self::new(grid, cells, boundary)
    }

    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn([f64; 2]) -> f64) -> Result<Self> {
        let cells = grid.cells().iter().map(|c| f(c.center)).collect();
        let boundary = grid.boundary_nodes().iter().map(|b| f(b.point)).collect();
        Self::new(grid, cells, boundary)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn cells(&self) -> &[f64] {
        &self.cells
    }

    pub fn boundary(&self) -> &[f64] {
        &self.boundary
    }

    pub fn cells_mut(&mut self) -> &mut [f64] {
        &mut self.cells
    }

    pub fn boundary_mut(&mut self) -> &mut [f64] {
        &mut self.boundary
    }

    pub fn to_values(&self) -> FunctionValues {
        FunctionValues {
            cells: self.cells.clone(),
            boundary: self.boundary.clone(),
        }
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.cells.iter().chain(&self.boundary).copied().collect()
    }

    /// `max |u|` over cells.
    pub fn sup_norm_cells(&self) -> f64 {
        self.cells.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max |u|` over all nodes.
    pub fn sup_norm(&self) -> f64 {
        self.cells
            .iter()
            .chain(&self.boundary)
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_zero_on_cells(&self) -> bool {
        self.cells.iter().all(|&v| v == 0.0)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridFunction {
        GridFunction {
            grid: self.grid.clone(),
            cells: self.cells.iter().map(|&v| f(v)).collect(),
            boundary: self.boundary.iter().map(|&v| f(v)).collect(),
        }
    }

    fn zip_with(&self, other: &GridFunction, f: impl Fn(f64, f64) -> f64) -> Result<GridFunction> {
        if !same_grid(&self.grid, &other.grid) {
            return Err(Error::GridMismatch);
        }
        Ok(GridFunction {
            grid: self.grid.clone(),
            cells: self
                .cells
                .iter()
                .zip(&other.cells)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            boundary: self
                .boundary
                .iter()
                .zip(&other.boundary)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn pointwise_max(&self, other: &GridFunction) -> Result<GridFunction> {
        self.zip_with(other, f64::max)
    }

    pub fn pointwise_min(&self, other: &GridFunction) -> Result<GridFunction> {
        self.zip_with(other, f64::min)
    }

    /// `u+ = max(u, 0)`.
    pub fn positive_part(&self) -> GridFunction {
        self.map(|v| v.max(0.0))
    }

    /// `u- = max(-u, 0)`, so that `u = u+ - u-`.
    pub fn negative_part(&self) -> GridFunction {
        self.map(|v| (-v).max(0.0))
    }

    /// `max(min(u, level), -level)`.
    pub fn truncate(&self, level: f64) -> Result<GridFunction> {
        if !(level > 0.0) {
            return Err(Error::Parameter(format!(
                "truncation level must be positive, got {level}"
            )));
        }
        Ok(self.map(|v| v.min(level).max(-level)))
    }

    /// `alpha * u + beta * v`.
    pub fn scale_and_combine(
        alpha: f64,
        u: &GridFunction,
        beta: f64,
        v: &GridFunction,
    ) -> Result<GridFunction> {
        u.zip_with(v, |a, b| alpha * a + beta * b)
    }

    pub fn scaled(&self, alpha: f64) -> GridFunction {
        self.map(|v| alpha * v)
    }

    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn abs(&self) -> GridFunction {
        self.map(f64::abs)
    }
}
