//! Uniform cell-centred grids on intervals and rectangles with rectangular
//! holes, plus subsets of the closed domain.
//!
//! Cells are ordered lexicographically by lattice position (axis 0 slowest).
//! The boundary is carried as zero-measure nodes placed at the midpoints of
//! faces that separate an active cell from the exterior or from a hole;
//! boundary nodes are ordered lexicographically by coordinates.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of the plane; in one dimension the second coordinate is zero.
pub type Point = [f64; 2];

const ALIGN_TOL: f64 = 1e-9;

/// Closed axis-aligned box removed from the domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hole {
    pub lower: [f64; 2],
    pub upper: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainSpec {
    Interval {
        bounds: [f64; 2],
        #[serde(default)]
        holes: Vec<[f64; 2]>,
    },
    Rectangle {
        lower: [f64; 2],
        upper: [f64; 2],
        #[serde(default)]
        holes: Vec<Hole>,
    },
}

/// A bounded open set: an interval or rectangle minus finitely many closed
/// boxes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DomainSpec", into = "DomainSpec")]
pub struct Domain {
    dim: usize,
    lower: [f64; 2],
    upper: [f64; 2],
    holes: Vec<Hole>,
}

impl Domain {
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::checked(1, [a, 0.0], [b, 0.0], Vec::new())
    }

    pub fn rectangle(lower: [f64; 2], upper: [f64; 2]) -> Result<Self> {
        Self::checked(2, lower, upper, Vec::new())
    }

    pub fn unit_square() -> Self {
        Self::rectangle([0.0, 0.0], [1.0, 1.0]).expect("unit square is valid")
    }

    /// Removes the closed box `[lower, upper]`; in one dimension only the first
    /// coordinate of each corner is read.
    pub fn with_hole(mut self, lower: [f64; 2], upper: [f64; 2]) -> Result<Self> {
        let (lower, upper) = if self.dim == 1 {
            ([lower[0], 0.0], [upper[0], 0.0])
        } else {
            (lower, upper)
        };
        for axis in 0..self.dim {
            if !(lower[axis].is_finite() && upper[axis].is_finite() && lower[axis] < upper[axis]) {
                return Err(Error::Construction(format!(
                    "hole [{lower:?}, {upper:?}] must have positive width on every axis"
                )));
            }
        }
        self.holes.push(Hole { lower, upper });
        Ok(self)
    }

    fn checked(dim: usize, lower: [f64; 2], upper: [f64; 2], holes: Vec<Hole>) -> Result<Self> {
        for axis in 0..dim {
            if !(lower[axis].is_finite() && upper[axis].is_finite() && lower[axis] < upper[axis]) {
                return Err(Error::Construction(format!(
                    "empty or unbounded extent on axis {axis}: [{}, {}]",
                    lower[axis], upper[axis]
                )));
            }
        }
        let mut domain = Domain {
            dim,
            lower,
            upper,
            holes: Vec::new(),
        };
        for h in holes {
            domain = domain.with_hole(h.lower, h.upper)?;
        }
        Ok(domain)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lower(&self) -> [f64; 2] {
        self.lower
    }

    pub fn upper(&self) -> [f64; 2] {
        self.upper
    }

    pub fn holes(&self) -> &[Hole] {
        &self.holes
    }

    pub fn diameter(&self) -> f64 {
        let mut d2 = 0.0;
        for axis in 0..self.dim {
            d2 += (self.upper[axis] - self.lower[axis]).powi(2);
        }
        d2.sqrt()
    }

    /// Membership in the closure of the domain.
    pub fn contains_closed(&self, x: Point) -> bool {
        let tol = 1e-12 * (1.0 + self.diameter());
        for axis in 0..2 {
            if axis < self.dim {
                if !(x[axis] >= self.lower[axis] - tol && x[axis] <= self.upper[axis] + tol) {
                    return false;
                }
            } else if x[axis] != 0.0 {
                return false;
            }
        }
        !self.holes.iter().any(|h| {
            (0..self.dim).all(|axis| x[axis] > h.lower[axis] + tol && x[axis] < h.upper[axis] - tol)
        })
    }

    fn in_hole(&self, x: Point) -> bool {
        self.holes
            .iter()
            .any(|h| (0..self.dim).all(|axis| x[axis] >= h.lower[axis] && x[axis] <= h.upper[axis]))
    }
}

impl TryFrom<DomainSpec> for Domain {
    type Error = Error;

    fn try_from(spec: DomainSpec) -> Result<Self> {
        match spec {
            DomainSpec::Interval { bounds, holes } => {
                let mut d = Domain::interval(bounds[0], bounds[1])?;
                for h in holes {
                    d = d.with_hole([h[0], 0.0], [h[1], 0.0])?;
                }
                Ok(d)
            }
            DomainSpec::Rectangle {
                lower,
                upper,
                holes,
            } => Domain::checked(2, lower, upper, holes),
        }
    }
}

impl From<Domain> for DomainSpec {
    fn from(d: Domain) -> Self {
        if d.dim == 1 {
            DomainSpec::Interval {
                bounds: [d.lower[0], d.upper[0]],
                holes: d.holes.iter().map(|h| [h.lower[0], h.upper[0]]).collect(),
            }
        } else {
            DomainSpec::Rectangle {
                lower: d.lower,
                upper: d.upper,
                holes: d.holes,
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub lattice: [usize; 2],
    pub center: Point,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryNode {
    pub point: Point,
    /// The unique cell sharing this face.
    pub cell: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    domain: Domain,
    resolution: [usize; 2],
    spacing: [f64; 2],
    cell_measure: f64,
    cells: Vec<Cell>,
    lattice: Vec<Option<usize>>,
    boundary: Vec<BoundaryNode>,
    cell_neighbors: Vec<Vec<usize>>,
    cell_boundary: Vec<Vec<usize>>,
}

impl Grid {
    /// Builds the grid with `resolution[axis]` cells along each active axis.
    pub fn build(domain: &Domain, resolution: [usize; 2]) -> Result<Arc<Grid>> {
        let dim = domain.dim;
        let mut res = [1usize; 2];
        let mut spacing = [0.0; 2];
        for axis in 0..dim {
            if resolution[axis] < 2 {
                return Err(Error::Construction(format!(
                    "resolution on axis {axis} must be at least 2, got {}",
                    resolution[axis]
                )));
            }
            res[axis] = resolution[axis];
            spacing[axis] = (domain.upper[axis] - domain.lower[axis]) / res[axis] as f64;
        }
        for hole in &domain.holes {
            for axis in 0..dim {
                for edge in [hole.lower[axis], hole.upper[axis]] {
                    if edge <= domain.lower[axis] || edge >= domain.upper[axis] {
                        continue;
                    }
                    let t = (edge - domain.lower[axis]) / spacing[axis];
                    if (t - t.round()).abs() > ALIGN_TOL * (1.0 + t.abs()) {
                        return Err(Error::Construction(format!(
                            "hole edge {edge} on axis {axis} is not aligned with the grid lines"
                        )));
                    }
                }
            }
        }

        let cell_measure: f64 = (0..dim).map(|a| spacing[a]).product();
        let mut cells = Vec::new();
        let mut lattice = vec![None; res[0] * res[1]];
        for ix in 0..res[0] {
            for iy in 0..res[1] {
                let mut center = [0.0; 2];
                for (axis, i) in [ix, iy].into_iter().enumerate().take(dim) {
                    center[axis] = domain.lower[axis] + (i as f64 + 0.5) * spacing[axis];
                }
                if domain.in_hole(center) {
                    continue;
                }
                lattice[ix * res[1] + iy] = Some(cells.len());
                cells.push(Cell {
                    lattice: [ix, iy],
                    center,
                });
            }
        }
        if cells.is_empty() {
            return Err(Error::Construction(
                "domain has no cells after removing holes".into(),
            ));
        }

        let lookup = |l: [isize; 2]| -> Option<usize> {
            if l[0] < 0 || l[1] < 0 || l[0] as usize >= res[0] || l[1] as usize >= res[1] {
                None
            } else {
                lattice[l[0] as usize * res[1] + l[1] as usize]
            }
        };

        let mut cell_neighbors = vec![Vec::new(); cells.len()];
        let mut faces = Vec::new();
        for (ci, cell) in cells.iter().enumerate() {
            for axis in 0..dim {
                for side in [-1isize, 1] {
                    let mut l = [cell.lattice[0] as isize, cell.lattice[1] as isize];
                    l[axis] += side;
                    match lookup(l) {
                        Some(nb) => cell_neighbors[ci].push(nb),
                        None => {
                            let mut point = cell.center;
                            point[axis] += side as f64 * 0.5 * spacing[axis];
                            faces.push(BoundaryNode { point, cell: ci });
                        }
                    }
                }
            }
            cell_neighbors[ci].sort_unstable();
        }
        faces.sort_by(|a, b| {
            a.point[0]
                .total_cmp(&b.point[0])
                .then(a.point[1].total_cmp(&b.point[1]))
        });
        let mut cell_boundary = vec![Vec::new(); cells.len()];
        for (bi, node) in faces.iter().enumerate() {
            cell_boundary[node.cell].push(bi);
        }

        Ok(Arc::new(Grid {
            domain: domain.clone(),
            resolution: res,
            spacing,
            cell_measure,
            cells,
            lattice,
            boundary: faces,
            cell_neighbors,
            cell_boundary,
        }))
    }

    /// The grid of `self.domain` with the cells of `removed` deleted. Cell
    /// centres of the result are a subset of the centres of `self`.
    pub fn without_cells(&self, removed: &SetMask) -> Result<Arc<Grid>> {
        self.check_mask(removed)?;
        let mut domain = self.domain.clone();
        for ci in removed.cell_indices() {
            let c = &self.cells[ci];
            let mut lower = [0.0; 2];
            let mut upper = [0.0; 2];
            for axis in 0..self.dim() {
                lower[axis] = self.domain.lower[axis] + c.lattice[axis] as f64 * self.spacing[axis];
                upper[axis] = lower[axis] + self.spacing[axis];
            }
            domain = domain.with_hole(lower, upper)?;
        }
        Grid::build(&domain, self.resolution)
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim
    }

    pub fn resolution(&self) -> [usize; 2] {
        self.resolution
    }

    pub fn spacing(&self) -> [f64; 2] {
        self.spacing
    }

    /// The common Lebesgue measure of every cell.
    pub fn cell_measure(&self) -> f64 {
        self.cell_measure
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn num_boundary(&self) -> usize {
        self.boundary.len()
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn boundary_nodes(&self) -> &[BoundaryNode] {
        &self.boundary
    }

    pub fn cell_center(&self, i: usize) -> Point {
        self.cells[i].center
    }

    pub fn cell_neighbors(&self, i: usize) -> &[usize] {
        &self.cell_neighbors[i]
    }

    pub fn cell_boundary_nodes(&self, i: usize) -> &[usize] {
        &self.cell_boundary[i]
    }

    /// Total measure of the cells.
    pub fn total_measure(&self) -> f64 {
        self.cells.len() as f64 * self.cell_measure
    }

    pub fn cell_at_lattice(&self, lattice: [usize; 2]) -> Option<usize> {
        if lattice[0] >= self.resolution[0] || lattice[1] >= self.resolution[1] {
            return None;
        }
        self.lattice[lattice[0] * self.resolution[1] + lattice[1]]
    }

    /// The active cell whose closed box contains `x`, preferring the lowest
    /// index when `x` sits on a shared face.
    pub fn locate(&self, x: Point) -> Option<usize> {
        if !self.domain.contains_closed(x) {
            return None;
        }
        let mut candidates: [Vec<usize>; 2] = [vec![0], vec![0]];
        for (axis, slot) in candidates.iter_mut().enumerate().take(self.dim()) {
            let t = (x[axis] - self.domain.lower[axis]) / self.spacing[axis];
            let n = self.resolution[axis];
            let r = t.round();
            let mut c = Vec::with_capacity(2);
            if (t - r).abs() <= ALIGN_TOL * (1.0 + t.abs()) {
                let r = r as isize;
                for k in [r - 1, r] {
                    if k >= 0 && (k as usize) < n {
                        c.push(k as usize);
                    }
                }
            } else {
                c.push((t.floor().max(0.0) as usize).min(n - 1));
            }
            *slot = c;
        }
        for &ix in &candidates[0] {
            for &iy in &candidates[1] {
                if let Some(ci) = self.cell_at_lattice([ix, iy]) {
                    return Some(ci);
                }
            }
        }
        None
    }

    pub fn check_mask(&self, mask: &SetMask) -> Result<()> {
        if mask.cells.len() != self.num_cells() || mask.boundary.len() != self.num_boundary() {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// Mask selecting every boundary node and no cell.
    pub fn boundary_mask(&self) -> SetMask {
        SetMask {
            cells: vec![false; self.num_cells()],
            boundary: vec![true; self.num_boundary()],
        }
    }

    /// Mask selecting every cell and every boundary node.
    pub fn full_mask(&self) -> SetMask {
        SetMask {
            cells: vec![true; self.num_cells()],
            boundary: vec![true; self.num_boundary()],
        }
    }

    pub fn empty_mask(&self) -> SetMask {
        SetMask::empty(self.num_cells(), self.num_boundary())
    }

    /// One-ring relatively open hull: `mask` plus every cell and boundary
    /// node adjacent to a flagged cell, plus the cell of every flagged
    /// boundary node.
    pub fn open_neighborhood(&self, mask: &SetMask) -> Result<SetMask> {
        self.check_mask(mask)?;
        let mut out = mask.clone();
        for ci in mask.cell_indices() {
            for &nb in &self.cell_neighbors[ci] {
                out.cells[nb] = true;
            }
            for &bi in &self.cell_boundary[ci] {
                out.boundary[bi] = true;
            }
        }
        for bi in mask.boundary_indices() {
            out.cells[self.boundary[bi].cell] = true;
        }
        Ok(out)
    }

    /// Lebesgue measure of the set: flagged cells times the cell measure.
    pub fn measure(&self, mask: &SetMask) -> Result<f64> {
        self.check_mask(mask)?;
        Ok(mask.num_cells() as f64 * self.cell_measure)
    }
}

/// Sorted index lists, the serialized form of a [`SetMask`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaskIndices {
    #[serde(default)]
    pub cells: Vec<usize>,
    #[serde(default)]
    pub boundary: Vec<usize>,
}

/// A subset of the closed domain: flagged cells and flagged boundary nodes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetMask {
    cells: Vec<bool>,
    boundary: Vec<bool>,
}

impl SetMask {
    pub fn empty(num_cells: usize, num_boundary: usize) -> Self {
        SetMask {
            cells: vec![false; num_cells],
            boundary: vec![false; num_boundary],
        }
    }

    pub fn from_indices(grid: &Grid, cells: &[usize], boundary: &[usize]) -> Result<Self> {
        let mut m = grid.empty_mask();
        for &c in cells {
            *m.cells.get_mut(c).ok_or_else(|| {
                Error::Usage(format!(
                    "cell index {c} out of range (grid has {})",
                    grid.num_cells()
                ))
            })? = true;
        }
        for &b in boundary {
            *m.boundary.get_mut(b).ok_or_else(|| {
                Error::Usage(format!(
                    "boundary index {b} out of range (grid has {})",
                    grid.num_boundary()
                ))
            })? = true;
        }
        Ok(m)
    }

    pub fn from_cells(grid: &Grid, cells: &[usize]) -> Result<Self> {
        Self::from_indices(grid, cells, &[])
    }

    pub fn from_flags(cells: Vec<bool>, boundary: Vec<bool>) -> Self {
        SetMask { cells, boundary }
    }

    pub fn cell_flags(&self) -> &[bool] {
        &self.cells
    }

    pub fn boundary_flags(&self) -> &[bool] {
        &self.boundary
    }

    pub fn has_cell(&self, i: usize) -> bool {
        self.cells[i]
    }

    pub fn has_boundary(&self, i: usize) -> bool {
        self.boundary[i]
    }

    pub fn set_cell(&mut self, i: usize, on: bool) {
        self.cells[i] = on;
    }

    pub fn set_boundary(&mut self, i: usize, on: bool) {
        self.boundary[i] = on;
    }

    pub fn cell_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, &f)| f)
            .map(|(i, _)| i)
    }

    pub fn boundary_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.boundary
            .iter()
            .enumerate()
            .filter(|(_, &f)| f)
            .map(|(i, _)| i)
    }

    pub fn num_cells(&self) -> usize {
        self.cells.iter().filter(|&&f| f).count()
    }

    pub fn num_boundary(&self) -> usize {
        self.boundary.iter().filter(|&&f| f).count()
    }

    pub fn is_empty(&self) -> bool {
        self.num_cells() == 0 && self.num_boundary() == 0
    }

    pub fn covers_everything(&self) -> bool {
        self.cells.iter().all(|&f| f) && self.boundary.iter().all(|&f| f)
    }

    fn zip(&self, other: &SetMask, op: impl Fn(bool, bool) -> bool) -> SetMask {
        assert_eq!(self.cells.len(), other.cells.len(), "mask size mismatch");
        assert_eq!(
            self.boundary.len(),
            other.boundary.len(),
            "mask size mismatch"
        );
        SetMask {
            cells: self
                .cells
                .iter()
                .zip(&other.cells)
                .map(|(&a, &b)| op(a, b))
                .collect(),
            boundary: self
                .boundary
                .iter()
                .zip(&other.boundary)
                .map(|(&a, &b)| op(a, b))
                .collect(),
        }
    }

    pub fn union(&self, other: &SetMask) -> SetMask {
        self.zip(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &SetMask) -> SetMask {
        self.zip(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &SetMask) -> SetMask {
        self.zip(other, |a, b| a && !b)
    }

    pub fn is_subset(&self, other: &SetMask) -> bool {
        self.cells.len() == other.cells.len()
            && self.boundary.len() == other.boundary.len()
            && self.cells.iter().zip(&other.cells).all(|(&a, &b)| !a || b)
            && self
                .boundary
                .iter()
                .zip(&other.boundary)
                .all(|(&a, &b)| !a || b)
    }

    pub fn to_indices(&self) -> MaskIndices {
        MaskIndices {
            cells: self.cell_indices().collect(),
            boundary: self.boundary_indices().collect(),
        }
    }
}
