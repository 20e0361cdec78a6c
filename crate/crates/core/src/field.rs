//! Space-time grids and sequences of cellwise-constant fields on them.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Uniform space-time grid on `[0, T] x T^d`, `d` in `{1, 2}`.
///
/// Space cells are ordered with the first coordinate outermost; a space-time
/// cell index is `t * space_cells + x`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    space_dim: usize,
    cells: [usize; 2],
    time_steps: usize,
    final_time: f64,
    lengths: [f64; 2],
}

impl Grid {
    pub fn new(
        space_dim: usize,
        cells: [usize; 2],
        time_steps: usize,
        final_time: f64,
        lengths: [f64; 2],
    ) -> Result<Self> {
        if !(1..=2).contains(&space_dim) {
            return Err(Error::invalid("space_dim", "must be 1 or 2"));
        }
        let cells = if space_dim == 1 { [cells[0], 1] } else { cells };
        let lengths = if space_dim == 1 { [lengths[0], 1.0] } else { lengths };
        if cells.contains(&0) {
            return Err(Error::invalid("cells", "every dimension needs at least one cell"));
        }
        if time_steps == 0 {
            return Err(Error::invalid("time_steps", "must be positive"));
        }
        if !(final_time > 0.0 && final_time.is_finite()) {
            return Err(Error::invalid("final_time", "must be positive and finite"));
        }
        if lengths.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
            return Err(Error::invalid("lengths", "must be positive and finite"));
        }
        Ok(Self { space_dim, cells, time_steps, final_time, lengths })
    }

    /// One-dimensional grid with unit period.
    pub fn line(cells: usize, time_steps: usize, final_time: f64) -> Result<Self> {
        Self::new(1, [cells, 1], time_steps, final_time, [1.0, 1.0])
    }

    /// The unit space-time box `[0,1] x T^1` split into `cells` space cells and one time step.
    pub fn unit(cells: usize) -> Self {
        Self::line(cells, 1, 1.0).expect("unit grid parameters are valid")
    }

    pub fn space_dim(&self) -> usize {
        self.space_dim
    }

    pub fn cells_per_dim(&self) -> [usize; 2] {
        self.cells
    }

    pub fn time_steps(&self) -> usize {
        self.time_steps
    }

    pub fn final_time(&self) -> f64 {
        self.final_time
    }

    pub fn lengths(&self) -> [f64; 2] {
        self.lengths
    }

    pub fn space_cells(&self) -> usize {
        self.cells[0] * self.cells[1]
    }

    /// Number of space-time cells.
    pub fn cells(&self) -> usize {
        self.space_cells() * self.time_steps
    }

    pub fn dx(&self, axis: usize) -> f64 {
        self.lengths[axis] / self.cells[axis] as f64
    }

    pub fn dt(&self) -> f64 {
        self.final_time / self.time_steps as f64
    }

    /// Spatial cell volume.
    pub fn space_volume(&self) -> f64 {
        (0..self.space_dim).map(|k| self.dx(k)).product()
    }

    /// Space-time cell volume.
    pub fn cell_volume(&self) -> f64 {
        self.space_volume() * self.dt()
    }

    /// Measure of the torus `T^d`.
    pub fn torus_volume(&self) -> f64 {
        self.lengths[..self.space_dim].iter().product()
    }

    /// Measure of `Q = [0,T] x T^d`.
    pub fn measure(&self) -> f64 {
        self.final_time * self.torus_volume()
    }

    /// Midpoint time of time level `t`.
    pub fn time_center(&self, t: usize) -> f64 {
        (t as f64 + 0.5) * self.dt()
    }

    /// Multi-index `(i1, i2)` of a space cell.
    pub fn space_index(&self, x: usize) -> [usize; 2] {
        [x / self.cells[1], x % self.cells[1]]
    }

    pub fn space_cell(&self, index: [usize; 2]) -> usize {
        index[0] * self.cells[1] + index[1]
    }

    /// Center coordinates of a space cell.
    pub fn space_center(&self, x: usize) -> [f64; 2] {
        let idx = self.space_index(x);
        let mut c = [0.0; 2];
        for k in 0..self.space_dim {
            c[k] = (idx[k] as f64 + 0.5) * self.dx(k);
        }
        c
    }

    /// Splits a space-time cell into `(time level, space cell)`.
    pub fn split(&self, cell: usize) -> (usize, usize) {
        (cell / self.space_cells(), cell % self.space_cells())
    }
}

/// Indexed family `U_1, ..., U_len` of fields `Q -> R^D`, cellwise constant on a shared grid.
///
/// Values are stored in `(n, t, x1[, x2], component)` order.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSequence {
    grid: Grid,
    dim: usize,
    len: usize,
    values: Vec<f64>,
}

impl FieldSequence {
    pub fn new(grid: Grid, dim: usize, values: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dim", "state dimension must be positive"));
        }
        let stride = grid.cells() * dim;
        if values.is_empty() || !values.len().is_multiple_of(stride) {
            return Err(Error::invalid(
                "values",
                alloc::format!("length {} is not a positive multiple of {stride}", values.len()),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("values", "every value must be finite"));
        }
        let len = values.len() / stride;
        Ok(Self { grid, dim, len, values })
    }

    /// Builds a sequence from `f(n, cell, out)` with `n` in `1..=len`.
    pub fn from_fn(grid: Grid, dim: usize, len: usize, mut f: impl FnMut(usize, usize, &mut [f64])) -> Result<Self> {
        let cells = grid.cells();
        let mut values = alloc::vec![0.0; len * cells * dim];
        for n in 1..=len {
            for cell in 0..cells {
                let start = ((n - 1) * cells + cell) * dim;
                f(n, cell, &mut values[start..start + dim]);
            }
        }
        Self::new(grid, dim, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// State dimension `D`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// `U_n(cell)` for `n` in `1..=len`.
    #[inline]
    pub fn point(&self, n: usize, cell: usize) -> &[f64] {
        debug_assert!(n >= 1 && n <= self.len);
        let start = ((n - 1) * self.grid.cells() + cell) * self.dim;
        &self.values[start..start + self.dim]
    }

    /// All cells of member `n` as one flat slice.
    pub fn member(&self, n: usize) -> &[f64] {
        let stride = self.grid.cells() * self.dim;
        &self.values[(n - 1) * stride..n * stride]
    }

    pub(crate) fn member_mut(&mut self, n: usize) -> &mut [f64] {
        let stride = self.grid.cells() * self.dim;
        &mut self.values[(n - 1) * stride..n * stride]
    }

    /// Componentwise `(min, max)` over all members and cells.
    pub fn data_range(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = alloc::vec![f64::INFINITY; self.dim];
        let mut hi = alloc::vec![f64::NEG_INFINITY; self.dim];
        for chunk in self.values.chunks_exact(self.dim) {
            for (k, &v) in chunk.iter().enumerate() {
                lo[k] = lo[k].min(v);
                hi[k] = hi[k].max(v);
            }
        }
        (lo, hi)
    }

    pub(crate) fn require(&self, n: usize) -> Result<()> {
        if n > self.len {
            Err(Error::SequenceTooShort { required: n, available: self.len })
        } else {
            Ok(())
        }
    }
}
