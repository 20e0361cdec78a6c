use alloc::vec::Vec;

use super::{wasserstein, EmpiricalMeasure};
use crate::error::{Error, Result};
use crate::field::{FieldSequence, Grid};
use crate::math;
use crate::observables::{CompactObservable, Weight};

fn check_level(seq: &FieldSequence, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("N", "averaging level must be >= 1"));
    }
    seq.require(n)
}

/// `y -> (1/w_N) sum_{n<=N} w(n/N) b(U_n(y))`, one value per space-time cell.
pub fn weighted_ergodic_mean(seq: &FieldSequence, b: &CompactObservable, w: &Weight, n: usize) -> Result<Vec<f64>> {
    check_level(seq, n)?;
    let samples = w.normalized_samples(n)?;
    let cells = seq.grid().cells();
    let mut acc = alloc::vec![0.0; cells];
    for (k, wk) in samples.iter().enumerate() {
        for (cell, a) in acc.iter_mut().enumerate() {
            *a += wk * b.eval(seq.point(k + 1, cell));
        }
    }
    Ok(acc)
}

/// `(1/w_N) sum_{n<=N} w(n/N) delta_{U_n(cell)}` with duplicate atoms merged.
pub fn empirical_measure(seq: &FieldSequence, cell: usize, w: &Weight, n: usize) -> Result<EmpiricalMeasure> {
    check_level(seq, n)?;
    if cell >= seq.grid().cells() {
        return Err(Error::invalid("cell", "index outside the grid"));
    }
    let weights = w.normalized_samples(n)?;
    let mut points = Vec::with_capacity(n * seq.dim());
    for k in 1..=n {
        points.extend_from_slice(seq.point(k, cell));
    }
    Ok(EmpiricalMeasure::merged(seq.dim(), &points, &weights))
}

/// One empirical measure per space-time cell of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ParametrizedMeasure {
    grid: Grid,
    cells: Vec<EmpiricalMeasure>,
}

impl ParametrizedMeasure {
    pub fn new(grid: Grid, cells: Vec<EmpiricalMeasure>) -> Result<Self> {
        if cells.len() != grid.cells() {
            return Err(Error::invalid("cells", "need exactly one measure per space-time cell"));
        }
        Ok(Self { grid, cells })
    }

    /// The weighted ergodic measure of `seq` at level `n` in every cell.
    pub fn from_sequence(seq: &FieldSequence, w: &Weight, n: usize) -> Result<Self> {
        let cells =
            (0..seq.grid().cells()).map(|cell| empirical_measure(seq, cell, w, n)).collect::<Result<Vec<_>>>()?;
        Ok(Self { grid: seq.grid().clone(), cells })
    }

    /// `y -> delta_{U(y)}` for a single field given as `dim` values per cell.
    pub fn dirac_field(grid: Grid, dim: usize, values: &[f64]) -> Result<Self> {
        if values.len() != grid.cells() * dim {
            return Err(Error::invalid("values", "need one point per space-time cell"));
        }
        let cells = values.chunks_exact(dim).map(EmpiricalMeasure::dirac).collect();
        Ok(Self { grid, cells })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn cell(&self, i: usize) -> &EmpiricalMeasure {
        &self.cells[i]
    }

    pub fn cells(&self) -> &[EmpiricalMeasure] {
        &self.cells
    }

    /// Barycenters of all cells, flattened.
    pub fn barycenter_field(&self) -> Vec<f64> {
        self.cells.iter().flat_map(|m| m.barycenter()).collect()
    }
}

/// `(sum_cells |cell| W_s(P1, P2)^s)^(1/s)`.
pub fn parametrized_distance(a: &ParametrizedMeasure, b: &ParametrizedMeasure, s: f64) -> Result<f64> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch);
    }
    let vol = a.grid.cell_volume();
    let mut total = 0.0;
    for (x, y) in a.cells.iter().zip(&b.cells) {
        total += vol * math::abs_pow(wasserstein(x, y, s)?, s);
    }
    Ok(math::root(total, s))
}
