//! Synthetic sequences with known statistical behaviour.

use crate::field::{FieldSequence, Grid};
use crate::math;
use crate::measures::{EmpiricalMeasure, ParametrizedMeasure};

/// `U_n = c` in every cell and component.
pub fn constant(grid: Grid, dim: usize, len: usize, c: f64) -> FieldSequence {
    FieldSequence::from_fn(grid, dim, len, |_, _, out| out.fill(c)).expect("finite fixture")
}

/// `U_n = 1` for odd `n`, `0` for even `n`.
pub fn alternating(grid: Grid, len: usize) -> FieldSequence {
    FieldSequence::from_fn(grid, 1, len, |n, _, out| out[0] = (n % 2) as f64).expect("finite fixture")
}

/// `U_n = values[(n - 1) % period]`.
pub fn periodic(grid: Grid, len: usize, values: &[f64]) -> FieldSequence {
    FieldSequence::from_fn(grid, 1, len, |n, _, out| out[0] = values[(n - 1) % values.len()]).expect("finite fixture")
}

/// `1` if `n` lies in some block `[4^j, 2 * 4^j)`, else `0`.
///
/// The running density of the blocks oscillates between roughly 1/3 and 2/3, so the
/// Cesàro means have no limit.
pub fn in_block(n: usize) -> bool {
    let mut start = 1usize;
    while start <= n {
        if n < 2 * start {
            return true;
        }
        start *= 4;
    }
    false
}

pub fn block(grid: Grid, len: usize) -> FieldSequence {
    FieldSequence::from_fn(grid, 1, len, |n, _, out| out[0] = in_block(n) as u8 as f64).expect("finite fixture")
}

/// Base field `U(y) = amplitude * (1 + sin(2 pi x / L))`, constant in time.
pub fn smooth_profile(grid: &Grid, amplitude: f64, cell: usize) -> f64 {
    let (_, x) = grid.split(cell);
    let phase = 2.0 * core::f64::consts::PI * grid.space_center(x)[0] / grid.lengths()[0];
    amplitude * (1.0 + math::sin(phase))
}

/// `U_n = U + 1/n` with `U` from [`smooth_profile`].
pub fn strongly_convergent(grid: Grid, len: usize, amplitude: f64) -> FieldSequence {
    let g = grid.clone();
    FieldSequence::from_fn(grid, 1, len, move |n, cell, out| {
        out[0] = smooth_profile(&g, amplitude, cell) + 1.0 / n as f64
    })
    .expect("finite fixture")
}

/// `delta_U` for the limit of [`strongly_convergent`].
pub fn strongly_convergent_limit(grid: Grid, amplitude: f64) -> ParametrizedMeasure {
    let values: alloc::vec::Vec<f64> = (0..grid.cells()).map(|c| smooth_profile(&grid, amplitude, c)).collect();
    ParametrizedMeasure::dirac_field(grid, 1, &values).expect("one value per cell")
}

/// `1/2 delta_0 + 1/2 delta_1` in every cell.
pub fn half_half_limit(grid: Grid) -> ParametrizedMeasure {
    let mu = EmpiricalMeasure::new(1, alloc::vec![0.0, 1.0], alloc::vec![0.5, 0.5]).expect("unit mass");
    let cells = alloc::vec![mu; grid.cells()];
    ParametrizedMeasure::new(grid, cells).expect("one measure per cell")
}

/// Euler-type states `(rho, m) = (1, (-1)^{n+1} e_1)` on a `d`-dimensional grid.
pub fn alternating_momentum(grid: Grid, len: usize) -> FieldSequence {
    let dim = 1 + grid.space_dim();
    FieldSequence::from_fn(grid, dim, len, |n, _, out| {
        out.fill(0.0);
        out[0] = 1.0;
        out[1] = if n % 2 == 1 { 1.0 } else { -1.0 };
    })
    .expect("finite fixture")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_membership() {
        let members: alloc::vec::Vec<usize> = (1..=20).filter(|&n| in_block(n)).collect();
        assert_eq!(members, alloc::vec![1, 4, 5, 6, 7, 16, 17, 18, 19, 20]);
    }
}
