use alloc::vec::Vec;

use super::{momentum_flux, EulerParams};
use crate::error::{Error, Result};
use crate::field::{FieldSequence, Grid};
use crate::math;

/// Per space-time cell symmetric `d x d` Reynolds defect (row-major in a 2x2 buffer).
///
/// The scheme part `R_1` is identically zero for the Lax–Friedrichs family; the stored
/// matrices are the oscillation part `R_2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReynoldsDefectField {
    pub grid: Grid,
    pub level: usize,
    pub matrices: Vec<[f64; 4]>,
}

impl ReynoldsDefectField {
    pub fn matrix(&self, cell: usize) -> [f64; 4] {
        self.matrices[cell]
    }

    pub fn trace(&self, cell: usize) -> f64 {
        let r = self.matrices[cell];
        (0..self.grid.space_dim()).map(|k| r[k * 2 + k]).sum()
    }

    pub fn min_eigenvalue(&self, cell: usize) -> f64 {
        let r = self.matrices[cell];
        if self.grid.space_dim() == 1 {
            return r[0];
        }
        let half_trace = 0.5 * (r[0] + r[3]);
        let diff = 0.5 * (r[0] - r[3]);
        half_trace - math::sqrt(diff * diff + r[1] * r[1])
    }

    pub fn frobenius(&self, cell: usize) -> f64 {
        math::sqrt(self.matrices[cell].iter().map(|v| v * v).sum())
    }

    /// `sum_cells |cell| |R|_F`.
    pub fn l1_norm(&self) -> f64 {
        (0..self.matrices.len()).map(|c| self.frobenius(c)).sum::<f64>() * self.grid.cell_volume()
    }

    /// The scheme contribution `R_1`; zero for this generator.
    pub fn scheme_part(&self, _cell: usize) -> [f64; 4] {
        [0.0; 4]
    }
}

fn check_euler_sequence(seq: &FieldSequence, n: usize, params: &EulerParams) -> Result<()> {
    if seq.dim() != 1 + params.space_dim || seq.grid().space_dim() != params.space_dim {
        return Err(Error::invalid("sequence", "expected (rho, m) states matching the space dimension"));
    }
    if n == 0 {
        return Err(Error::invalid("N", "must be >= 1"));
    }
    seq.require(n)
}

/// Cesàro means of the states in one cell.
fn mean_state(seq: &FieldSequence, n: usize, cell: usize) -> [f64; 3] {
    let mut acc = [0.0; 3];
    for k in 1..=n {
        for (a, v) in acc.iter_mut().zip(seq.point(k, cell)) {
            *a += v;
        }
    }
    acc.iter_mut().for_each(|a| *a /= n as f64);
    acc
}

/// `(1/N) sum_n F(rho_n, m_n) - F(mean rho, mean m)` with
/// `F = 1_{rho>0} m ⊗ m / rho + p(rho) I`.
pub fn reynolds_defect(seq: &FieldSequence, n: usize, params: &EulerParams) -> Result<ReynoldsDefectField> {
    check_euler_sequence(seq, n, params)?;
    let mut matrices = Vec::with_capacity(seq.grid().cells());
    for cell in 0..seq.grid().cells() {
        let mut mean_flux = [0.0; 4];
        for k in 1..=n {
            let u = seq.point(k, cell);
            let f = momentum_flux(params, u[0], &u[1..]);
            for (a, v) in mean_flux.iter_mut().zip(f) {
                *a += v;
            }
        }
        let bar = mean_state(seq, n, cell);
        let flux_of_mean = momentum_flux(params, bar[0], &bar[1..]);
        let mut r = [0.0; 4];
        for i in 0..4 {
            r[i] = mean_flux[i] / n as f64 - flux_of_mean[i];
        }
        // symmetric by construction; enforce bitwise
        let off = 0.5 * (r[1] + r[2]);
        r[1] = off;
        r[2] = off;
        matrices.push(r);
    }
    Ok(ReynoldsDefectField { grid: seq.grid().clone(), level: n, matrices })
}

/// Trace of the Reynolds defect recomputed from energy-type means:
/// `2 (mean K - K(mean)) + d (mean p - p(mean))` with `K = |m|^2 / (2 rho)`.
pub fn reynolds_trace_from_energy(seq: &FieldSequence, n: usize, params: &EulerParams) -> Result<Vec<f64>> {
    check_euler_sequence(seq, n, params)?;
    let d = params.space_dim as f64;
    let kinetic = |rho: f64, m: &[f64]| {
        if rho > 0.0 {
            0.5 * m.iter().map(|v| v * v).sum::<f64>() / rho
        } else {
            0.0
        }
    };
    Ok((0..seq.grid().cells())
        .map(|cell| {
            let (mut mean_k, mut mean_p) = (0.0, 0.0);
            for k in 1..=n {
                let u = seq.point(k, cell);
                mean_k += kinetic(u[0], &u[1..]);
                mean_p += params.pressure_unchecked(u[0]);
            }
            mean_k /= n as f64;
            mean_p /= n as f64;
            let bar = mean_state(seq, n, cell);
            let dim = params.space_dim;
            2.0 * (mean_k - kinetic(bar[0], &bar[1..1 + dim])) + d * (mean_p - params.pressure_unchecked(bar[0]))
        })
        .collect())
}

fn in_boundary_layer(grid: &Grid, x: usize, width: f64) -> bool {
    let c = grid.space_center(x);
    let l = grid.lengths();
    (0..grid.space_dim()).any(|k| c[k] < width || l[k] - c[k] < width)
}

fn check_width(grid: &Grid, width: f64) -> Result<()> {
    let l = grid.lengths();
    if width.is_nan() || width <= 0.0 || (0..grid.space_dim()).any(|k| width >= 0.5 * l[k]) {
        return Err(Error::invalid("width", "must be positive and below half the box"));
    }
    Ok(())
}

/// Space-time measure of the boundary layer `U` of the given width.
pub fn boundary_volume(grid: &Grid, width: f64) -> Result<f64> {
    check_width(grid, width)?;
    let count = (0..grid.space_cells()).filter(|&x| in_boundary_layer(grid, x, width)).count();
    Ok(count as f64 * grid.space_volume() * grid.final_time())
}

/// `|(1/N) sum_n int_U E(rho_n, m_n) - int_U E(mean rho, mean m)|` over the boundary layer
/// `U` of cells whose centers lie within `width` of the box boundary.
pub fn boundary_energy_check(seq: &FieldSequence, n: usize, width: f64, params: &EulerParams) -> Result<f64> {
    check_euler_sequence(seq, n, params)?;
    let grid = seq.grid();
    check_width(grid, width)?;
    let vol = grid.cell_volume();
    let energy = |u: &[f64]| params.energy_density(u[0], &u[1..]).finite().ok_or(Error::InfiniteEnergy { member: 0 });
    let mut mean_energy = 0.0;
    let mut energy_of_mean = 0.0;
    for cell in 0..grid.cells() {
        let (_, x) = grid.split(cell);
        if !in_boundary_layer(grid, x, width) {
            continue;
        }
        let mut acc = 0.0;
        for k in 1..=n {
            acc += energy(seq.point(k, cell))?;
        }
        mean_energy += acc / n as f64 * vol;
        let bar = mean_state(seq, n, cell);
        energy_of_mean += energy(&bar[..seq.dim()])? * vol;
    }
    Ok((mean_energy - energy_of_mean).abs())
}
