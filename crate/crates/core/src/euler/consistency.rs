use alloc::vec::Vec;

use super::{momentum_flux, EulerParams};
use crate::error::{Error, Result};
use crate::field::Grid;
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Cos,
    Sin,
}

/// `phi(t, x) = psi(t) chi(x)` with `psi(t) = (1 - t/T)^2` and
/// `chi(x) = cos|sin(2 pi (k_1 x_1 / L_1 + k_2 x_2 / L_2))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestFunction {
    pub mode: [i32; 2],
    pub phase: Phase,
    pub final_time: f64,
    pub lengths: [f64; 2],
}

impl TestFunction {
    fn angle(&self, x: [f64; 2]) -> f64 {
        2.0 * core::f64::consts::PI
            * (self.mode[0] as f64 * x[0] / self.lengths[0] + self.mode[1] as f64 * x[1] / self.lengths[1])
    }

    pub fn psi(&self, t: f64) -> f64 {
        let s = 1.0 - t / self.final_time;
        s * s
    }

    pub fn dpsi(&self, t: f64) -> f64 {
        -2.0 / self.final_time * (1.0 - t / self.final_time)
    }

    pub fn chi(&self, x: [f64; 2]) -> f64 {
        match self.phase {
            Phase::Cos => math::cos(self.angle(x)),
            Phase::Sin => math::sin(self.angle(x)),
        }
    }

    /// `grad chi`.
    pub fn grad_chi(&self, x: [f64; 2]) -> [f64; 2] {
        let theta = self.angle(x);
        let d = match self.phase {
            Phase::Cos => -math::sin(theta),
            Phase::Sin => math::cos(theta),
        };
        let two_pi = 2.0 * core::f64::consts::PI;
        [d * two_pi * self.mode[0] as f64 / self.lengths[0], d * two_pi * self.mode[1] as f64 / self.lengths[1]]
    }

    pub fn value(&self, t: f64, x: [f64; 2]) -> f64 {
        self.psi(t) * self.chi(x)
    }

    pub fn dt(&self, t: f64, x: [f64; 2]) -> f64 {
        self.dpsi(t) * self.chi(x)
    }

    pub fn grad(&self, t: f64, x: [f64; 2]) -> [f64; 2] {
        let g = self.grad_chi(x);
        let p = self.psi(t);
        [p * g[0], p * g[1]]
    }
}

/// Eight low-frequency trigonometric modes, each as cosine and sine, times `psi`.
pub fn default_test_set(grid: &Grid) -> Vec<TestFunction> {
    let modes: [[i32; 2]; 4] =
        if grid.space_dim() == 1 { [[1, 0], [2, 0], [3, 0], [4, 0]] } else { [[1, 0], [0, 1], [1, 1], [1, -1]] };
    let mut set = Vec::with_capacity(8);
    for mode in modes {
        for phase in [Phase::Cos, Phase::Sin] {
            set.push(TestFunction { mode, phase, final_time: grid.final_time(), lengths: grid.lengths() });
        }
    }
    set
}

/// `e^1[phi]` and the components of `e^2[phi e_j]`, `j = 1..d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub continuity: f64,
    pub momentum: Vec<f64>,
}

impl Residual {
    pub fn momentum_max(&self) -> f64 {
        self.momentum.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

/// Weak-form residuals of one member with midpoint quadrature in space and time.
///
/// `fields` is `(t, x, component)` on `grid`, `initial` is `(x, component)`.
pub fn consistency_residuals(
    grid: &Grid,
    fields: &[f64],
    initial: &[f64],
    tests: &[TestFunction],
    params: &EulerParams,
) -> Result<Vec<Residual>> {
    let d = grid.space_dim();
    let q = 1 + d;
    if d != params.space_dim {
        return Err(Error::GridMismatch);
    }
    if fields.len() != grid.cells() * q || initial.len() != grid.space_cells() * q {
        return Err(Error::GridMismatch);
    }
    let vol = grid.cell_volume();
    let space_vol = grid.space_volume();
    let space_cells = grid.space_cells();
    let mut out = Vec::with_capacity(tests.len());
    for phi in tests {
        let mut e1 = 0.0;
        let mut e2 = alloc::vec![0.0; d];
        for cell in 0..grid.cells() {
            let (t, x) = grid.split(cell);
            let (time, pos) = (grid.time_center(t), grid.space_center(x));
            let u = &fields[cell * q..(cell + 1) * q];
            let (rho, m) = (u[0], &u[1..]);
            let phi_t = phi.dt(time, pos);
            let grad = phi.grad(time, pos);
            let flux = momentum_flux(params, rho, m);
            e1 += vol * (rho * phi_t + (0..d).map(|k| m[k] * grad[k]).sum::<f64>());
            for j in 0..d {
                let div_flux: f64 = (0..d).map(|k| flux[j * 2 + k] * grad[k]).sum();
                e2[j] += vol * (m[j] * phi_t + div_flux);
            }
        }
        for x in 0..space_cells {
            let phi0 = phi.value(0.0, grid.space_center(x));
            let u0 = &initial[x * q..(x + 1) * q];
            e1 += space_vol * u0[0] * phi0;
            for j in 0..d {
                e2[j] += space_vol * u0[1 + j] * phi0;
            }
        }
        out.push(Residual { continuity: e1, momentum: e2 });
    }
    Ok(out)
}

/// `E_n - int E(rho_n, m_n)(t) dx` at every time level.
pub fn energy_balance_defect(
    grid: &Grid,
    fields: &[f64],
    initial_energy: f64,
    params: &EulerParams,
) -> Result<Vec<f64>> {
    let q = 1 + grid.space_dim();
    if fields.len() != grid.cells() * q {
        return Err(Error::GridMismatch);
    }
    let space_cells = grid.space_cells();
    let vol = grid.space_volume();
    (0..grid.time_steps())
        .map(|t| {
            let mut total = 0.0;
            for x in 0..space_cells {
                let u = &fields[(t * space_cells + x) * q..(t * space_cells + x + 1) * q];
                total += params.energy_density(u[0], &u[1..]).finite().ok_or(Error::InfiniteEnergy { member: 0 })?;
            }
            // the trace term vanishes: the scheme carries no approximate Reynolds stress
            Ok(initial_energy - total * vol)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MemberConsistency {
    pub member: usize,
    pub residuals: Vec<Residual>,
    pub energy_defect: Vec<f64>,
    pub initial_energy: f64,
    pub initial_density_error: f64,
    pub initial_momentum_error: f64,
}

impl MemberConsistency {
    pub fn max_continuity(&self) -> f64 {
        self.residuals.iter().map(|r| r.continuity.abs()).fold(0.0, f64::max)
    }

    pub fn max_momentum(&self) -> f64 {
        self.residuals.iter().map(Residual::momentum_max).fold(0.0, f64::max)
    }

    pub fn min_energy_defect(&self) -> f64 {
        self.energy_defect.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    /// `min{1/2, 1/gamma}`.
    pub trace_weight: f64,
    pub members: Vec<MemberConsistency>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(d: usize) -> EulerParams {
        EulerParams::new(1.0, 1.4, d, 0.0, 0.45).unwrap()
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for grid in [Grid::line(8, 4, 0.7).unwrap(), Grid::new(2, [4, 4], 4, 0.7, [1.0, 2.0]).unwrap()] {
            for phi in default_test_set(&grid) {
                let (t, x) = (0.31, [0.23, 0.61]);
                let h = 1e-6;
                let fd_t = (phi.value(t + h, x) - phi.value(t - h, x)) / (2.0 * h);
                assert!((fd_t - phi.dt(t, x)).abs() < 1e-6);
                for k in 0..grid.space_dim() {
                    let (mut xp, mut xm) = (x, x);
                    xp[k] += h;
                    xm[k] -= h;
                    let fd = (phi.value(t, xp) - phi.value(t, xm)) / (2.0 * h);
                    assert!((fd - phi.grad(t, x)[k]).abs() < 1e-6);
                }
                assert_eq!(phi.psi(phi.final_time), 0.0);
            }
        }
    }

    #[test]
    fn constant_state_residuals_vanish() {
        let grid = Grid::new(2, [8, 6], 5, 0.5, [1.0, 1.0]).unwrap();
        let q = 3;
        let state = [1.3, 0.2, -0.1];
        let fields: Vec<f64> = (0..grid.cells()).flat_map(|_| state).collect();
        let initial: Vec<f64> = (0..grid.space_cells()).flat_map(|_| state).collect();
        let res = consistency_residuals(&grid, &fields, &initial, &default_test_set(&grid), &params(2)).unwrap();
        for r in res {
            assert!(r.continuity.abs() < 1e-10);
            assert!(r.momentum_max() < 1e-10);
        }
        let defect = energy_balance_defect(
            &grid,
            &fields,
            {
                let e = params(2).energy_density(1.3, &[0.2, -0.1]).finite().unwrap();
                e * grid.torus_volume()
            },
            &params(2),
        )
        .unwrap();
        assert!(defect.iter().all(|v| v.abs() < 1e-12));
        assert_eq!(fields.len(), grid.cells() * q);
    }

    #[test]
    fn linear_in_time_density_matches_closed_form() {
        // rho = 1 + t cos(2 pi x), m = 0, phi = (1 - t)^2 cos(2 pi x) on [0,1] x T:
        // int_0^1 t psi'(t) dt * int cos^2 = (-1/3)(1/2)
        let grid = Grid::line(8, 8192, 1.0).unwrap();
        let mut fields = Vec::with_capacity(grid.cells() * 2);
        for cell in 0..grid.cells() {
            let (t, x) = grid.split(cell);
            let time = grid.time_center(t);
            let pos = grid.space_center(x)[0];
            fields.push(1.0 + time * libm::cos(2.0 * core::f64::consts::PI * pos));
            fields.push(0.0);
        }
        let initial: Vec<f64> = (0..8).flat_map(|_| [1.0, 0.0]).collect();
        let phi = default_test_set(&grid)[0];
        assert_eq!((phi.mode, phi.phase), ([1, 0], Phase::Cos));
        let res = consistency_residuals(&grid, &fields, &initial, &[phi], &params(1)).unwrap();
        assert!((res[0].continuity + 1.0 / 6.0).abs() < 1e-8, "{}", res[0].continuity);
    }

    #[test]
    fn grid_mismatch_detected() {
        let grid = Grid::line(4, 2, 1.0).unwrap();
        let tests = default_test_set(&grid);
        assert_eq!(consistency_residuals(&grid, &[1.0; 3], &[1.0; 8], &tests, &params(1)), Err(Error::GridMismatch));
    }
}
