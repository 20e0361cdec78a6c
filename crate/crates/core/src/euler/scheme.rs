use alloc::vec::Vec;

use super::EulerParams;
use crate::error::{Error, Result};
use crate::field::Grid;

/// Density and momentum on the spatial part of a grid at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct EulerState {
    pub grid: Grid,
    pub time: f64,
    pub rho: Vec<f64>,
    /// `space_dim` components per cell.
    pub mom: Vec<f64>,
}

impl EulerState {
    pub fn new(grid: Grid, rho: Vec<f64>, mom: Vec<f64>) -> Result<Self> {
        let cells = grid.space_cells();
        if rho.len() != cells || mom.len() != cells * grid.space_dim() {
            return Err(Error::invalid("state", "field lengths do not match the grid"));
        }
        if rho.iter().any(|r| !(r.is_finite() && *r > 0.0)) || mom.iter().any(|m| !m.is_finite()) {
            return Err(Error::invalid("state", "density must be positive and all values finite"));
        }
        Ok(Self { grid, time: 0.0, rho, mom })
    }

    pub fn momentum(&self, cell: usize) -> &[f64] {
        let d = self.grid.space_dim();
        &self.mom[cell * d..(cell + 1) * d]
    }

    /// `sum_cells rho |cell|`.
    pub fn mass(&self) -> f64 {
        self.rho.iter().sum::<f64>() * self.grid.space_volume()
    }

    /// `int E(rho, m) dx`; `None` if any cell has infinite energy.
    pub fn total_energy(&self, params: &EulerParams) -> Option<f64> {
        let mut total = 0.0;
        for (i, &r) in self.rho.iter().enumerate() {
            total += params.energy_density(r, self.momentum(i)).finite()?;
        }
        Some(total * self.grid.space_volume())
    }

    /// `max_cells (max_k |u_k| + c)`.
    pub fn max_wave_speed(&self, params: &EulerParams) -> f64 {
        let d = self.grid.space_dim();
        self.rho
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                let u = self.mom[i * d..(i + 1) * d].iter().map(|m| (m / r).abs()).fold(0.0, f64::max);
                u + params.sound_speed(r)
            })
            .fold(0.0, f64::max)
    }
}

fn courant(state: &EulerState, params: &EulerParams, alpha: f64, dt: f64) -> f64 {
    (0..state.grid.space_dim())
        .map(|k| {
            let dx = state.grid.dx(k);
            dt * (alpha / dx + 2.0 * params.eps / (dx * dx))
        })
        .sum()
}

/// Largest step with `dt sum_k (alpha / dx_k + 2 eps / dx_k^2) = cfl`.
pub fn stable_dt(state: &EulerState, params: &EulerParams) -> f64 {
    let alpha = state.max_wave_speed(params);
    params.cfl / courant(state, params, alpha, 1.0)
}

/// One step of size [`stable_dt`].
pub fn lf_step(state: &EulerState, params: &EulerParams) -> Result<EulerState> {
    lf_step_with_dt(state, params, stable_dt(state, params))
}

/// Conservative Lax–Friedrichs update with global speed `alpha` plus `eps`-diffusion:
/// `U_i -= dt/dx_k (G_{i+1/2} - G_{i-1/2})` with
/// `G_{i+1/2} = (F(U_i) + F(U_{i+1}))/2 - (alpha/2 + eps/dx_k)(U_{i+1} - U_i)`.
pub fn lf_step_with_dt(state: &EulerState, params: &EulerParams, dt: f64) -> Result<EulerState> {
    let grid = &state.grid;
    let d = grid.space_dim();
    if d != params.space_dim {
        return Err(Error::invalid("space_dim", "state and parameters disagree"));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::invalid("dt", "must be positive and finite"));
    }
    let alpha = state.max_wave_speed(params);
    let c0 = courant(state, params, alpha, dt);
    if c0 > 1.0 {
        return Err(Error::CflViolation { courant: c0 });
    }

    let q = 1 + d;
    let cells = grid.space_cells();
    let conserved = |i: usize, out: &mut [f64; 3]| {
        out[0] = state.rho[i];
        out[1..q].copy_from_slice(&state.mom[i * d..(i + 1) * d]);
    };
    let flux = |u: &[f64; 3], k: usize, out: &mut [f64; 3]| {
        let rho = u[0];
        let uk = u[1 + k] / rho;
        out[0] = u[1 + k];
        for j in 0..d {
            out[1 + j] = u[1 + j] * uk;
        }
        out[1 + k] += params.pressure_unchecked(rho);
    };

    let mut next: Vec<f64> = Vec::with_capacity(cells * q);
    for i in 0..cells {
        let mut u = [0.0; 3];
        conserved(i, &mut u);
        next.extend_from_slice(&u[..q]);
    }

    let mut interface = alloc::vec![0.0; cells * q];
    let dims = grid.cells_per_dim();
    for k in 0..d {
        let dx = grid.dx(k);
        let visc = 0.5 * alpha + params.eps / dx;
        for i in 0..cells {
            let mut idx = grid.space_index(i);
            idx[k] = (idx[k] + 1) % dims[k];
            let ip = grid.space_cell(idx);
            let (mut ul, mut ur, mut fl, mut fr) = ([0.0; 3], [0.0; 3], [0.0; 3], [0.0; 3]);
            conserved(i, &mut ul);
            conserved(ip, &mut ur);
            flux(&ul, k, &mut fl);
            flux(&ur, k, &mut fr);
            for c in 0..q {
                interface[i * q + c] = 0.5 * (fl[c] + fr[c]) - visc * (ur[c] - ul[c]);
            }
        }
        let ratio = dt / dx;
        for i in 0..cells {
            let mut idx = grid.space_index(i);
            idx[k] = (idx[k] + dims[k] - 1) % dims[k];
            let im = grid.space_cell(idx);
            for c in 0..q {
                next[i * q + c] -= ratio * (interface[i * q + c] - interface[im * q + c]);
            }
        }
    }

    let mut rho = Vec::with_capacity(cells);
    let mut mom = Vec::with_capacity(cells * d);
    for chunk in next.chunks_exact(q) {
        rho.push(chunk[0]);
        mom.extend_from_slice(&chunk[1..]);
    }
    if rho.iter().any(|r| !(r.is_finite() && *r > 0.0)) || mom.iter().any(|m| !m.is_finite()) {
        return Err(Error::MemberBlowUp {
            member: 0,
            reason: alloc::format!("non-positive or non-finite state at t = {}", state.time + dt),
        });
    }
    let out = EulerState { grid: grid.clone(), time: state.time + dt, rho, mom };
    let c1 = courant(&out, params, out.max_wave_speed(params), dt);
    if c1 > 1.0 {
        return Err(Error::CflViolation { courant: c1 });
    }
    Ok(out)
}
