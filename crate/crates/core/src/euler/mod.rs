//! Consistent approximations of the isentropic Euler system on the periodic torus.
//!
//! `rho_t + div m = 0`, `m_t + div(m ⊗ m / rho) + grad p(rho) = 0`, `p = a rho^gamma`.
//! Members are produced by a conservative Lax–Friedrichs scheme with optional
//! explicit viscosity, so the approximate Reynolds stress vanishes identically.

mod consistency;
mod defect;
mod family;
mod scheme;

pub use consistency::{
    consistency_residuals, default_test_set, energy_balance_defect, ConsistencyReport, MemberConsistency, Phase,
    Residual, TestFunction,
};
pub use defect::{
    boundary_energy_check, boundary_volume, reynolds_defect, reynolds_trace_from_energy, ReynoldsDefectField,
};
pub use family::{
    consistency_report, restrict, simulate_family, simulate_member, Family, FamilyConfig, InitialData, MemberRun,
    MemberSpec, VACUUM_THRESHOLD,
};
pub use scheme::{lf_step, lf_step_with_dt, stable_dt, EulerState};

use crate::error::{Error, Result};
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerParams {
    /// Pressure coefficient `a > 0`.
    pub a: f64,
    /// Adiabatic exponent `gamma > 1`.
    pub gamma: f64,
    pub space_dim: usize,
    /// Explicit viscosity on `(rho, m)`.
    pub eps: f64,
    /// Courant number in `(0, 1)`.
    pub cfl: f64,
}

impl EulerParams {
    pub fn new(a: f64, gamma: f64, space_dim: usize, eps: f64, cfl: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::invalid("a", "must be positive"));
        }
        if !(gamma > 1.0 && gamma.is_finite()) {
            return Err(Error::invalid("gamma", "must exceed 1"));
        }
        if !(1..=2).contains(&space_dim) {
            return Err(Error::invalid("space_dim", "must be 1 or 2"));
        }
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(Error::invalid("eps", "must be non-negative"));
        }
        if !(cfl > 0.0 && cfl < 1.0) {
            return Err(Error::invalid("cfl", "must lie in (0, 1)"));
        }
        Ok(Self { a, gamma, space_dim, eps, cfl })
    }

    /// Weight `min{1/2, 1/gamma}` of the Reynolds-stress trace in the energy balance.
    pub fn trace_weight(&self) -> f64 {
        (0.5_f64).min(1.0 / self.gamma)
    }

    /// `p(rho) = a rho^gamma`.
    pub fn pressure(&self, rho: f64) -> Result<f64> {
        if rho < 0.0 {
            return Err(Error::invalid("rho", "density must be non-negative"));
        }
        Ok(self.pressure_unchecked(rho))
    }

    /// `P(rho) = a rho^gamma / (gamma - 1)`.
    pub fn pressure_potential(&self, rho: f64) -> Result<f64> {
        Ok(self.pressure(rho)? / (self.gamma - 1.0))
    }

    #[inline]
    pub(crate) fn pressure_unchecked(&self, rho: f64) -> f64 {
        if rho <= 0.0 {
            0.0
        } else {
            self.a * math::powf(rho, self.gamma)
        }
    }

    #[inline]
    pub(crate) fn sound_speed(&self, rho: f64) -> f64 {
        math::sqrt(self.a * self.gamma * math::powf(rho, self.gamma - 1.0))
    }

    /// Energy density `|m|^2 / (2 rho) + P(rho)`, `0` at `(0, 0)`, infinite otherwise.
    pub fn energy_density(&self, rho: f64, m: &[f64]) -> Energy {
        let m2: f64 = m.iter().map(|v| v * v).sum();
        if rho > 0.0 {
            Energy::Finite(0.5 * m2 / rho + self.pressure_unchecked(rho) / (self.gamma - 1.0))
        } else if rho == 0.0 && m2 == 0.0 {
            Energy::Finite(0.0)
        } else {
            Energy::Infinite
        }
    }
}

/// Value of the extended-real energy density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Energy {
    Finite(f64),
    Infinite,
}

impl Energy {
    pub fn finite(self) -> Option<f64> {
        match self {
            Energy::Finite(e) => Some(e),
            Energy::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Energy::Infinite)
    }
}

/// Momentum flux `1_{rho>0} m ⊗ m / rho + p(rho) I`, row-major `d x d` in a 2x2 buffer.
pub(crate) fn momentum_flux(params: &EulerParams, rho: f64, m: &[f64]) -> [f64; 4] {
    let d = params.space_dim;
    let p = params.pressure_unchecked(rho);
    let mut out = [0.0; 4];
    for j in 0..d {
        for k in 0..d {
            let convective = if rho > 0.0 { m[j] * m[k] / rho } else { 0.0 };
            out[j * 2 + k] = convective + if j == k { p } else { 0.0 };
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(gamma: f64) -> EulerParams {
        EulerParams::new(1.0, gamma, 1, 0.0, 0.5).unwrap()
    }

    #[test]
    fn eos_values() {
        let p = params(2.0);
        assert_eq!(p.pressure(2.0).unwrap(), 4.0);
        assert_eq!(p.pressure_potential(2.0).unwrap(), 4.0);
        assert_eq!(p.pressure(0.0).unwrap(), 0.0);
        assert_eq!(p.pressure_potential(0.0).unwrap(), 0.0);
        assert!(p.pressure(-1.0).is_err());
    }

    #[test]
    fn energy_branches() {
        let p = params(2.0);
        assert_eq!(p.energy_density(2.0, &[2.0]), Energy::Finite(5.0));
        assert_eq!(p.energy_density(0.0, &[0.0]), Energy::Finite(0.0));
        assert!(p.energy_density(0.0, &[1.0]).is_infinite());
        assert!(p.energy_density(-1.0, &[0.0]).is_infinite());
    }

    #[test]
    fn trace_weight_is_min_of_half_and_inverse_gamma() {
        assert_eq!(params(2.0).trace_weight(), 0.5);
        assert_eq!(params(4.0).trace_weight(), 0.25);
        assert_eq!(params(1.4).trace_weight(), 0.5);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(EulerParams::new(1.0, 1.0, 1, 0.0, 0.5).is_err());
        assert!(EulerParams::new(1.0, 1.4, 1, 0.0, 1.0).is_err());
        assert!(EulerParams::new(0.0, 1.4, 1, 0.0, 0.5).is_err());
        assert!(EulerParams::new(1.0, 1.4, 3, 0.0, 0.5).is_err());
        assert!(EulerParams::new(1.0, 1.4, 1, -1.0, 0.5).is_err());
    }
}
