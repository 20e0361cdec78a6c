use alloc::vec::Vec;

use super::consistency::{
    consistency_residuals, energy_balance_defect, ConsistencyReport, MemberConsistency, TestFunction,
};
use super::scheme::{lf_step_with_dt, stable_dt, EulerState};
use super::EulerParams;
use crate::error::{Error, Result};
use crate::field::{FieldSequence, Grid};
use crate::math;

/// Initial densities below this are rejected.
pub const VACUUM_THRESHOLD: f64 = 1e-8;

/// Initial data `(rho_0, m_0)`, possibly depending on the member index.
#[derive(Debug, Clone, Copy)]
pub enum InitialData {
    Constant {
        rho: f64,
        mom: [f64; 2],
    },
    /// `rho = 1 + amplitude sin(2 pi (x1/L1 [+ x2/L2]))`, `m = 0`.
    SmoothWave {
        amplitude: f64,
    },
    /// `rho = inner` on the middle half of the box (per axis), `outer` elsewhere; `m = 0`.
    Riemann {
        inner: f64,
        outer: f64,
    },
    /// `rho = 1`, `m = (-1)^{n+1} e_1` for member `n`.
    AlternatingMomentum,
    /// Point values from a function of position and member index.
    Custom(fn([f64; 2], usize) -> (f64, [f64; 2])),
}

impl InitialData {
    pub fn sample(&self, x: [f64; 2], lengths: [f64; 2], space_dim: usize, member: usize) -> (f64, [f64; 2]) {
        match *self {
            InitialData::Constant { rho, mom } => (rho, mom),
            InitialData::SmoothWave { amplitude } => {
                let phase: f64 = (0..space_dim).map(|k| x[k] / lengths[k]).sum();
                (1.0 + amplitude * math::sin(2.0 * core::f64::consts::PI * phase), [0.0; 2])
            }
            InitialData::Riemann { inner, outer } => {
                let inside = (0..space_dim).all(|k| x[k] >= 0.25 * lengths[k] && x[k] < 0.75 * lengths[k]);
                (if inside { inner } else { outer }, [0.0; 2])
            }
            InitialData::AlternatingMomentum => (1.0, [if member % 2 == 1 { 1.0 } else { -1.0 }, 0.0]),
            InitialData::Custom(f) => f(x, member),
        }
    }

    /// Cell-center samples on the spatial part of `grid`.
    pub fn state(&self, grid: &Grid, member: usize) -> Result<EulerState> {
        let d = grid.space_dim();
        let cells = grid.space_cells();
        let mut rho = Vec::with_capacity(cells);
        let mut mom = Vec::with_capacity(cells * d);
        for x in 0..cells {
            let (r, m) = self.sample(grid.space_center(x), grid.lengths(), d, member);
            if r.is_nan() || r < VACUUM_THRESHOLD {
                return Err(Error::invalid("initial", alloc::format!("density {r} below the vacuum threshold")));
            }
            rho.push(r);
            mom.extend_from_slice(&m[..d]);
        }
        EulerState::new(grid.clone(), rho, mom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MemberSpec {
    pub cells: [usize; 2],
    pub eps: f64,
}

#[derive(Debug, Clone)]
pub struct FamilyConfig {
    /// Shared EOS and CFL; the viscosity is taken per member.
    pub params: EulerParams,
    pub initial: InitialData,
    pub final_time: f64,
    /// Time levels of the analysis grid.
    pub time_steps: usize,
    pub lengths: [f64; 2],
    pub members: Vec<MemberSpec>,
}

/// One simulated member on its native grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MemberRun {
    pub grid: Grid,
    /// `(t, x, component)` with components `(rho, m_1[, m_2])`, at time-level midpoints.
    pub fields: Vec<f64>,
    /// Initial data, `(x, component)`.
    pub initial: Vec<f64>,
    /// `E_n = int E(rho_{0,n}, m_{0,n})`.
    pub initial_energy: f64,
    pub initial_mass: f64,
    /// `int E(rho_n, m_n)(t)` at each recorded time.
    pub energy: Vec<f64>,
    pub mass: Vec<f64>,
    pub steps: usize,
}

impl MemberRun {
    /// Largest `|mass(t) - mass(0)| / mass(0)`.
    pub fn mass_drift(&self) -> f64 {
        self.mass.iter().map(|m| ((m - self.initial_mass) / self.initial_mass).abs()).fold(0.0, f64::max)
    }
}

fn pack(state: &EulerState, out: &mut Vec<f64>) {
    let d = state.grid.space_dim();
    for (i, r) in state.rho.iter().enumerate() {
        out.push(*r);
        out.extend_from_slice(&state.mom[i * d..(i + 1) * d]);
    }
}

/// Runs member `member` on `grid`, recording the state at the midpoint of every time level.
pub fn simulate_member(params: &EulerParams, initial: &InitialData, member: usize, grid: &Grid) -> Result<MemberRun> {
    if grid.space_dim() != params.space_dim {
        return Err(Error::invalid("space_dim", "grid and parameters disagree"));
    }
    let blow_up = |e: Error| match e {
        Error::MemberBlowUp { reason, .. } => Error::MemberBlowUp { member, reason },
        Error::CflViolation { courant } => Error::MemberBlowUp {
            member,
            reason: alloc::format!("CFL violated mid-step (courant number {courant:.4})"),
        },
        other => other,
    };
    let mut state = initial.state(grid, member)?;
    let q = 1 + grid.space_dim();
    let mut init = Vec::with_capacity(grid.space_cells() * q);
    pack(&state, &mut init);
    let initial_energy = state.total_energy(params).ok_or(Error::InfiniteEnergy { member })?;
    let initial_mass = state.mass();

    let mut fields = Vec::with_capacity(grid.cells() * q);
    let mut energy = Vec::with_capacity(grid.time_steps());
    let mut mass = Vec::with_capacity(grid.time_steps());
    let mut steps = 0;
    for k in 0..grid.time_steps() {
        let target = grid.time_center(k);
        while state.time < target {
            let dt = stable_dt(&state, params);
            let remaining = target - state.time;
            if remaining <= dt {
                state = lf_step_with_dt(&state, params, remaining).map_err(blow_up)?;
                state.time = target;
            } else {
                state = lf_step_with_dt(&state, params, dt).map_err(blow_up)?;
            }
            steps += 1;
        }
        pack(&state, &mut fields);
        energy.push(state.total_energy(params).ok_or(Error::InfiniteEnergy { member })?);
        mass.push(state.mass());
    }
    Ok(MemberRun { grid: grid.clone(), fields, initial: init, initial_energy, initial_mass, energy, mass, steps })
}

/// Exact cell averaging of `(t, x, component)` fields from `fine` onto `coarse`.
///
/// Both grids share time levels and lengths; fine cell counts must be multiples of
/// the coarse ones. `levels` is the number of time levels present in `fields`.
pub fn restrict(fields: &[f64], fine: &Grid, coarse: &Grid, dim: usize, levels: usize) -> Result<Vec<f64>> {
    let (fc, cc) = (fine.cells_per_dim(), coarse.cells_per_dim());
    if fine.space_dim() != coarse.space_dim() || fc[0] % cc[0] != 0 || fc[1] % cc[1] != 0 {
        return Err(Error::GridMismatch);
    }
    let ratio = [fc[0] / cc[0], fc[1] / cc[1]];
    let block = (ratio[0] * ratio[1]) as f64;
    let (fs, cs) = (fine.space_cells(), coarse.space_cells());
    if fields.len() != levels * fs * dim {
        return Err(Error::invalid("fields", "length does not match the fine grid"));
    }
    let mut out = alloc::vec![0.0; levels * cs * dim];
    for t in 0..levels {
        for x in 0..fs {
            let idx = fine.space_index(x);
            let target = coarse.space_cell([idx[0] / ratio[0], idx[1] / ratio[1]]);
            for c in 0..dim {
                out[(t * cs + target) * dim + c] += fields[(t * fs + x) * dim + c];
            }
        }
    }
    out.iter_mut().for_each(|v| *v /= block);
    Ok(out)
}

/// A family of members on a common analysis grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Family {
    pub seq: FieldSequence,
    /// Initial data of each member on the analysis grid, `(x, component)`.
    pub initial: Vec<Vec<f64>>,
    /// Initial data evaluated directly at analysis cell centers.
    pub reference_initial: Vec<Vec<f64>>,
    pub initial_energy: Vec<f64>,
    /// Native-grid energies at the recorded times.
    pub energy: Vec<Vec<f64>>,
    pub mass_drift: Vec<f64>,
}

pub fn simulate_family(config: &FamilyConfig) -> Result<Family> {
    let d = config.params.space_dim;
    let coarsest = config
        .members
        .iter()
        .min_by_key(|m| m.cells[0] * if d == 2 { m.cells[1] } else { 1 })
        .ok_or_else(|| Error::invalid("members", "family needs at least one member"))?;
    let analysis = Grid::new(d, coarsest.cells, config.time_steps, config.final_time, config.lengths)?;
    let q = 1 + d;

    let mut values = Vec::with_capacity(config.members.len() * analysis.cells() * q);
    let mut family = Family {
        seq: FieldSequence::new(analysis.clone(), q, alloc::vec![0.0; analysis.cells() * q])?,
        initial: Vec::new(),
        reference_initial: Vec::new(),
        initial_energy: Vec::new(),
        energy: Vec::new(),
        mass_drift: Vec::new(),
    };
    for (i, spec) in config.members.iter().enumerate() {
        let n = i + 1;
        let native = Grid::new(d, spec.cells, config.time_steps, config.final_time, config.lengths)?;
        let params = EulerParams { eps: spec.eps, ..config.params };
        let run = simulate_member(&params, &config.initial, n, &native)?;
        values.extend(restrict(&run.fields, &native, &analysis, q, config.time_steps)?);
        family.initial.push(restrict(&run.initial, &native, &analysis, q, 1)?);
        let mut reference = Vec::with_capacity(analysis.space_cells() * q);
        pack(&config.initial.state(&analysis, n)?, &mut reference);
        family.reference_initial.push(reference);
        family.initial_energy.push(run.initial_energy);
        family.mass_drift.push(run.mass_drift());
        family.energy.push(run.energy);
    }
    family.seq = FieldSequence::new(analysis, q, values)?;
    Ok(family)
}

/// Residuals, energy defects, and initial-data errors of every member on the analysis grid.
pub fn consistency_report(family: &Family, tests: &[TestFunction], params: &EulerParams) -> Result<ConsistencyReport> {
    let seq = &family.seq;
    let grid = seq.grid();
    let q = seq.dim();
    let mut members = Vec::with_capacity(seq.len());
    for n in 1..=seq.len() {
        let fields = seq.member(n);
        let initial = &family.initial[n - 1];
        let residuals = consistency_residuals(grid, fields, initial, tests, params)?;
        let energy_defect =
            energy_balance_defect(grid, fields, family.initial_energy[n - 1], params).map_err(|e| match e {
                Error::InfiniteEnergy { .. } => Error::InfiniteEnergy { member: n },
                other => other,
            })?;
        let reference = &family.reference_initial[n - 1];
        let vol = grid.space_volume();
        let mut rho_error = 0.0;
        let mut mom_error = 0.0;
        for (a, b) in initial.chunks_exact(q).zip(reference.chunks_exact(q)) {
            rho_error += (a[0] - b[0]).abs() * vol;
            mom_error += math::sqrt(a[1..].iter().zip(&b[1..]).map(|(x, y)| (x - y) * (x - y)).sum()) * vol;
        }
        members.push(MemberConsistency {
            member: n,
            residuals,
            energy_defect,
            initial_energy: family.initial_energy[n - 1],
            initial_density_error: rho_error,
            initial_momentum_error: mom_error,
        });
    }
    Ok(ConsistencyReport { trace_weight: params.trace_weight(), members })
}
