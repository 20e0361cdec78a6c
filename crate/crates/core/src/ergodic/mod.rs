//! Deciding statistical convergence from finite data.
//!
//! A limit "exists" here when the values at a geometric checkpoint schedule
//! agree within a tolerance (Cauchy criterion), and the tail gap is reported
//! alongside the verdict.

mod correlation;
mod perturb;
mod report;
mod stationarity;

pub use correlation::{
    correlation_matrix, disintegration_gap, strong_correlation_verdict, weak_correlation_verdict, windowed_correlation,
    ConvergenceVerdict, CorrelationRecord, StrongVerdict,
};
pub use perturb::{perturb_on_index_set, perturbation_bound, statistical_density_gap, IndexSet};
pub use report::{
    cauchy_verdict, correlation_verdict, s_limit_report, weight_spread, CorrelationSummary, ReportEntry, SReport,
};
pub use stationarity::{
    averaged_stationarity_modulus, stationarity_modulus, StationarityModulus, StationarityOptions,
    FULL_ENUMERATION_LIMIT,
};

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::FieldSequence;
use crate::observables::CompactObservable;

/// Default tolerance on unit-normalized quantities.
pub const DEFAULT_TOL: f64 = 1e-2;

/// `{n0, 2 n0, 4 n0, ...}` with `count` entries.
pub fn geometric_schedule(n0: usize, count: usize) -> Vec<usize> {
    (0..count).map(|k| n0 << k).collect()
}

/// `b(U_n(cell))` for `n` in `1..=len`, row-major in `n`.
pub(crate) fn observable_table(seq: &FieldSequence, b: &CompactObservable, len: usize) -> Vec<f64> {
    let cells = seq.grid().cells();
    let mut table = Vec::with_capacity(len * cells);
    for n in 1..=len {
        table.extend((0..cells).map(|c| b.eval(seq.point(n, c))));
    }
    table
}

pub(crate) fn check_schedule(schedule: &[usize], max: usize) -> Result<()> {
    if schedule.is_empty() {
        return Err(Error::invalid("schedule", "must contain at least one checkpoint"));
    }
    if schedule[0] == 0 || schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("schedule", "checkpoints must be positive and strictly increasing"));
    }
    let last = *schedule.last().unwrap();
    if last > max {
        return Err(Error::SequenceTooShort { required: last, available: max });
    }
    Ok(())
}

pub(crate) fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("tol", "must be positive and finite"))
    }
}
