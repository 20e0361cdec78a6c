use alloc::vec::Vec;

use super::{check_schedule, check_tol, observable_table};
use crate::error::{Error, Result};
use crate::field::FieldSequence;
use crate::math;
use crate::observables::{CompactObservable, Weight};

/// `C[n, m] = int_Q b(U_n) b(U_m) dy` for `1 <= n, m <= N`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationRecord {
    observable: usize,
    len: usize,
    measure: f64,
    matrix: Vec<f64>,
}

impl CorrelationRecord {
    pub fn observable(&self) -> usize {
        self.observable
    }

    /// Number of members `N` the record spans.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// `|Q|`.
    pub fn measure(&self) -> f64 {
        self.measure
    }

    /// `C[n, m]`, one-based.
    #[inline]
    pub fn get(&self, n: usize, m: usize) -> f64 {
        self.matrix[(n - 1) * self.len + (m - 1)]
    }

    fn check_index(&self, m: usize) -> Result<()> {
        if m == 0 || m > self.len {
            Err(Error::invalid("m", alloc::format!("must lie in 1..={}", self.len)))
        } else {
            Ok(())
        }
    }

    /// `(1/w_N) sum_{n<=N} w(n/N) C[n, m]`.
    /// `sum_n weights[n-1] C[n, m]` for normalized weights.
    fn weighted_column_mean(&self, m: usize, weights: &[f64]) -> f64 {
        weights.iter().enumerate().map(|(k, wk)| wk * self.get(k + 1, m)).sum()
    }
}

pub fn correlation_matrix(seq: &FieldSequence, b: &CompactObservable, n: usize) -> Result<CorrelationRecord> {
    if n == 0 {
        return Err(Error::invalid("N", "must be >= 1"));
    }
    seq.require(n)?;
    let cells = seq.grid().cells();
    let vol = seq.grid().cell_volume();
    let table = observable_table(seq, b, n);
    let mut matrix = alloc::vec![0.0; n * n];
    for i in 0..n {
        let row_i = &table[i * cells..(i + 1) * cells];
        for j in i..n {
            let row_j = &table[j * cells..(j + 1) * cells];
            let c: f64 = row_i.iter().zip(row_j).map(|(x, y)| x * y).sum::<f64>() * vol;
            matrix[i * n + j] = c;
            matrix[j * n + i] = c;
        }
    }
    Ok(CorrelationRecord { observable: b.id, len: n, measure: seq.grid().measure(), matrix })
}

/// Finite-`N` surrogate for "the limit exists".
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceVerdict {
    /// Value at the last checkpoint.
    pub estimate: f64,
    /// Largest pairwise difference over the checkpoint values.
    pub tail_gap: f64,
    pub tol: f64,
    pub converged: bool,
    pub checkpoints: Vec<usize>,
    pub values: Vec<f64>,
}

impl ConvergenceVerdict {
    pub fn from_values(checkpoints: &[usize], values: Vec<f64>, tol: f64) -> Self {
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let tail_gap = max - min;
        Self::with_gap(checkpoints, values, tail_gap, tol)
    }

    pub(crate) fn with_gap(checkpoints: &[usize], values: Vec<f64>, tail_gap: f64, tol: f64) -> Self {
        Self {
            estimate: *values.last().expect("at least one checkpoint"),
            tail_gap,
            tol,
            converged: tail_gap <= tol,
            checkpoints: checkpoints.to_vec(),
            values,
        }
    }
}

fn weighted_verdict(
    rec: &CorrelationRecord,
    m: usize,
    w: &Weight,
    schedule: &[usize],
    tol: f64,
) -> Result<ConvergenceVerdict> {
    let values = schedule
        .iter()
        .map(|&n| Ok(rec.weighted_column_mean(m, &w.normalized_samples(n)?) / rec.measure))
        .collect::<Result<Vec<f64>>>()?;
    Ok(ConvergenceVerdict::from_values(schedule, values, tol))
}

fn check_common(rec: &CorrelationRecord, m: usize, schedule: &[usize], tol: f64) -> Result<()> {
    rec.check_index(m)?;
    check_schedule(schedule, rec.len)?;
    check_tol(tol)
}

/// Existence of `lim (1/N) sum_n C[n, m] / |Q|` along `schedule`.
pub fn weak_correlation_verdict(
    rec: &CorrelationRecord,
    m: usize,
    schedule: &[usize],
    tol: f64,
) -> Result<ConvergenceVerdict> {
    check_common(rec, m, schedule, tol)?;
    weighted_verdict(rec, m, &Weight::constant(), schedule, tol)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrongVerdict {
    pub per_weight: Vec<ConvergenceVerdict>,
    /// `max - min` of the per-weight estimates at the last checkpoint.
    pub spread: f64,
    pub tol: f64,
    pub converged: bool,
}

/// Existence and weight independence of the weighted correlation limit.
pub fn strong_correlation_verdict(
    rec: &CorrelationRecord,
    m: usize,
    weights: &[Weight],
    schedule: &[usize],
    tol: f64,
) -> Result<StrongVerdict> {
    if weights.is_empty() {
        return Err(Error::invalid("weights", "need at least one weight"));
    }
    check_common(rec, m, schedule, tol)?;
    let per_weight: Vec<_> =
        weights.iter().map(|w| weighted_verdict(rec, m, w, schedule, tol)).collect::<Result<_>>()?;
    let max = per_weight.iter().map(|v| v.estimate).fold(f64::NEG_INFINITY, f64::max);
    let min = per_weight.iter().map(|v| v.estimate).fold(f64::INFINITY, f64::min);
    let spread = max - min;
    let converged = per_weight.iter().all(|v| v.converged) && spread <= tol;
    Ok(StrongVerdict { per_weight, spread, tol, converged })
}

/// `(1/(beta - alpha)) (1/N) sum_{alpha N <= n <= beta N} C[n, m]`.
pub fn windowed_correlation(rec: &CorrelationRecord, alpha: f64, beta: f64, m: usize, n: usize) -> Result<f64> {
    if !(0.0 <= alpha && alpha < beta && beta <= 1.0) {
        return Err(Error::invalid("window", "need 0 <= alpha < beta <= 1"));
    }
    rec.check_index(m)?;
    if n == 0 || n > rec.len {
        return Err(Error::SequenceTooShort { required: n, available: rec.len });
    }
    let lo = (math::ceil(alpha * n as f64) as usize).max(1);
    let hi = math::floor(beta * n as f64) as usize;
    if lo > hi {
        return Err(Error::EmptyWindow);
    }
    let sum: f64 = (lo..=hi).map(|k| rec.get(k, m)).sum();
    Ok(sum / (n as f64 * (beta - alpha)))
}

/// `|LHS(N) - RHS(M, N)|` of the (weighted) correlation disintegration identity.
pub fn disintegration_gap(rec: &CorrelationRecord, w: &Weight, n: usize, m_level: usize) -> Result<f64> {
    if m_level == 0 || m_level > n || n > rec.len {
        return Err(Error::invalid("levels", "need 1 <= M <= N <= record length"));
    }
    let wn = w.normalized_samples(n)?;
    let mut lhs = 0.0;
    for (i, wi) in wn.iter().enumerate() {
        let mut row = 0.0;
        for (j, wj) in wn.iter().enumerate() {
            row += wj * rec.get(i + 1, j + 1);
        }
        lhs += wi * row;
    }

    let wm = w.normalized_samples(m_level)?;
    let mut rhs = 0.0;
    for (j, wj) in wm.iter().enumerate() {
        rhs += wj * rec.weighted_column_mean(j + 1, &wn);
    }
    Ok((lhs - rhs).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Grid;
    use crate::fixtures;
    use crate::observables::Profile;

    fn indicator() -> CompactObservable {
        CompactObservable::new(alloc::vec![1.0], 1.0, Profile::Tent, 0).unwrap()
    }

    #[test]
    fn constant_sequence_all_ones() {
        let seq = fixtures::constant(Grid::unit(2), 1, 3, 1.0);
        let rec = correlation_matrix(&seq, &indicator(), 3).unwrap();
        for n in 1..=3 {
            for m in 1..=3 {
                assert!((rec.get(n, m) - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn alternating_indicator_products() {
        let seq = fixtures::alternating(Grid::unit(1), 6);
        let rec = correlation_matrix(&seq, &indicator(), 6).unwrap();
        for n in 1..=6 {
            for m in 1..=6 {
                let expect = if n % 2 == 1 && m % 2 == 1 { 1.0 } else { 0.0 };
                assert_eq!(rec.get(n, m), expect);
            }
        }
    }

    #[test]
    fn weak_verdict_alternating() {
        let seq = fixtures::alternating(Grid::unit(1), 256);
        let rec = correlation_matrix(&seq, &indicator(), 256).unwrap();
        let v = weak_correlation_verdict(&rec, 1, &[64, 128, 256], 0.05).unwrap();
        assert!(v.converged);
        assert_eq!(v.estimate, 0.5);
        assert!(weak_correlation_verdict(&rec, 257, &[64], 0.05).is_err());
        assert!(weak_correlation_verdict(&rec, 1, &[128, 64], 0.05).is_err());
    }

    #[test]
    fn weak_verdict_block_oscillates() {
        let seq = fixtures::block(Grid::unit(1), 1024);
        let rec = correlation_matrix(&seq, &indicator(), 1024).unwrap();
        let v = weak_correlation_verdict(&rec, 1, &[256, 512, 1024], 0.05).unwrap();
        assert!(!v.converged);
        assert!((v.tail_gap - 1.0 / 3.0).abs() < 0.01, "{}", v.tail_gap);
    }

    #[test]
    fn windowed_block_halves_differ() {
        let seq = fixtures::block(Grid::unit(1), 512);
        let rec = correlation_matrix(&seq, &indicator(), 512).unwrap();
        let first = windowed_correlation(&rec, 0.0, 0.5, 1, 512).unwrap();
        let second = windowed_correlation(&rec, 0.5, 1.0, 1, 512).unwrap();
        assert!((second - first).abs() >= 0.2);
        assert_eq!(windowed_correlation(&rec, 0.51, 0.55, 1, 10), Err(Error::EmptyWindow));
        assert!(windowed_correlation(&rec, 0.5, 0.5, 1, 10).is_err());
    }

    #[test]
    fn windowed_alternating_full_window() {
        let seq = fixtures::alternating(Grid::unit(1), 100);
        let rec = correlation_matrix(&seq, &indicator(), 100).unwrap();
        assert_eq!(windowed_correlation(&rec, 0.0, 1.0, 3, 100).unwrap(), 0.5);
    }

    #[test]
    fn disintegration_closed_form_alternating() {
        let seq = fixtures::alternating(Grid::unit(1), 41);
        let rec = correlation_matrix(&seq, &indicator(), 41).unwrap();
        for (n, m) in [(41, 41), (41, 7), (40, 13), (9, 2)] {
            let half = |k: usize| k.div_ceil(2) as f64 / k as f64;
            let expect = (half(n) * half(n) - half(m) * half(n)).abs();
            let gap = disintegration_gap(&rec, &Weight::constant(), n, m).unwrap();
            assert!((gap - expect).abs() < 1e-14);
            assert!(gap <= 1.0 / m.min(n) as f64);
        }
        assert!(disintegration_gap(&rec, &Weight::constant(), 5, 6).is_err());
    }

    #[test]
    fn strong_verdict_rejects_empty_weights() {
        let seq = fixtures::alternating(Grid::unit(1), 8);
        let rec = correlation_matrix(&seq, &indicator(), 8).unwrap();
        assert!(strong_correlation_verdict(&rec, 1, &[], &[4, 8], 0.1).is_err());
    }
}
