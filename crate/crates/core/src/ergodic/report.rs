use alloc::string::String;
use alloc::vec::Vec;

use super::correlation::{correlation_matrix, disintegration_gap, weak_correlation_verdict, ConvergenceVerdict};
use super::{check_schedule, check_tol, observable_table};
use crate::error::{Error, Result};
use crate::field::FieldSequence;
use crate::measures::{parametrized_distance, ParametrizedMeasure};
use crate::observables::{CompactObservable, ObservableDictionary, Weight};

/// Weighted ergodic means of one observable at every checkpoint, from a precomputed table.
fn checkpoint_means(table: &[f64], cells: usize, w: &Weight, schedule: &[usize]) -> Result<Vec<Vec<f64>>> {
    schedule
        .iter()
        .map(|&n| {
            let samples = w.normalized_samples(n)?;
            let mut acc = alloc::vec![0.0; cells];
            for (k, wk) in samples.iter().enumerate() {
                for (a, v) in acc.iter_mut().zip(&table[k * cells..(k + 1) * cells]) {
                    *a += wk * v;
                }
            }
            Ok(acc)
        })
        .collect()
}

fn l1_distance(a: &[f64], b: &[f64], vol: f64) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() * vol
}

fn max_pairwise(fields: &[Vec<f64>], vol: f64) -> f64 {
    let mut gap = 0.0_f64;
    for i in 0..fields.len() {
        for j in i + 1..fields.len() {
            gap = gap.max(l1_distance(&fields[i], &fields[j], vol));
        }
    }
    gap
}

fn verdict_from_fields(
    fields: Vec<Vec<f64>>,
    schedule: &[usize],
    vol: f64,
    measure: f64,
    tol: f64,
) -> ConvergenceVerdict {
    let gap = max_pairwise(&fields, vol) / measure;
    let values = fields.iter().map(|f| f.iter().sum::<f64>() * vol / measure).collect();
    ConvergenceVerdict::with_gap(schedule, values, gap, tol)
}

/// Cauchy verdict on the `L^1(Q)` gaps `|B_{N_i} - B_{N_j}| / |Q|` of the weighted
/// ergodic means of `b` over the checkpoints.
pub fn cauchy_verdict(
    seq: &FieldSequence,
    b: &CompactObservable,
    w: &Weight,
    schedule: &[usize],
    tol: f64,
) -> Result<ConvergenceVerdict> {
    check_schedule(schedule, seq.len())?;
    check_tol(tol)?;
    let grid = seq.grid();
    let table = observable_table(seq, b, *schedule.last().unwrap());
    let fields = checkpoint_means(&table, grid.cells(), w, schedule)?;
    Ok(verdict_from_fields(fields, schedule, grid.cell_volume(), grid.measure(), tol))
}

/// Largest pairwise `L^1(Q)` distance, over `|Q|`, between the weighted ergodic means of
/// `b` at level `n` across `weights`.
pub fn weight_spread(seq: &FieldSequence, b: &CompactObservable, weights: &[Weight], n: usize) -> Result<f64> {
    if weights.is_empty() {
        return Err(Error::invalid("weights", "need at least one weight"));
    }
    if n == 0 {
        return Err(Error::invalid("N", "must be >= 1"));
    }
    seq.require(n)?;
    let grid = seq.grid();
    let table = observable_table(seq, b, n);
    let fields: Vec<Vec<f64>> = weights
        .iter()
        .map(|w| checkpoint_means(&table, grid.cells(), w, &[n]).map(|mut f| f.pop().unwrap()))
        .collect::<Result<_>>()?;
    Ok(max_pairwise(&fields, grid.cell_volume()) / grid.measure())
}

/// Verdict built from correlation limits and the disintegration gap.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationSummary {
    pub converged: bool,
    /// Largest weak-correlation tail gap over observables and tested columns `m`.
    pub worst_tail_gap: f64,
    /// Largest `|Q|`-normalized disintegration gap at `N = max checkpoint`, `M` over the schedule.
    pub worst_disintegration_gap: f64,
    pub per_observable: Vec<bool>,
}

/// Correlation-side verdict: for every `b` in `dict`, the weak correlation limit
/// exists for `m = 1..=span` and the disintegration gap stays within `tol`.
pub fn correlation_verdict(
    seq: &FieldSequence,
    dict: &ObservableDictionary,
    schedule: &[usize],
    tol: f64,
    span: usize,
) -> Result<CorrelationSummary> {
    if dict.is_empty() {
        return Err(Error::invalid("dictionary", "must contain at least one observable"));
    }
    check_schedule(schedule, seq.len())?;
    check_tol(tol)?;
    let n_max = *schedule.last().unwrap();
    let span = span.clamp(1, n_max);
    let mut worst_tail_gap = 0.0_f64;
    let mut worst_disintegration_gap = 0.0_f64;
    let mut per_observable = Vec::with_capacity(dict.len());
    for b in dict.observables() {
        let rec = correlation_matrix(seq, b, n_max)?;
        let mut ok = true;
        for m in 1..=span {
            let v = weak_correlation_verdict(&rec, m, schedule, tol)?;
            worst_tail_gap = worst_tail_gap.max(v.tail_gap);
            ok &= v.converged;
        }
        for &m_level in schedule {
            let gap = disintegration_gap(&rec, &Weight::constant(), n_max, m_level)? / rec.measure();
            worst_disintegration_gap = worst_disintegration_gap.max(gap);
            ok &= gap <= tol;
        }
        per_observable.push(ok);
    }
    let converged = per_observable.iter().all(|&ok| ok);
    Ok(CorrelationSummary { converged, worst_tail_gap, worst_disintegration_gap, per_observable })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportEntry {
    /// Dictionary id of the observable.
    pub observable: usize,
    /// Index into [`SReport::weight_labels`].
    pub weight: usize,
    pub verdict: ConvergenceVerdict,
}

/// Statistical-limit report for one sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct SReport {
    pub schedule: Vec<usize>,
    pub tol: f64,
    pub weight_labels: Vec<String>,
    /// One entry per `(b, w)` in dictionary-major order.
    pub entries: Vec<ReportEntry>,
    /// Per observable: spread across weights at the last checkpoint, in `L^1(Q) / |Q|`.
    pub weight_spread: Vec<f64>,
    pub existence: bool,
    pub weight_independent: bool,
    pub converged: bool,
    /// Unweighted ergodic measure at the last checkpoint.
    pub limit: ParametrizedMeasure,
    /// `W_1` parametrized distances between consecutive checkpoint measures.
    pub measure_distances: Vec<f64>,
}

pub fn s_limit_report(
    seq: &FieldSequence,
    dict: &ObservableDictionary,
    weights: &[Weight],
    schedule: &[usize],
    tol: f64,
) -> Result<SReport> {
    if dict.is_empty() {
        return Err(Error::invalid("dictionary", "must contain at least one observable"));
    }
    if weights.is_empty() {
        return Err(Error::invalid("weights", "need at least one weight"));
    }
    if dict.dim() != seq.dim() {
        return Err(Error::invalid("dictionary", "state dimension does not match the sequence"));
    }
    check_schedule(schedule, seq.len())?;
    check_tol(tol)?;

    let grid = seq.grid();
    let (cells, vol, measure) = (grid.cells(), grid.cell_volume(), grid.measure());
    let n_max = *schedule.last().unwrap();

    let mut entries = Vec::with_capacity(dict.len() * weights.len());
    let mut weight_spread = Vec::with_capacity(dict.len());
    for b in dict.observables() {
        let table = observable_table(seq, b, n_max);
        let mut finals = Vec::with_capacity(weights.len());
        for (wi, w) in weights.iter().enumerate() {
            let fields = checkpoint_means(&table, cells, w, schedule)?;
            finals.push(fields.last().unwrap().clone());
            let verdict = verdict_from_fields(fields, schedule, vol, measure, tol);
            entries.push(ReportEntry { observable: b.id, weight: wi, verdict });
        }
        weight_spread.push(max_pairwise(&finals, vol) / measure);
    }

    let existence = entries.iter().all(|e| e.verdict.converged);
    let weight_independent = weight_spread.iter().all(|&s| s <= tol);

    let constant = Weight::constant();
    let mut measures = Vec::with_capacity(schedule.len());
    for &n in schedule {
        measures.push(ParametrizedMeasure::from_sequence(seq, &constant, n)?);
    }
    let measure_distances =
        measures.windows(2).map(|pair| parametrized_distance(&pair[0], &pair[1], 1.0)).collect::<Result<Vec<_>>>()?;

    Ok(SReport {
        schedule: schedule.to_vec(),
        tol,
        weight_labels: weights.iter().map(Weight::label).collect(),
        entries,
        weight_spread,
        existence,
        weight_independent,
        converged: existence && weight_independent,
        limit: measures.pop().unwrap(),
        measure_distances,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Grid;
    use crate::fixtures;
    use crate::observables::Profile;

    #[test]
    fn alternating_report_converges_to_half_half() {
        let seq = fixtures::alternating(Grid::unit(2), 512);
        let dict = ObservableDictionary::for_sequence(&seq, 5, Profile::Tent).unwrap();
        let rep = s_limit_report(&seq, &dict, &Weight::default_family(), &[64, 128, 256, 512], 1e-2).unwrap();
        assert!(rep.converged);
        for cell in rep.limit.cells() {
            assert_eq!(cell.len(), 2);
            assert_eq!(cell.barycenter(), alloc::vec![0.5]);
        }
        assert_eq!(rep.entries.len(), dict.len() * 6);
    }

    #[test]
    fn block_report_fails() {
        let seq = fixtures::block(Grid::unit(1), 512);
        let dict = ObservableDictionary::for_sequence(&seq, 5, Profile::Tent).unwrap();
        let rep = s_limit_report(&seq, &dict, &Weight::default_family(), &[64, 128, 256, 512], 1e-2).unwrap();
        assert!(!rep.existence);
        assert!(!rep.converged);
        let summary = correlation_verdict(&seq, &dict, &[64, 128, 256, 512], 1e-2, 8).unwrap();
        assert!(!summary.converged);
    }

    #[test]
    fn report_validates_inputs() {
        let seq = fixtures::alternating(Grid::unit(1), 16);
        let dict = ObservableDictionary::for_sequence(&seq, 3, Profile::Tent).unwrap();
        let w = Weight::default_family();
        assert!(s_limit_report(&seq, &dict, &w, &[], 1e-2).is_err());
        assert!(s_limit_report(&seq, &dict, &[], &[8], 1e-2).is_err());
        assert!(s_limit_report(&seq, &dict, &w, &[8, 32], 1e-2).is_err());
        assert!(s_limit_report(&seq, &dict, &w, &[8], 0.0).is_err());
    }
}
