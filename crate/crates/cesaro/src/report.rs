//! JSON and CSV artifacts written by the CLI.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use cesaro_core::ergodic::{CorrelationSummary, SReport};
use cesaro_core::euler::{ConsistencyReport, Family, FamilyConfig, TestFunction};
use cesaro_core::field::Grid;
use cesaro_core::{EmpiricalMeasure, ObservableDictionary, ParametrizedMeasure};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ReportFile {
    SReport(Box<SReportJson>),
    Consistency(ConsistencyJson),
    Perturbation(PerturbationJson),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableJson {
    pub id: usize,
    pub center: Vec<f64>,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryJson {
    pub observable: usize,
    pub weight: String,
    pub checkpoints: Vec<usize>,
    pub values: Vec<f64>,
    pub estimate: f64,
    pub tail_gap: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationJson {
    pub converged: bool,
    pub worst_tail_gap: f64,
    pub worst_disintegration_gap: f64,
}

/// Reynolds-defect and boundary-energy diagnostics for `(rho, m)` data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EulerJson {
    pub level: usize,
    pub defect_max_frobenius: f64,
    pub defect_min_eigenvalue: f64,
    /// Largest gap between the defect trace and its energy-side recomputation.
    pub trace_mismatch: f64,
    pub boundary_width: f64,
    pub boundary_volume: f64,
    pub boundary_energy_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SReportJson {
    pub source: String,
    pub len: usize,
    pub dim: usize,
    pub measure: f64,
    pub schedule: Vec<usize>,
    pub tol: f64,
    pub weights: Vec<String>,
    pub dictionary: Vec<ObservableJson>,
    pub entries: Vec<EntryJson>,
    pub weight_spread: Vec<f64>,
    pub existence: bool,
    pub weight_independent: bool,
    pub converged: bool,
    pub correlation: CorrelationJson,
    /// Unweighted ergodic-mean Cauchy verdict over the dictionary.
    pub cauchy_converged: bool,
    /// The Cauchy-side and correlation-side verdicts agree.
    pub verdicts_agree: bool,
    /// Parametrized `W_1` distances between consecutive checkpoint measures.
    pub measure_distances: Vec<f64>,
    /// Barycenter of the limit measure, per space-time cell.
    pub limit_barycenter: Vec<Vec<f64>>,
    pub limit_atoms: usize,
    pub euler: Option<EulerJson>,
}

impl SReportJson {
    pub fn new(
        source: String,
        dict: &ObservableDictionary,
        report: &SReport,
        correlation: &CorrelationSummary,
        cauchy_converged: bool,
        euler: Option<EulerJson>,
    ) -> Self {
        let grid = report.limit.grid();
        let entries = report
            .entries
            .iter()
            .map(|e| EntryJson {
                observable: e.observable,
                weight: report.weight_labels[e.weight].clone(),
                checkpoints: e.verdict.checkpoints.clone(),
                values: e.verdict.values.clone(),
                estimate: e.verdict.estimate,
                tail_gap: e.verdict.tail_gap,
                converged: e.verdict.converged,
            })
            .collect();
        Self {
            source,
            len: *report.schedule.last().unwrap(),
            dim: dict.dim(),
            measure: grid.measure(),
            schedule: report.schedule.clone(),
            tol: report.tol,
            weights: report.weight_labels.clone(),
            dictionary: dict
                .observables()
                .iter()
                .map(|b| ObservableJson { id: b.id, center: b.center.clone(), radius: b.radius })
                .collect(),
            entries,
            weight_spread: report.weight_spread.clone(),
            existence: report.existence,
            weight_independent: report.weight_independent,
            converged: report.converged,
            correlation: CorrelationJson {
                converged: correlation.converged,
                worst_tail_gap: correlation.worst_tail_gap,
                worst_disintegration_gap: correlation.worst_disintegration_gap,
            },
            cauchy_converged,
            verdicts_agree: correlation.converged == cauchy_converged,
            measure_distances: report.measure_distances.clone(),
            limit_barycenter: report.limit.cells().iter().map(|mu| mu.barycenter()).collect(),
            limit_atoms: report.limit.cells().iter().map(|mu| mu.len()).sum(),
            euler,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualJson {
    pub mode: [i32; 2],
    pub phase: String,
    pub continuity: f64,
    pub momentum: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberJson {
    pub member: usize,
    pub cells: [usize; 2],
    pub eps: f64,
    pub max_continuity: f64,
    pub max_momentum: f64,
    pub residuals: Vec<ResidualJson>,
    /// `min_t (E_n - int E(t))`; negative values flag an energy increase.
    pub min_energy_defect: f64,
    pub initial_energy: f64,
    pub max_energy: f64,
    pub mass_drift: f64,
    pub initial_density_error: f64,
    pub initial_momentum_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyJson {
    pub preset: String,
    pub trace_weight: f64,
    pub members: Vec<MemberJson>,
    /// Every member satisfies `int E(t) <= E_n (1 + 1e-10)`.
    pub admissible: bool,
    pub max_mass_drift: f64,
}

impl ConsistencyJson {
    pub fn new(
        preset: &str,
        config: &FamilyConfig,
        family: &Family,
        tests: &[TestFunction],
        report: &ConsistencyReport,
    ) -> Self {
        let members: Vec<MemberJson> = report
            .members
            .iter()
            .zip(&config.members)
            .map(|(m, spec)| {
                let i = m.member - 1;
                MemberJson {
                    member: m.member,
                    cells: spec.cells,
                    eps: spec.eps,
                    max_continuity: m.max_continuity(),
                    max_momentum: m.max_momentum(),
                    residuals: m
                        .residuals
                        .iter()
                        .zip(tests)
                        .map(|(r, phi)| ResidualJson {
                            mode: phi.mode,
                            phase: format!("{:?}", phi.phase).to_lowercase(),
                            continuity: r.continuity,
                            momentum: r.momentum.clone(),
                        })
                        .collect(),
                    min_energy_defect: m.min_energy_defect(),
                    initial_energy: m.initial_energy,
                    max_energy: family.energy[i].iter().copied().fold(f64::NEG_INFINITY, f64::max),
                    mass_drift: family.mass_drift[i],
                    initial_density_error: m.initial_density_error,
                    initial_momentum_error: m.initial_momentum_error,
                }
            })
            .collect();
        let admissible = members.iter().all(|m| m.max_energy <= m.initial_energy * (1.0 + 1e-10));
        let max_mass_drift = members.iter().map(|m| m.mass_drift).fold(0.0, f64::max);
        Self { preset: preset.to_string(), trace_weight: report.trace_weight, members, admissible, max_mass_drift }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundJson {
    pub n: usize,
    /// Counted density of the index set up to `n`.
    pub density: f64,
    /// Bound on the parametrized `W_1` distance between the level-`n` Cesàro measures
    /// of the original and perturbed sequences.
    pub w1_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationJson {
    pub source: String,
    pub index_set: String,
    pub magnitude: f64,
    pub seed: u64,
    pub len: usize,
    pub perturbed_members: usize,
    pub bounds: Vec<BoundJson>,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(std::io::Error::other)?;
    text.push('\n');
    std::fs::write(path, text)
}

/// One row per atom: `cell, t, x, atom, weight, u0, ...`.
pub fn write_measure_csv<W: Write>(out: W, measure: &ParametrizedMeasure) -> csv::Result<()> {
    let grid = measure.grid();
    let dim = measure.cells().first().map_or(0, |mu| mu.dim());
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = ["cell", "t", "x", "atom", "weight"].iter().map(|s| s.to_string()).collect();
    header.extend((0..dim).map(|k| format!("u{k}")));
    w.write_record(&header)?;
    for (cell, mu) in measure.cells().iter().enumerate() {
        let (t, x) = grid.split(cell);
        for (i, (point, weight)) in mu.atoms().enumerate() {
            let mut row = vec![cell.to_string(), t.to_string(), x.to_string(), i.to_string(), weight.to_string()];
            row.extend(point.iter().map(|v| v.to_string()));
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a measure CSV back as `(cell, weight, point)` rows.
pub fn read_measure_csv(path: &Path) -> csv::Result<Vec<(usize, f64, Vec<f64>)>> {
    let mut r = csv::Reader::from_path(path)?;
    let mut rows = Vec::new();
    for record in r.records() {
        let record = record?;
        let parse = |i: usize| {
            record.get(i).unwrap_or("").parse::<f64>().map_err(|e| csv::Error::from(std::io::Error::other(e)))
        };
        let cell = parse(0)? as usize;
        let weight = parse(4)?;
        let point = (5..record.len()).map(parse).collect::<csv::Result<Vec<f64>>>()?;
        rows.push((cell, weight, point));
    }
    Ok(rows)
}

/// Rebuilds a parametrized measure on `grid` from [`read_measure_csv`] rows.
pub fn measure_from_rows(grid: &Grid, rows: &[(usize, f64, Vec<f64>)]) -> cesaro_core::Result<ParametrizedMeasure> {
    let dim = rows.first().map_or(1, |r| r.2.len());
    let mut points = vec![Vec::new(); grid.cells()];
    let mut weights = vec![Vec::new(); grid.cells()];
    for (cell, w, p) in rows {
        let cell = *cell;
        if cell >= grid.cells() {
            return Err(cesaro_core::Error::GridMismatch);
        }
        points[cell].extend_from_slice(p);
        weights[cell].push(*w);
    }
    let cells = points
        .into_iter()
        .zip(weights)
        .map(|(p, w)| {
            // weights were printed in shortest round-trip form, so the sum is preserved
            EmpiricalMeasure::new(dim, p, w)
        })
        .collect::<cesaro_core::Result<Vec<_>>>()?;
    ParametrizedMeasure::new(grid.clone(), cells)
}

type Table<'a> = (&'a str, &'a [&'a str], Vec<Vec<String>>);

/// Flattens reports into CSV tables under `dir`; returns the files written.
pub fn write_tables(dir: &Path, reports: &[(String, ReportFile)]) -> csv::Result<Vec<String>> {
    let mut written = Vec::new();
    let mut s_rows = Vec::new();
    let mut c_rows = Vec::new();
    let mut p_rows = Vec::new();
    for (source, report) in reports {
        match report {
            ReportFile::SReport(r) => {
                for e in &r.entries {
                    for (n, v) in e.checkpoints.iter().zip(&e.values) {
                        s_rows.push(vec![
                            source.clone(),
                            e.observable.to_string(),
                            e.weight.clone(),
                            n.to_string(),
                            v.to_string(),
                            e.tail_gap.to_string(),
                            e.converged.to_string(),
                        ]);
                    }
                }
            }
            ReportFile::Consistency(r) => {
                for m in &r.members {
                    for res in &m.residuals {
                        let mom = res.momentum.iter().map(|v| v.abs()).fold(0.0, f64::max);
                        c_rows.push(vec![
                            source.clone(),
                            m.member.to_string(),
                            m.cells[0].to_string(),
                            m.eps.to_string(),
                            format!("{}:{}:{}", res.mode[0], res.mode[1], res.phase),
                            res.continuity.to_string(),
                            mom.to_string(),
                            m.min_energy_defect.to_string(),
                            m.mass_drift.to_string(),
                        ]);
                    }
                }
            }
            ReportFile::Perturbation(r) => {
                for b in &r.bounds {
                    p_rows.push(vec![
                        source.clone(),
                        r.index_set.clone(),
                        r.magnitude.to_string(),
                        b.n.to_string(),
                        b.density.to_string(),
                        b.w1_bound.to_string(),
                    ]);
                }
            }
        }
    }
    let tables: [Table; 3] = [
        ("s_report.csv", &["source", "observable", "weight", "checkpoint", "value", "tail_gap", "converged"], s_rows),
        (
            "consistency.csv",
            &["source", "member", "cells", "eps", "test", "continuity", "momentum", "min_energy_defect", "mass_drift"],
            c_rows,
        ),
        ("perturbation.csv", &["source", "index_set", "magnitude", "n", "density", "w1_bound"], p_rows),
    ];
    for (name, header, rows) in tables {
        if rows.is_empty() {
            continue;
        }
        let mut w = csv::Writer::from_path(dir.join(name))?;
        w.write_record(header)?;
        for row in rows {
            w.write_record(&row)?;
        }
        w.flush()?;
        written.push(name.to_string());
    }
    Ok(written)
}
