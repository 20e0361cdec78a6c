//! TOML run configuration. Everything is validated before any compute starts.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use cesaro_core::ergodic::IndexSet;
use cesaro_core::euler::{EulerParams, FamilyConfig, InitialData, MemberSpec};
use cesaro_core::field::{FieldSequence, Grid};
use cesaro_core::fixtures;
use cesaro_core::{CompactObservable, ObservableDictionary, Profile, Weight};

/// A schema violation, reported as `field: reason`.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{field}: {reason}")]
pub struct ConfigError {
    pub field: String,
    pub reason: String,
}

fn bad(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError { field: field.to_string(), reason: reason.into() }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub family: FamilySection,
    #[serde(default)]
    pub input: InputSection,
    #[serde(default)]
    pub analysis: AnalysisSection,
    #[serde(default)]
    pub perturb: PerturbSection,
    #[serde(default)]
    pub report: ReportSection,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub a: f64,
    pub gamma: f64,
    pub space_dim: usize,
    pub cfl: f64,
    pub final_time: f64,
    /// Recorded time levels per member.
    pub time_steps: usize,
    pub lengths: [f64; 2],
}

impl Default for SolverSection {
    fn default() -> Self {
        Self { a: 1.0, gamma: 1.4, space_dim: 1, cfl: 0.45, final_time: 0.5, time_steps: 32, lengths: [1.0, 1.0] }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FamilySection {
    /// `constant`, `smooth-wave`, `riemann`, or `alternating-momentum-fixture`.
    pub preset: String,
    pub members: usize,
    /// Cells per axis for each member (`h` schedule); a single entry is broadcast.
    pub cells: Vec<usize>,
    /// Viscosity for each member; a single entry is broadcast.
    pub eps: Vec<f64>,
    pub rho: f64,
    pub momentum: [f64; 2],
    pub amplitude: f64,
    pub inner: f64,
    pub outer: f64,
}

impl Default for FamilySection {
    fn default() -> Self {
        Self {
            preset: "smooth-wave".into(),
            members: 8,
            cells: vec![32],
            eps: vec![0.0],
            rho: 1.0,
            momentum: [0.0, 0.0],
            amplitude: 0.2,
            inner: 2.0,
            outer: 1.0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InputSection {
    /// Snapshot to analyze or perturb; defaults to `<out>/snapshot.bin`. `--input` overrides it.
    pub snapshot: Option<PathBuf>,
    /// Synthetic sequence instead of a snapshot: `constant`, `alternating`, `period-3`,
    /// `strongly-convergent`, `block`, `alternating-momentum`.
    pub fixture: Option<String>,
    pub len: Option<usize>,
    pub cells: Option<usize>,
    pub amplitude: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableSpec {
    pub center: Vec<f64>,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DictionarySection {
    pub points_per_dim: usize,
    /// `tent` or `smooth-bump`.
    pub profile: String,
    /// Explicit observables; replaces the lattice when present.
    pub observables: Option<Vec<ObservableSpec>>,
}

impl Default for DictionarySection {
    fn default() -> Self {
        Self { points_per_dim: 5, profile: "tent".into(), observables: None }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisSection {
    pub dictionary: DictionarySection,
    /// Labels: `const`, `linear`, `poly<k>`, `tent@<center>/<width>`; empty means the shipped six.
    pub weights: Vec<String>,
    /// Empty means `len/8, len/4, len/2, len`, keeping only levels `>= min(4, len)`.
    pub checkpoints: Vec<usize>,
    pub tol: f64,
    /// Columns `m = 1..=span` checked by the correlation verdict.
    pub span: usize,
    /// Width of the boundary layer for the energy check on Euler data.
    pub boundary_width: f64,
}

impl Default for AnalysisSection {
    fn default() -> Self {
        Self {
            dictionary: DictionarySection::default(),
            weights: Vec::new(),
            checkpoints: Vec::new(),
            tol: 1e-2,
            span: 4,
            boundary_width: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PerturbSection {
    /// `squares`, `powers-of-two`, or `custom` with `indices`.
    pub index_set: String,
    pub indices: Vec<usize>,
    pub magnitude: f64,
}

impl Default for PerturbSection {
    fn default() -> Self {
        Self { index_set: "squares".into(), indices: Vec::new(), magnitude: 1.0 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReportSection {
    /// JSON reports to merge; defaults to the known report files under `--out`.
    pub inputs: Vec<PathBuf>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| {
            let field = e.span().map(|s| text[s].lines().next().unwrap_or("").trim().to_string()).unwrap_or_default();
            let field = if field.is_empty() { "config".to_string() } else { field };
            bad(&field, e.message().trim())
        })?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| bad("config", format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn euler_params(&self) -> Result<EulerParams, ConfigError> {
        let s = &self.solver;
        EulerParams::new(s.a, s.gamma, s.space_dim, 0.0, s.cfl).map_err(|e| bad("solver", e.to_string()))
    }

    pub fn family_config(&self) -> Result<FamilyConfig, ConfigError> {
        let params = self.euler_params()?;
        let s = &self.solver;
        let f = &self.family;
        if !(s.final_time > 0.0 && s.final_time.is_finite()) {
            return Err(bad("solver.final_time", "must be positive"));
        }
        if s.time_steps == 0 {
            return Err(bad("solver.time_steps", "must be positive"));
        }
        if s.lengths.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
            return Err(bad("solver.lengths", "must be positive"));
        }
        if f.members == 0 {
            return Err(bad("family.members", "need at least one member"));
        }
        let broadcast = |field: &str, len: usize| -> Result<(), ConfigError> {
            if len == 1 || len == f.members {
                Ok(())
            } else {
                Err(bad(field, format!("expected 1 or {} entries, found {len}", f.members)))
            }
        };
        broadcast("family.cells", f.cells.len())?;
        broadcast("family.eps", f.eps.len())?;
        if f.cells.contains(&0) {
            return Err(bad("family.cells", "must be positive"));
        }
        if f.eps.iter().any(|&e| !(e >= 0.0 && e.is_finite())) {
            return Err(bad("family.eps", "must be non-negative"));
        }
        let coarsest = *f.cells.iter().min().unwrap();
        if f.cells.iter().any(|c| c % coarsest != 0) {
            return Err(bad("family.cells", "every entry must be a multiple of the smallest"));
        }
        let initial = match f.preset.as_str() {
            "constant" => InitialData::Constant { rho: f.rho, mom: f.momentum },
            "smooth-wave" => {
                if f.amplitude.is_nan() || f.amplitude.abs() >= 1.0 {
                    return Err(bad("family.amplitude", "must be below 1 in magnitude"));
                }
                InitialData::SmoothWave { amplitude: f.amplitude }
            }
            "riemann" => InitialData::Riemann { inner: f.inner, outer: f.outer },
            "alternating-momentum-fixture" => InitialData::AlternatingMomentum,
            other => return Err(bad("family.preset", format!("unknown preset `{other}`"))),
        };
        let members = (0..f.members)
            .map(|i| {
                let c = f.cells[if f.cells.len() == 1 { 0 } else { i }];
                let eps = f.eps[if f.eps.len() == 1 { 0 } else { i }];
                MemberSpec { cells: [c, if s.space_dim == 2 { c } else { 1 }], eps }
            })
            .collect();
        Ok(FamilyConfig {
            params,
            initial,
            final_time: s.final_time,
            time_steps: s.time_steps,
            lengths: s.lengths,
            members,
        })
    }

    /// Synthetic input sequence, if one is configured.
    pub fn fixture(&self) -> Result<Option<FieldSequence>, ConfigError> {
        let Some(name) = self.input.fixture.as_deref() else {
            return Ok(None);
        };
        let len = self.input.len.unwrap_or(512);
        let cells = self.input.cells.unwrap_or(4);
        if len == 0 {
            return Err(bad("input.len", "must be positive"));
        }
        if cells == 0 {
            return Err(bad("input.cells", "must be positive"));
        }
        let grid = Grid::unit(cells);
        Ok(Some(match name {
            "constant" => fixtures::constant(grid, 1, len, 0.3),
            "alternating" => fixtures::alternating(grid, len),
            "period-3" => fixtures::periodic(grid, len, &[0.0, 0.5, 1.0]),
            "strongly-convergent" => fixtures::strongly_convergent(grid, len, self.input.amplitude.unwrap_or(20.0)),
            "block" => fixtures::block(grid, len),
            "alternating-momentum" => fixtures::alternating_momentum(grid, len),
            other => return Err(bad("input.fixture", format!("unknown fixture `{other}`"))),
        }))
    }

    pub fn weights(&self) -> Result<Vec<Weight>, ConfigError> {
        if self.analysis.weights.is_empty() {
            return Ok(Weight::default_family());
        }
        self.analysis.weights.iter().map(|label| parse_weight(label)).collect()
    }

    /// Weights, checked to have `w_N > 0` at every checkpoint.
    pub fn weights_for(&self, schedule: &[usize]) -> Result<Vec<Weight>, ConfigError> {
        let weights = self.weights()?;
        for w in &weights {
            if let Some(&n) = schedule.iter().find(|&&n| w.partial_sum(n).is_err()) {
                return Err(bad(
                    "analysis.weights",
                    format!("`{}` vanishes at every sample for checkpoint {n}", w.label()),
                ));
            }
        }
        Ok(weights)
    }

    pub fn profile(&self) -> Result<Profile, ConfigError> {
        match self.analysis.dictionary.profile.as_str() {
            "tent" => Ok(Profile::Tent),
            "smooth-bump" => Ok(Profile::SmoothBump),
            other => Err(bad("analysis.dictionary.profile", format!("unknown profile `{other}`"))),
        }
    }

    /// Checks the dictionary settings without data.
    pub fn check_dictionary(&self) -> Result<(), ConfigError> {
        let d = &self.analysis.dictionary;
        self.profile()?;
        match &d.observables {
            Some(list) if list.is_empty() => Err(bad("analysis.dictionary", "must contain at least one observable")),
            Some(list) => {
                let dim = list[0].center.len();
                if dim == 0 || list.iter().any(|o| o.center.len() != dim) {
                    return Err(bad("analysis.dictionary.observables", "centers must share a positive dimension"));
                }
                if list.iter().any(|o| !(o.radius > 0.0 && o.radius.is_finite())) {
                    return Err(bad("analysis.dictionary.observables", "radius must be positive"));
                }
                Ok(())
            }
            None if d.points_per_dim == 0 => Err(bad("analysis.dictionary", "points_per_dim must be positive")),
            None => Ok(()),
        }
    }

    pub fn dictionary(&self, seq: &FieldSequence) -> Result<ObservableDictionary, ConfigError> {
        self.check_dictionary()?;
        let d = &self.analysis.dictionary;
        let profile = self.profile()?;
        let dict = match &d.observables {
            Some(list) => {
                let obs = list
                    .iter()
                    .enumerate()
                    .map(|(id, o)| CompactObservable::new(o.center.clone(), o.radius, profile, id))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| bad("analysis.dictionary.observables", e.to_string()))?;
                ObservableDictionary::from_observables(obs).map_err(|e| bad("analysis.dictionary", e.to_string()))?
            }
            None => ObservableDictionary::for_sequence(seq, d.points_per_dim, profile)
                .map_err(|e| bad("analysis.dictionary", e.to_string()))?,
        };
        if dict.dim() != seq.dim() {
            return Err(bad(
                "analysis.dictionary",
                format!("dimension {} does not match data dimension {}", dict.dim(), seq.dim()),
            ));
        }
        Ok(dict)
    }

    /// Checkpoint schedule for a sequence of length `len`.
    pub fn checkpoints(&self, len: usize) -> Result<Vec<usize>, ConfigError> {
        let schedule = if self.analysis.checkpoints.is_empty() {
            let floor = len.min(4);
            let mut s: Vec<usize> = [8, 4, 2, 1].iter().map(|d| len / d).filter(|&n| n >= floor).collect();
            s.dedup();
            s
        } else {
            self.analysis.checkpoints.clone()
        };
        check_schedule(&schedule)?;
        if let Some(&last) = schedule.last() {
            if last > len {
                return Err(bad(
                    "analysis.checkpoints",
                    format!("largest checkpoint {last} exceeds sequence length {len}"),
                ));
            }
        }
        Ok(schedule)
    }

    pub fn index_set(&self) -> Result<IndexSet, ConfigError> {
        match self.perturb.index_set.as_str() {
            "squares" => Ok(IndexSet::Squares),
            "powers-of-two" => Ok(IndexSet::PowersOfTwo),
            "custom" => {
                if self.perturb.indices.contains(&0) {
                    return Err(bad("perturb.indices", "indices start at 1"));
                }
                Ok(IndexSet::Custom(self.perturb.indices.clone()))
            }
            other => Err(bad("perturb.index_set", format!("unknown index set `{other}`"))),
        }
    }

    /// Data-independent validation of the sections a subcommand uses.
    pub fn validate(&self, command: Command) -> Result<(), ConfigError> {
        check_positive("analysis.tol", self.analysis.tol)?;
        if !self.analysis.checkpoints.is_empty() {
            check_schedule(&self.analysis.checkpoints)?;
        }
        match command {
            Command::Simulate => {
                self.family_config()?;
            }
            Command::Analyze => {
                self.check_input()?;
                self.check_dictionary()?;
                self.weights()?;
                if self.analysis.span == 0 {
                    return Err(bad("analysis.span", "must be positive"));
                }
                check_positive("analysis.boundary_width", self.analysis.boundary_width)?;
                self.euler_params()?;
            }
            Command::Perturb => {
                self.check_input()?;
                self.index_set()?;
                if !(self.perturb.magnitude >= 0.0 && self.perturb.magnitude.is_finite()) {
                    return Err(bad("perturb.magnitude", "must be non-negative and finite"));
                }
            }
            Command::Report => {}
        }
        Ok(())
    }

    fn check_input(&self) -> Result<(), ConfigError> {
        if self.input.fixture.is_some() && self.input.snapshot.is_some() {
            return Err(bad("input", "set either `snapshot` or `fixture`, not both"));
        }
        self.fixture().map(|_| ())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Analyze,
    Perturb,
    Report,
}

fn check_positive(field: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(bad(field, "must be positive and finite"))
    }
}

fn check_schedule(s: &[usize]) -> Result<(), ConfigError> {
    if s.is_empty() {
        return Err(bad("analysis.checkpoints", "must not be empty"));
    }
    if s[0] == 0 {
        return Err(bad("analysis.checkpoints", "must be positive"));
    }
    if s.windows(2).any(|w| w[0] >= w[1]) {
        return Err(bad("analysis.checkpoints", "must be strictly increasing"));
    }
    Ok(())
}

/// Parses a weight label as produced by [`Weight::label`].
pub fn parse_weight(label: &str) -> Result<Weight, ConfigError> {
    let err = |reason: String| bad("analysis.weights", reason);
    match label {
        "const" => Ok(Weight::constant()),
        "linear" => Ok(Weight::linear()),
        _ => {
            if let Some(k) = label.strip_prefix("poly") {
                let degree: u32 = k.parse().map_err(|_| err(format!("bad polynomial degree in `{label}`")))?;
                return Ok(Weight::polynomial(degree));
            }
            if let Some(rest) = label.strip_prefix("tent@") {
                let (c, w) = rest
                    .split_once('/')
                    .ok_or_else(|| err(format!("expected tent@<center>/<width>, got `{label}`")))?;
                let c: f64 = c.parse().map_err(|_| err(format!("bad tent center in `{label}`")))?;
                let w: f64 = w.parse().map_err(|_| err(format!("bad tent width in `{label}`")))?;
                return Weight::tent(c, w).map_err(|e| err(e.to_string()));
            }
            Err(err(format!("unknown weight `{label}`")))
        }
    }
}
