//! Compactly supported test observables and normalized weight functions.
//!
//! Observables `b` stand in for `C_c(R^D)`: a finite lattice dictionary of
//! bumps whose supports overlap. Weights `w` live on `[0, 1]`, are `C^1`,
//! non-negative, and integrate to one in closed form.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::FieldSequence;
use crate::math;

/// Radial profile of a [`CompactObservable`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// `1 - |u - c|_inf / r`, clipped at zero.
    Tent,
    /// `prod_k (1 - t_k^2)^2` with `t_k = (u_k - c_k) / r`; `C^1`.
    SmoothBump,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompactObservable {
    pub center: Vec<f64>,
    pub radius: f64,
    pub profile: Profile,
    pub id: usize,
}

impl CompactObservable {
    pub fn new(center: Vec<f64>, radius: f64, profile: Profile, id: usize) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::invalid("radius", "must be positive and finite"));
        }
        if center.is_empty() || center.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("center", "must be a non-empty finite point"));
        }
        Ok(Self { center, radius, profile, id })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// Evaluates `b(u)`. Zero whenever `|u - center|_inf >= radius`.
    pub fn eval(&self, u: &[f64]) -> f64 {
        debug_assert_eq!(u.len(), self.center.len());
        match self.profile {
            Profile::Tent => {
                let mut dist = 0.0_f64;
                for (x, c) in u.iter().zip(&self.center) {
                    dist = dist.max((x - c).abs());
                }
                if dist >= self.radius {
                    0.0
                } else {
                    1.0 - dist / self.radius
                }
            }
            Profile::SmoothBump => {
                let mut value = 1.0;
                for (x, c) in u.iter().zip(&self.center) {
                    let t = (x - c) / self.radius;
                    if t.abs() >= 1.0 {
                        return 0.0;
                    }
                    let q = 1.0 - t * t;
                    value *= q * q;
                }
                value
            }
        }
    }

    /// Lipschitz constant with respect to the `l^1` norm on `R^D`.
    pub fn lipschitz(&self) -> f64 {
        match self.profile {
            Profile::Tent => 1.0 / self.radius,
            // max |d/dt (1 - t^2)^2| = 8 / (3 sqrt 3)
            Profile::SmoothBump => 8.0 / (3.0 * math::sqrt(3.0) * self.radius),
        }
    }
}

/// Finite lattice dictionary of observables covering a box in `R^D`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableDictionary {
    observables: Vec<CompactObservable>,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl ObservableDictionary {
    /// Wraps an explicit list of observables. The covered box is the union of supports.
    pub fn from_observables(observables: Vec<CompactObservable>) -> Result<Self> {
        let first =
            observables.first().ok_or_else(|| Error::invalid("dictionary", "must contain at least one observable"))?;
        let dim = first.dim();
        if observables.iter().any(|b| b.dim() != dim) {
            return Err(Error::invalid("dictionary", "observables disagree on state dimension"));
        }
        let mut lo = alloc::vec![f64::INFINITY; dim];
        let mut hi = alloc::vec![f64::NEG_INFINITY; dim];
        for b in &observables {
            for k in 0..dim {
                lo[k] = lo[k].min(b.center[k] - b.radius);
                hi[k] = hi[k].max(b.center[k] + b.radius);
            }
        }
        Ok(Self { observables, lo, hi })
    }

    /// Isotropic lattice over the box `[lo, hi]`.
    ///
    /// The spacing is set by the widest axis split into `points_per_dim - 1`
    /// intervals; every observable has radius equal to the spacing, so each
    /// point of the box is within half a radius of some node.
    pub fn lattice(lo: &[f64], hi: &[f64], points_per_dim: usize, profile: Profile) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(Error::invalid("data_range", "bounds must be non-empty and of equal length"));
        }
        if points_per_dim < 2 {
            return Err(Error::invalid("points_per_dim", "need at least two lattice points per axis"));
        }
        if lo.iter().zip(hi).any(|(l, h)| !(l.is_finite() && h.is_finite() && h > l)) {
            return Err(Error::invalid("data_range", "every axis needs finite lo < hi"));
        }
        let widest = lo.iter().zip(hi).map(|(l, h)| h - l).fold(0.0, f64::max);
        let spacing = widest / (points_per_dim - 1) as f64;
        let counts: Vec<usize> = lo
            .iter()
            .zip(hi)
            .map(|(l, h)| (math::ceil((h - l) / spacing - 1e-9) as usize + 1).clamp(2, points_per_dim))
            .collect();

        let total: usize = counts.iter().product();
        let mut observables = Vec::with_capacity(total);
        let mut idx = alloc::vec![0usize; lo.len()];
        for id in 0..total {
            let mut rem = id;
            for k in (0..lo.len()).rev() {
                idx[k] = rem % counts[k];
                rem /= counts[k];
            }
            let center = idx.iter().zip(lo).map(|(&j, &l)| l + j as f64 * spacing).collect();
            observables.push(CompactObservable::new(center, spacing, profile, id)?);
        }
        Ok(Self { observables, lo: lo.to_vec(), hi: hi.to_vec() })
    }

    /// Lattice over the componentwise data range of `seq`, padded by 10% per side.
    pub fn for_sequence(seq: &FieldSequence, points_per_dim: usize, profile: Profile) -> Result<Self> {
        let (lo, hi) = seq.data_range();
        let (lo, hi) = padded_range(&lo, &hi);
        Self::lattice(&lo, &hi, points_per_dim, profile)
    }

    pub fn observables(&self) -> &[CompactObservable] {
        &self.observables
    }

    pub fn len(&self) -> usize {
        self.observables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observables.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn data_range(&self) -> (&[f64], &[f64]) {
        (&self.lo, &self.hi)
    }

    /// `max_j b_j(u)`.
    pub fn max_eval(&self, u: &[f64]) -> f64 {
        self.observables.iter().map(|b| b.eval(u)).fold(0.0, f64::max)
    }
}

/// Pads `[lo, hi]` by 10% of the width on each side. Degenerate axes get
/// `0.1 * max(|lo|, 1)` instead.
pub fn padded_range(lo: &[f64], hi: &[f64]) -> (Vec<f64>, Vec<f64>) {
    lo.iter()
        .zip(hi)
        .map(|(&l, &h)| {
            let width = h - l;
            let pad = if width > 0.0 { 0.1 * width } else { 0.1 * l.abs().max(1.0) };
            (l - pad, h + pad)
        })
        .unzip()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightKind {
    /// `w = 1`.
    Constant,
    /// `w = 2z`.
    Linear,
    /// `w = (k + 1) z^k`.
    Polynomial { degree: u32 },
    /// `C^1` bump `A (1 - s^2)^2`, `s = (z - center) / (width / 2)`, supported in `[0, 1]`.
    Tent { center: f64, width: f64 },
}

/// Non-negative `C^1` weight on `[0, 1]` with unit integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weight {
    kind: WeightKind,
}

impl Weight {
    pub fn new(kind: WeightKind) -> Result<Self> {
        if let WeightKind::Tent { center, width } = kind {
            if !(width > 0.0 && center - 0.5 * width >= -1e-15 && center + 0.5 * width <= 1.0 + 1e-15) {
                return Err(Error::invalid("weight", "tent support must lie inside [0, 1]"));
            }
        }
        Ok(Self { kind })
    }

    pub const fn constant() -> Self {
        Self { kind: WeightKind::Constant }
    }

    pub const fn linear() -> Self {
        Self { kind: WeightKind::Linear }
    }

    pub fn polynomial(degree: u32) -> Self {
        Self { kind: WeightKind::Polynomial { degree } }
    }

    pub fn tent(center: f64, width: f64) -> Result<Self> {
        Self::new(WeightKind::Tent { center, width })
    }

    /// `{1, 2z, 3z^2}` and unit-mass bumps of width 1/2 centered at 1/4, 1/2, 3/4.
    pub fn default_family() -> Vec<Weight> {
        let mut family = alloc::vec![Self::constant(), Self::linear(), Self::polynomial(2)];
        for center in [0.25, 0.5, 0.75] {
            family.push(Self::tent(center, 0.5).expect("shipped tents fit in [0, 1]"));
        }
        family
    }

    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    pub fn eval(&self, z: f64) -> f64 {
        match self.kind {
            WeightKind::Constant => 1.0,
            WeightKind::Linear => 2.0 * z,
            WeightKind::Polynomial { degree } => (degree + 1) as f64 * math::powi(z, degree as i32),
            WeightKind::Tent { center, width } => {
                let s = (z - center) / (0.5 * width);
                if s.abs() >= 1.0 {
                    0.0
                } else {
                    let q = 1.0 - s * s;
                    15.0 / (8.0 * width) * q * q
                }
            }
        }
    }

    /// `sup_{[0,1]} |w'|`.
    pub fn derivative_bound(&self) -> f64 {
        match self.kind {
            WeightKind::Constant => 0.0,
            WeightKind::Linear => 2.0,
            WeightKind::Polynomial { degree } => ((degree + 1) * degree) as f64,
            WeightKind::Tent { width, .. } => 10.0 / (width * width * math::sqrt(3.0)),
        }
    }

    /// `w_N = sum_{n=1}^N w(n/N)`.
    pub fn partial_sum(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Err(Error::invalid("N", "partial sums need N >= 1"));
        }
        let sum: f64 = self.samples(n).iter().sum();
        if sum > 0.0 {
            Ok(sum)
        } else {
            Err(Error::invalid("N", "weight vanishes at every sample n/N"))
        }
    }

    /// `[w(1/N), ..., w(N/N)] / w_N`.
    pub fn normalized_samples(&self, n: usize) -> Result<Vec<f64>> {
        let w_n = self.partial_sum(n)?;
        Ok(self.samples(n).into_iter().map(|w| w / w_n).collect())
    }

    /// `[w(1/N), ..., w(N/N)]`.
    pub fn samples(&self, n: usize) -> Vec<f64> {
        (1..=n).map(|k| self.eval(k as f64 / n as f64)).collect()
    }

    /// Short stable label used in reports.
    pub fn label(&self) -> alloc::string::String {
        match self.kind {
            WeightKind::Constant => "const".into(),
            WeightKind::Linear => "linear".into(),
            WeightKind::Polynomial { degree } => alloc::format!("poly{degree}"),
            WeightKind::Tent { center, width } => alloc::format!("tent@{center}/{width}"),
        }
    }
}
