use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};

/// Atoms closer than this in the max-norm are merged.
pub const MERGE_TOLERANCE: f64 = 1e-12;

/// Finitely many weighted atoms in `R^D` with unit total mass.
///
/// Atoms are kept in lexicographic order of their points, with near-duplicates merged.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure {
    dim: usize,
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl EmpiricalMeasure {
    /// Builds a measure from `points` (flattened, `dim` per atom) and `weights`.
    ///
    /// Weights must be non-negative and sum to one within `1e-12`.
    pub fn new(dim: usize, points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dim", "must be positive"));
        }
        if weights.is_empty() || points.len() != weights.len() * dim {
            return Err(Error::invalid("atoms", "need at least one atom and one point per weight"));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::invalid("weights", "must be finite and non-negative"));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::invalid("points", "must be finite"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("weights", alloc::format!("sum to {total}, expected 1")));
        }
        Ok(Self::merged(dim, &points, &weights))
    }

    pub fn dirac(point: &[f64]) -> Self {
        Self { dim: point.len(), points: point.to_vec(), weights: alloc::vec![1.0] }
    }

    /// Sorts atoms and merges those within [`MERGE_TOLERANCE`] of an earlier representative.
    pub(crate) fn merged(dim: usize, points: &[f64], weights: &[f64]) -> Self {
        let count = weights.len();
        let mut order: Vec<usize> = (0..count).collect();
        let at = |i: usize| &points[i * dim..(i + 1) * dim];
        order.sort_by(|&i, &j| lex_cmp(at(i), at(j)));

        let mut reps: Vec<f64> = Vec::with_capacity(points.len());
        let mut rep_weights: Vec<f64> = Vec::with_capacity(count);
        for &i in &order {
            let p = at(i);
            let mut target = None;
            for r in (0..rep_weights.len()).rev() {
                let q = &reps[r * dim..(r + 1) * dim];
                if q[0] <= p[0] - MERGE_TOLERANCE {
                    break;
                }
                if p.iter().zip(q).all(|(a, b)| (a - b).abs() < MERGE_TOLERANCE) {
                    target = Some(r);
                    break;
                }
            }
            match target {
                Some(r) => rep_weights[r] += weights[i],
                None => {
                    reps.extend_from_slice(p);
                    rep_weights.push(weights[i]);
                }
            }
        }
        Self { dim, points: reps, weights: rep_weights }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.points.chunks_exact(self.dim).zip(self.weights.iter().copied())
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `<mu, f> = sum_i w_i f(x_i)`.
    pub fn integrate(&self, mut f: impl FnMut(&[f64]) -> f64) -> f64 {
        self.atoms().map(|(x, w)| w * f(x)).sum()
    }

    pub fn barycenter(&self) -> Vec<f64> {
        let mut bary = alloc::vec![0.0; self.dim];
        for (x, w) in self.atoms() {
            for (b, xi) in bary.iter_mut().zip(x) {
                *b += w * xi;
            }
        }
        bary
    }
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

/// Barycenter, second moment, componentwise variance, and `s`-th absolute moment.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSummary {
    pub barycenter: Vec<f64>,
    /// `sum_i w_i |x_i|^2`.
    pub second_moment: f64,
    pub variance: Vec<f64>,
    pub order: f64,
    /// `sum_i w_i |x_i|^s` with the Euclidean norm.
    pub absolute_moment: f64,
}

pub fn moments(mu: &EmpiricalMeasure, s: f64) -> Result<MomentSummary> {
    if !(s >= 1.0 && s.is_finite()) {
        return Err(Error::invalid("s", "moment order must be finite and >= 1"));
    }
    let barycenter = mu.barycenter();
    let mut variance = alloc::vec![0.0; mu.dim];
    let mut second_moment = 0.0;
    let mut absolute_moment = 0.0;
    for (x, w) in mu.atoms() {
        let norm2: f64 = x.iter().map(|v| v * v).sum();
        second_moment += w * norm2;
        absolute_moment += w * crate::math::abs_pow(crate::math::sqrt(norm2), s);
        for k in 0..mu.dim {
            let d = x[k] - barycenter[k];
            variance[k] += w * d * d;
        }
    }
    Ok(MomentSummary { barycenter, second_moment, variance, order: s, absolute_moment })
}
