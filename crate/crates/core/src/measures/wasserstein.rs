//! Transport and weak-star distances between empirical measures.

use alloc::vec::Vec;

use super::EmpiricalMeasure;
use crate::error::{Error, Result};
use crate::math;
use crate::observables::ObservableDictionary;

/// Number of projection directions used for `D > 1`.
pub const DEFAULT_SLICES: usize = 16;

/// Exact `W_s` between two measures on the line via the quantile coupling.
///
/// Inputs are `(value, weight)` pairs; they need not be sorted.
pub fn wasserstein_1d(a: &[(f64, f64)], b: &[(f64, f64)], s: f64) -> f64 {
    math::root(quantile_cost(a, b, s), s)
}

/// `int_0^1 |F^{-1}(t) - G^{-1}(t)|^s dt`.
fn quantile_cost(a: &[(f64, f64)], b: &[(f64, f64)], s: f64) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(|x, y| x.0.total_cmp(&y.0));
    b.sort_by(|x, y| x.0.total_cmp(&y.0));

    let (mut i, mut j) = (0, 0);
    let (mut ra, mut rb) = (a[0].1, b[0].1);
    let mut cost = 0.0;
    while i < a.len() && j < b.len() {
        let mass = ra.min(rb);
        cost += mass * math::abs_pow(a[i].0 - b[j].0, s);
        if ra <= rb {
            rb -= ra;
            i += 1;
            if i < a.len() {
                ra = a[i].1;
            }
        } else {
            ra -= rb;
            j += 1;
            if j < b.len() {
                rb = b[j].1;
            }
        }
    }
    cost
}

fn check_pair(mu: &EmpiricalMeasure, nu: &EmpiricalMeasure, s: f64) -> Result<()> {
    if !(s >= 1.0 && s.is_finite()) {
        return Err(Error::invalid("s", "transport order must be finite and >= 1"));
    }
    if mu.is_empty() || nu.is_empty() {
        return Err(Error::invalid("measure", "must have at least one atom"));
    }
    if mu.dim() != nu.dim() {
        return Err(Error::invalid("measure", "dimensions differ"));
    }
    Ok(())
}

/// `W_s(mu, nu)`: exact for `D = 1`, sliced over [`DEFAULT_SLICES`] directions otherwise.
pub fn wasserstein(mu: &EmpiricalMeasure, nu: &EmpiricalMeasure, s: f64) -> Result<f64> {
    check_pair(mu, nu, s)?;
    if mu.dim() == 1 {
        let a: Vec<_> = mu.atoms().map(|(x, w)| (x[0], w)).collect();
        let b: Vec<_> = nu.atoms().map(|(x, w)| (x[0], w)).collect();
        Ok(wasserstein_1d(&a, &b, s))
    } else {
        sliced_wasserstein(mu, nu, s, DEFAULT_SLICES)
    }
}

/// Sliced distance `((1/K) sum_k W_s(P_k mu, P_k nu)^s)^(1/s)` over
/// [`slice_directions`]; each slice is an exact 1D quantile distance.
pub fn sliced_wasserstein(mu: &EmpiricalMeasure, nu: &EmpiricalMeasure, s: f64, directions: usize) -> Result<f64> {
    check_pair(mu, nu, s)?;
    if directions == 0 {
        return Err(Error::invalid("directions", "need at least one slice"));
    }
    let dirs = slice_directions(mu.dim(), directions);
    let project = |m: &EmpiricalMeasure, d: &[f64]| -> Vec<(f64, f64)> {
        m.atoms().map(|(x, w)| (x.iter().zip(d).map(|(a, b)| a * b).sum(), w)).collect()
    };
    let mut total = 0.0;
    for d in dirs.chunks_exact(mu.dim()) {
        total += quantile_cost(&project(mu, d), &project(nu, d), s);
    }
    Ok(math::root(total / directions as f64, s))
}

/// Deterministic unit directions in `R^dim`, flattened.
///
/// `dim = 1` alternates `+1, -1`; `dim = 2` uses equal angles on the half circle;
/// `dim = 3` a Fibonacci lattice on the upper hemisphere; higher dimensions
/// normalized Halton points.
pub fn slice_directions(dim: usize, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(dim * count);
    for k in 0..count {
        match dim {
            1 => out.push(if k % 2 == 0 { 1.0 } else { -1.0 }),
            2 => {
                let theta = core::f64::consts::PI * k as f64 / count as f64;
                out.extend_from_slice(&[math::cos(theta), math::sin(theta)]);
            }
            3 => {
                let golden = core::f64::consts::PI * (3.0 - math::sqrt(5.0));
                let z = 1.0 - (k as f64 + 0.5) / count as f64;
                let r = math::sqrt(1.0 - z * z);
                let phi = golden * k as f64;
                out.extend_from_slice(&[r * math::cos(phi), r * math::sin(phi), z]);
            }
            _ => {
                let start = out.len();
                for (axis, &p) in PRIMES.iter().cycle().take(dim).enumerate() {
                    let h = radical_inverse(k + 1 + axis * count, p);
                    out.push(2.0 * h - 1.0);
                }
                let v = &mut out[start..];
                let norm = math::sqrt(v.iter().map(|x| x * x).sum::<f64>());
                if norm > 0.0 {
                    v.iter_mut().for_each(|x| *x /= norm);
                } else {
                    v[0] = 1.0;
                }
            }
        }
    }
    out
}

const PRIMES: [usize; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn radical_inverse(mut i: usize, base: usize) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut r = 0.0;
    while i > 0 {
        r += (i % base) as f64 * inv;
        i /= base;
        inv /= base as f64;
    }
    r
}

/// `sum_j 2^{-j} |<mu - nu, b_j>| / (1 + |<mu - nu, b_j>|)`, `j` counted from one.
pub fn weak_star_distance(mu: &EmpiricalMeasure, nu: &EmpiricalMeasure, dict: &ObservableDictionary) -> Result<f64> {
    if dict.is_empty() {
        return Err(Error::invalid("dictionary", "must contain at least one observable"));
    }
    if mu.dim() != dict.dim() || nu.dim() != dict.dim() {
        return Err(Error::invalid("dictionary", "state dimension does not match the measures"));
    }
    let mut total = 0.0;
    let mut scale = 0.5;
    for b in dict.observables() {
        let pairing = (mu.integrate(|x| b.eval(x)) - nu.integrate(|x| b.eval(x))).abs();
        total += scale * pairing / (1.0 + pairing);
        scale *= 0.5;
    }
    Ok(total)
}
