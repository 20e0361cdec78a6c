use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::field::FieldSequence;
use crate::math;

/// Index sets of natural density zero (or arbitrary lists) used to build statistically
/// equivalent sequences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IndexSet {
    /// `{1, 4, 9, ...}`.
    Squares,
    /// `{1, 2, 4, 8, ...}`.
    PowersOfTwo,
    Custom(Vec<usize>),
}

impl IndexSet {
    /// Members `<= len`, ascending and deduplicated.
    pub fn indices(&self, len: usize) -> Result<Vec<usize>> {
        Ok(match self {
            IndexSet::Squares => (1..).map(|k: usize| k * k).take_while(|&n| n <= len).collect(),
            IndexSet::PowersOfTwo => (0..usize::BITS).map(|k| 1usize << k).take_while(|&n| n <= len).collect(),
            IndexSet::Custom(list) => {
                if let Some(&bad) = list.iter().find(|&&n| n == 0 || n > len) {
                    return Err(Error::invalid("index_set", alloc::format!("index {bad} outside 1..={len}")));
                }
                let mut v = list.clone();
                v.sort_unstable();
                v.dedup();
                v
            }
        })
    }

    /// `#{n <= N in the set} / N`.
    pub fn density(&self, n: usize) -> Result<f64> {
        let count = match self {
            IndexSet::Custom(list) => list.iter().filter(|&&k| k >= 1 && k <= n).count(),
            _ => self.indices(n)?.len(),
        };
        Ok(count as f64 / n as f64)
    }
}

/// Uniform noise in `[-1, 1)` for member `n`; independent of which other members are perturbed.
fn noise_stream(seed: u64, n: usize) -> impl FnMut() -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(n as u64);
    move || {
        let unit = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        2.0 * unit - 1.0
    }
}

/// Copy of `seq` with `U_n += magnitude * noise(seed, n)` exactly for `n` in the index set.
pub fn perturb_on_index_set(seq: &FieldSequence, set: &IndexSet, magnitude: f64, seed: u64) -> Result<FieldSequence> {
    if !magnitude.is_finite() {
        return Err(Error::invalid("magnitude", "must be finite"));
    }
    let mut out = seq.clone();
    for n in set.indices(seq.len())? {
        let mut noise = noise_stream(seed, n);
        for v in out.member_mut(n) {
            *v += magnitude * noise();
        }
    }
    Ok(out)
}

/// `#{n <= N : int_Q |U_n - V_n| dy > eps} / N`, with the Euclidean norm on `R^D`.
pub fn statistical_density_gap(u: &FieldSequence, v: &FieldSequence, eps: f64, n: usize) -> Result<f64> {
    if u.grid() != v.grid() || u.dim() != v.dim() {
        return Err(Error::GridMismatch);
    }
    if n == 0 {
        return Err(Error::invalid("N", "must be >= 1"));
    }
    u.require(n)?;
    v.require(n)?;
    let vol = u.grid().cell_volume();
    let dim = u.dim();
    let count = (1..=n)
        .filter(|&k| {
            let dist: f64 = u
                .member(k)
                .chunks_exact(dim)
                .zip(v.member(k).chunks_exact(dim))
                .map(|(a, b)| math::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()))
                .sum::<f64>()
                * vol;
            dist > eps
        })
        .count();
    Ok(count as f64 / n as f64)
}

/// Finite-`N` robustness bound `2 delta_N |Q| + Lip(b) eps` on the `L^1` distance between
/// Cesàro means of `b` for sequences that differ beyond `eps` on a set of density `delta_N`.
pub fn perturbation_bound(density: f64, measure: f64, lipschitz: f64, eps: f64) -> f64 {
    2.0 * density * measure + lipschitz * eps
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Grid;
    use crate::fixtures;

    #[test]
    fn empty_set_is_identity() {
        let seq = fixtures::alternating(Grid::unit(2), 20);
        let out = perturb_on_index_set(&seq, &IndexSet::Custom(alloc::vec![]), 3.0, 1).unwrap();
        assert_eq!(out, seq);
    }

    #[test]
    fn squares_touch_exactly_ten_members() {
        let seq = fixtures::alternating(Grid::unit(2), 100);
        let out = perturb_on_index_set(&seq, &IndexSet::Squares, 1.0, 7).unwrap();
        let changed: Vec<usize> = (1..=100).filter(|&n| out.member(n) != seq.member(n)).collect();
        assert_eq!(changed, (1..=10).map(|k| k * k).collect::<Vec<_>>());
    }

    #[test]
    fn perturbation_is_seed_deterministic() {
        let seq = fixtures::alternating(Grid::unit(2), 50);
        let a = perturb_on_index_set(&seq, &IndexSet::PowersOfTwo, 1.0, 3).unwrap();
        let b = perturb_on_index_set(&seq, &IndexSet::PowersOfTwo, 1.0, 3).unwrap();
        let c = perturb_on_index_set(&seq, &IndexSet::PowersOfTwo, 1.0, 4).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn custom_indices_validated() {
        assert!(IndexSet::Custom(alloc::vec![0]).indices(5).is_err());
        assert!(IndexSet::Custom(alloc::vec![6]).indices(5).is_err());
        assert_eq!(IndexSet::Custom(alloc::vec![3, 1, 3]).indices(5).unwrap(), alloc::vec![1, 3]);
    }

    #[test]
    fn density_gap_cases() {
        let eps = 0.1;
        let u = fixtures::alternating(Grid::unit(1), 200);
        assert_eq!(statistical_density_gap(&u, &u, eps, 200).unwrap(), 0.0);

        let shifted = FieldSequence::from_fn(Grid::unit(1), 1, 200, |n, c, out| {
            out[0] = u.point(n, c)[0] + 2.0 * eps;
        })
        .unwrap();
        assert_eq!(statistical_density_gap(&u, &shifted, eps, 200).unwrap(), 1.0);

        let on_squares = FieldSequence::from_fn(Grid::unit(1), 1, 200, |n, c, out| {
            let root = libm::sqrt(n as f64) as usize;
            let bump = if root * root == n { 2.0 * eps } else { 0.0 };
            out[0] = u.point(n, c)[0] + bump;
        })
        .unwrap();
        for n in [10, 100, 200] {
            let expect = libm::floor(libm::sqrt(n as f64)) / n as f64;
            assert_eq!(statistical_density_gap(&u, &on_squares, eps, n).unwrap(), expect);
        }

        let other = fixtures::alternating(Grid::unit(2), 200);
        assert_eq!(statistical_density_gap(&u, &other, eps, 10), Err(Error::GridMismatch));
    }

    #[test]
    fn square_density_decays() {
        for n in [100, 1000, 10_000] {
            let d = IndexSet::Squares.density(n).unwrap();
            assert!(d <= 1.0 / libm::sqrt(n as f64) + 1e-15);
        }
    }
}
