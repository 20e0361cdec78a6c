use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use super::observable_table;
use crate::error::{Error, Result};
use crate::field::FieldSequence;
use crate::observables::CompactObservable;

/// Triple counts up to this size are enumerated exhaustively.
pub const FULL_ENUMERATION_LIMIT: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StationarityOptions {
    /// Largest shift `n` tested.
    pub max_shift: usize,
    /// Only shifts that are multiples of this stride are tested.
    pub shift_stride: usize,
    /// Number of triples drawn when the full set exceeds [`FULL_ENUMERATION_LIMIT`].
    pub samples: usize,
    pub seed: u64,
}

impl Default for StationarityOptions {
    fn default() -> Self {
        Self { max_shift: 16, shift_stride: 1, samples: FULL_ENUMERATION_LIMIT, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationarityModulus {
    pub observable: usize,
    pub k: usize,
    pub modulus: f64,
    pub samples: usize,
}

struct Table<'a> {
    values: &'a [f64],
    cells: usize,
    vol: f64,
}

impl Table<'_> {
    /// `int_Q b(U_i) b(U_j) dy`, one-based.
    fn pair(&self, i: usize, j: usize) -> f64 {
        let a = &self.values[(i - 1) * self.cells..i * self.cells];
        let b = &self.values[(j - 1) * self.cells..j * self.cells];
        a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() * self.vol
    }
}

/// `omega(b, k) = max |int b(U_k1) b(U_k2) - b(U_{k1+n}) b(U_{k2+n}) dy|` over
/// `k <= k1 <= k2 <= len - max_shift` and tested shifts `n <= max_shift`.
pub fn stationarity_modulus(
    seq: &FieldSequence,
    b: &CompactObservable,
    k: usize,
    opts: &StationarityOptions,
) -> Result<StationarityModulus> {
    if k == 0 {
        return Err(Error::invalid("k", "must be >= 1"));
    }
    if opts.shift_stride == 0 {
        return Err(Error::invalid("shift_stride", "must be >= 1"));
    }
    let top = k + opts.max_shift;
    if top > seq.len() {
        return Err(Error::SequenceTooShort { required: top, available: seq.len() });
    }
    let values = observable_table(seq, b, seq.len());
    let table = Table { values: &values, cells: seq.grid().cells(), vol: seq.grid().cell_volume() };

    let last = seq.len() - opts.max_shift;
    let span = last - k + 1;
    let pairs = span * (span + 1) / 2;
    let shifts: Vec<usize> = (0..=opts.max_shift).step_by(opts.shift_stride).collect();
    let total = pairs * shifts.len();

    let defect = |k1: usize, k2: usize, n: usize| (table.pair(k1, k2) - table.pair(k1 + n, k2 + n)).abs();
    let mut modulus = 0.0_f64;
    let samples;
    if total <= FULL_ENUMERATION_LIMIT {
        for k1 in k..=last {
            for k2 in k1..=last {
                for &n in &shifts {
                    modulus = modulus.max(defect(k1, k2, n));
                }
            }
        }
        samples = total;
    } else {
        // stratified over shifts, uniform pairs within a stratum
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let per_shift = (opts.samples / shifts.len()).max(1);
        for &n in &shifts {
            for _ in 0..per_shift {
                let a = k + (rng.next_u64() % span as u64) as usize;
                let c = k + (rng.next_u64() % span as u64) as usize;
                let (k1, k2) = if a <= c { (a, c) } else { (c, a) };
                modulus = modulus.max(defect(k1, k2, n));
            }
        }
        samples = per_shift * shifts.len();
    }
    Ok(StationarityModulus { observable: b.id, k, modulus, samples })
}

/// `(1/N^2) sum_{n,m=0}^{N} |int b(U_{k+n}) b(U_{k+m}) - b(U_k) b(U_{k+|n-m|}) dy|`.
pub fn averaged_stationarity_modulus(seq: &FieldSequence, b: &CompactObservable, k: usize, n: usize) -> Result<f64> {
    if k == 0 || n == 0 {
        return Err(Error::invalid("k, N", "must both be >= 1"));
    }
    seq.require(k + n)?;
    let values = observable_table(seq, b, k + n);
    let table = Table { values: &values, cells: seq.grid().cells(), vol: seq.grid().cell_volume() };
    let mut total = 0.0;
    for i in 0..=n {
        for j in 0..=n {
            let lag = i.abs_diff(j);
            total += (table.pair(k + i, k + j) - table.pair(k, k + lag)).abs();
        }
    }
    Ok(total / (n * n) as f64)
}
