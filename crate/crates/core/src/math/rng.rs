//! Seeded, splittable random streams.
//!
//! A [`RngState`] names a ChaCha8 keystream: `seed` keys the cipher and
//! `stream` selects one of its 2⁶⁴ independent nonces. Monte Carlo loops
//! give trial `k` the stream `k`, so results do not depend on how trials
//! are distributed over workers.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::ComplexMatrix;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngState {
    pub seed: u64,
    pub stream: u64,
}

impl RngState {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    /// Same seed, different stream.
    pub fn with_stream(self, stream: u64) -> Self {
        Self { stream, ..self }
    }

    /// A state keyed by a seed derived from `(self.seed, tag)`, for nesting
    /// independent experiments (e.g. one per sweep point) under one user seed.
    pub fn fork(self, tag: u64) -> Self {
        Self { seed: splitmix64(self.seed ^ splitmix64(tag.wrapping_add(0x9e37_79b9_7f4a_7c15))), stream: self.stream }
    }

    pub fn generator(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// One circularly symmetric complex Gaussian draw with E|w|² = `variance`.
#[inline]
pub(crate) fn complex_normal<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let s = (0.5 * variance).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

/// `rows × cols` matrix of i.i.d. CN(0, `variance`) entries drawn from the
/// stream named by `state`. Identical states give bit-identical matrices.
pub fn sample_complex_gaussian(rows: usize, cols: usize, variance: f64, state: RngState) -> Result<ComplexMatrix> {
    ComplexMatrix::gaussian(rows, cols, variance, &mut state.generator())
}

impl ComplexMatrix {
    /// Fills a matrix with i.i.d. CN(0, `variance`) entries from `rng`, row-major.
    pub fn gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, variance: f64, rng: &mut R) -> Result<Self> {
        if !(variance > 0.0 && variance.is_finite()) {
            return Err(Error::Domain(format!("variance must be positive, got {variance}")));
        }
        let data = (0..rows * cols).map(|_| complex_normal(rng, variance)).collect();
        Self::new(rows, cols, data)
    }
}
