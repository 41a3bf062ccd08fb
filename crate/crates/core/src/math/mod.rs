//! Numerical building blocks shared by every other module.

mod linalg;
mod quad;
mod rng;
mod special;

pub use linalg::{hermitian_eigenvalues, ComplexMatrix};
pub use quad::integrate;
pub use rng::{sample_complex_gaussian, RngState};
pub use special::{bessel_i0e, ln_q_func, q_func, q_inv};

/// Converts decibels to a linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}
