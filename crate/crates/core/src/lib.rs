//! Finite-blocklength performance analysis for quasi-static Rayleigh-fading
//! MIMO channels under spatiotemporal (joint) and time-domain (per-antenna)
//! channel coding.
//!
//! The crate is layered bottom-up:
//!
//! * [`math`]: Q-function, Hermitian eigenvalues, seeded complex Gaussian sampling.
//! * [`channel`]: system configuration and channel realizations.
//! * [`info_density`]: per-link and aggregate capacity, dispersion and third
//!   absolute moment of the information density, plus a sampler for it.
//! * [`bounds`]: normal approximation, finite-n converse and achievability bounds.
//! * [`ergodic`]: Monte Carlo expectations over fading and high-SNR closed forms.
//! * [`compare`]: normalized per-link rates, error probabilities and the
//!   blocklength/DoF exchange solver.
//!
//! Units: rates are in bits per channel use, dispersions in bits², third
//! moments in bits³. SNR values are linear power ratios.

pub mod bounds;
pub mod channel;
pub mod compare;
pub mod ergodic;
mod error;
pub mod info_density;
pub mod math;

pub use error::{Error, Result};

/// log₂(e), the nats-to-bits conversion factor.
pub const LOG2_E: f64 = std::f64::consts::LOG2_E;
