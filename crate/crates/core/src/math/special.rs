//! Gaussian tail function, its inverse, and the exponentially scaled
//! modified Bessel function of order zero.
//!
//! `q_func` is the *upper tail* P[Z ≥ x] of a standard normal, not the CDF.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::{Error, Result};

/// Beyond this point `q_func` is evaluated in log space through the scaled
/// complementary error function.
const LOG_SPACE_CUTOFF: f64 = 8.0;

/// Upper tail probability P[Z ≥ x] of a standard normal variable.
///
/// Underflows gracefully to `0.0` (never negative) once the true value drops
/// below the smallest subnormal, around x ≈ 38.5. Use [`ln_q_func`] when the
/// magnitude of such tails matters.
pub fn q_func(x: f64) -> f64 {
    if x > LOG_SPACE_CUTOFF {
        ln_q_func(x).exp()
    } else {
        0.5 * libm::erfc(x * FRAC_1_SQRT_2)
    }
}

/// Natural logarithm of [`q_func`], finite for every finite `x`.
pub fn ln_q_func(x: f64) -> f64 {
    if x > LOG_SPACE_CUTOFF {
        let z = x * FRAC_1_SQRT_2;
        (0.5 * erfcx_cf(z)).ln() - z * z
    } else if x < -LOG_SPACE_CUTOFF {
        (-q_func(-x)).ln_1p()
    } else {
        q_func(x).ln()
    }
}

/// erfcx(z) = exp(z²)·erfc(z) by its continued fraction, valid for z ≳ 4.
fn erfcx_cf(z: f64) -> f64 {
    // erfcx(z) = 1/√π · 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...))))
    let mut tail = z;
    for k in (1..=80).rev() {
        tail = z + (k as f64 * 0.5) / tail;
    }
    1.0 / (PI.sqrt() * tail)
}

/// Inverse of [`q_func`]: the `x` with P[Z ≥ x] = p.
///
/// Bracketed bisection on ln Q followed by a Newton polish. Symmetric:
/// `q_inv(p) = -q_inv(1 - p)`.
pub fn q_inv(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("q_inv requires 0 < p < 1, got {p}")));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    if p > 0.5 {
        return Ok(-upper_tail_inverse(1.0 - p));
    }
    Ok(upper_tail_inverse(p))
}

fn upper_tail_inverse(p: f64) -> f64 {
    debug_assert!(p > 0.0 && p < 0.5);
    let target = p.ln();
    // Q(x) ≤ φ(x)/x < exp(-x²/2) for x ≥ 1/√(2π), so this bracket holds.
    let mut lo = 0.0_f64;
    let mut hi = (-2.0 * target).sqrt().max(1.0);
    while ln_q_func(hi) > target {
        hi *= 2.0;
    }
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if ln_q_func(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..3 {
        let lq = ln_q_func(x);
        // d/dx ln Q(x) = -φ(x)/Q(x)
        let ln_phi = -0.5 * x * x - 0.5 * (2.0 * PI).ln();
        let slope = -(ln_phi - lq).exp();
        let step = (lq - target) / slope;
        if !step.is_finite() {
            break;
        }
        let next = x - step;
        if next < lo || next > hi {
            break;
        }
        x = next;
    }
    x
}

/// Exponentially scaled modified Bessel function, I₀(z)·e^(−z), for z ≥ 0.
pub fn bessel_i0e(z: f64) -> f64 {
    let z = z.abs();
    if z <= 30.0 {
        // power series, all terms positive
        let q = 0.25 * z * z;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0_f64;
        loop {
            term *= q / (k * k);
            sum += term;
            if term < sum * 1e-17 {
                break;
            }
            k += 1.0;
        }
        sum * (-z).exp()
    } else {
        // asymptotic expansion, truncated at the smallest term
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0_f64;
        loop {
            let next = term * (2.0 * k - 1.0).powi(2) / (k * 8.0 * z);
            if next >= term || next < 1e-17 * sum {
                break;
            }
            term = next;
            sum += term;
            k += 1.0;
        }
        sum / (2.0 * PI * z).sqrt()
    }
}
