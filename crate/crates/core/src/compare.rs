//! Scheme comparison with the high-SNR surrogate statistics.
//!
//! Per link, E[C]/m ≈ log₂(1+ρ) and the dispersion penalty is Q⁻¹(ε)/ln2
//! spread over √n channel uses (time-domain) or √(mn) symbols
//! (spatiotemporal). Solving for the error at a fixed per-link rate R̄/m
//! with Δ = log₂(1+ρ) − R̄/m gives
//!
//! ```text
//! ε_TD = Q(Δ·√n·ln2),    ε_ST = Q(Δ·√(mn)·ln2)
//! ```
//!
//! so ε_ST depends on m and n only through their product. The product is
//! formed in integers before the square root, which makes that identity
//! exact in floating point.

use std::f64::consts::LN_2;

use crate::channel::{sample_channel, OperatingPoint, SystemConfig};
use crate::ergodic::{par_trials, McEstimate};
use crate::info_density::{link_capacity, link_dispersion, Scheme};
use crate::math::{ln_q_func, q_func, q_inv};
use crate::{Error, Result, LOG2_E};

/// Q⁻¹(ε)/(√k·ln2) with k = n (time-domain) or mn (spatiotemporal).
pub fn rate_penalty(m: usize, n: u64, epsilon: f64, scheme: Scheme) -> Result<f64> {
    Ok(q_inv(epsilon)? / (symbols(m, n, scheme).sqrt() * LN_2))
}

/// Average maximal rate per link, bits per channel use.
pub fn normalized_rate(cfg: &SystemConfig, op: &OperatingPoint, scheme: Scheme) -> f64 {
    let penalty = rate_penalty(cfg.dof(), op.blocklength, op.epsilon, scheme).expect("validated epsilon");
    cfg.snr().ln_1p() * LOG2_E - penalty
}

fn symbols(m: usize, n: u64, scheme: Scheme) -> f64 {
    match scheme {
        Scheme::Spatiotemporal => (m as u64).saturating_mul(n) as f64,
        Scheme::TimeDomain => n as f64,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorProbability {
    pub value: f64,
    /// ln of the probability; finite even where `value` underflows.
    pub ln_value: f64,
    /// Δ = log₂(1+ρ) − per-link rate, bits.
    pub delta: f64,
    /// Δ ≤ 0: the requested rate is at or above the per-link capacity and
    /// the error is at least ½.
    pub above_capacity: bool,
}

pub fn error_probability(cfg: &SystemConfig, n: u64, per_link_rate: f64, scheme: Scheme) -> Result<ErrorProbability> {
    error_probability_at(cfg.snr(), cfg.dof(), n, per_link_rate, scheme)
}

fn error_probability_at(snr: f64, m: usize, n: u64, rate: f64, scheme: Scheme) -> Result<ErrorProbability> {
    if !(rate >= 0.0 && rate.is_finite()) {
        return Err(Error::Domain(format!("per-link rate must be finite and nonnegative, got {rate}")));
    }
    if n == 0 || m == 0 {
        return Err(Error::Domain("blocklength and DoF must be positive".into()));
    }
    let delta = snr.ln_1p() * LOG2_E - rate;
    let arg = delta * symbols(m, n, scheme).sqrt() * LN_2;
    Ok(ErrorProbability { value: q_func(arg), ln_value: ln_q_func(arg), delta, above_capacity: delta <= 0.0 })
}

/// Both schemes at one (m, n, rate).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonPoint {
    pub cfg: SystemConfig,
    pub blocklength: u64,
    pub per_link_rate: f64,
    pub st: ErrorProbability,
    pub td: ErrorProbability,
}

impl ComparisonPoint {
    pub fn delta(&self) -> f64 {
        self.st.delta
    }
}

pub fn compare_point(cfg: &SystemConfig, n: u64, per_link_rate: f64) -> Result<ComparisonPoint> {
    Ok(ComparisonPoint {
        cfg: *cfg,
        blocklength: n,
        per_link_rate,
        st: error_probability(cfg, n, per_link_rate, Scheme::Spatiotemporal)?,
        td: error_probability(cfg, n, per_link_rate, Scheme::TimeDomain)?,
    })
}

/// Normal-approximation error of one realization at a fixed per-link rate:
/// Q((C − mR)·√n/√V) for the joint code, 1 − Π(1 − Q((Cᵢ − R)·√n/√Vᵢ))
/// over the independent link codes.
pub fn realization_error(eigenvalues: &[f64], cfg: &SystemConfig, n: u64, per_link_rate: f64, scheme: Scheme) -> f64 {
    let root_n = (n as f64).sqrt();
    let snrs = eigenvalues.iter().map(|&l| cfg.per_antenna_snr() * l);
    let link_error = |c: f64, v: f64, r: f64| {
        if v > 0.0 {
            q_func((c - r) * root_n / v.sqrt())
        } else if c > r {
            0.0
        } else {
            1.0
        }
    };
    match scheme {
        Scheme::Spatiotemporal => {
            let (c, v) = snrs.fold((0.0, 0.0), |(c, v), a| (c + link_capacity(a), v + link_dispersion(a)));
            link_error(c, v, per_link_rate * eigenvalues.len() as f64)
        }
        Scheme::TimeDomain => {
            let ln_ok: f64 =
                snrs.map(|a| (-link_error(link_capacity(a), link_dispersion(a), per_link_rate)).ln_1p()).sum();
            -ln_ok.exp_m1()
        }
    }
}

/// Monte Carlo average over H of [`realization_error`], the counterpart of
/// substituting averaged statistics into the Q-function argument.
pub fn mc_error_probability(
    cfg: &SystemConfig,
    n: u64,
    per_link_rate: f64,
    scheme: Scheme,
    trials: u64,
    seed: u64,
) -> McEstimate {
    let e = par_trials(trials, seed, |rng| {
        realization_error(sample_channel(cfg, rng).eigenvalues(), cfg, n, per_link_rate, scheme)
    });
    McEstimate::from_samples(&e, seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolveFor {
    /// Minimal blocklength n at fixed DoF m.
    Blocklength,
    /// Minimal DoF m at fixed blocklength n.
    Dof,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExchangeSolution {
    pub solved_for: SolveFor,
    pub value: u64,
    pub achieved: ErrorProbability,
}

/// Smallest n (or m) whose spatiotemporal error meets `target` at the given
/// per-link rate, with the other dimension held at `fixed`. The ρ of `cfg`
/// is used; its antenna counts are not.
pub fn solve_exchange(
    cfg: &SystemConfig,
    per_link_rate: f64,
    target: f64,
    solve_for: SolveFor,
    fixed: u64,
) -> Result<ExchangeSolution> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::Domain(format!("target error must lie in (0,1), got {target}")));
    }
    if fixed == 0 {
        return Err(Error::Domain("the fixed dimension must be positive".into()));
    }
    let delta = cfg.snr().ln_1p() * LOG2_E - per_link_rate;
    if delta <= 0.0 {
        return Err(Error::Domain(format!(
            "per-link rate {per_link_rate} is not below log2(1+rho); no blocklength reaches the target"
        )));
    }
    let eval = |k: u64| {
        let (m, n) = match solve_for {
            SolveFor::Blocklength => (fixed, k),
            SolveFor::Dof => (k, fixed),
        };
        error_probability_at(cfg.snr(), m as usize, n, per_link_rate, Scheme::Spatiotemporal)
    };
    let meets = |e: &ErrorProbability| if target < 1e-300 { e.ln_value <= target.ln() } else { e.value <= target };

    // Δ·√(mn)·ln2 ≥ Q⁻¹(target) gives the product directly; the integer
    // search below only corrects rounding.
    let root = q_inv(target)?.max(0.0) / (delta * LN_2);
    let product = root * root;
    if product > 1e18 {
        return Err(Error::Domain(format!("required m*n ≈ {product:e} is out of range")));
    }
    let mut k = ((product / fixed as f64).ceil() as u64).max(1);
    while !meets(&eval(k)?) {
        k += 1;
    }
    while k > 1 && meets(&eval(k - 1)?) {
        k -= 1;
    }
    Ok(ExchangeSolution { solved_for: solve_for, value: k, achieved: eval(k)? })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg4() -> SystemConfig {
        SystemConfig::with_snr_db(4, 4, 10.0).unwrap()
    }

    #[test]
    fn median_error_costs_nothing() {
        let op = OperatingPoint::new(30, 0.5).unwrap();
        let c = cfg4();
        for s in [Scheme::Spatiotemporal, Scheme::TimeDomain] {
            assert_eq!(normalized_rate(&c, &op, s), 11.0f64.log2());
        }
    }

    #[test]
    fn penalty_depends_on_product_only() {
        let a = rate_penalty(4, 50, 1e-7, Scheme::Spatiotemporal).unwrap();
        let b = rate_penalty(1, 200, 1e-7, Scheme::Spatiotemporal).unwrap();
        assert_eq!(a, b);
        assert_eq!(b, rate_penalty(1, 200, 1e-7, Scheme::TimeDomain).unwrap());
    }

    #[test]
    fn rate_at_capacity_is_a_coin_flip() {
        let c = cfg4();
        let e = error_probability(&c, 100, 11.0f64.log2(), Scheme::Spatiotemporal).unwrap();
        assert_eq!(e.value, 0.5);
        assert!(e.above_capacity);
        assert!(error_probability(&c, 100, -1.0, Scheme::TimeDomain).is_err());
    }

    #[test]
    fn latency_reduced_fourfold() {
        let c = cfg4();
        let st = error_probability(&c, 50, 2.0, Scheme::Spatiotemporal).unwrap();
        let td = error_probability(&c, 200, 2.0, Scheme::TimeDomain).unwrap();
        assert_eq!(st.value, td.value);
        let sol = solve_exchange(&c, 2.0, td.value, SolveFor::Blocklength, 4).unwrap();
        assert_eq!(sol.value, 50);
    }

    #[test]
    fn deep_tail_stays_in_log_space() {
        // Δ = 0.5 bits at mn = 10⁴
        let snr = 2f64.powf(2.5) - 1.0;
        let c = SystemConfig::new(4, 4, snr).unwrap();
        let e = error_probability(&c, 2500, 2.0, Scheme::Spatiotemporal).unwrap();
        assert!((e.delta - 0.5).abs() < 1e-12);
        assert!(e.ln_value < -100.0 * std::f64::consts::LN_10 && e.ln_value.is_finite());
        assert!(e.value >= 0.0 && e.value < 1e-100);
    }

    #[test]
    fn exchange_edges() {
        let c = cfg4();
        assert_eq!(solve_exchange(&c, 2.0, 0.5, SolveFor::Blocklength, 4).unwrap().value, 1);
        assert!(solve_exchange(&c, 4.0, 1e-3, SolveFor::Blocklength, 4).is_err());
        let n2 = solve_exchange(&c, 2.0, 1e-9, SolveFor::Blocklength, 2).unwrap().value;
        let n4 = solve_exchange(&c, 2.0, 1e-9, SolveFor::Blocklength, 4).unwrap().value;
        assert!(n2 == 2 * n4 || n2 + 1 == 2 * n4, "{n2} {n4}");
        let m = solve_exchange(&c, 2.0, 1e-9, SolveFor::Dof, 25).unwrap();
        assert!(m.achieved.value <= 1e-9);
        assert!(
            error_probability_at(c.snr(), m.value as usize - 1, 25, 2.0, Scheme::Spatiotemporal).unwrap().value > 1e-9
        );
    }
}
