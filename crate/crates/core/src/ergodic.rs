//! Expectations over the fading distribution.
//!
//! Every Monte Carlo trial k draws its channel from stream k of the given
//! seed, and per-trial results are collected in trial order before being
//! summed sequentially, so estimates do not depend on the worker count.
//! Work is spread over whatever rayon pool the caller installs.

use std::f64::consts::LN_2;

use rayon::prelude::*;

use crate::channel::{sample_channel, OperatingPoint, SystemConfig};
use crate::info_density::{capacity_dispersion, Scheme};
use crate::math::{q_inv, RngState};
use crate::{Error, Result, LOG2_E};

/// A Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: u64,
    pub seed: u64,
}

impl McEstimate {
    /// Sample mean and s/√N of `samples`, summed in order.
    pub fn from_samples(samples: &[f64], seed: u64) -> Self {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let ss: f64 = samples.iter().map(|x| (x - mean) * (x - mean)).sum();
        let var = if samples.len() > 1 { ss / (n - 1.0) } else { 0.0 };
        Self { mean, std_error: (var / n).sqrt(), trials: samples.len() as u64, seed }
    }

    /// Sample variance of `samples`, with the large-N standard error
    /// √((μ₄ − s⁴)/N).
    pub fn variance_of(samples: &[f64], seed: u64) -> Self {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let m4 = samples.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
        Self { mean: var, std_error: ((m4 - var * var).max(0.0) / n).sqrt(), trials: samples.len() as u64, seed }
    }

    /// Distance of the mean from `other`, in standard errors.
    pub fn z_distance(&self, other: f64) -> f64 {
        (self.mean - other).abs() / self.std_error
    }
}

/// Runs `f` on trials `0..trials`, each with its own stream, in parallel;
/// results come back in trial order.
pub fn par_trials<T, F>(trials: u64, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(RngState) -> T + Sync + Send,
{
    (0..trials).into_par_iter().map(|k| f(RngState::new(seed, k))).collect()
}

/// Monte Carlo averages over H and their high-SNR closed forms.
#[derive(Debug, Clone, PartialEq)]
pub struct ErgodicReport {
    pub cfg: SystemConfig,
    /// E[C], shared by both schemes.
    pub e_capacity: McEstimate,
    pub e_dispersion_st: McEstimate,
    /// Var[V_ST] (bits⁴).
    pub var_dispersion_st: McEstimate,
    pub e_sqrt_dispersion_td: McEstimate,
    pub e_dispersion_td: McEstimate,
    /// E[Σ(1 − ½(1+aᵢ)⁻²)]·log₂e, the second-order Taylor surrogate of
    /// E[√V_TD].
    pub e_sqrt_dispersion_td_taylor: McEstimate,
    /// (m − (L/ρ)²/2·E[tr U⁻²])·log₂e using the Wishart identity; `None`
    /// when the identity diverges (|L − N| ≤ 1).
    pub sqrt_dispersion_td_wishart: Option<f64>,
    /// m·log₂(1+ρ)
    pub high_snr_capacity: f64,
    /// m·log₂²e
    pub high_snr_dispersion_st: f64,
    /// m·log₂e
    pub high_snr_sqrt_dispersion_td: f64,
}

pub fn ergodic_report(cfg: &SystemConfig, trials: u64, seed: u64) -> Result<ErgodicReport> {
    Ok(report_pass(cfg, None, trials, seed)?.0)
}

/// [`ergodic_report`] together with [`mc_rates`] at `op`, from a single pass
/// over the channel draws. Identical to calling the two separately.
pub fn ergodic_report_with_rates(
    cfg: &SystemConfig,
    op: &OperatingPoint,
    trials: u64,
    seed: u64,
) -> Result<(ErgodicReport, McEstimate, McEstimate)> {
    let (report, rates) = report_pass(cfg, Some(op), trials, seed)?;
    let (st, td) = rates.expect("operating point given");
    Ok((report, st, td))
}

fn report_pass(
    cfg: &SystemConfig,
    op: Option<&OperatingPoint>,
    trials: u64,
    seed: u64,
) -> Result<(ErgodicReport, Option<(McEstimate, McEstimate)>)> {
    if trials < 2 {
        return Err(Error::Domain(format!("need at least 2 trials, got {trials}")));
    }
    let a_scale = cfg.per_antenna_snr();
    // Q⁻¹(ε)/√n, or 0 when no rates are wanted
    let k = op.map_or(0.0, |op| q_inv(op.epsilon).expect("validated epsilon") / op.n().sqrt());
    let rows = par_trials(trials, seed, |rng| {
        let ch = sample_channel(cfg, rng);
        let (c, v, sqrt_v) = capacity_dispersion(ch.eigenvalues(), cfg);
        let taylor: f64 = ch.eigenvalues().iter().map(|&l| 1.0 - 0.5 / (1.0 + a_scale * l).powi(2)).sum();
        [c, v, sqrt_v, sqrt_v * sqrt_v, taylor * LOG2_E, c - v.sqrt() * k, c - sqrt_v * k]
    });
    let column = |j: usize| rows.iter().map(|r| r[j]).collect::<Vec<f64>>();
    let m = cfg.dof() as f64;
    let wishart = wishart_inverse_trace(cfg.tx(), cfg.rx())
        .ok()
        .map(|t| (m - 0.5 * (cfg.tx() as f64 / cfg.snr()).powi(2) * t) * LOG2_E);
    let report = ErgodicReport {
        cfg: *cfg,
        e_capacity: McEstimate::from_samples(&column(0), seed),
        e_dispersion_st: McEstimate::from_samples(&column(1), seed),
        var_dispersion_st: McEstimate::variance_of(&column(1), seed),
        e_sqrt_dispersion_td: McEstimate::from_samples(&column(2), seed),
        e_dispersion_td: McEstimate::from_samples(&column(3), seed),
        e_sqrt_dispersion_td_taylor: McEstimate::from_samples(&column(4), seed),
        sqrt_dispersion_td_wishart: wishart,
        high_snr_capacity: m * cfg.snr().ln_1p() * LOG2_E,
        high_snr_dispersion_st: m * LOG2_E * LOG2_E,
        high_snr_sqrt_dispersion_td: m * LOG2_E,
    };
    let rates = op.map(|_| (McEstimate::from_samples(&column(5), seed), McEstimate::from_samples(&column(6), seed)));
    Ok((report, rates))
}

/// High-SNR closed form of the average maximal rate:
/// m·log₂(1+ρ) − √(m/n)·Q⁻¹(ε)/ln2 (spatiotemporal) or
/// m·log₂(1+ρ) − (m/√n)·Q⁻¹(ε)/ln2 (time-domain).
pub fn high_snr_rate(cfg: &SystemConfig, op: &OperatingPoint, scheme: Scheme) -> f64 {
    let m = cfg.dof() as f64;
    let q = q_inv(op.epsilon).expect("validated epsilon");
    let spread = match scheme {
        Scheme::Spatiotemporal => m.sqrt(),
        Scheme::TimeDomain => m,
    };
    m * cfg.snr().ln_1p() * LOG2_E - spread / op.n().sqrt() * q / LN_2
}

/// E over H of the per-realization normal approximation C − √(V/n)·Q⁻¹(ε).
pub fn mc_rate(cfg: &SystemConfig, op: &OperatingPoint, scheme: Scheme, trials: u64, seed: u64) -> McEstimate {
    let (st, td) = mc_rates(cfg, op, trials, seed);
    match scheme {
        Scheme::Spatiotemporal => st,
        Scheme::TimeDomain => td,
    }
}

/// [`mc_rate`] for both schemes from one pass over the same channel draws.
pub fn mc_rates(cfg: &SystemConfig, op: &OperatingPoint, trials: u64, seed: u64) -> (McEstimate, McEstimate) {
    let q = q_inv(op.epsilon).expect("validated epsilon");
    let root_n = op.n().sqrt();
    let rows = par_trials(trials, seed, |rng| {
        let ch = sample_channel(cfg, rng);
        let (c, v, sqrt_v) = capacity_dispersion(ch.eigenvalues(), cfg);
        (c - v.sqrt() / root_n * q, c - sqrt_v / root_n * q)
    });
    let st: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let td: Vec<f64> = rows.iter().map(|r| r.1).collect();
    (McEstimate::from_samples(&st, seed), McEstimate::from_samples(&td, seed))
}

/// E[tr(U⁻²)] = LN/(|L−N|³ − |L−N|) for the smaller-side Wishart matrix U.
pub fn wishart_inverse_trace(tx: usize, rx: usize) -> Result<f64> {
    let d = tx.abs_diff(rx) as f64;
    if d <= 1.0 {
        return Err(Error::Divergent(format!("E[tr(U^-2)] is infinite for |L-N| = {d} (L={tx}, N={rx})")));
    }
    Ok((tx * rx) as f64 / (d * d * d - d))
}

/// Monte Carlo estimate of E[tr(U⁻²)] = E[Σλᵢ⁻²]. Not attempted when the
/// closed form diverges.
///
/// The estimator has infinite variance for |L − N| < 4 (λ_min⁻⁴ is not
/// integrable there), so the reported standard error is only indicative in
/// that range.
pub fn wishart_inverse_trace_mc(tx: usize, rx: usize, trials: u64, seed: u64) -> Result<McEstimate> {
    wishart_inverse_trace(tx, rx)?;
    let cfg = SystemConfig::new(tx, rx, 1.0)?;
    let samples =
        par_trials(trials, seed, |rng| sample_channel(&cfg, rng).eigenvalues().iter().map(|l| l.powi(-2)).sum::<f64>());
    Ok(McEstimate::from_samples(&samples, seed))
}
