//! Statistics of the information density for a fixed channel.
//!
//! With the canonical codeword, the information density over n channel uses
//! splits into i.i.d. per-use, per-link terms
//!
//! ```text
//! u = log₂(1+a) + (1 − |√a·W − 1|² / (1+a))·log₂e,   W ~ CN(0,1),  a = ρλ/L
//! ```
//!
//! whose mean is the link capacity and whose variance is the link dispersion.
//! Spatiotemporal coding sums all links into one codeword; time-domain coding
//! treats each link as its own code.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::channel::{ChannelRealization, SystemConfig};
use crate::math::{bessel_i0e, integrate};
use crate::{Error, Result, LOG2_E};

/// Coding scheme across the spatial links.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// One codeword spans all antennas and channel uses.
    Spatiotemporal,
    /// An independent codeword per link.
    TimeDomain,
}

impl Scheme {
    pub fn label(&self) -> &'static str {
        match self {
            Scheme::Spatiotemporal => "st",
            Scheme::TimeDomain => "td",
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Per-link capacity (bits), dispersion (bits²) and third absolute central
/// moment (bits³) of the per-use information density term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkStats {
    pub gain: f64,
    /// Effective link SNR a = ρλ/L.
    pub snr: f64,
    pub capacity: f64,
    pub dispersion: f64,
    pub third_abs_moment: f64,
}

impl LinkStats {
    pub fn is_active(&self) -> bool {
        self.dispersion > 0.0
    }

    /// 6θ/V^{3/2}; zero for an inactive link.
    pub fn berry_esseen(&self) -> f64 {
        if self.is_active() {
            6.0 * self.third_abs_moment / self.dispersion.powf(1.5)
        } else {
            0.0
        }
    }
}

/// Closed-form link statistics for eigen-gain `gain`.
pub fn link_stats(gain: f64, cfg: &SystemConfig) -> Result<LinkStats> {
    if !(gain >= 0.0 && gain.is_finite()) {
        return Err(Error::Domain(format!("link gain must be finite and nonnegative, got {gain}")));
    }
    let a = cfg.per_antenna_snr() * gain;
    Ok(LinkStats {
        gain,
        snr: a,
        capacity: link_capacity(a),
        dispersion: link_dispersion(a),
        third_abs_moment: third_abs_moment(a),
    })
}

/// log₂(1+a).
pub fn link_capacity(a: f64) -> f64 {
    a.ln_1p() * LOG2_E
}

/// (1 − 1/(1+a)²)·log₂²e.
pub fn link_dispersion(a: f64) -> f64 {
    dispersion_nats(a) * LOG2_E * LOG2_E
}

fn dispersion_nats(a: f64) -> f64 {
    // 1 − 1/(1+a)² = a(2+a)/(1+a)², exact near a = 0
    a * (2.0 + a) / ((1.0 + a) * (1.0 + a))
}

/// E|u − C|³ in bits³ for a link with effective SNR `a`.
///
/// S = |√a·W − 1|² has density (1/a)·exp(−(√s − 1)²/a)·I₀e(2√s/a); after
/// s = t² the expectation of |1 − S/(1+a)|³ is a smooth one-dimensional
/// integral with a single kink at t = √(1+a).
pub fn third_abs_moment(a: f64) -> f64 {
    if a <= 0.0 {
        return 0.0;
    }
    let density = |t: f64| {
        if t <= 0.0 {
            return 0.0;
        }
        let d = t - 1.0;
        (2.0 * t / a) * (-(d * d) / a).exp() * bessel_i0e(2.0 * t / a)
    };
    let integrand = |t: f64| (1.0 - t * t / (1.0 + a)).abs().powi(3) * density(t);
    let spread = a.sqrt();
    let kink = (1.0 + a).sqrt();
    let lo = (1.0 - 14.0 * spread).max(0.0);
    let hi = kink.max(1.0) + 14.0 * spread;
    let scale = dispersion_nats(a).powf(1.5);
    let tol = 1e-14 * scale;
    let mut value = 0.0;
    // peak region split into panels so narrow peaks are never skipped
    let knots = [lo, 1.0_f64.min(kink).max(lo), kink, hi];
    for w in knots.windows(2) {
        if w[1] > w[0] {
            let panels = 16;
            let h = (w[1] - w[0]) / panels as f64;
            for k in 0..panels {
                let x0 = w[0] + k as f64 * h;
                value += integrate(integrand, x0, x0 + h, tol / 64.0);
            }
        }
    }
    value * LOG2_E.powi(3)
}

/// Cumulant κ_k (k ≥ 2) of the centered per-use term 1 − S/(1+a), in nats.
fn link_cumulant(a: f64, k: i32) -> f64 {
    // κ_k(S) = (k−1)!·a^{k−1}·(a + k) for S = |Z|², Z ~ CN(−1, a)
    let fact: f64 = (1..k).map(|j| j as f64).product();
    let ks = fact * a.powi(k - 1) * (a + k as f64);
    (-1.0 / (1.0 + a)).powi(k) * ks
}

/// ln of the characteristic function of Σᵢ(1 − Sᵢ/(1+aᵢ)), nats.
fn ln_char_fn(snrs: &[f64], t: f64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    snrs.iter()
        .map(|&a| {
            let w = -t / (1.0 + a);
            let denom = Complex64::new(1.0, -w * a);
            i * t + i * w / denom - denom.ln()
        })
        .sum()
}

/// Third absolute central moment (bits³) of the sum of independent per-use
/// link terms with effective SNRs `snrs`.
///
/// Evaluated from the characteristic function φ of the centered sum X:
///
/// ```text
/// E|X|³ = (12/π) ∫₀^∞ (Re φ(t) − 1 + σ²t²/2) / t⁴ dt
/// ```
///
/// with a Taylor expansion from the cumulants near t = 0 and the smooth part
/// of the tail integrated analytically.
pub fn aggregate_third_abs_moment(snrs: &[f64]) -> f64 {
    let active: Vec<f64> = snrs.iter().copied().filter(|&a| a > 0.0).collect();
    if active.is_empty() {
        return 0.0;
    }
    let kappa = |k: i32| active.iter().map(|&a| link_cumulant(a, k)).sum::<f64>();
    let (k2, k3, k4, k5, k6, k8) = (kappa(2), kappa(3), kappa(4), kappa(5), kappa(6), kappa(8));
    let sigma = k2.sqrt();
    // standardized even moments from cumulants
    let m4 = (k4 + 3.0 * k2 * k2) / k2.powi(2);
    let m6 = (k6 + 15.0 * k4 * k2 + 10.0 * k3 * k3 + 15.0 * k2.powi(3)) / k2.powi(3);
    let m8 = (k8
        + 28.0 * k6 * k2
        + 56.0 * k5 * k3
        + 35.0 * k4 * k4
        + 210.0 * k4 * k2 * k2
        + 280.0 * k3 * k3 * k2
        + 105.0 * k2.powi(4))
        / k2.powi(4);

    let integrand = |tau: f64| {
        let l = ln_char_fn(&active, tau / sigma);
        // Re φ − 1 computed without cancellation
        let re_minus_one = l.re.exp_m1() * l.im.cos() - 2.0 * (0.5 * l.im).sin().powi(2);
        (re_minus_one + 0.5 * tau * tau) / tau.powi(4)
    };
    let tau0 = 0.02;
    let series = m4 / 24.0 * tau0 - m6 / 720.0 * tau0.powi(3) / 3.0 + m8 / 40320.0 * tau0.powi(5) / 5.0;
    let tail_start = 1000.0_f64;
    let mut total = series;
    let mut x0 = tau0;
    let mut x1 = 0.25;
    while x0 < tail_start {
        total += integrate(integrand, x0, x1, 1e-15);
        x0 = x1;
        x1 = (x1 * 2.0).min(tail_start);
    }
    total += 0.5 / tail_start - 1.0 / (3.0 * tail_start.powi(3));
    12.0 / PI * total * sigma.powi(3) * LOG2_E.powi(3)
}

/// Aggregate statistics of one channel realization under a coding scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeStats {
    pub scheme: Scheme,
    pub links: Vec<LinkStats>,
    /// Σ Cᵢ, bits per channel use.
    pub capacity: f64,
    /// Σ Vᵢ (spatiotemporal) or (Σ √Vᵢ)² (time-domain), bits².
    pub dispersion: f64,
    /// Spatiotemporal: third absolute central moment of the per-use sum over
    /// links. Time-domain: Σ θᵢ; the bounds use the per-link values.
    pub third_abs_moment: f64,
}

impl SchemeStats {
    /// Berry–Esseen constant B. For time-domain coding the worst link's.
    pub fn berry_esseen(&self) -> f64 {
        match self.scheme {
            Scheme::Spatiotemporal => {
                if self.dispersion > 0.0 {
                    6.0 * self.third_abs_moment / self.dispersion.powf(1.5)
                } else {
                    0.0
                }
            }
            Scheme::TimeDomain => self.links.iter().map(LinkStats::berry_esseen).fold(0.0, f64::max),
        }
    }

    pub fn dof(&self) -> usize {
        self.links.len()
    }
}

/// Capacity, dispersion and third moment of `ch` under `scheme`.
pub fn scheme_stats(ch: &ChannelRealization, cfg: &SystemConfig, scheme: Scheme) -> Result<SchemeStats> {
    if ch.dof() != cfg.dof() {
        return Err(Error::Dimension(format!(
            "realization has {} eigenvalues but the configuration has m = {}",
            ch.dof(),
            cfg.dof()
        )));
    }
    let links = ch.eigenvalues().iter().map(|&l| link_stats(l, cfg)).collect::<Result<Vec<_>>>()?;
    Ok(aggregate(links, scheme))
}

/// Capacity and dispersion only, skipping third moments. Used by the Monte
/// Carlo loops where θ is never needed.
pub fn capacity_dispersion(eigenvalues: &[f64], cfg: &SystemConfig) -> (f64, f64, f64) {
    let mut c = 0.0;
    let mut v = 0.0;
    let mut sqrt_v = 0.0;
    for &l in eigenvalues {
        let a = cfg.per_antenna_snr() * l;
        c += link_capacity(a);
        let vi = link_dispersion(a);
        v += vi;
        sqrt_v += vi.sqrt();
    }
    (c, v, sqrt_v)
}

fn aggregate(links: Vec<LinkStats>, scheme: Scheme) -> SchemeStats {
    let capacity = links.iter().map(|l| l.capacity).sum();
    let (dispersion, third_abs_moment) = match scheme {
        Scheme::Spatiotemporal => {
            let snrs: Vec<f64> = links.iter().map(|l| l.snr).collect();
            let theta = if links.len() == 1 { links[0].third_abs_moment } else { aggregate_third_abs_moment(&snrs) };
            (links.iter().map(|l| l.dispersion).sum(), theta)
        }
        Scheme::TimeDomain => {
            // with a single active link (Σ√Vᵢ)² is just that Vᵢ; skip the
            // square-root round trip so the schemes agree exactly
            let dispersion = if links.iter().filter(|l| l.is_active()).count() <= 1 {
                links.iter().map(|l| l.dispersion).sum()
            } else {
                links.iter().map(|l| l.dispersion.sqrt()).sum::<f64>().powi(2)
            };
            (dispersion, links.iter().map(|l| l.third_abs_moment).sum())
        }
    };
    SchemeStats { scheme, links, capacity, dispersion, third_abs_moment }
}

/// Which information density to sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityTarget {
    /// Sum over all links (spatiotemporal codeword).
    Spatiotemporal,
    /// A single link, as seen by its own time-domain codeword.
    Link(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfoDensitySample {
    /// ι in bits.
    pub value: f64,
    pub blocklength: u64,
    pub target: DensityTarget,
}

/// Draws ι over `n` channel uses by summing the i.i.d. per-use terms
/// (n·m terms for the spatiotemporal target, n for a single link).
pub fn sample_info_density<R: Rng + ?Sized>(
    stats: &SchemeStats,
    target: DensityTarget,
    n: u64,
    rng: &mut R,
) -> Result<InfoDensitySample> {
    let links: &[LinkStats] = match target {
        DensityTarget::Spatiotemporal => &stats.links,
        DensityTarget::Link(i) => std::slice::from_ref(
            stats.links.get(i).ok_or_else(|| Error::Dimension(format!("no link {i} among {}", stats.links.len())))?,
        ),
    };
    let nf = n as f64;
    let mut value = 0.0;
    for link in links {
        if link.snr <= 0.0 {
            continue;
        }
        let s = (0.5 * link.snr).sqrt();
        let mut dist = 0.0;
        for _ in 0..n {
            let x: f64 = rng.sample(StandardNormal);
            let y: f64 = rng.sample(StandardNormal);
            let re = s * x - 1.0;
            let im = s * y;
            dist += re * re + im * im;
        }
        value += nf * link.capacity + (nf - dist / (1.0 + link.snr)) * LOG2_E;
    }
    Ok(InfoDensitySample { value, blocklength: n, target })
}
