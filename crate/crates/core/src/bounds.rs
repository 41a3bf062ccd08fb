//! Finite-blocklength rate bounds for a fixed channel realization.
//!
//! All expressions are written in terms of the error probability ε, using
//! Q⁻¹(1 − p) = −Q⁻¹(p) wherever a success probability would appear.
//!
//! For time-domain coding each link carries its own code at error ε, so the
//! finite-n bounds are evaluated link by link (with that link's Berry–Esseen
//! constant) and summed. The normal approximation of the sum is exactly
//! C − √(V/n)·Q⁻¹(ε) with V = (Σ√Vᵢ)².

use crate::channel::OperatingPoint;
use crate::info_density::{LinkStats, Scheme, SchemeStats};
use crate::math::q_inv;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundKind {
    NormalApprox,
    /// κβ achievability with the τ and κ terms dropped; equals the normal
    /// approximation.
    AchievabilityAsymptotic,
    AchievabilityFinite,
    ConverseFinite,
}

impl BoundKind {
    pub fn label(&self) -> &'static str {
        match self {
            BoundKind::NormalApprox => "normal_approx",
            BoundKind::AchievabilityAsymptotic => "achievability_asymptotic",
            BoundKind::AchievabilityFinite => "achievability_finite",
            BoundKind::ConverseFinite => "converse_finite",
        }
    }
}

/// A rate at one blocklength. Infeasible finite bounds carry `feasible =
/// false` and a vacuous rate: −∞ for achievability, +∞ for the converse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint {
    pub blocklength: u64,
    /// bits per channel use
    pub rate: f64,
    pub kind: BoundKind,
    pub scheme: Scheme,
    pub feasible: bool,
}

/// How log₂κ_τ enters the achievability bound.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum KappaPolicy {
    /// log₂κ_τ = log₂τ with τ = B/√n.
    #[default]
    Tau,
    /// A fixed value of log₂κ_τ (bits).
    Custom(f64),
}

impl KappaPolicy {
    fn log2_kappa(&self, tau: f64) -> f64 {
        match *self {
            KappaPolicy::Tau => tau.log2(),
            KappaPolicy::Custom(v) => v,
        }
    }
}

/// Accuracy diagnostics for the normal approximation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidityDiagnostics {
    /// B/√n
    pub berry_esseen_ratio: f64,
    /// (nC − √(nV)·Q⁻¹(ε)) / log₂n
    pub dominance_ratio: f64,
    /// ε − 2B/√n > 0, i.e. the finite achievability bound is evaluable.
    pub feasible: bool,
}

fn point(op: &OperatingPoint, rate: f64, kind: BoundKind, scheme: Scheme, feasible: bool) -> RatePoint {
    RatePoint { blocklength: op.blocklength, rate, kind, scheme, feasible }
}

/// C − √(V/n)·Q⁻¹(ε).
pub fn normal_approx_rate(stats: &SchemeStats, op: &OperatingPoint) -> RatePoint {
    let rate = stats.capacity - (stats.dispersion / op.n()).sqrt() * qinv(op.epsilon);
    point(op, rate, BoundKind::NormalApprox, stats.scheme, true)
}

/// Last line of the κβ achievability bound; identical to the normal
/// approximation by construction.
pub fn achievability_asymptotic(stats: &SchemeStats, op: &OperatingPoint) -> RatePoint {
    RatePoint { kind: BoundKind::AchievabilityAsymptotic, ..normal_approx_rate(stats, op) }
}

/// Finite-n converse:
/// log M ≤ nC − √(nV)·Q⁻¹(ε + (B+Δ)/√n) − log₂Δ + ½log₂n.
///
/// Infeasible (vacuous) when ε + (B+Δ)/√n ≥ 1.
pub fn converse_finite(stats: &SchemeStats, op: &OperatingPoint, delta: f64) -> Result<RatePoint> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Domain(format!("delta must be positive, got {delta}")));
    }
    let n = op.n();
    let log_m = per_link_sum(stats, |c, v, b| {
        let shifted = op.epsilon + (b + delta) / n.sqrt();
        if shifted >= 1.0 {
            return None;
        }
        Some(n * c - (n * v).sqrt() * qinv(shifted) - delta.log2() + 0.5 * n.log2())
    });
    Ok(match log_m {
        Some(l) => point(op, l / n, BoundKind::ConverseFinite, stats.scheme, true),
        None => point(op, f64::INFINITY, BoundKind::ConverseFinite, stats.scheme, false),
    })
}

/// Finite-n κβ achievability:
/// log M ≥ nC − √(nV)·Q⁻¹(ε − 2B/√n) + log₂κ_τ.
///
/// Infeasible when ε − 2B/√n ≤ 0.
pub fn achievability_finite(stats: &SchemeStats, op: &OperatingPoint, kappa: KappaPolicy) -> RatePoint {
    let n = op.n();
    let log_m = per_link_sum(stats, |c, v, b| {
        let tau = b / n.sqrt();
        let shifted = op.epsilon - 2.0 * tau;
        if shifted <= 0.0 {
            return None;
        }
        Some(n * c - (n * v).sqrt() * qinv(shifted) + kappa.log2_kappa(tau))
    });
    match log_m {
        Some(l) => point(op, l / n, BoundKind::AchievabilityFinite, stats.scheme, true),
        None => point(op, f64::NEG_INFINITY, BoundKind::AchievabilityFinite, stats.scheme, false),
    }
}

/// Applies `f(C, V, B)` to the whole codeword (spatiotemporal) or to every
/// active link (time-domain) and sums; `None` if any term is infeasible.
fn per_link_sum(stats: &SchemeStats, f: impl Fn(f64, f64, f64) -> Option<f64>) -> Option<f64> {
    match stats.scheme {
        Scheme::Spatiotemporal => f(stats.capacity, stats.dispersion, stats.berry_esseen()),
        Scheme::TimeDomain => stats
            .links
            .iter()
            .filter(|l| l.is_active())
            .map(|l: &LinkStats| f(l.capacity, l.dispersion, l.berry_esseen()))
            .sum(),
    }
}

/// Exact and first-order error of m independent links each failing with
/// probability ε, and the relative change of Q⁻¹ caused by the approximation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorAggregate {
    /// 1 − (1 − ε)^m
    pub exact: f64,
    /// mε
    pub approx: f64,
    /// |Q⁻¹(ε) − Q⁻¹(mε)| / Q⁻¹(mε)
    pub qinv_rel_err: f64,
}

pub fn td_error_aggregate(m: usize, epsilon: f64) -> Result<ErrorAggregate> {
    if m == 0 {
        return Err(Error::Domain("m must be positive".into()));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Domain(format!("epsilon must lie in (0,1), got {epsilon}")));
    }
    let mf = m as f64;
    let exact = -(mf * (-epsilon).ln_1p()).exp_m1();
    let approx = mf * epsilon;
    let q_m = q_inv(approx)?;
    let qinv_rel_err = if m == 1 { 0.0 } else { (q_inv(epsilon)? - q_m).abs() / q_m };
    Ok(ErrorAggregate { exact, approx, qinv_rel_err })
}

pub fn na_validity(stats: &SchemeStats, op: &OperatingPoint) -> ValidityDiagnostics {
    let n = op.n();
    let ratio = stats.berry_esseen() / n.sqrt();
    let log_m = n * stats.capacity - (n * stats.dispersion).sqrt() * qinv(op.epsilon);
    ValidityDiagnostics {
        berry_esseen_ratio: ratio,
        dominance_ratio: log_m / n.log2(),
        feasible: op.epsilon - 2.0 * ratio > 0.0,
    }
}

/// Smallest blocklength at which the finite achievability bound is feasible.
pub fn min_feasible_blocklength(stats: &SchemeStats, epsilon: f64) -> u64 {
    let b = stats.berry_esseen();
    let feasible = |n: u64| epsilon - 2.0 * b / (n as f64).sqrt() > 0.0;
    if feasible(1) {
        return 1;
    }
    let mut lo = 1u64;
    let mut hi = 2u64;
    while !feasible(hi) {
        lo = hi;
        hi = hi.saturating_mul(2);
        if hi == u64::MAX {
            return hi;
        }
    }
    // invariant: !feasible(lo), feasible(hi)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// ε is validated by `OperatingPoint`; shifted arguments are checked by the callers.
fn qinv(p: f64) -> f64 {
    q_inv(p).expect("probability inside (0,1)")
}
