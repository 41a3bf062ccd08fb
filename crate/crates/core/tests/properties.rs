use fblmimo::bounds::{achievability_finite, converse_finite, na_validity, normal_approx_rate, KappaPolicy};
use fblmimo::channel::{gram_eigenvalues, sample_channel, ChannelRealization, OperatingPoint, SystemConfig};
use fblmimo::compare::{error_probability, solve_exchange, SolveFor};
use fblmimo::info_density::{scheme_stats, Scheme};
use fblmimo::math::{q_func, q_inv, ComplexMatrix, RngState};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn q_inv_inverts_q_func(x in -8.0f64..8.0) {
        // below x ≈ −5.3 the probability sits so close to 1 that its own
        // rounding (half an ulp of 1) moves the inverse by more than 1e-9
        let density = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let conditioning = f64::EPSILON / density;
        prop_assert!((q_inv(q_func(x)).unwrap() - x).abs() < 1e-9 + conditioning);
    }

    #[test]
    fn q_inv_inverts_q_func_to_1e9(x in -5.0f64..8.0) {
        prop_assert!((q_inv(q_func(x)).unwrap() - x).abs() < 1e-9);
    }

    #[test]
    fn gram_spectrum_is_consistent(rows in 1usize..7, cols in 1usize..7, seed in any::<u64>()) {
        let h = ComplexMatrix::gaussian(rows, cols, 1.0, &mut RngState::new(seed, 0).generator()).unwrap();
        let eig = gram_eigenvalues(&h).unwrap();
        prop_assert_eq!(eig.len(), rows.min(cols));
        prop_assert!(eig.windows(2).all(|w| w[0] >= w[1]));
        let frob = h.frobenius_norm_sqr();
        prop_assert!((eig.iter().sum::<f64>() - frob).abs() <= 1e-9 * frob);
    }

    #[test]
    fn schemes_share_capacity_and_order_dispersion(tx in 1usize..6, rx in 1usize..6, snr_db in -10.0f64..30.0, seed in any::<u64>()) {
        let cfg = SystemConfig::with_snr_db(tx, rx, snr_db).unwrap();
        let ch = sample_channel(&cfg, RngState::new(seed, 1));
        let st = scheme_stats(&ch, &cfg, Scheme::Spatiotemporal).unwrap();
        let td = scheme_stats(&ch, &cfg, Scheme::TimeDomain).unwrap();
        prop_assert_eq!(st.capacity, td.capacity);
        if cfg.dof() >= 2 {
            prop_assert!(td.dispersion > st.dispersion);
        } else {
            prop_assert_eq!(td.dispersion, st.dispersion);
        }
    }

    #[test]
    fn spatiotemporal_normal_approx_dominates(tx in 1usize..6, rx in 1usize..6, seed in any::<u64>(), n in 10u64..2000, log_eps in -9.0f64..-0.5) {
        let cfg = SystemConfig::with_snr_db(tx, rx, 10.0).unwrap();
        let ch = sample_channel(&cfg, RngState::new(seed, 2));
        let op = OperatingPoint::new(n, 10f64.powf(log_eps)).unwrap();
        let st = normal_approx_rate(&scheme_stats(&ch, &cfg, Scheme::Spatiotemporal).unwrap(), &op).rate;
        let td = normal_approx_rate(&scheme_stats(&ch, &cfg, Scheme::TimeDomain).unwrap(), &op).rate;
        if cfg.dof() == 1 {
            prop_assert_eq!(st, td);
        } else {
            prop_assert!(st > td);
        }
    }

    #[test]
    fn product_law_and_dominance(m in 1usize..9, k in 1u64..200, rate in 0.0f64..3.4) {
        let cfg = SystemConfig::new(m, m, 10.0).unwrap();
        // swap a factor 2 between m and n when possible
        let st = error_probability(&cfg, 2 * k, rate, Scheme::Spatiotemporal).unwrap();
        let td = error_probability(&cfg, 2 * k, rate, Scheme::TimeDomain).unwrap();
        if m % 2 == 0 {
            let swapped = SystemConfig::new(m / 2, m / 2, 10.0).unwrap();
            let other = error_probability(&swapped, 4 * k, rate, Scheme::Spatiotemporal).unwrap();
            prop_assert_eq!(st.ln_value, other.ln_value);
        }
        prop_assert!(st.ln_value <= td.ln_value);
        if m >= 2 {
            prop_assert!(st.ln_value < td.ln_value);
        }
    }

    #[test]
    fn exchange_is_minimal(m in 1u64..9, log_target in -12.0f64..-0.5, rate in 0.5f64..3.0) {
        let cfg = SystemConfig::new(4, 4, 10.0).unwrap();
        let target = 10f64.powf(log_target);
        let sol = solve_exchange(&cfg, rate, target, SolveFor::Blocklength, m).unwrap();
        let at = |n| error_probability(&SystemConfig::new(m as usize, m as usize, 10.0).unwrap(), n, rate, Scheme::Spatiotemporal).unwrap().value;
        prop_assert!(at(sol.value) <= target);
        if sol.value > 1 {
            prop_assert!(at(sol.value - 1) > target);
        }
        let looser = solve_exchange(&cfg, rate, (2.0 * target).min(0.9), SolveFor::Blocklength, m).unwrap();
        prop_assert!(looser.value <= sol.value);
    }

    #[test]
    fn finite_bounds_bracket_normal_approx(seed in any::<u64>(), n in 1u64..400_000, log_eps in -4.0f64..-0.3) {
        let cfg = SystemConfig::with_snr_db(2, 2, 10.0).unwrap();
        let ch = sample_channel(&cfg, RngState::new(seed, 3));
        let op = OperatingPoint::new(n, 10f64.powf(log_eps)).unwrap();
        for scheme in [Scheme::Spatiotemporal, Scheme::TimeDomain] {
            let s = scheme_stats(&ch, &cfg, scheme).unwrap();
            let a = achievability_finite(&s, &op, KappaPolicy::Tau);
            let na = normal_approx_rate(&s, &op);
            let c = converse_finite(&s, &op, 1.0).unwrap();
            prop_assert_eq!(a.feasible, na_validity(&s, &op).feasible);
            if a.feasible {
                prop_assert!(a.rate <= na.rate);
            }
            if c.feasible {
                prop_assert!(na.rate <= c.rate);
            }
        }
    }
}

#[test]
fn appending_a_link_raises_the_normal_approximation() {
    let cfg3 = SystemConfig::new(3, 3, 10.0).unwrap();
    let cfg4 = SystemConfig::new(4, 4, 10.0).unwrap();
    // per-antenna SNR differs between the two configurations, so compare
    // at the same effective link SNRs
    let base = [4.0, 2.0, 0.5];
    let scaled: Vec<f64> = base.iter().map(|l| l * 4.0 / 3.0).collect();
    let ch3 = ChannelRealization::from_eigenvalues(&cfg3, &base).unwrap();
    let ch4 = ChannelRealization::from_eigenvalues(&cfg4, &[scaled[0], scaled[1], scaled[2], 0.1]).unwrap();
    let op = OperatingPoint::new(100, 1e-5).unwrap();
    let r3 = normal_approx_rate(&scheme_stats(&ch3, &cfg3, Scheme::Spatiotemporal).unwrap(), &op).rate;
    let r4 = normal_approx_rate(&scheme_stats(&ch4, &cfg4, Scheme::Spatiotemporal).unwrap(), &op).rate;
    assert!(r4 > r3);
}
