use fdrelay::channel::estimation_stats;
use fdrelay::{
    approx_rate, db_to_linear, distortion_factor, exact_rate, half_duplex_rate, linear_to_db,
    placement_rates, AdcModel, Resolution, SystemConfig,
};
use proptest::prelude::*;

fn config_strategy() -> impl Strategy<Value = SystemConfig> {
    (1usize..=6, 8usize..=256).prop_flat_map(|(k, m)| {
        (
            prop::collection::vec(0.5f64..2.0, k),
            prop::collection::vec(0.5f64..2.0, k),
            -20.0f64..20.0,
            -20.0f64..20.0,
            -20.0f64..20.0,
            -30.0f64..10.0,
            0.6f64..=1.0,
            0.6f64..=1.0,
        )
            .prop_map(move |(bs, br, ps, pr, pp, li, a, t)| {
                SystemConfig::homogeneous(m, k)
                    .with_betas(bs, br)
                    .with_source_power(db_to_linear(ps))
                    .with_relay_power(db_to_linear(pr))
                    .with_pilot_power(db_to_linear(pp))
                    .with_loop_interference(db_to_linear(li))
                    .with_adcs(
                        AdcModel::with_distortion(a).unwrap(),
                        AdcModel::with_distortion(t).unwrap(),
                    )
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn estimation_variances_split_the_gain(cfg in config_strategy()) {
        let s = estimation_stats(&cfg).unwrap();
        for k in 0..cfg.pairs {
            let b = cfg.beta_sr[k];
            prop_assert!(((s.sigma2_sr[k] + s.sigma2err_sr[k]) - b).abs() <= 1e-12 * b);
            let b = cfg.beta_rd[k];
            prop_assert!(((s.sigma2_rd[k] + s.sigma2err_rd[k]) - b).abs() <= 1e-12 * b);
            prop_assert!(s.sigma2_sr[k] > 0.0 && s.sigma2err_sr[k] > 0.0);
        }
    }

    #[test]
    fn rates_are_finite_and_consistent(cfg in config_strategy()) {
        for b in [exact_rate(&cfg).unwrap(), approx_rate(&cfg).unwrap(), half_duplex_rate(&cfg).unwrap()] {
            for (k, &r) in b.rate.iter().enumerate() {
                prop_assert!(r.is_finite() && r >= 0.0);
                prop_assert!(b.sinr[k] >= 0.0);
            }
            let total: f64 = b.rate.iter().sum();
            prop_assert!((total - b.sum_rate).abs() <= 1e-12 * total.max(1.0));
        }
    }

    #[test]
    fn user_relabeling_permutes_rates(cfg in config_strategy(), shift in 0usize..6) {
        let k = cfg.pairs;
        let rot = |v: &[f64]| -> Vec<f64> { (0..k).map(|i| v[(i + shift) % k]).collect() };
        let moved = cfg.clone().with_betas(rot(&cfg.beta_sr), rot(&cfg.beta_rd));
        let a = exact_rate(&cfg).unwrap();
        let b = exact_rate(&moved).unwrap();
        for i in 0..k {
            let (x, y) = (b.rate[i], a.rate[(i + shift) % k]);
            prop_assert!((x - y).abs() <= 1e-10 * x.max(1e-3));
        }
    }

    #[test]
    fn more_antennas_never_hurt(cfg in config_strategy()) {
        let a = exact_rate(&cfg).unwrap().sum_rate;
        let b = exact_rate(&cfg.clone().with_antennas(cfg.antennas * 2)).unwrap().sum_rate;
        prop_assert!(b >= a - 1e-12);
    }

    #[test]
    fn relay_placement_dominates_in_sum_rate(
        m in 32usize..=1024,
        bs in prop::collection::vec(0.5f64..2.0, 5),
        br in prop::collection::vec(0.5f64..2.0, 5),
        rho in prop::sample::select(vec![0.6366, 0.8825, 0.96546]),
    ) {
        // unit powers and sigma_LI2 = -10 dB
        let cfg = SystemConfig::homogeneous(m, 5).with_betas(bs, br).with_loop_interference(0.1);
        let (relay, dest) = placement_rates(&cfg, rho).unwrap();
        prop_assert!(relay.sum_rate >= dest.sum_rate);
    }

    #[test]
    fn db_round_trip(x in -100.0f64..100.0) {
        prop_assert!((linear_to_db(db_to_linear(x)) - x).abs() < 1e-10);
    }

    #[test]
    fn distortion_grows_with_bits(b in 1u32..64) {
        let lo = distortion_factor(Resolution::Bits(b)).unwrap();
        let hi = distortion_factor(Resolution::Bits(b + 1)).unwrap();
        // above ~26 bits the gap to 1 is below f64 resolution
        let grows = if b <= 24 { lo < hi } else { lo <= hi };
        prop_assert!(hi <= 1.0 && grows);
    }
}
