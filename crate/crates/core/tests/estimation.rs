use fdrelay::channel::{draw_channels, estimation_stats, simulate_pilot_estimation};
use fdrelay::{AdcModel, SystemConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn two_bit(antennas: usize, pairs: usize, pilot_power: f64) -> SystemConfig {
    let adc = AdcModel::bits(2).unwrap();
    SystemConfig::homogeneous(antennas, pairs)
        .with_adcs(adc, adc)
        .with_pilot_power(pilot_power)
}

#[test]
fn two_bit_estimate_variance() {
    // tau_p p_p = 50
    let s = estimation_stats(&two_bit(64, 5, 10.0)).unwrap();
    let expect = 0.8825 * 50.0 / 51.0;
    assert!((s.sigma2_sr[0] - expect).abs() < 1e-12);
    assert!((s.sigma2_sr[0] - 0.86520).abs() < 1e-5);
    assert!((s.sigma2err_sr[0] - (1.0 - expect)).abs() < 1e-12);
}

#[test]
fn empirical_variance_of_two_bit_estimates() {
    let cfg = two_bit(32, 5, 10.0);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut hat, mut err) = (0.0, 0.0);
    let n = 2000;
    for _ in 0..n {
        let ch = draw_channels(&cfg, &mut rng).unwrap();
        let est = simulate_pilot_estimation(&ch, &cfg, &mut rng).unwrap();
        hat += est.g_sr_hat.iter().map(|z| z.norm_sqr()).sum::<f64>();
        err += est.err_sr.iter().map(|z| z.norm_sqr()).sum::<f64>();
    }
    let count = (n * 32 * 5) as f64;
    let s = estimation_stats(&cfg).unwrap();
    assert!((hat / count / s.sigma2_sr[0] - 1.0).abs() < 0.01);
    assert!((err / count / s.sigma2err_sr[0] - 1.0).abs() < 0.03);
}

#[test]
fn estimates_are_independent_of_loop_channel() {
    let cfg = two_bit(8, 2, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut ch = draw_channels(&cfg, &mut rng).unwrap();
    let a = simulate_pilot_estimation(&ch, &cfg, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    ch.g_rr.scale_mut(7.0);
    let b = simulate_pilot_estimation(&ch, &cfg, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    assert_eq!(a.g_sr_hat, b.g_sr_hat);
    assert_eq!(a.g_rd_hat, b.g_rd_hat);
}
