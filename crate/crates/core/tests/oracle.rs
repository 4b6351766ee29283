//! Engine versus the independent brute-force model in `astra-oracle`.

use astra_core::sc::{ChannelId, FixedPointValue, Generator, OperandRole, RngChannel, LFSR16_TAPS};
use astra_core::sc::{sc_multiply_error_model, QuantizedTensor};
use astra_core::vdpe::{vdpe_dot, vdpe_matmul, AdcResolution, DotProductJob, VdpeConfig};
use astra_oracle::{Engine, Gen, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn oracle_gen(g: Generator) -> Gen {
    match g {
        Generator::LowDiscrepancy => Gen::LowDiscrepancy,
        Generator::Lfsr => Gen::Lfsr,
        Generator::ExhaustiveUnary => Gen::Unary,
    }
}

fn engine(cfg: &VdpeConfig) -> Engine {
    Engine {
        gen: oracle_gen(cfg.sc.generator),
        master_seed: cfg.sc.master_seed,
        stream_length: cfg.sc.stream_length,
        magnitude_bits: cfg.sc.magnitude_bits,
        adc_bits: match cfg.adc {
            AdcResolution::Bits(b) => Some(b),
            AdcResolution::Ideal => None,
        },
    }
}

fn fixed(codes: &[i32], bits: u32) -> Vec<FixedPointValue> {
    codes
        .iter()
        .map(|&c| FixedPointValue::from_signed_code(c, bits, 1.0).unwrap())
        .collect()
}

/// Per-product count error bound for any (0, m, 2)-net in base 2:
/// `N * D*_N <= m / 3 + 19 / 9`.
fn net_bound_bits(n: usize) -> f64 {
    f64::from(n.trailing_zeros()) / 3.0 + 19.0 / 9.0
}

#[test]
fn lfsr_masks_match_period_search() {
    assert_eq!(astra_oracle::maximal_masks(), &LFSR16_TAPS[..]);
}

#[test]
fn channel_ids_match() {
    for i in [0u64, 1, 2, 77, 1 << 40, u64::MAX] {
        assert_eq!(ChannelId::derive(OperandRole::Lhs, i).raw(), astra_oracle::channel_id(Side::Left, i));
        assert_eq!(ChannelId::derive(OperandRole::Rhs, i).raw(), astra_oracle::channel_id(Side::Right, i));
    }
}

#[test]
fn thresholds_match_for_every_generator() {
    for g in Generator::ALL {
        for seed in [0u64, 1, 0xDEAD_BEEF] {
            for (role, side) in [(OperandRole::Lhs, Side::Left), (OperandRole::Rhs, Side::Right)] {
                for index in [0u64, 5, 1000] {
                    for n in [1usize, 2, 8, 128, 1024] {
                        let ch = RngChannel::new(g, seed, ChannelId::derive(role, index));
                        let ours: Vec<u32> = ch.thresholds(n).collect();
                        let theirs = astra_oracle::thresholds(oracle_gen(g), seed, side, index, n);
                        for (t, (num, den)) in ours.iter().zip(&theirs) {
                            assert_eq!(
                                u128::from(*t) * u128::from(*den),
                                u128::from(*num) << 32,
                                "{g} seed {seed} {side:?} #{index} n {n}"
                            );
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn k16_dot_products_are_bit_exact_and_within_the_sc_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for g in Generator::ALL {
        let mut cfg = VdpeConfig::default();
        cfg.sc.generator = g;
        for trial in 0..40 {
            cfg.sc.master_seed = rng.random();
            let x: Vec<i32> = (0..16).map(|_| rng.random_range(-255..=255)).collect();
            let w: Vec<i32> = (0..16).map(|_| rng.random_range(-255..=255)).collect();
            let got = vdpe_dot(
                &DotProductJob {
                    x: fixed(&x, 8),
                    w: fixed(&w, 8),
                },
                &cfg,
            )
            .unwrap();
            let want = astra_oracle::dot(&engine(&cfg), &x, &w, |i| i as u64, |i| i as u64);
            assert_eq!(got, want, "{g} trial {trial}");

            if g != Generator::Lfsr {
                let exact: f64 = x.iter().zip(&w).map(|(&a, &b)| f64::from(a * b)).sum::<f64>() / 65536.0;
                let step = 16.0 / 128.0;
                let bound = 16.0 * net_bound_bits(128) / 128.0 + step;
                assert!((got - exact).abs() <= bound, "{g}: {got} vs {exact}");
            }
        }
    }
}

#[test]
fn matmul_8x16x8_is_bit_exact_and_within_the_error_model() {
    let (m, k, n) = (8, 16, 8);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for g in Generator::ALL {
        let mut cfg = VdpeConfig::default();
        cfg.sc.generator = g;
        cfg.sc.master_seed = rng.random();
        let a: Vec<i32> = (0..m * k).map(|_| rng.random_range(-255..=255)).collect();
        let b: Vec<i32> = (0..k * n).map(|_| rng.random_range(-255..=255)).collect();
        let qa = QuantizedTensor::from_codes(&[m, k], a.clone(), 8, 1.0).unwrap();
        let qb = QuantizedTensor::from_codes(&[k, n], b.clone(), 8, 1.0).unwrap();
        let got = vdpe_matmul(&qa, &qb, &cfg).unwrap();
        assert_eq!(got.values, astra_oracle::matmul(&engine(&cfg), &a, &b, m, k, n), "{g}");

        let step = k as f64 / 128.0;
        for r in 0..m {
            for c in 0..n {
                let mut exact = 0.0;
                let mut bound = step;
                for i in 0..k {
                    let (p, q) = (a[r * k + i], b[i * n + c]);
                    exact += f64::from(p * q) / 65536.0;
                    let (pm, qm) = (f64::from(p.abs()) / 256.0, f64::from(q.abs()) / 256.0);
                    bound += 4.0 * sc_multiply_error_model(pm, qm, 128).sqrt();
                }
                let e = (got.get(r, c) - exact).abs();
                assert!(e <= bound, "{g} ({r},{c}): error {e} > {bound}");
            }
        }
    }
}

#[test]
fn identity_times_b_reproduces_b() {
    let k = 8;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut a = vec![0i32; k * k];
    for i in 0..k {
        a[i * k + i] = 255;
    }
    let b: Vec<i32> = (0..k * 4).map(|_| rng.random_range(-255..=255)).collect();
    let cfg = VdpeConfig::default();
    let qa = QuantizedTensor::from_codes(&[k, k], a, 8, 1.0).unwrap();
    let qb = QuantizedTensor::from_codes(&[k, 4], b.clone(), 8, 1.0).unwrap();
    let out = vdpe_matmul(&qa, &qb, &cfg).unwrap();
    let step = k as f64 / 128.0;
    for (got, code) in out.values.iter().zip(&b) {
        let want = f64::from(*code) / 256.0 * (255.0 / 256.0);
        assert!((got - want).abs() <= step + net_bound_bits(128) / 128.0, "{got} vs {want}");
    }
}

#[test]
fn one_by_one_matmul_is_a_single_product() {
    for g in Generator::ALL {
        let mut cfg = VdpeConfig::default();
        cfg.sc.generator = g;
        cfg.adc = AdcResolution::Ideal;
        let qa = QuantizedTensor::from_codes(&[1, 1], vec![-200], 8, 1.0).unwrap();
        let qb = QuantizedTensor::from_codes(&[1, 1], vec![90], 8, 1.0).unwrap();
        let out = vdpe_matmul(&qa, &qb, &cfg).unwrap();
        let want = astra_oracle::dot(&engine(&cfg), &[-200], &[90], |_| 0, |_| 0);
        assert_eq!(out.values, vec![want]);
    }
}

/// Every signed instance with K <= 3 and magnitude_bits <= 2 at N in {1..8}.
/// The full K <= 4, magnitude_bits <= 3 sweep lives in the acceptance suite.
#[test]
fn small_instances_match_exhaustively() {
    for g in Generator::ALL {
        for bits in 1..=2u32 {
            for n in [1usize, 2, 4, 8] {
                for k in 1..=3usize {
                    let cfg = VdpeConfig {
                        sc: astra_core::sc::ScConfig {
                            stream_length: n,
                            magnitude_bits: bits,
                            generator: g,
                            master_seed: 0x5EED,
                        },
                        adc: AdcResolution::Bits(4),
                        ..VdpeConfig::default()
                    };
                    let e = engine(&cfg);
                    let max = (1i32 << bits) - 1;
                    let levels = (2 * max + 1) as usize;
                    let total = levels.pow(2 * k as u32);
                    for idx in 0..total {
                        let mut rest = idx;
                        let mut digit = || {
                            let d = (rest % levels) as i32 - max;
                            rest /= levels;
                            d
                        };
                        let x: Vec<i32> = (0..k).map(|_| digit()).collect();
                        let w: Vec<i32> = (0..k).map(|_| digit()).collect();
                        let got = vdpe_dot(
                            &DotProductJob {
                                x: fixed(&x, bits),
                                w: fixed(&w, bits),
                            },
                            &cfg,
                        )
                        .unwrap();
                        let want = astra_oracle::dot(&e, &x, &w, |i| i as u64, |i| i as u64);
                        assert_eq!(got, want, "{g} b{bits} n{n} x{x:?} w{w:?}");
                    }
                }
            }
        }
    }
}
