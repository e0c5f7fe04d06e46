//! Invariants of the analytic path, checked over random parameters and
//! against independent numerical oracles.

use block_entropy::combinatorics::{hypergeometric_log_pmf, log_binomial};
use block_entropy::entropy::sector_entropy;
use block_entropy::spectrum::{
    equal_weight_spectrum, mixed_spectrum, sector_spectrum, thermodynamic_spectrum, SectorSpec,
    WeightVector,
};
use block_entropy::{
    asymptotic_entropy_finite, asymptotic_entropy_infinite, equal_weight_entropy,
    fit_log_prefactor, shannon_entropy_bits,
};
use proptest::prelude::*;

/// Kahan-compensated `Σ_{j=1}^{chosen} ln((total - j + 1) / j)`.
fn kahan_log_binomial(total: u64, chosen: u64) -> f64 {
    let (mut sum, mut carry) = (0.0f64, 0.0f64);
    for j in 1..=chosen {
        let term = ((total - j + 1) as f64 / j as f64).ln() - carry;
        let next = sum + term;
        carry = (next - sum) - term;
        sum = next;
    }
    sum
}

fn sector(length: u64, up: u64, block: u64) -> SectorSpec {
    SectorSpec::new(length, up, block).unwrap()
}

#[test]
fn large_log_binomial_matches_cumulative_sum() {
    let (total, chosen) = (1_000_000u64, 500_000u64);
    let value = log_binomial(total, chosen as i64).ln();
    let oracle = kahan_log_binomial(total, chosen);
    assert!(value.is_finite());
    assert!(((value - oracle) / oracle).abs() < 1e-9, "{value} vs {oracle}");
    for &(t, c) in &[(100u64, 7u64), (1000, 500), (12_345, 6_000)] {
        let v = log_binomial(t, c as i64).ln();
        let o = kahan_log_binomial(t, c);
        assert!(((v - o) / o).abs() < 1e-12, "({t}, {c})");
    }
}

#[test]
fn normalization_for_every_small_sector() {
    for length in [1u64, 2, 3, 7, 20, 59, 60, 61, 64, 100] {
        for up in 0..=length {
            for block in 0..=length {
                let s = sector_spectrum(&sector(length, up, block)).unwrap();
                assert!(s.normalization_error() < 1e-12, "L={length} N={up} n={block}");
            }
        }
    }
}

#[test]
fn normalization_on_large_grid() {
    for length in [500u64, 1000, 2000] {
        for up in (0..=length).step_by(37) {
            for block in (0..=length).step_by(53) {
                let s = sector_spectrum(&sector(length, up, block)).unwrap();
                assert!(s.normalization_error() < 1e-12, "L={length} N={up} n={block}");
            }
        }
    }
}

#[test]
fn sector_entropy_symmetries_and_argmax() {
    for length in [8u64, 9, 20, 21, 50] {
        let tie_tol = 1e-12;
        for up in 0..=length {
            let entropies: Vec<f64> = (0..=length)
                .map(|n| sector_entropy(&sector(length, up, n)).unwrap().bits())
                .collect();
            for n in 0..=length as usize {
                // S(n) = S(L - n) from shared spectra
                assert!((entropies[n] - entropies[length as usize - n]).abs() < 1e-12);
                // n + 1 eigenvalue bound
                let bound = ((n.min(up as usize) + 1) as f64).log2();
                assert!(entropies[n] <= bound + 1e-12);
            }
            if up == 0 || up == length {
                continue;
            }
            let max = entropies.iter().cloned().fold(f64::MIN, f64::max);
            let half = (length / 2) as usize;
            assert!((entropies[half] - max).abs() < tie_tol, "L={length} N={up}");
            if length % 2 == 1 {
                assert!((entropies[half + 1] - max).abs() < tie_tol);
            }
        }
        // argmax over N at fixed block
        for block in 1..length {
            let by_up: Vec<f64> = (0..=length)
                .map(|up| sector_entropy(&sector(length, up, block)).unwrap().bits())
                .collect();
            let max = by_up.iter().cloned().fold(f64::MIN, f64::max);
            let half = (length / 2) as usize;
            assert!((by_up[half] - max).abs() < tie_tol, "L={length} n={block}");
            if length % 2 == 1 {
                assert!((by_up[half + 1] - max).abs() < tie_tol);
            }
        }
    }
}

#[test]
fn sector_entropy_grows_with_chain_length() {
    for &(p, lengths) in &[(0.5, &[20u64, 50, 100, 150, 200][..]), (0.1, &[20, 50, 100, 150, 200][..])] {
        for block in [1u64, 2, 5, 10] {
            let values: Vec<f64> = lengths
                .iter()
                .map(|&l| {
                    let up = (p * l as f64).round() as u64;
                    sector_entropy(&sector(l, up, block)).unwrap().bits()
                })
                .collect();
            for w in values.windows(2) {
                assert!(w[1] >= w[0] - 1e-12, "p={p} n={block}: {values:?}");
            }
        }
    }
}

#[test]
fn thermodynamic_limit_of_sector_spectra() {
    let (length, block) = (100_000u64, 50u64);
    let finite = sector_spectrum(&sector(length, length / 2, block)).unwrap();
    let limit = thermodynamic_spectrum(block, 0.5).unwrap();
    let diff = finite
        .probabilities()
        .iter()
        .zip(limit.probabilities())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(diff < 1e-3, "max difference {diff}");
}

#[test]
fn asymptotic_error_shrinks_along_growing_families() {
    // half-filled, half-chain blocks of growing chains
    let errors: Vec<f64> = [20u64, 50, 100, 150, 200, 400, 1000]
        .iter()
        .map(|&l| {
            let exact = sector_entropy(&sector(l, l / 2, l / 2)).unwrap().bits();
            (exact - asymptotic_entropy_finite(l, l / 2, 0.5).unwrap().bits()).abs()
        })
        .collect();
    for w in errors.windows(2) {
        assert!(w[1] < w[0], "{errors:?}");
    }
    // infinite chain, p = 1/2
    let errors: Vec<f64> = [2u64, 5, 10, 20, 50, 100, 200, 500, 1000]
        .iter()
        .map(|&n| {
            let exact = shannon_entropy_bits(&thermodynamic_spectrum(n, 0.5).unwrap()).unwrap();
            (exact.bits() - asymptotic_entropy_infinite(n, 0.5).unwrap().bits()).abs()
        })
        .collect();
    for w in errors.windows(2) {
        assert!(w[1] < w[0], "{errors:?}");
    }
}

#[test]
fn asymptotic_length_monotonicity_and_p_symmetry() {
    for block in [3u64, 10, 40] {
        let mut previous = f64::MIN;
        for length in [50u64, 100, 1000, 100_000] {
            let v = asymptotic_entropy_finite(length, block, 0.3).unwrap().bits();
            assert!(v > previous);
            previous = v;
            let a = asymptotic_entropy_finite(length, block, 0.3).unwrap().bits();
            let b = asymptotic_entropy_finite(length, block, 0.7).unwrap().bits();
            assert!((a - b).abs() < 1e-14);
        }
    }
}

#[test]
fn uniform_mixture_equals_closed_form() {
    for length in [1u64, 2, 5, 17, 64, 200] {
        for block in 0..=length {
            let mixed = mixed_spectrum(length, block, &WeightVector::uniform(length)).unwrap();
            let closed = equal_weight_spectrum(block);
            for (a, b) in mixed.probabilities().iter().zip(closed.probabilities()) {
                assert!((a - b).abs() < 1e-12, "L={length} n={block}");
            }
        }
    }
}

#[test]
fn equal_weight_entropy_rises_to_whole_chain() {
    let length = 30u64;
    let values: Vec<f64> = (0..=length).map(|n| equal_weight_entropy(n).bits()).collect();
    assert!(values.windows(2).all(|w| w[1] > w[0]));
    // contrast: the fixed sector peaks in the middle
    let sector_values: Vec<f64> = (0..=length)
        .map(|n| sector_entropy(&sector(length, 15, n)).unwrap().bits())
        .collect();
    assert_eq!(sector_values[length as usize], 0.0);
    assert!(sector_values[15] > sector_values[14] && sector_values[15] > sector_values[16]);
}

#[test]
fn fit_examples() {
    let points: Vec<(u64, f64)> = (100..=1000)
        .step_by(100)
        .map(|n| (n, equal_weight_entropy(n).bits()))
        .collect();
    let fit = fit_log_prefactor(&points).unwrap();
    assert!((fit.gamma - 1.0).abs() < 0.01);
}

fn weights_strategy(length: u64) -> impl Strategy<Value = WeightVector> {
    proptest::collection::vec(0.0f64..1.0, length as usize + 1).prop_filter_map(
        "all-zero weights",
        |raw| {
            let sum: f64 = raw.iter().sum();
            (sum > 0.0)
                .then(|| WeightVector::normalized(raw.iter().map(|r| r / sum).collect(), 1e-9).ok())
                .flatten()
        },
    )
}

fn sector_strategy() -> impl Strategy<Value = (u64, u64, u64)> {
    (1u64..400).prop_flat_map(|l| (Just(l), 0..=l, 0..=l))
}

proptest! {
    #[test]
    fn spectrum_is_normalized((length, up, block) in sector_strategy()) {
        let s = sector_spectrum(&sector(length, up, block)).unwrap();
        prop_assert!(s.normalization_error() < 1e-12);
        prop_assert_eq!(s.len() as u64, block + 1);
        prop_assert!(s.nonzero_count() as u64 <= block.min(up) + 1);
        for l in s.log_values() {
            prop_assert!(l.prob() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn block_complement_shares_nonzero_spectrum((length, up, block) in sector_strategy()) {
        let a = sector_spectrum(&sector(length, up, block)).unwrap();
        let b = sector_spectrum(&sector(length, up, length - block)).unwrap();
        let mut x: Vec<f64> = a.probabilities().into_iter().filter(|&v| v > 0.0).collect();
        let mut y: Vec<f64> = b.probabilities().into_iter().filter(|&v| v > 0.0).collect();
        x.sort_by(f64::total_cmp);
        y.sort_by(f64::total_cmp);
        prop_assert_eq!(x.len(), y.len());
        for (u, v) in x.iter().zip(&y) {
            prop_assert!((u - v).abs() <= 1e-13 * u.max(1e-300) + 1e-300, "{} vs {}", u, v);
        }
        let sa = shannon_entropy_bits(&a).unwrap().bits();
        let sb = shannon_entropy_bits(&b).unwrap().bits();
        prop_assert!((sa - sb).abs() < 1e-12);
    }

    #[test]
    fn spin_flip_reverses_spectrum((length, up, block) in sector_strategy()) {
        let a = sector_spectrum(&sector(length, up, block)).unwrap().probabilities();
        let mut b = sector_spectrum(&sector(length, length - up, block)).unwrap().probabilities();
        b.reverse();
        for (u, v) in a.iter().zip(&b) {
            prop_assert!((u - v).abs() <= 1e-13 * u.max(*v));
        }
    }

    #[test]
    fn pmf_symmetries((length, up, block) in sector_strategy(), k in 0i64..400) {
        let base = hypergeometric_log_pmf(length, up, block, k).unwrap();
        let env = hypergeometric_log_pmf(length, up, length - block, up as i64 - k).unwrap();
        let flip = hypergeometric_log_pmf(length, length - up, block, block as i64 - k).unwrap();
        for other in [env, flip] {
            if base.is_zero() {
                prop_assert!(other.is_zero());
            } else {
                prop_assert!((base.ln() - other.ln()).abs() < 1e-11 * base.ln().abs().max(1.0));
            }
        }
    }

    #[test]
    fn mixing_is_affine(
        (length, block) in (1u64..40).prop_flat_map(|l| (Just(l), 0..=l)),
        t in 0.0f64..1.0,
        seed_a in weights_strategy(40),
        seed_b in weights_strategy(40),
    ) {
        // restrict the 41-entry strategies to length + 1 entries
        let cut = |w: &WeightVector| {
            let raw = &w.alphas()[..=length as usize];
            let sum: f64 = raw.iter().sum();
            WeightVector::normalized(raw.iter().map(|r| r / sum).collect(), 1e-9).unwrap()
        };
        let (wa, wb) = (cut(&seed_a), cut(&seed_b));
        let mix = WeightVector::normalized(
            wa.alphas().iter().zip(wb.alphas()).map(|(a, b)| t * a + (1.0 - t) * b).collect(),
            1e-9,
        ).unwrap();
        let sa = mixed_spectrum(length, block, &wa).unwrap().probabilities();
        let sb = mixed_spectrum(length, block, &wb).unwrap().probabilities();
        let sm = mixed_spectrum(length, block, &mix).unwrap();
        prop_assert!(sm.normalization_error() < 1e-12);
        prop_assert!(sm.nonzero_count() as u64 <= block + 1);
        for (k, m) in sm.probabilities().iter().enumerate() {
            prop_assert!((m - (t * sa[k] + (1.0 - t) * sb[k])).abs() < 1e-13);
            // convex-combination bound
            let sector_max = (0..=length)
                .map(|up| sector_spectrum(&sector(length, up, block)).unwrap().probabilities()[k])
                .fold(0.0, f64::max);
            prop_assert!(*m <= sector_max + 1e-13);
        }
        let s = shannon_entropy_bits(&sm).unwrap().bits();
        prop_assert!(s <= equal_weight_entropy(block).bits() + 1e-12);
    }

    #[test]
    fn finite_asymptotic_properties(length in 3u64..100_000, frac in 0.01f64..0.99, p in 0.01f64..0.99) {
        let block = ((frac * length as f64) as u64).clamp(1, length - 1);
        let a = asymptotic_entropy_finite(length, block, p).unwrap().bits();
        // p ↔ 1 - p and n ↔ L - n
        prop_assert!((a - asymptotic_entropy_finite(length, block, 1.0 - p).unwrap().bits()).abs() < 1e-12);
        prop_assert!((a - asymptotic_entropy_finite(length, length - block, p).unwrap().bits()).abs() < 1e-12);
        // increasing in L, approaching the infinite-chain form from below
        let longer = asymptotic_entropy_finite(length + 1, block, p).unwrap().bits();
        prop_assert!(longer > a);
        prop_assert!(asymptotic_entropy_infinite(block, p).unwrap().bits() > a);
    }
}
