mod common;

use common::*;
use sbox_ga::properties::{algebraic_degree, algebraic_immunity, difference_table, differential_uniformity};
use sbox_ga::spectral::{evaluate, nonlinearity, whs_cost};
use sbox_ga::{Cost, CostParams, RngSeed, SBox};
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn random_box(n: u32, seed: u64) -> SBox {
    SBox::random(n, &mut RngSeed(seed).stream(&[u64::from(n)])).unwrap()
}

#[test]
fn aes_matches_brute_force() {
    let aes = SBox::aes();
    assert_eq!(delta_pairs(&aes), 4);
    assert_eq!(degree_subsets(&aes), 7);
    assert_eq!(ai_rank_scan(&aes), 2);
    assert_eq!(nl_affine_distance(&aes), 112);

    assert_eq!(differential_uniformity(&aes), 4);
    assert_eq!(algebraic_degree(&aes), 7);
    assert_eq!(algebraic_immunity(&aes), 2);
    assert_eq!(nonlinearity(&aes), 112);
}

#[test]
fn aes_cost_matches_double_sum() {
    let aes = SBox::aes();
    let expected = whs_naive(&aes, 0, 12);
    assert_eq!(whs_cost(&aes, &CostParams::default()).unwrap(), Cost::Exact(expected));
    assert_eq!(evaluate(&aes, &CostParams::default()).unwrap().cost, Cost::Exact(expected));
}

#[test]
fn nonlinearity_small_widths() {
    for seed in 0..200 {
        let s = random_box(4, seed);
        assert_eq!(nonlinearity(&s), nl_affine_distance(&s), "n=4 seed {seed}");
    }
    for seed in 0..50 {
        let s = random_box(5, seed);
        assert_eq!(nonlinearity(&s), nl_affine_distance(&s), "n=5 seed {seed}");
    }
}

#[test]
fn optimal_four_bit_nonlinearity_exists() {
    let found = (0..2000).map(|seed| random_box(4, seed)).any(|s| nl_affine_distance(&s) == 4);
    assert!(found);
    assert!((0..2000).all(|seed| nl_affine_distance(&random_box(4, seed)) <= 4));
}

#[test]
fn cost_matches_double_sum_small_widths() {
    for n in 3..=5 {
        for seed in 0..20 {
            let s = random_box(n, seed);
            for (offset, exponent) in [(0, 12), (0, 4), (3, 5), (-2, 7)] {
                let p = CostParams::new(offset as f64, exponent).unwrap();
                let want = Cost::Exact(whs_naive(&s, offset, exponent));
                assert_eq!(whs_cost(&s, &p).unwrap(), want);
                assert_eq!(evaluate(&s, &p).unwrap().cost, want);
            }
        }
    }
}

#[test]
fn ddt_matches_pair_enumeration() {
    for n in 3..=6 {
        for seed in 0..10 {
            let s = random_box(n, seed);
            let t = difference_table(&s);
            let want = ddt_pairs(&s);
            for (a, row) in want.iter().enumerate() {
                assert_eq!(t.row(a), row.as_slice());
            }
        }
    }
}

#[test]
fn degree_matches_subset_sums() {
    for n in 3..=5 {
        for seed in 0..10 {
            let s = random_box(n, seed);
            assert_eq!(algebraic_degree(&s), degree_subsets(&s));
        }
    }
}

#[test]
fn ai_matches_rank_scan() {
    for n in 3..=5 {
        for seed in 0..10 {
            let s = random_box(n, seed);
            assert_eq!(algebraic_immunity(&s), ai_rank_scan(&s), "n={n} seed={seed}");
        }
    }
    let s = random_box(8, 1);
    assert_eq!(algebraic_immunity(&s), ai_rank_scan(&s));
}

#[test]
fn first_entry_of_random_boxes_is_uniform() {
    let samples = 1000;
    let mut counts = [0u32; 256];
    for seed in 0..samples {
        counts[usize::from(random_box(8, seed).apply(0))] += 1;
    }
    let expected = samples as f64 / 256.0;
    let chi2: f64 = counts
        .iter()
        .map(|&c| (f64::from(c) - expected).powi(2) / expected)
        .sum();
    let critical = ChiSquared::new(255.0).unwrap().inverse_cdf(0.999);
    assert!(chi2 < critical, "chi2 {chi2} >= {critical}");
}
