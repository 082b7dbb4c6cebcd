mod common;

use proptest::prelude::*;
use rand::Rng;
use sbox_ga::evolution::pmx_crossover;
use sbox_ga::properties::{
    anf, annihilator_nullity, difference_table, differential_uniformity, full_report,
};
use sbox_ga::spectral::{evaluate, nonlinearity, walsh_transform, whs_cost};
use sbox_ga::{CostParams, RngSeed, SBox, TruthTable, WalshSpectrum};

fn sbox_strategy(n: std::ops::RangeInclusive<u32>) -> impl Strategy<Value = SBox> {
    (n, any::<u64>()).prop_map(|(n, seed)| SBox::random(n, &mut RngSeed(seed).stream(&[])).unwrap())
}

fn is_permutation(s: &SBox) -> bool {
    let mut t = s.table().to_vec();
    t.sort_unstable();
    t.iter().enumerate().all(|(i, &v)| usize::from(v) == i)
}

proptest! {
    #[test]
    fn swap_is_an_involution(s in sbox_strategy(3..=8), i in any::<usize>(), j in any::<usize>()) {
        let (i, j) = (i % s.len(), j % s.len());
        prop_assume!(i != j);
        let t = s.swapped(i, j).unwrap();
        prop_assert!(is_permutation(&t));
        prop_assert_eq!(t.apply(i), s.apply(j));
        prop_assert_eq!(t.swapped(i, j).unwrap(), s);
    }

    #[test]
    fn components_are_balanced(s in sbox_strategy(3..=8), b in 1u32..256) {
        let b = b % (s.len() as u32);
        prop_assume!(b != 0);
        prop_assert_eq!(s.component(b).unwrap().weight(), s.len() / 2);
    }

    #[test]
    fn parseval_and_nl_bounds(s in sbox_strategy(3..=8)) {
        let n = s.bits();
        let spec = WalshSpectrum::of(&s);
        for row in spec.rows() {
            prop_assert_eq!(row.iter().map(|&w| i64::from(w).pow(2)).sum::<i64>(), 1i64 << (2 * n));
            prop_assert!(row.iter().all(|w| w % 2 == 0));
        }
        let nl = nonlinearity(&s);
        if n % 2 == 0 {
            prop_assert!(nl <= (1 << (n - 1)) - (1 << (n / 2 - 1)));
        }
        prop_assert_eq!(nl, (1 << (n - 1)) - spec.max_abs() / 2);
    }

    #[test]
    fn evaluate_agrees_with_standalone(s in sbox_strategy(3..=8)) {
        let p = CostParams::default();
        let r = evaluate(&s, &p).unwrap();
        prop_assert_eq!(r.nl, nonlinearity(&s));
        prop_assert_eq!(r.cost, whs_cost(&s, &p).unwrap());
    }

    #[test]
    fn input_bit_permutation_keeps_nonlinearity(s in sbox_strategy(3..=6), seed in any::<u64>()) {
        let n = s.bits() as usize;
        let mut perm: Vec<usize> = (0..n).collect();
        rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), &mut RngSeed(seed).stream(&[]));
        let permuted: Vec<u8> = (0..s.len())
            .map(|x| {
                let y = (0..n).fold(0, |acc, k| acc | ((x >> k) & 1) << perm[k]);
                s.apply(y)
            })
            .collect();
        let t = SBox::from_table(s.bits(), &permuted).unwrap();
        prop_assert_eq!(nonlinearity(&t), nonlinearity(&s));
    }

    #[test]
    fn ddt_rows_and_streaming_delta(s in sbox_strategy(3..=8)) {
        let t = difference_table(&s);
        let size = s.len() as u32;
        prop_assert_eq!(t.get(0, 0), size);
        for a in 0..s.len() {
            prop_assert_eq!(t.row(a).iter().sum::<u32>(), size);
            prop_assert!(t.row(a).iter().all(|c| c % 2 == 0));
        }
        prop_assert_eq!(t.max_nontrivial(), differential_uniformity(&s));
    }

    #[test]
    fn moebius_matches_subset_sums(n in 1u32..=10, seed in any::<u64>()) {
        let mut rng = RngSeed(seed).stream(&[]);
        let bits: Vec<bool> = (0..1usize << n).map(|_| rng.gen()).collect();
        let tt = TruthTable::new(n, bits.clone()).unwrap();
        prop_assert_eq!(anf(&tt), common::anf_subsets(&bits));
    }

    #[test]
    fn pmx_children_are_permutations(a in sbox_strategy(8..=8), b in sbox_strategy(8..=8), lo in 0usize..=256, hi in 0usize..=256) {
        let (lo, hi) = (lo.min(hi), lo.max(hi));
        let (c1, c2) = pmx_crossover(&a, &b, lo, hi).unwrap();
        prop_assert!(is_permutation(&c1) && is_permutation(&c2));
        prop_assert_eq!(&c1.table()[lo..hi], &b.table()[lo..hi]);
        prop_assert_eq!(&c2.table()[lo..hi], &a.table()[lo..hi]);
    }

    #[test]
    fn text_format_round_trips(s in sbox_strategy(3..=8)) {
        prop_assert_eq!(SBox::from_text(&s.to_text()).unwrap(), s);
    }
}

#[test]
fn walsh_of_random_components_obeys_parseval() {
    for seed in 0..1000u64 {
        let s = SBox::random(8, &mut RngSeed(seed).stream(&[])).unwrap();
        let b = 1 + (seed % 255) as u32;
        let w = walsh_transform(&s.component(b).unwrap());
        assert_eq!(w.iter().map(|&c| i64::from(c).pow(2)).sum::<i64>(), 1 << 16);
    }
}

#[test]
fn moebius_degree_on_random_byte_components() {
    let s = SBox::random(8, &mut RngSeed(4).stream(&[])).unwrap();
    let mut rng = RngSeed(5).stream(&[]);
    for _ in 0..20 {
        let v = rng.gen_range(1..256u32);
        let tt = s.component(v).unwrap();
        assert_eq!(anf(&tt), common::anf_subsets(tt.bits()));
    }
}

#[test]
fn annihilator_space_grows_with_degree() {
    for seed in 0..5 {
        for n in [4u32, 5, 8] {
            let s = SBox::random(n, &mut RngSeed(seed).stream(&[u64::from(n)])).unwrap();
            let nullities: Vec<usize> = (1..=3).map(|d| annihilator_nullity(&s, d)).collect();
            assert!(nullities.windows(2).all(|w| w[0] <= w[1]), "{nullities:?}");
        }
    }
}

#[test]
fn byte_box_reports_respect_bounds() {
    for seed in 0..20 {
        let s = SBox::random(8, &mut RngSeed(seed).stream(&[])).unwrap();
        let r = full_report(&s);
        assert!(r.ai <= 3 && r.ai >= 1);
        assert!((1..=7).contains(&r.degree));
        assert!(r.delta >= 2 && r.delta % 2 == 0);
        assert!(r.balanced);
    }
}
