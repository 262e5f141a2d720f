use std::collections::BTreeSet;

use fsparse_core::lattice::{
    card_bound, count_exact, enumerate_ball, enumerate_ball_sq, representation_numbers,
};
use fsparse_core::MultiIndex;
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use proptest::prelude::*;

/// Histogram of `|k|^2` over all of `Z^dim` with `|k|^2 <= r_max`, by nested loops.
fn brute_histogram(dim: usize, r_max: usize) -> Vec<u64> {
    let side = (r_max as f64).sqrt().floor() as i64;
    let mut hist = vec![0u64; r_max + 1];
    let mut k = vec![-side; dim];
    loop {
        let norm: i64 = k.iter().map(|v| v * v).sum();
        if norm as usize <= r_max {
            hist[norm as usize] += 1;
        }
        let mut pos = 0;
        loop {
            if pos == dim {
                return hist;
            }
            if k[pos] < side {
                k[pos] += 1;
                break;
            }
            k[pos] = -side;
            pos += 1;
        }
    }
}

fn brute_ball(d: usize, r_max: usize) -> BTreeSet<Vec<i64>> {
    let side = (r_max as f64).sqrt().floor() as i64;
    let mut out = BTreeSet::new();
    let mut k = vec![-side; d];
    loop {
        let norm: i64 = k.iter().map(|v| v * v).sum();
        if norm as usize <= r_max {
            out.insert(k.clone());
        }
        let mut pos = 0;
        loop {
            if pos == d {
                return out;
            }
            if k[pos] < side {
                k[pos] += 1;
                break;
            }
            k[pos] = -side;
            pos += 1;
        }
    }
}

#[test]
fn counts_match_nested_loops_up_to_six_dims() {
    for d_star in 1..=6 {
        let full = brute_histogram(d_star, 25);
        let slice = if d_star == 1 {
            let mut h = vec![0u64; 26];
            h[0] = 1;
            h
        } else {
            brute_histogram(d_star - 1, 25)
        };
        for r in 0..=25 {
            let c = count_exact(d_star, r).unwrap();
            let n1: u64 = full[..=r].iter().sum();
            let n2: u64 = slice[..=r].iter().sum();
            assert_eq!(c.n1, BigUint::from(n1), "d*={d_star} r={r}");
            assert_eq!(c.n2, BigUint::from(n2), "d*={d_star} r={r}");
            assert_eq!(c.n_diff, BigUint::from(n1 - n2));
        }
    }
}

#[test]
fn representation_number_examples() {
    let r = representation_numbers::<BigUint>(1, 4).unwrap();
    assert_eq!(r.coeffs, [1u32, 2, 0, 0, 2].map(BigUint::from));
    let r = representation_numbers::<BigUint>(2, 2).unwrap();
    assert_eq!(r.coeffs, [1u32, 4, 4].map(BigUint::from));
    let r = representation_numbers::<BigUint>(3, 0).unwrap();
    assert_eq!(r.coeffs, [BigUint::from(1u32)]);
    assert!(representation_numbers::<BigUint>(0, 3).is_err());
}

#[test]
fn count_examples() {
    for (ds, r, n1, n2) in [(1, 1, 3u32, 1u32), (2, 2, 9, 3), (5, 0, 1, 1)] {
        let c = count_exact(ds, r).unwrap();
        assert_eq!((c.n1.clone(), c.n2.clone()), (n1.into(), n2.into()));
        assert_eq!(c.n_diff, BigUint::from(n1 - n2));
    }
    assert_eq!(count_exact(5, 0).unwrap().log_n_diff, f64::NEG_INFINITY);
}

#[test]
fn hypercube_inclusion() {
    for d_star in 1..=60 {
        let c = count_exact(d_star, d_star).unwrap();
        assert!(
            c.n1 >= BigUint::from(3u32).pow(d_star as u32),
            "d*={d_star}"
        );
    }
}

#[test]
fn log_fields_are_accurate() {
    for (ds, r) in [(3, 7), (40, 40), (200, 200)] {
        let c = count_exact(ds, r).unwrap();
        for (big, log) in [
            (&c.n1, c.log_n1),
            (&c.n2, c.log_n2),
            (&c.n_diff, c.log_n_diff),
        ] {
            // exact reference: ln of the top 53 bits plus the shift
            let bits = big.bits();
            let shift = bits.saturating_sub(60);
            let top = (big >> shift).to_f64().unwrap();
            let reference = top.ln() + shift as f64 * std::f64::consts::LN_2;
            assert!((log - reference).abs() <= 1e-12 * reference.abs().max(1.0));
        }
    }
}

#[test]
fn enumeration_examples() {
    let dense = |it: Vec<MultiIndex>| it.iter().map(MultiIndex::to_dense).collect::<Vec<_>>();
    let got = dense(enumerate_ball(2, 1.0, 2).unwrap().collect());
    assert_eq!(got, vec![vec![1, 0], vec![0, 1]]);
    let got = dense(enumerate_ball(2, 1.5, 1).unwrap().collect());
    assert_eq!(got, vec![vec![1, 0], vec![0, 1]]);
    assert_eq!(enumerate_ball(3, 0.5, 3).unwrap().count(), 0);
    assert!(enumerate_ball(3, 1.0, 4).is_err());
    assert!(enumerate_ball(3, 0.0, 1).is_err());
    assert!(enumerate_ball(3, -1.0, 1).is_err());
}

#[test]
fn card_bound_dominates_enumeration() {
    assert!((card_bound(1.0, 10, 2) - 2.0 * 60f64.ln()).abs() < 1e-12);
    assert!((card_bound(2.0, 5, 1) - 60f64.ln()).abs() < 1e-12);
    let card = enumerate_ball(10, 1.0, 2).unwrap().count();
    assert!((2 * card + 1) as f64 <= card_bound(1.0, 10, 2).exp());
    for (d, m, ds) in [(6, 2.0, 2), (5, 3.0, 3), (8, 1.5, 2)] {
        let card = enumerate_ball(d, m, ds).unwrap().count();
        assert!((2 * card + 1) as f64 <= card_bound(m, d, ds).exp());
    }
}

#[test]
fn levels_are_grouped_and_lexicographic() {
    let all: Vec<MultiIndex> = enumerate_ball_sq(4, 6, 3).unwrap().collect();
    let levels: Vec<usize> = all.iter().map(MultiIndex::l0).collect();
    assert!(levels.windows(2).all(|w| w[0] <= w[1]));
    for w in all.windows(2) {
        if w[0].l0() == w[1].l0() {
            assert!((w[0].support(), w[0].values()) < (w[1].support(), w[1].values()));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn enumeration_pairs_with_negation(d in 1usize..=4, r in 0usize..=9) {
        let canon: Vec<Vec<i64>> = enumerate_ball_sq(d, r as u64, d)
            .unwrap()
            .map(|k| k.to_dense())
            .collect();
        let unique: BTreeSet<_> = canon.iter().cloned().collect();
        prop_assert_eq!(unique.len(), canon.len());
        let mut both = BTreeSet::new();
        for k in &canon {
            both.insert(k.clone());
            both.insert(k.iter().map(|v| -v).collect());
        }
        both.insert(vec![0; d]);
        prop_assert_eq!(2 * canon.len() + 1, both.len());
        prop_assert_eq!(both, brute_ball(d, r));
    }

    #[test]
    fn convolution_adds_dimensions(p in 1usize..=5, q in 1usize..=5, r in 0usize..=30) {
        let a = representation_numbers::<BigUint>(p, r).unwrap();
        let b = representation_numbers::<BigUint>(q, r).unwrap();
        let c = representation_numbers::<BigUint>(p + q, r).unwrap();
        prop_assert_eq!(a.convolve(&b).coeffs, c.coeffs.clone());
        prop_assert_eq!(b.convolve(&a).coeffs, c.coeffs);
    }

    #[test]
    fn counts_are_monotone(d_star in 1usize..=12, r in 0usize..=40) {
        let here = count_exact(d_star, r).unwrap();
        let wider = count_exact(d_star, r + 1).unwrap();
        prop_assert!(here.n1 <= wider.n1 && here.n2 <= wider.n2);
        prop_assert!(here.n2 <= here.n1);
        // fixed radius ratio gamma = 1
        let a = count_exact(d_star, d_star).unwrap();
        let b = count_exact(d_star + 1, d_star + 1).unwrap();
        prop_assert!(a.n1 <= b.n1 && a.n2 <= b.n2);
    }

    #[test]
    fn fixed_width_counters_agree(dim in 1usize..=8, r in 0usize..=30) {
        let big = representation_numbers::<BigUint>(dim, r).unwrap();
        let small = representation_numbers::<u64>(dim, r).unwrap();
        let wide = representation_numbers::<u128>(dim, r).unwrap();
        for ((b, s), w) in big.coeffs.iter().zip(&small.coeffs).zip(&wide.coeffs) {
            prop_assert_eq!(b, &BigUint::from(*s));
            prop_assert_eq!(b, &BigUint::from(*w));
        }
    }
}
