use std::collections::BTreeSet;

use modcat_core::efsearch::{
    count_solutions, enumerate_egyptian_oracle, enumerate_integral, SearchConfig,
};
use modcat_core::mnsd::{enumerate_mnsd, MnsdConfig};
use modcat_core::numeric::{verify_tuple, BigInt};
use num_integer::Integer;
use num_traits::ToPrimitive;

/// Weakly increasing n-tuples with sum 1/x_i = p/q, over u128.
fn brute(
    n: u32,
    p: u128,
    q: u128,
    min: u128,
    cap: u128,
    prefix: &mut Vec<u128>,
    out: &mut Vec<Vec<u128>>,
) {
    if n == 1 {
        if p == 1 && q >= min && q <= cap {
            prefix.push(q);
            out.push(prefix.clone());
            prefix.pop();
        }
        return;
    }
    let lo = (q / p + 1).max(min);
    let hi = (n as u128 * q / p).min(cap);
    for x in lo..=hi {
        // p/q - 1/x
        let (np, nq) = (p * x - q, q * x);
        let g = np.gcd(&nq);
        prefix.push(x);
        brute(n - 1, np / g, nq / g, x, cap, prefix, out);
        prefix.pop();
    }
}

fn is_square(v: u128) -> bool {
    let r = (v as f64).sqrt() as u128;
    (r.saturating_sub(2)..=r + 2).any(|s| s * s == v)
}

fn square_filtered(n: u32, cap: u128) -> BTreeSet<Vec<u128>> {
    let mut all = Vec::new();
    brute(n, 1, 1, 1, cap, &mut Vec::new(), &mut all);
    all.into_iter()
        .filter(|xs| {
            let last = *xs.last().unwrap();
            xs.iter().all(|&x| last % x == 0 && is_square(last / x))
        })
        .collect()
}

fn sylvester(n: u32) -> u128 {
    (1..n).fold(1u128, |u, _| u * (u + 1))
}

fn as_u128(xs: &[BigInt]) -> Vec<u128> {
    xs.iter().map(|x| x.to_u128().unwrap()).collect()
}

#[test]
fn oracle_counts_match_independent_brute_force() {
    for n in 1..=6u32 {
        let mut all = Vec::new();
        brute(n, 1, 1, 1, sylvester(n), &mut Vec::new(), &mut all);
        assert_eq!(count_solutions(n).unwrap(), all.len(), "n = {n}");
        let lib: BTreeSet<Vec<u128>> = enumerate_egyptian_oracle(n, &BigInt::from(sylvester(n)))
            .iter()
            .map(|x| as_u128(x))
            .collect();
        assert_eq!(lib, all.into_iter().collect::<BTreeSet<_>>());
    }
}

#[test]
fn integral_search_equals_square_filtered_brute_force() {
    for n in 1..=6u32 {
        let report = enumerate_integral(&SearchConfig::new(n)).unwrap();
        let got: BTreeSet<Vec<u128>> = report
            .solutions
            .iter()
            .map(|t| as_u128(t.entries()))
            .collect();
        assert_eq!(got.len(), report.solutions.len(), "duplicates at n = {n}");
        assert_eq!(got, square_filtered(n, sylvester(n)), "n = {n}");
        assert!(report.solutions.iter().all(verify_tuple));
    }
}

#[test]
fn capped_rank_seven_matches_brute_force() {
    // Brute force over all 7-term decompositions is too large; cap both sides.
    let cap = 2000u128;
    let report = enumerate_integral(&SearchConfig::new(7).with_dim_cap(BigInt::from(cap))).unwrap();
    let got: BTreeSet<Vec<u128>> = report
        .solutions
        .iter()
        .map(|t| as_u128(t.entries()))
        .collect();
    assert_eq!(got, square_filtered(7, cap));
}

/// Odd square-filtered solutions whose entries, after removing one copy of
/// the largest, all occur an even number of times; keyed as the half
/// multiset followed by the largest entry.
fn paired_odd(n: u32, cap: u128) -> BTreeSet<Vec<u128>> {
    let mut out = BTreeSet::new();
    for xs in square_filtered(n, cap) {
        if xs.iter().any(|x| x % 2 == 0) {
            continue;
        }
        let (last, rest) = xs.split_last().unwrap();
        let mut counts = std::collections::BTreeMap::new();
        for &x in rest {
            *counts.entry(x).or_insert(0usize) += 1;
        }
        if counts.values().all(|c| c % 2 == 0) {
            let mut key: Vec<u128> = counts
                .iter()
                .flat_map(|(&x, &c)| std::iter::repeat_n(x, c / 2))
                .collect();
            key.push(*last);
            out.insert(key);
        }
    }
    out
}

#[test]
fn mnsd_matches_paired_integral_solutions() {
    for (n, cap) in [
        (1u32, 1u128),
        (3, sylvester(3)),
        (5, sylvester(5)),
        (7, 3000),
    ] {
        let mut cfg = MnsdConfig::new(n);
        if n == 7 {
            cfg = cfg.with_dim_cap(BigInt::from(cap));
        }
        let got: BTreeSet<Vec<u128>> = enumerate_mnsd(&cfg)
            .unwrap()
            .solutions
            .iter()
            .map(|t| as_u128(t.entries()))
            .collect();
        assert_eq!(got, paired_odd(n, cap), "rank {n}");
    }
}
