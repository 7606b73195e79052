//! Integral search: every weakly increasing `x_1 <= ... <= x_n` with
//! `sum 1/x_i = 1` and every `x_n / x_i` a perfect square, plus an
//! unconstrained Egyptian-fraction enumerator used as an independent oracle.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::bounds::BoundTable;
use crate::error::{domain, Result};
use crate::numeric::{BigInt, ExactFraction, ReciprocalTuple};
use crate::search::{Layout, SearchReport};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    pub rank: u32,
    /// Upper bound on the largest entry, overriding `u_n` when smaller.
    pub dim_cap: Option<BigInt>,
    /// Stream solutions to the sink as soon as they are found.
    pub emit_partial: bool,
    /// Worker count; 0 picks the pool default.
    pub parallel_degree: usize,
}

impl SearchConfig {
    pub fn new(rank: u32) -> Self {
        SearchConfig {
            rank,
            dim_cap: None,
            emit_partial: false,
            parallel_degree: 0,
        }
    }

    pub fn with_dim_cap(mut self, cap: impl Into<BigInt>) -> Self {
        self.dim_cap = Some(cap.into());
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.parallel_degree = threads;
        self
    }
}

pub fn enumerate_integral(cfg: &SearchConfig) -> Result<SearchReport> {
    enumerate_integral_streaming(cfg, |_| {})
}

/// Like [`enumerate_integral`], additionally handing each solution to `sink`
/// as it is found when `cfg.emit_partial` is set. Streamed order depends on
/// scheduling; the returned report is always canonical.
pub fn enumerate_integral_streaming(
    cfg: &SearchConfig,
    sink: impl Fn(&ReciprocalTuple) + Sync,
) -> Result<SearchReport> {
    if cfg.rank == 0 {
        return Err(domain("rank must be at least 1"));
    }
    if let Some(cap) = &cfg.dim_cap {
        if *cap < BigInt::from(cfg.rank) {
            return Ok(SearchReport::default());
        }
    }
    let table = BoundTable::cached(cfg.rank, 1)?;
    let layout = Layout {
        table: &table,
        weight: 1,
        odd_only: false,
        cap: cfg.dim_cap.clone(),
        threads: cfg.parallel_degree,
    };
    layout.run(cfg.emit_partial.then_some(&sink as _))
}

/// All weakly increasing `n`-tuples of positive integers with
/// `sum 1/x_i = 1` and `x_n <= max_denominator`, by plain recursive descent.
///
/// No square-ratio condition and no position bounds are used; the only
/// pruning is that each term must leave a positive remainder that the
/// remaining slots can still reach.
pub fn enumerate_egyptian_oracle(n: u32, max_denominator: &BigInt) -> Vec<Vec<BigInt>> {
    fn descend(
        rest: &ExactFraction,
        slots: u32,
        min: &BigInt,
        cap: &BigInt,
        prefix: &mut Vec<BigInt>,
        out: &mut Vec<Vec<BigInt>>,
    ) {
        if slots == 1 {
            if rest.numer().is_one() {
                let x = rest.denom();
                if x >= min && x <= cap {
                    let mut sol = prefix.clone();
                    sol.push(x.clone());
                    out.push(sol);
                }
            }
            return;
        }
        // 1/x < rest, and slots/x >= rest.
        let lo = (rest.denom() / rest.numer() + 1u32).max(min.clone());
        let hi = (rest.denom() * BigInt::from(slots)).div_floor(rest.numer());
        let hi = hi.min(cap.clone());
        let mut x = lo;
        while x <= hi {
            let next = rest - ExactFraction::new(BigInt::one(), x.clone());
            debug_assert!(next.is_positive());
            prefix.push(x.clone());
            descend(&next, slots - 1, &x, cap, prefix, out);
            prefix.pop();
            x += 1u32;
        }
    }

    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    descend(
        &ExactFraction::one(),
        n,
        &BigInt::one(),
        max_denominator,
        &mut Vec::with_capacity(n as usize),
        &mut out,
    );
    out
}

/// Number of `n`-term Egyptian fraction representations of 1.
pub fn count_solutions(n: u32) -> Result<usize> {
    if n == 0 {
        return Err(domain("n must be at least 1"));
    }
    let cap = crate::bounds::sylvester_bound(n)?;
    Ok(enumerate_egyptian_oracle(n, &cap).len())
}

/// Splits the largest term with `1/x = 1/(x+1) + 1/(x(x+1))`.
pub fn split_largest(xs: &[BigInt]) -> Vec<BigInt> {
    let mut out = xs.to_vec();
    if let Some(x) = out.pop() {
        out.push(&x + 1u32);
        out.push(&x * (&x + 1u32));
    }
    out.sort();
    out
}

pub fn egyptian_sum(xs: &[BigInt]) -> ExactFraction {
    xs.iter()
        .filter(|x| !x.is_zero())
        .fold(ExactFraction::zero(), |acc, x| {
            acc + ExactFraction::new(BigInt::one(), x.clone())
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{big, verify_tuple};

    fn xs(report: &SearchReport) -> Vec<Vec<u64>> {
        report
            .solutions
            .iter()
            .map(|t| {
                t.entries()
                    .iter()
                    .map(|x| u64::try_from(x).unwrap())
                    .collect()
            })
            .collect()
    }

    #[test]
    fn rank_one_and_two() {
        assert_eq!(
            xs(&enumerate_integral(&SearchConfig::new(1)).unwrap()),
            vec![vec![1]]
        );
        assert_eq!(
            xs(&enumerate_integral(&SearchConfig::new(2)).unwrap()),
            vec![vec![2, 2]]
        );
    }

    #[test]
    fn rank_five() {
        let r = enumerate_integral(&SearchConfig::new(5)).unwrap();
        assert_eq!(xs(&r), vec![vec![2, 8, 8, 8, 8], vec![5, 5, 5, 5, 5]]);
        assert!(r.nodes_visited > 0);
    }

    #[test]
    fn rank_zero_is_rejected() {
        assert!(matches!(
            enumerate_integral(&SearchConfig::new(0)),
            Err(crate::Error::Domain(_))
        ));
    }

    #[test]
    fn cap_below_rank_is_empty() {
        let r = enumerate_integral(&SearchConfig::new(5).with_dim_cap(4)).unwrap();
        assert!(r.solutions.is_empty());
    }

    #[test]
    fn cap_truncates() {
        let r = enumerate_integral(&SearchConfig::new(6).with_dim_cap(12)).unwrap();
        assert_eq!(
            xs(&r),
            vec![vec![3, 3, 12, 12, 12, 12], vec![6, 6, 6, 6, 6, 6]]
        );
    }

    #[test]
    fn streaming_sink_sees_every_solution() {
        let seen = std::sync::Mutex::new(Vec::new());
        let mut cfg = SearchConfig::new(6);
        cfg.emit_partial = true;
        let r =
            enumerate_integral_streaming(&cfg, |t| seen.lock().unwrap().push(t.clone())).unwrap();
        let mut seen = seen.into_inner().unwrap();
        seen.sort();
        assert_eq!(seen, r.solutions);
    }

    #[test]
    fn oracle_small_cases() {
        assert_eq!(enumerate_egyptian_oracle(1, &big(1)), vec![vec![big(1)]]);
        let three = enumerate_egyptian_oracle(3, &big(6));
        let expect: Vec<Vec<BigInt>> = [[2, 3, 6], [2, 4, 4], [3, 3, 3]]
            .iter()
            .map(|r| r.iter().map(|&x| big(x)).collect())
            .collect();
        assert_eq!(three, expect);
        assert_eq!(enumerate_egyptian_oracle(4, &big(42)).len(), 14);
    }

    #[test]
    fn counts() {
        assert_eq!(count_solutions(2).unwrap(), 1);
        assert_eq!(count_solutions(5).unwrap(), 147);
    }

    #[test]
    fn splitting_identity() {
        let r = enumerate_integral(&SearchConfig::new(5)).unwrap();
        for t in &r.solutions {
            assert!(verify_tuple(t));
            let split = split_largest(t.entries());
            assert_eq!(split.len(), 6);
            assert!(egyptian_sum(&split).is_one());
        }
    }
}
