//! Depth-first enumeration engine shared by the integral and MNSD searches.
//!
//! A root fixes the smallest entry `x_1` and the largest entry `x_m = x_1 i^2`.
//! Every other entry `J` must make `x_m / J` a perfect square, so the only
//! admissible values are `x_m / s^2` for the `s` with `s^2 | x_m`; those are
//! generated from the factorizations of `x_1` and `i`. Partial sums are kept
//! as exact integer numerators over the common denominator `x_m`: the entry
//! `x_m / s^2` with weight `w` contributes `w s^2`, and a tuple is a solution
//! exactly when the numerators add up to `x_m`.

use std::collections::BTreeMap;
use std::fmt;
use std::time::{Duration, Instant};

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::BoundTable;
use crate::error::{domain, Result};
use crate::numeric::{exact_sqrt, isqrt, verify_tuple, BigInt, Factorization, ReciprocalTuple};

/// Why a branch of the search tree was cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PruneReason {
    /// Root pair outside the position bounds.
    Bounds,
    /// Partial reciprocal sum (with the smallest possible completion) exceeds 1.
    SumExceeds,
    /// Remaining slots cannot close the gap to 1 even at their largest terms.
    Capacity,
    /// Last free position admits no value giving an exact sum of 1.
    NoCompletion,
    /// Even candidate skipped in an odd-dimension search.
    Parity,
}

impl PruneReason {
    pub const ALL: [PruneReason; 5] = [
        PruneReason::Bounds,
        PruneReason::SumExceeds,
        PruneReason::Capacity,
        PruneReason::NoCompletion,
        PruneReason::Parity,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PruneReason::Bounds => "bounds",
            PruneReason::SumExceeds => "sum_exceeds",
            PruneReason::Capacity => "capacity",
            PruneReason::NoCompletion => "no_completion",
            PruneReason::Parity => "parity",
        }
    }
}

impl fmt::Display for PruneReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome of a search run.
#[derive(Debug, Clone, Default)]
pub struct SearchReport {
    /// Solutions in canonical (lexicographic) order.
    pub solutions: Vec<ReciprocalTuple>,
    pub nodes_visited: u64,
    pub pruned_by: BTreeMap<PruneReason, u64>,
    pub wall_time: Duration,
}

#[derive(Debug, Clone, Copy, Default)]
struct Counters {
    nodes: u64,
    pruned: [u64; 5],
}

impl Counters {
    fn prune(&mut self, r: PruneReason) {
        self.pruned[r as usize] += 1;
    }

    fn merge(mut self, other: Counters) -> Counters {
        self.nodes += other.nodes;
        for (a, b) in self.pruned.iter_mut().zip(other.pruned) {
            *a += b;
        }
        self
    }
}

#[derive(Default)]
struct Acc {
    solutions: Vec<ReciprocalTuple>,
    counters: Counters,
}

impl Acc {
    fn merge(mut self, mut other: Acc) -> Acc {
        self.solutions.append(&mut other.solutions);
        self.counters = self.counters.merge(other.counters);
        self
    }
}

pub(crate) type Sink<'a> = &'a (dyn Fn(&ReciprocalTuple) + Sync);

/// Shape of one weighted search problem.
pub(crate) struct Layout<'a> {
    pub table: &'a BoundTable,
    pub weight: u32,
    pub odd_only: bool,
    pub cap: Option<BigInt>,
    pub threads: usize,
}

struct Root {
    x1: BigInt,
    x1_factors: Factorization,
}

impl Layout<'_> {
    fn len(&self) -> usize {
        self.table.len()
    }

    fn last_upper(&self) -> BigInt {
        let upper = self.table.upper(self.len()).clone();
        match &self.cap {
            Some(c) if *c < upper => c.clone(),
            _ => upper,
        }
    }

    pub fn run(&self, sink: Option<Sink<'_>>) -> Result<SearchReport> {
        let start = Instant::now();
        let acc = if self.threads == 0 {
            self.run_all(sink)?
        } else {
            rayon::ThreadPoolBuilder::new()
                .num_threads(self.threads)
                .build()
                .map_err(|e| domain(format!("cannot build worker pool: {e}")))?
                .install(|| self.run_all(sink))?
        };
        let mut solutions = acc.solutions;
        solutions.sort();
        debug_assert!(solutions.iter().all(verify_tuple));
        let pruned_by = PruneReason::ALL
            .iter()
            .map(|&r| (r, acc.counters.pruned[r as usize]))
            .filter(|(_, c)| *c > 0)
            .collect();
        Ok(SearchReport {
            solutions,
            nodes_visited: acc.counters.nodes,
            pruned_by,
            wall_time: start.elapsed(),
        })
    }

    fn run_all(&self, sink: Option<Sink<'_>>) -> Result<Acc> {
        let m = self.len();
        let last_upper = self.last_upper();
        let mut acc = Acc::default();
        if m == 1 {
            let one = BigInt::one();
            acc.counters.nodes += 1;
            if one >= *self.table.lower(1) && one <= last_upper {
                let t = ReciprocalTuple::from_sorted(vec![one], self.weight);
                if let Some(s) = sink {
                    s(&t);
                }
                acc.solutions.push(t);
            } else {
                acc.counters.prune(PruneReason::Bounds);
            }
            return Ok(acc);
        }

        // A first entry of 1 leaves nothing for the other terms.
        let mut x1 = self.table.lower(1).max(&BigInt::from(2u32)).clone();
        let x1_max = self.table.upper(1).min(&last_upper).clone();
        let mut roots = Vec::new();
        while x1 <= x1_max {
            if self.odd_only && x1.is_even() {
                acc.counters.prune(PruneReason::Parity);
            } else {
                roots.push(Root {
                    x1_factors: Factorization::of(&x1)?,
                    x1: x1.clone(),
                });
            }
            x1 += 1u32;
        }

        for root in &roots {
            let i_max = isqrt(&(&last_upper / &root.x1))?
                .to_u64()
                .ok_or_else(|| domain("root range exceeds 64 bits; supply a dimension cap"))?;
            let part = (1..=i_max)
                .into_par_iter()
                .fold(Acc::default, |mut a, i| {
                    if self.odd_only && i % 2 == 0 {
                        a.counters.prune(PruneReason::Parity);
                        return a;
                    }
                    self.run_root(root, i, &mut a, sink);
                    a
                })
                .reduce(Acc::default, Acc::merge);
            acc = acc.merge(part);
        }
        Ok(acc)
    }

    fn run_root(&self, root: &Root, i: u64, acc: &mut Acc, sink: Option<Sink<'_>>) {
        let m = self.len();
        let x1 = &root.x1;
        let i_big = BigInt::from(i);
        let i_sq = &i_big * &i_big;
        let dim = x1 * &i_sq;
        let c = &mut acc.counters;
        if dim < *self.table.lower(m) {
            c.prune(PruneReason::Bounds);
            return;
        }
        c.nodes += 1;
        let w = BigInt::from(self.weight);
        let interior = m - 2;
        let sum0 = &w * &i_sq + 1u32;

        let emit = |xs: Vec<BigInt>, acc: &mut Acc| {
            let t = ReciprocalTuple::from_sorted(xs, self.weight);
            if let Some(s) = sink {
                s(&t);
            }
            acc.solutions.push(t);
        };

        if interior == 0 {
            if sum0 == dim {
                emit(vec![x1.clone(), dim], acc);
            } else {
                c.prune(PruneReason::NoCompletion);
            }
            return;
        }
        let interior_big = BigInt::from(interior);
        if &sum0 + &w * &interior_big > dim {
            c.prune(PruneReason::SumExceeds);
            return;
        }
        if &sum0 + &w * &interior_big * &i_sq < dim {
            c.prune(PruneReason::Capacity);
            return;
        }

        // s values with s^2 | dim and s <= i, largest first (smallest entry first).
        let factors = root
            .x1_factors
            .mul(&Factorization::of(&i_big).unwrap().pow(2));
        let mut cands: Vec<(BigInt, BigInt)> = factors
            .square_divisor_roots()
            .into_iter()
            .filter(|s| *s <= i_big)
            .map(|s| {
                let s_sq = &s * &s;
                (s_sq, s)
            })
            .collect();
        cands.reverse();
        let values: Vec<BigInt> = cands.iter().map(|(s_sq, _)| &dim / s_sq).collect();

        struct Frame {
            cursor: usize,
            sum: BigInt,
        }
        let mut stack = vec![Frame {
            cursor: 0,
            sum: sum0,
        }];
        let mut chosen: Vec<usize> = Vec::with_capacity(interior);

        while !stack.is_empty() {
            let depth = stack.len() - 1;
            let frame = &mut stack[depth];
            let pos = depth + 2;
            let rem = interior - depth;
            let lower = self.table.lower(pos);
            let upper = self.table.upper(pos).min(&dim);

            if rem == 1 {
                // Exact completion: w s^2 = dim - sum.
                let need = &dim - &frame.sum;
                let (s_sq, r) = need.div_rem(&w);
                let max_s_sq = &cands[frame.cursor].0;
                let found = if r.is_zero() && !s_sq.is_zero() && s_sq <= *max_s_sq {
                    exact_sqrt(&s_sq).ok().flatten().and_then(|_| {
                        let (j, r) = dim.div_rem(&s_sq);
                        (r.is_zero() && j >= *lower && j <= *upper).then_some(j)
                    })
                } else {
                    None
                };
                let c = &mut acc.counters;
                match found {
                    Some(j) => {
                        c.nodes += 1;
                        let mut xs = Vec::with_capacity(m);
                        xs.push(x1.clone());
                        xs.extend(chosen.iter().map(|&k| values[k].clone()));
                        xs.push(j);
                        xs.push(dim.clone());
                        emit(xs, acc);
                    }
                    None => c.prune(PruneReason::NoCompletion),
                }
                stack.pop();
                chosen.pop();
                continue;
            }

            let rem_big = BigInt::from(rem);
            let mut next = None;
            while frame.cursor < cands.len() {
                let k = frame.cursor;
                frame.cursor += 1;
                let value = &values[k];
                if value < lower {
                    continue;
                }
                if value > upper {
                    frame.cursor = cands.len();
                    break;
                }
                let contrib = &w * &cands[k].0;
                if &frame.sum + &contrib + &w * (&rem_big - 1u32) > dim {
                    acc.counters.prune(PruneReason::SumExceeds);
                    continue;
                }
                if &frame.sum + &contrib * &rem_big < dim {
                    // Later candidates contribute even less.
                    acc.counters.prune(PruneReason::Capacity);
                    frame.cursor = cands.len();
                    break;
                }
                next = Some((k, &frame.sum + contrib));
                break;
            }
            match next {
                Some((k, sum)) => {
                    acc.counters.nodes += 1;
                    chosen.push(k);
                    stack.push(Frame { cursor: k, sum });
                }
                None => {
                    stack.pop();
                    chosen.pop();
                }
            }
        }
    }
}
