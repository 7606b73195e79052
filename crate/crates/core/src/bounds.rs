//! Sylvester-type bound sequences and per-position search bounds.
//!
//! `u_1 = 1, u_k = u_{k-1}(u_{k-1} + 1)` bounds the largest denominator of an
//! `n`-term Egyptian fraction representation of 1. The generalized sequence
//! `A_1 = ell, A_i = A_{i-1}(A_{i-1} + 1)` bounds the largest denominator when
//! the target is `1/ell`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::One;

use crate::error::{domain, Result};
use crate::numeric::BigInt;

fn sequence(seed: BigInt, len: usize) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(len);
    let mut cur = seed;
    for _ in 0..len {
        let next = &cur * (&cur + 1u32);
        out.push(std::mem::replace(&mut cur, next));
    }
    out
}

/// `u_k` for `k >= 1`.
pub fn sylvester_bound(k: u32) -> Result<BigInt> {
    if k == 0 {
        return Err(domain("sylvester_bound is defined for k >= 1"));
    }
    Ok(sequence(BigInt::one(), k as usize).pop().unwrap())
}

/// `A_i(ell)` for `ell >= 1`, `i >= 1`.
pub fn takenouchi_bound(ell: u32, i: u32) -> Result<BigInt> {
    if ell == 0 || i == 0 {
        return Err(domain("takenouchi_bound needs ell >= 1 and i >= 1"));
    }
    Ok(sequence(BigInt::from(ell), i as usize).pop().unwrap())
}

/// Bounds `(k, u_k (n - k + 1))` on the `k`-th smallest denominator of a
/// rank-`n` integral solution.
pub fn integral_bounds(n: u32, k: u32) -> Result<(BigInt, BigInt)> {
    if k == 0 || k > n {
        return Err(domain(format!("position {k} outside 1..={n}")));
    }
    let u = sylvester_bound(k)?;
    Ok((BigInt::from(k), u * (n - k + 1)))
}

/// Bounds for the weighted problem `sum_{i<=m} ell/x_i + 1/x_{m+1} = 1` of
/// rank `n = m ell + 1`.
///
/// Positions `i <= m` get `(ell i, (n + ell - i ell) A_i / ell)`. The last
/// position gets `(m + 1, ell A_{m+1})`: the largest denominator of
/// `sum 1/x'_i = 1/ell` with `x'_{m+1} = x_{m+1}/ell` is at most `A_{m+1}`.
pub fn mnsd_bounds(n: u32, ell: u32, i: u32) -> Result<(BigInt, BigInt)> {
    let m = groups(n, ell)?;
    if i == 0 || i > m + 1 {
        return Err(domain(format!("position {i} outside 1..={}", m + 1)));
    }
    let a = takenouchi_bound(ell, i)?;
    if i <= m {
        let scale = n + ell - i * ell;
        Ok((BigInt::from(ell * i), a / ell * scale))
    } else {
        Ok((BigInt::from(m + 1), a * ell))
    }
}

/// `m` with `n = m ell + 1`.
fn groups(n: u32, ell: u32) -> Result<u32> {
    if ell == 0 {
        return Err(domain("weight ell must be positive"));
    }
    if n == 0 || !(n - 1).is_multiple_of(ell) {
        return Err(domain(format!("rank {n} is not of the form k*{ell} + 1")));
    }
    Ok((n - 1) / ell)
}

/// Precomputed `u`, `A` and position bounds for one `(n, ell)` pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundTable {
    pub n: u32,
    pub ell: u32,
    /// `u_1 ..= u_n`
    pub u: Vec<BigInt>,
    /// `A_1(ell) ..= A_{m+1}(ell)` where `n = m ell + 1`.
    pub a: Vec<BigInt>,
    positions: Vec<(BigInt, BigInt)>,
}

impl BoundTable {
    pub fn new(n: u32, ell: u32) -> Result<Self> {
        if n == 0 {
            return Err(domain("rank must be at least 1"));
        }
        let m = groups(n, ell)?;
        let u = sequence(BigInt::one(), n as usize);
        let a = sequence(BigInt::from(ell), m as usize + 1);
        let positions = if ell == 1 {
            (1..=n)
                .map(|k| integral_bounds(n, k))
                .collect::<Result<_>>()?
        } else {
            (1..=m + 1)
                .map(|i| mnsd_bounds(n, ell, i))
                .collect::<Result<_>>()?
        };
        Ok(BoundTable {
            n,
            ell,
            u,
            a,
            positions,
        })
    }

    /// Shared, memoized table for `(n, ell)`.
    pub fn cached(n: u32, ell: u32) -> Result<Arc<BoundTable>> {
        type Cache = Mutex<HashMap<(u32, u32), Arc<BoundTable>>>;
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(t) = cache.lock().unwrap().get(&(n, ell)) {
            return Ok(Arc::clone(t));
        }
        let table = Arc::new(BoundTable::new(n, ell)?);
        cache.lock().unwrap().insert((n, ell), Arc::clone(&table));
        Ok(table)
    }

    /// Number of tuple positions (`n` for `ell = 1`, `m + 1` otherwise).
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Lower bound at 1-based position `i`.
    pub fn lower(&self, i: usize) -> &BigInt {
        &self.positions[i - 1].0
    }

    /// Upper bound at 1-based position `i`.
    pub fn upper(&self, i: usize) -> &BigInt {
        &self.positions[i - 1].1
    }

    pub fn positions(&self) -> &[(BigInt, BigInt)] {
        &self.positions
    }
}
