//! Exact integer and rational arithmetic plus the candidate-solution types
//! shared by the search, filter and scan modules.
//!
//! Every quantity is a [`BigInt`]; the bound tables overflow 64 bits from
//! rank 8 on, and keeping a single numeric type avoids a second code path.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{domain, invariant, Result};

pub use num_bigint::BigInt;

/// Exact rational number, always kept in lowest terms with a positive
/// denominator.
pub type ExactFraction = num_rational::BigRational;

pub fn big(v: impl Into<BigInt>) -> BigInt {
    v.into()
}

/// Floor of the square root of a non-negative integer.
pub fn isqrt(v: &BigInt) -> Result<BigInt> {
    if v.is_negative() {
        return Err(domain(format!("square root of negative value {v}")));
    }
    Ok(v.sqrt())
}

/// Returns the exact square root of `v` when `v` is a perfect square.
pub fn exact_sqrt(v: &BigInt) -> Result<Option<BigInt>> {
    let r = isqrt(v)?;
    Ok(if &r * &r == *v { Some(r) } else { None })
}

pub fn is_perfect_square(v: &BigInt) -> Result<bool> {
    Ok(exact_sqrt(v)?.is_some())
}

/// Prime factorization of a positive integer as `prime -> exponent`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Factorization(BTreeMap<BigInt, u32>);

impl Factorization {
    pub fn of(n: &BigInt) -> Result<Self> {
        if !n.is_positive() {
            return Err(domain(format!("cannot factor non-positive value {n}")));
        }
        let mut out = BTreeMap::new();
        if let Some(small) = n.to_u64() {
            for (p, e) in factor_u64(small) {
                out.insert(BigInt::from(p), e);
            }
            return Ok(Factorization(out));
        }
        let mut rest = n.clone();
        let mut p = BigInt::from(2u32);
        while &p * &p <= rest {
            let mut e = 0;
            while rest.is_multiple_of(&p) {
                rest /= &p;
                e += 1;
            }
            if e > 0 {
                out.insert(p.clone(), e);
            }
            p += if p == BigInt::from(2u32) { 1u32 } else { 2u32 };
        }
        if !rest.is_one() {
            *out.entry(rest).or_insert(0) += 1;
        }
        Ok(Factorization(out))
    }

    /// Factorization of `self * other`.
    pub fn mul(&self, other: &Factorization) -> Factorization {
        let mut out = self.0.clone();
        for (p, e) in &other.0 {
            *out.entry(p.clone()).or_insert(0) += e;
        }
        Factorization(out)
    }

    /// Factorization of `self^k`.
    pub fn pow(&self, k: u32) -> Factorization {
        Factorization(self.0.iter().map(|(p, e)| (p.clone(), e * k)).collect())
    }

    pub fn value(&self) -> BigInt {
        self.0.iter().fold(BigInt::one(), |acc, (p, e)| {
            acc * num_traits::pow(p.clone(), *e as usize)
        })
    }

    /// All `s >= 1` with `s^2` dividing the factored value, ascending.
    pub fn square_divisor_roots(&self) -> Vec<BigInt> {
        let mut roots = vec![BigInt::one()];
        for (p, e) in &self.0 {
            let half = e / 2;
            if half == 0 {
                continue;
            }
            let mut next = Vec::with_capacity(roots.len() * (half as usize + 1));
            for r in &roots {
                let mut v = r.clone();
                next.push(v.clone());
                for _ in 0..half {
                    v *= p;
                    next.push(v.clone());
                }
            }
            roots = next;
        }
        roots.sort();
        roots
    }
}

fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut take = |n: &mut u64, p: u64| {
        let mut e = 0;
        while (*n).is_multiple_of(p) {
            *n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    };
    take(&mut n, 2);
    take(&mut n, 3);
    let mut p = 5u64;
    while p.saturating_mul(p) <= n {
        take(&mut n, p);
        take(&mut n, p + 2);
        p += 6;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Weakly increasing denominators `x_1 <= ... <= x_m` with a weight `ell`
/// applied to every entry except the last one.
///
/// A valid tuple satisfies `sum_{i<m} ell/x_i + 1/x_m = 1` and every ratio
/// `x_m / x_i` is a perfect square. With `ell = 1` the entries are the
/// quotients `dim(C)/d_i^2` of an integral modular category of rank `m`;
/// with `ell = 2` each non-final entry stands for a dual pair of simple
/// objects.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ReciprocalTuple {
    entries: Vec<BigInt>,
    weight: u32,
}

impl ReciprocalTuple {
    /// Builds a tuple, sorting the entries into canonical order.
    pub fn new(mut entries: Vec<BigInt>, weight: u32) -> Result<Self> {
        if entries.is_empty() {
            return Err(domain("a reciprocal tuple needs at least one entry"));
        }
        if weight == 0 {
            return Err(domain("tuple weight must be positive"));
        }
        if let Some(bad) = entries.iter().find(|x| !x.is_positive()) {
            return Err(domain(format!("tuple entries must be positive, got {bad}")));
        }
        entries.sort();
        Ok(ReciprocalTuple { entries, weight })
    }

    pub fn from_u64s(entries: &[u64], weight: u32) -> Result<Self> {
        Self::new(entries.iter().map(|&x| BigInt::from(x)).collect(), weight)
    }

    /// Internal constructor for entries already known to be sorted and positive.
    pub(crate) fn from_sorted(entries: Vec<BigInt>, weight: u32) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0] <= w[1]));
        ReciprocalTuple { entries, weight }
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The largest entry, which equals the global dimension.
    pub fn total_dim(&self) -> &BigInt {
        self.entries.last().expect("tuples are non-empty")
    }

    /// Number of simple objects the tuple describes.
    pub fn rank(&self) -> u64 {
        (self.entries.len() as u64 - 1) * self.weight as u64 + 1
    }

    /// `sum_{i<m} ell/x_i + 1/x_m` computed exactly.
    pub fn weighted_sum(&self) -> ExactFraction {
        let last = self.entries.len() - 1;
        self.entries
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let w = if i == last { 1 } else { self.weight };
                ExactFraction::new(BigInt::from(w), x.clone())
            })
            .fold(ExactFraction::zero(), |acc, f| acc + f)
    }
}

impl PartialOrd for ReciprocalTuple {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ReciprocalTuple {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight
            .cmp(&other.weight)
            .then_with(|| self.entries.len().cmp(&other.entries.len()))
            .then_with(|| self.entries.cmp(&other.entries))
    }
}

impl fmt::Display for ReciprocalTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(if self.weight > 1 && i + 1 == self.entries.len() {
                    " | "
                } else {
                    ","
                })?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// True iff all [`ReciprocalTuple`] invariants hold, checked exactly.
pub fn verify_tuple(t: &ReciprocalTuple) -> bool {
    let entries = t.entries();
    if entries.iter().any(|x| !x.is_positive()) {
        return false;
    }
    if entries.windows(2).any(|w| w[0] > w[1]) {
        return false;
    }
    if !t.weighted_sum().is_one() {
        return false;
    }
    let top = t.total_dim();
    entries.iter().all(|x| {
        let (q, r) = top.div_rem(x);
        r.is_zero() && is_perfect_square(&q).unwrap_or(false)
    })
}

/// Multiset of simple-object dimensions with multiplicities.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DimensionProfile {
    total_dim: BigInt,
    multiplicities: BTreeMap<BigInt, u64>,
    rank: u64,
}

impl DimensionProfile {
    /// Builds a profile from `dimension -> count` pairs; zero counts are dropped.
    pub fn new(multiplicities: impl IntoIterator<Item = (BigInt, u64)>) -> Result<Self> {
        let mut map: BTreeMap<BigInt, u64> = BTreeMap::new();
        for (d, k) in multiplicities {
            if !d.is_positive() {
                return Err(invariant(format!("dimension {d} is not positive")));
            }
            if k > 0 {
                *map.entry(d).or_insert(0) += k;
            }
        }
        if map.get(&BigInt::one()).copied().unwrap_or(0) == 0 {
            return Err(invariant("profile has no dimension-1 object (the unit)"));
        }
        let total_dim = map
            .iter()
            .fold(BigInt::zero(), |acc, (d, k)| acc + d * d * BigInt::from(*k));
        let rank = map.values().sum();
        Ok(DimensionProfile {
            total_dim,
            multiplicities: map,
            rank,
        })
    }

    pub fn from_pairs(pairs: &[(u64, u64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(d, k)| (BigInt::from(d), k)))
    }

    pub fn total_dim(&self) -> &BigInt {
        &self.total_dim
    }

    pub fn multiplicities(&self) -> &BTreeMap<BigInt, u64> {
        &self.multiplicities
    }

    pub fn multiplicity(&self, d: &BigInt) -> u64 {
        self.multiplicities.get(d).copied().unwrap_or(0)
    }

    /// Number of invertible (dimension one) simple objects.
    pub fn unit_multiplicity(&self) -> u64 {
        self.multiplicity(&BigInt::one())
    }

    pub fn rank(&self) -> u64 {
        self.rank
    }

    pub fn max_dimension(&self) -> &BigInt {
        self.multiplicities
            .keys()
            .next_back()
            .expect("profile always holds the unit")
    }

    pub fn is_pointed(&self) -> bool {
        self.multiplicities.len() == 1
    }

    /// Re-expands the profile into a tuple of weight `weight`.
    ///
    /// Every non-unit multiplicity and the unit multiplicity minus one must
    /// be divisible by the weight.
    pub fn to_tuple(&self, weight: u32) -> Result<ReciprocalTuple> {
        if weight == 0 {
            return Err(domain("tuple weight must be positive"));
        }
        let w = weight as u64;
        let mut entries = Vec::new();
        for (d, &k) in &self.multiplicities {
            let paired = if d.is_one() { k - 1 } else { k };
            if paired % w != 0 {
                return Err(invariant(format!(
                    "multiplicity {k} of dimension {d} does not split into groups of {weight}"
                )));
            }
            let sq = d * d;
            if !self.total_dim.is_multiple_of(&sq) {
                return Err(invariant(format!(
                    "{sq} does not divide {}",
                    self.total_dim
                )));
            }
            let x = &self.total_dim / sq;
            entries.extend(std::iter::repeat_n(x, (paired / w) as usize));
        }
        entries.push(self.total_dim.clone());
        ReciprocalTuple::new(entries, weight)
    }
}

impl fmt::Display for DimensionProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "dim {} {{", self.total_dim)?;
        for (i, (d, k)) in self.multiplicities.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{d}:{k}")?;
        }
        f.write_str("}")
    }
}

/// Converts a tuple into its dimension profile, `d_i = sqrt(x_m / x_i)`.
pub fn tuple_to_profile(t: &ReciprocalTuple) -> Result<DimensionProfile> {
    let top = t.total_dim();
    let last = t.len() - 1;
    let mut counts: BTreeMap<BigInt, u64> = BTreeMap::new();
    for (i, x) in t.entries().iter().enumerate() {
        let (q, r) = top.div_rem(x);
        if !r.is_zero() {
            return Err(invariant(format!("{x} does not divide {top}")));
        }
        let d = exact_sqrt(&q)?
            .ok_or_else(|| invariant(format!("{top}/{x} = {q} is not a perfect square")))?;
        let w = if i == last { 1 } else { t.weight() as u64 };
        *counts.entry(d).or_insert(0) += w;
    }
    let profile = DimensionProfile::new(counts)?;
    if profile.total_dim() != top {
        return Err(invariant(format!(
            "dimension sum {} differs from largest entry {top}",
            profile.total_dim()
        )));
    }
    Ok(profile)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(xs: &[u64], w: u32) -> ReciprocalTuple {
        ReciprocalTuple::from_u64s(xs, w).unwrap()
    }

    #[test]
    fn perfect_squares() {
        assert!(is_perfect_square(&big(0)).unwrap());
        assert!(is_perfect_square(&big(36)).unwrap());
        assert!(!is_perfect_square(&big(10650056950806u64)).unwrap());
        assert!(matches!(
            is_perfect_square(&big(-4)),
            Err(crate::Error::Domain(_))
        ));
    }

    #[test]
    fn factorization_and_square_divisors() {
        let f = Factorization::of(&big(360)).unwrap();
        assert_eq!(f.value(), big(360));
        // 360 = 2^3 3^2 5
        assert_eq!(
            f.square_divisor_roots(),
            vec![big(1), big(2), big(3), big(6)]
        );
        let g = Factorization::of(&big(3))
            .unwrap()
            .mul(&Factorization::of(&big(5)).unwrap().pow(2));
        assert_eq!(g.value(), big(75));
        assert_eq!(g.square_divisor_roots(), vec![big(1), big(5)]);
        let huge = BigInt::from(u64::MAX) * 4 + 0;
        assert_eq!(Factorization::of(&(&huge * 9)).unwrap().value(), huge * 9);
    }

    #[test]
    fn profiles_from_tuples() {
        let p = tuple_to_profile(&t(&[4, 4, 4, 9, 9, 36], 1)).unwrap();
        assert_eq!(
            p,
            DimensionProfile::from_pairs(&[(3, 3), (2, 2), (1, 1)]).unwrap()
        );
        assert_eq!(p.total_dim(), &big(36));
        assert_eq!(p.rank(), 6);

        let p = tuple_to_profile(&t(&[5, 5, 5, 5, 5], 1)).unwrap();
        assert_eq!(p, DimensionProfile::from_pairs(&[(1, 5)]).unwrap());

        let p = tuple_to_profile(&t(&[3, 27, 27, 27, 27, 27], 2)).unwrap();
        assert_eq!(p, DimensionProfile::from_pairs(&[(3, 2), (1, 9)]).unwrap());
        assert_eq!(p.rank(), 11);
        assert_eq!(p.total_dim(), &big(27));
    }

    #[test]
    fn profile_rejects_non_square_ratio() {
        let err = tuple_to_profile(&t(&[2, 3, 6], 1)).unwrap_err();
        assert!(matches!(err, crate::Error::InvariantViolation(_)));
        assert!(tuple_to_profile(&t(&[4, 5, 20], 1)).is_err());
    }

    #[test]
    fn verify_examples() {
        assert!(verify_tuple(&t(&[2, 8, 8, 8, 8], 1)));
        assert!(!verify_tuple(&t(&[2, 3, 6], 1)));
        assert!(verify_tuple(&t(&[1], 1)));
        assert!(verify_tuple(&t(&[3, 27, 27, 27, 27, 27], 2)));
        assert!(!verify_tuple(&t(&[3, 27, 27, 27, 27, 27], 1)));
    }

    #[test]
    fn canonical_order_on_construction() {
        let a = t(&[8, 2, 8, 8, 8], 1);
        assert_eq!(a.entries()[0], big(2));
        assert_eq!(a.to_string(), "(2,8,8,8,8)");
        assert_eq!(t(&[3, 3], 2).to_string(), "(3 | 3)");
    }

    #[test]
    fn profile_requires_unit() {
        assert!(DimensionProfile::from_pairs(&[(2, 3)]).is_err());
        assert!(DimensionProfile::from_pairs(&[(1, 0), (2, 3)]).is_err());
    }

    #[test]
    fn profile_to_tuple_checks_grouping() {
        let p = DimensionProfile::from_pairs(&[(1, 9), (3, 2)]).unwrap();
        assert_eq!(p.to_tuple(2).unwrap(), t(&[3, 27, 27, 27, 27, 27], 2));
        let q = DimensionProfile::from_pairs(&[(1, 2), (3, 1)]).unwrap();
        assert!(q.to_tuple(2).is_err());
    }
}
