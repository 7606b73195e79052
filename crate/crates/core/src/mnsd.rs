//! Odd-dimensional (maximally non-self-dual) search.
//!
//! Rank `n = 2k + 1` categories have simple dimensions
//! `d_1, d_1, ..., d_k, d_k, 1`, so the quotients `x_i = dim / d_i^2`
//! satisfy `sum_{i<=k} 2/x_i + 1/x_{k+1} = 1`. The global dimension is odd,
//! hence every `x_i` is odd and even candidates are skipped.

use num_traits::One;

use crate::bounds::BoundTable;
use crate::efsearch::SearchConfig;
use crate::error::{domain, invariant, Result};
use crate::numeric::{tuple_to_profile, verify_tuple, BigInt, DimensionProfile, ReciprocalTuple};
use crate::search::{Layout, SearchReport};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MnsdConfig {
    /// Odd rank `2k + 1`.
    pub rank: u32,
    pub dim_cap: Option<BigInt>,
    pub parallel_degree: usize,
}

impl MnsdConfig {
    pub fn new(rank: u32) -> Self {
        MnsdConfig {
            rank,
            dim_cap: None,
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

impl From<&SearchConfig> for MnsdConfig {
    fn from(c: &SearchConfig) -> Self {
        MnsdConfig {
            rank: c.rank,
            dim_cap: c.dim_cap.clone(),
            parallel_degree: c.parallel_degree,
        }
    }
}

pub fn enumerate_mnsd(cfg: &MnsdConfig) -> Result<SearchReport> {
    if cfg.rank.is_multiple_of(2) {
        return Err(domain(format!(
            "odd-dimensional categories have odd rank, got {}",
            cfg.rank
        )));
    }
    if let Some(cap) = &cfg.dim_cap {
        if *cap < BigInt::one() {
            return Ok(SearchReport::default());
        }
    }
    let table = BoundTable::cached(cfg.rank, 2)?;
    Layout {
        table: &table,
        weight: 2,
        odd_only: true,
        cap: cfg.dim_cap.clone(),
        threads: cfg.parallel_degree,
    }
    .run(None)
}

/// Profile of a weight-2 tuple, checking the pairing structure: the unit
/// multiplicity is odd and every other multiplicity is even.
pub fn mnsd_profile(t: &ReciprocalTuple) -> Result<DimensionProfile> {
    if t.weight() != 2 {
        return Err(invariant(format!(
            "expected a weight-2 tuple, got weight {}",
            t.weight()
        )));
    }
    if !verify_tuple(t) {
        return Err(invariant(format!("{t} is not a valid reciprocal tuple")));
    }
    let p = tuple_to_profile(t)?;
    for (d, &k) in p.multiplicities() {
        let odd = k % 2 == 1;
        if d.is_one() != odd {
            return Err(invariant(format!(
                "dimension {d} has multiplicity {k} of wrong parity"
            )));
        }
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::big;

    fn run(rank: u32) -> Vec<String> {
        enumerate_mnsd(&MnsdConfig::new(rank))
            .unwrap()
            .solutions
            .iter()
            .map(|t| t.to_string())
            .collect()
    }

    #[test]
    fn small_ranks_are_pointed() {
        assert_eq!(run(1), vec!["(1)"]);
        assert_eq!(run(3), vec!["(3 | 3)"]);
        assert_eq!(run(5), vec!["(5,5 | 5)"]);
        assert_eq!(run(7), vec!["(7,7,7 | 7)"]);
    }

    #[test]
    fn even_rank_rejected() {
        assert!(matches!(
            enumerate_mnsd(&MnsdConfig::new(4)),
            Err(crate::Error::Domain(_))
        ));
    }

    #[test]
    fn profiles() {
        let t = ReciprocalTuple::from_u64s(&[3, 27, 27, 27, 27, 27], 2).unwrap();
        assert_eq!(
            mnsd_profile(&t).unwrap(),
            DimensionProfile::from_pairs(&[(1, 9), (3, 2)]).unwrap()
        );
        let t = ReciprocalTuple::from_u64s(&[11; 6], 2).unwrap();
        assert_eq!(mnsd_profile(&t).unwrap().multiplicity(&big(1)), 11);
        let t = ReciprocalTuple::from_u64s(&[3, 3], 2).unwrap();
        assert_eq!(
            mnsd_profile(&t).unwrap(),
            DimensionProfile::from_pairs(&[(1, 3)]).unwrap()
        );
        let t = ReciprocalTuple::from_u64s(&[2, 8, 8, 8, 8], 1).unwrap();
        assert!(mnsd_profile(&t).is_err());
    }
}
