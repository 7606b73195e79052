//! Multiplicity scan over small dimension sets.
//!
//! For distinct dimensions `1 = d_0 < d_1 < ... < d_{t-1}` and rank `r` the
//! multiplicities `k_i` of a candidate category satisfy
//!
//! ```text
//! k_0 = 1 mod 2,  k_i = 0 mod 2 (i != 0)           odd-dimensional case only
//! sum_i k_i = r
//! sum_{j != i} k_j d_j^2 = 0 mod d_i^2             for every i
//! sum_{j != 0} k_j d_j^2 = 0 mod k_0
//! ```
//!
//! Every congruence with a fixed modulus becomes a linear equation through a
//! slack variable (`k_i - 2 p_i = 0`, `sum_{j != i} k_j d_j^2 - d_i^2 q_i = 0`),
//! so the linear system is solved through its Smith normal form. The last
//! condition has the unknown `k_0` as modulus and is checked on each solution.

use std::sync::Arc;

use itertools::Itertools;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use super::solve::solve_with;
use super::{smith_normal_form, DiophantineSystem, IntMatrix, SnfDecomposition, VarBound};
use crate::error::{domain, Result};
use crate::filters::{default_rules, run_filter_trail, Family, FilterVerdict, TheoremRule};
use crate::numeric::{BigInt, DimensionProfile};

/// Rank-independent part of a profile system: the dimension set, the
/// constraint matrix and its Smith normal form.
#[derive(Debug, Clone)]
pub struct ProfileLattice {
    dims: Vec<BigInt>,
    family: Family,
    matrix: IntMatrix,
    snf: SnfDecomposition,
}

impl ProfileLattice {
    /// `dims` must be distinct and positive and include 1; in the
    /// odd-dimensional family they must all be odd. Order does not matter.
    pub fn new(dims: &[BigInt], family: Family) -> Result<Self> {
        let mut sorted = dims.to_vec();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(domain("dimensions must be distinct"));
        }
        if sorted.first().is_none_or(|d| !d.is_one()) {
            return Err(domain(
                "dimension list must contain 1 and only positive values",
            ));
        }
        if family == Family::Mnsd && sorted.iter().any(|d| d.is_even()) {
            return Err(domain("odd-dimensional profiles need odd dimensions"));
        }
        let t = sorted.len();
        let parity = if family == Family::Mnsd { t } else { 0 };
        let cols = t + parity + (t - 1);
        let rows = 1 + parity + (t - 1);
        let mut a = IntMatrix::zeros(rows, cols);
        for i in 0..t {
            a[(0, i)] = BigInt::one();
        }
        for i in 0..parity {
            a[(1 + i, i)] = BigInt::one();
            a[(1 + i, t + i)] = BigInt::from(-2);
        }
        for i in 1..t {
            let row = parity + i;
            for (j, d) in sorted.iter().enumerate() {
                if j != i {
                    a[(row, j)] = d * d;
                }
            }
            a[(row, t + parity + i - 1)] = -(&sorted[i] * &sorted[i]);
        }
        let snf = smith_normal_form(&a)?;
        Ok(ProfileLattice {
            dims: sorted,
            family,
            matrix: a,
            snf,
        })
    }

    pub fn dims(&self) -> &[BigInt] {
        &self.dims
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn snf(&self) -> &SnfDecomposition {
        &self.snf
    }

    fn parity_vars(&self) -> usize {
        if self.family == Family::Mnsd {
            self.dims.len()
        } else {
            0
        }
    }

    pub fn system(&self, rank: u32) -> DiophantineSystem {
        let t = self.dims.len();
        let parity = self.parity_vars();
        let r = BigInt::from(rank);
        let mut b = vec![BigInt::zero(); self.matrix.rows()];
        b[0] = r.clone();
        if parity > 0 {
            b[1] = BigInt::one();
        }
        let mut bounds = Vec::with_capacity(self.matrix.cols());
        // Every listed dimension occurs: the divisibility congruence for d_i
        // only holds when some simple object has dimension d_i.
        for _ in 0..t {
            bounds.push(VarBound::new(1, r.clone()));
        }
        for _ in 0..parity {
            bounds.push(VarBound::new(0, &r / 2));
        }
        let top = self.dims.last().unwrap();
        let reach = &r * top * top;
        for d in &self.dims[1..] {
            bounds.push(VarBound::new(0, &reach / (d * d)));
        }
        DiophantineSystem {
            a: self.matrix.clone(),
            b,
            bounds,
        }
    }

    pub fn at_rank(self: &Arc<Self>, rank: u32) -> ProfileSystem {
        ProfileSystem {
            lattice: Arc::clone(self),
            rank,
            system: self.system(rank),
        }
    }
}

/// Linear system for one rank plus the residual congruence checks.
#[derive(Debug, Clone)]
pub struct ProfileSystem {
    lattice: Arc<ProfileLattice>,
    rank: u32,
    system: DiophantineSystem,
}

pub fn build_profile_system(dims: &[BigInt], rank: u32, mnsd: bool) -> Result<ProfileSystem> {
    let family = if mnsd { Family::Mnsd } else { Family::Integral };
    Ok(Arc::new(ProfileLattice::new(dims, family)?).at_rank(rank))
}

impl ProfileSystem {
    pub fn system(&self) -> &DiophantineSystem {
        &self.system
    }

    pub fn dims(&self) -> &[BigInt] {
        self.lattice.dims()
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    /// Checks every condition on a multiplicity vector aligned with
    /// [`Self::dims`], independently of how it was produced.
    pub fn residual_ok(&self, k: &[u64]) -> bool {
        let dims = self.dims();
        if k.len() != dims.len() || k.iter().sum::<u64>() != self.rank as u64 || k[0] == 0 {
            return false;
        }
        if self.lattice.family == Family::Mnsd
            && (k[0].is_multiple_of(2) || k[1..].iter().any(|x| x % 2 == 1))
        {
            return false;
        }
        let weighted: Vec<BigInt> = dims
            .iter()
            .zip(k)
            .map(|(d, &c)| d * d * BigInt::from(c))
            .collect();
        let total: BigInt = weighted.iter().sum();
        let divisible = dims
            .iter()
            .zip(&weighted)
            .all(|(d, w)| (&total - w).is_multiple_of(&(d * d)));
        divisible && (&total - &weighted[0]).is_multiple_of(&BigInt::from(k[0]))
    }

    /// Multiplicity vectors satisfying the linear system and the residual checks.
    pub fn solve(&self) -> Result<Vec<Vec<u64>>> {
        let t = self.dims().len();
        let mut out: Vec<Vec<u64>> = solve_with(&self.lattice.snf, &self.system)?
            .into_iter()
            .map(|x| {
                x[..t]
                    .iter()
                    .map(|v| v.to_u64().expect("bounded by rank"))
                    .collect()
            })
            .filter(|k: &Vec<u64>| self.residual_ok(k))
            .collect();
        out.sort();
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanConfig {
    pub r_min: u32,
    pub r_max: u32,
    pub d_max: u64,
    /// Maximum number of distinct dimensions, counting the unit dimension.
    pub t_max: usize,
    pub mnsd: bool,
    /// Candidate non-unit dimensions; defaults to every admissible `d <= d_max`.
    pub candidate_dims: Option<Vec<u64>>,
    pub parallel_degree: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            r_min: 13,
            r_max: 23,
            d_max: 45,
            t_max: 6,
            mnsd: true,
            candidate_dims: None,
            parallel_degree: 0,
        }
    }
}

impl ScanConfig {
    pub fn family(&self) -> Family {
        if self.mnsd {
            Family::Mnsd
        } else {
            Family::Integral
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.r_min == 0 || self.r_max == 0 || self.d_max == 0 || self.t_max == 0 {
            return Err(domain("scan caps must be positive"));
        }
        if self.r_min > self.r_max {
            return Err(domain("r_min exceeds r_max"));
        }
        Ok(())
    }

    pub fn ranks(&self) -> Vec<u32> {
        (self.r_min..=self.r_max)
            .filter(|r| !self.mnsd || r % 2 == 1)
            .collect()
    }

    pub fn candidates(&self) -> Result<Vec<u64>> {
        let mut c: Vec<u64> = match &self.candidate_dims {
            Some(list) => list
                .iter()
                .copied()
                .filter(|&d| d > 1 && d <= self.d_max)
                .collect(),
            None => (2..=self.d_max)
                .filter(|d| !self.mnsd || d % 2 == 1)
                .collect(),
        };
        c.sort_unstable();
        c.dedup();
        if self.mnsd && c.iter().any(|d| d % 2 == 0) {
            return Err(domain(
                "odd-dimensional scan with an even candidate dimension",
            ));
        }
        Ok(c)
    }
}

/// One dimension set of the scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanUnit {
    pub index: usize,
    /// Sorted, starting with 1.
    pub dims: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanEntry {
    pub rank: u32,
    pub dims: Vec<u64>,
    pub k: Vec<u64>,
    pub profile: DimensionProfile,
    pub verdict: FilterVerdict,
    pub trail: Vec<FilterVerdict>,
}

/// Dimension sets in scan order: by size, then lexicographically.
pub fn scan_units(cfg: &ScanConfig) -> Result<Vec<ScanUnit>> {
    cfg.validate()?;
    let cands = cfg.candidates()?;
    let mut units = Vec::new();
    for size in 0..cfg.t_max {
        for combo in cands.iter().copied().combinations(size) {
            let mut dims = vec![1];
            dims.extend(combo);
            units.push(ScanUnit {
                index: units.len(),
                dims,
            });
        }
    }
    Ok(units)
}

/// Solves one dimension set at every configured rank and filters the solutions.
pub fn scan_unit(
    cfg: &ScanConfig,
    unit: &ScanUnit,
    rules: &[TheoremRule],
) -> Result<Vec<ScanEntry>> {
    // Each non-unit dimension occurs at least once, twice when paired.
    let per_dim = if cfg.mnsd { 2 } else { 1 };
    let min_rank = 1 + per_dim * (unit.dims.len() as u32 - 1);
    let ranks: Vec<u32> = cfg.ranks().into_iter().filter(|&r| r >= min_rank).collect();
    let mut out = Vec::new();
    if ranks.is_empty() {
        return Ok(out);
    }
    let dims: Vec<BigInt> = unit.dims.iter().map(|&d| BigInt::from(d)).collect();
    let lattice = Arc::new(ProfileLattice::new(&dims, cfg.family())?);
    for rank in ranks {
        for k in lattice.at_rank(rank).solve()? {
            let profile = DimensionProfile::new(dims.iter().cloned().zip(k.iter().copied()))?;
            let trail = run_filter_trail(&profile, cfg.family(), rules)?;
            let verdict = trail.last().expect("trail is never empty").clone();
            out.push(ScanEntry {
                rank,
                dims: unit.dims.clone(),
                k,
                profile,
                verdict,
                trail,
            });
        }
    }
    Ok(out)
}

pub fn scan_profiles(cfg: &ScanConfig) -> Result<Vec<ScanEntry>> {
    scan_profiles_with(cfg, &default_rules())
}

pub fn scan_profiles_with(cfg: &ScanConfig, rules: &[TheoremRule]) -> Result<Vec<ScanEntry>> {
    let units = scan_units(cfg)?;
    let run = || -> Result<Vec<ScanEntry>> {
        let per_unit: Vec<Vec<ScanEntry>> = units
            .par_iter()
            .map(|u| scan_unit(cfg, u, rules))
            .collect::<Result<_>>()?;
        let mut out: Vec<ScanEntry> = per_unit.into_iter().flatten().collect();
        out.sort_by(|a, b| (a.rank, &a.dims, &a.k).cmp(&(b.rank, &b.dims, &b.k)));
        Ok(out)
    };
    if cfg.parallel_degree == 0 {
        run()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.parallel_degree)
            .build()
            .map_err(|e| domain(format!("cannot build worker pool: {e}")))?
            .install(run)
    }
}
