//! Integer Smith normal form, bounded solution of linear diophantine systems
//! and the multiplicity scan built on top of them.

mod matrix;
mod scan;
mod solve;

pub use matrix::IntMatrix;
pub use scan::{
    build_profile_system, scan_profiles, scan_profiles_with, scan_unit, scan_units, ProfileLattice,
    ProfileSystem, ScanConfig, ScanEntry, ScanUnit,
};
pub use solve::{solve_bounded, DiophantineSystem, VarBound};

use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{domain, Result};
use crate::numeric::BigInt;

/// `U A V = D` with `U`, `V` unimodular and `D` diagonal with
/// `d_1 | d_2 | ...`, all non-negative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnfDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    /// Inverse of `v`, tracked alongside it.
    pub v_inv: IntMatrix,
}

impl SnfDecomposition {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d[(i, i)].clone())
            .collect()
    }

    /// Number of non-zero diagonal entries.
    pub fn rank(&self) -> usize {
        self.diagonal().iter().take_while(|x| !x.is_zero()).count()
    }
}

/// Smith normal form by elementary row and column operations.
///
/// The pivot is the entry of smallest non-zero absolute value in the
/// remaining block, first in row-major order, so the output is a fixed
/// function of the input.
pub fn smith_normal_form(a: &IntMatrix) -> Result<SnfDecomposition> {
    let (m, n) = (a.rows(), a.cols());
    if m == 0 || n == 0 {
        return Err(domain("Smith normal form of an empty matrix"));
    }
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);
    let mut v_inv = IntMatrix::identity(n);

    for t in 0..m.min(n) {
        loop {
            let Some((pi, pj)) = smallest_entry(&d, t) else {
                return Ok(SnfDecomposition { u, d, v, v_inv });
            };
            if pi != t {
                d.swap_rows(t, pi);
                u.swap_rows(t, pi);
            }
            if pj != t {
                d.swap_cols(t, pj);
                v.swap_cols(t, pj);
                v_inv.swap_rows(t, pj);
            }

            let pivot = d[(t, t)].clone();
            let mut dirty = false;
            for i in t + 1..m {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = d[(i, t)].div_floor(&pivot);
                d.add_row_multiple(i, t, &-&q);
                u.add_row_multiple(i, t, &-&q);
                dirty |= !d[(i, t)].is_zero();
            }
            for j in t + 1..n {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = d[(t, j)].div_floor(&pivot);
                d.add_col_multiple(j, t, &-&q);
                v.add_col_multiple(j, t, &-&q);
                // (I - q e_t e_j^T)^-1 = I + q e_t e_j^T
                v_inv.add_row_multiple(t, j, &q);
                dirty |= !d[(t, j)].is_zero();
            }
            if dirty {
                continue;
            }

            // Pivot must divide the rest of the block.
            let bad_row =
                (t + 1..m).find(|&i| (t + 1..n).any(|j| !d[(i, j)].is_multiple_of(&pivot)));
            if let Some(i) = bad_row {
                d.add_row_multiple(t, i, &BigInt::from(1));
                u.add_row_multiple(t, i, &BigInt::from(1));
                continue;
            }
            if pivot.is_negative() {
                d.negate_row(t);
                u.negate_row(t);
            }
            break;
        }
    }
    Ok(SnfDecomposition { u, d, v, v_inv })
}

fn smallest_entry(d: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, BigInt)> = None;
    for i in t..d.rows() {
        for j in t..d.cols() {
            let a = d[(i, j)].abs();
            if a.is_zero() {
                continue;
            }
            if best.as_ref().is_none_or(|(_, _, b)| a < *b) {
                best = Some((i, j, a));
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn check(a: &IntMatrix) -> SnfDecomposition {
        let s = smith_normal_form(a).unwrap();
        assert_eq!(&(&s.u * a) * &s.v, s.d);
        assert!(s.u.determinant().abs().is_one());
        assert!(s.v.determinant().abs().is_one());
        assert_eq!(&s.v * &s.v_inv, IntMatrix::identity(a.cols()));
        let diag = s.diagonal();
        for (i, x) in diag.iter().enumerate() {
            assert!(!x.is_negative());
            if i + 1 < diag.len() && !x.is_zero() {
                assert!(diag[i + 1].is_multiple_of(x));
            }
            if x.is_zero() {
                assert!(diag[i..].iter().all(|y| y.is_zero()));
            }
        }
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                if i != j {
                    assert!(s.d[(i, j)].is_zero());
                }
            }
        }
        s
    }

    #[test]
    fn identity() {
        let s = check(&IntMatrix::identity(2));
        assert_eq!(s.d, IntMatrix::identity(2));
    }

    #[test]
    fn two_by_two() {
        let s = check(&IntMatrix::from_rows(&[vec![2, 4], vec![6, 8]]));
        assert_eq!(s.diagonal(), vec![BigInt::from(2), BigInt::from(4)]);
    }

    #[test]
    fn rank_deficient() {
        let s = check(&IntMatrix::from_rows(&[vec![1, 0], vec![0, 0]]));
        assert_eq!(s.diagonal(), vec![BigInt::from(1), BigInt::from(0)]);
        assert_eq!(s.rank(), 1);
    }

    #[test]
    fn needs_divisibility_fix() {
        // diag(2, 3) has Smith form diag(1, 6)
        let s = check(&IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(s.diagonal(), vec![BigInt::from(1), BigInt::from(6)]);
    }

    #[test]
    fn rectangular_and_negative() {
        check(&IntMatrix::from_rows(&[vec![-4, 6, 10], vec![2, -3, 7]]));
        check(&IntMatrix::from_rows(&[
            vec![0, 0],
            vec![0, -5],
            vec![3, 9],
        ]));
        check(&IntMatrix::from_rows(&[vec![0, 0, 0]]));
    }

    #[test]
    fn empty_matrix_rejected() {
        assert!(smith_normal_form(&IntMatrix::zeros(0, 3)).is_err());
    }
}
