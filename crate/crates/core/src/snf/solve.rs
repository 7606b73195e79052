//! All integer points of `{x : A x = b, lo <= x <= hi}`.
//!
//! With `U A V = D`, substituting `x = V y` turns the system into `D y = U b`.
//! The first `rank` coordinates of `y` are forced, the rest are free, and the
//! free columns of `V` span the homogeneous lattice. The free coefficients
//! are enumerated depth-first after bringing that basis to column echelon
//! form, so each coefficient has an exact range read off its pivot
//! coordinate. A partial point is dropped as soon as a fixed coordinate leaves
//! its box or some equation can no longer be met by the open coordinates.

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use super::{smith_normal_form, IntMatrix, SnfDecomposition};
use crate::error::{domain, Result};
use crate::numeric::BigInt;

/// Inclusive bounds on one variable; both ends are required for enumeration.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VarBound {
    pub lower: Option<BigInt>,
    pub upper: Option<BigInt>,
}

impl VarBound {
    pub fn new(lower: impl Into<BigInt>, upper: impl Into<BigInt>) -> Self {
        VarBound {
            lower: Some(lower.into()),
            upper: Some(upper.into()),
        }
    }

    pub fn unbounded() -> Self {
        VarBound::default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiophantineSystem {
    pub a: IntMatrix,
    pub b: Vec<BigInt>,
    pub bounds: Vec<VarBound>,
}

impl DiophantineSystem {
    pub fn new(a: IntMatrix, b: Vec<BigInt>, bounds: Vec<VarBound>) -> Result<Self> {
        if b.len() != a.rows() || bounds.len() != a.cols() {
            return Err(domain(format!(
                "system shape mismatch: {}x{} matrix, {} right-hand sides, {} bounds",
                a.rows(),
                a.cols(),
                b.len(),
                bounds.len()
            )));
        }
        Ok(DiophantineSystem { a, b, bounds })
    }
}

pub fn solve_bounded(sys: &DiophantineSystem) -> Result<Vec<Vec<BigInt>>> {
    let snf = smith_normal_form(&sys.a)?;
    solve_with(&snf, sys)
}

type Interval = (BigInt, BigInt);

/// Solves `sys` using a precomputed decomposition of `sys.a`.
pub(crate) fn solve_with(
    snf: &SnfDecomposition,
    sys: &DiophantineSystem,
) -> Result<Vec<Vec<BigInt>>> {
    let n = sys.a.cols();
    let mut boxes: Vec<Interval> = Vec::with_capacity(n);
    for (i, b) in sys.bounds.iter().enumerate() {
        match (&b.lower, &b.upper) {
            (Some(l), Some(u)) => boxes.push((l.clone(), u.clone())),
            _ => return Err(domain(format!("variable {i} has no finite bounds"))),
        }
    }
    if boxes.iter().any(|(l, u)| l > u) {
        return Ok(Vec::new());
    }

    let c = snf.u.mul_vec(&sys.b);
    let rank = snf.rank();
    let mut y = vec![BigInt::zero(); n];
    for i in 0..rank {
        let (q, r) = c[i].div_rem(&snf.d[(i, i)]);
        if !r.is_zero() {
            return Ok(Vec::new());
        }
        y[i] = q;
    }
    if c[rank..].iter().any(|v| !v.is_zero()) {
        return Ok(Vec::new());
    }
    let mut particular = snf.v.mul_vec(&y);
    let basis: Vec<Vec<BigInt>> = (rank..n).map(|j| snf.v.col(j)).collect();
    let (basis, pivots) = echelon(basis);
    for (dir, &p) in basis.iter().zip(&pivots) {
        let q = particular[p].div_floor(&dir[p]);
        axpy(&mut particular, &-q, dir);
    }

    // Coordinates fixed once the first q coefficients are chosen.
    let fixed_after: Vec<Vec<bool>> = (0..=basis.len())
        .map(|q| {
            (0..n)
                .map(|i| basis[q..].iter().all(|b| b[i].is_zero()))
                .collect()
        })
        .collect();

    let problem = Problem {
        a: (0..sys.a.rows()).map(|r| sys.a.row(r).to_vec()).collect(),
        b: sys.b.clone(),
        boxes,
        basis,
        pivots,
        fixed_after,
    };
    let out = match problem.narrow(&particular) {
        Some((small, start)) => small
            .enumerate(start)
            .into_iter()
            .map(|x| x.into_iter().map(BigInt::from).collect())
            .collect(),
        None => problem.enumerate(particular),
    };
    debug_assert!(out.iter().all(|x| sys.a.mul_vec(x) == sys.b));
    Ok(out)
}

/// Column echelon form by unimodular column operations: vector `q` is zero
/// above its pivot row `pivots[q]`, the pivots increase and are positive, and
/// earlier vectors are reduced modulo each later pivot.
fn echelon(mut basis: Vec<Vec<BigInt>>) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let n = basis.first().map_or(0, Vec::len);
    let mut pivots = Vec::with_capacity(basis.len());
    let mut cur = 0;
    for i in 0..n {
        if cur == basis.len() {
            break;
        }
        while let Some(best) = (cur..basis.len())
            .filter(|&c| !basis[c][i].is_zero())
            .min_by(|&a, &b| basis[a][i].abs().cmp(&basis[b][i].abs()))
        {
            basis.swap(cur, best);
            let mut done = true;
            for c in cur + 1..basis.len() {
                if basis[c][i].is_zero() {
                    continue;
                }
                let q = basis[c][i].div_floor(&basis[cur][i]);
                let (head, tail) = basis.split_at_mut(c);
                axpy(&mut tail[0], &-q, &head[cur]);
                done &= tail[0][i].is_zero();
            }
            if done {
                break;
            }
        }
        if cur < basis.len() && !basis[cur][i].is_zero() {
            if basis[cur][i].is_negative() {
                for x in basis[cur].iter_mut() {
                    *x = -std::mem::take(x);
                }
            }
            for c in 0..cur {
                let q = basis[c][i].div_floor(&basis[cur][i]);
                let (head, tail) = basis.split_at_mut(cur);
                axpy(&mut head[c], &-q, &tail[0]);
            }
            pivots.push(i);
            cur += 1;
        }
    }
    debug_assert_eq!(cur, basis.len(), "free columns are independent");
    (basis, pivots)
}

/// `dst += k * src`
fn axpy(dst: &mut [BigInt], k: &BigInt, src: &[BigInt]) {
    if k.is_zero() {
        return;
    }
    for (d, s) in dst.iter_mut().zip(src) {
        *d += k * s;
    }
}

fn ceil_div<T: Clone + Integer + Signed>(a: T, b: T) -> T {
    -((-a).div_floor(&b))
}

/// Inputs of the enumeration, generic so that small instances run on
/// machine integers.
struct Problem<T> {
    a: Vec<Vec<T>>,
    b: Vec<T>,
    boxes: Vec<(T, T)>,
    basis: Vec<Vec<T>>,
    pivots: Vec<usize>,
    fixed_after: Vec<Vec<bool>>,
}

/// Inputs bounded by this stay far from `i128` overflow: every intermediate
/// is a sum of at most a few hundred products of two such values.
const NARROW_LIMIT: i128 = 1 << 56;

impl Problem<BigInt> {
    fn narrow(&self, particular: &[BigInt]) -> Option<(Problem<i128>, Vec<i128>)> {
        let conv = |v: &BigInt| v.to_i128().filter(|x| x.abs() < NARROW_LIMIT);
        let row = |r: &Vec<BigInt>| r.iter().map(conv).collect::<Option<Vec<_>>>();
        if self.a.len() + self.boxes.len() > 256 {
            return None;
        }
        let start = particular.iter().map(conv).collect::<Option<Vec<_>>>()?;
        let small = Problem {
            a: self.a.iter().map(row).collect::<Option<_>>()?,
            b: row(&self.b)?,
            boxes: self
                .boxes
                .iter()
                .map(|(l, u)| Some((conv(l)?, conv(u)?)))
                .collect::<Option<_>>()?,
            basis: self.basis.iter().map(row).collect::<Option<_>>()?,
            pivots: self.pivots.clone(),
            fixed_after: self.fixed_after.clone(),
        };
        Some((small, start))
    }
}

impl<T: Clone + Integer + Signed> Problem<T> {
    fn enumerate(&self, particular: Vec<T>) -> Vec<Vec<T>> {
        let mut out = Vec::new();
        if self.feasible(0, &particular) {
            self.descend(0, particular, &mut out);
        }
        out
    }

    /// With the first `q` coefficients chosen, every fixed coordinate lies in
    /// its box and every equation can still be met by the open coordinates.
    fn feasible(&self, q: usize, x: &[T]) -> bool {
        let fixed = &self.fixed_after[q];
        for (i, (l, u)) in self.boxes.iter().enumerate() {
            if fixed[i] && (&x[i] < l || &x[i] > u) {
                return false;
            }
        }
        for (row, b) in self.a.iter().zip(&self.b) {
            let mut lo = T::zero();
            let mut hi = T::zero();
            for (j, c) in row.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                if fixed[j] {
                    let v = c.clone() * x[j].clone();
                    lo = lo + v.clone();
                    hi = hi + v;
                } else {
                    let (l, u) = &self.boxes[j];
                    let (p, s) = (c.clone() * l.clone(), c.clone() * u.clone());
                    if p <= s {
                        lo = lo + p;
                        hi = hi + s;
                    } else {
                        lo = lo + s;
                        hi = hi + p;
                    }
                }
            }
            if b < &lo || b > &hi {
                return false;
            }
        }
        true
    }

    fn descend(&self, q: usize, mut current: Vec<T>, out: &mut Vec<Vec<T>>) {
        if q == self.basis.len() {
            out.push(current);
            return;
        }
        let dir = &self.basis[q];
        let p = self.pivots[q];
        let piv = dir[p].clone();
        let (l, u) = &self.boxes[p];
        let lo = ceil_div(l.clone() - current[p].clone(), piv.clone());
        let hi = (u.clone() - current[p].clone()).div_floor(&piv);
        if lo > hi {
            return;
        }
        for (x, d) in current.iter_mut().zip(dir) {
            *x = x.clone() + d.clone() * lo.clone();
        }
        let mut z = lo;
        loop {
            if self.feasible(q + 1, &current) {
                self.descend(q + 1, current.clone(), out);
            }
            if z >= hi {
                break;
            }
            z = z + T::one();
            for (x, d) in current.iter_mut().zip(dir) {
                *x = x.clone() + d.clone();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn two_variable_sum() {
        let sys = DiophantineSystem::new(
            IntMatrix::from_rows(&[vec![1, 1]]),
            v(&[3]),
            vec![VarBound::new(0, 3), VarBound::new(0, 3)],
        )
        .unwrap();
        let mut sols = solve_bounded(&sys).unwrap();
        sols.sort();
        assert_eq!(sols, vec![v(&[0, 3]), v(&[1, 2]), v(&[2, 1]), v(&[3, 0])]);
    }

    #[test]
    fn inconsistent_through_zero_diagonal() {
        // x + y = 1 and 2x + 2y = 3
        let sys = DiophantineSystem::new(
            IntMatrix::from_rows(&[vec![1, 1], vec![2, 2]]),
            v(&[1, 3]),
            vec![VarBound::new(-5, 5), VarBound::new(-5, 5)],
        )
        .unwrap();
        assert!(solve_bounded(&sys).unwrap().is_empty());
    }

    #[test]
    fn inconsistent_through_divisibility() {
        let sys = DiophantineSystem::new(
            IntMatrix::from_rows(&[vec![2, 4]]),
            v(&[3]),
            vec![VarBound::new(-5, 5), VarBound::new(-5, 5)],
        )
        .unwrap();
        assert!(solve_bounded(&sys).unwrap().is_empty());
    }

    #[test]
    fn fully_determined() {
        let sys = DiophantineSystem::new(
            IntMatrix::from_rows(&[vec![1, 1], vec![1, -1]]),
            v(&[4, 2]),
            vec![VarBound::new(0, 10), VarBound::new(0, 10)],
        )
        .unwrap();
        assert_eq!(solve_bounded(&sys).unwrap(), vec![v(&[3, 1])]);
    }

    #[test]
    fn unbounded_is_an_error() {
        let sys = DiophantineSystem::new(
            IntMatrix::from_rows(&[vec![1, 1]]),
            v(&[3]),
            vec![VarBound::new(0, 3), VarBound::unbounded()],
        )
        .unwrap();
        assert!(matches!(solve_bounded(&sys), Err(crate::Error::Domain(_))));
    }

    #[test]
    fn shape_mismatch() {
        assert!(
            DiophantineSystem::new(IntMatrix::from_rows(&[vec![1, 1]]), v(&[1, 2]), vec![])
                .is_err()
        );
    }
}
