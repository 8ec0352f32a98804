//! Exact affine maps `x ↦ A x + b` over the rationals.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalAffineMap {
    /// Row-major, `d_out` rows of length `d_in`.
    pub matrix: Vec<Vec<Rational>>,
    pub offset: Vec<Rational>,
}

impl RationalAffineMap {
    pub fn new(matrix: Vec<Vec<Rational>>, offset: Vec<Rational>) -> Result<Self> {
        if matrix.len() != offset.len() {
            return Err(Error::Input("matrix rows and offset length differ".into()));
        }
        if let Some(first) = matrix.first() {
            if matrix.iter().any(|r| r.len() != first.len()) {
                return Err(Error::Input("ragged matrix".into()));
            }
        }
        Ok(RationalAffineMap { matrix, offset })
    }

    pub fn linear(matrix: Vec<Vec<Rational>>) -> Result<Self> {
        let zero = vec![Rational::zero(); matrix.len()];
        Self::new(matrix, zero)
    }

    pub fn identity(d: usize) -> Self {
        let matrix = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                    .collect()
            })
            .collect();
        RationalAffineMap {
            matrix,
            offset: vec![Rational::zero(); d],
        }
    }

    /// `x ↦ s·x + t`.
    pub fn similarity(s: Rational, t: Vec<Rational>) -> Self {
        let mut m = Self::identity(t.len());
        for row in m.matrix.iter_mut() {
            for v in row.iter_mut() {
                *v *= &s;
            }
        }
        m.offset = t;
        m
    }

    pub fn d_out(&self) -> usize {
        self.matrix.len()
    }

    pub fn d_in(&self) -> usize {
        self.matrix.first().map_or(0, Vec::len)
    }

    pub fn apply(&self, x: &[Rational]) -> Vec<Rational> {
        assert_eq!(x.len(), self.d_in(), "dimension mismatch");
        self.matrix
            .iter()
            .zip(&self.offset)
            .map(|(row, b)| row.iter().zip(x).fold(b.clone(), |acc, (a, xi)| acc + a * xi))
            .collect()
    }

    pub fn apply_linear(&self, x: &[Rational]) -> Vec<Rational> {
        self.matrix
            .iter()
            .map(|row| row.iter().zip(x).fold(Rational::zero(), |acc, (a, xi)| acc + a * xi))
            .collect()
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &RationalAffineMap) -> RationalAffineMap {
        assert_eq!(self.d_in(), inner.d_out(), "dimension mismatch");
        let cols = inner.d_in();
        let matrix = self
            .matrix
            .iter()
            .map(|row| {
                (0..cols)
                    .map(|j| {
                        row.iter()
                            .zip(&inner.matrix)
                            .fold(Rational::zero(), |acc, (a, r)| acc + a * &r[j])
                    })
                    .collect()
            })
            .collect();
        let offset = self
            .apply_linear(&inner.offset)
            .into_iter()
            .zip(&self.offset)
            .map(|(x, b)| x + b)
            .collect();
        RationalAffineMap { matrix, offset }
    }

    pub fn rank(&self) -> usize {
        rank(&self.matrix)
    }

    pub fn is_injective(&self) -> bool {
        self.rank() == self.d_in()
    }

    /// Determinant of the linear part; `None` unless square.
    pub fn det(&self) -> Option<Rational> {
        if self.d_in() != self.d_out() {
            return None;
        }
        Some(det(self.matrix.clone()))
    }

    /// Unique fixed point of a square map, if `I − A` is invertible.
    pub fn fixed_point(&self) -> Option<Vec<Rational>> {
        let d = self.d_out();
        if d != self.d_in() {
            return None;
        }
        let mut m: Vec<Vec<Rational>> = self
            .matrix
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, a)| if i == j { Rational::one() - a } else { -a.clone() })
                    .collect()
            })
            .collect();
        solve(&mut m, self.offset.clone())
    }

    /// Squared Frobenius norm of the linear part.
    pub fn frobenius_sq(&self) -> Rational {
        self.matrix.iter().flatten().fold(Rational::zero(), |acc, a| acc + a * a)
    }

    /// Maximum absolute column sum and row sum of the linear part.
    pub fn one_and_inf_norms(&self) -> (Rational, Rational) {
        let one = (0..self.d_in())
            .map(|j| self.matrix.iter().fold(Rational::zero(), |acc, r| acc + r[j].abs()))
            .max()
            .unwrap_or_else(Rational::zero);
        let inf = self
            .matrix
            .iter()
            .map(|r| r.iter().fold(Rational::zero(), |acc, a| acc + a.abs()))
            .max()
            .unwrap_or_else(Rational::zero);
        (one, inf)
    }
}

/// Gaussian elimination on a square system; `None` when singular.
pub fn solve(m: &mut [Vec<Rational>], mut rhs: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = m.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        let inv = Rational::one() / &m[col][col];
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let factor = &m[r][col] * &inv;
                for c in col..n {
                    let v = &factor * &m[col][c];
                    m[r][c] -= v;
                }
                let v = &factor * &rhs[col];
                rhs[r] -= v;
            }
        }
    }
    Some((0..n).map(|i| &rhs[i] / &m[i][i]).collect())
}

pub fn rank(matrix: &[Vec<Rational>]) -> usize {
    let mut m = matrix.to_vec();
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..rows {
            if !m[i][c].is_zero() {
                let factor = &m[i][c] / &m[r][c];
                for j in c..cols {
                    let v = &factor * &m[r][j];
                    m[i][j] -= v;
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

pub fn det(mut m: Vec<Vec<Rational>>) -> Rational {
    let n = m.len();
    let mut d = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        d *= &m[c][c];
        for i in c + 1..n {
            if !m[i][c].is_zero() {
                let factor = &m[i][c] / &m[c][c];
                for j in c..n {
                    let v = &factor * &m[c][j];
                    m[i][j] -= v;
                }
            }
        }
    }
    d
}

pub fn squared_distance(x: &[Rational], y: &[Rational]) -> Rational {
    x.iter().zip(y).fold(Rational::zero(), |acc, (a, b)| {
        let d = a - b;
        acc + &d * &d
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn compose_matches_apply() {
        let f = RationalAffineMap::new(
            vec![vec![rat(1, 2), int(1)], vec![int(0), rat(-1, 3)]],
            vec![int(1), rat(1, 5)],
        )
        .unwrap();
        let g = RationalAffineMap::similarity(rat(2, 7), vec![int(0), int(3)]);
        let x = vec![rat(3, 4), rat(-2, 9)];
        assert_eq!(f.compose(&g).apply(&x), f.apply(&g.apply(&x)));
        assert_eq!(f.det(), Some(rat(-1, 6)));
    }

    #[test]
    fn fixed_point_of_halving() {
        let f = RationalAffineMap::similarity(rat(1, 2), vec![rat(1, 2), int(0)]);
        let s = f.fixed_point().unwrap();
        assert_eq!(s, vec![int(1), int(0)]);
        assert_eq!(f.apply(&s), s);
        assert!(RationalAffineMap::identity(2).fixed_point().is_none());
    }

    #[test]
    fn rank_of_projection() {
        let p = RationalAffineMap::linear(vec![vec![int(1), int(0)], vec![int(0), int(0)]]).unwrap();
        assert_eq!(p.rank(), 1);
        assert!(!p.is_injective());
    }
}
