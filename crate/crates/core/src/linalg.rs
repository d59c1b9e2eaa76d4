//! Small exact linear-algebra kernel: Gaussian elimination, determinants,
//! LDL^T for positive-definite forms, and the characteristic polynomial via
//! the Faddeev–LeVerrier recursion. Matrices are dense `Vec<Vec<Rat>>`; the
//! ranks in this crate never exceed ~10. Index-based elimination loops are
//! deliberate: they mutate rows in place.
#![allow(clippy::needless_range_loop)]

use crate::error::{Error, Result};
use crate::rat::Rat;

pub type Matrix = Vec<Vec<Rat>>;

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Rat::one() } else { Rat::zero() })
                .collect()
        })
        .collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..k).map(|l| &a[i][l] * &b[l][j]).sum())
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &Matrix, x: &[Rat]) -> Vec<Rat> {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(c, v)| c * v).sum())
        .collect()
}

pub fn trace(a: &Matrix) -> Rat {
    (0..a.len()).map(|i| a[i][i].clone()).sum()
}

pub fn is_symmetric(a: &Matrix) -> bool {
    let n = a.len();
    a.iter().all(|r| r.len() == n) && (0..n).all(|i| (0..i).all(|j| a[i][j] == a[j][i]))
}

/// Solves `A x = b` by Gaussian elimination with partial (nonzero) pivoting.
/// Returns `None` when `A` is singular.
pub fn solve(a: &Matrix, b: &[Rat]) -> Option<Vec<Rat>> {
    let n = a.len();
    let mut m: Vec<Vec<Rat>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        let inv = m[col][col].recip();
        for j in col..=n {
            m[col][j] = &m[col][j] * &inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for j in col..=n {
                    m[r][j] = &m[r][j] - &(&f * &m[col][j]);
                }
            }
        }
    }
    Some(
        m.into_iter()
            .map(|mut row| row.pop().expect("rhs"))
            .collect(),
    )
}

pub fn determinant(a: &Matrix) -> Rat {
    let n = a.len();
    let mut m = a.to_vec();
    let mut det = Rat::one();
    for col in 0..n {
        let pivot = match (col..n).find(|&r| !m[r][col].is_zero()) {
            Some(p) => p,
            None => return Rat::zero(),
        };
        if pivot != col {
            m.swap(col, pivot);
            det = -det;
        }
        det = det * &m[col][col];
        let inv = m[col][col].recip();
        for r in col + 1..n {
            if !m[r][col].is_zero() {
                let f = &m[r][col] * &inv;
                for j in col..n {
                    m[r][j] = &m[r][j] - &(&f * &m[col][j]);
                }
            }
        }
    }
    det
}

/// Leading principal minors `det(A[..k][..k])` for `k = 1..=n`.
pub fn leading_principal_minors(a: &Matrix) -> Vec<Rat> {
    (1..=a.len())
        .map(|k| {
            let sub: Matrix = a[..k].iter().map(|row| row[..k].to_vec()).collect();
            determinant(&sub)
        })
        .collect()
}

/// `A = L D L^T` with `L` lower unitriangular, for symmetric positive
/// definite `A`. Errors if a pivot fails to be positive.
pub fn ldl(a: &Matrix) -> Result<(Matrix, Vec<Rat>)> {
    let n = a.len();
    let mut l = identity(n);
    let mut d = vec![Rat::zero(); n];
    for j in 0..n {
        let mut dj = a[j][j].clone();
        for k in 0..j {
            dj = dj - &(&l[j][k] * &l[j][k]) * &d[k];
        }
        if !dj.is_positive() {
            return Err(Error::Internal(
                "LDL^T pivot not positive: form is not positive definite".into(),
            ));
        }
        for i in j + 1..n {
            let mut v = a[i][j].clone();
            for k in 0..j {
                v = v - &(&l[i][k] * &l[j][k]) * &d[k];
            }
            l[i][j] = v / &dj;
        }
        d[j] = dj;
    }
    Ok((l, d))
}

/// Coefficients of `det(tI - A)` in descending degree order, leading 1 first.
/// Faddeev–LeVerrier, exact over the rationals.
pub fn char_poly(a: &Matrix) -> Vec<Rat> {
    let n = a.len();
    let mut coeffs = vec![Rat::one()];
    let mut m = identity(n);
    for k in 1..=n {
        let am = mat_mul(a, &m);
        let c = -(trace(&am) / Rat::int(k as i64));
        for (i, row) in m.iter_mut().enumerate() {
            row.clone_from(&am[i]);
            row[i] = &row[i] + &c;
        }
        coeffs.push(c);
    }
    coeffs
}

/// Sign-variation count, ignoring zeros. For a polynomial with all real
/// roots (symmetric matrices), Descartes' rule is exact: variations of
/// `p(t)` count positive roots, variations of `p(-t)` count negative ones.
pub fn sign_variations(coeffs: &[Rat]) -> usize {
    let signs: Vec<i8> = coeffs
        .iter()
        .filter(|c| !c.is_zero())
        .map(|c| if c.is_positive() { 1 } else { -1 })
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// (positive, zero, negative) eigenvalue counts of a symmetric matrix,
/// computed exactly from the characteristic polynomial.
pub fn symmetric_inertia(a: &Matrix) -> (usize, usize, usize) {
    let p = char_poly(a);
    let zeros = p.iter().rev().take_while(|c| c.is_zero()).count();
    let pos = sign_variations(&p);
    let flipped: Vec<Rat> = p
        .iter()
        .enumerate()
        .map(|(i, c)| {
            if (p.len() - 1 - i) % 2 == 1 {
                -c
            } else {
                c.clone()
            }
        })
        .collect();
    let neg = sign_variations(&flipped);
    (pos, zeros, neg)
}
