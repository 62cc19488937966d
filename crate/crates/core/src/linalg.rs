//! Exact dense linear algebra over the rationals and integers.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::combinatorics::Rational;

pub type Matrix = Vec<Vec<Rational>>;

/// Row echelon form in place; returns the pivot columns.
fn echelon(m: &mut Matrix) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(sel) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, sel);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(mut m: Matrix) -> usize {
    echelon(&mut m).len()
}

/// Basis of `{x : m x = 0}`, one vector per free column.
pub fn nullspace(mut m: Matrix) -> Vec<Vec<Rational>> {
    let cols = m.first().map_or(0, |r| r.len());
    let pivots = echelon(&mut m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[r][f].clone();
            }
            v
        })
        .collect()
}

/// Determinant by Gaussian elimination over the rationals.
pub fn det(m: &Matrix) -> Rational {
    let n = m.len();
    let mut a = m.clone();
    let mut result = Rational::one();
    for c in 0..n {
        let Some(sel) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Rational::zero();
        };
        if sel != c {
            a.swap(sel, c);
            result = -result;
        }
        result *= &a[c][c];
        let inv = a[c][c].recip();
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] * &inv;
            for j in c..n {
                let t = &f * &a[c][j];
                a[i][j] -= t;
            }
        }
    }
    result
}

/// Fraction-free (Bareiss) determinant of an integer matrix.
pub fn det_bareiss(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(sel) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, sel);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Principal submatrix on the index range `range`.
pub fn principal(m: &Matrix, range: std::ops::Range<usize>) -> Matrix {
    m[range.clone()].iter().map(|row| row[range.clone()].to_vec()).collect()
}

/// Determinants of the blocks `{0..k}` for `k = 1..=n`.
pub fn leading_minors(m: &Matrix) -> Vec<Rational> {
    (1..=m.len()).map(|k| det(&principal(m, 0..k))).collect()
}

/// Determinants of the blocks `{j..n}` for `j = 0..n`.
pub fn trailing_minors(m: &Matrix) -> Vec<Rational> {
    let n = m.len();
    (0..n).map(|j| det(&principal(m, j..n))).collect()
}

/// Orthogonalizes `vectors` against the symmetric bilinear form `form(a, b)`.
/// Vectors that become null are dropped.
pub fn gram_schmidt(
    vectors: Vec<Vec<Rational>>,
    form: impl Fn(&[Rational], &[Rational]) -> Rational,
) -> Vec<Vec<Rational>> {
    let mut basis: Vec<(Vec<Rational>, Rational)> = Vec::new();
    for mut v in vectors {
        for (b, norm) in &basis {
            let f = form(&v, b) / norm;
            if f.is_zero() {
                continue;
            }
            for (x, y) in v.iter_mut().zip(b) {
                *x -= &f * y;
            }
        }
        let norm = form(&v, &v);
        if !norm.is_zero() {
            basis.push((v, norm));
        }
    }
    basis.into_iter().map(|(v, _)| v).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::{int, rational};

    fn mat(rows: &[&[i64]]) -> Matrix {
        rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
    }

    #[test]
    fn rank_and_nullspace() {
        let m = mat(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(rank(m.clone()), 2);
        let ns = nullspace(m.clone());
        assert_eq!(ns.len(), 1);
        for row in &m {
            let dotp: Rational = row.iter().zip(&ns[0]).map(|(a, b)| a * b).sum();
            assert!(dotp.is_zero());
        }
    }

    #[test]
    fn determinants_agree() {
        let m = mat(&[&[2, 6, 24], &[6, 24, 120], &[24, 120, 720]]);
        let ints: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|x| x.to_integer()).collect()).collect();
        assert_eq!(det(&m), int(det_bareiss(&ints)));
        assert_eq!(det(&mat(&[&[0, 1], &[1, 0]])), int(-1));
        assert_eq!(det_bareiss(&[vec![0.into(), 1.into()], vec![1.into(), 0.into()]]), BigInt::from(-1));
    }

    #[test]
    fn minors() {
        let m = mat(&[&[2, 6], &[6, 24]]);
        assert_eq!(leading_minors(&m), vec![int(2), int(12)]);
        assert_eq!(trailing_minors(&m), vec![int(12), int(24)]);
    }

    #[test]
    fn gram_schmidt_orthogonal() {
        let dotf = |a: &[Rational], b: &[Rational]| a.iter().zip(b).map(|(x, y)| x * y).sum::<Rational>();
        let vs = vec![vec![int(1), int(1), int(0)], vec![int(1), int(0), int(1)], vec![int(2), int(1), int(1)]];
        let basis = gram_schmidt(vs, dotf);
        assert_eq!(basis.len(), 2);
        assert!(dotf(&basis[0], &basis[1]).is_zero());
        assert_eq!(basis[1][0], rational(1, 2));
    }
}
