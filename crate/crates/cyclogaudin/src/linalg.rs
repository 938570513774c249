//! Small dense linear algebra over exact rationals: elimination, solving,
//! inversion, rank and nullspace. Sizes here are desk scale (weight spaces,
//! Cartan matrices), so plain Gaussian elimination is enough.

use num_traits::{One, Zero};

use crate::exact::Rational;

pub type RMat = Vec<Vec<Rational>>;

pub fn identity(n: usize) -> RMat {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect()
}

/// Reduced row echelon form in place; returns pivot column indices.
pub fn rref(m: &mut RMat) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return vec![];
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r >= rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for j in c..cols {
            m[r][j] = &m[r][j] * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let t = &f * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &RMat) -> usize {
    let mut w = m.clone();
    rref(&mut w).len()
}

/// Inverse of a square matrix; None if singular.
pub fn invert(m: &RMat) -> Option<RMat> {
    let n = m.len();
    let mut aug: RMat = m
        .iter()
        .zip(identity(n))
        .map(|(row, id)| row.iter().cloned().chain(id).collect())
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() != n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
        return None;
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Solves M x = b for square invertible M.
pub fn solve(m: &RMat, b: &[Rational]) -> Option<Vec<Rational>> {
    let n = m.len();
    let mut aug: RMat = m
        .iter()
        .zip(b)
        .map(|(row, bi)| row.iter().cloned().chain([bi.clone()]).collect())
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() != n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
        return None;
    }
    Some(aug.into_iter().map(|row| row[n].clone()).collect())
}

/// Basis of the right nullspace of M (each returned vector has length = cols).
pub fn nullspace(m: &RMat) -> Vec<Vec<Rational>> {
    if m.is_empty() {
        return vec![];
    }
    let cols = m[0].len();
    let mut w = m.clone();
    let pivots = rref(&mut w);
    let pivot_set: std::collections::HashSet<usize> = pivots.iter().cloned().collect();
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![Rational::zero(); cols];
        v[free] = Rational::one();
        for (r, &p) in pivots.iter().enumerate() {
            v[p] = -w[r][free].clone();
        }
        basis.push(v);
    }
    basis
}

pub fn mat_mul(a: &RMat, b: &RMat) -> RMat {
    let n = a.len();
    let k = b.len();
    let m = if k > 0 { b[0].len() } else { 0 };
    let mut out = vec![vec![Rational::zero(); m]; n];
    for i in 0..n {
        for l in 0..k {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..m {
                if !b[l][j].is_zero() {
                    out[i][j] += &a[i][l] * &b[l][j];
                }
            }
        }
    }
    out
}

pub fn mat_vec(a: &RMat, x: &[Rational]) -> Vec<Rational> {
    a.iter()
        .map(|row| {
            let mut s = Rational::zero();
            for (c, xi) in row.iter().zip(x) {
                if !c.is_zero() && !xi.is_zero() {
                    s += c * xi;
                }
            }
            s
        })
        .collect()
}
