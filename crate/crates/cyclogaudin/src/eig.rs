//! Dense complex eigenvalues through a Schur decomposition, plus the
//! multiplicity clustering used for spectrum reports.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Eigenvalues of a dense complex matrix (diagonal of the Schur T factor).
pub fn complex_eigenvalues(mat: &[Vec<Complex64>]) -> Vec<Complex64> {
    let n = mat.len();
    if n == 0 {
        return vec![];
    }
    let flat: Vec<Complex64> = mat.iter().flat_map(|row| row.iter().cloned()).collect();
    let m = DMatrix::<Complex64>::from_row_slice(n, n, &flat);
    let (_q, t) = m.schur().unpack();
    (0..n).map(|i| t[(i, i)]).collect()
}

/// Groups eigenvalues within `tol` of a cluster representative, returning
/// (mean value, multiplicity) sorted by (re, im).
pub fn cluster_eigenvalues(eigs: &[Complex64], tol: f64) -> Vec<(Complex64, usize)> {
    let mut sorted: Vec<Complex64> = eigs.to_vec();
    sorted.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    let mut clusters: Vec<(Complex64, usize)> = Vec::new();
    for e in sorted {
        match clusters.last_mut() {
            Some((rep, count)) if (e - *rep).norm() <= tol => {
                // running mean keeps the representative centered
                *rep = (*rep * Complex64::new(*count as f64, 0.0) + e)
                    / Complex64::new(*count as f64 + 1.0, 0.0);
                *count += 1;
            }
            _ => clusters.push((e, 1)),
        }
    }
    clusters
}
