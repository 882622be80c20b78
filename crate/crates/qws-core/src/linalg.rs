//! Small dense linear-algebra helpers on top of `faer`.

use faer::{Mat, Side};

use crate::{c64, CMat, CVec, Error, Result};

pub const ONE: c64 = c64 { re: 1.0, im: 0.0 };
pub const ZERO: c64 = c64 { re: 0.0, im: 0.0 };

pub fn identity(n: usize) -> CMat {
    Mat::identity(n, n)
}

/// `z * m` for a complex scalar.
pub fn scaled(m: &CMat, z: c64) -> CMat {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| z * m[(i, j)])
}

pub fn adjoint(m: &CMat) -> CMat {
    m.adjoint().to_owned()
}

/// Frobenius norm.
pub fn norm(m: &CMat) -> f64 {
    m.norm_l2()
}

pub fn vec_norm(v: &CVec) -> f64 {
    v.norm_l2()
}

/// Largest entry modulus.
pub fn max_abs(m: &CMat) -> f64 {
    let mut best = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            best = best.max(m[(i, j)].norm());
        }
    }
    best
}

/// Frobenius distance between two equally sized matrices.
pub fn distance(a: &CMat, b: &CMat) -> f64 {
    (a - b).norm_l2()
}

/// `‖M*M − I‖_F`.
pub fn unitarity_residual(m: &CMat) -> f64 {
    let gram = m.adjoint() * m;
    distance(&gram, &identity(m.ncols()))
}

/// `‖M − M*‖_F`.
pub fn hermitian_residual(m: &CMat) -> f64 {
    let adj = m.adjoint().to_owned();
    distance(m, &adj)
}

/// `(M + M*) / 2`.
pub fn hermitian_part(m: &CMat) -> CMat {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5)
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of the Hermitian part of `m`.
pub fn hermitian_eigen(m: &CMat) -> Result<(Vec<f64>, CMat)> {
    let h = hermitian_part(m);
    let evd = h
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Decomposition(format!("{e:?}")))?;
    let values = evd.S().column_vector().iter().map(|z| z.re).collect();
    Ok((values, evd.U().to_owned()))
}

/// Ascending eigenvalues of the Hermitian part of `m`.
pub fn hermitian_eigenvalues(m: &CMat) -> Result<Vec<f64>> {
    let h = hermitian_part(m);
    h.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Decomposition(format!("{e:?}")))
}

/// Eigenvalues and (unit, not necessarily orthogonal) eigenvectors of a general matrix.
pub fn general_eigen(m: &CMat) -> Result<(Vec<c64>, CMat)> {
    let evd = m.eigen().map_err(|e| Error::Decomposition(format!("{e:?}")))?;
    let values = evd.S().column_vector().iter().copied().collect();
    Ok((values, evd.U().to_owned()))
}

/// Roots of a real polynomial given by monic coefficients `[1, a_1, …, a_n]`
/// (highest degree first), from the eigenvalues of its companion matrix.
pub fn companion_roots(monic: &[f64]) -> Result<Vec<c64>> {
    let n = monic.len().saturating_sub(1);
    if n == 0 {
        return Ok(Vec::new());
    }
    let comp = Mat::<f64>::from_fn(n, n, |i, j| {
        if i == 0 {
            -monic[j + 1]
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    comp.eigenvalues()
        .map_err(|e| Error::Decomposition(format!("{e:?}")))
}

/// Orthonormal basis of the column span, by modified Gram–Schmidt with one
/// reorthogonalization pass. Columns whose residual falls below `tol` are dropped.
pub fn orthonormalize_columns(m: &CMat, tol: f64) -> CMat {
    let n = m.nrows();
    let mut basis: Vec<Vec<c64>> = Vec::new();
    for j in 0..m.ncols() {
        let mut v: Vec<c64> = (0..n).map(|i| m[(i, j)]).collect();
        let start = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for _ in 0..2 {
            for b in &basis {
                let proj: c64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= proj * bi;
                }
            }
        }
        let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nrm > tol * start.max(1.0) && nrm > 0.0 {
            basis.push(v.into_iter().map(|z| z / nrm).collect());
        }
    }
    Mat::from_fn(n, basis.len(), |i, j| basis[j][i])
}

/// Orthonormal basis of the eigenspace of a positive semidefinite Hermitian
/// matrix for eigenvalues `≤ tol`.
pub fn psd_null_space(m: &CMat, tol: f64) -> Result<CMat> {
    let (values, vectors) = hermitian_eigen(m)?;
    let count = values.iter().take_while(|&&v| v <= tol).count();
    Ok(vectors.get(.., 0..count).to_owned())
}

/// Number of singular values exceeding `tol`.
pub fn numerical_rank(m: &CMat, tol: f64) -> Result<usize> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(0);
    }
    let sv = m
        .singular_values()
        .map_err(|e| Error::Decomposition(format!("{e:?}")))?;
    Ok(sv.iter().filter(|&&s| s > tol).count())
}

/// Complex logarithm of the determinant via partial-pivot LU, or `None` when
/// a pivot vanishes relative to the largest pivot.
pub fn log_det(m: &CMat) -> Option<c64> {
    let n = m.nrows();
    if n == 0 {
        return Some(ZERO);
    }
    let lu = m.partial_piv_lu();
    let u = lu.U();
    let scale = (0..n).map(|i| u[(i, i)].norm()).fold(0.0, f64::max);
    let mut acc = ZERO;
    for i in 0..n {
        let d = u[(i, i)];
        if !(d.norm() > 1e-14 * scale) || !d.norm().is_finite() {
            return None;
        }
        acc += d.ln();
    }
    let (fwd, _) = lu.P().arrays();
    if permutation_is_odd(fwd) {
        acc += c64::new(0.0, std::f64::consts::PI);
    }
    Some(acc)
}

fn permutation_is_odd(perm: &[usize]) -> bool {
    let mut seen = vec![false; perm.len()];
    let mut cycles = 0usize;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        cycles += 1;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
        }
    }
    (perm.len() - cycles) % 2 == 1
}

/// Matrix as nested `[re, im]` pairs, row-major.
pub fn to_pairs(m: &CMat) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

/// Inverse of [`to_pairs`]; rows must have equal length.
pub fn from_pairs(rows: &[Vec<[f64; 2]>]) -> Result<CMat> {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != m) {
        return Err(Error::Input("ragged matrix rows".into()));
    }
    Ok(Mat::from_fn(n, m, |i, j| c64::new(rows[i][j][0], rows[i][j][1])))
}

/// Unit-circle angle in `(-π, π]`.
pub fn angle(z: c64) -> f64 {
    let a = z.arg();
    if a <= -std::f64::consts::PI {
        a + 2.0 * std::f64::consts::PI
    } else {
        a
    }
}
