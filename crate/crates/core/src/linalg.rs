//! Thin helpers over `faer` for dense complex matrices.

use faer::{c64, Mat};

use crate::error::{Error, Result};

pub type CMat = Mat<c64>;

pub fn identity(n: usize) -> CMat {
    Mat::from_fn(n, n, |i, j| if i == j { c64::new(1.0, 0.0) } else { c64::new(0.0, 0.0) })
}

pub fn zeros(rows: usize, cols: usize) -> CMat {
    Mat::from_fn(rows, cols, |_, _| c64::new(0.0, 0.0))
}

pub fn from_real(rows: &[&[f64]]) -> CMat {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    Mat::from_fn(n, m, |i, j| c64::new(rows[i][j], 0.0))
}

pub fn diag(entries: &[c64]) -> CMat {
    let n = entries.len();
    Mat::from_fn(n, n, |i, j| if i == j { entries[i] } else { c64::new(0.0, 0.0) })
}

pub fn adjoint(a: &CMat) -> CMat {
    Mat::from_fn(a.ncols(), a.nrows(), |i, j| a[(j, i)].conj())
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (br, bc) = (b.nrows(), b.ncols());
    Mat::from_fn(a.nrows() * br, a.ncols() * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

pub fn scale(a: &CMat, s: c64) -> CMat {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * s)
}

pub fn add(a: &CMat, b: &CMat) -> CMat {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] + b[(i, j)])
}

pub fn sub(a: &CMat, b: &CMat) -> CMat {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] - b[(i, j)])
}

/// `a + s * I`.
pub fn shift(a: &CMat, s: c64) -> CMat {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| if i == j { a[(i, j)] + s } else { a[(i, j)] })
}

pub fn trace(a: &CMat) -> c64 {
    (0..a.nrows().min(a.ncols())).fold(c64::new(0.0, 0.0), |acc, i| acc + a[(i, i)])
}

/// Trace divided by the dimension.
pub fn normalized_trace(a: &CMat) -> c64 {
    trace(a) / a.nrows() as f64
}

/// `tr(a * b)` without forming the product.
pub fn trace_of_product(a: &CMat, b: &CMat) -> c64 {
    let mut acc = c64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Hermitian (Frobenius) inner product `tr(a^* b)`.
pub fn inner(a: &CMat, b: &CMat) -> c64 {
    let mut acc = c64::new(0.0, 0.0);
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            acc += a[(i, j)].conj() * b[(i, j)];
        }
    }
    acc
}

pub fn max_abs(a: &CMat) -> f64 {
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max(a[(i, j)].norm());
        }
    }
    m
}

pub fn frobenius(a: &CMat) -> f64 {
    inner(a, a).re.sqrt()
}

pub fn singular_values(a: &CMat) -> Result<Vec<f64>> {
    a.singular_values().map_err(|e| Error::Svd(format!("{e:?} on {}x{} matrix", a.nrows(), a.ncols())))
}

/// Largest singular value.
pub fn spectral_norm(a: &CMat) -> Result<f64> {
    Ok(singular_values(a)?.into_iter().fold(0.0, f64::max))
}

pub fn eigenvalues(a: &CMat) -> Result<Vec<c64>> {
    let ev = a.eigenvalues().map_err(|e| {
        Error::Eigensolve(format!(
            "{e:?} on {n}x{n} matrix with max entry {:.3e}",
            max_abs(a),
            n = a.nrows()
        ))
    })?;
    if let Some(bad) = ev.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Eigensolve(format!(
            "non-finite eigenvalue at index {bad} of {n}x{n} matrix, frobenius norm {:.3e}",
            frobenius(a),
            n = a.nrows()
        )));
    }
    Ok(ev)
}

/// Eigenvalues and right eigenvectors (columns, unit norm).
pub fn eigen(a: &CMat) -> Result<(Vec<c64>, CMat)> {
    let e = a.eigen().map_err(|e| Error::Eigensolve(format!("{e:?} on {n}x{n} matrix", n = a.nrows())))?;
    let n = a.nrows();
    let values = (0..n).map(|i| e.S()[i]).collect();
    Ok((values, e.U().to_owned()))
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(a: &CMat) -> Result<(Vec<f64>, CMat)> {
    let e = a
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|e| Error::Eigensolve(format!("{e:?} on {n}x{n} hermitian matrix", n = a.nrows())))?;
    let n = a.nrows();
    let values = (0..n).map(|i| e.S()[i].re).collect();
    Ok((values, e.U().to_owned()))
}

pub fn block(a: &CMat, row: usize, col: usize, rows: usize, cols: usize) -> CMat {
    Mat::from_fn(rows, cols, |i, j| a[(row + i, col + j)])
}

/// Matrix power for `k >= 0`.
pub fn pow(a: &CMat, k: u32) -> CMat {
    let mut out = identity(a.nrows());
    let mut base = a.clone();
    let mut k = k;
    while k > 0 {
        if k & 1 == 1 {
            out = &out * &base;
        }
        k >>= 1;
        if k > 0 {
            base = &base * &base;
        }
    }
    out
}

/// Orthonormal basis for the nullspace of `a`, using a relative singular
/// value cutoff.
#[derive(Debug, Clone)]
pub struct NullSpace {
    /// Columns span the nullspace.
    pub basis: CMat,
    /// Ratio between the smallest kept singular value and the largest
    /// discarded one; large means a clean decision.
    pub gap_ratio: f64,
}

pub fn null_space(a: &CMat, rel_tol: f64) -> Result<NullSpace> {
    let n = a.ncols();
    if n == 0 {
        return Ok(NullSpace { basis: zeros(0, 0), gap_ratio: f64::INFINITY });
    }
    // Pad short-wide inputs so the SVD returns a full right basis.
    let padded;
    let a = if a.nrows() < n {
        padded = Mat::from_fn(n, n, |i, j| if i < a.nrows() { a[(i, j)] } else { c64::new(0.0, 0.0) });
        &padded
    } else {
        a
    };
    let svd = a.svd().map_err(|e| Error::Svd(format!("{e:?}")))?;
    let s: Vec<f64> = (0..n).map(|i| svd.S()[i].re).collect();
    let smax = s.first().copied().unwrap_or(0.0);
    let cutoff = rel_tol * smax.max(f64::MIN_POSITIVE);
    let rank = s.iter().take_while(|&&x| x > cutoff).count();
    let v = svd.V();
    let basis = Mat::from_fn(n, n - rank, |i, j| v[(i, rank + j)]);
    let gap_ratio = match (rank, n - rank) {
        (0, _) | (_, 0) => f64::INFINITY,
        (r, _) => s[r - 1] / s[r].max(f64::MIN_POSITIVE),
    };
    Ok(NullSpace { basis, gap_ratio })
}

/// Gram-Schmidt (with one re-orthogonalization pass) of the columns of
/// `vectors` against an already orthonormal `existing` set. Columns whose
/// residual falls below `rel_tol` of their original norm are dropped.
pub fn orthonormal_columns(vectors: &[Vec<c64>], rel_tol: f64) -> Vec<Vec<c64>> {
    let mut out: Vec<Vec<c64>> = Vec::new();
    for v in vectors {
        if let Some(u) = orthonormalize_against(&out, v, rel_tol) {
            out.push(u);
        }
    }
    out
}

pub fn orthonormalize_against(basis: &[Vec<c64>], v: &[c64], rel_tol: f64) -> Option<Vec<c64>> {
    let norm0 = vnorm(v);
    if norm0 == 0.0 {
        return None;
    }
    let mut w = v.to_vec();
    for _ in 0..2 {
        for b in basis {
            let c = vdot(b, &w);
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi -= c * bi;
            }
        }
    }
    let norm = vnorm(&w);
    if norm <= rel_tol * norm0 {
        return None;
    }
    Some(w.into_iter().map(|x| x / norm).collect())
}

/// `sum conj(a_i) b_i`.
pub fn vdot(a: &[c64], b: &[c64]) -> c64 {
    a.iter().zip(b).fold(c64::new(0.0, 0.0), |acc, (x, y)| acc + x.conj() * y)
}

pub fn vnorm(a: &[c64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Column-major flattening.
pub fn vec_of(a: &CMat) -> Vec<c64> {
    let mut out = Vec::with_capacity(a.nrows() * a.ncols());
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            out.push(a[(i, j)]);
        }
    }
    out
}

pub fn mat_of(v: &[c64], rows: usize, cols: usize) -> CMat {
    Mat::from_fn(rows, cols, |i, j| v[j * rows + i])
}

pub fn columns(a: &CMat) -> Vec<Vec<c64>> {
    (0..a.ncols()).map(|j| (0..a.nrows()).map(|i| a[(i, j)]).collect()).collect()
}

pub fn from_columns(cols: &[Vec<c64>], rows: usize) -> CMat {
    Mat::from_fn(rows, cols.len(), |i, j| cols[j][i])
}

/// Orthogonal projection onto the span of orthonormal columns.
pub fn projection_onto(cols: &[Vec<c64>], dim: usize) -> CMat {
    let q = from_columns(cols, dim);
    &q * &adjoint(&q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kron_places_blocks() {
        let a = from_real(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let k = kron(&a, &identity(2));
        assert_eq!(k[(0, 2)], c64::new(2.0, 0.0));
        assert_eq!(k[(3, 1)], c64::new(3.0, 0.0));
        assert_eq!(k[(3, 0)], c64::new(0.0, 0.0));
    }

    #[test]
    fn null_space_of_rank_one() {
        let a = from_real(&[&[1.0, 1.0, 0.0], &[2.0, 2.0, 0.0]]);
        let ns = null_space(&a, 1e-9).unwrap();
        assert_eq!(ns.basis.ncols(), 2);
        let r = &a * &ns.basis;
        assert!(max_abs(&r) < 1e-12);
    }

    #[test]
    fn pow_matches_repeated_product() {
        let a = from_real(&[&[0.5, 1.0], &[-1.0, 0.25]]);
        let p = pow(&a, 5);
        let mut q = identity(2);
        for _ in 0..5 {
            q = &q * &a;
        }
        assert!(max_abs(&sub(&p, &q)) < 1e-14);
    }
}
