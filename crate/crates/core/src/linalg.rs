//! Dense linear-algebra helpers on top of nalgebra.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen, SVD};
use num_complex::Complex64;

pub type RMat = DMatrix<f64>;
pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

#[cfg(test)]
pub(crate) const C0: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const C1: Complex64 = Complex64::new(1.0, 0.0);

/// Largest absolute entry.
pub fn max_abs(m: &RMat) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

pub fn max_abs_c(m: &CMat) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.norm()))
}

pub fn complexify(m: &RMat) -> CMat {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Entrywise conjugate (not the adjoint).
pub fn conj(m: &CMat) -> CMat {
    m.map(|z| z.conj())
}

/// Relative tolerance used to decide whether two eigenvalues coincide.
pub(crate) fn cluster_tol(scale: f64) -> f64 {
    1e-9 * scale.max(1.0)
}

/// Eigendecomposition of a real symmetric matrix with ascending eigenvalues.
///
/// Columns of the returned matrix are orthonormal eigenvectors. Within a
/// degenerate cluster the basis is fixed by projecting e_1, e_2, ... onto the
/// eigenspace and orthonormalising in that order, so the output does not
/// depend on the internal iteration of the solver. Each vector's first
/// non-negligible component is positive.
pub fn symmetric_eigen(h: &RMat) -> (DVector<f64>, RMat) {
    let n = h.nrows();
    let sym = (h + h.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let raw = RMat::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);

    let tol = cluster_tol(max_abs(h));
    let mut vectors = RMat::zeros(n, n);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[end] - values[end - 1] <= tol {
            end += 1;
        }
        let basis = raw.columns(start, end - start).into_owned();
        let canon = if end - start == 1 {
            basis
        } else {
            canonical_basis(&basis)
        };
        for (k, col) in canon.column_iter().enumerate() {
            vectors.set_column(start + k, &fix_sign(col.into_owned()));
        }
        start = end;
    }
    (values, vectors)
}

/// Canonical orthonormal basis of the column span of `basis`.
fn canonical_basis(basis: &RMat) -> RMat {
    let (n, k) = basis.shape();
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(k);
    for i in 0..n {
        if out.len() == k {
            break;
        }
        // P e_i = V (V^T e_i) = V * row_i(V)^T
        let mut v = basis * basis.row(i).transpose();
        for u in &out {
            let p = u.dot(&v);
            v -= u * p;
        }
        // second pass keeps orthogonality at round-off level
        for u in &out {
            let p = u.dot(&v);
            v -= u * p;
        }
        let norm = v.norm();
        if norm > 1e-6 {
            out.push(v / norm);
        }
    }
    debug_assert_eq!(out.len(), k);
    RMat::from_columns(&out)
}

fn fix_sign(mut v: DVector<f64>) -> DVector<f64> {
    let scale = v.amax();
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-8 * scale) {
        if *first < 0.0 {
            v.neg_mut();
        }
    }
    v
}

/// Hermitian counterpart of [`symmetric_eigen`]: ascending real eigenvalues,
/// unitary eigenvector columns, degenerate clusters fixed by projecting
/// e_1, e_2, ..., and each column rotated so its first non-negligible
/// component is real positive.
pub fn hermitian_eigen(h: &CMat) -> (DVector<f64>, CMat) {
    let n = h.nrows();
    let herm = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(herm);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let raw = CMat::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);

    let tol = cluster_tol(max_abs_c(h));
    let mut vectors = CMat::zeros(n, n);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[end] - values[end - 1] <= tol {
            end += 1;
        }
        let basis = raw.columns(start, end - start).into_owned();
        let canon = if end - start == 1 {
            basis
        } else {
            canonical_basis_c(&basis)
        };
        for (k, col) in canon.column_iter().enumerate() {
            vectors.set_column(start + k, &fix_phase(col.into_owned()));
        }
        start = end;
    }
    (values, vectors)
}

fn canonical_basis_c(basis: &CMat) -> CMat {
    let (n, k) = basis.shape();
    let mut out: Vec<CVec> = Vec::with_capacity(k);
    for i in 0..n {
        if out.len() == k {
            break;
        }
        // P e_i = V V† e_i
        let mut v = basis * basis.row(i).adjoint();
        for _ in 0..2 {
            for u in &out {
                let p = u.dotc(&v);
                v -= u * p;
            }
        }
        let norm = v.norm();
        if norm > 1e-6 {
            out.push(v / Complex64::new(norm, 0.0));
        }
    }
    debug_assert_eq!(out.len(), k);
    CMat::from_columns(&out)
}

fn fix_phase(v: CVec) -> CVec {
    let scale = v.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
    match v.iter().find(|z| z.norm() > 1e-8 * scale) {
        Some(first) => {
            let phase = first.conj() / first.norm();
            v * phase
        }
        None => v,
    }
}

/// Eigendecomposition `A = V diag(λ) V⁻¹` of a general complex matrix.
///
/// Eigenvalues come from the diagonal of the complex Schur form. Eigenvalues
/// that agree within a small relative tolerance are merged and the
/// corresponding eigenvectors are taken as the right singular vectors of
/// `A - λ̄ I` with the smallest singular values, which gives a well
/// conditioned basis for genuinely degenerate (diagonalisable) clusters.
/// Columns are unit norm, with the largest-modulus component real positive.
/// No ordering is imposed. A merged cluster without a full set of
/// eigenvectors yields `DefectiveMatrix`.
pub fn eigen_general(a: &CMat) -> Result<(CVec, CMat)> {
    let n = a.nrows();
    if n == 0 {
        return Ok((CVec::zeros(0), CMat::zeros(0, 0)));
    }
    let schur = Schur::try_new(a.clone(), f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Eigen("Schur iteration did not converge".into()))?;
    let (_, t) = schur.unpack();
    let diag: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();
    if diag.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Eigen("non-finite eigenvalue".into()));
    }

    let tol = cluster_tol(max_abs_c(a));
    let null_tol = 1e-8 * max_abs_c(a).max(1.0);
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut assigned = vec![false; n];
    for i in 0..n {
        if assigned[i] {
            continue;
        }
        let mut members = vec![i];
        assigned[i] = true;
        // single-linkage closure so chains of near-equal values merge
        let mut k = 0;
        while k < members.len() {
            let z = diag[members[k]];
            for j in 0..n {
                if !assigned[j] && (diag[j] - z).norm() <= tol {
                    assigned[j] = true;
                    members.push(j);
                }
            }
            k += 1;
        }
        members.sort_unstable();
        clusters.push(members);
    }

    let mut values = Vec::with_capacity(n);
    let mut columns: Vec<CVec> = Vec::with_capacity(n);
    for members in clusters {
        let k = members.len();
        let mean = members.iter().map(|&i| diag[i]).sum::<Complex64>() / k as f64;
        let shifted = a - CMat::identity(n, n) * mean;
        let svd = SVD::new(shifted, false, true);
        if k > 1 && svd.singular_values[n - k] > null_tol {
            // geometric multiplicity below algebraic: no eigenvector basis
            return Err(Error::DefectiveMatrix {
                condition: f64::INFINITY,
            });
        }
        let v_t = svd
            .v_t
            .ok_or_else(|| Error::Eigen("SVD did not return right singular vectors".into()))?;
        // singular values are sorted in decreasing order; the null space sits at the end
        for r in (n - k)..n {
            let v: CVec = v_t.row(r).adjoint();
            columns.push(normalize_phase(v));
        }
        for &i in &members {
            values.push(if k == 1 { diag[i] } else { mean });
        }
    }
    Ok((CVec::from_vec(values), CMat::from_columns(&columns)))
}

/// Unit-normalise and rotate so the largest-modulus entry is real positive.
pub(crate) fn normalize_phase(v: CVec) -> CVec {
    let norm = v.norm();
    let v = v / Complex64::new(norm, 0.0);
    let max = v.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
    let pivot = v
        .iter()
        .find(|z| z.norm() >= max * (1.0 - 1e-12))
        .copied()
        .unwrap_or(C1);
    let phase = pivot.conj() / pivot.norm();
    v * phase
}

/// 2-norm condition number from the singular values.
pub fn condition_number(m: &CMat) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.max();
    let min = sv.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

pub fn inverse(m: &CMat) -> Result<CMat> {
    m.clone()
        .try_inverse()
        .ok_or_else(|| Error::Eigen("matrix is singular".into()))
}

/// `I ⊗ M + N ⊗ I`. With column-stacking `vec`, `vec(M X + X Nᵀ)` equals
/// `kron_sum(M, N) * vec(X)`.
pub fn kron_sum(m: &CMat, n: &CMat) -> CMat {
    let d = m.nrows();
    let id = CMat::identity(d, d);
    id.kronecker(m) + n.kronecker(&id)
}
