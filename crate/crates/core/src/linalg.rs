//! Dense decompositions on the 64-dimensional operator space.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::spin_algebra::C64;

/// Singular values in ascending order, paired with right singular vectors.
pub(crate) struct SortedSvd {
    pub values: Vec<f64>,
    /// Column `i` is the right singular vector of `values[i]`.
    pub right: DMatrix<C64>,
}

pub(crate) fn svd_ascending(m: &DMatrix<C64>) -> Result<SortedSvd> {
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.ok_or_else(|| Error::Numerical("SVD did not return right singular vectors".into()))?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    let n = m.ncols();
    let mut right = DMatrix::zeros(n, order.len());
    let mut values = Vec::with_capacity(order.len());
    for (col, &i) in order.iter().enumerate() {
        values.push(svd.singular_values[i]);
        right.set_column(col, &v_t.row(i).adjoint());
    }
    // A wide input has an (n - rank)-dimensional null space not reported by the thin SVD.
    if order.len() < n {
        return Err(Error::Numerical("null-space extraction needs rows >= cols".into()));
    }
    Ok(SortedSvd { values, right })
}

/// Minimum-norm least-squares solve of `m x = y` dropping singular values
/// below `rcond · σ_max`.
pub(crate) fn pseudo_inverse_solve(m: &DMatrix<C64>, y: &DVector<C64>, rcond: f64) -> Result<DVector<C64>> {
    let svd = m.clone().svd(true, true);
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    svd.solve(y, rcond * smax).map_err(|e| Error::Numerical(e.to_string()))
}

pub(crate) fn condition_number(m: &DMatrix<C64>) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

pub(crate) struct Eigen {
    pub values: Vec<C64>,
    /// Column `k` is the right eigenvector of `values[k]`.
    pub vectors: DMatrix<C64>,
}

pub(crate) fn eigenvalues(m: &DMatrix<C64>) -> Result<Vec<C64>> {
    let schur = nalgebra::Schur::try_new(m.clone(), f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("Schur decomposition did not converge".into()))?;
    Ok(schur.eigenvalues().map(|v| v.iter().copied().collect()).unwrap_or_else(|| {
        let (_, t) = schur.unpack();
        t.diagonal().iter().copied().collect()
    }))
}

/// Right eigenvectors of a general complex matrix via the Schur form
/// `M = Q T Q†` and back-substitution on the triangular factor.
pub(crate) fn eigen_decompose(m: &DMatrix<C64>) -> Result<Eigen> {
    let n = m.nrows();
    let schur = nalgebra::Schur::try_new(m.clone(), f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("Schur decomposition did not converge".into()))?;
    let (q, t) = schur.unpack();
    let scale = t.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    let small = f64::EPSILON * scale;
    let mut w = DMatrix::<C64>::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for k in 0..n {
        let lambda = t[(k, k)];
        values.push(lambda);
        w[(k, k)] = C64::new(1.0, 0.0);
        for j in (0..k).rev() {
            let mut acc = C64::new(0.0, 0.0);
            for l in (j + 1)..=k {
                acc += t[(j, l)] * w[(l, k)];
            }
            let mut denom = t[(j, j)] - lambda;
            if denom.norm() < small {
                denom = C64::new(small, 0.0);
            }
            w[(j, k)] = -acc / denom;
        }
        let norm = w.column(k).norm();
        w.column_mut(k).unscale_mut(norm);
    }
    Ok(Eigen { values, vectors: q * w })
}

pub(crate) fn expm(m: &DMatrix<C64>) -> DMatrix<C64> {
    m.exp()
}
