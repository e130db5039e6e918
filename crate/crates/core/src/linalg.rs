//! Dense complex linear-algebra helpers shared by the physics modules.
//!
//! LAPACK (through `ndarray-linalg`) does the heavy lifting; this module adds
//! the conventions the rest of the crate relies on: a QR factorization with a
//! non-negative real diagonal, diagonal balancing of non-normal matrices,
//! and a Padé scaling-and-squaring exponential.

use ndarray::{Array1, Array2, ArrayView2, Axis};
use ndarray_linalg::{EigValsh, QR, UPLO};
use num_complex::Complex64;

use crate::error::Result;

pub type C64 = Complex64;

/// Conjugate transpose.
pub fn dagger(a: ArrayView2<'_, C64>) -> Array2<C64> {
    a.t().mapv(|z| z.conj())
}

pub fn max_abs(a: ArrayView2<'_, C64>) -> f64 {
    a.iter().fold(0.0_f64, |m, z| m.max(z.norm()))
}

/// `max |a_ij - conj(a_ji)|`.
pub fn hermiticity_defect(a: ArrayView2<'_, C64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[[i, j]] - a[[j, i]].conj()).norm());
        }
    }
    worst
}

/// Ascending eigenvalues of a Hermitian matrix (lower triangle is read).
pub fn hermitian_eigenvalues(a: &Array2<C64>) -> Result<Array1<f64>> {
    if a.is_empty() {
        return Ok(Array1::zeros(0));
    }
    if a.len() == 1 {
        return Ok(Array1::from_elem(1, a[[0, 0]].re));
    }
    // LAPACK needs a contiguous layout; `select` and slicing may not give one.
    let dense = Array2::from_shape_fn(a.dim(), |ix| a[ix]);
    Ok(dense.eigvalsh(UPLO::Lower)?)
}

extern "C" {
    fn openblas_set_num_threads(num_threads: std::os::raw::c_int);
}

/// Restricts OpenBLAS to one thread so reductions happen in a fixed order
/// whatever the surrounding parallelism.
pub fn pin_blas_threads() {
    static ONCE: std::sync::Once = std::sync::Once::new();
    // SAFETY: plain setter exported by every OpenBLAS build.
    ONCE.call_once(|| unsafe { openblas_set_num_threads(1) });
}

/// Thin QR factorization `a = q r` with `r` carrying a non-negative real
/// diagonal, which makes the factors unique for full-rank input.
pub fn qr_positive(a: &Array2<C64>) -> Result<(Array2<C64>, Array2<C64>)> {
    let (mut q, mut r) = a.qr()?;
    for k in 0..r.nrows().min(r.ncols()) {
        let d = r[[k, k]];
        let m = d.norm();
        if m > 0.0 {
            let phase = d / m;
            q.column_mut(k).mapv_inplace(|z| z * phase);
            r.row_mut(k).mapv_inplace(|z| z * phase.conj());
            r[[k, k]] = C64::new(m, 0.0);
        }
    }
    Ok((q, r))
}

/// Balances `a` in place by a diagonal similarity and returns the scaling
/// `d`, so that `a_in = diag(d) a_out diag(d)^-1`.
///
/// Diagonal similarities leave the spectrum unchanged while removing the
/// exponential row/column grading of non-reciprocal chains; eigenvectors of
/// the balanced matrix are then well conditioned.
///
/// Norm balancing alone converges slowly on such chains: every bulk row and
/// column of a uniform chain already has equal norms, so the gauge only
/// diffuses in from the ends. The iteration is therefore seeded with the
/// gauge that equalizes `|a[i][i+1]|` and `|a[i+1][i]|`, kept when it lowers
/// the off-diagonal Frobenius norm, and then refined by Osborne sweeps.
pub fn balance(a: &mut Array2<C64>) -> Array1<f64> {
    let n = a.nrows();
    let off_norm = |log_d: &[f64]| -> f64 {
        let mut s = 0.0;
        for ((i, j), z) in a.indexed_iter() {
            if i != j && *z != C64::new(0.0, 0.0) {
                s += z.norm_sqr() * (2.0 * (log_d[j] - log_d[i])).exp();
            }
        }
        s
    };
    let mut log_d = vec![0.0; n];
    let mut seed = vec![0.0; n];
    for i in 0..n.saturating_sub(1) {
        let (up, down) = (a[[i, i + 1]].norm(), a[[i + 1, i]].norm());
        seed[i + 1] = seed[i] + if up > 0.0 && down > 0.0 { 0.5 * (down / up).ln() } else { 0.0 };
    }
    let mean = seed.iter().sum::<f64>() / n.max(1) as f64;
    seed.iter_mut().for_each(|v| *v -= mean);
    let seeded = off_norm(&seed);
    if seeded.is_finite() && seeded < off_norm(&log_d) {
        log_d = seed;
    }
    for ((i, j), z) in a.indexed_iter_mut() {
        if i != j {
            *z *= (log_d[j] - log_d[i]).exp();
        }
    }

    let max_sweeps = 100 * n.max(1);
    for _ in 0..max_sweeps {
        let mut largest = 0.0_f64;
        for i in 0..n {
            let c: f64 = a.column(i).iter().enumerate().filter(|&(j, _)| j != i).map(|(_, z)| z.norm_sqr()).sum();
            let r: f64 = a.row(i).iter().enumerate().filter(|&(j, _)| j != i).map(|(_, z)| z.norm_sqr()).sum();
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let log_f = 0.25 * (r / c).ln();
            if log_f.abs() < 1e-3 {
                continue;
            }
            largest = largest.max(log_f.abs());
            let f = log_f.exp();
            log_d[i] += log_f;
            for j in 0..n {
                if j != i {
                    a[[j, i]] *= f;
                    a[[i, j]] /= f;
                }
            }
        }
        if largest == 0.0 {
            break;
        }
    }
    log_d.iter().map(|v| v.exp()).collect()
}

/// Matrix exponential by Padé approximation with scaling and squaring.
pub fn expm(a: &Array2<C64>) -> Array2<C64> {
    let (n, m) = a.dim();
    let na = nalgebra::DMatrix::<C64>::from_fn(n, m, |i, j| a[[i, j]]);
    let e = na.exp();
    Array2::from_shape_fn((n, m), |(i, j)| e[(i, j)])
}

/// Principal submatrix on the given (0-based) indices.
pub fn principal_submatrix(a: ArrayView2<'_, C64>, idx: &[usize]) -> Array2<C64> {
    a.select(Axis(0), idx).select(Axis(1), idx)
}
