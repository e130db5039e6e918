//! Reference implementations that share no code with the library routes
//! they check.

#![allow(dead_code)]

use ndarray::Array2;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det(mut a: Array2<C64>) -> C64 {
    let n = a.nrows();
    let mut d = C64::new(1.0, 0.0);
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[[i, k]].norm().total_cmp(&a[[j, k]].norm())).unwrap();
        if a[[p, k]].norm() == 0.0 {
            return C64::new(0.0, 0.0);
        }
        if p != k {
            for j in 0..n {
                let t = a[[k, j]];
                a[[k, j]] = a[[p, j]];
                a[[p, j]] = t;
            }
            d = -d;
        }
        d *= a[[k, k]];
        for i in k + 1..n {
            let f = a[[i, k]] / a[[k, k]];
            for j in k..n {
                let t = a[[k, j]];
                a[[i, j]] -= f * t;
            }
        }
    }
    d
}

/// Modified Gram–Schmidt on the columns.
pub fn orthonormalize(mut q: Array2<C64>) -> Array2<C64> {
    let (_, n) = q.dim();
    for k in 0..n {
        for j in 0..k {
            let ov: C64 = q.column(j).iter().zip(q.column(k).iter()).map(|(a, b)| a.conj() * b).sum();
            let cj = q.column(j).to_owned();
            for (x, y) in q.column_mut(k).iter_mut().zip(cj.iter()) {
                *x -= ov * y;
            }
        }
        let norm = q.column(k).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        q.column_mut(k).mapv_inplace(|z| z / norm);
    }
    q
}

pub fn random_slater(length: usize, particles: usize, seed: u64) -> Array2<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw = Array2::from_shape_fn((length, particles), |_| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    orthonormalize(raw)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Entanglement entropy (nats) of sites `0..ell` from the many-body state
/// `sum_S det(Q_S) c^dag_{s_1} ... c^dag_{s_N} |0>`.
///
/// Sites of the block precede the rest, so canonical ordering factorizes
/// each basis state as `|a> (x) |b>` without signs; the Schmidt weights are
/// the eigenvalues of `M M^dag` with `M[a][b]` the amplitude of `a u b`.
pub fn fock_block_entropy(q: &Array2<C64>, ell: usize) -> f64 {
    let (length, n) = q.dim();
    let left: Vec<Vec<usize>> = (0..=ell.min(n)).flat_map(|k| subsets(ell, k)).collect();
    let right_all: Vec<Vec<usize>> = (0..=n)
        .flat_map(|k| subsets(length - ell, k))
        .map(|s| s.into_iter().map(|i| i + ell).collect())
        .collect();
    let mut m = Array2::<C64>::zeros((left.len(), right_all.len()));
    for (ia, a) in left.iter().enumerate() {
        for (ib, b) in right_all.iter().enumerate() {
            if a.len() + b.len() != n {
                continue;
            }
            let rows: Vec<usize> = a.iter().chain(b.iter()).copied().collect();
            let sub = Array2::from_shape_fn((n, n), |(i, j)| q[[rows[i], j]]);
            m[[ia, ib]] = det(sub);
        }
    }
    let rho = m.dot(&m.t().mapv(|z| z.conj()));
    let trace: f64 = rho.diag().iter().map(|z| z.re).sum();
    hermitian_eigs_reference(&rho.mapv(|z| z / trace))
        .into_iter()
        .filter(|&p| p > 1e-300)
        .map(|p| -p * p.ln())
        .sum()
}

/// Eigenvalues of a Hermitian matrix through nalgebra (not LAPACK).
pub fn hermitian_eigs_reference(a: &Array2<C64>) -> Vec<f64> {
    let n = a.nrows();
    let m = nalgebra::DMatrix::<C64>::from_fn(n, n, |i, j| a[[i, j]]);
    m.symmetric_eigenvalues().iter().copied().collect()
}

/// `exp(a)` by Taylor series with scaling and squaring.
pub fn expm_taylor(a: &Array2<C64>) -> Array2<C64> {
    let n = a.nrows();
    let norm = a.iter().map(|z| z.norm()).sum::<f64>();
    let s = if norm > 0.25 { (norm / 0.25).log2().ceil() as i32 } else { 0 };
    let scaled = a.mapv(|z| z / 2f64.powi(s));
    let mut result = Array2::<C64>::eye(n);
    let mut term = Array2::<C64>::eye(n);
    for k in 1..40 {
        term = term.dot(&scaled).mapv(|z| z / k as f64);
        result = result + &term;
    }
    for _ in 0..s {
        result = result.dot(&result);
    }
    result
}

/// Open-chain effective Hamiltonian written out independently of the library.
pub fn chain(gamma: f64, delta: f64, length: usize) -> Array2<C64> {
    let mut h = Array2::<C64>::zeros((length, length));
    for j in 0..length {
        h[[j, j]] = C64::new(delta * (j + 1) as f64, 0.0);
        if j + 1 < length {
            h[[j, j + 1]] = C64::new(-(1.0 - gamma), 0.0);
            h[[j + 1, j]] = C64::new(-(1.0 + gamma), 0.0);
        }
    }
    h
}

/// Smooth master curve for synthetic collapse data.
pub fn master_curve(x: f64, a: f64, b: f64, c: f64) -> f64 {
    c + a / (1.0 + (x / b).powi(2))
}

/// `S = L^{z/v} f(L^{1/v} (D - D_c))` on the given grid.
pub fn synthetic_collapse(
    sizes: &[usize],
    deltas: &[f64],
    delta_c: f64,
    nu: f64,
    zeta: f64,
    f: impl Fn(f64) -> f64,
) -> starkskin::scaling::ScalingDataset {
    let mut pts = Vec::new();
    for &l in sizes {
        for &d in deltas {
            let lf = l as f64;
            let x = lf.powf(1.0 / nu) * (d - delta_c);
            pts.push(starkskin::scaling::ScalingPoint::new(l, d, lf.powf(zeta / nu) * f(x)));
        }
    }
    starkskin::scaling::ScalingDataset::new(pts)
}
