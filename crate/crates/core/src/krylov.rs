//! Matrix-free Krylov routines: lowest eigenpairs by Lanczos with full
//! reorthogonalization, explicit restarts and locking, and the action of
//! `exp(-iτA)` on a vector.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::matrix::{Scalar, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosOptions {
    /// Krylov basis size per cycle before an explicit restart.
    pub max_krylov: usize,
    pub max_restarts: usize,
    /// Residual tolerance relative to the operator norm bound.
    pub rel_tol: f64,
    /// Weight of the pseudo-random component mixed into warm starts, so that
    /// symmetric starting vectors do not confine the Krylov space.
    pub warm_noise: f64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions {
            max_krylov: 80,
            max_restarts: 60,
            rel_tol: 1e-9,
            warm_noise: 0.05,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Eigenpair<T> {
    pub value: f64,
    pub vector: Vec<T>,
    pub residual: f64,
}

/// Deterministic start vector with entries in `[-1, 1)`.
fn pseudo_random<T: Scalar>(dim: usize, salt: u64) -> Vec<T> {
    let mut state = 0x9E37_79B9_7F4A_7C15u64 ^ salt.wrapping_mul(0xD1B5_4A32_D192_ED03);
    (0..dim)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            T::from_real((state >> 11) as f64 / (1u64 << 52) as f64 - 1.0)
        })
        .collect()
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    let mut acc = [T::zero(); 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let tail = ca.remainder().iter().zip(cb.remainder());
    for (x, y) in ca.zip(cb) {
        for k in 0..4 {
            acc[k] += x[k].conjugate() * y[k];
        }
    }
    let head = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    tail.fold(head, |s, (x, y)| s + x.conjugate() * *y)
}

fn norm<T: Scalar>(a: &[T]) -> f64 {
    let mut acc = [0.0f64; 4];
    let chunks = a.chunks_exact(4);
    let tail: f64 = chunks.remainder().iter().map(|x| x.modulus_squared()).sum();
    for x in chunks {
        for k in 0..4 {
            acc[k] += x[k].modulus_squared();
        }
    }
    ((acc[0] + acc[1]) + (acc[2] + acc[3]) + tail).sqrt()
}

fn axpy<T: Scalar>(alpha: T, x: &[T], y: &mut [T]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * *xi;
    }
}

fn scale<T: Scalar>(x: &mut [T], s: f64) {
    let s = T::from_real(s);
    for xi in x.iter_mut() {
        *xi *= s;
    }
}

/// Classical Gram-Schmidt against `basis`, repeated once when the first
/// pass cancels most of the norm.
fn orthogonalize<T: Scalar>(v: &mut [T], basis: &[Vec<T>]) {
    if basis.is_empty() {
        return;
    }
    let before = norm(v);
    for q in basis {
        let c = dot(q, v);
        axpy(-c, q, v);
    }
    if norm(v) < 0.7 * before {
        for q in basis {
            let c = dot(q, v);
            axpy(-c, q, v);
        }
    }
}

/// Lowest eigenpair of the symmetric tridiagonal matrix with diagonal
/// `alphas` and off-diagonal `betas`.
fn lowest_ritz(alphas: &[f64], betas: &[f64]) -> (f64, DVector<f64>) {
    let m = alphas.len();
    let tri = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alphas[i]
        } else if i + 1 == j {
            betas[i]
        } else if j + 1 == i {
            betas[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(tri);
    let (imin, theta) = eig
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
    (theta, eig.eigenvectors.column(imin).into_owned())
}

/// The `k` lowest eigenpairs of the Hermitian operator `apply`.
///
/// Each eigenpair is found by a separate Lanczos run restricted to the
/// orthogonal complement of the pairs already locked, so degenerate levels
/// are resolved. Every accepted pair satisfies
/// `‖Av − λv‖ ≤ rel_tol · norm_bound`.
pub fn lowest_eigenpairs<T, F>(
    apply: F,
    dim: usize,
    k: usize,
    norm_bound: f64,
    opts: &LanczosOptions,
    warm: Option<&[Vec<T>]>,
) -> Result<Vec<Eigenpair<T>>>
where
    T: Scalar,
    F: Fn(&[T], &mut [T]),
{
    if k == 0 || k > dim {
        return Err(Error::InvalidEigenCount { k, dim });
    }
    let tol = opts.rel_tol * norm_bound.max(f64::MIN_POSITIVE);
    let mut locked: Vec<Vec<T>> = Vec::with_capacity(k);
    let mut pairs = Vec::with_capacity(k);
    let mut work = vec![T::zero(); dim];

    for target in 0..k {
        let mut start: Vec<T> = pseudo_random(dim, target as u64 + 1);
        if let Some(w) = warm.and_then(|w| w.get(target)).filter(|w| w.len() == dim) {
            let wn = norm(w);
            if wn > 0.0 {
                let sn = norm(&start);
                let mix = opts.warm_noise;
                start = w
                    .iter()
                    .zip(&start)
                    .map(|(a, b)| *a * T::from_real(1.0 / wn) + *b * T::from_real(mix / sn))
                    .collect();
            }
        }
        let mut best_residual = f64::INFINITY;
        let mut found = None;
        for _restart in 0..=opts.max_restarts {
            orthogonalize(&mut start, &locked);
            let sn = norm(&start);
            if sn < 1e-300 {
                start = pseudo_random(dim, 1000 + target as u64);
                orthogonalize(&mut start, &locked);
            }
            let sn = norm(&start);
            scale(&mut start, 1.0 / sn);

            let remaining = dim - locked.len();
            let m_max = opts.max_krylov.min(remaining).max(1);
            let mut basis: Vec<Vec<T>> = Vec::with_capacity(m_max);
            let mut alphas: Vec<f64> = Vec::with_capacity(m_max);
            let mut betas: Vec<f64> = Vec::with_capacity(m_max);
            basis.push(start.clone());
            loop {
                let j = basis.len() - 1;
                apply(&basis[j], &mut work);
                let alpha = dot(&basis[j], &work).real();
                alphas.push(alpha);
                axpy(T::from_real(-alpha), &basis[j], &mut work);
                if j > 0 {
                    axpy(T::from_real(-betas[j - 1]), &basis[j - 1], &mut work);
                }
                orthogonalize(&mut work, &locked);
                orthogonalize(&mut work, &basis);
                let beta = norm(&work);
                if basis.len() >= m_max || beta <= 1e-14 * norm_bound.max(1.0) {
                    break;
                }
                // residual estimate of the lowest Ritz pair: β_m |y_m|
                let m = alphas.len();
                if m >= 4 && m % 4 == 0 {
                    let (_, y) = lowest_ritz(&alphas, &betas);
                    if beta * y[m - 1].abs() <= 0.1 * tol {
                        break;
                    }
                }
                betas.push(beta);
                let mut next = work.clone();
                scale(&mut next, 1.0 / beta);
                basis.push(next);
            }
            let m = alphas.len();
            let (_, y) = lowest_ritz(&alphas, &betas[..m - 1]);
            let mut ritz = vec![T::zero(); dim];
            for (coef, q) in y.iter().zip(&basis) {
                axpy(T::from_real(*coef), q, &mut ritz);
            }
            orthogonalize(&mut ritz, &locked);
            let rn = norm(&ritz);
            scale(&mut ritz, 1.0 / rn);
            apply(&ritz, &mut work);
            let rq = dot(&ritz, &work).real();
            axpy(T::from_real(-rq), &ritz, &mut work);
            let residual = norm(&work);
            best_residual = best_residual.min(residual);
            if residual <= tol || m >= remaining {
                found = Some(Eigenpair {
                    value: rq,
                    vector: ritz,
                    residual,
                });
                break;
            }
            start = ritz;
        }
        match found {
            Some(p) => {
                locked.push(p.vector.clone());
                pairs.push(p);
            }
            None => {
                return Err(Error::NonConvergence {
                    iterations: (opts.max_restarts + 1) * opts.max_krylov,
                    residual: best_residual,
                })
            }
        }
    }
    pairs.sort_by(|a, b| a.value.total_cmp(&b.value));
    Ok(pairs)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpmvOptions {
    /// Absolute error target on the propagated (unit) vector.
    pub tol: f64,
    pub max_krylov: usize,
}

impl Default for ExpmvOptions {
    fn default() -> Self {
        ExpmvOptions {
            tol: 1e-13,
            max_krylov: 60,
        }
    }
}

/// `exp(-i τ A) v` for Hermitian `A` given as a matvec on complex vectors.
///
/// The Krylov dimension grows until the a-posteriori estimate
/// `β_m |[exp(-iτT_m) e_1]_m| ‖v‖` falls below `tol`; when the estimate
/// still fails at `max_krylov`, the step is reported as unconverged so the
/// caller can shrink `τ`.
pub fn expmv<F>(apply: F, v: &[C64], tau: f64, opts: &ExpmvOptions) -> (Vec<C64>, bool)
where
    F: Fn(&[C64], &mut [C64]),
{
    let dim = v.len();
    let vnorm = norm(v);
    if vnorm == 0.0 || tau == 0.0 {
        return (v.to_vec(), true);
    }
    let m_max = opts.max_krylov.min(dim);
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(m_max);
    let mut q0 = v.to_vec();
    scale(&mut q0, 1.0 / vnorm);
    basis.push(q0);
    let mut alphas = Vec::with_capacity(m_max);
    let mut betas: Vec<f64> = Vec::with_capacity(m_max);
    let mut work = vec![C64::new(0.0, 0.0); dim];
    // the estimate needs a small eigendecomposition, so it is evaluated at
    // geometrically spaced Krylov sizes
    let mut next_check = 4;
    loop {
        let j = basis.len() - 1;
        apply(&basis[j], &mut work);
        let alpha = dot(&basis[j], &work).re;
        alphas.push(alpha);
        axpy(C64::new(-alpha, 0.0), &basis[j], &mut work);
        if j > 0 {
            axpy(C64::new(-betas[j - 1], 0.0), &basis[j - 1], &mut work);
        }
        orthogonalize(&mut work, &basis);
        let beta = norm(&work);
        let m = alphas.len();
        let breakdown = beta <= 1e-14 * (alpha.abs() + 1.0);
        if breakdown || m >= m_max || m >= next_check {
            let small = exp_tridiag(&alphas, &betas, tau);
            let estimate = beta * small[m - 1].norm() * vnorm;
            if breakdown || estimate <= opts.tol || m >= m_max {
                let mut out = vec![C64::new(0.0, 0.0); dim];
                for (c, q) in small.iter().zip(&basis) {
                    axpy(*c * vnorm, q, &mut out);
                }
                let ok = breakdown || estimate <= opts.tol || m == dim;
                return (out, ok);
            }
            next_check = m + 1 + m / 4;
        }
        betas.push(beta);
        let mut next = work.clone();
        scale(&mut next, 1.0 / beta);
        basis.push(next);
    }
}

/// First column of `exp(-iτT)` for the symmetric tridiagonal `T`.
fn exp_tridiag(alphas: &[f64], betas: &[f64], tau: f64) -> Vec<C64> {
    let m = alphas.len();
    let tri = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alphas[i]
        } else if i + 1 == j {
            betas[i]
        } else if j + 1 == i {
            betas[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(tri);
    let u = &eig.eigenvectors;
    let weights = DVector::from_fn(m, |k, _| {
        let phase = C64::new(0.0, -tau * eig.eigenvalues[k]).exp();
        phase * u[(0, k)]
    });
    (0..m)
        .map(|i| (0..m).map(|k| weights[k] * u[(i, k)]).sum())
        .collect()
}
