//! Numeric kernels shared by the cascade and Markov scenarios: symmetric
//! eigendecomposition (cyclic Jacobi), spectral matrix powers, dominant
//! eigenvalue by power iteration, and the matrix exponential by scaling
//! and squaring.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::splitmix64;

pub const DEFAULT_JACOBI_TOL: f64 = 1e-10;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigendecomposition M = B diag(λ) Bᵀ of a real symmetric matrix.
/// Eigenvalues are sorted descending; `basis` columns are the matching
/// orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub basis: Matrix,
}

impl EigenDecomposition {
    /// B diag(f(λ)) Bᵀ.
    pub fn apply_spectral_fn(&self, f: impl Fn(f64) -> f64) -> Matrix {
        let n = self.eigenvalues.len();
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for (k, &lambda) in self.eigenvalues.iter().enumerate() {
                    acc += self.basis[(i, k)] * f(lambda) * self.basis[(j, k)];
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    pub fn reconstruct(&self) -> Matrix {
        self.apply_spectral_fn(|l| l)
    }
}

/// Cyclic Jacobi rotations. Robust for dense symmetric matrices up to a few
/// hundred rows, which covers every scenario in this crate.
pub fn eig_symmetric(m: &Matrix, tol: f64) -> Result<EigenDecomposition> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let asym = m.max_asymmetry();
    let scale = m.max_abs().max(1.0);
    if asym > tol.max(1e-12) * scale {
        return Err(Error::NotSymmetric(asym));
    }

    let n = m.rows();
    let mut a = m.clone();
    let mut b = Matrix::identity(n);

    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a[(p, q)].abs());
            }
        }
        if off <= tol * scale {
            return Ok(sorted_decomposition(a, b));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() <= tol * scale * 1e-2 {
                    continue;
                }
                // Rotation angle annihilating a[p][q].
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    1.0 / (theta - (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let bkp = b[(k, p)];
                    let bkq = b[(k, q)];
                    b[(k, p)] = c * bkp - s * bkq;
                    b[(k, q)] = s * bkp + c * bkq;
                }
            }
        }
    }
    Err(Error::ConvergenceFailure {
        what: "Jacobi eigendecomposition",
        iterations: JACOBI_MAX_SWEEPS,
    })
}

fn sorted_decomposition(a: Matrix, b: Matrix) -> EigenDecomposition {
    let n = a.rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].partial_cmp(&a[(i, i)]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[(i, i)]).collect();
    let mut basis = Matrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            basis[(row, col)] = b[(row, src)];
        }
    }
    EigenDecomposition { eigenvalues, basis }
}

/// M^t through the eigendecomposition: B diag(λᵗ) Bᵀ.
pub fn spectral_power(m: &Matrix, t: u32) -> Result<Matrix> {
    let decomp = eig_symmetric(m, DEFAULT_JACOBI_TOL)?;
    Ok(decomp.apply_spectral_fn(|l| l.powi(t as i32)))
}

/// Largest-magnitude eigenvalue by power iteration with a Rayleigh-quotient
/// estimate. A small diagonal shift breaks the ±λ degeneracy of bipartite
/// adjacency spectra.
pub fn dominant_eigenvalue(m: &Matrix, tol: f64, max_iter: usize) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    if n == 0 || m.max_abs() == 0.0 {
        return Err(Error::InvalidParameter(
            "dominant eigenvalue of a zero matrix".into(),
        ));
    }
    let shift = 0.05 * m.inf_norm();

    // Deterministic pseudo-random start, full support.
    let mut v: Vec<f64> = (0..n)
        .map(|i| {
            let x = splitmix64(0x9e3779b97f4a7c15 ^ i as u64);
            0.5 + (x >> 11) as f64 / (1u64 << 53) as f64
        })
        .collect();
    normalize(&mut v);

    let mt = m.transpose();
    let mut prev = f64::INFINITY;
    for _ in 0..max_iter {
        // w = (M + shift I) v
        let mut w = mt.row_vec_mul(&v);
        for (wi, vi) in w.iter_mut().zip(&v) {
            *wi += shift * vi;
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::ConvergenceFailure {
                what: "power iteration",
                iterations: max_iter,
            });
        }
        for wi in &mut w {
            *wi /= norm;
        }
        // Rayleigh quotient against the unshifted matrix.
        let mv = mt.row_vec_mul(&w);
        let est: f64 = w.iter().zip(&mv).map(|(a, b)| a * b).sum();
        if (est - prev).abs() <= tol {
            return Ok(est);
        }
        prev = est;
        v = w;
    }
    Err(Error::ConvergenceFailure {
        what: "power iteration",
        iterations: max_iter,
    })
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in v.iter_mut() {
        *x /= norm;
    }
}

/// e^{Mt} by scaling and squaring of a truncated Taylor series. The scaled
/// norm is driven below 0.5 before the series is summed.
pub fn matrix_exponential(m: &Matrix, t: f64) -> Result<Matrix> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    if !m.is_finite() || !t.is_finite() {
        return Err(Error::Overflow);
    }
    let n = m.rows();
    let b = m.scale(t);
    let norm = b.inf_norm();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let x = b.scale(0.5f64.powi(squarings as i32));

    let mut result = Matrix::identity(n);
    let mut term = Matrix::identity(n);
    for k in 1..=60u32 {
        term = term.mul(&x).scale(1.0 / f64::from(k));
        result = result.add(&term);
        if term.max_abs() <= 1e-18 * result.max_abs() {
            break;
        }
    }
    for _ in 0..squarings {
        result = result.mul(&result);
    }
    if !result.is_finite() {
        return Err(Error::Overflow);
    }
    Ok(result)
}
