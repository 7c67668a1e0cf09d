//! Numeric Hermitian eigenvalues and the trace norm.
//!
//! A Hermitian `H = A + iB` is embedded as the real symmetric matrix
//! `[[A, -B], [B, A]]`, whose spectrum is that of `H` with every eigenvalue
//! doubled, and diagonalized with cyclic Jacobi rotations.

use num_complex::Complex64;

use crate::field::Field;
use crate::matrix::{FloatMatrix, Matrix, MatrixError};

/// Off-diagonal Frobenius norm below which a Jacobi sweep is considered
/// converged (scaled by the matrix norm when that exceeds one).
pub const JACOBI_THRESHOLD: f64 = 1e-13;

/// Relative tolerance for accepting a float matrix as Hermitian.
const HERMITIAN_TOLERANCE: f64 = 1e-9;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues of a real symmetric matrix given row-major, ascending.
pub fn symmetric_eigenvalues(n: usize, mut a: Vec<f64>) -> Vec<f64> {
    assert_eq!(a.len(), n * n);
    let frob = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let tol = JACOBI_THRESHOLD * frob.max(1.0);
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(h: &FloatMatrix) -> Result<Vec<f64>, MatrixError> {
    if !h.is_square() {
        return Err(MatrixError::NotHermitian);
    }
    let n = h.rows();
    let scale = h
        .data()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
        .max(1.0);
    if h.data()
        .iter()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(MatrixError::Overflow);
    }
    for i in 0..n {
        for j in i..n {
            if (h.get(i, j) - h.get(j, i).conj()).norm() > HERMITIAN_TOLERANCE * scale {
                return Err(MatrixError::NotHermitian);
            }
        }
    }
    let m = 2 * n;
    let mut real = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            // Symmetrize so rounding noise cannot break the embedding.
            let z = (h.get(i, j) + h.get(j, i).conj()) * 0.5;
            real[i * m + j] = z.re;
            real[(i + n) * m + j + n] = z.re;
            real[i * m + j + n] = -z.im;
            real[(i + n) * m + j] = z.im;
        }
    }
    let doubled = symmetric_eigenvalues(m, real);
    // Eigenvalues arrive in equal adjacent pairs; average each pair.
    Ok(doubled.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect())
}

/// `Σ|λ|` for a Hermitian float matrix.
pub fn trace_norm_hermitian(h: &FloatMatrix) -> Result<f64, MatrixError> {
    Ok(hermitian_eigenvalues(h)?.iter().map(|l| l.abs()).sum())
}

/// Trace norm of an exactly Hermitian matrix, evaluated numerically.
pub fn trace_norm_float<T: Field>(h: &Matrix<T>) -> Result<f64, MatrixError> {
    if !h.is_hermitian() {
        return Err(MatrixError::NotHermitian);
    }
    let f: Matrix<Complex64> = h.to_float();
    trace_norm_hermitian(&f)
}
