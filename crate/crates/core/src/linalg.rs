//! Dense linear algebra kernels for the small matrices in this crate.
//!
//! The matrix exponential and the symmetric eigenvalue routine are written
//! out here; general (non-symmetric) eigenvalues and LU solves come from
//! nalgebra.

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{ensure, Error, Result};
use crate::scalar::{is_finite, Real};

/// Padé degree of the exponential approximant.
const PADE_DEGREE: usize = 6;
/// Scaling target for `‖M‖₁` before the approximant is applied.
const EXPM_NORM_TARGET: f64 = 0.5;

pub(crate) fn all_finite<T: Real>(m: &DMatrix<T>) -> bool {
    m.iter().all(|&x| is_finite(x))
}

/// Maximum absolute column sum.
pub fn norm_1<T: Real>(m: &DMatrix<T>) -> T {
    m.column_iter()
        .map(|c| c.iter().fold(T::zero(), |acc, &x| acc + x.abs()))
        .fold(T::zero(), |acc, s| acc.max(s))
}

/// Matrix exponential by scaling and squaring with a diagonal Padé approximant.
pub fn expm<T: Real>(m: &DMatrix<T>) -> Result<DMatrix<T>> {
    ensure!(m.is_square(), DimensionMismatch, "expm needs a square matrix, got {}x{}", m.nrows(), m.ncols());
    ensure!(all_finite(m), Numeric, "expm input has non-finite entries");
    let n = m.nrows();

    let norm = norm_1(m).as_f64();
    let mut squarings = 0i32;
    if norm > EXPM_NORM_TARGET {
        squarings = (norm / EXPM_NORM_TARGET).log2().ceil() as i32;
    }
    let scaled = m * T::lit(0.5f64.powi(squarings));

    // c_k = (2q-k)! q! / ((2q)! k! (q-k)!)
    let q = PADE_DEGREE;
    let mut coeffs = vec![1.0f64; q + 1];
    for k in 1..=q {
        coeffs[k] = coeffs[k - 1] * (q - k + 1) as f64 / (k * (2 * q - k + 1)) as f64;
    }

    let identity = DMatrix::<T>::identity(n, n);
    let mut num = identity.clone() * T::lit(coeffs[0]);
    let mut den = identity.clone() * T::lit(coeffs[0]);
    let mut power = identity;
    for (k, &c) in coeffs.iter().enumerate().skip(1) {
        power = &power * &scaled;
        let term = &power * T::lit(c);
        num += &term;
        if k % 2 == 0 {
            den += &term;
        } else {
            den -= &term;
        }
    }

    let mut result = den
        .lu()
        .solve(&num)
        .ok_or_else(|| Error::Numeric("singular Padé denominator in expm".into()))?;
    for _ in 0..squarings {
        result = &result * &result;
    }
    ensure!(all_finite(&result), Numeric, "expm overflowed (‖M‖₁ = {norm:e})");
    Ok(result)
}

/// Eigenvalues of a general real square matrix (Schur form via nalgebra).
pub fn eigenvalues<T: Real>(m: &DMatrix<T>) -> Result<Vec<Complex<T>>> {
    ensure!(m.is_square(), DimensionMismatch, "eigenvalues need a square matrix");
    ensure!(all_finite(m), Numeric, "eigenvalue input has non-finite entries");
    Ok(m.clone().complex_eigenvalues().iter().cloned().collect())
}

/// Largest real part among the eigenvalues.
pub fn spectral_abscissa<T: Real>(m: &DMatrix<T>) -> Result<T> {
    Ok(eigenvalues(m)?
        .iter()
        .fold(T::lit(f64::NEG_INFINITY), |acc, z| acc.max(z.re)))
}

/// Largest eigenvalue modulus.
pub fn spectral_radius<T: Real>(m: &DMatrix<T>) -> Result<T> {
    Ok(eigenvalues(m)?
        .iter()
        .fold(T::zero(), |acc, z| acc.max((z.re * z.re + z.im * z.im).sqrt())))
}

pub(crate) fn is_symmetric<T: Real>(m: &DMatrix<T>, rel_tol: T) -> bool {
    if !m.is_square() {
        return false;
    }
    let scale = T::one().max(m.norm());
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            if (m[(i, j)] - m[(j, i)]).abs() > rel_tol * scale {
                return false;
            }
        }
    }
    true
}

pub(crate) fn symmetrize<T: Real>(m: &DMatrix<T>) -> DMatrix<T> {
    (m + m.transpose()) * T::lit(0.5)
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
///
/// Rotations continue until the off-diagonal Frobenius norm drops to
/// `1e-12 · ‖S‖_F`.
pub fn symmetric_eigenvalues<T: Real>(s: &DMatrix<T>) -> Result<Vec<T>> {
    ensure!(s.is_square(), DimensionMismatch, "symmetric_eigenvalues needs a square matrix");
    ensure!(all_finite(s), Numeric, "symmetric_eigenvalues input has non-finite entries");
    ensure!(
        is_symmetric(s, T::tol(1e-8)),
        InvalidParameter,
        "matrix is not symmetric within 1e-8"
    );
    let n = s.nrows();
    let mut a = symmetrize(s);
    let threshold = T::tol(1e-12) * a.norm();

    let off_norm = |a: &DMatrix<T>| {
        let mut acc = T::zero();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    acc += a[(i, j)] * a[(i, j)];
                }
            }
        }
        acc.sqrt()
    };

    let mut converged = n < 2;
    for _sweep in 0..100 {
        if off_norm(&a) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (T::lit(2.0) * apq);
                let sign = if theta >= T::zero() { T::one() } else { -T::one() };
                let t = sign / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - sn * akq;
                    a[(k, q)] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - sn * aqk;
                    a[(q, k)] = sn * apk + c * aqk;
                }
            }
        }
    }
    if !converged && off_norm(&a) > threshold {
        return Err(Error::NotConverged("Jacobi sweeps exhausted".into()));
    }

    let mut eig: Vec<T> = (0..n).map(|i| a[(i, i)]).collect();
    eig.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    Ok(eig)
}

fn vec_col<T: Real>(m: &DMatrix<T>) -> DMatrix<T> {
    DMatrix::from_column_slice(m.len(), 1, m.as_slice())
}

/// Solves `AᵀX + XA + C = 0` through the Kronecker-vectorized system.
pub(crate) fn solve_lyapunov<T: Real>(a: &DMatrix<T>, c: &DMatrix<T>) -> Result<DMatrix<T>> {
    let n = a.nrows();
    let id = DMatrix::<T>::identity(n, n);
    let at = a.transpose();
    let op = id.kronecker(&at) + at.kronecker(&id);
    let rhs = -vec_col(c);
    let x = op
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Numeric("singular Lyapunov operator".into()))?;
    Ok(symmetrize(&DMatrix::from_column_slice(n, n, x.as_slice())))
}

/// Solves `X − AᵀXA = C` through the Kronecker-vectorized system.
pub(crate) fn solve_stein<T: Real>(a: &DMatrix<T>, c: &DMatrix<T>) -> Result<DMatrix<T>> {
    let n = a.nrows();
    let at = a.transpose();
    let op = DMatrix::<T>::identity(n * n, n * n) - at.kronecker(&at);
    let x = op
        .lu()
        .solve(&vec_col(c))
        .ok_or_else(|| Error::Numeric("singular Stein operator".into()))?;
    Ok(symmetrize(&DMatrix::from_column_slice(n, n, x.as_slice())))
}
