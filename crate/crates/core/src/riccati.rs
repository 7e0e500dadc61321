//! Continuous and discrete algebraic Riccati equations.
//!
//! * CARE `AᵀP + PA − PBR⁻¹BᵀP + Q = 0` is solved through the matrix sign
//!   function of the Hamiltonian.
//! * DARE `P = Q + GᵀPG − GᵀPH(R + HᵀPH)⁻¹HᵀPG` is solved with the
//!   structure-preserving doubling algorithm.
//!
//! Both finish with at most a few Newton refinement steps and then certify
//! the result: symmetric, positive semi-definite, normalized residual below
//! tolerance, and a stabilizing closed loop. A solution that fails any of
//! these checks is never returned.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::linalg::{
    all_finite, is_symmetric, norm_1, solve_lyapunov, solve_stein, spectral_abscissa, spectral_radius,
    symmetrize,
};
use crate::scalar::{is_finite, Real};

pub use crate::linalg::symmetric_eigenvalues;

const MAX_SIGN_ITERATIONS: usize = 100;
const MAX_DOUBLING_ITERATIONS: usize = 100;
const MAX_REFINEMENTS: usize = 4;
const STABILITY_MARGIN: f64 = 1e-8;

/// Diagonal LQR weights `Q = diag(q1, q2, q3)`, `R = r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LqrWeights<T> {
    pub q1: T,
    pub q2: T,
    pub q3: T,
    pub r: T,
}

impl<T: Real> LqrWeights<T> {
    pub fn new(q1: T, q2: T, q3: T, r: T) -> Result<Self> {
        let w = Self { q1, q2, q3, r };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(
            [self.q1, self.q2, self.q3, self.r].iter().all(|&v| is_finite(v)),
            InvalidParameter,
            "weights must be finite"
        );
        ensure!(
            self.q1 >= T::zero() && self.q2 >= T::zero() && self.q3 >= T::zero(),
            InvalidParameter,
            "Q entries must be nonnegative"
        );
        ensure!(self.r > T::zero(), InvalidParameter, "R must be positive");
        Ok(())
    }

    pub fn q_matrix(&self) -> DMatrix<T> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![self.q1, self.q2, self.q3]))
    }

    pub fn r_matrix(&self) -> DMatrix<T> {
        DMatrix::from_element(1, 1, self.r)
    }
}

/// Certified stabilizing Riccati solution.
#[derive(Debug, Clone, PartialEq)]
pub struct RiccatiSolution<T: Real> {
    pub p: DMatrix<T>,
    /// `‖residual matrix‖_F / max(1, ‖P‖_F)`.
    pub residual: T,
    /// State-feedback gain `F` for `u = −Fx` (m×n).
    pub feedback: DMatrix<T>,
}

/// Normalized residual tolerance accepted by both solvers.
pub fn residual_tolerance<T: Real>() -> T {
    T::tol(1e-9)
}

fn check_weights<T: Real>(n: usize, m: usize, q: &DMatrix<T>, r: &DMatrix<T>) -> Result<()> {
    ensure!(q.nrows() == n && q.ncols() == n, DimensionMismatch, "Q must be {n}x{n}");
    ensure!(r.nrows() == m && r.ncols() == m, DimensionMismatch, "R must be {m}x{m}");
    ensure!(all_finite(q) && all_finite(r), InvalidParameter, "weights must be finite");
    ensure!(is_symmetric(q, T::tol(1e-10)), InvalidParameter, "Q must be symmetric");
    ensure!(is_symmetric(r, T::tol(1e-10)), InvalidParameter, "R must be symmetric");
    let qmin = symmetric_eigenvalues(q)?.first().copied().unwrap_or_else(T::zero);
    ensure!(
        qmin >= -T::tol(1e-12) * T::one().max(q.norm()),
        InvalidParameter,
        "Q must be positive semi-definite"
    );
    ensure!(
        symmetrize(r).cholesky().is_some(),
        InvalidParameter,
        "R must be positive definite"
    );
    Ok(())
}

fn inverse<T: Real>(m: &DMatrix<T>, what: &str) -> Result<DMatrix<T>> {
    m.clone()
        .try_inverse()
        .filter(all_finite)
        .ok_or_else(|| Error::Numeric(format!("singular {what}")))
}

/// `AᵀP + PA − PBR⁻¹BᵀP + Q`.
pub fn care_residual_matrix<T: Real>(
    a: &DMatrix<T>,
    b: &DMatrix<T>,
    q: &DMatrix<T>,
    r: &DMatrix<T>,
    p: &DMatrix<T>,
) -> Result<DMatrix<T>> {
    let rinv = inverse(r, "R")?;
    Ok(a.transpose() * p + p * a - p * b * rinv * b.transpose() * p + q)
}

/// `Q + GᵀPG − GᵀPH(R + HᵀPH)⁻¹HᵀPG − P`.
pub fn dare_residual_matrix<T: Real>(
    g: &DMatrix<T>,
    h: &DMatrix<T>,
    q: &DMatrix<T>,
    r: &DMatrix<T>,
    p: &DMatrix<T>,
) -> Result<DMatrix<T>> {
    let gt = g.transpose();
    let s = r + h.transpose() * p * h;
    let sinv = inverse(&s, "R + HᵀPH")?;
    Ok(q + &gt * p * g - &gt * p * h * sinv * h.transpose() * p * g - p)
}

fn normalized<T: Real>(res: &DMatrix<T>, p: &DMatrix<T>) -> T {
    res.norm() / T::one().max(p.norm())
}

/// Stabilizing solution of the continuous algebraic Riccati equation.
pub fn solve_care<T: Real>(
    a: &DMatrix<T>,
    b: &DMatrix<T>,
    q: &DMatrix<T>,
    r: &DMatrix<T>,
) -> Result<RiccatiSolution<T>> {
    let n = a.nrows();
    ensure!(n > 0 && a.is_square(), DimensionMismatch, "A must be square");
    ensure!(b.nrows() == n, DimensionMismatch, "B must have {n} rows");
    ensure!(all_finite(a) && all_finite(b), InvalidParameter, "A and B must be finite");
    let m = b.ncols();
    check_weights(n, m, q, r)?;

    let rinv = inverse(r, "R")?;
    let s = b * &rinv * b.transpose();

    let mut z = DMatrix::zeros(2 * n, 2 * n);
    z.view_mut((0, 0), (n, n)).copy_from(a);
    z.view_mut((0, n), (n, n)).copy_from(&(-&s));
    z.view_mut((n, 0), (n, n)).copy_from(&(-q));
    z.view_mut((n, n), (n, n)).copy_from(&(-a.transpose()));

    let tol = T::tol(1e-13);
    let half = T::lit(0.5);
    let mut converged = false;
    for _ in 0..MAX_SIGN_ITERATIONS {
        let lu = z.clone().lu();
        let det = lu.determinant();
        let zinv = lu
            .try_inverse()
            .filter(all_finite)
            .ok_or_else(|| Error::NotStabilizing("Hamiltonian has eigenvalues on the imaginary axis".into()))?;
        // determinant scaling
        let mut c = det.abs().powf(T::one() / T::lit((2 * n) as f64));
        if !(is_finite(c) && c > T::zero()) {
            c = T::one();
        }
        let next = (&z / c + &zinv * c) * half;
        ensure!(all_finite(&next), Numeric, "sign iteration diverged");
        let delta = norm_1(&(&next - &z));
        let scale = norm_1(&next);
        z = next;
        if delta <= tol * scale {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NotConverged("matrix sign iteration".into()));
    }

    let identity = DMatrix::<T>::identity(n, n);
    let w11 = z.view((0, 0), (n, n)).into_owned();
    let w12 = z.view((0, n), (n, n)).into_owned();
    let w21 = z.view((n, 0), (n, n)).into_owned();
    let w22 = z.view((n, n), (n, n)).into_owned();
    let mut lhs = DMatrix::zeros(2 * n, n);
    lhs.view_mut((0, 0), (n, n)).copy_from(&w12);
    lhs.view_mut((n, 0), (n, n)).copy_from(&(w22 + &identity));
    let mut rhs = DMatrix::zeros(2 * n, n);
    rhs.view_mut((0, 0), (n, n)).copy_from(&(-(w11 + &identity)));
    rhs.view_mut((n, 0), (n, n)).copy_from(&(-w21));
    let p = lhs
        .svd(true, true)
        .solve(&rhs, T::default_epsilon())
        .map_err(|e| Error::Numeric(format!("sign-function subspace solve: {e}")))?;
    ensure!(all_finite(&p), Numeric, "non-finite CARE solution");
    let mut p = symmetrize(&p);

    let target = residual_tolerance::<T>() * T::lit(1e-2);
    let mut res = normalized(&care_residual_matrix(a, b, q, r, &p)?, &p);
    for _ in 0..MAX_REFINEMENTS {
        if res <= target {
            break;
        }
        // Newton step: (A − SP)ᵀX + X(A − SP) + PSP + Q = 0
        let acl = a - &s * &p;
        let cand = solve_lyapunov(&acl, &(&p * &s * &p + q))?;
        let cres = normalized(&care_residual_matrix(a, b, q, r, &cand)?, &cand);
        if !(cres < res) {
            break;
        }
        p = cand;
        res = cres;
    }

    let feedback = &rinv * b.transpose() * &p;
    certify(&p, res)?;
    let abscissa = spectral_abscissa(&(a - b * &feedback))?;
    if !(abscissa < -T::lit(STABILITY_MARGIN)) {
        return Err(Error::NotStabilizing(format!(
            "closed-loop spectral abscissa {:e}",
            abscissa.as_f64()
        )));
    }
    Ok(RiccatiSolution { p, residual: res, feedback })
}

/// Stabilizing solution of the discrete algebraic Riccati equation.
pub fn solve_dare<T: Real>(
    g: &DMatrix<T>,
    h: &DMatrix<T>,
    q: &DMatrix<T>,
    r: &DMatrix<T>,
) -> Result<RiccatiSolution<T>> {
    let n = g.nrows();
    ensure!(n > 0 && g.is_square(), DimensionMismatch, "G must be square");
    ensure!(h.nrows() == n, DimensionMismatch, "H must have {n} rows");
    ensure!(all_finite(g) && all_finite(h), InvalidParameter, "G and H must be finite");
    let m = h.ncols();
    check_weights(n, m, q, r)?;

    let rinv = inverse(r, "R")?;
    let identity = DMatrix::<T>::identity(n, n);

    // X = AᵀX(I + GX)⁻¹A + H with A = G_sys, G = HR⁻¹Hᵀ, H = Q.
    let mut ak = g.clone();
    let mut gk = h * &rinv * h.transpose();
    let mut hk = q.clone();
    let tol = T::tol(1e-14);
    let mut converged = false;
    for _ in 0..MAX_DOUBLING_ITERATIONS {
        let w = &identity + &gk * &hk;
        let lu = w.lu();
        let wa = lu
            .solve(&ak)
            .ok_or_else(|| Error::Numeric("singular I + GₖHₖ in doubling".into()))?;
        let wg = lu
            .solve(&gk)
            .ok_or_else(|| Error::Numeric("singular I + GₖHₖ in doubling".into()))?;
        let akt = ak.transpose();
        let h_next = &hk + &akt * &hk * &wa;
        let g_next = &gk + &ak * &wg * &akt;
        let a_next = &ak * &wa;
        ensure!(
            all_finite(&h_next) && all_finite(&g_next) && all_finite(&a_next),
            Numeric,
            "doubling iteration overflowed"
        );
        let delta = (&h_next - &hk).norm();
        let scale = h_next.norm();
        hk = symmetrize(&h_next);
        gk = symmetrize(&g_next);
        ak = a_next;
        if delta <= tol * T::one().max(scale) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NotConverged("structure-preserving doubling".into()));
    }
    let mut p = hk;

    let gain = |p: &DMatrix<T>| -> Result<DMatrix<T>> {
        let s = r + h.transpose() * p * h;
        s.lu()
            .solve(&(h.transpose() * p * g))
            .ok_or_else(|| Error::Numeric("singular R + HᵀPH".into()))
    };

    let target = residual_tolerance::<T>() * T::lit(1e-2);
    let mut res = normalized(&dare_residual_matrix(g, h, q, r, &p)?, &p);
    for _ in 0..MAX_REFINEMENTS {
        if res <= target {
            break;
        }
        // Hewer step: X − GclᵀXGcl = Q + FᵀRF
        let f = gain(&p)?;
        let gcl = g - h * &f;
        let cand = solve_stein(&gcl, &(q + f.transpose() * r * &f))?;
        let cres = normalized(&dare_residual_matrix(g, h, q, r, &cand)?, &cand);
        if !(cres < res) {
            break;
        }
        p = cand;
        res = cres;
    }

    let feedback = gain(&p)?;
    certify(&p, res)?;
    let radius = spectral_radius(&(g - h * &feedback))?;
    if !(radius < T::one() - T::lit(STABILITY_MARGIN)) {
        return Err(Error::NotStabilizing(format!("closed-loop spectral radius {:e}", radius.as_f64())));
    }
    Ok(RiccatiSolution { p, residual: res, feedback })
}

fn certify<T: Real>(p: &DMatrix<T>, residual: T) -> Result<()> {
    ensure!(all_finite(p), Numeric, "non-finite Riccati solution");
    if !(residual <= residual_tolerance::<T>()) {
        return Err(Error::NotConverged(format!(
            "normalized residual {:e} above tolerance",
            residual.as_f64()
        )));
    }
    let pmin = symmetric_eigenvalues(p)?[0];
    if pmin < -T::tol(1e-9) * p.norm() {
        return Err(Error::NotStabilizing(format!(
            "Riccati solution is indefinite (min eigenvalue {:e})",
            pmin.as_f64()
        )));
    }
    Ok(())
}

/// CARE for the diagonal weights of the 3-state PID model.
pub fn solve_care_weights<T: Real>(
    a: &DMatrix<T>,
    b: &DMatrix<T>,
    w: &LqrWeights<T>,
) -> Result<RiccatiSolution<T>> {
    w.validate()?;
    solve_care(a, b, &w.q_matrix(), &w.r_matrix())
}

/// DARE for the diagonal weights of the 3-state PID model.
pub fn solve_dare_weights<T: Real>(
    g: &DMatrix<T>,
    h: &DMatrix<T>,
    w: &LqrWeights<T>,
) -> Result<RiccatiSolution<T>> {
    w.validate()?;
    solve_dare(g, h, &w.q_matrix(), &w.r_matrix())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn s(x: f64) -> DMatrix<f64> {
        DMatrix::from_element(1, 1, x)
    }

    #[test]
    fn care_scalar_stable() {
        let sol = solve_care(&s(-1.0), &s(1.0), &s(1.0), &s(1.0)).unwrap();
        assert_abs_diff_eq!(sol.p[(0, 0)], 2f64.sqrt() - 1.0, epsilon = 1e-12);
    }

    #[test]
    fn care_scalar_integrator() {
        let sol = solve_care(&s(0.0), &s(1.0), &s(1.0), &s(1.0)).unwrap();
        assert_abs_diff_eq!(sol.p[(0, 0)], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.feedback[(0, 0)], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn dare_scalar() {
        let sol = solve_dare(&s(0.5), &s(1.0), &s(1.0), &s(1.0)).unwrap();
        let expected = (0.25 + (0.0625f64 + 4.0).sqrt()) / 2.0;
        assert_abs_diff_eq!(sol.p[(0, 0)], expected, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.p[(0, 0)], 1.132782, epsilon = 1e-6);
    }

    #[test]
    fn dare_zero_dynamics() {
        let sol = solve_dare(&s(0.0), &s(1.0), &s(1.0), &s(1.0)).unwrap();
        assert_abs_diff_eq!(sol.p[(0, 0)], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn care_without_stabilizing_solution() {
        // integrator that Q cannot see and B cannot reach
        let err = solve_care(&s(0.0), &s(0.0), &s(0.0), &s(1.0)).unwrap_err();
        assert!(matches!(err, Error::NotStabilizing(_) | Error::NotConverged(_)), "{err:?}");
    }

    #[test]
    fn dare_unstabilizable_pair() {
        let err = solve_dare(&s(2.0), &s(0.0), &s(1.0), &s(1.0)).unwrap_err();
        assert!(!matches!(err, Error::InvalidParameter(_) | Error::DimensionMismatch(_)), "{err:?}");
    }

    #[test]
    fn weight_validation() {
        assert!(LqrWeights::new(0.0, 0.0, 0.0, 1.0).is_ok());
        assert!(LqrWeights::new(-1.0, 0.0, 0.0, 1.0).is_err());
        assert!(LqrWeights::new(1.0, 1.0, 1.0, 0.0).is_err());
        assert!(solve_care(&s(1.0), &s(1.0), &s(-1.0), &s(1.0)).is_err());
        assert!(solve_care(&s(1.0), &s(1.0), &s(1.0), &s(0.0)).is_err());
    }

    #[test]
    fn f32_scalar_care() {
        let sol = solve_care(
            &DMatrix::from_element(1, 1, -1.0f32),
            &DMatrix::from_element(1, 1, 1.0f32),
            &DMatrix::from_element(1, 1, 1.0f32),
            &DMatrix::from_element(1, 1, 1.0f32),
        )
        .unwrap();
        assert!((sol.p[(0, 0)] - (2f32.sqrt() - 1.0)).abs() < 1e-5);
    }
}
