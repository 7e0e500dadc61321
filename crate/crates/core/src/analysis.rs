//! Comparing LQR designs through their Riccati solutions.
//!
//! For a stabilizing solution `P` the infinite-horizon cost from `x₀` is
//! `x₀ᵀPx₀`. If `P_a − P_b` is positive definite, design `a` costs more than
//! design `b` from every nonzero initial state.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::linalg::{is_symmetric, symmetric_eigenvalues};
use crate::scalar::Real;
use crate::ssmodel::SecondOrderPlant;

/// Fractional order suggested for lightly damped plants.
pub const OSCILLATORY_ORDER: f64 = 0.5;
/// Fractional order suggested for well damped plants.
pub const SLUGGISH_ORDER: f64 = 1.5;

/// `x₀ᵀPx₀`.
pub fn cost_of_control<T: Real>(p: &DMatrix<T>, x0: &[T]) -> Result<T> {
    ensure!(
        p.is_square() && p.nrows() == x0.len(),
        DimensionMismatch,
        "P is {}x{} but x0 has {} entries",
        p.nrows(),
        p.ncols(),
        x0.len()
    );
    ensure!(is_symmetric(p, T::tol(1e-10)), InvalidParameter, "P must be symmetric");
    let x = DVector::from_column_slice(x0);
    Ok(x.dot(&(p * &x)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiccatiComparison<T> {
    /// Ascending eigenvalues of `P_a − P_b`.
    pub eigenvalues: Vec<T>,
    /// Whether `P_a − P_b` is positive definite.
    pub positive_definite: bool,
}

/// Spectrum and definiteness of `p_a − p_b`.
pub fn compare_riccati<T: Real>(p_a: &DMatrix<T>, p_b: &DMatrix<T>) -> Result<RiccatiComparison<T>> {
    ensure!(
        p_a.is_square() && p_a.shape() == p_b.shape(),
        DimensionMismatch,
        "matrices must be square and of equal size"
    );
    ensure!(
        is_symmetric(p_a, T::tol(1e-10)) && is_symmetric(p_b, T::tol(1e-10)),
        InvalidParameter,
        "both matrices must be symmetric"
    );
    let eigenvalues = symmetric_eigenvalues(&(p_a - p_b))?;
    let positive_definite = eigenvalues.first().is_some_and(|&l| l > T::zero());
    Ok(RiccatiComparison { eigenvalues, positive_definite })
}

/// Suggested cost order: low for oscillatory plants (`ξ < 1`), high otherwise.
pub fn recommend_order<T: Real>(plant: &SecondOrderPlant<T>) -> T {
    if plant.xi() < T::one() {
        T::lit(OSCILLATORY_ORDER)
    } else {
        T::lit(SLUGGISH_ORDER)
    }
}
