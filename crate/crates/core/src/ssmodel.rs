//! Error-state model of a second-order plant under PID control.
//!
//! The state vector is `x = [∫e, e, ė]`. With the plant
//! `Y/U = K / (s² + 2ξωₙs + ωₙ²)` and `y = −e` in the regulator setting this
//! gives
//!
//! ```text
//! ẋ = [0   1     0   ] x + [ 0] u
//!     [0   0     1   ]     [ 0]
//!     [0  −ωₙ²  −2ξωₙ]     [−K]
//! ```
//!
//! The `A` matrix is singular (its first column is zero), so the ZOH input
//! matrix is computed from the exponential of an augmented block matrix
//! instead of `(e^{ATs} − I)A⁻¹B`.

use nalgebra::DMatrix;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::linalg::{all_finite, eigenvalues, expm};
use crate::scalar::{is_finite, Real};

/// Second-order process `K / (s² + 2ξωₙs + ωₙ²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecondOrderPlant<T> {
    k_gain: T,
    xi: T,
    wn: T,
}

impl<T: Real> SecondOrderPlant<T> {
    pub fn new(k_gain: T, xi: T, wn: T) -> Result<Self> {
        ensure!(
            is_finite(k_gain) && is_finite(xi) && is_finite(wn),
            InvalidParameter,
            "plant parameters must be finite"
        );
        ensure!(wn > T::zero(), InvalidParameter, "natural frequency must be positive");
        ensure!(xi > T::zero(), InvalidParameter, "damping ratio must be positive");
        ensure!(k_gain != T::zero(), InvalidParameter, "plant gain must be nonzero");
        Ok(Self { k_gain, xi, wn })
    }

    pub fn k_gain(&self) -> T {
        self.k_gain
    }

    pub fn xi(&self) -> T {
        self.xi
    }

    pub fn wn(&self) -> T {
        self.wn
    }

    /// Constant plant input needed to hold the output at `setpoint`: `ωₙ²·r/K`.
    pub fn holding_input(&self, setpoint: T) -> T {
        self.wn * self.wn * setpoint / self.k_gain
    }

    /// Open-loop poles of the process itself (roots of `s² + 2ξωₙs + ωₙ²`).
    pub fn process_poles(&self) -> [Complex<T>; 2] {
        let b = T::lit(2.0) * self.xi * self.wn;
        let c = self.wn * self.wn;
        let disc = b * b - T::lit(4.0) * c;
        let half = T::lit(0.5);
        if disc >= T::zero() {
            let r = disc.sqrt();
            [Complex::new((-b - r) * half, T::zero()), Complex::new((-b + r) * half, T::zero())]
        } else {
            let i = (-disc).sqrt() * half;
            [Complex::new(-b * half, -i), Complex::new(-b * half, i)]
        }
    }
}

/// Continuous realization `ẋ = Ax + Bu` with error output `e = Cx`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace<T: Real> {
    pub(crate) a: DMatrix<T>,
    pub(crate) b: DMatrix<T>,
    pub(crate) c: DMatrix<T>,
}

impl<T: Real> StateSpace<T> {
    /// Builds a realization whose recorded error signal is the first state.
    pub fn new(a: DMatrix<T>, b: DMatrix<T>) -> Result<Self> {
        let n = a.nrows();
        let mut c = DMatrix::zeros(1, n.max(1));
        if n > 0 {
            c[(0, 0)] = T::one();
        }
        Self::with_output(a, b, c)
    }

    pub fn with_output(a: DMatrix<T>, b: DMatrix<T>, c: DMatrix<T>) -> Result<Self> {
        let n = a.nrows();
        ensure!(n > 0 && a.is_square(), DimensionMismatch, "A must be square and nonempty, got {}x{}", a.nrows(), a.ncols());
        ensure!(b.nrows() == n && b.ncols() > 0, DimensionMismatch, "B must have {n} rows, got {}x{}", b.nrows(), b.ncols());
        ensure!(c.nrows() == 1 && c.ncols() == n, DimensionMismatch, "output row must be 1x{n}");
        ensure!(all_finite(&a) && all_finite(&b) && all_finite(&c), InvalidParameter, "state-space entries must be finite");
        Ok(Self { a, b, c })
    }

    pub fn a(&self) -> &DMatrix<T> {
        &self.a
    }

    pub fn b(&self) -> &DMatrix<T> {
        &self.b
    }

    pub fn output(&self) -> &DMatrix<T> {
        &self.c
    }

    pub fn states(&self) -> usize {
        self.a.nrows()
    }

    pub fn inputs(&self) -> usize {
        self.b.ncols()
    }

    /// Eigenvalues of `A`.
    pub fn poles(&self) -> Result<Vec<Complex<T>>> {
        eigenvalues(&self.a)
    }
}

/// ZOH-sampled realization `x(k+1) = Gx(k) + Hu(k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretePlant<T: Real> {
    pub(crate) g: DMatrix<T>,
    pub(crate) h: DMatrix<T>,
    pub(crate) c: DMatrix<T>,
    pub(crate) ts: T,
    pub(crate) continuous: Option<StateSpace<T>>,
    pub(crate) plant: Option<SecondOrderPlant<T>>,
}

impl<T: Real> DiscretePlant<T> {
    /// A discrete system given directly by its matrices (error output = first state).
    pub fn new(g: DMatrix<T>, h: DMatrix<T>, ts: T) -> Result<Self> {
        ensure!(ts > T::zero() && is_finite(ts), InvalidParameter, "sampling time must be positive");
        let ss = StateSpace::new(g, h)?;
        Ok(Self { g: ss.a, h: ss.b, c: ss.c, ts, continuous: None, plant: None })
    }

    pub fn g(&self) -> &DMatrix<T> {
        &self.g
    }

    pub fn h(&self) -> &DMatrix<T> {
        &self.h
    }

    pub fn ts(&self) -> T {
        self.ts
    }

    pub fn output(&self) -> &DMatrix<T> {
        &self.c
    }

    /// The continuous realization this was sampled from, if known.
    pub fn continuous(&self) -> Option<&StateSpace<T>> {
        self.continuous.as_ref()
    }

    /// The second-order process behind the model, if it was built from one.
    pub fn plant(&self) -> Option<&SecondOrderPlant<T>> {
        self.plant.as_ref()
    }

    pub fn poles(&self) -> Result<Vec<Complex<T>>> {
        eigenvalues(&self.g)
    }
}

/// Error-state realization `(A, B)` of a second-order plant; the error output is `x₂`.
pub fn build_plant_state_space<T: Real>(plant: &SecondOrderPlant<T>) -> StateSpace<T> {
    let (k, xi, wn) = (plant.k_gain, plant.xi, plant.wn);
    let z = T::zero();
    let o = T::one();
    #[rustfmt::skip]
    let a = DMatrix::from_row_slice(3, 3, &[
        z, o, z,
        z, z, o,
        z, -wn * wn, -T::lit(2.0) * xi * wn,
    ]);
    let b = DMatrix::from_column_slice(3, 1, &[z, z, -k]);
    let c = DMatrix::from_row_slice(1, 3, &[z, o, z]);
    StateSpace { a, b, c }
}

/// Zero-order-hold discretization.
///
/// `exp([[A, B], [0, 0]]·ts) = [[G, H], [0, I]]`, so no inverse of `A` is needed.
pub fn discretize_zoh<T: Real>(ss: &StateSpace<T>, ts: T) -> Result<DiscretePlant<T>> {
    ensure!(ts > T::zero() && is_finite(ts), InvalidParameter, "sampling time must be positive, got {}", ts.as_f64());
    let n = ss.states();
    let m = ss.inputs();
    let mut block = DMatrix::zeros(n + m, n + m);
    block.view_mut((0, 0), (n, n)).copy_from(&(&ss.a * ts));
    block.view_mut((0, n), (n, m)).copy_from(&(&ss.b * ts));
    let e = expm(&block)?;
    Ok(DiscretePlant {
        g: e.view((0, 0), (n, n)).into_owned(),
        h: e.view((0, n), (n, m)).into_owned(),
        c: ss.c.clone(),
        ts,
        continuous: Some(ss.clone()),
        plant: None,
    })
}

/// Builds and samples the error-state model of `plant`.
pub fn discretize_plant<T: Real>(plant: &SecondOrderPlant<T>, ts: T) -> Result<DiscretePlant<T>> {
    let mut d = discretize_zoh(&build_plant_state_space(plant), ts)?;
    d.plant = Some(*plant);
    Ok(d)
}

/// Maps s-plane poles through `z = e^{s·ts}`, preserving order.
pub fn map_poles_to_z<T: Real>(s_poles: &[Complex<T>], ts: T) -> Result<Vec<Complex<T>>> {
    ensure!(ts > T::zero() && is_finite(ts), InvalidParameter, "sampling time must be positive");
    ensure!(
        s_poles.iter().all(|s| is_finite(s.re) && is_finite(s.im)),
        InvalidParameter,
        "poles must be finite"
    );
    Ok(s_poles
        .iter()
        .map(|s| {
            let mag = (s.re * ts).exp();
            let ang = s.im * ts;
            Complex::new(mag * ang.cos(), mag * ang.sin())
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn row3(m: &DMatrix<f64>) -> Vec<f64> {
        m.row(2).iter().cloned().collect()
    }

    #[test]
    fn oscillatory_plant_matrices() {
        let ss = build_plant_state_space(&SecondOrderPlant::new(1.0, 0.2, 1.0).unwrap());
        assert_eq!(row3(&ss.a), vec![0.0, -1.0, -0.4]);
        assert_eq!(ss.b.as_slice(), &[0.0, 0.0, -1.0]);
        assert_eq!(ss.a.row(0).iter().cloned().collect::<Vec<_>>(), vec![0.0, 1.0, 0.0]);
        assert_eq!(ss.a.row(1).iter().cloned().collect::<Vec<_>>(), vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn sluggish_plant_matrices() {
        let ss = build_plant_state_space(&SecondOrderPlant::new(1.0, 5.0, 1.0).unwrap());
        assert_eq!(row3(&ss.a), vec![0.0, -1.0, -10.0]);
        assert_eq!(ss.b.as_slice(), &[0.0, 0.0, -1.0]);
    }

    #[test]
    fn generic_substitution() {
        let ss = build_plant_state_space(&SecondOrderPlant::new(2.0, 1.0, 3.0).unwrap());
        assert_eq!(row3(&ss.a), vec![0.0, -9.0, -6.0]);
        assert_eq!(ss.b.as_slice(), &[0.0, 0.0, -2.0]);
    }

    #[test]
    fn plant_rejects_bad_parameters() {
        assert!(SecondOrderPlant::new(1.0, 0.2, 0.0).is_err());
        assert!(SecondOrderPlant::new(1.0, -0.2, 1.0).is_err());
        assert!(SecondOrderPlant::new(0.0, 0.2, 1.0).is_err());
        assert!(SecondOrderPlant::new(f64::NAN, 0.2, 1.0).is_err());
        assert!(SecondOrderPlant::new(1.0, 0.2, f64::INFINITY).is_err());
    }

    #[test]
    fn zoh_integrator() {
        let ss = StateSpace::new(DMatrix::from_element(1, 1, 0.0), DMatrix::from_element(1, 1, 1.0)).unwrap();
        let d = discretize_zoh(&ss, 0.5).unwrap();
        assert_abs_diff_eq!(d.g[(0, 0)], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.h[(0, 0)], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn zoh_double_integrator() {
        let ss = StateSpace::new(
            DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]),
            DMatrix::from_column_slice(2, 1, &[0.0, 1.0]),
        )
        .unwrap();
        let d = discretize_zoh(&ss, 0.1).unwrap();
        let g = [1.0, 0.1, 0.0, 1.0];
        for (i, gv) in g.iter().enumerate() {
            assert_abs_diff_eq!(d.g[(i / 2, i % 2)], *gv, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(d.h[(0, 0)], 0.005, epsilon = 1e-15);
        assert_abs_diff_eq!(d.h[(1, 0)], 0.1, epsilon = 1e-15);
    }

    #[test]
    fn zoh_rejects_nonpositive_ts() {
        let ss = build_plant_state_space(&SecondOrderPlant::new(1.0, 0.2, 1.0).unwrap());
        assert!(discretize_zoh(&ss, 0.0).is_err());
        assert!(discretize_zoh(&ss, -1.0).is_err());
    }

    #[test]
    fn zoh_overflow_is_numeric_failure() {
        let ss = StateSpace::new(DMatrix::from_element(1, 1, 1.0), DMatrix::from_element(1, 1, 1.0)).unwrap();
        let r = discretize_zoh(&ss, 1e4);
        assert!(matches!(r, Err(crate::Error::Numeric(_))), "{r:?}");
    }

    fn complex_exp_series(s: Complex<f64>) -> Complex<f64> {
        let mut term = Complex::new(1.0, 0.0);
        let mut sum = term;
        for k in 1..60 {
            term = term * s / k as f64;
            sum += term;
        }
        sum
    }

    #[test]
    fn pole_mapping_examples() {
        let z = map_poles_to_z(&[Complex::new(0.0, 0.0)], 0.7).unwrap();
        assert_eq!(z[0], Complex::new(1.0, 0.0));

        let z = map_poles_to_z(&[Complex::new(-1.0, 1.0)], 0.1).unwrap();
        assert_abs_diff_eq!(z[0].re, 0.9003, epsilon = 1e-4);
        assert_abs_diff_eq!(z[0].im, 0.0903, epsilon = 1e-4);

        let s = Complex::new(-0.2, 0.9798);
        let z = map_poles_to_z(&[s], 1.0).unwrap();
        let oracle = complex_exp_series(s);
        assert_abs_diff_eq!(z[0].re, oracle.re, epsilon = 1e-12);
        assert_abs_diff_eq!(z[0].im, oracle.im, epsilon = 1e-12);
        assert_abs_diff_eq!(z[0].re, 0.4562, epsilon = 1e-4);
        assert_abs_diff_eq!(z[0].im, 0.6798, epsilon = 1e-4);
    }

    #[test]
    fn process_poles_match_state_matrix() {
        let plant = SecondOrderPlant::new(1.0, 0.2, 1.0).unwrap();
        let [p1, p2] = plant.process_poles();
        assert_abs_diff_eq!(p1.re, -0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(p2.im, 0.96f64.sqrt(), epsilon = 1e-15);
        let sluggish = SecondOrderPlant::new(1.0, 5.0, 1.0).unwrap();
        let [s1, s2] = sluggish.process_poles();
        assert_abs_diff_eq!(s1.re * s2.re, 1.0, epsilon = 1e-12);
    }
}
