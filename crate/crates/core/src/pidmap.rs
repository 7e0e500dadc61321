//! PID gains as LQR state feedback on `[∫e, e, ė]`.
//!
//! `u = −Fx` with `F = −[Ki, Kp, Kd]` is exactly `Ki∫e + Kp·e + Kd·ė`.
//! In transfer-function form the digital controller corresponds to
//! `C(z) = Kp + Ki/(1 − z⁻¹) + Kd(1 − z⁻¹)`; here it is realized as state
//! feedback on estimated states instead, so the DARE gain applies unchanged.

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::scalar::{is_finite, Real};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PidGains<T> {
    pub kp: T,
    pub ki: T,
    pub kd: T,
}

impl<T: Real> PidGains<T> {
    pub fn new(kp: T, ki: T, kd: T) -> Self {
        Self { kp, ki, kd }
    }

    /// The feedback row `F = −[Ki, Kp, Kd]`.
    pub fn feedback(&self) -> [T; 3] {
        [-self.ki, -self.kp, -self.kd]
    }

    pub fn is_finite(&self) -> bool {
        is_finite(self.kp) && is_finite(self.ki) && is_finite(self.kd)
    }
}

/// Reads `(Ki, Kp, Kd)` off a feedback row ordered for `[∫e, e, ė]`.
pub fn gains_from_feedback<T: Real>(f: &[T]) -> Result<PidGains<T>> {
    ensure!(f.len() == 3, DimensionMismatch, "feedback row must have 3 entries, got {}", f.len());
    ensure!(f.iter().all(|&v| is_finite(v)), InvalidParameter, "feedback entries must be finite");
    Ok(PidGains { ki: -f[0], kp: -f[1], kd: -f[2] })
}

/// One sample of the digital PID law.
///
/// The integral state advances by the trapezoid rule and the derivative is
/// the backward difference. Returns `(u, new_integral)`.
pub fn discrete_control_step<T: Real>(gains: &PidGains<T>, e_now: T, e_prev: T, integral: T, ts: T) -> (T, T) {
    let acc = integral + ts * (e_now + e_prev) * T::lit(0.5);
    let de = (e_now - e_prev) / ts;
    (gains.ki * acc + gains.kp * e_now + gains.kd * de, acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sign_identity() {
        let g = gains_from_feedback(&[-0.2, -0.4, -0.6]).unwrap();
        assert_eq!((g.ki, g.kp, g.kd), (0.2, 0.4, 0.6));
    }

    #[test]
    fn from_riccati_third_row() {
        // F = R⁻¹BᵀP with B = [0,0,−K], K = 2, R = 1, P third row [0.1, 0.2, 0.3]
        let (k, r) = (2.0, 1.0);
        let p3 = [0.1, 0.2, 0.3];
        let f: Vec<f64> = p3.iter().map(|v| -k * v / r).collect();
        let g = gains_from_feedback(&f).unwrap();
        assert_eq!((g.ki, g.kp, g.kd), (0.2, 0.4, 0.6));
    }

    #[test]
    fn zero_feedback() {
        let g = gains_from_feedback(&[0.0, 0.0, 0.0]).unwrap();
        assert_eq!((g.ki, g.kp, g.kd), (0.0, 0.0, 0.0));
    }

    #[test]
    fn wrong_length_rejected() {
        assert!(gains_from_feedback(&[1.0, 2.0]).is_err());
        assert!(gains_from_feedback(&[1.0, f64::NAN, 2.0]).is_err());
    }

    #[test]
    fn control_step_examples() {
        let (u, acc) = discrete_control_step(&PidGains::new(1.0, 1.0, 1.0), 0.0, 0.0, 0.0, 0.1);
        assert_eq!((u, acc), (0.0, 0.0));

        let (u, _) = discrete_control_step(&PidGains::new(1.0, 0.0, 0.0), 0.5, -3.0, 7.0, 0.2);
        assert_eq!(u, 0.5);

        // gains given as (ki, kp, kd) = (2, 0, 0)
        let (u, acc) = discrete_control_step(&PidGains::new(0.0, 2.0, 0.0), 1.0, 1.0, 0.0, 0.5);
        assert_eq!(acc, 0.5);
        assert_eq!(u, 1.0);
    }

    proptest! {
        #[test]
        fn feedback_round_trip(f in proptest::array::uniform3(-1e3f64..1e3)) {
            let g = gains_from_feedback(&f).unwrap();
            prop_assert_eq!(g.feedback(), f);
        }

        #[test]
        fn control_step_is_linear(
            a in -10f64..10.0, b in -10f64..10.0,
            x in proptest::array::uniform3(-5f64..5.0),
            y in proptest::array::uniform3(-5f64..5.0),
        ) {
            let g = PidGains::new(1.3, 0.7, 0.4);
            let ts = 0.1;
            let (ux, ax) = discrete_control_step(&g, x[0], x[1], x[2], ts);
            let (uy, ay) = discrete_control_step(&g, y[0], y[1], y[2], ts);
            let (uz, az) = discrete_control_step(
                &g, a * x[0] + b * y[0], a * x[1] + b * y[1], a * x[2] + b * y[2], ts);
            prop_assert!((uz - (a * ux + b * uy)).abs() <= 1e-9 * (1.0 + uz.abs()));
            prop_assert!((az - (a * ax + b * ay)).abs() <= 1e-9 * (1.0 + az.abs()));
        }
    }
}
