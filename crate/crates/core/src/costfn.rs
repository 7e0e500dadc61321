//! Time-domain performance indices over simulation traces.
//!
//! The integrand is `φ(t) = w₁·t·e(t)² + w₂·u(t)²` (ITSE + ISCO). The
//! fractional index applies a Riemann–Liouville integral of order `Λ` to `φ`
//! and reads it at the horizon; `Λ = 1` is the ordinary weighted integral.

use serde::{Deserialize, Serialize};

use crate::cloop::SimTrace;
use crate::error::{ensure, Result};
use crate::fracint::{rl_fractional_integral, rl_fractional_integral_final};
use crate::scalar::{is_finite, Real};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostSpec<T> {
    /// Integration order Λ.
    pub lambda: T,
    /// ITSE weight.
    pub w1: T,
    /// ISCO weight.
    pub w2: T,
    /// Evaluation horizon in seconds.
    pub horizon: T,
    /// Quadrature grid in seconds; must be a multiple of the trace step.
    pub eval_step: T,
}

impl<T: Real> Default for CostSpec<T> {
    fn default() -> Self {
        Self {
            lambda: T::one(),
            w1: T::one(),
            w2: T::one(),
            horizon: T::lit(100.0),
            eval_step: T::lit(0.01),
        }
    }
}

impl<T: Real> CostSpec<T> {
    pub fn with_lambda(mut self, lambda: T) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_weights(mut self, w1: T, w2: T) -> Self {
        self.w1 = w1;
        self.w2 = w2;
        self
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(self.lambda > T::zero() && is_finite(self.lambda), InvalidParameter, "lambda must be positive");
        ensure!(
            self.w1 >= T::zero() && self.w2 >= T::zero() && is_finite(self.w1) && is_finite(self.w2),
            InvalidParameter,
            "cost weights must be nonnegative"
        );
        ensure!(self.horizon > T::zero() && is_finite(self.horizon), InvalidParameter, "horizon must be positive");
        ensure!(
            self.eval_step > T::zero() && self.eval_step <= self.horizon,
            InvalidParameter,
            "eval_step must lie in (0, horizon]"
        );
        Ok(())
    }
}

/// Integrand samples `φ(t_k)` on the `eval_step` grid over `[0, horizon]`.
pub fn decimated_integrand<T: Real>(trace: &SimTrace<T>, spec: &CostSpec<T>) -> Result<Vec<T>> {
    spec.validate()?;
    ensure!(trace.len() >= 2, InvalidParameter, "trace needs at least two samples");
    let dt = trace.step();
    let ratio = (spec.eval_step / dt).as_f64();
    let stride = ratio.round();
    ensure!(
        stride >= 1.0 && (ratio - stride).abs() <= 1e-6 * ratio,
        InvalidParameter,
        "eval_step {} is not a multiple of the trace step {}",
        spec.eval_step.as_f64(),
        dt.as_f64()
    );
    let stride = stride as usize;
    let points = (spec.horizon / spec.eval_step).as_f64().round() as usize;
    let last = points * stride;
    ensure!(
        last < trace.len(),
        InvalidParameter,
        "trace ends at t = {} before the horizon {}",
        trace.times.last().map(|t| t.as_f64()).unwrap_or(0.0),
        spec.horizon.as_f64()
    );
    Ok((0..=points)
        .map(|i| {
            let k = i * stride;
            let (t, e, u) = (trace.times[k], trace.e[k], trace.u[k]);
            spec.w1 * t * e * e + spec.w2 * u * u
        })
        .collect())
}

/// `I^Λ φ` at the horizon.
pub fn fractional_cost<T: Real>(trace: &SimTrace<T>, spec: &CostSpec<T>) -> Result<T> {
    let phi = decimated_integrand(trace, spec)?;
    rl_fractional_integral_final(&phi, spec.eval_step, spec.lambda)
}

/// `I^Λ φ` over the whole `eval_step` grid; the last entry is [`fractional_cost`].
pub fn cost_trajectory<T: Real>(trace: &SimTrace<T>, spec: &CostSpec<T>) -> Result<Vec<T>> {
    let phi = decimated_integrand(trace, spec)?;
    rl_fractional_integral(&phi, spec.eval_step, spec.lambda)
}

/// `∫₀ᴴ w₁·t·e² + w₂·u² dt` by the trapezoid rule on the full trace grid.
pub fn itse_isco<T: Real>(trace: &SimTrace<T>, w1: T, w2: T, horizon: T) -> Result<T> {
    ensure!(trace.len() >= 2, InvalidParameter, "trace needs at least two samples");
    let end = *trace.times.last().unwrap();
    ensure!(
        end >= horizon - T::lit(1e-9) * trace.step(),
        InvalidParameter,
        "trace ends before the horizon"
    );
    let phi = |k: usize| w1 * trace.times[k] * trace.e[k] * trace.e[k] + w2 * trace.u[k] * trace.u[k];
    let half = T::lit(0.5);
    let mut acc = T::zero();
    for k in 1..trace.len() {
        if trace.times[k] > horizon + T::lit(1e-9) * trace.step() {
            break;
        }
        acc += (trace.times[k] - trace.times[k - 1]) * (phi(k) + phi(k - 1)) * half;
    }
    Ok(acc)
}
