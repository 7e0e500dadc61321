//! Closed-loop simulation of the error-state model under PID/state feedback.
//!
//! Servo mode tracks a step set-point `r`: the error dynamics pick up the
//! constant forcing `−ωₙ²r/K` at the plant input, so the simulator drives the
//! model with `ũ = u + d − ωₙ²r/K` from `x(0) = [0, r, 0]`. Regulator mode
//! drops that term and starts from a caller-supplied state; it is the setting
//! in which the LQR cost identity `J = x₀ᵀPx₀` holds.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{Error, Result};
use crate::pidmap::PidGains;
use crate::riccati::LqrWeights;
use crate::scalar::{is_finite, Real};
use crate::ssmodel::{build_plant_state_space, discretize_zoh, DiscretePlant, SecondOrderPlant, StateSpace};

/// Error magnitude treated as divergence.
pub const DIVERGENCE_LIMIT: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disturbance<T> {
    /// Step time in seconds.
    pub time: T,
    /// Step added at the plant input.
    pub magnitude: T,
}

impl<T: Real> Default for Disturbance<T> {
    fn default() -> Self {
        Self { time: T::lit(50.0), magnitude: T::one() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LoopMode<T> {
    Servo,
    Regulator { x0: Vec<T> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario<T> {
    pub setpoint: T,
    pub disturbance: Option<Disturbance<T>>,
    pub horizon: T,
    /// Integration (or intersample) step in seconds.
    pub dt: T,
    pub mode: LoopMode<T>,
}

impl<T: Real> Default for Scenario<T> {
    /// Unit set-point over 100 s at `dt = 1e-3`, unit load step at 50 s.
    fn default() -> Self {
        Self {
            setpoint: T::one(),
            disturbance: Some(Disturbance::default()),
            horizon: T::lit(100.0),
            dt: T::lit(1e-3),
            mode: LoopMode::Servo,
        }
    }
}

impl<T: Real> Scenario<T> {
    /// Set-point step only, no load disturbance.
    pub fn servo(horizon: T, dt: T) -> Self {
        Self { setpoint: T::one(), disturbance: None, horizon, dt, mode: LoopMode::Servo }
    }

    pub fn regulator(x0: Vec<T>, horizon: T, dt: T) -> Self {
        Self { setpoint: T::zero(), disturbance: None, horizon, dt, mode: LoopMode::Regulator { x0 } }
    }

    pub fn with_disturbance(mut self, time: T, magnitude: T) -> Self {
        self.disturbance = Some(Disturbance { time, magnitude });
        self
    }

    pub fn without_disturbance(mut self) -> Self {
        self.disturbance = None;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.horizon > T::zero() && is_finite(self.horizon)) {
            return Err(Error::InvalidParameter("horizon must be positive".into()));
        }
        if !(self.dt > T::zero() && is_finite(self.dt)) {
            return Err(Error::InvalidParameter("dt must be positive".into()));
        }
        if !is_finite(self.setpoint) {
            return Err(Error::InvalidParameter("set-point must be finite".into()));
        }
        if let Some(d) = &self.disturbance {
            if !(d.time >= T::zero() && d.time <= self.horizon && is_finite(d.magnitude)) {
                return Err(Error::InvalidParameter("disturbance time must lie in [0, horizon]".into()));
            }
        }
        if let LoopMode::Regulator { x0 } = &self.mode {
            if !x0.iter().all(|&v| is_finite(v)) {
                return Err(Error::InvalidParameter("initial state must be finite".into()));
            }
        }
        Ok(())
    }

    fn is_servo(&self) -> bool {
        matches!(self.mode, LoopMode::Servo)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TraceKind {
    Servo,
    Regulator,
}

/// Uniformly sampled closed-loop signals with the full state history.
#[derive(Debug, Clone, PartialEq)]
pub struct SimTrace<T> {
    pub times: Vec<T>,
    pub setpoint: T,
    pub e: Vec<T>,
    pub u: Vec<T>,
    pub y: Vec<T>,
    states: Vec<T>,
    n_states: usize,
    pub kind: TraceKind,
}

impl<T: Real> SimTrace<T> {
    fn with_capacity(n_states: usize, cap: usize, setpoint: T, kind: TraceKind) -> Self {
        Self {
            times: Vec::with_capacity(cap),
            setpoint,
            e: Vec::with_capacity(cap),
            u: Vec::with_capacity(cap),
            y: Vec::with_capacity(cap),
            states: Vec::with_capacity(cap * n_states),
            n_states,
            kind,
        }
    }

    fn push(&mut self, t: T, e: T, u: T, x: &[T]) {
        self.times.push(t);
        self.e.push(e);
        self.u.push(u);
        self.y.push(self.setpoint - e);
        self.states.extend_from_slice(x);
    }

    /// A trace holding only `e` and `u` on the given time grid (no state
    /// history). `y` is derived as `setpoint − e`.
    pub fn from_signals(times: Vec<T>, setpoint: T, e: Vec<T>, u: Vec<T>) -> Result<Self> {
        if times.len() != e.len() || times.len() != u.len() {
            return Err(Error::DimensionMismatch("times, e and u must have equal length".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("times must be strictly increasing".into()));
        }
        let y = e.iter().map(|&v| setpoint - v).collect();
        Ok(Self { times, setpoint, e, u, y, states: Vec::new(), n_states: 0, kind: TraceKind::Servo })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Sample spacing.
    pub fn step(&self) -> T {
        if self.times.len() < 2 {
            T::zero()
        } else {
            self.times[1] - self.times[0]
        }
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn state(&self, k: usize) -> &[T] {
        &self.states[k * self.n_states..(k + 1) * self.n_states]
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError<T: std::fmt::Debug> {
    #[error(transparent)]
    Invalid(#[from] Error),
    /// The error signal exceeded the divergence limit; the trace stops there.
    #[error("unstable trajectory at t = {time:?}")]
    Unstable { time: T, trace: Box<SimTrace<T>> },
}

impl<T: std::fmt::Debug> SimError<T> {
    pub fn into_error(self) -> Error {
        match self {
            SimError::Invalid(e) => e,
            SimError::Unstable { time, .. } => Error::Numeric(format!("unstable trajectory at t = {time:?}")),
        }
    }
}

pub type SimResult<T> = std::result::Result<SimTrace<T>, SimError<T>>;

/// Row-major dense matrix-vector product `out = m x`.
#[inline]
fn matvec<T: Real>(m: &[T], x: &[T], out: &mut [T]) {
    let n = x.len();
    for (i, o) in out.iter_mut().enumerate() {
        let row = &m[i * n..(i + 1) * n];
        let mut acc = T::zero();
        for j in 0..n {
            acc += row[j] * x[j];
        }
        *o = acc;
    }
}

#[inline]
fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

fn row_major<T: Real>(m: &DMatrix<T>) -> Vec<T> {
    m.transpose().as_slice().to_vec()
}

fn step_count<T: Real>(horizon: T, step: T) -> usize {
    (horizon / step - T::lit(1e-9)).ceil().as_f64().max(1.0) as usize
}

/// Whether the disturbance acts during the step that starts at `k·dt`.
#[inline]
fn disturbance_at<T: Real>(d: &Option<Disturbance<T>>, k: usize, dt: T) -> T {
    match d {
        Some(d) if T::lit(k as f64 + 0.5) * dt > d.time => d.magnitude,
        _ => T::zero(),
    }
}

fn diverged<T: Real>(e: T) -> bool {
    !(e.abs() <= T::lit(DIVERGENCE_LIMIT))
}

struct LoopData<T> {
    acl: Vec<T>,
    b: Vec<T>,
    f: Vec<T>,
    c: Vec<T>,
    x0: Vec<T>,
    bias: T,
}

fn loop_data<T: Real>(
    ss: &StateSpace<T>,
    feedback: &[T],
    scenario: &Scenario<T>,
    plant: Option<&SecondOrderPlant<T>>,
) -> Result<LoopData<T>> {
    scenario.validate()?;
    let n = ss.states();
    if ss.inputs() != 1 {
        return Err(Error::DimensionMismatch("closed-loop simulation needs a single input".into()));
    }
    if feedback.len() != n {
        return Err(Error::DimensionMismatch(format!("feedback row must have {n} entries")));
    }
    if !feedback.iter().all(|&v| is_finite(v)) {
        return Err(Error::InvalidParameter("feedback must be finite".into()));
    }
    let frow = DMatrix::from_row_slice(1, n, feedback);
    let acl = ss.a() - ss.b() * &frow;
    let (x0, bias) = match (&scenario.mode, plant) {
        (LoopMode::Regulator { x0 }, _) => {
            if x0.len() != n {
                return Err(Error::DimensionMismatch(format!("initial state must have {n} entries")));
            }
            (x0.clone(), T::zero())
        }
        (LoopMode::Servo, Some(p)) if n == 3 => {
            (vec![T::zero(), scenario.setpoint, T::zero()], p.holding_input(scenario.setpoint))
        }
        (LoopMode::Servo, _) => {
            return Err(Error::InvalidParameter("servo mode needs a second-order plant model".into()))
        }
    };
    Ok(LoopData {
        acl: row_major(&acl),
        b: ss.b().as_slice().to_vec(),
        f: feedback.to_vec(),
        c: ss.output().as_slice().to_vec(),
        x0,
        bias,
    })
}

fn run_rk4<T: Real>(data: &LoopData<T>, scenario: &Scenario<T>) -> SimResult<T> {
    let n = data.x0.len();
    let dt = scenario.dt;
    let steps = step_count(scenario.horizon, dt);
    let kind = if scenario.is_servo() { TraceKind::Servo } else { TraceKind::Regulator };
    let setpoint = if scenario.is_servo() { scenario.setpoint } else { T::zero() };
    let mut trace = SimTrace::with_capacity(n, steps + 1, setpoint, kind);

    let mut x = data.x0.clone();
    let mut k1 = vec![T::zero(); n];
    let mut k2 = vec![T::zero(); n];
    let mut k3 = vec![T::zero(); n];
    let mut k4 = vec![T::zero(); n];
    let mut tmp = vec![T::zero(); n];
    let half = T::lit(0.5);
    let sixth = T::one() / T::lit(6.0);
    let two = T::lit(2.0);

    for k in 0..=steps {
        let t = T::lit(k as f64) * dt;
        let e = dot(&data.c, &x);
        let u = -dot(&data.f, &x);
        trace.push(t, e, u, &x);
        if diverged(e) || !x.iter().all(|&v| is_finite(v)) {
            return Err(SimError::Unstable { time: t, trace: Box::new(trace) });
        }
        if k == steps {
            break;
        }
        let forcing = disturbance_at(&scenario.disturbance, k, dt) - data.bias;
        let rhs = |x: &[T], out: &mut [T]| {
            matvec(&data.acl, x, out);
            for (o, &b) in out.iter_mut().zip(&data.b) {
                *o += b * forcing;
            }
        };
        rhs(&x, &mut k1);
        for i in 0..n {
            tmp[i] = x[i] + half * dt * k1[i];
        }
        rhs(&tmp, &mut k2);
        for i in 0..n {
            tmp[i] = x[i] + half * dt * k2[i];
        }
        rhs(&tmp, &mut k3);
        for i in 0..n {
            tmp[i] = x[i] + dt * k3[i];
        }
        rhs(&tmp, &mut k4);
        for i in 0..n {
            x[i] += dt * sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i]);
        }
    }
    Ok(trace)
}

/// Continuous PID loop on the error-state model of `plant` (fixed-step RK4).
pub fn simulate_continuous<T: Real>(
    plant: &SecondOrderPlant<T>,
    gains: &PidGains<T>,
    scenario: &Scenario<T>,
) -> SimResult<T> {
    if !gains.is_finite() {
        return Err(Error::InvalidParameter("gains must be finite".into()).into());
    }
    let ss = build_plant_state_space(plant);
    let data = loop_data(&ss, &gains.feedback(), scenario, Some(plant))?;
    run_rk4(&data, scenario)
}

/// Continuous loop `u = −Fx` on an arbitrary single-input system (regulator mode).
pub fn simulate_state_feedback<T: Real>(ss: &StateSpace<T>, feedback: &[T], scenario: &Scenario<T>) -> SimResult<T> {
    let data = loop_data(ss, feedback, scenario, None)?;
    run_rk4(&data, scenario)
}

fn discrete_loop_data<T: Real>(
    dplant: &DiscretePlant<T>,
    feedback: &[T],
    scenario: &Scenario<T>,
) -> Result<LoopData<T>> {
    let ss = StateSpace::with_output(dplant.g().clone(), dplant.h().clone(), dplant.output().clone())?;
    loop_data(&ss, feedback, scenario, dplant.plant())
}

/// Discrete loop `x(k+1) = Gx(k) + H(u(k) + d(k) − ωₙ²r/K)`, `u(k) = −Fx(k)`,
/// recorded at the sampling instants.
pub fn simulate_discrete<T: Real>(dplant: &DiscretePlant<T>, feedback: &[T], scenario: &Scenario<T>) -> SimResult<T> {
    let data = discrete_loop_data(dplant, feedback, scenario)?;
    let n = data.x0.len();
    let ts = dplant.ts();
    let steps = step_count(scenario.horizon, ts);
    let kind = if scenario.is_servo() { TraceKind::Servo } else { TraceKind::Regulator };
    let setpoint = if scenario.is_servo() { scenario.setpoint } else { T::zero() };
    let mut trace = SimTrace::with_capacity(n, steps + 1, setpoint, kind);

    let g = row_major(dplant.g());
    let mut x = data.x0.clone();
    let mut next = vec![T::zero(); n];
    for k in 0..=steps {
        let t = T::lit(k as f64) * ts;
        let e = dot(&data.c, &x);
        let u = -dot(&data.f, &x);
        trace.push(t, e, u, &x);
        if diverged(e) || !x.iter().all(|&v| is_finite(v)) {
            return Err(SimError::Unstable { time: t, trace: Box::new(trace) });
        }
        if k == steps {
            break;
        }
        let d = match &scenario.disturbance {
            Some(d) if t >= d.time - T::lit(1e-9) * ts => d.magnitude,
            _ => T::zero(),
        };
        let input = u + d - data.bias;
        matvec(&g, &x, &mut next);
        for i in 0..n {
            x[i] = next[i] + data.b[i] * input;
        }
    }
    Ok(trace)
}

/// Sampled-data loop: the digital control `u(k) = −Fx(k)` is held between
/// samples and the continuous plant is recorded every `scenario.dt`.
///
/// `dt` must divide the sampling time. Between grid points the state is
/// propagated exactly (ZOH over `dt`), so at the sampling instants this agrees
/// with [`simulate_discrete`].
pub fn simulate_sampled<T: Real>(dplant: &DiscretePlant<T>, feedback: &[T], scenario: &Scenario<T>) -> SimResult<T> {
    scenario.validate()?;
    let cont = dplant
        .continuous()
        .ok_or_else(|| Error::InvalidParameter("sampled-data simulation needs the continuous model".into()))?;
    let ts = dplant.ts();
    let ratio = (ts / scenario.dt).as_f64();
    let sub = ratio.round();
    if sub < 1.0 || (ratio - sub).abs() > 1e-6 * ratio {
        return Err(Error::InvalidParameter(format!(
            "dt = {} must divide the sampling time {}",
            scenario.dt.as_f64(),
            ts.as_f64()
        ))
        .into());
    }
    let sub = sub as usize;
    let fine = discretize_zoh(cont, scenario.dt)?;
    let data = loop_data(cont, feedback, scenario, dplant.plant())?;
    let n = data.x0.len();
    let dt = scenario.dt;
    let steps = step_count(scenario.horizon, dt);
    let kind = if scenario.is_servo() { TraceKind::Servo } else { TraceKind::Regulator };
    let setpoint = if scenario.is_servo() { scenario.setpoint } else { T::zero() };
    let mut trace = SimTrace::with_capacity(n, steps + 1, setpoint, kind);

    let g = row_major(fine.g());
    let h = fine.h().as_slice().to_vec();
    let mut x = data.x0.clone();
    let mut next = vec![T::zero(); n];
    let mut u = T::zero();
    for k in 0..=steps {
        let t = T::lit(k as f64) * dt;
        if k % sub == 0 {
            u = -dot(&data.f, &x);
        }
        let e = dot(&data.c, &x);
        trace.push(t, e, u, &x);
        if diverged(e) || !x.iter().all(|&v| is_finite(v)) {
            return Err(SimError::Unstable { time: t, trace: Box::new(trace) });
        }
        if k == steps {
            break;
        }
        let input = u + disturbance_at(&scenario.disturbance, k, dt) - data.bias;
        matvec(&g, &x, &mut next);
        for i in 0..n {
            x[i] = next[i] + h[i] * input;
        }
    }
    Ok(trace)
}

/// LQR running cost of a regulator trace.
///
/// Continuous traces integrate `xᵀQx + Ru²` by the trapezoid rule; discrete
/// traces use the plain sum over samples (no `Ts` factor).
pub fn evaluate_quadratic_cost<T: Real>(trace: &SimTrace<T>, q: &DMatrix<T>, r: T, discrete: bool) -> Result<T> {
    if trace.kind != TraceKind::Regulator {
        return Err(Error::InvalidParameter(
            "quadratic cost identity only holds for regulator traces".into(),
        ));
    }
    let n = trace.n_states();
    if q.nrows() != n || q.ncols() != n {
        return Err(Error::DimensionMismatch(format!("Q must be {n}x{n}")));
    }
    let q = row_major(q);
    let mut qx = vec![T::zero(); n];
    let running: Vec<T> = (0..trace.len())
        .map(|k| {
            let x = trace.state(k);
            matvec(&q, x, &mut qx);
            dot(x, &qx) + r * trace.u[k] * trace.u[k]
        })
        .collect();
    if discrete {
        return Ok(running.iter().fold(T::zero(), |acc, &v| acc + v));
    }
    let half = T::lit(0.5);
    Ok(running
        .windows(2)
        .zip(trace.times.windows(2))
        .fold(T::zero(), |acc, (v, t)| acc + (t[1] - t[0]) * (v[0] + v[1]) * half))
}

/// [`evaluate_quadratic_cost`] with the diagonal PID weights.
pub fn evaluate_weighted_cost<T: Real>(trace: &SimTrace<T>, weights: &LqrWeights<T>, discrete: bool) -> Result<T> {
    evaluate_quadratic_cost(trace, &weights.q_matrix(), weights.r, discrete)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn oscillatory() -> SecondOrderPlant<f64> {
        SecondOrderPlant::new(1.0, 0.2, 1.0).unwrap()
    }

    #[test]
    fn zero_gains_at_equilibrium() {
        let sc = Scenario::regulator(vec![0.0; 3], 10.0, 1e-2);
        let tr = simulate_continuous(&oscillatory(), &PidGains::new(0.0, 0.0, 0.0), &sc).unwrap();
        assert!(tr.e.iter().chain(&tr.u).chain(&tr.y).all(|&v| v == 0.0));
        assert_eq!(tr.len(), 1001);
    }

    #[test]
    fn discrete_zero_feedback_at_equilibrium() {
        let dp = crate::ssmodel::discretize_plant(&oscillatory(), 0.1).unwrap();
        let sc = Scenario::regulator(vec![0.0; 3], 5.0, 0.1);
        let tr = simulate_discrete(&dp, &[0.0; 3], &sc).unwrap();
        assert!(tr.e.iter().chain(&tr.u).all(|&v| v == 0.0));
    }

    #[test]
    fn scalar_geometric_decay() {
        let dp = DiscretePlant::new(DMatrix::from_element(1, 1, 1.0), DMatrix::from_element(1, 1, 0.5), 1.0).unwrap();
        let tr = simulate_discrete(&dp, &[1.0], &Scenario::regulator(vec![1.0], 3.0, 1.0)).unwrap();
        assert_eq!(tr.state(1), &[0.5]);
        assert_eq!(tr.state(2), &[0.25]);
        assert_eq!(tr.state(3), &[0.125]);
    }

    #[test]
    fn servo_requires_plant() {
        let dp = DiscretePlant::new(DMatrix::from_element(1, 1, 1.0), DMatrix::from_element(1, 1, 0.5), 1.0).unwrap();
        assert!(matches!(
            simulate_discrete(&dp, &[1.0], &Scenario::servo(3.0, 1.0)),
            Err(SimError::Invalid(_))
        ));
    }

    #[test]
    fn divergence_returns_partial_trace() {
        // negative gains destabilize the loop
        let sc = Scenario::servo(100.0, 1e-2);
        match simulate_continuous(&oscillatory(), &PidGains::new(-5.0, 1.0, -2.0), &sc) {
            Err(SimError::Unstable { time, trace }) => {
                assert!(time < 100.0);
                assert!(trace.len() >= 2);
                assert!(trace.e.last().unwrap().abs() > DIVERGENCE_LIMIT);
            }
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn invalid_scenarios() {
        let g = PidGains::new(1.0, 1.0, 1.0);
        let mut sc = Scenario::<f64>::servo(10.0, 0.0);
        assert!(simulate_continuous(&oscillatory(), &g, &sc).is_err());
        sc.dt = 0.01;
        sc.horizon = -1.0;
        assert!(simulate_continuous(&oscillatory(), &g, &sc).is_err());
        let sc = Scenario::servo(10.0, 0.01).with_disturbance(20.0, 1.0);
        assert!(simulate_continuous(&oscillatory(), &g, &sc).is_err());
        let sc = Scenario::regulator(vec![1.0, 0.0], 10.0, 0.01);
        assert!(simulate_continuous(&oscillatory(), &g, &sc).is_err());
    }

    #[test]
    fn servo_tracks_with_integral_action() {
        let plant = SecondOrderPlant::<f64>::new(1.0, 5.0, 1.0).unwrap();
        let g = PidGains::new(1.732432, 0.16095, 0.173052);
        let tr = simulate_continuous(&plant, &g, &Scenario::servo(100.0, 1e-3)).unwrap();
        assert!(tr.e.last().unwrap().abs() < 0.01);
        assert_abs_diff_eq!(*tr.u.last().unwrap(), 1.0, epsilon = 0.01);
        assert_abs_diff_eq!(tr.y[0], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn sampled_agrees_with_discrete_at_samples() {
        let dp = crate::ssmodel::discretize_plant(&oscillatory(), 0.1).unwrap();
        let f = PidGains::new(0.5, 0.2, 0.6).feedback();
        let sc = Scenario::servo(20.0, 1e-3).with_disturbance(10.0, 1.0);
        let coarse = simulate_discrete(&dp, &f, &sc).unwrap();
        let fine = simulate_sampled(&dp, &f, &sc).unwrap();
        for k in 0..coarse.len() {
            assert_abs_diff_eq!(coarse.e[k], fine.e[k * 100], epsilon = 1e-9);
            assert_abs_diff_eq!(coarse.u[k], fine.u[k * 100], epsilon = 1e-9);
        }
    }

    #[test]
    fn sampled_rejects_incommensurate_grid() {
        let dp = crate::ssmodel::discretize_plant(&oscillatory(), 0.1).unwrap();
        let sc = Scenario::servo(1.0, 0.03);
        assert!(simulate_sampled(&dp, &[0.0; 3], &sc).is_err());
    }

    #[test]
    fn quadratic_cost_rejects_servo() {
        let tr = simulate_continuous(&oscillatory(), &PidGains::new(1.0, 1.0, 1.0), &Scenario::servo(1.0, 0.01)).unwrap();
        let w = LqrWeights::new(1.0, 1.0, 1.0, 1.0).unwrap();
        assert!(evaluate_weighted_cost(&tr, &w, false).is_err());
    }

    #[test]
    fn quadratic_cost_of_zero_trace() {
        let sc = Scenario::regulator(vec![0.0; 3], 1.0, 0.01);
        let tr = simulate_continuous(&oscillatory(), &PidGains::new(1.0, 1.0, 1.0), &sc).unwrap();
        let w = LqrWeights::new(1.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(evaluate_weighted_cost(&tr, &w, false).unwrap(), 0.0);
        assert_eq!(evaluate_weighted_cost(&tr, &w, true).unwrap(), 0.0);
    }
}
