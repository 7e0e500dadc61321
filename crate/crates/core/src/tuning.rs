//! End-to-end PID tuning: GA over `(q1, q2, q3, r)` → Riccati → gains →
//! closed-loop servo simulation → fractional cost.
//!
//! CARE designs are simulated as the continuous loop. DARE designs are
//! simulated as the sampled-data loop (control held over each sampling
//! period, plant recorded on the fine `scenario.dt` grid) so the same cost
//! quadrature grid applies to both.

use nalgebra::DMatrix;
use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cloop::{simulate_continuous, simulate_sampled, LoopMode, Scenario, SimTrace};
use crate::costfn::{fractional_cost, CostSpec};
use crate::error::{ensure, Error, Result};
use crate::ga::{ga_optimize, GaConfig};
use crate::linalg::eigenvalues;
use crate::pidmap::{gains_from_feedback, PidGains};
use crate::riccati::{solve_care_weights, solve_dare_weights, LqrWeights, RiccatiSolution};
use crate::scalar::{is_finite, Real};
use crate::ssmodel::{build_plant_state_space, discretize_plant, SecondOrderPlant};

/// Cost assigned to candidates whose design or simulation fails.
pub const PENALTY: f64 = 1e10;

/// Smallest control weight admitted; keeps `R` positive definite.
pub const MIN_CONTROL_WEIGHT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TuningMode<T> {
    Care,
    Dare { ts: T },
}

impl<T: Real> TuningMode<T> {
    pub fn validate(&self) -> Result<()> {
        if let TuningMode::Dare { ts } = self {
            ensure!(*ts > T::zero() && is_finite(*ts), InvalidParameter, "sampling time must be positive");
        }
        Ok(())
    }
}

/// Outcome of one tuned design.
#[derive(Debug, Clone, PartialEq)]
pub struct TuningResult<T: Real> {
    pub best_weights: LqrWeights<T>,
    pub gains: PidGains<T>,
    pub riccati: RiccatiSolution<T>,
    pub j_min: T,
    pub history: Vec<T>,
    pub mode: TuningMode<T>,
    /// Eigenvalues of `A − BF` (CARE) or `G − HF` (DARE).
    pub closed_loop_poles: Vec<Complex<T>>,
    pub seed: u64,
    pub evaluations: usize,
}

/// Riccati design for one weight set.
#[derive(Debug, Clone, PartialEq)]
pub struct Design<T: Real> {
    pub weights: LqrWeights<T>,
    pub riccati: RiccatiSolution<T>,
    pub gains: PidGains<T>,
    pub closed_loop_poles: Vec<Complex<T>>,
}

/// Maps a GA vector `(q1, q2, q3, r)` to weights, flooring `r`.
pub fn weights_from_vector<T: Real>(x: &[T]) -> Result<LqrWeights<T>> {
    ensure!(x.len() == 4, DimensionMismatch, "weight vector must have 4 entries, got {}", x.len());
    LqrWeights::new(x[0], x[1], x[2], x[3].max(T::lit(MIN_CONTROL_WEIGHT)))
}

/// Solves the Riccati equation of `mode` for `weights` and reads off the PID gains.
pub fn design<T: Real>(plant: &SecondOrderPlant<T>, mode: &TuningMode<T>, weights: &LqrWeights<T>) -> Result<Design<T>> {
    mode.validate()?;
    let ss = build_plant_state_space(plant);
    let (riccati, closed) = match mode {
        TuningMode::Care => {
            let sol = solve_care_weights(ss.a(), ss.b(), weights)?;
            let closed: DMatrix<T> = ss.a() - ss.b() * &sol.feedback;
            (sol, closed)
        }
        TuningMode::Dare { ts } => {
            let d = discretize_plant(plant, *ts)?;
            let sol = solve_dare_weights(d.g(), d.h(), weights)?;
            let closed: DMatrix<T> = d.g() - d.h() * &sol.feedback;
            (sol, closed)
        }
    };
    let gains = gains_from_feedback(riccati.feedback.as_slice())?;
    Ok(Design { weights: *weights, riccati, gains, closed_loop_poles: eigenvalues(&closed)? })
}

/// Closed-loop servo trace of `gains` under `mode`.
pub fn simulate_design<T: Real>(
    plant: &SecondOrderPlant<T>,
    mode: &TuningMode<T>,
    gains: &PidGains<T>,
    scenario: &Scenario<T>,
) -> Result<SimTrace<T>> {
    let run = match mode {
        TuningMode::Care => simulate_continuous(plant, gains, scenario),
        TuningMode::Dare { ts } => {
            let d = discretize_plant(plant, *ts)?;
            simulate_sampled(&d, &gains.feedback(), scenario)
        }
    };
    run.map_err(|e| e.into_error())
}

/// Fractional cost of given gains through the tuning pipeline's simulation.
pub fn evaluate_gains<T: Real>(
    plant: &SecondOrderPlant<T>,
    mode: &TuningMode<T>,
    gains: &PidGains<T>,
    spec: &CostSpec<T>,
    scenario: &Scenario<T>,
) -> Result<T> {
    let trace = simulate_design(plant, mode, gains, scenario)?;
    let j = fractional_cost(&trace, spec)?;
    ensure!(is_finite(j), Numeric, "cost is not finite");
    Ok(j)
}

/// Full pipeline cost of a weight set.
pub fn evaluate_weights<T: Real>(
    plant: &SecondOrderPlant<T>,
    mode: &TuningMode<T>,
    weights: &LqrWeights<T>,
    spec: &CostSpec<T>,
    scenario: &Scenario<T>,
) -> Result<T> {
    let d = design(plant, mode, weights)?;
    evaluate_gains(plant, mode, &d.gains, spec, scenario)
}

fn check_setup<T: Real>(mode: &TuningMode<T>, spec: &CostSpec<T>, scenario: &Scenario<T>) -> Result<()> {
    mode.validate()?;
    spec.validate()?;
    scenario.validate()?;
    ensure!(
        matches!(scenario.mode, LoopMode::Servo),
        InvalidParameter,
        "tuning runs on the servo loop"
    );
    ensure!(
        scenario.horizon >= spec.horizon,
        InvalidParameter,
        "simulation horizon {} is shorter than the cost horizon {}",
        scenario.horizon.as_f64(),
        spec.horizon.as_f64()
    );
    Ok(())
}

/// GA search for the weights minimizing the fractional cost.
pub fn tune_pid<T: Real>(
    plant: &SecondOrderPlant<T>,
    mode: &TuningMode<T>,
    spec: &CostSpec<T>,
    scenario: &Scenario<T>,
    config: &GaConfig<T>,
) -> Result<TuningResult<T>> {
    check_setup(mode, spec, scenario)?;
    ensure!(config.dimension() == 4, DimensionMismatch, "search space must be (q1, q2, q3, r)");
    let penalty = T::lit(PENALTY);
    let objective = |x: &[T]| -> T {
        weights_from_vector(x)
            .and_then(|w| evaluate_weights(plant, mode, &w, spec, scenario))
            .unwrap_or(penalty)
    };
    let outcome = ga_optimize(objective, config)?;
    if outcome.cost >= penalty {
        return Err(Error::NotStabilizing(
            "no candidate produced a stabilizing design with a finite cost".into(),
        ));
    }
    let weights = weights_from_vector(&outcome.best)?;
    let d = design(plant, mode, &weights)?;
    Ok(TuningResult {
        best_weights: weights,
        gains: d.gains,
        riccati: d.riccati,
        j_min: outcome.cost,
        history: outcome.history,
        mode: *mode,
        closed_loop_poles: d.closed_loop_poles,
        seed: config.seed,
        evaluations: outcome.evaluations,
    })
}

/// Independent runs with seeds `config.seed + i`; returns all of them and
/// the index of the lowest cost (earliest on ties).
pub fn tune_pid_restarts<T: Real>(
    plant: &SecondOrderPlant<T>,
    mode: &TuningMode<T>,
    spec: &CostSpec<T>,
    scenario: &Scenario<T>,
    config: &GaConfig<T>,
    restarts: usize,
) -> Result<(Vec<TuningResult<T>>, usize)> {
    ensure!(restarts >= 1, InvalidParameter, "at least one restart is required");
    let runs: Vec<Result<TuningResult<T>>> = (0..restarts)
        .into_par_iter()
        .map(|i| tune_pid(plant, mode, spec, scenario, &config.clone().with_seed(config.seed.wrapping_add(i as u64))))
        .collect();
    let runs: Vec<TuningResult<T>> = runs.into_iter().collect::<Result<_>>()?;
    let mut best = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.j_min < runs[best].j_min {
            best = i;
        }
    }
    Ok((runs, best))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oscillatory() -> SecondOrderPlant<f64> {
        SecondOrderPlant::new(1.0, 0.2, 1.0).unwrap()
    }

    fn short_setup() -> (CostSpec<f64>, Scenario<f64>, GaConfig<f64>) {
        let spec = CostSpec { horizon: 20.0, ..CostSpec::default() };
        let scenario = Scenario::servo(20.0, 1e-3);
        let config = GaConfig { population: 8, max_generations: 4, ..GaConfig::default() };
        (spec, scenario, config)
    }

    #[test]
    fn weight_vector_floors_r() {
        let w = weights_from_vector(&[1.0, 2.0, 3.0, 0.0]).unwrap();
        assert_eq!(w.r, MIN_CONTROL_WEIGHT);
        assert!(weights_from_vector(&[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn design_gains_match_feedback() {
        let w = LqrWeights::new(1.0, 1.0, 1.0, 1.0).unwrap();
        for mode in [TuningMode::Care, TuningMode::Dare { ts: 0.1 }] {
            let d = design(&oscillatory(), &mode, &w).unwrap();
            assert_eq!(d.gains.feedback().to_vec(), d.riccati.feedback.as_slice().to_vec());
            match mode {
                TuningMode::Care => assert!(d.closed_loop_poles.iter().all(|p| p.re < 0.0)),
                TuningMode::Dare { .. } => assert!(d.closed_loop_poles.iter().all(|p| p.norm() < 1.0)),
            }
        }
    }

    #[test]
    fn j_min_reproduces_and_result_is_certified() {
        let (spec, scenario, config) = short_setup();
        for mode in [TuningMode::Care, TuningMode::Dare { ts: 0.1 }] {
            let r = tune_pid(&oscillatory(), &mode, &spec, &scenario, &config).unwrap();
            let again = evaluate_weights(&oscillatory(), &mode, &r.best_weights, &spec, &scenario).unwrap();
            assert!((again - r.j_min).abs() <= 1e-9 * r.j_min.abs().max(1.0));
            assert!(r.history.windows(2).all(|w| w[1] <= w[0]));
            assert!(r.riccati.residual <= 1e-9);
            assert!(simulate_design(&oscillatory(), &mode, &r.gains, &scenario).is_ok());
        }
    }

    #[test]
    fn deterministic_for_a_seed() {
        let (spec, scenario, config) = short_setup();
        let a = tune_pid(&oscillatory(), &TuningMode::Care, &spec, &scenario, &config).unwrap();
        let b = tune_pid(&oscillatory(), &TuningMode::Care, &spec, &scenario, &config).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_weight_cost_is_zero() {
        let (spec, scenario, config) = short_setup();
        let spec = spec.with_weights(0.0, 0.0);
        let r = tune_pid(&oscillatory(), &TuningMode::Care, &spec, &scenario, &config).unwrap();
        assert_eq!(r.j_min, 0.0);
    }

    #[test]
    fn restarts_pick_the_best() {
        let (spec, scenario, config) = short_setup();
        let (runs, best) =
            tune_pid_restarts(&oscillatory(), &TuningMode::Care, &spec, &scenario, &config, 3).unwrap();
        assert_eq!(runs.len(), 3);
        assert_eq!(runs[2].seed, config.seed + 2);
        assert!(runs.iter().all(|r| r.j_min >= runs[best].j_min));
    }

    #[test]
    fn setup_errors_are_reported() {
        let (spec, scenario, config) = short_setup();
        let plant = oscillatory();
        let long = CostSpec { horizon: 50.0, ..spec };
        assert!(tune_pid(&plant, &TuningMode::Care, &long, &scenario, &config).is_err());
        assert!(tune_pid(&plant, &TuningMode::Dare { ts: 0.0 }, &spec, &scenario, &config).is_err());
        let bad_ga = GaConfig { bounds: vec![(0.0, 1.0); 3], ..config };
        assert!(tune_pid(&plant, &TuningMode::Care, &spec, &scenario, &bad_ga).is_err());
    }
}
