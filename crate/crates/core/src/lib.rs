//! LQR-based PID tuning for second-order processes.
//!
//! A PID loop on a second-order plant is written as state feedback on the
//! error states `[∫e, e, ė]`, so the PID gains are an LQR gain. The weights
//! `Q = diag(q1, q2, q3)`, `R = r` are chosen by a genetic algorithm that
//! minimizes a time-domain index (ITSE + ISCO) integrated to an arbitrary
//! fractional order Λ. Both continuous (CARE) and sampled (DARE) designs are
//! supported.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the common `f64` instantiations.

// Negated comparisons are how NaN is routed to the failure branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cloop;
pub mod costfn;
pub mod error;
pub mod fracint;
pub mod ga;
pub mod linalg;
pub mod pidmap;
pub mod riccati;
pub mod scalar;
pub mod ssmodel;
pub mod tuning;

pub use analysis::{compare_riccati, cost_of_control, recommend_order, RiccatiComparison};
pub use cloop::{
    evaluate_quadratic_cost, evaluate_weighted_cost, simulate_continuous, simulate_discrete, simulate_sampled,
    simulate_state_feedback, Disturbance, LoopMode, Scenario, SimError, SimResult, SimTrace, TraceKind,
};
pub use costfn::{cost_trajectory, fractional_cost, itse_isco, CostSpec};
pub use error::{Error, Result};
pub use fracint::{
    gamma, oustaloup_fractional_integral, oustaloup_synthesize, rl_fractional_integral,
    rl_fractional_integral_final, OustaloupFilter,
};
pub use ga::{ga_optimize, gaussian_mutation, scattered_crossover, GaConfig, GaOutcome};
pub use pidmap::{discrete_control_step, gains_from_feedback, PidGains};
pub use riccati::{solve_care, solve_care_weights, solve_dare, solve_dare_weights, LqrWeights, RiccatiSolution};
pub use scalar::Real;
pub use ssmodel::{
    build_plant_state_space, discretize_plant, discretize_zoh, map_poles_to_z, DiscretePlant, SecondOrderPlant,
    StateSpace,
};
pub use tuning::{
    design, evaluate_gains, evaluate_weights, simulate_design, tune_pid, tune_pid_restarts, Design, TuningMode,
    TuningResult,
};

pub type Plant = SecondOrderPlant<f64>;
pub type Gains = PidGains<f64>;
pub type Weights = LqrWeights<f64>;
pub type Solution = RiccatiSolution<f64>;
pub type Trace = SimTrace<f64>;
pub type Spec = CostSpec<f64>;
pub type Config = GaConfig<f64>;
pub type Mode = TuningMode<f64>;
pub type Tuned = TuningResult<f64>;
pub type Model = StateSpace<f64>;
pub type Sampled = DiscretePlant<f64>;

pub type PlantF32 = SecondOrderPlant<f32>;
pub type GainsF32 = PidGains<f32>;
pub type SolutionF32 = RiccatiSolution<f32>;
pub type TraceF32 = SimTrace<f32>;
