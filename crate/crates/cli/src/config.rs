//! Experiment configuration (TOML). Every section is optional and every key
//! has a default; unknown keys are rejected.

use std::path::Path;

use lqrpid::{CostSpec, GaConfig, PidGains, Scenario, SecondOrderPlant, TuningMode};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    #[default]
    Care,
    Dare,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub mode: ModeName,
    /// Sampling time for DARE designs, seconds.
    pub ts: f64,
    pub plant: PlantSection,
    pub cost: CostSection,
    pub scenario: ScenarioSection,
    pub ga: GaSection,
    pub gains: GainsSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub compare: Option<CompareSection>,
    pub fracdemo: FracdemoSection,
    pub sweep: SweepSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            mode: ModeName::Care,
            ts: 0.1,
            plant: PlantSection::default(),
            cost: CostSection::default(),
            scenario: ScenarioSection::default(),
            ga: GaSection::default(),
            gains: GainsSection::default(),
            compare: None,
            fracdemo: FracdemoSection::default(),
            sweep: SweepSection::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlantSection {
    pub k: f64,
    pub xi: f64,
    pub wn: f64,
}

impl Default for PlantSection {
    fn default() -> Self {
        Self { k: 1.0, xi: 0.2, wn: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CostSection {
    pub lambda: f64,
    pub w1: f64,
    pub w2: f64,
    pub horizon: f64,
    pub eval_step: f64,
    /// Whether the tuning objective sees the load disturbance.
    pub include_disturbance: bool,
}

impl Default for CostSection {
    fn default() -> Self {
        let d = CostSpec::<f64>::default();
        Self {
            lambda: d.lambda,
            w1: d.w1,
            w2: d.w2,
            horizon: d.horizon,
            eval_step: d.eval_step,
            include_disturbance: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioSection {
    pub setpoint: f64,
    pub disturbance_time: f64,
    /// Load step size; 0 disables the disturbance.
    pub disturbance_magnitude: f64,
    pub dt: f64,
}

impl Default for ScenarioSection {
    fn default() -> Self {
        Self { setpoint: 1.0, disturbance_time: 50.0, disturbance_magnitude: 1.0, dt: 1e-3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GaSection {
    pub population: usize,
    pub elite: usize,
    pub crossover_fraction: f64,
    pub mutation_scale: f64,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub max_generations: usize,
    pub stall_generations: usize,
    pub stall_tolerance: f64,
    pub seed: u64,
    pub restarts: usize,
}

impl Default for GaSection {
    fn default() -> Self {
        let d = GaConfig::<f64>::default();
        Self {
            population: d.population,
            elite: d.elite,
            crossover_fraction: d.crossover_fraction,
            mutation_scale: d.mutation_scale,
            lower: d.bounds.iter().map(|b| b.0).collect(),
            upper: d.bounds.iter().map(|b| b.1).collect(),
            max_generations: d.max_generations,
            stall_generations: d.stall_generations,
            stall_tolerance: d.stall_tolerance,
            seed: d.seed,
            restarts: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GainsSection {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
}

impl Default for GainsSection {
    fn default() -> Self {
        Self { kp: 2.0, ki: 2.0, kd: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareSection {
    /// Row-major symmetric matrix.
    pub p_a: Vec<Vec<f64>>,
    pub p_b: Vec<Vec<f64>>,
    #[serde(default)]
    pub label_a: Option<String>,
    #[serde(default)]
    pub label_b: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FracdemoSection {
    pub lambdas: Vec<f64>,
    pub w1: f64,
    pub w2: f64,
}

impl Default for FracdemoSection {
    fn default() -> Self {
        Self { lambdas: vec![0.5, 1.0, 1.5], w1: 1.0, w2: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub ts_min: f64,
    pub ts_max: f64,
    pub ts_step: f64,
    /// Diagonal of Q for the continuous reference design.
    pub q: Vec<f64>,
    pub r: f64,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self { ts_min: 0.1, ts_max: 1.0, ts_step: 0.1, q: vec![1.0; 3], r: 1.0 }
    }
}

fn invalid(section: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("[{section}] {e}"))
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn plant(&self) -> Result<SecondOrderPlant<f64>, CliError> {
        SecondOrderPlant::new(self.plant.k, self.plant.xi, self.plant.wn).map_err(|e| invalid("plant", e))
    }

    pub fn tuning_mode(&self) -> Result<TuningMode<f64>, CliError> {
        let mode = match self.mode {
            ModeName::Care => TuningMode::Care,
            ModeName::Dare => TuningMode::Dare { ts: self.ts },
        };
        mode.validate().map_err(|e| invalid("ts", e))?;
        Ok(mode)
    }

    pub fn cost_spec(&self) -> Result<CostSpec<f64>, CliError> {
        let spec = CostSpec {
            lambda: self.cost.lambda,
            w1: self.cost.w1,
            w2: self.cost.w2,
            horizon: self.cost.horizon,
            eval_step: self.cost.eval_step,
        };
        spec.validate().map_err(|e| invalid("cost", e))?;
        Ok(spec)
    }

    /// Servo scenario over the cost horizon, with the configured load step.
    pub fn scenario(&self) -> Result<Scenario<f64>, CliError> {
        let s = &self.scenario;
        let mut scenario = Scenario::servo(self.cost.horizon, s.dt);
        scenario.setpoint = s.setpoint;
        if s.disturbance_magnitude != 0.0 {
            scenario = scenario.with_disturbance(s.disturbance_time, s.disturbance_magnitude);
        }
        scenario.validate().map_err(|e| invalid("scenario", e))?;
        if let ModeName::Dare = self.mode {
            let ratio = self.ts / s.dt;
            if ratio < 1.0 - 1e-9 || (ratio - ratio.round()).abs() > 1e-6 * ratio {
                return Err(invalid("scenario", format!("dt = {} must divide ts = {}", s.dt, self.ts)));
            }
        }
        let stride = self.cost.eval_step / s.dt;
        if stride < 1.0 - 1e-9 || (stride - stride.round()).abs() > 1e-6 * stride {
            return Err(invalid("cost", format!("eval_step = {} must be a multiple of dt = {}", self.cost.eval_step, s.dt)));
        }
        Ok(scenario)
    }

    /// Scenario seen by the tuning objective.
    pub fn tuning_scenario(&self) -> Result<Scenario<f64>, CliError> {
        let scenario = self.scenario()?;
        Ok(if self.cost.include_disturbance { scenario } else { scenario.without_disturbance() })
    }

    pub fn ga_config(&self) -> Result<GaConfig<f64>, CliError> {
        let g = &self.ga;
        if g.lower.len() != 4 || g.upper.len() != 4 {
            return Err(invalid("ga", "lower and upper must list 4 bounds (q1, q2, q3, r)"));
        }
        if g.restarts == 0 {
            return Err(invalid("ga", "restarts must be at least 1"));
        }
        let config = GaConfig {
            population: g.population,
            elite: g.elite,
            crossover_fraction: g.crossover_fraction,
            mutation_scale: g.mutation_scale,
            bounds: g.lower.iter().copied().zip(g.upper.iter().copied()).collect(),
            max_generations: g.max_generations,
            stall_generations: g.stall_generations,
            stall_tolerance: g.stall_tolerance,
            seed: g.seed,
            initial_population: None,
        };
        config.validate().map_err(|e| invalid("ga", e))?;
        Ok(config)
    }

    pub fn pid_gains(&self) -> Result<PidGains<f64>, CliError> {
        let g = PidGains::new(self.gains.kp, self.gains.ki, self.gains.kd);
        if !g.is_finite() {
            return Err(invalid("gains", "gains must be finite"));
        }
        Ok(g)
    }
}
