use std::path::Path;

use lqrpid::linalg::{eigenvalues, spectral_radius};
use lqrpid::{
    build_plant_state_space, compare_riccati, cost_trajectory, design, discretize_plant, fractional_cost, itse_isco,
    recommend_order, simulate_design, solve_care_weights, solve_dare_weights, tune_pid_restarts, CostSpec,
    LqrWeights, PidGains, SimTrace, TuningMode,
};
use nalgebra::DMatrix;
use num_complex::Complex;
use serde::Serialize;

use crate::config::{ExperimentConfig, ModeName};
use crate::error::CliError;
use crate::output::{decimal, round_to, OutDir};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Tune,
    Simulate,
    CompareP,
    Fracdemo,
    TsSweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Tune => "tune",
            Command::Simulate => "simulate",
            Command::CompareP => "compare-p",
            Command::Fracdemo => "fracdemo",
            Command::TsSweep => "ts-sweep",
        }
    }
}

/// Runs `command` and returns a short human-readable summary.
pub fn run(command: Command, config: &ExperimentConfig, out: &Path) -> Result<String, CliError> {
    match command {
        Command::Tune => tune(config, out),
        Command::Simulate => simulate(config, out),
        Command::CompareP => compare_p(config, out),
        Command::Fracdemo => fracdemo(config, out),
        Command::TsSweep => ts_sweep(config, out),
    }
}

#[derive(Serialize)]
struct Eigenvalue {
    re: f64,
    im: f64,
}

fn eig_record(v: &[Complex<f64>]) -> Vec<Eigenvalue> {
    let mut v: Vec<Complex<f64>> = v.to_vec();
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    v.iter().map(|z| Eigenvalue { re: z.re, im: z.im }).collect()
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

fn sampling_time(config: &ExperimentConfig) -> Option<f64> {
    match config.mode {
        ModeName::Care => None,
        ModeName::Dare => Some(config.ts),
    }
}

fn closed_loop_poles(
    plant: &lqrpid::SecondOrderPlant<f64>,
    mode: &TuningMode<f64>,
    gains: &PidGains<f64>,
) -> lqrpid::Result<Vec<Complex<f64>>> {
    let f = DMatrix::from_row_slice(1, 3, &gains.feedback());
    match mode {
        TuningMode::Care => {
            let ss = build_plant_state_space(plant);
            eigenvalues(&(ss.a() - ss.b() * f))
        }
        TuningMode::Dare { ts } => {
            let d = discretize_plant(plant, *ts)?;
            eigenvalues(&(d.g() - d.h() * f))
        }
    }
}

fn common_notes(config: &ExperimentConfig) -> Vec<String> {
    let mut notes = vec![format!(
        "cost weights w1 = {}, w2 = {}; absolute cost values depend on them",
        config.cost.w1, config.cost.w2
    )];
    if let ModeName::Dare = config.mode {
        notes.push(format!(
            "DARE design at ts = {} s, simulated as a sampled-data loop on the {} s grid",
            config.ts, config.scenario.dt
        ));
    }
    notes
}

#[derive(Serialize)]
struct RestartRecord {
    seed: u64,
    j_min: f64,
    gains: PidGains<f64>,
    weights: LqrWeights<f64>,
    generations: usize,
    evaluations: usize,
}

#[derive(Serialize)]
struct TuneRecord<'a> {
    command: &'static str,
    config: &'a ExperimentConfig,
    mode: ModeName,
    ts: Option<f64>,
    gains: PidGains<f64>,
    weights: LqrWeights<f64>,
    j_min: f64,
    p_matrix: Vec<Vec<f64>>,
    riccati_residual: f64,
    closed_loop_eigenvalues: Vec<Eigenvalue>,
    best_restart: usize,
    restarts: Vec<RestartRecord>,
    history_file: &'static str,
    trace_file: &'static str,
    recommended_lambda: f64,
    notes: Vec<String>,
}

fn tune(config: &ExperimentConfig, out: &Path) -> Result<String, CliError> {
    let plant = config.plant()?;
    let mode = config.tuning_mode()?;
    let spec = config.cost_spec()?;
    let tuning_scenario = config.tuning_scenario()?;
    let scenario = config.scenario()?;
    let ga = config.ga_config()?;
    let out = OutDir::create(out)?;

    let (runs, best) = tune_pid_restarts(&plant, &mode, &spec, &tuning_scenario, &ga, config.ga.restarts)
        .map_err(CliError::numeric("GA tuning"))?;
    let r = &runs[best];
    let trace =
        simulate_design(&plant, &mode, &r.gains, &scenario).map_err(CliError::numeric("closed-loop simulation"))?;

    out.write_trace("trace.csv", &trace)?;
    let header: Vec<String> = ["restart", "seed", "generation", "best_cost"].iter().map(|s| s.to_string()).collect();
    let history: Vec<Vec<String>> = runs
        .iter()
        .enumerate()
        .flat_map(|(i, run)| {
            run.history
                .iter()
                .enumerate()
                .map(move |(g, &c)| vec![i.to_string(), run.seed.to_string(), (g + 1).to_string(), decimal(c)])
        })
        .collect();
    out.write_records("history.csv", &header, &history)?;

    let mut notes = common_notes(config);
    notes.push(if config.cost.include_disturbance {
        "tuning objective includes the load disturbance".into()
    } else {
        "tuning objective uses the set-point step only; trace.csv includes the configured load disturbance".into()
    });
    let record = TuneRecord {
        command: "tune",
        config,
        mode: config.mode,
        ts: sampling_time(config),
        gains: r.gains,
        weights: r.best_weights,
        j_min: r.j_min,
        p_matrix: rows(&r.riccati.p),
        riccati_residual: r.riccati.residual,
        closed_loop_eigenvalues: eig_record(&r.closed_loop_poles),
        best_restart: best,
        restarts: runs
            .iter()
            .map(|run| RestartRecord {
                seed: run.seed,
                j_min: run.j_min,
                gains: run.gains,
                weights: run.best_weights,
                generations: run.history.len(),
                evaluations: run.evaluations,
            })
            .collect(),
        history_file: "history.csv",
        trace_file: "trace.csv",
        recommended_lambda: recommend_order(&plant),
        notes,
    };
    out.write_json("results.json", &record)?;
    Ok(format!(
        "tune: J_min = {:.6} with Kp = {:.6}, Ki = {:.6}, Kd = {:.6} (restart {best}, seed {})",
        r.j_min, r.gains.kp, r.gains.ki, r.gains.kd, r.seed
    ))
}

#[derive(Serialize)]
struct Metrics {
    fractional_cost: f64,
    fractional_cost_setpoint_only: f64,
    itse: f64,
    isco: f64,
    final_error: f64,
    peak_abs_error: f64,
    peak_abs_control: f64,
    closed_loop_eigenvalues: Vec<Eigenvalue>,
    stable: bool,
}

#[derive(Serialize)]
struct SimulateRecord<'a> {
    command: &'static str,
    config: &'a ExperimentConfig,
    gains: PidGains<f64>,
    metrics: &'a Metrics,
    trace_file: &'static str,
    notes: Vec<String>,
}

fn peak(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn simulate(config: &ExperimentConfig, out: &Path) -> Result<String, CliError> {
    let plant = config.plant()?;
    let mode = config.tuning_mode()?;
    let spec = config.cost_spec()?;
    let scenario = config.scenario()?;
    let setpoint_only = config.scenario()?.without_disturbance();
    let gains = config.pid_gains()?;
    let out = OutDir::create(out)?;

    let poles = closed_loop_poles(&plant, &mode, &gains).map_err(CliError::numeric("closed-loop eigenvalues"))?;
    let stable = match mode {
        TuningMode::Care => poles.iter().all(|p| p.re < 0.0),
        TuningMode::Dare { .. } => poles.iter().all(|p| p.norm() < 1.0),
    };
    let trace = simulate_design(&plant, &mode, &gains, &scenario).map_err(CliError::numeric("closed-loop simulation"))?;
    let reference = simulate_design(&plant, &mode, &gains, &setpoint_only)
        .map_err(CliError::numeric("closed-loop simulation"))?;
    let cost = |t: &SimTrace<f64>| fractional_cost(t, &spec).map_err(CliError::numeric("cost evaluation"));
    let metrics = Metrics {
        fractional_cost: cost(&trace)?,
        fractional_cost_setpoint_only: cost(&reference)?,
        itse: itse_isco(&trace, 1.0, 0.0, spec.horizon).map_err(CliError::numeric("cost evaluation"))?,
        isco: itse_isco(&trace, 0.0, 1.0, spec.horizon).map_err(CliError::numeric("cost evaluation"))?,
        final_error: *trace.e.last().unwrap(),
        peak_abs_error: peak(&trace.e),
        peak_abs_control: peak(&trace.u),
        closed_loop_eigenvalues: eig_record(&poles),
        stable,
    };
    out.write_trace("trace.csv", &trace)?;
    out.write_json("metrics.json", &metrics)?;
    let record = SimulateRecord {
        command: "simulate",
        config,
        gains,
        metrics: &metrics,
        trace_file: "trace.csv",
        notes: common_notes(config),
    };
    out.write_json("results.json", &record)?;
    Ok(format!(
        "simulate: cost = {:.6} (set-point only {:.6}), final error {:.3e}",
        metrics.fractional_cost, metrics.fractional_cost_setpoint_only, metrics.final_error
    ))
}

fn matrix_from_rows(name: &str, rows: &[Vec<f64>]) -> Result<DMatrix<f64>, CliError> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Config(format!("[compare] {name} must be a non-empty square matrix")));
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(CliError::Config(format!("[compare] {name} must be finite")));
    }
    Ok(DMatrix::from_row_slice(n, n, &rows.concat()))
}

#[derive(Serialize)]
struct Comparison {
    label_a: String,
    label_b: String,
    /// Ascending eigenvalues of `P_a − P_b`, rounded to 4 decimals.
    eigenvalues: Vec<f64>,
    eigenvalues_full: Vec<f64>,
    positive_definite: bool,
    trace_difference: f64,
    verdict: String,
}

#[derive(Serialize)]
struct CompareRecord<'a> {
    command: &'static str,
    config: &'a ExperimentConfig,
    comparison: &'a Comparison,
}

fn compare_p(config: &ExperimentConfig, out: &Path) -> Result<String, CliError> {
    let section = config
        .compare
        .as_ref()
        .ok_or_else(|| CliError::Config("compare-p needs a [compare] section with p_a and p_b".into()))?;
    let a = matrix_from_rows("p_a", &section.p_a)?;
    let b = matrix_from_rows("p_b", &section.p_b)?;
    if a.shape() != b.shape() {
        return Err(CliError::Config("[compare] p_a and p_b must have the same size".into()));
    }
    let cmp = compare_riccati(&a, &b).map_err(|e| CliError::Config(format!("[compare] {e}")))?;
    let label_a = section.label_a.clone().unwrap_or_else(|| "P_a".into());
    let label_b = section.label_b.clone().unwrap_or_else(|| "P_b".into());
    let verdict = if cmp.positive_definite {
        format!("{label_a} - {label_b} is positive definite: {label_a} costs more from every nonzero initial state")
    } else {
        format!("{label_a} - {label_b} is not positive definite")
    };
    let comparison = Comparison {
        eigenvalues: cmp.eigenvalues.iter().map(|&l| round_to(l, 4)).collect(),
        eigenvalues_full: cmp.eigenvalues.clone(),
        positive_definite: cmp.positive_definite,
        trace_difference: (&a - &b).trace(),
        verdict,
        label_a,
        label_b,
    };
    let out = OutDir::create(out)?;
    out.write_json("compare.json", &comparison)?;
    out.write_json("results.json", &CompareRecord { command: "compare-p", config, comparison: &comparison })?;
    Ok(format!("compare-p: eig = {:?}; {}", comparison.eigenvalues, comparison.verdict))
}

#[derive(Serialize)]
struct CurveSummary {
    lambda: f64,
    final_value: f64,
    peak: f64,
    monotone: bool,
    /// Largest fall below a running maximum.
    largest_drop: f64,
}

#[derive(Serialize)]
struct FracdemoRecord<'a> {
    command: &'static str,
    config: &'a ExperimentConfig,
    gains: PidGains<f64>,
    curves: Vec<CurveSummary>,
    data_file: &'static str,
}

fn summarize(lambda: f64, series: &[f64]) -> CurveSummary {
    let mut running = f64::NEG_INFINITY;
    let mut drop = 0.0f64;
    for &v in series {
        running = running.max(v);
        drop = drop.max(running - v);
    }
    CurveSummary {
        lambda,
        final_value: *series.last().unwrap(),
        peak: running,
        monotone: series.windows(2).all(|w| w[1] >= w[0]),
        largest_drop: drop,
    }
}

fn fracdemo(config: &ExperimentConfig, out: &Path) -> Result<String, CliError> {
    let plant = config.plant()?;
    let gains = config.pid_gains()?;
    let base = config.cost_spec()?;
    let scenario = config.scenario()?.without_disturbance();
    let demo = &config.fracdemo;
    if demo.lambdas.is_empty() {
        return Err(CliError::Config("[fracdemo] lambdas must not be empty".into()));
    }
    let specs: Vec<CostSpec<f64>> = demo
        .lambdas
        .iter()
        .map(|&l| {
            let s = CostSpec { lambda: l, w1: demo.w1, w2: demo.w2, ..base };
            s.validate().map(|_| s).map_err(|e| CliError::Config(format!("[fracdemo] {e}")))
        })
        .collect::<Result<_, _>>()?;
    let trace = lqrpid::simulate_continuous(&plant, &gains, &scenario)
        .map_err(|e| CliError::Numeric { stage: "closed-loop simulation", source: e.into_error() })?;
    let curves: Vec<Vec<f64>> = specs
        .iter()
        .map(|s| cost_trajectory(&trace, s))
        .collect::<lqrpid::Result<_>>()
        .map_err(CliError::numeric("fractional integration"))?;
    let phi = lqrpid::costfn::decimated_integrand(&trace, &specs[0]).map_err(CliError::numeric("cost evaluation"))?;

    let mut header = vec!["t".to_string(), "phi".to_string()];
    header.extend(demo.lambdas.iter().map(|l| format!("lambda_{l}")));
    let rows: Vec<Vec<f64>> = (0..phi.len())
        .map(|k| {
            let mut row = vec![k as f64 * base.eval_step, phi[k]];
            row.extend(curves.iter().map(|c| c[k]));
            row
        })
        .collect();
    let out = OutDir::create(out)?;
    out.write_csv("fracdemo.csv", &header, &rows)?;
    let summaries: Vec<CurveSummary> =
        demo.lambdas.iter().zip(&curves).map(|(&l, c)| summarize(l, c)).collect();
    let line = summaries
        .iter()
        .map(|s| format!("lambda {}: final {:.4}, monotone {}", s.lambda, s.final_value, s.monotone))
        .collect::<Vec<_>>()
        .join("; ");
    out.write_json(
        "results.json",
        &FracdemoRecord { command: "fracdemo", config, gains, curves: summaries, data_file: "fracdemo.csv" },
    )?;
    Ok(format!("fracdemo: {line}"))
}

#[derive(Serialize)]
struct SweepPoint {
    ts: f64,
    open_loop: Vec<Eigenvalue>,
    care_closed_loop: Vec<Eigenvalue>,
    care_spectral_radius: f64,
    dare_closed_loop: Vec<Eigenvalue>,
    dare_gains: PidGains<f64>,
}

#[derive(Serialize)]
struct SweepRecord<'a> {
    command: &'static str,
    config: &'a ExperimentConfig,
    care_gains: PidGains<f64>,
    points: Vec<SweepPoint>,
    data_file: &'static str,
}

fn sorted(mut v: Vec<Complex<f64>>) -> Vec<Complex<f64>> {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    v
}

fn ts_sweep(config: &ExperimentConfig, out: &Path) -> Result<String, CliError> {
    let plant = config.plant()?;
    let s = &config.sweep;
    let bad = |m: &str| CliError::Config(format!("[sweep] {m}"));
    if !(s.ts_min > 0.0 && s.ts_step > 0.0 && s.ts_max >= s.ts_min) {
        return Err(bad("need 0 < ts_min <= ts_max and ts_step > 0"));
    }
    if s.q.len() != 3 {
        return Err(bad("q must list 3 diagonal entries"));
    }
    let weights = LqrWeights::new(s.q[0], s.q[1], s.q[2], s.r).map_err(|e| bad(&e.to_string()))?;
    let count = ((s.ts_max - s.ts_min) / s.ts_step + 1e-9).floor() as usize + 1;

    let ss = build_plant_state_space(&plant);
    let care = solve_care_weights(ss.a(), ss.b(), &weights).map_err(CliError::numeric("CARE design"))?;
    let care_gains = design(&plant, &TuningMode::Care, &weights).map_err(CliError::numeric("CARE design"))?.gains;

    let mut points = Vec::with_capacity(count);
    let mut rows = Vec::new();
    for i in 0..count {
        let ts = s.ts_min + i as f64 * s.ts_step;
        let d = discretize_plant(&plant, ts).map_err(CliError::numeric("discretization"))?;
        let open = sorted(eigenvalues(d.g()).map_err(CliError::numeric("eigenvalues"))?);
        let gcl = d.g() - d.h() * &care.feedback;
        let care_cl = sorted(eigenvalues(&gcl).map_err(CliError::numeric("eigenvalues"))?);
        let dare = solve_dare_weights(d.g(), d.h(), &weights).map_err(CliError::numeric("DARE design"))?;
        let dare_cl = sorted(
            eigenvalues(&(d.g() - d.h() * &dare.feedback)).map_err(CliError::numeric("eigenvalues"))?,
        );
        for k in 0..open.len() {
            let mut row = vec![decimal(ts), k.to_string()];
            for z in [open[k], care_cl[k], dare_cl[k]] {
                row.push(decimal(z.re));
                row.push(decimal(z.im));
            }
            rows.push(row);
        }
        points.push(SweepPoint {
            ts,
            open_loop: eig_record(&open),
            care_closed_loop: eig_record(&care_cl),
            care_spectral_radius: spectral_radius(&gcl).map_err(CliError::numeric("eigenvalues"))?,
            dare_closed_loop: eig_record(&dare_cl),
            dare_gains: lqrpid::gains_from_feedback(dare.feedback.as_slice())
                .map_err(CliError::numeric("DARE design"))?,
        });
    }
    let header: Vec<String> =
        ["ts", "index", "open_re", "open_im", "care_cl_re", "care_cl_im", "dare_cl_re", "dare_cl_im"]
            .iter()
            .map(|s| s.to_string())
            .collect();
    let out = OutDir::create(out)?;
    out.write_records("ts_sweep.csv", &header, &rows)?;
    let worst = points.iter().map(|p| p.care_spectral_radius).fold(0.0, f64::max);
    out.write_json(
        "results.json",
        &SweepRecord { command: "ts-sweep", config, care_gains, points, data_file: "ts_sweep.csv" },
    )?;
    Ok(format!(
        "ts-sweep: {count} sampling times; largest closed-loop radius with the continuous gains {worst:.4}"
    ))
}
