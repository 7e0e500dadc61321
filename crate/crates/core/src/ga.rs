//! Real-coded genetic algorithm on a bounded box.
//!
//! Each generation: rank fitness scaling (expectation ∝ 1/√rank), stochastic
//! uniform selection, elite carry-over, scattered crossover for a fraction of
//! the remaining slots and Gaussian mutation for the rest. The mutation
//! spread starts at `mutation_scale·(hi − lo)` and shrinks linearly to zero at
//! `max_generations`. Offspring are clipped to the box.
//!
//! All random draws happen in the sequential loop from one seeded stream;
//! fitness evaluation runs in parallel but results are collected in order, so
//! a seed fixes the outcome bit for bit.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::scalar::{is_finite, Real};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaConfig<T> {
    pub population: usize,
    pub elite: usize,
    pub crossover_fraction: T,
    /// Initial mutation standard deviation as a fraction of each variable's range.
    pub mutation_scale: T,
    /// Per-variable `(lo, hi)`.
    pub bounds: Vec<(T, T)>,
    pub max_generations: usize,
    pub stall_generations: usize,
    pub stall_tolerance: T,
    pub seed: u64,
    /// Rows seeded into the first generation; the rest is drawn uniformly.
    #[serde(default)]
    pub initial_population: Option<Vec<Vec<T>>>,
}

impl<T: Real> Default for GaConfig<T> {
    fn default() -> Self {
        Self {
            population: 20,
            elite: 2,
            crossover_fraction: T::lit(0.8),
            mutation_scale: T::lit(0.1),
            bounds: vec![(T::zero(), T::lit(100.0)); 4],
            max_generations: 100,
            stall_generations: 50,
            stall_tolerance: T::lit(1e-6),
            seed: 0,
            initial_population: None,
        }
    }
}

impl<T: Real> GaConfig<T> {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn dimension(&self) -> usize {
        self.bounds.len()
    }

    /// Children produced by crossover each generation.
    pub fn crossover_count(&self) -> usize {
        ((self.population - self.elite) as f64 * self.crossover_fraction.as_f64()).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(self.population >= 2, InvalidParameter, "population must be at least 2");
        ensure!(self.elite < self.population, InvalidParameter, "elite count must be below the population size");
        ensure!(
            self.crossover_fraction >= T::zero() && self.crossover_fraction <= T::one(),
            InvalidParameter,
            "crossover fraction must lie in [0, 1]"
        );
        ensure!(
            self.mutation_scale >= T::zero() && is_finite(self.mutation_scale),
            InvalidParameter,
            "mutation scale must be nonnegative"
        );
        ensure!(!self.bounds.is_empty(), InvalidParameter, "bounds must not be empty");
        ensure!(
            self.bounds.iter().all(|&(lo, hi)| is_finite(lo) && is_finite(hi) && lo < hi),
            InvalidParameter,
            "every bound must satisfy lo < hi"
        );
        ensure!(self.max_generations >= 1, InvalidParameter, "max_generations must be at least 1");
        ensure!(self.stall_generations >= 1, InvalidParameter, "stall_generations must be at least 1");
        ensure!(
            self.stall_tolerance >= T::zero(),
            InvalidParameter,
            "stall tolerance must be nonnegative"
        );
        if let Some(init) = &self.initial_population {
            ensure!(
                init.len() <= self.population,
                InvalidParameter,
                "initial population larger than the population size"
            );
            for row in init {
                ensure!(
                    row.len() == self.dimension(),
                    DimensionMismatch,
                    "initial individual has {} entries, expected {}",
                    row.len(),
                    self.dimension()
                );
                ensure!(
                    row.iter().zip(&self.bounds).all(|(&v, &(lo, hi))| v >= lo && v <= hi),
                    InvalidParameter,
                    "initial individual outside the bounds"
                );
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaOutcome<T> {
    pub best: Vec<T>,
    pub cost: T,
    /// Best cost after each generation (the initial population is generation 1).
    pub history: Vec<T>,
    pub evaluations: usize,
}

/// `childᵢ = parent1ᵢ` where `maskᵢ`, else `parent2ᵢ`.
pub fn scattered_crossover<T: Copy>(parent1: &[T], parent2: &[T], mask: &[bool]) -> Result<Vec<T>> {
    ensure!(
        parent1.len() == parent2.len() && parent1.len() == mask.len(),
        DimensionMismatch,
        "crossover operands have lengths {}, {} and mask {}",
        parent1.len(),
        parent2.len(),
        mask.len()
    );
    Ok(mask
        .iter()
        .zip(parent1.iter().zip(parent2))
        .map(|(&m, (&a, &b))| if m { a } else { b })
        .collect())
}

/// `clip(parent + noise, bounds)`.
///
/// # Panics
/// If the three slices differ in length.
pub fn gaussian_mutation<T: Real>(parent: &[T], noise: &[T], bounds: &[(T, T)]) -> Vec<T> {
    assert!(parent.len() == noise.len() && parent.len() == bounds.len(), "mutation operands differ in length");
    parent
        .iter()
        .zip(noise)
        .zip(bounds)
        .map(|((&p, &n), &(lo, hi))| clip(p + n, lo, hi))
        .collect()
}

fn clip<T: Real>(v: T, lo: T, hi: T) -> T {
    if v < lo {
        lo
    } else if v > hi {
        hi
    } else {
        v
    }
}

fn sanitize<T: Real>(v: T) -> T {
    if v.partial_cmp(&v).is_none() {
        T::max_value().unwrap_or_else(|| T::lit(f64::MAX))
    } else {
        v
    }
}

fn evaluate<T: Real, F>(objective: &F, population: &[Vec<T>]) -> Vec<T>
where
    F: Fn(&[T]) -> T + Sync,
{
    population.par_iter().map(|x| sanitize(objective(x))).collect()
}

/// Indices sorted by ascending score (ties keep index order).
fn ranking<T: Real>(scores: &[T]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap_or(std::cmp::Ordering::Equal));
    idx
}

/// Stochastic uniform sampling of `count` parents from rank-scaled fitness.
fn select_parents(order: &[usize], count: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    if count == 0 {
        return Vec::new();
    }
    let expectation: Vec<f64> = (1..=order.len()).map(|r| 1.0 / (r as f64).sqrt()).collect();
    let total: f64 = expectation.iter().sum();
    let step = total / count as f64;
    let mut pointer = rng.random::<f64>() * step;
    let mut parents = Vec::with_capacity(count);
    let mut cumulative = 0.0;
    let mut slot = 0;
    for _ in 0..count {
        while slot + 1 < order.len() && cumulative + expectation[slot] <= pointer {
            cumulative += expectation[slot];
            slot += 1;
        }
        parents.push(order[slot]);
        pointer += step;
    }
    parents.shuffle(rng);
    parents
}

/// Minimizes `objective` over the box in `config.bounds`.
pub fn ga_optimize<T, F>(objective: F, config: &GaConfig<T>) -> Result<GaOutcome<T>>
where
    T: Real,
    F: Fn(&[T]) -> T + Sync,
{
    config.validate()?;
    let dim = config.dimension();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut population: Vec<Vec<T>> = config.initial_population.clone().unwrap_or_default();
    while population.len() < config.population {
        let row = config
            .bounds
            .iter()
            .map(|&(lo, hi)| lo + (hi - lo) * T::lit(rng.random::<f64>()))
            .collect();
        population.push(row);
    }
    let mut scores = evaluate(&objective, &population);
    let mut evaluations = population.len();

    let order = ranking(&scores);
    let mut best = population[order[0]].clone();
    let mut best_cost = scores[order[0]];
    let mut history = vec![best_cost];

    let n_xover = config.crossover_count();
    let n_mut = config.population - config.elite - n_xover;

    for generation in 1..config.max_generations {
        let order = ranking(&scores);
        let parents = select_parents(&order, 2 * n_xover + n_mut, &mut rng);
        let mut next: Vec<Vec<T>> = order[..config.elite].iter().map(|&i| population[i].clone()).collect();

        for pair in parents[..2 * n_xover].chunks(2) {
            let mask: Vec<bool> = (0..dim).map(|_| rng.random::<bool>()).collect();
            next.push(scattered_crossover(&population[pair[0]], &population[pair[1]], &mask)?);
        }

        let shrink = T::one() - T::lit(generation as f64 / config.max_generations as f64);
        for &p in &parents[2 * n_xover..] {
            let noise: Vec<T> = config
                .bounds
                .iter()
                .map(|&(lo, hi)| {
                    let z: f64 = rng.sample(StandardNormal);
                    T::lit(z) * config.mutation_scale * (hi - lo) * shrink
                })
                .collect();
            next.push(gaussian_mutation(&population[p], &noise, &config.bounds));
        }

        population = next;
        scores = evaluate(&objective, &population);
        evaluations += population.len();

        let order = ranking(&scores);
        if scores[order[0]] < best_cost {
            best_cost = scores[order[0]];
            best = population[order[0]].clone();
        }
        history.push(best_cost);

        let len = history.len();
        if len > config.stall_generations
            && history[len - 1 - config.stall_generations] - history[len - 1] < config.stall_tolerance
        {
            break;
        }
    }

    Ok(GaOutcome { best, cost: best_cost, history, evaluations })
}
