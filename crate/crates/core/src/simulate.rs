//! Seeded Monte Carlo runs of the perturbed dynamics.
//!
//! Every replica draws from its own ChaCha8 stream seeded with
//! `seed + replica`, so merged results do not depend on thread scheduling.

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::model::PerturbationScheme;
use crate::report::{ser_real, ser_reals};

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationConfig {
    pub epsilon: f64,
    pub scheme: PerturbationScheme,
    pub steps: u64,
    /// Ticks discarded before counting; defaults to 1% of `steps`.
    pub burn_in: u64,
    pub seed: u64,
    pub replicas: usize,
    /// Starting state index; the empty state when `None`.
    pub start: Option<usize>,
}

impl SimulationConfig {
    pub fn new(epsilon: f64, scheme: PerturbationScheme, steps: u64, seed: u64) -> Self {
        SimulationConfig {
            epsilon,
            scheme,
            steps,
            burn_in: steps / 100,
            seed,
            replicas: 1,
            start: None,
        }
    }

    fn validate(&self, num_states: usize) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::precondition(format!(
                "epsilon {} is outside (0, 1)",
                self.epsilon
            )));
        }
        if self.steps == 0 || self.replicas == 0 {
            return Err(Error::precondition("steps and replicas must be positive"));
        }
        if self.burn_in >= self.steps {
            return Err(Error::precondition(format!(
                "burn-in {} must be smaller than steps {}",
                self.burn_in, self.steps
            )));
        }
        if self.start.is_some_and(|s| s >= num_states) {
            return Err(Error::precondition("start state out of range"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OccupancyReport {
    #[serde(serialize_with = "ser_real")]
    pub epsilon: f64,
    pub scheme: PerturbationScheme,
    pub steps: u64,
    pub burn_in: u64,
    pub seed: u64,
    pub replicas: usize,
    /// Post-burn-in visits per state, summed over replicas.
    pub counts: Vec<u64>,
    #[serde(serialize_with = "ser_reals")]
    pub frequencies: Vec<f64>,
    /// Frequencies aggregated by activity-relabeling class.
    #[serde(serialize_with = "ser_reals")]
    pub per_class: Vec<f64>,
    pub modal_state: usize,
    #[serde(serialize_with = "ser_opt_real")]
    pub tv_distance: Option<f64>,
}

fn ser_opt_real<S: serde::Serializer>(
    v: &Option<f64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => ser_real(v, s),
        None => s.serialize_none(),
    }
}

impl OccupancyReport {
    /// Record the total-variation distance to `reference`.
    pub fn with_reference(mut self, reference: &[f64]) -> Result<Self> {
        self.tv_distance = Some(compare_occupancy(&self, reference)?);
        Ok(self)
    }
}

/// ½ Σ |frequency − reference|.
pub fn compare_occupancy(report: &OccupancyReport, reference: &[f64]) -> Result<f64> {
    total_variation(&report.frequencies, reference)
}

pub fn total_variation(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::precondition(format!(
            "distributions have {} and {} states",
            a.len(),
            b.len()
        )));
    }
    Ok(0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>())
}

/// Run `config.replicas` independent trajectories and merge their counts.
pub fn run_simulation(inst: &Instance, config: &SimulationConfig) -> Result<OccupancyReport> {
    let space = inst.space();
    config.validate(space.len())?;
    let draws = WeightedIndex::new(inst.model().draw_weights())
        .map_err(|e| Error::precondition(format!("draw weights: {e}")))?;

    let per_replica: Vec<Vec<u64>> = (0..config.replicas)
        .into_par_iter()
        .map(|r| run_replica(inst, config, &draws, config.seed.wrapping_add(r as u64)))
        .collect();
    let mut counts = vec![0u64; space.len()];
    for c in &per_replica {
        for (acc, v) in counts.iter_mut().zip(c) {
            *acc += v;
        }
    }
    let total: u64 = counts.iter().sum();
    let frequencies: Vec<f64> = counts.iter().map(|&c| c as f64 / total as f64).collect();
    let mut per_class = vec![0.0; space.num_classes()];
    for (x, f) in frequencies.iter().enumerate() {
        per_class[space.class_of(x)] += f;
    }
    let modal_state = (0..counts.len())
        .max_by(|&a, &b| counts[a].cmp(&counts[b]).then(b.cmp(&a)))
        .expect("non-empty state space");
    Ok(OccupancyReport {
        epsilon: config.epsilon,
        scheme: config.scheme,
        steps: config.steps,
        burn_in: config.burn_in,
        seed: config.seed,
        replicas: config.replicas,
        counts,
        frequencies,
        per_class,
        modal_state,
        tv_distance: None,
    })
}

fn run_replica(
    inst: &Instance,
    config: &SimulationConfig,
    draws: &WeightedIndex<u64>,
    seed: u64,
) -> Vec<u64> {
    let space = inst.space();
    let np = space.num_projects();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; space.len()];
    let mut x = config.start.unwrap_or(space.empty_index());
    let mut created: Vec<usize> = Vec::new();

    for tick in 0..config.steps {
        let mut state = space.state(x).clone();
        let before = state.clone();
        for p in before.iter() {
            if rng.gen::<f64>() < config.epsilon {
                state.remove(p);
            }
        }
        if config.scheme == PerturbationScheme::Uniform {
            created.clear();
            created.extend(
                (0..np).filter(|&p| !before.contains(p) && rng.gen::<f64>() < config.epsilon),
            );
            created.shuffle(&mut rng);
            for &p in &created {
                let grown = state.with(p);
                if space.index_of(&grown).is_some() {
                    state = grown;
                }
            }
        }
        x = space
            .index_of(&state)
            .expect("perturbations keep states feasible");

        let p = draws.sample(&mut rng);
        if !space.state(x).contains(p) {
            if let Some(y) = space.index_of(&space.state(x).with(p)) {
                if inst.members_gain(p, y, x) {
                    x = y;
                }
            }
        }
        if tick >= config.burn_in {
            counts[x] += 1;
        }
    }
    counts
}
