//! End-to-end train/test runs.
//!
//! The training sequence and each test sequence start from the same initial
//! state, run a warmup prefix that is never scored, and use independent
//! sub-seeds of `run.seed`. Sequences are simulated in parallel, then every
//! task is trained and scored in parallel; results are collected in a fixed
//! order so the output does not depend on scheduling.

use nanomag_core::clocking::Reservoir;
use nanomag_core::dynamics::SpinState;
use nanomag_core::readout::{
    error_rate, evaluate, extract_features, train_readout, ErrorMode, FeatureVector,
    ReadoutWeights, ReservoirTrace,
};
use nanomag_core::task::{build_targets, derive_seed, generate_bits, TaskSpec};
use nanomag_core::vec3::Vec3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{ExperimentConfig, InitialState};
use crate::error::{HarnessError, Result};

/// Sub-stream of `run.seed` used for a random initial state.
const INITIAL_STATE_STREAM: u64 = 1 << 32;

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub task: TaskSpec,
    pub mode: ErrorMode,
    pub error_mean: f64,
    pub error_std: f64,
    pub nonconverged: usize,
    pub seed: u64,
}

/// Features and bits of one simulated sequence, warmup included.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceRun {
    pub trace: ReservoirTrace,
    pub nonconverged: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub results: Vec<ResultRow>,
    /// Full-precision features of the training sequence.
    pub train: SequenceRun,
    pub weights: Vec<(TaskSpec, ReadoutWeights)>,
    /// Non-converged stages summed over every simulated sequence.
    pub nonconverged: usize,
}

pub fn build_reservoir(cfg: &ExperimentConfig) -> Result<Reservoir> {
    Ok(Reservoir::new(
        cfg.build_geometry()?,
        cfg.material_params()?,
        cfg.integrator,
        cfg.schedule,
    )?)
}

pub fn initial_state(cfg: &ExperimentConfig, n_mag: usize) -> SpinState {
    match cfg.run.initial_state {
        InitialState::PlusZ => SpinState::uniform(n_mag, Vec3::Z),
        InitialState::Random => {
            let mut rng =
                ChaCha8Rng::seed_from_u64(derive_seed(cfg.run.seed, INITIAL_STATE_STREAM));
            SpinState::random(n_mag, &mut rng)
        }
    }
}

/// Seed of sequence `index`: 0 is training, `1..=n_test_sets` are test sets.
pub fn sequence_seed(cfg: &ExperimentConfig, index: usize) -> u64 {
    derive_seed(cfg.run.seed, index as u64)
}

/// Runs `warmup + n_scored` steps driven by bits from `seed`.
pub fn simulate(
    reservoir: &Reservoir,
    initial: &SpinState,
    warmup: usize,
    n_scored: usize,
    seed: u64,
) -> Result<SequenceRun> {
    let bits = generate_bits(warmup + n_scored, seed)?;
    let steps = reservoir.run_sequence(initial, &bits)?;
    let nonconverged = steps.iter().map(|s| s.non_converged_stages()).sum();
    let rows = steps
        .iter()
        .map(|s| extract_features(&s.snapshot))
        .collect();
    Ok(SequenceRun {
        trace: ReservoirTrace::new(rows, bits)?,
        nonconverged,
    })
}

/// The training sequence alone.
pub fn training_trace(cfg: &ExperimentConfig) -> Result<SequenceRun> {
    let reservoir = build_reservoir(cfg)?;
    let initial = initial_state(cfg, reservoir.geometry().n_mag());
    simulate(
        &reservoir,
        &initial,
        cfg.run.warmup,
        cfg.run.n_train,
        sequence_seed(cfg, 0),
    )
}

/// Rows with a defined target for `task`, with the targets as reals.
fn scored_rows(
    trace: &ReservoirTrace,
    task: TaskSpec,
    warmup: usize,
) -> Result<(Vec<&FeatureVector>, Vec<f64>)> {
    let (rows, targets): (Vec<_>, Vec<_>) = build_targets(trace.bits(), task, warmup)
        .into_iter()
        .zip(trace.rows())
        .filter_map(|(t, row)| t.map(|t| (row, t as f64)))
        .unzip();
    if rows.is_empty() {
        return Err(HarnessError::NoTargets {
            task: task.to_string(),
        });
    }
    Ok((rows, targets))
}

/// Mean and population standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let reservoir = build_reservoir(cfg)?;
    let initial = initial_state(cfg, reservoir.geometry().n_mag());
    let run = &cfg.run;

    let mut sequences: Vec<SequenceRun> = (0..=run.n_test_sets)
        .into_par_iter()
        .map(|index| {
            let n = if index == 0 { run.n_train } else { run.n_test };
            simulate(
                &reservoir,
                &initial,
                run.warmup,
                n,
                sequence_seed(cfg, index),
            )
        })
        .collect::<Result<_>>()?;
    let nonconverged = sequences.iter().map(|s| s.nonconverged).sum();
    let tests: Vec<ReservoirTrace> = sequences
        .split_off(1)
        .into_iter()
        .map(|s| {
            if run.round_test {
                s.trace.rounded(run.round_digits)
            } else {
                s.trace
            }
        })
        .collect();
    let train = sequences.pop().expect("training sequence");
    let train_trace = if run.round_train {
        train.trace.rounded(run.round_digits)
    } else {
        train.trace.clone()
    };

    let per_task: Vec<(TaskSpec, ReadoutWeights, Vec<ResultRow>)> = cfg
        .tasks()
        .into_par_iter()
        .map(|task| {
            let (rows, targets) = scored_rows(&train_trace, task, run.warmup)?;
            let w = train_readout(&rows, &targets, run.ridge)?;
            let mut errors = [Vec::new(), Vec::new()];
            for test in &tests {
                let (rows, targets) = scored_rows(test, task, run.warmup)?;
                let outputs = evaluate(&rows, &w)?;
                for (slot, mode) in errors
                    .iter_mut()
                    .zip([ErrorMode::Raw, ErrorMode::Thresholded])
                {
                    slot.push(error_rate(&outputs, &targets, mode)?);
                }
            }
            let rows = [ErrorMode::Raw, ErrorMode::Thresholded]
                .into_iter()
                .zip(&errors)
                .map(|(mode, e)| {
                    let (error_mean, error_std) = mean_std(e);
                    ResultRow {
                        task,
                        mode,
                        error_mean,
                        error_std,
                        nonconverged,
                        seed: run.seed,
                    }
                })
                .collect();
            Ok((task, w, rows))
        })
        .collect::<Result<_>>()?;

    let mut results = Vec::new();
    let mut weights = Vec::new();
    for (task, w, rows) in per_task {
        weights.push((task, w));
        results.extend(rows);
    }
    Ok(ExperimentOutput {
        results,
        train,
        weights,
        nonconverged,
    })
}
