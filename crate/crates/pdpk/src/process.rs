//! Production and parametrisation process simulation.
//!
//! The production process maps a parametrisation to quality values by
//! averaging the causal influences on each quality, optionally perturbed by
//! observation noise. The parametrisation process mitigates quality defects
//! either exploitatively, stepping along known inverse-function derivatives,
//! or exploratively, nudging one parameter at a time by a fixed relative
//! step and reacting to the observed score.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::GeneratorConfig;
use crate::random::SeededRng;
use crate::space::{PQSpace, SpaceError};

/// Absolute tolerance below which two scores count as unchanged for the
/// explorative state machine.
const SCORE_EQ_TOL: f64 = 1e-9;

/// Rejection-sampling attempts for an erroneous initial parametrisation.
const INIT_ATTEMPTS: usize = 1000;

#[derive(Debug, Error)]
pub enum ProcessError {
    #[error("score is undefined for an empty target set")]
    EmptyTarget,
    #[error("no parameter has a causal dependency to adjust")]
    NoAdjustableParameter,
    #[error("no erroneous initial parametrisation found after {attempts} attempts (threshold {threshold} admits every start)")]
    Initialisation { attempts: usize, threshold: f64 },
    #[error(transparent)]
    Space(#[from] SpaceError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Behaviour {
    Exploitative,
    Explorative,
}

impl fmt::Display for Behaviour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Behaviour::Exploitative => f.write_str("exploitative"),
            Behaviour::Explorative => f.write_str("explorative"),
        }
    }
}

/// One recorded step of a parametrisation process.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessIteration {
    pub index: usize,
    pub parametrisation: Vec<f64>,
    pub qualities: Vec<f64>,
    pub score: f64,
}

/// One mitigation episode: the targeted qualities, the threshold, and every
/// iteration from the erroneous start to convergence or the iteration cap.
#[derive(Debug, Clone, PartialEq)]
pub struct ParametrisationProcess {
    pub id: usize,
    pub behaviour: Behaviour,
    pub q_opt: BTreeSet<usize>,
    pub threshold: f64,
    pub iterations: Vec<ProcessIteration>,
    pub converged: bool,
}

/// Where the explorative strategy currently pokes: which parameter, in which
/// direction, and the score its previous adjustment was judged against.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplorationState {
    pub active_parameter: usize,
    pub direction: f64,
    pub last_score: f64,
}

/// Quality values resulting from a parametrisation: the arithmetic mean of
/// all causal influences per quality, clamped to the quality domain.
/// Qualities without any influencing parameter rest at the defect-free
/// `domain.min`.
pub fn compute_quality(space: &PQSpace, rho: &[f64]) -> Vec<f64> {
    space
        .qualities()
        .iter()
        .map(|quality| {
            let params = space.params_affecting(quality.id);
            if params.is_empty() {
                return quality.domain.min;
            }
            let sum: f64 = params
                .iter()
                .map(|&k| {
                    let f = space.dependency(k, quality.id).expect("listed dependency");
                    let p = space.parameters()[k].domain.clamp(rho[k]);
                    f.forward(p).expect("clamped value is in the source domain")
                })
                .sum();
            quality.domain.clamp(sum / params.len() as f64)
        })
        .collect()
}

/// Add zero-mean Gaussian noise with standard deviation
/// `sigma_rel · width(d_q)` per quality, clamped to the quality domain.
/// `sigma_rel = 0` returns the input untouched.
pub fn apply_noise(space: &PQSpace, o: &[f64], sigma_rel: f64, rng: &mut SeededRng) -> Vec<f64> {
    if sigma_rel == 0.0 {
        return o.to_vec();
    }
    space
        .qualities()
        .iter()
        .zip(o)
        .map(|(quality, &value)| {
            let normal = Normal::new(0.0, sigma_rel * quality.domain.width())
                .expect("positive standard deviation");
            quality.domain.clamp(value + normal.sample(rng))
        })
        .collect()
}

/// The defect score Φ: mean over the targeted qualities of the quality value
/// normalised into its domain. 0 at the defect-free optimum, 1 at the worst.
pub fn score(o: &[f64], q_opt: &BTreeSet<usize>, space: &PQSpace) -> Result<f64, ProcessError> {
    if q_opt.is_empty() {
        return Err(ProcessError::EmptyTarget);
    }
    let sum: f64 = q_opt
        .iter()
        .map(|&j| space.qualities()[j].domain.relative(o[j]))
        .sum();
    Ok(sum / q_opt.len() as f64)
}

/// One exploitative update: every parameter with a known dependency to a
/// targeted quality moves by the mean inverse-function derivative taken at
/// the previously observed quality values; qualities already within the
/// threshold contribute a zero step. Results are clamped to the parameter
/// domains.
pub fn exploit_step(
    space: &PQSpace,
    prev: &ProcessIteration,
    q_opt: &BTreeSet<usize>,
    t: f64,
) -> Result<Vec<f64>, ProcessError> {
    let mut rho = prev.parametrisation.clone();
    for parameter in space.parameters() {
        let k = parameter.id;
        let adjusted: Vec<usize> = q_opt
            .iter()
            .copied()
            .filter(|&j| space.is_known(k, j))
            .collect();
        if adjusted.is_empty() {
            continue;
        }
        let mut sum = 0.0;
        for &j in &adjusted {
            let quality = &space.qualities()[j];
            let observed = prev.qualities[j];
            if quality.domain.relative(observed) <= t {
                continue;
            }
            let f = space.dependency(k, j).expect("known dependency");
            sum += f.inverse_derivative(observed)?;
        }
        let delta = sum / adjusted.len() as f64;
        rho[k] = parameter.domain.clamp(rho[k] - delta);
    }
    Ok(rho)
}

/// One explorative update. The decision is made on the score feedback from
/// the previous adjustment: an improvement keeps parameter and direction, a
/// deterioration flips the direction, an unchanged score rotates to the next
/// parameter with dependencies and draws a fresh random direction. The
/// chosen parameter then moves by one tenth of its domain width.
pub fn explore_step(
    space: &PQSpace,
    prev: &ProcessIteration,
    state: &ExplorationState,
    rng: &mut SeededRng,
) -> Result<(Vec<f64>, ExplorationState), ProcessError> {
    let adjustable = space.adjustable_parameters();
    if adjustable.is_empty() {
        return Err(ProcessError::NoAdjustableParameter);
    }

    let mut next = state.clone();
    if prev.score < state.last_score - SCORE_EQ_TOL {
        // Improved: keep poking the same parameter the same way.
    } else if prev.score > state.last_score + SCORE_EQ_TOL {
        next.direction = -state.direction;
    } else {
        let pos = adjustable
            .iter()
            .position(|&k| k == state.active_parameter)
            .unwrap_or(0);
        next.active_parameter = adjustable[(pos + 1) % adjustable.len()];
        next.direction = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    }
    next.last_score = prev.score;

    let mut rho = prev.parametrisation.clone();
    let domain = space.parameters()[next.active_parameter].domain;
    rho[next.active_parameter] =
        domain.clamp(rho[next.active_parameter] + 0.1 * domain.width() * next.direction);
    Ok((rho, next))
}

fn observe(space: &PQSpace, rho: &[f64], sigma_rel: f64, rng: &mut SeededRng) -> Vec<f64> {
    let o = compute_quality(space, rho);
    apply_noise(space, &o, sigma_rel, rng)
}

fn sample_q_opt(
    space: &PQSpace,
    config: &GeneratorConfig,
    rng: &mut SeededRng,
) -> BTreeSet<usize> {
    // Only qualities that some parameter can move make meaningful targets;
    // unaffected ones rest at their optimum forever.
    let mut pool = space.affected_qualities();
    if pool.is_empty() {
        pool = space.qualities().iter().map(|q| q.id).collect();
    }
    let lo = config.q_opt_size_min.min(pool.len()).max(1);
    let hi = config.q_opt_size_max.min(pool.len()).max(lo);
    let size = rng.random_range(lo..=hi);
    let mut q_opt = BTreeSet::new();
    for i in 0..size {
        let j = rng.random_range(i..pool.len());
        pool.swap(i, j);
        q_opt.insert(pool[i]);
    }
    q_opt
}

/// Run one full mitigation episode: pick a target set, rejection-sample an
/// initially erroneous parametrisation, then iterate the chosen behaviour
/// until the score drops to the threshold or the iteration cap is hit.
pub fn run_parametrisation_process(
    space: &PQSpace,
    behaviour: Behaviour,
    config: &GeneratorConfig,
    rng: &mut SeededRng,
) -> Result<ParametrisationProcess, ProcessError> {
    let t = config.threshold;
    let q_opt = sample_q_opt(space, config, rng);

    let mut initial = None;
    for _ in 0..INIT_ATTEMPTS {
        let rho: Vec<f64> = space
            .parameters()
            .iter()
            .map(|p| rng.random_range(p.domain.min..=p.domain.max))
            .collect();
        let o = observe(space, &rho, config.noise_sigma_rel, rng);
        let s = score(&o, &q_opt, space)?;
        if s > t {
            initial = Some(ProcessIteration {
                index: 0,
                parametrisation: rho,
                qualities: o,
                score: s,
            });
            break;
        }
    }
    let Some(first) = initial else {
        return Err(ProcessError::Initialisation {
            attempts: INIT_ATTEMPTS,
            threshold: t,
        });
    };

    let mut state = match behaviour {
        Behaviour::Explorative => {
            let adjustable = space.adjustable_parameters();
            if adjustable.is_empty() {
                return Err(ProcessError::NoAdjustableParameter);
            }
            // The first suspect is a parameter that actually influences a
            // targeted quality; operators usually know which dials relate
            // to a defect even when the quantitative link is unknown.
            // Rotation on stalled scores still walks the full pool.
            let suspects: Vec<usize> = adjustable
                .iter()
                .copied()
                .filter(|&k| q_opt.iter().any(|&j| space.dependency(k, j).is_some()))
                .collect();
            let pool = if suspects.is_empty() { &adjustable } else { &suspects };
            Some(ExplorationState {
                active_parameter: pool[rng.random_range(0..pool.len())],
                direction: if rng.random_bool(0.5) { 1.0 } else { -1.0 },
                // +∞ makes the first feedback read as an improvement, so the
                // initial parameter/direction pick is actually used.
                last_score: f64::INFINITY,
            })
        }
        Behaviour::Exploitative => None,
    };

    let mut iterations = vec![first];
    while iterations.last().unwrap().score > t && iterations.len() < config.max_iterations {
        let prev = iterations.last().unwrap();
        let rho = match behaviour {
            Behaviour::Exploitative => exploit_step(space, prev, &q_opt, t)?,
            Behaviour::Explorative => {
                let (rho, next) = explore_step(space, prev, state.as_ref().unwrap(), rng)?;
                state = Some(next);
                rho
            }
        };
        let o = observe(space, &rho, config.noise_sigma_rel, rng);
        let s = score(&o, &q_opt, space)?;
        iterations.push(ProcessIteration {
            index: iterations.len(),
            parametrisation: rho,
            qualities: o,
            score: s,
        });
    }

    let converged = iterations.last().unwrap().score <= t;
    Ok(ParametrisationProcess {
        id: 0,
        behaviour,
        q_opt,
        threshold: t,
        iterations,
        converged,
    })
}

/// Generate parametrisation processes until the cumulative iteration count
/// reaches `config.total_iterations`; the final process is kept whole, so
/// the total may overshoot by less than `max_iterations`.
pub fn generate_processes(
    space: &PQSpace,
    config: &GeneratorConfig,
    rng: &mut SeededRng,
) -> Result<Vec<ParametrisationProcess>, ProcessError> {
    let mut processes = Vec::new();
    let mut total = 0;
    while total < config.total_iterations {
        let behaviour = if rng.random_bool(config.exploitative_share) {
            Behaviour::Exploitative
        } else {
            Behaviour::Explorative
        };
        let mut process = run_parametrisation_process(space, behaviour, config, rng)?;
        process.id = processes.len();
        total += process.iterations.len();
        processes.push(process);
    }
    Ok(processes)
}
