//! Monte Carlo drift estimates: sample a two-sided environment, run the walk,
//! average `X_n / n` over independent replications.
//!
//! Every replication draws from its own ChaCha8 stream: stream `2r` for the
//! environment of replication `r` and `2r + 1` for its walk, all under the
//! master seed. Results therefore do not depend on thread scheduling.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::env::{stationary_distribution, EnvError, EnvironmentSpec, StationaryDistribution};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum McError {
    #[error("invalid simulation config: {0}")]
    BadConfig(String),
    #[error("p = {0} must lie in [0, 1]")]
    BadP(f64),
    #[error("walk left the sampled window [-{half_width}, {half_width}] at step {step}")]
    ExitedWindow { step: u64, half_width: u64 },
    #[error(transparent)]
    Env(#[from] EnvError),
}

/// How sites `-1, ..., -L` are filled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NegativeSide {
    /// Run the time-reversed chain `π_{y'} P_{y'y} / π_y` backwards from `Y_0`.
    #[default]
    Reversal,
    /// Independent stationary forward run, mirrored onto the negative sites.
    Reflected,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimConfig {
    pub steps: u64,
    pub replications: usize,
    pub seed: u64,
    pub burn_in: u64,
    pub strategy: NegativeSide,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            steps: 100_000,
            replications: 200,
            seed: 0,
            burn_in: 0,
            strategy: NegativeSide::Reversal,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), McError> {
        if self.steps == 0 {
            return Err(McError::BadConfig("steps must be at least 1".into()));
        }
        if self.replications == 0 {
            return Err(McError::BadConfig("replications must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DriftEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub replications: usize,
    pub steps: u64,
    /// Fraction of replications with `X_n > 0`.
    pub positive_fraction: f64,
}

/// Site types on `[-L, L]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Environment {
    half_width: u64,
    signs: Vec<i8>,
}

impl Environment {
    pub fn from_signs(half_width: u64, signs: Vec<i8>) -> Result<Self, McError> {
        if signs.len() as u64 != 2 * half_width + 1 {
            return Err(McError::BadConfig(format!(
                "{} signs do not cover [-{half_width}, {half_width}]",
                signs.len()
            )));
        }
        Ok(Self { half_width, signs })
    }

    pub fn half_width(&self) -> u64 {
        self.half_width
    }

    pub fn get(&self, site: i64) -> Option<i8> {
        let idx = site.checked_add(self.half_width as i64)?;
        usize::try_from(idx)
            .ok()
            .and_then(|i| self.signs.get(i).copied())
    }

    /// Signs from `-L` to `L`.
    pub fn signs(&self) -> &[i8] {
        &self.signs
    }
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

struct Sampler<'a> {
    spec: &'a EnvironmentSpec,
    initial: WeightedIndex<f64>,
    forward: Vec<WeightedIndex<f64>>,
    reversed: Vec<WeightedIndex<f64>>,
}

impl<'a> Sampler<'a> {
    fn new(spec: &'a EnvironmentSpec, pi: &StationaryDistribution) -> Result<Self, McError> {
        let weights = |w: Vec<f64>| {
            WeightedIndex::new(w).map_err(|e| McError::BadConfig(format!("sampling weights: {e}")))
        };
        let p = spec.transition();
        let m = spec.m();
        let initial = weights(pi.pi.clone())?;
        let forward = (0..m)
            .map(|y| weights((0..m).map(|z| p[(y, z)]).collect()))
            .collect::<Result<_, _>>()?;
        let reversed = (0..m)
            .map(|y| weights((0..m).map(|z| pi.pi[z] * p[(z, y)] / pi.pi[y]).collect()))
            .collect::<Result<_, _>>()?;
        Ok(Self {
            spec,
            initial,
            forward,
            reversed,
        })
    }

    fn run(
        &self,
        kernel: &[WeightedIndex<f64>],
        start: usize,
        len: u64,
        rng: &mut impl Rng,
    ) -> Vec<i8> {
        let g = self.spec.signs();
        let mut y = start;
        (0..len)
            .map(|_| {
                y = kernel[y].sample(rng);
                g[y]
            })
            .collect()
    }

    fn stationary_start(&self, burn_in: u64, rng: &mut impl Rng) -> usize {
        let mut y = self.initial.sample(rng);
        for _ in 0..burn_in {
            y = self.forward[y].sample(rng);
        }
        y
    }

    fn sample(
        &self,
        half_width: u64,
        burn_in: u64,
        strategy: NegativeSide,
        rng: &mut impl Rng,
    ) -> Environment {
        let y0 = self.stationary_start(burn_in, rng);
        let right = self.run(&self.forward, y0, half_width, rng);
        let left = match strategy {
            NegativeSide::Reversal => self.run(&self.reversed, y0, half_width, rng),
            NegativeSide::Reflected => {
                let z0 = self.stationary_start(burn_in, rng);
                let mut signs = Vec::with_capacity(half_width as usize);
                if half_width > 0 {
                    signs.push(self.spec.signs()[z0]);
                    signs.extend(self.run(&self.forward, z0, half_width - 1, rng));
                }
                signs
            }
        };
        // `left[j]` is site `-(j + 1)`.
        let mut signs = Vec::with_capacity(2 * half_width as usize + 1);
        signs.extend(left.iter().rev());
        signs.push(self.spec.signs()[y0]);
        signs.extend(right);
        Environment { half_width, signs }
    }
}

/// Environment on `[-L, L]` from stream 0 of `seed`, using the reversal kernel.
pub fn sample_environment(
    spec: &EnvironmentSpec,
    half_width: u64,
    seed: u64,
) -> Result<Environment, McError> {
    sample_environment_with(spec, half_width, seed, NegativeSide::Reversal)
}

pub fn sample_environment_with(
    spec: &EnvironmentSpec,
    half_width: u64,
    seed: u64,
    strategy: NegativeSide,
) -> Result<Environment, McError> {
    if half_width == 0 {
        return Err(McError::BadConfig("half width must be at least 1".into()));
    }
    let pi = stationary_distribution(spec)?;
    let sampler = Sampler::new(spec, &pi)?;
    Ok(sampler.sample(half_width, 0, strategy, &mut stream(seed, 0)))
}

fn walk(env: &Environment, p: f64, steps: u64, rng: &mut impl Rng) -> Result<i64, McError> {
    let mut x: i64 = 0;
    for step in 0..steps {
        let u = env.get(x).ok_or(McError::ExitedWindow {
            step,
            half_width: env.half_width,
        })?;
        let right = if u > 0 { p } else { 1.0 - p };
        x += if rng.random_bool(right) { 1 } else { -1 };
    }
    if env.get(x).is_none() {
        return Err(McError::ExitedWindow {
            step: steps,
            half_width: env.half_width,
        });
    }
    Ok(x)
}

/// `X_n` for a walk from 0, stream 1 of `seed`.
pub fn simulate_walk(env: &Environment, p: f64, steps: u64, seed: u64) -> Result<i64, McError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(McError::BadP(p));
    }
    walk(env, p, steps, &mut stream(seed, 1))
}

/// Sum in a fixed binary-tree order.
fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n => pairwise_sum(&xs[..n / 2]) + pairwise_sum(&xs[n / 2..]),
    }
}

pub fn estimate_drift(
    spec: &EnvironmentSpec,
    p: f64,
    config: &SimConfig,
) -> Result<DriftEstimate, McError> {
    config.validate()?;
    if !(0.0..=1.0).contains(&p) {
        return Err(McError::BadP(p));
    }
    let pi = stationary_distribution(spec)?;
    let sampler = Sampler::new(spec, &pi)?;
    let n = config.steps;
    let positions = (0..config.replications as u64)
        .into_par_iter()
        .map(|r| {
            let env = sampler.sample(
                n,
                config.burn_in,
                config.strategy,
                &mut stream(config.seed, 2 * r),
            );
            walk(&env, p, n, &mut stream(config.seed, 2 * r + 1))
        })
        .collect::<Result<Vec<i64>, McError>>()?;
    let speeds: Vec<f64> = positions.iter().map(|&x| x as f64 / n as f64).collect();
    let reps = speeds.len() as f64;
    let mean = pairwise_sum(&speeds) / reps;
    let stderr = if speeds.len() > 1 {
        let squares: Vec<f64> = speeds.iter().map(|v| (v - mean).powi(2)).collect();
        (pairwise_sum(&squares) / (reps - 1.0)).sqrt() / reps.sqrt()
    } else {
        0.0
    };
    let positive = positions.iter().filter(|&&x| x > 0).count() as f64;
    Ok(DriftEstimate {
        mean,
        stderr,
        replications: speeds.len(),
        steps: n,
        positive_fraction: positive / reps,
    })
}
