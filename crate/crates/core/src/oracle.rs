//! Monte-Carlo simulation of the session chain.
//!
//! Episodes are simulated step by step with no use of the closed forms, so
//! the estimates are an independent check on [`crate::model::expected_outcomes`].
//! Episode `k` draws from a ChaCha stream keyed by `(seed, k)`, which keeps
//! estimates bit-identical for any number of worker threads.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::{GameConfig, ProviderPolicy, Route, UserResponse};

pub const MAX_STEPS: u64 = 1_000_000;
pub const MIN_EPISODES: u64 = 1_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Episode {
    pub succeeded: bool,
    pub abandoned: bool,
    pub total_latency: f64,
    pub total_cost: f64,
    pub steps: u64,
}

impl Episode {
    pub fn truncated(&self) -> bool {
        !self.succeeded && !self.abandoned
    }
}

/// Runs one session until success, abandonment or the step cap.
pub fn simulate_episode<R: Rng + ?Sized>(
    cfg: &GameConfig,
    pol: ProviderPolicy,
    q: UserResponse,
    rng: &mut R,
) -> Episode {
    let mut at = pol.route;
    let mut ep = Episode {
        succeeded: false,
        abandoned: false,
        total_latency: 0.0,
        total_cost: 0.0,
        steps: 0,
    };
    while ep.steps < MAX_STEPS {
        let m = cfg.model(at);
        ep.steps += 1;
        ep.total_latency += m.t;
        ep.total_cost += m.c;
        if rng.gen::<f64>() < m.p {
            ep.succeeded = true;
            break;
        }
        if rng.gen::<f64>() < q.q() {
            ep.abandoned = true;
            break;
        }
        if at == Route::Model1 && rng.gen::<f64>() < pol.cascade {
            at = Route::Model2;
        }
    }
    ep
}

/// Five functionals in the order S, L, C, U, J.
pub type Functionals = [f64; 5];

pub const FUNCTIONAL_NAMES: [&str; 5] = ["S", "L", "C", "U", "J"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: Functionals,
    pub stderr: Functionals,
    pub n: u64,
    pub seed: u64,
    pub max_steps_hit: u64,
}

impl McEstimate {
    /// Usable as an oracle value only when no episode hit the step cap.
    pub fn accepted(&self) -> bool {
        self.max_steps_hit == 0
    }
}

/// Welford accumulator for one functional.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let d = x - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (x - self.mean);
    }

    fn stderr(&self) -> f64 {
        if self.n < 2.0 {
            return 0.0;
        }
        (self.m2 / (self.n - 1.0) / self.n).sqrt()
    }
}

fn episode_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Averages `n` independent episodes.
///
/// Panics if `n` is below [`MIN_EPISODES`].
pub fn estimate(
    cfg: &GameConfig,
    pol: ProviderPolicy,
    q: UserResponse,
    n: u64,
    seed: u64,
) -> McEstimate {
    assert!(
        n >= MIN_EPISODES,
        "need at least {MIN_EPISODES} episodes, got {n}"
    );
    let episodes: Vec<Episode> = (0..n)
        .into_par_iter()
        .map(|k| simulate_episode(cfg, pol, q, &mut episode_rng(seed, k)))
        .collect();

    let mut acc = [Moments::default(); 5];
    let mut truncated = 0;
    for ep in &episodes {
        if ep.truncated() {
            truncated += 1;
        }
        let s = if ep.succeeded { 1.0 } else { 0.0 };
        let a = if ep.abandoned { 1.0 } else { 0.0 };
        let xs = [
            s,
            ep.total_latency,
            ep.total_cost,
            cfg.value() * s - ep.total_latency,
            ep.total_cost + cfg.penalty() * a,
        ];
        for (m, x) in acc.iter_mut().zip(xs) {
            m.push(x);
        }
    }
    McEstimate {
        mean: acc.map(|m| m.mean),
        stderr: acc.map(|m| m.stderr()),
        n,
        seed,
        max_steps_hit: truncated,
    }
}
