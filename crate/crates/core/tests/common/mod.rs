#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use routegame::model::{net_values, GameConfig, ModelParams, Regime};

pub const REGIMES: [Regime; 4] = [
    Regime::BothPositive,
    Regime::BothNegative,
    Regime::NegPos,
    Regime::PosNeg,
];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn sorted_pair(rng: &mut impl Rng, lo: f64, hi: f64) -> (f64, f64) {
    loop {
        let (a, b) = (rng.gen_range(lo..hi), rng.gen_range(lo..hi));
        if (a - b).abs() > 1e-3 {
            return if a < b { (a, b) } else { (b, a) };
        }
    }
}

/// Uniformly drawn valid config, without regime targeting.
pub fn any_config(rng: &mut impl Rng) -> GameConfig {
    let (p1, p2) = sorted_pair(rng, 0.1, 0.95);
    let (t1, t2) = sorted_pair(rng, 0.0, 1.0);
    let (c1, c2) = sorted_pair(rng, 0.0, 1.0);
    let v = rng.gen_range(0.5..2.5);
    let pen = rng.gen_range(0.01..2.0);
    GameConfig::new(
        ModelParams::new(p1, t1, c1),
        ModelParams::new(p2, t2, c2),
        v,
        pen,
    )
    .expect("sampled config is valid")
}

/// Rejection-samples a config in `regime` whose net values are at least
/// `1e-4` away from zero.
pub fn config_in(rng: &mut impl Rng, regime: Regime) -> GameConfig {
    loop {
        let cfg = any_config(rng);
        let nv = net_values(&cfg);
        if nv.regime == regime && nv.xi1.abs() > 1e-4 && nv.xi2.abs() > 1e-4 {
            return cfg;
        }
    }
}

/// `n` configs cycling through the four regimes.
pub fn configs_all_regimes(rng: &mut impl Rng, n: usize) -> Vec<GameConfig> {
    (0..n).map(|k| config_in(rng, REGIMES[k % 4])).collect()
}

pub fn with_penalty(cfg: &GameConfig, pen: f64) -> GameConfig {
    let mut doc = cfg.to_document();
    doc.penalty = pen;
    GameConfig::try_from(doc).expect("penalty change keeps the config valid")
}

pub fn cop(cfg: &GameConfig) -> (f64, f64) {
    (cfg.m1().c / cfg.m1().p, cfg.m2().c / cfg.m2().p)
}

/// Root of a sign-changing `f` on `[lo, hi]` by plain bisection.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let (flo, fhi) = (f(lo), f(hi));
    assert!(flo * fhi <= 0.0, "no sign change on [{lo}, {hi}]");
    if flo == 0.0 {
        return lo;
    }
    if fhi == 0.0 {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Utility of routing to model 1 with cascade `s`, computed by summing the
/// session chain directly over a truncated horizon.
pub fn chain_utility_model1(cfg: &GameConfig, s: f64, q: f64) -> f64 {
    let (m1, m2) = (cfg.m1(), cfg.m2());
    let v = cfg.value();
    // probability mass sitting on each model before a step
    let (mut on1, mut on2) = (1.0, 0.0);
    let mut u = 0.0;
    for _ in 0..100_000 {
        if on1 + on2 < 1e-18 {
            break;
        }
        u += on1 * (m1.p * v - m1.t) + on2 * (m2.p * v - m2.t);
        let stay1 = on1 * (1.0 - m1.p) * (1.0 - q);
        let stay2 = on2 * (1.0 - m2.p) * (1.0 - q);
        on1 = stay1 * (1.0 - s);
        on2 = stay2 + stay1 * s;
    }
    u
}
