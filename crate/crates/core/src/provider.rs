//! Provider-optimal routing anticipating the user best response.
//!
//! For every regime the provider objective `J_i(s, q*(i, s))` reduces to a
//! short list of candidate policies. [`solve_equilibrium`] evaluates that
//! list, returns its argmin, and labels the result with the closed-form case
//! that predicts it. [`brute_force_optimum`] is the independent check: it
//! searches a cascade grid and recovers the user response by direct utility
//! maximization.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::GameError;
use crate::model::{
    expected_outcomes, net_values, utility, GameConfig, Outcomes, ProviderPolicy, Regime, Route,
    UserResponse,
};
use crate::search::{golden_min, linspace};
use crate::user::{q_dagger, threshold_s0, threshold_s_high, threshold_s_low, user_best_response};

/// Number of interior grid points used before golden refinement.
pub const INTERIOR_GRID: usize = 1024;
/// Cascade-rate tolerance of the interior refinement.
pub const INTERIOR_TOL: f64 = 1e-9;
/// Relative slack under which two candidate costs count as tied.
pub const TIE_TOL: f64 = 1e-12;
/// Closed-form and search costs must agree to this absolute tolerance.
const AGREEMENT_TOL: f64 = 1e-9;

/// Which closed-form case (or search) produced an equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Provenance {
    /// Both models value-dominated: pick the lower cost-of-pass, no cascade.
    BothValueDominated,
    /// Both models latency-dominated: model 1 iff `P <= (c2-c1)/(p2-p1)`.
    BothLatencyDominated,
    /// Only model 2 value-dominated. Cases 1-2: `c1/p1 > c2/p2` split at
    /// `P1`; cases 3-4: `c1/p1 < c2/p2` split at `P2`.
    NegPos(u8),
    /// Only model 1 value-dominated, under one of three sufficient
    /// conditions: 1 route to model 1 only, 2 cascade until the user
    /// abandons, 3 route to model 2.
    PosNeg(u8),
    /// Only model 1 value-dominated and no sufficient condition holds.
    CandidateSearch,
    BruteForce,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::BothValueDominated => f.write_str("both-value-dominated"),
            Provenance::BothLatencyDominated => f.write_str("both-latency-dominated"),
            Provenance::NegPos(k) => write!(f, "neg-pos-case-{k}"),
            Provenance::PosNeg(k) => write!(f, "pos-neg-case-{k}"),
            Provenance::CandidateSearch => f.write_str("candidate-search"),
            Provenance::BruteForce => f.write_str("brute-force"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub policy: ProviderPolicy,
    pub q: UserResponse,
    pub cost: f64,
}

/// Provider policy, user response and their outcomes at the optimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub policy: ProviderPolicy,
    pub q_star: UserResponse,
    pub outcomes: Outcomes,
    pub provenance: Provenance,
    /// The config sits on an equality boundary of the closed-form case split
    /// and the tie rule picked the policy.
    pub on_boundary: bool,
    /// Cascade rates that achieve the same cost; `policy.cascade` is the
    /// smallest of them.
    pub admissible: (f64, f64),
    pub candidates: Vec<Candidate>,
}

/// Penalty thresholds that split the provider's choices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdPenalties {
    /// `(c2/p2 - c1) / (1 - p1)`: model-1-without-cascade vs model 2.
    pub p1: f64,
    /// `P2(s0)`; present only when model 1 alone is latency-dominated.
    pub p2: Option<f64>,
    pub cop1: f64,
    pub cop2: f64,
    /// `(c2 - c1) / (p2 - p1)`.
    pub incr: f64,
}

pub fn penalty_threshold_p1(cfg: &GameConfig) -> f64 {
    (cfg.m2().cost_of_pass() - cfg.m1().c) / (1.0 - cfg.m1().p)
}

/// `(c1 (1-s) + c2 s / p2) / (p1 + (1-p1) s)`, the penalty at which
/// abandoning after one model-1 pass costs the same as cascading at rate `s`
/// with a staying user.
pub fn penalty_threshold_at(cfg: &GameConfig, s: f64) -> f64 {
    let (m1, m2) = (cfg.m1(), cfg.m2());
    (m1.c * (1.0 - s) + m2.c * s / m2.p) / (m1.p + (1.0 - m1.p) * s)
}

pub fn threshold_penalties(cfg: &GameConfig) -> ThresholdPenalties {
    let p2 = threshold_s0(cfg)
        .ok()
        .map(|s0| penalty_threshold_at(cfg, s0));
    ThresholdPenalties {
        p1: penalty_threshold_p1(cfg),
        p2,
        cop1: cfg.m1().cost_of_pass(),
        cop2: cfg.m2().cost_of_pass(),
        incr: cfg.incremental_ratio(),
    }
}

fn tied(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE_TOL * a.abs().max(b.abs()).max(1.0)
}

fn evaluate(cfg: &GameConfig, policy: ProviderPolicy) -> Result<Candidate, GameError> {
    let policy = policy.canonical();
    let q = user_best_response(cfg, policy)?.q_star;
    let cost = expected_outcomes(cfg, policy, q).provider_cost;
    Ok(Candidate { policy, q, cost })
}

fn precedes(a: &Candidate, b: &Candidate) -> bool {
    (a.policy.route, a.policy.cascade) < (b.policy.route, b.policy.cascade)
}

/// Cheapest candidate; near-ties go to the lower route, then lower cascade.
fn argmin(cands: &[Candidate]) -> Candidate {
    let mut best = cands[0];
    for c in &cands[1..] {
        if (c.cost < best.cost && !tied(c.cost, best.cost))
            || (tied(c.cost, best.cost) && precedes(c, &best))
        {
            best = *c;
        }
    }
    best
}

fn assemble(
    cfg: &GameConfig,
    candidates: Vec<Candidate>,
    provenance: Provenance,
    on_boundary: bool,
    predicted: Option<ProviderPolicy>,
) -> Result<Equilibrium, GameError> {
    let best = argmin(&candidates);
    if let Some(pred) = predicted {
        let pred_cost = evaluate(cfg, pred)?.cost;
        if (pred_cost - best.cost).abs() > AGREEMENT_TOL * pred_cost.abs().max(1.0) {
            return Err(GameError::Internal(format!(
                "closed-form case {provenance} predicts J = {pred_cost} but the candidate minimum is {} for {:?}",
                best.cost,
                cfg.to_document()
            )));
        }
    }
    let admissible = admissible_interval(cfg, &best)?;
    Ok(Equilibrium {
        policy: best.policy,
        q_star: best.q,
        outcomes: expected_outcomes(cfg, best.policy, best.q),
        provenance,
        on_boundary,
        admissible,
        candidates,
    })
}

fn admissible_interval(cfg: &GameConfig, best: &Candidate) -> Result<(f64, f64), GameError> {
    let s = best.policy.cascade;
    if best.policy.route == Route::Model1 && best.q == UserResponse::ABANDON {
        match net_values(cfg).regime {
            Regime::BothNegative => return Ok((0.0, 1.0)),
            Regime::PosNeg => return Ok((threshold_s_high(cfg)?, 1.0)),
            _ => {}
        }
    }
    Ok((s, s))
}

fn require_any(cfg: &GameConfig, allowed: &[Regime]) -> Result<Regime, GameError> {
    let regime = net_values(cfg).regime;
    if allowed.contains(&regime) {
        Ok(regime)
    } else {
        Err(GameError::RegimeMismatch {
            expected: allowed[0],
            actual: regime,
        })
    }
}

/// Both net values share a sign: no cascade, a single model.
pub fn optimize_same_sign(cfg: &GameConfig) -> Result<Equilibrium, GameError> {
    let regime = require_any(cfg, &[Regime::BothPositive, Regime::BothNegative])?;
    let th = threshold_penalties(cfg);
    match regime {
        Regime::BothPositive => {
            let cands = vec![
                evaluate(cfg, ProviderPolicy::model1(0.0))?,
                evaluate(cfg, ProviderPolicy::model1(1.0))?,
                evaluate(cfg, ProviderPolicy::model2())?,
            ];
            let predicted = if th.cop1 <= th.cop2 {
                ProviderPolicy::model1(0.0)
            } else {
                ProviderPolicy::model2()
            };
            let boundary = tied(th.cop1, th.cop2);
            assemble(
                cfg,
                cands,
                Provenance::BothValueDominated,
                boundary,
                Some(predicted),
            )
        }
        _ => {
            let cands = vec![
                evaluate(cfg, ProviderPolicy::model1(0.0))?,
                evaluate(cfg, ProviderPolicy::model2())?,
            ];
            let pen = cfg.penalty();
            let predicted = if pen <= th.incr {
                ProviderPolicy::model1(0.0)
            } else {
                ProviderPolicy::model2()
            };
            let boundary = tied(pen, th.incr);
            assemble(
                cfg,
                cands,
                Provenance::BothLatencyDominated,
                boundary,
                Some(predicted),
            )
        }
    }
}

/// Model 1 latency-dominated, model 2 value-dominated.
pub fn optimize_neg_pos(cfg: &GameConfig) -> Result<Equilibrium, GameError> {
    require_any(cfg, &[Regime::NegPos])?;
    let s0 = threshold_s0(cfg)?;
    let th = threshold_penalties(cfg);
    let p2 = th.p2.expect("P2 defined for NegPos");
    let pen = cfg.penalty();
    let cands = vec![
        evaluate(cfg, ProviderPolicy::model1(0.0))?,
        evaluate(cfg, ProviderPolicy::model1(s0))?,
        evaluate(cfg, ProviderPolicy::model1(1.0))?,
        evaluate(cfg, ProviderPolicy::model2())?,
    ];
    // Equal costs-of-pass fold into the second pair (P1 = P2 = c1/p1 there).
    let (case, boundary, predicted) = if th.cop1 > th.cop2 && !tied(th.cop1, th.cop2) {
        if pen <= th.p1 {
            (1, tied(pen, th.p1), ProviderPolicy::model1(0.0))
        } else {
            (2, false, ProviderPolicy::model2())
        }
    } else if pen <= p2 {
        (
            3,
            tied(pen, p2) || tied(th.cop1, th.cop2),
            ProviderPolicy::model1(0.0),
        )
    } else {
        (4, tied(th.cop1, th.cop2), ProviderPolicy::model1(s0))
    };
    assemble(
        cfg,
        cands,
        Provenance::NegPos(case),
        boundary,
        Some(predicted),
    )
}

/// Minimum of `J_1(s, q_dagger(s))` over the open interior band.
fn interior_minimum(cfg: &GameConfig, lo: f64, hi: f64) -> Result<Option<Candidate>, GameError> {
    if hi - lo <= 2.0 * INTERIOR_TOL {
        return Ok(None);
    }
    let cost_at = |s: f64| -> f64 {
        match q_dagger(cfg, s) {
            Ok(q) => {
                expected_outcomes(
                    cfg,
                    ProviderPolicy::model1(s),
                    UserResponse::new(q).unwrap(),
                )
                .provider_cost
            }
            Err(_) => f64::INFINITY,
        }
    };
    let step = (hi - lo) / (INTERIOR_GRID + 1) as f64;
    let grid: Vec<f64> = (1..=INTERIOR_GRID).map(|k| lo + step * k as f64).collect();
    let costs: Vec<f64> = grid.iter().map(|&s| cost_at(s)).collect();
    let k = costs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .expect("non-empty grid");
    let a = if k == 0 { lo + 0.5 * step } else { grid[k - 1] };
    let b = if k + 1 == grid.len() {
        hi - 0.5 * step
    } else {
        grid[k + 1]
    };
    let (s, j) = golden_min(cost_at, a, b, INTERIOR_TOL);
    let s = if j < costs[k] { s } else { grid[k] };
    let q = UserResponse::new(q_dagger(cfg, s)?)?;
    let cost = expected_outcomes(cfg, ProviderPolicy::model1(s), q).provider_cost;
    Ok(Some(Candidate {
        policy: ProviderPolicy::model1(s),
        q,
        cost,
    }))
}

/// Model 1 value-dominated, model 2 latency-dominated.
///
/// Searches the five-candidate reduction: model 1 without cascade, cascade at
/// `s_low` with a staying user, the best interior cascade, cascade at
/// `s_high` (the user abandons on any failure, so every `s >= s_high` costs
/// the same), and model 2 with an abandoning user.
pub fn optimize_pos_neg(cfg: &GameConfig) -> Result<Equilibrium, GameError> {
    require_any(cfg, &[Regime::PosNeg])?;
    let lo = threshold_s_low(cfg)?;
    let hi = threshold_s_high(cfg)?;
    let mut cands = vec![
        evaluate(cfg, ProviderPolicy::model1(0.0))?,
        evaluate(cfg, ProviderPolicy::model1(lo))?,
    ];
    if let Some(c) = interior_minimum(cfg, lo, hi)? {
        cands.push(c);
    }
    cands.push(evaluate(cfg, ProviderPolicy::model1(hi))?);
    cands.push(evaluate(cfg, ProviderPolicy::model2())?);

    let th = threshold_penalties(cfg);
    let pen = cfg.penalty();
    let (provenance, predicted) = if th.cop1 < pen.min(th.cop2) {
        (Provenance::PosNeg(1), Some(ProviderPolicy::model1(0.0)))
    } else if pen < th.cop1.min(th.incr) {
        (Provenance::PosNeg(2), Some(ProviderPolicy::model1(hi)))
    } else if th.incr < pen && pen < th.cop2 && th.cop2 < th.cop1 {
        (Provenance::PosNeg(3), Some(ProviderPolicy::model2()))
    } else {
        (Provenance::CandidateSearch, None)
    };
    assemble(cfg, cands, provenance, false, predicted)
}

/// Stackelberg equilibrium: the provider's cost-minimizing policy given that
/// the user best-responds.
pub fn solve_equilibrium(cfg: &GameConfig) -> Result<Equilibrium, GameError> {
    match net_values(cfg).regime {
        Regime::BothPositive | Regime::BothNegative => optimize_same_sign(cfg),
        Regime::NegPos => optimize_neg_pos(cfg),
        Regime::PosNeg => optimize_pos_neg(cfg),
    }
}

/// User response recovered by maximizing utility on a `q` grid and refining
/// the best cell with golden-section search. Exact ties on the grid go to the
/// smaller `q`.
pub fn grid_best_response(
    cfg: &GameConfig,
    policy: ProviderPolicy,
    q_points: usize,
) -> UserResponse {
    let qs = linspace(0.0, 1.0, q_points);
    let us: Vec<f64> = qs.iter().map(|&q| utility(cfg, policy, q)).collect();
    let max = us.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let k = us
        .iter()
        .position(|&u| u >= max - TIE_TOL * max.abs().max(1.0))
        .expect("non-empty grid");
    let a = qs[k.saturating_sub(1)];
    let b = qs[(k + 1).min(qs.len() - 1)];
    let (q, neg_u) = golden_min(|q| -utility(cfg, policy, q), a, b, 1e-12);
    let q = if -neg_u > us[k] { q } else { qs[k] };
    UserResponse::new(q.clamp(0.0, 1.0)).expect("q in [0, 1]")
}

/// Exhaustive search over a cascade grid (augmented with the analytic
/// thresholds) with grid-recovered user responses.
pub fn brute_force_optimum(
    cfg: &GameConfig,
    s_points: usize,
    q_points: usize,
) -> Result<Equilibrium, GameError> {
    if s_points < 101 || q_points < 101 {
        return Err(GameError::Internal(format!(
            "brute force needs at least 101 grid points per axis, got s={s_points}, q={q_points}"
        )));
    }
    let mut grid = linspace(0.0, 1.0, s_points);
    let th = crate::user::Thresholds::for_config(cfg)?;
    grid.extend([th.s0, th.s_low, th.s_high].into_iter().flatten());
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let eval = |policy: ProviderPolicy| -> Candidate {
        let q = grid_best_response(cfg, policy, q_points);
        Candidate {
            policy,
            q,
            cost: expected_outcomes(cfg, policy, q).provider_cost,
        }
    };
    let mut cands: Vec<Candidate> = grid
        .par_iter()
        .map(|&s| eval(ProviderPolicy::model1(s)))
        .collect();

    let k = cands
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.cost.total_cmp(&b.1.cost))
        .map(|(k, _)| k)
        .expect("non-empty grid");
    let a = grid[k.saturating_sub(1)];
    let b = grid[(k + 1).min(grid.len() - 1)];
    let (s, j) = golden_min(|s| eval(ProviderPolicy::model1(s)).cost, a, b, 1e-10);
    if j < cands[k].cost && !tied(j, cands[k].cost) {
        cands.push(eval(ProviderPolicy::model1(s)));
    }
    cands.push(eval(ProviderPolicy::model2()));

    let best = argmin(&cands);
    Ok(Equilibrium {
        policy: best.policy,
        q_star: best.q,
        outcomes: expected_outcomes(cfg, best.policy, best.q),
        provenance: Provenance::BruteForce,
        on_boundary: false,
        admissible: (best.policy.cascade, best.policy.cascade),
        candidates: cands,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelParams;

    fn cfg(p: (f64, f64), t: (f64, f64), c: (f64, f64), v: f64, pen: f64) -> GameConfig {
        GameConfig::new(
            ModelParams::new(p.0, t.0, c.0),
            ModelParams::new(p.1, t.1, c.1),
            v,
            pen,
        )
        .unwrap()
    }

    fn check_against_brute_force(g: &GameConfig) -> Equilibrium {
        let eq = solve_equilibrium(g).unwrap();
        let bf = brute_force_optimum(g, 1001, 1001).unwrap();
        assert!(
            (eq.outcomes.provider_cost - bf.outcomes.provider_cost).abs() < 1e-6,
            "{} vs {}",
            eq.outcomes.provider_cost,
            bf.outcomes.provider_cost
        );
        eq
    }

    #[test]
    fn both_positive_routes_to_cheaper_cost_of_pass() {
        let g = cfg((0.5, 0.9), (0.1, 0.3), (0.1, 0.4), 1.0, 0.5);
        let eq = check_against_brute_force(&g);
        assert_eq!(eq.policy, ProviderPolicy::model1(0.0));
        assert_eq!(eq.provenance, Provenance::BothValueDominated);
        assert!((eq.outcomes.provider_cost - 0.2).abs() < 1e-12);
        assert_eq!(eq.q_star, UserResponse::STAY);
    }

    #[test]
    fn both_negative_switches_at_incremental_ratio() {
        let g = cfg((0.5, 0.9), (0.2, 0.3), (0.1, 0.4), 0.2, 0.5);
        let eq = check_against_brute_force(&g);
        assert_eq!(eq.policy.route, Route::Model1);
        assert_eq!(eq.policy.cascade, 0.0);
        assert_eq!(eq.admissible, (0.0, 1.0));
        assert!((eq.outcomes.provider_cost - 0.35).abs() < 1e-12);

        let g = cfg((0.5, 0.9), (0.2, 0.3), (0.1, 0.4), 0.2, 0.9);
        let eq = check_against_brute_force(&g);
        assert_eq!(eq.policy, ProviderPolicy::model2());
        assert!((eq.outcomes.provider_cost - (0.4 + 0.9 * 0.1)).abs() < 1e-12);
        assert_eq!(eq.provenance, Provenance::BothLatencyDominated);
    }

    #[test]
    fn neg_pos_cases() {
        let g = cfg((0.3, 0.9), (0.4, 0.5), (0.1, 0.36), 1.0, 0.2);
        let th = threshold_penalties(&g);
        assert!((th.p2.unwrap() - 0.361_904_761_904_761_9).abs() < 1e-12);
        let eq = check_against_brute_force(&g);
        assert_eq!(eq.policy, ProviderPolicy::model1(0.0));
        assert_eq!(eq.provenance, Provenance::NegPos(3));
        assert!((eq.outcomes.provider_cost - 0.24).abs() < 1e-12);

        let g = cfg((0.3, 0.9), (0.4, 0.5), (0.1, 0.36), 1.0, 0.5);
        let eq = check_against_brute_force(&g);
        let s0 = threshold_s0(&g).unwrap();
        assert_eq!(eq.policy, ProviderPolicy::model1(s0));
        assert_eq!(eq.q_star, UserResponse::STAY);
        assert_eq!(eq.provenance, Provenance::NegPos(4));
        assert!((eq.outcomes.provider_cost - 0.353_333_333_333_333_3).abs() < 1e-12);
        let j2 = expected_outcomes(&g, ProviderPolicy::model2(), UserResponse::STAY).provider_cost;
        assert!(eq.outcomes.provider_cost < j2);

        // c1/p1 > c2/p2 with P < P1
        let g = cfg((0.3, 0.9), (0.4, 0.5), (0.2, 0.36), 1.0, 0.1);
        let eq = check_against_brute_force(&g);
        assert_eq!(eq.provenance, Provenance::NegPos(1));
        assert_eq!(eq.policy, ProviderPolicy::model1(0.0));
        assert!((eq.outcomes.provider_cost - (0.2 + 0.1 * 0.7)).abs() < 1e-12);
        let g = cfg((0.3, 0.9), (0.4, 0.5), (0.2, 0.36), 1.0, 0.9);
        let eq = check_against_brute_force(&g);
        assert_eq!(eq.provenance, Provenance::NegPos(2));
        assert_eq!(eq.policy, ProviderPolicy::model2());
    }

    #[test]
    fn pos_neg_sufficient_conditions() {
        // cheap model 1 with a large penalty
        let g = cfg((0.6, 0.8), (0.1, 0.9), (0.1, 0.6), 1.0, 0.5);
        let eq = check_against_brute_force(&g);
        assert_eq!(eq.provenance, Provenance::PosNeg(1));
        assert_eq!(eq.policy, ProviderPolicy::model1(0.0));

        // small penalty: cascade until the user leaves
        let g = cfg((0.6, 0.8), (0.1, 0.9), (0.5, 0.6), 1.0, 0.1);
        let eq = check_against_brute_force(&g);
        assert_eq!(eq.provenance, Provenance::PosNeg(2));
        let sh = threshold_s_high(&g).unwrap();
        assert_eq!(eq.policy, ProviderPolicy::model1(sh));
        assert_eq!(eq.admissible, (sh, 1.0));
        assert!((eq.outcomes.provider_cost - (0.5 + 0.1 * 0.4)).abs() < 1e-12);

        let g = cfg((0.6, 0.8), (0.1, 0.9), (0.5, 0.6), 1.0, 0.6);
        let eq = check_against_brute_force(&g);
        assert_eq!(eq.provenance, Provenance::PosNeg(3));
        assert_eq!(eq.policy, ProviderPolicy::model2());
        assert!((eq.outcomes.provider_cost - 0.72).abs() < 1e-12);
    }

    #[test]
    fn regime_mismatch() {
        let g = cfg((0.5, 0.9), (0.1, 0.3), (0.1, 0.4), 1.0, 0.5);
        assert!(matches!(
            optimize_neg_pos(&g),
            Err(GameError::RegimeMismatch { .. })
        ));
        assert!(matches!(
            optimize_pos_neg(&g),
            Err(GameError::RegimeMismatch { .. })
        ));
        let g = cfg((0.3, 0.9), (0.4, 0.5), (0.1, 0.36), 1.0, 0.5);
        assert!(matches!(
            optimize_same_sign(&g),
            Err(GameError::RegimeMismatch { .. })
        ));
    }

    #[test]
    fn brute_force_requires_resolution() {
        let g = cfg((0.5, 0.9), (0.1, 0.3), (0.1, 0.4), 1.0, 0.5);
        assert!(brute_force_optimum(&g, 100, 1001).is_err());
    }

    #[test]
    fn brute_force_flat_directions() {
        // both latency-dominated: J_1 constant in s
        let g = cfg((0.5, 0.9), (0.2, 0.3), (0.1, 0.4), 0.2, 0.5);
        let bf = brute_force_optimum(&g, 101, 101).unwrap();
        let j1: Vec<f64> = bf
            .candidates
            .iter()
            .filter(|c| c.policy.route == Route::Model1)
            .map(|c| c.cost)
            .collect();
        assert!(j1.iter().all(|j| (j - j1[0]).abs() < 1e-15));
    }
}
