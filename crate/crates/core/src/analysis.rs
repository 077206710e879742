//! Misalignment between provider and user, latency throttling, and
//! parameter sweeps over the game.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::GameError;
use crate::model::{
    expected_outcomes, net_values, ConfigDocument, GameConfig, ProviderPolicy, Regime, Route,
    UserResponse,
};
use crate::provider::{solve_equilibrium, Equilibrium};
use crate::search::linspace;
use crate::user::user_best_response;

/// Gaps at or below this are treated as aligned.
pub const ALIGNED_TOL: f64 = 1e-9;
/// Predicate quantities closer than this to zero are on a boundary where the
/// sign test is ambiguous.
pub const BOUNDARY_BAND: f64 = 1e-6;
pub const DEFAULT_EPSILON: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UserOptimum {
    pub policy: ProviderPolicy,
    pub q: UserResponse,
    pub utility: f64,
}

/// Routing policy that maximizes user utility when the user best-responds.
///
/// Both value-dominated: the model with the larger `xi_i / p_i`. Both
/// latency-dominated: the larger `xi_i` (the user leaves after one pass).
/// Mixed: the value-dominated model, without cascade.
pub fn user_optimal_route(cfg: &GameConfig) -> Result<UserOptimum, GameError> {
    let nv = net_values(cfg);
    let (p1, p2) = (cfg.m1().p, cfg.m2().p);
    let policy = match nv.regime {
        Regime::BothPositive if nv.xi1 / p1 >= nv.xi2 / p2 => ProviderPolicy::model1(0.0),
        Regime::BothPositive => ProviderPolicy::model2(),
        Regime::BothNegative if nv.xi1 >= nv.xi2 => ProviderPolicy::model1(0.0),
        Regime::BothNegative => ProviderPolicy::model2(),
        Regime::NegPos => ProviderPolicy::model2(),
        Regime::PosNeg => ProviderPolicy::model1(0.0),
    };
    let q = user_best_response(cfg, policy)?.q_star;
    Ok(UserOptimum {
        policy,
        q,
        utility: expected_outcomes(cfg, policy, q).utility,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AlignmentRule {
    /// Both value-dominated: `sign(c1/p1 - c2/p2) == sign(xi2/p2 - xi1/p1)`.
    CostOfPassVsValueRate,
    /// Both latency-dominated: `sign(xi2 - xi1) == sign(P - (c2-c1)/(p2-p1))`.
    NetValueVsPenalty,
    /// Mixed signs: the provider routes to the value-dominated model without cascade.
    ValueDominatedNoCascade,
}

/// Closed-form alignment test evaluated for the config's regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlignmentPredicate {
    pub rule: AlignmentRule,
    /// Left quantity of the comparison (for the mixed rule, `xi` of the chosen model).
    pub lhs: f64,
    /// Right quantity of the comparison (for the mixed rule, the chosen cascade rate).
    pub rhs: f64,
    pub holds: bool,
    /// Within [`BOUNDARY_BAND`] of a sign change.
    pub near_boundary: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MisalignmentReport {
    pub delta_u: f64,
    pub user_opt: UserOptimum,
    pub provider_opt: Equilibrium,
    pub aligned: bool,
    pub predicate: AlignmentPredicate,
}

fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

pub fn alignment_predicate(cfg: &GameConfig, eq: &Equilibrium) -> AlignmentPredicate {
    let nv = net_values(cfg);
    let (m1, m2) = (cfg.m1(), cfg.m2());
    let near = |x: f64| x.abs() < BOUNDARY_BAND;
    match nv.regime {
        Regime::BothPositive => {
            let lhs = m1.cost_of_pass() - m2.cost_of_pass();
            let rhs = nv.xi2 / m2.p - nv.xi1 / m1.p;
            AlignmentPredicate {
                rule: AlignmentRule::CostOfPassVsValueRate,
                lhs,
                rhs,
                holds: sign(lhs) == sign(rhs),
                near_boundary: near(lhs) || near(rhs),
            }
        }
        Regime::BothNegative => {
            let lhs = nv.xi2 - nv.xi1;
            let rhs = cfg.penalty() - cfg.incremental_ratio();
            AlignmentPredicate {
                rule: AlignmentRule::NetValueVsPenalty,
                lhs,
                rhs,
                holds: sign(lhs) == sign(rhs),
                near_boundary: near(lhs) || near(rhs),
            }
        }
        Regime::NegPos | Regime::PosNeg => {
            let lhs = match eq.policy.route {
                Route::Model1 => nv.xi1,
                Route::Model2 => nv.xi2,
            };
            let rhs = match eq.policy.route {
                Route::Model1 => eq.policy.cascade,
                Route::Model2 => 0.0,
            };
            AlignmentPredicate {
                rule: AlignmentRule::ValueDominatedNoCascade,
                lhs,
                rhs,
                holds: lhs > 0.0 && rhs == 0.0,
                near_boundary: near(nv.xi1) || near(nv.xi2) || (rhs > 0.0 && rhs < BOUNDARY_BAND),
            }
        }
    }
}

/// Utility the user loses because the provider minimizes cost.
///
/// Errors with [`GameError::Internal`] when the numeric gap and the
/// closed-form predicate disagree away from a predicate boundary.
pub fn misalignment_gap(cfg: &GameConfig) -> Result<MisalignmentReport, GameError> {
    let provider_opt = solve_equilibrium(cfg)?;
    misalignment_against(cfg, provider_opt)
}

fn misalignment_against(
    cfg: &GameConfig,
    provider_opt: Equilibrium,
) -> Result<MisalignmentReport, GameError> {
    let user_opt = user_optimal_route(cfg)?;
    let delta_u = user_opt.utility - provider_opt.outcomes.utility;
    let aligned = delta_u <= ALIGNED_TOL;
    let predicate = alignment_predicate(cfg, &provider_opt);
    if !predicate.near_boundary && predicate.holds != aligned {
        return Err(GameError::Internal(format!(
            "alignment predicate {:?} says {} but the gap is {delta_u} for {:?}",
            predicate.rule,
            predicate.holds,
            cfg.to_document()
        )));
    }
    Ok(MisalignmentReport {
        delta_u,
        user_opt,
        provider_opt,
        aligned,
        predicate,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ThrottleTarget {
    Both,
    Model1,
    Model2,
}

impl fmt::Display for ThrottleTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ThrottleTarget::Both => "both",
            ThrottleTarget::Model1 => "model1",
            ThrottleTarget::Model2 => "model2",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThrottleVariant {
    pub target: ThrottleTarget,
    pub t_hat: (f64, f64),
    pub equilibrium: Equilibrium,
    /// `j_pre` minus this variant's equilibrium cost.
    pub gain: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThrottleReport {
    pub j_pre: f64,
    pub j_post: f64,
    pub gain: f64,
    pub target: ThrottleTarget,
    pub t_hat: (f64, f64),
    pub delta_u_post: f64,
    pub variants: Vec<ThrottleVariant>,
}

impl ThrottleReport {
    pub fn variant(&self, target: ThrottleTarget) -> &ThrottleVariant {
        self.variants
            .iter()
            .find(|v| v.target == target)
            .expect("all three variants are evaluated")
    }
}

/// Re-solves the game with inflated latencies `t_hat_i = V p_i + epsilon`
/// on model 1, model 2, or both, and reports the provider's best outcome.
///
/// A model that is already latency-dominated keeps its latency. Ties between
/// variants keep the earlier one in the order both, model 1, model 2.
pub fn throttle_analysis(cfg: &GameConfig, epsilon: f64) -> Result<ThrottleReport, GameError> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(crate::error::ConfigError::OutOfRange {
            name: "epsilon",
            value: epsilon,
            range: "(0, inf)",
        }
        .into());
    }
    let j_pre = solve_equilibrium(cfg)?.outcomes.provider_cost;
    let v = cfg.value();
    let (m1, m2) = (cfg.m1(), cfg.m2());
    let hat1 = m1.t.max(v * m1.p + epsilon);
    let hat2 = m2.t.max(v * m2.p + epsilon);

    let mut variants = Vec::with_capacity(3);
    let mut post_reports = Vec::with_capacity(3);
    for (target, t_hat) in [
        (ThrottleTarget::Both, (hat1, hat2)),
        (ThrottleTarget::Model1, (hat1, m2.t)),
        (ThrottleTarget::Model2, (m1.t, hat2)),
    ] {
        let throttled = cfg.with_latencies(t_hat.0, t_hat.1)?;
        let report = misalignment_gap(&throttled)?;
        let equilibrium = report.provider_opt.clone();
        let gain = j_pre - equilibrium.outcomes.provider_cost;
        variants.push(ThrottleVariant {
            target,
            t_hat,
            equilibrium,
            gain,
        });
        post_reports.push(report);
    }
    let mut best = 0;
    for k in 1..variants.len() {
        if variants[k].gain > variants[best].gain {
            best = k;
        }
    }
    let chosen = &variants[best];
    Ok(ThrottleReport {
        j_pre,
        j_post: chosen.equilibrium.outcomes.provider_cost,
        gain: chosen.gain,
        target: chosen.target,
        t_hat: chosen.t_hat,
        delta_u_post: post_reports[best].delta_u,
        variants,
    })
}

/// Quantity varied along one sweep axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepParam {
    P1,
    P2,
    T1,
    T2,
    C1,
    C2,
    Value,
    Penalty,
    /// Net value of model 1, realized through `t1 = V p1 - xi1`.
    Xi1,
    /// Net value of model 2, realized through `t2 = V p2 - xi2`.
    Xi2,
    /// `c1/p1 - c2/p2`, realized through `c2 = p2 (c1/p1 - gap)`.
    CopGap,
}

impl SweepParam {
    fn is_composite(self) -> bool {
        matches!(self, SweepParam::Xi1 | SweepParam::Xi2 | SweepParam::CopGap)
    }

    fn apply(self, doc: &mut ConfigDocument, x: f64) {
        match self {
            SweepParam::P1 => doc.p1 = x,
            SweepParam::P2 => doc.p2 = x,
            SweepParam::T1 => doc.t1 = x,
            SweepParam::T2 => doc.t2 = x,
            SweepParam::C1 => doc.c1 = x,
            SweepParam::C2 => doc.c2 = x,
            SweepParam::Value => doc.v = x,
            SweepParam::Penalty => doc.penalty = x,
            SweepParam::Xi1 => doc.t1 = doc.v * doc.p1 - x,
            SweepParam::Xi2 => doc.t2 = doc.v * doc.p2 - x,
            SweepParam::CopGap => doc.c2 = doc.p2 * (doc.c1 / doc.p1 - x),
        }
    }
}

impl FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "p1" => SweepParam::P1,
            "p2" => SweepParam::P2,
            "t1" => SweepParam::T1,
            "t2" => SweepParam::T2,
            "c1" => SweepParam::C1,
            "c2" => SweepParam::C2,
            "V" => SweepParam::Value,
            "P" => SweepParam::Penalty,
            "xi1" => SweepParam::Xi1,
            "xi2" => SweepParam::Xi2,
            "cop_gap" => SweepParam::CopGap,
            other => {
                return Err(format!(
                    "unknown sweep parameter {other:?}; expected one of p1,p2,t1,t2,c1,c2,V,P,xi1,xi2,cop_gap"
                ))
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub param: SweepParam,
    pub lo: f64,
    pub hi: f64,
}

impl FromStr for Axis {
    type Err = String;

    /// Parses `name:lo:hi`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [name, lo, hi] = parts[..] else {
            return Err(format!("axis {s:?} must have the form name:lo:hi"));
        };
        let num = |x: &str| {
            x.parse::<f64>()
                .map_err(|e| format!("axis {s:?}: bad bound {x:?}: {e}"))
        };
        let (lo, hi) = (num(lo)?, num(hi)?);
        if !lo.is_finite() || !hi.is_finite() {
            return Err(format!("axis {s:?}: bounds must be finite"));
        }
        Ok(Axis {
            param: name.parse()?,
            lo,
            hi,
        })
    }
}

/// Whether each sweep cell reports the equilibrium or a fixed provider policy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SweepMode {
    Equilibrium,
    FixedPolicy(ProviderPolicy),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub regime: Regime,
    pub policy: ProviderPolicy,
    pub q: UserResponse,
    pub success: f64,
    pub utility: f64,
    pub provider_cost: f64,
    /// User-optimal utility minus the utility of the reported policy.
    pub delta_u: f64,
    /// Gain of throttling both models.
    pub throttle_gain: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub a1: f64,
    pub a2: f64,
    /// `None` when the axis values produce an invalid config.
    pub result: Option<CellResult>,
}

/// Evaluates the game on an `n1 x n2` grid, row-major with axis 1 outer.
///
/// Raw parameters are set first, then composite ones, so composites see the
/// cell's own `V`, `p` and `c1`.
pub fn sweep(
    template: &GameConfig,
    axis1: Axis,
    axis2: Axis,
    resolution: (usize, usize),
    mode: SweepMode,
    epsilon: f64,
) -> Result<Vec<SweepCell>, GameError> {
    let (n1, n2) = resolution;
    if n1 == 0 || n2 == 0 {
        return Err(GameError::EmptySweep);
    }
    let xs = linspace(axis1.lo, axis1.hi, n1);
    let ys = linspace(axis2.lo, axis2.hi, n2);
    let points: Vec<(f64, f64)> = xs
        .iter()
        .flat_map(|&a| ys.iter().map(move |&b| (a, b)))
        .collect();

    let cells: Vec<SweepCell> = points
        .par_iter()
        .map(|&(a1, a2)| {
            let mut doc = template.to_document();
            let mut assignments = [(axis1.param, a1), (axis2.param, a2)];
            assignments.sort_by_key(|(p, _)| p.is_composite());
            for (p, x) in assignments {
                p.apply(&mut doc, x);
            }
            let result = match GameConfig::try_from(doc) {
                Ok(cfg) => Some(evaluate_cell(&cfg, mode, epsilon)?),
                Err(_) => None,
            };
            Ok(SweepCell { a1, a2, result })
        })
        .collect::<Result<_, GameError>>()?;

    if cells.iter().all(|c| c.result.is_none()) {
        return Err(GameError::EmptySweep);
    }
    Ok(cells)
}

fn evaluate_cell(cfg: &GameConfig, mode: SweepMode, epsilon: f64) -> Result<CellResult, GameError> {
    let regime = net_values(cfg).regime;
    let throttle_gain = throttle_analysis(cfg, epsilon)?
        .variant(ThrottleTarget::Both)
        .gain;
    match mode {
        SweepMode::Equilibrium => {
            let report = misalignment_gap(cfg)?;
            let eq = &report.provider_opt;
            Ok(CellResult {
                regime,
                policy: eq.policy,
                q: eq.q_star,
                success: eq.outcomes.success,
                utility: eq.outcomes.utility,
                provider_cost: eq.outcomes.provider_cost,
                delta_u: report.delta_u,
                throttle_gain,
            })
        }
        SweepMode::FixedPolicy(policy) => {
            let policy = policy.canonical();
            let q = user_best_response(cfg, policy)?.q_star;
            let o = expected_outcomes(cfg, policy, q);
            Ok(CellResult {
                regime,
                policy,
                q,
                success: o.success,
                utility: o.utility,
                provider_cost: o.provider_cost,
                delta_u: user_optimal_route(cfg)?.utility - o.utility,
                throttle_gain,
            })
        }
    }
}

pub const CSV_HEADER: &str =
    "a1,a2,regime,i_star,s_star,q_star,S,U,J,delta_U,throttle_gain,feasible";

/// Float rendering shared by every emitted record: 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(cells: &[SweepCell], mut out: W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for cell in cells {
        let (a1, a2) = (fmt_float(cell.a1), fmt_float(cell.a2));
        match &cell.result {
            None => writeln!(out, "{a1},{a2},,,,,,,,,,false")?,
            Some(r) => writeln!(
                out,
                "{a1},{a2},{},{},{},{},{},{},{},{},{},true",
                r.regime,
                r.policy.route,
                fmt_float(r.policy.cascade),
                fmt_float(r.q.q()),
                fmt_float(r.success),
                fmt_float(r.utility),
                fmt_float(r.provider_cost),
                fmt_float(r.delta_u),
                fmt_float(r.throttle_gain),
            )?,
        }
    }
    Ok(())
}
