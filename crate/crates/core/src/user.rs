//! User best response to a committed routing policy.
//!
//! Routing straight to model 2 leaves the user a single decision: stay iff
//! model 2 has non-negative net value. Routing to model 1 depends on the sign
//! quadrant of the two net values; only when model 1 is value-dominated and
//! model 2 latency-dominated can the best response be strictly mixed.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::GameError;
use crate::model::{
    net_values, utility, GameConfig, NetValues, ProviderPolicy, Regime, Route, UserResponse,
};
use crate::quadratic;

/// Slack allowed when a quadratic root lands just outside `[0, 1]`.
const ROOT_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ResponseKind {
    Stay,
    Abandon,
    Interior,
}

impl fmt::Display for ResponseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ResponseKind::Stay => "stay",
            ResponseKind::Abandon => "abandon",
            ResponseKind::Interior => "interior",
        })
    }
}

/// Cascade thresholds that shape the user response for a regime.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Minimum cascade rate at which the user stays (model 1 latency-dominated).
    pub s0: Option<f64>,
    /// Largest cascade rate at which the user always stays (model 2 latency-dominated).
    pub s_low: Option<f64>,
    /// Smallest cascade rate at which the user always abandons (model 2 latency-dominated).
    pub s_high: Option<f64>,
}

impl Thresholds {
    pub fn for_config(cfg: &GameConfig) -> Result<Self, GameError> {
        let nv = net_values(cfg);
        Ok(match nv.regime {
            Regime::NegPos => Thresholds {
                s0: Some(threshold_s0(cfg)?),
                ..Default::default()
            },
            Regime::PosNeg => Thresholds {
                s0: None,
                s_low: Some(threshold_s_low(cfg)?),
                s_high: Some(threshold_s_high(cfg)?),
            },
            _ => Thresholds::default(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BestResponse {
    pub q_star: UserResponse,
    pub kind: ResponseKind,
    pub regime: Regime,
    pub thresholds: Thresholds,
}

/// `F(s, q) = a q^2 + b q + c0` for a fixed cascade rate `s`.
///
/// `F` is a positive multiple of `-dU_1/dq`, so the interior best response is
/// the root of `F` in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticF {
    pub a: f64,
    pub b: f64,
    pub c0: f64,
}

impl QuadraticF {
    pub fn new(cfg: &GameConfig, s: f64) -> Self {
        let NetValues { xi1, xi2, .. } = net_values(cfg);
        let (p1, p2) = (cfg.m1().p, cfg.m2().p);
        let k = (1.0 - p1) * (1.0 - p2);
        let r = 1.0 - s;
        QuadraticF {
            a: r * (1.0 - p2) * (xi1 * (1.0 - p2) - xi2 * s * (1.0 - p1)),
            b: 2.0 * r * (1.0 - p2) * (xi1 * p2 + xi2 * s * (1.0 - p1)),
            c0: xi1 * r * p2 * p2 + xi2 * s * (1.0 - k * r),
        }
    }

    pub fn eval(&self, q: f64) -> f64 {
        quadratic::eval(self.a, self.b, self.c0, q)
    }
}

/// `F(s, q)` evaluated directly from its defining product form.
pub fn f_direct(cfg: &GameConfig, s: f64, q: f64) -> f64 {
    let NetValues { xi1, xi2, .. } = net_values(cfg);
    let (p1, p2) = (cfg.m1().p, cfg.m2().p);
    let m = p2 + (1.0 - p2) * q;
    xi1 * (1.0 - s) * m * m
        + xi2 * s * (1.0 - (1.0 - p1) * (1.0 - p2) * (1.0 - s) * (1.0 - q) * (1.0 - q))
}

fn require(cfg: &GameConfig, expected: Regime) -> Result<NetValues, GameError> {
    let nv = net_values(cfg);
    if nv.regime != expected {
        return Err(GameError::RegimeMismatch {
            expected,
            actual: nv.regime,
        });
    }
    Ok(nv)
}

/// Cascade rate above which the user stays on model 1 when only model 2 is
/// value-dominated: `-xi1 / (xi2/p2 - xi1)`.
pub fn threshold_s0(cfg: &GameConfig) -> Result<f64, GameError> {
    let nv = require(cfg, Regime::NegPos)?;
    Ok(-nv.xi1 / (nv.xi2 / cfg.m2().p - nv.xi1))
}

/// Cascade rate at which the worst-case utility `xi1 (1-s) + xi2 s` vanishes:
/// `xi1 / (xi1 - xi2)`.
pub fn threshold_s_high(cfg: &GameConfig) -> Result<f64, GameError> {
    let nv = require(cfg, Regime::PosNeg)?;
    Ok(nv.xi1 / (nv.xi1 - nv.xi2))
}

/// Root of `F(s, 0) = 0` in `[0, 1]`.
///
/// `F(s, 0) = xi2 k s^2 + (xi2 (1-k) - xi1 p2^2) s + xi1 p2^2` with
/// `k = (1-p1)(1-p2)`. It is concave, non-negative at 0 and equal to `xi2 < 0`
/// at 1, so exactly one root lies in the interval.
pub fn threshold_s_low(cfg: &GameConfig) -> Result<f64, GameError> {
    let NetValues { xi1, xi2, .. } = require(cfg, Regime::PosNeg)?;
    let (p1, p2) = (cfg.m1().p, cfg.m2().p);
    let k = (1.0 - p1) * (1.0 - p2);
    let (a, b, c) = (xi2 * k, xi2 * (1.0 - k) - xi1 * p2 * p2, xi1 * p2 * p2);
    if !(c >= 0.0 && a + b + c < 0.0) {
        return Err(GameError::Internal(format!(
            "F(., 0) has no sign change on [0, 1] for {:?}",
            cfg.to_document()
        )));
    }
    quadratic::real_roots(a, b, c)
        .into_iter()
        .find(|r| (-ROOT_SLACK..=1.0 + ROOT_SLACK).contains(r))
        .map(|r| r.clamp(0.0, 1.0))
        .ok_or_else(|| {
            GameError::Internal(format!(
                "no root of F(., 0) in [0, 1] for {:?}",
                cfg.to_document()
            ))
        })
}

/// Interior abandonment rate for `s` strictly between the two thresholds.
pub fn q_dagger(cfg: &GameConfig, s: f64) -> Result<f64, GameError> {
    require(cfg, Regime::PosNeg)?;
    let lower = threshold_s_low(cfg)?;
    let upper = threshold_s_high(cfg)?;
    if s <= lower {
        return Err(GameError::OutsideInteriorBand {
            s,
            lower,
            upper,
            applies: "stay (q = 0)",
        });
    }
    if s >= upper {
        return Err(GameError::OutsideInteriorBand {
            s,
            lower,
            upper,
            applies: "abandon (q = 1)",
        });
    }
    interior_root(cfg, s)
}

fn interior_root(cfg: &GameConfig, s: f64) -> Result<f64, GameError> {
    let f = QuadraticF::new(cfg, s);
    let pol = ProviderPolicy::model1(s);
    quadratic::real_roots(f.a, f.b, f.c0)
        .into_iter()
        .filter(|r| (-ROOT_SLACK..=1.0 + ROOT_SLACK).contains(r))
        .map(|r| r.clamp(0.0, 1.0))
        .map(|r| (r, utility(cfg, pol, r)))
        .max_by(|x, y| x.1.total_cmp(&y.1))
        .map(|(r, _)| r)
        .ok_or_else(|| {
            GameError::Internal(format!(
                "no root of F({s}, .) in [0, 1] for {:?}",
                cfg.to_document()
            ))
        })
}

/// Utility-maximizing abandonment rate given the provider policy.
///
/// Ties at a zero net value resolve to staying; the case split is closed at
/// both `s_low` and `s_high` and the user stays at exactly `s = s0`.
pub fn user_best_response(
    cfg: &GameConfig,
    pol: ProviderPolicy,
) -> Result<BestResponse, GameError> {
    let nv = net_values(cfg);
    let thresholds = Thresholds::for_config(cfg)?;
    let q = match pol.route {
        Route::Model2 => indicator(nv.xi2 < 0.0),
        Route::Model1 => {
            let s = pol.cascade;
            match nv.regime {
                Regime::BothPositive => 0.0,
                Regime::BothNegative => 1.0,
                Regime::NegPos => indicator(s < thresholds.s0.expect("s0 set for NegPos")),
                Regime::PosNeg => {
                    let lo = thresholds.s_low.expect("s_low set for PosNeg");
                    let hi = thresholds.s_high.expect("s_high set for PosNeg");
                    if s <= lo {
                        0.0
                    } else if s >= hi {
                        1.0
                    } else {
                        interior_root(cfg, s)?
                    }
                }
            }
        }
    };
    let kind = if q == 0.0 {
        ResponseKind::Stay
    } else if q == 1.0 {
        ResponseKind::Abandon
    } else {
        ResponseKind::Interior
    };
    Ok(BestResponse {
        q_star: UserResponse::new(q)?,
        kind,
        regime: nv.regime,
        thresholds,
    })
}

fn indicator(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// Upper utility envelope for model-1 routing, obtained by bounding the
/// model-2 visit count by `1/p2`.
pub fn envelope_upper(cfg: &GameConfig, s: f64, alpha: f64) -> f64 {
    let nv = net_values(cfg);
    (nv.xi1 + nv.xi2 * alpha * s / cfg.m2().p) / (1.0 - alpha * (1.0 - s))
}

/// Lower utility envelope for model-1 routing (model-2 visit count bounded by 1).
pub fn envelope_lower(cfg: &GameConfig, s: f64, alpha: f64) -> f64 {
    let nv = net_values(cfg);
    (nv.xi1 + nv.xi2 * alpha * s) / (1.0 - alpha * (1.0 - s))
}
