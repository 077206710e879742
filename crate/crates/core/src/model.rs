//! Game parameters and the closed-form session functionals.
//!
//! A session starts at the routed model. Every pass costs the user a latency
//! `t` and the provider a compute cost `c`, and succeeds with probability `p`.
//! After a failure the user abandons with probability `q`; otherwise, if the
//! session is on model 1, it escalates to model 2 with probability `s`.
//! Success and abandonment are the two absorbing states.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

/// Per-pass parameters of one model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Success probability per pass, in (0, 1).
    pub p: f64,
    /// Latency cost per pass paid by the user.
    pub t: f64,
    /// Compute cost per pass paid by the provider.
    pub c: f64,
}

impl ModelParams {
    pub fn new(p: f64, t: f64, c: f64) -> Self {
        Self { p, t, c }
    }

    /// Expected provider spend per eventual success, `c / p`.
    pub fn cost_of_pass(&self) -> f64 {
        self.c / self.p
    }
}

/// Flat document form of a [`GameConfig`], as read from JSON.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    pub p1: f64,
    pub p2: f64,
    pub t1: f64,
    pub t2: f64,
    pub c1: f64,
    pub c2: f64,
    #[serde(rename = "V")]
    pub v: f64,
    #[serde(rename = "P")]
    pub penalty: f64,
}

/// All parameters of one game instance.
///
/// Values constructed through [`GameConfig::new`] satisfy the standing
/// ordering assumptions: model 2 is strictly more accurate, slower and more
/// expensive than model 1, and `V`, `P` are positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ConfigDocument", into = "ConfigDocument")]
pub struct GameConfig {
    m1: ModelParams,
    m2: ModelParams,
    value: f64,
    penalty: f64,
}

impl GameConfig {
    pub fn new(
        m1: ModelParams,
        m2: ModelParams,
        value: f64,
        penalty: f64,
    ) -> Result<Self, ConfigError> {
        let cfg = Self {
            m1,
            m2,
            value,
            penalty,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Copy of this game with the latencies replaced.
    ///
    /// Throttled latencies may leave `[0, 1]` and need not stay ordered, so
    /// only finiteness and non-negativity are checked. Nothing downstream of
    /// the latencies depends on their ordering.
    pub fn with_latencies(&self, t1: f64, t2: f64) -> Result<Self, ConfigError> {
        for (name, t) in [("t1", t1), ("t2", t2)] {
            if !t.is_finite() {
                return Err(ConfigError::NotFinite(name));
            }
            if t < 0.0 {
                return Err(ConfigError::OutOfRange {
                    name,
                    value: t,
                    range: "[0, inf)",
                });
            }
        }
        let mut cfg = *self;
        cfg.m1.t = t1;
        cfg.m2.t = t2;
        Ok(cfg)
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let doc: ConfigDocument =
            serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        Self::try_from(doc)
    }

    pub fn m1(&self) -> &ModelParams {
        &self.m1
    }

    pub fn m2(&self) -> &ModelParams {
        &self.m2
    }

    pub fn model(&self, route: Route) -> &ModelParams {
        match route {
            Route::Model1 => &self.m1,
            Route::Model2 => &self.m2,
        }
    }

    /// User value of a completed task, `V`.
    pub fn value(&self) -> f64 {
        self.value
    }

    /// Provider penalty for an abandoned task, `P`.
    pub fn penalty(&self) -> f64 {
        self.penalty
    }

    /// Incremental cost-of-pass `(c2 - c1) / (p2 - p1)`.
    pub fn incremental_ratio(&self) -> f64 {
        (self.m2.c - self.m1.c) / (self.m2.p - self.m1.p)
    }

    pub fn to_document(&self) -> ConfigDocument {
        ConfigDocument {
            p1: self.m1.p,
            p2: self.m2.p,
            t1: self.m1.t,
            t2: self.m2.t,
            c1: self.m1.c,
            c2: self.m2.c,
            v: self.value,
            penalty: self.penalty,
        }
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let fields = [
            ("p1", self.m1.p),
            ("p2", self.m2.p),
            ("t1", self.m1.t),
            ("t2", self.m2.t),
            ("c1", self.m1.c),
            ("c2", self.m2.c),
            ("V", self.value),
            ("P", self.penalty),
        ];
        if let Some((name, _)) = fields.iter().find(|(_, v)| !v.is_finite()) {
            return Err(ConfigError::NotFinite(name));
        }
        for (name, p) in [("p1", self.m1.p), ("p2", self.m2.p)] {
            if !(p > 0.0 && p < 1.0) {
                return Err(ConfigError::OutOfRange {
                    name,
                    value: p,
                    range: "(0, 1)",
                });
            }
        }
        for (name, x) in [
            ("t1", self.m1.t),
            ("t2", self.m2.t),
            ("c1", self.m1.c),
            ("c2", self.m2.c),
        ] {
            if !(0.0..=1.0).contains(&x) {
                return Err(ConfigError::OutOfRange {
                    name,
                    value: x,
                    range: "[0, 1]",
                });
            }
        }
        for (name, x) in [("V", self.value), ("P", self.penalty)] {
            if x <= 0.0 {
                return Err(ConfigError::OutOfRange {
                    name,
                    value: x,
                    range: "(0, inf)",
                });
            }
        }
        for (lo, hi, a, b) in [
            ("p1", "p2", self.m1.p, self.m2.p),
            ("t1", "t2", self.m1.t, self.m2.t),
            ("c1", "c2", self.m1.c, self.m2.c),
        ] {
            if a >= b {
                return Err(ConfigError::Ordering {
                    lo,
                    hi,
                    lo_value: a,
                    hi_value: b,
                });
            }
        }
        Ok(())
    }
}

impl TryFrom<ConfigDocument> for GameConfig {
    type Error = ConfigError;

    fn try_from(d: ConfigDocument) -> Result<Self, Self::Error> {
        GameConfig::new(
            ModelParams::new(d.p1, d.t1, d.c1),
            ModelParams::new(d.p2, d.t2, d.c2),
            d.v,
            d.penalty,
        )
    }
}

impl From<GameConfig> for ConfigDocument {
    fn from(cfg: GameConfig) -> Self {
        cfg.to_document()
    }
}

/// Initial model a task is routed to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Route {
    Model1,
    Model2,
}

impl Route {
    pub fn index(self) -> u8 {
        match self {
            Route::Model1 => 1,
            Route::Model2 => 2,
        }
    }

    pub fn from_index(i: u8) -> Option<Self> {
        match i {
            1 => Some(Route::Model1),
            2 => Some(Route::Model2),
            _ => None,
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// Provider routing and cascading policy `(i, s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProviderPolicy {
    pub route: Route,
    /// Probability of escalating from model 1 to model 2 after a failure.
    /// Ignored when `route` is [`Route::Model2`].
    pub cascade: f64,
}

impl ProviderPolicy {
    pub fn new(route: Route, cascade: f64) -> Result<Self, ConfigError> {
        check_probability("s", cascade)?;
        Ok(Self { route, cascade })
    }

    pub fn model1(cascade: f64) -> Self {
        debug_assert!((0.0..=1.0).contains(&cascade));
        Self {
            route: Route::Model1,
            cascade,
        }
    }

    pub fn model2() -> Self {
        Self {
            route: Route::Model2,
            cascade: 0.0,
        }
    }

    /// Same policy with the inert cascade of model 2 reset to 0.
    pub fn canonical(self) -> Self {
        match self.route {
            Route::Model1 => self,
            Route::Model2 => Self::model2(),
        }
    }
}

/// User abandonment probability `q` applied after every failed pass.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct UserResponse(f64);

impl UserResponse {
    pub const STAY: UserResponse = UserResponse(0.0);
    pub const ABANDON: UserResponse = UserResponse(1.0);

    pub fn new(q: f64) -> Result<Self, ConfigError> {
        check_probability("q", q)?;
        Ok(Self(q))
    }

    pub fn q(self) -> f64 {
        self.0
    }
}

fn check_probability(name: &'static str, x: f64) -> Result<(), ConfigError> {
    if !x.is_finite() {
        return Err(ConfigError::NotFinite(name));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(ConfigError::OutOfRange {
            name,
            value: x,
            range: "[0, 1]",
        });
    }
    Ok(())
}

/// Expected session functionals for one `(i, s, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Outcomes {
    /// Probability the session ends in success.
    pub success: f64,
    /// Expected total latency paid by the user.
    pub latency: f64,
    /// Expected total compute cost paid by the provider.
    pub cost: f64,
    /// User utility `V * S - L`.
    pub utility: f64,
    /// Provider objective `C + P * (1 - S)`.
    pub provider_cost: f64,
}

/// Sign quadrant of the per-pass net values.
///
/// A net value of exactly zero counts as value-dominated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    BothPositive,
    BothNegative,
    /// Model 1 latency-dominated, model 2 value-dominated.
    NegPos,
    /// Model 1 value-dominated, model 2 latency-dominated.
    PosNeg,
}

impl Regime {
    pub fn classify(xi1: f64, xi2: f64) -> Self {
        match (xi1 >= 0.0, xi2 >= 0.0) {
            (true, true) => Regime::BothPositive,
            (false, false) => Regime::BothNegative,
            (false, true) => Regime::NegPos,
            (true, false) => Regime::PosNeg,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Regime::BothPositive => "BothPositive",
            Regime::BothNegative => "BothNegative",
            Regime::NegPos => "NegPos",
            Regime::PosNeg => "PosNeg",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Net values per pass `xi_i = V p_i - t_i` and their regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetValues {
    pub xi1: f64,
    pub xi2: f64,
    pub regime: Regime,
}

pub fn net_values(cfg: &GameConfig) -> NetValues {
    let xi1 = cfg.value * cfg.m1.p - cfg.m1.t;
    let xi2 = cfg.value * cfg.m2.p - cfg.m2.t;
    NetValues {
        xi1,
        xi2,
        regime: Regime::classify(xi1, xi2),
    }
}

/// Probability that model 1 fails and the user stays.
pub fn stay_after_failure(cfg: &GameConfig, q: f64) -> f64 {
    (1.0 - cfg.m1.p) * (1.0 - q)
}

/// Expected number of model-2 passes for a session that starts on model 2.
pub fn model2_visits(cfg: &GameConfig, q: f64) -> f64 {
    1.0 / (cfg.m2.p + (1.0 - cfg.m2.p) * q)
}

/// Evaluates S, L, C, U and J in closed form.
pub fn expected_outcomes(cfg: &GameConfig, pol: ProviderPolicy, q: UserResponse) -> Outcomes {
    let q = q.q();
    let beta = model2_visits(cfg, q);
    let (success, latency, cost) = match pol.route {
        Route::Model2 => (beta * cfg.m2.p, beta * cfg.m2.t, beta * cfg.m2.c),
        Route::Model1 => {
            let s = pol.cascade;
            let alpha = stay_after_failure(cfg, q);
            let denom = 1.0 - alpha * (1.0 - s);
            assert!(
                denom > 0.0,
                "absorption denominator must be positive, got {denom}"
            );
            let escalate = alpha * beta * s;
            (
                (cfg.m1.p + escalate * cfg.m2.p) / denom,
                (cfg.m1.t + escalate * cfg.m2.t) / denom,
                (cfg.m1.c + escalate * cfg.m2.c) / denom,
            )
        }
    };
    Outcomes {
        success,
        latency,
        cost,
        utility: cfg.value * success - latency,
        provider_cost: cost + cfg.penalty * (1.0 - success),
    }
}

/// User utility alone; the hot path of grid searches.
pub fn utility(cfg: &GameConfig, pol: ProviderPolicy, q: f64) -> f64 {
    expected_outcomes(cfg, pol, UserResponse(q)).utility
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(p: (f64, f64), t: (f64, f64), c: (f64, f64), v: f64, pen: f64) -> GameConfig {
        GameConfig::new(
            ModelParams::new(p.0, t.0, c.0),
            ModelParams::new(p.1, t.1, c.1),
            v,
            pen,
        )
        .unwrap()
    }

    #[test]
    fn net_values_examples() {
        let g = cfg((0.5, 0.9), (0.1, 0.3), (0.1, 0.4), 1.0, 0.5);
        let nv = net_values(&g);
        // independent arithmetic
        assert!((nv.xi1 - (1.0 * 0.5 - 0.1)).abs() < 1e-15);
        assert!((nv.xi1 - 0.4).abs() < 1e-12);
        assert!((nv.xi2 - 0.6).abs() < 1e-12);
        assert_eq!(nv.regime, Regime::BothPositive);

        let g = cfg((0.5, 0.9), (0.2, 0.3), (0.1, 0.4), 0.2, 0.5);
        let nv = net_values(&g);
        assert!((nv.xi1 + 0.1).abs() < 1e-12);
        assert!((nv.xi2 + 0.12).abs() < 1e-12);
        assert_eq!(nv.regime, Regime::BothNegative);
    }

    #[test]
    fn zero_net_value_is_value_dominated() {
        let g = cfg((0.5, 0.9), (0.25, 0.5), (0.1, 0.4), 0.5, 0.5);
        let nv = net_values(&g);
        assert_eq!(nv.xi1, 0.0);
        assert_eq!(nv.regime, Regime::PosNeg);
        assert_eq!(Regime::classify(0.0, 0.0), Regime::BothPositive);
        assert_eq!(Regime::classify(-1.0, 0.0), Regime::NegPos);
    }

    #[test]
    fn full_abandonment_collapses_to_one_pass() {
        let g = cfg((0.5, 0.9), (0.1, 0.3), (0.1, 0.4), 1.0, 0.5);
        for s in [0.0, 0.3, 1.0] {
            let o = expected_outcomes(&g, ProviderPolicy::model1(s), UserResponse::ABANDON);
            assert_eq!(o.success, 0.5);
            assert_eq!(o.latency, 0.1);
            assert_eq!(o.cost, 0.1);
            assert!((o.provider_cost - (0.1 + 0.5 * 0.5)).abs() < 1e-15);
            assert!((o.utility - 0.4).abs() < 1e-15);
        }
    }

    #[test]
    fn geometric_retries_absorb_in_success() {
        let g = cfg((0.5, 0.9), (0.1, 0.3), (0.1, 0.4), 1.0, 0.5);
        let o = expected_outcomes(&g, ProviderPolicy::model1(0.0), UserResponse::STAY);
        assert!((o.success - 1.0).abs() < 1e-15);
        assert!((o.latency - 0.2).abs() < 1e-15);
        assert!((o.cost - 0.2).abs() < 1e-15);
        assert!((o.utility - 0.8).abs() < 1e-15);
        assert!((o.provider_cost - 0.2).abs() < 1e-15);

        let o = expected_outcomes(&g, ProviderPolicy::model2(), UserResponse::STAY);
        assert!((o.success - 1.0).abs() < 1e-15);
        assert!((o.latency - 0.3 / 0.9).abs() < 1e-15);
        assert!((o.cost - 0.4 / 0.9).abs() < 1e-15);
    }

    #[test]
    fn identities_hold_exactly() {
        let g = cfg((0.3, 0.7), (0.2, 0.6), (0.05, 0.5), 1.3, 0.8);
        for &(s, q) in &[(0.0, 0.0), (0.2, 0.7), (1.0, 0.5), (0.9, 0.05)] {
            for pol in [ProviderPolicy::model1(s), ProviderPolicy::model2()] {
                let o = expected_outcomes(&g, pol, UserResponse::new(q).unwrap());
                assert_eq!(o.utility, g.value() * o.success - o.latency);
                assert_eq!(o.provider_cost, o.cost + g.penalty() * (1.0 - o.success));
            }
        }
    }

    #[test]
    fn validation_names_the_invariant() {
        let m1 = ModelParams::new(0.5, 0.1, 0.1);
        let err = GameConfig::new(m1, ModelParams::new(0.5, 0.3, 0.4), 1.0, 0.5).unwrap_err();
        assert!(err.to_string().contains("p1 < p2"), "{err}");
        let err = GameConfig::new(m1, ModelParams::new(0.9, 0.3, 0.1), 1.0, 0.5).unwrap_err();
        assert!(err.to_string().contains("c1 < c2"), "{err}");
        let err = GameConfig::new(m1, ModelParams::new(0.9, 0.1, 0.4), 1.0, 0.5).unwrap_err();
        assert!(err.to_string().contains("t1 < t2"), "{err}");
        let err = GameConfig::new(m1, ModelParams::new(1.0, 0.3, 0.4), 1.0, 0.5).unwrap_err();
        assert!(err.to_string().contains("p2"), "{err}");
        let err = GameConfig::new(m1, ModelParams::new(0.9, 0.3, 0.4), 0.0, 0.5).unwrap_err();
        assert!(err.to_string().contains('V'), "{err}");
        let err = GameConfig::new(m1, ModelParams::new(0.9, 0.3, 0.4), 1.0, -1.0).unwrap_err();
        assert!(err.to_string().contains('P'), "{err}");
        assert!(UserResponse::new(1.5).is_err());
        assert!(ProviderPolicy::new(Route::Model1, -0.1).is_err());
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"p1":0.5,"p2":0.9,"t1":0.1,"t2":0.3,"c1":0.1,"c2":0.4,"V":1.0,"P":0.5}"#;
        let g = GameConfig::from_json(text).unwrap();
        assert_eq!(g.m2().c, 0.4);
        assert_eq!(g.penalty(), 0.5);
        let back: GameConfig = serde_json::from_str(&serde_json::to_string(&g).unwrap()).unwrap();
        assert_eq!(back, g);
        let bad = r#"{"p1":0.5,"p2":0.9,"t1":0.1,"t2":0.3,"c1":0.1,"c2":0.4,"V":1.0}"#;
        assert!(matches!(
            GameConfig::from_json(bad),
            Err(ConfigError::Parse(_))
        ));
    }
}
