//! Command-line front end. Every record is a list of `key=value` lines and
//! every float is printed with 17 significant digits.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::analysis::{
    fmt_float, misalignment_gap, sweep, throttle_analysis, write_csv, Axis, MisalignmentReport,
    SweepMode, ThrottleReport, DEFAULT_EPSILON,
};
use crate::error::{ConfigError, GameError};
use crate::model::{net_values, GameConfig, ProviderPolicy, Route};
use crate::oracle::{estimate, McEstimate, FUNCTIONAL_NAMES, MIN_EPISODES};
use crate::provider::{solve_equilibrium, Equilibrium};
use crate::user::{user_best_response, BestResponse};

#[derive(Debug, Parser)]
#[command(
    name = "routegame",
    version,
    about = "Solver for the two-model routing game"
)]
pub struct RunSpec {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Provider-optimal policy and the user's response to it.
    Solve(Common),
    /// User best response to a fixed provider policy.
    BestResponse {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        policy: PolicyArgs,
    },
    /// Evaluate the game on a two-parameter grid and emit CSV.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        axis1: Axis,
        #[arg(long)]
        axis2: Axis,
        /// Grid resolution as N1xN2.
        #[arg(long, value_parser = parse_resolution)]
        res: (usize, usize),
        /// Fix the provider route instead of solving for it.
        #[arg(long, value_parser = parse_route)]
        i: Option<Route>,
        /// Cascade rate of the fixed policy (with --i 1).
        #[arg(long)]
        s: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
    },
    /// Monte-Carlo estimate of the session functionals under a fixed policy.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        policy: PolicyArgs,
        #[arg(long, default_value_t = 200_000)]
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Gain from inflating latencies until both models are latency-dominated.
    Throttle {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
    },
    /// Utility lost by the user at the provider's optimum.
    Misalign(Common),
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON config with fields p1, p2, t1, t2, c1, c2, V, P.
    pub config: PathBuf,
    /// Output file (standard output when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PolicyArgs {
    #[arg(long, value_parser = parse_route)]
    pub i: Route,
    #[arg(long, default_value_t = 0.0)]
    pub s: f64,
}

impl PolicyArgs {
    fn policy(&self) -> Result<ProviderPolicy, ConfigError> {
        ProviderPolicy::new(self.i, self.s)
    }
}

fn parse_route(s: &str) -> Result<Route, String> {
    match s {
        "1" => Ok(Route::Model1),
        "2" => Ok(Route::Model2),
        _ => Err(format!("route must be 1 or 2, got {s:?}")),
    }
}

fn parse_resolution(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("resolution {s:?} must look like N1xN2"))?;
    let n = |x: &str| match x.parse::<usize>() {
        Ok(0) | Err(_) => Err(format!("resolution {s:?}: {x:?} is not a positive integer")),
        Ok(v) => Ok(v),
    };
    Ok((n(a)?, n(b)?))
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("cannot write output: {0}")]
    Write(#[from] io::Error),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Game(#[from] GameError),
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Game(e.into())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Write(_) => 1,
            CliError::Game(e) if !e.is_validation() => 1,
            _ => 2,
        }
    }
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let spec = match RunSpec::try_parse_from(args) {
        Ok(spec) => spec,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&spec, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(spec: &RunSpec, stdout: &mut dyn Write) -> Result<(), CliError> {
    let mut buf = Vec::new();
    let common = match &spec.command {
        Command::Solve(common) => {
            let cfg = load(common)?;
            write_equilibrium(&mut buf, &solve_equilibrium(&cfg)?)?;
            common
        }
        Command::BestResponse { common, policy } => {
            let cfg = load(common)?;
            let pol = policy.policy()?;
            write_best_response(&mut buf, pol, &user_best_response(&cfg, pol)?)?;
            common
        }
        Command::Sweep {
            common,
            axis1,
            axis2,
            res,
            i,
            s,
            epsilon,
        } => {
            let cfg = load(common)?;
            let mode = match (i, s) {
                (None, None) => SweepMode::Equilibrium,
                (None, Some(_)) => {
                    return Err(CliError::Usage("--s in a sweep requires --i".into()))
                }
                (Some(route), s) => {
                    SweepMode::FixedPolicy(ProviderPolicy::new(*route, s.unwrap_or(0.0))?)
                }
            };
            let cells = sweep(&cfg, *axis1, *axis2, *res, mode, *epsilon)?;
            write_csv(&cells, &mut buf)?;
            common
        }
        Command::Simulate {
            common,
            policy,
            n,
            seed,
        } => {
            let cfg = load(common)?;
            if *n < MIN_EPISODES {
                return Err(CliError::Usage(format!(
                    "--n = {n} violates n >= {MIN_EPISODES}"
                )));
            }
            let pol = policy.policy()?;
            let q = user_best_response(&cfg, pol)?.q_star;
            write_estimate(&mut buf, pol, q.q(), &estimate(&cfg, pol, q, *n, *seed))?;
            common
        }
        Command::Throttle { common, epsilon } => {
            let cfg = load(common)?;
            write_throttle(&mut buf, &throttle_analysis(&cfg, *epsilon)?)?;
            common
        }
        Command::Misalign(common) => {
            let cfg = load(common)?;
            let report = misalignment_gap(&cfg)?;
            writeln!(buf, "regime={}", net_values(&cfg).regime)?;
            write_misalignment(&mut buf, &report)?;
            common
        }
    };
    match &common.out {
        Some(path) => fs::write(path, &buf)?,
        None => stdout.write_all(&buf)?,
    }
    Ok(())
}

fn load(common: &Common) -> Result<GameConfig, CliError> {
    let text = fs::read_to_string(&common.config).map_err(|source| CliError::Read {
        path: common.config.clone(),
        source,
    })?;
    Ok(GameConfig::from_json(&text)?)
}

fn kv(out: &mut dyn Write, key: &str, x: f64) -> io::Result<()> {
    writeln!(out, "{key}={}", fmt_float(x))
}

fn write_equilibrium(out: &mut dyn Write, eq: &Equilibrium) -> io::Result<()> {
    writeln!(out, "i_star={}", eq.policy.route)?;
    kv(out, "s_star", eq.policy.cascade)?;
    kv(out, "q_star", eq.q_star.q())?;
    kv(out, "S", eq.outcomes.success)?;
    kv(out, "L", eq.outcomes.latency)?;
    kv(out, "C", eq.outcomes.cost)?;
    kv(out, "U", eq.outcomes.utility)?;
    kv(out, "J", eq.outcomes.provider_cost)?;
    writeln!(out, "provenance={}", eq.provenance)?;
    writeln!(out, "on_boundary={}", eq.on_boundary)?;
    kv(out, "s_admissible_lo", eq.admissible.0)?;
    kv(out, "s_admissible_hi", eq.admissible.1)
}

fn write_best_response(
    out: &mut dyn Write,
    pol: ProviderPolicy,
    br: &BestResponse,
) -> io::Result<()> {
    writeln!(out, "i={}", pol.route)?;
    kv(out, "s", pol.cascade)?;
    writeln!(out, "regime={}", br.regime)?;
    kv(out, "q_star", br.q_star.q())?;
    writeln!(out, "kind={}", br.kind)?;
    for (key, v) in [
        ("s0", br.thresholds.s0),
        ("s_low", br.thresholds.s_low),
        ("s_high", br.thresholds.s_high),
    ] {
        match v {
            Some(x) => kv(out, key, x)?,
            None => writeln!(out, "{key}=")?,
        }
    }
    Ok(())
}

fn write_estimate(
    out: &mut dyn Write,
    pol: ProviderPolicy,
    q: f64,
    est: &McEstimate,
) -> io::Result<()> {
    writeln!(out, "i={}", pol.route)?;
    kv(out, "s", pol.cascade)?;
    kv(out, "q", q)?;
    for (k, name) in FUNCTIONAL_NAMES.iter().enumerate() {
        kv(out, &format!("{name}_mean"), est.mean[k])?;
        kv(out, &format!("{name}_stderr"), est.stderr[k])?;
    }
    writeln!(out, "n={}", est.n)?;
    writeln!(out, "seed={}", est.seed)?;
    writeln!(out, "max_steps_hit={}", est.max_steps_hit)
}

fn write_throttle(out: &mut dyn Write, r: &ThrottleReport) -> io::Result<()> {
    kv(out, "J_pre", r.j_pre)?;
    kv(out, "J_post", r.j_post)?;
    kv(out, "gain", r.gain)?;
    writeln!(out, "target={}", r.target)?;
    kv(out, "t1_hat", r.t_hat.0)?;
    kv(out, "t2_hat", r.t_hat.1)?;
    kv(out, "delta_U_post", r.delta_u_post)?;
    for v in &r.variants {
        kv(out, &format!("gain_{}", v.target), v.gain)?;
    }
    Ok(())
}

fn write_misalignment(out: &mut dyn Write, r: &MisalignmentReport) -> io::Result<()> {
    kv(out, "delta_U", r.delta_u)?;
    writeln!(out, "aligned={}", r.aligned)?;
    writeln!(out, "user_i={}", r.user_opt.policy.route)?;
    kv(out, "user_s", r.user_opt.policy.cascade)?;
    kv(out, "user_U", r.user_opt.utility)?;
    writeln!(out, "provider_i={}", r.provider_opt.policy.route)?;
    kv(out, "provider_s", r.provider_opt.policy.cascade)?;
    kv(out, "provider_U", r.provider_opt.outcomes.utility)?;
    kv(out, "provider_J", r.provider_opt.outcomes.provider_cost)?;
    writeln!(out, "predicate={:?}", r.predicate.rule)?;
    writeln!(out, "predicate_holds={}", r.predicate.holds)?;
    writeln!(out, "near_boundary={}", r.predicate.near_boundary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolution_parsing() {
        assert_eq!(parse_resolution("101x51"), Ok((101, 51)));
        assert!(parse_resolution("0x3").is_err());
        assert!(parse_resolution("10").is_err());
        assert!(parse_resolution("ax3").is_err());
    }

    #[test]
    fn bad_arguments_exit_two() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run(["routegame", "solve"], &mut out, &mut err), 2);
        assert_eq!(
            run(
                ["routegame", "best-response", "x.json", "--i", "3"],
                &mut out,
                &mut err
            ),
            2
        );
        assert_eq!(
            run(
                ["routegame", "solve", "/nonexistent/cfg.json"],
                &mut out,
                &mut err
            ),
            2
        );
        assert!(String::from_utf8(err).unwrap().contains("cannot read"));
    }
}
