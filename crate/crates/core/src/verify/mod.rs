//! Batch verification: every identity the crate implements, run as a named
//! check with a residual and a tolerance, collected into a JSON report.
//!
//! A run is a pure function of its [`Config`]. Each suite draws from its own
//! [`RngStream`] id, so suites can run in parallel and the report (minus the
//! `wall_time` block) is bit-identical between runs.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::RngStream;

mod plot;
mod suites;

pub use plot::{explore_nu, plot_data, write_plot_csv, NuReport, PlotPoint};

pub const SCHEMA: &str = "skewharmonic-report/1";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Default tolerances, addressable as `tol.<name>` in a config file.
pub const DEFAULT_TOLERANCES: &[(&str, f64)] = &[
    ("pfaffian", 1e-9),
    ("matching", 1e-12),
    ("canonical", 1e-10),
    ("factorization", 1e-11),
    ("parseval", 1e-6),
    ("covariance", 1e-5),
    ("q_kernel", 1e-9),
    ("orbit", 1e-9),
    ("witness", 1e-12),
    ("zeta_q1", 1e-8),
    ("zeta_gauss", 1e-8),
    ("mc_sigmas", 3.0),
    ("mc_rel_stderr", 0.02),
    ("f_mu", 1e-6),
    ("pi_sharp", 1e-6),
    ("split", 1e-12),
    ("lambda_unitary", 1e-8),
    ("lambda_hom", 1e-6),
    ("metaplectic", 1e-5),
    ("parity", 1e-6),
    ("trace_spread", 1e-3),
    ("hs_agreement", 1e-5),
    ("schur_ratio", 100.0),
    ("schur_identity", 1e-12),
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Config {
    /// Restricts the parameterized suites to one `p`; `None` runs the full sets.
    pub p: Option<usize>,
    /// Restricts the zeta suite to one `q`. The representation suite always runs at `q = 2`.
    pub q: Option<usize>,
    /// Random trials per size in the skew suite.
    pub trials: usize,
    pub seed: u64,
    /// Grid for the `q = 1` zeta checks and the `q = 2` operators.
    pub grid_n: usize,
    pub grid_l: f64,
    pub mc_samples: usize,
    /// Replaces the default list of `s` values in the zeta suite.
    pub s: Option<f64>,
    pub tol: BTreeMap<String, f64>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            p: None,
            q: None,
            trials: 200,
            seed: 42,
            grid_n: 256,
            grid_l: 8.0,
            mc_samples: 1_000_000,
            s: None,
            tol: DEFAULT_TOLERANCES.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Config(format!("bad value {value:?} for {key}")))
}

impl Config {
    /// Sets one key. Keys are `p`, `q`, `trials`, `seed`, `grid.N`, `grid.L`,
    /// `mc.samples`, `s` and `tol.<name>`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "p" => self.p = Some(parse(key, value)?),
            "q" => self.q = Some(parse(key, value)?),
            "trials" => self.trials = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "grid.N" => self.grid_n = parse(key, value)?,
            "grid.L" => self.grid_l = parse(key, value)?,
            "mc.samples" => self.mc_samples = parse::<f64>(key, value)? as usize,
            "s" => self.s = Some(parse(key, value)?),
            k => {
                let name = k.strip_prefix("tol.").filter(|n| self.tol.contains_key(*n));
                let Some(name) = name else {
                    return Err(Error::Config(format!("unknown key {k:?}")));
                };
                let v: f64 = parse(key, value)?;
                if !(v >= 0.0) {
                    return Err(Error::Config(format!("tolerance {k} = {v} must be non-negative")));
                }
                self.tol.insert(name.to_string(), v);
            }
        }
        Ok(())
    }

    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    /// `KEY=VAL`, as given to `--tol-override`; the `tol.` prefix is optional.
    pub fn override_tolerance(&mut self, spec: &str) -> Result<()> {
        let (k, v) = spec.split_once('=').ok_or_else(|| Error::Config(format!("expected KEY=VAL, got {spec:?}")))?;
        let k = k.trim();
        let key = if k.starts_with("tol.") { k.to_string() } else { format!("tol.{k}") };
        self.set(&key, v)
    }

    pub fn tol(&self, name: &str) -> f64 {
        self.tol[name]
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 || self.mc_samples == 0 {
            return Err(Error::Config("trials and mc.samples must be positive".into()));
        }
        if let Some(p) = self.p {
            if p == 0 || p > 9 {
                return Err(Error::Config(format!("p = {p} outside 1..=9")));
            }
        }
        if let Some(q) = self.q {
            if !(1..=2).contains(&q) {
                return Err(Error::Config(format!("q = {q}: the zeta suite runs at q = 1 or 2")));
            }
        }
        crate::numerics::Axis::new(self.grid_n, self.grid_l).map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Skew,
    Lie,
    Nil,
    Orbit,
    Zeta,
    Rep,
    All,
}

impl Suite {
    pub const EACH: [Suite; 6] = [Suite::Skew, Suite::Lie, Suite::Nil, Suite::Orbit, Suite::Zeta, Suite::Rep];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Skew => "skew",
            Suite::Lie => "lie",
            Suite::Nil => "nil",
            Suite::Orbit => "orbit",
            Suite::Zeta => "zeta",
            Suite::Rep => "rep",
            Suite::All => "all",
        }
    }

    fn stream(&self) -> u64 {
        Suite::EACH.iter().position(|s| s == self).map_or(0, |i| i as u64 + 1)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .iter()
            .chain([Suite::All].iter())
            .find(|x| x.name() == s)
            .copied()
            .ok_or_else(|| Error::Config(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    /// The identity under test, written out.
    pub anchor: String,
    pub param: String,
    /// Per-sample residuals when there are few; `residual` is their maximum.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub residuals: Vec<f64>,
    pub residual: f64,
    pub tolerance: f64,
    pub stderr: Option<f64>,
    pub seed: Option<u64>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckRecord {
    pub fn new(name: &str, anchor: &str, param: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        CheckRecord {
            name: name.into(),
            anchor: anchor.into(),
            param: param.into(),
            residuals: Vec::new(),
            residual,
            tolerance,
            stderr: None,
            seed: None,
            pass: residual <= tolerance,
            note: None,
        }
    }

    /// Maximum of `residuals`, kept in the record when there are at most 32.
    pub fn worst(name: &str, anchor: &str, param: impl Into<String>, residuals: Vec<f64>, tolerance: f64) -> Self {
        let worst = residuals.iter().copied().fold(0.0, |a: f64, b| if a.is_nan() || b.is_nan() { f64::NAN } else { a.max(b) });
        let mut r = CheckRecord::new(name, anchor, param, worst, tolerance);
        if residuals.len() <= 32 {
            r.residuals = residuals;
        }
        r
    }

    /// Monte Carlo check: passes when `residual <= sigmas * stderr`.
    pub fn monte_carlo(name: &str, anchor: &str, param: impl Into<String>, residual: f64, stderr: f64, sigmas: f64, seed: u64) -> Self {
        let mut r = CheckRecord::new(name, anchor, param, residual, sigmas * stderr);
        r.stderr = Some(stderr);
        r.seed = Some(seed);
        r
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    fn failed(name: &str, err: &Error) -> Self {
        let mut r = CheckRecord::new(name, "suite ran to completion", "", f64::INFINITY, 0.0);
        r.note = Some(err.to_string());
        r
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WallTime {
    pub total_s: f64,
    pub suites: Vec<(String, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub schema: String,
    pub tool_version: String,
    pub suite: Suite,
    pub config: Config,
    pub rng: String,
    pub checks: Vec<CheckRecord>,
    pub pass: bool,
    pub wall_time: WallTime,
}

impl VerificationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// The report without `wall_time`, the only field that varies between runs.
    pub fn deterministic_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        v.as_object_mut().expect("report is an object").remove("wall_time");
        serde_json::to_string_pretty(&v).expect("value serializes")
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.pass)
    }

    /// One row per check under the header `check,param,residual,tolerance,stderr`.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        #[derive(Serialize)]
        struct Row<'a> {
            check: &'a str,
            param: &'a str,
            residual: f64,
            tolerance: f64,
            stderr: Option<f64>,
        }
        let mut w = csv::Writer::from_writer(out);
        for c in &self.checks {
            let row = Row { check: &c.name, param: &c.param, residual: c.residual, tolerance: c.tolerance, stderr: c.stderr };
            w.serialize(row).map_err(|e| Error::Config(format!("csv: {e}")))?;
        }
        w.flush().map_err(|e| Error::Config(format!("csv: {e}")))?;
        Ok(())
    }
}

fn run_one(suite: Suite, cfg: &Config) -> (Vec<CheckRecord>, f64) {
    let t0 = Instant::now();
    let stream = RngStream::new(cfg.seed, suite.stream());
    let out = match suite {
        Suite::Skew => suites::skew(cfg, stream),
        Suite::Lie => suites::lie(cfg, stream),
        Suite::Nil => suites::nil(cfg, stream),
        Suite::Orbit => suites::orbit(cfg, stream),
        Suite::Zeta => suites::zeta(cfg, stream),
        Suite::Rep => suites::rep(cfg, stream),
        Suite::All => unreachable!("expanded by run"),
    };
    let checks = out.unwrap_or_else(|e| vec![CheckRecord::failed(&format!("{suite}.error"), &e)]);
    (checks, t0.elapsed().as_secs_f64())
}

/// Runs `suite` (every suite for [`Suite::All`]) under `cfg`.
///
/// A suite that errors contributes one failing record carrying the error.
/// Only an invalid configuration is returned as `Err`.
pub fn run(suite: Suite, cfg: &Config) -> Result<VerificationReport> {
    cfg.validate()?;
    let t0 = Instant::now();
    let list: Vec<Suite> = if suite == Suite::All { Suite::EACH.to_vec() } else { vec![suite] };
    let results: Vec<(Vec<CheckRecord>, f64)> = list.par_iter().map(|&s| run_one(s, cfg)).collect();
    let mut checks = Vec::new();
    let mut times = Vec::new();
    for (s, (c, t)) in list.iter().zip(results) {
        checks.extend(c);
        times.push((s.name().to_string(), t));
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(VerificationReport {
        schema: SCHEMA.into(),
        tool_version: TOOL_VERSION.into(),
        suite,
        config: cfg.clone(),
        rng: format!("ChaCha20, seed {}, one stream id per suite (skew=1 .. rep=6)", cfg.seed),
        checks,
        pass,
        wall_time: WallTime { total_s: t0.elapsed().as_secs_f64(), suites: times },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_text_and_overrides() {
        let mut c = Config::default();
        c.apply_text("# comment\np = 5\ngrid.N = 128 # trailing\ntol.parity = 1e-7\nmc.samples = 1e5\n").unwrap();
        assert_eq!((c.p, c.grid_n, c.mc_samples), (Some(5), 128, 100_000));
        assert_eq!(c.tol("parity"), 1e-7);
        c.override_tolerance("orbit=1e-8").unwrap();
        assert_eq!(c.tol("orbit"), 1e-8);
        assert!(matches!(c.set("tol.nonsense", "1"), Err(Error::Config(_))));
        assert!(matches!(c.set("colour", "1"), Err(Error::Config(_))));
        assert!(matches!(c.apply_text("p 5"), Err(Error::Config(_))));
        assert!(matches!(c.set("seed", "x"), Err(Error::Config(_))));
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::EACH.iter().chain([Suite::All].iter()) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), *s);
        }
        assert!("everything".parse::<Suite>().is_err());
    }

    #[test]
    fn records_pass_by_tolerance() {
        assert!(CheckRecord::new("a", "", "", 1.0, 1.0).pass);
        assert!(!CheckRecord::new("a", "", "", f64::NAN, 1.0).pass);
        assert!(!CheckRecord::worst("a", "", "", vec![0.0, f64::NAN, 0.1], 1.0).pass);
        let mc = CheckRecord::monte_carlo("a", "", "", 0.3, 0.1, 3.0, 1);
        assert!(mc.pass && (mc.tolerance - 0.3).abs() < 1e-15 && mc.stderr == Some(0.1));
    }
}
