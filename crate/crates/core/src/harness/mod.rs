//! Experiments, certificate files and the reproduction registry.
//!
//! Seeds: an experiment with base seed `s` draws its `t`-th random object
//! from `s.wrapping_add(t)` (see [`trial_seed`]), so every trial is
//! reproducible on its own.

mod cert;
mod oracle;
mod reproduce;

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::coloring::{random_coloring, Color};
use crate::copies::find_mono_copy;
use crate::error::{Error, Result};

pub use cert::{
    read_cert_file, verify_cert, verify_cert_file, write_cert_file, CertCheck, CertFile,
};
pub use oracle::naive_mono_copy;
pub use reproduce::{
    lemma1_instance, registry, reproduce, reproduce_many, CheckInfo, ReproduceContext,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Base seed used when none is given.
pub const DEFAULT_SEED: u64 = 0;

pub const MAX_MC_WIDTH: u32 = 10;
pub const MAX_MC_DIM: u32 = 3;

/// Seed of trial `t` in an experiment seeded with `seed`.
pub fn trial_seed(seed: u64, t: u64) -> u64 {
    seed.wrapping_add(t)
}

/// Monte Carlo estimate with a 95% Wilson score interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub hits: u64,
    pub trials: u64,
    pub frequency: f64,
    pub lo: f64,
    pub hi: f64,
}

impl McEstimate {
    pub fn from_counts(hits: u64, trials: u64) -> Self {
        let (lo, hi) = wilson(hits, trials);
        McEstimate {
            hits,
            trials,
            frequency: hits as f64 / trials as f64,
            lo,
            hi,
        }
    }

    pub fn half_width(&self) -> f64 {
        (self.hi - self.lo) / 2.0
    }

    pub fn covers(&self, p: f64) -> bool {
        self.lo <= p && p <= self.hi
    }
}

const Z95: f64 = 1.959_963_984_540_054;

fn wilson(hits: u64, trials: u64) -> (f64, f64) {
    let n = trials as f64;
    let p = hits as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let spread = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if hits == 0 { 0.0 } else { (centre - spread).max(0.0) };
    let hi = if hits == trials { 1.0 } else { (centre + spread).min(1.0) };
    (lo, hi)
}

/// Fraction of random colorings of `Q_N` holding a red or a blue `Q_n`.
pub fn mc_mono_frequency(n: u32, ground: u32, trials: u64, seed: u64) -> Result<McEstimate> {
    if trials == 0 {
        return Err(Error::arg("at least one trial is required"));
    }
    if ground > MAX_MC_WIDTH || n > MAX_MC_DIM {
        return Err(Error::resource(
            format!("Monte Carlo is capped at N ≤ {MAX_MC_WIDTH}, n ≤ {MAX_MC_DIM}"),
            0,
        ));
    }
    if n > ground {
        return Ok(McEstimate::from_counts(0, trials));
    }
    let mut hits = 0;
    for t in 0..trials {
        let c = random_coloring(ground, trial_seed(seed, t))?;
        if find_mono_copy(&c, n, Color::Red)?.is_some() || find_mono_copy(&c, n, Color::Blue)?.is_some() {
            hits += 1;
        }
    }
    Ok(McEstimate::from_counts(hits, trials))
}

/// Logarithm base for `3 n log n`, which the source statement leaves open.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LogBase {
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "e")]
    E,
}

impl std::str::FromStr for LogBase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "2" => Ok(LogBase::Two),
            "e" => Ok(LogBase::E),
            _ => Err(Error::arg(format!("log base must be 2 or e, got {s:?}"))),
        }
    }
}

/// `ceil(3 n log n)`.
pub fn default_ground(n: u32, base: LogBase) -> Result<u32> {
    if n < 2 {
        return Err(Error::domain(format!("3n log n needs n ≥ 2, got {n}")));
    }
    if base == LogBase::Two && n.is_power_of_two() {
        return Ok(3 * n * n.trailing_zeros());
    }
    let log = match base {
        LogBase::Two => (n as f64).log2(),
        LogBase::E => (n as f64).ln(),
    };
    // Irrational away from powers of two, so the float ceiling is safe.
    Ok((3.0 * n as f64 * log).ceil() as u32)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub pass: bool,
    pub tag: String,
    #[serde(default)]
    pub counts: BTreeMap<String, u64>,
    #[serde(default)]
    pub frequencies: BTreeMap<String, f64>,
    #[serde(default)]
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub outcome: Outcome,
    pub artifacts: Vec<String>,
    pub seed: Option<u64>,
    pub version: String,
}

impl ExperimentReport {
    pub fn new(name: &str, seed: Option<u64>) -> Self {
        ExperimentReport {
            name: name.to_string(),
            parameters: BTreeMap::new(),
            outcome: Outcome::default(),
            artifacts: Vec::new(),
            seed,
            version: VERSION.to_string(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        let v = serde_json::to_value(value).expect("plain parameter");
        self.parameters.insert(key.to_string(), v);
        self
    }

    pub fn count(&mut self, key: &str, v: u64) -> &mut Self {
        self.outcome.counts.insert(key.to_string(), v);
        self
    }

    pub fn note(&mut self, s: impl Into<String>) -> &mut Self {
        self.outcome.notes.push(s.into());
        self
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}
