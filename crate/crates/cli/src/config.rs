//! Key-value config file; command-line flags take precedence over it.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;

/// A count written as an integer or in float notation such as `1e6`.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum Count {
    Int(u64),
    Float(f64),
}

impl Count {
    pub fn get(self) -> Result<u64> {
        match self {
            Count::Int(n) => Ok(n),
            Count::Float(x) => float_count(x),
        }
    }
}

fn float_count(x: f64) -> Result<u64> {
    if x.is_finite() && x >= 0.0 && x.fract() == 0.0 && x <= u64::MAX as f64 {
        Ok(x as u64)
    } else {
        bail!("{x} is not a whole non-negative count")
    }
}

/// clap value parser for counts.
pub fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    let x: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    float_count(x).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub distance: Option<OneOrMany<usize>>,
    pub p: Option<OneOrMany<f64>>,
    pub cycles: Option<Count>,
    pub trials: Option<Count>,
    pub mode: Option<String>,
    pub qubits: Option<u32>,
    pub q: Option<f64>,
    pub trace: Option<bool>,
    pub percentile: Option<f64>,
    pub bandwidth: Option<u32>,
    pub tradeoff: Option<Vec<f64>>,
    pub window_rounds: Option<usize>,
    pub library: Option<PathBuf>,
    pub clock_hz: Option<f64>,
    pub energy_j: Option<f64>,
    pub activity: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

pub fn check_distance(d: usize) -> Result<usize> {
    if d < 3 || d.is_multiple_of(2) {
        bail!("distance must be odd and at least 3, got {d}");
    }
    Ok(d)
}

pub fn check_probability(name: &str, p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        bail!("{name} must be in [0, 1], got {p}");
    }
    Ok(p)
}

pub fn check_percentile(p: f64) -> Result<f64> {
    if !(0.0..=100.0).contains(&p) {
        bail!("percentile must be in [0, 100], got {p}");
    }
    Ok(p)
}

pub fn check_positive(name: &str, n: u64) -> Result<u64> {
    if n == 0 {
        bail!("{name} must be at least 1");
    }
    Ok(n)
}
