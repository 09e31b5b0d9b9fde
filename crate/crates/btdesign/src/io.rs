//! Design files, scan specifications and β parsing.

use std::collections::BTreeMap;
use std::path::Path;

use btdesign_core::{Design, Pair, Parameters};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Allowed deviation of file weights from a unit sum before normalizing.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-6;

/// Largest number of grid axes in a [`ScanSpec`].
pub const MAX_AXES: usize = 3;

/// Parses `m − 1` comma-separated values.
pub fn parse_beta(text: &str, m: usize) -> Result<Parameters> {
    if m < 2 {
        return Err(CliError::Usage(format!("m must be at least 2, got {m}")));
    }
    let beta = parse_list(text)?;
    if beta.len() != m - 1 {
        return Err(CliError::Usage(format!("expected {} β values for m = {m}, got {}", m - 1, beta.len())));
    }
    Parameters::new(beta).map_err(|e| CliError::Usage(e.to_string()))
}

pub fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| CliError::Parse(format!("not a finite number: {t:?}")))
        })
        .collect()
}

/// `{ "m": 4, "weights": { "1-2": 0.5, ... } }`; other fields are ignored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignFile {
    pub m: usize,
    pub weights: BTreeMap<String, f64>,
}

impl DesignFile {
    pub fn from_design(design: &Design) -> DesignFile {
        DesignFile { m: design.m(), weights: weight_map(design) }
    }

    pub fn parse(text: &str) -> Result<DesignFile> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(format!("design file: {e}")))
    }

    pub fn read(path: &Path) -> Result<DesignFile> {
        DesignFile::parse(&std::fs::read_to_string(path)?)
    }

    /// Validates keys and the weight sum, then normalizes.
    pub fn to_design(&self) -> Result<Design> {
        let m = self.m;
        if m < 2 {
            return Err(CliError::Parse(format!("m must be at least 2, got {m}")));
        }
        let mut entries = Vec::with_capacity(self.weights.len());
        let mut seen = Vec::new();
        for (key, w) in &self.weights {
            let pair = parse_pair_key(key, m)?;
            if seen.contains(&pair) {
                return Err(CliError::Parse(format!("pair {pair} listed twice")));
            }
            seen.push(pair);
            if !(w.is_finite() && *w >= 0.0) {
                return Err(CliError::Parse(format!("weight of {key} must be finite and nonnegative")));
            }
            entries.push((pair, *w));
        }
        let sum: f64 = entries.iter().map(|(_, w)| w).sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(CliError::Parse(format!("weights sum to {sum}, not 1")));
        }
        Design::from_pairs(m, entries).map_err(|e| CliError::Parse(e.to_string()))
    }
}

fn parse_pair_key(key: &str, m: usize) -> Result<Pair> {
    let bad = || CliError::Parse(format!("bad pair key {key:?}; expected \"i-j\" with 1 ≤ i < j ≤ {m}"));
    let (a, b) = key.split_once('-').ok_or_else(bad)?;
    let (i, j) = (a.trim().parse::<usize>().map_err(|_| bad())?, b.trim().parse::<usize>().map_err(|_| bad())?);
    if i >= j {
        return Err(bad());
    }
    Pair::checked(i, j, m).map_err(|_| bad())
}

/// Nonzero weights keyed by `"i-j"`.
pub fn weight_map(design: &Design) -> BTreeMap<String, f64> {
    design.iter().filter(|(_, w)| *w > 0.0).map(|(p, w)| (p.to_string(), w)).collect()
}

/// A grid axis: `β += t·direction` for `steps` values of `t` in `[min, max]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub direction: Vec<f64>,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Axis {
    pub fn value(&self, k: usize) -> f64 {
        self.min + (self.max - self.min) * k as f64 / (self.steps - 1) as f64
    }
}

/// A grid of β points: `fixed + Σ t_a · direction_a`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanSpec {
    pub m: usize,
    /// Base point; zeros when absent.
    #[serde(default)]
    pub fixed: Option<Vec<f64>>,
    pub axes: Vec<Axis>,
}

impl ScanSpec {
    /// Coordinate axes over `[min, max]^(m−1)`.
    pub fn cube(m: usize, min: f64, max: f64, steps: usize) -> ScanSpec {
        let axes = (0..m - 1)
            .map(|k| {
                let mut direction = vec![0.0; m - 1];
                direction[k] = 1.0;
                Axis { direction, min, max, steps }
            })
            .collect();
        ScanSpec { m, fixed: None, axes }
    }

    pub fn parse(text: &str) -> Result<ScanSpec> {
        let spec: ScanSpec = serde_json::from_str(text).map_err(|e| CliError::Parse(format!("scan spec: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn read(path: &Path) -> Result<ScanSpec> {
        ScanSpec::parse(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(CliError::Parse(format!("scan spec: {msg}")));
        if self.m != 4 {
            return bad(format!("grid scans classify four alternatives, got m = {}", self.m));
        }
        let n = self.m - 1;
        if self.axes.is_empty() || self.axes.len() > MAX_AXES {
            return bad(format!("between 1 and {MAX_AXES} axes required"));
        }
        if let Some(f) = &self.fixed {
            if f.len() != n || f.iter().any(|x| !x.is_finite()) {
                return bad(format!("fixed needs {n} finite values"));
            }
        }
        for (k, a) in self.axes.iter().enumerate() {
            if a.direction.len() != n || a.direction.iter().any(|x| !x.is_finite()) {
                return bad(format!("axis {k}: direction needs {n} finite values"));
            }
            if a.steps < 2 {
                return bad(format!("axis {k}: at least two steps required"));
            }
            if !(a.min.is_finite() && a.max.is_finite()) {
                return bad(format!("axis {k}: range must be finite"));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.steps).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid indices of the `n`-th point, last axis fastest.
    pub fn indices(&self, mut n: usize) -> Vec<usize> {
        let mut idx = vec![0; self.axes.len()];
        for (k, a) in self.axes.iter().enumerate().rev() {
            idx[k] = n % a.steps;
            n /= a.steps;
        }
        idx
    }

    pub fn beta(&self, indices: &[usize]) -> Vec<f64> {
        let mut beta = self.fixed.clone().unwrap_or_else(|| vec![0.0; self.m - 1]);
        for (a, k) in self.axes.iter().zip(indices) {
            let t = a.value(*k);
            for (b, d) in beta.iter_mut().zip(&a.direction) {
                *b += t * d;
            }
        }
        beta
    }
}
