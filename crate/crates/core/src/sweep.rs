//! Efficiency of the uniform design along a ray `β = t·v`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::four::{classify_m4, RegionKind};
use crate::model::{Design, Parameters};
use crate::optimality::d_efficiency;
use crate::solver::{solve, SolverConfig};

/// Direction `v` of the ray `β = t·v`.
#[derive(Clone, Debug, PartialEq)]
pub struct LineSpec {
    pub direction: Vec<f64>,
}

impl Default for LineSpec {
    /// `2β₂ = β₁`, `4β₃ = 5β₁`, parametrized by `t = β₁`.
    fn default() -> Self {
        LineSpec { direction: vec![1.0, 0.5, 1.25] }
    }
}

impl LineSpec {
    pub fn new(direction: Vec<f64>) -> Result<LineSpec> {
        if direction.is_empty() {
            return Err(Error::InvalidParameters("direction must be nonempty"));
        }
        if direction.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(LineSpec { direction })
    }

    pub fn m(&self) -> usize {
        self.direction.len() + 1
    }

    pub fn at(&self, t: f64) -> Result<Parameters> {
        Parameters::new(self.direction.iter().map(|x| t * x).collect())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EfficiencyPoint {
    pub t: f64,
    pub params: Parameters,
    /// Closed-form region, for four alternatives only.
    pub kind: Option<RegionKind>,
    pub optimal: Design,
    pub support_size: usize,
    /// D-efficiency of the uniform design against `optimal`.
    pub efficiency: f64,
}

/// Optimal design at `params`: classified for `m = 4`, solved otherwise.
fn optimum(params: &Parameters, config: &SolverConfig) -> Result<(Option<RegionKind>, Design)> {
    if params.m() == 4 {
        let label = classify_m4(params)?;
        Ok((Some(label.kind), label.design))
    } else {
        let r = solve(params, config)?;
        Ok((None, r.design))
    }
}

pub fn efficiency_at(line: &LineSpec, t: f64, config: &SolverConfig) -> Result<EfficiencyPoint> {
    let params = line.at(t)?;
    let (kind, optimal) = optimum(&params, config)?;
    let uniform = Design::uniform(params.m())?;
    let efficiency = d_efficiency(&uniform, &optimal, &params)?;
    let support_size = match &kind {
        Some(k) => k.support_size(),
        None => optimal.support().len(),
    };
    Ok(EfficiencyPoint { t, params, kind, optimal, support_size, efficiency })
}

/// `steps` evenly spaced points from `start` to `end` inclusive.
pub fn efficiency_curve(line: &LineSpec, start: f64, end: f64, steps: usize, config: &SolverConfig) -> Result<Vec<EfficiencyPoint>> {
    grid(start, end, steps)?.into_iter().map(|t| efficiency_at(line, t, config)).collect()
}

fn grid(start: f64, end: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(Error::InvalidParameters("at least two steps are required"));
    }
    if !(start.is_finite() && end.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok((0..steps)
        .map(|k| start + (end - start) * k as f64 / (steps - 1) as f64)
        .collect())
}

/// A change of support size between `lower` and `upper`.
#[derive(Clone, Debug, PartialEq)]
pub struct Transition {
    pub lower: f64,
    pub upper: f64,
    pub from_size: usize,
    pub to_size: usize,
}

impl Transition {
    pub fn estimate(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }
}

/// Scans the line and bisects every support-size change down to width `tol`.
pub fn locate_transitions(
    line: &LineSpec,
    start: f64,
    end: f64,
    steps: usize,
    tol: f64,
    config: &SolverConfig,
) -> Result<Vec<Transition>> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameters("bisection tolerance must be positive"));
    }
    let size = |t: f64| efficiency_at(line, t, config).map(|p| p.support_size);
    let ts = grid(start, end, steps)?;
    let mut out = Vec::new();
    let mut prev = size(ts[0])?;
    for pair in ts.windows(2) {
        let cur = size(pair[1])?;
        if cur != prev {
            let (mut lo, mut hi) = (pair[0], pair[1]);
            while hi - lo > tol {
                let mid = 0.5 * (lo + hi);
                if size(mid)? == prev {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            out.push(Transition { lower: lo, upper: hi, from_size: prev, to_size: cur });
        }
        prev = cur;
    }
    Ok(out)
}
