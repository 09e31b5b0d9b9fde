//! Multiplicative-update solver for locally D-optimal designs.
//!
//! Each step multiplies `w_ij` by `d_ij/(m−1)` and renormalizes. Support
//! points that provably carry no weight at the optimum are dropped as soon
//! as a bound on the current suboptimality allows it, and tiny weights are
//! pruned periodically.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graphs::SupportGraph;
use crate::math;
use crate::model::{pair_count, pairs, Design, Pair, Parameters};
use crate::optimality::{certificate_from, kw_check_on, variances_from, KwCertificate};

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub max_iterations: usize,
    /// Absolute bound on `max d_ij − (m−1)` at termination.
    pub kw_tolerance: f64,
    pub prune_threshold: f64,
    /// Pruning period, in iterations.
    pub prune_interval: usize,
    /// Extra iterations allowed after convergence to clear weights below
    /// [`SolverConfig::polish_threshold`].
    pub polish_iterations: usize,
    pub polish_threshold: f64,
    pub initial_design: Option<Design>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iterations: 100_000,
            kw_tolerance: 1e-8,
            prune_threshold: 1e-9,
            prune_interval: 50,
            polish_iterations: 20_000,
            polish_threshold: 1e-6,
            initial_design: None,
        }
    }
}

impl SolverConfig {
    fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 || self.prune_interval == 0 {
            return Err(Error::InvalidParameters("iteration counts must be positive"));
        }
        if !(self.kw_tolerance > 0.0 && self.prune_threshold >= 0.0 && self.polish_threshold >= 0.0) {
            return Err(Error::InvalidParameters("tolerances must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverResult {
    pub design: Design,
    /// Certificate over the candidate pairs (all pairs for [`solve`]).
    pub certificate: KwCertificate,
    /// Certificate over every pair.
    pub full_certificate: KwCertificate,
    pub iterations: usize,
    pub converged: bool,
}

pub fn solve(params: &Parameters, config: &SolverConfig) -> Result<SolverResult> {
    let all: Vec<Pair> = pairs(params.m()).collect();
    run(params, &all, config)
}

/// Best design among those supported inside `support`.
pub fn solve_restricted(params: &Parameters, support: &[Pair], config: &SolverConfig) -> Result<SolverResult> {
    let m = params.m();
    let graph = SupportGraph::new(m, support.iter().copied())?;
    if !graph.is_connected_spanning() {
        return Err(Error::Singular);
    }
    run(params, graph.edges(), config)
}

/// One plain multiplicative step without pruning.
pub fn multiplicative_step(design: &Design, params: &Parameters) -> Result<Design> {
    let m = params.m();
    if design.m() != m {
        return Err(Error::DimensionMismatch { expected: m, found: design.m() });
    }
    let lambda = params.intensities();
    let (_, d) = variances_from(m, design.weights(), lambda.values())?;
    let p = (m - 1) as f64;
    let w: Vec<f64> = design.weights().iter().zip(&d).map(|(w, d)| w * d / p).collect();
    Design::normalized(m, w)
}

fn renormalize(w: &mut [f64]) {
    let s: f64 = w.iter().sum();
    for x in w.iter_mut() {
        *x /= s;
    }
}

fn run(params: &Parameters, candidates: &[Pair], config: &SolverConfig) -> Result<SolverResult> {
    config.validate()?;
    let m = params.m();
    let n = pair_count(m);
    let lambda = params.intensities();
    let lambda = lambda.values();
    let p = (m - 1) as f64;
    let tol = config.kw_tolerance;

    let mut active = vec![false; n];
    for c in candidates {
        c.check(m)?;
        active[c.index(m)] = true;
    }
    let mut w = match &config.initial_design {
        Some(d) => {
            if d.m() != m {
                return Err(Error::DimensionMismatch { expected: m, found: d.m() });
            }
            let mut w: Vec<f64> = d.weights().iter().zip(&active).map(|(w, a)| if *a { *w } else { 0.0 }).collect();
            if w.iter().sum::<f64>() <= 0.0 {
                return Err(Error::InvalidDesign("initial design has no weight on the candidates"));
            }
            renormalize(&mut w);
            w
        }
        None => active.iter().map(|a| if *a { 1.0 } else { 0.0 }).collect(),
    };
    renormalize(&mut w);
    variances_from(m, &w, lambda)?;

    let restore_weight = 1.0 / (100.0 * n as f64);
    let mut iterations = 0;
    let mut polish = 0;
    let mut converged = false;
    while iterations < config.max_iterations {
        let (_, d) = variances_from(m, &w, lambda)?;
        let eps = (0..n).filter(|k| active[*k]).map(|k| d[k] - p).fold(f64::NEG_INFINITY, f64::max);

        if eps <= tol {
            let lingering = (0..n).any(|k| w[k] > 0.0 && w[k] < config.polish_threshold);
            if !lingering || polish >= config.polish_iterations {
                converged = true;
                break;
            }
            polish += 1;
        }

        // Points below this bound have zero weight in every optimal design.
        let e = eps.max(1e-12);
        let bound = p * (1.0 + e / 2.0 - math::sqrt(e * (4.0 + e - 4.0 / p).max(0.0)) / 2.0);
        let prune = (iterations + 1) % config.prune_interval == 0;
        let mut restored = false;
        for k in 0..n {
            if !active[k] {
                continue;
            }
            if w[k] > 0.0 {
                if d[k] < bound || (prune && w[k] < config.prune_threshold && d[k] < p) {
                    w[k] = 0.0;
                } else {
                    w[k] *= d[k] / p;
                }
            } else if d[k] > p + tol {
                w[k] = restore_weight;
                restored = true;
            }
        }
        if w.iter().all(|x| *x == 0.0) {
            return Err(Error::Singular);
        }
        renormalize(&mut w);
        if restored {
            polish = 0;
        }
        iterations += 1;
    }

    let design = Design::normalized(m, w)?;
    let (_, d) = variances_from(m, design.weights(), lambda)?;
    let all: Vec<Pair> = pairs(m).collect();
    let full_certificate = certificate_from(m, &d, &all, tol);
    let certificate = if candidates.len() == all.len() {
        full_certificate.clone()
    } else {
        kw_check_on(&design, params, candidates, tol)?
    };
    let converged = converged || certificate.max_violation <= tol;
    Ok(SolverResult { design, certificate, full_certificate, iterations, converged })
}
