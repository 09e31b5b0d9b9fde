//! Serializable reports for the single-point commands.

use std::collections::BTreeMap;

use btdesign_core::four::{ClawScanReport, ClosedForm, DisjointSearchReport, RegionTests};
use btdesign_core::sweep::Transition;
use btdesign_core::model::information_matrix;
use btdesign_core::{Design, KwCertificate, Parameters, RegionKind, RegionLabel, RegionMembership, SolverResult};
use serde::Serialize;

use crate::io::weight_map;

#[derive(Clone, Debug, Serialize)]
pub struct CertificateReport {
    pub is_optimal: bool,
    pub singular: bool,
    pub max_violation: Option<f64>,
    pub tolerance: f64,
    /// Directional derivative towards every pair.
    pub derivatives: BTreeMap<String, f64>,
    pub equality_pairs: Vec<String>,
}

impl From<&KwCertificate> for CertificateReport {
    fn from(c: &KwCertificate) -> Self {
        CertificateReport {
            is_optimal: c.is_optimal,
            singular: c.singular,
            max_violation: c.max_violation.is_finite().then_some(c.max_violation),
            tolerance: c.tolerance,
            derivatives: c.derivatives.iter().map(|(p, d)| (p.to_string(), *d)).collect(),
            equality_pairs: c.equality_pairs.iter().map(|p| p.to_string()).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RegionReport {
    pub kind: &'static str,
    pub label: String,
    pub support_size: usize,
    pub missing: Vec<String>,
    pub path: Option<String>,
    pub margin: f64,
}

impl From<&RegionLabel> for RegionReport {
    fn from(l: &RegionLabel) -> Self {
        let path = match &l.kind {
            RegionKind::Saturated { path } => Some(path.to_string()),
            _ => None,
        };
        RegionReport {
            kind: l.kind.name(),
            label: l.kind.to_string(),
            support_size: l.kind.support_size(),
            missing: l.kind.missing().iter().map(|p| p.to_string()).collect(),
            path,
            margin: l.margin(),
        }
    }
}

/// Output of `optimize`; `m` and `weights` make it a valid design file.
#[derive(Clone, Debug, Serialize)]
pub struct OptimizeReport {
    pub m: usize,
    pub beta: Vec<f64>,
    pub weights: BTreeMap<String, f64>,
    pub support: Vec<String>,
    pub region: Option<RegionReport>,
    pub log_det: Option<f64>,
    pub certificate: CertificateReport,
    pub iterations: usize,
    pub converged: bool,
}

impl OptimizeReport {
    pub fn new(params: &Parameters, result: &SolverResult, region: Option<&RegionLabel>) -> Self {
        OptimizeReport {
            m: params.m(),
            beta: params.beta().to_vec(),
            weights: weight_map(&result.design),
            support: result.design.support().iter().map(|p| p.to_string()).collect(),
            region: region.map(RegionReport::from),
            log_det: log_det(&result.design, params),
            certificate: CertificateReport::from(&result.full_certificate),
            iterations: result.iterations,
            converged: result.converged,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub m: usize,
    pub beta: Vec<f64>,
    pub weights: BTreeMap<String, f64>,
    pub log_det: Option<f64>,
    pub certificate: CertificateReport,
}

impl VerifyReport {
    pub fn new(params: &Parameters, design: &Design, certificate: &KwCertificate) -> Self {
        VerifyReport {
            m: params.m(),
            beta: params.beta().to_vec(),
            weights: weight_map(design),
            log_det: log_det(design, params),
            certificate: CertificateReport::from(certificate),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosedFormReport {
    pub missing: Vec<String>,
    pub weights: BTreeMap<String, f64>,
    pub min_support_weight: f64,
    /// Region conditions, `≤ 0` inside.
    pub conditions: BTreeMap<String, f64>,
    pub in_region: bool,
}

impl ClosedFormReport {
    fn new(cf: &ClosedForm) -> Self {
        let missing: Vec<String> = btdesign_core::model::pairs(4)
            .filter(|p| !cf.support.contains(p))
            .map(|p| p.to_string())
            .collect();
        let weights = btdesign_core::model::pairs(4)
            .zip(cf.weights)
            .filter(|(p, _)| cf.support.contains(p))
            .map(|(p, w)| (p.to_string(), w))
            .collect();
        ClosedFormReport {
            missing,
            weights,
            min_support_weight: cf.min_support_weight(),
            conditions: cf.conditions.iter().map(|(p, c)| (p.to_string(), *c)).collect(),
            in_region: cf.in_region,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PathReport {
    pub path: String,
    pub g_values: BTreeMap<String, f64>,
    pub margin: f64,
    pub inside: bool,
}

impl From<&RegionMembership> for PathReport {
    fn from(r: &RegionMembership) -> Self {
        PathReport {
            path: r.path.to_string(),
            g_values: r.g_values.iter().map(|(p, g)| (p.to_string(), *g)).collect(),
            margin: r.margin,
            inside: r.inside,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RegionTestsReport {
    pub full_support: ClosedFormReport,
    pub five_point: Vec<ClosedFormReport>,
    pub four_point: Vec<ClosedFormReport>,
    pub saturated: Vec<PathReport>,
}

impl From<&RegionTests> for RegionTestsReport {
    fn from(t: &RegionTests) -> Self {
        RegionTestsReport {
            full_support: ClosedFormReport::new(&t.full),
            five_point: t.five_point.iter().map(|(_, cf)| ClosedFormReport::new(cf)).collect(),
            four_point: t.four_point.iter().map(|(_, cf)| ClosedFormReport::new(cf)).collect(),
            saturated: t.saturated.iter().map(PathReport::from).collect(),
        }
    }
}

/// Output of `classify`. For `m ≠ 4` only saturated paths are tested and
/// the design comes from the solver unless a path region contains `β`.
#[derive(Clone, Debug, Serialize)]
pub struct ClassifyReport {
    pub m: usize,
    pub beta: Vec<f64>,
    pub region: Option<RegionReport>,
    /// `closed-form`, `saturated-path` or `solver`.
    pub source: &'static str,
    pub weights: BTreeMap<String, f64>,
    pub log_det: Option<f64>,
    pub certificate: CertificateReport,
    pub tests: Option<RegionTestsReport>,
    pub saturated_paths: Vec<PathReport>,
}

pub fn log_det(design: &Design, params: &Parameters) -> Option<f64> {
    information_matrix(design, params).ok()?.log_det()
}

#[derive(Clone, Debug, Serialize)]
pub struct ClawScanSummary {
    pub points: u64,
    pub feasible: u64,
    /// Largest smallest normalized slack; negative means every point fails.
    pub best_min_slack: f64,
    pub best_point: [f64; 3],
}

impl From<&ClawScanReport> for ClawScanSummary {
    fn from(r: &ClawScanReport) -> Self {
        ClawScanSummary {
            points: r.points,
            feasible: r.feasible,
            best_min_slack: r.best_min_slack,
            best_point: r.best_point,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClawReport {
    pub lower: f64,
    pub upper: f64,
    pub steps: usize,
    pub seed: u64,
    pub grid: ClawScanSummary,
    pub random: Option<ClawScanSummary>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DisjointBest {
    pub beta: Vec<f64>,
    pub weights: BTreeMap<String, f64>,
    pub missing: Vec<String>,
    pub equation_residuals: [f64; 3],
    pub inequality_slacks: [f64; 2],
    pub stationarity_gap: f64,
    pub certified: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DisjointReport {
    pub seed: u64,
    pub radius: f64,
    pub starts: u64,
    pub solutions: u64,
    pub stationary: u64,
    pub feasible: u64,
    pub certified: u64,
    /// Best inequality slack over stationary roots.
    pub best_slack: Option<f64>,
    pub best: Option<DisjointBest>,
}

impl DisjointReport {
    pub fn new(r: &DisjointSearchReport, seed: u64, radius: f64) -> Self {
        DisjointReport {
            seed,
            radius,
            starts: r.starts,
            solutions: r.solutions,
            stationary: r.stationary,
            feasible: r.feasible,
            certified: r.certified,
            best_slack: r.best_slack.is_finite().then_some(r.best_slack),
            best: r.best.as_ref().map(|s| DisjointBest {
                beta: s.beta.clone(),
                weights: weight_map(&s.design),
                missing: s.residuals.missing.iter().map(|p| p.to_string()).collect(),
                equation_residuals: s.residuals.equation_residuals,
                inequality_slacks: s.residuals.inequality_slacks,
                stationarity_gap: s.stationarity_gap,
                certified: s.certified,
            }),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TransitionReport {
    pub lower: f64,
    pub upper: f64,
    pub estimate: f64,
    pub from_size: usize,
    pub to_size: usize,
}

impl From<&Transition> for TransitionReport {
    fn from(t: &Transition) -> Self {
        TransitionReport { lower: t.lower, upper: t.upper, estimate: t.estimate(), from_size: t.from_size, to_size: t.to_size }
    }
}
