//! Four alternatives: every optimality region in closed form.
//!
//! Up to relabeling there are four kinds of optimal design: full support,
//! five points, four points whose missing pairs share a vertex, and the
//! saturated path designs. [`classify_m4`] tries them in that order and
//! returns the first one whose design passes the equivalence check.

mod claw;
mod closed_form;
mod disjoint;

use alloc::vec::Vec;
use core::fmt;

pub use claw::{
    claw_grid_scan, claw_grid_scan_slab, claw_lambda_slacks, claw_normalized_slacks, claw_random_scan, claw_slacks,
    ClawGrid, ClawScanReport,
};
pub use closed_form::{
    five_point_representative_permutation, five_point_weights, five_point_weights_with,
    four_point_representative_permutation, four_point_shared_vertex_weights, four_point_shared_vertex_weights_with,
    full_support_weights, saturated_inequalities_m4, saturated_region_check_m4, shared_vertex, ClosedForm,
    SATURATED_BASE_ORDER,
};
pub use disjoint::{
    disjoint_four_point_residuals, disjoint_solutions, search_disjoint, DisjointResiduals, DisjointSearchReport,
    DisjointSolution, DISJOINT_ORBIT,
};

use crate::error::{Error, Result};
use crate::graphs::Permutation;
use crate::model::{pairs, Design, Pair, Parameters};
use crate::optimality::{kw_check, KwCertificate};
use crate::regions::{all_path_designs, region_membership, PathDesign, RegionMembership};
use closed_form::{five_point_from, four_point_from, full_support_from, Lambdas};

/// A certificate violation this large on a design the exact region test
/// accepted means a formula is wrong, not that rounding crept in.
const INCONSISTENCY_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RegionKind {
    FullSupport,
    FivePoint { missing: Pair },
    FourPointSharedVertex { missing: [Pair; 2] },
    Saturated { path: PathDesign },
}

impl RegionKind {
    pub fn support_size(&self) -> usize {
        match self {
            RegionKind::FullSupport => 6,
            RegionKind::FivePoint { .. } => 5,
            RegionKind::FourPointSharedVertex { .. } => 4,
            RegionKind::Saturated { .. } => 3,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            RegionKind::FullSupport => "FullSupport",
            RegionKind::FivePoint { .. } => "FivePoint",
            RegionKind::FourPointSharedVertex { .. } => "FourPointSharedVertex",
            RegionKind::Saturated { .. } => "Saturated",
        }
    }

    /// Pairs with zero weight.
    pub fn missing(&self) -> Vec<Pair> {
        match self {
            RegionKind::FullSupport => Vec::new(),
            RegionKind::FivePoint { missing } => alloc::vec![*missing],
            RegionKind::FourPointSharedVertex { missing } => missing.to_vec(),
            RegionKind::Saturated { path } => {
                let edges = path.edges();
                pairs(4).filter(|p| !edges.contains(p)).collect()
            }
        }
    }

    /// The kind of the relabeled region.
    pub fn relabeled(&self, sigma: &Permutation) -> Result<RegionKind> {
        if sigma.m() != 4 {
            return Err(Error::NotFourAlternatives(sigma.m()));
        }
        Ok(match self {
            RegionKind::FullSupport => RegionKind::FullSupport,
            RegionKind::FivePoint { missing } => RegionKind::FivePoint { missing: sigma.apply_pair(*missing) },
            RegionKind::FourPointSharedVertex { missing } => {
                let mut m = missing.map(|p| sigma.apply_pair(p));
                m.sort();
                RegionKind::FourPointSharedVertex { missing: m }
            }
            RegionKind::Saturated { path } => RegionKind::Saturated { path: path.relabeled(sigma)? },
        })
    }
}

impl fmt::Display for RegionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegionKind::FullSupport => f.write_str("FullSupport"),
            RegionKind::FivePoint { missing } => write!(f, "FivePoint(missing {missing})"),
            RegionKind::FourPointSharedVertex { missing: [a, b] } => {
                write!(f, "FourPointSharedVertex(missing {a}, {b})")
            }
            RegionKind::Saturated { path } => write!(f, "Saturated({path})"),
        }
    }
}

/// A classified parameter point with its certified optimal design.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionLabel {
    pub kind: RegionKind,
    pub design: Design,
    pub certificate: KwCertificate,
}

impl RegionLabel {
    /// Value of the binding region constraint, `≤ 0` inside: the larger of
    /// the largest derivative towards a missing pair and minus the smallest
    /// support weight.
    pub fn margin(&self) -> f64 {
        let missing = self.kind.missing();
        let derivative = missing
            .iter()
            .filter_map(|p| self.certificate.derivative(*p))
            .fold(f64::NEG_INFINITY, f64::max);
        let min_weight = self
            .design
            .iter()
            .filter(|(p, _)| !missing.contains(p))
            .map(|(_, w)| w)
            .fold(f64::INFINITY, f64::min);
        derivative.max(-min_weight)
    }
}

/// The twelve pairs of missing pairs that share a vertex, each sorted.
pub fn shared_vertex_patterns() -> Vec<[Pair; 2]> {
    let mut out = Vec::with_capacity(12);
    for v in 1..=4usize {
        let others: Vec<usize> = (1..=4).filter(|u| *u != v).collect();
        for (x, y) in [(0, 1), (0, 2), (1, 2)] {
            let p = |u: usize| Pair::new_unchecked(v.min(u), v.max(u));
            let mut m = [p(others[x]), p(others[y])];
            m.sort();
            out.push(m);
        }
    }
    out.sort();
    out
}

/// Every region test evaluated at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionTests {
    pub full: ClosedForm,
    pub five_point: Vec<(Pair, ClosedForm)>,
    pub four_point: Vec<([Pair; 2], ClosedForm)>,
    pub saturated: Vec<RegionMembership>,
}

pub fn region_tests_m4(params: &Parameters) -> Result<RegionTests> {
    if params.m() != 4 {
        return Err(Error::NotFourAlternatives(params.m()));
    }
    let table = params.intensities();
    let five_point = pairs(4)
        .map(|q| Ok((q, five_point_weights(params, q)?)))
        .collect::<Result<Vec<_>>>()?;
    let four_point = shared_vertex_patterns()
        .into_iter()
        .map(|[a, b]| Ok(([a, b], four_point_shared_vertex_weights(params, a, b)?)))
        .collect::<Result<Vec<_>>>()?;
    let saturated = all_path_designs(4)?
        .iter()
        .map(|path| region_membership(path, params))
        .collect::<Result<Vec<_>>>()?;
    Ok(RegionTests { full: full_support_from(&Lambdas::identity(&table)), five_point, four_point, saturated })
}

/// Certifies a closed-form candidate, or flags a formula the exact region
/// test accepted but the certificate refutes.
fn certify(cf: &ClosedForm, params: &Parameters, what: &'static str) -> Result<Option<(Design, KwCertificate)>> {
    if !(cf.min_support_weight() > 0.0) {
        return Ok(None);
    }
    let design = cf.design()?;
    let certificate = kw_check(&design, params)?;
    if certificate.is_optimal {
        return Ok(Some((design, certificate)));
    }
    if cf.in_region && certificate.max_violation > INCONSISTENCY_TOLERANCE {
        return Err(Error::InconsistentClosedForm(what));
    }
    Ok(None)
}

/// Region and certified optimal design for four alternatives.
///
/// Precedence is full support, then five points, then four points, then
/// saturated paths. Among several certifying paths the one with the
/// smallest derivative wins.
pub fn classify_m4(params: &Parameters) -> Result<RegionLabel> {
    if params.m() != 4 {
        return Err(Error::NotFourAlternatives(params.m()));
    }
    let table = params.intensities();

    let full = full_support_from(&Lambdas::identity(&table));
    if let Some((design, certificate)) = certify(&full, params, "full-support")? {
        return Ok(RegionLabel { kind: RegionKind::FullSupport, design, certificate });
    }

    for missing in pairs(4) {
        let sigma = five_point_representative_permutation(missing)?;
        let cf = five_point_from(&Lambdas::new(&table, tau(&sigma)));
        if let Some((design, certificate)) = certify(&cf, params, "five-point")? {
            return Ok(RegionLabel { kind: RegionKind::FivePoint { missing }, design, certificate });
        }
    }

    for missing in shared_vertex_patterns() {
        let sigma = four_point_representative_permutation(missing[0], missing[1])?;
        let cf = four_point_from(&Lambdas::new(&table, tau(&sigma)));
        if let Some((design, certificate)) = certify(&cf, params, "four-point")? {
            return Ok(RegionLabel { kind: RegionKind::FourPointSharedVertex { missing }, design, certificate });
        }
    }

    let mut best: Option<RegionLabel> = None;
    for path in all_path_designs(4)? {
        let design = path.design();
        let certificate = kw_check(&design, params)?;
        if !certificate.is_optimal {
            if region_membership(&path, params)?.inside && certificate.max_violation > INCONSISTENCY_TOLERANCE {
                return Err(Error::InconsistentClosedForm("saturated"));
            }
            continue;
        }
        if best.as_ref().map_or(true, |b| certificate.max_violation < b.certificate.max_violation) {
            best = Some(RegionLabel { kind: RegionKind::Saturated { path }, design, certificate });
        }
    }
    best.ok_or(Error::ClassificationFailed)
}

fn tau(sigma: &Permutation) -> [usize; 5] {
    let inv = sigma.inverse();
    [0, inv.apply(1), inv.apply(2), inv.apply(3), inv.apply(4)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{apply_to_design, apply_to_params};
    use alloc::vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn on_line(t: f64) -> Parameters {
        Parameters::new(vec![t, t / 2.0, 1.25 * t]).unwrap()
    }

    #[test]
    fn origin_is_full_support() {
        let label = classify_m4(&Parameters::zeros(4).unwrap()).unwrap();
        assert_eq!(label.kind, RegionKind::FullSupport);
        for w in label.design.weights() {
            assert!((w - 1.0 / 6.0).abs() < 1e-12);
        }
    }

    #[test]
    fn kinds_along_the_line() {
        assert_eq!(classify_m4(&on_line(1.0)).unwrap().kind.support_size(), 6);
        assert_eq!(classify_m4(&on_line(1.7)).unwrap().kind.support_size(), 5);
        assert_eq!(classify_m4(&on_line(2.5)).unwrap().kind.support_size(), 4);
        let sat = classify_m4(&on_line(3.5)).unwrap();
        assert_eq!(sat.kind.support_size(), 3);
        assert!(sat.margin() <= 0.0);
    }

    #[test]
    fn shared_vertex_patterns_are_twelve_distinct() {
        let mut pats = shared_vertex_patterns();
        assert_eq!(pats.len(), 12);
        pats.dedup();
        assert_eq!(pats.len(), 12);
        assert!(pats.iter().all(|[a, b]| shared_vertex(*a, *b).is_some()));
    }

    #[test]
    fn four_point_first_weight_is_a_third() {
        let label = classify_m4(&on_line(2.5)).unwrap();
        let RegionKind::FourPointSharedVertex { missing } = &label.kind else {
            panic!("expected a four-point design");
        };
        let v = shared_vertex(missing[0], missing[1]).unwrap();
        let a = missing[0].other(v).unwrap();
        let b = missing[1].other(v).unwrap();
        let c = (1..=4).find(|u| *u != v && *u != a && *u != b).unwrap();
        let spoke = Pair::new(v.min(c), v.max(c)).unwrap();
        assert!((label.design.weight(spoke) - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn classification_is_equivariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let perms = Permutation::all(4).unwrap();
        for _ in 0..40 {
            let params = Parameters::new((0..3).map(|_| rng.gen_range(-5.0..5.0)).collect()).unwrap();
            let base = classify_m4(&params).unwrap();
            for sigma in &perms {
                let moved = classify_m4(&apply_to_params(sigma, &params).unwrap()).unwrap();
                assert_eq!(moved.kind.support_size(), base.kind.support_size());
                let expect = apply_to_design(sigma, &base.design).unwrap();
                assert!(moved.design.distance(&expect) < 1e-7);
            }
        }
    }

    #[test]
    fn wrong_dimension_is_rejected() {
        assert_eq!(classify_m4(&Parameters::zeros(5).unwrap()), Err(Error::NotFourAlternatives(5)));
    }
}
