//! Optimality regions of saturated designs.
//!
//! A saturated design is optimal only when its support is a Hamiltonian
//! path, with weight `1/(m−1)` on every edge. For the path `1-2-…-m` the
//! region is cut out by `g(i,j) ≤ 1` for all non-adjacent `i < j`, where
//!
//! ```text
//! g(i,j) = λ_ij · Σ_{k=i}^{j−1} 1/λ_{k,k+1}
//! ```
//!
//! Other paths use the same inequalities after relabeling.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graphs::{hamiltonian_orders, Permutation, SupportGraph};
use crate::math;
use crate::model::{pairs, Design, Pair, Parameters};

/// A Hamiltonian path stored by its vertex order, first vertex below last.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PathDesign {
    order: Vec<usize>,
}

impl PathDesign {
    /// Accepts any vertex order and flips it into canonical orientation.
    pub fn new(mut order: Vec<usize>) -> Result<PathDesign> {
        if order.len() < 2 {
            return Err(Error::InvalidParameters("a path needs at least two vertices"));
        }
        Permutation::new(order.clone())?;
        if order[0] > order[order.len() - 1] {
            order.reverse();
        }
        Ok(PathDesign { order })
    }

    /// `1-2-…-m`.
    pub fn canonical(m: usize) -> Result<PathDesign> {
        PathDesign::new((1..=m).collect())
    }

    pub fn from_graph(graph: &SupportGraph) -> Option<PathDesign> {
        graph.path_order().and_then(|o| PathDesign::new(o).ok())
    }

    pub fn m(&self) -> usize {
        self.order.len()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Sorted edge list.
    pub fn edges(&self) -> Vec<Pair> {
        let mut e: Vec<Pair> = self
            .order
            .windows(2)
            .map(|w| Pair::new_unchecked(w[0].min(w[1]), w[0].max(w[1])))
            .collect();
        e.sort();
        e
    }

    pub fn graph(&self) -> SupportGraph {
        SupportGraph::new(self.m(), self.edges()).expect("path edges are valid")
    }

    /// Weight `1/(m−1)` on each edge.
    pub fn design(&self) -> Design {
        Design::uniform_on(self.m(), &self.edges()).expect("path has edges")
    }

    /// Zero-based position of vertex `v` along the order.
    pub fn position(&self, v: usize) -> Option<usize> {
        self.order.iter().position(|u| *u == v)
    }

    /// The permutation `k ↦ v_k` that carries `1-2-…-m` onto this path.
    pub fn permutation(&self) -> Permutation {
        Permutation::new(self.order.clone()).expect("order is a permutation")
    }

    /// The image path `σ(v_1)-…-σ(v_m)`.
    pub fn relabeled(&self, sigma: &Permutation) -> Result<PathDesign> {
        if sigma.m() != self.m() {
            return Err(Error::DimensionMismatch { expected: self.m(), found: sigma.m() });
        }
        PathDesign::new(self.order.iter().map(|v| sigma.apply(*v)).collect())
    }

    pub fn contains_edge(&self, pair: Pair) -> bool {
        match (self.position(pair.i()), self.position(pair.j())) {
            (Some(a), Some(b)) => a.abs_diff(b) == 1,
            _ => false,
        }
    }
}

impl core::fmt::Display for PathDesign {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        for (k, v) in self.order.iter().enumerate() {
            if k > 0 {
                f.write_str("-")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl core::str::FromStr for PathDesign {
    type Err = Error;

    fn from_str(s: &str) -> Result<PathDesign> {
        let order = s
            .split('-')
            .map(|t| t.trim().parse::<usize>().map_err(|_| Error::InvalidPermutation))
            .collect::<Result<Vec<_>>>()?;
        PathDesign::new(order)
    }
}

/// `g` values of one path at one parameter point.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionMembership {
    pub path: PathDesign,
    /// `g(i,j)` for every pair; path edges carry exactly `1`.
    pub g_values: Vec<(Pair, f64)>,
    /// `max g − 1` over non-edges, `0` when there are none.
    pub margin: f64,
    /// `margin ≤ 0`; regions are closed.
    pub inside: bool,
}

fn log_intensity(z: f64) -> f64 {
    let a = -z.abs();
    a - 2.0 * math::ln_1p(math::exp(a))
}

/// `g(i,j)` for the given path, in its own vertex order.
///
/// Ratios of intensities are formed in log space so that points deep inside
/// a region, where some `λ` underflow, stay finite.
pub fn g_value(path: &PathDesign, params: &Parameters, pair: Pair) -> Result<f64> {
    let m = params.m();
    if path.m() != m {
        return Err(Error::DimensionMismatch { expected: m, found: path.m() });
    }
    pair.check(m)?;
    let (a, b) = (path.position(pair.i()).expect("valid"), path.position(pair.j()).expect("valid"));
    let (lo, hi) = (a.min(b), a.max(b));
    if hi == lo + 1 {
        return Ok(1.0);
    }
    let log_lambda = |u: usize, v: usize| log_intensity(params.beta_of(u) - params.beta_of(v));
    let top = log_lambda(pair.i(), pair.j());
    let order = path.order();
    Ok((lo..hi)
        .map(|k| math::exp(top - log_lambda(order[k], order[k + 1])))
        .sum())
}

pub fn region_membership(path: &PathDesign, params: &Parameters) -> Result<RegionMembership> {
    let m = params.m();
    let mut g_values = Vec::with_capacity(crate::model::pair_count(m));
    let mut margin = f64::NEG_INFINITY;
    for q in pairs(m) {
        let g = g_value(path, params, q)?;
        if !path.contains_edge(q) {
            margin = margin.max(g - 1.0);
        }
        g_values.push((q, g));
    }
    if margin == f64::NEG_INFINITY {
        margin = 0.0;
    }
    Ok(RegionMembership { path: path.clone(), g_values, margin, inside: margin <= 0.0 })
}

/// All `m!/2` paths in canonical orientation.
pub fn all_path_designs(m: usize) -> Result<Vec<PathDesign>> {
    Ok(hamiltonian_orders(m)?.into_iter().map(|order| PathDesign { order }).collect())
}

/// The path whose closed region contains `β`, if any.
///
/// On shared boundaries the most interior path (smallest margin) wins,
/// with ties going to the earlier path in enumeration order.
pub fn find_optimal_saturated(params: &Parameters) -> Result<Option<(PathDesign, RegionMembership)>> {
    let mut best: Option<RegionMembership> = None;
    for path in all_path_designs(params.m())? {
        let r = region_membership(&path, params)?;
        if r.inside && best.as_ref().map_or(true, |b| r.margin < b.margin) {
            best = Some(r);
        }
    }
    Ok(best.map(|r| (r.path.clone(), r)))
}
