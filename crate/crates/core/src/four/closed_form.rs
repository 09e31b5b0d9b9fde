//! Weight formulas and region inequalities for four alternatives.
//!
//! Every formula is written for one representative of its symmetry orbit
//! and evaluated for other members through a relabeling of the intensities.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graphs::Permutation;
use crate::model::{pairs, Design, IntensityTable, Pair, Parameters};
use crate::regions::PathDesign;

/// Weights produced by a formula, with the side conditions of its region.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedForm {
    /// Weights in pair-index order; missing pairs are exactly zero.
    pub weights: [f64; 6],
    pub support: Vec<Pair>,
    /// Region inequalities keyed by the missing pair they guard; each is
    /// satisfied when the value is `≤ 0`.
    pub conditions: Vec<(Pair, f64)>,
    /// All support weights finite and positive and all conditions met.
    pub in_region: bool,
}

impl ClosedForm {
    fn assemble(weights: [f64; 6], missing: &[Pair], conditions: Vec<(Pair, f64)>) -> ClosedForm {
        let support: Vec<Pair> = pairs(4).filter(|p| !missing.contains(p)).collect();
        let positive = support.iter().all(|p| {
            let w = weights[p.index(4)];
            w.is_finite() && w > 0.0
        });
        let in_region = positive && conditions.iter().all(|(_, c)| *c <= 0.0);
        ClosedForm { weights, support, conditions, in_region }
    }

    /// Smallest weight on the support.
    pub fn min_support_weight(&self) -> f64 {
        self.support
            .iter()
            .map(|p| self.weights[p.index(4)])
            .fold(f64::INFINITY, f64::min)
    }

    /// The weights as a design, renormalized against rounding.
    pub fn design(&self) -> Result<Design> {
        if self.weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFinite);
        }
        Design::normalized(4, self.weights.to_vec())
    }
}

/// Intensities seen through a relabeling: `get(a, b) = λ_{τ(a) τ(b)}`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Lambdas {
    v: [[f64; 5]; 5],
    tau: [usize; 5],
}

impl Lambdas {
    pub(crate) fn new(table: &IntensityTable, tau: [usize; 5]) -> Lambdas {
        let mut v = [[0.0; 5]; 5];
        for a in 1..=4 {
            for b in 1..=4 {
                if a != b {
                    v[a][b] = table.between(tau[a], tau[b]);
                }
            }
        }
        Lambdas { v, tau }
    }

    pub(crate) fn identity(table: &IntensityTable) -> Lambdas {
        Lambdas::new(table, [0, 1, 2, 3, 4])
    }

    #[inline]
    pub(crate) fn get(&self, a: usize, b: usize) -> f64 {
        self.v[a][b]
    }

    /// Original pair behind the representative pair `(a, b)`.
    pub(crate) fn pair(&self, a: usize, b: usize) -> Pair {
        let (x, y) = (self.tau[a], self.tau[b]);
        Pair::new_unchecked(x.min(y), x.max(y))
    }
}

fn table4(params: &Parameters) -> Result<IntensityTable> {
    if params.m() != 4 {
        return Err(Error::NotFourAlternatives(params.m()));
    }
    Ok(params.intensities())
}

fn tau_of(sigma: &Permutation) -> Result<[usize; 5]> {
    if sigma.m() != 4 {
        return Err(Error::NotFourAlternatives(sigma.m()));
    }
    let inv = sigma.inverse();
    Ok([0, inv.apply(1), inv.apply(2), inv.apply(3), inv.apply(4)])
}

/// Full-support numerator for `w_ij`, with `k, l` the remaining labels.
fn full_numerator(l: &Lambdas, i: usize, j: usize, k: usize, q: usize) -> f64 {
    let (ij, ik, il) = (l.get(i, j), l.get(i, k), l.get(i, q));
    let (jk, jl, kl) = (l.get(j, k), l.get(j, q), l.get(k, q));
    let inner = ij * ik * il * jk * jl
        - ij * ik * il * jk * kl
        - ij * ik * il * jl * kl
        - ij * ik * jk * jl * kl
        + ij * ik * jk * kl * kl
        - ij * ik * jl * kl * kl
        - ij * il * jk * jl * kl
        - ij * il * jk * kl * kl
        + ij * il * jl * kl * kl
        + 2.0 * ik * il * jk * jl * kl;
    ik * il * jk * jl * inner
}

/// The normalizer `A` of the full-support weights, labels `(i,j,k,l)`.
pub(crate) fn full_normalizer(l: &Lambdas, i: usize, j: usize, k: usize, q: usize) -> f64 {
    let (ij, ik, il) = (l.get(i, j), l.get(i, k), l.get(i, q));
    let (jk, jl, kl) = (l.get(j, k), l.get(j, q), l.get(k, q));
    let sq = |x: f64| x * x;
    let s = ij * sq(ik) * sq(il) * sq(jk) * sq(jl)
        + ij * ik * sq(il) * jk * sq(jl) * sq(kl)
        - ij * ik * sq(il) * sq(jk) * jl * sq(kl)
        - sq(ij) * ik * sq(il) * jk * jl * sq(kl)
        - ij * ik * sq(il) * sq(jk) * sq(jl) * kl
        - ij * sq(ik) * sq(il) * jk * sq(jl) * kl
        - ij * sq(ik) * sq(il) * sq(jk) * jl * kl
        - sq(ij) * ik * sq(il) * sq(jk) * jl * kl
        + sq(ij) * sq(ik) * sq(il) * jk * jl * kl
        - ij * sq(ik) * il * jk * sq(jl) * sq(kl)
        - sq(ij) * ik * il * jk * sq(jl) * sq(kl)
        + ij * sq(ik) * il * sq(jk) * jl * sq(kl)
        - sq(ij) * ik * il * sq(jk) * jl * sq(kl)
        - sq(ij) * sq(ik) * il * jk * jl * sq(kl)
        - ij * sq(ik) * il * sq(jk) * sq(jl) * kl
        + sq(ij) * ik * il * sq(jk) * sq(jl) * kl
        - sq(ij) * sq(ik) * il * jk * sq(jl) * kl
        + sq(ij) * ik * sq(il) * sq(jk) * sq(kl)
        + sq(ij) * sq(ik) * il * sq(jl) * sq(kl)
        + sq(ij) * sq(ik) * jk * sq(jl) * sq(kl)
        + sq(ij) * sq(il) * sq(jk) * jl * sq(kl)
        + sq(ik) * sq(il) * sq(jk) * sq(jl) * kl;
    3.0 * s
}

pub(crate) fn full_numerators(l: &Lambdas) -> [f64; 6] {
    let mut out = [0.0; 6];
    for p in pairs(4) {
        let mut rest = (1..=4).filter(|v| !p.contains(*v));
        let (k, q) = (rest.next().expect("two left"), rest.next().expect("two left"));
        out[p.index(4)] = full_numerator(l, p.i(), p.j(), k, q);
    }
    out
}

/// Weights of the design supported on all six pairs.
///
/// Outside the full-support region some weights come out `≤ 0`; that is
/// reported through [`ClosedForm::in_region`].
pub fn full_support_weights(params: &Parameters) -> Result<ClosedForm> {
    let l = Lambdas::identity(&table4(params)?);
    Ok(full_support_from(&l))
}

pub(crate) fn full_support_from(l: &Lambdas) -> ClosedForm {
    let a = full_normalizer(l, 1, 2, 3, 4);
    let num = full_numerators(l);
    let mut weights = [0.0; 6];
    for (w, n) in weights.iter_mut().zip(num) {
        *w = n / a;
    }
    ClosedForm::assemble(weights, &[], Vec::new())
}

/// Representative (missing `(1,2)`) weights and the `(1,2)` condition.
pub(crate) fn five_point_representative(l: &Lambdas) -> ([f64; 6], f64) {
    let (l12, l13, l14) = (l.get(1, 2), l.get(1, 3), l.get(1, 4));
    let (l23, l24, l34) = (l.get(2, 3), l.get(2, 4), l.get(3, 4));
    let sq = |x: f64| x * x;

    let d1 = 3.0 * (sq(l13) * sq(l14 - l34) - 2.0 * l13 * l14 * l34 * (l14 + l34) + sq(l14) * sq(l34));
    let d2 = 3.0 * (sq(l23) * sq(l24 - l34) - 2.0 * l23 * l24 * l34 * (l24 + l34) + sq(l24) * sq(l34));
    let w13 = 2.0 * l14 * l34 * (l14 * l34 - l13 * (l14 + l34)) / d1;
    let w14 = 2.0 * l13 * l34 * (l13 * (l34 - l14) - l14 * l34) / d1;
    let w23 = 2.0 * l24 * l34 * (l24 * l34 - l23 * (l24 + l34)) / d2;
    let w24 = 2.0 * l23 * l34 * (l23 * (l34 - l24) - l24 * l34) / d2;

    let p4 = |x: f64| sq(sq(x));
    let n = 3.0 * sq(l13) * sq(l14) * sq(l23) * sq(l24)
        - 4.0 * l13 * l14 * l23 * l24 * p4(l34)
        - 2.0 * l13 * l14 * sq(l23) * sq(l24) * sq(l34)
        + 4.0 * l13 * sq(l14) * l23 * sq(l24) * sq(l34)
        + 4.0 * sq(l13) * l14 * l23 * sq(l24) * sq(l34)
        + 4.0 * l13 * sq(l14) * sq(l23) * l24 * sq(l34)
        + 4.0 * sq(l13) * l14 * sq(l23) * l24 * sq(l34)
        - 2.0 * sq(l13) * sq(l14) * l23 * l24 * sq(l34)
        - 4.0 * l13 * sq(l14) * sq(l23) * sq(l24) * l34
        - 4.0 * sq(l13) * l14 * sq(l23) * sq(l24) * l34
        - 4.0 * sq(l13) * sq(l14) * l23 * sq(l24) * l34
        - 4.0 * sq(l13) * sq(l14) * sq(l23) * l24 * l34
        + 2.0 * l13 * l14 * sq(l23) * p4(l34)
        + sq(l13) * sq(l14) * sq(l23) * sq(l34)
        + 2.0 * l13 * l14 * sq(l24) * p4(l34)
        + sq(l13) * sq(l14) * sq(l24) * sq(l34)
        + 2.0 * sq(l13) * l23 * l24 * p4(l34)
        + sq(l13) * sq(l23) * sq(l24) * sq(l34)
        - sq(l13) * sq(l23) * p4(l34)
        - sq(l13) * sq(l24) * p4(l34)
        + 2.0 * sq(l14) * l23 * l24 * p4(l34)
        + sq(l14) * sq(l23) * sq(l24) * sq(l34)
        - sq(l14) * sq(l23) * p4(l34)
        - sq(l14) * sq(l24) * p4(l34);
    let b = 3.0
        * (sq(l13) * sq(l14) - 2.0 * sq(l13) * l14 * l34 - 2.0 * l13 * l14 * sq(l34) - 2.0 * l13 * sq(l14) * l34
            + sq(l13) * sq(l34)
            + sq(l14) * sq(l34))
        * (sq(l23) * sq(l24) - 2.0 * sq(l23) * l24 * l34 - 2.0 * l23 * l24 * sq(l34) - 2.0 * l23 * sq(l24) * l34
            + sq(l23) * sq(l34)
            + sq(l24) * sq(l34));
    let w34 = n / b;

    let lhs = l12
        * (l13 * (l14 * (l23 * (l24 - l34) - l24 * l34) + l34 * (l23 * (l34 - l24) - l24 * l34))
            - l14 * l34 * (l23 * (l24 + l34) - l24 * l34));
    let rhs = -2.0 * l13 * l14 * l23 * l24 * l34;

    ([0.0, w13, w14, w23, w24, w34], rhs - lhs)
}

/// The permutation used by default to carry `missing` onto `(1,2)`.
pub fn five_point_representative_permutation(missing: Pair) -> Result<Permutation> {
    missing.check(4)?;
    let mut image = [0usize; 4];
    image[missing.i() - 1] = 1;
    image[missing.j() - 1] = 2;
    let mut next = 3;
    for slot in image.iter_mut().filter(|s| **s == 0) {
        *slot = next;
        next += 1;
    }
    Permutation::new(image.to_vec())
}

/// Weights of the design missing exactly `missing`, and its condition that
/// the derivative towards `missing` is nonpositive.
pub fn five_point_weights(params: &Parameters, missing: Pair) -> Result<ClosedForm> {
    five_point_weights_with(params, missing, &five_point_representative_permutation(missing)?)
}

/// As [`five_point_weights`], transported through a caller-chosen `σ` with
/// `σ(missing) = (1,2)`.
pub fn five_point_weights_with(params: &Parameters, missing: Pair, sigma: &Permutation) -> Result<ClosedForm> {
    let table = table4(params)?;
    missing.check(4)?;
    if sigma.apply_pair(missing) != Pair::new_unchecked(1, 2) {
        return Err(Error::WrongOrbit);
    }
    let l = Lambdas::new(&table, tau_of(sigma)?);
    Ok(five_point_from(&l))
}

pub(crate) fn five_point_from(l: &Lambdas) -> ClosedForm {
    let (rep, condition) = five_point_representative(l);
    let mut weights = [0.0; 6];
    for p in pairs(4) {
        weights[l.pair(p.i(), p.j()).index(4)] = rep[p.index(4)];
    }
    let missing = l.pair(1, 2);
    ClosedForm::assemble(weights, &[missing], alloc::vec![(missing, condition)])
}

/// Representative (missing `(1,2)` and `(1,3)`) weights and the two conditions.
pub(crate) fn four_point_representative(l: &Lambdas) -> ([f64; 6], [f64; 2]) {
    let (l12, l13, l14) = (l.get(1, 2), l.get(1, 3), l.get(1, 4));
    let (l23, l24, l34) = (l.get(2, 3), l.get(2, 4), l.get(3, 4));
    let sq = |x: f64| x * x;
    let d = 3.0
        * (sq(l23) * sq(l24) - 2.0 * sq(l23) * l24 * l34 - 2.0 * l23 * l24 * sq(l34) - 2.0 * l23 * sq(l24) * l34
            + sq(l23) * sq(l34)
            + sq(l24) * sq(l34));
    let w23 = 2.0 * l24 * l34 * (-l23 * l24 - l23 * l34 + l24 * l34) / d;
    let w24 = 2.0 * l23 * l34 * (-l23 * l24 + l23 * l34 - l24 * l34) / d;
    let w34 = 2.0 * l23 * l24 * (l23 * l24 - l23 * l34 - l24 * l34) / d;
    let c12 = l12 * (l14 + l24) / (l14 * l24) - 1.0;
    let c13 = l13 * (l14 + l34) / (l14 * l34) - 1.0;
    ([0.0, 0.0, 1.0 / 3.0, w23, w24, w34], [c12, c13])
}

/// Whether two missing pairs share exactly one alternative.
pub fn shared_vertex(missing1: Pair, missing2: Pair) -> Option<usize> {
    if missing1 == missing2 {
        return None;
    }
    missing1.shared_vertex(missing2)
}

/// The permutation used by default to carry the missing pairs onto
/// `{(1,2), (1,3)}`.
pub fn four_point_representative_permutation(missing1: Pair, missing2: Pair) -> Result<Permutation> {
    missing1.check(4)?;
    missing2.check(4)?;
    let v = shared_vertex(missing1, missing2).ok_or(Error::WrongOrbit)?;
    let (a, b) = (missing1.other(v).expect("shared"), missing2.other(v).expect("shared"));
    let (a, b) = (a.min(b), a.max(b));
    let rest = (1..=4).find(|u| *u != v && *u != a && *u != b).expect("four labels");
    let mut image = [0usize; 4];
    image[v - 1] = 1;
    image[a - 1] = 2;
    image[b - 1] = 3;
    image[rest - 1] = 4;
    Permutation::new(image.to_vec())
}

/// Weights of the design missing two pairs that share a vertex, and the
/// two derivative conditions towards the missing pairs.
pub fn four_point_shared_vertex_weights(params: &Parameters, missing1: Pair, missing2: Pair) -> Result<ClosedForm> {
    let sigma = four_point_representative_permutation(missing1, missing2)?;
    four_point_shared_vertex_weights_with(params, missing1, missing2, &sigma)
}

/// As [`four_point_shared_vertex_weights`] through a caller-chosen `σ`.
pub fn four_point_shared_vertex_weights_with(
    params: &Parameters,
    missing1: Pair,
    missing2: Pair,
    sigma: &Permutation,
) -> Result<ClosedForm> {
    let table = table4(params)?;
    missing1.check(4)?;
    missing2.check(4)?;
    shared_vertex(missing1, missing2).ok_or(Error::WrongOrbit)?;
    let mut images = [sigma.apply_pair(missing1), sigma.apply_pair(missing2)];
    images.sort();
    if images != [Pair::new_unchecked(1, 2), Pair::new_unchecked(1, 3)] {
        return Err(Error::WrongOrbit);
    }
    let l = Lambdas::new(&table, tau_of(sigma)?);
    Ok(four_point_from(&l))
}

pub(crate) fn four_point_from(l: &Lambdas) -> ClosedForm {
    let (rep, [c12, c13]) = four_point_representative(l);
    let mut weights = [0.0; 6];
    for p in pairs(4) {
        weights[l.pair(p.i(), p.j()).index(4)] = rep[p.index(4)];
    }
    let (m12, m13) = (l.pair(1, 2), l.pair(1, 3));
    ClosedForm::assemble(weights, &[m12, m13], alloc::vec![(m12, c12), (m13, c13)])
}

/// The three saturated-region polynomials for the path `3-1-2-4`, the
/// orientation the printed system is written for.
fn saturated_representative(l: &Lambdas) -> [f64; 3] {
    let (l12, l13, l14) = (l.get(1, 2), l.get(1, 3), l.get(1, 4));
    let (l23, l24, l34) = (l.get(2, 3), l.get(2, 4), l.get(3, 4));
    [
        l14 * (l12 + l24) - l12 * l24,
        l23 * (l12 + l13) - l12 * l13,
        l34 * (l12 * l24 + l12 * l13 + l13 * l24) - l12 * l13 * l24,
    ]
}

/// Order of the path the polynomial system is written for.
pub const SATURATED_BASE_ORDER: [usize; 4] = [3, 1, 2, 4];

/// Values of the three polynomial inequalities for `path`; inside when all
/// are `≤ 0`.
pub fn saturated_inequalities_m4(params: &Parameters, path: &PathDesign) -> Result<[f64; 3]> {
    let table = table4(params)?;
    if path.m() != 4 {
        return Err(Error::NotFourAlternatives(path.m()));
    }
    let mut tau = [0usize; 5];
    for (base, v) in SATURATED_BASE_ORDER.iter().zip(path.order()) {
        tau[*base] = *v;
    }
    Ok(saturated_representative(&Lambdas::new(&table, tau)))
}

pub fn saturated_region_check_m4(params: &Parameters, path: &PathDesign) -> Result<bool> {
    Ok(saturated_inequalities_m4(params, path)?.iter().all(|v| *v <= 0.0))
}
