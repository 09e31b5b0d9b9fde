//! Model primitives: parameters, pairs, intensities, regression vectors,
//! designs and the information matrix.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::InfoMatrix;
use crate::math;

/// Weights at or below this value are not part of a design's support.
pub const SUPPORT_THRESHOLD: f64 = 1e-9;

/// Allowed deviation of a design's total weight from one.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

/// Intensity `η'(z) = e^z / (1 + e^z)²` of a comparison with log-odds `z`.
///
/// Evaluated as `e^{-|z|} / (1 + e^{-|z|})²`, which cannot overflow.
pub fn intensity(z: f64) -> Result<f64> {
    if !z.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(intensity_unchecked(z))
}

#[inline]
pub(crate) fn intensity_unchecked(z: f64) -> f64 {
    let e = math::exp(-z.abs());
    let d = 1.0 + e;
    e / (d * d)
}

/// Number of comparisons `m(m-1)/2`.
pub const fn pair_count(m: usize) -> usize {
    m * (m.saturating_sub(1)) / 2
}

/// An unordered comparison between alternatives `i < j`, labelled from 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pair {
    i: usize,
    j: usize,
}

impl Pair {
    /// Builds the comparison between `a` and `b`, in either order.
    pub fn new(a: usize, b: usize) -> Result<Pair> {
        if a == 0 || b == 0 || a == b {
            return Err(Error::InvalidPair { i: a, j: b, m: a.max(b) });
        }
        Ok(Pair { i: a.min(b), j: a.max(b) })
    }

    /// Builds a pair and checks it against `m` alternatives.
    pub fn checked(a: usize, b: usize, m: usize) -> Result<Pair> {
        let p = Pair::new(a, b).map_err(|_| Error::InvalidPair { i: a, j: b, m })?;
        p.check(m)?;
        Ok(p)
    }

    pub(crate) const fn new_unchecked(i: usize, j: usize) -> Pair {
        Pair { i, j }
    }

    pub fn i(self) -> usize {
        self.i
    }

    pub fn j(self) -> usize {
        self.j
    }

    pub fn check(self, m: usize) -> Result<()> {
        if self.j > m {
            return Err(Error::InvalidPair { i: self.i, j: self.j, m });
        }
        Ok(())
    }

    pub fn contains(self, v: usize) -> bool {
        self.i == v || self.j == v
    }

    /// The other endpoint, if `v` is one of the two.
    pub fn other(self, v: usize) -> Option<usize> {
        if self.i == v {
            Some(self.j)
        } else if self.j == v {
            Some(self.i)
        } else {
            None
        }
    }

    /// The vertex shared with `other`, when exactly one is shared.
    pub fn shared_vertex(self, other: Pair) -> Option<usize> {
        match (other.contains(self.i), other.contains(self.j)) {
            (true, false) => Some(self.i),
            (false, true) => Some(self.j),
            _ => None,
        }
    }

    /// Position in the lexicographic order `(1,2), (1,3), …, (m-1,m)`.
    pub fn index(self, m: usize) -> usize {
        (self.i - 1) * (2 * m - self.i) / 2 + (self.j - self.i - 1)
    }

    /// Inverse of [`Pair::index`].
    pub fn from_index(index: usize, m: usize) -> Pair {
        let mut rest = index;
        for i in 1..m {
            let row = m - i;
            if rest < row {
                return Pair { i, j: i + 1 + rest };
            }
            rest -= row;
        }
        panic!("pair index {index} out of range for m = {m}");
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.i, self.j)
    }
}

impl FromStr for Pair {
    type Err = Error;

    /// Parses `"i-j"`.
    fn from_str(s: &str) -> Result<Pair> {
        let (a, b) = s.split_once('-').ok_or(Error::InvalidPair { i: 0, j: 0, m: 0 })?;
        let a = a.trim().parse().map_err(|_| Error::InvalidPair { i: 0, j: 0, m: 0 })?;
        let b = b.trim().parse().map_err(|_| Error::InvalidPair { i: 0, j: 0, m: 0 })?;
        Pair::new(a, b)
    }
}

/// All pairs for `m` alternatives in index order.
pub fn pairs(m: usize) -> impl Iterator<Item = Pair> + Clone {
    (1..m).flat_map(move |i| (i + 1..=m).map(move |j| Pair { i, j }))
}

/// Log-preference parameters `β_1 … β_{m-1}` with `β_m = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Parameters {
    beta: Vec<f64>,
}

impl Parameters {
    pub fn new(beta: Vec<f64>) -> Result<Parameters> {
        if beta.is_empty() {
            return Err(Error::InvalidParameters("at least two alternatives are required"));
        }
        if beta.iter().any(|b| !b.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Parameters { beta })
    }

    /// All alternatives equally preferred.
    pub fn zeros(m: usize) -> Result<Parameters> {
        Parameters::new(vec![0.0; m.saturating_sub(1)])
    }

    /// Parameters from positive preference values `π_1 … π_m`, rescaled so
    /// that `π_m = 1`.
    pub fn from_strengths(pi: &[f64]) -> Result<Parameters> {
        if pi.len() < 2 {
            return Err(Error::InvalidParameters("at least two alternatives are required"));
        }
        if pi.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
            return Err(Error::InvalidParameters("preference values must be positive"));
        }
        let last = math::ln(pi[pi.len() - 1]);
        Parameters::new(pi[..pi.len() - 1].iter().map(|p| math::ln(*p) - last).collect())
    }

    pub fn m(&self) -> usize {
        self.beta.len() + 1
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    /// `β_k` for `k` in `1..=m`, with `β_m = 0`.
    pub fn beta_of(&self, k: usize) -> f64 {
        if k == self.m() {
            0.0
        } else {
            self.beta[k - 1]
        }
    }

    /// `λ_{ij} = η'(β_i − β_j)`.
    pub fn intensity(&self, pair: Pair) -> f64 {
        intensity_unchecked(self.beta_of(pair.i) - self.beta_of(pair.j))
    }

    pub fn intensities(&self) -> IntensityTable {
        intensity_table(self)
    }
}

/// Intensities `λ_{ij}` for every pair, in pair-index order.
#[derive(Clone, Debug, PartialEq)]
pub struct IntensityTable {
    m: usize,
    values: Vec<f64>,
}

impl IntensityTable {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, pair: Pair) -> f64 {
        self.values[pair.index(self.m)]
    }

    /// Intensity between two distinct alternatives given in any order.
    pub fn between(&self, a: usize, b: usize) -> f64 {
        self.get(Pair::new_unchecked(a.min(b), a.max(b)))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

pub fn intensity_table(params: &Parameters) -> IntensityTable {
    let m = params.m();
    IntensityTable {
        m,
        values: pairs(m).map(|p| params.intensity(p)).collect(),
    }
}

/// Regression vector `f(i,j)`: `e_i − e_j` for `j < m`, `e_i` for `j = m`.
pub fn regression_vector(pair: Pair, m: usize) -> Result<Vec<i64>> {
    pair.check(m)?;
    Ok(oriented_regression_vector(pair.i, pair.j, m))
}

/// `ẽ_a − ẽ_b` with `ẽ_m = 0`, for alternatives in either order.
///
/// Equals `f(a,b)` when `a < b` and `−f(b,a)` otherwise.
pub fn oriented_regression_vector(a: usize, b: usize, m: usize) -> Vec<i64> {
    let mut f = vec![0; m - 1];
    if a < m {
        f[a - 1] += 1;
    }
    if b < m {
        f[b - 1] -= 1;
    }
    f
}

/// Approximate design: nonnegative weights on pairs summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct Design {
    m: usize,
    weights: Vec<f64>,
}

impl Design {
    /// Weights in pair-index order; they must already sum to one.
    pub fn new(m: usize, weights: Vec<f64>) -> Result<Design> {
        let sum = check_weights(m, &weights)?;
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::InvalidDesign("weights must sum to one"));
        }
        Ok(Design { m, weights })
    }

    /// Nonnegative weights with positive total, rescaled to sum to one.
    pub fn normalized(m: usize, mut weights: Vec<f64>) -> Result<Design> {
        let sum = check_weights(m, &weights)?;
        if sum <= 0.0 {
            return Err(Error::InvalidDesign("weights sum to zero"));
        }
        for w in &mut weights {
            *w /= sum;
        }
        Ok(Design { m, weights })
    }

    pub fn uniform(m: usize) -> Result<Design> {
        Design::normalized(m, vec![1.0; pair_count(m)])
    }

    /// Equal weights on the given pairs.
    pub fn uniform_on(m: usize, support: &[Pair]) -> Result<Design> {
        Design::from_pairs(m, support.iter().map(|p| (*p, 1.0)))
    }

    /// Weights listed by pair, rescaled to sum to one. Repeated pairs add up.
    pub fn from_pairs(m: usize, entries: impl IntoIterator<Item = (Pair, f64)>) -> Result<Design> {
        let mut weights = vec![0.0; pair_count(m)];
        for (p, w) in entries {
            p.check(m)?;
            weights[p.index(m)] += w;
        }
        Design::normalized(m, weights)
    }

    pub(crate) fn from_raw(m: usize, weights: Vec<f64>) -> Design {
        Design { m, weights }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn weight(&self, pair: Pair) -> f64 {
        self.weights[pair.index(self.m)]
    }

    /// Weights in pair-index order.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (Pair, f64)> + '_ {
        pairs(self.m).zip(self.weights.iter().copied())
    }

    /// Pairs with weight above [`SUPPORT_THRESHOLD`].
    pub fn support(&self) -> Vec<Pair> {
        self.iter()
            .filter(|(_, w)| *w > SUPPORT_THRESHOLD)
            .map(|(p, _)| p)
            .collect()
    }

    /// `α·self + (1−α)·other`.
    pub fn mix(&self, other: &Design, alpha: f64) -> Result<Design> {
        if self.m != other.m {
            return Err(Error::DimensionMismatch { expected: self.m, found: other.m });
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidDesign("mixing weight outside [0, 1]"));
        }
        let weights = self
            .weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| alpha * a + (1.0 - alpha) * b)
            .collect();
        Design::normalized(self.m, weights)
    }

    /// Largest absolute weight difference.
    pub fn distance(&self, other: &Design) -> f64 {
        self.weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

fn check_weights(m: usize, weights: &[f64]) -> Result<f64> {
    if m < 2 {
        return Err(Error::InvalidDesign("at least two alternatives are required"));
    }
    if weights.len() != pair_count(m) {
        return Err(Error::DimensionMismatch { expected: pair_count(m), found: weights.len() });
    }
    if weights.iter().any(|w| !w.is_finite()) {
        return Err(Error::NonFinite);
    }
    if weights.iter().any(|w| *w < 0.0) {
        return Err(Error::InvalidDesign("negative weight"));
    }
    Ok(weights.iter().sum())
}

/// `M(ξ,β) = Σ w_{ij} λ_{ij} f(i,j) f(i,j)ᵀ`.
pub fn information_matrix(design: &Design, params: &Parameters) -> Result<InfoMatrix> {
    if design.m() != params.m() {
        return Err(Error::DimensionMismatch { expected: params.m(), found: design.m() });
    }
    let lambda = params.intensities();
    Ok(information_matrix_from(design.m(), design.weights(), lambda.values()))
}

/// Information matrix from raw weights and intensities in pair-index order.
pub(crate) fn information_matrix_from(m: usize, weights: &[f64], lambda: &[f64]) -> InfoMatrix {
    let mut info = InfoMatrix::zeros(m - 1);
    for (idx, p) in pairs(m).enumerate() {
        let c = weights[idx] * lambda[idx];
        if c == 0.0 {
            continue;
        }
        info.add_pair(p, m, c);
    }
    info
}
