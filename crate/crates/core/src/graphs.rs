//! Graph view of designs and the action of the symmetric group `S_m`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{pair_count, pairs, Design, Pair, Parameters};

/// Largest `m` for which paths, trees and permutations are enumerated.
pub const MAX_ENUMERATION_M: usize = 8;

/// Undirected simple graph on `{1..m}`; edges are the supported pairs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SupportGraph {
    m: usize,
    edges: Vec<Pair>,
}

impl SupportGraph {
    pub fn new(m: usize, edges: impl IntoIterator<Item = Pair>) -> Result<SupportGraph> {
        let mut edges: Vec<Pair> = edges.into_iter().collect();
        for e in &edges {
            e.check(m)?;
        }
        edges.sort();
        edges.dedup();
        Ok(SupportGraph { m, edges })
    }

    /// Edges are the pairs with weight above the support threshold.
    pub fn from_design(design: &Design) -> SupportGraph {
        SupportGraph { m: design.m(), edges: design.support() }
    }

    pub fn complete(m: usize) -> SupportGraph {
        SupportGraph { m, edges: pairs(m).collect() }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn edges(&self) -> &[Pair] {
        &self.edges
    }

    pub fn contains(&self, pair: Pair) -> bool {
        self.edges.binary_search(&pair).is_ok()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.contains(v)).count()
    }

    pub fn max_degree(&self) -> usize {
        (1..=self.m).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// Number of connected components, counting isolated vertices.
    pub fn components(&self) -> usize {
        let mut parent: Vec<usize> = (0..=self.m).collect();
        fn root(parent: &mut [usize], mut v: usize) -> usize {
            while parent[v] != v {
                parent[v] = parent[parent[v]];
                v = parent[v];
            }
            v
        }
        let mut count = self.m;
        for e in &self.edges {
            let (a, b) = (root(&mut parent, e.i()), root(&mut parent, e.j()));
            if a != b {
                parent[a] = b;
                count -= 1;
            }
        }
        count
    }

    /// Connected and touching all `m` vertices.
    pub fn is_connected_spanning(&self) -> bool {
        self.components() == 1
    }

    pub fn has_cycle(&self) -> bool {
        self.edges.len() + self.components() > self.m
    }

    pub fn is_tree(&self) -> bool {
        self.edges.len() + 1 == self.m && self.is_connected_spanning()
    }

    pub fn is_path(&self) -> bool {
        self.is_tree() && self.max_degree() <= 2
    }

    /// A star `K_{1,m-1}`; for four alternatives this is the claw.
    pub fn is_star(&self) -> bool {
        self.m >= 4 && self.is_tree() && self.max_degree() == self.m - 1
    }

    /// Vertex order along the path, starting from the smaller endpoint.
    pub fn path_order(&self) -> Option<Vec<usize>> {
        if !self.is_path() {
            return None;
        }
        if self.m == 1 {
            return Some(vec![1]);
        }
        let start = (1..=self.m).find(|v| self.degree(*v) == 1)?;
        let mut order = vec![start];
        let mut prev = 0;
        let mut cur = start;
        while order.len() < self.m {
            let next = self
                .edges
                .iter()
                .filter_map(|e| e.other(cur))
                .find(|v| *v != prev)?;
            order.push(next);
            prev = cur;
            cur = next;
        }
        Some(order)
    }
}

/// A permutation `σ` of `{1..m}`, stored as its image `[σ(1), …, σ(m)]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn new(image: Vec<usize>) -> Result<Permutation> {
        let m = image.len();
        let mut seen = vec![false; m + 1];
        for &v in &image {
            if v == 0 || v > m || seen[v] {
                return Err(Error::InvalidPermutation);
            }
            seen[v] = true;
        }
        Ok(Permutation { image })
    }

    pub fn identity(m: usize) -> Permutation {
        Permutation { image: (1..=m).collect() }
    }

    /// The transposition `(a b)`.
    pub fn transposition(m: usize, a: usize, b: usize) -> Result<Permutation> {
        if a == 0 || b == 0 || a > m || b > m {
            return Err(Error::InvalidPermutation);
        }
        let mut image: Vec<usize> = (1..=m).collect();
        image.swap(a - 1, b - 1);
        Ok(Permutation { image })
    }

    pub fn m(&self) -> usize {
        self.image.len()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn apply(&self, k: usize) -> usize {
        self.image[k - 1]
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation { image: other.image.iter().map(|k| self.apply(*k)).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut image = vec![0; self.m()];
        for (k, v) in self.image.iter().enumerate() {
            image[v - 1] = k + 1;
        }
        Permutation { image }
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(k, v)| k + 1 == *v)
    }

    /// `σ(i,j)`, re-canonicalized to `i < j`.
    pub fn apply_pair(&self, pair: Pair) -> Pair {
        let (a, b) = (self.apply(pair.i()), self.apply(pair.j()));
        Pair::new_unchecked(a.min(b), a.max(b))
    }

    /// Transpositions `t_1, …, t_r` with `σ = t_1 ∘ ⋯ ∘ t_r`.
    pub fn transpositions(&self) -> Vec<(usize, usize)> {
        let mut cur = self.clone();
        let mut out = Vec::new();
        for k in 1..=self.m() {
            let v = cur.apply(k);
            if v != k {
                out.push((k, v));
                // t ∘ cur fixes 1..=k
                let t = Permutation::transposition(self.m(), k, v).expect("in range");
                cur = t.compose(&cur);
            }
        }
        out
    }

    /// All `m!` permutations in lexicographic order of their images.
    pub fn all(m: usize) -> Result<Vec<Permutation>> {
        if m > MAX_ENUMERATION_M {
            return Err(Error::TooLarge { m, max: MAX_ENUMERATION_M });
        }
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (1..=m).collect();
        loop {
            out.push(Permutation { image: cur.clone() });
            if !next_permutation(&mut cur) {
                return Ok(out);
            }
        }
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Small dense integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    n: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn identity(n: usize) -> IntMatrix {
        let mut data = vec![0; n * n];
        for k in 0..n {
            data[k * n + k] = 1;
        }
        IntMatrix { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.data[r * self.n + c]
    }

    pub fn row(&self, r: usize) -> &[i64] {
        &self.data[r * self.n..(r + 1) * self.n]
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        let n = self.n;
        let mut data = vec![0; n * n];
        for r in 0..n {
            for c in 0..n {
                data[r * n + c] = (0..n).map(|k| self.get(r, k) * other.get(k, c)).sum();
            }
        }
        IntMatrix { n, data }
    }

    pub fn transpose(&self) -> IntMatrix {
        let n = self.n;
        let mut data = vec![0; n * n];
        for r in 0..n {
            for c in 0..n {
                data[c * n + r] = self.get(r, c);
            }
        }
        IntMatrix { n, data }
    }

    pub fn mul_vec(&self, v: &[i64]) -> Vec<i64> {
        (0..self.n)
            .map(|r| (0..self.n).map(|c| self.get(r, c) * v[c]).sum())
            .collect()
    }

    pub fn mul_vec_f64(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|r| (0..self.n).map(|c| self.get(r, c) as f64 * v[c]).sum())
            .collect()
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> i64 {
        let n = self.n;
        if n == 0 {
            return 1;
        }
        let mut a = self.data.clone();
        let mut sign = 1;
        let mut prev = 1;
        for k in 0..n - 1 {
            if a[k * n + k] == 0 {
                let Some(swap) = (k + 1..n).find(|r| a[r * n + k] != 0) else {
                    return 0;
                };
                for c in 0..n {
                    a.swap(k * n + c, swap * n + c);
                }
                sign = -sign;
            }
            for r in k + 1..n {
                for c in k + 1..n {
                    a[r * n + c] = (a[r * n + c] * a[k * n + k] - a[r * n + k] * a[k * n + c]) / prev;
                }
            }
            prev = a[k * n + k];
        }
        sign * a[n * n - 1]
    }
}

/// The matrix `Q_σ` with `f(σ(i),σ(j)) = Q_σ f(i,j)` (up to the orientation
/// of the relabeled pair).
///
/// Column `k` is `ẽ_{σ(k)} − ẽ_{σ(m)}` where `ẽ_m = 0`.
pub fn q_matrix(sigma: &Permutation) -> IntMatrix {
    let m = sigma.m();
    let n = m - 1;
    let mut data = vec![0; n * n];
    let anchor = sigma.apply(m);
    for k in 1..m {
        let col = crate::model::oriented_regression_vector(sigma.apply(k), anchor, m);
        for r in 0..n {
            data[r * n + (k - 1)] = col[r];
        }
    }
    IntMatrix { n, data }
}

/// `Q` for a single transposition: a permutation matrix when both points
/// are below `m`, otherwise the identity with row `i` replaced by `−1`s.
pub fn transposition_matrix(m: usize, a: usize, b: usize) -> Result<IntMatrix> {
    if a == 0 || b == 0 || a > m || b > m {
        return Err(Error::InvalidPermutation);
    }
    let n = m - 1;
    let mut q = IntMatrix::identity(n);
    if a == b {
        return Ok(q);
    }
    let (lo, hi) = (a.min(b), a.max(b));
    if hi < m {
        let (x, y) = (lo - 1, hi - 1);
        q.data[x * n + x] = 0;
        q.data[y * n + y] = 0;
        q.data[x * n + y] = 1;
        q.data[y * n + x] = 1;
    } else {
        let x = lo - 1;
        for c in 0..n {
            q.data[x * n + c] = -1;
        }
    }
    Ok(q)
}

/// `Q_σ` as the product of the transposition matrices of a factorization of `σ`.
pub fn q_matrix_by_transpositions(sigma: &Permutation) -> IntMatrix {
    let m = sigma.m();
    sigma
        .transpositions()
        .into_iter()
        .fold(IntMatrix::identity(m - 1), |acc, (a, b)| {
            acc.mul(&transposition_matrix(m, a, b).expect("valid transposition"))
        })
}

/// `ξ^σ`: the weight of `(i,j)` moves to `σ(i,j)`.
pub fn apply_to_design(sigma: &Permutation, design: &Design) -> Result<Design> {
    let m = design.m();
    if sigma.m() != m {
        return Err(Error::DimensionMismatch { expected: m, found: sigma.m() });
    }
    let mut weights = vec![0.0; pair_count(m)];
    for (p, w) in design.iter() {
        weights[sigma.apply_pair(p).index(m)] = w;
    }
    Ok(Design::from_raw(m, weights))
}

/// `Q_σ^{−T} β`, computed as `Q_{σ⁻¹}ᵀ β`.
pub fn apply_to_params(sigma: &Permutation, params: &Parameters) -> Result<Parameters> {
    if sigma.m() != params.m() {
        return Err(Error::DimensionMismatch { expected: params.m(), found: sigma.m() });
    }
    let q = q_matrix(&sigma.inverse()).transpose();
    Parameters::new(q.mul_vec_f64(params.beta()))
}

/// Vertex orders of all labeled Hamiltonian paths, each path once (first
/// vertex smaller than last).
pub fn hamiltonian_orders(m: usize) -> Result<Vec<Vec<usize>>> {
    if m < 2 {
        return Err(Error::InvalidParameters("at least two alternatives are required"));
    }
    Ok(Permutation::all(m)?
        .into_iter()
        .map(|p| p.image)
        .filter(|o| o[0] < o[o.len() - 1])
        .collect())
}

/// All `m!/2` labeled paths on `{1..m}`.
pub fn enumerate_paths(m: usize) -> Result<Vec<SupportGraph>> {
    Ok(hamiltonian_orders(m)?
        .into_iter()
        .map(|o| SupportGraph {
            m,
            edges: {
                let mut e: Vec<Pair> = o.windows(2).map(|w| Pair::new_unchecked(w[0].min(w[1]), w[0].max(w[1]))).collect();
                e.sort();
                e
            },
        })
        .collect())
}

/// All `m^{m−2}` labeled spanning trees, decoded from Prüfer sequences.
pub fn enumerate_spanning_trees(m: usize) -> Result<Vec<SupportGraph>> {
    if m < 2 {
        return Err(Error::InvalidParameters("at least two alternatives are required"));
    }
    if m > MAX_ENUMERATION_M {
        return Err(Error::TooLarge { m, max: MAX_ENUMERATION_M });
    }
    if m == 2 {
        return Ok(vec![SupportGraph { m, edges: vec![Pair::new_unchecked(1, 2)] }]);
    }
    let len = m - 2;
    let total = m.pow(len as u32);
    let mut out = Vec::with_capacity(total);
    let mut seq = vec![1usize; len];
    for _ in 0..total {
        out.push(prufer_decode(m, &seq));
        for slot in seq.iter_mut().rev() {
            if *slot < m {
                *slot += 1;
                break;
            }
            *slot = 1;
        }
    }
    Ok(out)
}

fn prufer_decode(m: usize, seq: &[usize]) -> SupportGraph {
    let mut degree = vec![1usize; m + 1];
    for &v in seq {
        degree[v] += 1;
    }
    let mut edges = Vec::with_capacity(m - 1);
    for &v in seq {
        let leaf = (1..=m).find(|u| degree[*u] == 1).expect("a leaf exists");
        edges.push(Pair::new_unchecked(leaf.min(v), leaf.max(v)));
        degree[leaf] -= 1;
        degree[v] -= 1;
    }
    let rest: Vec<usize> = (1..=m).filter(|u| degree[*u] == 1).collect();
    edges.push(Pair::new_unchecked(rest[0], rest[1]));
    edges.sort();
    SupportGraph { m, edges }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::regression_vector;
    use alloc::vec;

    fn p(i: usize, j: usize) -> Pair {
        Pair::new(i, j).unwrap()
    }

    #[test]
    fn path_and_tree_predicates() {
        let path = SupportGraph::new(4, [p(1, 2), p(2, 3), p(3, 4)]).unwrap();
        assert!(path.is_tree() && path.is_path());
        assert_eq!(path.path_order(), Some(vec![1, 2, 3, 4]));

        let claw = SupportGraph::new(4, [p(1, 2), p(1, 3), p(1, 4)]).unwrap();
        assert!(claw.is_tree() && !claw.is_path() && claw.is_star());

        let cycle = SupportGraph::new(4, [p(1, 2), p(1, 4), p(2, 4)]).unwrap();
        assert!(!cycle.is_tree() && cycle.has_cycle() && !cycle.is_connected_spanning());
    }

    #[test]
    fn support_graph_of_designs() {
        let d = Design::uniform_on(4, &[p(1, 2), p(2, 3), p(3, 4)]).unwrap();
        assert_eq!(SupportGraph::from_design(&d).edges(), &[p(1, 2), p(2, 3), p(3, 4)]);
        let full = SupportGraph::from_design(&Design::uniform(4).unwrap());
        assert_eq!(full, SupportGraph::complete(4));
        let five = Design::new(4, vec![0.0, 0.2, 0.2, 0.2, 0.2, 0.2]).unwrap();
        let g = SupportGraph::from_design(&five);
        assert_eq!(g.edges().len(), 5);
        assert!(!g.contains(p(1, 2)));
    }

    #[test]
    fn path_counts() {
        assert_eq!(enumerate_paths(2).unwrap().len(), 1);
        assert_eq!(enumerate_paths(3).unwrap().len(), 3);
        assert_eq!(enumerate_paths(4).unwrap().len(), 12);
        assert_eq!(enumerate_paths(6).unwrap().len(), 360);
        assert!(matches!(enumerate_paths(9), Err(Error::TooLarge { .. })));
        let mut all = enumerate_paths(5).unwrap();
        assert!(all.iter().all(|g| g.is_path()));
        let n = all.len();
        all.sort_by(|a, b| a.edges().cmp(b.edges()));
        all.dedup();
        assert_eq!(all.len(), n);
    }

    #[test]
    fn spanning_tree_counts() {
        for m in 2..7usize {
            let trees = enumerate_spanning_trees(m).unwrap();
            assert_eq!(trees.len(), m.pow(m as u32 - 2));
            assert!(trees.iter().all(|t| t.is_tree()));
            assert_eq!(trees.iter().filter(|t| t.is_path()).count(), enumerate_paths(m).unwrap().len());
        }
    }

    #[test]
    fn q_matrix_examples() {
        assert_eq!(q_matrix(&Permutation::identity(4)), IntMatrix::identity(3));
        let t14 = Permutation::transposition(4, 1, 4).unwrap();
        let q = q_matrix(&t14);
        assert_eq!(q.row(0), &[-1, -1, -1]);
        assert_eq!(q.row(1), &[0, 1, 0]);
        assert_eq!(q.row(2), &[0, 0, 1]);

        let t12 = Permutation::transposition(4, 1, 2).unwrap();
        let q = q_matrix(&t12);
        assert_eq!(q.row(0), &[0, 1, 0]);
        assert_eq!(q.row(1), &[1, 0, 0]);
        assert_eq!(q.row(2), &[0, 0, 1]);
        for pair in pairs(4) {
            let image = crate::model::oriented_regression_vector(t12.apply(pair.i()), t12.apply(pair.j()), 4);
            assert_eq!(image, q.mul_vec(&regression_vector(pair, 4).unwrap()));
        }
    }

    #[test]
    fn transposition_factorization_reproduces_sigma() {
        for sigma in Permutation::all(5).unwrap() {
            let rebuilt = sigma
                .transpositions()
                .into_iter()
                .fold(Permutation::identity(5), |acc, (a, b)| {
                    acc.compose(&Permutation::transposition(5, a, b).unwrap())
                });
            assert_eq!(rebuilt, sigma);
            assert_eq!(q_matrix(&sigma), q_matrix_by_transpositions(&sigma));
        }
    }

    #[test]
    fn relabeling_designs_and_parameters() {
        let d = Design::uniform_on(4, &[p(1, 3)]).unwrap();
        let id = Permutation::identity(4);
        assert_eq!(apply_to_design(&id, &d).unwrap(), d);
        let t12 = Permutation::transposition(4, 1, 2).unwrap();
        assert_eq!(apply_to_design(&t12, &d).unwrap().support(), vec![p(2, 3)]);

        let params = Parameters::new(vec![0.3, -1.2, 2.5]).unwrap();
        assert_eq!(apply_to_params(&id, &params).unwrap(), params);
        // β'_{σ(k)} − β'_{σ(l)} = β_k − β_l for every pair
        for sigma in Permutation::all(4).unwrap() {
            let moved = apply_to_params(&sigma, &params).unwrap();
            for q in pairs(4) {
                let before = params.beta_of(q.i()) - params.beta_of(q.j());
                let after = moved.beta_of(sigma.apply(q.i())) - moved.beta_of(sigma.apply(q.j()));
                assert!((before - after).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn determinant_of_q_is_unit() {
        for sigma in Permutation::all(4).unwrap() {
            assert_eq!(q_matrix(&sigma).det().abs(), 1);
        }
    }
}
