//! Four-point designs whose two missing pairs are disjoint.
//!
//! With missing pairs `(i,j)` and `(k,l)`, stationarity on the support
//! `ik, il, jk, jl` forces
//!
//! ```text
//! λ_ik (w_ik² − w_ik/3) = λ_il (w_il² − w_il/3) = λ_jk (…) = λ_jl (…)
//! ```
//!
//! and optimality additionally needs two inequalities in `λ_ij` and `λ_kl`.
//! Whether any non-saturated solution exists is open; this module only
//! searches for one.

use alloc::vec::Vec;
use rand::Rng;

use crate::error::{Error, Result};
use crate::math;
use crate::model::{pairs, Design, IntensityTable, Pair, Parameters};
use crate::optimality::kw_check;

/// The three ways to split `{1,2,3,4}` into two disjoint pairs.
pub const DISJOINT_ORBIT: [[Pair; 2]; 3] = [
    [Pair::new_unchecked(1, 2), Pair::new_unchecked(3, 4)],
    [Pair::new_unchecked(1, 3), Pair::new_unchecked(2, 4)],
    [Pair::new_unchecked(1, 4), Pair::new_unchecked(2, 3)],
];

/// Labels `(i, j, k, l)` for missing pairs `(i,j)` and `(k,l)`.
fn labels(missing: [Pair; 2]) -> Result<[usize; 4]> {
    let [a, b] = missing;
    if a.shared_vertex(b).is_some() || a == b {
        return Err(Error::WrongOrbit);
    }
    Ok([a.i(), a.j(), b.i(), b.j()])
}

/// Support pairs `ik, il, jk, jl` in that order.
fn support_of([i, j, k, l]: [usize; 4]) -> [Pair; 4] {
    let p = |a: usize, b: usize| Pair::new_unchecked(a.min(b), a.max(b));
    [p(i, k), p(i, l), p(j, k), p(j, l)]
}

#[derive(Clone, Debug, PartialEq)]
pub struct DisjointResiduals {
    pub missing: [Pair; 2],
    /// Support in the order `ik, il, jk, jl`.
    pub support: [Pair; 4],
    /// `e_il − e_ik`, `e_jk − e_ik`, `e_jl − e_ik` with `e = λ(w² − w/3)`.
    pub equation_residuals: [f64; 3],
    /// `3 − lhs` of the two inequalities; satisfied when `≥ 0`.
    pub inequality_slacks: [f64; 2],
}

impl DisjointResiduals {
    pub fn min_slack(&self) -> f64 {
        self.inequality_slacks[0].min(self.inequality_slacks[1])
    }
}

fn residuals_from(table: &IntensityTable, missing: [Pair; 2], w: [f64; 4]) -> Result<DisjointResiduals> {
    let lab = labels(missing)?;
    let support = support_of(lab);
    let [i, j, k, l] = lab;
    let e: Vec<f64> = support
        .iter()
        .zip(w)
        .map(|(p, w)| table.get(*p) * (w * w - w / 3.0))
        .collect();
    let [_w_ik, w_il, w_jk, w_jl] = w;
    let den = table.between(j, l) * w_jl * (3.0 * w_jl - 1.0);
    let u = 3.0 * (w_il + w_jl);
    let v = 3.0 * (w_jk + w_jl);
    let ineq1 = table.between(i, j) * (u - 2.0) * (u - 1.0) / den;
    let ineq2 = table.between(k, l) * (v - 2.0) * (v - 1.0) / den;
    Ok(DisjointResiduals {
        missing,
        support,
        equation_residuals: [e[1] - e[0], e[2] - e[0], e[3] - e[0]],
        inequality_slacks: [3.0 - ineq1, 3.0 - ineq2],
    })
}

/// Residuals of the stationarity system and the two inequality slacks for
/// a design supported on four pairs with disjoint missing pairs.
pub fn disjoint_four_point_residuals(params: &Parameters, design: &Design) -> Result<DisjointResiduals> {
    if params.m() != 4 || design.m() != 4 {
        return Err(Error::NotFourAlternatives(if params.m() != 4 { params.m() } else { design.m() }));
    }
    let support = design.support();
    if support.len() != 4 {
        return Err(Error::WrongOrbit);
    }
    let missing: Vec<Pair> = pairs(4).filter(|p| !support.contains(p)).collect();
    let missing = [missing[0], missing[1]];
    let lab = labels(missing)?;
    let w = support_of(lab).map(|p| design.weight(p));
    residuals_from(&params.intensities(), missing, w)
}

/// Largest `|d_p − 3|` on the support for a root to count as stationary.
pub const STATIONARITY_TOLERANCE: f64 = 1e-8;

/// A root of the equation system with all four weights in `(0, 1/3)`.
///
/// Some roots are extraneous: the design is not stationary on its support
/// and the inequality slacks say nothing about optimality.
#[derive(Clone, Debug, PartialEq)]
pub struct DisjointSolution {
    pub beta: Vec<f64>,
    pub design: Design,
    pub residuals: DisjointResiduals,
    /// `max |d_p − 3|` over the support.
    pub stationarity_gap: f64,
    pub stationary: bool,
    pub certified: bool,
}

/// All solutions of the equation system with weights in `(0, 1/3)`.
///
/// Writing the common value as `c = −t·λ_min/36` with `t ∈ (0, 1)` gives
/// `w_p = 1/6 ± (1/6)·sqrt(1 − t·λ_min/λ_p)`. The weights sum to one only
/// with all `+` signs or with exactly one `−`, so five branches are scanned
/// for roots in `t` and refined by bisection.
pub fn disjoint_solutions(params: &Parameters, missing: [Pair; 2]) -> Result<Vec<DisjointSolution>> {
    if params.m() != 4 {
        return Err(Error::NotFourAlternatives(params.m()));
    }
    let table = params.intensities();
    let support = support_of(labels(missing)?);
    let lambda = support.map(|p| table.get(p));
    let lmin = lambda.iter().copied().fold(f64::INFINITY, f64::min);
    if !(lmin > 0.0) {
        return Ok(Vec::new());
    }
    let weights = |t: f64, minus: Option<usize>| -> [f64; 4] {
        let mut w = [0.0; 4];
        for p in 0..4 {
            let s = math::sqrt((1.0 - t * lmin / lambda[p]).max(0.0)) / 6.0;
            w[p] = if minus == Some(p) { 1.0 / 6.0 - s } else { 1.0 / 6.0 + s };
        }
        w
    };
    let excess = |t: f64, minus: Option<usize>| weights(t, minus).iter().sum::<f64>() - 1.0;

    const SCAN: usize = 64;
    let mut out = Vec::new();
    for minus in [None, Some(0), Some(1), Some(2), Some(3)] {
        let mut prev_t = 0.0;
        let mut prev = excess(prev_t, minus);
        for step in 1..=SCAN {
            let t = step as f64 / SCAN as f64;
            let cur = excess(t, minus);
            if prev == 0.0 || prev.signum() != cur.signum() {
                let (mut lo, mut hi, mut flo) = (prev_t, t, prev);
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    let fm = excess(mid, minus);
                    if fm.signum() == flo.signum() && fm != 0.0 {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                let w = weights(0.5 * (lo + hi), minus);
                if w.iter().all(|x| *x > 0.0 && *x < 1.0 / 3.0) {
                    out.push(solution(params, &table, missing, support, w)?);
                }
            }
            prev_t = t;
            prev = cur;
        }
    }
    Ok(out)
}

fn solution(
    params: &Parameters,
    table: &IntensityTable,
    missing: [Pair; 2],
    support: [Pair; 4],
    w: [f64; 4],
) -> Result<DisjointSolution> {
    let design = Design::from_pairs(4, support.iter().copied().zip(w))?;
    let residuals = residuals_from(table, missing, w)?;
    let certificate = kw_check(&design, params)?;
    let stationarity_gap = support
        .iter()
        .filter_map(|p| certificate.derivative(*p))
        .fold(0.0, |acc: f64, d| acc.max(d.abs()));
    Ok(DisjointSolution {
        beta: params.beta().to_vec(),
        design,
        residuals,
        stationarity_gap,
        stationary: stationarity_gap <= STATIONARITY_TOLERANCE,
        certified: certificate.is_optimal,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DisjointSearchReport {
    pub starts: u64,
    /// Roots with all weights in `(0, 1/3)`.
    pub solutions: u64,
    /// Roots that are stationary on their support.
    pub stationary: u64,
    /// Stationary roots meeting both inequalities.
    pub feasible: u64,
    /// Roots passing the full equivalence check.
    pub certified: u64,
    /// Best `min(slack₁, slack₂)` over stationary roots, with its root.
    pub best_slack: f64,
    pub best: Option<DisjointSolution>,
}

impl DisjointSearchReport {
    pub fn new() -> Self {
        DisjointSearchReport { starts: 0, solutions: 0, stationary: 0, feasible: 0, certified: 0, best_slack: f64::NEG_INFINITY, best: None }
    }

    pub fn merge(mut self, other: DisjointSearchReport) -> Self {
        self.starts += other.starts;
        self.solutions += other.solutions;
        self.stationary += other.stationary;
        self.feasible += other.feasible;
        self.certified += other.certified;
        if other.best_slack > self.best_slack {
            self.best_slack = other.best_slack;
            self.best = other.best;
        }
        self
    }
}

impl Default for DisjointSearchReport {
    fn default() -> Self {
        Self::new()
    }
}

/// Random starts: each draws `β` uniformly from `[−radius, radius]³` and one
/// of the three disjoint patterns, then enumerates its solutions.
pub fn search_disjoint<R: Rng + ?Sized>(starts: u64, radius: f64, rng: &mut R) -> Result<DisjointSearchReport> {
    let mut report = DisjointSearchReport::new();
    for _ in 0..starts {
        let beta: Vec<f64> = (0..3).map(|_| rng.gen_range(-radius..=radius)).collect();
        let missing = DISJOINT_ORBIT[rng.gen_range(0..3)];
        let params = Parameters::new(beta)?;
        report.starts += 1;
        for s in disjoint_solutions(&params, missing)? {
            report.solutions += 1;
            if s.certified {
                report.certified += 1;
            }
            if !s.stationary {
                continue;
            }
            report.stationary += 1;
            let slack = s.residuals.min_slack();
            if slack >= 0.0 {
                report.feasible += 1;
            }
            if slack > report.best_slack {
                report.best_slack = slack;
                report.best = Some(s);
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimality::variance_function;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(i: usize, j: usize) -> Pair {
        Pair::new(i, j).unwrap()
    }

    #[test]
    fn a_third_forces_another_zero_term() {
        // w = 1/3 zeroes its term, so equality forces another term to zero.
        let l = 0.2;
        assert_eq!(l * ((1.0f64 / 3.0) * (1.0 / 3.0) - (1.0 / 3.0) / 3.0), 0.0);
        let w: f64 = 0.1;
        assert!(l * (w * w - w / 3.0) < 0.0);
    }

    #[test]
    fn equal_weights_and_intensities_solve_but_fail_inequalities() {
        let params = Parameters::zeros(4).unwrap();
        let design = Design::uniform_on(4, &[p(1, 3), p(1, 4), p(2, 3), p(2, 4)]).unwrap();
        let r = disjoint_four_point_residuals(&params, &design).unwrap();
        assert!(r.equation_residuals.iter().all(|x| x.abs() < 1e-15));
        assert!(r.min_slack() < 0.0);
    }

    #[test]
    fn enumerated_solutions_solve_the_system() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let (mut seen, mut stationary) = (0, 0);
        for _ in 0..300 {
            let beta: Vec<f64> = (0..3).map(|_| rng.gen_range(-4.0..4.0)).collect();
            let params = Parameters::new(beta).unwrap();
            for missing in DISJOINT_ORBIT {
                for s in disjoint_solutions(&params, missing).unwrap() {
                    seen += 1;
                    assert!(s.residuals.equation_residuals.iter().all(|x| x.abs() < 1e-13));
                    assert!((s.design.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
                    let d = variance_function(&s.design, &params).unwrap();
                    let flat = s.residuals.support.iter().all(|p| (d[p.index(4)] - 3.0).abs() <= STATIONARITY_TOLERANCE);
                    assert_eq!(flat, s.stationary);
                    if !flat {
                        continue;
                    }
                    // at a stationary point the inequality left-hand sides
                    // are the variances of the missing pairs
                    stationary += 1;
                    let [a, b] = missing;
                    let lhs = [3.0 - s.residuals.inequality_slacks[0], 3.0 - s.residuals.inequality_slacks[1]];
                    assert!((lhs[0] - d[a.index(4)]).abs() < 1e-7 * lhs[0].abs().max(1.0));
                    assert!((lhs[1] - d[b.index(4)]).abs() < 1e-7 * lhs[1].abs().max(1.0));
                }
            }
        }
        assert!(seen > 100);
        assert!(stationary > 10, "{stationary}");
    }

    #[test]
    fn shared_vertex_designs_are_rejected() {
        let params = Parameters::zeros(4).unwrap();
        let design = Design::uniform_on(4, &[p(1, 4), p(2, 3), p(2, 4), p(3, 4)]).unwrap();
        assert_eq!(disjoint_four_point_residuals(&params, &design), Err(Error::WrongOrbit));
    }

    #[test]
    fn small_search_certifies_nothing() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = search_disjoint(2000, 6.0, &mut rng).unwrap();
        assert_eq!(r.starts, 2000);
        assert!(r.solutions >= r.stationary && r.stationary >= r.feasible);
        assert!(r.stationary > 0);
        assert!(r.best.as_ref().map_or(true, |b| b.stationary));
        assert_eq!(r.certified, 0);
    }
}
