//! Numerical evidence that the claw `(12, 13, 14)` is never optimal.
//!
//! With `π_4 = 1`, optimality of the claw requires
//!
//! ```text
//! (π2 + π3)(π1² + π2 π3) ≤ π1 (π2 − π3)²
//! (π2 + 1)(π1² + π2)     ≤ π1 (π2 − 1)²
//! (π3 + 1)(π1² + π3)     ≤ π1 (π3 − 1)²
//! ```

use rand::Rng;

use crate::math;
use crate::model::{IntensityTable, Pair};

/// `rhs − lhs` of the three inequalities; feasible when all are `≥ 0`.
pub fn claw_slacks(pi: [f64; 3]) -> [f64; 3] {
    let [p1, p2, p3] = pi;
    [
        p1 * (p2 - p3) * (p2 - p3) - (p2 + p3) * (p1 * p1 + p2 * p3),
        p1 * (p2 - 1.0) * (p2 - 1.0) - (p2 + 1.0) * (p1 * p1 + p2),
        p1 * (p3 - 1.0) * (p3 - 1.0) - (p3 + 1.0) * (p1 * p1 + p3),
    ]
}

/// Slacks scaled by `|lhs| + |rhs|`, in `[−1, 1]`.
pub fn claw_normalized_slacks(pi: [f64; 3]) -> [f64; 3] {
    let [p1, p2, p3] = pi;
    let parts = [
        ((p2 + p3) * (p1 * p1 + p2 * p3), p1 * (p2 - p3) * (p2 - p3)),
        ((p2 + 1.0) * (p1 * p1 + p2), p1 * (p2 - 1.0) * (p2 - 1.0)),
        ((p3 + 1.0) * (p1 * p1 + p3), p1 * (p3 - 1.0) * (p3 - 1.0)),
    ];
    parts.map(|(lhs, rhs)| (rhs - lhs) / (lhs.abs() + rhs.abs()))
}

/// The same system in intensities: `λ_ab λ_ac/(λ_ab + λ_ac) − λ_bc` for the
/// three non-edges `23, 24, 34`.
pub fn claw_lambda_slacks(table: &IntensityTable) -> [f64; 3] {
    let l = |a, b| table.get(Pair::new_unchecked(a, b));
    let bound = |x: f64, y: f64| x * y / (x + y);
    [
        bound(l(1, 2), l(1, 3)) - l(2, 3),
        bound(l(1, 2), l(1, 4)) - l(2, 4),
        bound(l(1, 3), l(1, 4)) - l(3, 4),
    ]
}

/// Log-spaced grid of cell centers over `(lower, upper)³`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClawGrid {
    pub lower: f64,
    pub upper: f64,
    pub steps: usize,
}

impl Default for ClawGrid {
    fn default() -> Self {
        ClawGrid { lower: 1e-3, upper: 1e3, steps: 100 }
    }
}

impl ClawGrid {
    pub fn points(&self) -> u64 {
        (self.steps as u64).pow(3)
    }

    pub fn coordinate(&self, k: usize) -> f64 {
        let (lo, hi) = (math::ln(self.lower), math::ln(self.upper));
        math::exp(lo + (k as f64 + 0.5) * (hi - lo) / self.steps as f64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClawScanReport {
    pub points: u64,
    pub feasible: u64,
    /// Largest over points of the smallest normalized slack.
    pub best_min_slack: f64,
    pub best_point: [f64; 3],
}

impl Default for ClawScanReport {
    fn default() -> Self {
        ClawScanReport::empty()
    }
}

impl ClawScanReport {
    fn empty() -> Self {
        ClawScanReport { points: 0, feasible: 0, best_min_slack: f64::NEG_INFINITY, best_point: [0.0; 3] }
    }

    fn record(&mut self, pi: [f64; 3]) {
        self.points += 1;
        let s = claw_normalized_slacks(pi);
        let min = s[0].min(s[1]).min(s[2]);
        if min >= 0.0 {
            self.feasible += 1;
        }
        if min > self.best_min_slack {
            self.best_min_slack = min;
            self.best_point = pi;
        }
    }

    /// Combines reports of disjoint scans.
    pub fn merge(mut self, other: ClawScanReport) -> ClawScanReport {
        self.points += other.points;
        self.feasible += other.feasible;
        if other.best_min_slack > self.best_min_slack {
            self.best_min_slack = other.best_min_slack;
            self.best_point = other.best_point;
        }
        self
    }
}

/// Scans the slab of the grid with first index in `first`.
pub fn claw_grid_scan_slab(grid: &ClawGrid, first: core::ops::Range<usize>) -> ClawScanReport {
    let mut report = ClawScanReport::empty();
    for a in first {
        let p1 = grid.coordinate(a);
        for b in 0..grid.steps {
            let p2 = grid.coordinate(b);
            for c in 0..grid.steps {
                report.record([p1, p2, grid.coordinate(c)]);
            }
        }
    }
    report
}

pub fn claw_grid_scan(grid: &ClawGrid) -> ClawScanReport {
    claw_grid_scan_slab(grid, 0..grid.steps)
}

/// Log-uniform random points over `(lower, upper)³`.
pub fn claw_random_scan<R: Rng + ?Sized>(grid: &ClawGrid, samples: u64, rng: &mut R) -> ClawScanReport {
    let (lo, hi) = (math::ln(grid.lower), math::ln(grid.upper));
    let mut report = ClawScanReport::empty();
    for _ in 0..samples {
        let mut draw = || math::exp(rng.gen_range(lo..hi));
        report.record([draw(), draw(), draw()]);
    }
    report
}
