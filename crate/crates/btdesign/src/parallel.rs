//! Grid scans and seeded searches fanned out over a rayon pool.
//!
//! Work is split into fixed chunks, so results do not depend on the number
//! of threads. Random chunks use their own ChaCha stream of the given seed.

use std::io::Write;

use btdesign_core::four::{
    claw_grid_scan_slab, claw_random_scan, search_disjoint, ClawGrid, ClawScanReport, DisjointSearchReport,
};
use btdesign_core::sweep::{efficiency_at, EfficiencyPoint, LineSpec};
use btdesign_core::{classify_m4, Error, Parameters, SolverConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rayon::ThreadPool;
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::io::ScanSpec;

pub const THREADS_ENV: &str = "BTDESIGN_THREADS";

const RANDOM_CHUNK: u64 = 10_000;
const SEARCH_CHUNK: u64 = 1_000;

/// A pool capped by `BTDESIGN_THREADS`; unset or `0` means all cores.
pub fn thread_pool() -> Result<ThreadPool> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| CliError::Usage(format!("{THREADS_ENV} must be a nonnegative integer, got {v:?}")))?,
        Err(_) => 0,
    };
    Ok(rayon::ThreadPoolBuilder::new().num_threads(threads).build()?)
}

/// One classified grid point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub indices: Vec<usize>,
    pub beta: Vec<f64>,
    /// Region kind name, or the error name when classification failed.
    pub kind: String,
    pub region: String,
    pub support_size: usize,
    pub margin: f64,
    pub failed: bool,
}

fn scan_row(spec: &ScanSpec, n: usize) -> ScanRow {
    let indices = spec.indices(n);
    let beta = spec.beta(&indices);
    let failure = |kind: &str, e: Error| ScanRow {
        indices: indices.clone(),
        beta: beta.clone(),
        kind: kind.to_string(),
        region: e.to_string(),
        support_size: 0,
        margin: f64::NAN,
        failed: true,
    };
    let params = match Parameters::new(beta.clone()) {
        Ok(p) => p,
        Err(e) => return failure("InvalidParameters", e),
    };
    match classify_m4(&params) {
        Ok(label) => ScanRow {
            indices: indices.clone(),
            beta: beta.clone(),
            kind: label.kind.name().to_string(),
            region: label.kind.to_string(),
            support_size: label.kind.support_size(),
            margin: label.margin(),
            failed: false,
        },
        Err(e @ Error::InconsistentClosedForm(_)) => failure("InconsistentClosedForm", e),
        Err(e) => failure("ClassificationFailed", e),
    }
}

/// Rows in lexicographic order of the grid indices.
pub fn scan_grid(spec: &ScanSpec, pool: &ThreadPool) -> Result<Vec<ScanRow>> {
    spec.validate()?;
    Ok(pool.install(|| (0..spec.len()).into_par_iter().map(|n| scan_row(spec, n)).collect()))
}

pub fn write_scan_csv<W: Write>(rows: &[ScanRow], spec: &ScanSpec, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (1..=spec.axes.len()).map(|a| format!("k{a}")).collect();
    header.extend((1..spec.m).map(|k| format!("beta{k}")));
    header.extend(["kind", "region", "support_size", "margin"].map(String::from));
    w.write_record(&header)?;
    for r in rows {
        let mut rec: Vec<String> = r.indices.iter().map(|k| k.to_string()).collect();
        rec.extend(r.beta.iter().map(|b| b.to_string()));
        rec.extend([r.kind.clone(), r.region.clone(), r.support_size.to_string(), r.margin.to_string()]);
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Grid scan by slabs of the first coordinate.
pub fn claw_grid_scan_parallel(grid: &ClawGrid, pool: &ThreadPool) -> ClawScanReport {
    let slabs: Vec<ClawScanReport> =
        pool.install(|| (0..grid.steps).into_par_iter().map(|i| claw_grid_scan_slab(grid, i..i + 1)).collect());
    slabs.into_iter().fold(ClawScanReport::default(), ClawScanReport::merge)
}

pub fn claw_random_scan_parallel(grid: &ClawGrid, samples: u64, seed: u64, pool: &ThreadPool) -> ClawScanReport {
    let chunks = samples.div_ceil(RANDOM_CHUNK);
    let parts: Vec<ClawScanReport> = pool.install(|| {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let n = RANDOM_CHUNK.min(samples - c * RANDOM_CHUNK);
                claw_random_scan(grid, n, &mut stream(seed, c))
            })
            .collect()
    });
    parts.into_iter().fold(ClawScanReport::default(), ClawScanReport::merge)
}

pub fn search_disjoint_parallel(starts: u64, radius: f64, seed: u64, pool: &ThreadPool) -> Result<DisjointSearchReport> {
    let chunks = starts.div_ceil(SEARCH_CHUNK);
    let parts: Vec<DisjointSearchReport> = pool.install(|| {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let n = SEARCH_CHUNK.min(starts - c * SEARCH_CHUNK);
                search_disjoint(n, radius, &mut stream(seed, c))
            })
            .collect::<std::result::Result<_, _>>()
    })?;
    Ok(parts.into_iter().fold(DisjointSearchReport::new(), DisjointSearchReport::merge))
}

fn stream(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

pub fn efficiency_curve_parallel(
    line: &LineSpec,
    start: f64,
    end: f64,
    steps: usize,
    config: &SolverConfig,
    pool: &ThreadPool,
) -> Result<Vec<EfficiencyPoint>> {
    if steps < 2 {
        return Err(CliError::Usage("at least two steps are required".into()));
    }
    let ts: Vec<f64> = (0..steps).map(|k| start + (end - start) * k as f64 / (steps - 1) as f64).collect();
    Ok(pool.install(|| ts.par_iter().map(|t| efficiency_at(line, *t, config)).collect::<std::result::Result<Vec<_>, _>>())?)
}

pub fn write_efficiency_csv<W: Write>(points: &[EfficiencyPoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let m = points.first().map_or(1, |p| p.params.m());
    let mut header = vec!["t".to_string()];
    header.extend((1..m).map(|k| format!("beta{k}")));
    header.extend(["kind", "region", "support_size", "efficiency"].map(String::from));
    w.write_record(&header)?;
    for p in points {
        let mut rec = vec![p.t.to_string()];
        rec.extend(p.params.beta().iter().map(|b| b.to_string()));
        let (kind, region) = match &p.kind {
            Some(k) => (k.name().to_string(), k.to_string()),
            None => ("Solver".to_string(), format!("{}-point support", p.support_size)),
        };
        rec.extend([kind, region, p.support_size.to_string(), p.efficiency.to_string()]);
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
