//! Command-line surface. Handlers write one JSON or CSV document to `out`
//! and return the process exit code.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use btdesign_core::four::{region_tests_m4, ClawGrid};
use btdesign_core::graphs::MAX_ENUMERATION_M;
use btdesign_core::optimality::{kw_check_with_tolerance, KW_TOLERANCE};
use btdesign_core::regions::all_path_designs;
use btdesign_core::sweep::{locate_transitions, LineSpec};
use btdesign_core::{classify_m4, find_optimal_saturated, kw_check, region_membership, solve, RegionKind, SolverConfig};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::io::{parse_beta, parse_list, DesignFile, ScanSpec};
use crate::parallel::{
    claw_grid_scan_parallel, claw_random_scan_parallel, efficiency_curve_parallel, scan_grid, search_disjoint_parallel,
    thread_pool, write_efficiency_csv, write_scan_csv,
};
use crate::report::{
    log_det, ClassifyReport, ClawReport, ClawScanSummary, DisjointReport, OptimizeReport, PathReport, RegionReport,
    RegionTestsReport, TransitionReport, VerifyReport,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_NOT_OPTIMAL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

/// Paths listed in full by `classify` up to this many alternatives.
const LIST_ALL_PATHS_UP_TO: usize = 6;
const LISTED_PATHS: usize = 10;

#[derive(Debug, Parser)]
#[command(name = "btdesign", version, about = "Locally D-optimal designs for the Bradley-Terry model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for the optimal design; adds the closed-form region for m = 4.
    Optimize {
        #[arg(long)]
        m: usize,
        /// Comma-separated β_1..β_{m-1}; β_m = 0.
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
        #[arg(long, default_value_t = 1e-8)]
        tolerance: f64,
        #[arg(long, default_value_t = 100_000)]
        max_iterations: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Check a design file with the equivalence theorem.
    Verify {
        #[arg(long)]
        m: usize,
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
        #[arg(long)]
        design: PathBuf,
        #[arg(long, default_value_t = KW_TOLERANCE)]
        tolerance: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Region and certified design; other m test saturated paths, then solve.
    Classify {
        #[arg(long)]
        m: usize,
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Classify every point of a grid (m = 4).
    Scan {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Efficiency of the uniform design along the ray β = t·direction.
    Efficiency {
        #[arg(long, allow_hyphen_values = true, default_value = "1,0.5,1.25")]
        direction: String,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        start: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 12.0)]
        end: f64,
        #[arg(long, default_value_t = 121)]
        steps: usize,
        /// Emit bisected support-size changes as JSON instead of the curve.
        #[arg(long)]
        transitions: bool,
        #[arg(long, default_value_t = 1e-4)]
        bisection_tolerance: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Search the claw inequality system on a log grid and at random.
    ClawScan {
        #[arg(long, default_value_t = 1e-3)]
        lower: f64,
        #[arg(long, default_value_t = 1e3)]
        upper: f64,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        /// Extra log-uniform random samples.
        #[arg(long, default_value_t = 0)]
        random: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Seeded search for optimal designs missing two disjoint pairs (m = 4).
    SearchDisjoint4 {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        starts: u64,
        #[arg(long, default_value_t = 6.0)]
        radius: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Runs the command with output to stdout or the `--output` file.
pub fn run(cli: Cli) -> Result<u8> {
    let target = match &cli.command {
        Command::Optimize { output, .. }
        | Command::Verify { output, .. }
        | Command::Classify { output, .. }
        | Command::Scan { output, .. }
        | Command::Efficiency { output, .. }
        | Command::ClawScan { output, .. }
        | Command::SearchDisjoint4 { output, .. } => output.clone(),
    };
    match target {
        Some(path) => {
            let mut out = BufWriter::new(File::create(path)?);
            let code = execute(cli.command, &mut out)?;
            out.flush()?;
            Ok(code)
        }
        None => {
            let stdout = std::io::stdout();
            let mut out = stdout.lock();
            execute(cli.command, &mut out)
        }
    }
}

pub fn execute(command: Command, out: &mut dyn Write) -> Result<u8> {
    match command {
        Command::Optimize { m, beta, tolerance, max_iterations, .. } => {
            let params = parse_beta(&beta, m)?;
            let config = SolverConfig { kw_tolerance: tolerance, max_iterations, ..SolverConfig::default() };
            let result = solve(&params, &config)?;
            let region = if m == 4 { Some(classify_m4(&params)?) } else { None };
            write_json(out, &OptimizeReport::new(&params, &result, region.as_ref()))?;
            Ok(if result.converged { EXIT_OK } else { EXIT_NOT_OPTIMAL })
        }
        Command::Verify { m, beta, design, tolerance, .. } => {
            let params = parse_beta(&beta, m)?;
            let file = DesignFile::read(&design)?;
            if file.m != m {
                return Err(CliError::Usage(format!("design file has m = {}, command has m = {m}", file.m)));
            }
            let design = file.to_design()?;
            let certificate = kw_check_with_tolerance(&design, &params, tolerance)?;
            write_json(out, &VerifyReport::new(&params, &design, &certificate))?;
            Ok(optimal_code(certificate.is_optimal))
        }
        Command::Classify { m, beta, .. } => {
            let params = parse_beta(&beta, m)?;
            let report = classify(&params)?;
            write_json(out, &report)?;
            Ok(optimal_code(report.certificate.is_optimal))
        }
        Command::Scan { spec, format, .. } => {
            let spec = ScanSpec::read(&spec)?;
            let rows = scan_grid(&spec, &thread_pool()?)?;
            match format {
                Format::Csv => write_scan_csv(&rows, &spec, &mut *out)?,
                Format::Json => write_json(out, &rows)?,
            }
            Ok(if rows.iter().any(|r| r.failed) { EXIT_NOT_OPTIMAL } else { EXIT_OK })
        }
        Command::Efficiency { direction, start, end, steps, transitions, bisection_tolerance, .. } => {
            let line = LineSpec::new(parse_list(&direction)?).map_err(|e| CliError::Usage(e.to_string()))?;
            let config = SolverConfig::default();
            if transitions {
                let found = locate_transitions(&line, start, end, steps, bisection_tolerance, &config)?;
                let report: Vec<TransitionReport> = found.iter().map(TransitionReport::from).collect();
                write_json(out, &report)?;
            } else {
                let points = efficiency_curve_parallel(&line, start, end, steps, &config, &thread_pool()?)?;
                write_efficiency_csv(&points, &mut *out)?;
            }
            Ok(EXIT_OK)
        }
        Command::ClawScan { lower, upper, steps, random, seed, .. } => {
            if !(lower > 0.0 && upper > lower && upper.is_finite()) || steps == 0 {
                return Err(CliError::Usage("claw grid needs 0 < lower < upper and steps ≥ 1".into()));
            }
            let grid = ClawGrid { lower, upper, steps };
            let pool = thread_pool()?;
            let g = claw_grid_scan_parallel(&grid, &pool);
            let r = (random > 0).then(|| claw_random_scan_parallel(&grid, random, seed, &pool));
            let feasible = g.feasible + r.map_or(0, |r| r.feasible);
            write_json(
                out,
                &ClawReport {
                    lower,
                    upper,
                    steps,
                    seed,
                    grid: ClawScanSummary::from(&g),
                    random: r.as_ref().map(ClawScanSummary::from),
                },
            )?;
            Ok(if feasible == 0 { EXIT_OK } else { EXIT_NOT_OPTIMAL })
        }
        Command::SearchDisjoint4 { seed, starts, radius, .. } => {
            if !(radius > 0.0 && radius.is_finite()) {
                return Err(CliError::Usage("radius must be positive and finite".into()));
            }
            let report = search_disjoint_parallel(starts, radius, seed, &thread_pool()?)?;
            write_json(out, &DisjointReport::new(&report, seed, radius))?;
            Ok(EXIT_OK)
        }
    }
}

fn optimal_code(optimal: bool) -> u8 {
    if optimal {
        EXIT_OK
    } else {
        EXIT_NOT_OPTIMAL
    }
}

fn write_json<T: Serialize + ?Sized>(out: &mut dyn Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

pub fn classify(params: &btdesign_core::Parameters) -> Result<ClassifyReport> {
    let m = params.m();
    let beta = params.beta().to_vec();
    if m == 4 {
        let label = classify_m4(params)?;
        let tests = region_tests_m4(params)?;
        let source = match label.kind {
            RegionKind::Saturated { .. } => "saturated-path",
            _ => "closed-form",
        };
        return Ok(ClassifyReport {
            m,
            beta,
            region: Some(RegionReport::from(&label)),
            source,
            weights: crate::io::weight_map(&label.design),
            log_det: log_det(&label.design, params),
            certificate: (&label.certificate).into(),
            tests: Some(RegionTestsReport::from(&tests)),
            saturated_paths: Vec::new(),
        });
    }

    let mut saturated_paths = Vec::new();
    let mut found = None;
    if m <= MAX_ENUMERATION_M {
        let mut all = all_path_designs(m)?
            .iter()
            .map(|path| region_membership(path, params))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        found = find_optimal_saturated(params)?;
        if m > LIST_ALL_PATHS_UP_TO {
            all.sort_by(|a, b| a.margin.total_cmp(&b.margin));
            all.truncate(LISTED_PATHS);
        }
        saturated_paths = all.iter().map(PathReport::from).collect();
    }
    let (design, region, source) = match found {
        Some((path, membership)) => {
            let region = RegionReport {
                kind: "Saturated",
                label: format!("Saturated({path})"),
                support_size: m - 1,
                missing: btdesign_core::model::pairs(m)
                    .filter(|p| !path.contains_edge(*p))
                    .map(|p| p.to_string())
                    .collect(),
                path: Some(path.to_string()),
                margin: membership.margin,
            };
            (path.design(), Some(region), "saturated-path")
        }
        None => (solve(params, &SolverConfig::default())?.design, None, "solver"),
    };
    let certificate = kw_check(&design, params)?;
    Ok(ClassifyReport {
        m,
        beta,
        region,
        source,
        weights: crate::io::weight_map(&design),
        log_det: log_det(&design, params),
        certificate: (&certificate).into(),
        tests: None,
        saturated_paths,
    })
}
