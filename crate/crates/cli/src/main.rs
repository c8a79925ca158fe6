//! `qls`: command-line front end.
//!
//! Exit codes: 0 success, 2 rejected config or arguments, 3 I/O failure,
//! 4 solver or verifier abort.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qls_core::artifact::{self, Manifest};
use qls_core::config::SimulateConfig;
use qls_core::coords::{forward_map, inverse_map, SampledProfile};
use qls_core::estimates::{self, CaseKind, CaseParams, Ensemble, EstimateName};
use qls_core::norms::{NormParams, NormReport};
use qls_core::spectral::io::{read_field, write_field};
use qls_core::spectral::Grid;
use qls_core::states::{default_x_half_length, PerturbationSpec};
use qls_core::Error;

#[derive(Parser)]
#[command(name = "qls", version, about = "Spectral lab for the degenerate quasilinear Schrödinger equation")]
struct Cli {
    /// JSON config (simulate).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for the estimate ensemble; recorded in every manifest.
    #[arg(long, global = true, default_value_t = estimates::DEFAULT_SEED)]
    seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the x or y solver from `--config` into `--out`.
    Simulate,
    /// Map a stored field between physical and flattened coordinates.
    Transform {
        input: PathBuf,
        #[arg(long, value_enum)]
        direction: Direction,
        /// Gauge value used by the inverse map.
        #[arg(long, default_value_t = 0.0)]
        c: f64,
        /// Points of the target grid.
        #[arg(long = "grid-n")]
        grid_n: Option<usize>,
        /// Half-length of the target grid.
        #[arg(long = "grid-l")]
        grid_l: Option<f64>,
    },
    /// Norm report of a stored field as JSON.
    Norms {
        input: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        s: f64,
        #[arg(long, default_value_t = 0.0)]
        tau: f64,
    },
    /// Ensemble check of the product and commutator estimates.
    VerifyEstimates {
        #[arg(long)]
        case: Option<String>,
        #[arg(long)]
        s: Option<f64>,
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long, default_value_t = estimates::DEFAULT_MEMBERS)]
        members: usize,
    },
    /// Recompute stability.csv from the snapshots of a finished run.
    Stability { artifact: Option<PathBuf> },
    /// Perturbed-breather preset: N = 256, T = 0.5, five slices.
    Figure1,
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    /// Physical field to flattened `U` and `W`.
    Forward,
    /// Flattened `U` back to the physical grid.
    Inverse,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Schema(_) | Error::OutsideValidity { .. } => 2,
            Error::Io(_) | Error::Json(_) => 3,
            _ => 4,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

fn io_fail(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure { code: 3, message: format!("{}: {e}", path.display()) }
}

fn out_dir(cli: &Cli) -> Result<&Path, Failure> {
    cli.out.as_deref().ok_or_else(|| usage("--out DIR is required"))
}

fn load_config(cli: &Cli) -> Result<SimulateConfig, Failure> {
    let path = cli.config.as_deref().ok_or_else(|| usage("--config PATH is required"))?;
    let text = fs::read_to_string(path).map_err(|e| io_fail(path, e))?;
    Ok(SimulateConfig::from_json(&text)?)
}

fn report_run(m: &Manifest, dir: &Path) {
    println!(
        "{}: {} snapshots in {:.1} s -> {}",
        m.command,
        m.snapshots.len(),
        m.wall_seconds,
        dir.display()
    );
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| usage(format!("--threads: {e}")))?;
    }
    match &cli.command {
        Command::Simulate => {
            // Validate before touching the filesystem.
            let cfg = load_config(cli)?;
            let dir = out_dir(cli)?;
            let m = artifact::simulate(&cfg, dir, "simulate", cli.seed)?;
            report_run(&m, dir);
        }
        Command::Figure1 => {
            let dir = out_dir(cli)?;
            let m = artifact::simulate(&SimulateConfig::figure1(), dir, "figure1", cli.seed)?;
            report_run(&m, dir);
        }
        Command::Stability { artifact: path } => {
            let dir = path.as_deref().or(cli.out.as_deref()).ok_or_else(|| usage("artifact directory required"))?;
            let rows = artifact::recompute_stability(dir)?;
            for (t, r) in rows {
                println!("t = {t:.4}  distance = {:.6e}  theta* = {:.6}  h* = {:.6}{}", r.distance, r.theta, r.h, if r.boundary_flag { "  (boundary)" } else { "" });
            }
        }
        Command::Norms { input, s, tau } => {
            let (f, t) = read_field(input)?;
            let r = NormReport::evaluate(t, &f, NormParams::new(*s, *tau));
            let json = serde_json::to_string_pretty(&r).map_err(Error::from)?;
            if let Some(dir) = &cli.out {
                fs::create_dir_all(dir).map_err(|e| io_fail(dir, e))?;
                fs::write(dir.join("norms.json"), &json).map_err(|e| io_fail(dir, e))?;
            }
            println!("{json}");
        }
        Command::Transform { input, direction, c, grid_n, grid_l } => {
            let dir = out_dir(cli)?;
            let (f, t) = read_field(input)?;
            fs::create_dir_all(dir).map_err(|e| io_fail(dir, e))?;
            match direction {
                Direction::Forward => {
                    let profile = SampledProfile::new(&f)?;
                    let n = grid_n.unwrap_or(f.len());
                    let img = match forward_map(&profile, Grid::new(grid_l.unwrap_or(qls_core::config::DEFAULT_Y_HALF_LENGTH), n)?) {
                        // Without an explicit extent, use as much of the line as the samples resolve.
                        Err(Error::InsufficientCoverage { resolved, .. }) if grid_l.is_none() => forward_map(&profile, Grid::new(resolved, n)?)?,
                        r => r?,
                    };
                    write_field(&dir.join("U.bin"), &img.u, t)?;
                    write_field(&dir.join("W.bin"), &img.w, t)?;
                }
                Direction::Inverse => {
                    let xg = Grid::new(grid_l.unwrap_or(default_x_half_length()), grid_n.unwrap_or(f.len()))?;
                    write_field(&dir.join("u.bin"), &inverse_map(&f, *c, xg)?, t)?;
                }
            }
        }
        Command::VerifyEstimates { case, s, tau, members } => {
            let ensemble = Ensemble { seed: cli.seed, members: *members, ..Ensemble::default() };
            let names: Vec<EstimateName> = match case {
                Some(c) => vec![c.parse().map_err(|e: Error| usage(e.to_string()))?],
                None => EstimateName::ALL.to_vec(),
            };
            let mut reports = Vec::new();
            let mut chain = None;
            for name in names {
                if name.kind() == CaseKind::AnalyticChain {
                    if chain.is_none() {
                        chain = Some(estimates::run_analytic_chain(&PerturbationSpec::default(), 1.0, 10)?);
                    }
                    continue;
                }
                let d = name.default_params();
                let p = CaseParams { s: s.unwrap_or(d.s), tau: tau.unwrap_or(d.tau) };
                reports.push(estimates::run_case(name, Some(p), &ensemble)?);
            }
            print!("{}", estimates::format_table(&reports));
            if let Some(ch) = &chain {
                let worst = ch.rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
                println!("analytic chain: worst ratio {worst:.6}, {}", if ch.all_hold { "ok" } else { "FAIL" });
            }
            let json = serde_json::json!({ "seed": cli.seed, "members": members, "cases": reports, "analytic_chain": chain });
            let text = serde_json::to_string_pretty(&json).map_err(Error::from)?;
            if let Some(dir) = &cli.out {
                fs::create_dir_all(dir).map_err(|e| io_fail(dir, e))?;
                fs::write(dir.join("estimates.json"), text).map_err(|e| io_fail(dir, e))?;
            }
            if reports.iter().any(|r| !r.passed) || chain.as_ref().is_some_and(|c| !c.all_hold) {
                return Err(Failure { code: 4, message: "estimate verification failed".into() });
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("qls: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
