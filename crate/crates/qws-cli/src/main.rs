//! `qws`: batch front-end for spectral reports, lattice band scans and the
//! invariant suite.
//!
//! Exit codes: 0 success, 1 I/O or input error, 2 specification violation,
//! 3 oracle or verification mismatch.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qws_core::io::{read_json, write_band_csv, write_json, CoinSpec, GraphSpec, ReportJson};
use qws_core::lattice::{band_scan, Convention};
use qws_core::sample::{seeded_circle_samples, Instance};
use qws_core::spectral::{charpoly_identity_check, full_report, ReportOptions};
use qws_core::verify::{run_suite, Fault, SuiteOptions};
use qws_core::{Error, ErrorClass, Result};

const CHARPOLY_SAMPLES: usize = 16;
const CHARPOLY_TOL: f64 = 1e-8;

#[derive(Parser, Debug)]
#[command(name = "qws", version, about = "Coined quantum walk spectra on finite graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Spectral report for a graph and coin file, checked against dense diagonalization.
    Analyze {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        coins: PathBuf,
        /// Output JSON path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        tol: TolArgs,
        /// Seed for the determinant-identity sample points.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Band scan of the Grover walk with moving shift on Z^d over an N^d momentum grid.
    Lattice {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        grid: usize,
        #[arg(long, value_enum, default_value_t = ConventionArg::CaseIi)]
        convention: ConventionArg,
        /// Output CSV path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Runs the invariant suite on seeded random instances.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        tol: TolArgs,
        /// Negative control, e.g. `corrupt-K`.
        #[arg(long, default_value = "none")]
        fault: String,
    },
    /// Checks the determinant identity between U and T at random points on |lambda| = 2.
    Charpoly {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        coins: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        tol: TolArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(clap::Args, Debug, Clone, Copy)]
struct TolArgs {
    /// Eigenvalue clustering tolerance.
    #[arg(long, default_value_t = qws_core::TOL_CLUSTER, value_parser = positive)]
    tol: f64,
    /// Eigenvector residual tolerance.
    #[arg(long, default_value_t = qws_core::TOL_RESIDUAL, value_parser = positive)]
    tol_residual: f64,
}

impl TolArgs {
    fn report_options(self) -> ReportOptions {
        ReportOptions {
            tol_cluster: self.tol,
            tol_residual: self.tol_residual,
            ..ReportOptions::default()
        }
    }
}

fn positive(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum ConventionArg {
    #[value(name = "case_i")]
    CaseI,
    #[value(name = "case_ii")]
    CaseIi,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::CaseI => Convention::CaseI,
            ConventionArg::CaseIi => Convention::CaseII,
        }
    }
}

/// A completed run that still fails verification.
struct Mismatch(String);

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    match run(cli.command) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(Mismatch(msg))) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.class() {
                ErrorClass::Io => 1,
                ErrorClass::SpecViolation => 2,
                ErrorClass::OracleMismatch => 3,
            })
        }
    }
}

fn configure_threads() -> Result<()> {
    if let Ok(value) = std::env::var("QWS_THREADS") {
        let n: usize = value
            .parse()
            .map_err(|_| Error::Input(format!("QWS_THREADS must be a positive integer, got {value:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| Error::Input(e.to_string()))?;
    }
    Ok(())
}

fn load_instance(graph: &Path, coins: &Path) -> Result<Instance> {
    let (g, shift) = read_json::<GraphSpec>(graph)?.build()?;
    let coins = read_json::<CoinSpec>(coins)?.build(&g)?;
    Ok(Instance { name: graph.display().to_string(), graph: g, coins, shift })
}

fn emit_json(out: Option<&Path>, value: &serde_json::Value) -> Result<()> {
    match out {
        Some(path) => write_json(path, value),
        None => {
            let text = serde_json::to_string_pretty(value)?;
            writeln!(std::io::stdout(), "{text}")?;
            Ok(())
        }
    }
}

fn charpoly_deviation(inst: &Instance, seed: u64, opts: &ReportOptions) -> Result<f64> {
    use qws_core::coins::kernel_cons;
    use qws_core::discriminant::{build_boundary, build_discriminant};
    use qws_core::walk::{coin_matrix, evolution, shift_matrix};

    let (coins, shift) = inst.flip_flop_form()?;
    let g = &inst.graph;
    let s = shift_matrix(g, &shift)?;
    let u = evolution(&s, &coin_matrix(g, &coins)?)?;
    let k = build_boundary(g, &kernel_cons(&coins, opts.tol_cluster)?)?;
    let t = build_discriminant(g, &k, &s)?;
    let points = seeded_circle_samples(seed, CHARPOLY_SAMPLES, 2.0);
    charpoly_identity_check(u.matrix(), t.matrix(), coins.kappa(), coins.kappa_prime(), coins.p(), &points)
}

fn run(command: Command) -> Result<std::result::Result<(), Mismatch>> {
    match command {
        Command::Analyze { graph, coins, out, tol, seed } => {
            let opts = tol.report_options();
            let inst = load_instance(&graph, &coins)?;
            let report = full_report(&inst.graph, &inst.coins, &inst.shift, &opts)?;
            let verdict = report.check(&opts);
            let deviation = charpoly_deviation(&inst, seed, &opts)?;
            let mut json = ReportJson::new(&report, verdict.is_ok() && deviation <= CHARPOLY_TOL);
            json.seed = Some(seed);
            json.charpoly_deviation = Some(deviation);
            emit_json(out.as_deref(), &serde_json::to_value(&json)?)?;
            if let Err(e) = verdict {
                return Ok(Err(Mismatch(e.to_string())));
            }
            if deviation > CHARPOLY_TOL {
                return Ok(Err(Mismatch(format!("determinant identity deviation {deviation:.3e}"))));
            }
            Ok(Ok(()))
        }
        Command::Lattice { d, grid, convention, out, tol } => {
            if grid == 0 || grid > 64 {
                return Err(Error::InvalidParameter(format!("grid must be in 1..=64, got {grid}")));
            }
            let convention = Convention::from(convention);
            let (_, _, p) = convention.certificate(d)?;
            let rows = band_scan(d, grid, convention, &tol.report_options())?;
            match out {
                Some(path) => {
                    let file = std::fs::File::create(&path).map_err(|e| Error::from(e).context(path.display().to_string()))?;
                    write_band_csv(std::io::BufWriter::new(file), d, p, &rows)?;
                }
                None => write_band_csv(std::io::stdout().lock(), d, p, &rows)?,
            }
            Ok(Ok(()))
        }
        Command::Verify { seed, tol, fault } => {
            let fault: Fault = fault.parse()?;
            let opts = SuiteOptions { seed, fault, report: tol.report_options(), ..SuiteOptions::default() };
            let results = run_suite(&opts)?;
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "# qws verify seed={seed} instances={} fault={fault:?}", opts.instances)?;
            writeln!(stdout, "{:<58} {:>11} {:>9}  result", "check", "value", "tol")?;
            for r in &results {
                writeln!(stdout, "{r}")?;
            }
            let failed: Vec<&str> = results.iter().filter(|r| !r.pass).map(|r| r.name.as_str()).collect();
            writeln!(stdout, "{} of {} checks passed", results.len() - failed.len(), results.len())?;
            if failed.is_empty() {
                Ok(Ok(()))
            } else {
                Ok(Err(Mismatch(failed.join("; "))))
            }
        }
        Command::Charpoly { graph, coins, out, tol, seed } => {
            let inst = load_instance(&graph, &coins)?;
            let deviation = charpoly_deviation(&inst, seed, &tol.report_options())?;
            let pass = deviation <= CHARPOLY_TOL;
            emit_json(
                out.as_deref(),
                &serde_json::json!({
                    "seed": seed,
                    "samples": CHARPOLY_SAMPLES,
                    "radius": 2.0,
                    "max_relative_deviation": deviation,
                    "tol": CHARPOLY_TOL,
                    "pass": pass,
                }),
            )?;
            if pass {
                Ok(Ok(()))
            } else {
                Ok(Err(Mismatch(format!("determinant identity deviation {deviation:.3e}"))))
            }
        }
    }
}
