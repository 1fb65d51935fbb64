use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use entrofilt::filter::FilterMode;
use entrofilt::harness::{convergence_study, run_case, HarnessError, RunConfig};
use entrofilt::physics::{EntropyFunctional, RiemannSolver};

#[derive(Parser)]
#[command(
    name = "entrofilt",
    version,
    about = "High-order Euler solver with entropy-constrained filtering"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one case to its end time.
    Run(RunArgs),
    /// Run a case on several meshes and fit convergence rates.
    Converge(ConvergeArgs),
    /// Run the built-in property checks.
    Selftest,
}

#[derive(Args)]
struct CommonArgs {
    /// TOML file with run settings; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    case: Option<String>,
    #[arg(long)]
    order: Option<usize>,
    #[arg(long)]
    cfl: Option<f64>,
    #[arg(long)]
    riemann: Option<RiemannSolver>,
    #[arg(long)]
    filter: Option<FilterMode>,
    /// Override the case end time.
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    rho_min: Option<f64>,
    #[arg(long)]
    p_min: Option<f64>,
    #[arg(long)]
    eps_sigma: Option<f64>,
    /// Entropy functional of the minimum entropy bound: specific or density.
    #[arg(long)]
    entropy: Option<EntropyFunctional>,
    /// Output directory for CSV files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Steps between progress lines.
    #[arg(long)]
    output_every: Option<usize>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Element counts, `Nx` or `Nx,Ny`.
    #[arg(long, value_delimiter = ',')]
    mesh: Option<Vec<usize>>,
}

#[derive(Args)]
struct ConvergeArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma-separated list of element counts per direction.
    #[arg(long, value_delimiter = ',', required = true)]
    meshes: Vec<usize>,
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(1)
}

fn resolve(common: CommonArgs, mesh: Option<Vec<usize>>) -> Result<RunConfig, HarnessError> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::from_file(path)?,
        None => {
            let case = common.case.clone().ok_or_else(|| {
                HarnessError::Config("--case is required without --config".into())
            })?;
            let order = common.order.ok_or_else(|| {
                HarnessError::Config("--order is required without --config".into())
            })?;
            RunConfig::new(&case, order)
        }
    };
    if let Some(v) = common.case {
        cfg.case = v;
    }
    if let Some(v) = common.order {
        cfg.order = v;
    }
    if mesh.is_some() {
        cfg.mesh = mesh;
    }
    if common.cfl.is_some() {
        cfg.cfl = common.cfl;
    }
    if let Some(v) = common.riemann {
        cfg.riemann = v;
    }
    if let Some(v) = common.filter {
        cfg.filter = v;
    }
    if common.t_end.is_some() {
        cfg.t_end = common.t_end;
    }
    if common.rho_min.is_some() {
        cfg.rho_min = common.rho_min;
    }
    if common.p_min.is_some() {
        cfg.p_min = common.p_min;
    }
    if common.eps_sigma.is_some() {
        cfg.eps_sigma = common.eps_sigma;
    }
    if let Some(v) = common.entropy {
        cfg.entropy = v;
    }
    if common.out.is_some() {
        cfg.out = common.out;
    }
    if let Some(v) = common.output_every {
        cfg.output_every = v;
    }
    let case = cfg.case_spec()?;
    cfg.mesh_counts(&case)?;
    cfg.solver_config(&case)?;
    if let Some(w) = cfg.filter_warning(&case) {
        eprintln!("{w}");
    }
    Ok(cfg)
}

fn failure(e: HarnessError) -> ExitCode {
    eprintln!("error: {e}");
    let mut src = std::error::Error::source(&e);
    while let Some(s) = src {
        eprintln!("  caused by: {s}");
        src = s.source();
    }
    if e.is_constraint_violation() {
        ExitCode::from(2)
    } else {
        ExitCode::from(1)
    }
}

fn init_threads() -> Result<(), String> {
    if let Ok(v) = std::env::var("ENTROFILT_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| format!("ENTROFILT_THREADS must be a positive integer, got '{v}'"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Err(e) = init_threads() {
        return usage(e);
    }
    let stdout = std::io::stdout();
    match cli.command {
        Command::Run(args) => {
            let cfg = match resolve(args.common, args.mesh) {
                Ok(c) => c,
                Err(e) => return usage(e),
            };
            let mut out = stdout.lock();
            match run_case(&cfg, Some(&mut out)) {
                Ok(outcome) => {
                    for (k, v) in outcome.report.summary_entries() {
                        let _ = writeln!(out, "{k:>22}: {v}");
                    }
                    let _ = writeln!(
                        out,
                        "{:>22}: {:.2}",
                        "wall_time_s", outcome.report.wall_time
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => failure(e),
            }
        }
        Command::Converge(args) => {
            let cfg = match resolve(args.common, None) {
                Ok(c) => c,
                Err(e) => return usage(e),
            };
            let mut out = stdout.lock();
            match convergence_study(&cfg, &args.meshes, Some(&mut out)) {
                Ok(table) => {
                    let _ = writeln!(
                        out,
                        "fitted rate: l1 = {:.3}, l2 = {:.3}, l2_root_sum = {:.3}",
                        table.rate_l1, table.rate_l2, table.rate_l2_root_sum
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => failure(e),
            }
        }
        Command::Selftest => {
            let results = entrofilt::selftest::run_all();
            let mut failed = 0;
            for r in &results {
                println!(
                    "{} {}: {}",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.name,
                    r.detail
                );
                failed += usize::from(!r.passed);
            }
            println!(
                "{} of {} checks passed",
                results.len() - failed,
                results.len()
            );
            if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}
