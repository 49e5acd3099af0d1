use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use loopforge::verify::{self, VerifyConfig};

#[derive(Parser)]
#[command(name = "loopforge", version, about = "Truncated loop-space numerics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a property suite: loops, lie, paths, holonomy, weights, fock, dirac or all.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Json,
    Csv,
}

#[derive(clap::Args)]
struct VerifyArgs {
    suite: String,
    /// Fourier window N.
    #[arg(long, default_value_t = 16)]
    modes: usize,
    /// Fibre dimension n.
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Fock mode window K.
    #[arg(long, default_value_t = 6)]
    fock_window: usize,
    /// Particle cap P.
    #[arg(long, default_value_t = 6)]
    particle_cap: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, env = "LOOPFORGE_SEED", default_value_t = 42)]
    seed: u64,
    /// Transport steps per unit time.
    #[arg(long, default_value_t = 4096)]
    steps: usize,
    #[arg(long, value_enum, default_value = "json")]
    report: ReportFormat,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record wall-clock runtimes (makes reports non-reproducible).
    #[arg(long)]
    timings: bool,
}

fn main() -> ExitCode {
    let Command::Verify(args) = Cli::parse().command;
    let cfg = VerifyConfig {
        modes: args.modes,
        n: args.dim,
        fock_window: args.fock_window,
        particle_cap: args.particle_cap,
        seed: args.seed,
        tol: args.tol,
        steps: args.steps,
        timings: args.timings,
    };
    let report = match verify::run_suite(&args.suite, &cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let text = match args.report {
        ReportFormat::Json => match report.to_json() {
            Ok(t) => t + "\n",
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        },
        ReportFormat::Csv => report.to_csv(),
    };
    match &args.out {
        Some(path) => {
            if let Err(e) = fs::write(path, &text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
            eprintln!("{}", verify::summary(&report));
        }
        None => print!("{text}"),
    }
    for c in report.failures() {
        eprintln!("FAIL {}: residual {:e} > {:e}", c.name, c.residual, c.tolerance);
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
