use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pseudoherm_cli::{
    cmd_check_pseudo, cmd_check_pt, cmd_classify, cmd_construct_g, cmd_evolve, cmd_find_parity, cmd_sweep_kh,
    CliResult, KhSweep, RunConfig,
};

/// PT-symmetry, pseudo-Hermiticity and Krein signature analysis.
///
/// Exit status: 0 when the checked property holds, 1 when it fails, 2 on input or
/// usage errors.
#[derive(Debug, Parser)]
#[command(name = "pseudoherm", version)]
struct Cli {
    /// Relative tolerance (default 1e-10).
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Seed for randomized steps.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Output path for the produced matrix or CSV (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check P H̄ = H P and P² = I.
    CheckPt { hamiltonian: PathBuf, parity: PathBuf },
    /// Check H† G = G H with G Hermitian and nonsingular.
    CheckPseudo { hamiltonian: PathBuf, metric: PathBuf },
    /// Build a metric G from the Jordan form of H.
    ConstructG { hamiltonian: PathBuf },
    /// Krein kind of every eigenvalue; exit 0 when strongly stable.
    Classify { hamiltonian: PathBuf, metric: PathBuf },
    /// Find a nonsingular P with H P = P H̄.
    FindParity { hamiltonian: PathBuf },
    /// Evolve x' = -i H x and report the drift of x† G x.
    Evolve {
        hamiltonian: PathBuf,
        metric: PathBuf,
        /// Initial vector file; random from --seed when absent.
        #[arg(long)]
        x0: Option<PathBuf>,
        /// Times at which to report.
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 1.0, 10.0])]
        t: Vec<f64>,
    },
    /// Sweep the Kelvin–Helmholtz family in u20 and write trajectories as CSV.
    SweepKh {
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        #[arg(long, default_value_t = 3.0)]
        g: f64,
        #[arg(long, default_value_t = 2.0)]
        rho10: f64,
        #[arg(long, default_value_t = 3.0)]
        rho20: f64,
        #[arg(long, default_value_t = 1.0)]
        u10: f64,
        #[arg(long, default_value_t = 2.3)]
        u20_min: f64,
        #[arg(long, default_value_t = 2.7)]
        u20_max: f64,
        #[arg(long, default_value_t = 81)]
        steps: usize,
    },
}

fn run(cli: Cli, w: &mut dyn Write) -> CliResult<i32> {
    let cfg = RunConfig::new(cli.tol, cli.seed, cli.out)?;
    match cli.command {
        Command::CheckPt { hamiltonian, parity } => cmd_check_pt(&hamiltonian, &parity, &cfg, w),
        Command::CheckPseudo { hamiltonian, metric } => cmd_check_pseudo(&hamiltonian, &metric, &cfg, w),
        Command::ConstructG { hamiltonian } => cmd_construct_g(&hamiltonian, &cfg, w),
        Command::Classify { hamiltonian, metric } => cmd_classify(&hamiltonian, &metric, &cfg, w),
        Command::FindParity { hamiltonian } => cmd_find_parity(&hamiltonian, &cfg, w),
        Command::Evolve {
            hamiltonian,
            metric,
            x0,
            t,
        } => cmd_evolve(&hamiltonian, &metric, x0.as_deref(), &t, &cfg, w),
        Command::SweepKh {
            k,
            g,
            rho10,
            rho20,
            u10,
            u20_min,
            u20_max,
            steps,
        } => {
            let s = KhSweep {
                k,
                g,
                rho10,
                rho20,
                u10,
                u20_min,
                u20_max,
                steps,
            };
            cmd_sweep_kh(&s, &cfg, w)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let code = match run(cli, &mut out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    let _ = out.flush();
    ExitCode::from(code as u8)
}
