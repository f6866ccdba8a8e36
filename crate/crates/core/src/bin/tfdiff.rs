use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use tfdiff::harness::{run, Command, Invocation, Overrides};

/// Time-fractional nonlinear diffusion experiments.
#[derive(Parser, Debug)]
#[command(name = "tfdiff", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Kernel weights, complements and pair residuals (kernels.csv).
    Kernels(Flags),
    /// Scalar relaxation problem d/dt(k * [v - v0]) = -lambda v^m (ode.csv).
    Ode(Flags),
    /// Implicit PDE solve with integral diagnostics (solve.csv).
    Solve(Flags),
    /// Verification suites (report.json); exit 1 when a check fails.
    Verify(Flags),
}

#[derive(Args, Debug)]
struct Flags {
    /// JSON experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    m: Option<f64>,
    /// Time step as a decimal string.
    #[arg(long)]
    tau: Option<String>,
    /// Final time.
    #[arg(long = "T")]
    horizon: Option<f64>,
    #[arg(long)]
    radius: Option<f64>,
    /// Mesh width as a decimal string.
    #[arg(long)]
    h: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Suite name or `all`.
    #[arg(long)]
    suite: Option<String>,
    /// Output directory; defaults to the config, then $TFDIFF_OUT_DIR.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (command, f) = match cli.command {
        Cmd::Kernels(f) => (Command::Kernels, f),
        Cmd::Ode(f) => (Command::Ode, f),
        Cmd::Solve(f) => (Command::Solve, f),
        Cmd::Verify(f) => (Command::Verify, f),
    };
    let inv = Invocation {
        command,
        config: f.config,
        overrides: Overrides {
            alpha: f.alpha,
            m: f.m,
            tau: f.tau,
            horizon: f.horizon,
            radius: f.radius,
            h: f.h,
            seed: f.seed,
            suite: f.suite,
            out: f.out,
        },
    };
    std::process::exit(run(&inv));
}
