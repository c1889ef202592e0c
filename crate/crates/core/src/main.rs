use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use kantorovich_lab::harness::{Command, ExperimentConfig, Runner};
use kantorovich_lab::Theorem;

#[derive(Parser)]
#[command(
    name = "kantorovich-lab",
    version,
    about = "Kantorovich-type Appell operator experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Tabulate f, P_n f and L_n* f on the x-grid.
    Eval(Common),
    /// Moment audit: oracle beside closed and printed forms.
    Moments(Common),
    /// Bound certificates over (theorem, f, n, x).
    Certify {
        #[command(flatten)]
        common: Common,
        /// Restrict to these theorems (T2..T5). Repeatable.
        #[arg(long = "theorem", value_parser = parse_theorem)]
        theorems: Vec<Theorem>,
    },
    /// Sup error on [0, a] per (f, n) with log-log slopes.
    Converge(Common),
    /// Weighted-norm Korovkin errors and the L_n* rho check.
    Weighted(Common),
}

#[derive(Args)]
struct Common {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory. Overrides `outputs` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long)]
    threads: Option<usize>,
    /// Reserved. Echoed into the metadata.
    #[arg(long)]
    seed: Option<u64>,
    /// Exit with status 2 when a printed bound fails.
    #[arg(long)]
    strict: bool,
}

fn parse_theorem(s: &str) -> Result<Theorem, String> {
    Theorem::ALL
        .into_iter()
        .find(|t| t.name().eq_ignore_ascii_case(s))
        .ok_or_else(|| format!("unknown theorem {s:?}, expected one of T2, T3, T4, T5"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, common, theorems) = match cli.command {
        Cmd::Eval(c) => (Command::Eval, c, Vec::new()),
        Cmd::Moments(c) => (Command::Moments, c, Vec::new()),
        Cmd::Certify { common, theorems } => (Command::Certify, common, theorems),
        Cmd::Converge(c) => (Command::Converge, c, Vec::new()),
        Cmd::Weighted(c) => (Command::Weighted, c, Vec::new()),
    };
    match execute(command, &common, theorems) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn execute(
    command: Command,
    common: &Common,
    theorems: Vec<Theorem>,
) -> kantorovich_lab::Result<u8> {
    let mut cfg = ExperimentConfig::from_path(&common.config)?;
    if let Some(out) = &common.out {
        cfg.outputs = out.clone();
    }
    if !theorems.is_empty() {
        cfg.certify.theorems = theorems;
    }
    let out_dir = cfg.outputs.clone();
    let runner = Runner::new(cfg, common.threads)?.with_seed(common.seed);
    let outcome = runner.run(command)?;
    let (csv, meta) = outcome.write(&out_dir)?;
    eprintln!(
        "{}: {} rows -> {} ({})",
        command.name(),
        outcome.table.rows.len(),
        csv.display(),
        meta.display()
    );
    for f in &outcome.hard_failures {
        eprintln!("FAIL {f}");
    }
    for f in &outcome.strict_failures {
        eprintln!("{} {f}", if common.strict { "FAIL" } else { "warn" });
    }
    Ok(outcome.exit_code(common.strict) as u8)
}
