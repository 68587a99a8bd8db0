//! `thermaloc`: batch verification runner for thermal-locality bounds on
//! spin and fermionic lattice models.
//!
//! Every subcommand reads a flat key-value config file, writes
//! `<out>/<subcommand>.csv` plus `<out>/<subcommand>_summary.json`, and
//! exits 0 when all checks pass, 2 when a violation was found, and 1 on
//! usage or configuration errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand as ClapSubcommand};

use thermaloc::config::ExperimentConfig;
use thermaloc::runner::{run, Subcommand};

#[derive(Parser)]
#[command(
    name = "thermaloc",
    about = "Thermal-locality verification experiments: exact perturbation/truncation \
             identities, clustering and locality bounds, cluster expansions, animal counts.",
    long_about = None,
    after_help = "Sign convention: model Hamiltonians are written with +coupling \
                  (ferromagnetic = negative coupling); every bound depends only on the \
                  operator norm of the local terms, not their sign."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Path to the experiment config file (key = value lines)
    #[arg(long)]
    config: PathBuf,
    /// Output directory for the CSV and JSON summary
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Override run.seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override quad.order (Gauss-Legendre s-quadrature order)
    #[arg(long)]
    quad_order: Option<usize>,
    /// Override series.k (word-series truncation length)
    #[arg(long)]
    trunc_k: Option<usize>,
}

#[derive(ClapSubcommand)]
enum Command {
    /// Verify the exact perturbation identity on seeded random triples
    VerifyPerturbation(CommonArgs),
    /// Verify the exact truncation identity (spin or fermion per config)
    VerifyTruncation(CommonArgs),
    /// Scan |cov^tau| for single-site Pauli pairs against the clustering bound
    ClusteringScan(CommonArgs),
    /// Compare the reduced-state gap against the locality bound
    LocalityScan(CommonArgs),
    /// Emit the tighter-bound error surface over (beta, buffer width)
    ConeSurface(CommonArgs),
    /// Compare the cluster-expansion proxy state against its error bound
    MpoError(CommonArgs),
    /// Count edge animals and check the growth-constant bound
    Animals(CommonArgs),
    /// Tabulate critical temperature, correlation length and related values
    BoundsTable(CommonArgs),
    /// Run the combinatorial lemma checks
    LemmaSuite(CommonArgs),
}

impl Command {
    fn split(self) -> (Subcommand, CommonArgs) {
        match self {
            Command::VerifyPerturbation(a) => (Subcommand::VerifyPerturbation, a),
            Command::VerifyTruncation(a) => (Subcommand::VerifyTruncation, a),
            Command::ClusteringScan(a) => (Subcommand::ClusteringScan, a),
            Command::LocalityScan(a) => (Subcommand::LocalityScan, a),
            Command::ConeSurface(a) => (Subcommand::ConeSurface, a),
            Command::MpoError(a) => (Subcommand::MpoError, a),
            Command::Animals(a) => (Subcommand::Animals, a),
            Command::BoundsTable(a) => (Subcommand::BoundsTable, a),
            Command::LemmaSuite(a) => (Subcommand::LemmaSuite, a),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (sub, args) = cli.command.split();

    let mut cfg = match ExperimentConfig::load(&args.config) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    if let Some(seed) = args.seed {
        cfg.set("run.seed", seed.to_string());
    }
    if let Some(order) = args.quad_order {
        cfg.set("quad.order", order.to_string());
    }
    if let Some(k) = args.trunc_k {
        cfg.set("series.k", k.to_string());
    }

    let output = match run(sub, &cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };

    if let Err(e) = std::fs::create_dir_all(&args.out) {
        eprintln!("error: cannot create {}: {e}", args.out.display());
        return ExitCode::from(1);
    }
    let csv_path = args.out.join(format!("{}.csv", sub.name()));
    let json_path = args.out.join(format!("{}_summary.json", sub.name()));
    if let Err(e) = std::fs::write(&csv_path, &output.csv) {
        eprintln!("error: cannot write {}: {e}", csv_path.display());
        return ExitCode::from(1);
    }
    let summary = match serde_json::to_string_pretty(&output.summary) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    if let Err(e) = std::fs::write(&json_path, summary) {
        eprintln!("error: cannot write {}: {e}", json_path.display());
        return ExitCode::from(1);
    }

    println!(
        "{}: pass={} max_violation={:.6e} runtime={:.3}s -> {}",
        sub.name(),
        output.summary.pass,
        output.summary.max_violation,
        output.summary.runtime_s,
        csv_path.display()
    );
    if output.summary.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}
