mod commands;
mod io;
mod report;

use clap::{Parser, Subcommand};

/// Gaussian covariance-matrix analysis tool: validity, symplectic spectra,
/// entanglement, witnesses, Gaussian projections and measurement-strategy
/// simulation. Machine-readable output goes to stdout, diagnostics to
/// stderr.
#[derive(Parser)]
#[command(name = "covar", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a covariance matrix and report spectra, purity, squeezing,
    /// PPT verdict and logarithmic negativity.
    Analyze(commands::AnalyzeArgs),
    /// Certify and evaluate entanglement witnesses against a state.
    Witness(commands::WitnessArgs),
    /// Project the B party onto a Gaussian state (coherent, homodyne or an
    /// explicit target) and emit the reduced state.
    Project(commands::ProjectArgs),
    /// Monte-Carlo comparison of the ten-entry and nine-kind estimation
    /// strategies on a known two-mode state.
    Simulate(commands::SimulateArgs),
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Analyze(args) => commands::analyze(args),
        Command::Witness(args) => commands::witness(args),
        Command::Project(args) => commands::project(args),
        Command::Simulate(args) => commands::simulate(args),
    };
    match outcome {
        Ok(stdout_payload) => {
            println!("{stdout_payload}");
        }
        Err(err) => {
            eprintln!("error: {}", err.message);
            std::process::exit(err.exit_code);
        }
    }
}
