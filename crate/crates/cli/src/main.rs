use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

mod commands;
mod render;

/// Numerical phase retrieval and stable phase retrieval analysis for
/// subspaces of coordinate Banach lattices.
#[derive(Debug, Parser)]
#[command(name = "phaselat", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Emit the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Write the report to a file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct BudgetArgs {
    /// Random restarts per search.
    #[arg(long, default_value_t = 16)]
    pub restarts: usize,
    /// Nelder–Mead iterations per restart.
    #[arg(long, default_value_t = 1000)]
    pub iters: usize,
    /// Penalty rounds for the constrained search.
    #[arg(long, default_value_t = 4)]
    pub rounds: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate the SPR constant and the minimal disjointness of a subspace.
    Analyze {
        file: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Relative tolerance of the real-field constant/disjointness cross-check.
        #[arg(long, default_value_t = 0.10)]
        tol: f64,
    },
    /// Search for the most nearly disjoint normalized pair.
    SearchDisjoint {
        file: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Search for separated almost perpendicular pairs (numerical PR check).
    SearchPerp {
        file: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Separation levels; repeat for several (default 0.05, 0.1, 0.2).
        #[arg(long)]
        m: Vec<f64>,
        /// A feasible pair with perpendicularity below this fails PR.
        #[arg(long, default_value_t = phaselat::search::DEFAULT_EPS_FAIL)]
        tol: f64,
    },
    /// Fit a Hilbert norm on the span of `pair` and orthogonally reduce it.
    Reduce {
        file: PathBuf,
        /// Run the sum/difference alignment before reducing.
        #[arg(long)]
        align: bool,
    },
    /// Run one of the witness constructions on the `pair` of a problem file.
    #[command(subcommand)]
    Build(BuildCommand),
    /// Randomized checks of the identities and characterization theorems.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Built-in example subspaces.
    #[command(subcommand)]
    Example(ExampleCommand),
}

#[derive(Debug, Subcommand)]
enum BuildCommand {
    /// Almost disjoint pair to a pair violating the SPR inequality.
    Adp2spr { file: PathBuf },
    /// SPR-violating pair to a separated almost perpendicular pair.
    Spr2perp {
        file: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        m: f64,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
    },
    /// Separated almost perpendicular pair to an SPR violation at constant C.
    Perp2spr {
        file: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        m: f64,
        #[arg(long = "C", default_value_t = 10.0)]
        c: f64,
    },
    /// Evaluate the four equivalent conditions for a pair to defeat PR.
    PrEquiv {
        file: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
}

#[derive(Debug, Subcommand)]
enum VerifyCommand {
    /// Coordinatewise functional-calculus identities on random pairs.
    Identities {
        #[arg(long, default_value_t = 8)]
        dim: usize,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Real fields: inverse SPR constant against minimal disjointness.
    RealSpr {
        #[arg(long, default_value_t = 5)]
        dim: usize,
        #[arg(long, default_value_t = 5)]
        samples: usize,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long, default_value_t = 0.10)]
        tol: f64,
    },
    /// Complex fields: the builder chain on random near-disjoint pairs.
    ComplexSpr {
        #[arg(long, default_value_t = 5)]
        dim: usize,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.1)]
        m: f64,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        #[arg(long = "C", default_value_t = 10.0)]
        c: f64,
    },
}

#[derive(Debug, Subcommand)]
enum ExampleCommand {
    /// The two-dimensional PR subspace of four-dimensional sup-norm space
    /// containing almost perpendicular pairs.
    C4 {
        #[arg(long, default_value_t = 1.0 / 99.0)]
        delta: f64,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Separation levels; repeat for several (default 0.05, 0.1, 0.2).
        #[arg(long)]
        m: Vec<f64>,
        #[arg(long, default_value_t = phaselat::search::DEFAULT_EPS_FAIL)]
        tol: f64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let output = cli.output;
    let start = Instant::now();
    let result = dispatch(cli.command);
    let report = match result {
        Ok(report) => report,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    let text = if output.json {
        render::json(&report, start.elapsed().as_secs_f64())
    } else {
        render::text(&report, start.elapsed().as_secs_f64())
    };
    if let Some(path) = &output.out {
        if let Err(e) = std::fs::write(path, text) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    } else {
        print!("{text}");
    }
    ExitCode::from(if report.ok { 0 } else { 1 })
}

fn dispatch(command: Command) -> Result<commands::Report, commands::CliError> {
    use commands as c;
    match command {
        Command::Analyze { file, budget, tol } => c::analyze(&file, &budget, tol),
        Command::SearchDisjoint { file, budget } => c::search_disjoint(&file, &budget),
        Command::SearchPerp { file, budget, m, tol } => c::search_perp(&file, &budget, &m, tol),
        Command::Reduce { file, align } => c::reduce(&file, align),
        Command::Build(b) => match b {
            BuildCommand::Adp2spr { file } => c::build_adp2spr(&file),
            BuildCommand::Spr2perp { file, m, eps } => c::build_spr2perp(&file, m, eps),
            BuildCommand::Perp2spr { file, m, c: cst } => c::build_perp2spr(&file, m, cst),
            BuildCommand::PrEquiv { file, tol } => c::build_pr_equiv(&file, tol),
        },
        Command::Verify(v) => match v {
            VerifyCommand::Identities { dim, samples, seed, tol } => c::verify_identities(dim, samples, seed, tol),
            VerifyCommand::RealSpr { dim, samples, budget, tol } => c::verify_real_spr(dim, samples, &budget, tol),
            VerifyCommand::ComplexSpr { dim, samples, seed, m, eps, c: cst } => {
                c::verify_complex_spr(dim, samples, seed, m, eps, cst)
            }
        },
        Command::Example(ExampleCommand::C4 { delta, budget, m, tol }) => c::example_c4(delta, &budget, &m, tol),
    }
}
