use clap::{Parser, Subcommand};
use hvol_cli::formats::{AbstractInput, PolyhedronInput, SimplexInput};
use hvol_cli::{
    cmd_degenerate_family, cmd_degenerate_input, cmd_lemmas, cmd_regularity, cmd_simplex,
    cmd_validate, parse_json, to_json, CliError, DrumFamily, RunConfig,
};
use std::path::PathBuf;
use std::process::ExitCode;

/// Dihedral-angle parametrized simplices and polyhedra: volumes by Schläfli
/// integration, Andreev/Bao–Bonahon checkers, degeneration sweeps.
///
/// Exit codes: 0 success/accepted, 2 domain rejection, 1 operational error.
/// The env var HVOL_THREADS caps the Monte-Carlo worker count.
#[derive(Parser)]
#[command(name = "hvol", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output path (stdout when omitted)
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Output format; `simplex`, `validate` and `lemmas` emit json,
    /// `degenerate` and `regularity` emit csv (the default per subcommand)
    #[arg(long, global = true, value_parser = ["json", "csv"])]
    format: Option<String>,

    /// RNG seed for Monte-Carlo sampling
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Monte-Carlo sample / trial count
    #[arg(long, global = true, default_value_t = 1_000_000)]
    samples: u64,

    /// Volume quadrature tolerance
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a simplex and report cofactors, lengths, gradient, volume
    Simplex {
        /// Simplex JSON: {"dimension", "curvature", "angles"}
        #[arg(long)]
        input: PathBuf,
    },
    /// Check Andreev / Bao–Bonahon angle conditions
    Validate {
        /// Abstract polyhedron JSON: {"faces", "weights", "mode"}
        #[arg(long)]
        input: PathBuf,
    },
    /// Degeneration sweep over a drum family, or one polyhedron from JSON
    Degenerate {
        /// Polyhedron JSON: {"model", "vertices", "faces"}
        #[arg(long, conflicts_with_all = ["k", "tau_min", "tau_max", "tau_steps", "r"])]
        input: Option<PathBuf>,
        /// Cap polygon size of the drum family
        #[arg(long, default_value_t = 6)]
        k: usize,
        #[arg(long = "tau-min", default_value_t = 3.0)]
        tau_min: f64,
        #[arg(long = "tau-max", default_value_t = 12.0)]
        tau_max: f64,
        #[arg(long = "tau-steps", default_value_t = 10)]
        tau_steps: usize,
        /// Cap radius of the drum family
        #[arg(long, default_value_t = 0.6)]
        r: f64,
    },
    /// Boundary-regularity probe along a ray in angle space
    Regularity {
        /// Simplex JSON for the ray start (hyperbolic)
        #[arg(long)]
        input: PathBuf,
        /// Ray direction, six comma-separated components
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        direction: Option<Vec<f64>>,
        /// Number of geometric steps toward the boundary
        #[arg(long, default_value_t = 8)]
        steps: usize,
    },
    /// Randomized checks of the slab lemmas
    Lemmas {
        /// Slab half-widths t to test
        #[arg(long = "t-list", value_delimiter = ',', default_value = "3,5,8")]
        t_list: Vec<f64>,
        /// Spherical-lemma ε values to test
        #[arg(long = "eps-list", value_delimiter = ',', default_value = "0.05,0.01")]
        eps_list: Vec<f64>,
    },
}

fn read_input(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Op(format!("cannot read {}: {e}", path.display())))
}

fn run(cli: &Cli) -> Result<(String, bool), CliError> {
    let cfg = RunConfig {
        seed: cli.seed,
        samples: cli.samples,
        tol: cli.tol,
    };
    let expect_format = |supported: &str| -> Result<(), CliError> {
        match &cli.format {
            Some(f) if f != supported => Err(CliError::Domain(format!(
                "this subcommand emits {supported}, not {f}"
            ))),
            _ => Ok(()),
        }
    };
    match &cli.command {
        Command::Simplex { input } => {
            expect_format("json")?;
            let parsed: SimplexInput = parse_json(&read_input(input)?)?;
            let report = cmd_simplex(&parsed, &cfg)?;
            Ok((to_json(&report)?, true))
        }
        Command::Validate { input } => {
            expect_format("json")?;
            let parsed: AbstractInput = parse_json(&read_input(input)?)?;
            let report = cmd_validate(&parsed)?;
            let accepted = report.accepted;
            Ok((to_json(&report)?, accepted))
        }
        Command::Degenerate {
            input,
            k,
            tau_min,
            tau_max,
            tau_steps,
            r,
        } => {
            expect_format("csv")?;
            match input {
            Some(path) => {
                let parsed: PolyhedronInput = parse_json(&read_input(path)?)?;
                Ok((cmd_degenerate_input(&parsed)?, true))
            }
            None => {
                let family = DrumFamily {
                    k: *k,
                    tau_min: *tau_min,
                    tau_max: *tau_max,
                    tau_steps: *tau_steps,
                    r: *r,
                };
                Ok((cmd_degenerate_family(&family)?, true))
            }
        }},
        Command::Regularity {
            input,
            direction,
            steps,
        } => {
            expect_format("csv")?;
            let parsed: SimplexInput = parse_json(&read_input(input)?)?;
            let csv = cmd_regularity(&parsed, direction.as_deref(), *steps, &cfg)?;
            Ok((csv, true))
        }
        Command::Lemmas { t_list, eps_list } => {
            expect_format("json")?;
            let report = cmd_lemmas(t_list, eps_list, cfg.samples, cfg.seed)?;
            Ok((to_json(&report)?, true))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((text, accepted)) => {
            let write_result = match &cli.output {
                Some(path) => std::fs::write(path, &text)
                    .map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            if let Err(msg) = write_result {
                eprintln!("error: {msg}");
                return ExitCode::from(1);
            }
            if accepted {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
