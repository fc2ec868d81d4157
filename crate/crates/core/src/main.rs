use annulus_bem::cli::{self, EvalTarget};
use annulus_bem::error::Error;
use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

/// Boundary element solver for Laplace problems on annular domains.
#[derive(Parser)]
#[command(name = "annulus-bem", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the boundary discretization as CSV.
    Mesh {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Solve for the complementary Neumann data from boundary potentials.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Boundary potential CSV with header `index,x,y,a`.
        #[arg(long)]
        fem: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Evaluate a stored solution over a grid or a points file.
    Eval {
        #[arg(long)]
        solution: PathBuf,
        /// Grid spec `x0,x1,y0,y1,nx,ny`.
        #[arg(long, conflicts_with = "points", allow_hyphen_values = true)]
        grid: Option<String>,
        /// Points CSV with header `x,y`.
        #[arg(long)]
        points: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Also render an SVG heatmap (grid mode).
        #[arg(long)]
        svg: bool,
    },
    /// Render the measured/calculated error table for a reference fixture.
    Report {
        #[arg(long)]
        fixture: PathBuf,
        /// Replace the calculated column with values from this file.
        #[arg(long)]
        computed: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Mesh-refinement error study against an analytic reference.
    Converge {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Also render an SVG line plot.
        #[arg(long)]
        svg: bool,
    },
    /// Compare kernel closed forms against adaptive quadrature.
    OracleCheck {
        #[arg(long, default_value_t = 17)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn run(command: Command) -> Result<u8, Error> {
    match command {
        Command::Mesh { config, out } => {
            let path = cli::cmd_mesh(&config, &out)?;
            println!("wrote {}", path.display());
            Ok(0)
        }
        Command::Solve { config, fem, out } => {
            let summary = cli::cmd_solve(&config, &fem, &out)?;
            println!("elements            {}", summary.elements);
            println!("residual_norm       {:e}", summary.residual_norm);
            println!("condition_estimate  {:e}", summary.condition_estimate);
            for warning in &summary.warnings {
                eprintln!("warning: {warning}");
            }
            println!("wrote {}", summary.solution_path.display());
            Ok(0)
        }
        Command::Eval {
            solution,
            grid,
            points,
            out,
            svg,
        } => {
            let target = match (grid, points) {
                (Some(spec), None) => EvalTarget::Grid(cli::parse_grid_spec(&spec)?),
                (None, Some(path)) => EvalTarget::PointsCsv(path),
                _ => {
                    return Err(Error::Config(
                        "eval needs exactly one of --grid or --points".into(),
                    ))
                }
            };
            let outcome = cli::cmd_eval(&solution, &target, &out, svg)?;
            for warning in &outcome.warnings {
                eprintln!("warning: {warning}");
            }
            println!("wrote {}", outcome.field_csv.display());
            if let Some(path) = outcome.svg_path {
                println!("wrote {}", path.display());
            }
            Ok(0)
        }
        Command::Report {
            fixture,
            computed,
            out,
        } => {
            let (path, text, _) = cli::cmd_report(&fixture, computed.as_deref(), &out)?;
            print!("{text}");
            println!("wrote {}", path.display());
            Ok(0)
        }
        Command::Converge { config, out, svg } => {
            let record = cli::cmd_converge(&config, &out, svg)?;
            for row in &record.rows {
                println!(
                    "n={:<6} max_rel_error={:<12.6e} avg_rel_error={:.6e}",
                    row.n_total, row.max_error, row.avg_error
                );
            }
            Ok(0)
        }
        Command::OracleCheck { seed, count, out } => {
            let outcome = cli::cmd_oracle_check(seed, count, &out)?;
            println!(
                "{} cases, {} failures, worst guarded diff {:e}",
                outcome.cases, outcome.failures, outcome.worst_guarded_diff
            );
            println!("wrote {}", outcome.csv_path.display());
            // Discrepancies are reported through the exit status, distinct
            // from usage (2), input (3) and numerical (4) failures.
            Ok(if outcome.failures > 0 { 1 } else { 0 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
