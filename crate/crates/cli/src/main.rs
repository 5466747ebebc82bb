use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pgeneo_cli::{
    cmd_certify, cmd_combine, cmd_cover, cmd_demo_six, cmd_demo_squares, cmd_validate, load, CombineRequest,
    CoverTarget, Outcome, Overrides,
};
use pgeneo_core::builders::SquaresConfig;
use pgeneo_core::pgeneo::AuditConfig;

#[derive(Parser)]
#[command(name = "pgeneo", version, about = "Check perception triples and partial equivariant operators")]
struct Cli {
    /// Append a machine-readable JSON report.
    #[arg(long, global = true)]
    json: bool,
    /// Override the membership tolerance of the instance.
    #[arg(long, global = true)]
    delta_mem: Option<f64>,
    /// Override the numerical slack of the instance.
    #[arg(long, global = true)]
    delta_num: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Domain,
    Ops,
    Operators,
}

#[derive(Subcommand)]
enum Command {
    /// Check that every operation of a triple is admissible.
    Validate {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        triple: String,
    },
    /// Certify an operator pair.
    Certify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        operator: String,
    },
    /// Build a new operator from existing ones and write it into the instance.
    Combine {
        #[arg(long)]
        instance: PathBuf,
        /// `max`, `min`, `convex:w1,w2,...` or `power-mean:p:w1,w2,...`.
        #[arg(long)]
        aggregator: String,
        #[arg(long, value_delimiter = ',', required = true)]
        operators: Vec<String>,
        #[arg(long)]
        output: String,
        /// Seed of the aggregator audit.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
    },
    /// Greedy epsilon-net of the domain, an operation list, or operators.
    Cover {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum)]
        target: Target,
        #[arg(long)]
        epsilon: f64,
        /// Space whose pseudo-metric is used for `--target domain`.
        #[arg(long)]
        space: Option<String>,
        /// Triple whose operations are covered for `--target ops`.
        #[arg(long)]
        triple: Option<String>,
        /// Operators to cover for `--target operators` (default: all).
        #[arg(long, value_delimiter = ',')]
        operators: Vec<String>,
    },
    /// Write the nested-squares translation instance.
    DemoSquares {
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 16)]
        grid: usize,
        #[arg(long, default_value_t = 8)]
        side: usize,
        #[arg(long, default_value_t = 2)]
        margin: usize,
        /// Translation as `rows,cols`.
        #[arg(long, default_value = "4,4", allow_hyphen_values = true)]
        shift: String,
        /// Also write `cut_naive`, whose F' copies F on the shared members.
        #[arg(long)]
        naive: bool,
    },
    /// Write the rotated-six instance.
    DemoSix {
        #[arg(long)]
        output: PathBuf,
    },
}

fn parse_shift(s: &str) -> Option<(isize, isize)> {
    let (a, b) = s.split_once(',')?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

fn run(cli: Cli) -> Outcome {
    let overrides = Overrides {
        delta_mem: cli.delta_mem,
        delta_num: cli.delta_num,
    };
    let json = cli.json;
    let result = match cli.command {
        Command::Validate { instance, triple } => {
            load(&instance, overrides).and_then(|inst| cmd_validate(&inst, &triple, json))
        }
        Command::Certify { instance, operator } => {
            load(&instance, overrides).and_then(|inst| cmd_certify(&inst, &operator, json))
        }
        Command::Combine {
            instance,
            aggregator,
            operators,
            output,
            seed,
            trials,
        } => {
            let req = CombineRequest {
                aggregator: &aggregator,
                operators: &operators,
                output: &output,
                audit: AuditConfig { trials, seed },
            };
            return cmd_combine(&instance, overrides, &req, json);
        }
        Command::Cover {
            instance,
            target,
            epsilon,
            space,
            triple,
            operators,
        } => load(&instance, overrides).and_then(|inst| {
            let target = match target {
                Target::Domain => CoverTarget::Domain {
                    space: space
                        .or_else(|| inst.file().triples.values().next().map(|t| t.phi.clone()))
                        .unwrap_or_default(),
                },
                Target::Ops => CoverTarget::Ops {
                    triple: triple
                        .or_else(|| inst.file().triples.keys().next().cloned())
                        .unwrap_or_default(),
                },
                Target::Operators => CoverTarget::Operators { names: operators },
            };
            cmd_cover(&inst, &target, epsilon, json)
        }),
        Command::DemoSquares {
            output,
            grid,
            side,
            margin,
            shift,
            naive,
        } => match parse_shift(&shift) {
            Some(shift) => cmd_demo_squares(
                &SquaresConfig {
                    grid,
                    side,
                    margin,
                    shift,
                    naive_variant: naive,
                },
                &output,
            ),
            None => Err(pgeneo_core::Error::Precondition(format!(
                "cannot parse translation `{shift}`, expected rows,cols"
            ))),
        },
        Command::DemoSix { output } => cmd_demo_six(&output),
    };
    result.unwrap_or_else(|e| Outcome::input_error(&e))
}

fn main() -> ExitCode {
    let outcome = run(Cli::parse());
    if outcome.code == pgeneo_cli::EXIT_INPUT_ERROR {
        eprint!("{}", outcome.text);
    } else {
        print!("{}", outcome.text);
    }
    ExitCode::from(outcome.code as u8)
}
