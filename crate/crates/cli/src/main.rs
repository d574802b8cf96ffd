use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use nsyn::NoiseSpec;
use nsyn_cli::commands::{self, CleanMode};
use nsyn_cli::config::ProblemArgs;
use nsyn_cli::{Failure, EXIT_NO_PROGRAM, EXIT_OK};

/// Program synthesis from noisy input-output examples.
#[derive(Parser)]
#[command(name = "nsyn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a program for a problem.
    Synth {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        json: bool,
    },
    /// Run a given program on a dataset and report its losses.
    Eval {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Program text, e.g. "(× (+ x 2) 3)".
        #[arg(long)]
        program: String,
        #[arg(long)]
        json: bool,
    },
    /// Corrupt the outputs of a string dataset.
    Corrupt {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, value_enum)]
        noise: NoiseKind,
        /// Rows at the end left untouched by cyclic deletion.
        #[arg(long, default_value_t = 0)]
        preserve_last: usize,
        /// Per-digit replacement probability.
        #[arg(long, default_value_t = 0.2)]
        rate: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, short)]
        output: PathBuf,
    },
    /// Flag rows the synthesized program does not reproduce, then drop or repair them.
    Clean {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, value_enum, default_value = "filter")]
        mode: CleanMode,
        #[arg(long, short)]
        output: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Run every problem config in a directory and print a results table.
    Bench {
        dir: PathBuf,
        /// Seconds per problem; overrides the configs (default 600).
        #[arg(long)]
        timeout: Option<f64>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum NoiseKind {
    CyclicDelete,
    DigitReplace,
}

fn print(json: bool, value: serde_json::Value, text: String) {
    if json {
        println!("{}", serde_json::to_string_pretty(&value).expect("report serialises"));
    } else {
        print!("{text}");
    }
}

fn execute(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Synth { problem, json } => {
            let problem = problem.config()?.resolve()?;
            let r = commands::synth(&problem)?;
            print(json, r.json(), r.text());
        }
        Command::Eval { problem, program, json } => {
            let problem = problem.config()?.resolve()?;
            let r = commands::eval(&problem, &program)?;
            print(json, r.json(), r.text());
        }
        Command::Corrupt { dataset, noise, preserve_last, rate, seed, output } => {
            let spec = match noise {
                NoiseKind::CyclicDelete => NoiseSpec::CyclicDelete { preserve_last },
                NoiseKind::DigitReplace => NoiseSpec::DigitReplace { b: rate, seed },
            };
            let r = commands::corrupt(&dataset, &spec, &output)?;
            println!(
                "wrote {} ({} of {} rows changed) and {}",
                output.display(),
                r.changed_rows,
                r.rows,
                commands::provenance_path(&output).display()
            );
        }
        Command::Clean { problem, mode, output, json } => {
            let problem = problem.config()?.resolve()?;
            let r = commands::clean(&problem, mode)?;
            commands::save(&r.cleaned, &output)?;
            print(json, r.json(), r.text());
        }
        Command::Bench { dir, timeout, json } => {
            let timeout = timeout
                .map(|t| Duration::try_from_secs_f64(t).map_err(|_| Failure::usage(format!("invalid timeout {t}"))))
                .transpose()?;
            let rows = commands::bench(&dir, timeout)?;
            for r in &rows {
                if let commands::BenchOutcome::Invalid(m) = &r.outcome {
                    eprintln!("{}: {m}", r.name);
                }
            }
            print(json, commands::bench_json(&rows), commands::bench_table(&rows));
        }
    }
    Ok(EXIT_OK)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            let prefix = if f.code == EXIT_NO_PROGRAM { "no program" } else { "error" };
            eprintln!("nsyn: {prefix}: {f}");
            ExitCode::from(f.code)
        }
    }
}
