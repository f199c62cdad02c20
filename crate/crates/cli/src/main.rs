use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

mod config;
mod report;
mod scenarios;

use config::ScenarioConfig;
use report::Report;

/// Invalid input: exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Parser)]
#[command(version, about = "Numerical pseudoconvexity experiments")]
struct Cli {
    /// Worker threads (defaults to the number of cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario described by a JSON config
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override a config field, e.g. `--set params.spacing=0.01`
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// List the available scenarios
    List {
        /// Print names, descriptions and parameter schemas as JSON
        #[arg(long)]
        json: bool,
    },
}

fn run(config: &PathBuf, set: &[String]) -> anyhow::Result<Report> {
    let cfg = ScenarioConfig::load(config)?.apply_overrides(set)?;
    let scenario = scenarios::find(&cfg.scenario)?;
    let params = scenarios::merge_defaults(scenario, &cfg.params)?;
    let start = Instant::now();
    let outcome = (scenario.run)(&params, &cfg)?;
    let elapsed = start.elapsed();

    std::fs::create_dir_all(&cfg.output_dir)?;
    let mut exports = Vec::new();
    for t in &outcome.tables {
        t.write(&cfg.output_dir)?;
        exports.push(t.file.clone());
    }
    let pass = outcome.assertions.iter().all(|a| a.passed);
    let report = Report {
        scenario: cfg.scenario.clone(),
        seed: cfg.seed,
        expect_violation: cfg.expect_violation,
        parameters: params,
        assertions: outcome.assertions,
        results: outcome.results,
        exports,
        pass,
    };
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    std::fs::write(cfg.output_dir.join("report.json"), text)?;
    let timing = serde_json::json!({
        "scenario": cfg.scenario,
        "seconds": elapsed.as_secs_f64(),
        "threads": rayon::current_num_threads(),
    });
    std::fs::write(
        cfg.output_dir.join("timing.json"),
        serde_json::to_string_pretty(&timing)? + "\n",
    )?;
    Ok(report)
}

fn exit_for(err: &anyhow::Error, stderr: &mut impl Write) -> u8 {
    let usage = err.downcast_ref::<UsageError>().is_some()
        || matches!(
            err.downcast_ref::<pseudoconvex::Error>(),
            Some(
                pseudoconvex::Error::Parameter(_)
                    | pseudoconvex::Error::InvalidGrid(_)
                    | pseudoconvex::Error::Domain(_)
                    | pseudoconvex::Error::UnderResolvedKernel { .. }
            )
        );
    let _ = writeln!(stderr, "error: {err:#}");
    if usage {
        2
    } else {
        1
    }
}

/// Runs one subcommand on the current rayon pool and returns the exit code.
fn execute(command: Command, stdout: &mut impl Write, stderr: &mut impl Write) -> u8 {
    match command {
        Command::List { json } => {
            if json {
                let text =
                    serde_json::to_string_pretty(&scenarios::schema()).expect("schema serializes");
                let _ = writeln!(stdout, "{text}");
            } else {
                for s in scenarios::ALL {
                    let _ = writeln!(stdout, "{:<18} {}", s.name, s.description);
                }
            }
            0
        }
        Command::Run { config, set } => match run(&config, &set) {
            Ok(report) => {
                let failing = report.failing();
                if failing.is_empty() {
                    let _ = writeln!(
                        stdout,
                        "{}: all {} assertions passed",
                        report.scenario,
                        report.assertions.len()
                    );
                    0
                } else {
                    for a in failing {
                        let _ = writeln!(stderr, "assertion failed: {} ({})", a.name, a.detail);
                    }
                    1
                }
            }
            Err(e) => exit_for(&e, stderr),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: cannot start {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    ExitCode::from(execute(
        cli.command,
        &mut std::io::stdout(),
        &mut std::io::stderr(),
    ))
}
