//! Command-line front end: `run`, `demo` and `list`.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::scenario::{run_scenario_file, run_scenario_str, Overrides, Report, ScenarioError};

/// Built-in scenarios: name, one-line description, document.
pub const DEMOS: [(&str, &str, &str); 6] = [
    (
        "bell-example",
        "three pairwise-commuting ±1 measurements whose pairwise laws admit no joint law",
        include_str!("../scenarios/bell-example.json"),
    ),
    (
        "symmetric-walk",
        "two-state symmetric random walk; limit distribution (1/2, 1/2)",
        include_str!("../scenarios/symmetric-walk.json"),
    ),
    (
        "unitary-ergodic",
        "unitary evolution whose Cesàro limit is the projection onto the fixed space",
        include_str!("../scenarios/unitary-ergodic.json"),
    ),
    (
        "gudder-line",
        "small quantum walk on three sites with path probabilities",
        include_str!("../scenarios/gudder-line.json"),
    ),
    (
        "coin-process",
        "finite-dimensional process marginals checked against path enumeration",
        include_str!("../scenarios/coin-process.json"),
    ),
    (
        "sampling-dichotomy",
        "random sampling corpus: bounded iff convergent",
        include_str!("../scenarios/sampling-dichotomy.json"),
    ),
];

pub fn demo(name: &str) -> Option<&'static str> {
    DEMOS.iter().find(|(n, _, _)| *n == name).map(|(_, _, doc)| *doc)
}

#[derive(Debug, Parser)]
#[command(name = "markovian", version, about = "Generalized Markov chain scenario runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario file.
    Run {
        file: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run a built-in scenario.
    Demo {
        name: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// List built-in scenarios.
    List,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    horizon: Option<usize>,
    /// Include wall-clock time; the report is then no longer reproducible.
    #[arg(long)]
    timing: bool,
}

impl OutputArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            tol: self.tol,
            horizon: self.horizon,
            timing: self.timing,
        }
    }
}

fn render(report: &Report, format: Format) -> Vec<u8> {
    match format {
        Format::Json => report.to_json().into_bytes(),
        Format::Csv => {
            let mut buf = Vec::new();
            report.write_csv(&mut buf).expect("writing to memory");
            buf
        }
    }
}

fn emit(result: Result<Report, ScenarioError>, output: &OutputArgs) -> i32 {
    let report = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let bytes = render(&report, output.format);
    let written = match &output.out {
        Some(path) => std::fs::write(path, &bytes).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => std::io::stdout().write_all(&bytes).map_err(|e| e.to_string()),
    };
    match written {
        Ok(()) => 0,
        Err(msg) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

/// Parses `args` (program name first) and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match cli.command {
        Command::Run { file, output } => emit(run_scenario_file(&file, &output.overrides()), &output),
        Command::Demo { name, output } => match demo(&name) {
            Some(doc) => emit(run_scenario_str(doc, &output.overrides()), &output),
            None => {
                eprintln!("error: unknown demo {name:?}; try `markovian list`");
                2
            }
        },
        Command::List => {
            for (name, about, _) in DEMOS {
                println!("{name:<20} {about}");
            }
            0
        }
    }
}
