//! Running a declarative scenario from Rust and printing its CSV report.

use markovian::scenario::{run_scenario_str, Overrides};

const SCENARIO: &str = r#"{
  "kind": "markov-chain",
  "name": "hidden lazy walk",
  "tolerances": { "horizon": 4 },
  "payload": {
    "transition": [[0.9, 0.1, 0.0], [0.1, 0.8, 0.1], [0.0, 0.1, 0.9]],
    "labeling": ["out", "in", "out"],
    "start": [0, 1, 0]
  }
}"#;

fn main() {
    match run_scenario_str(SCENARIO, &Overrides::default()) {
        Ok(report) => {
            report.write_csv(std::io::stdout()).expect("stdout");
        }
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(e.exit_code());
        }
    }
}
