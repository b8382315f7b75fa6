//! Runs a scenario file and prints its table and JSON-lines report.
//!
//! cargo run --example run_scenario -- scenarios/bsc_pipeline.json

use qentropy::cli::{machine_report, parse_scenario, render_table, run, Units};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "scenarios/dephasing_qubit.json".into());
    let scenario = parse_scenario(&std::fs::read(&path)?)?;
    let report = run(&scenario)?;
    print!("{}", render_table(&report, Units::Nats));
    print!("{}", machine_report(&report));
    Ok(())
}
