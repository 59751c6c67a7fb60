// Bench mode: one CSV row of cumulative counters per insertion.
//
//     cargo run --release --example bench_csv

use std::error::Error;

use ipm_sssp::cli::{run, Mode, RunConfig, CSV_HEADER};
use ipm_sssp::stream::{generate_ops, GenSpec, Pattern};
use ipm_sssp::EngineConfig;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let ops = generate_ops(&GenSpec {
        n: 12,
        insertions: 30,
        wmax: 32,
        pattern: Pattern::Uniform,
        seed: 7,
    })?;
    let mut engine = EngineConfig::new(0.2);
    engine.accelerate = true;
    let cfg = RunConfig::new(Mode::Bench, engine);
    let mut answers = Vec::new();
    let mut csv = Vec::new();
    run(&ops, &cfg, &mut answers, Some(&mut csv))?;
    let csv = String::from_utf8(csv)?;
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 30);
    println!("{CSV_HEADER}");
    for row in rows.iter().step_by(5) {
        println!("{row}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
