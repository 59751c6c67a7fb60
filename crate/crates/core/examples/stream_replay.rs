// Replay an operation stream in verify mode, which checks every answer
// against Dijkstra, and generate a seeded stream.
//
//     cargo run --example stream_replay

use std::error::Error;

use ipm_sssp::cli::{run, Mode, RunConfig};
use ipm_sssp::stream::{generate, parse_stream, GenSpec};
use ipm_sssp::EngineConfig;

const STREAM: &str = "\
h 5
a 1 2 7
a 2 3 7
a 3 4 7
q 4
a 1 4 3
q 4
a 4 5 2
p 5
";

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let ops = parse_stream(STREAM)?;
    let mut engine = EngineConfig::new(0.2);
    engine.accelerate = true;
    let cfg = RunConfig::new(Mode::Verify, engine);
    let mut out = Vec::new();
    let summary = run(&ops, &cfg, &mut out, None)?;
    print!("{}", String::from_utf8(out)?);
    println!(
        "{} insertions, {} queries, max ratio {:.3}",
        summary.insertions, summary.queries, summary.max_ratio
    );

    let spec = GenSpec::parse("gen:n=6,insertions=5,wmax=9,pattern=shortcut-heavy", 42)?;
    print!("{}", generate(&spec)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
