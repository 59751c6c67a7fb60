// Feed edges into the engine one at a time and compare its estimates with
// exact distances after every insertion.
//
//     cargo run --example incremental_sssp

use std::error::Error;

use ipm_sssp::oracle::dijkstra;
use ipm_sssp::{engine_initialize, DynamicGraph, EngineConfig};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let n = 6;
    let mut config = EngineConfig::new(0.2);
    config.levels = 2;
    config.max_length = 16;
    config.accelerate = true;
    let mut engine = engine_initialize(&DynamicGraph::new(n, 0)?, config)?;

    let edges = [
        (0, 1, 9),
        (1, 2, 9),
        (2, 3, 9),
        (3, 4, 9),
        (4, 5, 9),
        (0, 3, 4),
        (0, 5, 2),
        (5, 4, 1),
    ];
    for (u, v, l) in edges {
        engine.insert(u, v, l)?;
        let exact = dijkstra(engine.graph());
        let estimates: Vec<String> = (0..n)
            .map(|x| match engine.query_distance(x) {
                Some(d) => d.to_string(),
                None => "-".into(),
            })
            .collect();
        println!("+({u}, {v}, {l})  estimates [{}]", estimates.join(" "));
        let check = engine.check();
        assert!(check.violations.is_empty());
        for x in 0..n {
            if let (Some(est), Some(d)) = (engine.query_distance(x), exact.dist[x]) {
                assert!(est >= d && est as f64 <= 1.2 * d as f64);
            }
        }
    }
    let m = engine.metrics();
    println!(
        "{} insertions, {} phases, {} interior point steps",
        m.insertions, m.phases, m.ipm_iterations
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
