// Report approximate shortest paths and check them edge by edge.
//
//     cargo run --example approximate_paths

use std::error::Error;

use ipm_sssp::oracle::dijkstra;
use ipm_sssp::{engine_initialize, DynamicGraph, EngineConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let n = 10;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut config = EngineConfig::new(0.25);
    config.max_length = 20;
    config.accelerate = true;
    let mut engine = engine_initialize(&DynamicGraph::new(n, 0)?, config)?;
    for v in 1..n {
        engine.insert(v - 1, v, rng.gen_range(5..=20))?;
    }
    for _ in 0..15 {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(1..n);
        if u != v {
            engine.insert(u, v, rng.gen_range(1..=20))?;
        }
    }

    let exact = dijkstra(engine.graph());
    for v in 1..n {
        let path = engine
            .query_path(v)
            .ok_or("reachable vertex without a path")?;
        let mut at = engine.graph().source();
        for &e in &path.edges {
            let edge = engine.graph().edge(e);
            assert_eq!(edge.tail, at);
            at = edge.head;
        }
        assert_eq!(at, v);
        let d = exact.dist[v].ok_or("oracle disagrees on reachability")?;
        assert!(path.length as f64 <= 1.25 * d as f64);
        println!(
            "{v}: length {} (exact {d}) via {:?}",
            path.length, path.vertices
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
