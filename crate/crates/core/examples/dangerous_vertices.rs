// A single detector on a graph whose distances all lie in `[L, 2L]`. Unrelated
// insertions stay quiet; a shortcut that halves one distance reports its
// vertex.
//
//     cargo run --example dangerous_vertices

use std::error::Error;

use ipm_sssp::barrier::IpmParams;
use ipm_sssp::detector::detector_init;
use ipm_sssp::{DynamicGraph, EdgeKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let n = 300;
    let scale = 64;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut g = DynamicGraph::new(n, 0)?;
    for v in 1..n {
        g.insert_edge(
            0,
            v,
            rng.gen_range(2 * scale - 6..=2 * scale),
            EdgeKind::Original,
        )?;
    }
    let epsilon = 0.5;
    let alpha = 0.005;
    let params = IpmParams::new(alpha, epsilon, 2 * (n - 1))?.accelerated(true);
    println!("report threshold {:.1}", params.danger_threshold());
    let mut detector = detector_init(&g, scale, params)?;
    println!("initial set {:?}", detector.initial_set());

    for _ in 0..5 {
        let (u, v) = (rng.gen_range(1..n), rng.gen_range(1..n));
        if u != v {
            let report = detector.process_insertion(u, v, 2 * scale)?;
            println!("+({u}, {v}) reported {:?}", report.set);
        }
    }
    let victim = 17;
    let report = detector.process_insertion(0, victim, scale - 4)?;
    println!("shortcut to {victim}: reported {:?}", report.set);
    assert!(!report.terminated);
    assert!(detector.is_emitted(victim));
    assert!(detector.missed_vertices().is_empty());
    println!(
        "{} steps, potential {:.2}",
        detector.metrics().ipm_iterations,
        detector.potential()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
