// Split a high-degree vertex into zero-length chains so that every vertex
// has in- and out-degree at most 3, without changing distances.
//
//     cargo run --example degree_reduction

use std::error::Error;

use ipm_sssp::degree::degree_reduce;
use ipm_sssp::oracle::dijkstra;
use ipm_sssp::{DynamicGraph, EdgeKind};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let mut g = DynamicGraph::new(9, 0)?;
    for v in 1..9 {
        g.insert_edge(0, v, v as u64, EdgeKind::Original)?;
        g.insert_edge(v, (v % 8) + 1, 1, EdgeKind::Original)?;
    }
    let (reduced, reducer) = degree_reduce(&g)?;
    let out = (0..reduced.vertex_count())
        .map(|v| reduced.out_edges(v).len())
        .max()
        .unwrap_or(0);
    println!(
        "{} vertices, {} auxiliary, max out-degree {out}",
        reduced.vertex_count(),
        reducer.aux_used()
    );
    assert!(out <= 3);
    let before = dijkstra(&g);
    let after = dijkstra(&reduced);
    assert_eq!(&after.dist[..9], &before.dist[..]);
    println!("distances {:?}", before.dist);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
