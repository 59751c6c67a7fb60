// One call of the min-ratio cycle solver: it either pushes flow around a
// cycle of ratio at most `-q` or certifies with potentials that none exists.
// The exhaustive search confirms the decision.
//
//     cargo run --example min_ratio_cycle

use std::error::Error;

use ipm_sssp::solver::brute::brute_force_min_ratio;
use ipm_sssp::solver::{SolverConfig, SolverMirror, StepResult};

fn solve(edges: &[(usize, usize)], g: &[f64], w: &[f64]) -> Result<(), Box<dyn Error>> {
    let q = 0.1;
    let config = SolverConfig {
        quality: q,
        step: 0.05,
        accuracy: 0.01,
    };
    let mut mirror = SolverMirror::new(4, 0, config)?;
    for (e, &(u, v)) in edges.iter().enumerate() {
        mirror.insert_edge(e, u, v, w[e], g[e], 1.0)?;
    }
    let (best, _) = brute_force_min_ratio(4, edges, g, w)?;
    match mirror.apply_cycle()? {
        StepResult::Applied { cycle, norm, .. } => {
            println!(
                "applied: ratio {:.4} over {} edges, step norm {norm:.3} (best {best:.4})",
                cycle.ratio,
                cycle.arcs.len()
            );
            assert!(cycle.ratio <= -q * (1.0 - 1e-9));
        }
        StepResult::Certified { lambda, dual } => {
            println!(
                "certified: lambda {lambda:.4}, potentials {:.3?} (best {best:.4})",
                dual.potentials
            );
            assert!(best > -q - 1e-9);
        }
    }
    Ok(())
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let edges = [(0, 1), (1, 2), (2, 0), (2, 3), (3, 0)];
    let w = [1.0, 2.0, 1.0, 0.5, 0.5];
    solve(&edges, &[0.5, -1.5, 0.2, 0.0, 0.1], &w)?;
    solve(&edges, &[0.05, 0.05, 0.05, 0.05, 0.05], &w)?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
