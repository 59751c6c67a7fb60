// The spliced barrier `V(x)`, the edge weights it induces and the potential
// of a small flow.
//
//     cargo run --example barrier_profile

use std::error::Error;

use ipm_sssp::barrier::{
    barrier_derivative, barrier_value, edge_weight, gradient, potential, FlowView,
};
use ipm_sssp::EdgeKind;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    for p in [2, 8, 32] {
        let row: Vec<String> = [0.5, 0.9, 1.0, 1.1, 2.0]
            .iter()
            .map(|&x| Ok(format!("{:>10.4}", barrier_value(x, p)?)))
            .collect::<Result<_, ipm_sssp::barrier::BarrierError>>()?;
        println!("p={p:<2} V = {}", row.join(""));
        let left = barrier_derivative(1.0 - 1e-9, p)?;
        let right = barrier_derivative(1.0 + 1e-9, p)?;
        assert!((left - right).abs() < 1e-6);
    }

    let kinds = [EdgeKind::Augmented, EdgeKind::Augmented, EdgeKind::Original];
    let lengths = [1.0, 1.5, 0.5];
    let flow = [0.8, 1.0, 0.2];
    let slack = [0.0, 0.0, 1e-4];
    let p = 4;
    let view = FlowView {
        kinds: &kinds,
        lengths: &lengths,
        flow: &flow,
        slack: &slack,
    };
    let target = 0.9 * view.cost();
    let phi = potential(&view, target, kinds.len(), p)?;
    let weights: Vec<f64> = (0..3)
        .map(|e| edge_weight(kinds[e], flow[e], slack[e], p))
        .collect::<Result<_, _>>()?;
    let g = gradient(&lengths, &weights, view.cost() - target, kinds.len())?;
    println!("potential {phi:.4}");
    println!("weights   {weights:.4?}");
    println!("gradient  {g:.4?}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
