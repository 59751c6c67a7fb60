//! Exhaustive min-ratio cycle search for tiny graphs. Used only as an
//! oracle; it shares no code with the Bellman-Ford search.

use super::{CycleArc, SolverError};
use crate::graph::VertexId;

pub const BRUTE_FORCE_MAX_EDGES: usize = 12;

/// Minimum of `sum(sign * g) / sum(w)` over all simple cycles of the graph
/// with every edge usable in either direction. Returns `+inf` and an empty
/// cycle when the graph has no cycle.
pub fn brute_force_min_ratio(
    n: usize,
    edges: &[(VertexId, VertexId)],
    gradients: &[f64],
    weights: &[f64],
) -> Result<(f64, Vec<CycleArc>), SolverError> {
    if edges.len() > BRUTE_FORCE_MAX_EDGES {
        return Err(SolverError::TooLarge {
            max: BRUTE_FORCE_MAX_EDGES,
            got: edges.len(),
        });
    }
    // arcs[v] = (edge, sign, next vertex)
    let mut arcs: Vec<Vec<(usize, f64, VertexId)>> = vec![Vec::new(); n];
    for (e, &(u, v)) in edges.iter().enumerate() {
        arcs[u].push((e, 1.0, v));
        arcs[v].push((e, -1.0, u));
    }
    let mut best = (f64::INFINITY, Vec::new());
    let mut used_edge = vec![false; edges.len()];
    let mut on_path = vec![false; n];
    let mut path: Vec<CycleArc> = Vec::new();
    for start in 0..n {
        on_path[start] = true;
        extend(
            start,
            start,
            &arcs,
            gradients,
            weights,
            &mut used_edge,
            &mut on_path,
            &mut path,
            &mut best,
        );
        on_path[start] = false;
    }
    Ok(best)
}

#[allow(clippy::too_many_arguments)]
fn extend(
    start: VertexId,
    at: VertexId,
    arcs: &[Vec<(usize, f64, VertexId)>],
    gradients: &[f64],
    weights: &[f64],
    used_edge: &mut [bool],
    on_path: &mut [bool],
    path: &mut Vec<CycleArc>,
    best: &mut (f64, Vec<CycleArc>),
) {
    for &(e, sign, next) in &arcs[at] {
        // Canonical form: the smallest vertex of the cycle is its start.
        if used_edge[e] || next < start {
            continue;
        }
        if next == start {
            path.push(CycleArc { edge: e, sign });
            let num: f64 = path.iter().map(|a| a.sign * gradients[a.edge]).sum();
            let den: f64 = path.iter().map(|a| weights[a.edge]).sum();
            let ratio = num / den;
            if ratio < best.0 {
                *best = (ratio, path.clone());
            }
            path.pop();
            continue;
        }
        if on_path[next] {
            continue;
        }
        used_edge[e] = true;
        on_path[next] = true;
        path.push(CycleArc { edge: e, sign });
        extend(
            start, next, arcs, gradients, weights, used_edge, on_path, path, best,
        );
        path.pop();
        on_path[next] = false;
        used_edge[e] = false;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_cycle_ratio() {
        let (ratio, cycle) =
            brute_force_min_ratio(2, &[(0, 1), (1, 0)], &[1.0, -3.0], &[1.0, 1.0]).unwrap();
        assert!((ratio + 1.0).abs() < 1e-15);
        assert_eq!(cycle.len(), 2);
    }

    #[test]
    fn dag_has_no_cycle() {
        let (ratio, cycle) =
            brute_force_min_ratio(3, &[(0, 1), (1, 2), (0, 2)], &[1.0, 2.0, 3.0], &[1.0; 3])
                .unwrap();
        // 0->1->2 and 0->2 form an undirected cycle; a DAG in the bidirected
        // sense needs a forest.
        assert!(ratio.is_finite());
        assert_eq!(cycle.len(), 3);
        let (ratio, cycle) =
            brute_force_min_ratio(3, &[(0, 1), (1, 2)], &[1.0, 2.0], &[1.0; 2]).unwrap();
        assert_eq!(ratio, f64::INFINITY);
        assert!(cycle.is_empty());
    }

    #[test]
    fn negation_symmetry() {
        let edges = [(0, 1), (1, 2), (2, 0), (0, 2)];
        let g = [1.0, -2.0, 0.5, 3.0];
        let w = [1.0, 2.0, 0.5, 1.5];
        let neg: Vec<f64> = g.iter().map(|x| -x).collect();
        let (min_g, _) = brute_force_min_ratio(3, &edges, &g, &w).unwrap();
        let (min_neg, _) = brute_force_min_ratio(3, &edges, &neg, &w).unwrap();
        // Every cycle appears in both orientations, so the set of ratios is
        // symmetric and both minima coincide with minus the maximum.
        assert!((min_g - min_neg).abs() < 1e-12);
        assert!(min_g < 0.0);
    }

    #[test]
    fn self_loop_is_a_cycle() {
        let (ratio, cycle) = brute_force_min_ratio(1, &[(0, 0)], &[-2.0], &[4.0]).unwrap();
        assert_eq!(cycle.len(), 1);
        assert!((ratio + 0.5).abs() < 1e-15);
    }

    #[test]
    fn size_cap() {
        let edges = vec![(0, 1); 13];
        assert!(matches!(
            brute_force_min_ratio(2, &edges, &[0.0; 13], &[1.0; 13]),
            Err(SolverError::TooLarge { .. })
        ));
    }
}
