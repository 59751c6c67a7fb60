//! Exact shortest paths: phase initialization, termination watching and
//! ground truth for verification.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::graph::{DynamicGraph, EdgeId, VertexId};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("vertex {0} is unreachable from the source")]
    Unreachable(VertexId),
    #[error("total distance increased at step {step}: {before} -> {after}")]
    NonMonotone {
        step: usize,
        before: f64,
        after: f64,
    },
    #[error("shortest path tree violates {0}")]
    InvalidTree(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShortestPathTree {
    pub source: VertexId,
    /// `None` marks an unreachable vertex.
    pub dist: Vec<Option<u64>>,
    pub parent: Vec<Option<EdgeId>>,
    /// Edge count of the graph when the tree was computed.
    pub edge_count: usize,
}

impl ShortestPathTree {
    pub fn distance(&self, v: VertexId) -> Option<u64> {
        self.dist[v]
    }

    /// Edges of the tree path from the source to `v`, in order.
    pub fn path_edges(&self, g: &DynamicGraph, v: VertexId) -> Option<Vec<EdgeId>> {
        self.dist[v]?;
        let mut path = Vec::new();
        let mut cur = v;
        while let Some(e) = self.parent[cur] {
            path.push(e);
            cur = g.edge(e).tail;
        }
        path.reverse();
        Some(path)
    }

    /// Sum of distances over every vertex other than the source.
    pub fn total(&self) -> Result<u64, OracleError> {
        let mut sum = 0u64;
        for (v, d) in self.dist.iter().enumerate() {
            if v == self.source {
                continue;
            }
            sum += d.ok_or(OracleError::Unreachable(v))?;
        }
        Ok(sum)
    }

    /// Feasibility and tightness against the edges of `g` that existed when
    /// the tree was computed.
    pub fn check(&self, g: &DynamicGraph) -> Result<(), OracleError> {
        if self.dist[self.source] != Some(0) {
            return Err(OracleError::InvalidTree("dist(source) = 0".into()));
        }
        for e in 0..self.edge_count {
            let edge = g.edge(e);
            if let Some(du) = self.dist[edge.tail] {
                match self.dist[edge.head] {
                    Some(dv) if dv <= du + edge.length => {}
                    _ => return Err(OracleError::InvalidTree(format!("edge {e} is not relaxed"))),
                }
            }
        }
        for v in 0..self.dist.len() {
            if let Some(path) = self.path_edges(g, v) {
                let len: u64 = path.iter().map(|&e| g.edge(e).length).sum();
                if Some(len) != self.dist[v] {
                    return Err(OracleError::InvalidTree(format!(
                        "parent path to {v} is not tight"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Binary-heap Dijkstra; ties are popped by smallest vertex id and a parent
/// is replaced only by a strictly shorter route.
pub fn dijkstra(g: &DynamicGraph) -> ShortestPathTree {
    dijkstra_from(g, g.source())
}

pub fn dijkstra_from(g: &DynamicGraph, source: VertexId) -> ShortestPathTree {
    let n = g.vertex_count();
    let mut dist: Vec<Option<u64>> = vec![None; n];
    let mut parent = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source] = Some(0);
    heap.push(Reverse((0u64, source)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        for &e in g.out_edges(u) {
            let edge = g.edge(e);
            let nd = d + edge.length;
            let v = edge.head;
            if dist[v].is_none_or(|old| nd < old) {
                dist[v] = Some(nd);
                parent[v] = Some(e);
                heap.push(Reverse((nd, v)));
            }
        }
    }
    ShortestPathTree {
        source,
        dist,
        parent,
        edge_count: g.edge_count(),
    }
}

pub fn total_distance(g: &DynamicGraph) -> Result<u64, OracleError> {
    dijkstra(g).total()
}

/// First index whose total falls strictly below `(1 - alpha/2) F`.
pub fn threshold_watch(
    totals: &[f64],
    initial_total: f64,
    alpha: f64,
) -> Result<Option<usize>, OracleError> {
    for (step, pair) in totals.windows(2).enumerate() {
        if pair[1] > pair[0] {
            return Err(OracleError::NonMonotone {
                step: step + 1,
                before: pair[0],
                after: pair[1],
            });
        }
    }
    let threshold = (1.0 - alpha / 2.0) * initial_total;
    Ok(totals.iter().position(|&t| t < threshold))
}
