//! Insertion-only directed multigraph.
//!
//! Conventions shared by every other module:
//! * `divergence(f)[v] = sum of f over out-edges of v - sum of f over in-edges of v`,
//!   so one unit on every source edge `(s, v)` yields the demand `(n-1, -1, ..., -1)`.
//! * `potential_drop(phi, e) = phi(tail) - phi(head)`, the edge row of `B phi`.

use thiserror::Error;

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    VertexOutOfRange { vertex: VertexId, n: usize },
    #[error("edge {edge} out of range for graph with {m} edges")]
    EdgeOutOfRange { edge: EdgeId, m: usize },
    #[error("vector has length {got}, expected {expected}")]
    SizeMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    /// An edge of the input graph (including the scale umbrella edges).
    Original,
    /// A source edge `(s, v)` carrying the initial distance of `v`.
    Augmented,
    /// An edge of a contracted graph whose length encodes a frozen distance.
    Shortcut,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub tail: VertexId,
    pub head: VertexId,
    pub length: u64,
    pub kind: EdgeKind,
}

#[derive(Debug, Clone)]
pub struct DynamicGraph {
    source: VertexId,
    edges: Vec<Edge>,
    out_edges: Vec<Vec<EdgeId>>,
    in_edges: Vec<Vec<EdgeId>>,
}

impl DynamicGraph {
    pub fn new(n: usize, source: VertexId) -> Result<Self, GraphError> {
        if source >= n {
            return Err(GraphError::VertexOutOfRange { vertex: source, n });
        }
        Ok(Self {
            source,
            edges: Vec::new(),
            out_edges: vec![Vec::new(); n],
            in_edges: vec![Vec::new(); n],
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.out_edges.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn source(&self) -> VertexId {
        self.source
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e]
    }

    pub fn try_edge(&self, e: EdgeId) -> Result<&Edge, GraphError> {
        self.edges.get(e).ok_or(GraphError::EdgeOutOfRange {
            edge: e,
            m: self.edges.len(),
        })
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn out_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.out_edges[v]
    }

    pub fn in_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.in_edges[v]
    }

    pub fn add_vertex(&mut self) -> VertexId {
        self.out_edges.push(Vec::new());
        self.in_edges.push(Vec::new());
        self.out_edges.len() - 1
    }

    fn check_vertex(&self, v: VertexId) -> Result<(), GraphError> {
        if v < self.vertex_count() {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange {
                vertex: v,
                n: self.vertex_count(),
            })
        }
    }

    /// Appends an edge; the returned id equals the previous edge count.
    pub fn insert_edge(
        &mut self,
        tail: VertexId,
        head: VertexId,
        length: u64,
        kind: EdgeKind,
    ) -> Result<EdgeId, GraphError> {
        self.check_vertex(tail)?;
        self.check_vertex(head)?;
        let id = self.edges.len();
        self.edges.push(Edge {
            tail,
            head,
            length,
            kind,
        });
        self.out_edges[tail].push(id);
        self.in_edges[head].push(id);
        Ok(id)
    }

    fn check_edge_vector(&self, f: &[f64]) -> Result<(), GraphError> {
        if f.len() == self.edges.len() {
            Ok(())
        } else {
            Err(GraphError::SizeMismatch {
                expected: self.edges.len(),
                got: f.len(),
            })
        }
    }

    /// `B^T f` under the out-minus-in convention.
    pub fn divergence(&self, f: &[f64]) -> Result<Vec<f64>, GraphError> {
        self.check_edge_vector(f)?;
        let mut div = vec![0.0; self.vertex_count()];
        for (edge, &value) in self.edges.iter().zip(f) {
            div[edge.tail] += value;
            div[edge.head] -= value;
        }
        Ok(div)
    }

    /// `(B phi)_e = phi(tail) - phi(head)`.
    pub fn potential_drop(&self, phi: &[f64], e: EdgeId) -> Result<f64, GraphError> {
        if phi.len() != self.vertex_count() {
            return Err(GraphError::SizeMismatch {
                expected: self.vertex_count(),
                got: phi.len(),
            });
        }
        let edge = self.try_edge(e)?;
        Ok(phi[edge.tail] - phi[edge.head])
    }

    pub fn is_circulation(&self, delta: &[f64], tol: f64) -> Result<bool, GraphError> {
        let div = self.divergence(delta)?;
        Ok(div.iter().all(|d| d.abs() <= tol))
    }

    /// Sum of `length * f` over all edges.
    pub fn cost(&self, f: &[f64]) -> f64 {
        self.edges
            .iter()
            .zip(f)
            .map(|(e, &x)| e.length as f64 * x)
            .sum()
    }
}
