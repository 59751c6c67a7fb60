//! Splitting vertices into zero-length chains so every vertex has in- and
//! out-degree at most 3.
//!
//! Each original vertex keeps at most two real out-edges; the third slot
//! holds a zero-length edge to an auxiliary out-node, which again takes two
//! real edges and a chain slot. In-edges arrive through a mirrored in-chain.
//! Original vertex ids are preserved and auxiliary vertices follow them.

use thiserror::Error;

use crate::graph::{DynamicGraph, EdgeId, GraphError, VertexId};

const SLOTS: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DegreeError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("auxiliary vertex pool of size {0} exhausted")]
    Capacity(usize),
}

/// One insertion into the reduced graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MappedEdge {
    pub tail: VertexId,
    pub head: VertexId,
    pub length: u64,
    /// Original edge, `None` for chain edges.
    pub origin: Option<EdgeId>,
}

#[derive(Debug, Clone)]
pub struct DegreeReducer {
    n: usize,
    capacity: usize,
    next_aux: usize,
    /// Current out-node of each original vertex and its used real slots.
    out_node: Vec<(VertexId, usize)>,
    in_node: Vec<(VertexId, usize)>,
    origin: Vec<Option<EdgeId>>,
    original_edges: usize,
}

/// Auxiliary vertices needed to insert `edges` into an empty graph on `n`
/// vertices.
pub fn required_aux(n: usize, edges: &[(VertexId, VertexId)]) -> usize {
    let mut out = vec![0usize; n];
    let mut inn = vec![0usize; n];
    for &(u, v) in edges {
        out[u] += 1;
        inn[v] += 1;
    }
    let chain = |k: usize| k.div_ceil(SLOTS).saturating_sub(1);
    out.iter().chain(&inn).map(|&k| chain(k)).sum()
}

impl DegreeReducer {
    /// Reducer for `n` original vertices with room for `capacity` auxiliary
    /// vertices.
    pub fn new(n: usize, capacity: usize) -> Self {
        Self {
            n,
            capacity,
            next_aux: 0,
            out_node: (0..n).map(|v| (v, 0)).collect(),
            in_node: (0..n).map(|v| (v, 0)).collect(),
            origin: Vec::new(),
            original_edges: 0,
        }
    }

    pub fn original_vertices(&self) -> usize {
        self.n
    }

    /// Vertex count of the reduced graph.
    pub fn vertex_count(&self) -> usize {
        self.n + self.capacity
    }

    pub fn aux_used(&self) -> usize {
        self.next_aux
    }

    /// Original edge behind a reduced edge.
    pub fn origin(&self, reduced: EdgeId) -> Option<EdgeId> {
        self.origin.get(reduced).copied().flatten()
    }

    fn allocate(&mut self) -> Result<VertexId, DegreeError> {
        if self.next_aux == self.capacity {
            return Err(DegreeError::Capacity(self.capacity));
        }
        self.next_aux += 1;
        Ok(self.n + self.next_aux - 1)
    }

    /// Reduced insertions (at most three) for the original edge `(u, v)`.
    /// The original edge id is the number of edges mapped so far.
    pub fn map_insertion(
        &mut self,
        u: VertexId,
        v: VertexId,
        length: u64,
    ) -> Result<Vec<MappedEdge>, DegreeError> {
        for x in [u, v] {
            if x >= self.n {
                return Err(GraphError::VertexOutOfRange {
                    vertex: x,
                    n: self.n,
                }
                .into());
            }
        }
        let id = self.original_edges;
        let mut mapped = Vec::with_capacity(3);
        if self.out_node[u].1 == SLOTS {
            let aux = self.allocate()?;
            mapped.push(MappedEdge {
                tail: self.out_node[u].0,
                head: aux,
                length: 0,
                origin: None,
            });
            self.out_node[u] = (aux, 0);
        }
        if self.in_node[v].1 == SLOTS {
            let aux = self.allocate()?;
            mapped.push(MappedEdge {
                tail: aux,
                head: self.in_node[v].0,
                length: 0,
                origin: None,
            });
            self.in_node[v] = (aux, 0);
        }
        mapped.push(MappedEdge {
            tail: self.out_node[u].0,
            head: self.in_node[v].0,
            length,
            origin: Some(id),
        });
        self.out_node[u].1 += 1;
        self.in_node[v].1 += 1;
        self.original_edges += 1;
        self.origin.extend(mapped.iter().map(|m| m.origin));
        Ok(mapped)
    }
}

/// Reduced copy of `g` with exactly enough auxiliary vertices for its edges.
pub fn degree_reduce(g: &DynamicGraph) -> Result<(DynamicGraph, DegreeReducer), DegreeError> {
    let pairs: Vec<_> = g.edges().iter().map(|e| (e.tail, e.head)).collect();
    degree_reduce_with_capacity(g, required_aux(g.vertex_count(), &pairs))
}

pub fn degree_reduce_with_capacity(
    g: &DynamicGraph,
    capacity: usize,
) -> Result<(DynamicGraph, DegreeReducer), DegreeError> {
    let mut reducer = DegreeReducer::new(g.vertex_count(), capacity);
    let mut reduced = DynamicGraph::new(reducer.vertex_count(), g.source())?;
    for edge in g.edges() {
        for m in reducer.map_insertion(edge.tail, edge.head, edge.length)? {
            reduced.insert_edge(m.tail, m.head, m.length, edge.kind)?;
        }
    }
    Ok((reduced, reducer))
}
