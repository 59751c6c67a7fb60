//! Recursive incremental SSSP over distance scales and contracted graphs.
//!
//! A level keeps exact distances from the start of its current phase, one
//! detector per scale `L = 2^k`, and a child level on the contracted graph
//! `G(d, S)` of the vertices reported so far. Estimates of vertices outside
//! `S` stay at their phase-start values; vertices in `S` take the smaller of
//! that and the child's estimate. Any detector termination starts a new phase.
//! The bottom level recomputes exact distances after every insertion.

use std::thread;

use thiserror::Error;

use crate::barrier::{BarrierError, IpmParams};
use crate::degree::{degree_reduce_with_capacity, required_aux, DegreeError, DegreeReducer};
use crate::detector::{detector_init, DetectorError, DetectorState, InsertionReport};
use crate::graph::{DynamicGraph, EdgeId, EdgeKind, GraphError, VertexId};
use crate::oracle::{dijkstra, ShortestPathTree};

/// Default `alpha = epsilon_bar / DEFAULT_ALPHA_DIVISOR`, which puts the
/// reporting threshold `epsilon_bar / (10 alpha)` at 2.
pub const DEFAULT_ALPHA_DIVISOR: f64 = 20.0;
pub const DEFAULT_LEVELS: usize = 2;
pub const DEFAULT_MAX_LENGTH: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Detector(#[from] DetectorError),
    #[error(transparent)]
    Degree(#[from] DegreeError),
    #[error(transparent)]
    Barrier(#[from] BarrierError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("edge length {length} outside [1, {max}]")]
    Length { length: u64, max: u64 },
    #[error("the source must belong to the contracted vertex set")]
    SourceNotMember,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EngineConfig {
    pub epsilon: f64,
    /// Number of detector levels above the exact bottom level.
    pub levels: usize,
    /// Largest edge length `W` the stream may insert.
    pub max_length: u64,
    /// Overrides the default `alpha`.
    pub alpha: Option<f64>,
    /// Overrides the barrier power.
    pub power: Option<u32>,
    /// Expected final edge count; defaults to the initial one.
    pub edge_hint: Option<usize>,
    pub degree_reduce: bool,
    /// Auxiliary vertices reserved for degree reduction.
    pub aux_vertices: Option<usize>,
    pub accelerate: bool,
    /// Run the detectors of a level on separate threads.
    pub parallel: bool,
    pub iteration_budget: Option<usize>,
}

impl EngineConfig {
    pub fn new(epsilon: f64) -> Self {
        Self {
            epsilon,
            levels: DEFAULT_LEVELS,
            max_length: DEFAULT_MAX_LENGTH,
            alpha: None,
            power: None,
            edge_hint: None,
            degree_reduce: false,
            aux_vertices: None,
            accelerate: false,
            parallel: false,
            iteration_budget: None,
        }
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(EngineError::Config("epsilon must lie in (0, 1)".into()));
        }
        if self.levels > 8 {
            return Err(EngineError::Config("at most 8 levels".into()));
        }
        if self.max_length == 0 {
            return Err(EngineError::Config("max length must be positive".into()));
        }
        Ok(())
    }

    /// `epsilon_bar = epsilon / (10 ln m)`, lowered if needed so that
    /// `(1 + 5 epsilon_bar)^B <= 1 + epsilon`.
    pub fn level_epsilon(&self, m: usize) -> f64 {
        let log_m = (m.max(3) as f64).ln();
        let b = self.levels.max(1) as f64;
        let cap = ((1.0 + self.epsilon).powf(1.0 / b) - 1.0) / 5.0;
        (self.epsilon / (10.0 * log_m)).min(cap)
    }

    /// `min(m^(-1/B), epsilon_bar / 20)` unless overridden.
    pub fn level_alpha(&self, m: usize) -> f64 {
        self.alpha.unwrap_or_else(|| {
            let b = self.levels.max(1) as f64;
            (m.max(2) as f64)
                .powf(-1.0 / b)
                .min(self.level_epsilon(m) / DEFAULT_ALPHA_DIVISOR)
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct LevelParams {
    epsilon: f64,
    alpha: f64,
    power: Option<u32>,
    accelerate: bool,
    parallel: bool,
    budget: Option<usize>,
    max_length: u64,
}

impl LevelParams {
    fn detector_params(&self, m: usize) -> Result<IpmParams, EngineError> {
        let mut params = IpmParams::new(self.alpha, self.epsilon, m)?;
        if let Some(p) = self.power {
            params = params.with_power(p)?;
        }
        params.iteration_budget = self.budget;
        Ok(params.accelerated(self.accelerate))
    }
}

/// `G` plus a vertex `s'` (id `n`) with edges `(s', s)` of length `L` and
/// `(s', v)` of length `2L` for every `v`.
pub fn build_scaled(g: &DynamicGraph, scale: u64) -> Result<DynamicGraph, GraphError> {
    let n = g.vertex_count();
    let mut h = DynamicGraph::new(n + 1, n)?;
    h.insert_edge(n, g.source(), scale, EdgeKind::Shortcut)?;
    for v in 0..n {
        h.insert_edge(n, v, 2 * scale, EdgeKind::Shortcut)?;
    }
    for e in g.edges() {
        h.insert_edge(e.tail, e.head, e.length, e.kind)?;
    }
    Ok(h)
}

#[derive(Debug, Clone)]
pub struct ScaledInstance {
    pub scale: u64,
    pub detector: DetectorState,
}

impl ScaledInstance {
    pub fn new(g: &DynamicGraph, scale: u64, params: IpmParams) -> Result<Self, EngineError> {
        let scaled = build_scaled(g, scale)?;
        Ok(Self {
            scale,
            detector: detector_init(&scaled, scale, params)?,
        })
    }
}

/// Where a contracted-graph edge comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// `(s, v)` of length `d_v`.
    Estimate { vertex: VertexId },
    /// `(s, v)` of length `d_u + l_e` for the parent edge `e = (u, v)`.
    Shortcut { edge: EdgeId },
    /// Copy of the parent edge `e` between two members.
    Real { edge: EdgeId },
}

/// The contracted graph `G(d, S)`. Vertex ids are those of the parent graph;
/// non-members stay isolated.
#[derive(Debug, Clone)]
pub struct ContractionState {
    /// Skip shortcut edges `(s, v, d_u + l_e)` that are no shorter than the
    /// estimate edge `(s, v, d_v)`; distances in the contracted graph are
    /// unchanged.
    pub prune_dominated: bool,
    pub members: Vec<bool>,
    pub order: Vec<VertexId>,
    pub graph: DynamicGraph,
    pub provenance: Vec<Provenance>,
}

/// `G(d, S)` for `S = members`, which must contain the source.
pub fn build_contracted(
    g: &DynamicGraph,
    d: &[Option<u64>],
    members: &[VertexId],
) -> Result<ContractionState, EngineError> {
    build_contracted_with(g, d, members, false)
}

/// [`build_contracted`], optionally without dominated shortcut edges.
pub fn build_contracted_with(
    g: &DynamicGraph,
    d: &[Option<u64>],
    members: &[VertexId],
    prune_dominated: bool,
) -> Result<ContractionState, EngineError> {
    if !members.contains(&g.source()) {
        return Err(EngineError::SourceNotMember);
    }
    let mut state = ContractionState {
        prune_dominated,
        members: vec![false; g.vertex_count()],
        order: Vec::new(),
        graph: DynamicGraph::new(g.vertex_count(), g.source())?,
        provenance: Vec::new(),
    };
    for &x in members {
        state.add_member(g, d, x)?;
    }
    Ok(state)
}

impl ContractionState {
    pub fn is_member(&self, v: VertexId) -> bool {
        self.members[v]
    }

    fn push(
        &mut self,
        tail: VertexId,
        head: VertexId,
        length: u64,
        provenance: Provenance,
    ) -> Result<EdgeId, EngineError> {
        let kind = match provenance {
            Provenance::Real { .. } => EdgeKind::Original,
            _ => EdgeKind::Shortcut,
        };
        let id = self.graph.insert_edge(tail, head, length, kind)?;
        self.provenance.push(provenance);
        Ok(id)
    }

    /// Adds `x` to `S`; returns the new child edges.
    pub fn add_member(
        &mut self,
        g: &DynamicGraph,
        d: &[Option<u64>],
        x: VertexId,
    ) -> Result<Vec<EdgeId>, EngineError> {
        if self.members[x] {
            return Ok(Vec::new());
        }
        self.members[x] = true;
        self.order.push(x);
        let s = g.source();
        let mut added = Vec::new();
        if let (true, Some(dx)) = (x != s, d[x]) {
            added.push(self.push(s, x, dx, Provenance::Estimate { vertex: x })?);
        }
        for &e in g.in_edges(x) {
            added.extend(self.in_edge(g, d, e)?);
        }
        for &e in g.out_edges(x) {
            let edge = g.edge(e);
            if edge.head != x && self.members[edge.head] {
                added.push(self.push(x, edge.head, edge.length, Provenance::Real { edge: e })?);
            }
        }
        Ok(added)
    }

    fn in_edge(
        &mut self,
        g: &DynamicGraph,
        d: &[Option<u64>],
        e: EdgeId,
    ) -> Result<Vec<EdgeId>, EngineError> {
        let edge = *g.edge(e);
        let mut added = Vec::new();
        if let Some(du) = d[edge.tail] {
            let dominated =
                self.prune_dominated && d[edge.head].is_some_and(|dv| dv <= du + edge.length);
            if !dominated {
                added.push(self.push(
                    g.source(),
                    edge.head,
                    du + edge.length,
                    Provenance::Shortcut { edge: e },
                )?);
            }
        }
        if self.members[edge.tail] {
            added.push(self.push(
                edge.tail,
                edge.head,
                edge.length,
                Provenance::Real { edge: e },
            )?);
        }
        Ok(added)
    }

    /// Mirrors a new parent edge; returns the new child edges.
    pub fn add_edge(
        &mut self,
        g: &DynamicGraph,
        d: &[Option<u64>],
        e: EdgeId,
    ) -> Result<Vec<EdgeId>, EngineError> {
        if self.members[g.edge(e).head] {
            self.in_edge(g, d, e)
        } else {
            Ok(Vec::new())
        }
    }

    /// Parent-graph walk for one child edge, using `tree` for phase-start paths.
    pub fn expand(
        &self,
        g: &DynamicGraph,
        tree: &ShortestPathTree,
        child_edge: EdgeId,
    ) -> Vec<EdgeId> {
        match self.provenance[child_edge] {
            Provenance::Estimate { vertex } => tree.path_edges(g, vertex).unwrap_or_default(),
            Provenance::Shortcut { edge } => {
                let mut path = tree.path_edges(g, g.edge(edge).tail).unwrap_or_default();
                path.push(edge);
                path
            }
            Provenance::Real { edge } => vec![edge],
        }
    }
}

/// Counters of one detector lifetime.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorSummary {
    /// Detector levels below this one; the top level has the largest value.
    pub depth: usize,
    pub scale: u64,
    /// Internal edge count (source edges included) at the end of the lifetime.
    pub edges: usize,
    pub alpha: f64,
    pub epsilon: f64,
    pub power: u32,
    pub quality: f64,
    pub recourse: usize,
    pub ipm_iterations: usize,
    pub step_equivalents: usize,
    pub crossings: [usize; 3],
    pub gradient_updates: usize,
    pub insertions: usize,
    pub terminated: bool,
    pub min_decrease: Option<f64>,
    pub median_decrease: Option<f64>,
    pub step_bound: f64,
}

impl DetectorSummary {
    fn of(depth: usize, instance: &ScaledInstance) -> Self {
        let d = &instance.detector;
        let metrics = d.metrics();
        let params = d.params();
        let edges = d.graph().edge_count();
        Self {
            depth,
            scale: instance.scale,
            edges,
            alpha: params.alpha,
            epsilon: params.epsilon,
            power: params.power,
            quality: params.quality,
            recourse: metrics.recourse,
            ipm_iterations: metrics.ipm_iterations,
            step_equivalents: metrics.step_equivalents,
            crossings: metrics.crossings,
            gradient_updates: metrics.gradient_updates,
            insertions: metrics.insertions,
            terminated: d.is_terminated(),
            min_decrease: (!metrics.decreases.is_empty()).then_some(metrics.min_decrease),
            median_decrease: metrics.median_decrease(),
            step_bound: params.step_bound(edges),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EngineMetrics {
    pub insertions: usize,
    /// Phases of the top level, the initial one included.
    pub phases: usize,
    /// Phases summed over all levels.
    pub phases_all_levels: usize,
    pub ipm_iterations: usize,
    pub recourse: usize,
    pub gradient_updates: usize,
    pub child_insertions: usize,
    pub detectors: usize,
}

#[derive(Debug, Clone)]
struct Level {
    depth: usize,
    params: LevelParams,
    bound: u64,
    graph: DynamicGraph,
    tree: ShortestPathTree,
    instances: Vec<ScaledInstance>,
    contraction: Option<ContractionState>,
    child: Option<Box<Level>>,
    estimates: Vec<Option<u64>>,
    via_child: Vec<bool>,
    phases: usize,
    /// Phases of discarded descendant levels.
    retired_phases: usize,
    child_insertions: usize,
    retired: Vec<DetectorSummary>,
}

/// `L = 1, 2, 4, ...` up to the first power of two at least `2 * bound`.
fn scale_set(bound: u64) -> Vec<u64> {
    let mut scales = vec![1u64];
    while *scales.last().unwrap() < 2 * bound.max(1) {
        scales.push(scales.last().unwrap() * 2);
    }
    scales
}

fn run_all<T, R, F>(items: &mut [T], parallel: bool, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(&mut T) -> R + Sync,
{
    if !parallel || items.len() < 2 {
        return items.iter_mut().map(f).collect();
    }
    let f = &f;
    thread::scope(|scope| {
        let handles: Vec<_> = items
            .iter_mut()
            .map(|item| scope.spawn(move || f(item)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("detector thread panicked"))
            .collect()
    })
}

impl Level {
    fn new(
        graph: DynamicGraph,
        depth: usize,
        params: LevelParams,
        bound: u64,
    ) -> Result<Self, EngineError> {
        let n = graph.vertex_count();
        let tree = dijkstra(&graph);
        let mut level = Self {
            depth,
            params,
            bound,
            graph,
            tree,
            instances: Vec::new(),
            contraction: None,
            child: None,
            estimates: vec![None; n],
            via_child: vec![false; n],
            phases: 0,
            retired_phases: 0,
            child_insertions: 0,
            retired: Vec::new(),
        };
        level.initialize()?;
        Ok(level)
    }

    fn initialize(&mut self) -> Result<(), EngineError> {
        let depth = self.depth;
        self.retired.extend(
            self.instances
                .drain(..)
                .map(|i| DetectorSummary::of(depth, &i)),
        );
        if let Some(child) = self.child.take() {
            self.absorb_child(*child);
        }
        self.phases += 1;
        self.tree = dijkstra(&self.graph);
        self.contraction = None;
        if self.depth == 0 {
            self.estimates = self.tree.dist.clone();
            self.via_child.fill(false);
            return Ok(());
        }

        let n = self.graph.vertex_count();
        let m = self.graph.edge_count() + 2 * n + 1;
        let params = self.params.detector_params(m)?;
        let graph = &self.graph;
        let mut scales = scale_set(self.bound);
        let built = run_all(&mut scales, self.params.parallel, |&mut scale| {
            ScaledInstance::new(graph, scale, params.clone())
        });
        self.instances = built.into_iter().collect::<Result<_, _>>()?;

        let mut members = vec![self.graph.source()];
        for instance in &self.instances {
            members.extend_from_slice(instance.detector.initial_set());
        }
        let contraction = build_contracted_with(&self.graph, &self.tree.dist, &members, true)?;
        let child_bound = ((1.0 + 5.0 * self.params.epsilon) * self.bound as f64).ceil() as u64
            + self.params.max_length;
        let child = Level::new(
            contraction.graph.clone(),
            depth - 1,
            self.params,
            child_bound,
        )?;
        self.contraction = Some(contraction);
        self.child = Some(Box::new(child));
        self.refresh();
        Ok(())
    }

    /// Keeps the counters of a discarded child chain.
    fn absorb_child(&mut self, mut child: Level) {
        let depth = child.depth;
        child.retired.extend(
            child
                .instances
                .drain(..)
                .map(|i| DetectorSummary::of(depth, &i)),
        );
        self.retired.append(&mut child.retired);
        self.child_insertions += child.child_insertions;
        self.retired_phases += child.phases + child.retired_phases;
        if let Some(grandchild) = child.child.take() {
            self.absorb_child(*grandchild);
        }
    }

    fn refresh(&mut self) {
        let (Some(contraction), Some(child)) = (&self.contraction, &self.child) else {
            return;
        };
        for v in 0..self.estimates.len() {
            let d0 = self.tree.dist[v];
            let c = if contraction.members[v] {
                child.estimates[v]
            } else {
                None
            };
            let use_child = match (c, d0) {
                (Some(c), Some(d)) => c < d,
                (Some(_), None) => true,
                _ => false,
            };
            self.via_child[v] = use_child;
            self.estimates[v] = if use_child { c } else { d0 };
        }
    }

    fn insert(&mut self, u: VertexId, v: VertexId, length: u64) -> Result<(), EngineError> {
        self.insert_batch(&[(u, v, length)])
    }

    fn insert_batch(&mut self, batch: &[(VertexId, VertexId, u64)]) -> Result<(), EngineError> {
        if self.depth == 0 {
            for &(u, v, l) in batch {
                self.graph.insert_edge(u, v, l, EdgeKind::Original)?;
            }
            self.tree = dijkstra(&self.graph);
            self.estimates = self.tree.dist.clone();
            return Ok(());
        }
        for &(u, v, l) in batch {
            self.insert_one(u, v, l)?;
        }
        Ok(())
    }

    fn insert_one(&mut self, u: VertexId, v: VertexId, length: u64) -> Result<(), EngineError> {
        let e = self.graph.insert_edge(u, v, length, EdgeKind::Original)?;
        let reports: Vec<Result<InsertionReport, DetectorError>> =
            run_all(&mut self.instances, self.params.parallel, |i| {
                i.detector.process_insertion(u, v, length)
            });
        let reports: Vec<InsertionReport> = reports.into_iter().collect::<Result<_, _>>()?;
        if reports.iter().any(|r| r.terminated) {
            return self.initialize();
        }
        let contraction = self
            .contraction
            .as_mut()
            .expect("detector level has a contraction");
        let d0 = &self.tree.dist;
        let mut added = contraction.add_edge(&self.graph, d0, e)?;
        for report in &reports {
            for &x in &report.set {
                added.extend(contraction.add_member(&self.graph, d0, x)?);
            }
        }
        if !added.is_empty() {
            let batch: Vec<_> = added
                .iter()
                .map(|&ce| {
                    let edge = contraction.graph.edge(ce);
                    (edge.tail, edge.head, edge.length)
                })
                .collect();
            self.child_insertions += batch.len();
            self.child
                .as_mut()
                .expect("detector level has a child")
                .insert_batch(&batch)?;
        }
        self.refresh();
        Ok(())
    }

    /// Level-graph edges of a walk from the source of length `estimates[v]`.
    fn query_path(&self, v: VertexId) -> Option<Vec<EdgeId>> {
        self.estimates[v]?;
        if !self.via_child[v] {
            return self.tree.path_edges(&self.graph, v);
        }
        let contraction = self.contraction.as_ref()?;
        let child_path = self.child.as_ref()?.query_path(v)?;
        Some(
            child_path
                .into_iter()
                .flat_map(|ce| contraction.expand(&self.graph, &self.tree, ce))
                .collect(),
        )
    }

    fn collect(&self, metrics: &mut EngineMetrics, summaries: &mut Vec<DetectorSummary>) {
        metrics.phases_all_levels += self.phases + self.retired_phases;
        metrics.child_insertions += self.child_insertions;
        metrics.detectors += self.instances.len();
        summaries.extend(self.retired.iter().cloned());
        summaries.extend(
            self.instances
                .iter()
                .map(|i| DetectorSummary::of(self.depth, i)),
        );
        if let Some(child) = &self.child {
            child.collect(metrics, summaries);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnginePath {
    /// Vertices from the source to the target.
    pub vertices: Vec<VertexId>,
    /// Edge ids of the original graph.
    pub edges: Vec<EdgeId>,
    pub length: u64,
}

/// Result of comparing all estimates with exact distances.
#[derive(Debug, Clone, PartialEq)]
pub struct SandwichCheck {
    pub max_ratio: f64,
    /// Vertices whose estimate is below the exact distance or above
    /// `(1 + epsilon)` times it, or whose reachability disagrees.
    pub violations: Vec<VertexId>,
}

#[derive(Debug, Clone)]
pub struct SsspEngine {
    config: EngineConfig,
    graph: DynamicGraph,
    reducer: Option<DegreeReducer>,
    top: Level,
    insertions: usize,
}

/// Builds the engine on `g` with exact initial distances.
pub fn engine_initialize(
    g: &DynamicGraph,
    config: EngineConfig,
) -> Result<SsspEngine, EngineError> {
    config.validate()?;
    for e in g.edges() {
        if e.length == 0 || e.length > config.max_length {
            return Err(EngineError::Length {
                length: e.length,
                max: config.max_length,
            });
        }
    }
    let m_hint = config.edge_hint.unwrap_or(0).max(g.edge_count());
    let (work, reducer) = if config.degree_reduce {
        let pairs: Vec<_> = g.edges().iter().map(|e| (e.tail, e.head)).collect();
        let capacity = config.aux_vertices.unwrap_or_else(|| {
            required_aux(g.vertex_count(), &pairs) + 2 * (m_hint - g.edge_count())
        });
        let (reduced, reducer) = degree_reduce_with_capacity(g, capacity)?;
        (reduced, Some(reducer))
    } else {
        (g.clone(), None)
    };
    let m = m_hint.max(work.edge_count()).max(work.vertex_count());
    let params = LevelParams {
        epsilon: config.level_epsilon(m),
        alpha: config.level_alpha(m),
        power: config.power,
        accelerate: config.accelerate,
        parallel: config.parallel,
        budget: config.iteration_budget,
        max_length: config.max_length,
    };
    let bound = (work.vertex_count().max(2) as u64 - 1) * config.max_length;
    let top = Level::new(work, config.levels, params, bound)?;
    Ok(SsspEngine {
        config,
        graph: g.clone(),
        reducer,
        top,
        insertions: 0,
    })
}

impl SsspEngine {
    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    /// The original graph.
    pub fn graph(&self) -> &DynamicGraph {
        &self.graph
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    /// `epsilon_bar` used by every level.
    pub fn level_epsilon(&self) -> f64 {
        self.top.params.epsilon
    }

    pub fn level_alpha(&self) -> f64 {
        self.top.params.alpha
    }

    pub fn insert(&mut self, u: VertexId, v: VertexId, length: u64) -> Result<(), EngineError> {
        if length == 0 || length > self.config.max_length {
            return Err(EngineError::Length {
                length,
                max: self.config.max_length,
            });
        }
        self.graph.insert_edge(u, v, length, EdgeKind::Original)?;
        self.insertions += 1;
        match &mut self.reducer {
            Some(reducer) => {
                for mapped in reducer.map_insertion(u, v, length)? {
                    self.top.insert(mapped.tail, mapped.head, mapped.length)?;
                }
                Ok(())
            }
            None => self.top.insert(u, v, length),
        }
    }

    /// Current estimate `d~(v)`; `None` if `v` is unreachable.
    pub fn query_distance(&self, v: VertexId) -> Option<u64> {
        self.top.estimates.get(v).copied().flatten()
    }

    pub fn estimates(&self) -> &[Option<u64>] {
        &self.top.estimates[..self.graph.vertex_count()]
    }

    /// A walk from the source to `v` in the current graph whose length equals
    /// `query_distance(v)`.
    pub fn query_path(&self, v: VertexId) -> Option<EnginePath> {
        if v >= self.graph.vertex_count() {
            return None;
        }
        let level_edges = self.top.query_path(v)?;
        let edges: Vec<EdgeId> = match &self.reducer {
            Some(reducer) => level_edges
                .into_iter()
                .filter_map(|e| reducer.origin(e))
                .collect(),
            None => level_edges,
        };
        let mut vertices = vec![self.graph.source()];
        let mut length = 0;
        for &e in &edges {
            let edge = self.graph.edge(e);
            vertices.push(edge.head);
            length += edge.length;
        }
        Some(EnginePath {
            vertices,
            edges,
            length,
        })
    }

    /// Vertices in the top-level contracted set `S`.
    pub fn members(&self) -> Vec<VertexId> {
        match &self.top.contraction {
            Some(c) => c
                .order
                .iter()
                .copied()
                .filter(|&v| v < self.graph.vertex_count())
                .collect(),
            None => Vec::new(),
        }
    }

    pub fn metrics(&self) -> EngineMetrics {
        let mut metrics = EngineMetrics {
            insertions: self.insertions,
            phases: self.top.phases,
            ..EngineMetrics::default()
        };
        let mut summaries = Vec::new();
        self.top.collect(&mut metrics, &mut summaries);
        for s in &summaries {
            metrics.ipm_iterations += s.ipm_iterations;
            metrics.recourse += s.recourse;
            metrics.gradient_updates += s.gradient_updates;
        }
        metrics
    }

    /// Every detector lifetime so far, finished ones first.
    pub fn detector_summaries(&self) -> Vec<DetectorSummary> {
        let mut metrics = EngineMetrics::default();
        let mut summaries = Vec::new();
        self.top.collect(&mut metrics, &mut summaries);
        summaries
    }

    /// Live detectors of the top level.
    pub fn detectors(&self) -> impl Iterator<Item = &ScaledInstance> {
        self.top.instances.iter()
    }

    /// Compares every estimate with Dijkstra on the current graph.
    pub fn check(&self) -> SandwichCheck {
        let exact = dijkstra(&self.graph);
        let bound = 1.0 + self.config.epsilon;
        let mut max_ratio: f64 = 1.0;
        let mut violations = Vec::new();
        for (v, (&est, &d)) in self.estimates().iter().zip(&exact.dist).enumerate() {
            match (est, d) {
                (None, None) => {}
                (Some(est), Some(d)) => {
                    let ratio = if d == 0 {
                        if est == 0 {
                            1.0
                        } else {
                            f64::INFINITY
                        }
                    } else {
                        est as f64 / d as f64
                    };
                    max_ratio = max_ratio.max(ratio);
                    if est < d || ratio > bound {
                        violations.push(v);
                    }
                }
                _ => violations.push(v),
            }
        }
        SandwichCheck {
            max_ratio,
            violations,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_graph() -> DynamicGraph {
        let mut g = DynamicGraph::new(3, 0).unwrap();
        g.insert_edge(0, 1, 1, EdgeKind::Original).unwrap();
        g.insert_edge(1, 2, 2, EdgeKind::Original).unwrap();
        g
    }

    #[test]
    fn scaled_distances_are_clamped() {
        let g = path_graph();
        for scale in [1u64, 2, 4, 8] {
            let h = build_scaled(&g, scale).unwrap();
            let tree = dijkstra(&h);
            assert_eq!(tree.distance(0), Some(scale));
            for (v, d) in [(1usize, 1u64), (2, 3)] {
                assert_eq!(tree.distance(v), Some((scale + d).min(2 * scale)));
            }
        }
        let mut g = DynamicGraph::new(2, 0).unwrap();
        g.add_vertex();
        let tree = dijkstra(&build_scaled(&g, 4).unwrap());
        assert_eq!(tree.distance(2), Some(8));
    }

    #[test]
    fn contracted_graph_examples() {
        let g = path_graph();
        let d = [Some(0), Some(1), Some(3)];
        let c = build_contracted(&g, &d, &[0, 2]).unwrap();
        let edges: Vec<_> = c
            .graph
            .edges()
            .iter()
            .map(|e| (e.tail, e.head, e.length))
            .collect();
        assert_eq!(edges, vec![(0, 2, 3), (0, 2, 3)]);
        assert_eq!(
            c.provenance,
            vec![
                Provenance::Estimate { vertex: 2 },
                Provenance::Shortcut { edge: 1 }
            ]
        );
        assert_eq!(dijkstra(&c.graph).distance(2), Some(3));

        let c = build_contracted(&g, &d, &[0, 1, 2]).unwrap();
        let real: Vec<_> = c
            .provenance
            .iter()
            .filter(|p| matches!(p, Provenance::Real { .. }))
            .collect();
        assert_eq!(
            real,
            vec![&Provenance::Real { edge: 0 }, &Provenance::Real { edge: 1 }]
        );
        assert!(c
            .graph
            .edges()
            .iter()
            .any(|e| (e.tail, e.head, e.length) == (0, 1, 1)));
        assert!(c
            .graph
            .edges()
            .iter()
            .any(|e| (e.tail, e.head, e.length) == (1, 2, 2)));
        assert_eq!(dijkstra(&c.graph).distance(2), Some(3));

        assert!(matches!(
            build_contracted(&g, &d, &[1]),
            Err(EngineError::SourceNotMember)
        ));
    }

    #[test]
    fn scale_set_covers_twice_the_bound() {
        assert_eq!(scale_set(1), vec![1, 2]);
        assert_eq!(scale_set(5), vec![1, 2, 4, 8, 16]);
    }

    #[test]
    fn level_parameters() {
        let cfg = EngineConfig::new(0.2);
        let eps = cfg.level_epsilon(100);
        assert!((eps - 0.2 / (10.0 * 100f64.ln())).abs() < 1e-15);
        assert!((1.0 + 5.0 * eps).powi(2) <= 1.2);
        assert!((cfg.level_alpha(100) - eps / 20.0).abs() < 1e-15);
        let mut deep = EngineConfig::new(0.2);
        deep.levels = 6;
        assert!((1.0 + 5.0 * deep.level_epsilon(3)).powi(6) <= 1.2 + 1e-12);
    }

    #[test]
    fn fresh_engine_is_exact() {
        let g = path_graph();
        let engine = engine_initialize(&g, EngineConfig::new(0.2)).unwrap();
        assert_eq!(engine.query_distance(2), Some(3));
        let path = engine.query_path(2).unwrap();
        assert_eq!(path.vertices, vec![0, 1, 2]);
        assert_eq!(path.length, 3);
        assert!(engine.check().violations.is_empty());
    }
}
