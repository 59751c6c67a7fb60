//! Min-ratio cycle solver.
//!
//! [`SolverMirror`] keeps its own copy of weights `w~`, gradients `g~` and the
//! flow `f`, and answers `ApplyCycle` exactly: a circulation with
//! `g~^T D / ||W~ D||_1 <= -q` exists iff the bidirected residual graph has a
//! negative cycle under arc costs `+-g~_e + q w~_e`. One Bellman-Ford pass per
//! call either finds such a cycle or returns shortest-path potentials, which
//! form the dual certificate `|g~_e + phi(u) - phi(v)| <= q w~_e`.

pub mod brute;

use thiserror::Error;

use crate::graph::{EdgeId, VertexId};

pub use brute::{brute_force_min_ratio, BRUTE_FORCE_MAX_EDGES};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("edge {0} has non-positive weight")]
    NonPositiveWeight(EdgeId),
    #[error("non-finite value on edge {0}")]
    Overflow(EdgeId),
    #[error("edge {0} was not returned by the last ApplyCycle and cannot be updated")]
    NotEligible(EdgeId),
    #[error("edge id {got} is not fresh (next id is {expected})")]
    DuplicateEdge { expected: EdgeId, got: EdgeId },
    #[error("vertex {0} out of range")]
    Vertex(VertexId),
    #[error("expected {expected} values, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("brute force is limited to {max} edges, got {got}")]
    TooLarge { max: usize, got: usize },
}

/// Relative slack accepted on the cycle ratio to absorb rounding.
const RATIO_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// `q`.
    pub quality: f64,
    /// `Gamma`.
    pub step: f64,
    /// `eps_acc`: drift of `w~_e f_e` allowed between appearances in `E'`.
    pub accuracy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct MirrorEdge {
    tail: VertexId,
    head: VertexId,
    length: f64,
}

/// One traversed edge of a cycle; `sign` is `+1` along the edge and `-1` against it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleArc {
    pub edge: EdgeId,
    pub sign: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoundCycle {
    pub arcs: Vec<CycleArc>,
    /// `g~^T D / ||W~ D||_1` for the unit cycle.
    pub ratio: f64,
    /// `sum_e w~_e` over the cycle.
    pub weight: f64,
}

impl FoundCycle {
    /// Magnitude per unit of cycle that makes `||W~ (eta D)||_1 = step`.
    pub fn unit_scale(&self, step: f64) -> f64 {
        step / self.weight
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualCertificate {
    /// Potentials with `phi(anchor) = 0`.
    pub potentials: Vec<f64>,
    /// `||W~^{-1}(B phi + g~)||_inf`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StepResult {
    Applied {
        cycle: FoundCycle,
        /// Signed flow change per edge.
        delta: Vec<(EdgeId, f64)>,
        /// `||W~ delta||_1`.
        norm: f64,
        /// `E'` together with the current flow on each edge.
        returned: Vec<(EdgeId, f64)>,
    },
    Certified {
        /// Certified lower bound on the min ratio, `-residual`.
        lambda: f64,
        dual: DualCertificate,
    },
}

impl StepResult {
    pub fn is_applied(&self) -> bool {
        matches!(self, StepResult::Applied { .. })
    }
}

/// The solver's view of the graph plus the flow it maintains.
#[derive(Debug, Clone)]
pub struct SolverMirror {
    n: usize,
    anchor: VertexId,
    config: SolverConfig,
    edges: Vec<MirrorEdge>,
    weights: Vec<f64>,
    gradients: Vec<f64>,
    flow: Vec<f64>,
    /// Flow value at the edge's last appearance in `E'` (or update).
    reported: Vec<f64>,
    eligible: Vec<bool>,
    eligible_list: Vec<EdgeId>,
    demand: Vec<f64>,
    potentials: Vec<f64>,
    calls: usize,
    returned_total: usize,
    norm_total: f64,
    bf_rounds: usize,
}

impl SolverMirror {
    pub fn new(n: usize, anchor: VertexId, config: SolverConfig) -> Result<Self, SolverError> {
        if anchor >= n {
            return Err(SolverError::Vertex(anchor));
        }
        Ok(Self {
            n,
            anchor,
            config,
            edges: Vec::new(),
            weights: Vec::new(),
            gradients: Vec::new(),
            flow: Vec::new(),
            reported: Vec::new(),
            eligible: Vec::new(),
            eligible_list: Vec::new(),
            demand: vec![0.0; n],
            potentials: vec![0.0; n],
            calls: 0,
            returned_total: 0,
            norm_total: 0.0,
            bf_rounds: 0,
        })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn gradients(&self) -> &[f64] {
        &self.gradients
    }

    /// Borrowing form of `ReturnFlow`.
    pub fn flow(&self) -> &[f64] {
        &self.flow
    }

    /// `ReturnFlow`.
    pub fn return_flow(&self) -> Vec<f64> {
        self.flow.clone()
    }

    /// `ReturnCost`: exact `l^T f`.
    pub fn return_cost(&self) -> f64 {
        self.edges
            .iter()
            .zip(&self.flow)
            .map(|(e, f)| e.length * f)
            .sum()
    }

    /// Demand routed by the maintained flow, fixed when edges are loaded.
    pub fn demand(&self) -> &[f64] {
        &self.demand
    }

    pub fn calls(&self) -> usize {
        self.calls
    }

    pub fn returned_total(&self) -> usize {
        self.returned_total
    }

    /// Sum of `||W~ delta||_1` over applied steps.
    pub fn norm_total(&self) -> f64 {
        self.norm_total
    }

    pub fn bellman_ford_rounds(&self) -> usize {
        self.bf_rounds
    }

    /// The `E'` budget: `(sum of step norms) / (eps_acc q)`, which equals
    /// `t Gamma / (eps_acc q)` when every step has norm `Gamma`.
    pub fn return_budget(&self) -> f64 {
        self.norm_total / (self.config.accuracy * self.config.quality)
    }

    pub fn divergence(&self) -> Vec<f64> {
        let mut div = vec![0.0; self.n];
        for (e, &f) in self.edges.iter().zip(&self.flow) {
            div[e.tail] += f;
            div[e.head] -= f;
        }
        div
    }

    fn check_values(e: EdgeId, weight: f64, gradient: f64) -> Result<(), SolverError> {
        if !weight.is_finite() || !gradient.is_finite() {
            return Err(SolverError::Overflow(e));
        }
        if !(weight > 0.0) {
            return Err(SolverError::NonPositiveWeight(e));
        }
        Ok(())
    }

    fn push_edge(
        &mut self,
        e: EdgeId,
        tail: VertexId,
        head: VertexId,
        weight: f64,
        gradient: f64,
        length: f64,
        flow: f64,
    ) -> Result<(), SolverError> {
        if e != self.edges.len() {
            return Err(SolverError::DuplicateEdge {
                expected: self.edges.len(),
                got: e,
            });
        }
        for v in [tail, head] {
            if v >= self.n {
                return Err(SolverError::Vertex(v));
            }
        }
        Self::check_values(e, weight, gradient)?;
        self.edges.push(MirrorEdge { tail, head, length });
        self.weights.push(weight);
        self.gradients.push(gradient);
        self.flow.push(flow);
        self.reported.push(flow);
        self.eligible.push(true);
        self.eligible_list.push(e);
        self.demand[tail] += flow;
        self.demand[head] -= flow;
        Ok(())
    }

    /// Initial load of an edge carrying flow `flow`; only valid before the
    /// first `apply_cycle`, since it changes the routed demand.
    #[allow(clippy::too_many_arguments)]
    pub fn load_edge(
        &mut self,
        e: EdgeId,
        tail: VertexId,
        head: VertexId,
        weight: f64,
        gradient: f64,
        length: f64,
        flow: f64,
    ) -> Result<(), SolverError> {
        debug_assert_eq!(self.calls, 0, "load_edge after ApplyCycle");
        self.push_edge(e, tail, head, weight, gradient, length, flow)
    }

    /// `InsertEdge`: the new edge starts with zero flow.
    pub fn insert_edge(
        &mut self,
        e: EdgeId,
        tail: VertexId,
        head: VertexId,
        weight: f64,
        gradient: f64,
        length: f64,
    ) -> Result<(), SolverError> {
        self.push_edge(e, tail, head, weight, gradient, length, 0.0)
    }

    /// `UpdateEdge`: only edges from the last `E'` (or inserted since) qualify.
    pub fn update_edge(
        &mut self,
        e: EdgeId,
        weight: f64,
        gradient: f64,
    ) -> Result<(), SolverError> {
        if !self.eligible.get(e).copied().unwrap_or(false) {
            return Err(SolverError::NotEligible(e));
        }
        Self::check_values(e, weight, gradient)?;
        self.weights[e] = weight;
        self.gradients[e] = gradient;
        self.reported[e] = self.flow[e];
        Ok(())
    }

    /// Replace every gradient at once, as after a change of the global length
    /// coefficient `10 m / r`.
    pub fn reload_gradients(&mut self, gradients: &[f64]) -> Result<(), SolverError> {
        if gradients.len() != self.edges.len() {
            return Err(SolverError::SizeMismatch {
                expected: self.edges.len(),
                got: gradients.len(),
            });
        }
        for (e, &g) in gradients.iter().enumerate() {
            if !g.is_finite() {
                return Err(SolverError::Overflow(e));
            }
        }
        self.gradients.copy_from_slice(gradients);
        Ok(())
    }

    /// Edges currently allowed in `update_edge`.
    pub fn eligible_edges(&self) -> &[EdgeId] {
        &self.eligible_list
    }

    /// `ApplyCycle` with the theoretical step `||W~ delta||_1 = Gamma`.
    pub fn apply_cycle(&mut self) -> Result<StepResult, SolverError> {
        self.apply_cycle_scaled(|_, _, _| 1.0)
    }

    /// `ApplyCycle` where `scale(cycle, unit, flow)` may enlarge the step to
    /// `scale * Gamma`. `unit` is the per-arc magnitude of the theoretical step.
    /// Values below 1 are raised to 1.
    pub fn apply_cycle_scaled<F>(&mut self, scale: F) -> Result<StepResult, SolverError>
    where
        F: FnOnce(&FoundCycle, f64, &[f64]) -> f64,
    {
        self.calls += 1;
        for &e in &self.eligible_list {
            self.eligible[e] = false;
        }
        self.eligible_list.clear();

        match self.search()? {
            Search::Cycle(cycle) => {
                let unit = cycle.unit_scale(self.config.step);
                let factor = scale(&cycle, unit, &self.flow);
                let factor = if factor.is_finite() {
                    factor.max(1.0)
                } else {
                    1.0
                };
                let eta = unit * factor;
                let mut delta = Vec::with_capacity(cycle.arcs.len());
                let mut norm = 0.0;
                for arc in &cycle.arcs {
                    let change = arc.sign * eta;
                    self.flow[arc.edge] += change;
                    norm += self.weights[arc.edge] * change.abs();
                    delta.push((arc.edge, change));
                }
                self.norm_total += norm;
                let limit = 0.5 * self.config.accuracy;
                let mut returned = Vec::new();
                for arc in &cycle.arcs {
                    let e = arc.edge;
                    if self.eligible[e] {
                        continue;
                    }
                    let drift = self.weights[e] * (self.flow[e] - self.reported[e]).abs();
                    if drift > limit {
                        self.reported[e] = self.flow[e];
                        self.eligible[e] = true;
                        self.eligible_list.push(e);
                        returned.push((e, self.flow[e]));
                    }
                }
                self.returned_total += returned.len();
                Ok(StepResult::Applied {
                    cycle,
                    delta,
                    norm,
                    returned,
                })
            }
            Search::Feasible => {
                let shift = self.potentials[self.anchor];
                let potentials: Vec<f64> = self.potentials.iter().map(|p| p - shift).collect();
                let residual = self.residual(&potentials);
                Ok(StepResult::Certified {
                    lambda: -residual,
                    dual: DualCertificate {
                        potentials,
                        residual,
                    },
                })
            }
        }
    }

    /// `max_e |g~_e + phi(u) - phi(v)| / w~_e`.
    pub fn residual(&self, potentials: &[f64]) -> f64 {
        self.edges
            .iter()
            .enumerate()
            .map(|(e, edge)| {
                (self.gradients[e] + potentials[edge.tail] - potentials[edge.head]).abs()
                    / self.weights[e]
            })
            .fold(0.0, f64::max)
    }

    /// Exact ratio of a unit cycle under the mirror values.
    pub fn cycle_ratio(&self, arcs: &[CycleArc]) -> (f64, f64) {
        let num: f64 = arcs.iter().map(|a| a.sign * self.gradients[a.edge]).sum();
        let den: f64 = arcs.iter().map(|a| self.weights[a.edge]).sum();
        (num / den, den)
    }

    /// Bellman-Ford from a virtual source, warm-started at the last potentials.
    /// Arcs are scanned in edge-id order, forward before backward, and only
    /// strict improvements relax, which fixes the tie-break.
    fn search(&mut self) -> Result<Search, SolverError> {
        let n = self.n;
        let q = self.config.quality;
        let mut dist = if self.potentials.iter().all(|d| d.is_finite()) {
            self.potentials.clone()
        } else {
            vec![0.0; n]
        };
        let mut pred: Vec<Option<(EdgeId, bool)>> = vec![None; n];
        let costs: Vec<(f64, f64)> = (0..self.edges.len())
            .map(|e| {
                let g = self.gradients[e];
                let w = self.weights[e];
                (g + q * w, -g + q * w)
            })
            .collect();
        for (e, &(fwd, bwd)) in costs.iter().enumerate() {
            if !fwd.is_finite() || !bwd.is_finite() {
                return Err(SolverError::Overflow(e));
            }
        }
        for round in 0..=n {
            self.bf_rounds += 1;
            let mut changed = false;
            for (e, edge) in self.edges.iter().enumerate() {
                let (fwd, bwd) = costs[e];
                let cand = dist[edge.tail] + fwd;
                if cand < dist[edge.head] {
                    dist[edge.head] = cand;
                    pred[edge.head] = Some((e, true));
                    changed = true;
                }
                let cand = dist[edge.head] + bwd;
                if cand < dist[edge.tail] {
                    dist[edge.tail] = cand;
                    pred[edge.tail] = Some((e, false));
                    changed = true;
                }
            }
            if !changed {
                self.potentials = dist;
                return Ok(Search::Feasible);
            }
            if let Some(cycle) = self.predecessor_cycle(&pred) {
                let (ratio, weight) = self.cycle_ratio(&cycle);
                if ratio <= -q * (1.0 - RATIO_SLACK) {
                    return Ok(Search::Cycle(FoundCycle {
                        arcs: cycle,
                        ratio,
                        weight,
                    }));
                }
            }
            if round == n {
                break;
            }
        }
        // Still relaxing after n rounds but no cycle of ratio <= -q: only
        // rounding noise remains. Accept the current labels.
        self.potentials = dist;
        Ok(Search::Feasible)
    }

    fn predecessor_cycle(&self, pred: &[Option<(EdgeId, bool)>]) -> Option<Vec<CycleArc>> {
        let prev = |v: VertexId| -> Option<VertexId> {
            pred[v].map(|(e, forward)| {
                if forward {
                    self.edges[e].tail
                } else {
                    self.edges[e].head
                }
            })
        };
        let mut marks = vec![0usize; self.n];
        for start in 0..self.n {
            if marks[start] != 0 {
                continue;
            }
            let id = start + 1;
            let mut v = start;
            loop {
                if marks[v] == id {
                    // v lies on a cycle of the predecessor graph.
                    let mut arcs = Vec::new();
                    let mut x = v;
                    loop {
                        let (e, forward) = pred[x].expect("cycle vertex has a predecessor");
                        arcs.push(CycleArc {
                            edge: e,
                            sign: if forward { 1.0 } else { -1.0 },
                        });
                        x = prev(x).unwrap();
                        if x == v {
                            break;
                        }
                    }
                    arcs.reverse();
                    return Some(arcs);
                }
                if marks[v] != 0 {
                    break;
                }
                marks[v] = id;
                match prev(v) {
                    Some(u) => v = u,
                    None => break,
                }
            }
        }
        None
    }
}

enum Search {
    Cycle(FoundCycle),
    Feasible,
}
