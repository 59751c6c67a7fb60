//! Dangerous-vertex detection on a graph whose distances from the source all
//! lie in `[L, 2L]`.
//!
//! The detector adds a source edge `(s, v)` of length `d_v = d(s, v)` for
//! every vertex, routes one unit of flow on each, and keeps running the
//! interior point method after every insertion until the solver certifies
//! that no cycle of ratio `<= -q` is left. At a certified point the weight of
//! the source edge of `v` upper-bounds how far `d(s, v)` may have dropped, so
//! every source edge whose weight reaches `epsilon / (10 alpha)` reports its
//! head vertex (once per detector lifetime).
//!
//! Lengths are divided by `L` internally. The stopping rule for the total
//! distance is evaluated exactly with Dijkstra after every insertion.

use thiserror::Error;

use crate::barrier::{
    edge_barrier, edge_weight, length_coefficient, potential, BarrierError, FlowView, IpmParams,
    PotentialContext,
};
use crate::graph::{DynamicGraph, EdgeId, EdgeKind, GraphError, VertexId};
use crate::oracle::{dijkstra, ShortestPathTree};
use crate::solver::{
    DualCertificate, FoundCycle, SolverConfig, SolverError, SolverMirror, StepResult,
};

/// Weight levels whose first crossings are counted for every source edge.
pub const CROSSING_LEVELS: [f64; 3] = [8.0, 32.0, 128.0];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DetectorError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Barrier(#[from] BarrierError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("vertex {vertex} is unreachable from the source")]
    Disconnected { vertex: VertexId },
    #[error("distance {distance} of vertex {vertex} is outside [{scale}, {}]", 2 * scale)]
    DistanceOutOfRange {
        vertex: VertexId,
        distance: u64,
        scale: u64,
    },
    #[error("applied-step budget exhausted after {steps} steps")]
    BudgetExhausted { steps: usize },
    #[error("potential did not decrease: {before} -> {after}")]
    PotentialIncreased { before: f64, after: f64 },
    #[error("stale flow estimate on edge {edge}: w |f~ - f| = {drift}")]
    StaleEstimate { edge: EdgeId, drift: f64 },
    #[error("cost gap {0} is not positive while the detector is running")]
    CostGap(f64),
    #[error("detector already terminated")]
    Terminated,
    #[error("no certificate from the last solver call")]
    NoCertificate,
}

/// Per-edge state next to the flow kept inside the solver.
#[derive(Debug, Clone)]
pub struct FlowState {
    /// `delta_e`; zero on source edges.
    pub slack: Vec<f64>,
    /// `f~`, the flow the solver's weights and gradients were computed from.
    pub approx: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Metrics {
    /// Applied solver steps.
    pub ipm_iterations: usize,
    pub solver_calls: usize,
    /// Sum of `|S^(t)|`.
    pub recourse: usize,
    /// `update_edge` calls.
    pub gradient_updates: usize,
    /// Full gradient reloads after the cost gap or the edge count changed.
    pub gradient_reloads: usize,
    pub slack_bumps: usize,
    /// Source edges whose weight has ever reached each of [`CROSSING_LEVELS`].
    pub crossings: [usize; 3],
    /// Steps measured in units of `W`-length `1/(100 p)` (at least one per step).
    pub step_equivalents: usize,
    pub min_decrease: f64,
    /// Per-step potential decreases, in order.
    pub decreases: Vec<f64>,
    pub insertions: usize,
}

impl Metrics {
    pub fn median_decrease(&self) -> Option<f64> {
        if self.decreases.is_empty() {
            return None;
        }
        let mut sorted = self.decreases.clone();
        sorted.sort_by(|a, b| a.total_cmp(b));
        Some(sorted[sorted.len() / 2])
    }

    /// Flat key-value view for CSV and log output.
    pub fn record(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("ipm_iterations", self.ipm_iterations as f64),
            ("solver_calls", self.solver_calls as f64),
            ("recourse", self.recourse as f64),
            ("gradient_updates", self.gradient_updates as f64),
            ("gradient_reloads", self.gradient_reloads as f64),
            ("slack_bumps", self.slack_bumps as f64),
            ("crossings_8", self.crossings[0] as f64),
            ("crossings_32", self.crossings[1] as f64),
            ("crossings_128", self.crossings[2] as f64),
            ("step_equivalents", self.step_equivalents as f64),
            (
                "min_decrease",
                if self.decreases.is_empty() {
                    0.0
                } else {
                    self.min_decrease
                },
            ),
            ("median_decrease", self.median_decrease().unwrap_or(0.0)),
            ("insertions", self.insertions as f64),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InsertionReport {
    /// `S^(t)`: newly reported vertices, ascending.
    pub set: Vec<VertexId>,
    pub terminated: bool,
}

/// Result of checking a certified dual against the oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct DualReport {
    /// `c = (l^T f - F*) / (10 m)` in units of `L`.
    pub scale: f64,
    /// Whether `(1 - alpha/2) F <= l^T f <= (1 + 5 alpha) F`.
    pub in_regime: bool,
    /// Edges violating `c w_e / 2 <= l_e - (phi(v) - phi(u)) <= 2 c w_e`.
    pub sandwich_violations: Vec<EdgeId>,
    /// Vertices with `phi(v) > d(s, v) + 1e-9 L`.
    pub bound_violations: Vec<VertexId>,
    /// `sum_v phi(v) / F`.
    pub sum_ratio: f64,
}

#[derive(Debug, Clone)]
struct Certificate {
    dual: DualCertificate,
    gap: f64,
    m: usize,
}

#[derive(Debug, Clone)]
pub struct DetectorState {
    graph: DynamicGraph,
    kinds: Vec<EdgeKind>,
    lengths: Vec<f64>,
    scale: u64,
    params: IpmParams,
    ctx: PotentialContext,
    mirror: SolverMirror,
    flow_state: FlowState,
    source_edge: Vec<Option<EdgeId>>,
    initial_distance: Vec<u64>,
    initial_total: u64,
    emitted: Vec<bool>,
    initial_set: Vec<VertexId>,
    terminated: bool,
    step: usize,
    potential: f64,
    max_weight: Vec<f64>,
    /// Room left for `sum_E delta_e (l_e + 2)`, which bounds how far
    /// backward capacity can pull the cost below the true total distance.
    slack_reserve: f64,
    oracle: ShortestPathTree,
    certificate: Option<Certificate>,
    metrics: Metrics,
}

/// Builds the detector on `graph` (every vertex at distance in `[L, 2L]`
/// from `graph.source()`) and runs the interior point method to its first
/// certified point. `S^(0)` is available from [`DetectorState::initial_set`].
pub fn detector_init(
    graph: &DynamicGraph,
    scale: u64,
    params: IpmParams,
) -> Result<DetectorState, DetectorError> {
    params.validate()?;
    let source = graph.source();
    let tree = dijkstra(graph);
    let n = graph.vertex_count();
    let mut initial_distance = vec![0u64; n];
    for v in 0..n {
        if v == source {
            continue;
        }
        let d = tree.dist[v].ok_or(DetectorError::Disconnected { vertex: v })?;
        if d < scale || d > 2 * scale {
            return Err(DetectorError::DistanceOutOfRange {
                vertex: v,
                distance: d,
                scale,
            });
        }
        initial_distance[v] = d;
    }

    let mut internal = graph.clone();
    let mut source_edge = vec![None; n];
    for v in 0..n {
        if v != source {
            let e = internal.insert_edge(source, v, initial_distance[v], EdgeKind::Augmented)?;
            source_edge[v] = Some(e);
        }
    }
    let l = scale as f64;
    let kinds: Vec<EdgeKind> = internal.edges().iter().map(|e| e.kind).collect();
    let lengths: Vec<f64> = internal
        .edges()
        .iter()
        .map(|e| e.length as f64 / l)
        .collect();
    let m = internal.edge_count();
    let initial_total: u64 = initial_distance.iter().sum();
    let ctx = PotentialContext::new(initial_total as f64 / l, params.alpha);
    // Backward capacity must not let the cost undercut F*.
    let mut params = params;
    let longest = lengths.iter().fold(0.0f64, |a, &b| a.max(b));
    params.slack = params
        .slack
        .min(params.alpha * ctx.total / (100.0 * m as f64 * (longest + 2.0)));
    let mut slack_reserve = params.alpha * ctx.total / 10.0;

    let mut flow = Vec::with_capacity(m);
    let mut slack = Vec::with_capacity(m);
    for &kind in &kinds {
        if kind == EdgeKind::Augmented {
            flow.push(1.0);
            slack.push(0.0);
        } else {
            flow.push(0.0);
            slack.push(params.slack);
            slack_reserve -= params.slack * (lengths[slack.len() - 1] + 2.0);
        }
    }
    let config = SolverConfig {
        quality: params.quality,
        step: params.step,
        accuracy: params.stale_tol,
    };
    let mut mirror = SolverMirror::new(n, source, config)?;
    let coef = length_coefficient(ctx.gap, m)?;
    for (e, edge) in internal.edges().iter().enumerate() {
        let w = edge_weight(kinds[e], flow[e], slack[e], params.power)?;
        mirror.load_edge(
            e,
            edge.tail,
            edge.head,
            w,
            coef * lengths[e] - w,
            lengths[e],
            flow[e],
        )?;
    }
    let potential = potential(
        &FlowView {
            kinds: &kinds,
            lengths: &lengths,
            flow: &flow,
            slack: &slack,
        },
        ctx.target,
        m,
        params.power,
    )?;
    let mut state = DetectorState {
        graph: internal,
        kinds,
        lengths,
        scale,
        params,
        ctx,
        mirror,
        flow_state: FlowState {
            slack,
            approx: flow,
        },
        source_edge,
        initial_distance,
        initial_total,
        emitted: vec![false; n],
        initial_set: Vec::new(),
        terminated: false,
        step: 0,
        potential,
        max_weight: vec![1.0; m],
        slack_reserve,
        oracle: tree,
        certificate: None,
        metrics: Metrics {
            min_decrease: f64::INFINITY,
            ..Metrics::default()
        },
    };
    state.run_until_certified()?;
    state.initial_set = state.emit();
    Ok(state)
}

impl DetectorState {
    pub fn params(&self) -> &IpmParams {
        &self.params
    }

    pub fn scale(&self) -> u64 {
        self.scale
    }

    /// Internal graph, source edges included.
    pub fn graph(&self) -> &DynamicGraph {
        &self.graph
    }

    pub fn source(&self) -> VertexId {
        self.graph.source()
    }

    pub fn context(&self) -> &PotentialContext {
        &self.ctx
    }

    pub fn metrics(&self) -> &Metrics {
        &self.metrics
    }

    pub fn flow(&self) -> &[f64] {
        self.mirror.flow()
    }

    pub fn flow_state(&self) -> &FlowState {
        &self.flow_state
    }

    pub fn mirror(&self) -> &SolverMirror {
        &self.mirror
    }

    pub fn is_terminated(&self) -> bool {
        self.terminated
    }

    /// Number of insertions processed.
    pub fn step(&self) -> usize {
        self.step
    }

    pub fn initial_set(&self) -> &[VertexId] {
        &self.initial_set
    }

    pub fn initial_distance(&self, v: VertexId) -> u64 {
        self.initial_distance[v]
    }

    /// `F`, in unscaled length units.
    pub fn initial_total(&self) -> u64 {
        self.initial_total
    }

    pub fn is_emitted(&self, v: VertexId) -> bool {
        self.emitted[v]
    }

    /// Exact distances after the last insertion.
    pub fn oracle(&self) -> &ShortestPathTree {
        &self.oracle
    }

    /// Current value of the potential.
    pub fn potential(&self) -> f64 {
        self.potential
    }

    /// Source edge of `v`, if `v` is not the source.
    pub fn source_edge(&self, v: VertexId) -> Option<EdgeId> {
        self.source_edge[v]
    }

    pub fn cost(&self) -> f64 {
        self.mirror.return_cost()
    }

    fn view(&self) -> FlowView<'_> {
        FlowView {
            kinds: &self.kinds,
            lengths: &self.lengths,
            flow: self.mirror.flow(),
            slack: &self.flow_state.slack,
        }
    }

    /// Recomputes the potential from scratch.
    pub fn exact_potential(&self) -> Result<f64, DetectorError> {
        Ok(potential(
            &self.view(),
            self.ctx.target,
            self.graph.edge_count(),
            self.params.power,
        )?)
    }

    /// Adds edge `(u, v)` of length `length` and restores a certified point.
    pub fn process_insertion(
        &mut self,
        u: VertexId,
        v: VertexId,
        length: u64,
    ) -> Result<InsertionReport, DetectorError> {
        if self.terminated {
            return Err(DetectorError::Terminated);
        }
        let e = self.graph.insert_edge(u, v, length, EdgeKind::Original)?;
        self.step += 1;
        self.metrics.insertions += 1;
        let scaled = length as f64 / self.scale as f64;
        let delta = self
            .params
            .slack
            .min(self.slack_reserve / (2.0 * (scaled + 2.0)));
        self.slack_reserve -= delta * (scaled + 2.0);
        self.kinds.push(EdgeKind::Original);
        self.lengths.push(scaled);
        self.flow_state.slack.push(delta);
        self.flow_state.approx.push(0.0);
        self.max_weight.push(0.0);
        let w = edge_weight(EdgeKind::Original, 0.0, delta, self.params.power)?;
        let m = self.graph.edge_count();
        let coef = length_coefficient(self.ctx.gap, m)?;
        self.mirror
            .insert_edge(e, u, v, w, coef * scaled - w, scaled)?;
        self.certificate = None;

        self.oracle = dijkstra(&self.graph);
        let total = self
            .oracle
            .total()
            .map_err(|_| DetectorError::Disconnected { vertex: u })?;
        // total < (1 - alpha/2) F
        if (total as f64) < (1.0 - self.params.alpha / 2.0) * self.initial_total as f64 {
            self.terminated = true;
            return Ok(InsertionReport {
                set: Vec::new(),
                terminated: true,
            });
        }

        // The edge count entered the length coefficient.
        self.reload_gradients()?;
        self.potential = self.exact_potential()?;
        self.run_until_certified()?;
        Ok(InsertionReport {
            set: self.emit(),
            terminated: false,
        })
    }

    fn reload_gradients(&mut self) -> Result<(), DetectorError> {
        let coef = length_coefficient(self.ctx.gap, self.graph.edge_count())?;
        let gradients: Vec<f64> = self
            .lengths
            .iter()
            .zip(self.mirror.weights())
            .map(|(l, w)| coef * l - w)
            .collect();
        self.mirror.reload_gradients(&gradients)?;
        self.metrics.gradient_reloads += 1;
        Ok(())
    }

    fn step_limit(&self) -> usize {
        self.params.iteration_budget.unwrap_or_else(|| {
            self.params
                .step_bound(self.graph.edge_count())
                .min(usize::MAX as f64) as usize
        })
    }

    fn run_until_certified(&mut self) -> Result<(), DetectorError> {
        loop {
            let exact_gap = self.mirror.return_cost() - self.ctx.target;
            if !(exact_gap > 0.0) {
                return Err(DetectorError::CostGap(exact_gap));
            }
            if !self.ctx.gap_is_fresh(exact_gap, self.params.r_drift) {
                self.ctx.gap = exact_gap;
                self.reload_gradients()?;
            }
            self.check_staleness()?;

            self.metrics.solver_calls += 1;
            let result = if self.params.accelerate {
                let search = LineSearch {
                    kinds: &self.kinds,
                    lengths: &self.lengths,
                    slack: &self.flow_state.slack,
                    gap: exact_gap,
                    m: self.graph.edge_count(),
                    power: self.params.power,
                };
                self.mirror.apply_cycle_scaled(|cycle, unit, flow| {
                    search.best_multiplier(cycle, unit, flow)
                })?
            } else {
                self.mirror.apply_cycle()?
            };
            match result {
                StepResult::Applied {
                    delta, returned, ..
                } => {
                    self.after_step(exact_gap, &delta, &returned)?;
                }
                StepResult::Certified { dual, .. } => {
                    if self.ctx.gap != exact_gap {
                        // Certify against the exact gap.
                        self.ctx.gap = exact_gap;
                        self.reload_gradients()?;
                        continue;
                    }
                    self.certificate = Some(Certificate {
                        dual,
                        gap: exact_gap,
                        m: self.graph.edge_count(),
                    });
                    return Ok(());
                }
            }
        }
    }

    fn after_step(
        &mut self,
        gap_before: f64,
        delta: &[(EdgeId, f64)],
        returned: &[(EdgeId, f64)],
    ) -> Result<(), DetectorError> {
        let p = self.params.power;
        let m = self.graph.edge_count();
        self.metrics.ipm_iterations += 1;
        let limit = self.step_limit();
        if self.metrics.ipm_iterations > limit {
            return Err(DetectorError::BudgetExhausted {
                steps: self.metrics.ipm_iterations,
            });
        }

        // Exact change of the potential along the cycle.
        let flow = self.mirror.flow();
        let mut cost_change = 0.0;
        let mut barrier_change = 0.0;
        let mut w_length = 0.0;
        for &(e, d) in delta {
            let after = flow[e];
            let before = after - d;
            cost_change += self.lengths[e] * d;
            let b_old = edge_barrier(self.kinds[e], before, self.flow_state.slack[e], p)?;
            let b_new = edge_barrier(self.kinds[e], after, self.flow_state.slack[e], p)?;
            barrier_change += b_new - b_old;
            w_length += (b_new - b_old).abs();
        }
        let ratio = cost_change / gap_before;
        if !(ratio > -1.0) {
            return Err(DetectorError::CostGap(gap_before + cost_change));
        }
        let change = 10.0 * m as f64 * ratio.ln_1p() + barrier_change;
        if !(change < 0.0) {
            return Err(DetectorError::PotentialIncreased {
                before: self.potential,
                after: self.potential + change,
            });
        }
        self.potential += change;
        let decrease = -change;
        self.metrics.min_decrease = self.metrics.min_decrease.min(decrease);
        self.metrics.decreases.push(decrease);
        let unit = 1.0 / (100.0 * p as f64);
        self.metrics.step_equivalents += ((w_length / unit).ceil() as usize).max(1);

        for &(e, _) in delta {
            if self.kinds[e] == EdgeKind::Augmented {
                let w = edge_weight(EdgeKind::Augmented, flow[e], 0.0, p)?;
                let before = self.max_weight[e];
                if w > before {
                    for (i, &level) in CROSSING_LEVELS.iter().enumerate() {
                        if before < level && w >= level {
                            self.metrics.crossings[i] += 1;
                        }
                    }
                    self.max_weight[e] = w;
                }
            }
        }

        let coef = length_coefficient(self.ctx.gap, m)?;
        let delta_unit = self.params.slack;
        for &(e, f) in returned {
            let charge = delta_unit * (self.lengths[e] + 2.0);
            if self.kinds[e] != EdgeKind::Augmented
                && f + self.flow_state.slack[e] <= delta_unit
                && charge <= self.slack_reserve / 2.0
            {
                self.slack_reserve -= charge;
                let old = edge_barrier(self.kinds[e], f, self.flow_state.slack[e], p)?;
                self.flow_state.slack[e] += delta_unit;
                let new = edge_barrier(self.kinds[e], f, self.flow_state.slack[e], p)?;
                self.potential += new - old;
                self.metrics.slack_bumps += 1;
            }
            self.flow_state.approx[e] = f;
            let w = edge_weight(self.kinds[e], f, self.flow_state.slack[e], p)?;
            self.mirror.update_edge(e, w, coef * self.lengths[e] - w)?;
            self.metrics.gradient_updates += 1;
        }
        Ok(())
    }

    /// `w_e(f) |f~_e - f_e| <= stale_tol` on every edge.
    fn check_staleness(&self) -> Result<(), DetectorError> {
        let flow = self.mirror.flow();
        for e in 0..flow.len() {
            let approx = self.flow_state.approx[e];
            if approx == flow[e] {
                continue;
            }
            let w = edge_weight(
                self.kinds[e],
                flow[e],
                self.flow_state.slack[e],
                self.params.power,
            )?;
            let drift = w * (approx - flow[e]).abs();
            if drift > self.params.stale_tol {
                return Err(DetectorError::StaleEstimate { edge: e, drift });
            }
        }
        Ok(())
    }

    fn emit(&mut self) -> Vec<VertexId> {
        let threshold = self.params.danger_threshold();
        let weights = self.mirror.weights();
        let mut set = Vec::new();
        for v in 0..self.source_edge.len() {
            if let Some(e) = self.source_edge[v] {
                if !self.emitted[v] && weights[e] >= threshold {
                    self.emitted[v] = true;
                    set.push(v);
                }
            }
        }
        self.metrics.recourse += set.len();
        set
    }

    /// Scaled dual potentials `phi^ = (l^T f - F*)/(10 m) * phi` from the last
    /// certificate, in unscaled length units, checked against the oracle.
    pub fn dual_snapshot(&self) -> Result<(Vec<f64>, DualReport), DetectorError> {
        let cert = self
            .certificate
            .as_ref()
            .ok_or(DetectorError::NoCertificate)?;
        let l = self.scale as f64;
        let c = cert.gap / (10.0 * cert.m as f64);
        let phi_hat: Vec<f64> = cert.dual.potentials.iter().map(|x| c * x).collect();
        let flow = self.mirror.flow();
        let p = self.params.power;
        let mut sandwich_violations = Vec::new();
        for (e, edge) in self.graph.edges().iter().enumerate() {
            let w = edge_weight(self.kinds[e], flow[e], self.flow_state.slack[e], p)?;
            let reduced = self.lengths[e] - (phi_hat[edge.head] - phi_hat[edge.tail]);
            if !(reduced >= 0.5 * c * w && reduced <= 2.0 * c * w) {
                sandwich_violations.push(e);
            }
        }
        let mut bound_violations = Vec::new();
        for (v, d) in self.oracle.dist.iter().enumerate() {
            if let Some(d) = d {
                if phi_hat[v] * l > *d as f64 + 1e-9 * l {
                    bound_violations.push(v);
                }
            }
        }
        let total = self.ctx.total;
        let cost = self.mirror.return_cost();
        let alpha = self.params.alpha;
        let in_regime = cost >= (1.0 - alpha / 2.0) * total && cost <= (1.0 + 5.0 * alpha) * total;
        let sum_ratio = phi_hat.iter().sum::<f64>() / total;
        let unscaled: Vec<f64> = phi_hat.iter().map(|x| x * l).collect();
        Ok((
            unscaled,
            DualReport {
                scale: c,
                in_regime,
                sandwich_violations,
                bound_violations,
                sum_ratio,
            },
        ))
    }

    /// Vertices whose current distance is below `(1 - epsilon) d_v` and that
    /// were never reported. Empty at every point before termination.
    pub fn missed_vertices(&self) -> Vec<VertexId> {
        let eps = self.params.epsilon;
        (0..self.source_edge.len())
            .filter(|&v| self.source_edge[v].is_some() && !self.emitted[v])
            .filter(|&v| {
                self.oracle.dist[v]
                    .is_some_and(|d| (d as f64) < (1.0 - eps) * self.initial_distance[v] as f64)
            })
            .collect()
    }
}

/// Golden-section enlargement of a cycle step, minimizing the potential along
/// the cycle. Never returns less than the theoretical step.
struct LineSearch<'a> {
    kinds: &'a [EdgeKind],
    lengths: &'a [f64],
    slack: &'a [f64],
    gap: f64,
    m: usize,
    power: u32,
}

impl LineSearch<'_> {
    /// Potential change for `t` theoretical steps, `None` outside the domain.
    fn change(&self, cycle: &FoundCycle, unit: f64, flow: &[f64], t: f64) -> Option<f64> {
        let mut cost = 0.0;
        let mut barrier = 0.0;
        for arc in &cycle.arcs {
            let e = arc.edge;
            let d = arc.sign * unit * t;
            cost += self.lengths[e] * d;
            let old = edge_barrier(self.kinds[e], flow[e], self.slack[e], self.power).ok()?;
            let new = edge_barrier(self.kinds[e], flow[e] + d, self.slack[e], self.power).ok()?;
            barrier += new - old;
        }
        let ratio = cost / self.gap;
        if !(ratio > -1.0) {
            return None;
        }
        let value = 10.0 * self.m as f64 * ratio.ln_1p() + barrier;
        value.is_finite().then_some(value)
    }

    fn best_multiplier(&self, cycle: &FoundCycle, unit: f64, flow: &[f64]) -> f64 {
        let eval = |t: f64| self.change(cycle, unit, flow, t).unwrap_or(f64::INFINITY);
        let mut best_t = 1.0;
        let mut best = eval(1.0);
        if !best.is_finite() {
            return 1.0;
        }
        let mut t = 1.0;
        let mut upper = None;
        while t < 1e15 {
            let next = t * 2.0;
            let value = eval(next);
            if value < best {
                best = value;
                best_t = next;
                t = next;
            } else {
                upper = Some(next);
                break;
            }
        }
        let Some(hi) = upper else {
            return best_t;
        };
        let mut a = (best_t / 2.0).max(1.0);
        let mut b = hi;
        let ratio = 0.5 * (5f64.sqrt() - 1.0);
        let mut x1 = b - ratio * (b - a);
        let mut x2 = a + ratio * (b - a);
        let mut f1 = eval(x1);
        let mut f2 = eval(x2);
        for _ in 0..40 {
            if f1 < f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - ratio * (b - a);
                f1 = eval(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + ratio * (b - a);
                f2 = eval(x2);
            }
            if (b - a) <= 1e-6 * b {
                break;
            }
        }
        for (x, fx) in [(x1, f1), (x2, f2)] {
            if fx < best {
                best = fx;
                best_t = x;
            }
        }
        best_t
    }
}
