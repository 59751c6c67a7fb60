//! The high-power barrier, the interior point potential and the induced
//! edge weights and gradients.
//!
//! Source edges use `V(x) = x^{-p}/p` on `(0, 1]`, continued by `1/p - ln x`
//! on `[1, inf)`; every other edge uses `-ln(f + slack)`.

use thiserror::Error;

use crate::graph::EdgeKind;

/// Exponent above which a source-edge weight would leave the `f64` range.
const MAX_LOG_WEIGHT: f64 = 700.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BarrierError {
    #[error("barrier argument {0} is not positive")]
    Domain(f64),
    #[error("cost gap {0} is not positive")]
    CostGap(f64),
    #[error("source-edge weight overflows at flow {0}")]
    WeightOverflow(f64),
    #[error("invalid parameter: {0}")]
    Param(String),
}

/// Interior point parameters for one detector.
#[derive(Debug, Clone, PartialEq)]
pub struct IpmParams {
    /// Barrier power `p`.
    pub power: u32,
    /// Total-distance slack `alpha`; the detector may stop once the total drops below `(1 - alpha/2) F`.
    pub alpha: f64,
    /// Per-vertex detection slack.
    pub epsilon: f64,
    /// Solver quality threshold `q`: cycles with ratio `<= -q` are pushed.
    pub quality: f64,
    /// Step scale `Gamma`, the `W`-norm of every theoretical step.
    pub step: f64,
    /// Largest allowed `w_e |f~_e - f_e|` when the solver is invoked.
    pub stale_tol: f64,
    /// Multiplicative drift tolerated on the cost-gap estimate `r`.
    pub r_drift: f64,
    /// Slack increment `delta` for non-source edges.
    pub slack: f64,
    /// Hard cap on applied steps; `None` uses [`IpmParams::step_bound`].
    pub iteration_budget: Option<usize>,
    /// Enlarge each step by a line search on the potential.
    pub accelerate: bool,
}

/// Solver approximation target `gamma`; `q = gamma / 10`.
pub const DEFAULT_GAMMA: f64 = 0.5;
pub const MAX_POWER: u32 = 32;

impl IpmParams {
    /// Defaults for a graph with `m` edges (source edges included).
    pub fn new(alpha: f64, epsilon: f64, m: usize) -> Result<Self, BarrierError> {
        let gamma = DEFAULT_GAMMA;
        let power = default_power(alpha);
        let m = m.max(2) as f64;
        let params = Self {
            power,
            alpha,
            epsilon,
            quality: gamma / 10.0,
            step: gamma / (100.0 * power as f64),
            stale_tol: gamma / (1000.0 * power as f64),
            r_drift: gamma / 1000.0,
            slack: m.powi(-4),
            iteration_budget: None,
            accelerate: false,
        };
        params.validate()?;
        Ok(params)
    }

    /// Replace `p` and every parameter derived from it.
    pub fn with_power(mut self, power: u32) -> Result<Self, BarrierError> {
        let gamma = self.quality * 10.0;
        self.power = power;
        self.step = gamma / (100.0 * power as f64);
        self.stale_tol = gamma / (1000.0 * power as f64);
        self.validate()?;
        Ok(self)
    }

    pub fn accelerated(mut self, on: bool) -> Self {
        self.accelerate = on;
        self
    }

    pub fn validate(&self) -> Result<(), BarrierError> {
        let bad = |msg: &str| Err(BarrierError::Param(msg.to_string()));
        if !(self.alpha > 0.0 && self.alpha <= self.epsilon && self.epsilon < 1.0) {
            return bad("need 0 < alpha <= epsilon < 1");
        }
        if self.power < 2 {
            return bad("barrier power must be at least 2");
        }
        if !(self.quality > 0.0 && self.quality < 1.0) {
            return bad("quality must lie in (0, 1)");
        }
        if !(self.step > 0.0 && self.stale_tol > 0.0 && self.r_drift > 0.0) {
            return bad("step, stale tolerance and drift must be positive");
        }
        if !(self.slack > 0.0) {
            return bad("slack must be positive");
        }
        Ok(())
    }

    /// Upper bound on applied steps: `100 m p ln(m + 2) / q^2`.
    pub fn step_bound(&self, m: usize) -> f64 {
        100.0 * m as f64 * self.power as f64 * ((m + 2) as f64).ln() / (self.quality * self.quality)
    }

    /// Source-edge weight at which the head vertex is reported.
    pub fn danger_threshold(&self) -> f64 {
        self.epsilon / (10.0 * self.alpha)
    }
}

/// `max(4, ceil(log2(1/alpha)))`, capped at [`MAX_POWER`].
pub fn default_power(alpha: f64) -> u32 {
    let p = (1.0 / alpha).log2().ceil();
    if p.is_finite() {
        (p as i64).clamp(4, MAX_POWER as i64) as u32
    } else {
        MAX_POWER
    }
}

/// Constants of the potential for one detector lifetime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialContext {
    /// Initial total distance `F`.
    pub total: f64,
    /// Target `F* = (1 - alpha) F`.
    pub target: f64,
    /// Maintained approximation of `l^T f - F*`.
    pub gap: f64,
}

impl PotentialContext {
    pub fn new(total: f64, alpha: f64) -> Self {
        let target = (1.0 - alpha) * total;
        Self {
            total,
            target,
            gap: total - target,
        }
    }

    /// Whether `gap` is within the allowed multiplicative drift of `exact_gap`.
    pub fn gap_is_fresh(&self, exact_gap: f64, drift: f64) -> bool {
        exact_gap > 0.0
            && self.gap <= exact_gap * (1.0 + drift)
            && self.gap * (1.0 + drift) >= exact_gap
    }
}

/// `V(x)`.
pub fn barrier_value(x: f64, p: u32) -> Result<f64, BarrierError> {
    if !(x > 0.0) {
        return Err(BarrierError::Domain(x));
    }
    let p_f = p as f64;
    Ok(if x <= 1.0 {
        (-p_f * x.ln()).exp() / p_f
    } else {
        1.0 / p_f - x.ln()
    })
}

/// `V'(x)`.
pub fn barrier_derivative(x: f64, p: u32) -> Result<f64, BarrierError> {
    if !(x > 0.0) {
        return Err(BarrierError::Domain(x));
    }
    Ok(if x <= 1.0 {
        -(-(p as f64 + 1.0) * x.ln()).exp()
    } else {
        -1.0 / x
    })
}

/// `V''(x)`.
pub fn barrier_second_derivative(x: f64, p: u32) -> Result<f64, BarrierError> {
    if !(x > 0.0) {
        return Err(BarrierError::Domain(x));
    }
    let p_f = p as f64;
    Ok(if x <= 1.0 {
        (p_f + 1.0) * (-(p_f + 2.0) * x.ln()).exp()
    } else {
        1.0 / (x * x)
    })
}

/// Natural log of the edge weight.
pub fn log_edge_weight(kind: EdgeKind, flow: f64, slack: f64, p: u32) -> Result<f64, BarrierError> {
    match kind {
        EdgeKind::Augmented => {
            if !(flow > 0.0) {
                return Err(BarrierError::Domain(flow));
            }
            Ok(if flow <= 1.0 {
                -(p as f64 + 1.0) * flow.ln()
            } else {
                -flow.ln()
            })
        }
        EdgeKind::Original | EdgeKind::Shortcut => {
            let x = flow + slack;
            if !(x > 0.0) {
                return Err(BarrierError::Domain(x));
            }
            Ok(-x.ln())
        }
    }
}

/// `1/(f + slack)` for ordinary edges, `-V'(f)` for source edges.
pub fn edge_weight(kind: EdgeKind, flow: f64, slack: f64, p: u32) -> Result<f64, BarrierError> {
    match kind {
        EdgeKind::Augmented => {
            let log_w = log_edge_weight(kind, flow, slack, p)?;
            if log_w > MAX_LOG_WEIGHT {
                return Err(BarrierError::WeightOverflow(flow));
            }
            Ok(log_w.exp())
        }
        EdgeKind::Original | EdgeKind::Shortcut => {
            let x = flow + slack;
            if !(x > 0.0) {
                return Err(BarrierError::Domain(x));
            }
            Ok(1.0 / x)
        }
    }
}

/// Barrier term of one edge inside the potential.
pub fn edge_barrier(kind: EdgeKind, flow: f64, slack: f64, p: u32) -> Result<f64, BarrierError> {
    match kind {
        EdgeKind::Augmented => barrier_value(flow, p),
        EdgeKind::Original | EdgeKind::Shortcut => {
            let x = flow + slack;
            if !(x > 0.0) {
                return Err(BarrierError::Domain(x));
            }
            Ok(-x.ln())
        }
    }
}

/// Coefficient `10 m / r` multiplying lengths in the gradient.
pub fn length_coefficient(gap: f64, m: usize) -> Result<f64, BarrierError> {
    if !(gap > 0.0) {
        return Err(BarrierError::CostGap(gap));
    }
    Ok(10.0 * m as f64 / gap)
}

/// `g = (10 m / r) l - w`.
pub fn gradient(
    lengths: &[f64],
    weights: &[f64],
    gap: f64,
    m: usize,
) -> Result<Vec<f64>, BarrierError> {
    let coef = length_coefficient(gap, m)?;
    Ok(lengths
        .iter()
        .zip(weights)
        .map(|(&l, &w)| coef * l - w)
        .collect())
}

/// Borrowed view of a flow over `E` plus the source edges.
#[derive(Debug, Clone, Copy)]
pub struct FlowView<'a> {
    pub kinds: &'a [EdgeKind],
    pub lengths: &'a [f64],
    pub flow: &'a [f64],
    pub slack: &'a [f64],
}

impl FlowView<'_> {
    pub fn cost(&self) -> f64 {
        self.lengths.iter().zip(self.flow).map(|(l, f)| l * f).sum()
    }
}

/// `Phi(f) = 10 m ln(l^T f - F*) - sum_E ln(f_e + slack_e) + sum_source V(f_e)`.
///
/// Uses the exact cost, never the maintained gap.
pub fn potential(view: &FlowView<'_>, target: f64, m: usize, p: u32) -> Result<f64, BarrierError> {
    let gap = view.cost() - target;
    if !(gap > 0.0) {
        return Err(BarrierError::CostGap(gap));
    }
    let mut phi = 10.0 * m as f64 * gap.ln();
    for e in 0..view.flow.len() {
        phi += edge_barrier(view.kinds[e], view.flow[e], view.slack[e], p)?;
    }
    Ok(phi)
}
