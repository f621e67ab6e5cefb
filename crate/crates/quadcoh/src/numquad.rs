//! Adaptive Gauss-Legendre quadrature over finite boxes.
//!
//! Integrands here are smooth apart from isolated kinks (absolute values of
//! oscillating wave functions), and they concentrate on a scale the caller
//! knows in advance. The strategy is therefore panel-based: split the box
//! into equal panels, apply a fixed-order Gauss-Legendre rule to each, and
//! bisect any panel whose parent-versus-children discrepancy exceeds its
//! share of the tolerance budget. Error budgets are divided proportionally
//! to panel measure, so the reported `error_estimate` bounds the whole-box
//! defect whenever refinement terminates before the depth cap.

use std::f64::consts::PI;

use thiserror::Error;

/// Number of equal panels the 1D interval is first split into.
const INITIAL_PANELS_1D: usize = 8;
/// Initial 2D split is INITIAL_CELLS_PER_AXIS x INITIAL_CELLS_PER_AXIS.
const INITIAL_CELLS_PER_AXIS: usize = 4;
/// Recursion depth below which 2D quadrant refinement runs on rayon::join.
const PARALLEL_DEPTH_2D: u32 = 2;

#[derive(Debug, Error)]
pub enum QuadError {
    #[error("invalid integration config: {reason}")]
    InvalidConfig { reason: String },
    #[error("integrand returned a non-finite value near x = {x}")]
    NonFiniteSample1D { x: f64 },
    #[error("integrand returned a non-finite value near (x, x') = ({x}, {y})")]
    NonFiniteSample2D { x: f64, y: f64 },
}

/// Tolerances and domain for [`integrate_1d`] and [`integrate_2d`].
///
/// `half_width` is the half-side L of the integration box [-L, L] (or
/// [-L, L]^2). Callers that know their integrand's concentration scale
/// should derive the config with [`IntegrationConfig::covering`] so the box
/// always contains the support.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationConfig {
    pub half_width: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: u32,
    pub base_order: usize,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        Self {
            half_width: 8.0,
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            max_depth: 14,
            base_order: 16,
        }
    }
}

impl IntegrationConfig {
    /// Default config whose box covers an integrand concentrated on
    /// `scale_hint` units: half_width = max(8, 8 * scale_hint). Eight scale
    /// units leave a Gaussian tail mass below 1e-8 of the total.
    pub fn for_scale(scale_hint: f64) -> Self {
        Self::default().covering(scale_hint)
    }

    /// This config with the box widened (never shrunk) to cover an
    /// integrand concentrated on `scale_hint` units.
    pub fn covering(&self, scale_hint: f64) -> Self {
        let mut out = self.clone();
        out.half_width = self.half_width.max(8.0 * scale_hint);
        out
    }

    pub fn with_half_width(mut self, half_width: f64) -> Self {
        self.half_width = half_width;
        self
    }

    pub fn with_tolerances(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }

    fn validate(&self) -> Result<(), QuadError> {
        let fail = |reason: String| Err(QuadError::InvalidConfig { reason });
        if !(self.half_width.is_finite() && self.half_width > 0.0) {
            return fail(format!(
                "half_width must be finite and positive, got {}",
                self.half_width
            ));
        }
        if !(self.rel_tol.is_finite() && self.rel_tol > 0.0) {
            return fail(format!(
                "rel_tol must be finite and positive, got {}",
                self.rel_tol
            ));
        }
        if !(self.abs_tol.is_finite() && self.abs_tol > 0.0) {
            return fail(format!(
                "abs_tol must be finite and positive, got {}",
                self.abs_tol
            ));
        }
        if self.max_depth == 0 || self.max_depth > 40 {
            return fail(format!(
                "max_depth must be in 1..=40, got {}",
                self.max_depth
            ));
        }
        if self.base_order < 2 || self.base_order > 64 {
            return fail(format!(
                "base_order must be in 2..=64, got {}",
                self.base_order
            ));
        }
        Ok(())
    }
}

/// Value of an integral together with the accumulated panel error estimate
/// and the number of accepted leaf panels.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub panels_used: usize,
}

/// Gauss-Legendre nodes and weights on [-1, 1].
///
/// Nodes are the roots of the Legendre polynomial P_n, found by Newton
/// iteration from the Chebyshev-type initial guess; weights follow from the
/// derivative at each root. The rule is exact for polynomials of degree
/// 2n - 1.
#[derive(Debug, Clone)]
struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    fn new(order: usize) -> Self {
        assert!(order >= 2, "rule order below 2");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let step = p / d;
                x -= step;
                if step.abs() <= 1e-15 * x.abs().max(1.0) {
                    let (_, d2) = legendre_with_derivative(n, x);
                    dp = d2;
                    break;
                }
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        Self { nodes, weights }
    }

    /// Rule applied to f on [a, b].
    fn sum_1d<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: &F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }

    /// Tensor-product rule applied to f on [ax, bx] x [ay, by].
    fn sum_2d<F: Fn(f64, f64) -> f64>(&self, ax: f64, bx: f64, ay: f64, by: f64, f: &F) -> f64 {
        let hx = 0.5 * (bx - ax);
        let mx = 0.5 * (ax + bx);
        let hy = 0.5 * (by - ay);
        let my = 0.5 * (ay + by);
        let mut acc = 0.0;
        for (x, wx) in self.nodes.iter().zip(&self.weights) {
            let px = mx + hx * x;
            let mut row = 0.0;
            for (y, wy) in self.nodes.iter().zip(&self.weights) {
                row += wy * f(px, my + hy * y);
            }
            acc += wx * row;
        }
        acc * hx * hy
    }

    /// First node of the rule on [a, b] where f is non-finite, if any.
    fn find_bad_1d<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: &F) -> Option<f64> {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .map(|x| mid + half * x)
            .find(|&p| !f(p).is_finite())
    }

    fn find_bad_2d<F: Fn(f64, f64) -> f64>(
        &self,
        ax: f64,
        bx: f64,
        ay: f64,
        by: f64,
        f: &F,
    ) -> Option<(f64, f64)> {
        let hx = 0.5 * (bx - ax);
        let mx = 0.5 * (ax + bx);
        let hy = 0.5 * (by - ay);
        let my = 0.5 * (ay + by);
        for x in &self.nodes {
            let px = mx + hx * x;
            for y in &self.nodes {
                let py = my + hy * y;
                if !f(px, py).is_finite() {
                    return Some((px, py));
                }
            }
        }
        None
    }
}

/// Gauss-Legendre nodes and weights of the given order on [-1, 1], nodes
/// ascending. Shared with sweep grids, which use orders far above the
/// per-panel cap.
pub fn legendre_rule(order: usize) -> (Vec<f64>, Vec<f64>) {
    let rule = GaussLegendre::new(order);
    let mut nodes = rule.nodes;
    let mut weights = rule.weights;
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}

/// (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 2..=n {
        let kf = k as f64;
        let p_next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * p_prev) / kf;
        p_prev = p;
        p = p_next;
    }
    let d = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, d)
}

struct Accum {
    value: f64,
    error: f64,
    panels: usize,
}

/// Integral of f over [-L, L] with L = `config.half_width`.
///
/// The interval is split into equal panels, each refined by bisection until
/// the parent-versus-children discrepancy fits its share of
/// max(abs_tol, rel_tol * |integral|); the budget share halves with the
/// panel. Refinement stops at `max_depth`, in which case the residual
/// discrepancy is still reported through `error_estimate`.
pub fn integrate_1d<F>(f: F, config: &IntegrationConfig) -> Result<QuadResult, QuadError>
where
    F: Fn(f64) -> f64,
{
    config.validate()?;
    let rule = GaussLegendre::new(config.base_order);
    let l = config.half_width;
    let step = 2.0 * l / INITIAL_PANELS_1D as f64;

    let mut coarse = Vec::with_capacity(INITIAL_PANELS_1D);
    let mut rough = 0.0;
    for i in 0..INITIAL_PANELS_1D {
        let a = -l + i as f64 * step;
        let b = a + step;
        let v = rule.sum_1d(a, b, &f);
        if !v.is_finite() {
            let x = rule.find_bad_1d(a, b, &f).unwrap_or(0.5 * (a + b));
            return Err(QuadError::NonFiniteSample1D { x });
        }
        coarse.push((a, b, v));
        rough += v;
    }

    let budget = config.abs_tol.max(config.rel_tol * rough.abs()) / INITIAL_PANELS_1D as f64;
    let mut acc = Accum {
        value: 0.0,
        error: 0.0,
        panels: 0,
    };
    for (a, b, v) in coarse {
        refine_1d(&rule, &f, a, b, v, budget, 0, config.max_depth, &mut acc)?;
    }
    Ok(QuadResult {
        value: acc.value,
        error_estimate: acc.error,
        panels_used: acc.panels,
    })
}

#[allow(clippy::too_many_arguments)]
fn refine_1d<F>(
    rule: &GaussLegendre,
    f: &F,
    a: f64,
    b: f64,
    whole: f64,
    budget: f64,
    depth: u32,
    max_depth: u32,
    acc: &mut Accum,
) -> Result<(), QuadError>
where
    F: Fn(f64) -> f64,
{
    let m = 0.5 * (a + b);
    let left = rule.sum_1d(a, m, f);
    let right = rule.sum_1d(m, b, f);
    let refined = left + right;
    if !refined.is_finite() {
        let x = rule.find_bad_1d(a, b, f).unwrap_or(m);
        return Err(QuadError::NonFiniteSample1D { x });
    }
    let disc = (refined - whole).abs();
    if disc <= budget || depth >= max_depth {
        acc.value += refined;
        acc.error += disc;
        acc.panels += 2;
        return Ok(());
    }
    refine_1d(rule, f, a, m, left, 0.5 * budget, depth + 1, max_depth, acc)?;
    refine_1d(
        rule,
        f,
        m,
        b,
        right,
        0.5 * budget,
        depth + 1,
        max_depth,
        acc,
    )
}

/// Integral of f over the square [-L, L]^2 with L = `config.half_width`.
///
/// Same scheme as [`integrate_1d`] with quadrisection, except that a
/// child's budget share halves rather than quarters. Kink sets of the l1
/// integrands are curves, and their straddling-cell count grows like 1/h,
/// so a length-proportional (not area-proportional) budget keeps the total
/// over kink cells bounded by a small multiple of the tolerance while
/// stopping their refinement at h ~ sqrt(tolerance) instead of h ~
/// tolerance. The first [`PARALLEL_DEPTH_2D`] levels of refinement fan out
/// on rayon; children are combined in a fixed order so results stay
/// bitwise deterministic.
pub fn integrate_2d<F>(f: F, config: &IntegrationConfig) -> Result<QuadResult, QuadError>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    config.validate()?;
    let rule = GaussLegendre::new(config.base_order);
    let l = config.half_width;
    let n = INITIAL_CELLS_PER_AXIS;
    let step = 2.0 * l / n as f64;

    let mut coarse = Vec::with_capacity(n * n);
    let mut rough = 0.0;
    for i in 0..n {
        for j in 0..n {
            let ax = -l + i as f64 * step;
            let ay = -l + j as f64 * step;
            let v = rule.sum_2d(ax, ax + step, ay, ay + step, &f);
            if !v.is_finite() {
                let (x, y) = rule
                    .find_bad_2d(ax, ax + step, ay, ay + step, &f)
                    .unwrap_or((ax + 0.5 * step, ay + 0.5 * step));
                return Err(QuadError::NonFiniteSample2D { x, y });
            }
            coarse.push((ax, ay, v));
            rough += v;
        }
    }

    let budget = config.abs_tol.max(config.rel_tol * rough.abs()) / (n * n) as f64;
    let results: Vec<Result<Accum, QuadError>> = {
        use rayon::prelude::*;
        coarse
            .par_iter()
            .map(|&(ax, ay, v)| {
                refine_2d(
                    &rule,
                    &f,
                    ax,
                    ax + step,
                    ay,
                    ay + step,
                    v,
                    budget,
                    0,
                    config.max_depth,
                )
            })
            .collect()
    };
    let mut acc = Accum {
        value: 0.0,
        error: 0.0,
        panels: 0,
    };
    for r in results {
        let part = r?;
        acc.value += part.value;
        acc.error += part.error;
        acc.panels += part.panels;
    }
    Ok(QuadResult {
        value: acc.value,
        error_estimate: acc.error,
        panels_used: acc.panels,
    })
}

#[allow(clippy::too_many_arguments)]
fn refine_2d<F>(
    rule: &GaussLegendre,
    f: &F,
    ax: f64,
    bx: f64,
    ay: f64,
    by: f64,
    whole: f64,
    budget: f64,
    depth: u32,
    max_depth: u32,
) -> Result<Accum, QuadError>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    let mx = 0.5 * (ax + bx);
    let my = 0.5 * (ay + by);
    let q = [
        (ax, mx, ay, my),
        (mx, bx, ay, my),
        (ax, mx, my, by),
        (mx, bx, my, by),
    ];
    let vals = [
        rule.sum_2d(q[0].0, q[0].1, q[0].2, q[0].3, f),
        rule.sum_2d(q[1].0, q[1].1, q[1].2, q[1].3, f),
        rule.sum_2d(q[2].0, q[2].1, q[2].2, q[2].3, f),
        rule.sum_2d(q[3].0, q[3].1, q[3].2, q[3].3, f),
    ];
    let refined: f64 = vals.iter().sum();
    if !refined.is_finite() {
        let (x, y) = rule.find_bad_2d(ax, bx, ay, by, f).unwrap_or((mx, my));
        return Err(QuadError::NonFiniteSample2D { x, y });
    }
    let disc = (refined - whole).abs();
    if disc <= budget || depth >= max_depth {
        return Ok(Accum {
            value: refined,
            error: disc,
            panels: 4,
        });
    }

    let child_budget = 0.5 * budget;
    let run = |k: usize| {
        refine_2d(
            rule,
            f,
            q[k].0,
            q[k].1,
            q[k].2,
            q[k].3,
            vals[k],
            child_budget,
            depth + 1,
            max_depth,
        )
    };
    let parts: [Result<Accum, QuadError>; 4] = if depth < PARALLEL_DEPTH_2D {
        let ((r0, r1), (r2, r3)) = rayon::join(
            || rayon::join(|| run(0), || run(1)),
            || rayon::join(|| run(2), || run(3)),
        );
        [r0, r1, r2, r3]
    } else {
        [run(0), run(1), run(2), run(3)]
    };
    let mut acc = Accum {
        value: 0.0,
        error: 0.0,
        panels: 0,
    };
    for part in parts {
        let part = part?;
        acc.value += part.value;
        acc.error += part.error;
        acc.panels += part.panels;
    }
    Ok(acc)
}
