//! Beam-splitter conditioning: mix the system with an ancilla on a (t, r)
//! beam splitter, measure position sharply on the reflected port, keep the
//! transmitted mode.
//!
//! For outcome x0' the surviving mode's unnormalized kernel is
//!
//! ```text
//! rho_u'(x, x') = rho(t x + r x0', t x' + r x0')
//!                 * rho0(t x0' - r x, t x0' - r x')
//! ```
//!
//! whose diagonal integrates to the outcome density p(x0'); dividing by it
//! gives the conditional state. Outcome averages (referring observer) sum
//! the coherence of the unnormalized kernels over a quadrature grid in
//! x0', and the reduced state (nonreferring observer) sums the kernels
//! themselves.

use rayon::prelude::*;
use thiserror::Error;

use crate::coherence::{
    self, rel_entropy_coherence_fock_mixture, rel_entropy_coherence_pure, CoherenceValue,
    FockMixture,
};
use crate::numquad::{self, IntegrationConfig, QuadError};
use crate::states::{fock_wavefunction, DensityKernel, WaveFunction};

/// Outcomes with density below this floor have no observable conditional
/// state; operations refuse to normalize by them.
pub const DENSITY_FLOOR: f64 = 1e-10;

/// Captured probability mass must match 1 within this much for grid-based
/// averages. The default grid keeps the true mass outside the grid below
/// 1e-6, so a larger shortfall signals truncation or an underresolved grid.
const COVERAGE_TOL: f64 = 1e-4;

const DEFAULT_SWEEP_NODES: usize = 129;

#[derive(Debug, Error)]
pub enum ConditionError {
    #[error("transmission must be a real number in [0, 1], got {t}")]
    InvalidTransmission { t: f64 },
    #[error(
        "outcome x0' = {x0_prime} has negligible density {density:.3e} (floor {DENSITY_FLOOR:.0e})"
    )]
    NegligibleOutcome { x0_prime: f64, density: f64 },
    #[error(
        "sweep grid captured probability mass {captured} (must match 1 within {COVERAGE_TOL:.0e})"
    )]
    InsufficientCoverage { captured: f64 },
    #[error("invalid sweep grid: {reason}")]
    InvalidGrid { reason: String },
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// Lossless beam splitter with real transmission t and reflection
/// r = +sqrt(1 - t^2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSplitter {
    t: f64,
    r: f64,
}

impl BeamSplitter {
    pub fn from_transmission(t: f64) -> Result<Self, ConditionError> {
        if !(t.is_finite() && (0.0..=1.0).contains(&t)) {
            return Err(ConditionError::InvalidTransmission { t });
        }
        Ok(Self {
            t,
            r: (1.0 - t * t).max(0.0).sqrt(),
        })
    }

    /// Test hook that skips the t^2 + r^2 = 1 constraint; negative-control
    /// verification feeds deliberately inconsistent coefficients through
    /// it. Not for regular use.
    pub fn from_parts_unchecked(t: f64, r: f64) -> Self {
        Self { t, r }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn r(&self) -> f64 {
        self.r
    }
}

/// One conditioning outcome: the measured value, its density, and the
/// conditioned kernel in normalized and unnormalized form.
#[derive(Debug, Clone)]
pub struct ConditionalResult {
    pub x0_prime: f64,
    pub density: f64,
    pub kernel: DensityKernel,
    pub unnormalized: DensityKernel,
}

/// Quadrature grid over measurement outcomes x0', used for averages and
/// the reduced state.
#[derive(Debug, Clone)]
pub struct SweepGrid {
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl SweepGrid {
    /// Points must be strictly increasing and weights positive.
    pub fn new(points: Vec<f64>, weights: Vec<f64>) -> Result<Self, ConditionError> {
        let fail = |reason: String| Err(ConditionError::InvalidGrid { reason });
        if points.is_empty() {
            return fail("grid is empty".into());
        }
        if points.len() != weights.len() {
            return fail(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            ));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return fail("non-finite grid point".into());
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return fail("points must be strictly increasing".into());
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return fail("weights must be positive".into());
        }
        Ok(Self { points, weights })
    }

    /// Gauss-Legendre grid of `nodes` points on [-half_width, half_width].
    pub fn gauss_legendre(half_width: f64, nodes: usize) -> Result<Self, ConditionError> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(ConditionError::InvalidGrid {
                reason: format!("half_width must be finite and positive, got {half_width}"),
            });
        }
        if nodes < 2 {
            return Err(ConditionError::InvalidGrid {
                reason: format!("need at least 2 nodes, got {nodes}"),
            });
        }
        let (raw_nodes, raw_weights) = numquad::legendre_rule(nodes);
        let points = raw_nodes.iter().map(|x| x * half_width).collect();
        let weights = raw_weights.iter().map(|w| w * half_width).collect();
        Self::new(points, weights)
    }

    /// Default grid for a system/ancilla pair: 129 Gauss-Legendre nodes on
    /// [-L0, L0] with L0 = 6 * max(scale hints). The outcome density
    /// inherits Gaussian tails, so six scale units keep the missed mass
    /// below 1e-6.
    pub fn default_for(rho: &DensityKernel, rho0: &DensityKernel) -> Self {
        let l0 = 6.0 * rho.scale_hint().max(rho0.scale_hint()).max(0.5);
        Self::gauss_legendre(l0, DEFAULT_SWEEP_NODES)
            .expect("default grid parameters are always valid")
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Largest |x0'| on the grid.
    fn max_abs_point(&self) -> f64 {
        self.points
            .first()
            .unwrap_or(&0.0)
            .abs()
            .max(self.points.last().unwrap_or(&0.0).abs())
    }
}

/// Compensated (Kahan) sum; grid averages use it so parallel computation
/// followed by in-order accumulation stays deterministic and accurate.
fn kahan_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut carry = 0.0;
    for v in values {
        let y = v - carry;
        let t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Support scale of the conditioned kernel. The first factor of rho_u' is
/// negligible once |t x + r x0'| exceeds 8 * scale(rho), the second once
/// |t x0' - r x| exceeds 8 * scale(rho0); the product dies at the tighter
/// of the two bounds on |x|.
fn conditioned_scale(
    rho: &DensityKernel,
    rho0: &DensityKernel,
    bs: &BeamSplitter,
    x0p: f64,
) -> f64 {
    let t = bs.t.abs();
    let r = bs.r.abs();
    let from_system = if t > 0.0 {
        (8.0 * rho.scale_hint() + r * x0p.abs()) / t
    } else {
        f64::INFINITY
    };
    let from_ancilla = if r > 0.0 {
        (8.0 * rho0.scale_hint() + t * x0p.abs()) / r
    } else {
        f64::INFINITY
    };
    let bound = from_system.min(from_ancilla);
    if bound.is_finite() {
        (bound / 8.0).max(0.25)
    } else {
        rho.scale_hint().max(rho0.scale_hint())
    }
}

/// Unnormalized conditioned kernel rho_u' for outcome `x0p`. Pure system
/// and ancilla give a rank-one (pure) result.
pub fn conditional_unnormalized(
    rho: &DensityKernel,
    rho0: &DensityKernel,
    bs: &BeamSplitter,
    x0p: f64,
) -> DensityKernel {
    let scale = conditioned_scale(rho, rho0, bs, x0p);
    let is_pure = rho.is_pure() && rho0.is_pure();
    let (t, r) = (bs.t, bs.r);
    let rho = rho.clone();
    let rho0 = rho0.clone();
    DensityKernel::from_fn(
        move |x, xp| {
            rho.eval(t * x + r * x0p, t * xp + r * x0p)
                * rho0.eval(t * x0p - r * x, t * x0p - r * xp)
        },
        scale,
        is_pure,
    )
}

/// Outcome density p(x0'), the diagonal integral of the unnormalized
/// conditioned kernel.
pub fn outcome_density(
    rho: &DensityKernel,
    rho0: &DensityKernel,
    bs: &BeamSplitter,
    x0p: f64,
    config: &IntegrationConfig,
) -> Result<f64, ConditionError> {
    let un = conditional_unnormalized(rho, rho0, bs, x0p);
    let cfg = config.covering(un.scale_hint());
    let r = numquad::integrate_1d(|x| un.eval(x, x), &cfg)?;
    Ok(r.value)
}

/// Normalized conditional state for outcome `x0p`, together with its
/// density and the unnormalized kernel it came from.
pub fn conditional_state(
    rho: &DensityKernel,
    rho0: &DensityKernel,
    bs: &BeamSplitter,
    x0p: f64,
    config: &IntegrationConfig,
) -> Result<ConditionalResult, ConditionError> {
    let unnormalized = conditional_unnormalized(rho, rho0, bs, x0p);
    let cfg = config.covering(unnormalized.scale_hint());
    let density = numquad::integrate_1d(|x| unnormalized.eval(x, x), &cfg)?.value;
    if density < DENSITY_FLOOR {
        return Err(ConditionError::NegligibleOutcome {
            x0_prime: x0p,
            density,
        });
    }
    let inv = 1.0 / density;
    let un = unnormalized.clone();
    let kernel = DensityKernel::from_fn(
        move |x, xp| inv * un.eval(x, xp),
        unnormalized.scale_hint(),
        unnormalized.is_pure(),
    );
    Ok(ConditionalResult {
        x0_prime: x0p,
        density,
        kernel,
        unnormalized,
    })
}

/// l1 coherence of the unnormalized kernel: the full 2D absolute integral,
/// or (integral of sqrt of diagonal)^2 when the kernel is rank-one, since
/// |g(x) g(x')| integrates to (integral |g|)^2 and |g| = sqrt of the
/// diagonal.
fn unnormalized_l1(
    un: &DensityKernel,
    config: &IntegrationConfig,
) -> Result<CoherenceValue, QuadError> {
    let cfg = config.covering(un.scale_hint());
    if un.is_pure() {
        let r = numquad::integrate_1d(|x| un.eval(x, x).max(0.0).sqrt(), &cfg)?;
        Ok(CoherenceValue {
            value: r.value * r.value,
            error_estimate: 2.0 * r.value.abs() * r.error_estimate
                + r.error_estimate * r.error_estimate,
        })
    } else {
        let r = numquad::integrate_2d(|x, xp| un.eval(x, xp).abs(), &cfg)?;
        Ok(CoherenceValue {
            value: r.value,
            error_estimate: r.error_estimate,
        })
    }
}

/// l1 coherence of the normalized conditional state at outcome `x0p`.
pub fn conditional_coherence(
    rho: &DensityKernel,
    rho0: &DensityKernel,
    bs: &BeamSplitter,
    x0p: f64,
    config: &IntegrationConfig,
) -> Result<CoherenceValue, ConditionError> {
    let density = outcome_density(rho, rho0, bs, x0p, config)?;
    if density < DENSITY_FLOOR {
        return Err(ConditionError::NegligibleOutcome {
            x0_prime: x0p,
            density,
        });
    }
    if bs.r == 0.0 {
        // Transparent beam splitter: the ancilla factor is the constant
        // rho0(x0', x0'), which normalization cancels exactly.
        return Ok(coherence::l1_coherence(rho, config)?);
    }
    let un = conditional_unnormalized(rho, rho0, bs, x0p);
    let raw = unnormalized_l1(&un, config)?;
    let inv = 1.0 / density;
    Ok(CoherenceValue {
        value: raw.value * inv,
        // First-order propagation through the division; the density's own
        // quadrature error is folded in via the ratio's sensitivity.
        error_estimate: raw.error_estimate * inv
            + raw.value * inv * inv * (config.rel_tol * density).max(config.abs_tol),
    })
}

/// Outcome-averaged conditional coherence over the grid: the integral over
/// x0' of the unnormalized-kernel coherence, which equals the
/// density-weighted average of normalized coherences without ever dividing
/// by small densities.
pub fn average_coherence(
    rho: &DensityKernel,
    rho0: &DensityKernel,
    bs: &BeamSplitter,
    grid: &SweepGrid,
    config: &IntegrationConfig,
) -> Result<CoherenceValue, ConditionError> {
    if bs.r == 0.0 {
        // Unmixed limit: the unnormalized coherence at x0' is the input
        // coherence scaled by the ancilla density, so the grid average is
        // the input coherence times the captured mass.
        let mass = captured_mass(rho, rho0, bs, grid, config)?;
        let base = coherence::l1_coherence(rho, config)?;
        return Ok(CoherenceValue {
            value: base.value * mass,
            error_estimate: base.error_estimate,
        });
    }
    let per_node: Vec<Result<(f64, CoherenceValue), ConditionError>> = grid
        .points
        .par_iter()
        .map(|&x0p| {
            let un = conditional_unnormalized(rho, rho0, bs, x0p);
            let cfg = config.covering(un.scale_hint());
            let p = numquad::integrate_1d(|x| un.eval(x, x), &cfg)?.value;
            let cu = unnormalized_l1(&un, config)?;
            Ok((p, cu))
        })
        .collect();
    let mut densities = Vec::with_capacity(grid.len());
    let mut coherences = Vec::with_capacity(grid.len());
    for r in per_node {
        let (p, cu) = r?;
        densities.push(p);
        coherences.push(cu);
    }
    let mass = kahan_sum(grid.weights.iter().zip(&densities).map(|(w, p)| w * p));
    if (mass - 1.0).abs() > COVERAGE_TOL {
        return Err(ConditionError::InsufficientCoverage { captured: mass });
    }
    let value = kahan_sum(
        grid.weights
            .iter()
            .zip(&coherences)
            .map(|(w, c)| w * c.value),
    );
    let error = kahan_sum(
        grid.weights
            .iter()
            .zip(&coherences)
            .map(|(w, c)| w * c.error_estimate),
    );
    Ok(CoherenceValue {
        value,
        error_estimate: error,
    })
}

fn captured_mass(
    rho: &DensityKernel,
    rho0: &DensityKernel,
    bs: &BeamSplitter,
    grid: &SweepGrid,
    config: &IntegrationConfig,
) -> Result<f64, ConditionError> {
    let densities: Vec<Result<f64, ConditionError>> = grid
        .points
        .par_iter()
        .map(|&x0p| outcome_density(rho, rho0, bs, x0p, config))
        .collect();
    let mut ps = Vec::with_capacity(grid.len());
    for p in densities {
        ps.push(p?);
    }
    let mass = kahan_sum(grid.weights.iter().zip(&ps).map(|(w, p)| w * p));
    if (mass - 1.0).abs() > COVERAGE_TOL {
        return Err(ConditionError::InsufficientCoverage { captured: mass });
    }
    Ok(mass)
}

/// Reduced output state of the nonreferring observer: the grid integral of
/// the unnormalized conditioned kernels, normalized by the captured mass.
/// The per-node shift parameters are cached at construction so each kernel
/// evaluation is a single pass over the grid.
pub fn reduced_state(
    rho: &DensityKernel,
    rho0: &DensityKernel,
    bs: &BeamSplitter,
    grid: &SweepGrid,
    config: &IntegrationConfig,
) -> Result<DensityKernel, ConditionError> {
    let mass = captured_mass(rho, rho0, bs, grid, config)?;
    let (t, r) = (bs.t, bs.r);
    // Per-node caches: weight / mass, r x0', t x0'.
    let terms: Vec<(f64, f64, f64)> = grid
        .points
        .iter()
        .zip(&grid.weights)
        .map(|(&x0, &w)| (w / mass, r * x0, t * x0))
        .collect();
    let scale = conditioned_scale(rho, rho0, bs, grid.max_abs_point());
    let is_pure = if bs.r == 0.0 {
        rho.is_pure()
    } else if bs.t == 0.0 {
        rho0.is_pure()
    } else {
        false
    };
    let rho = rho.clone();
    let rho0 = rho0.clone();
    Ok(DensityKernel::from_fn(
        move |x, xp| {
            let mut acc = 0.0;
            for &(w, rx0, tx0) in &terms {
                acc +=
                    w * rho.eval(t * x + rx0, t * xp + rx0) * rho0.eval(tx0 - r * x, tx0 - r * xp);
            }
            acc
        },
        scale,
        is_pure,
    ))
}

/// Referring and nonreferring relative-entropy coherence for the
/// single-excitation system mixed with a vacuum ancilla.
#[derive(Debug, Clone, Copy)]
pub struct EntropyScan {
    pub average: f64,
    pub reduced: f64,
}

/// Relative-entropy coherence scan at transmission `t` for the
/// single-excitation system and vacuum ancilla.
///
/// The conditional state at outcome x0' is the pure superposition
/// phi(x) proportional to t psi1(x) psi0(x0') + r psi0(x) psi1(x0') with
/// outcome density p(x0') = t^2 psi0(x0')^2 + r^2 psi1(x0')^2; `average`
/// integrates p * S(phi) over the grid. `reduced` is the coherence of the
/// number-diagonal mixture r^2 |0><0| + t^2 |1><1| the nonreferring
/// observer holds.
pub fn single_photon_entropy_scan(
    t: f64,
    grid: &SweepGrid,
    config: &IntegrationConfig,
) -> Result<EntropyScan, ConditionError> {
    let bs = BeamSplitter::from_transmission(t)?;
    let (t, r) = (bs.t, bs.r);
    let psi0 = fock_wavefunction(0);
    let psi1 = fock_wavefunction(1);
    let phi_scale = psi1.scale_hint();

    let per_node: Vec<Result<(f64, f64), ConditionError>> = grid
        .points
        .par_iter()
        .map(|&x0p| {
            let a0 = psi0.eval(x0p);
            let a1 = psi1.eval(x0p);
            let p = t * t * a0 * a0 + r * r * a1 * a1;
            if p < DENSITY_FLOOR {
                return Ok((p, 0.0));
            }
            let norm = 1.0 / p.sqrt();
            let psi0 = psi0.clone();
            let psi1 = psi1.clone();
            let phi = WaveFunction::new(
                move |x| norm * (t * psi1.eval(x) * a0 + r * psi0.eval(x) * a1),
                phi_scale,
                format!("conditional(x0'={x0p})"),
            );
            let s = rel_entropy_coherence_pure(&phi, config)?;
            Ok((p, s))
        })
        .collect();

    let mut rows = Vec::with_capacity(grid.len());
    for r in per_node {
        rows.push(r?);
    }
    let mass = kahan_sum(grid.weights.iter().zip(&rows).map(|(w, (p, _))| w * p));
    if (mass - 1.0).abs() > COVERAGE_TOL {
        return Err(ConditionError::InsufficientCoverage { captured: mass });
    }
    let average = kahan_sum(grid.weights.iter().zip(&rows).map(|(w, (p, s))| w * p * s));

    let mixture = FockMixture::new(vec![(0, 1.0 - t * t), (1, t * t)])
        .expect("complementary weights always form a valid mixture");
    let reduced = rel_entropy_coherence_fock_mixture(&mixture, config)?;
    Ok(EntropyScan { average, reduced })
}
