//! Cross checks of the numeric pipeline against closed-form laws, each
//! producing a pass/fail [`LawReport`].
//!
//! Relative-comparison tolerances are the documented defaults scaled by
//! how much the caller loosened `rel_tol` beyond its default, so running
//! with coarse integration still verifies the same laws at a
//! correspondingly coarse level. Identities that hold in floating point
//! regardless of integration accuracy keep fixed tolerances.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use rayon::prelude::*;

use crate::analytic;
use crate::coherence;
use crate::conditioning::{self, BeamSplitter, ConditionError, SweepGrid};
use crate::numquad::{self, IntegrationConfig};
use crate::states::{
    fock_wavefunction, gaussian_schell_kernel, gaussian_wavefunction, pure_kernel, thermal_params,
    DensityKernel, GaussianSchellParams,
};

/// Outcome of one law check.
#[derive(Debug, Clone)]
pub struct LawReport {
    pub law: &'static str,
    pub description: &'static str,
    pub tolerance: f64,
    pub worst: f64,
    pub passed: bool,
}

impl LawReport {
    fn from_worst(
        law: &'static str,
        description: &'static str,
        tolerance: f64,
        worst: f64,
    ) -> Self {
        Self {
            law,
            description,
            tolerance,
            worst,
            passed: worst <= tolerance,
        }
    }
}

impl fmt::Display for LawReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<26} worst {:>12.4e}  tolerance {:>9.1e}  ({})",
            if self.passed { "PASS" } else { "FAIL" },
            self.law,
            self.worst,
            self.tolerance,
            self.description
        )
    }
}

/// Names of all laws, in report order.
pub fn law_names() -> &'static [&'static str] {
    &[
        "gaussian-closed-form",
        "thermal-closed-form",
        "combination-law",
        "outcome-independence",
        "gain-criterion",
        "average-reduced-identity",
        "average-reduced-fock-gap",
        "single-photon-kernel",
        "single-photon-density",
        "fock-monotonicity",
        "uncertainty-product",
        "entropy-separation",
        "probability-normalization",
    ]
}

/// Run one law by name. `negative_control` feeds an inconsistent (t, r)
/// pair into the combination-law prediction, which must then fail.
pub fn run_named(
    name: &str,
    config: &IntegrationConfig,
    negative_control: bool,
) -> Option<Result<LawReport, ConditionError>> {
    Some(match name {
        "gaussian-closed-form" => law_gaussian_closed_form(config),
        "thermal-closed-form" => law_thermal_closed_form(config),
        "combination-law" => law_combination(config, negative_control),
        "outcome-independence" => law_outcome_independence(config),
        "gain-criterion" => law_gain_criterion(config),
        "average-reduced-identity" => law_average_reduced_identity(config),
        "average-reduced-fock-gap" => law_average_reduced_fock_gap(config),
        "single-photon-kernel" => law_single_photon_kernel(config),
        "single-photon-density" => law_single_photon_density(config),
        "fock-monotonicity" => law_fock_monotonicity(config),
        "uncertainty-product" => law_uncertainty_product(config),
        "entropy-separation" => law_entropy_separation(config),
        "probability-normalization" => law_probability_normalization(config),
        _ => return None,
    })
}

/// Run every law in order.
pub fn run_all(
    config: &IntegrationConfig,
    negative_control: bool,
) -> Result<Vec<LawReport>, ConditionError> {
    law_names()
        .iter()
        .map(|name| run_named(name, config, negative_control).expect("registered law name"))
        .collect()
}

const DEFAULT_REL_TOL: f64 = 1e-8;

/// Documented tolerance, loosened proportionally when the caller loosens
/// rel_tol beyond the default. Capped at 2%: beyond that a comparison
/// stops being a check at all, and genuine law violations (such as the
/// negative control's ~40% deviation) must fail at any setting.
fn scaled_tol(base: f64, config: &IntegrationConfig) -> f64 {
    (base * (config.rel_tol / DEFAULT_REL_TOL).max(1.0)).min(0.02)
}

fn vacuum_kernel() -> DensityKernel {
    pure_kernel(&fock_wavefunction(0))
}

fn rel_dev(value: f64, reference: f64) -> f64 {
    (value - reference).abs() / reference.abs()
}

/// Numeric l1 coherence over a (sigma, mu) grid against
/// 2 sqrt(2 pi) sigma mu / sqrt(2 sigma^2 + mu^2).
fn law_gaussian_closed_form(config: &IntegrationConfig) -> Result<LawReport, ConditionError> {
    let sigmas = [0.25, 0.5, 1.0, 1.5, 2.0];
    let mus = [0.25, 0.5, 1.0, 4.0, f64::INFINITY];
    let cases: Vec<(f64, f64)> = sigmas
        .iter()
        .flat_map(|&s| mus.iter().map(move |&m| (s, m)))
        .collect();
    let devs: Vec<Result<f64, ConditionError>> = cases
        .par_iter()
        .map(|&(sigma, mu)| {
            let params = GaussianSchellParams::new(sigma, mu).expect("grid params are valid");
            let numeric = coherence::l1_coherence(&gaussian_schell_kernel(&params), config)?;
            Ok(rel_dev(numeric.value, analytic::gaussian_l1(&params)))
        })
        .collect();
    let mut worst = 0.0f64;
    for d in devs {
        worst = worst.max(d?);
    }
    Ok(LawReport::from_worst(
        "gaussian-closed-form",
        "l1 coherence of Schell-model kernels vs closed form, 5x5 (sigma, mu) grid",
        scaled_tol(1e-4, config),
        worst,
    ))
}

/// Numeric thermal coherence against sqrt(2 pi / (2 n_bar + 1)).
fn law_thermal_closed_form(config: &IntegrationConfig) -> Result<LawReport, ConditionError> {
    let cases = [0.0, 1.0, 5.0, 20.0];
    let devs: Vec<Result<f64, ConditionError>> = cases
        .par_iter()
        .map(|&n_bar| {
            let params = thermal_params(n_bar).expect("non-negative occupation");
            let numeric = coherence::l1_coherence(&gaussian_schell_kernel(&params), config)?;
            let exact = analytic::thermal_l1(n_bar).expect("non-negative occupation");
            Ok(rel_dev(numeric.value, exact))
        })
        .collect();
    let mut worst = 0.0f64;
    for d in devs {
        worst = worst.max(d?);
    }
    Ok(LawReport::from_worst(
        "thermal-closed-form",
        "thermal-state l1 coherence vs sqrt(2 pi/(2 nbar + 1)), nbar in {0, 1, 5, 20}",
        scaled_tol(1e-4, config),
        worst,
    ))
}

struct GaussianCase {
    system: GaussianSchellParams,
    ancilla: GaussianSchellParams,
    t: f64,
}

/// t x system x ancilla grid shared by the combination-law checks.
fn gaussian_grid() -> Vec<GaussianCase> {
    let systems = [0.0, 1.0, 5.0].map(|n| thermal_params(n).expect("non-negative occupation"));
    let ancillas = [
        GaussianSchellParams::pure(0.5).expect("valid"),
        thermal_params(1.0).expect("valid"),
    ];
    let ts = [0.3, FRAC_1_SQRT_2, 0.9];
    let mut out = Vec::new();
    for &system in &systems {
        for &ancilla in &ancillas {
            for &t in &ts {
                out.push(GaussianCase { system, ancilla, t });
            }
        }
    }
    out
}

/// Conditional coherence of Gaussian x Gaussian inputs against
/// 1/C'^2 = t^2/C^2 + r^2/C0^2. Under negative control the predicted
/// value uses an inconsistent reflection r = 1 - t, so the check must
/// fail.
fn law_combination(
    config: &IntegrationConfig,
    negative_control: bool,
) -> Result<LawReport, ConditionError> {
    let devs: Vec<Result<f64, ConditionError>> = gaussian_grid()
        .par_iter()
        .map(|case| {
            let bs = BeamSplitter::from_transmission(case.t).expect("grid t is valid");
            let rho = gaussian_schell_kernel(&case.system);
            let rho0 = gaussian_schell_kernel(&case.ancilla);
            let numeric = conditioning::conditional_coherence(&rho, &rho0, &bs, 0.5, config)?;
            let prediction_bs = if negative_control {
                BeamSplitter::from_parts_unchecked(case.t, 1.0 - case.t)
            } else {
                bs
            };
            let predicted = analytic::output_l1(
                analytic::gaussian_l1(&case.system),
                analytic::gaussian_l1(&case.ancilla),
                &prediction_bs,
            )
            .expect("positive coherences");
            Ok(rel_dev(numeric.value, predicted))
        })
        .collect();
    let mut worst = 0.0f64;
    for d in devs {
        worst = worst.max(d?);
    }
    Ok(LawReport::from_worst(
        "combination-law",
        "conditional coherence vs 1/C'^2 = t^2/C^2 + r^2/C0^2 over the Gaussian grid",
        scaled_tol(1e-4, config),
        worst,
    ))
}

/// Gaussian conditional coherence must not depend on the outcome.
fn law_outcome_independence(config: &IntegrationConfig) -> Result<LawReport, ConditionError> {
    let outcomes = [-2.0, -1.0, 0.0, 1.0, 2.0];
    let spreads: Vec<Result<f64, ConditionError>> = gaussian_grid()
        .par_iter()
        .map(|case| {
            let bs = BeamSplitter::from_transmission(case.t).expect("grid t is valid");
            let rho = gaussian_schell_kernel(&case.system);
            let rho0 = gaussian_schell_kernel(&case.ancilla);
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for &x0p in &outcomes {
                let c = conditioning::conditional_coherence(&rho, &rho0, &bs, x0p, config)?;
                lo = lo.min(c.value);
                hi = hi.max(c.value);
            }
            Ok((hi - lo) / (0.5 * (hi + lo)))
        })
        .collect();
    let mut worst = 0.0f64;
    for s in spreads {
        worst = worst.max(s?);
    }
    Ok(LawReport::from_worst(
        "outcome-independence",
        "Gaussian conditional coherence spread across x0' in [-2, 2]",
        scaled_tol(1e-4, config),
        worst,
    ))
}

/// The conditional coherence exceeds the input coherence exactly when the
/// ancilla's does, for every Gaussian case with r != 0.
fn law_gain_criterion(config: &IntegrationConfig) -> Result<LawReport, ConditionError> {
    // (system, ancilla, t); chosen so both signs of C0 - C occur.
    let cases = [
        (
            thermal_params(1.0).unwrap(),
            GaussianSchellParams::pure(0.5).unwrap(),
            0.8,
        ),
        (
            thermal_params(5.0).unwrap(),
            GaussianSchellParams::pure(0.5).unwrap(),
            0.4,
        ),
        (
            GaussianSchellParams::new(1.0, 0.5).unwrap(),
            GaussianSchellParams::pure(1.0).unwrap(),
            0.6,
        ),
        (
            GaussianSchellParams::pure(0.5).unwrap(),
            thermal_params(1.0).unwrap(),
            0.8,
        ),
        (
            GaussianSchellParams::pure(1.0).unwrap(),
            thermal_params(5.0).unwrap(),
            0.4,
        ),
        (
            thermal_params(1.0).unwrap(),
            thermal_params(5.0).unwrap(),
            std::f64::consts::FRAC_1_SQRT_2,
        ),
    ];
    let checks: Vec<Result<bool, ConditionError>> = cases
        .par_iter()
        .map(|&(system, ancilla, t)| {
            let bs = BeamSplitter::from_transmission(t).expect("case t is valid");
            let rho = gaussian_schell_kernel(&system);
            let rho0 = gaussian_schell_kernel(&ancilla);
            let c = analytic::gaussian_l1(&system);
            let c0 = analytic::gaussian_l1(&ancilla);
            let cp = conditioning::conditional_coherence(&rho, &rho0, &bs, 0.5, config)?;
            Ok((cp.value > c) == (c0 > c))
        })
        .collect();
    let mut mismatches = 0u32;
    for c in checks {
        if !c? {
            mismatches += 1;
        }
    }
    Ok(LawReport::from_worst(
        "gain-criterion",
        "sign of C' - C equals sign of C0 - C in every Gaussian case with r != 0",
        0.0,
        mismatches as f64,
    ))
}

/// Comparison-friendly integration settings for the averaged/reduced
/// checks: their tolerances are 1e-3-scale, so integrating at 1e-5 keeps
/// the quadrature's own contribution negligible without paying for
/// default-tolerance refinement of the kinked reduced kernels.
fn avg_red_cfg(config: &IntegrationConfig) -> IntegrationConfig {
    IntegrationConfig {
        rel_tol: config.rel_tol.max(1e-5),
        abs_tol: config.abs_tol.max(1e-9),
        ..config.clone()
    }
}

fn avg_and_reduced(
    rho: &DensityKernel,
    t: f64,
    config: &IntegrationConfig,
) -> Result<(f64, f64), ConditionError> {
    let rho0 = vacuum_kernel();
    let bs = BeamSplitter::from_transmission(t).expect("case t is valid");
    let grid = SweepGrid::default_for(rho, &rho0);
    let avg = conditioning::average_coherence(rho, &rho0, &bs, &grid, config)?;
    let reduced = conditioning::reduced_state(rho, &rho0, &bs, &grid, config)?;
    let c_red = coherence::l1_coherence(&reduced, config)?;
    Ok((avg.value, c_red.value))
}

/// Outcome-averaged coherence against the coherence of the reduced state
/// for kernels that never change sign. For those the absolute value
/// commutes with the outcome integral, so the two quantities agree
/// exactly and any discrepancy is quadrature error.
fn law_average_reduced_identity(config: &IntegrationConfig) -> Result<LawReport, ConditionError> {
    let int_cfg = avg_red_cfg(config);
    let cases: [(DensityKernel, f64); 2] = [
        (
            gaussian_schell_kernel(&thermal_params(1.0).expect("valid")),
            0.8,
        ),
        (
            gaussian_schell_kernel(&GaussianSchellParams::new(1.0, 0.5).expect("valid")),
            FRAC_1_SQRT_2,
        ),
    ];
    let devs: Vec<Result<f64, ConditionError>> = cases
        .par_iter()
        .map(|(rho, t)| {
            let (avg, red) = avg_and_reduced(rho, *t, &int_cfg)?;
            Ok((avg - red).abs() / red)
        })
        .collect();
    let mut worst = 0.0f64;
    for d in devs {
        worst = worst.max(d?);
    }
    Ok(LawReport::from_worst(
        "average-reduced-identity",
        "averaged coherence equals the reduced state's for sign-definite (Gaussian) kernels",
        scaled_tol(1e-3, config),
        worst,
    ))
}

/// For number-state inputs the conditioned kernels change sign with the
/// outcome, so the averaged coherence strictly exceeds the reduced
/// state's (triangle inequality); the claimed equality cannot hold there.
/// Both sides are pinned to offline high-resolution trapezoid oracles,
/// and the strict ordering is asserted.
fn law_average_reduced_fock_gap(config: &IntegrationConfig) -> Result<LawReport, ConditionError> {
    let int_cfg = avg_red_cfg(config);
    // (n, averaged, reduced) at t = 1/sqrt(2), frozen from an
    // independent 12001 x 6001-point trapezoid evaluation; the measured
    // gaps are 22.6% and 32.1%.
    let cases: [(u32, f64, f64); 2] =
        [(1, 2.527_907_8, 2.061_369_6), (2, 2.532_294_2, 1.916_443_6)];
    let devs: Vec<Result<f64, ConditionError>> = cases
        .par_iter()
        .map(|&(n, avg_oracle, red_oracle)| {
            let rho = pure_kernel(&fock_wavefunction(n));
            let (avg, red) = avg_and_reduced(&rho, FRAC_1_SQRT_2, &int_cfg)?;
            if avg <= red {
                // Ordering violation: report an off-scale deviation.
                return Ok(1.0);
            }
            Ok(rel_dev(avg, avg_oracle).max(rel_dev(red, red_oracle)))
        })
        .collect();
    let mut worst = 0.0f64;
    for d in devs {
        worst = worst.max(d?);
    }
    Ok(LawReport::from_worst(
        "average-reduced-fock-gap",
        "fock inputs: averaged strictly exceeds reduced; both match offline oracles",
        scaled_tol(2e-3, config),
        worst,
    ))
}

/// The conditioned single-photon kernel is the rank-one kernel of
/// phi(x) = t psi1(x) psi0(x0') + r psi0(x) psi1(x0'), pointwise.
fn law_single_photon_kernel(_config: &IntegrationConfig) -> Result<LawReport, ConditionError> {
    let bs = BeamSplitter::from_transmission(FRAC_1_SQRT_2).expect("valid");
    let (t, r) = (bs.t(), bs.r());
    let rho = pure_kernel(&fock_wavefunction(1));
    let rho0 = vacuum_kernel();
    let psi0 = fock_wavefunction(0);
    let psi1 = fock_wavefunction(1);
    let mut worst = 0.0f64;
    for &x0p in &[0.0, 0.5, 1.5] {
        let un = conditioning::conditional_unnormalized(&rho, &rho0, &bs, x0p);
        let a0 = psi0.eval(x0p);
        let a1 = psi1.eval(x0p);
        let phi = |x: f64| t * psi1.eval(x) * a0 + r * psi0.eval(x) * a1;
        for i in 0..21 {
            let x = -3.0 + 0.3 * i as f64;
            for j in 0..21 {
                let xp = -3.0 + 0.3 * j as f64;
                worst = worst.max((un.eval(x, xp) - phi(x) * phi(xp)).abs());
            }
        }
    }
    // This is an algebraic identity of the kernel map, independent of
    // integration accuracy, so the tolerance is fixed.
    Ok(LawReport::from_worst(
        "single-photon-kernel",
        "conditioned fock(1) x vacuum kernel vs rank-one phi kernel, 21x21 points",
        1e-8,
        worst,
    ))
}

/// The single-photon outcome density against
/// p(x0') = t^2 psi0(x0')^2 + r^2 psi1(x0')^2.
fn law_single_photon_density(config: &IntegrationConfig) -> Result<LawReport, ConditionError> {
    // A fixed tight sub-config: the documented 1e-10 bound is about the
    // identity, not about the caller's sweep accuracy.
    let tight = IntegrationConfig {
        rel_tol: config.rel_tol.min(1e-12),
        abs_tol: config.abs_tol.min(1e-15),
        ..config.clone()
    };
    let bs = BeamSplitter::from_transmission(FRAC_1_SQRT_2).expect("valid");
    let (t, r) = (bs.t(), bs.r());
    let rho = pure_kernel(&fock_wavefunction(1));
    let rho0 = vacuum_kernel();
    let psi0 = fock_wavefunction(0);
    let psi1 = fock_wavefunction(1);
    let mut worst = 0.0f64;
    for &x0p in &[-1.2, 0.0, 0.5, 1.5] {
        let numeric = conditioning::outcome_density(&rho, &rho0, &bs, x0p, &tight)?;
        let a0 = psi0.eval(x0p);
        let a1 = psi1.eval(x0p);
        let exact = t * t * a0 * a0 + r * r * a1 * a1;
        worst = worst.max((numeric - exact).abs());
    }
    Ok(LawReport::from_worst(
        "single-photon-density",
        "outcome density of fock(1) x vacuum vs t^2 psi0^2 + r^2 psi1^2",
        1e-10,
        worst,
    ))
}

/// l1 coherence strictly increases with photon number; endpoints match
/// their closed forms.
fn law_fock_monotonicity(config: &IntegrationConfig) -> Result<LawReport, ConditionError> {
    let values: Vec<Result<f64, ConditionError>> = (0u32..=10)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&n| Ok(coherence::l1_coherence_pure(&fock_wavefunction(n), config)?.value))
        .collect();
    let mut cs = Vec::with_capacity(11);
    for v in values {
        cs.push(v?);
    }
    let monotone = cs.windows(2).all(|w| w[1] > w[0]);
    let dev0 = rel_dev(cs[0], (2.0 * PI).sqrt());
    let dev1 = rel_dev(cs[1], 4.0 * (2.0 / PI).sqrt());
    let worst = if monotone { dev0.max(dev1) } else { 1.0 };
    Ok(LawReport::from_worst(
        "fock-monotonicity",
        "fock l1 coherence strictly increases for n = 0..10; endpoints match closed forms",
        scaled_tol(1e-6, config),
        worst,
    ))
}

/// Numeric Cx Cy = 2 pi for pure Gaussians, with Cy computed from the
/// width-1/(4 sigma) conjugate-representation Gaussian.
fn law_uncertainty_product(config: &IntegrationConfig) -> Result<LawReport, ConditionError> {
    let mut worst = 0.0f64;
    for &sigma in &[0.25, 0.5, 1.0] {
        let cx = coherence::l1_coherence_pure(
            &gaussian_wavefunction(sigma).expect("positive spread"),
            config,
        )?;
        let cy = coherence::l1_coherence_pure(
            &gaussian_wavefunction(1.0 / (4.0 * sigma)).expect("positive spread"),
            config,
        )?;
        worst = worst.max((cx.value * cy.value / (2.0 * PI) - 1.0).abs());
    }
    Ok(LawReport::from_worst(
        "uncertainty-product",
        "Cx * Cy = 2 pi for pure Gaussians, sigma in {1/4, 1/2, 1}",
        scaled_tol(1e-5, config),
        worst,
    ))
}

/// Referring-versus-nonreferring relative-entropy coherence for the
/// single-photon scan: average >= reduced everywhere, equality at the
/// boundaries, strict separation at t = 1/sqrt(2).
fn law_entropy_separation(config: &IntegrationConfig) -> Result<LawReport, ConditionError> {
    let rho = pure_kernel(&fock_wavefunction(1));
    let rho0 = vacuum_kernel();
    let grid = SweepGrid::default_for(&rho, &rho0);
    let mut ts: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
    ts.push(FRAC_1_SQRT_2);
    let scans: Vec<Result<(f64, conditioning::EntropyScan), ConditionError>> = ts
        .par_iter()
        .map(|&t| {
            Ok((
                t,
                conditioning::single_photon_entropy_scan(t, &grid, config)?,
            ))
        })
        .collect();
    let mut ordered = true;
    let mut boundary_gap = 0.0f64;
    let mut separation = f64::INFINITY;
    for s in scans {
        let (t, scan) = s?;
        if scan.average < scan.reduced - 1e-9 {
            ordered = false;
        }
        if t == 0.0 || t == 1.0 {
            boundary_gap = boundary_gap.max((scan.average - scan.reduced).abs());
        }
        if t == FRAC_1_SQRT_2 {
            separation = scan.average - scan.reduced;
        }
    }
    let tolerance = scaled_tol(1e-4, config);
    let passed = ordered && boundary_gap <= tolerance && separation > 1e-3;
    Ok(LawReport {
        law: "entropy-separation",
        description:
            "entropy coherence: average >= reduced on the t grid, equal at t = 0, 1, separated at t = 1/sqrt(2)",
        tolerance,
        worst: boundary_gap,
        passed,
    })
}

/// The outcome density integrates to 1 across representative
/// configurations, via an adaptive integral independent of sweep grids.
fn law_probability_normalization(config: &IntegrationConfig) -> Result<LawReport, ConditionError> {
    let cases: Vec<(DensityKernel, DensityKernel, f64)> = vec![
        (
            gaussian_schell_kernel(&thermal_params(1.0).expect("valid")),
            vacuum_kernel(),
            0.8,
        ),
        (
            gaussian_schell_kernel(&thermal_params(1.0).expect("valid")),
            vacuum_kernel(),
            FRAC_1_SQRT_2,
        ),
        (
            pure_kernel(&fock_wavefunction(1)),
            vacuum_kernel(),
            FRAC_1_SQRT_2,
        ),
        (
            vacuum_kernel(),
            gaussian_schell_kernel(&thermal_params(1.0).expect("valid")),
            0.3,
        ),
        (
            gaussian_schell_kernel(&GaussianSchellParams::new(1.0, 0.5).expect("valid")),
            vacuum_kernel(),
            0.6,
        ),
    ];
    let defects: Vec<Result<f64, ConditionError>> = cases
        .par_iter()
        .map(|(rho, rho0, t)| {
            let bs = BeamSplitter::from_transmission(*t).expect("case t is valid");
            // The measured port mixes the reflected system with the
            // transmitted ancilla, so p's spread is bounded by the larger
            // scale hint.
            let outer = config.covering(rho.scale_hint().max(rho0.scale_hint()));
            let total = numquad::integrate_1d(
                |x0p| {
                    conditioning::outcome_density(rho, rho0, &bs, x0p, config).unwrap_or(f64::NAN)
                },
                &outer,
            )?;
            Ok((total.value - 1.0).abs())
        })
        .collect();
    let mut worst = 0.0f64;
    for d in defects {
        worst = worst.max(d?);
    }
    Ok(LawReport::from_worst(
        "probability-normalization",
        "outcome density integrates to 1 for representative conditioning setups",
        scaled_tol(1e-6, config),
        worst,
    ))
}
