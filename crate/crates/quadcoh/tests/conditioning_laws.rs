//! Physics invariants of the conditioning pipeline beyond the acceptance
//! gate: asymptotic regimes of the combination law, the composition of
//! the reduced state, and where the Gaussian-only laws stop applying.

use std::f64::consts::FRAC_1_SQRT_2;

use approx::assert_relative_eq;
use quadcoh::analytic;
use quadcoh::coherence;
use quadcoh::conditioning::{self, BeamSplitter, SweepGrid};
use quadcoh::numquad::IntegrationConfig;
use quadcoh::states::{fock_wavefunction, gaussian_schell_kernel, pure_kernel, thermal_params};

/// Differential entropy of the single-excitation quadrature distribution:
/// ln(2 pi)/2 + gamma - 1/2, cross-checked offline by high-resolution
/// trapezoid summation.
#[test]
fn single_excitation_entropy_matches_closed_form() {
    let cfg = IntegrationConfig::default();
    let s = coherence::rel_entropy_coherence_pure(&fock_wavefunction(1), &cfg).unwrap();
    assert_relative_eq!(s, 0.996_154_198_106, max_relative = 1e-9);
}

/// A nearly incoherent system dominates the combination law, so the
/// conditioned output approaches C/t from below.
#[test]
fn incoherent_system_amplifies_toward_c_over_t() {
    let cfg = IntegrationConfig::default();
    let rho = gaussian_schell_kernel(&thermal_params(100.0).unwrap());
    let rho0 = pure_kernel(&fock_wavefunction(0));
    let bs = BeamSplitter::from_transmission(0.5).unwrap();
    let c = analytic::thermal_l1(100.0).unwrap();
    let cp = conditioning::conditional_coherence(&rho, &rho0, &bs, 0.7, &cfg)
        .unwrap()
        .value;
    let limit = c / bs.t();
    assert!(cp < limit * 1.0001, "cp {cp} should stay below C/t {limit}");
    assert!(cp > 0.97 * limit, "cp {cp} should approach C/t {limit}");
}

/// A nearly incoherent ancilla locks the output close to C0/r, again from
/// below.
#[test]
fn incoherent_ancilla_locks_output_to_c0_over_r() {
    let cfg = IntegrationConfig::default();
    let rho = pure_kernel(&fock_wavefunction(0));
    let rho0 = gaussian_schell_kernel(&thermal_params(100.0).unwrap());
    let t = 0.75f64.sqrt();
    let bs = BeamSplitter::from_transmission(t).unwrap();
    let c0 = analytic::thermal_l1(100.0).unwrap();
    let cp = conditioning::conditional_coherence(&rho, &rho0, &bs, 0.3, &cfg)
        .unwrap()
        .value;
    let limit = c0 / bs.r();
    assert!(
        cp < limit * 1.0001,
        "cp {cp} should stay below C0/r {limit}"
    );
    assert!(cp > 0.97 * limit, "cp {cp} should approach C0/r {limit}");
}

/// Ignoring the measurement record leaves r^2 |0><0| + t^2 |1><1|: the
/// grid-summed reduced kernel matches that mixture pointwise.
#[test]
fn reduced_single_photon_kernel_is_the_two_mode_mixture() {
    let cfg = IntegrationConfig::default();
    let rho = pure_kernel(&fock_wavefunction(1));
    let rho0 = pure_kernel(&fock_wavefunction(0));
    let bs = BeamSplitter::from_transmission(0.6).unwrap();
    let grid = SweepGrid::default_for(&rho, &rho0);
    let reduced = conditioning::reduced_state(&rho, &rho0, &bs, &grid, &cfg).unwrap();
    let psi0 = fock_wavefunction(0);
    let psi1 = fock_wavefunction(1);
    let (t2, r2) = (bs.t() * bs.t(), bs.r() * bs.r());
    for i in -6..=6 {
        let x = 0.5 * i as f64;
        for j in -6..=6 {
            let xp = 0.5 * j as f64;
            let expected = r2 * psi0.eval(x) * psi0.eval(xp) + t2 * psi1.eval(x) * psi1.eval(xp);
            assert!(
                (reduced.eval(x, xp) - expected).abs() < 1e-6,
                "reduced({x}, {xp}) = {} vs mixture {expected}",
                reduced.eval(x, xp)
            );
        }
    }
}

/// The combination law is specific to Gaussian inputs: single-photon
/// conditioning deviates from it by far more than quadrature error.
#[test]
fn combination_law_does_not_extend_to_single_photon_input() {
    let cfg = IntegrationConfig::default();
    let rho = pure_kernel(&fock_wavefunction(1));
    let rho0 = pure_kernel(&fock_wavefunction(0));
    let bs = BeamSplitter::from_transmission(FRAC_1_SQRT_2).unwrap();
    let numeric = conditioning::conditional_coherence(&rho, &rho0, &bs, 0.0, &cfg)
        .unwrap()
        .value;
    let c = coherence::l1_coherence_pure(&fock_wavefunction(1), &cfg)
        .unwrap()
        .value;
    let c0 = analytic::thermal_l1(0.0).unwrap();
    let gaussian_prediction = analytic::output_l1(c, c0, &bs).unwrap();
    let gap = (numeric - gaussian_prediction).abs() / gaussian_prediction;
    assert!(
        gap > 0.05,
        "expected a visible law violation, got relative gap {gap}"
    );
}

/// Nor is the conditioned coherence outcome-independent outside the
/// Gaussian family.
#[test]
fn single_photon_conditioning_depends_on_the_outcome() {
    let cfg = IntegrationConfig::default();
    let rho = pure_kernel(&fock_wavefunction(1));
    let rho0 = pure_kernel(&fock_wavefunction(0));
    let bs = BeamSplitter::from_transmission(FRAC_1_SQRT_2).unwrap();
    let at_zero = conditioning::conditional_coherence(&rho, &rho0, &bs, 0.0, &cfg)
        .unwrap()
        .value;
    let off_center = conditioning::conditional_coherence(&rho, &rho0, &bs, 1.5, &cfg)
        .unwrap()
        .value;
    assert!(
        (at_zero - off_center).abs() > 0.1,
        "expected outcome dependence, got {at_zero} vs {off_center}"
    );
}
