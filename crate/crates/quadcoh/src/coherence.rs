//! Coherence functionals over the continuous position basis.
//!
//! The l1 measure integrates |rho(x, x')| over the plane; for pure states
//! it collapses to (integral of |psi|)^2, which is both faster and better
//! conditioned, so pure inputs get a dedicated entry point. The
//! relative-entropy measure is the difference between the position
//! distribution's differential entropy and the state's entropy; it is
//! provided for the two state classes the conditioning pipeline produces,
//! pure states and mixtures of number eigenstates.

use thiserror::Error;

use crate::numquad::{self, IntegrationConfig, QuadError};
use crate::states::{fock_wavefunction, DensityKernel, FockIndex, WaveFunction};

/// Densities below this floor contribute nothing to entropy integrals;
/// p ln p underflows to an exact 0 rather than NaN.
const ENTROPY_FLOOR: f64 = 1e-300;

/// Coherence estimate with the quadrature error propagated through the
/// functional.
#[derive(Debug, Clone, Copy)]
pub struct CoherenceValue {
    pub value: f64,
    pub error_estimate: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum MixtureError {
    #[error("mixture has no components")]
    Empty,
    #[error("negative weight {weight} for component n = {n}")]
    NegativeWeight { n: FockIndex, weight: f64 },
    #[error("component n = {n} appears more than once")]
    DuplicateComponent { n: FockIndex },
    #[error("weights sum to {sum}, expected 1")]
    NotNormalized { sum: f64 },
}

/// Statistical mixture of number eigenstates, sum of w_n |n><n|.
#[derive(Debug, Clone)]
pub struct FockMixture {
    components: Vec<(FockIndex, f64)>,
}

impl FockMixture {
    /// Weights must be non-negative, attached to distinct n, and sum to 1
    /// within 1e-9.
    pub fn new(components: Vec<(FockIndex, f64)>) -> Result<Self, MixtureError> {
        if components.is_empty() {
            return Err(MixtureError::Empty);
        }
        let mut sum = 0.0;
        for (i, &(n, w)) in components.iter().enumerate() {
            if !(w.is_finite() && w >= 0.0) {
                return Err(MixtureError::NegativeWeight { n, weight: w });
            }
            if components[..i].iter().any(|&(m, _)| m == n) {
                return Err(MixtureError::DuplicateComponent { n });
            }
            sum += w;
        }
        if (sum - 1.0).abs() > 1e-9 {
            return Err(MixtureError::NotNormalized { sum });
        }
        Ok(Self { components })
    }

    pub fn components(&self) -> &[(FockIndex, f64)] {
        &self.components
    }
}

#[inline]
fn neg_p_ln_p(p: f64) -> f64 {
    if p <= ENTROPY_FLOOR {
        0.0
    } else {
        -p * p.ln()
    }
}

/// l1 coherence of a density kernel: integral of |rho(x, x')| over the
/// plane.
pub fn l1_coherence(
    kernel: &DensityKernel,
    config: &IntegrationConfig,
) -> Result<CoherenceValue, QuadError> {
    let cfg = config.covering(kernel.scale_hint());
    let r = numquad::integrate_2d(|x, xp| kernel.eval(x, xp).abs(), &cfg)?;
    Ok(CoherenceValue {
        value: r.value,
        error_estimate: r.error_estimate,
    })
}

/// l1 coherence of a pure state, (integral of |psi|)^2, using a single 1D
/// integral instead of the 2D one.
pub fn l1_coherence_pure(
    psi: &WaveFunction,
    config: &IntegrationConfig,
) -> Result<CoherenceValue, QuadError> {
    let cfg = config.covering(psi.scale_hint());
    let r = numquad::integrate_1d(|x| psi.eval(x).abs(), &cfg)?;
    Ok(CoherenceValue {
        value: r.value * r.value,
        // d(I^2) = 2 I dI, plus the second-order term for safety.
        error_estimate: 2.0 * r.value.abs() * r.error_estimate
            + r.error_estimate * r.error_estimate,
    })
}

/// Relative-entropy coherence of a pure state: the differential entropy
/// -integral p ln p of its position distribution p = psi^2 (a pure state's
/// own entropy is zero).
pub fn rel_entropy_coherence_pure(
    psi: &WaveFunction,
    config: &IntegrationConfig,
) -> Result<f64, QuadError> {
    let cfg = config.covering(psi.scale_hint());
    let r = numquad::integrate_1d(
        |x| {
            let a = psi.eval(x);
            neg_p_ln_p(a * a)
        },
        &cfg,
    )?;
    Ok(r.value)
}

/// Relative-entropy coherence of a mixture of number eigenstates: the
/// position distribution's differential entropy minus the mixing entropy
/// -sum of w ln w.
pub fn rel_entropy_coherence_fock_mixture(
    mixture: &FockMixture,
    config: &IntegrationConfig,
) -> Result<f64, QuadError> {
    let modes: Vec<(WaveFunction, f64)> = mixture
        .components
        .iter()
        .map(|&(n, w)| (fock_wavefunction(n), w))
        .collect();
    let scale = modes
        .iter()
        .map(|(m, _)| m.scale_hint())
        .fold(1.0f64, f64::max);
    let cfg = config.covering(scale);
    let position_entropy = numquad::integrate_1d(
        |x| {
            let p: f64 = modes
                .iter()
                .map(|(m, w)| {
                    let a = m.eval(x);
                    w * a * a
                })
                .sum();
            neg_p_ln_p(p)
        },
        &cfg,
    )?
    .value;
    let mixing_entropy: f64 = mixture.components.iter().map(|&(_, w)| neg_p_ln_p(w)).sum();
    Ok(position_entropy - mixing_entropy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    use crate::states::{
        gaussian_schell_kernel, gaussian_wavefunction, pure_kernel, thermal_params,
        GaussianSchellParams,
    };

    #[test]
    fn vacuum_l1_is_sqrt_two_pi() {
        let cfg = IntegrationConfig::default();
        let psi = fock_wavefunction(0);
        let fast = l1_coherence_pure(&psi, &cfg).unwrap();
        assert_relative_eq!(fast.value, (2.0 * PI).sqrt(), max_relative = 1e-9);
        let full = l1_coherence(&pure_kernel(&psi), &cfg).unwrap();
        assert_relative_eq!(full.value, (2.0 * PI).sqrt(), max_relative = 1e-8);
    }

    #[test]
    fn thermal_unit_occupation_l1() {
        let cfg = IntegrationConfig::default();
        let k = gaussian_schell_kernel(&thermal_params(1.0).unwrap());
        let c = l1_coherence(&k, &cfg).unwrap();
        // sqrt(2 pi / 3)
        assert_relative_eq!(c.value, 1.447_202_509, max_relative = 1e-8);
        assert!(c.error_estimate < 1e-6 * c.value);
    }

    #[test]
    fn single_excitation_l1() {
        let cfg = IntegrationConfig::default();
        let c = l1_coherence_pure(&fock_wavefunction(1), &cfg).unwrap();
        // 4 sqrt(2 / pi)
        assert_relative_eq!(c.value, 3.191_538_243, max_relative = 1e-8);
    }

    #[test]
    fn broad_schell_kernel_l1() {
        let cfg = IntegrationConfig::default();
        let p = GaussianSchellParams::new(3f64.sqrt() / 2.0, 3f64.sqrt() / 4.0).unwrap();
        let c = l1_coherence(&gaussian_schell_kernel(&p), &cfg).unwrap();
        assert_relative_eq!(c.value, (2.0 * PI / 3.0).sqrt(), max_relative = 1e-8);
    }

    #[test]
    fn ground_mode_entropy_is_half_ln_pi_e_over_two() {
        let cfg = IntegrationConfig::default();
        let s = rel_entropy_coherence_pure(&fock_wavefunction(0), &cfg).unwrap();
        assert_relative_eq!(
            s,
            0.5 * (PI * std::f64::consts::E / 2.0).ln(),
            max_relative = 1e-9
        );
    }

    #[test]
    fn gaussian_entropy_scales_with_spread() {
        // Differential entropy of N(0, s^2) is ln(s sqrt(2 pi e)).
        let cfg = IntegrationConfig::default();
        for s in [0.25, 0.5, 2.0] {
            let psi = gaussian_wavefunction(s).unwrap();
            let h = rel_entropy_coherence_pure(&psi, &cfg).unwrap();
            let exact = (s * (2.0 * PI * std::f64::consts::E).sqrt()).ln();
            assert_relative_eq!(h, exact, max_relative = 1e-8);
        }
    }

    #[test]
    fn l1_is_invariant_under_position_shifts() {
        let cfg = IntegrationConfig::default();
        let k = gaussian_schell_kernel(&thermal_params(1.0).unwrap());
        let base = l1_coherence(&k, &cfg).unwrap().value;
        for d in [0.5, 1.0, 2.0] {
            let shifted = l1_coherence(&k.displaced(d), &cfg).unwrap().value;
            assert_relative_eq!(shifted, base, max_relative = 1e-6);
        }
    }

    #[test]
    fn pure_path_agrees_with_kernel_path() {
        let cfg = IntegrationConfig::default();
        for n in [0u32, 1, 5] {
            let psi = fock_wavefunction(n);
            let fast = l1_coherence_pure(&psi, &cfg).unwrap();
            let full = l1_coherence(&pure_kernel(&psi), &cfg).unwrap();
            let tol = (fast.error_estimate + full.error_estimate).max(1e-7 * full.value);
            assert!(
                (fast.value - full.value).abs() <= tol,
                "n = {n}: {} vs {} beyond {tol}",
                fast.value,
                full.value
            );
        }
    }

    #[test]
    fn entropy_values_are_nonnegative() {
        let cfg = IntegrationConfig::default();
        for n in [0u32, 1, 3] {
            let s = rel_entropy_coherence_pure(&fock_wavefunction(n), &cfg).unwrap();
            assert!(s >= -1e-9, "entropy coherence of mode {n} is {s}");
        }
        let m = FockMixture::new(vec![(0, 0.3), (1, 0.7)]).unwrap();
        assert!(rel_entropy_coherence_fock_mixture(&m, &cfg).unwrap() >= -1e-9);
    }

    #[test]
    fn trivial_mixture_matches_pure_entropy() {
        let cfg = IntegrationConfig::default();
        let m = FockMixture::new(vec![(1, 1.0)]).unwrap();
        let via_mixture = rel_entropy_coherence_fock_mixture(&m, &cfg).unwrap();
        let direct = rel_entropy_coherence_pure(&fock_wavefunction(1), &cfg).unwrap();
        assert_relative_eq!(via_mixture, direct, max_relative = 1e-10);
    }

    #[test]
    fn mixture_validation_rejects_bad_weights() {
        assert_eq!(FockMixture::new(vec![]).unwrap_err(), MixtureError::Empty);
        assert!(matches!(
            FockMixture::new(vec![(0, -0.2), (1, 1.2)]).unwrap_err(),
            MixtureError::NegativeWeight { n: 0, .. }
        ));
        assert!(matches!(
            FockMixture::new(vec![(2, 0.5), (2, 0.5)]).unwrap_err(),
            MixtureError::DuplicateComponent { n: 2 }
        ));
        assert!(matches!(
            FockMixture::new(vec![(0, 0.7), (1, 0.7)]).unwrap_err(),
            MixtureError::NotNormalized { .. }
        ));
    }

    #[test]
    fn zero_weight_component_is_harmless() {
        let cfg = IntegrationConfig::default();
        let with = FockMixture::new(vec![(0, 1.0), (3, 0.0)]).unwrap();
        let without = FockMixture::new(vec![(0, 1.0)]).unwrap();
        let a = rel_entropy_coherence_fock_mixture(&with, &cfg).unwrap();
        let b = rel_entropy_coherence_fock_mixture(&without, &cfg).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-10);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn pure_gaussian_l1_closed_form(s in 0.1f64..3.0) {
            // (integral of |psi|)^2 for a spread-s Gaussian is
            // 2 sqrt(2 pi) s.
            let cfg = IntegrationConfig::default();
            let c = l1_coherence_pure(&gaussian_wavefunction(s).unwrap(), &cfg).unwrap();
            let exact = 2.0 * (2.0 * PI).sqrt() * s;
            prop_assert!((c.value - exact).abs() <= 1e-7 * exact);
        }

        #[test]
        fn schell_kernel_l1_matches_closed_form(
            sigma in 0.3f64..2.0,
            mu in 0.15f64..3.0,
        ) {
            let params = GaussianSchellParams::new(sigma, mu).unwrap();
            let cfg = IntegrationConfig::default().with_tolerances(1e-7, 1e-11);
            let c = l1_coherence(&gaussian_schell_kernel(&params), &cfg).unwrap();
            let expected = 2.0 * (2.0 * PI).sqrt() * sigma * mu
                / (2.0 * sigma * sigma + mu * mu).sqrt();
            prop_assert!((c.value - expected).abs() <= 1e-5 * expected);
        }

        #[test]
        fn two_component_mixture_entropy_bounds(w in 0.05f64..0.95) {
            // Position entropy of the mixture lies between the mixture of
            // entropies and that plus the mixing entropy, so the coherence
            // stays within [weighted pure entropies - H(w), weighted pure
            // entropies].
            let cfg = IntegrationConfig::default();
            let m = FockMixture::new(vec![(0, w), (1, 1.0 - w)]).unwrap();
            let s = rel_entropy_coherence_fock_mixture(&m, &cfg).unwrap();
            let s0 = rel_entropy_coherence_pure(&fock_wavefunction(0), &cfg).unwrap();
            let s1 = rel_entropy_coherence_pure(&fock_wavefunction(1), &cfg).unwrap();
            let avg = w * s0 + (1.0 - w) * s1;
            let mix = -(w * w.ln() + (1.0 - w) * (1.0 - w).ln());
            prop_assert!(s <= avg + 1e-9);
            prop_assert!(s >= avg - mix - 1e-9);
        }
    }
}
