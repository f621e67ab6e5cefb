//! Closed-form l1 coherence laws for Gaussian Schell-model states, used as
//! oracles for the numeric pipeline and as fast evaluation paths.

use std::f64::consts::PI;

use thiserror::Error;

use crate::conditioning::BeamSplitter;
use crate::states::GaussianSchellParams;

#[derive(Debug, Error, PartialEq)]
pub enum AnalyticError {
    #[error("domain error: {name} = {value} ({reason})")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
}

/// Quadrature axis the coherence refers to. The X axis is the measured
/// one throughout; Y values arise only through the conjugate combination
/// law and the minimum-uncertainty product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureAxis {
    X,
    Y,
}

impl QuadratureAxis {
    /// Beam-splitter combination law on this axis: reciprocal-quadratic in
    /// X, quadratic in Y.
    pub fn combine(self, c: f64, c0: f64, bs: &BeamSplitter) -> Result<f64, AnalyticError> {
        match self {
            QuadratureAxis::X => output_l1(c, c0, bs),
            QuadratureAxis::Y => Ok(output_l1_y(c, c0, bs)),
        }
    }
}

/// l1 coherence of a Gaussian Schell-model kernel:
/// 2 sqrt(2 pi) sigma mu / sqrt(2 sigma^2 + mu^2), with the exact limit
/// 2 sqrt(2 pi) sigma at mu = inf (pure Gaussian). The limit is an
/// explicit branch, never a large-mu approximation.
pub fn gaussian_l1(params: &GaussianSchellParams) -> f64 {
    let sigma = params.sigma();
    if params.is_pure() {
        return 2.0 * (2.0 * PI).sqrt() * sigma;
    }
    let mu = params.mu();
    2.0 * (2.0 * PI).sqrt() * sigma * mu / (2.0 * sigma * sigma + mu * mu).sqrt()
}

/// l1 coherence of the thermal state: sqrt(2 pi / (2 n_bar + 1)).
pub fn thermal_l1(n_bar: f64) -> Result<f64, AnalyticError> {
    if !(n_bar.is_finite() && n_bar >= 0.0) {
        return Err(AnalyticError::Domain {
            name: "n_bar",
            value: n_bar,
            reason: "must be finite and non-negative",
        });
    }
    Ok((2.0 * PI / (2.0 * n_bar + 1.0)).sqrt())
}

/// Beam-splitter combination law for X-quadrature coherence of Gaussian
/// inputs: 1/C'^2 = t^2/C^2 + r^2/C0^2. The incoherent limit C -> 0 is a
/// caller-side limit; nonpositive inputs are domain errors.
pub fn output_l1(c: f64, c0: f64, bs: &BeamSplitter) -> Result<f64, AnalyticError> {
    if !(c.is_finite() && c > 0.0) {
        return Err(AnalyticError::Domain {
            name: "c",
            value: c,
            reason: "must be finite and positive",
        });
    }
    if !(c0.is_finite() && c0 > 0.0) {
        return Err(AnalyticError::Domain {
            name: "c0",
            value: c0,
            reason: "must be finite and positive",
        });
    }
    let (t, r) = (bs.t(), bs.r());
    Ok(1.0 / (t * t / (c * c) + r * r / (c0 * c0)).sqrt())
}

/// Combination law for Y-quadrature coherence:
/// C'_Y = sqrt(t^2 Cy^2 + r^2 Cy0^2).
pub fn output_l1_y(cy: f64, cy0: f64, bs: &BeamSplitter) -> f64 {
    let (t, r) = (bs.t(), bs.r());
    (t * t * cy * cy + r * r * cy0 * cy0).sqrt()
}

/// Y-axis coherence of the minimum-uncertainty partner: Cx Cy = 2 pi for
/// pure Gaussians, so the partner of Cx is 2 pi / Cx.
pub fn min_uncertainty_partner(cx: f64) -> Result<f64, AnalyticError> {
    if !(cx.is_finite() && cx > 0.0) {
        return Err(AnalyticError::Domain {
            name: "cx",
            value: cx,
            reason: "must be finite and positive",
        });
    }
    Ok(2.0 * PI / cx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    use crate::states::thermal_params;

    fn bs(t: f64) -> BeamSplitter {
        BeamSplitter::from_transmission(t).unwrap()
    }

    #[test]
    fn gaussian_law_reference_points() {
        let vac = GaussianSchellParams::pure(0.5).unwrap();
        assert_relative_eq!(gaussian_l1(&vac), (2.0 * PI).sqrt(), max_relative = 1e-14);
        let wide = GaussianSchellParams::pure(1.0).unwrap();
        assert_relative_eq!(
            gaussian_l1(&wide),
            2.0 * (2.0 * PI).sqrt(),
            max_relative = 1e-14
        );
        let th1 = GaussianSchellParams::new(3f64.sqrt() / 2.0, 3f64.sqrt() / 4.0).unwrap();
        assert_relative_eq!(
            gaussian_l1(&th1),
            (2.0 * PI / 3.0).sqrt(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn thermal_law_reference_points() {
        assert_relative_eq!(
            thermal_l1(0.0).unwrap(),
            (2.0 * PI).sqrt(),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            thermal_l1(1.0).unwrap(),
            (2.0 * PI / 3.0).sqrt(),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            thermal_l1(20.0).unwrap(),
            0.391_469_567_3,
            max_relative = 1e-9
        );
        assert!(thermal_l1(-0.5).is_err());
    }

    #[test]
    fn thermal_law_agrees_with_gaussian_law() {
        for n_bar in [0.0, 0.5, 1.0, 5.0, 20.0] {
            let via_params = gaussian_l1(&thermal_params(n_bar).unwrap());
            assert_relative_eq!(via_params, thermal_l1(n_bar).unwrap(), max_relative = 1e-13);
        }
    }

    #[test]
    fn combination_law_reference_points() {
        let c = (2.0 * PI / 3.0).sqrt();
        let c0 = (2.0 * PI).sqrt();
        let out = output_l1(c, c0, &bs(std::f64::consts::FRAC_1_SQRT_2)).unwrap();
        assert_relative_eq!(out, PI.sqrt(), max_relative = 1e-13);
        assert_relative_eq!(
            output_l1(1.3, 0.4, &bs(1.0)).unwrap(),
            1.3,
            max_relative = 1e-13
        );
        assert!(output_l1(0.0, 1.0, &bs(0.5)).is_err());
        assert!(output_l1(1.0, -2.0, &bs(0.5)).is_err());
    }

    #[test]
    fn y_combination_law_reference_points() {
        assert_relative_eq!(output_l1_y(0.7, 9.9, &bs(1.0)), 0.7, max_relative = 1e-13);
        let cy = 2.0 * PI / (2.0 * PI).sqrt();
        assert_relative_eq!(output_l1_y(cy, cy, &bs(0.6)), cy, max_relative = 1e-13);
    }

    #[test]
    fn min_uncertainty_product_is_two_pi() {
        let cx = (2.0 * PI).sqrt();
        let cy = min_uncertainty_partner(cx).unwrap();
        assert_relative_eq!(cy, cx, max_relative = 1e-14);
        assert_relative_eq!(cx * cy, 2.0 * PI, max_relative = 1e-14);
        assert!(min_uncertainty_partner(0.0).is_err());
    }

    #[test]
    fn axis_dispatch_matches_direct_calls() {
        let b = bs(0.8);
        assert_relative_eq!(
            QuadratureAxis::X.combine(1.5, 2.5, &b).unwrap(),
            output_l1(1.5, 2.5, &b).unwrap()
        );
        assert_relative_eq!(
            QuadratureAxis::Y.combine(1.5, 2.5, &b).unwrap(),
            output_l1_y(1.5, 2.5, &b)
        );
    }

    proptest! {
        #[test]
        fn equal_inputs_pass_through_any_splitter(
            c in 0.1f64..10.0,
            t in 0.0f64..=1.0,
        ) {
            let b = bs(t);
            prop_assert!((output_l1(c, c, &b).unwrap() - c).abs() <= 1e-12 * c);
            prop_assert!((output_l1_y(c, c, &b) - c).abs() <= 1e-12 * c);
        }

        #[test]
        fn output_decreases_in_t_when_ancilla_beats_input(
            c in 0.1f64..2.0,
            extra in 0.1f64..3.0,
            t1 in 0.05f64..0.9,
            dt in 0.01f64..0.1,
        ) {
            // With c0 > c, more transmission means less borrowed coherence.
            let c0 = c + extra;
            let lo = output_l1(c, c0, &bs(t1)).unwrap();
            let hi = output_l1(c, c0, &bs(t1 + dt)).unwrap();
            prop_assert!(hi < lo);
        }

        #[test]
        fn conjugate_laws_are_reciprocal(
            cx in 0.3f64..5.0,
            cx0 in 0.3f64..5.0,
            t in 0.05f64..0.95,
        ) {
            // For minimum-uncertainty Gaussians the Y law is the X law
            // conjugated through Cx Cy = 2 pi.
            let b = bs(t);
            let cy = min_uncertainty_partner(cx).unwrap();
            let cy0 = min_uncertainty_partner(cx0).unwrap();
            let via_y = output_l1_y(cy, cy0, &b);
            let via_x = 2.0 * PI / output_l1(cx, cx0, &b).unwrap();
            prop_assert!((via_y - via_x).abs() <= 1e-10 * via_x);
        }
    }
}
