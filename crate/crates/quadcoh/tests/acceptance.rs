//! Acceptance gate: every release-blocking check, one test per criterion.
//!
//! Each test runs the corresponding law check(s) from [`quadcoh::verify`]
//! at default integration settings, prints a one-line summary (visible
//! with `--nocapture`; the test name itself reports pass/fail in default
//! output), and enforces the documented runtime budget where one exists.

use std::time::{Duration, Instant};

use quadcoh::numquad::IntegrationConfig;
use quadcoh::verify;

/// Run the named laws at defaults, print one summary line per law, and
/// panic on any failure or budget overrun.
fn run_criterion(criterion: u32, laws: &[&str], budget: Option<Duration>) {
    let config = IntegrationConfig::default();
    let started = Instant::now();
    let mut failures = Vec::new();
    for name in laws {
        let report = verify::run_named(name, &config, false)
            .unwrap_or_else(|| panic!("unknown law {name}"))
            .unwrap_or_else(|e| panic!("criterion {criterion}: {name} errored: {e}"));
        println!("criterion {criterion:02} {report}");
        if !report.passed {
            failures.push(format!(
                "{} worst {:e} exceeds tolerance {:e}",
                report.law, report.worst, report.tolerance
            ));
        }
    }
    let elapsed = started.elapsed();
    if let Some(limit) = budget {
        println!(
            "criterion {criterion:02} runtime {:.2} s (budget {:.0} s)",
            elapsed.as_secs_f64(),
            limit.as_secs_f64()
        );
        assert!(
            elapsed <= limit,
            "criterion {criterion} exceeded its runtime budget: {:.2} s > {:.0} s",
            elapsed.as_secs_f64(),
            limit.as_secs_f64()
        );
    }
    assert!(
        failures.is_empty(),
        "criterion {criterion} failed: {}",
        failures.join("; ")
    );
}

#[test]
fn criterion_01_gaussian_family_closed_form() {
    run_criterion(1, &["gaussian-closed-form"], Some(Duration::from_secs(30)));
}

#[test]
fn criterion_02_thermal_closed_form() {
    run_criterion(2, &["thermal-closed-form"], None);
}

#[test]
fn criterion_03_combination_law_and_outcome_independence() {
    run_criterion(3, &["combination-law", "outcome-independence"], None);
}

#[test]
fn criterion_04_coherence_gain_sign() {
    run_criterion(4, &["gain-criterion"], None);
}

#[test]
fn criterion_05_average_equals_reduced_coherence() {
    // The equality of outcome-averaged and reduced-state l1 coherence
    // holds exactly when the conditioned kernels keep one sign in the
    // outcome variable, which covers the Gaussian family. Number-state
    // kernels change sign, the triangle inequality is strict, and the
    // averaged value exceeds the reduced one by 23% (n=1) and 32% (n=2)
    // at a balanced splitter; equality at 1e-3 is mathematically
    // unattainable there. The gap law pins both sides to independent
    // offline oracles instead, so the claimed identity is enforced on its
    // actual domain of validity and the number-state behavior is checked
    // against ground truth rather than against an impossible identity.
    run_criterion(
        5,
        &["average-reduced-identity", "average-reduced-fock-gap"],
        Some(Duration::from_secs(120)),
    );
}

#[test]
fn criterion_06_single_photon_kernel_and_density() {
    run_criterion(6, &["single-photon-kernel", "single-photon-density"], None);
}

#[test]
fn criterion_07_fock_coherence_monotonicity() {
    run_criterion(7, &["fock-monotonicity"], None);
}

#[test]
fn criterion_08_minimum_uncertainty_product() {
    run_criterion(8, &["uncertainty-product"], None);
}

#[test]
fn criterion_09_entropy_separation() {
    run_criterion(9, &["entropy-separation"], Some(Duration::from_secs(120)));
}

#[test]
fn criterion_10_probability_normalization() {
    run_criterion(10, &["probability-normalization"], None);
}
