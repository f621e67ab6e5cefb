//! Figure-data sweeps. Each figure computes its full sweep in memory
//! (points in parallel), validates it, and only then writes the CSV, so
//! a failed sweep never leaves a partial file.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use quadcoh::coherence;
use quadcoh::conditioning::{self, BeamSplitter, SweepGrid};
use quadcoh::states::{fock_wavefunction, gaussian_wavefunction, pure_kernel, DensityKernel};

use crate::settings::NumericSettings;
use crate::CliError;

/// Node count for the averaged-coherence sweeps: the default 129-node
/// grid under-resolves the widest (n = 10) outcome density, so these
/// figures use a denser grid unless the user chose a count explicitly.
const AVERAGE_SWEEP_NODES: usize = 257;

struct Csv {
    comments: Vec<String>,
    header: &'static str,
    rows: Vec<String>,
}

impl Csv {
    fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            out.push_str("# ");
            out.push_str(c);
            out.push('\n');
        }
        out.push_str(self.header);
        out.push('\n');
        for r in &self.rows {
            out.push_str(r);
            out.push('\n');
        }
        out
    }
}

fn fmt(x: f64) -> String {
    format!("{:.8e}", x)
}

fn vacuum_kernel() -> DensityKernel {
    pure_kernel(&fock_wavefunction(0))
}

/// Collect parallel per-point results back into sweep order.
fn sequence<T: Send>(results: Vec<Result<T, CliError>>) -> Result<Vec<T>, CliError> {
    results.into_iter().collect()
}

pub fn run(name: &str, out: Option<&Path>, settings: &NumericSettings) -> Result<(), CliError> {
    let csv = match name {
        "fig2" => fig2(settings),
        "fig3" => fig3(settings),
        "fig4" => fig456(settings, Variant::CoherenceRatio),
        "fig5" => fig456(settings, Variant::OutcomeDensity),
        "fig6" => fig456(settings, Variant::WeightedRatio),
        "fig7" => fig78(settings, false),
        "fig8" => fig78(settings, true),
        "fig9" => fig9(settings),
        _ => {
            return Err(CliError::Parse(format!(
                "unknown figure '{name}'; expected fig2..fig9"
            )))
        }
    }?;
    let path = match out {
        Some(p) => p.to_path_buf(),
        None => PathBuf::from(format!("{name}.csv")),
    };
    fs::write(&path, csv.render())
        .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))?;
    println!("wrote {} ({} rows)", path.display(), csv.rows.len());
    Ok(())
}

/// Coherence change against the transparent-splitter baseline for two
/// pure Gaussian inputs, vacuum ancilla, outcome fixed at 0.
fn fig2(settings: &NumericSettings) -> Result<Csv, CliError> {
    let cfg = &settings.integration;
    let rho0 = vacuum_kernel();
    let ts: Vec<f64> = (0..=20).map(|k| k as f64 / 20.0).collect();
    let mut curves: Vec<Vec<f64>> = Vec::new();
    for dx in [0.25, 1.0] {
        let rho = pure_kernel(&gaussian_wavefunction(dx)?);
        // Baseline through the same code path as the sweep, so the t = 1
        // row is exactly zero.
        let transparent = BeamSplitter::from_transmission(1.0)?;
        let baseline = conditioning::conditional_coherence(&rho, &rho0, &transparent, 0.0, cfg)?;
        let deltas = sequence(
            ts.par_iter()
                .map(|&t| {
                    let bs = BeamSplitter::from_transmission(t)?;
                    let cp = conditioning::conditional_coherence(&rho, &rho0, &bs, 0.0, cfg)?;
                    Ok(cp.value - baseline.value)
                })
                .collect(),
        )?;
        curves.push(deltas);
    }
    let rows = ts
        .iter()
        .enumerate()
        .map(|(i, &t)| format!("{},{},{}", fmt(t), fmt(curves[0][i]), fmt(curves[1][i])))
        .collect();
    Ok(Csv {
        comments: vec![
            "coherence change of the conditioned output vs beam-splitter transmission".into(),
            "system: squeezed:dx=0.25 (dC_dx025) and squeezed:dx=1 (dC_dx1); ancilla: vacuum"
                .into(),
            "outcome x0p = 0 (Gaussian conditioning is outcome-independent)".into(),
            "each value is Cp(t) - Cp(t=1); the t=1 row is identically zero".into(),
            settings.config_line(),
        ],
        header: "t,dC_dx025,dC_dx1",
        rows,
    })
}

/// l1 coherence of the number states n = 0..10.
fn fig3(settings: &NumericSettings) -> Result<Csv, CliError> {
    let cfg = &settings.integration;
    let values = sequence(
        (0u32..=10)
            .collect::<Vec<_>>()
            .par_iter()
            .map(|&n| Ok(coherence::l1_coherence_pure(&fock_wavefunction(n), cfg)?.value))
            .collect(),
    )?;
    let rows = values
        .iter()
        .enumerate()
        .map(|(n, &c)| format!("{n},{}", fmt(c)))
        .collect();
    Ok(Csv {
        comments: vec![
            "l1 coherence of number states".into(),
            settings.config_line(),
        ],
        header: "n,C",
        rows,
    })
}

enum Variant {
    CoherenceRatio,
    OutcomeDensity,
    WeightedRatio,
}

/// Outcome sweeps for number states n = 1, 2, 3 through a balanced
/// splitter with vacuum ancilla: conditioned-over-input coherence ratio,
/// outcome density, or their product.
fn fig456(settings: &NumericSettings, variant: Variant) -> Result<Csv, CliError> {
    let cfg = &settings.integration;
    let bs = BeamSplitter::from_transmission(FRAC_1_SQRT_2)?;
    let rho0 = vacuum_kernel();
    let xs: Vec<f64> = (0..=30).map(|k| k as f64 / 10.0).collect();
    let mut curves: Vec<Vec<f64>> = Vec::new();
    for n in [1u32, 2, 3] {
        let rho = pure_kernel(&fock_wavefunction(n));
        let c_in = coherence::l1_coherence_pure(&fock_wavefunction(n), cfg)?.value;
        let values = sequence(
            xs.par_iter()
                .map(|&x0p| {
                    Ok(match variant {
                        Variant::CoherenceRatio => {
                            conditioning::conditional_coherence(&rho, &rho0, &bs, x0p, cfg)?.value
                                / c_in
                        }
                        Variant::OutcomeDensity => {
                            conditioning::outcome_density(&rho, &rho0, &bs, x0p, cfg)?
                        }
                        Variant::WeightedRatio => {
                            let p = conditioning::outcome_density(&rho, &rho0, &bs, x0p, cfg)?;
                            let cp =
                                conditioning::conditional_coherence(&rho, &rho0, &bs, x0p, cfg)?;
                            p * cp.value / c_in
                        }
                    })
                })
                .collect(),
        )?;
        if matches!(variant, Variant::OutcomeDensity) {
            check_mirrored_normalization(n, &xs, &values)?;
        }
        curves.push(values);
    }
    let rows = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            format!(
                "{},{},{},{}",
                fmt(x),
                fmt(curves[0][i]),
                fmt(curves[1][i]),
                fmt(curves[2][i])
            )
        })
        .collect();
    let (description, header) = match variant {
        Variant::CoherenceRatio => (
            "conditioned coherence over input coherence vs outcome",
            "x0p,ratio_n1,ratio_n2,ratio_n3",
        ),
        Variant::OutcomeDensity => ("outcome density vs outcome", "x0p,p_n1,p_n2,p_n3"),
        Variant::WeightedRatio => (
            "density-weighted coherence ratio vs outcome",
            "x0p,v_n1,v_n2,v_n3",
        ),
    };
    Ok(Csv {
        comments: vec![
            description.into(),
            "system: fock:n=1,2,3; ancilla: vacuum; t = 1/sqrt(2)".into(),
            "sweep: x0p in [0, 3] step 0.1; the density is symmetric in x0p".into(),
            settings.config_line(),
        ],
        header,
        rows,
    })
}

/// The emitted half-curve, mirrored, must carry unit probability; this
/// guards both the sweep range and the density itself before writing.
fn check_mirrored_normalization(n: u32, xs: &[f64], p: &[f64]) -> Result<(), CliError> {
    let h = xs[1] - xs[0];
    let interior: f64 = p[1..p.len() - 1].iter().sum();
    let total = h * (2.0 * interior + p[0] + p[p.len() - 1]);
    if (total - 1.0).abs() > 1e-4 {
        return Err(CliError::Integration(format!(
            "outcome density for n={n} integrates to {total:.6} over the mirrored sweep, expected 1"
        )));
    }
    Ok(())
}

/// Outcome-averaged coherence (absolute, or relative to the input) for
/// number states n = 0..10 at a balanced splitter.
fn fig78(settings: &NumericSettings, relative: bool) -> Result<Csv, CliError> {
    let cfg = &settings.integration;
    let bs = BeamSplitter::from_transmission(FRAC_1_SQRT_2)?;
    let rho0 = vacuum_kernel();
    let nodes = if settings.sweep_nodes_explicit {
        settings.sweep_nodes
    } else {
        AVERAGE_SWEEP_NODES.max(settings.sweep_nodes)
    };
    let values = sequence(
        (0u32..=10)
            .collect::<Vec<_>>()
            .par_iter()
            .map(|&n| {
                let rho = pure_kernel(&fock_wavefunction(n));
                let l0 = 6.0 * rho.scale_hint().max(rho0.scale_hint());
                let grid = SweepGrid::gauss_legendre(l0, nodes)?;
                let avg = conditioning::average_coherence(&rho, &rho0, &bs, &grid, cfg)?.value;
                if relative {
                    let c_in = coherence::l1_coherence_pure(&fock_wavefunction(n), cfg)?.value;
                    Ok(avg / c_in)
                } else {
                    Ok(avg)
                }
            })
            .collect(),
    )?;
    let rows = values
        .iter()
        .enumerate()
        .map(|(n, &v)| format!("{n},{}", fmt(v)))
        .collect();
    let (description, header) = if relative {
        (
            "outcome-averaged coherence over input coherence vs photon number",
            "n,ratio",
        )
    } else {
        ("outcome-averaged coherence vs photon number", "n,C_avg")
    };
    Ok(Csv {
        comments: vec![
            description.into(),
            "system: fock:n=0..10; ancilla: vacuum; t = 1/sqrt(2)".into(),
            format!("sweep grid: {nodes} Gauss-Legendre nodes on [-L0, L0], L0 = 6 max(scale)"),
            settings.config_line(),
        ],
        header,
        rows,
    })
}

/// Referring (outcome-averaged) and nonreferring (reduced-state)
/// relative-entropy coherence of the conditioned single-photon state vs
/// transmission.
fn fig9(settings: &NumericSettings) -> Result<Csv, CliError> {
    let cfg = &settings.integration;
    let rho = pure_kernel(&fock_wavefunction(1));
    let rho0 = vacuum_kernel();
    let l0 = 6.0 * rho.scale_hint().max(rho0.scale_hint());
    let grid = SweepGrid::gauss_legendre(l0, settings.sweep_nodes)?;
    let ts: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
    let scans = sequence(
        ts.par_iter()
            .map(|&t| Ok(conditioning::single_photon_entropy_scan(t, &grid, cfg)?))
            .collect(),
    )?;
    let rows = ts
        .iter()
        .zip(&scans)
        .map(|(&t, s)| format!("{},{},{}", fmt(t), fmt(s.average), fmt(s.reduced)))
        .collect();
    Ok(Csv {
        comments: vec![
            "relative-entropy coherence of the conditioned single-photon state vs transmission"
                .into(),
            "S_avg: outcome-averaged; S_red: reduced (record discarded); ancilla: vacuum".into(),
            settings.config_line(),
        ],
        header: "t,S_avg,S_red",
        rows,
    })
}
