//! Resolution of numeric settings from flags, an optional key=value file,
//! and built-in defaults, in that precedence order.

use std::fs;
use std::path::Path;

use quadcoh::numquad::IntegrationConfig;

use crate::{CliError, NumericFlags};

pub const DEFAULT_SWEEP_NODES: usize = 129;

#[derive(Debug, Clone)]
pub struct NumericSettings {
    pub integration: IntegrationConfig,
    pub sweep_nodes: usize,
    /// True when the node count came from a flag or config file rather
    /// than the default; sweeps that prefer denser grids respect an
    /// explicit choice.
    pub sweep_nodes_explicit: bool,
}

impl NumericSettings {
    /// One-line echo of the effective settings, printed by every command
    /// so runs are self-describing.
    pub fn config_line(&self) -> String {
        format!(
            "config: half_width={:e} rel_tol={:e} abs_tol={:e} depth={} sweep_nodes={}",
            self.integration.half_width,
            self.integration.rel_tol,
            self.integration.abs_tol,
            self.integration.max_depth,
            self.sweep_nodes
        )
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .trim()
        .parse()
        .map_err(|_| CliError::Parse(format!("config key '{key}': cannot parse value '{value}'")))
}

/// Apply one key=value pair from a config file.
fn apply_file_entry(
    key: &str,
    value: &str,
    integration: &mut IntegrationConfig,
    sweep_nodes: &mut usize,
    sweep_explicit: &mut bool,
) -> Result<(), CliError> {
    match key {
        "half_width" => integration.half_width = parse_num(key, value)?,
        "rel_tol" => integration.rel_tol = parse_num(key, value)?,
        "abs_tol" => integration.abs_tol = parse_num(key, value)?,
        "depth" => integration.max_depth = parse_num(key, value)?,
        "sweep_nodes" => {
            *sweep_nodes = parse_num(key, value)?;
            *sweep_explicit = true;
        }
        _ => {
            return Err(CliError::Parse(format!(
                "unknown config key '{key}' (expected half_width, rel_tol, abs_tol, depth, sweep_nodes)"
            )))
        }
    }
    Ok(())
}

fn load_file(
    path: &Path,
    integration: &mut IntegrationConfig,
    sweep_nodes: &mut usize,
    sweep_explicit: &mut bool,
) -> Result<(), CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("config file {}: {e}", path.display())))?;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Parse(format!(
                "config file {} line {}: expected key=value, got '{line}'",
                path.display(),
                idx + 1
            ))
        })?;
        apply_file_entry(key.trim(), value, integration, sweep_nodes, sweep_explicit)?;
    }
    Ok(())
}

pub fn resolve(flags: &NumericFlags) -> Result<NumericSettings, CliError> {
    let mut integration = IntegrationConfig::default();
    let mut sweep_nodes = DEFAULT_SWEEP_NODES;
    let mut sweep_explicit = false;

    if let Some(path) = &flags.config {
        load_file(
            path,
            &mut integration,
            &mut sweep_nodes,
            &mut sweep_explicit,
        )?;
    }
    if let Some(v) = flags.half_width {
        integration.half_width = v;
    }
    if let Some(v) = flags.rel_tol {
        integration.rel_tol = v;
    }
    if let Some(v) = flags.abs_tol {
        integration.abs_tol = v;
    }
    if let Some(v) = flags.depth {
        integration.max_depth = v;
    }
    if let Some(v) = flags.sweep_nodes {
        sweep_nodes = v;
        sweep_explicit = true;
    }

    validate(&integration, sweep_nodes)?;
    Ok(NumericSettings {
        integration,
        sweep_nodes,
        sweep_nodes_explicit: sweep_explicit,
    })
}

/// Settings problems are reported as parse errors before any integration
/// starts, with the offending value named.
fn validate(integration: &IntegrationConfig, sweep_nodes: usize) -> Result<(), CliError> {
    let bad = |what: String| Err(CliError::Parse(what));
    if !(integration.half_width.is_finite() && integration.half_width > 0.0) {
        return bad(format!(
            "half_width must be finite and positive, got {}",
            integration.half_width
        ));
    }
    if !(integration.rel_tol.is_finite() && integration.rel_tol > 0.0) {
        return bad(format!(
            "rel_tol must be finite and positive, got {}",
            integration.rel_tol
        ));
    }
    if !(integration.abs_tol.is_finite() && integration.abs_tol >= 0.0) {
        return bad(format!(
            "abs_tol must be finite and nonnegative, got {}",
            integration.abs_tol
        ));
    }
    if integration.max_depth > 40 {
        return bad(format!(
            "depth must be at most 40, got {}",
            integration.max_depth
        ));
    }
    if sweep_nodes < 2 {
        return bad(format!("sweep_nodes must be at least 2, got {sweep_nodes}"));
    }
    Ok(())
}
