//! Command-line front end: single coherence computations, conditioning at
//! one outcome, figure-data sweeps as CSV, and the law-verification
//! suite.

mod figures;
mod settings;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use quadcoh::analytic;
use quadcoh::coherence;
use quadcoh::conditioning::{self, BeamSplitter, ConditionError};
use quadcoh::states::StateSpec;
use quadcoh::verify;

use settings::NumericSettings;

#[derive(Parser)]
#[command(
    name = "quadcoh",
    version,
    about = "Quadrature-basis coherence of continuous-variable states under conditional beam-splitter measurement"
)]
struct Cli {
    #[command(flatten)]
    numeric: NumericFlags,
    #[command(subcommand)]
    command: Command,
}

/// Numeric controls shared by every subcommand. Precedence: flag, then
/// config file, then built-in default.
#[derive(Args, Debug, Clone, Default)]
struct NumericFlags {
    /// Integration half-width (quadrature units)
    #[arg(long, global = true)]
    half_width: Option<f64>,
    /// Relative integration tolerance
    #[arg(long, global = true)]
    rel_tol: Option<f64>,
    /// Absolute integration tolerance
    #[arg(long, global = true)]
    abs_tol: Option<f64>,
    /// Maximum adaptive bisection depth
    #[arg(long, global = true)]
    depth: Option<u32>,
    /// Number of nodes in outcome sweep grids
    #[arg(long, global = true)]
    sweep_nodes: Option<usize>,
    /// Defaults file with key=value lines
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// l1 coherence of a single state
    Coherence {
        /// State spec, e.g. vacuum, thermal:nbar=1, fock:n=2,
        /// gaussian:sigma=0.5,mu=1, squeezed:dx=0.25
        #[arg(long)]
        state: String,
    },
    /// Conditioned coherence after measuring one outcome on the ancilla port
    Condition {
        /// System state spec
        #[arg(long)]
        state: String,
        /// Ancilla state spec
        #[arg(long, default_value = "vacuum")]
        ancilla: String,
        /// Beam-splitter transmission, 0 <= t <= 1
        #[arg(long)]
        t: f64,
        /// Measured outcome x0'
        #[arg(long)]
        x0p: f64,
    },
    /// Sweep data for one named figure, written as CSV
    Figure {
        /// One of fig2..fig9
        name: String,
        /// Output path (default: <name>.csv in the working directory)
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Cross-check the numerics against every closed-form law
    Verify {
        /// Feed an inconsistent (t, r) pair into the combination-law
        /// prediction; the run must then fail
        #[arg(long)]
        negative_control: bool,
        /// Run a single law by name instead of the full suite
        #[arg(long, value_name = "NAME")]
        law: Option<String>,
    },
}

/// Error carrying its process exit code; clap's own usage errors exit 2
/// as well, so every malformed invocation lands on the same code.
#[derive(Debug)]
enum CliError {
    Parse(String),
    Integration(String),
    Negligible(String),
    VerifyFailed,
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::VerifyFailed => 1,
            CliError::Parse(_) => 2,
            CliError::Integration(_) => 3,
            CliError::Negligible(_) => 4,
            CliError::Io(_) => 5,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Integration(m) => write!(f, "integration error: {m}"),
            CliError::Negligible(m) => write!(f, "negligible outcome: {m}"),
            CliError::VerifyFailed => write!(f, "verification failed"),
            CliError::Io(m) => write!(f, "io error: {m}"),
        }
    }
}

impl From<ConditionError> for CliError {
    fn from(e: ConditionError) -> Self {
        match e {
            // A transmission outside [0, 1] is bad input, not a numerics
            // problem.
            ConditionError::InvalidTransmission { .. } => CliError::Parse(e.to_string()),
            ConditionError::NegligibleOutcome { .. } => CliError::Negligible(e.to_string()),
            _ => CliError::Integration(e.to_string()),
        }
    }
}

impl From<quadcoh::numquad::QuadError> for CliError {
    fn from(e: quadcoh::numquad::QuadError) -> Self {
        CliError::Integration(e.to_string())
    }
}

impl From<quadcoh::states::StateError> for CliError {
    fn from(e: quadcoh::states::StateError) -> Self {
        CliError::Parse(e.to_string())
    }
}

fn parse_state(text: &str) -> Result<StateSpec, CliError> {
    StateSpec::from_str(text).map_err(|e| CliError::Parse(format!("state '{text}': {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let settings = settings::resolve(&cli.numeric)?;
    match cli.command {
        Command::Coherence { state } => cmd_coherence(&state, &settings),
        Command::Condition {
            state,
            ancilla,
            t,
            x0p,
        } => cmd_condition(&state, &ancilla, t, x0p, &settings),
        Command::Figure { name, out } => figures::run(&name, out.as_deref(), &settings),
        Command::Verify {
            negative_control,
            law,
        } => cmd_verify(negative_control, law.as_deref(), &settings),
    }
}

/// l1 coherence of one state; pure states go through the 1D rank-one
/// path, mixtures through the 2D absolute integral.
fn state_l1(
    spec: &StateSpec,
    settings: &NumericSettings,
) -> Result<coherence::CoherenceValue, CliError> {
    if let Some(psi) = spec.wave_function()? {
        Ok(coherence::l1_coherence_pure(&psi, &settings.integration)?)
    } else {
        Ok(coherence::l1_coherence(
            &spec.kernel()?,
            &settings.integration,
        )?)
    }
}

fn cmd_coherence(state: &str, settings: &NumericSettings) -> Result<(), CliError> {
    let spec = parse_state(state)?;
    println!("state: {spec}");
    println!("{}", settings.config_line());
    let c = state_l1(&spec, settings)?;
    println!("C = {:.8e}", c.value);
    println!("error_estimate = {:.3e}", c.error_estimate);
    if let Some(params) = spec.gaussian_schell()? {
        let exact = analytic::gaussian_l1(&params);
        println!("analytic = {:.8e}", exact);
        println!("delta_rel = {:.3e}", (c.value - exact).abs() / exact);
    }
    Ok(())
}

fn cmd_condition(
    state: &str,
    ancilla: &str,
    t: f64,
    x0p: f64,
    settings: &NumericSettings,
) -> Result<(), CliError> {
    let spec = parse_state(state)?;
    let ancilla_spec = parse_state(ancilla)?;
    let bs = BeamSplitter::from_transmission(t)?;
    println!("state: {spec}");
    println!("ancilla: {ancilla_spec}");
    println!("t = {:.8e}", bs.t());
    println!("r = {:.8e}", bs.r());
    println!("x0p = {:.8e}", x0p);
    println!("{}", settings.config_line());
    let rho = spec.kernel()?;
    let rho0 = ancilla_spec.kernel()?;
    let p = conditioning::outcome_density(&rho, &rho0, &bs, x0p, &settings.integration)?;
    let cp = conditioning::conditional_coherence(&rho, &rho0, &bs, x0p, &settings.integration)?;
    let c = state_l1(&spec, settings)?;
    println!("p = {:.8e}", p);
    println!("Cp = {:.8e}", cp.value);
    println!("C = {:.8e}", c.value);
    println!("ratio = {:.8e}", cp.value / c.value);
    if let (Some(params), Some(ancilla_params)) =
        (spec.gaussian_schell()?, ancilla_spec.gaussian_schell()?)
    {
        let predicted = analytic::output_l1(
            analytic::gaussian_l1(&params),
            analytic::gaussian_l1(&ancilla_params),
            &bs,
        )
        .map_err(|e| CliError::Parse(e.to_string()))?;
        println!("analytic_Cp = {:.8e}", predicted);
        println!(
            "delta_rel = {:.3e}",
            (cp.value - predicted).abs() / predicted
        );
    }
    Ok(())
}

fn cmd_verify(
    negative_control: bool,
    law: Option<&str>,
    settings: &NumericSettings,
) -> Result<(), CliError> {
    println!("{}", settings.config_line());
    let names: Vec<&str> = match law {
        Some(name) => {
            if !verify::law_names().contains(&name) {
                return Err(CliError::Parse(format!(
                    "unknown law '{name}'; expected one of: {}",
                    verify::law_names().join(", ")
                )));
            }
            vec![name]
        }
        None => verify::law_names().to_vec(),
    };
    let mut failed = 0usize;
    for name in &names {
        let report = verify::run_named(name, &settings.integration, negative_control)
            .expect("name validated against the registry")?;
        println!("{report}");
        if !report.passed {
            failed += 1;
        }
    }
    if failed == 0 {
        println!("all {} law checks passed", names.len());
        Ok(())
    } else {
        println!("{failed} of {} law checks failed", names.len());
        Err(CliError::VerifyFailed)
    }
}
