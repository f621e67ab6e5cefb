//! Position-representation states: density kernels, wave functions, and the
//! textual state mini-language.
//!
//! Everything is expressed in dimensionless quadrature units where the
//! ground mode of a unit oscillator has position variance 1/4. A state is
//! either a [`DensityKernel`] rho(x, x') sampled pointwise, or, when pure, a
//! real [`WaveFunction`] psi(x); both carry a `scale_hint` giving the
//! characteristic half-extent of their support so integrators can size
//! their boxes.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::numquad::{self, IntegrationConfig, QuadError};

#[derive(Debug, Error)]
pub enum StateError {
    #[error("invalid {name}: {value} ({reason})")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
}

/// Errors from the textual state mini-language.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum SpecParseError {
    #[error("unknown state family `{family}`")]
    UnknownFamily { family: String },
    #[error("state family `{family}` takes no parameters")]
    UnexpectedParameters { family: &'static str },
    #[error("missing field `{field}` for `{family}`")]
    MissingField {
        family: &'static str,
        field: &'static str,
    },
    #[error("unknown field `{field}` for `{family}`")]
    UnknownField { family: &'static str, field: String },
    #[error("duplicate field `{field}`")]
    DuplicateField { field: String },
    #[error("malformed parameter `{part}` (expected key=value)")]
    MalformedParameter { part: String },
    #[error("invalid value for field `{field}`: `{value}`{hint}")]
    InvalidValue {
        field: &'static str,
        value: String,
        hint: String,
    },
}

/// Photon number of a Fock state.
pub type FockIndex = u32;

/// Real single-mode wave function psi(x) with a support scale hint and a
/// human-readable label.
///
/// Wave functions in this crate are real; complex phases never enter the
/// l1 or entropy functionals, so the representation stays f64.
#[derive(Clone)]
pub struct WaveFunction {
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    scale_hint: f64,
    label: String,
}

impl WaveFunction {
    /// `scale_hint` is the half-extent (in quadrature units) beyond which
    /// |psi| is negligible when multiplied by 8.
    pub fn new<F>(eval: F, scale_hint: f64, label: impl Into<String>) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            eval: Arc::new(eval),
            scale_hint,
            label: label.into(),
        }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn scale_hint(&self) -> f64 {
        self.scale_hint
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl fmt::Debug for WaveFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WaveFunction")
            .field("label", &self.label)
            .field("scale_hint", &self.scale_hint)
            .finish_non_exhaustive()
    }
}

/// Real symmetric density kernel rho(x, x') sampled pointwise.
#[derive(Clone)]
pub struct DensityKernel {
    eval: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    scale_hint: f64,
    is_pure: bool,
}

impl DensityKernel {
    /// `scale_hint` as in [`WaveFunction::new`]; `is_pure` marks kernels
    /// known to factor as psi(x) psi(x'), which downstream code may exploit.
    pub fn from_fn<F>(eval: F, scale_hint: f64, is_pure: bool) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            eval: Arc::new(eval),
            scale_hint,
            is_pure,
        }
    }

    #[inline]
    pub fn eval(&self, x: f64, xp: f64) -> f64 {
        (self.eval)(x, xp)
    }

    pub fn scale_hint(&self) -> f64 {
        self.scale_hint
    }

    pub fn is_pure(&self) -> bool {
        self.is_pure
    }

    /// Kernel displaced in position by `d`: rho(x - d, x' - d).
    pub fn displaced(&self, d: f64) -> Self {
        let inner = Arc::clone(&self.eval);
        Self {
            eval: Arc::new(move |x, xp| inner(x - d, xp - d)),
            scale_hint: self.scale_hint + d.abs() / 8.0,
            is_pure: self.is_pure,
        }
    }
}

impl fmt::Debug for DensityKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DensityKernel")
            .field("scale_hint", &self.scale_hint)
            .field("is_pure", &self.is_pure)
            .finish_non_exhaustive()
    }
}

/// Parameters of a Gaussian Schell-model kernel: position spread `sigma`
/// and coherence length `mu`, with `mu = inf` denoting the pure Gaussian
/// limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSchellParams {
    sigma: f64,
    mu: f64,
}

impl GaussianSchellParams {
    pub fn new(sigma: f64, mu: f64) -> Result<Self, StateError> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(StateError::InvalidParameter {
                name: "sigma",
                value: sigma,
                reason: "must be finite and positive",
            });
        }
        // mu = inf is the pure limit, so only NaN and non-positive values are out.
        if mu.is_nan() || mu <= 0.0 {
            return Err(StateError::InvalidParameter {
                name: "mu",
                value: mu,
                reason: "must be positive (inf selects the pure limit)",
            });
        }
        Ok(Self { sigma, mu })
    }

    /// Pure Gaussian of spread `sigma` (the mu -> inf limit).
    pub fn pure(sigma: f64) -> Result<Self, StateError> {
        Self::new(sigma, f64::INFINITY)
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn is_pure(&self) -> bool {
        self.mu.is_infinite()
    }
}

/// Schell-model parameters of the thermal state with mean occupation
/// `n_bar`; `n_bar = 0` degenerates to the pure vacuum.
pub fn thermal_params(n_bar: f64) -> Result<GaussianSchellParams, StateError> {
    if !(n_bar.is_finite() && n_bar >= 0.0) {
        return Err(StateError::InvalidParameter {
            name: "nbar",
            value: n_bar,
            reason: "must be finite and non-negative",
        });
    }
    let m = 2.0 * n_bar + 1.0;
    let sigma = m.sqrt() / 2.0;
    if n_bar == 0.0 {
        return GaussianSchellParams::pure(sigma);
    }
    let mu = 0.5 * (m / (2.0 * n_bar * (n_bar + 1.0))).sqrt();
    GaussianSchellParams::new(sigma, mu)
}

/// Gaussian Schell-model kernel
/// (2 pi sigma^2)^(-1/2) exp(-(x^2 + x'^2)/(4 sigma^2))
///                       exp(-(x - x')^2/(4 mu^2)),
/// normalized to unit trace; the second factor drops in the pure limit.
pub fn gaussian_schell_kernel(params: &GaussianSchellParams) -> DensityKernel {
    let sigma = params.sigma;
    let norm = 1.0 / ((2.0 * PI).sqrt() * sigma);
    let inv4s2 = 1.0 / (4.0 * sigma * sigma);
    if params.is_pure() {
        DensityKernel::from_fn(
            move |x, xp| norm * (-(x * x + xp * xp) * inv4s2).exp(),
            sigma,
            true,
        )
    } else {
        let inv4m2 = 1.0 / (4.0 * params.mu * params.mu);
        DensityKernel::from_fn(
            move |x, xp| {
                let d = x - xp;
                norm * (-(x * x + xp * xp) * inv4s2 - d * d * inv4m2).exp()
            },
            sigma,
            false,
        )
    }
}

/// Pure Gaussian wave function (2 pi sigma^2)^(-1/4) exp(-x^2/(4 sigma^2))
/// whose position spread is `sigma`.
pub fn gaussian_wavefunction(sigma: f64) -> Result<WaveFunction, StateError> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(StateError::InvalidParameter {
            name: "sigma",
            value: sigma,
            reason: "must be finite and positive",
        });
    }
    let norm = (2.0 * PI * sigma * sigma).powf(-0.25);
    let inv4s2 = 1.0 / (4.0 * sigma * sigma);
    Ok(WaveFunction::new(
        move |x| norm * (-x * x * inv4s2).exp(),
        sigma,
        format!("squeezed({sigma})"),
    ))
}

/// Orthonormal Hermite function h_n(y) = (2^n n! sqrt(pi))^(-1/2)
/// H_n(y) exp(-y^2/2), evaluated by the normalized three-term recurrence.
/// The recurrence keeps every intermediate at unit L2 scale, so it neither
/// overflows nor loses accuracy at large n the way raw H_n does.
fn hermite_function(n: u32, y: f64) -> f64 {
    let mut h_prev = 0.0;
    let mut h = PI.powf(-0.25) * (-0.5 * y * y).exp();
    for k in 0..n {
        let kf = k as f64;
        let next = y * (2.0 / (kf + 1.0)).sqrt() * h - (kf / (kf + 1.0)).sqrt() * h_prev;
        h_prev = h;
        h = next;
    }
    h
}

/// Number eigenstate wave function psi_n(x) = 2^(1/4) h_n(sqrt(2) x), the
/// unit-normalized oscillator mode with position variance (2n + 1)/4.
pub fn fock_wavefunction(n: FockIndex) -> WaveFunction {
    let scale = ((n as f64) + 1.0).sqrt();
    WaveFunction::new(
        move |x| 2f64.powf(0.25) * hermite_function(n, std::f64::consts::SQRT_2 * x),
        scale,
        format!("fock({n})"),
    )
}

/// Rank-one kernel psi(x) psi(x') of a pure state.
pub fn pure_kernel(psi: &WaveFunction) -> DensityKernel {
    let psi = psi.clone();
    let scale = psi.scale_hint;
    DensityKernel::from_fn(move |x, xp| psi.eval(x) * psi.eval(xp), scale, true)
}

/// Position variance of the diagonal distribution rho(x, x), normalized by
/// the trace so unnormalized kernels are handled too.
pub fn kernel_variance(
    kernel: &DensityKernel,
    config: &IntegrationConfig,
) -> Result<f64, QuadError> {
    let cfg = config.covering(kernel.scale_hint);
    let m0 = numquad::integrate_1d(|x| kernel.eval(x, x), &cfg)?.value;
    let m1 = numquad::integrate_1d(|x| x * kernel.eval(x, x), &cfg)?.value;
    let m2 = numquad::integrate_1d(|x| x * x * kernel.eval(x, x), &cfg)?.value;
    let mean = m1 / m0;
    Ok(m2 / m0 - mean * mean)
}

/// Purity tr(rho^2) = integral of rho(x, x') rho(x', x), normalized by the
/// squared trace.
pub fn kernel_purity(kernel: &DensityKernel, config: &IntegrationConfig) -> Result<f64, QuadError> {
    let cfg = config.covering(kernel.scale_hint);
    let trace = numquad::integrate_1d(|x| kernel.eval(x, x), &cfg)?.value;
    let overlap =
        numquad::integrate_2d(|x, xp| kernel.eval(x, xp) * kernel.eval(xp, x), &cfg)?.value;
    Ok(overlap / (trace * trace))
}

/// Parsed form of the state mini-language:
///
/// * `gaussian:sigma=<f>,mu=<f|inf>` Gaussian Schell-model kernel
/// * `thermal:nbar=<f>` thermal state
/// * `fock:n=<int>` number eigenstate
/// * `vacuum` ground mode
/// * `squeezed:dx=<f>` pure Gaussian with position spread dx
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Gaussian { sigma: f64, mu: f64 },
    Thermal { n_bar: f64 },
    Fock { n: FockIndex },
    Vacuum,
    Squeezed { dx: f64 },
}

impl StateSpec {
    /// Density kernel of the state.
    pub fn kernel(&self) -> Result<DensityKernel, StateError> {
        match *self {
            StateSpec::Gaussian { sigma, mu } => Ok(gaussian_schell_kernel(
                &GaussianSchellParams::new(sigma, mu)?,
            )),
            StateSpec::Thermal { n_bar } => Ok(gaussian_schell_kernel(&thermal_params(n_bar)?)),
            StateSpec::Fock { n } => Ok(pure_kernel(&fock_wavefunction(n))),
            StateSpec::Vacuum => Ok(pure_kernel(&fock_wavefunction(0))),
            StateSpec::Squeezed { dx } => Ok(pure_kernel(&gaussian_wavefunction(dx)?)),
        }
    }

    /// Wave function when the state is pure, None for proper mixtures.
    pub fn wave_function(&self) -> Result<Option<WaveFunction>, StateError> {
        match *self {
            StateSpec::Gaussian { sigma, mu } => {
                let p = GaussianSchellParams::new(sigma, mu)?;
                if p.is_pure() {
                    Ok(Some(gaussian_wavefunction(sigma)?))
                } else {
                    Ok(None)
                }
            }
            StateSpec::Thermal { n_bar } => {
                let p = thermal_params(n_bar)?;
                if p.is_pure() {
                    Ok(Some(gaussian_wavefunction(p.sigma())?))
                } else {
                    Ok(None)
                }
            }
            StateSpec::Fock { n } => Ok(Some(fock_wavefunction(n))),
            StateSpec::Vacuum => Ok(Some(fock_wavefunction(0))),
            StateSpec::Squeezed { dx } => Ok(Some(gaussian_wavefunction(dx)?)),
        }
    }

    /// Schell-model parameters when the state is of Gaussian Schell form,
    /// None otherwise (number states with n >= 1).
    pub fn gaussian_schell(&self) -> Result<Option<GaussianSchellParams>, StateError> {
        match *self {
            StateSpec::Gaussian { sigma, mu } => Ok(Some(GaussianSchellParams::new(sigma, mu)?)),
            StateSpec::Thermal { n_bar } => Ok(Some(thermal_params(n_bar)?)),
            StateSpec::Fock { n: 0 } | StateSpec::Vacuum => {
                Ok(Some(GaussianSchellParams::pure(0.5)?))
            }
            StateSpec::Fock { .. } => Ok(None),
            StateSpec::Squeezed { dx } => Ok(Some(GaussianSchellParams::pure(dx)?)),
        }
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            StateSpec::Gaussian { sigma, mu } => write!(f, "gaussian:sigma={sigma},mu={mu}"),
            StateSpec::Thermal { n_bar } => write!(f, "thermal:nbar={n_bar}"),
            StateSpec::Fock { n } => write!(f, "fock:n={n}"),
            StateSpec::Vacuum => write!(f, "vacuum"),
            StateSpec::Squeezed { dx } => write!(f, "squeezed:dx={dx}"),
        }
    }
}

fn parse_fields<'a>(
    family: &'static str,
    rest: &'a str,
    allowed: &[&'static str],
) -> Result<Vec<(&'static str, &'a str)>, SpecParseError> {
    let mut out: Vec<(&'static str, &str)> = Vec::new();
    for part in rest.split(',') {
        let (key, value) =
            part.split_once('=')
                .ok_or_else(|| SpecParseError::MalformedParameter {
                    part: part.to_string(),
                })?;
        let key = key.trim();
        let value = value.trim();
        let canon =
            allowed
                .iter()
                .find(|a| **a == key)
                .ok_or_else(|| SpecParseError::UnknownField {
                    family,
                    field: key.to_string(),
                })?;
        if out.iter().any(|(k, _)| k == canon) {
            return Err(SpecParseError::DuplicateField {
                field: key.to_string(),
            });
        }
        out.push((canon, value));
    }
    Ok(out)
}

fn take_field<'a>(
    fields: &[(&'static str, &'a str)],
    family: &'static str,
    field: &'static str,
) -> Result<&'a str, SpecParseError> {
    fields
        .iter()
        .find(|(k, _)| *k == field)
        .map(|(_, v)| *v)
        .ok_or(SpecParseError::MissingField { family, field })
}

fn parse_float(
    field: &'static str,
    raw: &str,
    valid: impl Fn(f64) -> bool,
    hint: &str,
) -> Result<f64, SpecParseError> {
    let invalid = || SpecParseError::InvalidValue {
        field,
        value: raw.to_string(),
        hint: if hint.is_empty() {
            String::new()
        } else {
            format!(" ({hint})")
        },
    };
    let v: f64 = raw.parse().map_err(|_| invalid())?;
    if !valid(v) {
        return Err(invalid());
    }
    Ok(v)
}

impl FromStr for StateSpec {
    type Err = SpecParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (family, rest) = match s.split_once(':') {
            Some((f, r)) => (f.trim(), Some(r)),
            None => (s, None),
        };
        match family {
            "vacuum" => match rest {
                None => Ok(StateSpec::Vacuum),
                Some(_) => Err(SpecParseError::UnexpectedParameters { family: "vacuum" }),
            },
            "gaussian" => {
                let rest = rest.ok_or(SpecParseError::MissingField {
                    family: "gaussian",
                    field: "sigma",
                })?;
                let fields = parse_fields("gaussian", rest, &["sigma", "mu"])?;
                let sigma = parse_float(
                    "sigma",
                    take_field(&fields, "gaussian", "sigma")?,
                    |v| v.is_finite() && v > 0.0,
                    "expected a finite positive number",
                )?;
                let mu = parse_float(
                    "mu",
                    take_field(&fields, "gaussian", "mu")?,
                    |v| v > 0.0,
                    "expected a positive number or inf",
                )?;
                Ok(StateSpec::Gaussian { sigma, mu })
            }
            "thermal" => {
                let rest = rest.ok_or(SpecParseError::MissingField {
                    family: "thermal",
                    field: "nbar",
                })?;
                let fields = parse_fields("thermal", rest, &["nbar"])?;
                let n_bar = parse_float(
                    "nbar",
                    take_field(&fields, "thermal", "nbar")?,
                    |v| v.is_finite() && v >= 0.0,
                    "expected a finite non-negative number",
                )?;
                Ok(StateSpec::Thermal { n_bar })
            }
            "squeezed" => {
                let rest = rest.ok_or(SpecParseError::MissingField {
                    family: "squeezed",
                    field: "dx",
                })?;
                let fields = parse_fields("squeezed", rest, &["dx"])?;
                let dx = parse_float(
                    "dx",
                    take_field(&fields, "squeezed", "dx")?,
                    |v| v.is_finite() && v > 0.0,
                    "expected a finite positive number",
                )?;
                Ok(StateSpec::Squeezed { dx })
            }
            "fock" => {
                let rest = rest.ok_or(SpecParseError::MissingField {
                    family: "fock",
                    field: "n",
                })?;
                let fields = parse_fields("fock", rest, &["n"])?;
                let raw = take_field(&fields, "fock", "n")?;
                let n: u32 = raw.parse().map_err(|_| SpecParseError::InvalidValue {
                    field: "n",
                    value: raw.to_string(),
                    hint: " (expected a non-negative integer)".to_string(),
                })?;
                Ok(StateSpec::Fock { n })
            }
            other => Err(SpecParseError::UnknownFamily {
                family: other.to_string(),
            }),
        }
    }
}
