//! Quadrature-basis coherence of single-mode bosonic states.
//!
//! The library works directly with position-representation density kernels
//! rho(x, x') and measures coherence with respect to the continuous position
//! basis: the l1 measure integrates |rho(x, x')| over the plane, and the
//! relative-entropy measure compares the state's entropy with that of its
//! position distribution. On top of that sit the beam-splitter conditioning
//! map (mix the state with an ancilla, measure position on the reflected
//! port, keep the transmitted conditional state) and closed-form laws for
//! Gaussian Schell-model states that the numerics are checked against.
//!
//! Modules, bottom up:
//!
//! * [`numquad`]: adaptive Gauss-Legendre panel integration in 1D and 2D.
//! * [`states`]: density kernels, wave functions, and the state
//!   mini-language (`gaussian:`, `thermal:`, `fock:`, `vacuum`, `squeezed:`).
//! * [`coherence`]: l1 and relative-entropy coherence functionals.
//! * [`conditioning`]: beam-splitter conditioning, outcome averages, and
//!   the measurement-averaged reduced state.
//! * [`analytic`]: closed forms for Gaussian Schell-model states and the
//!   beam-splitter input-output law.
//! * [`verify`]: numeric-versus-closed-form cross checks with pass/fail
//!   reports.

pub mod analytic;
pub mod coherence;
pub mod conditioning;
pub mod numquad;
pub mod states;
pub mod verify;

pub use coherence::CoherenceValue;
pub use conditioning::BeamSplitter;
pub use numquad::{IntegrationConfig, QuadError, QuadResult};
pub use states::{DensityKernel, StateSpec, WaveFunction};
