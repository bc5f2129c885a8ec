//! Spectral vanishing viscosity simulation of the 2D incompressible Euler
//! equations on the unit torus, Monte-Carlo ensembles of such runs, and the
//! structure-function / spectrum diagnostics used to judge energy
//! conservation in the zero-viscosity limit.

pub mod diagnostics;
pub mod ensemble;
pub mod error;
pub mod initial;
pub mod solver;
pub mod spectral;
pub mod theory;

pub use error::{DiagnosticsError, FieldError, InitialDataError, SolverError, TheoryError};
pub use solver::{MultiplierMode, SolverConfig, SvOperator, Trajectory};
pub use spectral::{GridSpec, SpectralField};
