//! Non-Hermitian two-level dynamics near diabolic and exceptional points.
//!
//! Closed-form eigensystems, complex Bloch-sphere evolution, complex
//! geometric phases, fictitious monopole fields and the driven dissipative
//! atom, each checked against an independent numerical integrator.

pub mod atom;
pub mod calg;
pub mod cli;
pub mod error;
pub mod evolve;
pub mod gphase;
pub mod monopole;
pub mod ham2;
pub mod quad;
pub mod real;

pub use error::{Error, Result};
pub use real::Real;

pub type Complex64 = num_complex::Complex<f64>;
pub type Triple = calg::ComplexTriple<f64>;
pub type Mat2 = calg::ComplexMat2<f64>;
pub type Hamiltonian = ham2::Hamiltonian2<f64>;
pub type EigenSystem = ham2::EigenSystem2<f64>;
