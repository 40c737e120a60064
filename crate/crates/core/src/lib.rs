//! Twin-Fock squeezed states through a quadrature-rotation mode converter.
//!
//! The pipeline: build the truncated two-mode squeezed input
//! ([`fockspace`]), rotate it with the exact unitary or the closed-form
//! coefficients ([`modeconverter`]), synthesize quadrature-space fields
//! ([`quadfield`]), count phase singularities ([`vortexdetect`]) and write
//! everything to disk ([`exportio`]). [`cli`] wires it into the
//! `quadvortex` binary.

pub mod cli;
pub mod error;
pub mod exportio;
pub mod fockspace;
pub mod modeconverter;
pub mod quadfield;
pub mod specfun;
pub mod vortexdetect;

pub use error::{Error, Result};
