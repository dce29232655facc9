//! Analysis and optimization of heralded non-Gaussian state generators.
//!
//! A generator is a pure multimode Gaussian state whose control modes are
//! measured with photon-number-resolving detectors. This crate computes the
//! control-mode representation and the non-Gaussian control parameters of
//! such generators, simulates their heralded outputs in Fock space, and
//! rewrites them so that fewer photons must be detected and the heralding
//! probability increases while the output state is essentially unchanged.

pub mod acceptance;
pub mod bargmann;
pub mod control;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod maps;
pub mod metrics;
pub mod optimizer;
pub mod reduce;
pub mod scenario;
pub mod solve;
pub mod symplectic;

pub use error::{NgError, Result};
