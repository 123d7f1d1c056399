//! Classical Monte Carlo model of heralded photon-added coherent states.
//!
//! The pipeline draws classical signal and idler amplitudes, mixes them with
//! a two-mode Bogoliubov transform, post-selects on an idler threshold
//! crossing, measures phase-swept homodyne quadratures, reconstructs a
//! truncated Fock-basis density matrix with pattern functions, and evaluates
//! its Wigner function.

pub mod empirics;
pub mod error;
pub mod model;
pub mod rng;
pub mod runner;
pub mod special;
pub mod tomography;
pub mod wigner;

pub use error::{Error, Result};
