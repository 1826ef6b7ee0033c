//! Asymptotic-preserving micro–macro solver for the scaled Lévy–Fokker–Planck
//! equation in one space and one velocity dimension, with exact Fourier-space
//! reference solutions and a verification harness.

pub mod coupling;
pub mod equilibrium;
pub mod error;
pub mod fracops;
pub mod grid;
pub mod harness;
pub mod metrics;
pub mod oracle;
pub mod order;
pub mod quad;
pub mod scheme;

pub use error::{Error, Result};
pub use grid::{GridSpec, SpectralField, VelocityRep};
pub use order::FracOrder;
