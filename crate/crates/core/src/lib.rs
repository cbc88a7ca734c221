//! D3Q27 multiple-relaxation-time lattice Boltzmann scheme with fourth-order
//! accurate dissipation, plus the tools to check it: exact moment matrix,
//! parameter closed forms, linear dispersion analysis and small benchmarks.

pub mod bench;
pub mod cli;
pub mod error;
pub mod exact;
pub mod mrt;
pub mod output;
pub mod params;
pub mod spectral;
pub mod stencil;
pub mod verify;

pub use error::{Error, Result};
