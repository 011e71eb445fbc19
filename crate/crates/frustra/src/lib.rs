//! Mean-field ground states, Gaussian fluctuations and critical scaling of a
//! ring of Dicke models coupled by photon hopping, in the limit of many atoms
//! per site.
//!
//! Energies of the mean-field landscape are dimensionless (per N_a Ω);
//! excitation energies carry the units of the frequencies in [`ModelParams`].

pub mod error;
pub mod io;
mod linalg;
pub mod model;
pub mod scaling;
pub mod solver;
pub mod spectra;

pub use error::{Error, Result};
pub use model::{HoppingSign, MeanFieldConfiguration, ModelParams};
pub use solver::{GroundStateSolution, Phase, SeedMode, SolverOptions};
