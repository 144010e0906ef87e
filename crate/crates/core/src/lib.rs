//! Spectral simulation and verification toolkit for the 1D periodic cubic
//! half-wave equation `(i∂_t - |D|) u = |u|²u` and the cubic Szegő equation
//! `i∂_t V = P_{≥0}(|V|²V)`.

pub mod analysis;
pub mod error;
pub mod evolve;
pub mod experiments;
pub mod quadrature;
pub mod series;
pub mod spectral;
pub mod szego;
pub mod verify;

pub use error::{Error, Result};
pub use series::NormSeries;
pub use spectral::{SobolevIndex, SpectralField};
pub use szego::{FamilyBranch, SzegoParams};
