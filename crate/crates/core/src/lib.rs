//! Three-dimensional pilot-wave hydrodynamics over variable bottom topography.
//!
//! The free surface elevation and surface velocity potential are evolved in
//! Fourier space; the vertical velocity at the surface is closed with a
//! Dirichlet-to-Neumann operator that accounts for the bathymetry through a
//! Galerkin system for topographic correction coefficients. A walking droplet
//! is coupled to the wave field during the first quarter of each Faraday
//! period.
//!
//! Length is measured in Faraday wavelengths, time in Faraday periods and the
//! bath depth in units of the reference depth `h`.

pub mod cli;
pub mod dtn;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod io;
pub mod params;
pub mod spectral;
pub mod topography;

pub use error::{Error, Result};
