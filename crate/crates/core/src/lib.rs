//! Globally divergence-free discontinuous Galerkin solver for two-dimensional
//! ideal MHD on uniform Cartesian grids.
//!
//! Hydrodynamic variables and `B_z` live in a modal `Q_k` basis inside each
//! cell. The in-plane magnetic field is stored as normal-component
//! polynomials on faces plus a few interior moments, and a Raviart-Thomas
//! reconstruction turns those into a cell polynomial whose divergence is
//! exactly zero. Face unknowns are advanced with vertex electric fields from
//! a multidimensional Riemann solver, so the divergence stays at round-off
//! level for the whole run.
//!
//! The crate is organised bottom-up:
//!
//! * [`basis`]: Legendre-type modal basis, quadrature, differentiation
//! * [`physics`]: ideal MHD state algebra and eigenvectors
//! * [`rt_field`]: face/moment storage and the RT reconstruction
//! * [`riemann`]: LxF, HLL and HLLC solvers, 1-D and vertex versions
//! * [`grid`]: the mesh and its boundary-aware topology
//! * [`dg`]: semi-discrete residual assembly
//! * [`limiters`]: characteristic TVD chain, divergence-free repair, positivity
//! * [`time_integrator`]: SSP Runge-Kutta stepping and the run loop
//! * [`problems`]: benchmark initial data
//! * [`diagnostics`]: divergence norms, totals, convergence tables
//! * [`app`]: run specification, config parsing, output writers and CLI

pub mod app;
pub mod basis;
pub mod dg;
pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod limiters;
pub mod physics;
pub mod problems;
pub mod riemann;
pub mod rt_field;
pub mod time_integrator;

pub use error::{MhdError, Result};
