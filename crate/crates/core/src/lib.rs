//! Shortest-path time-slicing approximation of the free Schrödinger
//! propagator `e^{itΔ/2}` on the unit sphere.
//!
//! The one-slice operator `U_χ(t)` integrates the semiclassical kernel
//! `χ(d) √V e^{iS + it/6}` along shortest geodesics. Because that kernel is
//! zonal it is diagonal in the spherical-harmonic basis, so every
//! convergence statement about `{U_χ(t/N)}^N` reduces to scalar
//! eigenvalues `α_l(t)` computed by one-dimensional oscillatory
//! quadrature. A direct two-dimensional grid application of the kernel is
//! kept alongside as an independent oracle.
//!
//! Module map:
//!
//! - [`geometry`]: geodesic distance, action, Van Vleck determinant, kernel
//!   and PDE-residual identities, with finite-difference verifiers.
//! - [`bump`]: the smooth cutoff `χ`.
//! - [`quadrature`]: composite Gauss–Legendre rules with oscillation-aware
//!   panel selection.
//! - [`spectral`]: orthonormal harmonics, grid transforms, the exact
//!   propagator, spectral projectors and Sobolev norms.
//! - [`propagator`]: eigenvalues of `U_χ`, time-slicing products, error
//!   norms, the error operators and the grid oracle.
//! - [`experiments`]: deterministic desk-scale convergence experiments
//!   emitting [`experiments::ResultTable`]s.
//! - [`cli`]: the `sphere-feynman` command line.

pub mod bump;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod propagator;
pub mod quadrature;
pub mod spectral;

pub use bump::BumpProfile;
pub use error::{Error, Result};
pub use num_complex::Complex64;
