//! The one-slice operator `U_χ(t)`, its sliced products and error norms.

mod eigen;
mod grid_apply;
mod slicing;

pub use eigen::{
    eigenvalue, slice_eigenvalues, zonal_eigenvalues, SliceEigenvalues, QUAD_LIMIT, QUAD_TARGET,
};
pub use grid_apply::{
    apply_grid, apply_grid_batch, apply_zonal, check_resolution, error_multiplier_1,
    error_multiplier_2, error_operators,
};
pub use slicing::{
    apply_spectral, error_norm, error_norm_with_quad, slicing_error, time_slice, SliceConfig,
    SliceMultipliers,
};
