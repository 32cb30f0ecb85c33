//! Spherical-harmonic representation of functions on the unit sphere.
//!
//! Transforms are direct (`O(L³)`): a discrete Fourier sum in `φ` on each
//! latitude ring followed by Gauss–Legendre projection in `cos θ`.

mod grid;
mod harmonics;
mod state;

use num_complex::Complex64;
use std::sync::Arc;

pub use grid::{GridFunction, SphereGrid};
pub use harmonics::{legendre_p, legendre_p_all, normalized_assoc_legendre, sph_harm, tri_index};
pub use state::{
    coeff_index, exact_propagator, in_projector, laplace_eigenvalue, projector,
    propagator_multiplier, sobolev_norm, SpectralState,
};

use crate::error::Result;
use harmonics::order_sign;

/// Coefficients up to degree `l_max` of the sampled function.
///
/// Exact for functions of band limit `l_max` when the grid satisfies
/// `n_theta ≥ l_max + 1` and `n_phi ≥ 2 l_max + 1`; coarser grids are
/// rejected.
pub fn analyze(f: &GridFunction, l_max: usize) -> Result<SpectralState> {
    let grid = f.grid();
    grid.check_band_limit(l_max)?;
    let (n_theta, n_phi) = (grid.n_theta(), grid.n_phi());
    let width = 2 * l_max + 1;
    let twiddles = ring_twiddles(grid, l_max, -1.0);
    let mut out = SpectralState::zeros(l_max);
    let mut ring = vec![Complex64::new(0.0, 0.0); width];
    for i in 0..n_theta {
        let row = &f.values()[i * n_phi..(i + 1) * n_phi];
        // ring[m + l_max] = Σ_j f_ij e^{−imφ_j} Δφ
        for (slot, tw) in ring.iter_mut().zip(twiddles.chunks(n_phi)) {
            *slot = row.iter().zip(tw).map(|(v, e)| v * e).sum::<Complex64>() * grid.phi_weight();
        }
        let p = normalized_assoc_legendre(l_max, grid.cos_theta()[i], grid.sin_theta()[i]);
        let w = grid.theta_weights()[i];
        for l in 0..=l_max {
            for m in -(l as i64)..=l as i64 {
                let pl = order_sign(m) * p[tri_index(l, m.unsigned_abs() as usize)];
                let idx = coeff_index(l, m);
                let add = ring[(m + l_max as i64) as usize] * (w * pl);
                let cur = out.coeffs()[idx];
                out.set(l, m, cur + add);
            }
        }
    }
    Ok(out)
}

/// Samples `Σ a_{l,m} Y_{l,m}` at the grid nodes.
pub fn synthesize(s: &SpectralState, grid: &Arc<SphereGrid>) -> GridFunction {
    let l_max = s.l_max();
    let (n_theta, n_phi) = (grid.n_theta(), grid.n_phi());
    let width = 2 * l_max + 1;
    let twiddles = ring_twiddles(grid, l_max, 1.0);
    let mut values = Vec::with_capacity(grid.len());
    let mut ring = vec![Complex64::new(0.0, 0.0); width];
    for i in 0..n_theta {
        let p = normalized_assoc_legendre(l_max, grid.cos_theta()[i], grid.sin_theta()[i]);
        ring.iter_mut().for_each(|r| *r = Complex64::new(0.0, 0.0));
        for (l, m, c) in s.iter() {
            let pl = order_sign(m) * p[tri_index(l, m.unsigned_abs() as usize)];
            ring[(m + l_max as i64) as usize] += c * pl;
        }
        for j in 0..n_phi {
            let v = ring
                .iter()
                .enumerate()
                .map(|(mi, r)| r * twiddles[mi * n_phi + j])
                .sum();
            values.push(v);
        }
    }
    GridFunction::new(Arc::clone(grid), values).expect("length matches grid")
}

// e^{sign·i m φ_j} for m = −l_max..=l_max, laid out [m][j].
fn ring_twiddles(grid: &SphereGrid, l_max: usize, sign: f64) -> Vec<Complex64> {
    let mut tw = Vec::with_capacity((2 * l_max + 1) * grid.n_phi());
    for m in -(l_max as i64)..=l_max as i64 {
        for (j, _) in grid.phi().iter().enumerate() {
            // reduce m·j mod n_phi first so the angle stays exact
            let k = (m * j as i64).rem_euclid(grid.n_phi() as i64);
            let angle = sign * 2.0 * std::f64::consts::PI * k as f64 / grid.n_phi() as f64;
            tw.push(Complex64::from_polar(1.0, angle));
        }
    }
    tw
}
