//! Direct two-dimensional quadrature of zonal kernels on a [`SphereGrid`].
//!
//! On a Gauss–Legendre × uniform-φ grid the distance between two nodes
//! depends only on their rings and their φ-offset, so the kernel is
//! tabulated once per ring pair and applied as a cyclic sum in φ. The sum
//! itself is the plain node-by-node quadrature.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::sync::Arc;

use crate::bump::BumpProfile;
use crate::error::{Error, Result};
use crate::geometry::{corrected_residual_bracket, d_over_sin, SCALAR_CURVATURE};
use crate::spectral::{GridFunction, SphereGrid};

/// Rejects grids whose node spacing cannot follow the phase `d²/2t` out to
/// the cutoff radius.
pub fn check_resolution(grid: &SphereGrid, t: f64, bump: &BumpProfile) -> Result<()> {
    if t == 0.0 || !t.is_finite() {
        return Err(Error::invalid(
            "t",
            format!("{t} must be finite and non-zero"),
        ));
    }
    let need = bump.r_cut() / t.abs();
    if (grid.n_theta() as f64) < need || (grid.n_phi() as f64) < 2.0 * need {
        return Err(Error::GridTooCoarse {
            n_theta: grid.n_theta(),
            n_phi: grid.n_phi(),
            reason: format!("phase gradient r_cut/|t| = {need:.1} needs n_theta ≥ {need:.1} and n_phi ≥ twice that"),
        });
    }
    Ok(())
}

/// Applies the kernel `(1/2πi t) m(d) √(d/sin d) e^{id²/2t + it/6}` to every
/// function in `fs`. `m` must vanish beyond the bump's cutoff.
pub fn apply_zonal(
    fs: &[&GridFunction],
    t: f64,
    bump: &BumpProfile,
    m: impl Fn(f64) -> Complex64 + Sync,
) -> Result<Vec<GridFunction>> {
    let Some(first) = fs.first() else {
        return Ok(Vec::new());
    };
    let grid = first.grid().clone();
    if fs
        .iter()
        .any(|f| !Arc::ptr_eq(f.grid(), &grid) && **f.grid() != *grid)
    {
        return Err(Error::invalid("fs", "functions live on different grids"));
    }
    check_resolution(&grid, t, bump)?;
    let (nt, np) = (grid.n_theta(), grid.n_phi());
    let table = kernel_table(&grid, t, bump, &m);

    // weighted inputs g = f · w, laid out ring by ring
    let wphi = grid.phi_weight();
    let weighted: Vec<Vec<Complex64>> = fs
        .iter()
        .map(|f| {
            f.values()
                .iter()
                .enumerate()
                .map(|(k, v)| v * grid.theta_weights()[k / np] * wphi)
                .collect()
        })
        .collect();

    let rings: Vec<Vec<Vec<Complex64>>> = (0..nt)
        .into_par_iter()
        .map(|i| {
            let mut out = vec![vec![Complex64::new(0.0, 0.0); np]; fs.len()];
            for ip in 0..nt {
                let row = &table[(i * nt + ip) * 2 * np..(i * nt + ip + 1) * 2 * np];
                if row.iter().all(|k| *k == Complex64::new(0.0, 0.0)) {
                    continue;
                }
                for (g, o) in weighted.iter().zip(out.iter_mut()) {
                    let src = &g[ip * np..(ip + 1) * np];
                    for (j, oj) in o.iter_mut().enumerate() {
                        // row[j − j' + np] = K(Δφ = j − j')
                        let kr = &row[j + 1..j + 1 + np];
                        let mut acc = Complex64::new(0.0, 0.0);
                        for (kv, sv) in kr.iter().rev().zip(src) {
                            acc += kv * sv;
                        }
                        *oj += acc;
                    }
                }
            }
            out
        })
        .collect();

    (0..fs.len())
        .map(|q| {
            let values = rings.iter().flat_map(|r| r[q].iter().copied()).collect();
            GridFunction::new(grid.clone(), values)
        })
        .collect()
}

// table[(i·nt + i')·2np + r] = kernel between ring i, φ = 0 and ring i',
// φ-offset (r − np) mod np
fn kernel_table(
    grid: &SphereGrid,
    t: f64,
    bump: &BumpProfile,
    m: &(impl Fn(f64) -> Complex64 + Sync),
) -> Vec<Complex64> {
    let (nt, np) = (grid.n_theta(), grid.n_phi());
    let pre = Complex64::new(0.0, 2.0 * PI * t).inv();
    let curv = SCALAR_CURVATURE * t / 12.0;
    let (ct, st) = (grid.cos_theta(), grid.sin_theta());
    let half_sin: Vec<f64> = (0..np).map(|r| (PI * r as f64 / np as f64).sin()).collect();
    (0..nt * nt)
        .into_par_iter()
        .flat_map_iter(|pair| {
            let (i, ip) = (pair / nt, pair % nt);
            let base: Vec<Complex64> = (0..np)
                .map(|r| {
                    // chord² as a sum of non-negative terms keeps small d accurate
                    let dc = ct[i] - ct[ip];
                    let ds = st[i] - st[ip];
                    let chord2 =
                        dc * dc + ds * ds + 4.0 * st[i] * st[ip] * half_sin[r] * half_sin[r];
                    let d = 2.0 * (0.5 * chord2.sqrt()).min(1.0).asin();
                    if d >= bump.r_cut() {
                        return Complex64::new(0.0, 0.0);
                    }
                    let mult = m(d);
                    if mult == Complex64::new(0.0, 0.0) {
                        return mult;
                    }
                    mult * pre
                        * Complex64::from_polar(d_over_sin(d).sqrt(), d * d / (2.0 * t) + curv)
                })
                .collect();
            let ext: Vec<Complex64> = (0..2 * np).map(|r| base[r % np]).collect();
            ext
        })
        .collect()
}

/// `U_χ(t) f` by direct quadrature.
pub fn apply_grid(f: &GridFunction, t: f64, bump: &BumpProfile) -> Result<GridFunction> {
    Ok(apply_grid_batch(&[f], t, bump)?.pop().expect("one output"))
}

/// [`apply_grid`] for several functions on one grid, sharing the kernel table.
pub fn apply_grid_batch(
    fs: &[&GridFunction],
    t: f64,
    bump: &BumpProfile,
) -> Result<Vec<GridFunction>> {
    apply_zonal(fs, t, bump, |d| Complex64::new(bump.value(d), 0.0))
}

/// Multiplier of `E_χ1`, the part of the residual that survives where the
/// bump is flat.
pub fn error_multiplier_1(bump: &BumpProfile, d: f64) -> f64 {
    let [chi, dchi, _] = bump.eval(d);
    let mut m = chi * corrected_residual_bracket(d) + 0.5 * bump.laplacian(d);
    if dchi != 0.0 {
        m += dchi * (d.sin() - d * d.cos()) / (2.0 * d * d.sin());
    }
    m
}

/// Multiplier of `E_χ2`, written as `(χ'/d)(i d²/t)`.
pub fn error_multiplier_2(bump: &BumpProfile, d: f64, t: f64) -> Complex64 {
    let dchi = bump.deriv(d);
    if dchi == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::new(0.0, (dchi / d) * d * d / t)
}

/// `(E_χ1(t) f, E_χ2(t) f)` by the same quadrature as [`apply_grid`].
pub fn error_operators(
    f: &GridFunction,
    t: f64,
    bump: &BumpProfile,
) -> Result<(GridFunction, GridFunction)> {
    let e1 = apply_zonal(&[f], t, bump, |d| {
        Complex64::new(error_multiplier_1(bump, d), 0.0)
    })?;
    let e2 = apply_zonal(&[f], t, bump, |d| error_multiplier_2(bump, d, t))?;
    Ok((
        e1.into_iter().next().unwrap(),
        e2.into_iter().next().unwrap(),
    ))
}
