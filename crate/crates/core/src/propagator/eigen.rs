//! Eigenvalues of zonal kernel operators by Funk–Hecke reduction.
//!
//! A kernel `k(d(x, y))` acts on degree-`l` harmonics as multiplication by
//! `2π ∫₀^π k(θ) P_l(cos θ) sin θ dθ`. For `U_χ(t)` the kernel is
//! `(1/2πi) χ √(θ/sin θ) (1/t) e^{iθ²/2t + it/6}`, so
//!
//! ```text
//! α_l(t) = e^{it/6}/(it) ∫₀^{r_cut} χ(θ) √(θ sin θ) e^{iθ²/2t} P_l(cos θ) dθ
//! ```

use num_complex::Complex64;
use serde::Serialize;
use std::io::Write;

use crate::bump::BumpProfile;
use crate::error::{Error, Result};
use crate::geometry::SCALAR_CURVATURE;
use crate::quadrature::{choose_panels, integrate_1d, OscillatorySpec, PanelRule};
use crate::spectral::legendre_p;

/// Refinement stops once every eigenvalue moves by less than this.
pub const QUAD_TARGET: f64 = 1e-11;
/// Largest acceptable self-refinement error.
pub const QUAD_LIMIT: f64 = 1e-8;
const MAX_DOUBLINGS: usize = 6;

/// Diagonal of `U_χ(t)` in the harmonic basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceEigenvalues {
    t: f64,
    alpha: Vec<Complex64>,
    quad_error: Vec<f64>,
}

#[derive(Serialize)]
struct EigenRow {
    l: usize,
    re_alpha: f64,
    im_alpha: f64,
    abs_alpha: f64,
    quad_error: f64,
}

impl SliceEigenvalues {
    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn l_max(&self) -> usize {
        self.alpha.len() - 1
    }

    pub fn alpha(&self) -> &[Complex64] {
        &self.alpha
    }

    pub fn get(&self, l: usize) -> Complex64 {
        self.alpha[l]
    }

    /// Per-degree self-refinement estimates `|α_l(2P) − α_l(P)|`.
    pub fn quad_error(&self) -> &[f64] {
        &self.quad_error
    }

    pub fn max_quad_error(&self) -> f64 {
        self.quad_error.iter().copied().fold(0.0, f64::max)
    }

    /// CSV with columns `l, re_alpha, im_alpha, abs_alpha, quad_error`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for (l, (a, e)) in self.alpha.iter().zip(&self.quad_error).enumerate() {
            w.serialize(EigenRow {
                l,
                re_alpha: a.re,
                im_alpha: a.im,
                abs_alpha: a.norm(),
                quad_error: *e,
            })?;
        }
        w.flush()?;
        Ok(())
    }
}

fn prefactor(t: f64) -> Complex64 {
    Complex64::from_polar(1.0, SCALAR_CURVATURE * t / 12.0) / Complex64::new(0.0, t)
}

fn check_t(t: f64) -> Result<()> {
    if t == 0.0 || !t.is_finite() {
        return Err(Error::invalid(
            "t",
            format!("{t} must be finite and non-zero"),
        ));
    }
    Ok(())
}

/// Single eigenvalue `α_l(t)` through the generic 1D integrator.
pub fn eigenvalue(l: usize, t: f64, bump: &BumpProfile) -> Result<Complex64> {
    check_t(t)?;
    let spec = OscillatorySpec::new(t, bump.r_cut())?;
    let mut rule = choose_panels(&spec, l);
    let integrand = |theta: f64| {
        let amp = bump.value(theta) * (theta * theta.sin()).sqrt() * legendre_p(l, theta.cos());
        Complex64::from_polar(amp, theta * theta / (2.0 * t))
    };
    let mut res = integrate_1d(integrand, &rule)?;
    let scale = prefactor(t).norm();
    for _ in 0..MAX_DOUBLINGS {
        if res.error * scale <= QUAD_TARGET {
            break;
        }
        rule = rule.refined(2);
        res = integrate_1d(integrand, &rule)?;
    }
    if res.error * scale > QUAD_LIMIT {
        return Err(Error::QuadratureNotConverged {
            panels: rule.panels() * 2,
            estimate: res.error * scale,
            tolerance: QUAD_LIMIT,
        });
    }
    Ok(prefactor(t) * res.value)
}

/// Eigenvalues `0..=l_max` of the zonal operator whose kernel is
/// `profile(d) · (1/2πi) K(t, d)`.
///
/// All degrees share one quadrature rule, chosen for the highest degree;
/// the Legendre recurrence runs once per node.
pub fn zonal_eigenvalues(
    l_max: usize,
    t: f64,
    bump: &BumpProfile,
    profile: impl Fn(f64) -> Complex64,
) -> Result<(Vec<Complex64>, Vec<f64>)> {
    check_t(t)?;
    let spec = OscillatorySpec::new(t, bump.r_cut())?;
    let mut rule = choose_panels(&spec, l_max);
    let pre = prefactor(t);
    let mut coarse = sweep(l_max, t, &rule, &profile)?;
    let mut fine = sweep(l_max, t, &rule.refined(2), &profile)?;
    let err_of = |c: &[Complex64], f: &[Complex64]| -> Vec<f64> {
        c.iter()
            .zip(f)
            .map(|(a, b)| (a - b).norm() * pre.norm())
            .collect()
    };
    let mut errors = err_of(&coarse, &fine);
    for _ in 0..MAX_DOUBLINGS {
        if errors.iter().all(|&e| e <= QUAD_TARGET) {
            break;
        }
        rule = rule.refined(2);
        coarse = fine;
        fine = sweep(l_max, t, &rule.refined(2), &profile)?;
        errors = err_of(&coarse, &fine);
    }
    let worst = errors.iter().copied().fold(0.0, f64::max);
    if worst > QUAD_LIMIT {
        return Err(Error::QuadratureNotConverged {
            panels: rule.panels() * 2,
            estimate: worst,
            tolerance: QUAD_LIMIT,
        });
    }
    Ok((fine.into_iter().map(|v| v * pre).collect(), errors))
}

fn sweep(
    l_max: usize,
    t: f64,
    rule: &PanelRule,
    profile: &impl Fn(f64) -> Complex64,
) -> Result<Vec<Complex64>> {
    let mut acc = vec![Complex64::new(0.0, 0.0); l_max + 1];
    for (theta, w) in rule.nodes() {
        let p = profile(theta);
        if p == Complex64::new(0.0, 0.0) {
            continue;
        }
        let g =
            p * Complex64::from_polar(w * (theta * theta.sin()).sqrt(), theta * theta / (2.0 * t));
        if !(g.re.is_finite() && g.im.is_finite()) {
            return Err(Error::NonFiniteIntegrand {
                at: theta,
                value: g.to_string(),
            });
        }
        let x = theta.cos();
        let (mut p0, mut p1) = (1.0, x);
        acc[0] += g;
        if l_max >= 1 {
            acc[1] += g * x;
        }
        for l in 1..l_max {
            let lf = l as f64;
            let p2 = ((2.0 * lf + 1.0) * x * p1 - lf * p0) / (lf + 1.0);
            p0 = p1;
            p1 = p2;
            acc[l + 1] += g * p2;
        }
    }
    Ok(acc)
}

/// `α_l(t)` for `0 ≤ l ≤ l_max`.
pub fn slice_eigenvalues(t: f64, l_max: usize, bump: &BumpProfile) -> Result<SliceEigenvalues> {
    let (alpha, quad_error) = zonal_eigenvalues(l_max, t, bump, |theta| {
        Complex64::new(bump.value(theta), 0.0)
    })?;
    Ok(SliceEigenvalues {
        t,
        alpha,
        quad_error,
    })
}
