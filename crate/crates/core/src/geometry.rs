//! Closed-form geometry and kernel quantities on the unit sphere.
//!
//! For points at geodesic distance `d` the shortest-path action is
//! `S = d²/2t`, the Van Vleck determinant is `V = d/(t² sin d)`, and the
//! semiclassical kernel with the curvature phase is
//!
//! ```text
//! K(t, d) = (1/t) √(d / sin d) · exp(i d²/2t + i t/6)
//! ```
//!
//! Everything here is a pure function of its arguments. The numeric
//! verifiers (`van_vleck_numeric`, `pde_residual_numeric`) only touch the
//! action and the kernel through their defining formulas, never through
//! the closed-form results they are checked against.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Scalar curvature of the unit sphere.
pub const SCALAR_CURVATURE: f64 = 2.0;

/// Default exclusion radius around the antipode.
pub const DEFAULT_POLE_TOLERANCE: f64 = 1e-6;

// Below this distance the ratio functions switch to their Taylor series.
const SERIES_CUTOFF: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    /// Builds a point, rejecting vectors whose norm is not 1 within `1e-12`.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let n2 = x * x + y * y + z * z;
        if n2.is_nan() || (n2 - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("point", format!("|p|² = {n2} is not 1")));
        }
        Ok(Self { x, y, z })
    }

    /// Polar angle `theta` from the +z axis, azimuth `phi` from +x.
    pub fn from_spherical(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self {
            x: st * cp,
            y: st * sp,
            z: ct,
        }
    }

    pub fn north_pole() -> Self {
        Self {
            x: 0.0,
            y: 0.0,
            z: 1.0,
        }
    }

    pub fn dot(&self, other: &Point3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    fn cross_norm(&self, other: &Point3) -> f64 {
        let cx = self.y * other.z - self.z * other.y;
        let cy = self.z * other.x - self.x * other.z;
        let cz = self.x * other.y - self.y * other.x;
        (cx * cx + cy * cy + cz * cz).sqrt()
    }
}

/// `arccos(p · q)` with the inner product clamped to `[-1, 1]`.
pub fn geodesic_distance(p: &Point3, q: &Point3) -> f64 {
    p.dot(q).clamp(-1.0, 1.0).acos()
}

/// Same quantity as [`geodesic_distance`] via `atan2(|p × q|, p · q)`, which
/// keeps full relative accuracy near `d = 0` and `d = π`.
pub fn geodesic_distance_precise(p: &Point3, q: &Point3) -> f64 {
    p.cross_norm(q).atan2(p.dot(q))
}

fn require_nonzero_t(t: f64) -> Result<()> {
    if t == 0.0 || !t.is_finite() {
        return Err(Error::invalid(
            "t",
            format!("{t} must be finite and non-zero"),
        ));
    }
    Ok(())
}

fn require_off_antipode(d: f64, tolerance: f64) -> Result<()> {
    if d >= PI - tolerance {
        return Err(Error::NearAntipode {
            distance: d,
            tolerance,
        });
    }
    if d < 0.0 || !d.is_finite() {
        return Err(Error::invalid("d", format!("{d} is not a distance")));
    }
    Ok(())
}

/// Classical action `d²/2t` along the shortest geodesic.
pub fn action(t: f64, d: f64) -> Result<f64> {
    require_nonzero_t(t)?;
    Ok(d * d / (2.0 * t))
}

/// `d / sin d`, with the limit 1 at `d = 0`.
pub fn d_over_sin(d: f64) -> f64 {
    if d < SERIES_CUTOFF {
        let d2 = d * d;
        1.0 + d2 / 6.0 + 7.0 * d2 * d2 / 360.0
    } else {
        d / d.sin()
    }
}

// d − sin d without cancellation for small d.
fn d_minus_sin(d: f64) -> f64 {
    if d < 0.3 {
        let d2 = d * d;
        // alternating Taylor tail, truncated after the d^15 term
        let mut term = d * d2 / 6.0;
        let mut acc = 0.0;
        let mut k = 3.0;
        for _ in 0..7 {
            acc += term;
            term *= -d2 / ((k + 1.0) * (k + 2.0));
            k += 2.0;
        }
        acc
    } else {
        d - d.sin()
    }
}

/// `(d² − sin²d) / (d² sin²d)`, which tends to `1/3` at `d = 0`.
pub fn curvature_ratio(d: f64) -> f64 {
    if d < SERIES_CUTOFF {
        1.0 / 3.0 + d * d / 15.0
    } else {
        let s = d.sin();
        d_minus_sin(d) * (d + s) / (d * d * s * s)
    }
}

/// Bracket of the uncorrected residual identity:
/// `1/8 + (d² − sin²d)/(8 d² sin²d)`. Equals `1/6` at `d = 0`.
pub fn residual_bracket(d: f64) -> f64 {
    0.125 + curvature_ratio(d) / 8.0
}

/// Bracket left after the curvature phase `R t/12` is included:
/// `(d² − sin²d)/(8 d² sin²d) − 1/24`. Vanishes at `d = 0`.
pub fn corrected_residual_bracket(d: f64) -> f64 {
    if d < SERIES_CUTOFF {
        // (1/3 + d²/15)/8 − 1/24 without the cancellation
        d * d / 120.0
    } else {
        curvature_ratio(d) / 8.0 - 1.0 / 24.0
    }
}

/// Van Vleck determinant `d / (t² sin d)` with the default antipode guard.
pub fn van_vleck(t: f64, d: f64) -> Result<f64> {
    van_vleck_with_tolerance(t, d, DEFAULT_POLE_TOLERANCE)
}

pub fn van_vleck_with_tolerance(t: f64, d: f64, pole_tolerance: f64) -> Result<f64> {
    require_nonzero_t(t)?;
    require_off_antipode(d, pole_tolerance)?;
    Ok(d_over_sin(d) / (t * t))
}

/// Van Vleck determinant from central finite differences of the action.
///
/// Mixed second derivatives `∂²S/∂(θ₁,φ₁)∂(θ₂,φ₂)` with step `h`, then the
/// 2×2 determinant divided by the metric factor `sin θ₁ sin θ₂`.
pub fn van_vleck_numeric(
    t: f64,
    theta1: f64,
    phi1: f64,
    theta2: f64,
    phi2: f64,
    h: f64,
) -> Result<f64> {
    require_nonzero_t(t)?;
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::invalid("h", format!("{h} must be positive")));
    }
    let (s1, s2) = (theta1.sin(), theta2.sin());
    if s1 < 0.1 || s2 < 0.1 {
        return Err(Error::Degenerate(format!(
            "coordinate pole: sin θ₁ = {s1:.3}, sin θ₂ = {s2:.3} (need ≥ 0.1)"
        )));
    }
    let d = geodesic_distance_precise(
        &Point3::from_spherical(theta1, phi1),
        &Point3::from_spherical(theta2, phi2),
    );
    let margin = 10.0 * h;
    if d < margin || d > PI - margin {
        return Err(Error::Degenerate(format!(
            "distance {d} too close to coincident or antipodal points for step {h}"
        )));
    }

    let action_at = |x: [f64; 2], y: [f64; 2]| {
        let d = geodesic_distance_precise(
            &Point3::from_spherical(x[0], x[1]),
            &Point3::from_spherical(y[0], y[1]),
        );
        d * d / (2.0 * t)
    };
    let x0 = [theta1, phi1];
    let y0 = [theta2, phi2];
    let mixed = |i: usize, j: usize| {
        let shifted = |sx: f64, sy: f64| {
            let mut x = x0;
            let mut y = y0;
            x[i] += sx;
            y[j] += sy;
            action_at(x, y)
        };
        (shifted(h, h) - shifted(h, -h) - shifted(-h, h) + shifted(-h, -h)) / (4.0 * h * h)
    };
    let det = mixed(0, 0) * mixed(1, 1) - mixed(0, 1) * mixed(1, 0);
    Ok(det / (s1 * s2))
}

/// Polar form of a kernel value. `amplitude` is always non-negative; the
/// argument of `1/t` (π for negative `t`) is carried in `phase`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub amplitude: f64,
    pub phase: f64,
    pub value: Complex64,
}

impl KernelValue {
    fn from_polar(amplitude: f64, phase: f64) -> Self {
        Self {
            amplitude,
            phase,
            value: Complex64::from_polar(amplitude, phase),
        }
    }
}

fn kernel_parts(t: f64, d: f64, curvature_phase: bool) -> Result<KernelValue> {
    require_nonzero_t(t)?;
    require_off_antipode(d, DEFAULT_POLE_TOLERANCE)?;
    let amplitude = d_over_sin(d).sqrt() / t.abs();
    let mut phase = d * d / (2.0 * t);
    if curvature_phase {
        phase += SCALAR_CURVATURE * t / 12.0;
    }
    if t < 0.0 {
        phase += PI;
    }
    Ok(KernelValue::from_polar(amplitude, phase))
}

/// Kernel `K = √V e^{iS + iRt/12}` including the curvature phase `t/6`.
pub fn kernel(t: f64, d: f64) -> Result<KernelValue> {
    kernel_parts(t, d, true)
}

/// Kernel `K̂ = √V e^{iS}` without the curvature phase.
pub fn kernel_uncorrected(t: f64, d: f64) -> Result<KernelValue> {
    kernel_parts(t, d, false)
}

/// Closed form of `(i∂_t + ½Δ_x) K̂` for the uncorrected kernel:
/// `(1/t) √(d/sin d) (1/8 + (d² − sin²d)/(8 d² sin²d)) e^{i d²/2t}`.
pub fn pde_residual_analytic(t: f64, d: f64) -> Result<Complex64> {
    require_nonzero_t(t)?;
    require_off_antipode(d, DEFAULT_POLE_TOLERANCE)?;
    let amp = d_over_sin(d).sqrt() / t * residual_bracket(d);
    Ok(Complex64::from_polar(1.0, d * d / (2.0 * t)) * amp)
}

/// Applies `i∂_t + ½(∂²_d + cot d ∂_d)` to the kernel by fourth-order
/// central differences in `t` and `d`. The angular part of the Laplacian
/// drops out because the kernel is radial about `y`.
pub fn pde_residual_numeric(t: f64, d: f64, h: f64, curvature_phase: bool) -> Result<Complex64> {
    require_nonzero_t(t)?;
    if !(d - 2.0 * h > 0.0 && d + 2.0 * h < PI - DEFAULT_POLE_TOLERANCE) {
        return Err(Error::invalid(
            "d",
            format!("{d} too close to 0 or π for step {h}"),
        ));
    }
    if t.abs() <= 2.0 * h {
        return Err(Error::invalid(
            "h",
            format!("step {h} crosses t = 0 from t = {t}"),
        ));
    }
    let k = |tt: f64, dd: f64| kernel_parts(tt, dd, curvature_phase).map(|v| v.value);

    let dt = (-k(t + 2.0 * h, d)? + k(t + h, d)? * 8.0 - k(t - h, d)? * 8.0 + k(t - 2.0 * h, d)?)
        / (12.0 * h);
    let (kp2, kp1, k0, km1, km2) = (
        k(t, d + 2.0 * h)?,
        k(t, d + h)?,
        k(t, d)?,
        k(t, d - h)?,
        k(t, d - 2.0 * h)?,
    );
    let dd1 = (-kp2 + kp1 * 8.0 - km1 * 8.0 + km2) / (12.0 * h);
    let dd2 = (-kp2 + kp1 * 16.0 - k0 * 30.0 + km1 * 16.0 - km2) / (12.0 * h * h);
    let laplacian = dd2 + dd1 * (d.cos() / d.sin());
    Ok(Complex64::i() * dt + laplacian * 0.5)
}
