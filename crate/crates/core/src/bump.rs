//! Smooth radial cutoff `χ(d)` in geodesic distance.
//!
//! `χ ≡ 1` on `[0, r_flat]`, `χ ≡ 0` on `[r_cut, ∞)`, and in between the
//! partition-of-unity bridge
//!
//! ```text
//! χ(d) = φ(r_cut − d) / (φ(r_cut − d) + φ(d − r_flat)),   φ(s) = e^{−1/s} (s > 0), 0 otherwise
//! ```
//!
//! which is `C^∞` with every derivative vanishing at both ends of the bridge.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BumpProfile {
    r_flat: f64,
    r_cut: f64,
}

impl Default for BumpProfile {
    fn default() -> Self {
        Self {
            r_flat: PI / 4.0,
            r_cut: 3.0 * PI / 4.0,
        }
    }
}

impl BumpProfile {
    pub fn new(r_flat: f64, r_cut: f64) -> Result<Self> {
        if !(r_flat.is_finite() && r_flat > 0.0 && r_flat < PI) {
            return Err(Error::invalid("r_flat", format!("{r_flat} not in (0, π)")));
        }
        if !(r_cut.is_finite() && r_cut > r_flat && r_cut < PI) {
            return Err(Error::invalid(
                "r_cut",
                format!("{r_cut} not in (r_flat = {r_flat}, π)"),
            ));
        }
        Ok(Self { r_flat, r_cut })
    }

    pub fn r_flat(&self) -> f64 {
        self.r_flat
    }

    pub fn r_cut(&self) -> f64 {
        self.r_cut
    }

    /// Returns `[χ, χ', χ'']` at `d`.
    pub fn eval(&self, d: f64) -> [f64; 3] {
        if d <= self.r_flat {
            return [1.0, 0.0, 0.0];
        }
        if d >= self.r_cut {
            return [0.0; 3];
        }
        // logistic form 1 / (1 + e^g) of the same quotient; it stays finite
        // when both φ terms underflow on a narrow bridge
        let (u, v) = (self.r_cut - d, d - self.r_flat);
        let g = 1.0 / u - 1.0 / v;
        let dg = 1.0 / (u * u) + 1.0 / (v * v);
        let ddg = 2.0 / (u * u * u) - 2.0 / (v * v * v);
        let chi = 1.0 / (1.0 + g.exp());
        let rest = 1.0 / (1.0 + (-g).exp());
        let p = 0.25 / (0.5 * g).cosh().powi(2);
        let d1 = -p * dg;
        [chi, d1, -(d1 * (rest - chi) * dg + p * ddg)]
    }

    pub fn value(&self, d: f64) -> f64 {
        self.eval(d)[0]
    }

    pub fn deriv(&self, d: f64) -> f64 {
        self.eval(d)[1]
    }

    pub fn deriv2(&self, d: f64) -> f64 {
        self.eval(d)[2]
    }

    /// Laplace–Beltrami operator of the radial function `χ(d(·, y))` on the
    /// unit sphere: `χ'' + cot(d) χ'`.
    pub fn laplacian(&self, d: f64) -> f64 {
        let [_, d1, d2] = self.eval(d);
        if d1 == 0.0 {
            return d2;
        }
        d2 + d.cos() / d.sin() * d1
    }
}

/// `χ(d)` for the given profile.
pub fn bump(profile: &BumpProfile, d: f64) -> f64 {
    profile.value(d)
}

/// Exact derivative `dχ/dd`.
pub fn bump_deriv(profile: &BumpProfile, d: f64) -> f64 {
    profile.deriv(d)
}
