use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::ops::{Add, Sub};

use crate::error::{Error, Result};

/// Coefficients `a_{l,m}` of a band-limited function in the orthonormal
/// harmonic basis, stored row-major: `l` ascending, then `m` from `−l` to `l`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateRepr", into = "StateRepr")]
pub struct SpectralState {
    l_max: usize,
    coeffs: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct StateRepr {
    l_max: usize,
    coeffs: Vec<[f64; 2]>,
}

impl TryFrom<StateRepr> for SpectralState {
    type Error = Error;

    fn try_from(r: StateRepr) -> Result<Self> {
        let coeffs = r
            .coeffs
            .into_iter()
            .map(|[re, im]| Complex64::new(re, im))
            .collect();
        SpectralState::from_coeffs(r.l_max, coeffs)
    }
}

impl From<SpectralState> for StateRepr {
    fn from(s: SpectralState) -> Self {
        StateRepr {
            l_max: s.l_max,
            coeffs: s.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        }
    }
}

/// Position of `(l, m)` in the row-major layout.
#[inline]
pub fn coeff_index(l: usize, m: i64) -> usize {
    debug_assert!(m.unsigned_abs() as usize <= l);
    ((l * l + l) as i64 + m) as usize
}

#[inline]
fn degree_of(k: usize) -> usize {
    let mut l = (k as f64).sqrt() as usize;
    while (l + 1) * (l + 1) <= k {
        l += 1;
    }
    while l * l > k {
        l -= 1;
    }
    l
}

/// `l(l+1)`, the eigenvalue of `−Δ` on degree-`l` harmonics.
#[inline]
pub fn laplace_eigenvalue(l: usize) -> f64 {
    (l * (l + 1)) as f64
}

impl SpectralState {
    pub fn zeros(l_max: usize) -> Self {
        Self {
            l_max,
            coeffs: vec![Complex64::new(0.0, 0.0); (l_max + 1) * (l_max + 1)],
        }
    }

    pub fn from_coeffs(l_max: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        let expected = (l_max + 1) * (l_max + 1);
        if coeffs.len() != expected {
            return Err(Error::Length {
                what: "spectral coefficients",
                expected,
                got: coeffs.len(),
            });
        }
        Ok(Self { l_max, coeffs })
    }

    /// Unit coefficient at `(l, m)`.
    pub fn basis(l_max: usize, l: usize, m: i64) -> Self {
        let mut s = Self::zeros(l_max);
        s.set(l, m, Complex64::new(1.0, 0.0));
        s
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn get(&self, l: usize, m: i64) -> Complex64 {
        self.coeffs[coeff_index(l, m)]
    }

    pub fn set(&mut self, l: usize, m: i64, value: Complex64) {
        assert!(
            l <= self.l_max && m.unsigned_abs() as usize <= l,
            "({l}, {m}) out of range"
        );
        self.coeffs[coeff_index(l, m)] = value;
    }

    /// `(l, m, a_{l,m})` in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, i64, Complex64)> + '_ {
        self.coeffs.iter().enumerate().map(|(k, &c)| {
            let l = degree_of(k);
            (l, k as i64 - (l * l + l) as i64, c)
        })
    }

    /// L² norm, `(Σ |a_{l,m}|²)^{1/2}`.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            l_max: self.l_max,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// Multiplies every degree-`l` coefficient by `multiplier(l)`.
    pub fn map_degrees(&self, mut multiplier: impl FnMut(usize) -> Complex64) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for l in 0..=self.l_max {
            let mu = multiplier(l);
            let row = &self.coeffs[l * l..(l + 1) * (l + 1)];
            coeffs.extend(row.iter().map(|c| c * mu));
        }
        Self {
            l_max: self.l_max,
            coeffs,
        }
    }

    /// Copy truncated or zero-padded to band limit `l_max`.
    pub fn with_band_limit(&self, l_max: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); (l_max + 1) * (l_max + 1)];
        let n = coeffs.len().min(self.coeffs.len());
        coeffs[..n].copy_from_slice(&self.coeffs[..n]);
        Self { l_max, coeffs }
    }

    /// Largest `|a − b|` over coefficients of two states of equal band limit.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.l_max, other.l_max, "band limits differ");
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Add for &SpectralState {
    type Output = SpectralState;

    fn add(self, rhs: &SpectralState) -> SpectralState {
        assert_eq!(self.l_max, rhs.l_max, "band limits differ");
        SpectralState {
            l_max: self.l_max,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &SpectralState {
    type Output = SpectralState;

    fn sub(self, rhs: &SpectralState) -> SpectralState {
        assert_eq!(self.l_max, rhs.l_max, "band limits differ");
        SpectralState {
            l_max: self.l_max,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// Multiplier `e^{−i t l(l+1)/2}` of the exact propagator on degree `l`.
pub fn propagator_multiplier(l: usize, t: f64) -> Complex64 {
    Complex64::from_polar(1.0, -0.5 * t * laplace_eigenvalue(l))
}

/// `e^{itΔ/2}` applied to `s`.
pub fn exact_propagator(s: &SpectralState, t: f64) -> SpectralState {
    s.map_degrees(|l| propagator_multiplier(l, t))
}

/// `1` if degree `l` lies in the range of `ρ(E)`, i.e. `l(l+1) < E`.
#[inline]
pub fn in_projector(l: usize, energy: f64) -> bool {
    laplace_eigenvalue(l) < energy
}

/// Spectral projector `ρ(E)`: keeps the degrees with `l(l+1) < E`.
pub fn projector(s: &SpectralState, energy: f64) -> SpectralState {
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    s.map_degrees(|l| if in_projector(l, energy) { one } else { zero })
}

/// `‖(−Δ + 1)^k f‖_{L²}`.
pub fn sobolev_norm(s: &SpectralState, k: u32) -> f64 {
    s.iter()
        .map(|(l, _, c)| (laplace_eigenvalue(l) + 1.0).powi(2 * k as i32) * c.norm_sqr())
        .sum::<f64>()
        .sqrt()
}
