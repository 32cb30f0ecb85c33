//! Legendre polynomials and orthonormal spherical harmonics.
//!
//! `Y_{l,m}(θ, φ) = N_{l,m} P_l^m(cos θ) e^{imφ}` with the Condon–Shortley
//! phase inside `P_l^m` and `∫ |Y_{l,m}|² dΩ = 1`. Negative orders follow
//! `Y_{l,−m} = (−1)^m conj(Y_{l,m})`.

use num_complex::Complex64;
use std::f64::consts::PI;

/// `P_l(x)` by the three-term recurrence
/// `(k+1) P_{k+1} = (2k+1) x P_k − k P_{k−1}`.
pub fn legendre_p(l: usize, x: f64) -> f64 {
    match l {
        0 => 1.0,
        1 => x,
        _ => {
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 1..l {
                let kf = k as f64;
                let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
                p0 = p1;
                p1 = p2;
            }
            p1
        }
    }
}

/// Fills `out[k] = P_k(x)` for `k < out.len()`.
pub fn legendre_p_all(x: f64, out: &mut [f64]) {
    let n = out.len();
    if n == 0 {
        return;
    }
    out[0] = 1.0;
    if n == 1 {
        return;
    }
    out[1] = x;
    for k in 1..n - 1 {
        let kf = k as f64;
        out[k + 1] = ((2.0 * kf + 1.0) * x * out[k] - kf * out[k - 1]) / (kf + 1.0);
    }
}

/// Index of `(l, m)`, `0 ≤ m ≤ l`, in a triangular table.
#[inline]
pub fn tri_index(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}

/// Normalized associated Legendre values `N_{l,m} P_l^m(cos θ)` for
/// `0 ≤ m ≤ l ≤ l_max`, laid out by [`tri_index`]. Takes `cos θ` and
/// `sin θ` separately so callers with exact grid angles keep full accuracy
/// near the poles.
pub fn normalized_assoc_legendre(l_max: usize, cos_theta: f64, sin_theta: f64) -> Vec<f64> {
    let mut p = vec![0.0; tri_index(l_max, l_max) + 1];
    let x = cos_theta;
    p[0] = (0.25 / PI).sqrt();
    for m in 0..=l_max {
        if m > 0 {
            let mf = m as f64;
            p[tri_index(m, m)] =
                -((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * sin_theta * p[tri_index(m - 1, m - 1)];
        }
        if m < l_max {
            p[tri_index(m + 1, m)] = (2.0 * m as f64 + 3.0).sqrt() * x * p[tri_index(m, m)];
        }
        let mf = m as f64;
        for l in m + 2..=l_max {
            let lf = l as f64;
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let lm1 = lf - 1.0;
            let b = ((lm1 * lm1 - mf * mf) / (4.0 * lm1 * lm1 - 1.0)).sqrt();
            p[tri_index(l, m)] = a * (x * p[tri_index(l - 1, m)] - b * p[tri_index(l - 2, m)]);
        }
    }
    p
}

/// Sign relating the stored `m ≥ 0` value to order `m`:
/// `Y_{l,m} = sign · N P_l^{|m|} e^{imφ}`.
#[inline]
pub(crate) fn order_sign(m: i64) -> f64 {
    if m < 0 && m % 2 != 0 {
        -1.0
    } else {
        1.0
    }
}

/// Orthonormal spherical harmonic `Y_{l,m}(θ, φ)`.
///
/// # Panics
/// If `|m| > l`.
pub fn sph_harm(l: usize, m: i64, theta: f64, phi: f64) -> Complex64 {
    let am = m.unsigned_abs() as usize;
    assert!(am <= l, "|m| = {am} exceeds l = {l}");
    let (s, c) = theta.sin_cos();
    let table = normalized_assoc_legendre(l, c, s);
    let value = order_sign(m) * table[tri_index(l, am)];
    Complex64::from_polar(value, m as f64 * phi)
}
