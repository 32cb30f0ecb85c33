use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::eigen::{slice_eigenvalues, SliceEigenvalues};
use crate::bump::BumpProfile;
use crate::error::{Error, Result};
use crate::spectral::{in_projector, propagator_multiplier, SpectralState};

/// `{U_χ(t/N)}^N` restricted by the spectral projector `ρ(E)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceConfig {
    pub bump: BumpProfile,
    pub t_total: f64,
    pub n_slices: usize,
    /// `None` means no projector.
    pub projector_energy: Option<f64>,
    pub l_max: usize,
}

impl SliceConfig {
    pub fn new(
        bump: BumpProfile,
        t_total: f64,
        n_slices: usize,
        projector_energy: Option<f64>,
        l_max: usize,
    ) -> Result<Self> {
        let cfg = Self {
            bump,
            t_total,
            n_slices,
            projector_energy,
            l_max,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.t_total == 0.0 || !self.t_total.is_finite() {
            return Err(Error::invalid(
                "t_total",
                format!("{} must be finite and non-zero", self.t_total),
            ));
        }
        if self.n_slices < 1 {
            return Err(Error::invalid("n_slices", "must be at least 1"));
        }
        if let Some(e) = self.projector_energy {
            if e.is_nan() {
                return Err(Error::invalid("projector_energy", "NaN"));
            }
            let top = (self.l_max * (self.l_max + 1)) as f64;
            if top < e {
                return Err(Error::invalid(
                    "l_max",
                    format!("l_max(l_max+1) = {top} does not cover projector energy {e}"),
                ));
            }
        }
        Ok(())
    }

    pub fn slice_time(&self) -> f64 {
        self.t_total / self.n_slices as f64
    }

    /// Whether degree `l` survives the projector.
    pub fn keeps(&self, l: usize) -> bool {
        l <= self.l_max && self.projector_energy.is_none_or(|e| in_projector(l, e))
    }

    /// Highest degree kept, `None` for an empty subspace.
    pub fn top_degree(&self) -> Option<usize> {
        (0..=self.l_max).rev().find(|&l| self.keeps(l))
    }
}

/// Per-degree multipliers `μ_l` of the sliced, projected product.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceMultipliers {
    pub mu: Vec<Complex64>,
    /// Largest quadrature estimate among the slice eigenvalues used.
    pub quad_error: f64,
}

impl SliceMultipliers {
    pub fn apply(&self, s: &SpectralState) -> Result<SpectralState> {
        if s.l_max() + 1 > self.mu.len() {
            return Err(Error::BandLimit {
                state: s.l_max(),
                available: self.mu.len().saturating_sub(1),
            });
        }
        Ok(s.map_degrees(|l| self.mu[l]))
    }
}

/// `a_{l,m} ↦ α_l a_{l,m}`.
pub fn apply_spectral(s: &SpectralState, ev: &SliceEigenvalues) -> Result<SpectralState> {
    if s.l_max() > ev.l_max() {
        return Err(Error::BandLimit {
            state: s.l_max(),
            available: ev.l_max(),
        });
    }
    Ok(s.map_degrees(|l| ev.get(l)))
}

/// `μ_l = α_l(t/N)^N` on the projected subspace and zero elsewhere.
pub fn time_slice(cfg: &SliceConfig) -> Result<SliceMultipliers> {
    cfg.validate()?;
    let ev = slice_eigenvalues(cfg.slice_time(), cfg.l_max, &cfg.bump)?;
    Ok(multipliers_from(cfg, &ev))
}

pub(crate) fn multipliers_from(cfg: &SliceConfig, ev: &SliceEigenvalues) -> SliceMultipliers {
    let n = cfg.n_slices as u32;
    let mu = (0..=cfg.l_max)
        .map(|l| {
            if cfg.keeps(l) {
                ev.get(l).powu(n)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    SliceMultipliers {
        mu,
        quad_error: ev.max_quad_error(),
    }
}

/// Operator norm of `[{U_χ(t/N)}^N − e^{itΔ/2}] ρ(E)`, which is a maximum
/// over the kept degrees because both operators are diagonal.
pub fn error_norm(cfg: &SliceConfig) -> Result<f64> {
    Ok(error_norm_with_quad(cfg)?.0)
}

/// [`error_norm`] together with the quadrature estimate of the slice
/// eigenvalues it used.
pub fn error_norm_with_quad(cfg: &SliceConfig) -> Result<(f64, f64)> {
    cfg.validate()?;
    let Some(top) = cfg.top_degree() else {
        return Ok((0.0, 0.0));
    };
    let ev = slice_eigenvalues(cfg.slice_time(), top, &cfg.bump)?;
    let n = cfg.n_slices as u32;
    let err = (0..=top)
        .filter(|&l| cfg.keeps(l))
        .map(|l| (ev.get(l).powu(n) - propagator_multiplier(l, cfg.t_total)).norm())
        .fold(0.0, f64::max);
    Ok((err, ev.max_quad_error()))
}

/// `|α_l(t/N)^N − e^{−itl(l+1)/2}|` for one degree.
pub fn slicing_error(l: usize, t: f64, n_slices: usize, bump: &BumpProfile) -> Result<f64> {
    let cfg = SliceConfig::new(*bump, t, n_slices, None, l)?;
    let ev = slice_eigenvalues(cfg.slice_time(), l, bump)?;
    Ok((ev.get(l).powu(n_slices as u32) - propagator_multiplier(l, t)).norm())
}
