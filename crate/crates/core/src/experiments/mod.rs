//! Desk-scale convergence experiments producing [`ResultTable`]s.
//!
//! Every run is a pure function of its [`ExperimentConfig`]: cells are
//! computed independently (in parallel) and assembled in sweep order, so
//! tables are bit-identical across runs and thread counts.

mod runs;
mod table;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::f64::consts::PI;

use crate::bump::BumpProfile;
use crate::error::{Error, Result};
use crate::spectral::SpectralState;

pub use runs::{
    counterexample_ceiling, parseval_reference, run_counterexample, run_strong_convergence,
    run_uniform_convergence, run_verification_suite, uniform_energy, PARSEVAL_REFERENCE_CONSTANT,
    PDE_STEP, VAN_VLECK_STEP,
};
pub use table::{Column, ResultTable};

/// Version string recorded in every table.
pub const VERSION: &str = concat!("sphere-feynman v", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// All `(l, m)` with `l ≤ 3`, equal weights.
    Lowband,
    /// `a_{l,0} ∝ e^{−l²/18}` up to the configured `l_max`.
    Gauss,
    /// Truncated zonal delta `Σ √((2l+1)/2) Y_{l,0}` up to `l_max`.
    DeltaLike,
}

impl Preset {
    /// Unit-norm state; `l_max` is ignored by `Lowband`.
    pub fn state(self, l_max: usize) -> SpectralState {
        let mut s = match self {
            Preset::Lowband => {
                let mut s = SpectralState::zeros(3);
                for (l, m, _) in SpectralState::zeros(3).iter().collect::<Vec<_>>() {
                    s.set(l, m, Complex64::new(1.0, 0.0));
                }
                s
            }
            Preset::Gauss => zonal(l_max, |l| (-((l * l) as f64) / 18.0).exp()),
            Preset::DeltaLike => zonal(l_max, |l| ((2 * l + 1) as f64 / 2.0).sqrt()),
        };
        let n = s.norm();
        s = s.scale(Complex64::new(1.0 / n, 0.0));
        s
    }
}

fn zonal(l_max: usize, a: impl Fn(usize) -> f64) -> SpectralState {
    let mut s = SpectralState::zeros(l_max);
    for l in 0..=l_max {
        s.set(l, 0, Complex64::new(a(l), 0.0));
    }
    s
}

/// A named preset or explicit coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TestState {
    Preset(Preset),
    Explicit(SpectralState),
}

impl TestState {
    pub fn resolve(&self, l_max: usize) -> SpectralState {
        match self {
            TestState::Preset(p) => p.state(l_max),
            TestState::Explicit(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub t_total: f64,
    /// Further total times swept alongside `t_total`.
    pub extra_t: Vec<f64>,
    pub n_sweep: Vec<usize>,
    /// Slice counts of the counterexample scan, whose cost grows like `N²`.
    pub scan_n_sweep: Vec<usize>,
    pub epsilon: f64,
    pub bump: BumpProfile,
    pub l_max: usize,
    pub test_state: TestState,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            name: "default".into(),
            t_total: 1.0,
            extra_t: vec![2.0 * PI / 3.0],
            n_sweep: (3..=12).map(|k| 1 << k).collect(),
            scan_n_sweep: (2..=9).map(|k| 1 << k).collect(),
            epsilon: 1.0 / 30.0,
            bump: BumpProfile::default(),
            l_max: 20,
            test_state: TestState::Preset(Preset::Lowband),
            seed: 20_240_917,
        }
    }
}

fn check_sweep(field: &'static str, ns: &[usize]) -> Result<()> {
    if ns.is_empty() {
        return Err(Error::invalid(field, "empty"));
    }
    if ns.contains(&0) {
        return Err(Error::invalid(field, "slice counts must be at least 1"));
    }
    if ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid(field, "must be strictly increasing"));
    }
    if ns.iter().any(|&n| n > u32::MAX as usize) {
        return Err(Error::invalid(field, "slice count too large"));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(Error::invalid(
                "name",
                format!("{:?} is not a usable file-name part", self.name),
            ));
        }
        for &t in std::iter::once(&self.t_total).chain(&self.extra_t) {
            if t == 0.0 || !t.is_finite() {
                return Err(Error::invalid(
                    "t_total",
                    format!("{t} must be finite and non-zero"),
                ));
            }
        }
        check_sweep("n_sweep", &self.n_sweep)?;
        check_sweep("scan_n_sweep", &self.scan_n_sweep)?;
        if !(0.0..=1.0 / 3.0).contains(&self.epsilon) {
            return Err(Error::invalid(
                "epsilon",
                format!("{} not in [0, 1/3]", self.epsilon),
            ));
        }
        BumpProfile::new(self.bump.r_flat(), self.bump.r_cut())?;
        Ok(())
    }

    /// `t_total` followed by `extra_t`.
    pub fn times(&self) -> Vec<f64> {
        std::iter::once(self.t_total)
            .chain(self.extra_t.iter().copied())
            .collect()
    }

    pub fn test_state(&self) -> SpectralState {
        self.test_state.resolve(self.l_max)
    }
}

/// Metadata common to every table: experiment name, effective config and
/// version. Timestamps are added by the caller that writes files.
pub(crate) fn base_metadata(
    experiment: &str,
    cfg: &ExperimentConfig,
) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("experiment".into(), json!(experiment));
    m.insert(
        "config".into(),
        serde_json::to_value(cfg).expect("config serializes"),
    );
    m.insert("version".into(), json!(VERSION));
    m
}

/// Ordinary least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0)
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_have_unit_norm() {
        for p in [Preset::Lowband, Preset::Gauss, Preset::DeltaLike] {
            assert!((p.state(12).norm() - 1.0).abs() < 1e-14);
        }
        let low = Preset::Lowband.state(40);
        assert_eq!(low.l_max(), 3);
        assert!((low.get(2, -1).re - 0.25).abs() < 1e-15);
    }

    #[test]
    fn config_json_round_trip() {
        let cfg = ExperimentConfig::default();
        let text = serde_json::to_string(&cfg).unwrap();
        assert!(text.contains("\"test_state\":\"lowband\""));
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
        let partial: ExperimentConfig =
            serde_json::from_str(r#"{"t_total": 2.0, "test_state": "delta-like"}"#).unwrap();
        assert_eq!(partial.t_total, 2.0);
        assert_eq!(partial.test_state, TestState::Preset(Preset::DeltaLike));
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"t_totl": 2.0}"#).is_err());
    }

    #[test]
    fn explicit_state_in_config() {
        let cfg: ExperimentConfig = serde_json::from_str(
            r#"{"test_state": {"l_max": 1, "coeffs": [[1,0],[0,0],[0,1],[0,0]]}}"#,
        )
        .unwrap();
        let s = cfg.test_state();
        assert_eq!(s.get(1, 0), Complex64::new(0.0, 1.0));
    }

    #[test]
    fn validation_names_fields() {
        let bad = |f: fn(&mut ExperimentConfig)| {
            let mut c = ExperimentConfig::default();
            f(&mut c);
            match c.validate() {
                Err(Error::InvalidArgument { field, .. }) => field,
                other => panic!("{other:?}"),
            }
        };
        assert_eq!(bad(|c| c.n_sweep = vec![0, 8]), "n_sweep");
        assert_eq!(bad(|c| c.n_sweep = vec![8, 8]), "n_sweep");
        assert_eq!(bad(|c| c.scan_n_sweep = vec![]), "scan_n_sweep");
        assert_eq!(bad(|c| c.t_total = 0.0), "t_total");
        assert_eq!(bad(|c| c.epsilon = 0.5), "epsilon");
        assert!(ExperimentConfig::default().validate().is_ok());
    }

    #[test]
    fn slope_of_power_law() {
        let x: Vec<f64> = (1..8).map(|k| (1 << k) as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v.powf(-1.5)).collect();
        assert!((loglog_slope(&x, &y) + 1.5).abs() < 1e-12);
    }
}
