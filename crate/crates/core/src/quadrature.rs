//! Composite Gauss–Legendre quadrature with oscillation-aware panel counts.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Gauss–Legendre points per panel used by [`choose_panels`].
pub const PANEL_ORDER: usize = 10;
/// Panels per oscillation.
pub const PANELS_PER_OSCILLATION: f64 = 8.0;
/// Panel count used for non-oscillatory integrands.
pub const MIN_PANELS: usize = 8;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// nodes in ascending order.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss–Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess for the i-th largest root
        let k = i as f64 + 1.0;
        let mut x =
            (PI * (k - 0.25) / (nf + 0.5)).cos() * (1.0 - (nf - 1.0) / (8.0 * nf * nf * nf));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let nf = n as f64;
    let d = nf * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PanelRule {
    order: usize,
    panels: usize,
    a: f64,
    b: f64,
}

impl PanelRule {
    pub fn new(order: usize, panels: usize, a: f64, b: f64) -> Result<Self> {
        if order < 2 {
            return Err(Error::invalid("order", format!("{order} < 2")));
        }
        if panels < 1 {
            return Err(Error::invalid("panels", "must be at least 1"));
        }
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::invalid("domain", format!("[{a}, {b}] is empty")));
        }
        Ok(Self {
            order,
            panels,
            a,
            b,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn panels(&self) -> usize {
        self.panels
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    /// Same rule with `factor` times as many panels.
    pub fn refined(&self, factor: usize) -> Self {
        Self {
            panels: self.panels * factor.max(1),
            ..*self
        }
    }

    /// All `(x, weight)` pairs of the composite rule, panel by panel.
    pub fn nodes(&self) -> Vec<(f64, f64)> {
        let (x, w) = gauss_legendre(self.order);
        let h = (self.b - self.a) / self.panels as f64;
        let mut out = Vec::with_capacity(self.order * self.panels);
        for p in 0..self.panels {
            let left = self.a + p as f64 * h;
            for (xi, wi) in x.iter().zip(&w) {
                out.push((left + 0.5 * h * (xi + 1.0), 0.5 * h * wi));
            }
        }
        out
    }
}

/// Composite quadrature value with a self-refinement error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    /// Value on the doubled rule.
    pub value: Complex64,
    /// `|I(2P) − I(P)|`.
    pub error: f64,
}

fn integrate_on(f: &impl Fn(f64) -> Complex64, rule: &PanelRule) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, w) in rule.nodes() {
        let v = f(x);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFiniteIntegrand {
                at: x,
                value: v.to_string(),
            });
        }
        acc += v * w;
    }
    Ok(acc)
}

/// Integrates `f` with `rule` and with twice as many panels; returns the
/// refined value and the difference between the two as error estimate.
pub fn integrate_1d(f: impl Fn(f64) -> Complex64, rule: &PanelRule) -> Result<QuadResult> {
    let coarse = integrate_on(&f, rule)?;
    let fine = integrate_on(&f, &rule.refined(2))?;
    Ok(QuadResult {
        value: fine,
        error: (fine - coarse).norm(),
    })
}

/// Phase `θ²/(2 t_phase)` integrated over `[0, domain_cut]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorySpec {
    t_phase: f64,
    domain_cut: f64,
}

impl OscillatorySpec {
    pub fn new(t_phase: f64, domain_cut: f64) -> Result<Self> {
        if t_phase == 0.0 || !t_phase.is_finite() {
            return Err(Error::invalid(
                "t_phase",
                format!("{t_phase} must be non-zero"),
            ));
        }
        if !(domain_cut > 0.0 && domain_cut.is_finite()) {
            return Err(Error::invalid(
                "domain_cut",
                format!("{domain_cut} must be positive"),
            ));
        }
        Ok(Self {
            t_phase,
            domain_cut,
        })
    }

    pub fn t_phase(&self) -> f64 {
        self.t_phase
    }

    pub fn domain_cut(&self) -> f64 {
        self.domain_cut
    }

    /// Total phase sweep `Φ = domain_cut² / (2|t_phase|)`.
    pub fn phase_sweep(&self) -> f64 {
        self.domain_cut * self.domain_cut / (2.0 * self.t_phase.abs())
    }
}

/// Panel count for the sweep `phi` combined with a degree-`l` Legendre
/// factor: `max(8, ⌈8 (Φ/2π + l)⌉)`.
pub fn panels_for(phi: f64, l: usize) -> usize {
    let oscillations = phi / (2.0 * PI) + l as f64;
    let n = (PANELS_PER_OSCILLATION * oscillations).ceil();
    (n as usize).max(MIN_PANELS)
}

pub fn choose_panels(spec: &OscillatorySpec, l: usize) -> PanelRule {
    PanelRule {
        order: PANEL_ORDER,
        panels: panels_for(spec.phase_sweep(), l),
        a: 0.0,
        b: spec.domain_cut,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for n in [1, 2, 5, 10, 33, 128] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13, "n = {n}");
            // exact up to degree 2n - 1
            let deg = 2 * n - 1;
            let s: f64 = x
                .iter()
                .zip(&w)
                .map(|(x, w)| w * x.powi(deg as i32 - 1))
                .sum();
            let exact = if (deg - 1) % 2 == 0 {
                2.0 / deg as f64
            } else {
                0.0
            };
            assert!((s - exact).abs() < 1e-13, "n = {n}: {s} vs {exact}");
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn constant_and_cosine() {
        let rule = PanelRule::new(10, 8, 0.0, 2.0).unwrap();
        let r = integrate_1d(|_| Complex64::new(1.0, 0.0), &rule).unwrap();
        assert!((r.value.re - 2.0).abs() < 1e-14 && r.value.im == 0.0);
        let rule = PanelRule::new(10, 8, 0.0, PI / 2.0).unwrap();
        let r = integrate_1d(|x| Complex64::new(x.cos(), 0.0), &rule).unwrap();
        assert!((r.value.re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn chirp_matches_refined_reference() {
        // e^{i 50 θ²} on [0, 3]: phase 50 θ² = θ²/(2t) with t = 1/100
        let spec = OscillatorySpec::new(0.01, 3.0).unwrap();
        let rule = choose_panels(&spec, 0);
        let f = |x: f64| Complex64::from_polar(1.0, 50.0 * x * x);
        let r = integrate_1d(f, &rule).unwrap();
        let reference = integrate_1d(f, &rule.refined(10)).unwrap();
        assert!((r.value - reference.value).norm() < 1e-9);
        assert!(r.error < 1e-9);
        // doubling once more moves the value by less than the estimate
        let finer = integrate_1d(f, &rule.refined(2)).unwrap();
        assert!((finer.value - r.value).norm() <= r.error);
    }

    #[test]
    fn non_finite_reports_location() {
        let rule = PanelRule::new(4, 1, 0.0, 1.0).unwrap();
        let err = integrate_1d(|x| Complex64::new(1.0 / (x - x), 0.0), &rule).unwrap_err();
        assert!(matches!(err, Error::NonFiniteIntegrand { .. }));
    }

    #[test]
    fn rule_validation() {
        assert!(PanelRule::new(1, 1, 0.0, 1.0).is_err());
        assert!(PanelRule::new(2, 0, 0.0, 1.0).is_err());
        assert!(PanelRule::new(2, 1, 1.0, 1.0).is_err());
        assert!(OscillatorySpec::new(0.0, 1.0).is_err());
    }

    #[test]
    fn panel_floor_and_doubling() {
        assert_eq!(panels_for(0.0, 0), MIN_PANELS);
        let spec = OscillatorySpec::new(0.05, 2.0).unwrap();
        let half = OscillatorySpec::new(0.025, 2.0).unwrap();
        let p1 = choose_panels(&spec, 0).panels();
        let p2 = choose_panels(&half, 0).panels();
        assert!(p2 + 1 >= 2 * p1, "{p1} -> {p2}");
    }

    #[test]
    fn conjugation_commutes() {
        let rule = PanelRule::new(10, 16, 0.0, 2.5).unwrap();
        let f = |x: f64| Complex64::new(x.sin(), x * x).exp();
        let a = integrate_1d(f, &rule).unwrap().value;
        let b = integrate_1d(|x| f(x).conj(), &rule).unwrap().value;
        assert_eq!(a.conj(), b);
    }

    proptest! {
        #[test]
        fn panels_monotone(phi in 0.0f64..1e5, dphi in 0.0f64..1e3, l in 0usize..500, dl in 0usize..50) {
            let base = panels_for(phi, l);
            prop_assert!(panels_for(phi + dphi, l) >= base);
            prop_assert!(panels_for(phi, l + dl) >= base);
        }
    }
}
