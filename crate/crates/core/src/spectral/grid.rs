use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::quadrature::gauss_legendre;

/// Product quadrature on the sphere: Gauss–Legendre in `cos θ` times the
/// uniform trapezoid rule in `φ`. Node `k = i·n_phi + j` sits at
/// `(θ_i, φ_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereGrid {
    n_theta: usize,
    n_phi: usize,
    theta: Vec<f64>,
    cos_theta: Vec<f64>,
    sin_theta: Vec<f64>,
    theta_weights: Vec<f64>,
    phi: Vec<f64>,
}

impl SphereGrid {
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta == 0 || n_phi == 0 {
            return Err(Error::invalid(
                "grid",
                format!("n_theta = {n_theta}, n_phi = {n_phi} must be positive"),
            ));
        }
        let (x, w) = gauss_legendre(n_theta);
        let theta: Vec<f64> = x.iter().map(|x| x.acos()).collect();
        let sin_theta = x.iter().map(|x| (1.0 - x * x).sqrt()).collect();
        let phi = (0..n_phi)
            .map(|j| 2.0 * PI * j as f64 / n_phi as f64)
            .collect();
        Ok(Self {
            n_theta,
            n_phi,
            theta,
            cos_theta: x,
            sin_theta,
            theta_weights: w,
            phi,
        })
    }

    /// Smallest grid integrating products of two band-`l_max` functions
    /// exactly.
    pub fn for_band_limit(l_max: usize) -> Self {
        Self::new(l_max + 1, 2 * l_max + 2).expect("positive sizes")
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    pub fn len(&self) -> usize {
        self.n_theta * self.n_phi
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn cos_theta(&self) -> &[f64] {
        &self.cos_theta
    }

    pub fn sin_theta(&self) -> &[f64] {
        &self.sin_theta
    }

    pub fn theta_weights(&self) -> &[f64] {
        &self.theta_weights
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn phi_weight(&self) -> f64 {
        2.0 * PI / self.n_phi as f64
    }

    /// Largest band limit analyzed exactly on this grid.
    pub fn max_band_limit(&self) -> usize {
        (self.n_theta - 1).min((self.n_phi - 1) / 2)
    }

    pub fn check_band_limit(&self, l_max: usize) -> Result<()> {
        if self.n_theta < l_max + 1 || self.n_phi < 2 * l_max + 1 {
            return Err(Error::GridTooCoarse {
                n_theta: self.n_theta,
                n_phi: self.n_phi,
                reason: format!(
                    "band limit {l_max} needs n_theta ≥ {} and n_phi ≥ {}",
                    l_max + 1,
                    2 * l_max + 1
                ),
            });
        }
        Ok(())
    }

    /// `(θ, φ, weight)` of node `k`.
    pub fn node(&self, k: usize) -> (f64, f64, f64) {
        let (i, j) = (k / self.n_phi, k % self.n_phi);
        (
            self.theta[i],
            self.phi[j],
            self.theta_weights[i] * self.phi_weight(),
        )
    }

    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        (0..self.len()).map(move |k| self.node(k))
    }

    pub fn point(&self, k: usize) -> Point3 {
        let (i, j) = (k / self.n_phi, k % self.n_phi);
        let (sp, cp) = self.phi[j].sin_cos();
        Point3 {
            x: self.sin_theta[i] * cp,
            y: self.sin_theta[i] * sp,
            z: self.cos_theta[i],
        }
    }

    pub fn points(&self) -> Vec<Point3> {
        (0..self.len()).map(|k| self.point(k)).collect()
    }

    pub fn weight(&self, k: usize) -> f64 {
        self.theta_weights[k / self.n_phi] * self.phi_weight()
    }
}

/// Samples of a function at the nodes of a [`SphereGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Arc<SphereGrid>,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(grid: Arc<SphereGrid>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Length {
                what: "grid function values",
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Arc<SphereGrid>) -> Self {
        let values = vec![Complex64::new(0.0, 0.0); grid.len()];
        Self { grid, values }
    }

    /// Samples `f(θ, φ)` at every node.
    pub fn from_fn(grid: Arc<SphereGrid>, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let values = grid.nodes().map(|(t, p, _)| f(t, p)).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &Arc<SphereGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// `(Σ_k w_k |f_k|²)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(k, v)| self.grid.weight(k) * v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn integral(&self) -> Complex64 {
        self.values
            .iter()
            .enumerate()
            .map(|(k, v)| v * self.grid.weight(k))
            .sum()
    }

    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction> {
        if self.grid != other.grid {
            return Err(Error::invalid("grid", "operands live on different grids"));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Ok(GridFunction {
            grid: Arc::clone(&self.grid),
            values,
        })
    }
}
