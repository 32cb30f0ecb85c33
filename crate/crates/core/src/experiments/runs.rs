use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;
use std::f64::consts::PI;

use super::table::{Column, ResultTable};
use super::{base_metadata, loglog_slope, ExperimentConfig};
use crate::bump::BumpProfile;
use crate::error::{Error, Result};
use crate::geometry::{
    corrected_residual_bracket, geodesic_distance, kernel, pde_residual_analytic,
    pde_residual_numeric, van_vleck, van_vleck_numeric, Point3,
};
use crate::propagator::{error_norm_with_quad, slice_eigenvalues, SliceConfig};
use crate::quadrature::{integrate_1d, PanelRule};
use crate::spectral::{exact_propagator, in_projector, propagator_multiplier};

/// `2 ∫₀^π χ(θ)² θ dθ` for the default bump, the limit of
/// `Σ(2l+1)|α_l(t/N)|² / (N/t)²`.
pub const PARSEVAL_REFERENCE_CONSTANT: f64 = 1.972_079_363_972_086;

/// Finite-difference step of the Van Vleck check.
pub const VAN_VLECK_STEP: f64 = 1e-4;
/// Finite-difference step of the residual check.
pub const PDE_STEP: f64 = 1e-3;

const VAN_VLECK_PAIRS: usize = 200;
const PDE_LATTICE: usize = 20;

/// Projector energy `N^{1/3 − ε}`.
pub fn uniform_energy(n: usize, epsilon: f64) -> f64 {
    (n as f64).powf(1.0 / 3.0 - epsilon)
}

/// Highest degree scanned for `|α_l(t/N)| < 1/2`.
///
/// `|α_l(τ)|` follows `χ(lτ)` closely, so the crossing sits near
/// `l ≈ (π/2) N/|t|`; the `4√N + 64` floor only matters for small `N`.
pub fn counterexample_ceiling(n: usize, t: f64) -> usize {
    let floor = (4.0 * (n as f64).sqrt()).ceil() as usize + 64;
    let linear = (PI * n as f64 / t.abs()).ceil() as usize + 64;
    floor.max(linear)
}

/// `2 ∫₀^{r_cut} χ(θ)² θ dθ` by quadrature.
pub fn parseval_reference(bump: &BumpProfile) -> Result<f64> {
    let rule = PanelRule::new(10, 64, 0.0, bump.r_cut())?;
    let r = integrate_1d(
        |x| Complex64::new(2.0 * bump.value(x).powi(2) * x, 0.0),
        &rule,
    )?;
    Ok(r.value.re)
}

fn cells(cfg: &ExperimentConfig, ns: &[usize]) -> Vec<(f64, usize)> {
    cfg.times()
        .into_iter()
        .flat_map(|t| ns.iter().map(move |&n| (t, n)))
        .collect()
}

fn at_cell<T>(t: f64, n: usize, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::AtCell {
        n,
        t,
        source: Box::new(e),
    })
}

fn t_column(rows: &[(f64, usize)]) -> Column {
    Column::Real(rows.iter().map(|r| r.0).collect())
}

fn n_column(rows: &[(f64, usize)]) -> Column {
    Column::Integer(rows.iter().map(|r| Some(r.1 as i64)).collect())
}

/// Operator-norm error with the growing projector `ρ(N^{1/3−ε})`.
pub fn run_uniform_convergence(cfg: &ExperimentConfig) -> Result<ResultTable> {
    cfg.validate()?;
    let grid = cells(cfg, &cfg.n_sweep);
    struct Row {
        energy: f64,
        top: Option<usize>,
        err: f64,
        quad: f64,
    }
    let rows: Vec<Row> = grid
        .par_iter()
        .map(|&(t, n)| {
            let energy = uniform_energy(n, cfg.epsilon);
            let mut l_max = 0;
            while ((l_max * (l_max + 1)) as f64) < energy {
                l_max += 1;
            }
            let r = SliceConfig::new(cfg.bump, t, n, Some(energy), l_max).and_then(|sc| {
                let (err, quad) = error_norm_with_quad(&sc)?;
                Ok(Row {
                    energy,
                    top: sc.top_degree(),
                    err,
                    quad,
                })
            });
            at_cell(t, n, r)
        })
        .collect::<Result<_>>()?;

    // envelope (E+1)³t²/N scaled by a least-squares constant per time
    let raw: Vec<f64> = grid
        .iter()
        .zip(&rows)
        .map(|(&(t, n), r)| (r.energy + 1.0).powi(3) * t * t / n as f64)
        .collect();
    let mut envelope = vec![0.0; rows.len()];
    let mut fits = Vec::new();
    for t in cfg.times() {
        let idx: Vec<usize> = (0..grid.len()).filter(|&i| grid[i].0 == t).collect();
        let logs: Vec<f64> = idx
            .iter()
            .filter(|&&i| rows[i].err > 0.0)
            .map(|&i| rows[i].err.ln() - raw[i].ln())
            .collect();
        let c = if logs.is_empty() {
            0.0
        } else {
            (logs.iter().sum::<f64>() / logs.len() as f64).exp()
        };
        for &i in &idx {
            envelope[i] = c * raw[i];
        }
        let ns: Vec<f64> = idx.iter().map(|&i| grid[i].1 as f64).collect();
        let es: Vec<f64> = idx.iter().map(|&i| rows[i].err).collect();
        fits.push(
            json!({ "t": t, "envelope_constant": c, "loglog_slope": loglog_slope(&ns, &es) }),
        );
    }

    let mut table = ResultTable::new();
    table.metadata = base_metadata("converge", cfg);
    table.metadata.insert("fits".into(), json!(fits));
    table.push_column("t", t_column(&grid))?;
    table.push_column("n", n_column(&grid))?;
    table.push_column(
        "energy",
        Column::Real(rows.iter().map(|r| r.energy).collect()),
    )?;
    table.push_column(
        "top_degree",
        Column::Integer(rows.iter().map(|r| r.top.map(|l| l as i64)).collect()),
    )?;
    table.push_column(
        "error_norm",
        Column::Real(rows.iter().map(|r| r.err).collect()),
    )?;
    table.push_column("envelope", Column::Real(envelope))?;
    table.push_column(
        "quad_error",
        Column::Real(rows.iter().map(|r| r.quad).collect()),
    )?;
    Ok(table)
}

/// `‖{U_χ(t/N)}^N ρ(N) f − e^{itΔ/2} f‖` and the same without the projector.
pub fn run_strong_convergence(cfg: &ExperimentConfig) -> Result<ResultTable> {
    cfg.validate()?;
    let f = cfg.test_state();
    let l_max = f.l_max();
    let grid = cells(cfg, &cfg.n_sweep);
    let rows: Vec<(f64, f64, f64)> = grid
        .par_iter()
        .map(|&(t, n)| {
            let r = slice_eigenvalues(t / n as f64, l_max, &cfg.bump).map(|ev| {
                let exact = exact_propagator(&f, t);
                let mu: Vec<Complex64> = (0..=l_max).map(|l| ev.get(l).powu(n as u32)).collect();
                let projected = f.map_degrees(|l| {
                    if in_projector(l, n as f64) {
                        mu[l]
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                });
                let unprojected = f.map_degrees(|l| mu[l]);
                (
                    (&projected - &exact).norm(),
                    (&unprojected - &exact).norm(),
                    ev.max_quad_error(),
                )
            });
            at_cell(t, n, r)
        })
        .collect::<Result<_>>()?;

    let mut table = ResultTable::new();
    table.metadata = base_metadata("strong", cfg);
    table.metadata.insert("state_norm".into(), json!(f.norm()));
    table.metadata.insert("state_l_max".into(), json!(l_max));
    table.push_column("t", t_column(&grid))?;
    table.push_column("n", n_column(&grid))?;
    table.push_column(
        "error_projected",
        Column::Real(rows.iter().map(|r| r.0).collect()),
    )?;
    table.push_column(
        "error_unprojected",
        Column::Real(rows.iter().map(|r| r.1).collect()),
    )?;
    table.push_column(
        "quad_error",
        Column::Real(rows.iter().map(|r| r.2).collect()),
    )?;
    Ok(table)
}

/// Degrees where one slice shrinks by more than half, and the resulting
/// lower bound on the unprojected error.
pub fn run_counterexample(cfg: &ExperimentConfig) -> Result<ResultTable> {
    cfg.validate()?;
    let grid = cells(cfg, &cfg.scan_n_sweep);
    struct Row {
        ceiling: usize,
        l_n: Option<usize>,
        abs_alpha: f64,
        abs_pow: f64,
        lower: f64,
        parseval: f64,
        quad: f64,
    }
    let rows: Vec<Row> = grid
        .par_iter()
        .map(|&(t, n)| {
            let ceiling = counterexample_ceiling(n, t);
            let r = slice_eigenvalues(t / n as f64, ceiling, &cfg.bump).map(|ev| {
                let l_n = (0..=ceiling).find(|&l| ev.get(l).norm() < 0.5);
                let (abs_alpha, abs_pow, lower) = match l_n {
                    Some(l) => {
                        let a = ev.get(l);
                        let pow = a.powu(n as u32);
                        (
                            a.norm(),
                            pow.norm(),
                            (pow - propagator_multiplier(l, t)).norm(),
                        )
                    }
                    None => (f64::NAN, f64::NAN, f64::NAN),
                };
                let parseval = ev
                    .alpha()
                    .iter()
                    .enumerate()
                    .map(|(l, a)| (2 * l + 1) as f64 * a.norm_sqr())
                    .sum();
                Row {
                    ceiling,
                    l_n,
                    abs_alpha,
                    abs_pow,
                    lower,
                    parseval,
                    quad: ev.max_quad_error(),
                }
            });
            at_cell(t, n, r)
        })
        .collect::<Result<_>>()?;

    let mut table = ResultTable::new();
    table.metadata = base_metadata("counterexample", cfg);
    table.metadata.insert(
        "parseval_reference".into(),
        json!(parseval_reference(&cfg.bump)?),
    );
    let missing: Vec<_> = grid
        .iter()
        .zip(&rows)
        .filter(|(_, r)| r.l_n.is_none())
        .map(|(&(t, n), r)| json!({ "t": t, "n": n, "scan_ceiling": r.ceiling }))
        .collect();
    table.metadata.insert("not_found".into(), json!(missing));
    table.push_column("t", t_column(&grid))?;
    table.push_column("n", n_column(&grid))?;
    table.push_column(
        "scan_ceiling",
        Column::Integer(rows.iter().map(|r| Some(r.ceiling as i64)).collect()),
    )?;
    table.push_column(
        "found",
        Column::Integer(rows.iter().map(|r| Some(r.l_n.is_some() as i64)).collect()),
    )?;
    table.push_column(
        "l_n",
        Column::Integer(rows.iter().map(|r| r.l_n.map(|l| l as i64)).collect()),
    )?;
    table.push_column(
        "abs_alpha",
        Column::Real(rows.iter().map(|r| r.abs_alpha).collect()),
    )?;
    table.push_column(
        "abs_alpha_pow_n",
        Column::Real(rows.iter().map(|r| r.abs_pow).collect()),
    )?;
    table.push_column(
        "lower_bound",
        Column::Real(rows.iter().map(|r| r.lower).collect()),
    )?;
    table.push_column(
        "bound_target",
        Column::Real(
            grid.iter()
                .map(|&(_, n)| 1.0 - 0.5f64.powi(n.min(2000) as i32))
                .collect(),
        ),
    )?;
    table.push_column(
        "parseval_sum",
        Column::Real(rows.iter().map(|r| r.parseval).collect()),
    )?;
    table.push_column(
        "parseval_ratio",
        Column::Real(
            grid.iter()
                .zip(&rows)
                .map(|(&(t, n), r)| r.parseval * (t / n as f64).powi(2))
                .collect(),
        ),
    )?;
    table.push_column(
        "quad_error",
        Column::Real(rows.iter().map(|r| r.quad).collect()),
    )?;
    Ok(table)
}

/// Van Vleck determinant and residual identities against finite differences.
pub fn run_verification_suite(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let theta_min = 0.1f64.asin();
    let mut pairs = Vec::with_capacity(VAN_VLECK_PAIRS);
    while pairs.len() < VAN_VLECK_PAIRS {
        let th1 = rng.gen_range(theta_min..PI - theta_min);
        let ph1 = rng.gen_range(0.0..2.0 * PI);
        let th2 = rng.gen_range(theta_min..PI - theta_min);
        let ph2 = rng.gen_range(0.0..2.0 * PI);
        let t = rng.gen_range(0.5..2.0);
        let d = geodesic_distance(
            &Point3::from_spherical(th1, ph1),
            &Point3::from_spherical(th2, ph2),
        );
        if (0.2..=2.8).contains(&d) {
            pairs.push((t, th1, ph1, th2, ph2, d));
        }
    }
    let vv_err = pairs
        .par_iter()
        .map(|&(t, th1, ph1, th2, ph2, d)| {
            let exact = van_vleck(t, d)?;
            let num = van_vleck_numeric(t, th1, ph1, th2, ph2, VAN_VLECK_STEP)?;
            Ok(((num - exact) / exact).abs())
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);

    let lattice: Vec<(f64, f64)> = (0..PDE_LATTICE)
        .flat_map(|i| {
            let t = 0.5 + 1.5 * i as f64 / (PDE_LATTICE - 1) as f64;
            (0..PDE_LATTICE).map(move |j| (t, 0.2 + 2.3 * j as f64 / (PDE_LATTICE - 1) as f64))
        })
        .collect();
    let pde_err = lattice
        .par_iter()
        .map(|&(t, d)| {
            let exact = pde_residual_analytic(t, d)?;
            let num = pde_residual_numeric(t, d, PDE_STEP, false)?;
            Ok((num - exact).norm() / exact.norm())
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);

    // the corrected kernel's residual divided by the kernel is the bracket
    let d_min = 0.2;
    let corr_err = (0..PDE_LATTICE)
        .map(|i| {
            let t = 0.5 + 1.5 * i as f64 / (PDE_LATTICE - 1) as f64;
            let res = pde_residual_numeric(t, d_min, PDE_STEP, true)?;
            let bracket = res / kernel(t, d_min)?.value;
            Ok((bracket - corrected_residual_bracket(d_min)).norm())
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);

    let checks = [
        ("van_vleck", VAN_VLECK_PAIRS, vv_err, 1e-4),
        ("pde_residual", PDE_LATTICE * PDE_LATTICE, pde_err, 1e-4),
        ("corrected_bracket", PDE_LATTICE, corr_err, 1e-6),
    ];
    let mut table = ResultTable::new();
    table.metadata = base_metadata("verify", cfg);
    table
        .metadata
        .insert("van_vleck_step".into(), json!(VAN_VLECK_STEP));
    table.metadata.insert("pde_step".into(), json!(PDE_STEP));
    table
        .metadata
        .insert("corrected_bracket_d".into(), json!(d_min));
    table.push_column(
        "check",
        Column::Text(checks.iter().map(|c| c.0.to_string()).collect()),
    )?;
    table.push_column(
        "samples",
        Column::Integer(checks.iter().map(|c| Some(c.1 as i64)).collect()),
    )?;
    table.push_column(
        "max_error",
        Column::Real(checks.iter().map(|c| c.2).collect()),
    )?;
    table.push_column(
        "threshold",
        Column::Real(checks.iter().map(|c| c.3).collect()),
    )?;
    table.push_column(
        "passed",
        Column::Integer(checks.iter().map(|c| Some((c.2 < c.3) as i64)).collect()),
    )?;
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(n: &[usize]) -> ExperimentConfig {
        ExperimentConfig {
            n_sweep: n.to_vec(),
            scan_n_sweep: n.to_vec(),
            extra_t: vec![],
            ..Default::default()
        }
    }

    #[test]
    fn parseval_constant_matches_quadrature() {
        let q = parseval_reference(&BumpProfile::default()).unwrap();
        assert!((q - PARSEVAL_REFERENCE_CONSTANT).abs() < 1e-12, "{q}");
    }

    #[test]
    fn single_slice_row_is_the_one_step_error() {
        let cfg = small(&[1, 2]);
        let table = run_uniform_convergence(&cfg).unwrap();
        // E = 1 keeps only l = 0
        let ev = slice_eigenvalues(1.0, 0, &cfg.bump).unwrap();
        assert_eq!(
            table.real("error_norm").unwrap()[0],
            (ev.get(0) - 1.0).norm()
        );
    }

    #[test]
    fn frozen_energy_gives_ground_state_only() {
        let mut cfg = small(&[16, 32]);
        cfg.epsilon = 1.0 / 3.0;
        let table = run_uniform_convergence(&cfg).unwrap();
        assert_eq!(table.real("energy").unwrap(), &[1.0, 1.0]);
        assert_eq!(
            table.column("top_degree").unwrap().as_integer().unwrap(),
            &[Some(0), Some(0)]
        );
    }

    #[test]
    fn ground_state_strong_error_is_scalar() {
        let mut cfg = small(&[8, 64]);
        cfg.test_state =
            super::super::TestState::Explicit(crate::spectral::SpectralState::basis(0, 0, 0));
        let table = run_strong_convergence(&cfg).unwrap();
        for (i, &n) in [8usize, 64].iter().enumerate() {
            let a = slice_eigenvalues(1.0 / n as f64, 0, &cfg.bump)
                .unwrap()
                .get(0)
                .powu(n as u32);
            let e = table.real("error_unprojected").unwrap()[i];
            assert!((e - (a - 1.0).norm()).abs() < 1e-15);
        }
    }

    #[test]
    fn strong_error_is_linear_in_the_state() {
        let cfg = small(&[8, 32]);
        let mut doubled = cfg.clone();
        let s = cfg.test_state();
        doubled.test_state = super::super::TestState::Explicit(s.scale(Complex64::new(2.0, 0.0)));
        let a = run_strong_convergence(&cfg).unwrap();
        let b = run_strong_convergence(&doubled).unwrap();
        for col in ["error_projected", "error_unprojected"] {
            for (x, y) in a.real(col).unwrap().iter().zip(b.real(col).unwrap()) {
                assert_eq!(2.0 * x, *y);
            }
        }
    }

    #[test]
    fn counterexample_rows() {
        let table = run_counterexample(&small(&[4, 8])).unwrap();
        let pow = table.real("abs_alpha_pow_n").unwrap();
        let lower = table.real("lower_bound").unwrap();
        for (i, n) in [4i32, 8].into_iter().enumerate() {
            assert!(pow[i] < 0.5f64.powi(n));
            assert!(lower[i] >= 1.0 - 0.5f64.powi(n));
        }
        let ratio = table.real("parseval_ratio").unwrap();
        assert!(
            (ratio[1] - PARSEVAL_REFERENCE_CONSTANT).abs() < 0.05 * PARSEVAL_REFERENCE_CONSTANT
        );
    }

    #[test]
    fn ceiling_covers_small_and_large_n() {
        assert_eq!(counterexample_ceiling(4, 1.0), 8 + 64 + 5);
        assert!(counterexample_ceiling(64, 1.0) >= 101 + 64);
    }
}
