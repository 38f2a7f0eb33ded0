//! Least-squares extraction of model parameters from tabulated data.
//!
//! * [`fit_cdos`]: (β, k∥res) of the single-mode CDOS model from a line cut
//!   Γ₁₂(d)/Γ₀, seeded by a 50 × 50 grid and refined by Levenberg–Marquardt.
//! * [`fit_purcell`]: (A, B) of the height profile 1 + A e^{−B(z−R)/a}.
//!
//! Residuals are weighted uniformly.

mod data;
mod lm;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::bessel::j0;
use crate::cdos::{cdos, BicMode};
use crate::{Error, Result};

pub use data::{load_series, parse_series, LengthUnit, SampleSeries, SeriesFormat};
pub use lm::{levenberg_marquardt, LmOptions, LmOutcome};

/// Number of grid points per axis in the seeding scan of [`fit_cdos`].
pub const SEED_GRID: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params: BTreeMap<String, f64>,
    /// Root-mean-square residual in the units of the data ordinate.
    pub residual_rms: f64,
    pub n_points: usize,
    pub converged: bool,
    /// Variance estimates σ²·diag((JᵀJ)⁻¹); empty if JᵀJ is singular.
    pub covariance_diag: BTreeMap<String, f64>,
    pub iterations: usize,
    /// Cost after the seed and after each accepted step.
    pub cost_history: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

impl FitResult {
    pub fn param(&self, name: &str) -> f64 {
        self.params.get(name).copied().unwrap_or(f64::NAN)
    }
}

fn build_result(names: &[&str], out: &LmOutcome, n: usize, y_scale: f64) -> FitResult {
    let m = names.len();
    let params = names
        .iter()
        .zip(&out.x)
        .map(|(k, v)| (k.to_string(), *v))
        .collect();
    let dof = n.saturating_sub(m).max(1) as f64;
    let sigma2 = 2.0 * out.cost / dof;
    let covariance_diag = out
        .normal_inverse_diag
        .as_ref()
        .map(|d| {
            names
                .iter()
                .zip(d)
                .map(|(k, v)| (k.to_string(), sigma2 * v))
                .collect()
        })
        .unwrap_or_default();
    let diagnostic = if out.normal_inverse_diag.is_none() {
        Some("normal matrix is singular: parameters are not identifiable from these data".into())
    } else if !out.converged {
        Some(format!(
            "stopped after {} iterations with gradient cosine {:.3e}",
            out.iterations, out.gradient_cosine
        ))
    } else {
        None
    };
    FitResult {
        params,
        residual_rms: y_scale * (2.0 * out.cost / n as f64).sqrt(),
        n_points: n,
        converged: out.converged,
        covariance_diag,
        iterations: out.iterations,
        cost_history: out.cost_history.clone(),
        diagnostic,
    }
}

/// Fit β and k∥res of `mode_template` to Γ₁₂(d)/Γ₀ samples with d ≥ `d_min`
/// (defaults to the mode's validity distance).
///
/// Residuals are formed on Γ₁₂/Γ₁₁ = y/F_p against β J₀(k d) osc(d); the
/// other mode fields are held fixed.
pub fn fit_cdos(
    data: &SampleSeries,
    mode_template: &BicMode,
    d_min: Option<f64>,
) -> Result<FitResult> {
    mode_template.validate()?;
    let d_min = d_min.unwrap_or_else(|| mode_template.min_valid_distance());
    let (d, y) = data.restricted(d_min * (1.0 - 1e-12));
    if d.len() < 3 {
        return Err(Error::InvalidData(format!(
            "{} points with d ≥ {d_min:e} m; at least 3 are needed to fit 2 parameters",
            d.len()
        )));
    }
    let f = mode_template.purcell;
    let target: Vec<f64> = y.iter().map(|v| v / f).collect();
    let osc: Vec<f64> = d.iter().map(|x| mode_template.osc(*x)).collect();
    let residual = |p: &[f64]| -> Vec<f64> {
        d.iter()
            .zip(&osc)
            .zip(&target)
            .map(|((x, o), t)| p[0] * j0(p[1] * x) * o - t)
            .collect()
    };
    let k_max = 0.1 * 2.0 * PI / mode_template.a;
    let mut best = (f64::INFINITY, [0.0, 0.0]);
    for i in 0..SEED_GRID {
        let beta = i as f64 / (SEED_GRID - 1) as f64;
        for j in 0..SEED_GRID {
            let k = k_max * j as f64 / (SEED_GRID - 1) as f64;
            let c: f64 = residual(&[beta, k]).iter().map(|r| r * r).sum();
            if c < best.0 {
                best = (c, [beta, k]);
            }
        }
    }
    let out = levenberg_marquardt(
        residual,
        &best.1,
        &[0.0, 0.0],
        &[1.0, k_max],
        &[1.0, k_max],
        LmOptions {
            residual_floor: 1e-12 * target.iter().fold(0.0f64, |m, v| m.max(v.abs())),
            ..LmOptions::default()
        },
    );
    Ok(build_result(&["beta", "k_res"], &out, d.len(), f))
}

/// 1 + A e^{−B(z−R)/a}.
pub fn purcell_profile(z: f64, amplitude: f64, decay: f64, a: f64, r_sphere: f64) -> f64 {
    1.0 + amplitude * (-decay * (z - r_sphere) / a).exp()
}

/// Fit A and B of the Purcell height profile. Abscissae are heights z (m)
/// measured from the sphere centre and must exceed the radius.
pub fn fit_purcell(data: &SampleSeries, a: f64, r_sphere: f64) -> Result<FitResult> {
    if !(a > 0.0 && r_sphere >= 0.0) {
        return Err(Error::domain(
            "lattice constant must be positive and radius non-negative",
        ));
    }
    if let Some(z) = data.x.iter().find(|z| **z <= r_sphere) {
        return Err(Error::domain(format!(
            "sample at z = {z:e} m lies inside the sphere (radius {r_sphere:e} m)"
        )));
    }
    let n = data.len();
    if n < 3 {
        return Err(Error::InvalidData(format!(
            "{n} points; at least 3 are needed to fit 2 parameters"
        )));
    }
    let u: Vec<f64> = data.x.iter().map(|z| (z - r_sphere) / a).collect();
    let above: Vec<(f64, f64)> = u
        .iter()
        .zip(&data.y)
        .filter(|(_, y)| **y > 1.0 + 1e-12)
        .map(|(u, y)| (*u, (y - 1.0).ln()))
        .collect();
    if above.len() < 2 {
        let mut params = BTreeMap::new();
        params.insert("A".to_string(), 0.0);
        params.insert("B".to_string(), 0.0);
        let rms = (data.y.iter().map(|y| (y - 1.0).powi(2)).sum::<f64>() / n as f64).sqrt();
        return Ok(FitResult {
            params,
            residual_rms: rms,
            n_points: n,
            converged: false,
            covariance_diag: BTreeMap::new(),
            iterations: 0,
            cost_history: vec![0.5 * rms * rms * n as f64],
            diagnostic: Some(
                "data show no enhancement above 1: A = 0 and B is not identifiable".into(),
            ),
        });
    }
    // Log-linear seed: ln(y − 1) = ln A − B u.
    let m = above.len() as f64;
    let (su, sl) = above
        .iter()
        .fold((0.0, 0.0), |acc, (u, l)| (acc.0 + u, acc.1 + l));
    let (mu, ml) = (su / m, sl / m);
    let suu: f64 = above.iter().map(|(u, _)| (u - mu).powi(2)).sum();
    let sul: f64 = above.iter().map(|(u, l)| (u - mu) * (l - ml)).sum();
    let slope = if suu > 0.0 { sul / suu } else { -1.0 };
    let b0 = if slope < 0.0 { -slope } else { 1.0 };
    let a0 = (ml + b0 * mu).exp();
    let residual = |p: &[f64]| -> Vec<f64> {
        u.iter()
            .zip(&data.y)
            .map(|(u, y)| 1.0 + p[0] * (-p[1] * u).exp() - y)
            .collect()
    };
    let out = levenberg_marquardt(
        residual,
        &[a0, b0],
        &[0.0, 0.0],
        &[f64::INFINITY, f64::INFINITY],
        &[a0.max(1e-3), b0.max(1e-3)],
        LmOptions {
            residual_floor: 1e-12 * data.y.iter().fold(0.0f64, |m, v| m.max(v.abs())),
            ..LmOptions::default()
        },
    );
    let mut res = build_result(&["A", "B"], &out, n, 1.0);
    if out.x[0] <= 1e-12 {
        res.converged = false;
        res.diagnostic = Some("amplitude collapsed to 0: B is not identifiable".into());
    }
    Ok(res)
}

fn noisy(values: Vec<f64>, noise_rel: f64, seed: u64) -> Result<Vec<f64>> {
    if !(noise_rel >= 0.0 && noise_rel.is_finite()) {
        return Err(Error::domain(format!(
            "noise level must be non-negative, got {noise_rel}"
        )));
    }
    if noise_rel == 0.0 {
        return Ok(values);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, noise_rel).map_err(|e| Error::domain(e.to_string()))?;
    Ok(values
        .into_iter()
        .map(|v| v * (1.0 + normal.sample(&mut rng)))
        .collect())
}

/// Γ₁₂(d)/Γ₀ = F_p β̄(d) sampled at `d`, with multiplicative Gaussian noise
/// of relative size `noise_rel` drawn from a ChaCha stream seeded by `seed`.
pub fn synthetic_cdos(
    mode: &BicMode,
    d: &[f64],
    noise_rel: f64,
    seed: u64,
) -> Result<SampleSeries> {
    mode.validate()?;
    let y = d.iter().map(|x| cdos(*x, mode, mode.purcell)).collect();
    SampleSeries::new(d.to_vec(), noisy(y, noise_rel, seed)?, "synthetic cdos")
}

/// Purcell height profile sampled at `z`, with multiplicative noise.
pub fn synthetic_purcell(
    amplitude: f64,
    decay: f64,
    a: f64,
    r_sphere: f64,
    z: &[f64],
    noise_rel: f64,
    seed: u64,
) -> Result<SampleSeries> {
    let y = z
        .iter()
        .map(|z| purcell_profile(*z, amplitude, decay, a, r_sphere))
        .collect();
    SampleSeries::new(z.to_vec(), noisy(y, noise_rel, seed)?, "synthetic purcell")
}

/// Evenly spaced separations from the mode's validity distance to `n_a`
/// lattice constants, `per_a` samples per lattice constant.
pub fn standard_separations(mode: &BicMode, n_a: f64, per_a: usize) -> Vec<f64> {
    let start = mode.min_valid_distance();
    let step = mode.a / per_a as f64;
    let count = ((n_a * mode.a - start) / step).floor() as usize;
    (0..=count).map(|i| start + i as f64 * step).collect()
}
