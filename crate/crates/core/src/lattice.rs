//! Evanescent lattice sums for a square array of period `a`.
//!
//! Near the BIC frequency the field radiated by the lattice above its plane
//! is carried by evanescent diffraction orders (l, p) with normal decay
//! constant k̃ = sqrt(4π²(l² + p²)/a² − k²). Folding the ±l, ±p orders into
//! cosines gives the Fourier coefficients of the BIC-mediated cross density
//! of states along one lattice axis.
//!
//! Everything here is computed in units of `a`, so the raw coefficients are
//! dimensionless and only their ratios carry meaning.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Relative change allowed when the inner-sum truncation is doubled.
pub const CONVERGENCE_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeParams {
    /// Lattice constant (m).
    pub a: f64,
    /// BIC resonance wavelength (m).
    pub lambda_bic: f64,
    /// Height of the emitters above the lattice plane (m).
    pub z: f64,
    /// Lateral offset of the emitter line from the sphere row, used by the
    /// MD expansion (m).
    pub x0: f64,
    /// Highest cosine harmonic kept.
    pub harmonics: usize,
    /// Number of terms in each inner (transverse) order sum.
    pub sum_terms: usize,
}

impl LatticeParams {
    pub const DEFAULT_HARMONICS: usize = 8;
    pub const DEFAULT_SUM_TERMS: usize = 64;

    pub fn new(a: f64, lambda_bic: f64, z: f64) -> Result<Self> {
        let p = Self {
            a,
            lambda_bic,
            z,
            x0: 0.0,
            harmonics: Self::DEFAULT_HARMONICS,
            sum_terms: Self::DEFAULT_SUM_TERMS,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_x0(mut self, x0: f64) -> Self {
        self.x0 = x0;
        self
    }

    pub fn with_truncation(mut self, harmonics: usize, sum_terms: usize) -> Self {
        self.harmonics = harmonics;
        self.sum_terms = sum_terms;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("a", self.a),
            ("lambda_bic", self.lambda_bic),
            ("z", self.z),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(format!("{name} must be positive, got {v}")));
            }
        }
        if !self.x0.is_finite() {
            return Err(Error::domain("x0 must be finite"));
        }
        if self.lambda_bic <= self.a {
            return Err(Error::domain(format!(
                "lattice is not sub-diffractive: λ = {} m ≤ a = {} m",
                self.lambda_bic, self.a
            )));
        }
        if self.harmonics < 1 || self.sum_terms < 1 {
            return Err(Error::domain("truncation orders must be at least 1"));
        }
        Ok(())
    }

    /// Free-space wavenumber times `a`.
    fn ka(&self) -> f64 {
        2.0 * PI * self.a / self.lambda_bic
    }
}

/// Raw and normalized cosine coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CosineExpansion {
    pub gamma_raw: Vec<f64>,
    /// γₙ / Σγⱼ.
    pub c_n: Vec<f64>,
    pub n_terms: usize,
    /// Largest relative change of any γ when the inner sums were doubled;
    /// zero for expansions built directly from a list.
    pub max_rel_change: f64,
}

impl CosineExpansion {
    /// Σ cₙ cos(2πn x/a).
    pub fn evaluate(&self, x_over_a: f64) -> f64 {
        self.c_n
            .iter()
            .enumerate()
            .map(|(n, c)| c * (2.0 * PI * n as f64 * x_over_a).cos())
            .sum()
    }
}

/// Decay constant k̃ of the evanescent order (l, p), in 1/m.
pub fn evanescent_kz(l: i64, p: i64, k: f64, a: f64) -> Result<f64> {
    if l == 0 && p == 0 {
        return Err(Error::domain("propagating order, not evanescent"));
    }
    let g2 = 4.0 * PI * PI * ((l * l + p * p) as f64) / (a * a);
    let arg = g2 - k * k;
    if !(arg > 0.0) {
        return Err(Error::domain(format!(
            "order ({l}, {p}) is propagating at k = {k} 1/m"
        )));
    }
    Ok(arg.sqrt())
}

/// k̃a for order (l, p), with k given as ka.
fn kz_a(l: usize, p: usize, ka: f64) -> f64 {
    (4.0 * PI * PI * ((l * l + p * p) as f64) - ka * ka).sqrt()
}

fn ed_term(l: usize, p: usize, ka: f64, z_a: f64) -> f64 {
    let kz = kz_a(l, p, ka);
    let r = kz / ka;
    (1.0 + r * r) * (-kz * z_a).exp() / kz
}

fn ed_raw(params: &LatticeParams, inner: usize) -> Vec<f64> {
    let ka = params.ka();
    let z_a = params.z / params.a;
    (0..=params.harmonics)
        .map(|l| {
            let tail: f64 = (1..=inner).map(|p| ed_term(l, p, ka, z_a)).sum();
            if l == 0 {
                tail
            } else {
                ed_term(l, 0, ka, z_a) + 2.0 * tail
            }
        })
        .collect()
}

fn md_raw(params: &LatticeParams, inner: usize) -> Vec<f64> {
    let ka = params.ka();
    let z_a = params.z / params.a;
    let x_a = params.x0 / params.a;
    (0..=params.harmonics)
        .map(|p| {
            let s: f64 = (1..=inner)
                .map(|l| {
                    let kz = kz_a(l, p, ka);
                    let lf = l as f64;
                    (2.0 * PI * lf / ka) * (2.0 * PI * lf * x_a).sin() * (-kz * z_a).exp() / kz
                })
                .sum();
            if p == 0 {
                s
            } else {
                2.0 * s
            }
        })
        .collect()
}

fn converged(
    params: &LatticeParams,
    what: &str,
    raw: fn(&LatticeParams, usize) -> Vec<f64>,
) -> Result<(Vec<f64>, f64)> {
    params.validate()?;
    let coarse = raw(params, params.sum_terms);
    let fine = raw(params, 2 * params.sum_terms);
    let mut worst: f64 = 0.0;
    for (n, (c, f)) in coarse.iter().zip(&fine).enumerate() {
        let diff = (f - c).abs();
        if diff == 0.0 {
            continue;
        }
        let rel = diff / f.abs().max(f64::MIN_POSITIVE);
        if rel > CONVERGENCE_TOL {
            return Err(Error::NotConverged {
                what: format!("{what} coefficient γ{n}"),
                rel_change: rel,
            });
        }
        worst = worst.max(rel);
    }
    Ok((coarse, worst))
}

/// Raw ED coefficients γ₀..γ_N and the convergence diagnostic.
///
/// γ₀ collects the l = 0 column (p ≥ 1); for l ≥ 1 the p = 0 order enters
/// once and the ±p pairs twice.
pub fn ed_raw_coefficients(params: &LatticeParams) -> Result<(Vec<f64>, f64)> {
    converged(params, "ED", ed_raw)
}

/// Raw MD coefficients of cos(2πp y/a), p = 0..N.
pub fn md_raw_coefficients(params: &LatticeParams) -> Result<(Vec<f64>, f64)> {
    converged(params, "MD", md_raw)
}

/// Cosine expansion for the electric-dipole BIC (out-of-plane emitters).
pub fn ed_cosine_coefficients(params: &LatticeParams) -> Result<CosineExpansion> {
    let (raw, rel) = ed_raw_coefficients(params)?;
    let mut e = normalize(&raw)?;
    e.max_rel_change = rel;
    Ok(e)
}

/// Cosine expansion for the magnetic-dipole BIC (in-plane emitters offset
/// by `x0` from the sphere row).
pub fn md_cosine_coefficients(params: &LatticeParams) -> Result<CosineExpansion> {
    let (raw, rel) = md_raw_coefficients(params)?;
    let mut e = normalize(&raw)?;
    e.max_rel_change = rel;
    Ok(e)
}

/// Scale a coefficient list to unit sum.
pub fn normalize(gamma_raw: &[f64]) -> Result<CosineExpansion> {
    if gamma_raw.iter().any(|g| !g.is_finite()) {
        return Err(Error::domain("coefficients must be finite"));
    }
    let sum: f64 = gamma_raw.iter().sum();
    if sum == 0.0 {
        return Err(Error::domain("coefficients sum to zero; cannot normalize"));
    }
    Ok(CosineExpansion {
        gamma_raw: gamma_raw.to_vec(),
        c_n: gamma_raw.iter().map(|g| g / sum).collect(),
        n_terms: gamma_raw.len(),
        max_rel_change: 0.0,
    })
}
