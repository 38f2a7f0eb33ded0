//! Single-mode model of the BIC-mediated cross density of states.
//!
//! ```text
//! Γ₁₂(d) = Γ₁₁ β J₀(k∥res |d|) Σₙ cₙ cos(2πn d/a)
//! ```
//!
//! The Bessel factor is the envelope set by the detuning from the BIC, the
//! cosine series the lattice-periodic oscillation. Their product with β is
//! the distance-dependent effective β-factor β̄(d).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::bessel::j0;
use crate::{Error, Result};

/// Which of the two metasurface BICs a mode belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BicKind {
    /// Out-of-plane electric dipoles; couples to z-oriented emitters.
    Ed,
    /// In-plane magnetic dipoles; couples to in-plane emitters.
    Md,
}

impl BicKind {
    /// Shortest separation, in lattice constants, at which the single-mode
    /// model describes the full CDOS.
    pub fn min_valid_lattice_distance(self) -> f64 {
        match self {
            BicKind::Ed => 5.0,
            BicKind::Md => 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BicMode {
    pub kind: BicKind,
    /// Resonance wavelength (m).
    pub lambda_bic: f64,
    /// Lattice constant (m).
    pub a: f64,
    /// Peak Γ₁₁/Γ₀.
    pub purcell: f64,
    /// Fraction of emission into the BIC, in [0, 1].
    pub beta: f64,
    /// In-plane resonance wavevector (rad/m).
    pub k_res: f64,
    /// Cosine coefficients of the oscillating factor.
    pub c_n: Vec<f64>,
    pub q_factor: f64,
    /// Resonance full width at half maximum (m).
    pub fwhm: f64,
    /// Divide the oscillating factor by Σcₙ so that osc(0) = 1.
    #[serde(default)]
    pub renormalize_osc: bool,
}

pub const ED_LAMBDA: f64 = 552.0e-9;
pub const MD_LAMBDA: f64 = 708.9e-9;
pub const LATTICE_A: f64 = 400e-9;
pub const ED_PURCELL: f64 = 46.9;
pub const MD_PURCELL: f64 = 13.7;
pub const ED_FWHM: f64 = 2.0e-9;
pub const MD_FWHM: f64 = 0.05e-9;
/// Reference ED cosine coefficients (they sum to 0.998).
pub const ED_C_N: [f64; 5] = [0.273, 0.516, 0.160, 0.048, 0.001];
/// Reference MD cosine coefficients (they sum to 0.998).
pub const MD_C_N: [f64; 3] = [0.642, 0.351, 0.005];

/// rad/µm → rad/m.
const PER_UM: f64 = 1e6;

impl BicMode {
    /// Validate a user-built mode. A cosine list whose sum is more than 1%
    /// away from one is accepted with a warning.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("lambda_bic", self.lambda_bic),
            ("a", self.a),
            ("q_factor", self.q_factor),
            ("fwhm", self.fwhm),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(format!("{name} must be positive, got {v}")));
            }
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::domain(format!(
                "β must lie in [0, 1], got {}",
                self.beta
            )));
        }
        if !(self.purcell >= 1.0 && self.purcell.is_finite()) {
            return Err(Error::domain(format!(
                "Purcell factor must be at least 1, got {}",
                self.purcell
            )));
        }
        if !(self.k_res >= 0.0 && self.k_res.is_finite()) {
            return Err(Error::domain(format!(
                "k_res must be non-negative, got {}",
                self.k_res
            )));
        }
        if self.c_n.is_empty() || self.c_n.iter().any(|c| !c.is_finite()) {
            return Err(Error::domain(
                "c_n must be a non-empty list of finite values",
            ));
        }
        let sum = self.c_n_sum();
        if (sum - 1.0).abs() > 0.01 {
            log::warn!("cosine coefficients sum to {sum}, not 1");
        }
        Ok(())
    }

    fn preset(kind: BicKind, beta: f64, k_res_per_um: f64) -> Self {
        let (lambda_bic, purcell, fwhm, c_n) = match kind {
            BicKind::Ed => (ED_LAMBDA, ED_PURCELL, ED_FWHM, ED_C_N.to_vec()),
            BicKind::Md => (MD_LAMBDA, MD_PURCELL, MD_FWHM, MD_C_N.to_vec()),
        };
        Self {
            kind,
            lambda_bic,
            a: LATTICE_A,
            purcell,
            beta,
            k_res: k_res_per_um * PER_UM,
            c_n,
            q_factor: lambda_bic / fwhm,
            fwhm,
            renormalize_osc: false,
        }
    }

    /// ED-BIC fit to the infinite-surface CDOS.
    pub fn ed_infinite() -> Self {
        Self::preset(BicKind::Ed, 0.7518, 0.219)
    }

    /// MD-BIC fit to the infinite-surface CDOS.
    pub fn md_infinite() -> Self {
        Self::preset(BicKind::Md, 0.8243, 0.125)
    }

    /// ED-BIC fit to the finite (21 × 21) array.
    pub fn ed_finite() -> Self {
        Self::preset(BicKind::Ed, 0.4480, 0.581)
    }

    /// MD-BIC fit to the finite (21 × 21) array.
    pub fn md_finite() -> Self {
        Self::preset(BicKind::Md, 0.8179, 0.562)
    }

    pub fn c_n_sum(&self) -> f64 {
        self.c_n.iter().sum()
    }

    /// Σ cₙ cos(2πn d/a), optionally divided by Σcₙ.
    pub fn osc(&self, d: f64) -> f64 {
        let s: f64 = self
            .c_n
            .iter()
            .enumerate()
            .map(|(n, c)| c * (2.0 * PI * n as f64 * d / self.a).cos())
            .sum();
        if self.renormalize_osc {
            s / self.c_n_sum()
        } else {
            s
        }
    }

    /// J₀(k∥res |d|).
    pub fn envelope(&self, d: f64) -> f64 {
        j0(self.k_res * d.abs())
    }

    /// Shortest separation (m) at which the model is trusted.
    pub fn min_valid_distance(&self) -> f64 {
        self.kind.min_valid_lattice_distance() * self.a
    }

    pub fn in_validity_range(&self, d: f64) -> bool {
        d.abs() >= self.min_valid_distance() * (1.0 - 1e-12)
    }
}

/// Collective decay rate Γ₁₂(d) for emitters with single rate `gamma11`.
pub fn cdos(d: f64, mode: &BicMode, gamma11: f64) -> f64 {
    gamma11 * effective_beta(d, mode)
}

/// β̄(d) = β osc(d) env(d).
pub fn effective_beta(d: f64, mode: &BicMode) -> f64 {
    mode.beta * mode.osc(d) * mode.envelope(d)
}
