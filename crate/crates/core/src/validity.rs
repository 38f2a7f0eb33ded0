//! Weak/strong coupling threshold between an emitter and the BIC.
//!
//! With coupling g² = F_p Γ₀ Γ_BIC / 4 and Γ_BIC = 2πc/(λQ), strong coupling
//! requires 4g² > (Γ₀² + Γ_BIC²)/2, i.e.
//!
//! ```text
//! F_p > Γ₀λQ/(4πc) + πc/(Γ₀λQ)
//! ```
//!
//! For realistic dipoles the first term is tiny and dropping it gives the
//! simplified criterion F_p > πc/(Γ₀λQ), which can be solved for p.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::constants::{angular_frequency, cm_to_debye, gamma0, C, EPS0, HBAR};
use crate::{Error, Result};

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be positive, got {v}")))
    }
}

/// Q = λ / FWHM.
pub fn q_factor(lambda_bic: f64, fwhm: f64) -> Result<f64> {
    positive("lambda_bic", lambda_bic)?;
    positive("fwhm", fwhm)?;
    Ok(lambda_bic / fwhm)
}

/// Γ_BIC = 2πc/(λQ) in 1/s.
pub fn bic_linewidth_rate(lambda_bic: f64, q: f64) -> Result<f64> {
    positive("lambda_bic", lambda_bic)?;
    positive("q", q)?;
    Ok(2.0 * PI * C / (lambda_bic * q))
}

/// Dipole moment (C·m) at which the simplified criterion becomes an
/// equality.
///
/// F_p = πc/(Γ₀λQ) with Γ₀ = ω³p²/(3πε₀ħc³) gives
/// p² = πc · 3πε₀ħc³ / (F_p ω³ λ Q) = 3π²ε₀ħc⁴ / (F_p ω³ λ Q).
pub fn max_dipole_moment(purcell: f64, lambda_bic: f64, q: f64) -> Result<f64> {
    positive("purcell", purcell)?;
    positive("lambda_bic", lambda_bic)?;
    positive("q", q)?;
    let w = angular_frequency(lambda_bic);
    let c2 = C * C;
    Ok((3.0 * PI * PI * EPS0 * HBAR * c2 * c2 / (purcell * w * w * w * lambda_bic * q)).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Weak,
    Strong,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingRegimeReport {
    pub q_factor: f64,
    /// Γ_BIC in 1/s.
    pub gamma_bic: f64,
    /// Γ₀ of the emitter in 1/s.
    pub gamma0: f64,
    pub p_max: f64,
    pub p_max_debye: f64,
    /// Decided by the full inequality.
    pub regime: Regime,
    /// Decided by the simplified inequality.
    pub regime_simplified: Regime,
    /// p / p_max.
    pub margin: f64,
    /// Γ₀λQ/(4πc), the term dropped by the simplified criterion.
    pub dropped_term: f64,
    /// πc/(Γ₀λQ).
    pub main_term: f64,
    pub criteria_agree: bool,
}

/// Classify an emitter with dipole `p` (C·m) coupled to a BIC.
pub fn regime_report(
    p: f64,
    purcell: f64,
    lambda_bic: f64,
    fwhm: f64,
) -> Result<CouplingRegimeReport> {
    let q = q_factor(lambda_bic, fwhm)?;
    let gamma_bic = bic_linewidth_rate(lambda_bic, q)?;
    let g0 = gamma0(p, lambda_bic)?;
    let p_max = max_dipole_moment(purcell, lambda_bic, q)?;
    let dropped_term = g0 * lambda_bic * q / (4.0 * PI * C);
    let main_term = PI * C / (g0 * lambda_bic * q);
    let classify = |strong: bool| if strong { Regime::Strong } else { Regime::Weak };
    let regime = classify(purcell > dropped_term + main_term);
    let regime_simplified = classify(purcell > main_term);
    Ok(CouplingRegimeReport {
        q_factor: q,
        gamma_bic,
        gamma0: g0,
        p_max,
        p_max_debye: cm_to_debye(p_max),
        regime,
        regime_simplified,
        margin: p / p_max,
        dropped_term,
        main_term,
        criteria_agree: regime == regime_simplified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::DEBYE;

    #[test]
    fn q_examples() {
        assert!((q_factor(552e-9, 2e-9).unwrap() - 276.0).abs() < 1e-12);
        assert!((q_factor(708.9e-9, 0.05e-9).unwrap() - 14178.0).abs() < 1e-8);
        assert_eq!(q_factor(600e-9, 600e-9).unwrap(), 1.0);
        assert!(q_factor(600e-9, 0.0).is_err());
    }

    #[test]
    fn linewidth_examples() {
        let g = bic_linewidth_rate(552e-9, 276.0).unwrap();
        assert!((g / 12_363_812_534_845.97 - 1.0).abs() < 1e-14);
        assert_eq!(bic_linewidth_rate(552e-9, 552.0).unwrap(), g / 2.0);
        assert!(bic_linewidth_rate(-1.0, 2.0).is_err());
    }

    #[test]
    fn coupling_constant_inverts_to_purcell() {
        let f = 46.9;
        let g0 = gamma0(1e-29, 552e-9).unwrap();
        let gb = bic_linewidth_rate(552e-9, 276.0).unwrap();
        let g2 = f * g0 * gb / 4.0;
        assert!((4.0 * g2 / (g0 * gb) / f - 1.0).abs() < 1e-15);
    }

    #[test]
    fn p_max_values() {
        let ed = max_dipole_moment(46.9, 552e-9, 276.0).unwrap();
        assert!((ed / 8.868_734e-28 - 1.0).abs() < 1e-6, "{ed}");
        let md = max_dipole_moment(13.7, 708.9e-9, 14178.0).unwrap();
        assert!((md / 2.940_226e-28 - 1.0).abs() < 1e-6, "{md}");
        let scaled = max_dipole_moment(4.0 * 46.9, 552e-9, 276.0).unwrap();
        assert!((scaled / ed - 0.5).abs() < 1e-15);
    }

    #[test]
    fn p_max_is_the_simplified_equality() {
        for (f, lam, q) in [
            (46.9, 552e-9, 276.0),
            (13.7, 708.9e-9, 14178.0),
            (3.0, 1e-6, 50.0),
        ] {
            let p = max_dipole_moment(f, lam, q).unwrap();
            let rhs = PI * C / (gamma0(p, lam).unwrap() * lam * q);
            assert!((rhs / f - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn reports() {
        let r = regime_report(1e-29, 46.9, 552e-9, 2e-9).unwrap();
        assert_eq!(r.regime, Regime::Weak);
        assert!(r.criteria_agree);
        assert!((r.margin - 1.0 / 88.687_34).abs() < 1e-6);
        let s = regime_report(2.0 * r.p_max, 46.9, 552e-9, 2e-9).unwrap();
        assert_eq!(s.regime, Regime::Strong);
        let three_debye = regime_report(3.0 * DEBYE, 46.9, 552e-9, 2e-9).unwrap();
        assert_eq!(three_debye.regime, Regime::Weak);
    }
}
