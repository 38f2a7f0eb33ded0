//! Run configuration read from a TOML file.
//!
//! Every field is optional at parse time; each command pulls what it needs
//! and reports missing entries by their dotted path (e.g. `emitters.p`).
//! Lengths carry their unit in the key name.

use std::path::{Path, PathBuf};

use bic_entangle::cdos::{BicKind, BicMode};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: Option<String>,
    pub seed: Option<u64>,
    pub mode: Option<ModeSection>,
    pub emitters: Option<EmitterSection>,
    pub rates: Option<RatesSection>,
    pub simulation: Option<SimulationSection>,
    pub scan: Option<ScanSection>,
    pub lattice: Option<LatticeSection>,
    pub sweep: Option<SweepSection>,
    pub fit: Option<FitSection>,
    pub validity: Option<ValiditySection>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSection {
    /// One of ed_infinite, md_infinite, ed_finite, md_finite. Explicit
    /// fields below override the preset.
    pub preset: Option<String>,
    pub kind: Option<BicKind>,
    pub lambda_bic_nm: Option<f64>,
    pub a_nm: Option<f64>,
    pub purcell: Option<f64>,
    pub beta: Option<f64>,
    pub k_res_per_um: Option<f64>,
    pub c_n: Option<Vec<f64>>,
    pub fwhm_nm: Option<f64>,
    pub renormalize_osc: Option<bool>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmitterSection {
    /// Dipole moment in C·m.
    pub p: Option<f64>,
    pub p_debye: Option<f64>,
    pub lambda0_nm: Option<f64>,
    pub orientation: Option<[f64; 3]>,
    /// Separation used when rates are derived from the BIC mode.
    pub d_nm: Option<f64>,
}

/// Master-equation coefficients in units of Γ₀.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatesSection {
    pub gamma11: Option<f64>,
    pub gamma22: Option<f64>,
    pub gamma12: Option<f64>,
    pub omega12: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    /// End time in units of 1/Γ₀.
    pub t_end: Option<f64>,
    pub n_steps: Option<usize>,
    /// closed_form, rk4 or rk45.
    pub method: Option<String>,
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    pub d_min_nm: Option<f64>,
    pub d_max_nm: Option<f64>,
    pub n_points: Option<usize>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSection {
    pub kind: Option<BicKind>,
    pub a_nm: Option<f64>,
    pub lambda_nm: Option<f64>,
    pub z_nm: Option<f64>,
    /// Lateral offset as a fraction of a.
    pub x0_a: Option<f64>,
    pub harmonics: Option<usize>,
    pub sum_terms: Option<usize>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// Also evaluate C_max from the exact symmetric solution with
    /// Γ₁₁ = Γ₂₂ = F_p, Γ₁₂ = F_p β̄, Ω₁₂ = 0.
    pub numeric: Option<bool>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSection {
    /// cdos or purcell.
    pub model: Option<String>,
    /// Data file, relative to the config file.
    pub data: Option<PathBuf>,
    /// Abscissa unit when the file does not declare one (m, um, nm).
    pub unit: Option<String>,
    pub d_min_nm: Option<f64>,
    pub a_nm: Option<f64>,
    pub r_sphere_nm: Option<f64>,
    /// Generate the data instead of reading it.
    pub synthetic: Option<SyntheticSection>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSection {
    pub noise: Option<f64>,
    /// Separations for cdos data: from the mode validity distance to
    /// `n_a` lattice constants with `per_a` samples per lattice constant.
    pub n_a: Option<f64>,
    pub per_a: Option<usize>,
    /// Purcell profile parameters and heights above the sphere top.
    pub amplitude: Option<f64>,
    pub decay: Option<f64>,
    pub dz_nm: Option<f64>,
    pub n_points: Option<usize>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValiditySection {
    pub p: Option<f64>,
    pub p_debye: Option<f64>,
    pub purcell: Option<f64>,
    pub lambda_nm: Option<f64>,
    pub fwhm_nm: Option<f64>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        Self::from_toml(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Build the BIC mode from `[mode]`.
    pub fn bic_mode(&self) -> Result<BicMode, CliError> {
        let m = section(&self.mode, "mode")?;
        let mut mode = match m.preset.as_deref() {
            Some("ed_infinite") => BicMode::ed_infinite(),
            Some("md_infinite") => BicMode::md_infinite(),
            Some("ed_finite") => BicMode::ed_finite(),
            Some("md_finite") => BicMode::md_finite(),
            Some(other) => {
                return Err(CliError::Config(format!(
                    "mode.preset: unknown preset '{other}' (expected ed_infinite, md_infinite, ed_finite or md_finite)"
                )))
            }
            None => BicMode {
                kind: required(m.kind, "mode.kind")?,
                lambda_bic: required(m.lambda_bic_nm, "mode.lambda_bic_nm")? * 1e-9,
                a: required(m.a_nm, "mode.a_nm")? * 1e-9,
                purcell: required(m.purcell, "mode.purcell")?,
                beta: required(m.beta, "mode.beta")?,
                k_res: required(m.k_res_per_um, "mode.k_res_per_um")? * 1e6,
                c_n: required(m.c_n.clone(), "mode.c_n")?,
                q_factor: 1.0,
                fwhm: required(m.fwhm_nm, "mode.fwhm_nm")? * 1e-9,
                renormalize_osc: false,
            },
        };
        if let Some(v) = m.kind {
            mode.kind = v;
        }
        if let Some(v) = m.lambda_bic_nm {
            mode.lambda_bic = v * 1e-9;
        }
        if let Some(v) = m.a_nm {
            mode.a = v * 1e-9;
        }
        if let Some(v) = m.purcell {
            mode.purcell = v;
        }
        if let Some(v) = m.beta {
            mode.beta = v;
        }
        if let Some(v) = m.k_res_per_um {
            mode.k_res = v * 1e6;
        }
        if let Some(v) = &m.c_n {
            mode.c_n = v.clone();
        }
        if let Some(v) = m.fwhm_nm {
            mode.fwhm = v * 1e-9;
        }
        if let Some(v) = m.renormalize_osc {
            mode.renormalize_osc = v;
        }
        mode.q_factor = mode.lambda_bic / mode.fwhm;
        mode.validate()
            .map_err(|e| CliError::Config(format!("mode: {e}")))?;
        Ok(mode)
    }
}

pub fn section<'a, T>(s: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
    s.as_ref()
        .ok_or_else(|| CliError::Config(format!("missing section [{name}]")))
}

pub fn required<T>(v: Option<T>, path: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Config(format!("missing field {path}")))
}

/// Dipole moment from `p` (C·m) or `p_debye`, exactly one of which must be set.
pub fn dipole(p: Option<f64>, p_debye: Option<f64>, prefix: &str) -> Result<f64, CliError> {
    match (p, p_debye) {
        (Some(p), None) => Ok(p),
        (None, Some(d)) => Ok(bic_entangle::constants::debye_to_cm(d)),
        (None, None) => Err(CliError::Config(format!("missing field {prefix}.p"))),
        (Some(_), Some(_)) => Err(CliError::Config(format!(
            "{prefix}.p and {prefix}.p_debye are mutually exclusive"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_rejected() {
        let e = RunConfig::from_toml("[emitters]\npp = 1.0\n").unwrap_err();
        assert!(e.to_string().contains("pp"));
    }

    #[test]
    fn preset_with_override() {
        let c = RunConfig::from_toml("[mode]\npreset = \"ed_finite\"\nbeta = 0.5\n").unwrap();
        let m = c.bic_mode().unwrap();
        assert_eq!(m.beta, 0.5);
        assert_eq!(m.purcell, 46.9);
    }

    #[test]
    fn explicit_mode_reports_missing_field() {
        let c = RunConfig::from_toml("[mode]\nkind = \"md\"\n").unwrap();
        let e = c.bic_mode().unwrap_err();
        assert_eq!(
            e.to_string(),
            "configuration error: missing field mode.lambda_bic_nm"
        );
    }

    #[test]
    fn dipole_forms() {
        assert_eq!(dipole(Some(1e-29), None, "emitters").unwrap(), 1e-29);
        assert!(dipole(None, None, "emitters")
            .unwrap_err()
            .to_string()
            .contains("emitters.p"));
        assert!(dipole(Some(1.0), Some(1.0), "emitters").is_err());
    }
}
