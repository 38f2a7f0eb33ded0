//! Free-space dyadic Green tensor and the collective rates it produces.
//!
//! The Green tensor between two points separated by **R** is
//! G = (ω/4πc)(−κ + iτ) with θ = 2π|R|/λ and
//!
//! ```text
//! τ_ij = (δ_ij − R̂_iR̂_j) sinθ/θ + (δ_ij − 3R̂_iR̂_j)(cosθ/θ² − sinθ/θ³)
//! κ_ij = −(δ_ij − R̂_iR̂_j) cosθ/θ + (δ_ij − 3R̂_iR̂_j)(sinθ/θ² + cosθ/θ³)
//! ```
//!
//! Inserted into the master-equation coefficients these give
//! Γ₁₂ = (3/2)Γ₀ p̂₁·τ·p̂₂ and Ω₁₂ = (3/4)Γ₀ p̂₁·κ·p̂₂.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::constants::gamma0;
use crate::optimize::nth_local_max;
use crate::{Error, Result, Vec3};

/// Below this phase the two radial functions are taken from their Taylor
/// series; above it the closed forms are accurate to ~1e-14.
pub const SERIES_THRESHOLD: f64 = 0.1;

pub type Tensor3 = [[f64; 3]; 3];

/// A single two-level emitter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmitterConfig {
    /// Position in metres.
    pub position: Vec3,
    /// Unit dipole orientation.
    pub orientation: Vec3,
    /// Dipole magnitude in C·m.
    pub p: f64,
    /// Transition wavelength in metres.
    pub lambda0: f64,
}

impl EmitterConfig {
    pub fn new(position: Vec3, orientation: Vec3, p: f64, lambda0: f64) -> Result<Self> {
        let norm = dot(&orientation, &orientation).sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!(
                "orientation must be a unit vector, |p̂| = {norm}"
            )));
        }
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::domain(format!(
                "dipole moment must be positive, got {p}"
            )));
        }
        if !(lambda0 > 0.0 && lambda0.is_finite()) {
            return Err(Error::domain(format!(
                "wavelength must be positive, got {lambda0}"
            )));
        }
        if position.iter().any(|x| !x.is_finite()) {
            return Err(Error::domain("position must be finite"));
        }
        Ok(Self {
            position,
            orientation,
            p,
            lambda0,
        })
    }
}

/// Coefficients of the two-emitter master equation, in 1/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateSet {
    pub gamma11: f64,
    pub gamma22: f64,
    pub gamma12: f64,
    pub omega12: f64,
    /// Free-space reference rate used for normalisation.
    pub gamma0: f64,
}

impl RateSet {
    /// Validates an externally supplied set. Negative or non-finite rates
    /// are rejected; a Cauchy–Schwarz violation is only logged.
    pub fn new(
        gamma11: f64,
        gamma22: f64,
        gamma12: f64,
        omega12: f64,
        gamma0: f64,
    ) -> Result<Self> {
        let r = Self {
            gamma11,
            gamma22,
            gamma12,
            omega12,
            gamma0,
        };
        if [gamma11, gamma22, gamma12, omega12, gamma0]
            .iter()
            .any(|v| !v.is_finite())
        {
            return Err(Error::domain("rates must be finite"));
        }
        if gamma11 < 0.0 || gamma22 < 0.0 {
            return Err(Error::domain(format!(
                "single-emitter rates must be non-negative (Γ11 = {gamma11}, Γ22 = {gamma22})"
            )));
        }
        if gamma0 <= 0.0 {
            return Err(Error::domain(format!("Γ0 must be positive, got {gamma0}")));
        }
        let excess = r.cauchy_schwarz_excess();
        if excess > 1e-12 * gamma0 {
            log::warn!(
                "|Γ12| exceeds sqrt(Γ11·Γ22) by {:.3e} Γ0; the rate set is not physical",
                excess / gamma0
            );
        }
        Ok(r)
    }

    /// Build from rates expressed in units of Γ₀.
    pub fn from_normalized(g11: f64, g22: f64, g12: f64, o12: f64, gamma0: f64) -> Result<Self> {
        Self::new(
            g11 * gamma0,
            g22 * gamma0,
            g12 * gamma0,
            o12 * gamma0,
            gamma0,
        )
    }

    /// (Γ₁₁, Γ₂₂, Γ₁₂, Ω₁₂) / Γ₀.
    pub fn normalized(&self) -> [f64; 4] {
        [
            self.gamma11 / self.gamma0,
            self.gamma22 / self.gamma0,
            self.gamma12 / self.gamma0,
            self.omega12 / self.gamma0,
        ]
    }

    /// Average single-emitter rate Γ = (Γ₁₁ + Γ₂₂)/2.
    pub fn mean_decay(&self) -> f64 {
        0.5 * (self.gamma11 + self.gamma22)
    }

    /// |Γ₁₂| − sqrt(Γ₁₁Γ₂₂); positive values are unphysical.
    pub fn cauchy_schwarz_excess(&self) -> f64 {
        self.gamma12.abs() - (self.gamma11 * self.gamma22).sqrt()
    }

    pub fn is_symmetric(&self) -> bool {
        (self.gamma11 - self.gamma22).abs() <= 1e-9 * self.gamma11.max(self.gamma22)
    }
}

fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn contract(u: &Vec3, t: &Tensor3, v: &Vec3) -> f64 {
    let mut s = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            s += u[i] * t[i][j] * v[j];
        }
    }
    s
}

fn phase_and_direction(r: &Vec3, lambda: f64) -> (f64, Vec3) {
    let len = dot(r, r).sqrt();
    let theta = 2.0 * PI * len / lambda;
    if len == 0.0 {
        return (0.0, [0.0; 3]);
    }
    (theta, [r[0] / len, r[1] / len, r[2] / len])
}

/// Assemble a(θ)(δ − R̂R̂) + b(θ)(δ − 3R̂R̂).
fn assemble(rhat: &Vec3, transverse: f64, near: f64) -> Tensor3 {
    let mut t = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let delta = if i == j { 1.0 } else { 0.0 };
            let rr = rhat[i] * rhat[j];
            t[i][j] = (delta - rr) * transverse + (delta - 3.0 * rr) * near;
        }
    }
    t
}

/// sinθ/θ and cosθ/θ² − sinθ/θ³.
fn tau_radial(theta: f64) -> (f64, f64) {
    if theta < SERIES_THRESHOLD {
        let t2 = theta * theta;
        let sinc =
            1.0 + t2 * (-1.0 / 6.0 + t2 * (1.0 / 120.0 + t2 * (-1.0 / 5040.0 + t2 / 362_880.0)));
        let near = -1.0 / 3.0
            + t2 * (1.0 / 30.0 + t2 * (-1.0 / 840.0 + t2 * (1.0 / 45_360.0 - t2 / 3_991_680.0)));
        (sinc, near)
    } else {
        let (s, c) = theta.sin_cos();
        (s / theta, (theta * c - s) / (theta * theta * theta))
    }
}

/// Imaginary part of the free-space Green tensor, in units of ω/4πc.
///
/// Returns the analytic limit (2/3)δ at zero separation.
pub fn tau_tensor(r: &Vec3, lambda: f64) -> Tensor3 {
    let (theta, rhat) = phase_and_direction(r, lambda);
    let (sinc, near) = tau_radial(theta);
    assemble(&rhat, sinc, near)
}

/// Real part of the free-space Green tensor (with the sign convention
/// Re G = −(ω/4πc)κ). Diverges as θ⁻³ at contact.
pub fn kappa_tensor(r: &Vec3, lambda: f64) -> Result<Tensor3> {
    let (theta, rhat) = phase_and_direction(r, lambda);
    if theta == 0.0 {
        return Err(Error::domain(
            "coincident emitters: dipole-dipole shift diverges",
        ));
    }
    let (s, c) = theta.sin_cos();
    let t2 = theta * theta;
    Ok(assemble(&rhat, -c / theta, s / t2 + c / (t2 * theta)))
}

/// Γ₁₁, Γ₂₂, Γ₁₂ and Ω₁₂ for two emitters in vacuum.
pub fn free_space_rates(e1: &EmitterConfig, e2: &EmitterConfig) -> Result<RateSet> {
    if e1.lambda0 != e2.lambda0 {
        return Err(Error::domain(format!(
            "emitters must share the transition wavelength ({} m vs {} m)",
            e1.lambda0, e2.lambda0
        )));
    }
    let sep = [
        e1.position[0] - e2.position[0],
        e1.position[1] - e2.position[1],
        e1.position[2] - e2.position[2],
    ];
    let lambda = e1.lambda0;
    let g1 = gamma0(e1.p, lambda)?;
    let g2 = gamma0(e2.p, lambda)?;
    // Cross terms scale with p₁p₂, i.e. with sqrt(Γ₀₁Γ₀₂).
    let g12 = (g1 * g2).sqrt();
    let tau = tau_tensor(&sep, lambda);
    let kappa = kappa_tensor(&sep, lambda)?;
    Ok(RateSet {
        gamma11: g1,
        gamma22: g2,
        gamma12: 1.5 * g12 * contract(&e1.orientation, &tau, &e2.orientation),
        omega12: 0.75 * g12 * contract(&e1.orientation, &kappa, &e2.orientation),
        gamma0: g1,
    })
}

/// Γ₁₂/Γ₀ for two z-oriented dipoles separated laterally by phase θ.
pub fn lateral_z_gamma12(theta: f64) -> f64 {
    let (sinc, near) = tau_radial(theta.abs());
    1.5 * (sinc + near)
}

/// Ω₁₂/Γ₀ for two z-oriented dipoles separated laterally by phase θ ≠ 0.
pub fn lateral_z_omega12(theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    let t2 = theta * theta;
    0.75 * (-c / theta + s / t2 + c / (t2 * theta))
}

/// The `n`-th local maximum of Γ₁₂(d)/Γ₀ for lateral z-dipoles, counting
/// the contact value at d = 0 as the first. Returns (θ, Γ₁₂/Γ₀); multiply
/// θ by λ/2π for the separation.
pub fn lateral_z_gamma12_maximum(n: usize) -> Result<(f64, f64)> {
    match n {
        0 => Err(Error::domain("maxima are counted from 1")),
        1 => Ok((0.0, lateral_z_gamma12(0.0))),
        _ => nth_local_max(lateral_z_gamma12, 1e-6, 0.05, n - 1, 1e-10, 10_000_000)
            .ok_or_else(|| Error::domain(format!("maximum {n} not found in the scanned range"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LAM: f64 = 552.0e-9;
    const Z: Vec3 = [0.0, 0.0, 1.0];

    fn emitter(x: f64, o: Vec3) -> EmitterConfig {
        EmitterConfig::new([x, 0.0, 0.0], o, 1e-29, LAM).unwrap()
    }

    #[test]
    fn tau_at_contact_is_two_thirds_identity() {
        let t = tau_tensor(&[0.0; 3], LAM);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 2.0 / 3.0 } else { 0.0 };
                assert!((t[i][j] - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn tau_zz_for_lateral_separation() {
        for &theta in &[0.05, 0.5, 2.0, 7.3, 40.0] {
            let d = theta * LAM / (2.0 * PI);
            let t = tau_tensor(&[d, 0.0, 0.0], LAM);
            let (s, c) = theta.sin_cos();
            let want = s / theta + c / theta.powi(2) - s / theta.powi(3);
            assert!((t[2][2] - want).abs() < 1e-12, "θ={theta}");
        }
    }

    #[test]
    fn tau_series_matches_high_precision_values() {
        // τ_zz(θ) for lateral R, reference values from 40-digit arithmetic.
        let cases = [
            (1e-3, 0.666_666_533_333_340_48),
            (0.099_999_999, 0.665_334_047_469_343_93),
        ];
        for (theta, want) in cases {
            let got = lateral_z_gamma12(theta) / 1.5;
            assert!((got - want).abs() < 1e-15, "θ={theta}: {got} vs {want}");
        }
    }

    #[test]
    fn tau_continuous_across_series_switch() {
        let below = lateral_z_gamma12(SERIES_THRESHOLD * (1.0 - 1e-12));
        let above = lateral_z_gamma12(SERIES_THRESHOLD);
        assert!((below - above).abs() < 1e-10);
        let t_lo = tau_tensor(
            &[
                SERIES_THRESHOLD * (1.0 - 1e-12) * LAM / (2.0 * PI),
                1e-9,
                0.0,
            ],
            LAM,
        );
        let t_hi = tau_tensor(&[SERIES_THRESHOLD * LAM / (2.0 * PI), 1e-9, 0.0], LAM);
        for i in 0..3 {
            for j in 0..3 {
                assert!((t_lo[i][j] - t_hi[i][j]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn tensors_are_even_in_separation() {
        let r = [120e-9, -45e-9, 80e-9];
        let m = [-r[0], -r[1], -r[2]];
        let (tp, tm) = (tau_tensor(&r, LAM), tau_tensor(&m, LAM));
        let (kp, km) = (
            kappa_tensor(&r, LAM).unwrap(),
            kappa_tensor(&m, LAM).unwrap(),
        );
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(tp[i][j], tm[i][j]);
                assert_eq!(kp[i][j], km[i][j]);
                assert!((tp[i][j] - tp[j][i]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn kappa_rejects_contact_and_decays() {
        assert!(kappa_tensor(&[0.0; 3], LAM).is_err());
        let far = kappa_tensor(&[1e4 * LAM, 0.0, 0.0], LAM).unwrap();
        assert!(far.iter().flatten().all(|v| v.abs() < 1e-4));
    }

    #[test]
    fn kappa_zz_at_theta_pi() {
        // −cosπ/π + sinπ/π² + cosπ/π³ = 1/π − 1/π³ (sinπ ≈ 1.2e-16 term kept out)
        let d = LAM / 2.0;
        let k = kappa_tensor(&[d, 0.0, 0.0], LAM).unwrap();
        let want = 1.0 / PI - 1.0 / PI.powi(3);
        assert!((k[2][2] - want).abs() < 1e-15, "{}", k[2][2]);
    }

    #[test]
    fn parallel_dipoles_at_contact_give_gamma0() {
        let e1 = emitter(0.0, Z);
        let e2 = emitter(1e-15, Z);
        let r = free_space_rates(&e1, &e2).unwrap();
        assert!((r.gamma12 / r.gamma0 - 1.0).abs() < 1e-12);
        assert_eq!(r.gamma11, r.gamma22);
    }

    #[test]
    fn orthogonal_dipoles_along_axis_do_not_couple() {
        let e1 = emitter(0.0, [1.0, 0.0, 0.0]);
        let e2 = emitter(300e-9, [0.0, 1.0, 0.0]);
        let r = free_space_rates(&e1, &e2).unwrap();
        assert_eq!(r.gamma12, 0.0);
        assert_eq!(r.omega12, 0.0);
    }

    #[test]
    fn rates_symmetric_under_swap() {
        let s = 0.5f64.sqrt();
        let e1 = EmitterConfig::new([0.0, 10e-9, 0.0], [s, 0.0, s], 1e-29, LAM).unwrap();
        let e2 = EmitterConfig::new([250e-9, -40e-9, 30e-9], [0.0, s, s], 1e-29, LAM).unwrap();
        let a = free_space_rates(&e1, &e2).unwrap();
        let b = free_space_rates(&e2, &e1).unwrap();
        assert!((a.gamma12 - b.gamma12).abs() < 1e-12 * a.gamma0);
        assert!((a.omega12 - b.omega12).abs() < 1e-12 * a.gamma0);
    }

    #[test]
    fn mismatched_wavelengths_and_contact_rejected() {
        let e1 = emitter(0.0, Z);
        let e2 = EmitterConfig::new([1e-6, 0.0, 0.0], Z, 1e-29, 700e-9).unwrap();
        assert!(free_space_rates(&e1, &e2).is_err());
        assert!(free_space_rates(&e1, &e1).is_err());
    }

    #[test]
    fn fourth_maximum_value() {
        let (theta, g) = lateral_z_gamma12_maximum(4).unwrap();
        assert!((g - 0.0736).abs() < 5e-4, "{g}");
        // 1.79 µm at 552 nm
        let d = theta * LAM / (2.0 * PI);
        assert!((d - 1.785e-6).abs() < 5e-9, "{d}");
    }

    #[test]
    fn envelope_decays_as_inverse_distance() {
        let mut worst: f64 = 0.0;
        for k in 1..2000 {
            let theta = 0.5 * k as f64;
            worst = worst.max((lateral_z_gamma12(theta) * theta).abs());
        }
        assert!(worst < 1.6);
    }

    #[test]
    fn bad_orientation_rejected() {
        assert!(EmitterConfig::new([0.0; 3], [1.0, 1.0, 0.0], 1e-29, LAM).is_err());
    }
}
