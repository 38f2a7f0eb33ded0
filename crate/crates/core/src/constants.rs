//! Physical constants (CODATA 2018, SI) and the free-space decay rate.

use std::f64::consts::PI;

use crate::{Error, Result};

/// Speed of light in vacuum, m/s (exact).
pub const C: f64 = 299_792_458.0;
/// Reduced Planck constant, J·s (exact since the 2019 SI redefinition).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Vacuum permittivity, F/m.
pub const EPS0: f64 = 8.854_187_812_8e-12;
/// One debye in C·m.
pub const DEBYE: f64 = 3.335_64e-30;

/// Bundle of the constants above, for callers that want them as a value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub c: f64,
    pub hbar: f64,
    pub eps0: f64,
    pub debye: f64,
}

pub const CODATA: PhysicalConstants = PhysicalConstants {
    c: C,
    hbar: HBAR,
    eps0: EPS0,
    debye: DEBYE,
};

/// Angular frequency ω = 2πc/λ.
pub fn angular_frequency(lambda: f64) -> f64 {
    2.0 * PI * C / lambda
}

/// Free-space spontaneous decay rate Γ₀ = ω₀³p²/(3πε₀ħc³) in 1/s.
///
/// `p` is the transition dipole magnitude in C·m and `lambda0` the
/// transition wavelength in metres.
pub fn gamma0(p: f64, lambda0: f64) -> Result<f64> {
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
    let w = angular_frequency(lambda0);
    // Products ordered so that scaling p or λ by powers of two scales the
    // result exactly.
    Ok(w * w * w * p * p / (3.0 * PI * EPS0 * HBAR * C * C * C))
}

pub fn debye_to_cm(d: f64) -> f64 {
    d * DEBYE
}

pub fn cm_to_debye(p: f64) -> f64 {
    p / DEBYE
}
