//! Two quantum emitters coupled through a bound state in the continuum (BIC)
//! of a dielectric metasurface.
//!
//! The crate covers the whole chain from electromagnetic environment to
//! entanglement:
//!
//! * [`constants`]: SI constants and the free-space decay rate Γ₀.
//! * [`greens`]: free-space dyadic Green tensor and the resulting rates.
//! * [`lattice`]: evanescent lattice sums giving the cosine expansion of the
//!   BIC-mediated cross density of states.
//! * [`cdos`]: the single-mode BIC model Γ₁₂(d) = Γ₁₁ β J₀(k∥d) osc(d).
//! * [`dynamics`]: two-emitter Lindblad dynamics in the Dicke basis.
//! * [`entanglement`]: Wootters concurrence and its analytic approximations.
//! * [`fitting`]: least-squares extraction of (β, k∥) and Purcell profiles.
//! * [`validity`]: weak/strong coupling threshold.
//!
//! All quantities are SI internally (metres, seconds, C·m).

pub mod bessel;
pub mod cdos;
pub mod constants;
pub mod dynamics;
pub mod entanglement;
mod error;
pub mod fitting;
pub mod greens;
pub mod hermitian;
pub mod lattice;
pub mod ode;
pub mod optimize;
pub mod validity;

pub use error::{Error, Result};

/// Cartesian 3-vector in metres (positions) or dimensionless (orientations).
pub type Vec3 = [f64; 3];
