//! Concurrence of the two-emitter state and its analytic approximations.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cdos::{effective_beta, BicMode};
use crate::dynamics::DickeState;
use crate::greens::RateSet;
use crate::hermitian::{hermitian_eigenvalues, hermitian_function, matmul};
use crate::optimize::parabolic_vertex;
use crate::{Error, Result};

/// 4 × 4 complex density matrix in the basis |ee⟩, |eg⟩, |ge⟩, |gg⟩.
pub type Density = [[Complex64; 4]; 4];

/// Tolerance on hermiticity, trace and positivity of input matrices.
pub const DENSITY_TOL: f64 = 1e-9;

/// Eigenvalues of ρρ̃ below this magnitude are treated as zero.
const EIGEN_DUST: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Dicke-basis state → computational-basis density matrix.
pub fn dicke_to_computational(s: &DickeState) -> Density {
    let mean = 0.5 * (s.rho_ss + s.rho_aa);
    let half_diff = 0.5 * (s.rho_ss - s.rho_aa);
    let mut rho = [[ZERO; 4]; 4];
    rho[0][0] = Complex64::new(s.rho_ee, 0.0);
    rho[1][1] = Complex64::new(mean + s.rho_as.re, 0.0);
    rho[2][2] = Complex64::new(mean - s.rho_as.re, 0.0);
    rho[1][2] = Complex64::new(half_diff, s.rho_as.im);
    rho[2][1] = rho[1][2].conj();
    rho[3][3] = Complex64::new(s.rho_gg, 0.0);
    rho
}

/// Computational-basis density matrix → Dicke-basis state.
///
/// Fails if ρ has coherences outside the sector tracked by [`DickeState`].
pub fn computational_to_dicke(rho: &Density) -> Result<DickeState> {
    let outside = [(0, 1), (0, 2), (0, 3), (1, 3), (2, 3)];
    for (i, j) in outside {
        if rho[i][j].norm() > DENSITY_TOL || rho[j][i].norm() > DENSITY_TOL {
            return Err(Error::domain(format!(
                "coherence ρ[{i}][{j}] lies outside the supported Dicke sector"
            )));
        }
    }
    let mean = 0.5 * (rho[1][1].re + rho[2][2].re);
    Ok(DickeState {
        rho_ee: rho[0][0].re,
        rho_ss: mean + rho[1][2].re,
        rho_aa: mean - rho[1][2].re,
        rho_gg: rho[3][3].re,
        rho_as: Complex64::new(0.5 * (rho[1][1].re - rho[2][2].re), rho[1][2].im),
    })
}

fn check_density(rho: &Density) -> Result<()> {
    let mut herm: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            if !(rho[i][j].re.is_finite() && rho[i][j].im.is_finite()) {
                return Err(Error::domain("density matrix has non-finite entries"));
            }
            herm = herm.max((rho[i][j] - rho[j][i].conj()).norm());
        }
    }
    if herm > DENSITY_TOL {
        return Err(Error::domain(format!(
            "density matrix is not Hermitian (deviation {herm:.3e})"
        )));
    }
    let trace: f64 = (0..4).map(|i| rho[i][i].re).sum();
    if (trace - 1.0).abs() > DENSITY_TOL {
        return Err(Error::domain(format!(
            "density matrix trace is {trace}, not 1"
        )));
    }
    let min_eig = hermitian_eigenvalues(rho)[3];
    if min_eig < -DENSITY_TOL {
        return Err(Error::domain(format!(
            "density matrix is not positive semidefinite (eigenvalue {min_eig:.3e})"
        )));
    }
    Ok(())
}

/// Wootters concurrence max(0, √λ₁ − √λ₂ − √λ₃ − √λ₄), where λᵢ are the
/// eigenvalues of ρρ̃ with ρ̃ = (σy⊗σy) ρ* (σy⊗σy).
///
/// The spectrum is taken from the Hermitian matrix √ρ ρ̃ √ρ, which shares
/// it with ρρ̃.
pub fn wootters_concurrence(rho: &Density) -> Result<f64> {
    check_density(rho)?;
    // σy⊗σy is real: antidiagonal (−1, 1, 1, −1).
    let flip = [-1.0, 1.0, 1.0, -1.0];
    let mut tilde = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            tilde[i][j] = rho[3 - i][3 - j].conj() * (flip[i] * flip[j]);
        }
    }
    let root = hermitian_function(rho, |x| x.max(0.0).sqrt());
    let mut m = matmul(&matmul(&root, &tilde), &root);
    for i in 0..4 {
        for j in i..4 {
            let avg = 0.5 * (m[i][j] + m[j][i].conj());
            m[i][j] = avg;
            m[j][i] = avg.conj();
        }
    }
    let lambda = hermitian_eigenvalues(&m);
    let s: Vec<f64> = lambda
        .iter()
        .map(|&l| if l < EIGEN_DUST { 0.0 } else { l.sqrt() })
        .collect();
    Ok((s[0] - s[1] - s[2] - s[3]).clamp(0.0, 1.0))
}

/// Closed-form concurrence of a Dicke-sector state,
/// max(0, √((ρss − ρaa)² + 4 Im(ρas)²) − 2√(ρee ρgg)).
pub fn dicke_concurrence(s: &DickeState) -> Result<f64> {
    s.validate()?;
    let diff = s.rho_ss - s.rho_aa;
    let coh = diff.hypot(2.0 * s.rho_as.im);
    let doubles = 2.0 * (s.rho_ee.max(0.0) * s.rho_gg.max(0.0)).sqrt();
    Ok((coh - doubles).clamp(0.0, 1.0))
}

/// sinh(x) e^{−y} without overflow for large y.
fn sinh_decay(x: f64, y: f64) -> f64 {
    0.5 * ((x - y).exp() - (-x - y).exp())
}

/// sinh(β̄ F Γ₀ t) e^{−F Γ₀ t} for a given effective β-factor.
pub fn sinh_form(t: f64, beta_bar: f64, purcell: f64, gamma0: f64) -> f64 {
    let y = purcell * gamma0 * t;
    sinh_decay(beta_bar * y, y)
}

/// ½ e^{−(1 − β̄) F Γ₀ t}.
pub fn long_time_form(t: f64, beta_bar: f64, purcell: f64, gamma0: f64) -> f64 {
    0.5 * (-(1.0 - beta_bar) * purcell * gamma0 * t).exp()
}

/// Small-β̄ approximation of the concurrence for emitters a distance `d`
/// apart above `mode`.
pub fn concurrence_sinh(t: f64, d: f64, mode: &BicMode, gamma0: f64) -> f64 {
    sinh_form(t, effective_beta(d, mode), mode.purcell, gamma0)
}

/// Long-time limit of the concurrence, valid for t ≳ 1/(β̄ F Γ₀).
pub fn concurrence_long_time(t: f64, d: f64, mode: &BicMode, gamma0: f64) -> f64 {
    long_time_form(t, effective_beta(d, mode), mode.purcell, gamma0)
}

fn check_beta_bar(beta_bar: f64) -> Result<()> {
    if !(beta_bar > 0.0 && beta_bar < 1.0) {
        return Err(Error::domain(format!(
            "β̄ must lie in (0, 1), got {beta_bar}"
        )));
    }
    Ok(())
}

/// Time of the maximum of the sinh form, ln((1+β̄)/(1−β̄)) / (2 F Γ₀ β̄).
pub fn t_max_analytic(beta_bar: f64, purcell: f64, gamma0: f64) -> Result<f64> {
    check_beta_bar(beta_bar)?;
    if !(purcell > 0.0 && gamma0 > 0.0) {
        return Err(Error::domain("Purcell factor and Γ0 must be positive"));
    }
    Ok(beta_bar.atanh() / (purcell * gamma0 * beta_bar))
}

/// Peak value of the sinh form,
/// β̄/√(1 − β̄²) · ((1 + β̄)/(1 − β̄))^(−1/(2β̄)).
pub fn c_max_analytic(beta_bar: f64) -> Result<f64> {
    check_beta_bar(beta_bar)?;
    let a = beta_bar.atanh() / beta_bar;
    // Written through the sinh form to keep the β̄ → 1 end accurate.
    Ok(sinh_decay(beta_bar * a, a))
}

/// Exact concurrence from |e₁g₂⟩ for symmetric rates:
/// ½√((e^{−Γ₊t} − e^{−Γ₋t})² + 4e^{−2Γt} sin²(2Ω₁₂t)).
pub fn exact_concurrence_symmetric(t: f64, r: &RateSet) -> Result<f64> {
    if !r.is_symmetric() {
        return Err(Error::Precondition(format!(
            "exact concurrence needs Γ11 = Γ22 (got {} and {})",
            r.gamma11, r.gamma22
        )));
    }
    let g = r.mean_decay();
    let x = (r.gamma12 * t).sinh();
    let y = (2.0 * r.omega12 * t).sin();
    Ok((-g * t).exp() * x.hypot(y))
}

/// Concurrence along a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcurrenceTrace {
    pub times: Vec<f64>,
    pub concurrence: Vec<f64>,
    /// Argmax of the samples, refined by a three-point parabola.
    pub t_max: f64,
    /// Largest sampled concurrence.
    pub c_max: f64,
}

impl ConcurrenceTrace {
    pub fn from_samples(times: Vec<f64>, concurrence: Vec<f64>) -> Result<Self> {
        if times.is_empty() || times.len() != concurrence.len() {
            return Err(Error::domain(
                "trace needs equal, non-zero numbers of times and values",
            ));
        }
        let (imax, &c_max) =
            concurrence
                .iter()
                .enumerate()
                .fold((0, &f64::NEG_INFINITY), |best, cur| {
                    if cur.1 > best.1 {
                        cur
                    } else {
                        best
                    }
                });
        let mut t_max = times[imax];
        if imax > 0 && imax + 1 < times.len() {
            let h = times[imax] - times[imax - 1];
            let h2 = times[imax + 1] - times[imax];
            if (h - h2).abs() <= 1e-9 * h.abs() {
                let (x, _) = parabolic_vertex(
                    times[imax],
                    h,
                    concurrence[imax - 1],
                    c_max,
                    concurrence[imax + 1],
                );
                t_max = x;
            }
        }
        Ok(Self {
            times,
            concurrence,
            t_max,
            c_max,
        })
    }

    pub fn from_trajectory(traj: &[(f64, DickeState)]) -> Result<Self> {
        let times = traj.iter().map(|(t, _)| *t).collect();
        let c = traj
            .iter()
            .map(|(_, s)| dicke_concurrence(s))
            .collect::<Result<Vec<_>>>()?;
        Self::from_samples(times, c)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,C")?;
        for (t, c) in self.times.iter().zip(&self.concurrence) {
            writeln!(w, "{t:e},{c:e}")?;
        }
        Ok(())
    }

    pub fn summary(&self, beta_bar: Option<f64>, purcell: Option<f64>) -> ConcurrenceSummary {
        ConcurrenceSummary {
            t_max: self.t_max,
            c_max: self.c_max,
            beta_bar,
            purcell,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcurrenceSummary {
    pub t_max: f64,
    pub c_max: f64,
    pub beta_bar: Option<f64>,
    pub purcell: Option<f64>,
}
