//! Two-emitter Lindblad dynamics in the Dicke basis.
//!
//! Basis: |e⟩ = |e₁e₂⟩, |s⟩ and |a⟩ the symmetric and antisymmetric single
//! excitations, |g⟩ = |g₁g₂⟩. With Γ = (Γ₁₁ + Γ₂₂)/2, Γ± = Γ ± Γ₁₂ and
//! δ = (Γ₁₁ − Γ₂₂)/4 the zero-temperature master equation reads
//!
//! ```text
//! ρ̇ee = −2Γ ρee
//! ρ̇ss = −Γ₊ρss + Γ₊ρee − δ(ρas + ρsa)
//! ρ̇aa = −Γ₋ρaa + Γ₋ρee − δ(ρas + ρsa)
//! ρ̇as = −(Γ − 2iΩ₁₂)ρas − δ(ρss + ρaa + 2ρee)
//! ```
//!
//! with ρgg fixed by the trace and ρsa = ρas*. Only ρee and the
//! single-excitation block are tracked, so states with coherences between
//! different excitation numbers are outside the supported sector.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::greens::RateSet;
use crate::ode::{integrate_dp45, integrate_rk4, Tolerances};
use crate::{Error, Result};

/// Tolerance used when checking the physical constraints on a state.
pub const STATE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DickeState {
    pub rho_ee: f64,
    pub rho_ss: f64,
    pub rho_aa: f64,
    pub rho_gg: f64,
    /// ⟨a|ρ|s⟩.
    pub rho_as: Complex64,
}

impl DickeState {
    /// |e₁g₂⟩: one emitter excited.
    pub fn first_excited() -> Self {
        Self {
            rho_ee: 0.0,
            rho_ss: 0.5,
            rho_aa: 0.5,
            rho_gg: 0.0,
            rho_as: Complex64::new(0.5, 0.0),
        }
    }

    pub fn ground() -> Self {
        Self {
            rho_ee: 0.0,
            rho_ss: 0.0,
            rho_aa: 0.0,
            rho_gg: 1.0,
            rho_as: Complex64::new(0.0, 0.0),
        }
    }

    pub fn doubly_excited() -> Self {
        Self {
            rho_ee: 1.0,
            rho_gg: 0.0,
            ..Self::ground()
        }
    }

    pub fn trace(&self) -> f64 {
        self.rho_ee + self.rho_ss + self.rho_aa + self.rho_gg
    }

    /// Checks trace, population bounds and single-excitation positivity.
    pub fn validate(&self) -> Result<()> {
        let arr = self.to_array();
        if arr.iter().any(|x| !x.is_finite()) {
            return Err(Error::domain("state has non-finite entries"));
        }
        if (self.trace() - 1.0).abs() > STATE_TOL {
            return Err(Error::domain(format!("trace is {}, not 1", self.trace())));
        }
        for (name, v) in [
            ("rho_ee", self.rho_ee),
            ("rho_ss", self.rho_ss),
            ("rho_aa", self.rho_aa),
            ("rho_gg", self.rho_gg),
        ] {
            if !(-STATE_TOL..=1.0 + STATE_TOL).contains(&v) {
                return Err(Error::domain(format!(
                    "population {name} = {v} outside [0, 1]"
                )));
            }
        }
        if self.rho_as.norm_sqr() > self.rho_ss * self.rho_aa + STATE_TOL {
            return Err(Error::domain(
                "|rho_as|² exceeds rho_ss·rho_aa; single-excitation block is not positive",
            ));
        }
        Ok(())
    }

    /// [ee, ss, aa, gg, Re as, Im as].
    pub fn to_array(&self) -> [f64; 6] {
        [
            self.rho_ee,
            self.rho_ss,
            self.rho_aa,
            self.rho_gg,
            self.rho_as.re,
            self.rho_as.im,
        ]
    }

    pub fn from_array(a: &[f64; 6]) -> Self {
        Self {
            rho_ee: a[0],
            rho_ss: a[1],
            rho_aa: a[2],
            rho_gg: a[3],
            rho_as: Complex64::new(a[4], a[5]),
        }
    }

    /// Largest absolute difference between corresponding entries.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let (a, b) = (self.to_array(), other.to_array());
        a.iter()
            .zip(&b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Method {
    ClosedForm,
    Rk4,
    Rk45 { rtol: f64, atol: f64 },
}

impl Default for Method {
    fn default() -> Self {
        let t = Tolerances::default();
        Method::Rk45 {
            rtol: t.rtol,
            atol: t.atol,
        }
    }
}

/// Uniform output grid on [0, t_end] with `n_steps` intervals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationGrid {
    pub t_end: f64,
    pub n_steps: usize,
    pub method: Method,
}

impl SimulationGrid {
    pub fn new(t_end: f64, n_steps: usize, method: Method) -> Result<Self> {
        let g = Self {
            t_end,
            n_steps,
            method,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::domain(format!(
                "t_end must be positive, got {}",
                self.t_end
            )));
        }
        if self.n_steps < 2 {
            return Err(Error::domain("n_steps must be at least 2"));
        }
        if let Method::Rk45 { rtol, atol } = self.method {
            if !(rtol > 0.0 && atol > 0.0) {
                return Err(Error::domain("integrator tolerances must be positive"));
            }
        }
        Ok(())
    }

    pub fn times(&self) -> Vec<f64> {
        let dt = self.t_end / self.n_steps as f64;
        (0..=self.n_steps)
            .map(|i| {
                if i == self.n_steps {
                    self.t_end
                } else {
                    i as f64 * dt
                }
            })
            .collect()
    }
}

/// Sampled trajectory.
pub type Trajectory = Vec<(f64, DickeState)>;

fn derivative_array(y: &[f64; 6], r: &RateSet) -> [f64; 6] {
    let g = r.mean_decay();
    let gp = g + r.gamma12;
    let gm = g - r.gamma12;
    let delta = 0.25 * (r.gamma11 - r.gamma22);
    let [ee, ss, aa, _, re, im] = *y;
    let cross = delta * 2.0 * re;
    let dee = -2.0 * g * ee;
    let dss = -gp * ss + gp * ee - cross;
    let daa = -gm * aa + gm * ee - cross;
    // −(Γ − 2iΩ)(re + i im) − δ(ss + aa + 2ee)
    let dre = -g * re - 2.0 * r.omega12 * im - delta * (ss + aa + 2.0 * ee);
    let dim = -g * im + 2.0 * r.omega12 * re;
    [dee, dss, daa, -(dee + dss + daa), dre, dim]
}

/// Right-hand side of the master equation.
pub fn dicke_derivative(s: &DickeState, r: &RateSet) -> DickeState {
    DickeState::from_array(&derivative_array(&s.to_array(), r))
}

fn check_symmetric(r: &RateSet) -> Result<()> {
    if !r.is_symmetric() {
        return Err(Error::Precondition(format!(
            "closed-form solution needs Γ11 = Γ22 (got {} and {}); use an ODE integrator",
            r.gamma11, r.gamma22
        )));
    }
    Ok(())
}

/// (1 − e^{−x t})/x evaluated without cancellation, → t as x → 0.
fn phi(x: f64, t: f64) -> f64 {
    if x == 0.0 {
        t
    } else {
        -(-x * t).exp_m1() / x
    }
}

/// Exact state at time `t` for symmetric rates.
pub fn closed_form_evolve(s0: &DickeState, r: &RateSet, t: f64) -> Result<DickeState> {
    check_symmetric(r)?;
    let g = r.mean_decay();
    let gp = g + r.gamma12;
    let gm = g - r.gamma12;
    let ee = s0.rho_ee * (-2.0 * g * t).exp();
    // Feed from ρee: Γ±ρee(0) ∫₀ᵗ e^{−Γ±(t−u)} e^{−2Γu} du = Γ±ρee(0) e^{−Γ±t} φ(Γ∓, t)
    let ss = s0.rho_ss * (-gp * t).exp() + gp * s0.rho_ee * (-gp * t).exp() * phi(gm, t);
    let aa = s0.rho_aa * (-gm * t).exp() + gm * s0.rho_ee * (-gm * t).exp() * phi(gp, t);
    let rho_as = s0.rho_as * Complex64::from_polar((-g * t).exp(), 2.0 * r.omega12 * t);
    let gg = s0.rho_gg + (s0.rho_ee - ee) + (s0.rho_ss - ss) + (s0.rho_aa - aa);
    Ok(DickeState {
        rho_ee: ee,
        rho_ss: ss,
        rho_aa: aa,
        rho_gg: gg,
        rho_as,
    })
}

/// Largest rate in the generator, used to size fixed steps.
fn rate_scale(r: &RateSet) -> f64 {
    2.0 * r.mean_decay()
        + r.gamma12.abs()
        + 2.0 * r.omega12.abs()
        + 0.5 * (r.gamma11 - r.gamma22).abs()
}

/// Sample the trajectory from `s0` on `grid`.
pub fn integrate(s0: &DickeState, r: &RateSet, grid: &SimulationGrid) -> Result<Trajectory> {
    grid.validate()?;
    s0.validate()?;
    let times = grid.times();
    let states: Vec<DickeState> = match grid.method {
        Method::ClosedForm => times
            .iter()
            .map(|&t| closed_form_evolve(s0, r, t))
            .collect::<Result<_>>()?,
        Method::Rk4 => {
            let dt = grid.t_end / grid.n_steps as f64;
            let substeps = ((dt * rate_scale(r) / 0.01).ceil() as usize).max(1);
            let f = |_t: f64, y: &[f64; 6]| derivative_array(y, r);
            integrate_rk4(&f, s0.to_array(), &times, substeps)
                .iter()
                .map(DickeState::from_array)
                .collect()
        }
        Method::Rk45 { rtol, atol } => {
            let f = |_t: f64, y: &[f64; 6]| derivative_array(y, r);
            integrate_dp45(&f, s0.to_array(), &times, Tolerances { rtol, atol })?
                .iter()
                .map(DickeState::from_array)
                .collect()
        }
    };
    Ok(times.into_iter().zip(states).collect())
}

/// CSV with columns t, rho_ee, rho_ss, rho_aa, rho_gg, re_rho_as, im_rho_as.
pub fn write_trajectory_csv<W: Write>(mut w: W, traj: &[(f64, DickeState)]) -> std::io::Result<()> {
    writeln!(w, "t,rho_ee,rho_ss,rho_aa,rho_gg,re_rho_as,im_rho_as")?;
    for (t, s) in traj {
        let [ee, ss, aa, gg, re, im] = s.to_array();
        writeln!(w, "{t:e},{ee:e},{ss:e},{aa:e},{gg:e},{re:e},{im:e}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rates(g11: f64, g22: f64, g12: f64, o12: f64) -> RateSet {
        RateSet::from_normalized(g11, g22, g12, o12, 1.0).unwrap()
    }

    #[test]
    fn symmetric_rates_decouple_blocks() {
        let r = rates(2.0, 2.0, 0.7, 0.3);
        let mut s = DickeState::first_excited();
        s.rho_as = Complex64::new(0.0, 0.2);
        let d = dicke_derivative(&s, &r);
        assert_eq!(d.rho_ss, -2.7 * 0.5);
        assert_eq!(d.rho_aa, -1.3 * 0.5);
    }

    #[test]
    fn doubly_excited_decays_at_twice_mean_rate() {
        let r = rates(3.0, 1.0, 0.5, 0.0);
        let d = dicke_derivative(&DickeState::doubly_excited(), &r);
        assert_eq!(d.rho_ee, -4.0);
    }

    #[test]
    fn ground_state_is_fixed_point() {
        let r = rates(3.0, 1.0, 0.5, -0.4);
        let d = dicke_derivative(&DickeState::ground(), &r);
        assert_eq!(d.to_array(), [0.0; 6]);
    }

    #[test]
    fn closed_form_initial_and_subradiant() {
        let r = rates(1.0, 1.0, 0.4, 0.2);
        let s0 = DickeState::first_excited();
        assert_eq!(closed_form_evolve(&s0, &r, 0.0).unwrap(), s0);
        let s = closed_form_evolve(&s0, &r, 1.7).unwrap();
        assert!((s.rho_aa - 0.5 * (-0.6f64 * 1.7).exp()).abs() < 1e-15);
        let perfect = rates(1.0, 1.0, 1.0, 0.0);
        let s = closed_form_evolve(&s0, &perfect, 50.0).unwrap();
        assert_eq!(s.rho_aa, 0.5);
    }

    #[test]
    fn closed_form_rejects_asymmetric_rates() {
        let r = rates(1.0, 1.1, 0.4, 0.2);
        assert!(matches!(
            closed_form_evolve(&DickeState::first_excited(), &r, 1.0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn closed_form_with_doubly_excited_start_matches_rk45() {
        let r = rates(1.0, 1.0, 0.6, -0.3);
        let grid = SimulationGrid::new(8.0, 40, Method::default()).unwrap();
        let s0 = DickeState::doubly_excited();
        let traj = integrate(&s0, &r, &grid).unwrap();
        for (t, s) in traj {
            let exact = closed_form_evolve(&s0, &r, t).unwrap();
            assert!(s.max_abs_diff(&exact) < 1e-9, "t = {t}");
        }
    }

    #[test]
    fn closed_form_derivative_matches_rhs() {
        let r = rates(1.0, 1.0, 0.6, 0.35);
        let s0 = DickeState {
            rho_ee: 0.2,
            rho_ss: 0.3,
            rho_aa: 0.25,
            rho_gg: 0.25,
            rho_as: Complex64::new(0.1, -0.12),
        };
        let h = 1e-6;
        let t = 0.8;
        let p = closed_form_evolve(&s0, &r, t + h).unwrap().to_array();
        let m = closed_form_evolve(&s0, &r, t - h).unwrap().to_array();
        let d = dicke_derivative(&closed_form_evolve(&s0, &r, t).unwrap(), &r).to_array();
        for i in 0..6 {
            assert!(
                ((p[i] - m[i]) / (2.0 * h) - d[i]).abs() < 1e-8,
                "component {i}"
            );
        }
    }

    #[test]
    fn rk4_matches_closed_form() {
        let r = rates(1.0, 1.0, 0.8, 0.5);
        let grid = SimulationGrid::new(10.0, 200, Method::Rk4).unwrap();
        let s0 = DickeState::first_excited();
        for (t, s) in integrate(&s0, &r, &grid).unwrap() {
            let exact = closed_form_evolve(&s0, &r, t).unwrap();
            assert!(s.max_abs_diff(&exact) < 1e-8);
        }
    }

    #[test]
    fn zero_rates_keep_state() {
        let r = rates(0.0, 0.0, 0.0, 0.0);
        let grid = SimulationGrid::new(3.0, 10, Method::default()).unwrap();
        let s0 = DickeState::first_excited();
        for (_, s) in integrate(&s0, &r, &grid).unwrap() {
            assert_eq!(s, s0);
        }
    }

    #[test]
    fn asymmetric_rates_decay_to_ground() {
        let r = rates(13.7, 8.8, 7.9, -0.2);
        let grid = SimulationGrid::new(5.0, 50, Method::default()).unwrap();
        let traj = integrate(&DickeState::first_excited(), &r, &grid).unwrap();
        let last = traj.last().unwrap().1;
        assert!((last.rho_gg - 1.0).abs() < 1e-6);
        for (_, s) in &traj {
            assert!((s.trace() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_validation() {
        assert!(SimulationGrid::new(0.0, 10, Method::Rk4).is_err());
        assert!(SimulationGrid::new(1.0, 1, Method::Rk4).is_err());
        let g = SimulationGrid::new(1.0, 4, Method::Rk4).unwrap();
        assert_eq!(g.times(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, &[(0.0, DickeState::first_excited())]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t,rho_ee,rho_ss,rho_aa,rho_gg,re_rho_as,im_rho_as"
        );
        assert_eq!(lines.next().unwrap().split(',').count(), 7);
    }
}
