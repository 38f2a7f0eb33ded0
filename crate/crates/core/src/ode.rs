//! Explicit Runge–Kutta integrators for small fixed-size systems.

use crate::{Error, Result};

/// Right-hand side dy/dt = f(t, y).
pub trait Rhs<const N: usize>: Fn(f64, &[f64; N]) -> [f64; N] {}
impl<const N: usize, F: Fn(f64, &[f64; N]) -> [f64; N]> Rhs<N> for F {}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// One classical fourth-order step.
pub fn rk4_step<const N: usize>(f: &impl Rhs<N>, t: f64, y: &[f64; N], h: f64) -> [f64; N] {
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * h, &axpy(y, h, &[(0.5, &k1)]));
    let k3 = f(t + 0.5 * h, &axpy(y, h, &[(0.5, &k2)]));
    let k4 = f(t + h, &axpy(y, h, &[(1.0, &k3)]));
    axpy(
        y,
        h,
        &[
            (1.0 / 6.0, &k1),
            (1.0 / 3.0, &k2),
            (1.0 / 3.0, &k3),
            (1.0 / 6.0, &k4),
        ],
    )
}

/// Fixed-step RK4 sampled at `times` (first entry is the initial time),
/// taking `substeps` equal steps between consecutive outputs.
pub fn integrate_rk4<const N: usize>(
    f: &impl Rhs<N>,
    y0: [f64; N],
    times: &[f64],
    substeps: usize,
) -> Vec<[f64; N]> {
    let substeps = substeps.max(1);
    let mut out = Vec::with_capacity(times.len());
    let mut y = y0;
    if times.is_empty() {
        return out;
    }
    out.push(y);
    for w in times.windows(2) {
        let h = (w[1] - w[0]) / substeps as f64;
        for s in 0..substeps {
            y = rk4_step(f, w[0] + s as f64 * h, &y, h);
        }
        out.push(y);
    }
    out
}

/// Tolerances for the adaptive Dormand–Prince 5(4) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-10,
        }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Fifth-order minus fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Adaptive Dormand–Prince 5(4) sampled exactly at `times`.
///
/// Steps are shortened to land on each output time. Fails with
/// [`Error::StepUnderflow`] when the accepted step shrinks below the
/// resolution of the time axis.
pub fn integrate_dp45<const N: usize>(
    f: &impl Rhs<N>,
    y0: [f64; N],
    times: &[f64],
    tol: Tolerances,
) -> Result<Vec<[f64; N]>> {
    let mut out = Vec::with_capacity(times.len());
    if times.is_empty() {
        return Ok(out);
    }
    let mut t = times[0];
    let mut y = y0;
    out.push(y);
    let span = times[times.len() - 1] - t;
    if span <= 0.0 {
        out.extend(std::iter::repeat_n(y, times.len() - 1));
        return Ok(out);
    }
    let mut h = initial_step(f, t, &y, tol, span);
    let mut k1 = f(t, &y);
    for &target in &times[1..] {
        while t < target {
            let h_min = 16.0 * f64::EPSILON * t.abs().max(span);
            let last = t + h >= target;
            let step = if last { target - t } else { h };
            let y2 = axpy(&y, step, &[(A21, &k1)]);
            let k2 = f(t + C2 * step, &y2);
            let y3 = axpy(&y, step, &[(A31, &k1), (A32, &k2)]);
            let k3 = f(t + C3 * step, &y3);
            let y4 = axpy(&y, step, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
            let k4 = f(t + C4 * step, &y4);
            let y5 = axpy(&y, step, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
            let k5 = f(t + C5 * step, &y5);
            let y6 = axpy(
                &y,
                step,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            );
            let k6 = f(t + step, &y6);
            let ynew = axpy(
                &y,
                step,
                &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
            );
            let k7 = f(t + step, &ynew);
            let mut err = 0.0;
            for i in 0..N {
                let e = step
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = tol.atol + tol.rtol * y[i].abs().max(ynew[i].abs());
                err += (e / sc).powi(2);
            }
            let err = (err / N as f64).sqrt();
            if err <= 1.0 {
                t = if last { target } else { t + step };
                y = ynew;
                k1 = k7;
                let grow = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                if !last || step >= h {
                    h = step * grow;
                }
            } else {
                h = step * (0.9 * err.powf(-0.2)).max(0.2);
                if h < h_min {
                    return Err(Error::StepUnderflow { t, h });
                }
            }
        }
        out.push(y);
    }
    Ok(out)
}

fn initial_step<const N: usize>(
    f: &impl Rhs<N>,
    t: f64,
    y: &[f64; N],
    tol: Tolerances,
    span: f64,
) -> f64 {
    let d = f(t, y);
    let mut d0: f64 = 0.0;
    let mut d1: f64 = 0.0;
    for i in 0..N {
        let sc = tol.atol + tol.rtol * y[i].abs();
        d0 += (y[i] / sc).powi(2);
        d1 += (d[i] / sc).powi(2);
    }
    let (d0, d1) = ((d0 / N as f64).sqrt(), (d1 / N as f64).sqrt());
    let h = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6 * span
    } else {
        0.01 * d0 / d1
    };
    h.min(span)
}
