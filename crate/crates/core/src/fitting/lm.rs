//! Box-constrained Levenberg–Marquardt with numerical Jacobians.

/// Settings for [`levenberg_marquardt`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmOptions {
    pub max_iter: usize,
    /// Largest allowed cosine between the residual vector and any Jacobian
    /// column at convergence.
    pub gtol: f64,
    /// Relative finite-difference step, multiplied by each parameter scale.
    pub fd_step: f64,
    /// RMS residual at or below which the fit counts as exact (the
    /// residuals are then rounding noise and carry no gradient signal).
    pub residual_floor: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        Self {
            max_iter: 500,
            gtol: 1e-6,
            fd_step: 1e-6,
            residual_floor: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmOutcome {
    pub x: Vec<f64>,
    /// ½ Σ rᵢ².
    pub cost: f64,
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Cost after each accepted step, starting with the initial cost.
    pub cost_history: Vec<f64>,
    /// Diagonal of (JᵀJ)⁻¹ at the solution; `None` if JᵀJ is singular.
    pub normal_inverse_diag: Option<Vec<f64>>,
    /// Largest residual/column cosine at the solution.
    pub gradient_cosine: f64,
}

fn cost_of(r: &[f64]) -> f64 {
    0.5 * r.iter().map(|v| v * v).sum::<f64>()
}

fn jacobian(f: &impl Fn(&[f64]) -> Vec<f64>, x: &[f64], scale: &[f64], step: f64) -> Vec<Vec<f64>> {
    // Column-major: jac[j][i] = ∂rᵢ/∂xⱼ
    (0..x.len())
        .map(|j| {
            let h = step * scale[j];
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[j] += h;
            xm[j] -= h;
            let (rp, rm) = (f(&xp), f(&xm));
            rp.iter()
                .zip(&rm)
                .map(|(a, b)| (a - b) / (2.0 * h))
                .collect()
        })
        .collect()
}

/// Solve A x = b by Gaussian elimination with partial pivoting.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let norm = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() <= 1e-14 * norm || norm == 0.0 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

fn normal_matrix(jac: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let m = jac.len();
    let mut a = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in 0..m {
            a[i][j] = jac[i].iter().zip(&jac[j]).map(|(p, q)| p * q).sum();
        }
    }
    a
}

fn gradient_cosine(jac: &[Vec<f64>], r: &[f64], x: &[f64], lower: &[f64], upper: &[f64]) -> f64 {
    let rn = r.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut worst: f64 = 0.0;
    for (j, col) in jac.iter().enumerate() {
        let cn = col.iter().map(|v| v * v).sum::<f64>().sqrt();
        if cn == 0.0 || rn == 0.0 {
            continue;
        }
        let g: f64 = col.iter().zip(r).map(|(a, b)| a * b).sum();
        // A descent direction −g that points out of the box is blocked.
        if (x[j] <= lower[j] && g > 0.0) || (x[j] >= upper[j] && g < 0.0) {
            continue;
        }
        worst = worst.max(g.abs() / (cn * rn));
    }
    worst
}

/// Minimise ½‖f(x)‖² over the box [lower, upper] starting from `x0`.
///
/// Steps are projected onto the box and accepted only when they lower the
/// cost, so `cost_history` is non-increasing.
pub fn levenberg_marquardt(
    f: impl Fn(&[f64]) -> Vec<f64>,
    x0: &[f64],
    lower: &[f64],
    upper: &[f64],
    scale: &[f64],
    opts: LmOptions,
) -> LmOutcome {
    let project = |x: &mut [f64]| {
        for j in 0..x.len() {
            x[j] = x[j].clamp(lower[j], upper[j]);
        }
    };
    let mut x = x0.to_vec();
    project(&mut x);
    let mut r = f(&x);
    let mut cost = cost_of(&r);
    let mut history = vec![cost];
    let mut lambda = 1e-3;
    let mut iterations = 0;
    let mut jac = jacobian(&f, &x, scale, opts.fd_step);
    while iterations < opts.max_iter {
        let rms = (2.0 * cost / r.len().max(1) as f64).sqrt();
        if gradient_cosine(&jac, &r, &x, lower, upper) <= opts.gtol || rms <= opts.residual_floor {
            break;
        }
        iterations += 1;
        let a = normal_matrix(&jac);
        let g: Vec<f64> = jac
            .iter()
            .map(|col| col.iter().zip(&r).map(|(p, q)| p * q).sum())
            .collect();
        let dmax = (0..x.len()).map(|i| a[i][i]).fold(0.0, f64::max);
        let mut accepted = false;
        while lambda < 1e16 {
            let mut damped = a.clone();
            for (i, row) in damped.iter_mut().enumerate() {
                row[i] += lambda * a[i][i].max(1e-12 * dmax);
            }
            let Some(step) = solve(damped, g.iter().map(|v| -v).collect()) else {
                lambda *= 10.0;
                continue;
            };
            let mut xn: Vec<f64> = x.iter().zip(&step).map(|(a, b)| a + b).collect();
            project(&mut xn);
            if xn.iter().zip(&x).all(|(a, b)| a == b) {
                lambda *= 10.0;
                continue;
            }
            let rn = f(&xn);
            let cn = cost_of(&rn);
            if cn < cost {
                x = xn;
                r = rn;
                cost = cn;
                history.push(cost);
                lambda = (lambda / 10.0).max(1e-12);
                accepted = true;
                break;
            }
            lambda *= 10.0;
        }
        if !accepted {
            break;
        }
        jac = jacobian(&f, &x, scale, opts.fd_step);
    }
    let cosine = gradient_cosine(&jac, &r, &x, lower, upper);
    let rms = (2.0 * cost / r.len().max(1) as f64).sqrt();
    let exact = rms <= opts.residual_floor;
    let normal_inverse_diag = {
        let a = normal_matrix(&jac);
        let m = x.len();
        let mut diag = Vec::with_capacity(m);
        for j in 0..m {
            let mut e = vec![0.0; m];
            e[j] = 1.0;
            match solve(a.clone(), e) {
                Some(col) => diag.push(col[j]),
                None => break,
            }
        }
        (diag.len() == m).then_some(diag)
    };
    LmOutcome {
        x,
        cost,
        residuals: r,
        iterations,
        converged: (exact || cosine <= opts.gtol) && normal_inverse_diag.is_some(),
        cost_history: history,
        normal_inverse_diag,
        gradient_cosine: cosine,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fits_exponential_decay() {
        let t: Vec<f64> = (0..30).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = t.iter().map(|t| 2.5 * (-1.3 * t).exp()).collect();
        let res = |p: &[f64]| -> Vec<f64> {
            t.iter()
                .zip(&y)
                .map(|(t, y)| p[0] * (-p[1] * t).exp() - y)
                .collect()
        };
        let opts = LmOptions {
            residual_floor: 1e-12,
            ..LmOptions::default()
        };
        let out = levenberg_marquardt(
            res,
            &[1.0, 0.5],
            &[0.0, 0.0],
            &[10.0, 10.0],
            &[1.0, 1.0],
            opts,
        );
        assert!(out.converged);
        assert!((out.x[0] - 2.5).abs() < 1e-8 && (out.x[1] - 1.3).abs() < 1e-8);
        assert!(out.cost_history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn respects_bounds() {
        let res = |p: &[f64]| vec![p[0] - 3.0];
        let out = levenberg_marquardt(res, &[0.5], &[0.0], &[1.0], &[1.0], LmOptions::default());
        assert_eq!(out.x[0], 1.0);
        assert!(out.converged);
    }

    #[test]
    fn singular_problem_is_not_converged() {
        // Only the sum of the parameters is identifiable.
        let res = |p: &[f64]| vec![p[0] + p[1] - 1.0, 2.0 * (p[0] + p[1]) - 2.0];
        let out = levenberg_marquardt(
            res,
            &[0.2, 0.2],
            &[-5.0, -5.0],
            &[5.0, 5.0],
            &[1.0, 1.0],
            LmOptions::default(),
        );
        assert!(!out.converged);
        assert!(out.normal_inverse_diag.is_none());
    }

    #[test]
    fn linear_solver() {
        let x = solve(vec![vec![0.0, 2.0], vec![3.0, 1.0]], vec![4.0, 5.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 2.0).abs() < 1e-15);
        assert!(solve(vec![vec![1.0, 2.0], vec![2.0, 4.0]], vec![1.0, 2.0]).is_none());
    }
}
