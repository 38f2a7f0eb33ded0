//! Small dense Hermitian eigenproblems by cyclic Jacobi rotations.
//!
//! A complex Hermitian H = A + iB is handled through the real symmetric
//! embedding S = [[A, −B], [B, A]]. Every eigenvalue of H appears twice in
//! S, and for any real function f, f(S) has the same block structure with
//! f(H) = f(S)₁₁ + i f(S)₂₁.

use num_complex::Complex64;

/// Off-diagonal Frobenius norm, relative to the full norm, at which the
/// iteration stops.
pub const JACOBI_TOL: f64 = 1e-14;

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition of a real symmetric matrix (row-major, n × n).
///
/// Returns the eigenvalues and the matrix whose columns are the
/// corresponding orthonormal eigenvectors.
pub fn jacobi_symmetric(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let total: f64 = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    if total == 0.0 {
        return (vec![0.0; n], v);
    }
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum::<f64>()
            .sqrt();
        if off <= JACOBI_TOL * total {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[i][i]).collect(), v)
}

fn embed<const N: usize>(h: &[[Complex64; N]; N]) -> Vec<Vec<f64>> {
    let mut s = vec![vec![0.0; 2 * N]; 2 * N];
    for i in 0..N {
        for j in 0..N {
            let z = h[i][j];
            s[i][j] = z.re;
            s[i + N][j + N] = z.re;
            s[i][j + N] = -z.im;
            s[i + N][j] = z.im;
        }
    }
    s
}

/// Eigenvalues of a Hermitian matrix, in decreasing order.
pub fn hermitian_eigenvalues<const N: usize>(h: &[[Complex64; N]; N]) -> [f64; N] {
    let (mut w, _) = jacobi_symmetric(embed(h));
    w.sort_by(|a, b| b.total_cmp(a));
    let mut out = [0.0; N];
    for (i, o) in out.iter_mut().enumerate() {
        *o = 0.5 * (w[2 * i] + w[2 * i + 1]);
    }
    out
}

/// f(H) for a Hermitian H and real scalar function f.
pub fn hermitian_function<const N: usize>(
    h: &[[Complex64; N]; N],
    f: impl Fn(f64) -> f64,
) -> [[Complex64; N]; N] {
    let (w, v) = jacobi_symmetric(embed(h));
    let fw: Vec<f64> = w.into_iter().map(f).collect();
    let mut out = [[Complex64::new(0.0, 0.0); N]; N];
    for i in 0..N {
        for j in 0..N {
            let mut re = 0.0;
            let mut im = 0.0;
            for (k, fk) in fw.iter().enumerate() {
                re += v[i][k] * fk * v[j][k];
                im += v[i + N][k] * fk * v[j][k];
            }
            out[i][j] = Complex64::new(re, im);
        }
    }
    out
}

/// Matrix product of two N × N complex matrices.
pub fn matmul<const N: usize>(
    a: &[[Complex64; N]; N],
    b: &[[Complex64; N]; N],
) -> [[Complex64; N]; N] {
    let mut out = [[Complex64::new(0.0, 0.0); N]; N];
    for i in 0..N {
        for j in 0..N {
            out[i][j] = (0..N).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}
