//! Small 1-D optimisation helpers shared by several modules.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
///
/// Stops when the bracket is narrower than `tol`; returns `(x, f(x))`.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 == f2 {
            // Peak lies between the probes; restart on the inner bracket.
            lo = x1;
            hi = x2;
            x1 = hi - INV_PHI * (hi - lo);
            x2 = lo + INV_PHI * (hi - lo);
            f1 = f(x1);
            f2 = f(x2);
        } else if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// Locate the `n`-th local maximum (1-based) of `f` on `(start, ∞)` by
/// scanning with step `h` and refining each bracket with golden section.
///
/// Gives up after `max_steps` scan steps.
pub fn nth_local_max<F: Fn(f64) -> f64>(
    f: F,
    start: f64,
    h: f64,
    n: usize,
    tol: f64,
    max_steps: usize,
) -> Option<(f64, f64)> {
    let mut found = 0;
    let mut x0 = start;
    let mut y0 = f(x0);
    let mut y1 = f(x0 + h);
    for _ in 0..max_steps {
        let y2 = f(x0 + 2.0 * h);
        if y1 > y0 && y1 >= y2 {
            found += 1;
            if found == n {
                return Some(golden_max(&f, x0, x0 + 2.0 * h, tol));
            }
        }
        x0 += h;
        y0 = y1;
        y1 = y2;
    }
    None
}

/// Vertex of the parabola through three equally spaced samples
/// `(x - h, ym)`, `(x, y0)`, `(x + h, yp)`. Falls back to `(x, y0)` when the
/// samples are collinear or the vertex leaves the bracket.
pub fn parabolic_vertex(x: f64, h: f64, ym: f64, y0: f64, yp: f64) -> (f64, f64) {
    let denom = ym - 2.0 * y0 + yp;
    if denom == 0.0 || !denom.is_finite() {
        return (x, y0);
    }
    let offset = 0.5 * (ym - yp) / denom;
    if offset.abs() > 1.0 {
        return (x, y0);
    }
    let y = y0 - 0.25 * (ym - yp) * offset;
    (x + offset * h, y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_peak() {
        let (x, y) = golden_max(|x| -(x - 0.3) * (x - 0.3) + 2.0, -1.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-7);
        assert!((y - 2.0).abs() < 1e-14);
    }

    #[test]
    fn nth_max_of_cosine() {
        // maxima of cos at 2π, 4π, ... on (0.5, ∞)
        let (x, _) = nth_local_max(f64::cos, 0.5, 0.01, 2, 1e-10, 10_000).unwrap();
        assert!((x - 4.0 * std::f64::consts::PI).abs() < 1e-7);
    }

    #[test]
    fn parabola_through_exact_samples() {
        let f = |x: f64| 1.0 - (x - 0.12) * (x - 0.12);
        let (x, y) = parabolic_vertex(0.1, 0.05, f(0.05), f(0.1), f(0.15));
        assert!((x - 0.12).abs() < 1e-12);
        assert!((y - 1.0).abs() < 1e-12);
    }
}
