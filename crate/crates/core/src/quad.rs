//! Gauss–Legendre rules, adaptive integration and a folded principal-value rule.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

const GL_ORDER: usize = 20;
const MAX_DEPTH: usize = 40;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                (p0, p1) = (p1, ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf);
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn default_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GL_ORDER))
}

fn panel<F>(f: &mut F, a: f64, b: f64, dim: usize) -> Vec<Complex64>
where
    F: FnMut(f64) -> Vec<Complex64>,
{
    let (xs, ws) = default_rule();
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    let mut acc = vec![Complex64::default(); dim];
    for (x, w) in xs.iter().zip(ws) {
        let v = f(c + h * x);
        for (s, y) in acc.iter_mut().zip(v) {
            *s += y * (w * h);
        }
    }
    acc
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Adaptive Gauss–Legendre integral of a vector-valued function on `[a, b]`.
///
/// Panels are bisected until the coarse and refined estimates agree to a
/// share of `tol` proportional to the panel length. The returned error
/// estimate is the sum of the accepted panel differences.
pub fn integrate_vec<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<(Vec<Complex64>, f64)>
where
    F: FnMut(f64) -> Vec<Complex64>,
{
    let dim = f(a).len();
    if a == b {
        return Ok((vec![Complex64::default(); dim], 0.0));
    }
    let total = (b - a).abs();
    let mut out = vec![Complex64::default(); dim];
    let mut err = 0.0;
    let whole = panel(&mut f, a, b, dim);
    let mut stack = vec![(a, b, whole, 0usize)];
    while let Some((lo, hi, coarse, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = panel(&mut f, lo, mid, dim);
        let right = panel(&mut f, mid, hi, dim);
        let fine: Vec<Complex64> = left.iter().zip(&right).map(|(l, r)| l + r).collect();
        let diff = max_diff(&coarse, &fine);
        let share = tol * (hi - lo).abs() / total;
        // at full depth a panel may still spend what is left of the global budget
        if diff <= share || (depth >= MAX_DEPTH && err + diff <= 0.5 * tol) {
            for (s, y) in out.iter_mut().zip(&fine) {
                *s += y;
            }
            err += diff;
        } else if depth >= MAX_DEPTH {
            return Err(Error::Quadrature { tol, estimate: diff });
        } else {
            stack.push((lo, mid, left, depth + 1));
            stack.push((mid, hi, right, depth + 1));
        }
    }
    Ok((out, err))
}

/// Scalar version of [`integrate_vec`].
pub fn integrate<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (v, _) = integrate_vec(|x| vec![Complex64::new(f(x), 0.0)], a, b, tol)?;
    Ok(v[0].re)
}

/// `p.v. ∫_0^π g(φ) / (cos θ − cos φ) dφ` for `θ ∈ (0, π)`.
///
/// On the window `|φ − θ| < w`, `w = min(θ, π − θ)`, the integrand is folded
/// as `h(u) = G(θ+u) + G(θ−u)`, which is bounded at `u = 0`. Denominators use
/// `cos θ − cos(θ ± u) = ±2 sin(θ ± u/2) sin(u/2)` to avoid cancellation.
pub fn pv_cos<F>(mut g: F, theta: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    if !(theta > 0.0 && theta < PI) {
        return Err(Error::Domain(format!("theta = {theta} outside (0, pi)")));
    }
    let w = theta.min(PI - theta);
    let folded = integrate(
        |u| {
            let s = (0.5 * u).sin();
            let plus = g(theta + u) / (2.0 * (theta + 0.5 * u).sin() * s);
            let minus = g(theta - u) / (2.0 * (theta - 0.5 * u).sin() * s);
            plus - minus
        },
        0.0,
        w,
        0.5 * tol,
    )?;
    let (lo, hi) = if theta <= 0.5 * PI {
        (2.0 * theta, PI)
    } else {
        (0.0, 2.0 * theta - PI)
    };
    let rest = integrate(|p| g(p) / (theta.cos() - p.cos()), lo, hi, 0.5 * tol)?;
    Ok(folded + rest)
}
