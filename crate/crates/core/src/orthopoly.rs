//! Monic Chebyshev polynomials on `[-2, 2]`.
//!
//! `Φ_n(2cos θ) = sin((n+1)θ)/sin θ` (second kind, orthonormal for the
//! semicircle law) and `T_n(2cos θ) = 2cos(nθ)` (first kind, `T_0 = 2`).

use std::f64::consts::PI;

use crate::error::{Error, Result};

fn check_support(x: f64) -> Result<()> {
    if x.is_finite() && x.abs() <= 2.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("x = {x} outside [-2, 2]")))
    }
}

/// `[Φ_0(x), …, Φ_n(x)]` by `Φ_{k+1} = xΦ_k − Φ_{k−1}`. No domain check.
pub fn phi_all(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n >= 1 {
        out.push(x);
    }
    for k in 2..=n {
        out.push(x * out[k - 1] - out[k - 2]);
    }
    out
}

/// `Φ_n(x)` by forward recurrence.
pub fn phi(n: usize, x: f64) -> Result<f64> {
    check_support(x)?;
    let (mut prev, mut cur) = (0.0, 1.0);
    for _ in 0..n {
        (prev, cur) = (cur, x * cur - prev);
    }
    Ok(cur)
}

/// `Φ_n` with the convention `Φ_{-k} = 0`.
pub fn phi_signed(n: i64, x: f64) -> Result<f64> {
    if n < 0 {
        check_support(x)?;
        return Ok(0.0);
    }
    phi(n as usize, x)
}

/// `Φ_n(2cos θ)` from the trigonometric form; only for `θ ∈ (0, π)`.
pub fn phi_trig(n: usize, theta: f64) -> f64 {
    ((n + 1) as f64 * theta).sin() / theta.sin()
}

/// `T_n(x) = 2cos(n arccos(x/2))`.
pub fn t_cheb(n: usize, x: f64) -> Result<f64> {
    check_support(x)?;
    Ok(2.0 * (n as f64 * (x / 2.0).acos()).cos())
}

/// `[T_0(x), …, T_n(x)]` by the same three-term recurrence as `Φ`.
pub fn t_all(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(2.0);
    if n >= 1 {
        out.push(x);
    }
    for k in 2..=n {
        out.push(x * out[k - 1] - out[k - 2]);
    }
    out
}

/// Which connection identity failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connection {
    /// `T_{n+1} = Φ_{n+1} − Φ_{n−1}`
    Difference,
    /// `2T_{n+1} = xT_n − (4 − x²)Φ_{n−1}`
    Mixed,
    /// `T_{n+1} = 2Φ_{n+1} − xΦ_n`
    Linear,
}

/// Outcome of [`connection_checks`].
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionReport {
    pub checked: usize,
    pub max_residual: f64,
    /// First failure as `(n, x, identity, relative residual)`.
    pub first_failure: Option<(usize, f64, Connection, f64)>,
}

impl ConnectionReport {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// Checks the three connection identities between `T` and `Φ` for
/// `0 ≤ n ≤ n_max` on `grid`, relative to `max(1, |T_{n+1}|)`.
pub fn connection_checks(n_max: usize, grid: &[f64], tol: f64) -> Result<ConnectionReport> {
    let mut report = ConnectionReport {
        checked: 0,
        max_residual: 0.0,
        first_failure: None,
    };
    for &x in grid {
        check_support(x)?;
        let ph = phi_all(n_max + 1, x);
        for n in 0..=n_max {
            let t_next = t_cheb(n + 1, x)?;
            let t_n = t_cheb(n, x)?;
            let ph_prev = if n == 0 { 0.0 } else { ph[n - 1] };
            let scale = t_next.abs().max(1.0);
            let residuals = [
                (Connection::Difference, t_next - (ph[n + 1] - ph_prev)),
                (Connection::Mixed, 2.0 * t_next - (x * t_n - (4.0 - x * x) * ph_prev)),
                (Connection::Linear, t_next - (2.0 * ph[n + 1] - x * ph[n])),
            ];
            for (which, r) in residuals {
                let rel = r.abs() / scale;
                report.checked += 1;
                report.max_residual = report.max_residual.max(rel);
                if rel > tol && report.first_failure.is_none() {
                    report.first_failure = Some((n, x, which, rel));
                }
            }
        }
    }
    Ok(report)
}

/// Gauss rule for the semicircle law `dμ = (1/2π)√(4−y²)dy`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ_k w_k f(x_k)`.
    pub fn integrate<T>(&self, mut f: impl FnMut(f64) -> T) -> T
    where
        T: std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + Default,
    {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(T::default(), |acc, (&x, &w)| acc + f(x) * w)
    }
}

/// `M`-point Gauss–Chebyshev-U rule, exact for degree `≤ 2M − 1`.
///
/// Nodes `2cos(kπ/(M+1))`, weights `(2/(M+1)) sin²(kπ/(M+1))`, `k = 1..M`.
pub fn quadrature_rule(m: usize) -> QuadratureRule {
    let h = PI / (m + 1) as f64;
    let (nodes, weights) = (1..=m)
        .map(|k| {
            let th = k as f64 * h;
            (2.0 * th.cos(), 2.0 / (m + 1) as f64 * th.sin().powi(2))
        })
        .unzip();
    QuadratureRule { nodes, weights }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(phi(0, 0.3).unwrap(), 1.0);
        assert_eq!(phi(1, 0.3).unwrap(), 0.3);
        assert_eq!(phi(2, 1.0).unwrap(), 0.0);
        let x = 2.0 * (PI / 8.0).cos();
        assert!((phi(3, x).unwrap() - 2.613125929752753).abs() < 1e-12);
        assert_eq!(t_cheb(0, 0.4).unwrap(), 2.0);
        assert!((t_cheb(2, 1.0).unwrap() + 1.0).abs() < 1e-15);
        assert!((t_cheb(3, 0.5).unwrap() + 1.375).abs() < 1e-14);
        assert!((t_cheb(2, 0.0).unwrap() + 2.0).abs() < 1e-15);
        assert!(matches!(phi(1, 2.1), Err(Error::Domain(_))));
        assert!(matches!(t_cheb(1, -2.5), Err(Error::Domain(_))));
    }

    #[test]
    fn recurrence_matches_trig_form() {
        for j in 1..=101 {
            let th = PI * j as f64 / 102.0;
            let x = 2.0 * th.cos();
            let all = phi_all(200, x);
            for (n, v) in all.iter().enumerate() {
                let exact = phi_trig(n, th);
                let err = (v - exact).abs() / exact.abs().max(1.0);
                assert!(err < 1e-10, "n={n} theta={th} err={err}");
            }
        }
    }

    #[test]
    fn t_recurrence_matches_cosine() {
        for x in [-1.9, -0.3, 0.0, 0.8, 1.99] {
            for (n, v) in t_all(60, x).iter().enumerate() {
                assert!((v - t_cheb(n, x).unwrap()).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn connections_hold() {
        let grid: Vec<f64> = (0..101).map(|j| -2.0 + 4.0 * j as f64 / 100.0).collect();
        let report = connection_checks(100, &grid, 1e-10).unwrap();
        assert!(report.passed(), "{report:?}");
        let one = connection_checks(4, &[0.7], 1e-11).unwrap();
        assert!(one.passed());
        assert_eq!(one.checked, 15);
    }

    #[test]
    fn quadrature_moments() {
        let q = quadrature_rule(64);
        let total: f64 = q.integrate(|_| 1.0);
        assert!((total - 1.0).abs() < 1e-14);
        let second: f64 = q.integrate(|x| x * x);
        assert!((second - 1.0).abs() < 1e-14);
        let fourth: f64 = q.integrate(|x| x.powi(4));
        assert!((fourth - 2.0).abs() < 1e-13);
    }

    #[test]
    fn orthonormality() {
        let q = quadrature_rule(64);
        let table: Vec<Vec<f64>> = q.nodes.iter().map(|&x| phi_all(20, x)).collect();
        for m in 0..=20 {
            for n in 0..=20 {
                let ip: f64 = table
                    .iter()
                    .zip(&q.weights)
                    .map(|(row, w)| w * row[m] * row[n])
                    .sum();
                let delta = if m == n { 1.0 } else { 0.0 };
                assert!((ip - delta).abs() < 1e-12, "m={m} n={n} ip={ip}");
            }
        }
    }
}
