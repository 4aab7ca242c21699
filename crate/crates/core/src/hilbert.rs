//! The μ-Hilbert transform `H_μ f(x) = 2 p.v.∫ f(y)/(x−y) dμ(y)` and the
//! momentum `P = iH_μ` on `L²([-2,2], μ)`.
//!
//! On the monic basis `H_μΦ_n = T_{n+1}`, so the spectral path is a relabelling
//! of coefficients. A quadrature path with singularity subtraction is kept as
//! an independent check.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::orthopoly::{phi_all, quadrature_rule, t_all, QuadratureRule};
use crate::quad::pv_cos;
use crate::specfun::{bessel_tail_index, jn};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Largest Bessel order a Kapteyn sum may need.
pub const MAX_KAPTEYN_TERMS: usize = 400;

/// `f = Σ c_n Φ_n`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ChebSeries {
    pub coeffs: Vec<Complex64>,
}

/// `g = Σ d_n T_n`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TSeries {
    pub coeffs: Vec<Complex64>,
}

impl ChebSeries {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// The basis element `Φ_n`.
    pub fn basis(n: usize) -> Self {
        let mut c = vec![Complex64::default(); n + 1];
        c[n] = Complex64::new(1.0, 0.0);
        Self::new(c)
    }

    pub fn degree_bound(&self) -> usize {
        self.coeffs.len()
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        if self.coeffs.is_empty() {
            return Complex64::default();
        }
        let ph = phi_all(self.coeffs.len() - 1, x);
        self.coeffs.iter().zip(ph).map(|(c, p)| c * p).sum()
    }

    /// `‖f‖²` in `L²(μ)`, by orthonormality.
    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `⟨self, other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &ChebSeries) -> Complex64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Multiplication by `x`: `xΦ_n = Φ_{n+1} + Φ_{n−1}`.
    pub fn mul_x(&self) -> ChebSeries {
        let n = self.coeffs.len();
        let mut out = vec![Complex64::default(); n + 1];
        for (k, &c) in self.coeffs.iter().enumerate() {
            out[k + 1] += c;
            if k > 0 {
                out[k - 1] += c;
            }
        }
        ChebSeries::new(out)
    }

    pub fn scale(&self, z: Complex64) -> ChebSeries {
        ChebSeries::new(self.coeffs.iter().map(|c| c * z).collect())
    }

    pub fn sub(&self, other: &ChebSeries) -> ChebSeries {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |v: &[Complex64], k: usize| v.get(k).copied().unwrap_or_default();
        ChebSeries::new(
            (0..n)
                .map(|k| get(&self.coeffs, k) - get(&other.coeffs, k))
                .collect(),
        )
    }
}

impl TSeries {
    pub fn eval(&self, x: f64) -> Complex64 {
        if self.coeffs.is_empty() {
            return Complex64::default();
        }
        let t = t_all(self.coeffs.len() - 1, x);
        self.coeffs.iter().zip(t).map(|(c, v)| c * v).sum()
    }

    /// Re-expansion on `Φ` with `T_0 = 2Φ_0`, `T_1 = Φ_1`, `T_{n+1} = Φ_{n+1} − Φ_{n−1}`.
    pub fn to_phi(&self) -> ChebSeries {
        let n = self.coeffs.len();
        let mut out = vec![Complex64::default(); n.max(1)];
        for (j, &d) in self.coeffs.iter().enumerate() {
            match j {
                0 => out[0] += 2.0 * d,
                _ => {
                    out[j] += d;
                    if j >= 2 {
                        out[j - 2] -= d;
                    }
                }
            }
        }
        ChebSeries::new(out)
    }
}

/// `Σ c_nΦ_n ↦ Σ c_nT_{n+1}`.
pub fn hilbert_mu_spectral(f: &ChebSeries) -> TSeries {
    let mut d = Vec::with_capacity(f.coeffs.len() + 1);
    d.push(Complex64::default());
    d.extend_from_slice(&f.coeffs);
    TSeries { coeffs: d }
}

/// `H_μ f(x)` by Gauss–U quadrature after subtracting `f(x)`:
/// `2Σ_k w_k (f(y_k) − f(x))/(x − y_k) + x f(x)`, using `p.v.∫dμ(y)/(x−y) = x/2`.
///
/// Exact up to rounding for polynomials of degree `≤ 2M`.
pub fn hilbert_mu_pv(f: impl Fn(f64) -> f64, x: f64, rule: &QuadratureRule) -> Result<f64> {
    if !(x > -2.0 && x < 2.0) {
        return Err(Error::Domain(format!("x = {x} outside (-2, 2)")));
    }
    let fx = f(x);
    let mut acc = 0.0;
    for (&y, &w) in rule.nodes.iter().zip(&rule.weights) {
        let d = x - y;
        if d.abs() <= 4.0 * f64::EPSILON {
            return Err(Error::SingularNode(x));
        }
        acc += w * (f(y) - fx) / d;
    }
    Ok(2.0 * acc + x * fx)
}

/// [`hilbert_mu_pv`] with a fresh `M`-point rule.
pub fn hilbert_mu_pv_nodes(f: impl Fn(f64) -> f64, x: f64, m: usize) -> Result<f64> {
    hilbert_mu_pv(f, x, &quadrature_rule(m))
}

/// `P f = iH_μ f`, returned on the `Φ` basis.
pub fn momentum_apply(f: &ChebSeries) -> ChebSeries {
    hilbert_mu_spectral(f).to_phi().scale(I)
}

/// `½P² f = −½H_μ² f`.
pub fn kinetic_apply(f: &ChebSeries) -> ChebSeries {
    momentum_apply(&momentum_apply(f)).scale(Complex64::new(0.5, 0.0))
}

/// `ρ(x) = (4 − x²)^{1/4}/√(2π)` on `[-2, 2]`, zero outside; `ρ²` is the semicircle density.
pub fn rho_weight(x: f64) -> f64 {
    if x.abs() >= 2.0 {
        return 0.0;
    }
    (4.0 - x * x).powf(0.25) / (2.0 * PI).sqrt()
}

/// Result of [`schrodinger_commutator_check`] on one level.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutatorReport {
    pub n: usize,
    /// `(x, ([Q,P]ψ)(x))` with `ψ = Φ_nρ`.
    pub values: Vec<(f64, Complex64)>,
    /// Largest deviation from `2iρ δ_{n0}`.
    pub max_residual: f64,
}

/// `[Q, P](Φ_nρ)` with `Q` multiplication by `x` and `P = iρH_μρ⁻¹`.
///
/// `H_μ` is applied through [`hilbert_mu_pv`] with `M` nodes, and `ρ⁻¹` is
/// only evaluated at interior nodes. The expected value is `2iρ` for `n = 0`
/// and `0` otherwise. The evaluation grid sits between the nodes.
pub fn schrodinger_commutator_check(n: usize, m: usize, grid: &[f64]) -> Result<CommutatorReport> {
    let rule = quadrature_rule(m);
    let psi = |y: f64| phi_all(n, y)[n] * rho_weight(y);
    let g = |y: f64| psi(y) / rho_weight(y);
    let yg = |y: f64| y * psi(y) / rho_weight(y);
    let mut values = Vec::with_capacity(grid.len());
    let mut max_residual: f64 = 0.0;
    for &x in grid {
        // P ψ = iρ H_μ(ρ⁻¹ψ), P Qψ = iρ H_μ(ρ⁻¹ x ψ)
        let p_psi = I * rho_weight(x) * hilbert_mu_pv(g, x, &rule)?;
        let p_q_psi = I * rho_weight(x) * hilbert_mu_pv(yg, x, &rule)?;
        let value = x * p_psi - p_q_psi;
        let expected = if n == 0 {
            2.0 * I * rho_weight(x)
        } else {
            Complex64::default()
        };
        max_residual = max_residual.max((value - expected).norm());
        values.push((x, value));
    }
    Ok(CommutatorReport {
        n,
        values,
        max_residual,
    })
}

fn kapteyn_terms(t: f64) -> Result<usize> {
    let n = bessel_tail_index(t, 1e-17) + 2;
    if n > MAX_KAPTEYN_TERMS {
        return Err(Error::NonConvergence {
            what: "Kapteyn series",
            terms: n,
        });
    }
    Ok(n)
}

fn check_kapteyn_args(t: f64, theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta < PI) {
        return Err(Error::Domain(format!("theta = {theta} outside (0, pi)")));
    }
    if !(t.abs() <= 8.0) {
        return Err(Error::Domain(format!("|t| = {} exceeds 8", t.abs())));
    }
    Ok(())
}

/// `Σ_{m≥1} (−1)^m J_m(2t) sin(mθ)`.
pub fn kapteyn_sum_sin(t: f64, theta: f64) -> Result<f64> {
    check_kapteyn_args(t, theta)?;
    let terms = kapteyn_terms(t)?;
    Ok((1..=terms)
        .map(|m| {
            let s = if m % 2 == 0 { 1.0 } else { -1.0 };
            s * jn(m, 2.0 * t) * (m as f64 * theta).sin()
        })
        .sum())
}

/// `Σ_{m≥1} (−1)^m J_m(2t) cos(mθ)`.
pub fn kapteyn_sum_cos(t: f64, theta: f64) -> Result<f64> {
    check_kapteyn_args(t, theta)?;
    let terms = kapteyn_terms(t)?;
    Ok((1..=terms)
        .map(|m| {
            let s = if m % 2 == 0 { 1.0 } else { -1.0 };
            s * jn(m, 2.0 * t) * (m as f64 * theta).cos()
        })
        .sum())
}

/// `p.v.∫_0^π cos(2t sin φ)/(cos θ − cos φ) dφ`.
pub fn pv_cos_integral(t: f64, theta: f64, tol: f64) -> Result<f64> {
    pv_cos(|p| (2.0 * t * p.sin()).cos(), theta, tol)
}

/// `p.v.∫_0^π sin(2t sin φ) sin φ/(cos θ − cos φ) dφ`.
pub fn pv_sin_integral(t: f64, theta: f64, tol: f64) -> Result<f64> {
    pv_cos(|p| (2.0 * t * p.sin()).sin() * p.sin(), theta, tol)
}

/// Integral form of [`kapteyn_sum_sin`]:
/// `−sin(2t sin θ)/2 − (sin θ/2π) p.v.∫_0^π cos(2t sin φ)/(cos θ − cos φ) dφ`.
pub fn kapteyn_sin_integral_form(t: f64, theta: f64, tol: f64) -> Result<f64> {
    check_kapteyn_args(t, theta)?;
    let pv = pv_cos_integral(t, theta, tol)?;
    Ok(-(2.0 * t * theta.sin()).sin() / 2.0 - theta.sin() / (2.0 * PI) * pv)
}

/// Integral form of [`kapteyn_sum_cos`]:
/// `(cos(2t sin θ) − J_0(2t))/2 − (1/2π) p.v.∫_0^π sin(2t sin φ) sin φ/(cos θ − cos φ) dφ`.
pub fn kapteyn_cos_integral_form(t: f64, theta: f64, tol: f64) -> Result<f64> {
    check_kapteyn_args(t, theta)?;
    let pv = pv_sin_integral(t, theta, tol)?;
    Ok(((2.0 * t * theta.sin()).cos() - jn(0, 2.0 * t)) / 2.0 - pv / (2.0 * PI))
}

fn interior_theta(x: f64) -> Result<f64> {
    if !(x.abs() <= 2.0 - 1e-6) {
        return Err(Error::Domain(format!(
            "x = {x} too close to the edge of [-2, 2]"
        )));
    }
    Ok((x / 2.0).acos())
}

const PV_TOL: f64 = 1e-12;

/// `(e^{itP}Φ_0)(x)` in closed form, `x = 2cos θ`:
///
/// `J_0(2t) − x sin(2t sin θ)/(2 sin θ) − (x/2π) p.v.∫_0^π cos(2t sin φ)/(cos θ − cos φ) dφ`.
///
/// The series `Σ_l (−1)^l (l+1)J_{l+1}(2t)/t Φ_l(x)` is resummed with the
/// Kapteyn sums after writing `(l+1)J_{l+1}(2t)/t = J_{l+2}(2t) + J_l(2t)`.
pub fn evolved_vacuum_closed_form(t: f64, x: f64) -> Result<Complex64> {
    let theta = interior_theta(x)?;
    check_kapteyn_args(t, theta)?;
    let s = theta.sin();
    let pv = pv_cos_integral(t, theta, PV_TOL)?;
    let v = jn(0, 2.0 * t) - x * (2.0 * t * s).sin() / (2.0 * s) - x / (2.0 * PI) * pv;
    Ok(Complex64::new(v, 0.0))
}

/// `(e^{itP}Φ_1)(x)` in closed form:
///
/// `2J_1(2t) + x cos(2t sin θ) − (x/π) p.v.∫_0^π sin(2t sin φ) sin φ/(cos θ − cos φ) dφ`.
pub fn evolved_phi1_closed_form(t: f64, x: f64) -> Result<Complex64> {
    let theta = interior_theta(x)?;
    check_kapteyn_args(t, theta)?;
    let pv = pv_sin_integral(t, theta, PV_TOL)?;
    let v = 2.0 * jn(1, 2.0 * t) + x * (2.0 * t * theta.sin()).cos() - x / PI * pv;
    Ok(Complex64::new(v, 0.0))
}
