//! Reference matrix exponentials used as ground truth for the closed forms.
//!
//! Everything here is deliberately generic: dense complex matrices, Taylor
//! series with a scaling step, and a speed-of-propagation bound that says how
//! large a truncation must be. Nothing in this module knows about Bessel
//! functions or the counting formulas.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{FockOperator, FockVector};

const MAX_TERMS: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct ExpmResult<T> {
    pub value: T,
    pub dim: usize,
    pub series_terms: usize,
    pub residual_bound: f64,
}

/// `max(‖A‖₁, ‖A‖_∞)`, an upper bound for the spectral norm.
pub fn norm_bound(a: &DMatrix<Complex64>) -> f64 {
    let col = a
        .column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let row = a
        .row_iter()
        .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    col.max(row)
}

fn is_skew_hermitian(m: &DMatrix<Complex64>) -> bool {
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    (m + m.adjoint()).iter().all(|z| z.norm() <= 1e-14 * scale)
}

/// Taylor terms needed so that `θ^{K+1}/(K+1)! · e^θ ≤ tol`; returns `(K, bound)`.
fn taylor_order(theta: f64, tol: f64) -> Result<(usize, f64)> {
    let mut term = 1.0;
    for k in 0..MAX_TERMS {
        term *= theta / (k + 1) as f64;
        let bound = term * theta.exp();
        if bound <= tol {
            return Ok((k, bound));
        }
    }
    Err(Error::NonConvergence {
        what: "matrix exponential Taylor series",
        terms: MAX_TERMS,
    })
}

/// `e^{zA} v` by `s` steps of a truncated Taylor series, `‖zA‖/s ≤ 1`.
///
/// For skew-Hermitian `zA` the result must keep the norm of `v` to `1e-12`.
pub fn expm_apply(
    a: &FockOperator,
    z: Complex64,
    v: &FockVector,
    tol: f64,
) -> Result<ExpmResult<FockVector>> {
    let n = a.dim();
    if v.dim() != n {
        return Err(Error::Dimension(format!(
            "operator of dimension {n} and vector of dimension {}",
            v.dim()
        )));
    }
    let za = a.entries() * z;
    let theta = norm_bound(&za);
    let steps = theta.ceil().max(1.0) as usize;
    let h = theta / steps as f64;
    let vnorm = v.norm();
    let (order, step_bound) = taylor_order(h, tol / (steps as f64 * vnorm.max(1.0)))?;
    let step_op = za / Complex64::new(steps as f64, 0.0);
    let mut cur = v.coeffs().clone();
    for _ in 0..steps {
        let mut term = cur.clone();
        let mut acc = cur.clone();
        for k in 1..=order {
            term = &step_op * term / Complex64::new(k as f64, 0.0);
            acc += &term;
        }
        cur = acc;
    }
    let residual_bound = steps as f64 * step_bound * vnorm;
    let out = FockVector::from_dvector(cur);
    if is_skew_hermitian(&(a.entries() * z)) {
        let defect = (out.norm() - vnorm).abs();
        if defect > 1e-12 * vnorm.max(1.0) {
            return Err(Error::CheckFailed {
                module: "oracle",
                identity: "unitary exponential preserves the norm".into(),
                residual: defect,
            });
        }
    }
    Ok(ExpmResult {
        value: out,
        dim: n,
        series_terms: order * steps,
        residual_bound,
    })
}

/// `e^{zA}` by scaling and squaring with a Taylor core.
pub fn expm_matrix(a: &FockOperator, z: Complex64, tol: f64) -> Result<ExpmResult<DMatrix<Complex64>>> {
    let n = a.dim();
    let za = a.entries() * z;
    let theta = norm_bound(&za);
    let mut squarings = 0u32;
    while theta / 2f64.powi(squarings as i32) > 0.5 {
        squarings += 1;
    }
    let h = theta / 2f64.powi(squarings as i32);
    // squaring amplifies a relative error by about 2^s
    let core_tol = tol / 2f64.powi(squarings as i32 + 1);
    let (order, core_bound) = taylor_order(h, core_tol)?;
    let scaled = za / Complex64::new(2f64.powi(squarings as i32), 0.0);
    let mut term = DMatrix::<Complex64>::identity(n, n);
    let mut acc = term.clone();
    for k in 1..=order {
        term = &scaled * term / Complex64::new(k as f64, 0.0);
        acc += &term;
    }
    for _ in 0..squarings {
        acc = &acc * &acc;
    }
    Ok(ExpmResult {
        value: acc,
        dim: n,
        series_terms: order,
        residual_bound: core_bound * 2f64.powi(squarings as i32) * theta.exp(),
    })
}

/// Bandwidth and norm bound of a banded generator on the full space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorBound {
    /// Levels moved per application.
    pub bandwidth: usize,
    /// Upper bound for the operator norm.
    pub norm: f64,
}

impl GeneratorBound {
    /// `X` and `P`: nearest-neighbour, norm 2.
    pub const TRIDIAGONAL: GeneratorBound = GeneratorBound {
        bandwidth: 1,
        norm: 2.0,
    };
    /// `P²`: two levels per step, norm 4.
    pub const PENTADIAGONAL: GeneratorBound = GeneratorBound {
        bandwidth: 2,
        norm: 4.0,
    };
}

/// `Σ_{j≥d} s^j/j!`, summed from the first omitted term.
fn exp_tail(s: f64, d: usize) -> f64 {
    let mut term = (1..=d).fold(1.0, |acc, j| acc * s / j as f64);
    let mut acc = 0.0;
    let mut j = d;
    while term > 0.0 {
        acc += term;
        j += 1;
        term *= s / j as f64;
        if term < 1e-18 * acc && j as f64 > 2.0 * s {
            break;
        }
    }
    acc
}

/// Dimension `N` such that truncating to `N` levels changes the evolution
/// `e^{itG}e_k` by less than `tol` in norm.
///
/// Powers `G^j e_k` are untouched by the truncation while `k + bandwidth·j ≤ N−1`,
/// so the defect is bounded by `2 Σ_{j>⌊(N−1−k)/bandwidth⌋} (‖G‖|t|)^j/j!`.
pub fn truncation_level_for(g: GeneratorBound, t: f64, k: usize, tol: f64) -> usize {
    assert!(tol > 0.0, "tolerance must be positive");
    let s = g.norm * t.abs();
    let mut steps = 1usize;
    while 2.0 * exp_tail(s, steps) >= tol {
        steps += 1;
    }
    // powers below `steps` stay exact once N−1−k ≥ bandwidth·(steps−1);
    // one extra level keeps e_k off the truncated boundary
    k + 2 + g.bandwidth * (steps - 1)
}

/// [`truncation_level_for`] with the tridiagonal bound used by `X` and `P`.
pub fn truncation_level(t: f64, k: usize, tol: f64) -> usize {
    truncation_level_for(GeneratorBound::TRIDIAGONAL, t, k, tol)
}

/// Column `k` of `e^{zA}` in dimension `n`.
pub fn expm_column(a: &FockOperator, z: Complex64, k: usize, tol: f64) -> Result<DVector<Complex64>> {
    let e = FockVector::basis(k, a.dim())?;
    Ok(expm_apply(a, z, &e, tol)?.value.into_inner())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{build_momentum, build_number_function, build_position};

    const I: Complex64 = Complex64::new(0.0, 1.0);

    #[test]
    fn zero_exponent_is_identity() {
        let p = build_momentum(8).unwrap();
        let v = FockVector::basis(3, 8).unwrap();
        let r = expm_apply(&p, Complex64::new(0.0, 0.0), &v, 1e-14).unwrap();
        assert_eq!(r.value, v);
    }

    #[test]
    fn diagonal_case() {
        let lam = build_number_function(6, |n| Complex64::new(n as f64, 0.0)).unwrap();
        let v = FockVector::new((0..6).map(|k| Complex64::new(1.0 + k as f64, 0.0)).collect())
            .unwrap();
        let t = 0.8;
        let r = expm_apply(&lam, I * t, &v, 1e-13).unwrap();
        for n in 0..6 {
            let exact = (I * t * n as f64).exp() * (1.0 + n as f64);
            assert!((r.value.coeffs()[n] - exact).norm() < 1e-12);
        }
    }

    #[test]
    fn vector_and_matrix_paths_agree() {
        let x = build_position(20).unwrap();
        let m = expm_matrix(&x, I * 1.3, 1e-13).unwrap();
        for k in [0, 4, 9] {
            let col = expm_column(&x, I * 1.3, k, 1e-13).unwrap();
            assert!((m.value.column(k) - col).camax() < 1e-12);
        }
        // unitarity of the dense exponential
        let u = &m.value;
        let defect = (u.adjoint() * u - DMatrix::identity(20, 20)).camax();
        assert!(defect < 1e-12);
    }

    #[test]
    fn group_property() {
        let p = build_momentum(40).unwrap();
        let v = FockVector::basis(2, 40).unwrap();
        let a = expm_apply(&p, I * 0.3, &v, 1e-14).unwrap().value;
        let ab = expm_apply(&p, I * 0.7, &a, 1e-14).unwrap().value;
        let direct = expm_apply(&p, I * 1.0, &v, 1e-14).unwrap().value;
        assert!((ab.coeffs() - direct.coeffs()).camax() < 1e-10);
    }

    #[test]
    fn truncation_levels() {
        assert_eq!(truncation_level(0.0, 0, 1e-10), 2);
        assert_eq!(truncation_level(0.0, 5, 1e-10), 7);
        // doubling N leaves the vacuum column unchanged beyond the tolerance
        for (t, k, tol) in [(1.0, 0usize, 1e-10), (4.0, 8, 1e-8)] {
            let n = truncation_level(t, k, tol);
            let small = expm_column(&build_momentum(n).unwrap(), I * t, k, 1e-14).unwrap();
            let big = expm_column(&build_momentum(2 * n).unwrap(), I * t, k, 1e-14).unwrap();
            let mut diff = 0.0;
            for l in 0..2 * n {
                let s = if l < n { small[l] } else { Complex64::new(0.0, 0.0) };
                diff += (s - big[l]).norm_sqr();
            }
            assert!(diff.sqrt() < tol, "t={t} k={k} N={n}");
        }
    }
}
