//! Evolution coefficients and one-parameter groups generated by `P`, `X`, `P²`
//! and the diagonal oscillator `H₁ = ω_Λ + ω_{Λ+1}`.
//!
//! Every group is written in normal order, `e^{itG} = Σ c_{m,n}(t) (a⁺)^m a^n`,
//! so that `⟨Φ_l, e^{itG}Φ_k⟩ = Σ_{j=0}^{l∧k} c_{l−j,k−j}(t)`. The
//! coefficients have two independent evaluations:
//!
//! * the defining series over sign words, weighted by `|Θ_{m+n+2p}(m,n)|`;
//! * closed forms, `(−1)^m (m+n+1) J_{m+n+1}(2t)/t` for `P` and a Kummer
//!   function for `P²`.
//!
//! Real `t` only.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::combinatorics::{catalan, theta_count};
use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::fock::build_momentum;
use crate::orthopoly::{phi_all, t_all};
use crate::quad::integrate_vec;
use crate::specfun::{bessel_j_ratio, bessel_tail_index, hyp1f1, jn, tail_index_for, SeriesResult};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Largest `|t|` accepted by the `P` and `X` coefficients.
pub const MAX_T_MOMENTUM: f64 = 16.0;
/// Largest `|t|` accepted by the `P²` coefficients.
pub const MAX_T_KINETIC: f64 = 8.0;
/// Term cap of the defining series.
pub const MAX_SERIES_TERMS: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    P,
    X,
    P2,
    H1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoeffKind {
    MomentumI,
    PositionI,
    KineticI2,
}

impl CoeffKind {
    pub fn generator(self) -> Generator {
        match self {
            CoeffKind::MomentumI => Generator::P,
            CoeffKind::PositionI => Generator::X,
            CoeffKind::KineticI2 => Generator::P2,
        }
    }
}

fn i_pow(k: usize) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => I,
        2 => Complex64::new(-1.0, 0.0),
        _ => -I,
    }
}

fn sign(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn check_t(t: f64, max: f64) -> Result<()> {
    if !t.is_finite() || t.abs() > max {
        return Err(Error::Domain(format!("|t| = {} exceeds {max}", t.abs())));
    }
    Ok(())
}

/// `|Θ_{m₊+m₋+2p}(m₊,m₋)|` for `p = 0, 1, …` as double-double values:
/// exact integers while they fit, then continued by the ratio
/// `(2p+m+1)(2p+m+2)/((p+1)(p+m+2))`, `m = m₊ + m₋`.
struct ThetaSeq {
    m_plus: usize,
    m_minus: usize,
    p: usize,
    cur: Dd,
}

impl ThetaSeq {
    fn new(m_plus: usize, m_minus: usize) -> Self {
        Self {
            m_plus,
            m_minus,
            p: 0,
            cur: Dd::ONE,
        }
    }

    fn advance(&mut self) {
        let p = self.p;
        self.p += 1;
        self.cur = match theta_count(self.m_plus, self.m_minus, self.p) {
            Ok(v) => Dd::from_u64(v),
            Err(_) => {
                let m = (self.m_plus + self.m_minus) as f64;
                let pf = p as f64;
                self.cur * ((2.0 * pf + m + 1.0) * (2.0 * pf + m + 2.0))
                    / ((pf + 1.0) * (pf + m + 2.0))
            }
        };
    }
}

/// `Σ_p s_p · x^{e+p·step}/(e+p·step)! · |Θ_{m+n+2p}(m,n)|`, real terms, with
/// `e = exponent0` and signs `s_p` supplied by the caller.
///
/// The tail is bounded by a geometric majorant `ratio_bound(p)` on
/// `|term_{p+1}/term_p|` once it drops below one.
fn theta_series(
    m: usize,
    n: usize,
    x: f64,
    exponent0: usize,
    step: usize,
    sign_of: impl Fn(usize) -> f64,
    ratio_bound: impl Fn(usize) -> f64,
    what: &'static str,
) -> Result<(f64, usize, f64)> {
    // x^e / e!
    let mut power = (1..=exponent0).fold(Dd::ONE, |acc, k| acc * x / k as f64);
    let mut theta = ThetaSeq::new(m, n);
    let mut acc = Dd::ZERO;
    let mut e = exponent0;
    for p in 0..MAX_SERIES_TERMS {
        let term = power * theta.cur;
        acc = acc + term * sign_of(p);
        for _ in 0..step {
            e += 1;
            power = power * x / e as f64;
        }
        theta.advance();
        let next = (power * theta.cur).abs();
        let r = ratio_bound(p + 1);
        if next == 0.0 {
            return Ok((acc.to_f64(), p + 1, 0.0));
        }
        if r < 1.0 {
            let tail = next / (1.0 - r);
            if tail <= 1e-17 * acc.abs().max(1e-300) || tail < 1e-300 {
                return Ok((acc.to_f64(), p + 1, tail));
            }
        }
    }
    Err(Error::NonConvergence {
        what,
        terms: MAX_SERIES_TERMS,
    })
}

/// `I_{m,n}(t)` by the closed form `(−1)^m (m+n+1) J_{m+n+1}(2t)/t`.
pub fn coeff_i_bessel(m: usize, n: usize, t: f64) -> Result<f64> {
    check_t(t, MAX_T_MOMENTUM)?;
    Ok(sign(m) * bessel_j_ratio(m + n, t))
}

/// `I_{m,n}(t) = Σ_p t^{m+n+2p}/(m+n+2p)! (−1)^{p+m} |Θ_{m+n+2p}(m,n)|`.
pub fn coeff_i_series(m: usize, n: usize, t: f64) -> Result<SeriesResult> {
    check_t(t, MAX_T_MOMENTUM)?;
    let big_n = m + n;
    let (v, terms, tail) = theta_series(
        m,
        n,
        t,
        big_n,
        2,
        |p| sign(p + m),
        // |term ratio| = t²/((p+1)(p+N+2)) after the Θ ratio cancels
        |p| t * t / ((p + 1) as f64 * (p + big_n + 2) as f64),
        "defining series of I_{m,n}",
    )?;
    Ok(SeriesResult {
        value: Complex64::new(v, 0.0),
        terms_used: terms,
        tail_bound: tail,
    })
}

fn agree(what: impl FnOnce() -> String, a: Complex64, b: Complex64, tol: f64) -> Result<()> {
    let r = (a - b).norm();
    if r > tol {
        return Err(Error::PathDisagreement {
            what: what(),
            residual: r,
            tol,
        });
    }
    Ok(())
}

/// `I_{m,n}(t)`, the coefficient of `(a⁺)^m a^n` in `e^{itP}`; both paths must agree within `tol`.
pub fn coeff_i(m: usize, n: usize, t: f64, tol: f64) -> Result<Complex64> {
    let fast = Complex64::new(coeff_i_bessel(m, n, t)?, 0.0);
    let slow = coeff_i_series(m, n, t)?.value;
    agree(|| format!("I_{{{m},{n}}}({t})"), fast, slow, tol)?;
    Ok(fast)
}

/// Coefficient of `(a⁺)^m a^n` in `e^{itX}`: `i^{m+n}(J_{m+n+2}(2t) + J_{m+n}(2t))`.
pub fn coeff_x_bessel(m: usize, n: usize, t: f64) -> Result<Complex64> {
    check_t(t, MAX_T_MOMENTUM)?;
    Ok(i_pow(m + n) * bessel_j_ratio(m + n, t))
}

/// Defining series `Σ_p (it)^{m+n+2p}/(m+n+2p)! |Θ_{m+n+2p}(m,n)|`.
pub fn coeff_x_series(m: usize, n: usize, t: f64) -> Result<SeriesResult> {
    check_t(t, MAX_T_MOMENTUM)?;
    let big_n = m + n;
    let (v, terms, tail) = theta_series(
        m,
        n,
        t,
        big_n,
        2,
        sign,
        |p| t * t / ((p + 1) as f64 * (p + big_n + 2) as f64),
        "defining series of the X coefficients",
    )?;
    Ok(SeriesResult {
        value: i_pow(big_n) * v,
        terms_used: terms,
        tail_bound: tail,
    })
}

/// Checked `X` coefficient.
pub fn coeff_x(m: usize, n: usize, t: f64, tol: f64) -> Result<Complex64> {
    let fast = coeff_x_bessel(m, n, t)?;
    let slow = coeff_x_series(m, n, t)?.value;
    agree(|| format!("X coefficient ({m},{n}) at t={t}"), fast, slow, tol)?;
    Ok(fast)
}

/// `I⁽²⁾_{m,n}(t) = χ_even(m+n) (−1)^m (−it)^{j}/j! ₁F₁(j+½; 2j+2; 4it)`, `j = (m+n)/2`.
pub fn coeff_i2_hyp(m: usize, n: usize, t: f64) -> Result<SeriesResult> {
    check_t(t, MAX_T_KINETIC)?;
    let big_n = m + n;
    if big_n % 2 == 1 {
        return Ok(SeriesResult {
            value: ZERO,
            terms_used: 0,
            tail_bound: 0.0,
        });
    }
    let j = big_n / 2;
    let f = hyp1f1(j as f64 + 0.5, big_n as f64 + 2.0, Complex64::new(0.0, 4.0 * t))?;
    let prefactor = sign(m) * (1..=j).fold(Complex64::new(1.0, 0.0), |acc, k| acc * (-I * t) / k as f64);
    Ok(SeriesResult {
        value: prefactor * f.value,
        terms_used: f.terms_used,
        tail_bound: prefactor.norm() * f.tail_bound,
    })
}

/// Defining series `χ_even(m+n)(−1)^{(3m+n)/2} Σ_p (it)^{j+p}/(j+p)! |Θ_{m+n+2p}(m,n)|`.
pub fn coeff_i2_series(m: usize, n: usize, t: f64) -> Result<SeriesResult> {
    check_t(t, MAX_T_KINETIC)?;
    let big_n = m + n;
    if big_n % 2 == 1 {
        return Ok(SeriesResult {
            value: ZERO,
            terms_used: 0,
            tail_bound: 0.0,
        });
    }
    let j = big_n / 2;
    // (it)^{j+p} = i^{j+p} t^{j+p}: split by the phase of i^{j+p}
    let mut parts = [0.0f64; 2];
    let mut terms = 0;
    let mut tail = 0.0;
    for (slot, phase) in [(0usize, 0usize), (1, 1)] {
        // real part collects j+p ≡ 0, 2 (mod 4), imaginary part j+p ≡ 1, 3
        let (v, used, tb) = theta_series(
            m,
            n,
            t,
            j,
            1,
            |p| {
                let e = j + p;
                if e % 2 != phase {
                    0.0
                } else if e % 4 < 2 {
                    1.0
                } else {
                    -1.0
                }
            },
            // |term ratio| ≤ 2|t|(2p+N+1)/((p+1)(p+N+2)) < 4|t|/(p+1)
            |p| 4.0 * t.abs() / (p + 1) as f64,
            "defining series of I2_{m,n}",
        )?;
        parts[slot] = v;
        terms = terms.max(used);
        tail += tb;
    }
    let s = sign((3 * m + n) / 2);
    Ok(SeriesResult {
        value: Complex64::new(s * parts[0], s * parts[1]),
        terms_used: terms,
        tail_bound: tail,
    })
}

/// Checked `I⁽²⁾_{m,n}(t)`; returns the Kummer-function value.
pub fn coeff_i2(m: usize, n: usize, t: f64, tol: f64) -> Result<Complex64> {
    let fast = coeff_i2_hyp(m, n, t)?.value;
    let slow = coeff_i2_series(m, n, t)?.value;
    agree(|| format!("I2_{{{m},{n}}}({t})"), fast, slow, tol)?;
    Ok(fast)
}

/// Closed-form coefficient of the given kind, without the series cross-check.
pub fn coeff_closed(kind: CoeffKind, m: usize, n: usize, t: f64) -> Result<Complex64> {
    match kind {
        CoeffKind::MomentumI => Ok(Complex64::new(coeff_i_bessel(m, n, t)?, 0.0)),
        CoeffKind::PositionI => coeff_x_bessel(m, n, t),
        CoeffKind::KineticI2 => Ok(coeff_i2_hyp(m, n, t)?.value),
    }
}

/// Defining-series coefficient of the given kind.
pub fn coeff_series(kind: CoeffKind, m: usize, n: usize, t: f64) -> Result<Complex64> {
    match kind {
        CoeffKind::MomentumI => Ok(coeff_i_series(m, n, t)?.value),
        CoeffKind::PositionI => Ok(coeff_x_series(m, n, t)?.value),
        CoeffKind::KineticI2 => Ok(coeff_i2_series(m, n, t)?.value),
    }
}

/// Coefficients `c_{m,n}(t)` for `m ≤ m_max`, `n ≤ n_max`, each cross-checked.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffTable {
    pub t: f64,
    pub kind: CoeffKind,
    pub entries: BTreeMap<(usize, usize), Complex64>,
    /// Series-vs-closed-form discrepancy per entry.
    pub agreement: BTreeMap<(usize, usize), f64>,
    pub tail_tol: f64,
}

impl CoeffTable {
    pub fn build(kind: CoeffKind, t: f64, m_max: usize, n_max: usize, tol: f64) -> Result<Self> {
        let mut entries = BTreeMap::new();
        let mut agreement = BTreeMap::new();
        for m in 0..=m_max {
            for n in 0..=n_max {
                let a = coeff_closed(kind, m, n, t)?;
                let b = coeff_series(kind, m, n, t)?;
                let r = (a - b).norm();
                if r > tol {
                    return Err(Error::PathDisagreement {
                        what: format!("{kind:?} ({m},{n}) at t={t}"),
                        residual: r,
                        tol,
                    });
                }
                entries.insert((m, n), a);
                agreement.insert((m, n), r);
            }
        }
        Ok(Self {
            t,
            kind,
            entries,
            agreement,
            tail_tol: tol,
        })
    }

    pub fn get(&self, m: usize, n: usize) -> Option<Complex64> {
        self.entries.get(&(m, n)).copied()
    }
}

fn coeff_for(gen: Generator, m: usize, n: usize, t: f64) -> Result<Complex64> {
    match gen {
        Generator::P => coeff_closed(CoeffKind::MomentumI, m, n, t),
        Generator::X => coeff_closed(CoeffKind::PositionI, m, n, t),
        Generator::P2 => coeff_closed(CoeffKind::KineticI2, m, n, t),
        Generator::H1 => Err(Error::Domain(
            "H1 is diagonal and has no normal-order table".into(),
        )),
    }
}

/// Diagonal oscillator energies `ω_k + ω_{k+1}` with `ω_0 = 0`, `ω_k = ω₁`.
fn h1_energy(k: usize, omega1: f64) -> f64 {
    if k == 0 {
        omega1
    } else {
        2.0 * omega1
    }
}

/// `⟨Φ_l, e^{itG}Φ_k⟩ = Σ_{j=0}^{l∧k} c_{l−j,k−j}(t)`; for `H₁` with `ω₁ = 1`.
pub fn matrix_element(gen: Generator, l: usize, k: usize, t: f64) -> Result<Complex64> {
    if gen == Generator::H1 {
        return Ok(if l == k {
            (I * t * h1_energy(k, 1.0)).exp()
        } else {
            ZERO
        });
    }
    (0..=l.min(k)).try_fold(ZERO, |acc, j| Ok(acc + coeff_for(gen, l - j, k - j, t)?))
}

/// `⟨Φ_l, e^{itP}Φ_k⟩` with every coefficient cross-checked to `tol`.
pub fn matrix_element_p(l: usize, k: usize, t: f64, tol: f64) -> Result<Complex64> {
    (0..=l.min(k)).try_fold(ZERO, |acc, j| Ok(acc + coeff_i(l - j, k - j, t, tol)?))
}

/// `(e^{itG}Φ_k)` on levels `0..=l_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolvedState {
    pub t: f64,
    pub k: usize,
    pub generator: Generator,
    pub amplitudes: Vec<Complex64>,
    /// Level after which the omitted amplitudes are below the tolerance.
    pub tail_index: usize,
    pub tail_tol: f64,
}

impl EvolvedState {
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm_defect(&self) -> f64 {
        (self.norm_sqr() - 1.0).abs()
    }

    /// `Σ_l a_l Φ_l(x)`.
    pub fn eval(&self, x: f64) -> Complex64 {
        let ph = phi_all(self.amplitudes.len().saturating_sub(1), x);
        self.amplitudes.iter().zip(ph).map(|(a, p)| a * p).sum()
    }
}

/// Level beyond which `e^{itP}Φ_k` and `e^{itX}Φ_k` carry less than `tol`.
pub fn level_tail_index(t: f64, k: usize, tol: f64) -> usize {
    bessel_tail_index(t, tol) + k
}

/// Level beyond which `e^{itP²}Φ_k` carries less than `tol`: `P²` moves two
/// levels per power and has norm 4, so levels past `k + 2n*` need
/// `Σ_{j>n*} (4|t|)^j/j! < tol`.
pub fn kinetic_tail_index(t: f64, k: usize, tol: f64) -> usize {
    k + 2 * tail_index_for(4.0 * t.abs(), 1.0, tol) + 1
}

fn evolve_generic(gen: Generator, k: usize, t: f64, l_max: usize, tol: f64) -> Result<EvolvedState> {
    let tail_index = match gen {
        Generator::P | Generator::X => level_tail_index(t, k, tol),
        Generator::P2 => kinetic_tail_index(t, k, tol),
        Generator::H1 => k,
    };
    if l_max < tail_index {
        return Err(Error::Truncation(format!(
            "l_max = {l_max} below the tail index {tail_index} for tol {tol:e}"
        )));
    }
    let amplitudes = (0..=l_max)
        .map(|l| matrix_element(gen, l, k, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(EvolvedState {
        t,
        k,
        generator: gen,
        amplitudes,
        tail_index,
        tail_tol: tol,
    })
}

/// `e^{itP}Φ_k`.
pub fn evolve_p(k: usize, t: f64, l_max: usize, tol: f64) -> Result<EvolvedState> {
    evolve_generic(Generator::P, k, t, l_max, tol)
}

/// `e^{itX}Φ_k`.
pub fn evolve_x(k: usize, t: f64, l_max: usize, tol: f64) -> Result<EvolvedState> {
    evolve_generic(Generator::X, k, t, l_max, tol)
}

/// `e^{itP²}Φ_k`.
pub fn evolve_p2(k: usize, t: f64, l_max: usize, tol: f64) -> Result<EvolvedState> {
    evolve_generic(Generator::P2, k, t, l_max, tol)
}

/// `e^{itP²}Φ_0`, supported on even levels.
pub fn evolve_p2_vacuum(t: f64, l_max: usize, tol: f64) -> Result<EvolvedState> {
    evolve_p2(0, t, l_max, tol)
}

/// `e^{itP²}Φ_0` from `Σ_p (−1)^m (it)^{m+p}|Θ_{2m+2p}(2m,0)|/(m+p)!` at level `2m`.
pub fn evolve_p2_vacuum_series(t: f64, l_max: usize) -> Result<Vec<Complex64>> {
    (0..=l_max)
        .map(|l| {
            if l % 2 == 1 {
                Ok(ZERO)
            } else {
                Ok(coeff_i2_series(l, 0, t)?.value)
            }
        })
        .collect()
}

/// `e^{itH₁}Φ_k = e^{it(ω_k+ω_{k+1})}Φ_k`.
pub fn evolve_h1(k: usize, t: f64, omega1: f64) -> Result<EvolvedState> {
    let mut amplitudes = vec![ZERO; k + 1];
    amplitudes[k] = (I * t * h1_energy(k, omega1)).exp();
    Ok(EvolvedState {
        t,
        k,
        generator: Generator::H1,
        amplitudes,
        tail_index: k,
        tail_tol: 0.0,
    })
}

/// `(e^{itX}Φ_0)(x) = e^{itx}`, since `X` acts as multiplication by `x`.
pub fn evolve_x_vacuum_pointwise(t: f64, x: f64) -> Result<Complex64> {
    if x.abs() > 2.0 {
        return Err(Error::Domain(format!("x = {x} outside [-2, 2]")));
    }
    Ok((I * t * x).exp())
}

/// The same vacuum evolution from the coefficient series
/// `J_0(2t) + Σ_{m≥1} i^m J_m(2t) T_m(x)`.
pub fn evolve_x_vacuum_bessel(t: f64, x: f64) -> Result<Complex64> {
    if x.abs() > 2.0 {
        return Err(Error::Domain(format!("x = {x} outside [-2, 2]")));
    }
    let terms = bessel_tail_index(t, 1e-17) + 2;
    let tv = t_all(terms, x);
    Ok((1..=terms).fold(Complex64::new(jn(0, 2.0 * t), 0.0), |acc, m| {
        acc + i_pow(m) * jn(m, 2.0 * t) * tv[m]
    }))
}

/// `(e^{itP}Φ_k)(x)` written with Bessel functions and the two Chebyshev families:
///
/// `J_0Φ_k − Σ_{n=1}^{k} J_n T_{k−n+2} − xJ_{k+1}
///  + x Σ_{n=0}^{k} Σ_{m≥n+2} (−1)^{m−n} J_m Φ_{m+k−2n−1}`, all `J` at `2t`.
pub fn evolve_p_pointwise_closed_form(k: usize, t: f64, x: f64) -> Result<Complex64> {
    if x.abs() > 2.0 {
        return Err(Error::Domain(format!("x = {x} outside [-2, 2]")));
    }
    let top = bessel_tail_index(t, 1e-17) + k + 4;
    let ph = phi_all(top + k + 2, x);
    let tv = t_all(k + 2, x);
    let j = |n: usize| jn(n, 2.0 * t);
    let mut v = j(0) * ph[k] - x * j(k + 1);
    for n in 1..=k {
        v -= j(n) * tv[k - n + 2];
    }
    for n in 0..=k {
        for m in n + 2..=top {
            v += x * sign(m - n) * j(m) * ph[m + k - 2 * n - 1];
        }
    }
    Ok(Complex64::new(v, 0.0))
}

/// `⟨Φ_0, e^{itG}Φ_0⟩ = J_1(2t)/t` for `G ∈ {P, X}`.
pub fn char_function(gen: Generator, t: f64) -> Result<Complex64> {
    match gen {
        Generator::P | Generator::X => Ok(Complex64::new(bessel_j_ratio(0, t), 0.0)),
        _ => Err(Error::Domain(format!(
            "vacuum characteristic function is defined here for P and X, not {gen:?}"
        ))),
    }
}

/// `Σ_p (−t²)^p C_p/(2p)!`, summed in double-double.
pub fn char_function_catalan(t: f64) -> Result<f64> {
    let q = -t * t;
    let mut power = Dd::ONE;
    let mut c = Dd::ONE;
    let mut acc = Dd::ZERO;
    for p in 0..MAX_SERIES_TERMS {
        acc = acc + power * c;
        let pf = p as f64;
        power = power * q / ((2.0 * pf + 1.0) * (2.0 * pf + 2.0));
        c = match catalan(p as u32 + 1) {
            Ok(v) => Dd::from_u64(v),
            Err(_) => c * (2.0 * (2.0 * pf + 1.0)) / (pf + 2.0),
        };
        let next = (power * c).abs();
        // later ratios are below t²/((p+2)(p+3)) · 4 / 4
        let r = t * t / ((pf + 2.0) * (pf + 3.0));
        if r < 1.0 && next / (1.0 - r) <= 1e-18 * acc.abs().max(1e-300) {
            return Ok(acc.to_f64());
        }
    }
    Err(Error::NonConvergence {
        what: "Catalan series of the characteristic function",
        terms: MAX_SERIES_TERMS,
    })
}

/// `⟨Φ_l, e^{itP}Φ_l⟩ = Σ_{m=0}^{l} I_{m,m}(t)`.
pub fn state_char_function(l: usize, t: f64) -> Result<Complex64> {
    (0..=l).try_fold(ZERO, |acc, m| Ok(acc + coeff_i_bessel(m, m, t)?))
}

/// `(m, n)` entry of `a⁺_t − a⁺` for `a⁺_t = e^{itP}a⁺e^{−itP}`:
/// `ω(−1)^{m+n} ∫_0^t (m+1)J_{m+1}(2s)/s · (n+1)J_{n+1}(2s)/s ds`.
pub fn heisenberg_aplus_p(t: f64, m: usize, n: usize, omega: f64, tol: f64) -> Result<f64> {
    check_t(t, MAX_T_MOMENTUM)?;
    let (v, _) = integrate_vec(
        |s| vec![Complex64::new(bessel_j_ratio(m, s) * bessel_j_ratio(n, s), 0.0)],
        0.0,
        t,
        tol / omega.abs().max(1.0),
    )?;
    Ok(omega * sign(m + n) * v[0].re)
}

/// `dim × dim` block of `a⁺_t − a⁺` under `e^{itP}`, all entries in one quadrature.
pub fn heisenberg_aplus_p_block(t: f64, dim: usize, omega: f64, tol: f64) -> Result<DMatrix<Complex64>> {
    check_t(t, MAX_T_MOMENTUM)?;
    let (v, _) = integrate_vec(
        |s| {
            let r: Vec<f64> = (0..dim).map(|k| sign(k) * bessel_j_ratio(k, s)).collect();
            let mut out = Vec::with_capacity(dim * dim);
            for m in 0..dim {
                for n in 0..dim {
                    out.push(Complex64::new(r[m] * r[n], 0.0));
                }
            }
            out
        },
        0.0,
        t,
        tol / omega.abs().max(1.0),
    )?;
    Ok(DMatrix::from_fn(dim, dim, |m, n| v[m * dim + n] * omega))
}

/// `dim × dim` block of `a⁺_t − a⁺` under `e^{itP²}`:
/// `ω ∫_0^t (iU_sΦ_1)∘(U_sΦ_0)^* ds` with `U_s = e^{isP²}` and `A∘B = AB + B*A*`.
///
/// `U_sΦ_0` and `U_sΦ_1` come from the Kummer-function coefficients.
pub fn heisenberg_aplus_p2(t: f64, dim: usize, omega: f64, tol: f64) -> Result<DMatrix<Complex64>> {
    check_t(t, MAX_T_KINETIC)?;
    let (v, _) = integrate_vec(
        |s| {
            let u0: Vec<Complex64> = (0..dim)
                .map(|l| matrix_element(Generator::P2, l, 0, s).unwrap_or(ZERO))
                .collect();
            let u1: Vec<Complex64> = (0..dim)
                .map(|l| matrix_element(Generator::P2, l, 1, s).unwrap_or(ZERO))
                .collect();
            let mut out = Vec::with_capacity(dim * dim);
            for m in 0..dim {
                for n in 0..dim {
                    let a = I * u1[m] * u0[n].conj();
                    let b = u0[m] * (I * u1[n]).conj();
                    out.push(a + b);
                }
            }
            out
        },
        0.0,
        t,
        tol / omega.abs().max(1.0),
    )?;
    Ok(DMatrix::from_fn(dim, dim, |m, n| v[m * dim + n] * omega))
}

/// Power-series form of [`heisenberg_aplus_p2`]:
///
/// `ω Σ_{m,p,n,q} (−1)^{m+q} |Θ_{2m+2p}(2m,0)||Θ_{2n+2q}(2n,0)| / ((m+p)!(n+q)!(K+1))
///  · [(it)^{K+1} D_m Φ_{2n}^* + (−it)^{K+1} Φ_{2n} D_m^*]`,
/// `K = m+n+p+q`, `D_m = Φ_{2m+1} − Φ_{2m−1}` (`Φ_{−1} = 0`).
pub fn heisenberg_aplus_p2_series(t: f64, dim: usize, omega: f64) -> Result<DMatrix<Complex64>> {
    check_t(t, MAX_T_KINETIC)?;
    let m_top = dim / 2 + 1;
    // c[m][p] = |Θ_{2m+2p}(2m,0)| |t|^{m+p}/(m+p)!, cut when negligible
    let mut coeffs: Vec<Vec<f64>> = Vec::with_capacity(m_top + 1);
    for m in 0..=m_top {
        let mut row = Vec::new();
        let mut power = (1..=m).fold(Dd::ONE, |acc, k| acc * t.abs() / k as f64);
        let mut theta = ThetaSeq::new(2 * m, 0);
        for p in 0..MAX_SERIES_TERMS {
            let c = (power * theta.cur).to_f64();
            row.push(c);
            if p > 4 * (4.0 * t.abs()) as usize + 8 && c < 1e-22 {
                break;
            }
            power = power * t.abs() / (m + p + 1) as f64;
            theta.advance();
        }
        coeffs.push(row);
    }
    let ts = t.signum();
    let mut out = DMatrix::from_element(dim, dim, ZERO);
    for m in 0..=m_top {
        for n in 0..=dim / 2 {
            if 2 * n >= dim {
                continue;
            }
            let mut z = ZERO;
            for (p, &cmp) in coeffs[m].iter().enumerate() {
                for (q, &cnq) in coeffs[n].iter().enumerate() {
                    let k = m + n + p + q;
                    // |t|^{K}·t = |t|^{K+1}·sign(t)
                    let mag = sign(m + q) * cmp * cnq * t.abs() * ts / (k + 1) as f64;
                    z += i_pow(k + 1) * mag * if ts < 0.0 && (k % 2 == 1) { -1.0 } else { 1.0 };
                }
            }
            // D_m Φ_{2n}^* at rows 2m±1, column 2n; adjoint term mirrored
            let rows = [(Some(2 * m + 1), 1.0), ((2 * m).checked_sub(1), -1.0)];
            for (r, d) in rows {
                match r {
                    Some(r) if r < dim => {
                        out[(r, 2 * n)] += z * d * omega;
                        out[(2 * n, r)] += z.conj() * d * omega;
                    }
                    _ => {}
                }
            }
        }
    }
    Ok(out)
}

/// `e^{itP}a⁺e^{−itP} − a⁺` in dimension `dim` via the truncated matrix exponential.
pub fn heisenberg_oracle(gen: Generator, t: f64, dim: usize, tol: f64) -> Result<DMatrix<Complex64>> {
    use crate::fock::build_creation;
    use crate::oracle::expm_matrix;
    let p = build_momentum(dim)?;
    let g = match gen {
        Generator::P => p,
        Generator::P2 => p.mul(&p)?,
        _ => {
            return Err(Error::Domain(format!(
                "Heisenberg oracle is provided for P and P2, not {gen:?}"
            )))
        }
    };
    let u = expm_matrix(&g, I * t, tol)?.value;
    let ap = build_creation(dim)?;
    Ok(&u * ap.entries() * u.adjoint() - ap.entries())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{expm_column, truncation_level, truncation_level_for, GeneratorBound};

    #[test]
    fn coefficients_at_zero() {
        for m in 0..4 {
            for n in 0..4 {
                let d = if m + n == 0 { 1.0 } else { 0.0 };
                assert_eq!(coeff_i(m, n, 0.0, 1e-15).unwrap(), Complex64::new(d, 0.0));
                assert!((coeff_i2(m, n, 0.0, 1e-15).unwrap() - Complex64::new(d, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn symmetric_index_example() {
        let v = coeff_i(1, 1, 0.7, 1e-13).unwrap();
        assert!((v.re + 0.21641877123836267).abs() < 1e-14);
        let s = coeff_i_series(1, 1, 0.7).unwrap();
        assert!((s.value.re + 0.21641877123836267).abs() < 1e-14);
    }

    #[test]
    fn index_symmetries_from_series() {
        for t in [0.4, 1.7] {
            for m in 0..=10 {
                for n in 0..=10 {
                    let a = coeff_i_series(m, n, t).unwrap().value;
                    let b = coeff_i_series(0, m + n, t).unwrap().value * sign(m);
                    let c = coeff_i_series(m + n, 0, t).unwrap().value * sign(n);
                    assert!((a - b).norm() < 1e-14 && (a - c).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn kinetic_parity_and_vacuum() {
        assert_eq!(coeff_i2(1, 0, 0.9, 1e-12).unwrap(), ZERO);
        let t = 0.5;
        let a = coeff_i2(0, 0, t, 1e-12).unwrap();
        let f = hyp1f1(0.5, 2.0, Complex64::new(0.0, 4.0 * t)).unwrap().value;
        assert!((a - f).norm() < 1e-15);
        let p = build_momentum(40).unwrap();
        let p2 = p.mul(&p).unwrap();
        let col = expm_column(&p2, I * t, 0, 1e-15).unwrap();
        assert!((col[0] - a).norm() < 1e-12);
        let c02 = coeff_i2(0, 2, 0.4, 1e-12).unwrap();
        let col = expm_column(&p2, I * 0.4, 0, 1e-15).unwrap();
        assert!((col[2] - c02).norm() < 1e-12);
    }

    #[test]
    fn matrix_elements_match_oracle() {
        let t = 1.2;
        let n = truncation_level(t, 3, 1e-13);
        let col = expm_column(&build_momentum(n).unwrap(), I * t, 3, 1e-15).unwrap();
        let v = matrix_element_p(2, 3, t, 1e-12).unwrap();
        assert!((v - col[2]).norm() < 1e-12);
        for l in 0..6 {
            let e = matrix_element_p(l, 0, t, 1e-12).unwrap();
            let closed = sign(l) * bessel_j_ratio(l, t);
            assert!((e.re - closed).abs() < 1e-15);
        }
    }

    #[test]
    fn unitarity_of_evolved_states() {
        for t in [0.25, 1.0, 4.0] {
            let tol = 1e-12;
            for k in [0, 3] {
                let l = level_tail_index(t, k, tol) + 2;
                assert!(evolve_p(k, t, l, tol).unwrap().norm_defect() < 1e-10);
                assert!(evolve_x(k, t, l, tol).unwrap().norm_defect() < 1e-10);
            }
            let l = kinetic_tail_index(t, 0, tol);
            assert!(evolve_p2_vacuum(t, l, tol).unwrap().norm_defect() < 1e-10);
        }
        assert!(matches!(evolve_p(0, 2.0, 3, 1e-10), Err(Error::Truncation(_))));
        let s = evolve_p(0, 0.0, 5, 1e-10).unwrap();
        assert_eq!(s.amplitudes[0], Complex64::new(1.0, 0.0));
        assert!(s.amplitudes[1..].iter().all(|a| *a == ZERO));
    }

    #[test]
    fn kinetic_vacuum_paths_and_oracle() {
        let t = 0.3;
        let l = kinetic_tail_index(t, 0, 1e-13);
        let s = evolve_p2_vacuum(t, l, 1e-13).unwrap();
        let series = evolve_p2_vacuum_series(t, l).unwrap();
        let n = truncation_level_for(GeneratorBound::PENTADIAGONAL, t, 0, 1e-13);
        let p = build_momentum(n).unwrap();
        let col = expm_column(&p.mul(&p).unwrap(), I * t, 0, 1e-15).unwrap();
        for j in 0..=l.min(n - 1) {
            assert!((s.amplitudes[j] - series[j]).norm() < 1e-13);
            assert!((s.amplitudes[j] - col[j]).norm() < 1e-11);
            if j % 2 == 1 {
                assert_eq!(s.amplitudes[j], ZERO);
            }
        }
    }

    #[test]
    fn x_vacuum_forms() {
        for (t, x) in [(0.8, 1.1), (2.0, -0.4), (0.5, 1.9)] {
            let a = evolve_x_vacuum_pointwise(t, x).unwrap();
            let b = evolve_x_vacuum_bessel(t, x).unwrap();
            let l = level_tail_index(t, 0, 1e-15) + 4;
            let c = evolve_x(0, t, l, 1e-15).unwrap().eval(x);
            assert!((a - b).norm() < 1e-13 && (a - c).norm() < 1e-12);
        }
    }

    #[test]
    fn p_pointwise_closed_form() {
        for k in [0, 1, 3] {
            for (t, x) in [(0.5, 0.4), (1.0, -1.3), (2.0, 1.7)] {
                let l = level_tail_index(t, k, 1e-15) + 4;
                let series = evolve_p(k, t, l, 1e-15).unwrap().eval(x);
                let closed = evolve_p_pointwise_closed_form(k, t, x).unwrap();
                assert!((series - closed).norm() < 1e-12, "k={k} t={t} x={x}");
            }
        }
    }

    #[test]
    fn characteristic_functions() {
        assert_eq!(char_function(Generator::P, 0.0).unwrap(), Complex64::new(1.0, 0.0));
        let c = char_function(Generator::X, 1.0).unwrap();
        assert!((c.re - 0.5767248077568734).abs() < 1e-15);
        for t in [0.0, 0.3, 1.0, 2.5, 4.0, 8.0] {
            let a = char_function(Generator::P, t).unwrap().re;
            let b = char_function_catalan(t).unwrap();
            assert!((a - b).abs() < 1e-12, "t={t}");
        }
        assert_eq!(state_char_function(3, 0.0).unwrap(), Complex64::new(1.0, 0.0));
        let t = 1.3;
        let n = truncation_level(t, 2, 1e-14);
        let col = expm_column(&build_momentum(n).unwrap(), I * t, 2, 1e-15).unwrap();
        assert!((state_char_function(2, t).unwrap() - col[2]).norm() < 1e-12);
    }

    #[test]
    fn heisenberg_momentum() {
        assert_eq!(heisenberg_aplus_p(0.0, 1, 2, 1.0, 1e-12).unwrap(), 0.0);
        let a = heisenberg_aplus_p(0.9, 1, 3, 1.0, 1e-12).unwrap();
        let b = heisenberg_aplus_p(0.9, 3, 1, 1.0, 1e-12).unwrap();
        assert_eq!(a, b);
        let t = 0.9;
        let n = truncation_level(t, 10, 1e-14);
        let oracle = heisenberg_oracle(Generator::P, t, n, 1e-15).unwrap();
        let block = heisenberg_aplus_p_block(t, 8, 1.0, 1e-12).unwrap();
        for m in 0..8 {
            for k in 0..8 {
                assert!((block[(m, k)] - oracle[(m, k)]).norm() < 1e-10, "({m},{k})");
            }
        }
        assert!((block[(0, 0)].re - heisenberg_aplus_p(t, 0, 0, 1.0, 1e-12).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn heisenberg_kinetic() {
        let t = 0.25;
        let n = truncation_level_for(GeneratorBound::PENTADIAGONAL, t, 10, 1e-14);
        let oracle = heisenberg_oracle(Generator::P2, t, n, 1e-15).unwrap();
        let quad = heisenberg_aplus_p2(t, 8, 1.0, 1e-12).unwrap();
        let series = heisenberg_aplus_p2_series(t, 8, 1.0).unwrap();
        for m in 0..8 {
            for k in 0..8 {
                assert!((quad[(m, k)] - oracle[(m, k)]).norm() < 1e-10, "quad ({m},{k})");
                assert!((series[(m, k)] - oracle[(m, k)]).norm() < 1e-10, "series ({m},{k})");
            }
        }
        assert!(heisenberg_aplus_p2(0.0, 4, 1.0, 1e-12).unwrap().iter().all(|z| *z == ZERO));
        let quad = heisenberg_aplus_p2(-0.4, 6, 1.0, 1e-12).unwrap();
        let series = heisenberg_aplus_p2_series(-0.4, 6, 1.0).unwrap();
        assert!((quad - series).iter().all(|z| z.norm() < 1e-11));
    }
}
