//! Bessel functions of the first kind and the confluent hypergeometric
//! function `₁F₁`, evaluated from their power series.
//!
//! All series are summed with Kahan compensation. The reported
//! `tail_bound` bounds the omitted tail by a geometric majorant once the
//! term ratio is below one.

use num_complex::Complex64;

use crate::dd::{Dd, DdComplex};
use crate::error::{Error, Result};

/// Largest `|x|` accepted by [`bessel_j`].
pub const BESSEL_MAX_ARG: f64 = 64.0;

/// Beyond this `|x|` the power series loses too many digits to
/// cancellation and `J_n` is obtained by Miller's backward recurrence.
pub const BESSEL_SERIES_LIMIT: f64 = 8.0;

const BESSEL_MAX_TERMS: usize = 500;
const HYP1F1_MAX_TERMS: usize = 1000;
const HYP1F1_MAX_ARG: f64 = 64.0;
const SERIES_EPS: f64 = 1e-17;

/// A series value together with how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesResult {
    pub value: Complex64,
    pub terms_used: usize,
    pub tail_bound: f64,
}

/// Compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    pub(crate) fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum
    }
}

/// `(x/2)^n / n!` without intermediate overflow.
fn leading_term(n: usize, half_x: f64) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * half_x / k as f64)
}

/// Power series of `J_n(x)`; returns `(value, terms, tail_bound)`.
fn bessel_series(n: usize, x: f64) -> Result<(f64, usize, f64)> {
    let h = 0.5 * x;
    let q = -h * h;
    let mut term = leading_term(n, h);
    if term == 0.0 {
        return Ok((0.0, 1, 0.0));
    }
    let mut acc = Kahan::default();
    for p in 0..BESSEL_MAX_TERMS {
        acc.add(term);
        let next = term * q / ((p + 1) as f64 * (n + p + 1) as f64);
        // every later ratio is at most this one
        let ratio = h * h / ((p + 2) as f64 * (n + p + 2) as f64);
        if ratio < 1.0 {
            let tail = next.abs() / (1.0 - ratio);
            if tail <= SERIES_EPS * acc.value().abs().max(f64::MIN_POSITIVE) || next == 0.0 {
                return Ok((acc.value(), p + 1, tail));
            }
        }
        term = next;
    }
    Err(Error::NonConvergence {
        what: "bessel_j power series",
        terms: BESSEL_MAX_TERMS,
    })
}

fn miller_start(n: usize, x: f64) -> usize {
    let big = n.max(x.ceil() as usize);
    2 * ((big + 20 + (40.0 * big as f64).sqrt() as usize) / 2)
}

/// Miller's backward recurrence from index `start`, normalised by
/// `J₀ + 2 Σ J_{2k} = 1`. Valid for `x > 0`.
fn bessel_miller(n: usize, x: f64, start: usize) -> f64 {
    let mut j_next = 0.0;
    let mut j_cur = 1e-300_f64;
    let mut norm = Kahan::default();
    let mut target = 0.0;
    for k in (1..=start).rev() {
        let j_prev = 2.0 * k as f64 / x * j_cur - j_next;
        j_next = j_cur;
        j_cur = j_prev;
        // j_cur is the unnormalised J_{k-1}
        if k - 1 == n {
            target = j_cur;
        }
        if (k - 1) % 2 == 0 && k > 1 {
            norm.add(2.0 * j_cur);
        }
        if j_cur.abs() > 1e250 {
            j_cur *= 1e-250;
            j_next *= 1e-250;
            target *= 1e-250;
            let v = norm.value() * 1e-250;
            norm = Kahan::default();
            norm.add(v);
        }
    }
    norm.add(j_cur);
    target / norm.value()
}

/// `J_n(x)` as a plain float.
pub(crate) fn jn(n: usize, x: f64) -> f64 {
    if x.abs() <= BESSEL_SERIES_LIMIT {
        bessel_series(n, x).map(|r| r.0).unwrap_or(f64::NAN)
    } else {
        let sign = if x < 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
        sign * bessel_miller(n, x.abs(), miller_start(n, x.abs()))
    }
}

/// Bessel function of the first kind `J_n(x) = Σ_p (-1)^p/(p!(n+p)!) (x/2)^{n+2p}`.
pub fn bessel_j(n: usize, x: f64) -> Result<SeriesResult> {
    if !x.is_finite() || x.abs() > BESSEL_MAX_ARG {
        return Err(Error::Domain(format!(
            "bessel_j argument {x} outside |x| <= {BESSEL_MAX_ARG}"
        )));
    }
    if x.abs() <= BESSEL_SERIES_LIMIT {
        let (v, terms, tail) = bessel_series(n, x)?;
        return Ok(SeriesResult {
            value: Complex64::new(v, 0.0),
            terms_used: terms,
            tail_bound: tail,
        });
    }
    let sign = if x < 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
    let start = miller_start(n, x.abs());
    let v = bessel_miller(n, x.abs(), start);
    // a later start changes the result by roughly the recurrence error
    let v_alt = bessel_miller(n, x.abs(), start + 20);
    Ok(SeriesResult {
        value: Complex64::new(sign * v, 0.0),
        terms_used: start,
        tail_bound: (v - v_alt).abs() + f64::EPSILON * v.abs().max(1.0),
    })
}

/// `(n+1) J_{n+1}(2t) / t`, continuous at `t = 0`.
///
/// Near the origin the quotient is summed directly as
/// `(n+1) Σ_p (-1)^p t^{n+2p} / (p! (n+p+1)!)`, so no small numbers are divided.
pub fn bessel_j_ratio(n: usize, t: f64) -> f64 {
    if (2.0 * t).abs() > BESSEL_SERIES_LIMIT {
        return (n + 1) as f64 * jn(n + 1, 2.0 * t) / t;
    }
    let q = -t * t;
    // t^n / (n+1)!
    let mut term = (1..=n).fold(1.0, |acc, k| acc * t / k as f64) / (n + 1) as f64;
    let mut acc = Kahan::default();
    for p in 0..BESSEL_MAX_TERMS {
        acc.add(term);
        let next = term * q / ((p + 1) as f64 * (n + p + 2) as f64);
        if next.abs() <= SERIES_EPS * acc.value().abs() || next == 0.0 {
            break;
        }
        term = next;
    }
    (n + 1) as f64 * acc.value()
}

fn is_nonpositive_integer(b: f64) -> bool {
    b <= 0.0 && b.fract() == 0.0
}

/// Kummer's function `₁F₁(a; b; z) = Σ_k (a)_k / ((b)_k k!) z^k`.
pub fn hyp1f1(a: f64, b: f64, z: Complex64) -> Result<SeriesResult> {
    if is_nonpositive_integer(b) {
        return Err(Error::Pole(b));
    }
    if !(z.norm() <= HYP1F1_MAX_ARG) {
        return Err(Error::Domain(format!(
            "hyp1f1 argument |z| = {} exceeds {HYP1F1_MAX_ARG}",
            z.norm()
        )));
    }
    let zn = z.norm();
    // terms reach e^{|z|} before decaying, so they are carried in double-double
    let mut term = DdComplex::ONE;
    let mut acc = DdComplex::default();
    for k in 0..HYP1F1_MAX_TERMS {
        acc = acc + term;
        let kf = k as f64;
        // Pochhammer step (a)_{k+1} = (a)_k (a+k), likewise for b
        let next = term
            .mul_c64(z)
            .scale(Dd::from(a) + Dd::from(kf))
            .div_real((Dd::from(b) + Dd::from(kf)) * (kf + 1.0));
        if next.norm() == 0.0 {
            return Ok(SeriesResult {
                value: acc.to_c64(),
                terms_used: k + 1,
                tail_bound: 0.0,
            });
        }
        // majorant for all later ratios once k+1 exceeds |b|
        let j = kf + 1.0;
        if j > b.abs() {
            let ratio = zn * (a.abs() + j) / ((j - b.abs()).max(f64::MIN_POSITIVE) * (j + 1.0));
            if ratio < 1.0 {
                let tail = next.norm() / (1.0 - ratio);
                if tail <= SERIES_EPS * acc.norm().max(f64::MIN_POSITIVE) {
                    return Ok(SeriesResult {
                        value: acc.to_c64(),
                        terms_used: k + 1,
                        tail_bound: tail,
                    });
                }
            }
        }
        term = next;
    }
    Err(Error::NonConvergence {
        what: "hyp1f1 power series",
        terms: HYP1F1_MAX_TERMS,
    })
}

/// Smallest `n* ≥ 1` with `Σ_{n>n*} |t|^n/n! · e^{t²}(1 + t²/2) < tol`.
///
/// The summand bounds `|I_{0,n}(t)|`, so truncating any Bessel-coefficient
/// series over levels after `n*` loses less than `tol`.
pub fn bessel_tail_index(t: f64, tol: f64) -> usize {
    let s = t.abs();
    let prefactor = (s * s).exp() * (1.0 + 0.5 * s * s);
    tail_index_for(s, prefactor, tol)
}

/// Smallest `n* ≥ 1` with `prefactor · Σ_{n>n*} s^n/n! < tol`.
pub(crate) fn tail_index_for(s: f64, prefactor: f64, tol: f64) -> usize {
    assert!(tol > 0.0, "tail tolerance must be positive");
    if s == 0.0 {
        return 1;
    }
    let mut n = 1usize;
    // s^{n+1}/(n+1)!
    let mut next = s * s / 2.0;
    loop {
        let ratio = s / (n + 2) as f64;
        if ratio < 1.0 && prefactor * next / (1.0 - ratio) < tol {
            return n;
        }
        n += 1;
        next *= s / (n + 1) as f64;
    }
}
