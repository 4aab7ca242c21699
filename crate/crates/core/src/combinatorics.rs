//! Integer combinatorics of the free normal-order problem.
//!
//! A word `ε ∈ {+,-}^k` stands for the product `a^{ε(1)} ⋯ a^{ε(k)}`.
//! With `ω_n ≡ 1` the only rewrite needed is `a a⁺ = 1`, and every word
//! reduces to `(a⁺)^{m₊} a^{m₋}`. The set of words of length
//! `m₊ + m₋ + 2p` with that normal form is `Θ_{m₊+m₋+2p}(m₊, m₋)`.

use std::fmt;

use crate::error::{Error, Result};

/// Largest word length the enumeration oracle accepts.
pub const MAX_ENUMERATION_LEN: usize = 22;

/// Largest Catalan index served exactly.
pub const MAX_CATALAN_INDEX: u32 = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

/// A finite product of creators (`Plus`) and annihilators (`Minus`),
/// read left to right.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SignWord {
    signs: Vec<Sign>,
}

impl SignWord {
    pub fn new(signs: Vec<Sign>) -> Self {
        Self { signs }
    }

    /// Decodes the low `k` bits of `mask`; bit `j` set means position `j` is `+`.
    pub fn from_mask(mask: u64, k: usize) -> Self {
        let signs = (0..k)
            .map(|j| if mask >> j & 1 == 1 { Sign::Plus } else { Sign::Minus })
            .collect();
        Self { signs }
    }

    /// Parses a string of `+` and `-` characters.
    pub fn parse(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '+' => Ok(Sign::Plus),
                '-' => Ok(Sign::Minus),
                other => Err(Error::Domain(format!("invalid sign character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn signs(&self) -> &[Sign] {
        &self.signs
    }

    /// `ν₊(ε)`, the number of creators.
    pub fn nu_plus(&self) -> usize {
        self.signs.iter().filter(|&&s| s == Sign::Plus).count()
    }

    /// `ν₋(ε)`, the number of annihilators.
    pub fn nu_minus(&self) -> usize {
        self.len() - self.nu_plus()
    }
}

impl fmt::Display for SignWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.signs {
            f.write_str(match s {
                Sign::Plus => "+",
                Sign::Minus => "-",
            })?;
        }
        Ok(())
    }
}

/// The normally ordered monomial `(a⁺)^{m_plus} a^{m_minus}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NormalForm {
    pub m_plus: usize,
    pub m_minus: usize,
}

impl NormalForm {
    /// Number of cancelled `a a⁺` pairs for a word of length `k`.
    pub fn pairs(&self, k: usize) -> Option<usize> {
        let used = self.m_plus + self.m_minus;
        (used <= k && (k - used) % 2 == 0).then(|| (k - used) / 2)
    }
}

/// Reduces a word with the single rule `a a⁺ → 1`.
///
/// One left-to-right stack pass: a `+` arriving on top of a `-` cancels it.
/// Cancelling never exposes a new `-+` pair to the left of the stack top, so
/// the result does not depend on the order in which redexes are contracted.
pub fn normal_order(word: &SignWord) -> NormalForm {
    let mut stack: Vec<Sign> = Vec::with_capacity(word.len());
    for &s in word.signs() {
        if s == Sign::Plus && stack.last() == Some(&Sign::Minus) {
            stack.pop();
        } else {
            stack.push(s);
        }
    }
    let m_plus = stack.iter().take_while(|&&s| s == Sign::Plus).count();
    NormalForm {
        m_plus,
        m_minus: stack.len() - m_plus,
    }
}

fn binomial_u128(n: u64, k: u64) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for j in 0..k {
        // acc * (n - j) / (j + 1) stays integral at every step
        acc = acc
            .checked_mul(u128::from(n - j))
            .ok_or_else(|| Error::Overflow(format!("binomial({n}, {k})")))?
            / u128::from(j + 1);
    }
    Ok(acc)
}

/// The Catalan number `C_p = binomial(2p, p) / (p + 1)`.
pub fn catalan(p: u32) -> Result<u64> {
    if p > MAX_CATALAN_INDEX {
        return Err(Error::Overflow(format!(
            "catalan({p}) is outside the exact range p <= {MAX_CATALAN_INDEX}"
        )));
    }
    let b = binomial_u128(2 * u64::from(p), u64::from(p))?;
    Ok((b / (u128::from(p) + 1)) as u64)
}

/// `|Θ_{m₊+m₋+2p}(m₊, m₋)| = (m+1)/(2p+m+1) · binomial(2p+m+1, p)` with `m = m₊ + m₋`.
pub fn theta_count(m_plus: usize, m_minus: usize, p: usize) -> Result<u64> {
    let m = (m_plus + m_minus) as u64;
    let p = p as u64;
    let top = 2 * p + m + 1;
    let b = binomial_u128(top, p)?;
    let num = b
        .checked_mul(u128::from(m + 1))
        .ok_or_else(|| Error::Overflow(format!("theta_count({m_plus}, {m_minus}, {p})")))?;
    debug_assert_eq!(num % u128::from(top), 0);
    u64::try_from(num / u128::from(top))
        .map_err(|_| Error::Overflow(format!("theta_count({m_plus}, {m_minus}, {p})")))
}

/// [`theta_count`] as a float, valid far beyond the exact integer range.
///
/// Built from the term ratio `Θ(p+1)/Θ(p) = (2p+m+1)(2p+m+2) / ((p+1)(p+m+2))`.
pub fn theta_count_f64(m_plus: usize, m_minus: usize, p: usize) -> f64 {
    let m = (m_plus + m_minus) as f64;
    (0..p).fold(1.0, |acc, j| {
        let j = j as f64;
        acc * (2.0 * j + m + 1.0) * (2.0 * j + m + 2.0) / ((j + 1.0) * (j + m + 2.0))
    })
}

/// Counts the words of length `k` whose normal form is `(m_plus, m_minus)`
/// by exhaustive enumeration of all `2^k` words.
pub fn brute_force_theta(k: usize, m_plus: usize, m_minus: usize) -> Result<u64> {
    let target = NormalForm { m_plus, m_minus };
    let mut count = 0;
    for_each_word(k, |w| {
        if normal_order(w) == target {
            count += 1;
        }
    })?;
    Ok(count)
}

/// Visits every word of length `k`.
pub fn for_each_word(k: usize, mut visit: impl FnMut(&SignWord)) -> Result<()> {
    if k > MAX_ENUMERATION_LEN {
        return Err(Error::EnumerationLimit {
            k,
            limit: MAX_ENUMERATION_LEN,
        });
    }
    for mask in 0..(1u64 << k) {
        visit(&SignWord::from_mask(mask, k));
    }
    Ok(())
}

/// Histogram of normal forms over all words of length `k`, as
/// `(m_plus, m_minus, count)` sorted by `(m_plus, m_minus)`.
pub fn normal_form_histogram(k: usize) -> Result<Vec<(usize, usize, u64)>> {
    let mut counts = vec![vec![0u64; k + 1]; k + 1];
    for_each_word(k, |w| {
        let nf = normal_order(w);
        counts[nf.m_plus][nf.m_minus] += 1;
    })?;
    let mut out = Vec::new();
    for (mp, row) in counts.iter().enumerate() {
        for (mm, &c) in row.iter().enumerate() {
            if c > 0 {
                out.push((mp, mm, c));
            }
        }
    }
    Ok(out)
}

/// The number of creators carried by every word in `Θ_{m₊+m₋+2p}(m₊, m₋)`.
pub fn nu_plus_on_theta(m_plus: usize, _m_minus: usize, p: usize) -> usize {
    p + m_plus
}

/// Enumerates `Θ_{m₊+m₋+2p}(m₊, m₋)` and returns the distinct `ν₊` values seen.
pub fn nu_plus_values_on_theta(m_plus: usize, m_minus: usize, p: usize) -> Result<Vec<usize>> {
    let k = m_plus + m_minus + 2 * p;
    let target = NormalForm { m_plus, m_minus };
    let mut seen = Vec::new();
    for_each_word(k, |w| {
        if normal_order(w) == target {
            let nu = w.nu_plus();
            if !seen.contains(&nu) {
                seen.push(nu);
            }
        }
    })?;
    seen.sort_unstable();
    Ok(seen)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Dyck paths of length 2p counted by walking every ±1 sequence.
    fn dyck_paths(p: usize) -> u64 {
        let k = 2 * p;
        (0..(1u64 << k))
            .filter(|mask| {
                let mut h = 0i64;
                for j in 0..k {
                    h += if mask >> j & 1 == 1 { 1 } else { -1 };
                    if h < 0 {
                        return false;
                    }
                }
                h == 0
            })
            .count() as u64
    }

    #[test]
    fn catalan_values() {
        assert_eq!(catalan(0).unwrap(), 1);
        assert_eq!(catalan(3).unwrap(), dyck_paths(3));
        assert_eq!(catalan(3).unwrap(), 5);
        assert_eq!(catalan(5).unwrap(), dyck_paths(5));
        assert_eq!(catalan(5).unwrap(), 42);
        assert_eq!(catalan(30).unwrap(), 3_814_986_502_092_304);
        assert!(matches!(catalan(31), Err(Error::Overflow(_))));
    }

    #[test]
    fn theta_count_examples() {
        assert_eq!(theta_count(0, 0, 2).unwrap(), 2);
        for (m, n) in [(0, 0), (3, 4), (7, 0), (0, 9)] {
            assert_eq!(theta_count(m, n, 0).unwrap(), 1);
        }
        assert_eq!(theta_count(1, 0, 1).unwrap(), brute_force_theta(3, 1, 0).unwrap());
        assert_eq!(theta_count(1, 0, 1).unwrap(), 2);
    }

    #[test]
    fn theta_count_overflows_loudly() {
        assert!(matches!(theta_count(0, 0, 200), Err(Error::Overflow(_))));
    }

    #[test]
    fn theta_count_f64_tracks_exact() {
        for m in 0..6 {
            for p in 0..30 {
                let exact = theta_count(m, 0, p).unwrap() as f64;
                let approx = theta_count_f64(m, 0, p);
                assert!((exact - approx).abs() <= 1e-14 * exact, "m={m} p={p}");
            }
        }
        // past the exact range the ratio continuation keeps growing smoothly
        let a = theta_count_f64(0, 0, 120);
        let b = theta_count_f64(0, 0, 121);
        assert!(a.is_finite() && b > 3.5 * a && b < 4.0 * a);
    }

    #[test]
    fn normal_order_examples() {
        let nf = |s: &str| normal_order(&SignWord::parse(s).unwrap());
        assert_eq!(nf("-+"), NormalForm { m_plus: 0, m_minus: 0 });
        assert_eq!(nf(""), NormalForm { m_plus: 0, m_minus: 0 });
        assert_eq!(nf("+-+"), NormalForm { m_plus: 1, m_minus: 0 });
        assert_eq!(nf("+-"), NormalForm { m_plus: 1, m_minus: 1 });
        assert_eq!(nf("--++-"), NormalForm { m_plus: 0, m_minus: 1 });
        assert_eq!(nf("++--"), NormalForm { m_plus: 2, m_minus: 2 });
    }

    /// Contracts the leftmost `-+` redex until none remain.
    fn naive_reduce(word: &SignWord) -> NormalForm {
        let mut s = word.signs().to_vec();
        while let Some(j) = s.windows(2).position(|w| w == [Sign::Minus, Sign::Plus]) {
            s.drain(j..j + 2);
        }
        let m_plus = s.iter().take_while(|&&x| x == Sign::Plus).count();
        assert!(s[m_plus..].iter().all(|&x| x == Sign::Minus));
        NormalForm { m_plus, m_minus: s.len() - m_plus }
    }

    #[test]
    fn stack_pass_matches_naive_rewriting() {
        for k in 0..=10 {
            for_each_word(k, |w| assert_eq!(normal_order(w), naive_reduce(w), "{w}")).unwrap();
        }
    }

    #[test]
    fn brute_force_examples() {
        assert_eq!(brute_force_theta(2, 0, 0).unwrap(), 1);
        assert_eq!(brute_force_theta(3, 1, 0).unwrap(), 2);
        assert_eq!(brute_force_theta(6, 0, 0).unwrap(), 5);
        assert_eq!(brute_force_theta(6, 0, 0).unwrap(), catalan(3).unwrap());
        assert!(matches!(
            brute_force_theta(23, 0, 0),
            Err(Error::EnumerationLimit { k: 23, .. })
        ));
    }

    #[test]
    fn nu_plus_examples() {
        assert_eq!(nu_plus_on_theta(0, 0, 4), 4);
        assert_eq!(nu_plus_on_theta(2, 1, 0), 2);
        assert_eq!(nu_plus_on_theta(1, 0, 3), 4);
        assert_eq!(nu_plus_values_on_theta(1, 0, 3).unwrap(), vec![4]);
    }

    #[test]
    fn counting_formula_matches_enumeration() {
        for k in 0..=14 {
            let hist = normal_form_histogram(k).unwrap();
            let total: u64 = hist.iter().map(|h| h.2).sum();
            assert_eq!(total, 1u64 << k);
            for (mp, mm, count) in hist {
                let p = NormalForm { m_plus: mp, m_minus: mm }.pairs(k).unwrap();
                assert_eq!(count, theta_count(mp, mm, p).unwrap(), "k={k} ({mp},{mm})");
            }
        }
    }

    #[test]
    fn nu_plus_is_constant_on_each_class() {
        for k in 0..=10 {
            for mp in 0..=k {
                for mm in 0..=(k - mp) {
                    if (k - mp - mm) % 2 != 0 {
                        continue;
                    }
                    let p = (k - mp - mm) / 2;
                    assert_eq!(
                        nu_plus_values_on_theta(mp, mm, p).unwrap(),
                        vec![nu_plus_on_theta(mp, mm, p)]
                    );
                }
            }
        }
    }

    #[test]
    fn vacuum_class_is_catalan() {
        for p in 0..=10 {
            assert_eq!(theta_count(0, 0, p).unwrap(), catalan(p as u32).unwrap());
        }
    }
}
