//! Truncated one-mode interacting Fock space with `ω_n = 1`.
//!
//! The basis vector `e_n` stands for `Φ_n`. Truncation to dimension `N`
//! sends `a⁺ e_{N-1}` to zero, so infinite-space identities are only checked
//! on the interior block of indices `< N - 1`.

use nalgebra::{DMatrix, DVector};
use num_complex::{Complex, Complex64};

use crate::combinatorics::catalan;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Largest dimension accepted by the builders.
pub const MAX_DIM: usize = 512;

#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    coeffs: DVector<Complex64>,
}

impl FockVector {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Dimension("vector of dimension 0".into()));
        }
        Ok(Self {
            coeffs: DVector::from_vec(coeffs),
        })
    }

    pub fn from_dvector(coeffs: DVector<Complex64>) -> Self {
        Self { coeffs }
    }

    /// `e_n` in dimension `dim`.
    pub fn basis(n: usize, dim: usize) -> Result<Self> {
        if n >= dim {
            return Err(Error::Dimension(format!("level {n} not below dimension {dim}")));
        }
        let mut v = DVector::from_element(dim, ZERO);
        v[n] = ONE;
        Ok(Self { coeffs: v })
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &DVector<Complex64> {
        &self.coeffs
    }

    pub fn into_inner(self) -> DVector<Complex64> {
        self.coeffs
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.norm()
    }

    /// `⟨self, other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &FockVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension(format!(
                "inner product of dimensions {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(self.coeffs.dotc(&other.coeffs))
    }
}

/// How far an operator's identities can be trusted near the top level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// Exact restriction of the infinite operator (diagonal functions of `Λ`, `a`).
    ExactInterior,
    /// The last row or column is cut off (`a⁺`, `X`, `P`).
    Truncated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    entries: DMatrix<Complex64>,
    boundary: Boundary,
    /// `(lower, upper)` bandwidth when known.
    band: Option<(usize, usize)>,
}

impl FockOperator {
    pub fn from_matrix(entries: DMatrix<Complex64>, boundary: Boundary) -> Result<Self> {
        if entries.nrows() != entries.ncols() || entries.nrows() == 0 {
            return Err(Error::Dimension(format!(
                "operator must be square and non-empty, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        Ok(Self {
            entries,
            boundary,
            band: None,
        })
    }

    fn banded(entries: DMatrix<Complex64>, boundary: Boundary, band: (usize, usize)) -> Self {
        Self {
            entries,
            boundary,
            band: Some(band),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn band(&self) -> Option<(usize, usize)> {
        self.band
    }

    pub fn adjoint(&self) -> FockOperator {
        Self {
            entries: self.entries.adjoint(),
            boundary: self.boundary,
            band: self.band.map(|(l, u)| (u, l)),
        }
    }

    fn join(&self, other: &FockOperator) -> Boundary {
        if self.boundary == Boundary::ExactInterior && other.boundary == Boundary::ExactInterior {
            Boundary::ExactInterior
        } else {
            Boundary::Truncated
        }
    }

    fn check_dims(&self, other: &FockOperator) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension(format!(
                "operators of dimensions {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(())
    }

    pub fn apply(&self, v: &FockVector) -> Result<FockVector> {
        let n = self.dim();
        if v.dim() != n {
            return Err(Error::Dimension(format!(
                "operator of dimension {n} applied to vector of dimension {}",
                v.dim()
            )));
        }
        let Some((lo, up)) = self.band else {
            return Ok(FockVector::from_dvector(&self.entries * &v.coeffs));
        };
        let mut out = DVector::from_element(n, ZERO);
        for i in 0..n {
            let j0 = i.saturating_sub(lo);
            let j1 = (i + up).min(n - 1);
            out[i] = (j0..=j1).map(|j| self.entries[(i, j)] * v.coeffs[j]).sum();
        }
        Ok(FockVector::from_dvector(out))
    }

    pub fn mul(&self, other: &FockOperator) -> Result<FockOperator> {
        self.check_dims(other)?;
        let band = match (self.band, other.band) {
            (Some((l1, u1)), Some((l2, u2))) => Some((l1 + l2, u1 + u2)),
            _ => None,
        };
        Ok(Self {
            entries: &self.entries * &other.entries,
            boundary: self.join(other),
            band,
        })
    }

    pub fn add(&self, other: &FockOperator) -> Result<FockOperator> {
        self.check_dims(other)?;
        let band = match (self.band, other.band) {
            (Some((l1, u1)), Some((l2, u2))) => Some((l1.max(l2), u1.max(u2))),
            _ => None,
        };
        Ok(Self {
            entries: &self.entries + &other.entries,
            boundary: self.join(other),
            band,
        })
    }

    pub fn sub(&self, other: &FockOperator) -> Result<FockOperator> {
        self.add(&other.scale(-ONE))
    }

    pub fn scale(&self, z: Complex64) -> FockOperator {
        Self {
            entries: &self.entries * z,
            boundary: self.boundary,
            band: self.band,
        }
    }

    /// Top-left `(N-1)×(N-1)` block, where truncation effects are absent.
    pub fn interior_block(&self) -> DMatrix<Complex64> {
        let k = self.dim().saturating_sub(1);
        self.entries.view((0, 0), (k, k)).into_owned()
    }

    /// Largest entrywise deviation from `other`.
    pub fn max_abs_diff(&self, other: &FockOperator) -> Result<f64> {
        self.check_dims(other)?;
        Ok((&self.entries - &other.entries).camax())
    }
}

fn check_dim(n: usize, min: usize) -> Result<()> {
    if n < min || n > MAX_DIM {
        return Err(Error::Dimension(format!(
            "dimension {n} outside [{min}, {MAX_DIM}]"
        )));
    }
    Ok(())
}

fn shift(n: usize, z: Complex64, up: bool) -> DMatrix<Complex64> {
    DMatrix::from_fn(n, n, |i, j| {
        let hit = if up { i == j + 1 } else { j == i + 1 };
        if hit {
            z
        } else {
            ZERO
        }
    })
}

/// `a e_n = e_{n-1}`, `a e_0 = 0`.
pub fn build_annihilation(n: usize) -> Result<FockOperator> {
    check_dim(n, 2)?;
    Ok(FockOperator::banded(shift(n, ONE, false), Boundary::ExactInterior, (0, 1)))
}

/// `a⁺ e_n = e_{n+1}`, `a⁺ e_{N-1} = 0`.
pub fn build_creation(n: usize) -> Result<FockOperator> {
    check_dim(n, 2)?;
    Ok(FockOperator::banded(shift(n, ONE, true), Boundary::Truncated, (1, 0)))
}

/// `F_Λ = diag(F(0), …, F(N-1))`.
pub fn build_number_function(n: usize, f: impl Fn(usize) -> Complex64) -> Result<FockOperator> {
    check_dim(n, 1)?;
    let d = DVector::from_fn(n, |i, _| f(i));
    Ok(FockOperator::banded(
        DMatrix::from_diagonal(&d),
        Boundary::ExactInterior,
        (0, 0),
    ))
}

/// Projection onto the vacuum, `P_{Φ_0} = δ_{0,Λ}`.
pub fn build_vacuum_projector(n: usize) -> Result<FockOperator> {
    build_number_function(n, |k| if k == 0 { ONE } else { ZERO })
}

/// `X = a + a⁺`.
pub fn build_position(n: usize) -> Result<FockOperator> {
    check_dim(n, 2)?;
    let m = shift(n, ONE, false) + shift(n, ONE, true);
    Ok(FockOperator::banded(m, Boundary::Truncated, (1, 1)))
}

/// `P = i(a⁺ − a)`.
pub fn build_momentum(n: usize) -> Result<FockOperator> {
    check_dim(n, 2)?;
    let m = shift(n, I, true) + shift(n, -I, false);
    Ok(FockOperator::banded(m, Boundary::Truncated, (1, 1)))
}

/// `AB − BA`.
pub fn commutator(a: &FockOperator, b: &FockOperator) -> Result<FockOperator> {
    a.mul(b)?.sub(&b.mul(a)?)
}

/// Eigenvalues of the truncated position operator, ascending.
///
/// They are `2cos(kπ/(N+1))`, so `‖X_N‖ = 2cos(π/(N+1))`.
pub fn position_spectrum(n: usize) -> Result<Vec<f64>> {
    check_dim(n, 2)?;
    let x = DMatrix::from_fn(n, n, |i, j| if i.abs_diff(j) == 1 { 1.0 } else { 0.0 });
    let mut ev: Vec<f64> = x.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Exact Gaussian-integer matrices for algebraic identities.
pub mod exact {
    use super::*;

    pub type GaussInt = Complex<i64>;
    pub type ExactMatrix = DMatrix<GaussInt>;

    const Z: GaussInt = Complex::new(0, 0);
    const U: GaussInt = Complex::new(1, 0);

    fn shift(n: usize, z: GaussInt, up: bool) -> ExactMatrix {
        DMatrix::from_fn(n, n, |i, j| {
            let hit = if up { i == j + 1 } else { j == i + 1 };
            if hit {
                z
            } else {
                Z
            }
        })
    }

    pub fn annihilation(n: usize) -> ExactMatrix {
        shift(n, U, false)
    }

    pub fn creation(n: usize) -> ExactMatrix {
        shift(n, U, true)
    }

    pub fn position(n: usize) -> ExactMatrix {
        annihilation(n) + creation(n)
    }

    pub fn momentum(n: usize) -> ExactMatrix {
        let i = Complex::new(0, 1);
        shift(n, i, true) - shift(n, i, false)
    }

    pub fn number_function(n: usize, f: impl Fn(usize) -> GaussInt) -> ExactMatrix {
        DMatrix::from_fn(n, n, |i, j| if i == j { f(i) } else { Z })
    }

    pub fn vacuum_projector(n: usize) -> ExactMatrix {
        number_function(n, |k| if k == 0 { U } else { Z })
    }

    pub fn identity(n: usize) -> ExactMatrix {
        DMatrix::from_fn(n, n, |i, j| if i == j { U } else { Z })
    }

    /// `Φ_m Φ_n^*` as a matrix unit.
    pub fn rank_one(n: usize, m: usize, k: usize) -> ExactMatrix {
        DMatrix::from_fn(n, n, |i, j| if i == m && j == k { U } else { Z })
    }

    pub fn power(a: &ExactMatrix, k: usize) -> ExactMatrix {
        (0..k).fold(identity(a.nrows()), |acc, _| &acc * a)
    }

    pub fn bracket(a: &ExactMatrix, b: &ExactMatrix) -> ExactMatrix {
        a * b - b * a
    }

    /// Top-left `(N-1)×(N-1)` block.
    pub fn interior(a: &ExactMatrix) -> ExactMatrix {
        let k = a.nrows().saturating_sub(1);
        a.view((0, 0), (k, k)).into_owned()
    }

    /// Largest `|re| + |im|` over the entries.
    pub fn max_entry(a: &ExactMatrix) -> i64 {
        a.iter().map(|z| z.re.abs() + z.im.abs()).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    X,
    P,
}

/// `⟨e_0, A^n e_0⟩` in exact arithmetic, `A ∈ {X, P}`.
///
/// Requires `N > n` so the truncation cannot reach the moment.
pub fn vacuum_moment(n: usize, which: Observable, dim: usize) -> Result<i64> {
    if dim <= n || dim < 2 {
        return Err(Error::Truncation(format!(
            "moment of order {n} needs dimension > max({n}, 1), got {dim}"
        )));
    }
    let a = match which {
        Observable::X => exact::position(dim),
        Observable::P => exact::momentum(dim),
    };
    let mut v = DVector::from_element(dim, Complex::new(0i64, 0));
    v[0] = Complex::new(1, 0);
    for _ in 0..n {
        v = &a * v;
    }
    let z = v[0];
    if z.im != 0 {
        return Err(Error::CheckFailed {
            module: "fock",
            identity: format!("vacuum moment {n} is real"),
            residual: z.im as f64,
        });
    }
    Ok(z.re)
}

/// Catalan prediction for [`vacuum_moment`].
pub fn expected_vacuum_moment(n: usize) -> Result<i64> {
    if n % 2 == 1 {
        return Ok(0);
    }
    Ok(catalan((n / 2) as u32)? as i64)
}

/// Outcome of [`lie_bracket_checks`].
#[derive(Debug, Clone, PartialEq)]
pub struct LieReport {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl LieReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Rank-one commutator relations of the Lie algebra generated by `a`, `a⁺`,
/// checked exactly on the interior block:
///
/// * `[a, P₀aᵐ] = −P₀aᵐ⁺¹`
/// * `[a⁺ᵐP₀, a⁺] = −a⁺ᵐ⁺¹P₀`
/// * `[a⁺ᵐP₀, P₀aⁿ] = ΦₘΦₙ* − δₘₙ Φ₀Φ₀*`
///
/// The last relation carries the `δₘₙ` term because
/// `P₀aⁿa⁺ᵐP₀ = ⟨Φ₀, aⁿa⁺ᵐΦ₀⟩P₀ = δₘₙP₀`.
pub fn lie_bracket_checks(dim: usize, m_max: usize, n_max: usize) -> Result<LieReport> {
    if m_max + n_max + 2 > dim {
        return Err(Error::Dimension(format!(
            "need m_max + n_max + 2 <= N, got {m_max} + {n_max} + 2 > {dim}"
        )));
    }
    use exact::*;
    let a = annihilation(dim);
    let ap = creation(dim);
    let p0 = vacuum_projector(dim);
    let mut report = LieReport {
        checked: 0,
        failures: Vec::new(),
    };
    let mut check = |name: String, lhs: ExactMatrix, rhs: ExactMatrix| {
        report.checked += 1;
        let r = max_entry(&interior(&(lhs - rhs)));
        if r != 0 {
            report.failures.push(format!("{name}: residual {r}"));
        }
    };
    let top = m_max.max(n_max) + 1;
    let a_pow: Vec<ExactMatrix> = (0..=top).map(|k| power(&a, k)).collect();
    let ap_pow: Vec<ExactMatrix> = (0..=top).map(|k| power(&ap, k)).collect();
    check(
        "[a,a+] = P0".into(),
        bracket(&a, &ap),
        p0.clone(),
    );
    check(
        "[a+,P0] = a+P0".into(),
        bracket(&ap, &p0),
        &ap * &p0,
    );
    for m in 0..=m_max {
        check(
            format!("[a,P0 a^{m}] = -P0 a^{}", m + 1),
            bracket(&a, &(&p0 * &a_pow[m])),
            -(&p0 * &a_pow[m + 1]),
        );
        check(
            format!("[a+^{m} P0,a+] = -a+^{} P0", m + 1),
            bracket(&(&ap_pow[m] * &p0), &ap),
            -(&ap_pow[m + 1] * &p0),
        );
        for n in 0..=n_max {
            let mut rhs = rank_one(dim, m, n);
            if m == n {
                rhs -= &p0;
            }
            check(
                format!("[a+^{m} P0,P0 a^{n}] = Phi_{m} Phi_{n}* - d_mn P0"),
                bracket(&(&ap_pow[m] * &p0), &(&p0 * &a_pow[n])),
                rhs,
            );
        }
    }
    Ok(report)
}

/// `⟨ψ_u, ψ_v⟩ = 1/(1 − ūv)` for the coherent vectors `ψ_z = Σ zⁿΦₙ`.
pub fn coherent_kernel(u: Complex64, v: Complex64) -> Result<Complex64> {
    if u.norm() >= 1.0 || v.norm() >= 1.0 {
        return Err(Error::Domain(format!(
            "coherent kernel needs |u|, |v| < 1, got {u}, {v}"
        )));
    }
    Ok(ONE / (ONE - u.conj() * v))
}

/// `Σ_{n<N} (ūv)ⁿ` together with the geometric bound on the omitted tail.
pub fn coherent_kernel_truncated(u: Complex64, v: Complex64, n: usize) -> Result<(Complex64, f64)> {
    coherent_kernel(u, v)?;
    let q = u.conj() * v;
    let mut term = ONE;
    let mut acc = ZERO;
    for _ in 0..n {
        acc += term;
        term *= q;
    }
    Ok((acc, term.norm() / (1.0 - q.norm())))
}

/// `⟨ξ, e^{it(ω_Λ + ω_{Λ+1})} ξ⟩ = p e^{itω₁} + (1 − p) e^{2itω₁}` with `p = |ξ₀|²`.
pub fn harmonic_char(t: f64, p_xi: f64, omega1: f64) -> Result<Complex64> {
    if !(0.0..=1.0).contains(&p_xi) {
        return Err(Error::Domain(format!("p_xi = {p_xi} outside [0, 1]")));
    }
    if !(omega1 > 0.0) {
        return Err(Error::Domain(format!("omega1 = {omega1} must be positive")));
    }
    Ok(p_xi * (I * t * omega1).exp() + (1.0 - p_xi) * (I * 2.0 * t * omega1).exp())
}

/// Diagonal-operator evaluation of [`harmonic_char`] for `ξ = (√p, √(1−p), 0, …)`.
pub fn harmonic_char_diagonal(t: f64, p_xi: f64, omega1: f64, dim: usize) -> Result<Complex64> {
    check_dim(dim, 2)?;
    let omega = |n: usize| if n == 0 { 0.0 } else { omega1 };
    let h = build_number_function(dim, |n| Complex64::new(omega(n) + omega(n + 1), 0.0))?;
    let u = build_number_function(dim, |n| (I * t * h.entries()[(n, n)]).exp())?;
    let mut xi = vec![ZERO; dim];
    xi[0] = Complex64::new(p_xi.sqrt(), 0.0);
    xi[1] = Complex64::new((1.0 - p_xi).sqrt(), 0.0);
    let xi = FockVector::new(xi)?;
    xi.inner(&u.apply(&xi)?)
}
