//! Invariant suites, one per module, with a shared pass/fail report.
//!
//! Each check records the largest residual it saw and the tolerance it was
//! held to. Checks that are exact integer identities use tolerance zero.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::combinatorics::{brute_force_theta, catalan, theta_count};
use crate::error::Result;
use crate::evolution::{
    char_function, char_function_catalan, coeff_closed, coeff_series, heisenberg_aplus_p_block,
    heisenberg_oracle, level_tail_index, matrix_element, evolve_p, evolve_x, CoeffKind, Generator,
};
use crate::fock::{
    build_momentum, build_position, lie_bracket_checks, vacuum_moment, FockVector, Observable,
};
use crate::hilbert::{
    hilbert_mu_pv, hilbert_mu_spectral, kapteyn_cos_integral_form, kapteyn_sin_integral_form,
    kapteyn_sum_cos, kapteyn_sum_sin, momentum_apply, schrodinger_commutator_check, ChebSeries,
};
use crate::oracle::{expm_column, truncation_level};
use crate::orthopoly::{connection_checks, phi_all, quadrature_rule, t_all};
use crate::specfun::bessel_j_ratio;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub module: &'static str,
    pub identity: String,
    pub max_residual: f64,
    pub tol: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.max_residual <= self.tol
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }

    fn push(&mut self, module: &'static str, identity: impl Into<String>, max_residual: f64, tol: f64) {
        self.checks.push(Check {
            module,
            identity: identity.into(),
            max_residual,
            tol,
        });
    }
}

/// Suites for every module. `tol` bounds the floating-point checks that are
/// not tied to a fixed quadrature accuracy; `seed` drives the random inputs.
pub fn run(tol: f64, seed: u64) -> Result<Report> {
    let mut r = Report::default();
    combinatorics(&mut r)?;
    orthopoly(&mut r, tol)?;
    fock(&mut r)?;
    hilbert(&mut r, tol, seed)?;
    evolution(&mut r, tol)?;
    oracle(&mut r, tol)?;
    Ok(r)
}

fn combinatorics(r: &mut Report) -> Result<()> {
    let mut worst = 0u64;
    for k in 0..=12 {
        let mut total = 0u64;
        for m_plus in 0..=k {
            for m_minus in 0..=k - m_plus {
                let b = brute_force_theta(k, m_plus, m_minus)?;
                total += b;
                let rest = k - m_plus - m_minus;
                let c = if rest % 2 == 0 {
                    theta_count(m_plus, m_minus, rest / 2)?
                } else {
                    0
                };
                worst = worst.max(b.abs_diff(c));
            }
        }
        worst = worst.max(total.abs_diff(1 << k));
    }
    r.push("combinatorics", "brute-force normal-order counts = closed form, k <= 12", worst as f64, 0.0);
    Ok(())
}

fn orthopoly(r: &mut Report, tol: f64) -> Result<()> {
    let grid: Vec<f64> = (0..=40).map(|i| -2.0 + 0.1 * i as f64).collect();
    let c = connection_checks(30, &grid, tol)?;
    r.push("orthopoly", "T/Phi connection identities, n <= 30", c.max_residual, tol);
    let rule = quadrature_rule(24);
    let mut worst: f64 = 0.0;
    for m in 0..12 {
        for n in 0..12 {
            let g = rule.integrate(|x| {
                let p = phi_all(n.max(m), x);
                p[m] * p[n]
            });
            worst = worst.max((g - if m == n { 1.0 } else { 0.0 }).abs());
        }
    }
    r.push("orthopoly", "Phi_n orthonormal in L2(mu)", worst, tol);
    Ok(())
}

fn fock(r: &mut Report) -> Result<()> {
    let mut worst = 0i64;
    for n in 0..=8 {
        let c = catalan(n as u32)? as i64;
        for which in [Observable::X, Observable::P] {
            worst = worst.max((vacuum_moment(2 * n, which, 2 * n + 2)? - c).abs());
        }
    }
    r.push("fock", "vacuum moments of X^2n and P^2n are Catalan numbers", worst as f64, 0.0);
    let lie = lie_bracket_checks(16, 5, 5)?;
    r.push(
        "fock",
        "rank-one Lie brackets of a, a+, P0",
        lie.failures.len() as f64,
        0.0,
    );
    let n = 24;
    let x = build_position(n)?;
    let p = build_momentum(n)?;
    let ccr = x.mul(&p)?.sub(&p.mul(&x)?)?;
    let mut worst: f64 = 0.0;
    for i in 0..n - 1 {
        for j in 0..n - 1 {
            let want = if i == 0 && j == 0 { 2.0 * I } else { Complex64::default() };
            worst = worst.max((ccr.entries()[(i, j)] - want).norm());
        }
    }
    r.push("fock", "XP - PX = 2i P0 on the interior block", worst, 0.0);
    Ok(())
}

fn hilbert(r: &mut Report, tol: f64, seed: u64) -> Result<()> {
    let rule = quadrature_rule(256);
    let mut worst: f64 = 0.0;
    for n in 0..=12 {
        for i in 0..11 {
            let x = -1.9 + 0.37 * i as f64 + 0.013;
            let pv = hilbert_mu_pv(|y| phi_all(n, y)[n], x, &rule)?;
            worst = worst.max((pv - t_all(n + 1, x)[n + 1]).abs());
        }
    }
    r.push("hilbert", "H_mu Phi_n = T_(n+1) by quadrature, n <= 12", worst, 1e-9);

    // P acting on the Phi basis agrees with i H_mu on random series
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = 20;
    let pm = build_momentum(dim)?;
    let mut worst: f64 = 0.0;
    let mut skew: f64 = 0.0;
    for _ in 0..20 {
        let mut rand_series = || -> Vec<Complex64> {
            (0..=16)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect()
        };
        let c = rand_series();
        let d = rand_series();
        let f = ChebSeries::new(c.clone());
        let g = ChebSeries::new(d);
        let mut padded = c;
        padded.resize(dim, Complex64::default());
        let mat = pm.apply(&FockVector::new(padded)?)?;
        let spec = momentum_apply(&f);
        for l in 0..dim {
            let s = spec.coeffs.get(l).copied().unwrap_or_default();
            worst = worst.max((s - mat.coeffs()[l]).norm());
        }
        // ⟨Pf, g⟩ = ⟨f, Pg⟩
        skew = skew.max((momentum_apply(&f).inner(&g) - f.inner(&momentum_apply(&g))).norm());
    }
    r.push("hilbert", "momentum_apply = P matrix on random series", worst, tol);
    r.push("hilbert", "P symmetric on random series", skew, tol);

    let spec = hilbert_mu_spectral(&ChebSeries::basis(5));
    let mut worst: f64 = 0.0;
    for i in 0..9 {
        let x = -1.8 + 0.45 * i as f64;
        worst = worst.max((spec.eval(x).re - t_all(6, x)[6]).abs());
    }
    r.push("hilbert", "spectral H_mu Phi_5 = T_6", worst, tol);

    let grid: Vec<f64> = (0..9).map(|i| -1.6 + 0.4 * i as f64 + 0.0071).collect();
    let mut worst: f64 = 0.0;
    for n in 0..=4 {
        worst = worst.max(schrodinger_commutator_check(n, 512, &grid)?.max_residual);
    }
    r.push("hilbert", "[Q,P](Phi_n rho) = 2i rho delta_n0", worst, 1e-8);

    let mut worst: f64 = 0.0;
    for t in [0.5, 2.0] {
        for theta in [0.6, 1.9] {
            worst = worst.max((kapteyn_sum_sin(t, theta)? - kapteyn_sin_integral_form(t, theta, 1e-11)?).abs());
            worst = worst.max((kapteyn_sum_cos(t, theta)? - kapteyn_cos_integral_form(t, theta, 1e-11)?).abs());
        }
    }
    r.push("hilbert", "Kapteyn sums = principal-value integrals", worst, 1e-8);
    Ok(())
}

fn evolution(r: &mut Report, tol: f64) -> Result<()> {
    let mut worst: f64 = 0.0;
    for kind in [CoeffKind::MomentumI, CoeffKind::PositionI, CoeffKind::KineticI2] {
        for t in [0.5, 2.0] {
            for m in 0..=6 {
                for n in 0..=6 {
                    worst = worst.max((coeff_closed(kind, m, n, t)? - coeff_series(kind, m, n, t)?).norm());
                }
            }
        }
    }
    r.push("evolution", "defining series = closed-form coefficients", worst, 1e-11);

    let mut worst: f64 = 0.0;
    for t in [0.0, 1.0, 3.0] {
        worst = worst.max((char_function(Generator::P, t)?.re - char_function_catalan(t)?).abs());
    }
    r.push("evolution", "J1(2t)/t = Catalan moment series", worst, tol);

    let mut worst: f64 = 0.0;
    for t in [0.5, 2.0] {
        for k in [0, 4] {
            let l = level_tail_index(t, k, 1e-12) + 2;
            worst = worst.max(evolve_p(k, t, l, 1e-12)?.norm_defect());
            worst = worst.max(evolve_x(k, t, l, 1e-12)?.norm_defect());
        }
    }
    r.push("evolution", "closed-form evolutions are unitary", worst, tol);

    let mut worst: f64 = 0.0;
    let t = 1.0;
    for k in 0..=6 {
        let n = truncation_level(t, k, 1e-12);
        for (gen, op) in [(Generator::P, build_momentum(n)?), (Generator::X, build_position(n)?)] {
            let col = expm_column(&op, I * t, k, 1e-14)?;
            for l in 0..=6 {
                worst = worst.max((matrix_element(gen, l, k, t)? - col[l]).norm());
            }
        }
    }
    r.push("evolution", "matrix elements = matrix exponential", worst, tol);

    let t = 0.9;
    let n = truncation_level(t, 8, 1e-13);
    let oracle = heisenberg_oracle(Generator::P, t, n, 1e-14)?;
    let block = heisenberg_aplus_p_block(t, 6, 1.0, 1e-12)?;
    let worst = (0..6)
        .flat_map(|i| (0..6).map(move |j| (i, j)))
        .map(|(i, j)| (block[(i, j)] - oracle[(i, j)]).norm())
        .fold(0.0, f64::max);
    r.push("evolution", "Heisenberg a+ under P = conjugation", worst, tol);
    Ok(())
}

fn oracle(r: &mut Report, tol: f64) -> Result<()> {
    let n = 40;
    let p = build_momentum(n)?;
    let v = FockVector::basis(1, n)?;
    let a = expm_column(&p, I * 0.3, 1, 1e-14)?;
    let b = crate::oracle::expm_apply(&p, I * 0.7, &FockVector::from_dvector(a), 1e-14)?.value;
    let c = crate::oracle::expm_apply(&p, I * 1.0, &v, 1e-14)?.value;
    let worst = (b.coeffs() - c.coeffs()).camax();
    r.push("oracle", "exp(0.7iP) exp(0.3iP) = exp(iP)", worst, tol);
    let vac = expm_column(&p, I * 1.0, 0, 1e-14)?;
    let worst = (0..8)
        .map(|l| {
            let s = if l % 2 == 0 { 1.0 } else { -1.0 };
            (vac[l] - Complex64::new(s * bessel_j_ratio(l, 1.0), 0.0)).norm()
        })
        .fold(0.0, f64::max);
    r.push("oracle", "exp(iP) on the vacuum = Bessel amplitudes", worst, tol);
    Ok(())
}
