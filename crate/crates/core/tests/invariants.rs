use std::f64::consts::PI;

use freeqm::combinatorics::{normal_order, theta_count, Sign, SignWord};
use freeqm::evolution::{
    coeff_i2_series, coeff_i_series, level_tail_index, matrix_element, Generator,
};
use freeqm::hilbert::{hilbert_mu_pv, hilbert_mu_spectral, momentum_apply, ChebSeries};
use freeqm::orthopoly::{phi_all, phi_trig, quadrature_rule, t_all};
use freeqm::specfun::{bessel_j, hyp1f1};
use freeqm::Complex64;
use proptest::prelude::*;

fn series(max_deg: usize) -> impl Strategy<Value = ChebSeries> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..=max_deg + 1)
        .prop_map(|v| ChebSeries::new(v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normal_form_uses_every_letter(bits in prop::collection::vec(any::<bool>(), 0..24)) {
        let word = SignWord::new(bits.iter().map(|&b| if b { Sign::Plus } else { Sign::Minus }).collect());
        let nf = normal_order(&word);
        let pairs = nf.pairs(word.len());
        prop_assert!(pairs.is_some());
        prop_assert_eq!(nf.m_plus + nf.m_minus + 2 * pairs.unwrap(), word.len());
        // cancelling a a⁺ pairs keeps the difference of creators and annihilators
        prop_assert_eq!(nf.m_plus as i64 - nf.m_minus as i64, word.nu_plus() as i64 - word.nu_minus() as i64);
    }

    #[test]
    fn theta_count_is_symmetric(m_plus in 0usize..12, m_minus in 0usize..12, p in 0usize..8) {
        prop_assert_eq!(theta_count(m_plus, m_minus, p).unwrap(), theta_count(m_minus, m_plus, p).unwrap());
    }

    #[test]
    fn bessel_recurrence(n in 1usize..30, x in 0.1f64..30.0) {
        let jm = bessel_j(n - 1, x).unwrap().value.re;
        let j = bessel_j(n, x).unwrap().value.re;
        let jp = bessel_j(n + 1, x).unwrap().value.re;
        prop_assert!((jm + jp - 2.0 * n as f64 / x * j).abs() < 1e-13 * (1.0 + 2.0 * n as f64 / x));
    }

    #[test]
    fn kummer_transformation(a in 0.1f64..6.0, b in 0.5f64..12.0, y in -12.0f64..12.0) {
        let z = Complex64::new(0.0, y);
        let lhs = hyp1f1(a, b, z).unwrap().value;
        let rhs = z.exp() * hyp1f1(b - a, b, -z).unwrap().value;
        prop_assert!((lhs - rhs).norm() < 1e-11 * (1.0 + lhs.norm()));
    }

    #[test]
    fn phi_trigonometric_form(n in 0usize..40, theta in 0.01f64..(PI - 0.01)) {
        let x = 2.0 * theta.cos();
        let a = phi_all(n, x)[n];
        prop_assert!((a - phi_trig(n, theta)).abs() < 1e-10 * (n + 1) as f64);
    }

    #[test]
    fn momentum_is_symmetric(f in series(16), g in series(16)) {
        let a = momentum_apply(&f).inner(&g);
        let b = f.inner(&momentum_apply(&g));
        prop_assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn pv_hilbert_matches_spectral(c in prop::collection::vec(-1.0..1.0f64, 1..12), x in -1.9f64..1.9) {
        let f = ChebSeries::from_real(&c);
        let rule = quadrature_rule(64);
        let pv = hilbert_mu_pv(|y| f.eval(y).re, x + 1e-7, &rule).unwrap();
        let spec = hilbert_mu_spectral(&f).eval(x + 1e-7).re;
        prop_assert!((pv - spec).abs() < 1e-10);
    }

    #[test]
    fn hilbert_of_phi_is_t(n in 0usize..20, x in -1.95f64..1.95) {
        let spec = hilbert_mu_spectral(&ChebSeries::basis(n)).eval(x).re;
        prop_assert!((spec - t_all(n + 1, x)[n + 1]).abs() < 1e-12 * (n + 1) as f64);
    }

    #[test]
    fn coefficient_index_symmetry(m in 0usize..10, n in 0usize..10, t in -3.0f64..3.0) {
        let s = if m % 2 == 0 { 1.0 } else { -1.0 };
        let a = coeff_i_series(m, n, t).unwrap().value;
        let b = coeff_i_series(0, m + n, t).unwrap().value * s;
        prop_assert!((a - b).norm() < 1e-13);
        let a2 = coeff_i2_series(m, n, t).unwrap().value;
        let b2 = coeff_i2_series(0, m + n, t).unwrap().value * s;
        prop_assert!((a2 - b2).norm() < 1e-12);
    }

    #[test]
    fn evolutions_are_unitary(k in 0usize..9, t in -4.0f64..4.0, which in 0usize..2) {
        let gen = [Generator::P, Generator::X][which];
        let l_max = level_tail_index(t, k, 1e-13) + 2;
        let s: f64 = (0..=l_max).map(|l| matrix_element(gen, l, k, t).unwrap().norm_sqr()).sum();
        prop_assert!((s - 1.0).abs() < 1e-10);
    }

    #[test]
    fn group_law(k in 0usize..6, t in -1.5f64..1.5, s in -1.5f64..1.5) {
        let inner = level_tail_index(s.abs().max(t.abs()), k, 1e-14) + 4;
        for l in 0..6 {
            let lhs: Complex64 = (0..=inner)
                .map(|j| matrix_element(Generator::P, l, j, t).unwrap() * matrix_element(Generator::P, j, k, s).unwrap())
                .sum();
            let rhs = matrix_element(Generator::P, l, k, t + s).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-11);
        }
    }
}
