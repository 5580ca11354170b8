mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use alphamap_core::energy::{alpha_energy, density, energy_slack};
use alphamap_core::families::{
    alpha_energy_f_lambda, bound_integrals, canonical_lambda, density_f_lambda, eval_f_epsilon,
    eval_f_lambda, family_certificate, lower_bound, majorant, turning_integral_f_lambda,
};
use alphamap_core::{FamilyParams, Quadrature};

use common::simpson;

/// Oracle for the bound integrals in the original `t` variable, without the
/// cancellation-free rewriting used by the library.
fn oracle_i(lambda: f64) -> (f64, f64) {
    let a2 = 1.0 - 1.0 / (lambda * lambda);
    let q = |t: f64| 1.0 - a2 * t * t;
    let g1 = |t: f64| (1.0 + t * t) / q(t).powi(2);
    let g2 = |t: f64| (1.0 + t * t).powi(2) / q(t).powi(4);
    let l4 = lambda.powi(4);
    (simpson(&g1, 0.0, 1.0, 1e-13) / l4, simpson(&g2, 0.0, 1.0, 1e-13) / (l4 * l4))
}

#[test]
fn bound_integrals_match_simpson_oracle() {
    for lambda in [1.0, 1.5, 2.0, 3.0, 7.0, 10.0] {
        let b = bound_integrals(lambda).unwrap();
        let (i1, i2) = oracle_i(lambda);
        assert!((b.i1 - i1).abs() <= 1e-9 * i1, "I1 at λ={lambda}: {} vs {i1}", b.i1);
        assert!((b.i2 - i2).abs() <= 1e-9 * i2, "I2 at λ={lambda}: {} vs {i2}", b.i2);
    }
}

#[test]
fn bound_integrals_match_radial_form() {
    // the same quantities integrated directly in r against the closed-form density
    for lambda in [1.5, 4.0, 9.0] {
        let b = bound_integrals(lambda).unwrap();
        let e1 = simpson(&|r: f64| density_f_lambda(lambda, r) * r.sin(), 0.0, FRAC_PI_2, 1e-12);
        let e2 = simpson(&|r: f64| density_f_lambda(lambda, r).powi(2) * r.sin(), 0.0, FRAC_PI_2, 1e-12);
        assert!((b.e1 - e1).abs() <= 1e-8 * e1, "{} vs {e1}", b.e1);
        assert!((b.e2 - e2).abs() <= 1e-8 * e2, "{} vs {e2}", b.e2);
    }
}

#[test]
fn bound_inequalities_hold_over_lambda_range() {
    for k in 0..60 {
        let lambda = 1.05 * (100.0f64 / 1.05).powf(k as f64 / 59.0);
        let b = bound_integrals(lambda).unwrap();
        assert!(b.e1_holds(), "E1 fails at λ={lambda}");
        assert!(b.e2_holds(), "E2 fails at λ={lambda}");
    }
}

#[test]
fn closed_form_density_matches_sampled_profile() {
    let p = FamilyParams::Lambda { lambda: 3.0 }.sample(4001).unwrap();
    for r in [0.05, 0.4, 1.0, FRAC_PI_2, 2.2, 3.0] {
        let exact = density_f_lambda(3.0, r);
        let sampled = density(&p, r).unwrap();
        assert!((sampled - exact).abs() <= 2e-3 * exact.max(1.0), "r={r}: {sampled} vs {exact}");
    }
}

#[test]
fn f_lambda_is_symmetric_about_the_equator() {
    for lambda in [0.5, 2.0, 10.0] {
        for r in [0.1, 0.7, 1.3] {
            let a = eval_f_lambda(lambda, r);
            let b = eval_f_lambda(lambda, PI - r);
            assert!((a + b - 2.0 * PI).abs() < 1e-13);
        }
        assert_eq!(eval_f_lambda(lambda, FRAC_PI_2), PI);
    }
}

#[test]
fn f_epsilon_hits_three_pi_and_is_monotone() {
    for eps in [0.5, 0.3, 0.1] {
        assert_eq!(eval_f_epsilon(eps, 0.0), 0.0);
        assert!((eval_f_epsilon(eps, PI) - 3.0 * PI).abs() < 1e-12);
        let mut prev = 0.0;
        for k in 1..=2000 {
            let v = eval_f_epsilon(eps, PI * k as f64 / 2000.0);
            assert!(v >= prev - 1e-12, "ε={eps} not monotone at k={k}");
            prev = v;
        }
    }
}

#[test]
fn half_interval_energy_matches_full_sampled_energy() {
    let q = Quadrature::default();
    for (lambda, alpha) in [(2.0, 1.1), (4.0, 1.05), (1.0, 1.0)] {
        let half = alpha_energy_f_lambda(lambda, alpha).value;
        let integrand = |r: f64| (2.0 + 2.0 * density_f_lambda(lambda, r)).powf(alpha) * r.sin();
        let oracle = PI * simpson(&integrand, 0.0, PI, 1e-12);
        assert!((half - oracle).abs() <= 1e-10 * oracle, "{half} vs {oracle}");
        let p = FamilyParams::Lambda { lambda }.sample(8001).unwrap();
        let sampled = alpha_energy(&p, alpha, &q).unwrap();
        assert!((sampled - half).abs() <= 1e-4 * half, "{sampled} vs {half}");
    }
}

#[test]
fn f_lambda_energy_at_alpha_one() {
    // f_1 = 2r has e = 2 + 2cos²r, so the Dirichlet energy is 32π/3
    let half = alpha_energy_f_lambda(1.0, 1.0).value;
    assert!((half - (4.0 * PI + 32.0 * PI / 3.0)).abs() < 1e-10);
    let t = turning_integral_f_lambda(37.0).value;
    assert!((t - 4.0).abs() < 1e-10);
}

#[test]
fn certificate_sits_between_bound_and_majorant() {
    let q = Quadrature::default();
    for alpha in [1.02, 1.1, 1.2] {
        for lambda in [2.0, 4.0, canonical_lambda(alpha)] {
            let c = family_certificate(alpha, lambda, &q, 4001).unwrap();
            let p = FamilyParams::Lambda { lambda }.sample(4001).unwrap();
            let slack = energy_slack(&p, alpha, &q).unwrap();
            assert!(c.e_alpha >= lower_bound(2, alpha) - slack);
            assert!(c.e_alpha < majorant(alpha, lambda));
            assert!(c.ok_lower && c.ok_majorant);
        }
    }
}
