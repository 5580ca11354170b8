//! Closed-form test profiles and the upper-bound machinery for the
//! degree-zero class.
//!
//! * `f_λ(r) = 2 arctan(λ tan r)` maps each hemisphere onto the whole sphere,
//!   once with each orientation (class `m = 2`, degree 0).
//! * `f_ε` is the profile of `z(1 − ε²|z|²)/(ε² − |z|²)` (class `m = 3`,
//!   degree 1) with bubbles at both poles.
//!
//! Both are evaluated as continuous lifts of the arctangent, computed with
//! `atan2` on the (numerator, denominator) pair so no branch table is needed.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::energy::{alpha_energy, energy_slack};
use crate::error::{Error, Result};
use crate::profile::{BoundaryClass, Init, RadialProfile};
use crate::quadrature::{graded_breaks, integrate_doubling, Integral, Quadrature};

/// Which closed-form family to sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FamilyParams {
    Lambda { lambda: f64 },
    Epsilon { epsilon: f64 },
}

impl FamilyParams {
    pub fn class(&self) -> BoundaryClass {
        match self {
            Self::Lambda { .. } => BoundaryClass::new(2),
            Self::Epsilon { .. } => BoundaryClass::new(3),
        }
    }

    pub fn init(&self) -> Init {
        match *self {
            Self::Lambda { lambda } => Init::Lambda(lambda),
            Self::Epsilon { epsilon } => Init::Epsilon(epsilon),
        }
    }

    pub fn sample(&self, grid_size: usize) -> Result<RadialProfile> {
        RadialProfile::make(grid_size, self.class(), &self.init())
    }
}

/// `2 arctan(λ tan r)` with the arctangent valued in `[0, π]`.
pub fn eval_f_lambda(lambda: f64, r: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    if r >= PI {
        return 2.0 * PI;
    }
    2.0 * (lambda * r.sin()).atan2(r.cos())
}

/// `f_λ′(r) = 2λ / (cos²r + λ² sin²r)`.
pub fn f_lambda_derivative(lambda: f64, r: f64) -> f64 {
    let (s, c) = r.sin_cos();
    2.0 * lambda / (c * c + lambda * lambda * s * s)
}

/// `e(u_{f_λ}) = 2λ²(1 + cos²r) / (λ² − (λ² − 1)cos²r)²`.
pub fn density_f_lambda(lambda: f64, r: f64) -> f64 {
    let l2 = lambda * lambda;
    let c2 = r.cos().powi(2);
    let denom = l2 - (l2 - 1.0) * c2;
    2.0 * l2 * (1.0 + c2) / (denom * denom)
}

/// `2 arctan(t(1 − ε²t²) / (ε² − t²))`, `t = tan(r/2)`, continued through
/// the poles of the argument at `t = ε` and `t = 1/ε` so that it increases
/// continuously from 0 to 3π.
pub fn eval_f_epsilon(epsilon: f64, r: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    if r >= PI {
        return 3.0 * PI;
    }
    // numerator and denominator scaled by cos³(r/2) > 0
    let (s, c) = (0.5 * r).sin_cos();
    let e2 = epsilon * epsilon;
    let num = s * (c * c - e2 * s * s);
    let den = c * (e2 * c * c - s * s);
    let mut theta = num.atan2(den);
    if theta < 0.0 {
        theta += 2.0 * PI;
    }
    2.0 * theta
}

/// `(1 + x)^α ≤ 1 + αx + (α − 1)x²` for `α ∈ [1, 2]`, `x ≥ 0`.
pub fn check_alineq(alpha: f64, x: f64) -> Result<bool> {
    if !(1.0..=2.0).contains(&alpha) {
        return Err(Error::Parameter(format!("α must lie in [1, 2], got {alpha}")));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Parameter(format!("x must be finite and >= 0, got {x}")));
    }
    let lhs = (1.0 + x).powf(alpha);
    let rhs = 1.0 + alpha * x + (alpha - 1.0) * x * x;
    Ok(lhs <= rhs * (1.0 + 4.0 * f64::EPSILON))
}

/// `(2m + 2)^α · 2π`, the lower bound for the α-energy in class `m`.
pub fn lower_bound(m: u32, alpha: f64) -> f64 {
    (2.0 * m as f64 + 2.0).powf(alpha) * 2.0 * PI
}

/// The integrals `I₁`, `I₂` after the substitution `t = cos r`, together with
/// the quantities they are compared against.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct BoundIntegrals {
    pub lambda: f64,
    /// `λ⁻⁴ ∫₀¹ (1 + t²)/(1 − a²t²)² dt`.
    pub i1: f64,
    /// `λ⁻⁸ ∫₀¹ (1 + t²)²/(1 − a²t²)⁴ dt`.
    pub i2: f64,
    /// `2λ² I₁ = ∫₀^{π/2} e sin r dr`.
    pub e1: f64,
    /// `2λ²/(λ² − 1)`.
    pub e1_majorant: f64,
    /// `4λ⁴ I₂ = ∫₀^{π/2} e² sin r dr`.
    pub e2: f64,
    /// `128 λ²`.
    pub e2_majorant: f64,
    /// Richardson differences of the two quadratures.
    pub i1_error: f64,
    pub i2_error: f64,
}

impl BoundIntegrals {
    pub fn e1_holds(&self) -> bool {
        self.e1 < self.e1_majorant
    }

    pub fn e2_holds(&self) -> bool {
        self.e2 < self.e2_majorant
    }
}

pub fn bound_integrals(lambda: f64) -> Result<BoundIntegrals> {
    if !(lambda >= 1.0) || !lambda.is_finite() {
        return Err(Error::Parameter(format!("λ must be >= 1, got {lambda}")));
    }
    let inv_l2 = 1.0 / (lambda * lambda);
    // 1 − a²t² = (1 − t)(1 + t) + t²/λ², written to avoid cancellation at t ≈ 1
    let q = move |t: f64| (1.0 - t) * (1.0 + t) + t * t * inv_l2;
    let g1 = move |t: f64| (1.0 + t * t) / q(t).powi(2);
    let g2 = move |t: f64| (1.0 + t * t).powi(2) / q(t).powi(4);
    let breaks = graded_breaks(0.0, 1.0, 1e-3 * inv_l2);
    let a: Integral = integrate_doubling(&g1, breaks.clone(), 8, 1e-12);
    let b: Integral = integrate_doubling(&g2, breaks, 8, 1e-12);
    let l2 = lambda * lambda;
    let l4 = l2 * l2;
    let i1 = a.value / l4;
    let i2 = b.value / (l4 * l4);
    Ok(BoundIntegrals {
        lambda,
        i1,
        i2,
        e1: 2.0 * l2 * i1,
        e1_majorant: 2.0 * l2 / (l2 - 1.0),
        e2: 4.0 * l4 * i2,
        e2_majorant: 128.0 * l2,
        i1_error: a.error / l4,
        i2_error: b.error / (l4 * l4),
    })
}

/// `∫₀^π |f_λ′ sin f_λ| dr` from the closed forms; equals 4 for every λ.
pub fn turning_integral_f_lambda(lambda: f64) -> Integral {
    let g = |r: f64| (f_lambda_derivative(lambda, r) * eval_f_lambda(lambda, r).sin()).abs();
    let finest = 1e-3 / lambda;
    let mut left = graded_breaks(FRAC_PI_2, 0.0, finest);
    left.reverse();
    let right = graded_breaks(FRAC_PI_2, PI, finest);
    let a = integrate_doubling(&g, left, 8, 1e-13);
    let b = integrate_doubling(&g, right, 8, 1e-13);
    Integral {
        value: a.value + b.value,
        error: a.error + b.error,
        panels: a.panels + b.panels,
    }
}

/// `E_α(u_{f_λ}) = 2^{α+1} π ∫₀^{π/2} (1 + e)^α sin r dr` from the closed-form
/// density, using the symmetry of the family about the equator.
pub fn alpha_energy_f_lambda(lambda: f64, alpha: f64) -> Integral {
    let g = |r: f64| (1.0 + density_f_lambda(lambda, r)).powf(alpha) * r.sin();
    let mut breaks = graded_breaks(FRAC_PI_2, 0.0, 1e-3 / lambda);
    breaks.reverse();
    let half = integrate_doubling(&g, breaks, 8, 1e-13);
    let scale = 2f64.powf(alpha + 1.0) * PI;
    Integral {
        value: scale * half.value,
        error: scale * half.error,
        panels: half.panels,
    }
}

/// Energy of a sampled `f_λ` compared with the degree-zero lower bound and
/// the explicit majorant `2^{α+1}π(3 + 4α/λ² + 2(α−1) + 128(α−1)λ²)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpperBoundCertificate {
    pub alpha: f64,
    pub lambda: f64,
    pub e_alpha: f64,
    /// `6^α · 2π`.
    pub lower: f64,
    /// `e_alpha − lower`.
    pub gap: f64,
    /// `gap / (α − 1)^{1/2}`.
    pub c_hat: f64,
    pub majorant: f64,
    pub ok_lower: bool,
    pub ok_majorant: bool,
    #[serde(skip)]
    pub slack: f64,
}

/// The explicit majorant for `E_α(u_{f_λ})`, valid for `λ² > 2`, `α ∈ [1, 2]`.
pub fn majorant(alpha: f64, lambda: f64) -> f64 {
    let l2 = lambda * lambda;
    2f64.powf(alpha + 1.0)
        * PI
        * (3.0 + 4.0 * alpha / l2 + 2.0 * (alpha - 1.0) + 128.0 * (alpha - 1.0) * l2)
}

/// Certificate for `f_λ` at an arbitrary `λ`, sampled on `grid_size` nodes.
pub fn family_certificate(
    alpha: f64,
    lambda: f64,
    q: &Quadrature,
    grid_size: usize,
) -> Result<UpperBoundCertificate> {
    if !(alpha > 1.0 && alpha <= 2.0) {
        return Err(Error::Parameter(format!("α must lie in (1, 2], got {alpha}")));
    }
    if !(lambda * lambda > 2.0) {
        return Err(Error::Parameter(format!("need λ² > 2, got λ = {lambda}")));
    }
    let profile = FamilyParams::Lambda { lambda }.sample(grid_size)?;
    let e_alpha = alpha_energy(&profile, alpha, q)?;
    let slack = energy_slack(&profile, alpha, q)?;
    let lower = lower_bound(2, alpha);
    let gap = e_alpha - lower;
    let major = majorant(alpha, lambda);
    Ok(UpperBoundCertificate {
        alpha,
        lambda,
        e_alpha,
        lower,
        gap,
        c_hat: gap / (alpha - 1.0).sqrt(),
        majorant: major,
        ok_lower: e_alpha >= lower - slack,
        ok_majorant: e_alpha < major,
        slack,
    })
}

/// Certificate at the scale `λ = (α − 1)^{−1/4}`, for `1 < α < 5/4`.
pub fn upper_bound_certificate(
    alpha: f64,
    q: &Quadrature,
    grid_size: usize,
) -> Result<UpperBoundCertificate> {
    if !(alpha > 1.0 && alpha < 1.25) {
        return Err(Error::Parameter(format!("α must lie in (1, 5/4), got {alpha}")));
    }
    family_certificate(alpha, canonical_lambda(alpha), q, grid_size)
}

/// `(α − 1)^{−1/4}`.
pub fn canonical_lambda(alpha: f64) -> f64 {
    (alpha - 1.0).powf(-0.25)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn f_lambda_values() {
        assert_abs_diff_eq!(eval_f_lambda(1.0, FRAC_PI_4), FRAC_PI_2, epsilon = 1e-15);
        for lam in [1.0, 2.0, 7.5, 100.0] {
            assert_abs_diff_eq!(eval_f_lambda(lam, FRAC_PI_2), PI, epsilon = 1e-13);
            assert_eq!(eval_f_lambda(lam, 0.0), 0.0);
            assert_eq!(eval_f_lambda(lam, PI), 2.0 * PI);
        }
        assert_abs_diff_eq!(eval_f_lambda(2.0, FRAC_PI_4), 2.0 * 2f64.atan(), epsilon = 1e-15);
        assert_abs_diff_eq!(eval_f_lambda(2.0, FRAC_PI_4), 2.2143, epsilon = 1e-4);
    }

    #[test]
    fn f_lambda_is_increasing() {
        let lam = 5.0;
        let mut prev = 0.0;
        for i in 1..=1000 {
            let f = eval_f_lambda(lam, PI * i as f64 / 1000.0);
            assert!(f > prev);
            prev = f;
        }
    }

    #[test]
    fn density_closed_form_values() {
        for r in [0.1, 0.9, 2.0] {
            assert_relative_eq!(density_f_lambda(1.0, r), 2.0 * (1.0 + r.cos().powi(2)));
        }
        // maximum 4λ² at the poles, 2/λ² at the equator
        assert_relative_eq!(density_f_lambda(2.0, 0.0), 16.0);
        assert_relative_eq!(density_f_lambda(3.0, PI), 36.0, max_relative = 1e-12);
        assert_relative_eq!(density_f_lambda(2.0, FRAC_PI_2), 0.5, max_relative = 1e-12);
        let lam = 1e3;
        assert_relative_eq!(density_f_lambda(lam, FRAC_PI_2) * lam * lam, 2.0, max_relative = 1e-9);
    }

    #[test]
    fn f_epsilon_shape() {
        let eps = 0.1;
        assert_eq!(eval_f_epsilon(eps, 0.0), 0.0);
        assert_eq!(eval_f_epsilon(eps, PI), 3.0 * PI);
        let r_eps = 2.0 * eps.atan();
        assert_abs_diff_eq!(eval_f_epsilon(eps, r_eps), PI, epsilon = 1e-12);
        assert_abs_diff_eq!(eval_f_epsilon(eps, r_eps - 1e-9), PI, epsilon = 1e-6);
        assert_abs_diff_eq!(eval_f_epsilon(eps, r_eps + 1e-9), PI, epsilon = 1e-6);
        let r_inv = 2.0 * (1.0 / eps).atan();
        assert_abs_diff_eq!(eval_f_epsilon(eps, r_inv), 2.0 * PI, epsilon = 1e-12);
        assert_abs_diff_eq!(eval_f_epsilon(eps, FRAC_PI_2), 1.5 * PI, epsilon = 1e-12);
        assert_abs_diff_eq!(eval_f_epsilon(eps, PI - 1e-9), 3.0 * PI, epsilon = 1e-6);
        let mut prev = -1.0;
        for i in 0..=4000 {
            let f = eval_f_epsilon(eps, PI * i as f64 / 4000.0);
            assert!(f > prev, "not increasing at step {i}");
            prev = f;
        }
    }

    #[test]
    fn epsilon_profile_has_degree_one() {
        let p = FamilyParams::Epsilon { epsilon: 0.1 }.sample(2001).unwrap();
        assert_eq!(p.class().m, 3);
        assert_eq!(p.degree(), 1);
        assert_eq!(*p.values().last().unwrap(), 3.0 * PI);
    }

    #[test]
    fn alineq_cases() {
        assert!(check_alineq(1.7, 0.0).unwrap());
        assert!(check_alineq(1.0, 12.5).unwrap());
        assert!(check_alineq(1.5, 2.0).unwrap());
        assert_relative_eq!(3f64.powf(1.5), 5.196, max_relative = 1e-3);
        assert!(check_alineq(0.9, 1.0).is_err());
        assert!(check_alineq(2.1, 1.0).is_err());
        assert!(check_alineq(1.5, -1.0).is_err());
    }

    #[test]
    fn bound_integrals_at_lambda_one() {
        let b = bound_integrals(1.0).unwrap();
        assert_relative_eq!(b.i1, 4.0 / 3.0, max_relative = 1e-12);
        assert_relative_eq!(b.i2, 28.0 / 15.0, max_relative = 1e-12);
        assert!(bound_integrals(0.5).is_err());
    }

    #[test]
    fn lower_bounds() {
        for alpha in [1.0, 1.05, 1.3] {
            assert_relative_eq!(lower_bound(2, alpha), 6f64.powf(alpha) * 2.0 * PI);
            assert_relative_eq!(lower_bound(1, alpha), 4f64.powf(alpha) * 2.0 * PI);
            assert_relative_eq!(lower_bound(3, alpha), 8f64.powf(alpha) * 2.0 * PI);
            assert_relative_eq!(lower_bound(0, alpha), 2f64.powf(alpha) * 2.0 * PI);
        }
        assert_relative_eq!(lower_bound(2, 1.05), 41.2, max_relative = 1e-3);
    }

    #[test]
    fn turning_integral_is_four() {
        for lam in [1.0, 1.5, 10.0, 50.0] {
            assert_abs_diff_eq!(turning_integral_f_lambda(lam).value, 4.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn certificate_at_alpha_one_point_one() {
        let cert = upper_bound_certificate(1.1, &Quadrature::default(), 2001).unwrap();
        assert_relative_eq!(cert.lambda, 10f64.powf(0.25), max_relative = 1e-12);
        assert_relative_eq!(cert.lambda, 1.7783, max_relative = 1e-4);
        assert!(cert.ok_lower && cert.ok_majorant && cert.gap > 0.0);
        assert!(upper_bound_certificate(1.25, &Quadrature::default(), 101).is_err());
        assert!(upper_bound_certificate(1.0, &Quadrature::default(), 101).is_err());
        let v = serde_json::to_value(&cert).unwrap();
        assert_eq!(v.as_object().unwrap().len(), 9);
    }
}
