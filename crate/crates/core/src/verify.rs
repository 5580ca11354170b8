//! Batteries that check the closed-form identities and inequalities of the
//! co-rotational reduction over parameter grids and random samples.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::energy::{self, energy_slack, holder_chain};
use crate::error::Result;
use crate::families::{self, FamilyParams};
use crate::profile::{BoundaryClass, Init, RadialProfile};
use crate::quadrature::Quadrature;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyConfig {
    /// Random samples for the density identity.
    pub samples: usize,
    /// Largest λ for the `I₁`/`I₂` estimates; λ² ranges over `(2, lambda_max²]`.
    pub lambda_max: f64,
    pub lambda_count: usize,
    /// Points per axis of the `(α, x)` grid.
    pub alineq_grid: usize,
    /// Nodes used for sampled profiles in the chain battery.
    pub chain_nodes: usize,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            samples: 1000,
            lambda_max: 100.0,
            lambda_count: 50,
            alineq_grid: 100,
            chain_nodes: 2001,
            seed: 0x5eed,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BatteryResult {
    pub name: String,
    pub passed: bool,
    pub checks: usize,
    pub failures: usize,
    /// Largest error or smallest margin seen, depending on the battery.
    pub worst: f64,
    pub detail: String,
}

impl BatteryResult {
    fn new(name: &str, checks: usize, failures: usize, worst: f64, detail: String) -> Self {
        Self {
            name: name.into(),
            passed: failures == 0 && checks > 0,
            checks,
            failures,
            worst,
            detail,
        }
    }
}

pub fn run_all(cfg: &VerifyConfig) -> Result<Vec<BatteryResult>> {
    Ok(vec![
        alineq(cfg),
        e1(cfg),
        e2(cfg),
        edensity(cfg),
        turning(cfg),
        holder(cfg)?,
        lower_bounds(cfg)?,
    ])
}

/// `(1 + x)^α ≤ 1 + αx + (α − 1)x²` on `[1, 2] × [0, 100]`.
pub fn alineq(cfg: &VerifyConfig) -> BatteryResult {
    let n = cfg.alineq_grid.max(2);
    let mut failures = 0;
    let mut worst = f64::INFINITY;
    for i in 0..n {
        let alpha = 1.0 + i as f64 / (n - 1) as f64;
        for j in 0..n {
            let x = 100.0 * j as f64 / (n - 1) as f64;
            if !families::check_alineq(alpha, x).unwrap_or(false) {
                failures += 1;
            }
            let rhs = 1.0 + alpha * x + (alpha - 1.0) * x * x;
            worst = worst.min(rhs - (1.0 + x).powf(alpha));
        }
    }
    BatteryResult::new("alineq", n * n, failures, worst, format!("{n}x{n} grid, min margin {worst:.3e}"))
}

fn lambda_samples(cfg: &VerifyConfig) -> Vec<f64> {
    let top = cfg.lambda_max * cfg.lambda_max;
    let k = cfg.lambda_count.max(1);
    (1..=k)
        .map(|i| (2.0 * (top / 2.0).powf(i as f64 / k as f64)).sqrt())
        .collect()
}

/// `2λ² I₁ < 2λ²/(λ² − 1)` for `λ² > 2`.
pub fn e1(cfg: &VerifyConfig) -> BatteryResult {
    let mut failures = 0;
    let mut worst = f64::INFINITY;
    let lams = lambda_samples(cfg);
    for &lam in &lams {
        match families::bound_integrals(lam) {
            Ok(b) => {
                let margin = (b.e1_majorant - b.e1) / b.e1_majorant;
                worst = worst.min(margin);
                if !b.e1_holds() || margin <= b.i1_error * 2.0 * lam * lam {
                    failures += 1;
                }
            }
            Err(_) => failures += 1,
        }
    }
    BatteryResult::new("E1", lams.len(), failures, worst, format!("min relative margin {worst:.3e}"))
}

/// `4λ⁴ I₂ < 128 λ²` for `λ² > 2`.
pub fn e2(cfg: &VerifyConfig) -> BatteryResult {
    let mut failures = 0;
    let mut worst = f64::INFINITY;
    let lams = lambda_samples(cfg);
    for &lam in &lams {
        match families::bound_integrals(lam) {
            Ok(b) => {
                let margin = (b.e2_majorant - b.e2) / b.e2_majorant;
                worst = worst.min(margin);
                if !b.e2_holds() {
                    failures += 1;
                }
            }
            Err(_) => failures += 1,
        }
    }
    BatteryResult::new("E2", lams.len(), failures, worst, format!("min relative margin {worst:.3e}"))
}

/// Closed-form `f_λ` density against `½(f′² + sin²f/sin²r)` from `f_λ` itself.
pub fn edensity(cfg: &VerifyConfig) -> BatteryResult {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut failures = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.samples {
        let lam = rng.gen_range(1.0..=50.0);
        let r = rng.gen_range(0.01..PI - 0.01);
        let f = families::eval_f_lambda(lam, r);
        let df = families::f_lambda_derivative(lam, r);
        let direct = 0.5 * (df * df + (f.sin() / r.sin()).powi(2));
        let closed = families::density_f_lambda(lam, r);
        let err = (direct - closed).abs() / closed;
        worst = worst.max(err);
        if !(err <= 1e-10) {
            failures += 1;
        }
    }
    BatteryResult::new(
        "edensity",
        cfg.samples,
        failures,
        worst,
        format!("max relative error {worst:.3e}"),
    )
}

/// `∫₀^π |f_λ′ sin f_λ| dr = 4`.
pub fn turning(cfg: &VerifyConfig) -> BatteryResult {
    let lams: Vec<f64> = [1.0, 1.5, 2.0, 5.0, 10.0, 25.0, 50.0]
        .into_iter()
        .chain(lambda_samples(cfg).into_iter().step_by(5))
        .collect();
    let mut failures = 0;
    let mut worst: f64 = 0.0;
    for &lam in &lams {
        let err = (families::turning_integral_f_lambda(lam).value - 4.0).abs();
        worst = worst.max(err);
        if !(err <= 1e-8) {
            failures += 1;
        }
    }
    BatteryResult::new("turning", lams.len(), failures, worst, format!("max |∫ − 4| = {worst:.3e}"))
}

/// The Hölder chain for degree-one profiles: the rotation (where it is an
/// equality) and sampled `f_ε`.
pub fn holder(cfg: &VerifyConfig) -> Result<BatteryResult> {
    let q = Quadrature::default();
    let mut profiles = vec![RadialProfile::make(cfg.chain_nodes, BoundaryClass::new(1), &Init::Linear)?];
    for eps in [0.3, 0.1] {
        profiles.push(FamilyParams::Epsilon { epsilon: eps }.sample(cfg.chain_nodes)?);
    }
    let mut checks = 0;
    let mut failures = 0;
    let mut worst: f64 = 0.0;
    for p in &profiles {
        for alpha in [1.05, 1.2] {
            let c = holder_chain(p, alpha, &q)?;
            checks += 1;
            if !c.all_ok() {
                failures += 1;
            }
            worst = worst.max((c.lhs - 8.0 * PI).abs());
        }
    }
    // equality case
    let c = holder_chain(&profiles[0], 1.0 + 1e-9, &q)?;
    checks += 1;
    let spread = [c.lhs, c.mid, c.rhs]
        .iter()
        .map(|v| (v - 8.0 * PI).abs() / (8.0 * PI))
        .fold(0.0, f64::max);
    if spread > 1e-8 {
        failures += 1;
    }
    Ok(BatteryResult::new(
        "holder-chain",
        checks,
        failures,
        worst,
        format!("max |lhs − 8π| = {worst:.3e}, identity spread {spread:.3e}"),
    ))
}

/// `E_α ≥ (2m + 2)^α · 2π` on sampled family members and ramps.
pub fn lower_bounds(cfg: &VerifyConfig) -> Result<BatteryResult> {
    let q = Quadrature::default();
    let n = cfg.chain_nodes;
    let mut cases = vec![];
    for m in 0..5 {
        cases.push(RadialProfile::make(n, BoundaryClass::new(m), &Init::Linear)?);
    }
    for lam in [1.5, 3.0, 8.0] {
        cases.push(FamilyParams::Lambda { lambda: lam }.sample(n)?);
    }
    for eps in [0.5, 0.2] {
        cases.push(FamilyParams::Epsilon { epsilon: eps }.sample(n)?);
    }
    let mut checks = 0;
    let mut failures = 0;
    let mut worst = f64::INFINITY;
    for p in &cases {
        for alpha in [1.0, 1.05, 1.2, 1.5] {
            let e = energy::alpha_energy(p, alpha, &q)?;
            let slack = energy_slack(p, alpha, &q)?;
            let lower = families::lower_bound(p.class().m, alpha);
            checks += 1;
            worst = worst.min((e - lower) / lower);
            if e < lower - slack {
                failures += 1;
            }
        }
    }
    Ok(BatteryResult::new(
        "lower-bound",
        checks,
        failures,
        worst,
        format!("min relative margin {worst:.3e}"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_batteries_pass() {
        for b in run_all(&VerifyConfig::default()).unwrap() {
            assert!(b.passed, "{b:?}");
        }
    }

    #[test]
    fn lambda_samples_cover_range() {
        let s = lambda_samples(&VerifyConfig::default());
        assert_eq!(s.len(), 50);
        assert!(s[0] * s[0] > 2.0);
        assert!((s[49] - 100.0).abs() < 1e-9);
    }
}
