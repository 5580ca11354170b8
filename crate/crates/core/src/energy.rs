//! Reduced energies of co-rotational maps.
//!
//! For `u_f` the α-energy reduces to
//! `I(f) = π ∫₀^π (2 + f′² + sin²f / sin²r)^α sin r dr`
//! and the energy density is `e = ½(f′² + sin²f / sin²r)`. Integrals are
//! evaluated with an open Gauss rule on every grid cell, so the `sin r`
//! denominators are only ever evaluated at interior points.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::RadialProfile;
use crate::quadrature::Quadrature;

/// Relative part of the slack granted to every certified inequality.
pub const REL_SLACK: f64 = 1e-8;

#[derive(Clone, Copy, Debug)]
struct QuadPoint {
    cell: usize,
    /// Local coordinate in `(0, 1)`.
    xi: f64,
    /// Gauss weight times cell width.
    weight: f64,
    r: f64,
    sin_r: f64,
}

/// Quadrature points of one grid, cached for repeated evaluation.
#[derive(Clone, Debug)]
pub(crate) struct Discretization {
    points: Vec<QuadPoint>,
    widths: Vec<f64>,
}

impl Discretization {
    pub(crate) fn new(nodes: &[f64], q: &Quadrature) -> Self {
        let rule = q.unit_rule();
        let widths: Vec<f64> = nodes.windows(2).map(|w| w[1] - w[0]).collect();
        let mut points = Vec::with_capacity(widths.len() * rule.len());
        for (cell, &h) in widths.iter().enumerate() {
            for &(xi, w) in &rule {
                let r = nodes[cell] + xi * h;
                points.push(QuadPoint {
                    cell,
                    xi,
                    weight: w * h,
                    r,
                    sin_r: r.sin(),
                });
            }
        }
        Self { points, widths }
    }

    fn local(&self, p: &QuadPoint, values: &[f64]) -> (f64, f64) {
        let (a, b) = (values[p.cell], values[p.cell + 1]);
        (a + p.xi * (b - a), (b - a) / self.widths[p.cell])
    }

    /// `f′² + sin²f / sin²r` at one point.
    fn gradient_sq(&self, p: &QuadPoint, values: &[f64]) -> f64 {
        let (f, s) = self.local(p, values);
        let ratio = f.sin() / p.sin_r;
        s * s + ratio * ratio
    }

    pub(crate) fn alpha_energy(&self, values: &[f64], alpha: f64) -> f64 {
        let mut acc = Neumaier::default();
        for p in &self.points {
            let base = 2.0 + self.gradient_sq(p, values);
            acc.add(p.weight * p.sin_r * base.powf(alpha));
        }
        PI * acc.sum()
    }

    pub(crate) fn dirichlet(&self, values: &[f64]) -> f64 {
        let mut acc = Neumaier::default();
        for p in &self.points {
            acc.add(p.weight * p.sin_r * self.gradient_sq(p, values));
        }
        PI * acc.sum()
    }

    /// `∫₀^π f′ sin f dr`, i.e. `(1/2π)∫_{S²} J(u_f) dA`.
    pub(crate) fn jacobian_integral(&self, values: &[f64]) -> f64 {
        let mut acc = Neumaier::default();
        for p in &self.points {
            let (f, s) = self.local(p, values);
            acc.add(p.weight * s * f.sin());
        }
        acc.sum()
    }

    /// `∫₀^π sin r dr` as seen by the rule.
    pub(crate) fn area(&self) -> f64 {
        self.points.iter().map(|p| p.weight * p.sin_r).sum()
    }

    /// Discrete Hölder lower bound `π (Σ w s B)^α (Σ w s)^{1−α}`.
    pub(crate) fn holder_lower(&self, values: &[f64], alpha: f64) -> f64 {
        let linear: f64 = self
            .points
            .iter()
            .map(|p| p.weight * p.sin_r * (2.0 + self.gradient_sq(p, values)))
            .sum();
        PI * linear.powf(alpha) * self.area().powf(1.0 - alpha)
    }

    /// Largest density over the quadrature points and where it occurs.
    pub(crate) fn density_max(&self, values: &[f64]) -> (f64, f64) {
        self.points
            .iter()
            .map(|p| (0.5 * self.gradient_sq(p, values), p.r))
            .fold((0.0, PI / 2.0), |best, x| if x.0 > best.0 { x } else { best })
    }

    /// Largest density in every cell.
    pub(crate) fn cell_density_max(&self, values: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0f64; self.widths.len()];
        for p in &self.points {
            let e = 0.5 * self.gradient_sq(p, values);
            out[p.cell] = out[p.cell].max(e);
        }
        out
    }

    /// Exact gradient of the discrete α-energy with respect to nodal values;
    /// the two boundary entries are zero.
    pub(crate) fn gradient(&self, values: &[f64], alpha: f64) -> Vec<f64> {
        let mut g = vec![0.0; values.len()];
        for p in &self.points {
            let (f, s) = self.local(p, values);
            let ratio = f.sin() / p.sin_r;
            let base = 2.0 + s * s + ratio * ratio;
            let coef = PI * alpha * p.weight * p.sin_r * base.powf(alpha - 1.0);
            let h = self.widths[p.cell];
            let zero_order = (2.0 * f).sin() / (p.sin_r * p.sin_r);
            g[p.cell] += coef * (-2.0 * s / h + zero_order * (1.0 - p.xi));
            g[p.cell + 1] += coef * (2.0 * s / h + zero_order * p.xi);
        }
        g[0] = 0.0;
        let n = g.len();
        g[n - 1] = 0.0;
        g
    }

    /// Symmetric positive definite tridiagonal metric over all nodes (the
    /// boundary rows are the identity).
    pub(crate) fn preconditioner(
        &self,
        values: &[f64],
        alpha: f64,
        kind: Preconditioner,
    ) -> Tridiagonal {
        let n = values.len();
        let mut diag = vec![0.0; n];
        let mut off = vec![0.0; n - 1];
        match kind {
            Preconditioner::GridLaplacian => {
                let scale = 2.0 * PI * alpha * 4f64.powf(alpha - 1.0);
                for (c, &h) in self.widths.iter().enumerate() {
                    let k = scale / h;
                    diag[c] += k;
                    diag[c + 1] += k;
                    off[c] -= k;
                }
            }
            Preconditioner::Weighted => {
                for p in &self.points {
                    let (f, s) = self.local(p, values);
                    let ratio = f.sin() / p.sin_r;
                    let base = 2.0 + s * s + ratio * ratio;
                    let w = PI * alpha * p.weight * p.sin_r * base.powf(alpha - 1.0);
                    let h = self.widths[p.cell];
                    let inv_sin2 = 1.0 / (p.sin_r * p.sin_r);
                    // stiffness
                    let k = 2.0 * w / (h * h);
                    diag[p.cell] += k;
                    diag[p.cell + 1] += k;
                    off[p.cell] -= k;
                    // lumped zero-order term, made nonnegative
                    let z = w * 2.0 * (2.0 * f).cos().abs() * inv_sin2;
                    diag[p.cell] += z * (1.0 - p.xi);
                    diag[p.cell + 1] += z * p.xi;
                    // rank-one curvature of the power, positive semidefinite
                    let zero_order = (2.0 * f).sin() * inv_sin2;
                    let d0 = -2.0 * s / h + zero_order * (1.0 - p.xi);
                    let d1 = 2.0 * s / h + zero_order * p.xi;
                    let c2 = (alpha - 1.0) * w / base;
                    diag[p.cell] += c2 * d0 * d0;
                    diag[p.cell + 1] += c2 * d1 * d1;
                    off[p.cell] += c2 * d0 * d1;
                }
            }
        }
        diag[0] = 1.0;
        diag[n - 1] = 1.0;
        off[0] = 0.0;
        off[n - 2] = 0.0;
        Tridiagonal { diag, off }
    }
}

/// Metric used to turn the gradient into a descent direction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preconditioner {
    /// Stiffness matrix weighted by the current integrand coefficients,
    /// plus nonnegative lower-order terms.
    #[default]
    Weighted,
    /// Unweighted grid Laplacian, scaled to the identity map's stiffness.
    GridLaplacian,
}

/// Symmetric tridiagonal matrix.
#[derive(Clone, Debug)]
pub(crate) struct Tridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl Tridiagonal {
    /// Thomas algorithm.
    pub(crate) fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        c[0] = if n > 1 { self.off[0] / self.diag[0] } else { 0.0 };
        d[0] = rhs[0] / self.diag[0];
        for i in 1..n {
            let denom = self.diag[i] - self.off[i - 1] * c[i - 1];
            if i < n - 1 {
                c[i] = self.off[i] / denom;
            }
            d[i] = (rhs[i] - self.off[i - 1] * d[i - 1]) / denom;
        }
        let mut x = d;
        for i in (0..n - 1).rev() {
            let next = x[i + 1];
            x[i] -= c[i] * next;
        }
        x
    }

    #[cfg(test)]
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.off[i] * x[i + 1];
                }
                y
            })
            .collect()
    }
}

/// Compensated summation.
#[derive(Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn sum(&self) -> f64 {
        self.sum + self.comp
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha >= 1.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("α must be >= 1, got {alpha}")))
    }
}

/// Energy density `½(f′² + sin²f / sin²r)` at an interior point.
pub fn density(p: &RadialProfile, r: f64) -> Result<f64> {
    if !(r > 0.0 && r < PI) {
        return Err(Error::OutOfDomain(r));
    }
    let (f, df) = p.eval(r)?;
    let ratio = f.sin() / r.sin();
    Ok(0.5 * (df * df + ratio * ratio))
}

/// `I(f) = E_α(u_f)`.
pub fn alpha_energy(p: &RadialProfile, alpha: f64, q: &Quadrature) -> Result<f64> {
    check_alpha(alpha)?;
    q.validate()?;
    Ok(Discretization::new(p.nodes(), q).alpha_energy(p.values(), alpha))
}

/// `E(u_f) = 2π ∫₀^π e(u_f) sin r dr`.
pub fn dirichlet_energy(p: &RadialProfile, q: &Quadrature) -> Result<f64> {
    q.validate()?;
    Ok(Discretization::new(p.nodes(), q).dirichlet(p.values()))
}

/// `(1/4π) ∫_{S²} J(u_f) dA` by quadrature; cross-check for [`RadialProfile::degree`].
pub fn jacobian_degree(p: &RadialProfile, q: &Quadrature) -> Result<f64> {
    q.validate()?;
    Ok(0.5 * Discretization::new(p.nodes(), q).jacobian_integral(p.values()))
}

/// Discrete Hölder lower bound for the α-energy on the same quadrature nodes.
pub fn holder_lower_bound(p: &RadialProfile, alpha: f64, q: &Quadrature) -> Result<f64> {
    check_alpha(alpha)?;
    q.validate()?;
    Ok(Discretization::new(p.nodes(), q).holder_lower(p.values(), alpha))
}

/// Gradient of the discrete α-energy with respect to the nodal values.
/// Boundary entries are pinned and reported as zero.
pub fn discrete_gradient(p: &RadialProfile, alpha: f64, q: &Quadrature) -> Result<Vec<f64>> {
    check_alpha(alpha)?;
    q.validate()?;
    Ok(Discretization::new(p.nodes(), q).gradient(p.values(), alpha))
}

/// Quadrature error estimate for the α-energy plus the relative slack.
pub fn energy_slack(p: &RadialProfile, alpha: f64, q: &Quadrature) -> Result<f64> {
    let coarse = alpha_energy(p, alpha, q)?;
    let fine = alpha_energy(p, alpha, &q.refined())?;
    Ok((fine - coarse).abs() + REL_SLACK * coarse.abs())
}

/// Weighted L² norm of the Euler–Lagrange defect
/// `(W f′ sin r)′ − W sin f cos f / sin r`, `W = (2 + f′² + sin²f/sin²r)^{α−1}`,
/// by finite differences on cell midpoints, over nodes at least two cells
/// away from either pole.
pub fn el_residual(p: &RadialProfile, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let n = p.len();
    if n < 9 {
        return Err(Error::TooCoarse { nodes: n, min: 9 });
    }
    let r = p.nodes();
    let f = p.values();
    let coefficient = |fv: f64, slope: f64, rv: f64| {
        let ratio = fv.sin() / rv.sin();
        (2.0 + slope * slope + ratio * ratio).powf(alpha - 1.0)
    };
    let flux: Vec<f64> = (0..n - 1)
        .map(|c| {
            let mid = 0.5 * (r[c] + r[c + 1]);
            let fm = 0.5 * (f[c] + f[c + 1]);
            let s = p.slope(c);
            coefficient(fm, s, mid) * s * mid.sin()
        })
        .collect();
    let mut acc = 0.0;
    for i in 3..n - 3 {
        let dual = 0.5 * (r[i + 1] - r[i - 1]);
        let slope = (f[i + 1] - f[i - 1]) / (r[i + 1] - r[i - 1]);
        let w = coefficient(f[i], slope, r[i]);
        let defect = (flux[i] - flux[i - 1]) / dual - w * f[i].sin() * f[i].cos() / r[i].sin();
        acc += defect * defect * r[i].sin() * dual;
    }
    Ok(acc.sqrt())
}

/// Summary of one profile at one α.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub alpha: f64,
    pub e_alpha: f64,
    pub dirichlet: f64,
    pub degree: i64,
    pub e_max: f64,
    pub r_at_max: f64,
    /// Concentration radius, `e_max^{-1/2}`.
    pub r_conc: f64,
    pub r_conc_pow: f64,
}

pub fn report(p: &RadialProfile, alpha: f64, q: &Quadrature) -> Result<EnergyReport> {
    check_alpha(alpha)?;
    q.validate()?;
    let disc = Discretization::new(p.nodes(), q);
    Ok(report_with(&disc, p, alpha))
}

pub(crate) fn report_with(disc: &Discretization, p: &RadialProfile, alpha: f64) -> EnergyReport {
    let (e_max, r_at_max) = disc.density_max(p.values());
    let r_conc = if e_max > 0.0 { e_max.powf(-0.5) } else { f64::INFINITY };
    EnergyReport {
        alpha,
        e_alpha: disc.alpha_energy(p.values(), alpha),
        dirichlet: disc.dirichlet(p.values()),
        degree: p.degree(),
        e_max,
        r_at_max,
        r_conc,
        r_conc_pow: r_conc.powf(1.0 - alpha),
    }
}

/// The chain `8π = ∫(1+J) ≤ ∫(1+e) ≤ ½(2E_α)^{1/α}(4π)^{(α−1)/α}` for a
/// degree-one map, and the resulting Dirichlet bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    /// `∫(1 + J) dA`.
    pub lhs: f64,
    /// `∫(1 + e) dA = 4π + E`.
    pub mid: f64,
    /// `½(2E_α)^{1/α}(4π)^{(α−1)/α}`.
    pub rhs: f64,
    pub ok1: bool,
    pub ok2: bool,
    /// `rhs − 4π`, an upper bound for the Dirichlet energy.
    pub dirichlet_bound: f64,
    pub ok3: bool,
    #[serde(skip)]
    pub slack: f64,
}

impl ChainReport {
    pub fn all_ok(&self) -> bool {
        self.ok1 && self.ok2 && self.ok3
    }
}

pub fn holder_chain(p: &RadialProfile, alpha: f64, q: &Quadrature) -> Result<ChainReport> {
    check_alpha(alpha)?;
    q.validate()?;
    let degree = p.degree();
    if degree != 1 {
        return Err(Error::Degree(degree));
    }
    let terms = |q: &Quadrature| {
        let disc = Discretization::new(p.nodes(), q);
        let v = p.values();
        let lhs = 4.0 * PI + 2.0 * PI * disc.jacobian_integral(v);
        let dirichlet = disc.dirichlet(v);
        let e_alpha = disc.alpha_energy(v, alpha);
        let rhs = 0.5 * (2.0 * e_alpha).powf(1.0 / alpha) * (4.0 * PI).powf((alpha - 1.0) / alpha);
        [lhs, 4.0 * PI + dirichlet, rhs, dirichlet]
    };
    let coarse = terms(q);
    let fine = terms(&q.refined());
    let slack = coarse
        .iter()
        .zip(&fine)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
        + REL_SLACK * coarse[2].abs();
    let [lhs, mid, rhs, dirichlet] = coarse;
    let dirichlet_bound = rhs - 4.0 * PI;
    Ok(ChainReport {
        lhs,
        mid,
        rhs,
        ok1: lhs <= mid + slack,
        ok2: mid <= rhs + slack,
        dirichlet_bound,
        ok3: dirichlet <= dirichlet_bound + slack,
        slack,
    })
}
