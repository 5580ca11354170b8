//! Minimization of the discrete α-energy in a fixed boundary class.
//!
//! Interior nodal values are the unknowns; the boundary values stay pinned.
//! Each iteration solves a tridiagonal system for a preconditioned descent
//! direction and backtracks until the Armijo condition holds.

use serde::{Deserialize, Serialize};

use crate::energy::{self, Discretization, EnergyReport, Preconditioner};
use crate::error::{Error, Result};
use crate::families::{self, UpperBoundCertificate};
use crate::profile::{BoundaryClass, Grid, Init, RadialProfile};
use crate::quadrature::Quadrature;

/// Armijo backtracking parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineSearch {
    pub c1: f64,
    pub backtrack: f64,
    pub max_backtracks: usize,
}

impl Default for LineSearch {
    fn default() -> Self {
        Self {
            c1: 1e-4,
            backtrack: 0.5,
            max_backtracks: 60,
        }
    }
}

#[derive(Clone, Debug)]
pub struct MinimizeConfig {
    pub alpha: f64,
    pub class: BoundaryClass,
    /// Node count of the uniform grid; ignored when `grid` is set.
    pub grid_size: usize,
    pub grid: Option<Grid>,
    pub quadrature: Quadrature,
    pub init: Init,
    /// Stop once the preconditioned gradient norm `(gᵀP⁻¹g)^{1/2}` drops below this.
    pub grad_tol: f64,
    pub max_iters: usize,
    pub line_search: LineSearch,
    pub preconditioner: Preconditioner,
}

impl MinimizeConfig {
    pub fn new(alpha: f64, class: BoundaryClass) -> Self {
        Self {
            alpha,
            class,
            grid_size: 2001,
            grid: None,
            quadrature: Quadrature::default(),
            init: Init::Linear,
            grad_tol: 1e-9,
            max_iters: 50_000,
            line_search: LineSearch::default(),
            preconditioner: Preconditioner::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 1.0) || !self.alpha.is_finite() {
            return Err(Error::Parameter(format!("α must exceed 1, got {}", self.alpha)));
        }
        let nodes = self.grid.as_ref().map_or(self.grid_size, Grid::len);
        if nodes < 9 {
            return Err(Error::TooCoarse { nodes, min: 9 });
        }
        if !(self.grad_tol > 0.0) {
            return Err(Error::Parameter("grad_tol must be positive".into()));
        }
        if self.max_iters < 1 {
            return Err(Error::Parameter("max_iters must be >= 1".into()));
        }
        let ls = &self.line_search;
        if !(ls.c1 > 0.0 && ls.c1 < 1.0 && ls.backtrack > 0.0 && ls.backtrack < 1.0) {
            return Err(Error::Parameter("line search needs 0 < c1 < 1 and 0 < backtrack < 1".into()));
        }
        self.quadrature.validate()
    }

    fn initial_profile(&self) -> Result<RadialProfile> {
        let grid = match &self.grid {
            Some(g) => g.clone(),
            None => Grid::uniform(self.grid_size)?,
        };
        RadialProfile::from_init(grid, self.class, &self.init)
    }
}

/// One accepted iterate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterRecord {
    pub iter: usize,
    pub energy: f64,
    pub grad_norm: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MinimizeResult {
    pub profile: RadialProfile,
    pub report: EnergyReport,
    pub iterations: usize,
    pub grad_norm: f64,
    pub grad_tol: f64,
    pub converged: bool,
    pub lower_bound: f64,
    /// Quadrature error estimate plus relative slack on `report.e_alpha`.
    pub slack: f64,
    pub el_residual: f64,
    pub initial_energy: f64,
    pub quadrature: Quadrature,
    #[serde(skip)]
    pub history: Vec<IterRecord>,
}

impl MinimizeResult {
    /// `(iter, energy, grad_norm)` table of the iterate history.
    pub fn write_history_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for rec in &self.history {
            out.serialize(rec)?;
        }
        out.flush()?;
        Ok(())
    }
}

pub fn minimize(cfg: &MinimizeConfig) -> Result<MinimizeResult> {
    cfg.validate()?;
    let alpha = cfg.alpha;
    let start = cfg.initial_profile()?;
    let disc = Discretization::new(start.nodes(), &cfg.quadrature);
    let ls = cfg.line_search;

    let mut x = start.values().to_vec();
    let mut energy = disc.alpha_energy(&x, alpha);
    let initial_energy = energy;
    let mut history = Vec::new();
    let mut grad_norm;
    let mut iter = 0;
    loop {
        let g = disc.gradient(&x, alpha);
        let metric = disc.preconditioner(&x, alpha, cfg.preconditioner);
        let dir: Vec<f64> = metric.solve(&g).into_iter().map(|v| -v).collect();
        let slope: f64 = g.iter().zip(&dir).map(|(a, b)| a * b).sum();
        grad_norm = (-slope).max(0.0).sqrt();
        history.push(IterRecord {
            iter,
            energy,
            grad_norm,
        });
        if grad_norm <= cfg.grad_tol || iter >= cfg.max_iters {
            break;
        }

        // energies closer than this are indistinguishable in floating point
        let noise = 64.0 * f64::EPSILON * energy.abs();
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..ls.max_backtracks {
            let trial: Vec<f64> = x.iter().zip(&dir).map(|(a, d)| a + step * d).collect();
            let e = disc.alpha_energy(&trial, alpha);
            let armijo = e <= energy + ls.c1 * step * slope;
            let below_noise = ls.c1 * step * slope.abs() < noise && e <= energy + noise;
            if armijo || below_noise {
                accepted = Some((trial, e));
                break;
            }
            step *= ls.backtrack;
        }
        match accepted {
            Some((trial, e)) => {
                x = trial;
                energy = e;
            }
            None => {
                return Err(Error::LineSearch {
                    iteration: iter,
                    grad_norm,
                })
            }
        }
        iter += 1;
    }

    let profile = start.with_interior(x);
    let report = energy::report_with(&disc, &profile, alpha);
    let slack = energy::energy_slack(&profile, alpha, &cfg.quadrature)?;
    let el_residual = energy::el_residual(&profile, alpha)?;
    Ok(MinimizeResult {
        lower_bound: families::lower_bound(cfg.class.m, alpha),
        converged: grad_norm <= cfg.grad_tol,
        profile,
        report,
        iterations: iter,
        grad_norm,
        grad_tol: cfg.grad_tol,
        slack,
        el_residual,
        initial_energy,
        quadrature: cfg.quadrature,
        history,
    })
}

/// Checks bundled for one converged minimizer.
#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub alpha: f64,
    pub m: u32,
    pub e_alpha: f64,
    pub lower_bound: f64,
    pub slack: f64,
    /// `e_alpha ≥ lower_bound − slack`.
    pub ok_lower: bool,
    pub grad_norm: f64,
    pub ok_grad: bool,
    pub el_residual: f64,
    /// `f_λ` at `λ = (α − 1)^{−1/4}`, for `m = 2` and `α < 5/4`.
    pub family: Option<UpperBoundCertificate>,
    /// `e_alpha ≤ family.e_alpha + slack`.
    pub ok_family: Option<bool>,
    pub ok: bool,
}

pub fn certify(result: &MinimizeResult) -> Result<Certificate> {
    if !result.converged {
        return Err(Error::Unconverged);
    }
    let alpha = result.report.alpha;
    let m = result.profile.class().m;
    let e_alpha = result.report.e_alpha;
    let ok_lower = e_alpha >= result.lower_bound - result.slack;
    let ok_grad = result.grad_norm <= result.grad_tol;
    let family = if m == 2 && alpha < 1.25 {
        Some(families::upper_bound_certificate(
            alpha,
            &result.quadrature,
            result.profile.len(),
        )?)
    } else {
        None
    };
    let ok_family = family
        .as_ref()
        .map(|f| e_alpha <= f.e_alpha + result.slack);
    Ok(Certificate {
        alpha,
        m,
        e_alpha,
        lower_bound: result.lower_bound,
        slack: result.slack,
        ok_lower,
        grad_norm: result.grad_norm,
        ok_grad,
        el_residual: result.el_residual,
        ok: ok_lower && ok_grad && ok_family.unwrap_or(true),
        family,
        ok_family,
    })
}

/// Settings for a warm-started sweep toward `α = 1`.
#[derive(Clone, Debug)]
pub struct ContinuationConfig {
    pub alpha_from: f64,
    pub alpha_to: f64,
    pub steps: usize,
    pub template: MinimizeConfig,
    pub refine: bool,
    /// Refine while `e_max · h² > refine_threshold` at the density peak.
    pub refine_threshold: f64,
    pub max_nodes: usize,
}

impl ContinuationConfig {
    pub fn new(alpha_from: f64, alpha_to: f64, steps: usize, template: MinimizeConfig) -> Self {
        Self {
            alpha_from,
            alpha_to,
            steps,
            template,
            refine: true,
            refine_threshold: 0.01,
            max_nodes: 1 << 16,
        }
    }

    /// `α_k − 1` geometric from `alpha_from − 1` to `alpha_to − 1`, endpoints included.
    pub fn schedule(&self) -> Vec<f64> {
        let ratio = ((self.alpha_to - 1.0) / (self.alpha_from - 1.0)).powf(1.0 / self.steps as f64);
        let mut out: Vec<f64> = (0..=self.steps)
            .map(|k| 1.0 + (self.alpha_from - 1.0) * ratio.powi(k as i32))
            .collect();
        out[0] = self.alpha_from;
        out[self.steps] = self.alpha_to;
        out
    }
}

/// Outcome of one α in a continuation; failures do not stop the sweep.
#[derive(Debug)]
pub struct ContinuationStep {
    pub alpha: f64,
    pub outcome: Result<MinimizeResult>,
    pub refinements: usize,
}

pub fn continuation(cfg: &ContinuationConfig) -> Result<Vec<ContinuationStep>> {
    if !(cfg.alpha_from > cfg.alpha_to && cfg.alpha_to > 1.0) {
        return Err(Error::Parameter(format!(
            "need alpha_from > alpha_to > 1, got {} and {}",
            cfg.alpha_from, cfg.alpha_to
        )));
    }
    if cfg.steps < 1 {
        return Err(Error::Parameter("steps must be >= 1".into()));
    }
    let mut steps = Vec::with_capacity(cfg.steps + 1);
    let mut warm: Option<RadialProfile> = None;
    let mut grid = match &cfg.template.grid {
        Some(g) => g.clone(),
        None => Grid::uniform(cfg.template.grid_size)?,
    };
    for alpha in cfg.schedule() {
        let mut step_cfg = cfg.template.clone();
        step_cfg.alpha = alpha;
        step_cfg.grid = Some(grid.clone());
        if let Some(p) = &warm {
            step_cfg.init = Init::Profile(p.clone());
        }
        let mut outcome = minimize(&step_cfg);
        let mut refinements = 0;
        while cfg.refine {
            let Ok(res) = &outcome else { break };
            let Some(flags) = refinement_flags(res, cfg.refine_threshold) else {
                break;
            };
            let finer = grid.refine(&flags);
            if finer.len() > cfg.max_nodes {
                break;
            }
            grid = finer;
            step_cfg.grid = Some(grid.clone());
            step_cfg.init = Init::Profile(res.profile.clone());
            outcome = minimize(&step_cfg);
            refinements += 1;
        }
        if let Ok(res) = &outcome {
            warm = Some(res.profile.clone());
        }
        steps.push(ContinuationStep {
            alpha,
            outcome,
            refinements,
        });
    }
    Ok(steps)
}

/// Cells to bisect twice when the density peak is under-resolved, i.e. when
/// `e_max · h² > threshold` in the peak cell; `None` when resolved.
fn refinement_flags(res: &MinimizeResult, threshold: f64) -> Option<Vec<bool>> {
    let grid = res.profile.grid();
    let e_max = res.report.e_max;
    let h = grid.width(grid.locate(res.report.r_at_max));
    if e_max * h * h <= threshold {
        return None;
    }
    let disc = Discretization::new(grid.nodes(), &res.quadrature);
    let cell_max = disc.cell_density_max(res.profile.values());
    Some(cell_max.iter().map(|&e| e >= 0.25 * e_max).collect())
}
