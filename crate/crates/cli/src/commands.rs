use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use alphamap_core::energy::{self, ChainReport, EnergyReport};
use alphamap_core::families::{self, FamilyParams, UpperBoundCertificate};
use alphamap_core::minimizer::{self, Certificate, ContinuationStep, MinimizeResult};
use alphamap_core::sweep::{self, SweepRow, SweepSpec};
use alphamap_core::verify::{self, BatteryResult, VerifyConfig};
use alphamap_core::{BoundaryClass, Init, MinimizeConfig, Quadrature, RadialProfile};

use crate::args::{FamilyArgs, FamilyKind, InitSpec, MinimizeArgs, SolverArgs, SweepArgs, VerifyArgs};
use crate::CliError;

const DEFAULT_NODES: usize = 2001;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|source| CliError::Write {
        path: path.display().to_string(),
        source,
    })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(alphamap_core::Error::from)?;
    w.flush().map_err(|source| CliError::Write {
        path: path.display().to_string(),
        source,
    })
}

fn quadrature(points: Option<usize>) -> Result<Quadrature, CliError> {
    Quadrature::new(1, points.unwrap_or(4)).map_err(|e| usage(e.to_string()))
}

/// Solver configuration from the shared flags.
fn solver_config(s: &SolverArgs, alpha: f64, class_m: u32) -> Result<MinimizeConfig, CliError> {
    let class = BoundaryClass::new(class_m);
    let mut cfg = MinimizeConfig::new(alpha, class);
    cfg.grid_size = s.nodes.unwrap_or(DEFAULT_NODES);
    cfg.quadrature = quadrature(s.quad_points)?;
    if let Some(t) = s.grad_tol {
        cfg.grad_tol = t;
    }
    if let Some(n) = s.max_iters {
        cfg.max_iters = n;
    }
    cfg.init = match s.init.as_deref().map(str::parse::<InitSpec>).transpose()? {
        None | Some(InitSpec::Linear) => Init::Linear,
        Some(InitSpec::Lambda(l)) => Init::Lambda(l),
        Some(InitSpec::Epsilon(e)) => Init::Epsilon(e),
        Some(InitSpec::File(path)) => {
            let p = RadialProfile::read_json(&path)
                .map_err(|e| usage(format!("cannot load {}: {e}", path.display())))?;
            Init::Profile(p)
        }
    };
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    Ok(cfg)
}

fn require_alpha(alpha: Option<f64>) -> Result<f64, CliError> {
    let alpha = alpha.ok_or_else(|| usage("--alpha is required"))?;
    if !(alpha > 1.0) || !alpha.is_finite() {
        return Err(usage(format!("--alpha must exceed 1, got {alpha}")));
    }
    Ok(alpha)
}

#[derive(Debug, Serialize)]
pub struct MinimizeOutput {
    #[serde(flatten)]
    pub result: MinimizeResult,
    pub certificate: Option<Certificate>,
}

#[derive(Debug)]
pub struct MinimizeRun {
    pub output: MinimizeOutput,
    pub exit_code: i32,
}

pub fn minimize(args: MinimizeArgs) -> Result<MinimizeRun, CliError> {
    let s = &args.solver;
    let alpha = require_alpha(s.alpha)?;
    let class_m = s.class_m.ok_or_else(|| usage("--class-m is required"))?;
    let cfg = solver_config(s, alpha, class_m)?;
    let result = minimizer::minimize(&cfg)?;
    let certificate = if result.converged {
        Some(minimizer::certify(&result)?)
    } else {
        None
    };
    let ok = certificate.as_ref().is_some_and(|c| c.ok);

    let r = &result.report;
    println!(
        "alpha={} m={} nodes={} iters={} grad_norm={:.3e} converged={}",
        alpha,
        class_m,
        result.profile.len(),
        result.iterations,
        result.grad_norm,
        result.converged
    );
    println!(
        "e_alpha={:.12} lower_bound={:.12} slack={:.3e} dirichlet={:.12} degree={} e_max={:.6} r_at_max={:.6}",
        r.e_alpha, result.lower_bound, result.slack, r.dirichlet, r.degree, r.e_max, r.r_at_max
    );
    if let Some(c) = &certificate {
        if let Some(f) = &c.family {
            println!(
                "family lambda={:.6} e_alpha={:.12} c_hat={:.4} minimizer_below_family={}",
                f.lambda,
                f.e_alpha,
                f.c_hat,
                c.ok_family.unwrap_or(false)
            );
        }
        println!("certificate: {}", if c.ok { "PASS" } else { "FAIL" });
    }

    if let Some(path) = &s.csv {
        result.profile.write_csv(create(path)?)?;
    }
    if let Some(path) = &args.history {
        result.write_history_csv(create(path)?)?;
    }
    let output = MinimizeOutput {
        result,
        certificate,
    };
    if let Some(path) = &s.out {
        write_json(path, &output)?;
    }
    Ok(MinimizeRun {
        output,
        exit_code: if ok { 0 } else { 1 },
    })
}

#[derive(Debug, Serialize)]
pub struct SweepStepOutput {
    pub alpha: f64,
    pub refinements: usize,
    pub nodes: Option<usize>,
    pub error: Option<String>,
    pub result: Option<MinimizeResult>,
}

#[derive(Debug)]
pub struct SweepRun {
    pub rows: Vec<SweepRow>,
    pub steps: Vec<ContinuationStep>,
    pub exit_code: i32,
}

pub fn sweep(args: SweepArgs) -> Result<SweepRun, CliError> {
    let s = &args.solver;
    let alpha_from = args.alpha_from.ok_or_else(|| usage("--alpha-from is required"))?;
    let alpha_to = args.alpha_to.ok_or_else(|| usage("--alpha-to is required"))?;
    let steps = args.steps.ok_or_else(|| usage("--steps is required"))?;
    if !(alpha_from > alpha_to && alpha_to > 1.0) {
        return Err(usage(format!(
            "need --alpha-from > --alpha-to > 1, got {alpha_from} and {alpha_to}"
        )));
    }
    if steps < 1 {
        return Err(usage("--steps must be >= 1"));
    }
    let class_m = s.class_m.ok_or_else(|| usage("--class-m is required"))?;
    let template = solver_config(s, alpha_from, class_m)?;
    let spec = SweepSpec {
        alpha_from,
        alpha_to,
        steps,
        class_m,
        grid_size: template.grid_size,
        csv: s.csv.clone(),
        json: s.out.clone(),
    };
    let results = sweep::run(&spec, &template, !args.no_refine)?;
    let rows: Vec<SweepRow> = results.iter().map(|st| sweep::row(st, class_m)).collect();

    match &spec.csv {
        Some(path) => sweep::write_csv(&rows, create(path)?)?,
        None => sweep::write_csv(&rows, std::io::stdout().lock())?,
    }
    if let Some(path) = &spec.json {
        let out: Vec<SweepStepOutput> = results
            .iter()
            .map(|st| SweepStepOutput {
                alpha: st.alpha,
                refinements: st.refinements,
                nodes: st.outcome.as_ref().ok().map(|r| r.profile.len()),
                error: st.outcome.as_ref().err().map(ToString::to_string),
                result: st.outcome.as_ref().ok().cloned(),
            })
            .collect();
        write_json(path, &out)?;
    }
    let all_converged = rows.iter().all(|r| r.converged);
    if !all_converged {
        eprintln!("warning: some sweep rows did not converge");
    }
    Ok(SweepRun {
        rows,
        steps: results,
        exit_code: if all_converged { 0 } else { 1 },
    })
}

#[derive(Debug)]
pub struct VerifyRun {
    pub batteries: Vec<BatteryResult>,
    pub exit_code: i32,
}

pub fn verify(args: VerifyArgs) -> Result<VerifyRun, CliError> {
    let mut cfg = VerifyConfig::default();
    if let Some(n) = args.samples {
        if n == 0 {
            return Err(usage("--samples must be >= 1"));
        }
        cfg.samples = n;
    }
    if let Some(l) = args.lambda_max {
        if !(l * l > 2.0) || !l.is_finite() {
            return Err(usage(format!("--lambda-max must satisfy λ² > 2, got {l}")));
        }
        cfg.lambda_max = l;
    }
    let batteries = verify::run_all(&cfg)?;
    println!("{:<14} {:>7} {:>8} {:>12}  result", "battery", "checks", "failures", "worst");
    for b in &batteries {
        println!(
            "{:<14} {:>7} {:>8} {:>12.3e}  {}  ({})",
            b.name,
            b.checks,
            b.failures,
            b.worst,
            if b.passed { "PASS" } else { "FAIL" },
            b.detail
        );
    }
    let failed: Vec<&str> = batteries.iter().filter(|b| !b.passed).map(|b| b.name.as_str()).collect();
    if !failed.is_empty() {
        eprintln!("failed batteries: {}", failed.join(", "));
    }
    if let Some(path) = &args.out {
        write_json(path, &batteries)?;
    }
    Ok(VerifyRun {
        exit_code: if failed.is_empty() { 0 } else { 1 },
        batteries,
    })
}

#[derive(Debug, Serialize)]
pub struct FamilyOutput {
    pub params: FamilyParams,
    pub report: EnergyReport,
    /// Majorant comparison for the λ family (α in (1, 2], λ² > 2).
    pub certificate: Option<UpperBoundCertificate>,
    /// Hölder chain for the degree-one ε family.
    pub chain: Option<ChainReport>,
}

#[derive(Debug)]
pub struct FamilyRun {
    pub output: FamilyOutput,
    pub profile: RadialProfile,
    pub exit_code: i32,
}

pub fn family(args: FamilyArgs) -> Result<FamilyRun, CliError> {
    let kind = args.kind.ok_or_else(|| usage("--kind is required"))?;
    let params = match kind {
        FamilyKind::Lambda => {
            let lambda = args.lambda.ok_or_else(|| usage("--lambda is required for --kind lambda"))?;
            if !(lambda >= 1.0) || !lambda.is_finite() {
                return Err(usage(format!("--lambda must be >= 1, got {lambda}")));
            }
            FamilyParams::Lambda { lambda }
        }
        FamilyKind::Epsilon => {
            let epsilon = args.epsilon.ok_or_else(|| usage("--epsilon is required for --kind epsilon"))?;
            if !(epsilon > 0.0 && epsilon < 1.0) {
                return Err(usage(format!("--epsilon must lie in (0, 1), got {epsilon}")));
            }
            FamilyParams::Epsilon { epsilon }
        }
    };
    let alpha = args.alpha.unwrap_or(1.0);
    if !(alpha >= 1.0) || !alpha.is_finite() {
        return Err(usage(format!("--alpha must be >= 1, got {alpha}")));
    }
    let nodes = args.nodes.unwrap_or(DEFAULT_NODES);
    let q = quadrature(args.quad_points)?;
    let profile = params.sample(nodes)?;
    let report = energy::report(&profile, alpha, &q)?;

    let certificate = match params {
        FamilyParams::Lambda { lambda } if alpha > 1.0 && alpha <= 2.0 && lambda * lambda > 2.0 => {
            Some(families::family_certificate(alpha, lambda, &q, nodes)?)
        }
        _ => None,
    };
    let chain = match params {
        FamilyParams::Epsilon { .. } => Some(energy::holder_chain(&profile, alpha, &q)?),
        _ => None,
    };
    let ok = certificate.as_ref().is_none_or(|c| c.ok_lower && c.ok_majorant)
        && chain.as_ref().is_none_or(ChainReport::all_ok);

    println!(
        "{:?} alpha={} nodes={} degree={} f(pi)={:.12}",
        params,
        alpha,
        nodes,
        report.degree,
        profile.values().last().unwrap()
    );
    println!(
        "e_alpha={:.12} dirichlet={:.12} (4pi + E = {:.12}) e_max={:.6} r_at_max={:.6} r_conc={:.6}",
        report.e_alpha,
        report.dirichlet,
        4.0 * PI + report.dirichlet,
        report.e_max,
        report.r_at_max,
        report.r_conc
    );
    if let Some(c) = &certificate {
        println!(
            "lower={:.12} majorant={:.6} gap={:.6} c_hat={:.4} ok_lower={} ok_majorant={}",
            c.lower, c.majorant, c.gap, c.c_hat, c.ok_lower, c.ok_majorant
        );
    }
    if let Some(c) = &chain {
        println!(
            "chain lhs={:.10} mid={:.10} rhs={:.10} ok={}",
            c.lhs,
            c.mid,
            c.rhs,
            c.all_ok()
        );
    }

    if let Some(path) = &args.csv {
        profile.write_csv(create(path)?)?;
    }
    let output = FamilyOutput {
        params,
        report,
        certificate,
        chain,
    };
    if let Some(path) = &args.out {
        write_json(path, &output)?;
    }
    Ok(FamilyRun {
        output,
        profile,
        exit_code: if ok { 0 } else { 1 },
    })
}
