use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "alphamap", version, about = "Co-rotational α-energy of sphere maps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimize the discrete α-energy in one boundary class and certify it.
    Minimize(MinimizeArgs),
    /// Warm-started continuation in α with one CSV row per α.
    Sweep(SweepArgs),
    /// Run every inequality and identity battery.
    Verify(VerifyArgs),
    /// Sample a closed-form family and report its energies.
    Family(FamilyArgs),
}

/// Flags shared by the solver commands. The same keys (kebab-case) are
/// accepted in a JSON config file; flags win.
#[derive(Debug, Default, Clone, Args, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct SolverArgs {
    /// Exponent α > 1.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Boundary class: f(0) = 0, f(π) = mπ.
    #[arg(long = "class-m")]
    pub class_m: Option<u32>,
    /// Number of grid nodes.
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Gauss points per cell (2..=8).
    #[arg(long = "quad-points")]
    pub quad_points: Option<usize>,
    /// Stop when the preconditioned gradient norm drops below this.
    #[arg(long = "grad-tol")]
    pub grad_tol: Option<f64>,
    /// Iteration cap per solve.
    #[arg(long = "max-iters")]
    pub max_iters: Option<usize>,
    /// linear | lambda:<v> | epsilon:<v> | file:<path>
    #[arg(long)]
    pub init: Option<String>,
    /// JSON output path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// CSV output path.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

impl SolverArgs {
    fn or(self, file: Self) -> Self {
        Self {
            alpha: self.alpha.or(file.alpha),
            class_m: self.class_m.or(file.class_m),
            nodes: self.nodes.or(file.nodes),
            quad_points: self.quad_points.or(file.quad_points),
            grad_tol: self.grad_tol.or(file.grad_tol),
            max_iters: self.max_iters.or(file.max_iters),
            init: self.init.or(file.init),
            out: self.out.or(file.out),
            csv: self.csv.or(file.csv),
        }
    }
}

#[derive(Debug, Default, Clone, Args, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct MinimizeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub solver: SolverArgs,
    /// Iterate history CSV (iter, energy, grad_norm).
    #[arg(long)]
    pub history: Option<PathBuf>,
    /// JSON file with the same keys as the flags; flags take precedence.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl MinimizeArgs {
    pub fn resolve(self) -> Result<Self, CliError> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let file: Self = read_config(&path)?;
        Ok(Self {
            solver: self.solver.or(file.solver),
            history: self.history.or(file.history),
            config: Some(path),
        })
    }
}

#[derive(Debug, Default, Clone, Args, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct SweepArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub solver: SolverArgs,
    /// First α of the sweep.
    #[arg(long = "alpha-from")]
    pub alpha_from: Option<f64>,
    /// Last α of the sweep, closer to 1.
    #[arg(long = "alpha-to")]
    pub alpha_to: Option<f64>,
    /// Number of steps; the sweep produces steps + 1 rows.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Keep the grid fixed along the sweep.
    #[arg(long = "no-refine")]
    pub no_refine: bool,
    /// JSON file with the same keys as the flags; flags take precedence.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl SweepArgs {
    pub fn resolve(self) -> Result<Self, CliError> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let file: Self = read_config(&path)?;
        Ok(Self {
            solver: self.solver.or(file.solver),
            alpha_from: self.alpha_from.or(file.alpha_from),
            alpha_to: self.alpha_to.or(file.alpha_to),
            steps: self.steps.or(file.steps),
            no_refine: self.no_refine || file.no_refine,
            config: Some(path),
        })
    }
}

#[derive(Debug, Default, Clone, Args, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct VerifyArgs {
    /// Random samples for the density identity.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Largest λ for the I₁/I₂ estimates.
    #[arg(long = "lambda-max")]
    pub lambda_max: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON file with the same keys as the flags; flags take precedence.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl VerifyArgs {
    pub fn resolve(self) -> Result<Self, CliError> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let file: Self = read_config(&path)?;
        Ok(Self {
            samples: self.samples.or(file.samples),
            lambda_max: self.lambda_max.or(file.lambda_max),
            out: self.out.or(file.out),
            config: Some(path),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    Lambda,
    Epsilon,
}

#[derive(Debug, Default, Clone, Args, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct FamilyArgs {
    #[arg(long, value_enum)]
    pub kind: Option<FamilyKind>,
    /// Scale λ >= 1 of the degree-zero family.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Parameter ε in (0, 1) of the three-half-turn family.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Exponent α >= 1; defaults to 1.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long = "quad-points")]
    pub quad_points: Option<usize>,
    /// Profile CSV (r,f).
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON file with the same keys as the flags; flags take precedence.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl FamilyArgs {
    pub fn resolve(self) -> Result<Self, CliError> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let file: Self = read_config(&path)?;
        Ok(Self {
            kind: self.kind.or(file.kind),
            lambda: self.lambda.or(file.lambda),
            epsilon: self.epsilon.or(file.epsilon),
            alpha: self.alpha.or(file.alpha),
            nodes: self.nodes.or(file.nodes),
            quad_points: self.quad_points.or(file.quad_points),
            csv: self.csv.or(file.csv),
            out: self.out.or(file.out),
            config: Some(path),
        })
    }
}

fn read_config<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
}

/// Parsed `--init` value.
#[derive(Debug, Clone, PartialEq)]
pub enum InitSpec {
    Linear,
    Lambda(f64),
    Epsilon(f64),
    File(PathBuf),
}

impl FromStr for InitSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CliError::Usage(format!("bad --init value {s:?}; expected linear|lambda:<v>|epsilon:<v>|file:<path>"));
        if s == "linear" {
            return Ok(Self::Linear);
        }
        let (kind, value) = s.split_once(':').ok_or_else(bad)?;
        match kind {
            "lambda" => value.parse().map(Self::Lambda).map_err(|_| bad()),
            "epsilon" => value.parse().map(Self::Epsilon).map_err(|_| bad()),
            "file" if !value.is_empty() => Ok(Self::File(value.into())),
            _ => Err(bad()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn init_flag_parsing() {
        assert_eq!("linear".parse::<InitSpec>().unwrap(), InitSpec::Linear);
        assert_eq!("lambda:2".parse::<InitSpec>().unwrap(), InitSpec::Lambda(2.0));
        assert_eq!("epsilon:0.1".parse::<InitSpec>().unwrap(), InitSpec::Epsilon(0.1));
        assert_eq!(
            "file:/tmp/p.json".parse::<InitSpec>().unwrap(),
            InitSpec::File("/tmp/p.json".into())
        );
        for bad in ["", "lambda", "lambda:x", "gamma:1", "file:"] {
            assert!(bad.parse::<InitSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn config_keys_match_flags() {
        let args: MinimizeArgs = serde_json::from_str(
            r#"{"alpha": 1.1, "class-m": 2, "nodes": 101, "quad-points": 5, "grad-tol": 1e-8,
                "max-iters": 10, "init": "lambda:2", "history": "h.csv"}"#,
        )
        .unwrap();
        assert_eq!(args.solver.class_m, Some(2));
        assert_eq!(args.solver.quad_points, Some(5));
        assert_eq!(args.history.as_deref(), Some(Path::new("h.csv")));
        let sweep: SweepArgs =
            serde_json::from_str(r#"{"alpha-from": 1.2, "alpha-to": 1.05, "steps": 3, "no-refine": true}"#).unwrap();
        assert_eq!(sweep.steps, Some(3));
        assert!(sweep.no_refine);
    }

    #[test]
    fn flags_override_config() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        std::fs::write(&path, r#"{"alpha": 1.3, "class-m": 1, "nodes": 33}"#).unwrap();
        let cli = Cli::try_parse_from([
            "alphamap",
            "minimize",
            "--alpha",
            "1.1",
            "--config",
            path.to_str().unwrap(),
        ])
        .unwrap();
        let Command::Minimize(args) = cli.command else { panic!() };
        let args = args.resolve().unwrap();
        assert_eq!(args.solver.alpha, Some(1.1));
        assert_eq!(args.solver.class_m, Some(1));
        assert_eq!(args.solver.nodes, Some(33));
    }
}
