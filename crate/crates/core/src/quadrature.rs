//! Gauss–Legendre rules: per-cell open rules for the energy integrals and a
//! doubling composite integrator for the one-dimensional bound integrals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
///
/// Roots of `P_n` are found by Newton iteration from the Chebyshev guess.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "need at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Per-cell quadrature used for every energy integral over `[0, π]`.
///
/// Every node is strictly interior to its panel, so `sin r > 0` at all
/// evaluation points and the `sin²f / sin²r` term never hits a pole.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quadrature {
    pub panels_per_cell: usize,
    pub points_per_panel: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            panels_per_cell: 1,
            points_per_panel: 4,
        }
    }
}

impl Quadrature {
    pub fn new(panels_per_cell: usize, points_per_panel: usize) -> Result<Self> {
        let q = Self {
            panels_per_cell,
            points_per_panel,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if self.panels_per_cell < 1 {
            return Err(Error::Parameter("panels_per_cell must be >= 1".into()));
        }
        if !(2..=8).contains(&self.points_per_panel) {
            return Err(Error::Parameter(format!(
                "points_per_panel must lie in 2..=8, got {}",
                self.points_per_panel
            )));
        }
        Ok(())
    }

    /// The same rule with twice as many panels per cell.
    pub fn refined(&self) -> Self {
        Self {
            panels_per_cell: 2 * self.panels_per_cell,
            ..*self
        }
    }

    /// Local nodes in `(0, 1)` and weights summing to one for a unit cell.
    pub fn unit_rule(&self) -> Vec<(f64, f64)> {
        let (x, w) = gauss_legendre(self.points_per_panel);
        let panels = self.panels_per_cell as f64;
        let mut out = Vec::with_capacity(self.panels_per_cell * self.points_per_panel);
        for k in 0..self.panels_per_cell {
            for (xi, wi) in x.iter().zip(&w) {
                let local = (k as f64 + 0.5 * (xi + 1.0)) / panels;
                out.push((local, 0.5 * wi / panels));
            }
        }
        out
    }
}

/// Composite Gauss–Legendre over the given breakpoints.
pub fn composite<F: Fn(f64) -> f64>(f: &F, breaks: &[f64], points: usize) -> f64 {
    let (x, w) = gauss_legendre(points);
    breaks
        .windows(2)
        .map(|ab| {
            let (a, b) = (ab[0], ab[1]);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            half * x
                .iter()
                .zip(&w)
                .map(|(xi, wi)| wi * f(mid + half * xi))
                .sum::<f64>()
        })
        .sum()
}

/// Breakpoints on `[a, b]` graded geometrically toward `b`, with the last
/// panel no wider than `finest`.
pub fn graded_breaks(a: f64, b: f64, finest: f64) -> Vec<f64> {
    let mut breaks = vec![a];
    let mut width = 0.5 * (b - a);
    while width > finest {
        breaks.push(b - width);
        width *= 0.5;
    }
    breaks.push(b);
    breaks
}

/// Outcome of a doubling composite integration.
#[derive(Clone, Copy, Debug)]
pub struct Integral {
    pub value: f64,
    /// Difference between the last two refinement levels.
    pub error: f64,
    pub panels: usize,
}

/// Bisect every panel until two successive values agree to `rel_tol`.
pub fn integrate_doubling<F: Fn(f64) -> f64>(
    f: &F,
    mut breaks: Vec<f64>,
    points: usize,
    rel_tol: f64,
) -> Integral {
    let mut value = composite(f, &breaks, points);
    for _ in 0..24 {
        breaks = bisect(&breaks);
        let next = composite(f, &breaks, points);
        let error = (next - value).abs();
        value = next;
        if error <= rel_tol * value.abs().max(f64::MIN_POSITIVE) {
            return Integral {
                value,
                error,
                panels: breaks.len() - 1,
            };
        }
    }
    Integral {
        value,
        error: f64::NAN,
        panels: breaks.len() - 1,
    }
}

fn bisect(breaks: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * breaks.len());
    for ab in breaks.windows(2) {
        out.push(ab[0]);
        out.push(0.5 * (ab[0] + ab[1]));
    }
    out.push(*breaks.last().unwrap());
    out
}
