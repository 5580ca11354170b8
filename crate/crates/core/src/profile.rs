//! Co-rotational profiles `f: [0, π] → ℝ` and the boundary classes they live in.
//!
//! A profile `f` with `f(0) = 0` and `f(π) = mπ` induces the equivariant map
//! `u_f(r, θ) = (sin f(r) cos θ, sin f(r) sin θ, cos f(r))`. Values are kept
//! in radians and never reduced mod 2π; the winding is the whole point.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families;

/// Profiles with `f(0) = 0` and `f(π) = m·π`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoundaryClass {
    pub m: u32,
}

impl BoundaryClass {
    pub const fn new(m: u32) -> Self {
        Self { m }
    }

    /// Value pinned at `r = π`.
    pub fn end_value(&self) -> f64 {
        self.m as f64 * PI
    }

    /// Degree of every map in the class: 0 for even `m`, 1 for odd `m`.
    pub fn degree(&self) -> i64 {
        (self.m % 2) as i64
    }
}

/// Strictly increasing nodes from exactly `0` to exactly `π`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid(Vec<f64>);

impl Grid {
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(Error::InvalidGrid(format!(
                "need at least 3 nodes, got {}",
                nodes.len()
            )));
        }
        if nodes[0] != 0.0 || *nodes.last().unwrap() != PI {
            return Err(Error::InvalidGrid("grid must start at 0 and end at π".into()));
        }
        if let Some(w) = nodes.windows(2).find(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidGrid(format!(
                "nodes not strictly increasing near {}",
                w[0]
            )));
        }
        Ok(Self(nodes))
    }

    pub fn uniform(nodes: usize) -> Result<Self> {
        if nodes < 3 {
            return Err(Error::InvalidGrid(format!("need at least 3 nodes, got {nodes}")));
        }
        let cells = (nodes - 1) as f64;
        let mut r: Vec<f64> = (0..nodes).map(|i| PI * i as f64 / cells).collect();
        r[nodes - 1] = PI;
        Ok(Self(r))
    }

    pub fn nodes(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cells(&self) -> usize {
        self.0.len() - 1
    }

    pub fn width(&self, cell: usize) -> f64 {
        self.0[cell + 1] - self.0[cell]
    }

    /// Index of the cell containing `r`; a node belongs to the cell on its
    /// right, except `π` which belongs to the last cell.
    pub fn locate(&self, r: f64) -> usize {
        let k = self.0.partition_point(|&x| x <= r);
        k.saturating_sub(1).min(self.cells() - 1)
    }

    /// Bisect every cell, and bisect once more each cell flagged in `extra`.
    ///
    /// Repeated application grades the mesh geometrically toward the flagged
    /// region.
    pub fn refine(&self, extra: &[bool]) -> Self {
        assert_eq!(extra.len(), self.cells());
        let mut out = Vec::with_capacity(2 * self.len() + extra.len());
        for (c, w) in self.0.windows(2).enumerate() {
            let (a, b) = (w[0], w[1]);
            if extra[c] {
                let h = b - a;
                out.extend([a, a + 0.25 * h, a + 0.5 * h, a + 0.75 * h]);
            } else {
                out.extend([a, 0.5 * (a + b)]);
            }
        }
        out.push(PI);
        Self(out)
    }

    /// Bisect every cell whose midpoint lies within `radius` of `center`
    /// `levels` times, keeping the rest of the grid untouched.
    pub fn refined_near(&self, center: f64, radius: f64, levels: usize) -> Self {
        let mut grid = self.clone();
        for _ in 0..levels {
            let mut out = Vec::with_capacity(grid.len() * 2);
            for w in grid.0.windows(2) {
                out.push(w[0]);
                let mid = 0.5 * (w[0] + w[1]);
                if (mid - center).abs() <= radius {
                    out.push(mid);
                }
            }
            out.push(PI);
            grid = Self(out);
        }
        grid
    }
}

/// How the nodal values of a new profile are produced.
#[derive(Clone, Debug)]
pub enum Init {
    /// `f(r) = m·r`.
    Linear,
    /// The degree-zero family `2 arctan(λ tan r)`; requires `m = 2`.
    Lambda(f64),
    /// The degree-one family with two bubbles; requires `m = 3`.
    Epsilon(f64),
    /// Explicit nodal values, which must already satisfy the boundary values.
    Values(Vec<f64>),
    /// Interpolate an existing profile of the same class.
    Profile(RadialProfile),
}

/// Piecewise-linear profile `f` on a grid, with pinned boundary values.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialProfile {
    class: BoundaryClass,
    grid: Grid,
    values: Vec<f64>,
}

impl RadialProfile {
    pub fn new(grid: Grid, class: BoundaryClass, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "{} values for {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if values[0] != 0.0 {
            return Err(Error::Boundary(format!("f(0) = {} instead of 0", values[0])));
        }
        let end = *values.last().unwrap();
        if end != class.end_value() {
            return Err(Error::Boundary(format!(
                "f(π) = {end} instead of {}·π",
                class.m
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Boundary(format!("non-finite nodal value {v}")));
        }
        Ok(Self { class, grid, values })
    }

    /// Build a profile on `grid` with the given initializer.
    pub fn from_init(grid: Grid, class: BoundaryClass, init: &Init) -> Result<Self> {
        let end = class.end_value();
        let nodes = grid.nodes();
        let n = nodes.len();
        let mut values: Vec<f64> = match init {
            Init::Linear => nodes.iter().map(|&r| class.m as f64 * r).collect(),
            Init::Lambda(lambda) => {
                if class.m != 2 {
                    return Err(Error::Parameter(format!(
                        "the λ family lives in class m = 2, not m = {}",
                        class.m
                    )));
                }
                if !(*lambda >= 1.0) {
                    return Err(Error::Parameter(format!("λ must be >= 1, got {lambda}")));
                }
                nodes.iter().map(|&r| families::eval_f_lambda(*lambda, r)).collect()
            }
            Init::Epsilon(eps) => {
                if class.m != 3 {
                    return Err(Error::Parameter(format!(
                        "the ε family lives in class m = 3, not m = {}",
                        class.m
                    )));
                }
                if !(*eps > 0.0 && *eps < 1.0) {
                    return Err(Error::Parameter(format!("ε must lie in (0, 1), got {eps}")));
                }
                nodes.iter().map(|&r| families::eval_f_epsilon(*eps, r)).collect()
            }
            Init::Values(v) => return Self::new(grid, class, v.clone()),
            Init::Profile(p) => {
                if p.class != class {
                    return Err(Error::Boundary(format!(
                        "cannot warm-start class m = {} from class m = {}",
                        class.m, p.class.m
                    )));
                }
                return p.resample(&grid);
            }
        };
        values[0] = 0.0;
        values[n - 1] = end;
        Self::new(grid, class, values)
    }

    /// Uniform grid with `grid_size` nodes.
    pub fn make(grid_size: usize, class: BoundaryClass, init: &Init) -> Result<Self> {
        Self::from_init(Grid::uniform(grid_size)?, class, init)
    }

    pub fn class(&self) -> BoundaryClass {
        self.class
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn nodes(&self) -> &[f64] {
        self.grid.nodes()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Same grid and class, new interior values; boundary entries are kept.
    pub(crate) fn with_interior(&self, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), self.values.len());
        let mut values = values;
        values[0] = self.values[0];
        let n = values.len();
        values[n - 1] = self.values[n - 1];
        Self {
            class: self.class,
            grid: self.grid.clone(),
            values,
        }
    }

    /// Slope of cell `c`.
    pub fn slope(&self, c: usize) -> f64 {
        (self.values[c + 1] - self.values[c]) / self.grid.width(c)
    }

    /// `round((cos f(0) − cos f(π)) / 2)`.
    pub fn degree(&self) -> i64 {
        let f0 = self.values[0];
        let f1 = *self.values.last().unwrap();
        ((f0.cos() - f1.cos()) / 2.0).round() as i64
    }

    /// Piecewise-linear value and cell slope at `r`.
    pub fn eval(&self, r: f64) -> Result<(f64, f64)> {
        if !(0.0..=PI).contains(&r) {
            return Err(Error::OutOfDomain(r));
        }
        let c = self.grid.locate(r);
        let nodes = self.grid.nodes();
        let t = (r - nodes[c]) / self.grid.width(c);
        let f = self.values[c] + t * (self.values[c + 1] - self.values[c]);
        Ok((f, self.slope(c)))
    }

    /// Interpolate onto another grid, keeping the boundary values exact.
    pub fn resample(&self, grid: &Grid) -> Result<Self> {
        let mut values = grid
            .nodes()
            .iter()
            .map(|&r| self.eval(r).map(|(f, _)| f))
            .collect::<Result<Vec<_>>>()?;
        values[0] = 0.0;
        let n = values.len();
        values[n - 1] = self.class.end_value();
        Self::new(grid.clone(), self.class, values)
    }

    /// `∫₀^π |f′ sin f| dr`, exact for the piecewise-linear profile.
    ///
    /// On each cell `f′ sin f` integrates to `cos f_i − cos f_{i+1}`, split at
    /// the multiples of π the cell crosses.
    pub fn turning_integral(&self) -> f64 {
        self.values
            .windows(2)
            .map(|w| cos_variation(w[0], w[1]))
            .sum()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&ProfileWire::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let wire: ProfileWire = serde_json::from_str(s)?;
        wire.try_into()
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Two-column `r,f` table.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["r", "f"])?;
        for (r, f) in self.nodes().iter().zip(&self.values) {
            out.write_record([r.to_string(), f.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Total variation of `cos` along the monotone path from `a` to `b`.
fn cos_variation(a: f64, b: f64) -> f64 {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let mut total = 0.0;
    let mut x = lo;
    let mut k = (lo / PI).floor() + 1.0;
    while k * PI < hi {
        let next = k * PI;
        total += (x.cos() - next.cos()).abs();
        x = next;
        k += 1.0;
    }
    total + (x.cos() - hi.cos()).abs()
}

/// On-disk form `{"m": int, "nodes": [...], "values": [...]}`.
#[derive(Serialize, Deserialize)]
struct ProfileWire {
    m: u32,
    nodes: Vec<f64>,
    values: Vec<f64>,
}

impl From<&RadialProfile> for ProfileWire {
    fn from(p: &RadialProfile) -> Self {
        Self {
            m: p.class.m,
            nodes: p.nodes().to_vec(),
            values: p.values.clone(),
        }
    }
}

impl TryFrom<ProfileWire> for RadialProfile {
    type Error = Error;

    fn try_from(w: ProfileWire) -> Result<Self> {
        RadialProfile::new(Grid::new(w.nodes)?, BoundaryClass::new(w.m), w.values)
    }
}

impl Serialize for RadialProfile {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ProfileWire::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for RadialProfile {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        ProfileWire::deserialize(d)?
            .try_into()
            .map_err(serde::de::Error::custom)
    }
}
