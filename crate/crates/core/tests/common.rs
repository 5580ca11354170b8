#![allow(dead_code)]

use alphamap_core::{BoundaryClass, Grid, RadialProfile};

/// `m·r + Σ a_k sin(k r)` sampled on a uniform grid; vanishes at both ends
/// of the perturbation so the boundary values are exact.
pub fn smooth_profile(n: usize, m: u32, coeffs: &[f64]) -> RadialProfile {
    let grid = Grid::uniform(n).unwrap();
    let mut values: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|&r| {
            m as f64 * r
                + coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, a)| a * ((k + 1) as f64 * r).sin())
                    .sum::<f64>()
        })
        .collect();
    values[0] = 0.0;
    values[n - 1] = m as f64 * std::f64::consts::PI;
    RadialProfile::new(grid, BoundaryClass::new(m), values).unwrap()
}

/// Adaptive Simpson to relative accuracy `rel`; the test-side oracle for
/// one-dimensional integrals.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        let noise = 1e-14 * (left.abs() + right.abs());
        if depth == 0 || delta.abs() <= 15.0 * tol || delta.abs() <= noise {
            left + right + delta / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let rough = rec(f, a, b, fa, fm, fb, whole, 1e-4 * whole.abs(), 40);
    rec(f, a, b, fa, fm, fb, whole, rel * rough.abs(), 40)
}
