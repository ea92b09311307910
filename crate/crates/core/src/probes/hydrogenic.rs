//! One-particle Dirac–Coulomb benchmark: the grid ground state of
//! `α·p + mβ + k/|x|` against a radial shooting oracle.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{fourier_multiply_slice, inverse_root_symbol};
use crate::eigen::{shift_invert, ShiftInvertOptions};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::GridSpec;
use crate::hamiltonian::dirac_operator;
use crate::report::CheckRecord;

/// `m√(1 − k²)`, the ground level of the Coulomb–Dirac problem for `|k| < 1`.
pub fn closed_form(k: f64, m: f64) -> f64 {
    m * (1.0 - k * k).sqrt()
}

type State = [f64; 2];

/// Radial system in `x = ln r` for `(G, F)`.
fn rhs(x: f64, y: State, e: f64, m: f64, k: f64, kappa: f64) -> State {
    let r = x.exp();
    [-kappa * y[0] + ((e + m) * r - k) * y[1], kappa * y[1] - ((e - m) * r - k) * y[0]]
}

fn integrate(mut y: State, x0: f64, x1: f64, e: f64, m: f64, k: f64, kappa: f64, dx: f64) -> State {
    let steps = ((x1 - x0).abs() / dx).ceil().max(1.0) as usize;
    let h = (x1 - x0) / steps as f64;
    let mut x = x0;
    for _ in 0..steps {
        let f = |x: f64, y: State| rhs(x, y, e, m, k, kappa);
        let k1 = f(x, y);
        let k2 = f(x + 0.5 * h, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
        let k3 = f(x + 0.5 * h, [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
        let k4 = f(x + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
        y[0] += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
        y[1] += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
        let s = y[0].abs().max(y[1].abs());
        if s > 1e100 {
            y = [y[0] / s, y[1] / s];
        }
        x += h;
    }
    y
}

/// Wronskian of the regular and the decaying solution; it is independent of
/// the matching radius and vanishes exactly at bound-state energies.
pub fn mismatch(e: f64, m: f64, k: f64, kappa: f64) -> f64 {
    let gamma = (kappa * kappa - k * k).sqrt();
    let beta = (m * m - e * e).sqrt();
    let r_match = 1.0 / beta;
    let r_start = 1e-7 / m.max(1e-3);
    let r_max = r_match + 40.0 / beta;
    let dx = 2e-3;
    let outer = integrate([1.0, k / (gamma - kappa)], r_start.ln(), r_match.ln(), e, m, k, kappa, dx);
    let inner = integrate([1.0, -beta / (e + m)], r_max.ln(), r_match.ln(), e, m, k, kappa, dx);
    let no = outer[0].hypot(outer[1]);
    let ni = inner[0].hypot(inner[1]);
    (outer[0] * inner[1] - outer[1] * inner[0]) / (no * ni)
}

/// Lowest bound level in `(−m, m)` for angular quantum number `κ`, by a scan
/// for the first sign change of [`mismatch`] and bisection.
pub fn radial_level(k: f64, m: f64, kappa: f64) -> Result<Option<f64>> {
    if !(m > 0.0) || k.abs() >= kappa.abs() {
        return Err(Error::InvalidArgument(format!("radial oracle needs m > 0 and |k| < |κ|, got k = {k}, κ = {kappa}")));
    }
    if k == 0.0 {
        return Ok(None);
    }
    let samples = 600;
    // Dense near the upper edge, where levels accumulate.
    let energy = |i: usize| {
        let s = 1.0 - i as f64 / samples as f64;
        m * (1.0 - 2.0 * s * s)
    };
    let mut prev_e = energy(1);
    let mut prev_d = mismatch(prev_e, m, k, kappa);
    for i in 2..samples {
        let e = energy(i);
        let d = mismatch(e, m, k, kappa);
        if d == 0.0 {
            return Ok(Some(e));
        }
        if d.signum() != prev_d.signum() {
            let (mut lo, mut hi, mut dlo) = (prev_e, e, prev_d);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                let dm = mismatch(mid, m, k, kappa);
                if dm.signum() == dlo.signum() {
                    lo = mid;
                    dlo = dm;
                } else {
                    hi = mid;
                }
                if hi - lo < 1e-14 {
                    break;
                }
            }
            return Ok(Some(0.5 * (lo + hi)));
        }
        prev_e = e;
        prev_d = d;
    }
    Ok(None)
}

/// Ground level (`κ = −1`).
pub fn radial_ground_state(k: f64, m: f64) -> Result<Option<f64>> {
    radial_level(k, m, -1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HydrogenicSpec {
    pub k: f64,
    pub mass: f64,
    pub box_len: f64,
    pub points: Vec<usize>,
    pub tol: f64,
    pub max_matvecs: usize,
    pub seed: u64,
}

impl Default for HydrogenicSpec {
    fn default() -> Self {
        HydrogenicSpec {
            k: -0.5,
            mass: 1.0,
            box_len: 20.0,
            points: vec![16, 24, 32, 48],
            tol: 1e-6,
            max_matvecs: 400,
            seed: 11,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HydrogenicRow {
    pub points: usize,
    /// Lowest converged level inside `(−m, m)`, if any.
    pub eigenvalue: Option<f64>,
    pub ritz_values: Vec<f64>,
    pub residual: f64,
    pub converged: bool,
    pub matvecs: usize,
    pub relative_error: Option<f64>,
}

/// Gap levels of the grid operator from shift-invert Lanczos at `σ = 0`,
/// where the free `|α·p + mβ|⁻¹ = (|p|² + m²)^{−1/2}` preconditions the
/// inner solves. The ground level in `(0, m)` is the one nearest zero.
pub fn grid_ground_state(spec: &HydrogenicSpec, points: usize, reference: Option<f64>) -> Result<HydrogenicRow> {
    let (k, m) = (spec.k, spec.mass);
    let grid = GridSpec::new(points, spec.box_len)?;
    let op = dirac_operator(grid, m, k)?;
    let symbol = inverse_root_symbol(&grid, 1.0, m * m);
    let width = if k != 0.0 { 1.0 / (m * k.abs()) } else { 2.0 };
    let start = Field::from_fn(grid, 3, 4, |c, x| {
        let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        Complex64::from(if c == 0 { (-r2 / (2.0 * width * width)).exp() } else { 0.0 })
    });
    let opts = ShiftInvertOptions {
        sigma: 0.0,
        how_many: 2,
        tol: spec.tol,
        max_outer: spec.max_matvecs,
        seed: spec.seed,
        start: Some(start.into_data()),
        radius: m,
        ..Default::default()
    };
    let res = shift_invert(|x| op.apply_slice(x), |x| fourier_multiply_slice(&grid, x, &symbol), op.dim(), &opts)?;
    let edge = 1e-6 * m;
    let found = (0..res.ritz_values.len())
        .filter(|&i| res.converged[i] && res.ritz_values[i].abs() < m - edge)
        .map(|i| res.ritz_values[i])
        .fold(None, |acc: Option<f64>, e| Some(acc.map_or(e, |a| a.min(e))));
    Ok(HydrogenicRow {
        points,
        eigenvalue: found,
        ritz_values: res.ritz_values.clone(),
        residual: res.residual_norms.iter().cloned().fold(0.0, f64::max),
        converged: res.all_converged(),
        matvecs: res.iterations,
        relative_error: match (found, reference) {
            (Some(e), Some(r)) => Some((e - r).abs() / r.abs()),
            _ => None,
        },
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct HydrogenicReport {
    pub k: f64,
    pub mass: f64,
    pub oracle: Option<f64>,
    pub closed_form: f64,
    pub rows: Vec<HydrogenicRow>,
    /// Relative error strictly decreasing with the number of points.
    pub monotone: bool,
}

pub fn hydrogenic_validation(spec: &HydrogenicSpec) -> Result<HydrogenicReport> {
    let oracle = radial_ground_state(spec.k, spec.mass)?;
    let mut rows = Vec::new();
    for &n in &spec.points {
        rows.push(grid_ground_state(spec, n, oracle)?);
    }
    let errs: Vec<Option<f64>> = rows.iter().map(|r| r.relative_error).collect();
    let monotone = errs.iter().all(|e| e.is_some()) && errs.windows(2).all(|w| w[1].unwrap() < w[0].unwrap());
    Ok(HydrogenicReport {
        k: spec.k,
        mass: spec.mass,
        oracle,
        closed_form: closed_form(spec.k, spec.mass),
        rows,
        monotone,
    })
}

impl HydrogenicReport {
    pub fn records(&self) -> Vec<CheckRecord> {
        let anchor = "eigenvalues of alpha.p + m beta + k/|x| in (-m, m)";
        let mut out = Vec::new();
        if let Some(o) = self.oracle {
            out.push(CheckRecord::compare(
                "radial oracle vs m sqrt(1-k^2)",
                anchor,
                (o - self.closed_form).abs() / self.closed_form,
                1e-8,
            ));
        }
        let last = self.rows.last().and_then(|r| r.relative_error).unwrap_or(f64::INFINITY);
        out.push(CheckRecord::compare(
            format!("grid ground state at N = {}", self.rows.last().map_or(0, |r| r.points)),
            anchor,
            last,
            1e-2,
        ));
        out.push(CheckRecord::compare(
            "grid error decreases with N",
            anchor,
            if self.monotone { 0.0 } else { 1.0 },
            0.0,
        ));
        out
    }

    pub fn csv_rows(&self) -> Vec<Vec<f64>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    r.points as f64,
                    r.eigenvalue.unwrap_or(f64::NAN),
                    r.relative_error.unwrap_or(f64::NAN),
                    r.residual,
                ]
            })
            .collect()
    }

    pub const CSV_HEADER: [&'static str; 4] = ["points", "eigenvalue", "relative_error", "residual"];
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_reproduces_the_closed_form() {
        for k in [-0.5, -0.1, -0.8] {
            let e = radial_ground_state(k, 1.0).unwrap().unwrap();
            assert!((e - closed_form(k, 1.0)).abs() < 1e-8, "k = {k}: {e}");
        }
        let e = radial_ground_state(-0.3, 2.0).unwrap().unwrap();
        assert!((e - closed_form(-0.3, 2.0)).abs() < 1e-8);
    }

    #[test]
    fn oracle_finds_excited_levels() {
        // κ = 1 (2p½) is degenerate with 2s for the Coulomb problem.
        let k: f64 = -0.5;
        let gamma = (1.0 - k * k).sqrt();
        let two_s = 1.0 / (1.0 + k * k / (1.0 + gamma).powi(2)).sqrt();
        let e = radial_level(k, 1.0, 1.0).unwrap().unwrap();
        assert!((e - two_s).abs() < 1e-8, "{e} vs {two_s}");
    }

    #[test]
    fn free_operator_has_no_gap_level() {
        assert_eq!(radial_ground_state(0.0, 1.0).unwrap(), None);
        let spec = HydrogenicSpec {
            k: 0.0,
            points: vec![8],
            box_len: 10.0,
            ..Default::default()
        };
        let row = grid_ground_state(&spec, 8, None).unwrap();
        assert_eq!(row.eigenvalue, None);
    }

    #[test]
    fn weak_coupling_level_near_the_edge() {
        let e = radial_ground_state(-0.1, 1.0).unwrap().unwrap();
        assert!(e > 0.99 && e < 1.0);
        assert!((e - 0.994_987_437_106_620).abs() < 1e-8);
    }

    #[test]
    fn coarse_grid_level_lies_in_the_gap() {
        let spec = HydrogenicSpec {
            points: vec![12],
            ..Default::default()
        };
        let row = grid_ground_state(&spec, 12, Some(closed_form(-0.5, 1.0))).unwrap();
        let e = row.eigenvalue.expect("level in the gap");
        assert!(e > 0.8 && e < 1.0, "{e}");
    }
}
