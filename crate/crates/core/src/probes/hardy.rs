//! Weighted Hardy-type inequalities for `H₀₀ = √2·I₂⊗(σ·p)` on trial fields.

use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clifford::sigma;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::{chi, GridSpec};
use crate::hamiltonian::{h00_operator, COUPLING_LIMIT};
use crate::report::{CheckRecord, Status};

type C = Complex64;

/// Relative slack allowed for discretization.
pub const SLACK: f64 = 1e-3;

fn radius(x: &[f64]) -> f64 {
    (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

fn radii(grid: &GridSpec) -> Vec<f64> {
    let x = grid.coords();
    let n = grid.points;
    (0..grid.sites(3)).map(|s| radius(&[x[s / (n * n)], x[(s / n) % n], x[s % n]])).collect()
}

fn weighted_norm(f: &Field, w: &[f64]) -> f64 {
    let mut g = f.clone();
    g.multiply_by(w);
    g.norm()
}

/// `‖|y|^{1/2} H₀₀ u‖ / ‖|y|^{−1/2} u‖`.
pub fn hardy_win(u: &Field) -> Result<f64> {
    if u.norm() == 0.0 {
        return Err(Error::ZeroField);
    }
    let grid = *u.grid();
    let r = radii(&grid);
    let hu = h00_operator(grid)?.apply(u)?;
    let sqrt_r: Vec<f64> = r.iter().map(|v| v.sqrt()).collect();
    let inv_sqrt_r: Vec<f64> = r.iter().map(|v| 1.0 / v.sqrt()).collect();
    Ok(weighted_norm(&hu, &sqrt_r) / weighted_norm(u, &inv_sqrt_r))
}

/// Hermitian multiplier `Q(y)` with `|Q(y)| = √2 μ̂/|y|`, commuting with
/// `I₂⊗(σ·ŷ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QChoice {
    /// `Q = 0`.
    Zero,
    /// `Q = sign·√2 μ̂/|y|`.
    Scalar(f64),
    /// `Q = sign·√2 μ̂/|y| · I₂⊗(σ·ŷ)`.
    SpinRadial(f64),
}

impl QChoice {
    pub fn label(&self) -> String {
        match self {
            QChoice::Zero => "Q = 0".into(),
            QChoice::Scalar(s) => format!("Q = {s:+} sqrt2 mu/|y|"),
            QChoice::SpinRadial(s) => format!("Q = {s:+} sqrt2 mu/|y| sigma.yhat"),
        }
    }
}

/// `Q v` on a 4-component block field (entry `[row][col]` at `2col + row`).
pub fn apply_q(v: &Field, q: QChoice, mu_hat: f64) -> Field {
    let grid = *v.grid();
    let x = grid.coords();
    let n = grid.points;
    let sites = v.sites();
    let mut out = v.zeros_like();
    if let QChoice::Zero = q {
        return out;
    }
    let src = v.data().to_vec();
    let dst = out.data_mut();
    for s in 0..sites {
        let y = [x[s / (n * n)], x[(s / n) % n], x[s % n]];
        let r = radius(&y);
        let mag = std::f64::consts::SQRT_2 * mu_hat / r;
        match q {
            QChoice::Scalar(sign) => {
                for c in 0..4 {
                    dst[c * sites + s] = src[c * sites + s] * (sign * mag);
                }
            }
            QChoice::SpinRadial(sign) => {
                let a: Matrix2<C> = (sigma(0) * C::from(y[0]) + sigma(1) * C::from(y[1]) + sigma(2) * C::from(y[2])) * C::from(sign * mag / r);
                for col in 0..2 {
                    let (i0, i1) = (2 * col * sites + s, (2 * col + 1) * sites + s);
                    let (p, q2) = (src[i0], src[i1]);
                    dst[i0] = a[(0, 0)] * p + a[(0, 1)] * q2;
                    dst[i1] = a[(1, 0)] * p + a[(1, 1)] * q2;
                }
            }
            QChoice::Zero => unreachable!(),
        }
    }
    out
}

/// `a = √(μ̂² + ¼)`.
pub fn ha_constant(mu_hat: f64) -> f64 {
    (mu_hat * mu_hat + 0.25).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HaPair {
    /// `‖√2|y|⁻¹v‖`.
    pub lhs: f64,
    /// `‖(H₀₀ + Q)v‖`.
    pub rhs: f64,
    pub a: f64,
    /// `lhs·(1 − a)/rhs`; the inequality holds iff this is at most 1.
    pub ratio: f64,
}

pub fn hardy_ha(v: &Field, q: QChoice, mu_hat: f64) -> Result<HaPair> {
    if !(0.0..COUPLING_LIMIT).contains(&mu_hat) {
        return Err(Error::VacuousBound(mu_hat));
    }
    if v.norm() == 0.0 {
        return Err(Error::ZeroField);
    }
    let grid = *v.grid();
    let r = radii(&grid);
    let inv: Vec<f64> = r.iter().map(|x| std::f64::consts::SQRT_2 / x).collect();
    let lhs = weighted_norm(v, &inv);
    let rhs = h00_operator(grid)?.apply(v)?.add(&apply_q(v, q, mu_hat))?.norm();
    let a = ha_constant(mu_hat);
    Ok(HaPair {
        lhs,
        rhs,
        a,
        ratio: lhs * (1.0 - a) / rhs,
    })
}

/// `1` inside `|y| ≤ L/8`, `0` beyond `L/4`.
fn window(r: f64, box_len: f64) -> f64 {
    1.0 - chi(8.0 * r / box_len)
}

fn random_spinor(rng: &mut impl Rng) -> [C; 4] {
    std::array::from_fn(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

/// Gaussians, Gaussians times angular polynomials, and windowed random
/// band-limited fields, all supported in `|y| < L/4`.
pub fn trial_family(grid: GridSpec, count: usize, seed: u64) -> Vec<Field> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l = grid.box_len;
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let f = match i % 3 {
            0 => {
                let width = rng.gen_range(0.06..0.12) * l;
                let center: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-0.05..0.05) * l);
                let spin = random_spinor(&mut rng);
                Field::from_fn(grid, 3, 4, move |c, x| {
                    let d2 = (0..3).map(|a| (x[a] - center[a]).powi(2)).sum::<f64>();
                    spin[c] * (-(d2) / (2.0 * width * width)).exp() * window(radius(x), l)
                })
            }
            1 => {
                let width = rng.gen_range(0.06..0.1) * l;
                let degree = rng.gen_range(1..=3);
                let dir: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
                let spin = random_spinor(&mut rng);
                let other = random_spinor(&mut rng);
                Field::from_fn(grid, 3, 4, move |c, x| {
                    let r = radius(x);
                    let ang = C::new(x[0], x[1]).powi(degree) / width.powi(degree);
                    let lin = (dir[0] * x[0] + dir[1] * x[1] + dir[2] * x[2]) / width;
                    (spin[c] * ang + other[c] * lin) * (-(r * r) / (2.0 * width * width)).exp() * window(r, l)
                })
            }
            _ => {
                let mut f = Field::band_limited(grid, 3, 4, (grid.points / 8).max(1), &mut rng);
                let w: Vec<f64> = radii(&grid).iter().map(|r| window(*r, l)).collect();
                f.multiply_by(&w);
                f
            }
        };
        out.push(f);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardySpec {
    pub points: usize,
    pub box_len: f64,
    pub family_size: usize,
    pub mu_hats: Vec<f64>,
    pub seed: u64,
}

impl Default for HardySpec {
    fn default() -> Self {
        HardySpec {
            points: 32,
            box_len: 12.0,
            family_size: 100,
            mu_hats: vec![0.0, 0.25, 0.5],
            seed: 7,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HaSummary {
    pub mu_hat: f64,
    pub q: QChoice,
    pub a: Option<f64>,
    pub factor: Option<f64>,
    /// Largest `lhs(1−a)/rhs` over the family; `None` when the bound is vacuous.
    pub worst_ratio: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct HardyReport {
    pub win_ratios: Vec<f64>,
    pub win_min: f64,
    pub ha: Vec<HaSummary>,
}

fn q_choices(mu_hat: f64) -> Vec<QChoice> {
    if mu_hat == 0.0 {
        vec![QChoice::Zero]
    } else {
        vec![QChoice::Scalar(1.0), QChoice::Scalar(-1.0), QChoice::SpinRadial(1.0), QChoice::SpinRadial(-1.0)]
    }
}

pub fn hardy_probe(spec: &HardySpec, win: bool, ha: bool) -> Result<HardyReport> {
    let grid = GridSpec::new(spec.points, spec.box_len)?;
    let family = trial_family(grid, spec.family_size, spec.seed);
    let mut win_ratios = Vec::new();
    if win {
        for f in &family {
            win_ratios.push(hardy_win(f)?);
        }
    }
    let win_min = win_ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut summaries = Vec::new();
    if ha {
        for &mu in &spec.mu_hats {
            for q in q_choices(mu) {
                if mu >= COUPLING_LIMIT || mu < 0.0 {
                    summaries.push(HaSummary {
                        mu_hat: mu,
                        q,
                        a: None,
                        factor: None,
                        worst_ratio: None,
                    });
                    continue;
                }
                let mut worst: f64 = 0.0;
                for f in &family {
                    worst = worst.max(hardy_ha(f, q, mu)?.ratio);
                }
                let a = ha_constant(mu);
                summaries.push(HaSummary {
                    mu_hat: mu,
                    q,
                    a: Some(a),
                    factor: Some(1.0 / (1.0 - a)),
                    worst_ratio: Some(worst),
                });
            }
        }
    }
    Ok(HardyReport {
        win_ratios,
        win_min,
        ha: summaries,
    })
}

impl HardyReport {
    pub fn records(&self) -> Vec<CheckRecord> {
        let mut out = Vec::new();
        if !self.win_ratios.is_empty() {
            out.push(CheckRecord::compare(
                "hardy WIN ratio",
                "|| |y|^{1/2} H00 u || >= || |y|^{-1/2} u ||",
                (1.0 - self.win_min).max(0.0),
                SLACK,
            ));
        }
        for s in &self.ha {
            let name = format!("hardy HA mu = {} ({})", s.mu_hat, s.q.label());
            let anchor = "|| sqrt2 |y|^{-1} v || <= (1-a)^{-1} || (H00 + Q) v ||, a = sqrt(mu^2 + 1/4)";
            match s.worst_ratio {
                Some(w) => out.push(CheckRecord::compare(name, anchor, (w - 1.0).max(0.0), SLACK)),
                None => out.push(CheckRecord::with_status(name, anchor, Status::Vacuous, f64::INFINITY, SLACK)),
            }
        }
        out
    }
}
