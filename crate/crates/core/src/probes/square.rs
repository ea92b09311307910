//! Squared sector operators: `(H₊₊ − m)² = (H₋₋ + m)² = 2|p|² + m²` and
//! `H₀₀² = 2|p|²`, compared against the Fourier-space symbol.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{fourier_multiply, k_squared};
use crate::error::Result;
use crate::field::Field;
use crate::grid::GridSpec;
use crate::hamiltonian::{build_y_operator, h00_operator, PotentialSpec, Sector};
use crate::operator::StructuredOperator;
use crate::report::CheckRecord;

pub const TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, Serialize)]
pub struct SquareReport {
    pub mass: f64,
    pub points: usize,
    pub box_len: f64,
    /// Relative deviations.
    pub plus_plus: f64,
    pub minus_minus: f64,
    pub h00: f64,
}

fn relative(a: &Field, b: &Field) -> Result<f64> {
    Ok(a.sub(b)?.norm() / b.norm().max(f64::MIN_POSITIVE))
}

fn squared(op: &StructuredOperator, x: &Field) -> Result<Field> {
    op.apply(&op.apply(x)?)
}

/// Deviation of `op²` from the Fourier multiplier `2|k|² + m²` on a random field.
pub fn square_deviation(op: &StructuredOperator, mass: f64, seed: u64) -> Result<f64> {
    let grid = *op.grid();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = Field::random(grid, 3, op.ncomp(), &mut rng);
    let symbol: Vec<f64> = k_squared(&grid).iter().map(|k| 2.0 * k + mass * mass).collect();
    relative(&squared(op, &x)?, &fourier_multiply(&x, &symbol))
}

pub fn square_identity_check(mass: f64, grid: GridSpec, seed: u64) -> Result<SquareReport> {
    let free = PotentialSpec::free();
    let y2 = [1.0, 0.0, 0.0];
    let pp = build_y_operator(grid, &free, mass, y2, Sector::PlusPlus)?.shifted(-mass);
    let mm = build_y_operator(grid, &free, mass, y2, Sector::MinusMinus)?.shifted(mass);
    Ok(SquareReport {
        mass,
        points: grid.points,
        box_len: grid.box_len,
        plus_plus: square_deviation(&pp, mass, seed)?,
        minus_minus: square_deviation(&mm, mass, seed.wrapping_add(1))?,
        h00: square_deviation(&h00_operator(grid)?, 0.0, seed.wrapping_add(2))?,
    })
}

impl SquareReport {
    pub fn records(&self) -> Vec<CheckRecord> {
        vec![
            CheckRecord::compare("(H++ - m)^2 = 2|p|^2 + m^2", "(H_{++} - m I_8)^2 = (|p|^2 + m^2) I_8", self.plus_plus, TOLERANCE),
            CheckRecord::compare("(H-- + m)^2 = 2|p|^2 + m^2", "(H_{--} + m I_8)^2 = (|p|^2 + m^2) I_8", self.minus_minus, TOLERANCE),
            CheckRecord::compare("H00^2 = 2|p|^2", "H_00^2 = 2 |p|^2 I_4", self.h00, TOLERANCE),
        ]
    }
}

/// `e^{ik·y}` times a spinor, `k` given as lattice mode indices.
pub fn plane_wave(grid: GridSpec, ncomp: usize, modes: [i64; 3], spinor: &[Complex64]) -> Field {
    let unit = 2.0 * std::f64::consts::PI / grid.box_len;
    let spinor = spinor.to_vec();
    Field::from_fn(grid, 3, ncomp, move |c, x| {
        let phase: f64 = (0..3).map(|a| modes[a] as f64 * unit * x[a]).sum();
        spinor[c] * Complex64::from_polar(1.0, phase)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identities_hold_on_random_fields() {
        let r = square_identity_check(1.0, GridSpec::new(12, 7.0).unwrap(), 5).unwrap();
        for rec in r.records() {
            assert!(rec.passed(), "{rec:?}");
        }
    }

    #[test]
    fn massless_plus_plus_on_a_plane_wave() {
        let grid = GridSpec::new(8, 5.0).unwrap();
        let op = build_y_operator(grid, &PotentialSpec::free(), 0.0, [0.0, 1.0, 0.0], Sector::PlusPlus).unwrap();
        let spin: Vec<Complex64> = (0..8).map(|c| Complex64::new(c as f64, 1.0 - c as f64)).collect();
        let modes = [1, -2, 3];
        let x = plane_wave(grid, 8, modes, &spin);
        let y = squared(&op, &x).unwrap();
        let unit = 2.0 * std::f64::consts::PI / grid.box_len;
        let k2: f64 = modes.iter().map(|q| (*q as f64 * unit).powi(2)).sum();
        let want = x.scaled(Complex64::from(2.0 * k2));
        assert!(relative(&y, &want).unwrap() < 1e-12);
    }

    #[test]
    fn perturbed_mass_breaks_the_identity() {
        let grid = GridSpec::new(8, 5.0).unwrap();
        let op = build_y_operator(grid, &PotentialSpec::free(), 1.0, [1.0, 0.0, 0.0], Sector::PlusPlus)
            .unwrap()
            .shifted(-0.9);
        assert!(square_deviation(&op, 1.0, 0).unwrap() > 1e-3);
    }
}
