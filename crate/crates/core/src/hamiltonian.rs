//! The two-body Dirac–Coulomb operator, its plus/minus forms, Coulomb
//! multipliers and the relative-coordinate (y-frame) operators.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::antisym::{TwoBodyField, NCOMP, NDIM};
use crate::clifford::{sigma, Vec3};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::{chi, GridSpec, Regularization};
use crate::operator::{Factor, SpinAction, StructuredOperator, Term};

/// Routing of `h₂ = I₂⊗(σ·p₂)`: `ψ₁₁↔ψ₁₂`, `ψ₂₁↔ψ₂₂`.
pub const H2_ROUTE: [(usize, usize, f64); 4] = [(0, 1, 1.0), (1, 0, 1.0), (2, 3, 1.0), (3, 2, 1.0)];
/// Routing of `h₁ = (σ·p₁)⊗I₂`: `ψ₁₁↔ψ₂₁`, `ψ₁₂↔ψ₂₂`.
pub const H1_ROUTE: [(usize, usize, f64); 4] = [(0, 2, 1.0), (2, 0, 1.0), (1, 3, 1.0), (3, 1, 1.0)];
const ALL_BLOCKS: [(usize, usize, f64); 4] = [(0, 0, 1.0), (1, 1, 1.0), (2, 2, 1.0), (3, 3, 1.0)];

/// `√3/2`, the coupling bound `|k| <` under which the operator is studied.
pub const COUPLING_LIMIT: f64 = 0.866_025_403_784_438_6;

/// Coulomb couplings: `k/|x_j|` for each particle and `k₀/|x₁−x₂|`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub k: f64,
    pub k0: f64,
}

impl PotentialSpec {
    pub fn new(k: f64, k0: f64) -> Self {
        PotentialSpec { k, k0 }
    }

    pub fn free() -> Self {
        Self::default()
    }

    /// `|k| < √3/2`.
    pub fn in_coupling_limit(&self) -> bool {
        self.k.abs() < COUPLING_LIMIT
    }

    pub fn is_free(&self) -> bool {
        self.k == 0.0 && self.k0 == 0.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CoulombTerm {
    /// `k/|x₁|` on the 6D grid.
    OneBody1,
    /// `k/|x₂|` on the 6D grid.
    OneBody2,
    /// `k₀/|x₁−x₂|` on the 6D grid, regularized.
    Interaction,
    /// `√2k/|y₁+y₂| + √2k/|y₁−y₂|` on the 3D `y₁` grid.
    YFrame { y2: Vec3 },
}

/// `1/r` for a one-centre term. Samples closer than half a cell to the centre
/// are clamped at `2/h`; a cap policy clamps at its own value instead.
fn one_body_inverse(r: f64, grid: &GridSpec) -> f64 {
    match grid.regularization {
        Regularization::Cap { value } => (1.0 / r).min(value),
        Regularization::Bn { .. } => 1.0 / r.max(0.5 * grid.spacing()),
    }
}

/// Regularized `1/|x₁−x₂|`: multiplied by `χ(n d)²`, or clamped.
pub fn interaction_inverse(d: f64, reg: Regularization) -> f64 {
    match reg {
        Regularization::Bn { n } => {
            let c = chi(n as f64 * d);
            if c == 0.0 {
                0.0
            } else {
                c * c / d
            }
        }
        Regularization::Cap { value } => {
            if d == 0.0 {
                value
            } else {
                (1.0 / d).min(value)
            }
        }
    }
}

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Samples one Coulomb term on the grid.
pub fn coulomb_field(pot: &PotentialSpec, grid: &GridSpec, which: CoulombTerm) -> Result<Vec<f64>> {
    let x = grid.coords();
    let n = grid.points;
    match which {
        CoulombTerm::OneBody1 | CoulombTerm::OneBody2 => {
            let s3 = grid.sites(3);
            let radial = one_body_field(pot.k, grid);
            let first = matches!(which, CoulombTerm::OneBody1);
            Ok((0..s3 * s3)
                .into_par_iter()
                .map(|s| if first { radial[s / s3] } else { radial[s % s3] })
                .collect())
        }
        CoulombTerm::Interaction => {
            let s3 = grid.sites(3);
            let reg = grid.regularization;
            let pos = |s: usize| [x[s / (n * n)], x[(s / n) % n], x[s % n]];
            Ok((0..s3 * s3)
                .into_par_iter()
                .map(|s| {
                    let (a, b) = (pos(s / s3), pos(s % s3));
                    let d = norm3([
                        grid.min_image(a[0] - b[0]),
                        grid.min_image(a[1] - b[1]),
                        grid.min_image(a[2] - b[2]),
                    ]);
                    pot.k0 * interaction_inverse(d, reg)
                })
                .collect())
        }
        CoulombTerm::YFrame { y2 } => {
            if norm3(y2) == 0.0 {
                return Err(Error::CoincidentSingularity);
            }
            let c = std::f64::consts::SQRT_2 * pot.k;
            let plus = centred_coulomb_field(c, [-y2[0], -y2[1], -y2[2]], grid);
            let minus = centred_coulomb_field(c, y2, grid);
            Ok(plus.iter().zip(&minus).map(|(a, b)| a + b).collect())
        }
    }
}

/// `k/|x|` on the 3D grid, regularized exactly as the one-body terms of the
/// two-body potential.
pub fn one_body_field(k: f64, grid: &GridSpec) -> Vec<f64> {
    let x = grid.coords();
    let n = grid.points;
    (0..grid.sites(3))
        .into_par_iter()
        .map(|s| k * one_body_inverse(norm3([x[s / (n * n)], x[(s / n) % n], x[s % n]]), grid))
        .collect()
}

/// `k/|x − centre|` on the 3D grid with the one-body regularization.
pub fn centred_coulomb_field(k: f64, centre: Vec3, grid: &GridSpec) -> Vec<f64> {
    let x = grid.coords();
    let n = grid.points;
    (0..grid.sites(3))
        .into_par_iter()
        .map(|s| {
            let d = [x[s / (n * n)] - centre[0], x[(s / n) % n] - centre[1], x[s % n] - centre[2]];
            k * one_body_inverse(norm3(d), grid)
        })
        .collect()
}

/// One-particle `α·p + mβ + k/|x|` on 4-component fields over the 3D grid.
pub fn dirac_operator(grid: GridSpec, m: f64, k: f64) -> Result<StructuredOperator> {
    let rep = crate::clifford::standard_dirac_rep();
    let mut op = StructuredOperator::new(grid, 3, 1, 4);
    for a in 0..3 {
        let alpha = crate::clifford::to_dmatrix(&rep.alpha_f(a));
        op.push(Term::new(1.0, &[(0, 0, 1.0)], SpinAction::Dense(alpha), Factor::Momentum(a)))?;
    }
    if m != 0.0 {
        let beta = crate::clifford::to_dmatrix(&rep.beta_f());
        op.push(Term::new(m, &[(0, 0, 1.0)], SpinAction::Dense(beta), Factor::Identity))?;
    }
    if k != 0.0 {
        let v = Arc::new(one_body_field(k, &grid));
        op.push(Term::new(1.0, &[(0, 0, 1.0)], SpinAction::Identity(4), Factor::Multiplier(v)))?;
    }
    Ok(op)
}

/// `V(x₁,x₂) = k/|x₁| + k/|x₂| + k₀/|x₁−x₂|`.
pub fn two_body_potential(pot: &PotentialSpec, grid: &GridSpec) -> Result<Vec<f64>> {
    let mut v = vec![0.0; grid.sites(NDIM)];
    if pot.k != 0.0 {
        for term in [CoulombTerm::OneBody1, CoulombTerm::OneBody2] {
            let w = coulomb_field(pot, grid, term)?;
            v.par_iter_mut().zip(&w).for_each(|(a, b)| *a += b);
        }
    }
    if pot.k0 != 0.0 {
        let w = coulomb_field(pot, grid, CoulombTerm::Interaction)?;
        v.par_iter_mut().zip(&w).for_each(|(a, b)| *a += b);
    }
    Ok(v)
}

fn push_potential(op: &mut StructuredOperator, pot: &PotentialSpec, grid: &GridSpec) -> Result<()> {
    if pot.is_free() {
        return Ok(());
    }
    let v = Arc::new(two_body_potential(pot, grid)?);
    op.push(Term::new(1.0, &ALL_BLOCKS, SpinAction::Identity(4), Factor::Multiplier(v)))
}

fn push_mass(op: &mut StructuredOperator, m: f64) -> Result<()> {
    if m != 0.0 {
        op.push(Term::new(2.0 * m, &[(0, 0, 1.0), (3, 3, -1.0)], SpinAction::Identity(4), Factor::Identity))?;
    }
    Ok(())
}

/// `h₂ = I₂⊗(σ·p₂)` routed as in the full operator.
pub fn h2_operator(grid: GridSpec, route: &[(usize, usize, f64)], coefficient: f64) -> Result<StructuredOperator> {
    let mut op = StructuredOperator::new(grid, NDIM, 4, 4);
    for a in 0..3 {
        op.push(Term::new(coefficient, route, SpinAction::Left(sigma(a)), Factor::Momentum(3 + a)))?;
    }
    Ok(op)
}

/// `h₁ = (σ·p₁)⊗I₂` routed as in the full operator.
pub fn h1_operator(grid: GridSpec, route: &[(usize, usize, f64)], coefficient: f64) -> Result<StructuredOperator> {
    let mut op = StructuredOperator::new(grid, NDIM, 4, 4);
    for a in 0..3 {
        op.push(Term::new(coefficient, route, SpinAction::RightTranspose(sigma(a)), Factor::Momentum(a)))?;
    }
    Ok(op)
}

/// The full operator
/// `[[2m+V, h₂, h₁, 0], [h₂, V, 0, h₁], [h₁, 0, V, h₂], [0, h₁, h₂, V−2m]]`.
pub fn hdc_operator(grid: GridSpec, pot: &PotentialSpec, m: f64) -> Result<StructuredOperator> {
    let mut op = h2_operator(grid, &H2_ROUTE, 1.0)?.plus(&h1_operator(grid, &H1_ROUTE, 1.0)?)?;
    push_mass(&mut op, m)?;
    push_potential(&mut op, pot, &grid)?;
    Ok(op)
}

/// Which first-order coupling the plus/minus forms use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormCoupling {
    /// `h₁₂ = I₂⊗σ·(p₁+p₂)` and `h₂₁ = σ·(p₁+p₂)⊗I₂`.
    TotalMomentum,
    /// `h₁₂ = 2·I₂⊗(σ·p₂)` and `h₂₁ = 2·(σ·p₁)⊗I₂`: the exchange-folded
    /// couplings for which form equality on antisymmetric states holds.
    ExchangeFolded,
}

/// `[[V+2m, h₁₂, 0, 0], [h₁₂, V, 0, 0], [0, 0, V, h₁₂], [0, 0, h₁₂, V−2m]]`.
pub fn hdc_plus_operator(grid: GridSpec, pot: &PotentialSpec, m: f64, coupling: FormCoupling) -> Result<StructuredOperator> {
    let mut op = match coupling {
        FormCoupling::TotalMomentum => {
            let mut op = h2_operator(grid, &H2_ROUTE, 1.0)?;
            for a in 0..3 {
                op.push(Term::new(1.0, &H2_ROUTE, SpinAction::Left(sigma(a)), Factor::Momentum(a)))?;
            }
            op
        }
        FormCoupling::ExchangeFolded => h2_operator(grid, &H2_ROUTE, 2.0)?,
    };
    push_mass(&mut op, m)?;
    push_potential(&mut op, pot, &grid)?;
    Ok(op)
}

/// `[[V+2m, 0, h₂₁, 0], [0, V, 0, h₂₁], [h₂₁, 0, V, 0], [0, h₂₁, 0, V−2m]]`.
pub fn hdc_minus_operator(grid: GridSpec, pot: &PotentialSpec, m: f64, coupling: FormCoupling) -> Result<StructuredOperator> {
    let mut op = match coupling {
        FormCoupling::TotalMomentum => {
            let mut op = h1_operator(grid, &H1_ROUTE, 1.0)?;
            for a in 0..3 {
                op.push(Term::new(1.0, &H1_ROUTE, SpinAction::RightTranspose(sigma(a)), Factor::Momentum(3 + a)))?;
            }
            op
        }
        FormCoupling::ExchangeFolded => h1_operator(grid, &H1_ROUTE, 2.0)?,
    };
    push_mass(&mut op, m)?;
    push_potential(&mut op, pot, &grid)?;
    Ok(op)
}

/// `p⃗₁ψ·ᵗσ` on a single 4-component block over the 6D grid.
pub fn apply_h1(block: &Field) -> Result<Field> {
    crate::antisym::block_sigma_p(*block.grid(), crate::antisym::BlockSide::First, 1)?.apply(block)
}

/// `σ·p⃗₂ ψ` on a single 4-component block over the 6D grid.
pub fn apply_h2(block: &Field) -> Result<Field> {
    crate::antisym::block_sigma_p(*block.grid(), crate::antisym::BlockSide::Second, 2)?.apply(block)
}

pub fn apply_hdc(psi: &TwoBodyField, pot: &PotentialSpec, m: f64) -> Result<TwoBodyField> {
    let op = hdc_operator(*psi.grid(), pot, m)?;
    TwoBodyField::from_field(op.apply(psi.field())?)
}

pub fn apply_hdc_plus(psi: &TwoBodyField, pot: &PotentialSpec, m: f64, coupling: FormCoupling) -> Result<TwoBodyField> {
    let op = hdc_plus_operator(*psi.grid(), pot, m, coupling)?;
    TwoBodyField::from_field(op.apply(psi.field())?)
}

pub fn apply_hdc_minus(psi: &TwoBodyField, pot: &PotentialSpec, m: f64, coupling: FormCoupling) -> Result<TwoBodyField> {
    let op = hdc_minus_operator(*psi.grid(), pot, m, coupling)?;
    TwoBodyField::from_field(op.apply(psi.field())?)
}

/// Block subspace of the y-frame operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sector {
    /// All sixteen components.
    Full,
    /// `H₊₊ = [[H₀₀+m, m], [m, −H₀₀+m]]`.
    PlusPlus,
    /// `H₋₋ = [[H₀₀−m, −m], [−m, −H₀₀−m]]`.
    MinusMinus,
}

impl Sector {
    /// Open spectral gap `(lo, hi)` of the free sector operator.
    pub fn gap(&self, m: f64) -> (f64, f64) {
        match self {
            Sector::PlusPlus => (0.0, 2.0 * m),
            Sector::MinusMinus => (-2.0 * m, 0.0),
            Sector::Full => (-2.0 * m, 2.0 * m),
        }
    }
}

/// `H₀₀ = √2·I₂⊗(σ·p)` on 4-component fields over the 3D `y₁` grid.
pub fn h00_operator(grid: GridSpec) -> Result<StructuredOperator> {
    let mut op = StructuredOperator::new(grid, 3, 1, 4);
    for a in 0..3 {
        op.push(Term::new(std::f64::consts::SQRT_2, &[(0, 0, 1.0)], SpinAction::Left(sigma(a)), Factor::Momentum(a)))?;
    }
    Ok(op)
}

/// The relative-coordinate operator
/// `diag(H₀₀, −H₀₀, H₀₀, −H₀₀) + m[[I,I,0,0],[I,I,0,0],[0,0,−I,−I],[0,0,−I,−I]] + V_{y₂}`
/// acting in `y₁`, or one of its two invariant 8-component sectors.
pub fn build_y_operator(grid: GridSpec, pot: &PotentialSpec, m: f64, y2: Vec3, sector: Sector) -> Result<StructuredOperator> {
    y_operator(grid, pot, m, y2, sector, false)
}

/// [`build_y_operator`] without the spectator spin: blocks are 2-spinors and
/// `H₀₀` becomes `√2σ·p`. Every eigenvalue of the full operator is an
/// eigenvalue of this one with doubled multiplicity.
pub fn build_y_operator_reduced(grid: GridSpec, pot: &PotentialSpec, m: f64, y2: Vec3, sector: Sector) -> Result<StructuredOperator> {
    y_operator(grid, pot, m, y2, sector, true)
}

fn y_operator(grid: GridSpec, pot: &PotentialSpec, m: f64, y2: Vec3, sector: Sector, reduced: bool) -> Result<StructuredOperator> {
    if norm3(y2) == 0.0 {
        return Err(Error::CoincidentSingularity);
    }
    let (nblocks, signs, mass_sign): (usize, &[f64], &[f64]) = match sector {
        Sector::Full => (4, &[1.0, -1.0, 1.0, -1.0], &[1.0, -1.0]),
        Sector::PlusPlus => (2, &[1.0, -1.0], &[1.0]),
        Sector::MinusMinus => (2, &[1.0, -1.0], &[-1.0]),
    };
    let bs = if reduced { 2 } else { 4 };
    let mut op = StructuredOperator::new(grid, 3, nblocks, bs);
    let h00_route: Vec<_> = signs.iter().enumerate().map(|(b, s)| (b, b, *s)).collect();
    for a in 0..3 {
        let spin = if reduced {
            SpinAction::Dense(crate::clifford::to_dmatrix(&sigma(a)))
        } else {
            SpinAction::Left(sigma(a))
        };
        op.push(Term::new(std::f64::consts::SQRT_2, &h00_route, spin, Factor::Momentum(a)))?;
    }
    let mut mass_route = Vec::new();
    for (pair, s) in mass_sign.iter().enumerate() {
        let (b0, b1) = (2 * pair, 2 * pair + 1);
        for (o, i) in [(b0, b0), (b0, b1), (b1, b0), (b1, b1)] {
            mass_route.push((o, i, *s));
        }
    }
    if m != 0.0 {
        op.push(Term::new(m, &mass_route, SpinAction::Identity(bs), Factor::Identity))?;
    }
    if pot.k != 0.0 {
        let v = coulomb_field(pot, &grid, CoulombTerm::YFrame { y2 })?;
        let all: Vec<_> = (0..nblocks).map(|b| (b, b, 1.0)).collect();
        op.push(Term::new(1.0, &all, SpinAction::Identity(bs), Factor::Multiplier(Arc::new(v))))?;
    }
    Ok(op)
}

/// `k₀/(√2|y₂|)`, the interaction in relative coordinates.
pub fn interaction_shift(k0: f64, y2: Vec3) -> Result<f64> {
    let r = norm3(y2);
    if r == 0.0 {
        return Err(Error::CoincidentSingularity);
    }
    Ok(k0 / (std::f64::consts::SQRT_2 * r))
}

/// Shape of a two-body operator's field space.
pub fn two_body_shape() -> (usize, usize) {
    (NDIM, NCOMP)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::antisym::{antisymmetrize, exchange};
    use crate::kron::two_body_free_symbol;
    use crate::operator::build_dense;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rel(a: &Field, b: &Field) -> f64 {
        a.sub(b).unwrap().norm() / b.norm().max(1e-300)
    }

    #[test]
    fn interaction_cutoff_profile() {
        let reg = Regularization::Bn { n: 4 };
        assert_eq!(interaction_inverse(0.2, reg), 0.0);
        assert_eq!(interaction_inverse(0.25, reg), 0.0);
        assert_eq!(interaction_inverse(0.5, reg), 2.0);
        assert_eq!(interaction_inverse(1.0, reg), 1.0);
        assert_eq!(interaction_inverse(0.0, Regularization::Cap { value: 7.0 }), 7.0);
    }

    #[test]
    fn coulomb_fields_are_finite_and_swap_symmetric() {
        let grid = GridSpec::new(4, 5.0).unwrap();
        let pot = PotentialSpec::new(-0.5, 1.0);
        let v = two_body_potential(&pot, &grid).unwrap();
        assert!(v.iter().all(|x| x.is_finite()));
        let s3 = grid.sites(3);
        for s in 0..v.len() {
            assert_eq!(v[s], v[crate::antisym::swap_site(s, s3)]);
        }
        let y = coulomb_field(&pot, &grid, CoulombTerm::YFrame { y2: [0.3, 0.1, 0.7] }).unwrap();
        let n = grid.points;
        for s in 0..y.len() {
            let (i, j, k) = (s / (n * n), (s / n) % n, s % n);
            let mirror = ((n - 1 - i) * n + (n - 1 - j)) * n + (n - 1 - k);
            assert!((y[s] - y[mirror]).abs() < 1e-13 * y[s].abs());
        }
        assert!(matches!(
            coulomb_field(&pot, &grid, CoulombTerm::YFrame { y2: [0.0; 3] }),
            Err(Error::CoincidentSingularity)
        ));
    }

    #[test]
    fn free_operator_acts_by_its_symbol_on_plane_waves() {
        let grid = GridSpec::new(4, 6.0).unwrap();
        let m = 0.7;
        let unit = 2.0 * std::f64::consts::PI / 6.0;
        let (q1, q2) = ([1.0, 0.0, -1.0], [0.0, 1.0, 1.0]);
        let xi1 = q1.map(|q| q * unit);
        let xi2 = q2.map(|q| q * unit);
        let sym = two_body_free_symbol(xi1, xi2, m).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let amp: Vec<Complex64> = (0..16).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        use rand::Rng;
        let wave = |x: &[f64]| {
            let ph = (0..3).map(|a| xi1[a] * x[a] + xi2[a] * x[3 + a]).sum::<f64>();
            Complex64::from_polar(1.0, ph)
        };
        let psi = Field::from_fn(grid, 6, 16, |c, x| amp[c] * wave(x));
        let out = hdc_operator(grid, &PotentialSpec::free(), m).unwrap().apply(&psi).unwrap();
        let want_amp: Vec<Complex64> = (0..16).map(|i| (0..16).map(|j| sym.blocks[(i, j)] * amp[j]).sum()).collect();
        let want = Field::from_fn(grid, 6, 16, |c, x| want_amp[c] * wave(x));
        assert!(rel(&out, &want) < 1e-12);
    }

    #[test]
    fn h1_h1_is_the_laplacian_on_plane_waves() {
        let grid = GridSpec::new(4, 6.0).unwrap();
        let xi = [1.0, -1.0, 1.0].map(|q: f64| q * 2.0 * std::f64::consts::PI / 6.0);
        let block = Field::from_fn(grid, 6, 4, |c, x| {
            Complex64::from_polar(1.0 + c as f64, xi[0] * x[0] + xi[1] * x[1] + xi[2] * x[2])
        });
        let twice = apply_h1(&apply_h1(&block).unwrap()).unwrap();
        let k2 = xi.iter().map(|v| v * v).sum::<f64>();
        assert!(rel(&twice, &block.scaled(Complex64::from(k2))) < 1e-12);
        let twice2 = apply_h2(&apply_h2(&block).unwrap()).unwrap();
        assert!(twice2.norm() < 1e-12 * block.norm());
    }

    #[test]
    fn dense_matches_matrix_free_at_n2() {
        let grid = GridSpec::new(2, 4.0).unwrap();
        let op = hdc_operator(grid, &PotentialSpec::new(-0.5, 1.0), 1.0).unwrap();
        let dense = build_dense(&op).unwrap();
        assert_eq!(dense.nrows(), 1024);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..3 {
            let x = Field::random(grid, 6, 16, &mut rng);
            let y = op.apply(&x).unwrap();
            let yd = &dense * nalgebra::DVector::from_column_slice(x.data());
            let err = yd.iter().zip(y.data()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
            assert!(err <= 1e-12 * yd.norm());
        }
    }

    #[test]
    fn hdc_commutes_with_exchange() {
        let grid = GridSpec::new(4, 6.0).unwrap();
        let pot = PotentialSpec::new(-0.4, 0.8);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let psi = TwoBodyField::band_limited(grid, 1, &mut rng);
        let a = apply_hdc(&exchange(&psi), &pot, 1.0).unwrap();
        let b = exchange(&apply_hdc(&psi, &pot, 1.0).unwrap());
        assert!(rel(a.field(), b.field()) < 1e-12);
        let anti = antisymmetrize(&psi);
        let h = apply_hdc(&anti, &pot, 1.0).unwrap();
        assert!(rel(antisymmetrize(&h).field(), h.field()) < 1e-12);
    }

    #[test]
    fn y_operator_sectors_embed_in_the_full_operator() {
        let grid = GridSpec::new(4, 6.0).unwrap();
        let pot = PotentialSpec::new(-0.5, 0.0);
        let y2 = [0.2, 0.0, 0.9];
        let full = build_y_operator(grid, &pot, 1.0, y2, Sector::Full).unwrap();
        let pp = build_y_operator(grid, &pot, 1.0, y2, Sector::PlusPlus).unwrap();
        let mm = build_y_operator(grid, &pot, 1.0, y2, Sector::MinusMinus).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x = Field::random(grid, 3, 16, &mut rng);
        let y = full.apply(&x).unwrap();
        let s = grid.sites(3);
        let top = Field::from_vec(grid, 3, 8, x.data()[..8 * s].to_vec()).unwrap();
        let bottom = Field::from_vec(grid, 3, 8, x.data()[8 * s..].to_vec()).unwrap();
        let yt = pp.apply(&top).unwrap();
        let yb = mm.apply(&bottom).unwrap();
        assert_eq!(&y.data()[..8 * s], yt.data());
        assert_eq!(&y.data()[8 * s..], yb.data());
        assert!(matches!(build_y_operator(grid, &pot, 1.0, [0.0; 3], Sector::Full), Err(Error::CoincidentSingularity)));
    }

    #[test]
    fn reduced_sector_is_the_full_sector_on_each_spectator_spin() {
        let grid = GridSpec::new(4, 6.0).unwrap();
        let pot = PotentialSpec::new(-0.5, 0.0);
        let y2 = [0.1, 0.3, 0.8];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for sector in [Sector::Full, Sector::PlusPlus, Sector::MinusMinus] {
            let full = build_y_operator(grid, &pot, 1.0, y2, sector).unwrap();
            let red = build_y_operator_reduced(grid, &pot, 1.0, y2, sector).unwrap();
            let nb = red.nblocks();
            let x = Field::random(grid, 3, 2 * nb, &mut rng);
            let y = red.apply(&x).unwrap();
            // Block component 2·s₁ + s₂ with s₁ the spectator.
            for s1 in 0..2 {
                let mut embed = Field::zeros(grid, 3, 4 * nb);
                let sites = grid.sites(3);
                for b in 0..nb {
                    for s2 in 0..2 {
                        let dst = (4 * b + 2 * s1 + s2) * sites;
                        embed.data_mut()[dst..dst + sites].copy_from_slice(x.component(2 * b + s2));
                    }
                }
                let got = full.apply(&embed).unwrap();
                for b in 0..nb {
                    for s2 in 0..2 {
                        let c = 4 * b + 2 * s1 + s2;
                        let diff = got.component(c).iter().zip(y.component(2 * b + s2)).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
                        assert!(diff < 1e-13, "{diff}");
                        assert!(got.component(4 * b + 2 * (1 - s1) + s2).iter().all(|z| z.norm() == 0.0));
                    }
                }
            }
        }
    }

    #[test]
    fn plus_plus_symbol_eigenvalues() {
        let grid = GridSpec::new(2, 3.0).unwrap();
        let m = 1.0;
        let op = build_y_operator(grid, &PotentialSpec::free(), m, [0.0, 0.0, 1.0], Sector::PlusPlus).unwrap();
        let dense = build_dense(&op).unwrap();
        let eig = nalgebra::linalg::SymmetricEigen::new(dense);
        let k = grid.wavenumbers();
        let mut want = Vec::new();
        for a in &k {
            for b in &k {
                for c in &k {
                    let p2 = a * a + b * b + c * c;
                    let e = (2.0 * p2 + m * m).sqrt();
                    want.extend([m + e; 4]);
                    want.extend([m - e; 4]);
                }
            }
        }
        want.sort_by(f64::total_cmp);
        let mut got: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        got.sort_by(f64::total_cmp);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-10);
        }
    }
}
