//! Two-body fields in 2×2-block form, particle exchange and antisymmetry.
//!
//! A two-body state has four blocks `ψ₁₁, ψ₁₂, ψ₂₁, ψ₂₂` (large/small labels
//! of particle 1 then particle 2). Each block is a 2×2-matrix-valued function
//! of `(x₁, x₂)` whose entry `[s₂][s₁]` carries the two spins; it is stored as
//! the four components `vec(ψ_jk)`. See [`crate::kron`] for the index maps.
//!
//! Chemists' ordering lists the sixteen components as functions on
//! `(R³ × {↑,↓})²` with spin-orbital labels `(ℓ₁ s₁, ℓ₂ s₂)`. The bijection to
//! the layout used here is `(ℓ₁, s₁, ℓ₂, s₂) ↦ 4·(2ℓ₁+ℓ₂) + 2s₁ + s₂` and is
//! not materialized as a second storage layout.

use nalgebra::{Matrix2, Vector4};
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::GridSpec;
use crate::kron::{block_index, vec};
use crate::operator::{Factor, SpinAction, StructuredOperator, Term};

pub const NDIM: usize = 6;
pub const NCOMP: usize = 16;

/// Component index of entry `[row][col]` of block `(j, k)` (zero-based).
pub fn component(j: usize, k: usize, row: usize, col: usize) -> usize {
    4 * (2 * j + k) + 2 * col + row
}

/// Sixteen-component field over a 6D grid; particle-1 axes come first.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoBodyField {
    field: Field,
}

impl TwoBodyField {
    pub fn zeros(grid: GridSpec) -> Self {
        TwoBodyField {
            field: Field::zeros(grid, NDIM, NCOMP),
        }
    }

    pub fn from_field(field: Field) -> Result<Self> {
        if field.ndim() != NDIM || field.ncomp() != NCOMP {
            return Err(Error::GridMismatch(format!(
                "two-body fields have 16 components over 6 axes, got {} over {}",
                field.ncomp(),
                field.ndim()
            )));
        }
        Ok(TwoBodyField { field })
    }

    pub fn random(grid: GridSpec, rng: &mut impl Rng) -> Self {
        TwoBodyField {
            field: Field::random(grid, NDIM, NCOMP, rng),
        }
    }

    pub fn band_limited(grid: GridSpec, max_mode: usize, rng: &mut impl Rng) -> Self {
        TwoBodyField {
            field: Field::band_limited(grid, NDIM, NCOMP, max_mode, rng),
        }
    }

    /// `F ⊗ G` for one-particle 4-spinor fields `F(x₁)`, `G(x₂)` on the same 3D grid.
    pub fn product(f: &Field, g: &Field) -> Result<Self> {
        if f.ndim() != 3 || f.ncomp() != 4 {
            return Err(Error::GridMismatch("product factors must be 4-component 3D fields".into()));
        }
        f.check_compatible(g)?;
        let grid = *f.grid();
        let s3 = grid.sites(3);
        let mut out = Field::zeros(grid, NDIM, NCOMP);
        let s6 = s3 * s3;
        out.data_mut().par_chunks_mut(s6).enumerate().for_each(|(c, comp)| {
            let (l1, s1, l2, s2) = labels(c);
            let a = f.component(2 * l1 + s1);
            let b = g.component(2 * l2 + s2);
            for (i, v) in comp.iter_mut().enumerate() {
                *v = a[i / s3] * b[i % s3];
            }
        });
        Ok(TwoBodyField { field: out })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn field_mut(&mut self) -> &mut Field {
        &mut self.field
    }

    pub fn into_field(self) -> Field {
        self.field
    }

    pub fn grid(&self) -> &GridSpec {
        self.field.grid()
    }

    pub fn sites(&self) -> usize {
        self.field.sites()
    }

    /// Block `ψ_{j+1,k+1}` at `site` as a 2×2 matrix.
    pub fn block(&self, j: usize, k: usize, site: usize) -> Matrix2<Complex64> {
        let c = |r, col| self.field.component(component(j, k, r, col))[site];
        Matrix2::new(c(0, 0), c(0, 1), c(1, 0), c(1, 1))
    }

    pub fn set_block(&mut self, j: usize, k: usize, site: usize, m: &Matrix2<Complex64>) {
        let v: Vector4<Complex64> = vec(m);
        for (i, x) in v.iter().enumerate() {
            self.field.component_mut(4 * (2 * j + k) + i)[site] = *x;
        }
    }

    /// `vec ψ_{j+1,k+1}` as a 4-component field over the 6D grid.
    pub fn block_field(&self, j: usize, k: usize) -> Field {
        let s = self.sites();
        let b = 2 * j + k;
        let data = self.field.data()[4 * b * s..4 * (b + 1) * s].to_vec();
        Field::from_vec(*self.grid(), NDIM, 4, data).expect("block slice has the right length")
    }

    pub fn inner(&self, other: &TwoBodyField) -> Result<Complex64> {
        self.field.inner(&other.field)
    }

    pub fn norm(&self) -> f64 {
        self.field.norm()
    }
}

/// `(ℓ₁, s₁, ℓ₂, s₂)` of a block-order component index.
pub fn labels(c: usize) -> (usize, usize, usize, usize) {
    let block = c / 4;
    let within = c % 4;
    (block / 2, within / 2, block % 2, within % 2)
}

/// Site index with the two particles' coordinates swapped.
pub fn swap_site(site: usize, sites3: usize) -> usize {
    (site % sites3) * sites3 + site / sites3
}

/// `(ΠΨ)_{jk}(x₁, x₂) = ᵗψ_{kj}(x₂, x₁)`.
pub fn exchange(psi: &TwoBodyField) -> TwoBodyField {
    let grid = *psi.grid();
    let s3 = grid.sites(3);
    let s6 = s3 * s3;
    let src = psi.field.data();
    let mut out = Field::zeros(grid, NDIM, NCOMP);
    out.data_mut().par_chunks_mut(s6).enumerate().for_each(|(c, comp)| {
        let (l1, s1, l2, s2) = labels(c);
        let from = block_index(l2, s2, l1, s1);
        let a = &src[from * s6..(from + 1) * s6];
        for (site, v) in comp.iter_mut().enumerate() {
            *v = a[swap_site(site, s3)];
        }
    });
    TwoBodyField { field: out }
}

/// `(Ψ − ΠΨ)/2`.
pub fn antisymmetrize(psi: &TwoBodyField) -> TwoBodyField {
    combine(psi, -1.0)
}

/// `(Ψ + ΠΨ)/2`.
pub fn symmetrize(psi: &TwoBodyField) -> TwoBodyField {
    combine(psi, 1.0)
}

fn combine(psi: &TwoBodyField, sign: f64) -> TwoBodyField {
    let ex = exchange(psi);
    let data = psi
        .field
        .data()
        .par_iter()
        .zip(ex.field.data())
        .map(|(a, b)| (a + b * sign) * 0.5)
        .collect();
    TwoBodyField {
        field: psi.field.with_data(data),
    }
}

/// Trace inner product `Σ_ij ∫ tr(F_ij ᵗḠ_ij)`, equal to the flat weighted
/// dot product.
pub fn inner_product(f: &TwoBodyField, g: &TwoBodyField) -> Result<Complex64> {
    f.inner(g)
}

/// Largest violation of the block relations
/// `ψ_kk(x₂,x₁) = −ᵗψ_kk(x₁,x₂)` and `ψ₁₂(x₂,x₁) = −ᵗψ₂₁(x₁,x₂)`
/// (`sign = −1`), or of their symmetric counterparts (`sign = +1`),
/// relative to the largest entry of `Ψ`.
pub fn block_relation_defect(psi: &TwoBodyField, sign: f64) -> f64 {
    let s3 = psi.grid().sites(3);
    let scale = psi.field.data().iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    let pairs = [(0, 0, 0, 0), (1, 1, 1, 1), (0, 1, 1, 0)];
    let worst = (0..psi.sites())
        .into_par_iter()
        .map(|site| {
            let swapped = swap_site(site, s3);
            let mut w: f64 = 0.0;
            for &(a, b, c, d) in &pairs {
                let lhs = psi.block(a, b, swapped);
                let rhs = psi.block(c, d, site).transpose() * Complex64::from(sign);
                w = w.max((lhs - rhs).iter().map(|z| z.norm()).fold(0.0, f64::max));
            }
            w
        })
        .reduce(|| 0.0, f64::max);
    worst / scale
}

/// Membership test for the antisymmetric space.
pub fn is_antisymmetric(psi: &TwoBodyField, tol: f64) -> bool {
    block_relation_defect(psi, -1.0) <= tol
}

/// Membership test for the symmetric space.
pub fn is_symmetric(psi: &TwoBodyField, tol: f64) -> bool {
    block_relation_defect(psi, 1.0) <= tol
}

/// `(σ·p_τ) ⊗ I₂` or `I₂ ⊗ (σ·p_τ)` on a single 4-component block field.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockSide {
    /// `(σ·p) ⊗ I₂`, acting on the first spin label.
    First,
    /// `I₂ ⊗ (σ·p)`, acting on the second spin label.
    Second,
}

/// `σ·p_τ` on one block, `τ ∈ {1, 2}` selecting the particle's axes.
pub fn block_sigma_p(grid: GridSpec, side: BlockSide, tau: usize) -> Result<StructuredOperator> {
    if tau != 1 && tau != 2 {
        return Err(Error::IndexOutOfRange(tau));
    }
    let mut op = StructuredOperator::new(grid, NDIM, 1, 4);
    for a in 0..3 {
        let s = crate::clifford::sigma(a);
        let spin = match side {
            BlockSide::First => SpinAction::RightTranspose(s),
            BlockSide::Second => SpinAction::Left(s),
        };
        op.push(Term::new(1.0, &[(0, 0, 1.0)], spin, Factor::Momentum(3 * (tau - 1) + a)))?;
    }
    Ok(op)
}

/// Deviations of the exchange identities for block pairings of `F, G`.
#[derive(Clone, Debug, PartialEq)]
pub struct IntertwiningReport {
    pub tau: usize,
    /// `max |⟨(σ·p_τ⊗I)F_ij, G_kl⟩ − ⟨(I⊗σ·p_{3−τ})F_ji, G_lk⟩|`, relative.
    pub swapped_momentum: f64,
    /// Same with `p_τ` on both sides.
    pub same_momentum: f64,
    /// `max |⟨V F_ij, G_ij⟩ − ⟨V F_ji, G_ji⟩|`, relative.
    pub potential: f64,
}

/// Evaluates the momentum and potential exchange identities by quadrature.
/// `v` must be a swap-symmetric multiplier on the 6D grid.
pub fn check_exchange_intertwining(f: &TwoBodyField, g: &TwoBodyField, tau: usize, v: &[f64]) -> Result<IntertwiningReport> {
    f.field.check_compatible(&g.field)?;
    let grid = *f.grid();
    let first = block_sigma_p(grid, BlockSide::First, tau)?;
    let second_other = block_sigma_p(grid, BlockSide::Second, 3 - tau)?;
    let second_same = block_sigma_p(grid, BlockSide::Second, tau)?;
    let blocks_f: Vec<Field> = (0..4).map(|b| f.block_field(b / 2, b % 2)).collect();
    let blocks_g: Vec<Field> = (0..4).map(|b| g.block_field(b / 2, b % 2)).collect();
    let lhs_ops: Vec<Field> = blocks_f.iter().map(|x| first.apply(x)).collect::<Result<_>>()?;
    let rhs_other: Vec<Field> = blocks_f.iter().map(|x| second_other.apply(x)).collect::<Result<_>>()?;
    let rhs_same: Vec<Field> = blocks_f.iter().map(|x| second_same.apply(x)).collect::<Result<_>>()?;
    let t = |b: usize| 2 * (b % 2) + b / 2;
    let scale = f.norm() * g.norm() * (1.0 + grid.wavenumbers().iter().fold(0.0_f64, |a, k| a.max(k.abs())));
    let (mut swapped, mut same) = (0.0_f64, 0.0_f64);
    for ij in 0..4 {
        for kl in 0..4 {
            let lhs = lhs_ops[ij].inner(&blocks_g[kl])?;
            let r1 = rhs_other[t(ij)].inner(&blocks_g[t(kl)])?;
            let r2 = rhs_same[t(ij)].inner(&blocks_g[t(kl)])?;
            swapped = swapped.max((lhs - r1).norm());
            same = same.max((lhs - r2).norm());
        }
    }
    let mut potential = 0.0_f64;
    for ij in 0..4 {
        let mut vf = blocks_f[ij].clone();
        vf.multiply_by(v);
        let mut vft = blocks_f[t(ij)].clone();
        vft.multiply_by(v);
        let d = vf.inner(&blocks_g[ij])? - vft.inner(&blocks_g[t(ij)])?;
        potential = potential.max(d.norm());
    }
    let vmax = v.iter().fold(0.0_f64, |a, x| a.max(x.abs())).max(1.0);
    Ok(IntertwiningReport {
        tau,
        swapped_momentum: swapped / scale,
        same_momentum: same / scale,
        potential: potential / (f.norm() * g.norm() * vmax),
    })
}

/// `tr(AB) − tr(ᵗB ᵗA)` for 2×2 blocks.
pub fn trace_transpose_defect(a: &Matrix2<Complex64>, b: &Matrix2<Complex64>) -> f64 {
    ((a * b).trace() - (b.transpose() * a.transpose()).trace()).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn grid() -> GridSpec {
        GridSpec::new(4, 6.0).unwrap()
    }

    #[test]
    fn component_and_labels_agree() {
        for c in 0..16 {
            let (l1, s1, l2, s2) = labels(c);
            assert_eq!(block_index(l1, s1, l2, s2), c);
            assert_eq!(component(l1, l2, s2, s1), c);
        }
    }

    #[test]
    fn exchange_is_an_involution_and_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = TwoBodyField::random(grid(), &mut rng);
        let b = TwoBodyField::random(grid(), &mut rng);
        assert_eq!(exchange(&exchange(&a)), a);
        let lhs = inner_product(&exchange(&a), &exchange(&b)).unwrap();
        let rhs = inner_product(&a, &b).unwrap();
        assert!((lhs - rhs).norm() < 1e-12 * a.norm() * b.norm());
    }

    #[test]
    fn exchange_swaps_product_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = Field::random(grid(), 3, 4, &mut rng);
        let g = Field::random(grid(), 3, 4, &mut rng);
        let fg = TwoBodyField::product(&f, &g).unwrap();
        let gf = TwoBodyField::product(&g, &f).unwrap();
        assert_eq!(exchange(&fg), gf);
    }

    #[test]
    fn projectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let psi = TwoBodyField::random(grid(), &mut rng);
        let a = antisymmetrize(&psi);
        let s = symmetrize(&psi);
        assert!(is_antisymmetric(&a, 1e-14));
        assert!(is_symmetric(&s, 1e-14));
        assert!(!is_antisymmetric(&psi, 1e-3));
        assert!(antisymmetrize(&s).norm() < 1e-14 * psi.norm());
        let aa = antisymmetrize(&a);
        assert!(aa.field().sub(a.field()).unwrap().norm() < 1e-14 * a.norm());
        let sum = a.field().add(s.field()).unwrap();
        assert!(sum.sub(psi.field()).unwrap().norm() < 1e-14 * psi.norm());
        let overlap = inner_product(&a, &symmetrize(&TwoBodyField::random(grid(), &mut rng))).unwrap();
        assert!(overlap.norm() < 1e-12 * a.norm() * psi.norm());
    }

    #[test]
    fn membership_agrees_with_exchange_eigenvalue() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..5 {
            let psi = antisymmetrize(&TwoBodyField::random(grid(), &mut rng));
            let ex = exchange(&psi);
            let sum = ex.field().add(psi.field()).unwrap();
            assert!(sum.norm() < 1e-14 * psi.norm());
            assert!(is_antisymmetric(&psi, 1e-14));
        }
    }

    #[test]
    fn antisymmetrized_product_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = Field::random(grid(), 3, 4, &mut rng);
        let g = Field::random(grid(), 3, 4, &mut rng);
        let w = antisymmetrize(&TwoBodyField::product(&f, &g).unwrap());
        let fg = f.inner(&g).unwrap();
        let want = 0.5 * (f.norm_sq() * g.norm_sq() - fg.norm_sqr());
        let got = w.norm().powi(2);
        assert!((got - want).abs() < 1e-10 * want);
    }

    #[test]
    fn trace_transpose_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..20 {
            let mut m = || Matrix2::from_fn(|_, _| Complex64::new(rng.gen_range(-3..=3) as f64, rng.gen_range(-3..=3) as f64));
            let (a, b) = (m(), m());
            assert_eq!(trace_transpose_defect(&a, &b), 0.0);
        }
    }
}
