//! Kronecker products, the vec/Mat correspondence, the two-body free symbol
//! and the orthogonal transforms `S` and `T = S ⊕ S`.
//!
//! Two orderings of the sixteen two-body spin components are used. The plain
//! Kronecker order is `4·(2ℓ₁+s₁) + (2ℓ₂+s₂)`, where `ℓ` is the large/small
//! label of a particle and `s` its spin. The block order groups components by
//! `(ℓ₁, ℓ₂)` first: `4·(2ℓ₁+ℓ₂) + 2s₁ + s₂`, i.e. blocks `ψ₁₁, ψ₁₂, ψ₂₁, ψ₂₂`
//! (ℓℓ, ℓs, sℓ, ss), each holding `vec` of a 2×2 matrix whose entry
//! `[s₂][s₁]` is the amplitude.

use nalgebra::{DMatrix, Matrix2, Vector4};
use num_complex::Complex64;
use serde::Serialize;

use crate::clifford::{free_symbol, sigma_dot, Vec3};
use crate::error::{Error, Result};
use crate::exact::{ExactComplex, ExactMatrix, Surd};

/// Dense matrix types that support the block constructions of this module.
pub trait BlockMatrix: Clone {
    fn zeros(rows: usize, cols: usize) -> Self;
    fn identity(n: usize) -> Self;
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    fn kron(&self, other: &Self) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn times_two(&self) -> Self;
    fn set_block(&mut self, r0: usize, c0: usize, block: &Self);
}

impl BlockMatrix for ExactMatrix {
    fn zeros(rows: usize, cols: usize) -> Self {
        ExactMatrix::zeros(rows, cols)
    }
    fn identity(n: usize) -> Self {
        ExactMatrix::identity(n)
    }
    fn nrows(&self) -> usize {
        self.rows()
    }
    fn ncols(&self) -> usize {
        self.cols()
    }
    fn kron(&self, other: &Self) -> Self {
        let (r, c) = (other.rows(), other.cols());
        ExactMatrix::from_fn(self.rows() * r, self.cols() * c, |i, j| self[(i / r, j / c)] * other[(i % r, j % c)])
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn times_two(&self) -> Self {
        self.scale(2.into())
    }
    fn set_block(&mut self, r0: usize, c0: usize, block: &Self) {
        ExactMatrix::set_block(self, r0, c0, block)
    }
}

impl BlockMatrix for DMatrix<Complex64> {
    fn zeros(rows: usize, cols: usize) -> Self {
        DMatrix::zeros(rows, cols)
    }
    fn identity(n: usize) -> Self {
        DMatrix::identity(n, n)
    }
    fn nrows(&self) -> usize {
        self.nrows()
    }
    fn ncols(&self) -> usize {
        self.ncols()
    }
    fn kron(&self, other: &Self) -> Self {
        self.kronecker(other)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn times_two(&self) -> Self {
        self * Complex64::from(2.0)
    }
    fn set_block(&mut self, r0: usize, c0: usize, block: &Self) {
        self.view_mut((r0, c0), block.shape()).copy_from(block);
    }
}

/// `X ⊗ Y = (x_ij Y)`.
pub fn kron<M: BlockMatrix>(x: &M, y: &M) -> M {
    x.kron(y)
}

/// Column-major packing: `vec([[a, b], [c, d]]) = (a, c, b, d)`.
pub fn vec(m: &Matrix2<Complex64>) -> Vector4<Complex64> {
    Vector4::new(m[(0, 0)], m[(1, 0)], m[(0, 1)], m[(1, 1)])
}

/// Inverse of [`vec`]: `mat(v) = [[v₁, v₃], [v₂, v₄]]`.
pub fn mat(v: &Vector4<Complex64>) -> Matrix2<Complex64> {
    Matrix2::new(v[0], v[2], v[1], v[3])
}

/// `M·ᵗA`, the action of `A ⊗ I₂` on `vec M`.
pub fn apply_left(a: &Matrix2<Complex64>, m: &Matrix2<Complex64>) -> Matrix2<Complex64> {
    m * a.transpose()
}

/// `B·M`, the action of `I₂ ⊗ B` on `vec M`.
pub fn apply_right(b: &Matrix2<Complex64>, m: &Matrix2<Complex64>) -> Matrix2<Complex64> {
    b * m
}

/// The 4×4 block matrix equal to `M₁⊗I₂ + I₂⊗M₂` for `M_j = [[B, A_j], [A_j, −B]]`:
///
/// ```text
/// [[2B, A₂, A₁,  0 ],
///  [A₂,  0,  0, A₁ ],
///  [A₁,  0,  0, A₂ ],
///  [ 0, A₁, A₂, −2B]]
/// ```
pub fn kron_sum_blocks<M: BlockMatrix>(b: &M, a1: &M, a2: &M) -> Result<M> {
    let n = b.nrows();
    for (name, blk) in [("B", b), ("A1", a1), ("A2", a2)] {
        if blk.nrows() != n || blk.ncols() != n {
            return Err(Error::BlockSizeMismatch(format!(
                "{name} is {}x{}, expected {n}x{n}",
                blk.nrows(),
                blk.ncols()
            )));
        }
    }
    let mut out = M::zeros(4 * n, 4 * n);
    let b2 = b.times_two();
    let layout: [(usize, usize, M); 9] = [
        (0, 0, b2.clone()),
        (0, 1, a2.clone()),
        (0, 2, a1.clone()),
        (1, 0, a2.clone()),
        (1, 3, a1.clone()),
        (2, 0, a1.clone()),
        (2, 3, a2.clone()),
        (3, 1, a1.clone()),
        (3, 2, a2.clone()),
    ];
    for (i, j, blk) in &layout {
        out.set_block(i * n, j * n, blk);
    }
    out.set_block(3 * n, 3 * n, &b2.neg());
    Ok(out)
}

/// Index of component `(ℓ₁, s₁, ℓ₂, s₂)` in the plain Kronecker order.
pub fn plain_kron_index(l1: usize, s1: usize, l2: usize, s2: usize) -> usize {
    4 * (2 * l1 + s1) + 2 * l2 + s2
}

/// Index of component `(ℓ₁, s₁, ℓ₂, s₂)` in the block order.
pub fn block_index(l1: usize, s1: usize, l2: usize, s2: usize) -> usize {
    4 * (2 * l1 + l2) + 2 * s1 + s2
}

/// `table[block_order] = plain_kron_order`, built by matching labels.
pub fn block_order_permutation() -> [usize; 16] {
    let mut table = [usize::MAX; 16];
    for l1 in 0..2 {
        for s1 in 0..2 {
            for l2 in 0..2 {
                for s2 in 0..2 {
                    table[block_index(l1, s1, l2, s2)] = plain_kron_index(l1, s1, l2, s2);
                }
            }
        }
    }
    table
}

/// Reorders a plain-Kronecker-basis matrix into block order.
pub fn to_block_order(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let p = block_order_permutation();
    DMatrix::from_fn(16, 16, |i, j| m[(p[i], p[j])])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisOrder {
    PlainKron,
    LargeSmall,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwoBodySymbol {
    pub xi1: Vec3,
    pub xi2: Vec3,
    pub mass: f64,
    /// `H₀(ξ₁)⊗I₄ + I₄⊗H₀(ξ₂)` in plain Kronecker order.
    pub plain: DMatrix<Complex64>,
    /// Block form `[[2mI₄, h₂, h₁, 0], …]` in block order.
    pub blocks: DMatrix<Complex64>,
    /// Max entry deviation between `blocks` and the reordered `plain`.
    pub consistency: f64,
}

impl TwoBodySymbol {
    pub fn matrix(&self, order: BasisOrder) -> &DMatrix<Complex64> {
        match order {
            BasisOrder::PlainKron => &self.plain,
            BasisOrder::LargeSmall => &self.blocks,
        }
    }
}

/// `(σ·ξ)⊗I₂`, acting on the particle-1 spin.
pub fn h1_symbol(xi1: Vec3) -> DMatrix<Complex64> {
    let s = crate::clifford::to_dmatrix(&sigma_dot(xi1));
    s.kronecker(&DMatrix::identity(2, 2))
}

/// `I₂⊗(σ·ξ)`, acting on the particle-2 spin.
pub fn h2_symbol(xi2: Vec3) -> DMatrix<Complex64> {
    let s = crate::clifford::to_dmatrix(&sigma_dot(xi2));
    DMatrix::identity(2, 2).kronecker(&s)
}

/// Builds both forms of the two-body free symbol and checks that they agree.
pub fn two_body_free_symbol(xi1: Vec3, xi2: Vec3, m: f64) -> Result<TwoBodySymbol> {
    let h0_1 = crate::clifford::to_dmatrix(&free_symbol(xi1, m).matrix);
    let h0_2 = crate::clifford::to_dmatrix(&free_symbol(xi2, m).matrix);
    let i4 = DMatrix::<Complex64>::identity(4, 4);
    let plain = h0_1.kronecker(&i4) + i4.kronecker(&h0_2);
    let b = DMatrix::<Complex64>::identity(4, 4) * Complex64::from(m);
    let blocks = kron_sum_blocks(&b, &h1_symbol(xi1), &h2_symbol(xi2))?;
    let consistency = (&blocks - to_block_order(&plain)).iter().map(|c| c.norm()).fold(0.0, f64::max);
    let scale = 1.0 + plain.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if consistency > 1e-12 * scale {
        return Err(Error::InternalConsistency {
            what: "block-form two-body symbol disagrees with the Kronecker sum".into(),
            deviation: consistency,
        });
    }
    Ok(TwoBodySymbol {
        xi1,
        xi2,
        mass: m,
        plain,
        blocks,
        consistency,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrthoTransform {
    pub label: &'static str,
    pub matrix: ExactMatrix,
}

/// `S = (1/√2)[[I₄, I₄], [I₄, −I₄]]`.
pub fn build_s() -> OrthoTransform {
    let r = ExactComplex::real(Surd::inv_sqrt2());
    let i4 = ExactMatrix::identity(4).scale_by(r);
    let mut s = ExactMatrix::zeros(8, 8);
    s.set_block(0, 0, &i4);
    s.set_block(0, 4, &i4);
    s.set_block(4, 0, &i4);
    s.set_block(4, 4, &(-&i4));
    OrthoTransform { label: "S", matrix: s }
}

/// `T = S ⊕ S`.
pub fn build_t() -> OrthoTransform {
    let s = build_s().matrix;
    OrthoTransform {
        label: "T",
        matrix: s.direct_sum(&s),
    }
}

impl OrthoTransform {
    /// Checks `ᵗO·O = I` exactly.
    pub fn is_orthogonal(&self) -> bool {
        let n = self.matrix.rows();
        &self.matrix.transpose() * &self.matrix == ExactMatrix::identity(n)
    }

    /// `ᵗO·M·O` in exact arithmetic.
    pub fn conjugate_exact(&self, m: &ExactMatrix) -> ExactMatrix {
        assert!(self.is_orthogonal(), "transform {} is not orthogonal", self.label);
        &(&self.matrix.transpose() * m) * &self.matrix
    }

    /// `ᵗO·M·O` in floating point.
    pub fn conjugate(&self, m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        assert!(self.is_orthogonal(), "transform {} is not orthogonal", self.label);
        let o = self.matrix.to_float();
        o.transpose() * m * o
    }
}

/// Sign of the off-diagonal mass coupling in the lower 8×8 block of the
/// canonical form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LowerCoupling {
    /// `[[H₀₀−m, −m], [−m, −H₀₀−m]]`, the sign convention used for `H₋₋`.
    Displayed,
    /// `[[H₀₀−m, +m], [+m, −H₀₀−m]]`, what `ᵗT·(plus form)·T` produces.
    Conjugated,
}

/// The 16×16 plus form `[[V+2m, h, 0, 0], [h, V, 0, 0], [0, 0, V, h], [0, 0, h, V−2m]]`
/// with 4×4 blocks `h`, `mass = m·I₄` and `pot = V·I₄`.
pub fn plus_form<M: BlockMatrix>(h: &M, mass: &M, pot: &M) -> M {
    let n = h.nrows();
    let mut out = M::zeros(4 * n, 4 * n);
    let two_m = mass.times_two();
    out.set_block(0, 0, &pot.add(&two_m));
    out.set_block(0, n, h);
    out.set_block(n, 0, h);
    out.set_block(n, n, pot);
    out.set_block(2 * n, 2 * n, pot);
    out.set_block(2 * n, 3 * n, h);
    out.set_block(3 * n, 2 * n, h);
    out.set_block(3 * n, 3 * n, &pot.add(&two_m.neg()));
    out
}

/// `diag(H₀₀, −H₀₀, H₀₀, −H₀₀) + mass coupling + V·I₁₆`.
pub fn canonical_form<M: BlockMatrix>(h: &M, mass: &M, pot: &M, lower: LowerCoupling) -> M {
    let n = h.nrows();
    let mut out = M::zeros(4 * n, 4 * n);
    let neg_m = mass.neg();
    out.set_block(0, 0, &h.add(mass).add(pot));
    out.set_block(0, n, mass);
    out.set_block(n, 0, mass);
    out.set_block(n, n, &h.neg().add(mass).add(pot));
    out.set_block(2 * n, 2 * n, &h.add(&neg_m).add(pot));
    let coupling = match lower {
        LowerCoupling::Displayed => &neg_m,
        LowerCoupling::Conjugated => mass,
    };
    out.set_block(2 * n, 3 * n, coupling);
    out.set_block(3 * n, 2 * n, coupling);
    out.set_block(3 * n, 3 * n, &h.neg().add(&neg_m).add(pot));
    out
}

/// `diag(I₁₂, −I₄)`: maps one lower-coupling convention onto the other.
pub fn lower_sign_flip() -> ExactMatrix {
    let mut d = vec![ExactComplex::ONE; 16];
    for x in d.iter_mut().skip(12) {
        *x = -ExactComplex::ONE;
    }
    ExactMatrix::diagonal(&d)
}
