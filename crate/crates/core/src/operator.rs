//! Matrix-free operators built from Kronecker-structured terms.
//!
//! Each term is `coefficient · (routing ⊗ spin) ⊗ factor`: `routing` is a
//! signed block-to-block table, `spin` a small matrix acting inside each block,
//! and `factor` a scalar spatial operator (identity, one momentum component
//! `p_a = −i∂_a`, or a real multiplier). Momentum factors are applied in
//! Fourier space, where they are diagonal.

use std::sync::{Arc, OnceLock};

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::{FftNd, GridSpec};

/// Upper bound on the flat dimension accepted by [`build_dense`].
pub const DENSE_LIMIT: usize = 4096;

#[derive(Clone, Debug, PartialEq)]
pub enum SpinAction {
    /// Identity on blocks of the given size.
    Identity(usize),
    /// `M ↦ A·M` on `vec M`, i.e. `I₂ ⊗ A` (acts on the second spin label).
    Left(Matrix2<Complex64>),
    /// `M ↦ M·ᵗB` on `vec M`, i.e. `B ⊗ I₂` (acts on the first spin label).
    RightTranspose(Matrix2<Complex64>),
    /// Any square matrix on the block.
    Dense(DMatrix<Complex64>),
}

impl SpinAction {
    pub fn size(&self) -> usize {
        match self {
            SpinAction::Identity(n) => *n,
            SpinAction::Left(_) | SpinAction::RightTranspose(_) => 4,
            SpinAction::Dense(m) => m.nrows(),
        }
    }

    pub fn matrix(&self) -> DMatrix<Complex64> {
        let i2 = DMatrix::<Complex64>::identity(2, 2);
        match self {
            SpinAction::Identity(n) => DMatrix::identity(*n, *n),
            SpinAction::Left(a) => i2.kronecker(&crate::clifford::to_dmatrix(a)),
            SpinAction::RightTranspose(b) => crate::clifford::to_dmatrix(b).kronecker(&i2),
            SpinAction::Dense(m) => m.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Factor {
    Identity,
    /// `p_axis = −i∂/∂x_axis`.
    Momentum(usize),
    /// Pointwise real multiplier, one value per site.
    Multiplier(Arc<Vec<f64>>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub coefficient: f64,
    /// `(output block, input block, sign)`.
    pub routing: Vec<(usize, usize, f64)>,
    pub spin: SpinAction,
    pub factor: Factor,
}

impl Term {
    pub fn new(coefficient: f64, routing: &[(usize, usize, f64)], spin: SpinAction, factor: Factor) -> Self {
        Term {
            coefficient,
            routing: routing.to_vec(),
            spin,
            factor,
        }
    }

    /// `coefficient · routing ⊗ spin` as a dense component matrix.
    pub fn component_matrix(&self, nblocks: usize) -> DMatrix<Complex64> {
        let mut route = DMatrix::<Complex64>::zeros(nblocks, nblocks);
        for &(o, i, s) in &self.routing {
            route[(o, i)] += Complex64::from(s);
        }
        route.kronecker(&self.spin.matrix()) * Complex64::from(self.coefficient)
    }
}

type Triplets = Vec<(usize, usize, Complex64)>;

fn triplets(m: &DMatrix<Complex64>) -> Triplets {
    let mut out = Vec::new();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if m[(i, j)] != Complex64::default() {
                out.push((i, j, m[(i, j)]));
            }
        }
    }
    out
}

struct Compiled {
    local: Triplets,
    momentum: Vec<(usize, Triplets)>,
    multipliers: Vec<(Arc<Vec<f64>>, Triplets)>,
}

/// A sum of [`Term`]s acting on `nblocks × block_size` components over an
/// `ndim`-dimensional grid.
#[derive(Clone, Debug)]
pub struct StructuredOperator {
    grid: GridSpec,
    ndim: usize,
    nblocks: usize,
    block_size: usize,
    terms: Vec<Term>,
    ktables: OnceLock<Arc<Vec<Vec<f64>>>>,
}

impl StructuredOperator {
    pub fn new(grid: GridSpec, ndim: usize, nblocks: usize, block_size: usize) -> Self {
        StructuredOperator {
            grid,
            ndim,
            nblocks,
            block_size,
            terms: Vec::new(),
            ktables: OnceLock::new(),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn ndim(&self) -> usize {
        self.ndim
    }

    pub fn ncomp(&self) -> usize {
        self.nblocks * self.block_size
    }

    pub fn nblocks(&self) -> usize {
        self.nblocks
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    /// Flat dimension `ncomp · sites`.
    pub fn dim(&self) -> usize {
        self.ncomp() * self.grid.sites(self.ndim)
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn push(&mut self, term: Term) -> Result<()> {
        if term.spin.size() != self.block_size {
            return Err(Error::BlockSizeMismatch(format!(
                "spin action of size {} on blocks of size {}",
                term.spin.size(),
                self.block_size
            )));
        }
        if term.routing.iter().any(|&(o, i, _)| o >= self.nblocks || i >= self.nblocks) {
            return Err(Error::InvalidArgument(format!("routing refers to a block >= {}", self.nblocks)));
        }
        match &term.factor {
            Factor::Momentum(a) if *a >= self.ndim => {
                return Err(Error::InvalidArgument(format!("momentum axis {a} >= {}", self.ndim)))
            }
            Factor::Multiplier(m) if m.len() != self.grid.sites(self.ndim) => {
                return Err(Error::GridMismatch(format!(
                    "multiplier has {} samples, grid has {}",
                    m.len(),
                    self.grid.sites(self.ndim)
                )))
            }
            _ => {}
        }
        self.terms.push(term);
        Ok(())
    }

    pub fn with(mut self, term: Term) -> Result<Self> {
        self.push(term)?;
        Ok(self)
    }

    /// Adds `shift · I`.
    pub fn shifted(mut self, shift: f64) -> Self {
        let routing: Vec<_> = (0..self.nblocks).map(|b| (b, b, 1.0)).collect();
        let term = Term::new(shift, &routing, SpinAction::Identity(self.block_size), Factor::Identity);
        self.terms.push(term);
        self
    }

    /// Appends all terms of `other` (same shape).
    pub fn plus(mut self, other: &StructuredOperator) -> Result<Self> {
        if other.ncomp() != self.ncomp() || other.ndim != self.ndim || !other.grid.same_lattice(&self.grid) {
            return Err(Error::GridMismatch("operators act on different spaces".into()));
        }
        for t in &other.terms {
            self.push(t.clone())?;
        }
        Ok(self)
    }

    /// True when every term's component matrix is Hermitian.
    pub fn is_structurally_hermitian(&self) -> bool {
        self.terms.iter().all(|t| {
            let m = t.component_matrix(self.nblocks);
            (&m - m.adjoint()).iter().all(|z| z.norm() <= 1e-14 * (1.0 + m.norm()))
        })
    }

    fn compile(&self) -> Compiled {
        let n = self.ncomp();
        let mut local = DMatrix::<Complex64>::zeros(n, n);
        let mut momentum: Vec<(usize, DMatrix<Complex64>)> = Vec::new();
        let mut multipliers: Vec<(Arc<Vec<f64>>, DMatrix<Complex64>)> = Vec::new();
        for t in &self.terms {
            let m = t.component_matrix(self.nblocks);
            match &t.factor {
                Factor::Identity => local += m,
                Factor::Momentum(a) => match momentum.iter_mut().find(|(b, _)| b == a) {
                    Some((_, acc)) => *acc += m,
                    None => momentum.push((*a, m)),
                },
                Factor::Multiplier(w) => match multipliers.iter_mut().find(|(v, _)| Arc::ptr_eq(v, w)) {
                    Some((_, acc)) => *acc += m,
                    None => multipliers.push((w.clone(), m)),
                },
            }
        }
        Compiled {
            local: triplets(&local),
            momentum: momentum.into_iter().map(|(a, m)| (a, triplets(&m))).collect(),
            multipliers: multipliers.into_iter().map(|(w, m)| (w, triplets(&m))).collect(),
        }
    }

    fn ktables(&self) -> Arc<Vec<Vec<f64>>> {
        self.ktables
            .get_or_init(|| {
                let sites = self.grid.sites(self.ndim);
                let k = self.grid.wavenumbers();
                let tables = (0..self.ndim)
                    .map(|axis| {
                        let stride = self.grid.points.pow((self.ndim - 1 - axis) as u32);
                        (0..sites).map(|s| k[(s / stride) % self.grid.points]).collect()
                    })
                    .collect();
                Arc::new(tables)
            })
            .clone()
    }

    /// Applies the operator to a flat component-major vector.
    pub fn apply_slice(&self, x: &[Complex64]) -> Vec<Complex64> {
        let sites = self.grid.sites(self.ndim);
        let n = self.ncomp();
        assert_eq!(x.len(), n * sites, "vector length does not match operator dimension");
        let compiled = self.compile();
        let mut y = vec![Complex64::default(); n * sites];

        let mut by_out_local: Vec<Vec<(usize, Complex64, Option<&[f64]>)>> = vec![Vec::new(); n];
        for &(o, i, c) in &compiled.local {
            by_out_local[o].push((i, c, None));
        }
        for (w, trip) in &compiled.multipliers {
            for &(o, i, c) in trip {
                by_out_local[o].push((i, c, Some(w.as_slice())));
            }
        }
        y.par_chunks_mut(sites).enumerate().for_each(|(o, yo)| {
            for &(i, c, w) in &by_out_local[o] {
                let xi = &x[i * sites..(i + 1) * sites];
                match w {
                    None => yo.iter_mut().zip(xi).for_each(|(y, x)| *y += c * x),
                    Some(w) => yo.iter_mut().zip(xi).zip(w).for_each(|((y, x), w)| *y += c * x * *w),
                }
            }
        });

        if compiled.momentum.is_empty() {
            return y;
        }
        let fft = FftNd::new(self.grid.points, self.ndim);
        let mut used = vec![false; n];
        let mut by_out: Vec<Vec<(usize, usize, Complex64)>> = vec![Vec::new(); n];
        for (axis, trip) in &compiled.momentum {
            for &(o, i, c) in trip {
                used[i] = true;
                by_out[o].push((*axis, i, c));
            }
        }
        let mut xhat = vec![Complex64::default(); n * sites];
        xhat.par_chunks_mut(sites).enumerate().for_each(|(i, buf)| {
            if used[i] {
                buf.copy_from_slice(&x[i * sites..(i + 1) * sites]);
                fft.forward(buf);
            }
        });
        let k = self.ktables();
        let mut yhat = vec![Complex64::default(); n * sites];
        yhat.par_chunks_mut(sites).enumerate().for_each(|(o, buf)| {
            if by_out[o].is_empty() {
                return;
            }
            for &(axis, i, c) in &by_out[o] {
                let xi = &xhat[i * sites..(i + 1) * sites];
                let ka = &k[axis];
                for s in 0..sites {
                    buf[s] += c * ka[s] * xi[s];
                }
            }
            fft.inverse(buf);
        });
        y.par_iter_mut().zip(&yhat).for_each(|(a, b)| *a += b);
        y
    }

    pub fn apply(&self, x: &Field) -> Result<Field> {
        if x.ncomp() != self.ncomp() || x.ndim() != self.ndim || !x.grid().same_lattice(&self.grid) {
            return Err(Error::GridMismatch(format!(
                "operator acts on {} components over {}D, field has {} over {}D",
                self.ncomp(),
                self.ndim,
                x.ncomp(),
                x.ndim()
            )));
        }
        Ok(x.with_data(self.apply_slice(x.data())))
    }
}

/// Dense 1D matrix of `p = −i d/dx` on the periodic lattice,
/// `D[i][j] = (1/N) Σ_q k_q e^{2πi q (i−j)/N}`.
pub fn momentum_matrix_1d(grid: &GridSpec) -> DMatrix<Complex64> {
    let n = grid.points;
    let k = grid.wavenumbers();
    DMatrix::from_fn(n, n, |i, j| {
        let mut acc = Complex64::default();
        for (q, kq) in k.iter().enumerate() {
            let phase = 2.0 * std::f64::consts::PI * (q * ((i + n - j) % n)) as f64 / n as f64;
            acc += Complex64::from_polar(*kq, phase);
        }
        acc / n as f64
    })
}

/// Explicit matrix of `op`, assembled independently of the FFT path.
pub fn build_dense(op: &StructuredOperator) -> Result<DMatrix<Complex64>> {
    let dim = op.dim();
    if dim > DENSE_LIMIT {
        return Err(Error::DimensionTooLarge { dim, limit: DENSE_LIMIT });
    }
    let sites = op.grid.sites(op.ndim);
    let d1 = momentum_matrix_1d(&op.grid);
    let eye1 = DMatrix::<Complex64>::identity(op.grid.points, op.grid.points);
    let mut out = DMatrix::<Complex64>::zeros(dim, dim);
    for t in &op.terms {
        let comp = t.component_matrix(op.nblocks);
        let site_matrix = match &t.factor {
            Factor::Identity => DMatrix::identity(sites, sites),
            Factor::Momentum(axis) => {
                let mut m = DMatrix::<Complex64>::identity(1, 1);
                for a in 0..op.ndim {
                    m = m.kronecker(if a == *axis { &d1 } else { &eye1 });
                }
                m
            }
            Factor::Multiplier(w) => DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                sites,
                w.iter().map(|v| Complex64::from(*v)),
            )),
        };
        out += comp.kronecker(&site_matrix);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::sigma;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn small_op(grid: GridSpec) -> StructuredOperator {
        let sites = grid.sites(2);
        let w: Vec<f64> = (0..sites).map(|s| (s as f64 * 0.3).cos()).collect();
        StructuredOperator::new(grid, 2, 2, 4)
            .with(Term::new(1.5, &[(0, 1, 1.0), (1, 0, 1.0)], SpinAction::Left(sigma(1)), Factor::Momentum(0)))
            .unwrap()
            .with(Term::new(0.7, &[(0, 0, 1.0), (1, 1, -1.0)], SpinAction::RightTranspose(sigma(2)), Factor::Momentum(1)))
            .unwrap()
            .with(Term::new(2.0, &[(0, 0, 1.0), (1, 1, 1.0)], SpinAction::Identity(4), Factor::Multiplier(Arc::new(w))))
            .unwrap()
            .shifted(0.25)
    }

    #[test]
    fn matrix_free_matches_dense() {
        let grid = GridSpec::new(4, 3.0).unwrap();
        let op = small_op(grid);
        assert!(op.is_structurally_hermitian());
        let dense = build_dense(&op).unwrap();
        assert!((&dense - dense.adjoint()).norm() < 1e-12 * dense.norm());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let x = Field::random(grid, 2, 8, &mut rng);
            let y = op.apply(&x).unwrap();
            let xd = nalgebra::DVector::from_column_slice(x.data());
            let yd = &dense * xd;
            let err = yd.iter().zip(y.data()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(err < 1e-12 * (1.0 + yd.norm()));
        }
    }

    #[test]
    fn momentum_is_exact_on_plane_waves() {
        let grid = GridSpec::new(8, 5.0).unwrap();
        let op = StructuredOperator::new(grid, 1, 1, 1)
            .with(Term::new(1.0, &[(0, 0, 1.0)], SpinAction::Identity(1), Factor::Momentum(0)))
            .unwrap();
        let k = 2.0 * std::f64::consts::PI / 5.0 * 3.0;
        let x = Field::from_fn(grid, 1, 1, |_, c| Complex64::from_polar(1.0, k * c[0]));
        let y = op.apply(&x).unwrap();
        for (a, b) in y.data().iter().zip(x.data()) {
            assert!((a - b * k).norm() < 1e-12);
        }
    }

    #[test]
    fn dense_limit_is_enforced() {
        let grid = GridSpec::new(8, 1.0).unwrap();
        let op = StructuredOperator::new(grid, 3, 4, 4).shifted(1.0);
        assert!(matches!(build_dense(&op), Err(Error::DimensionTooLarge { .. })));
    }

    #[test]
    fn malformed_terms_are_rejected() {
        let grid = GridSpec::new(4, 1.0).unwrap();
        let mut op = StructuredOperator::new(grid, 3, 2, 4);
        assert!(op.push(Term::new(1.0, &[(0, 2, 1.0)], SpinAction::Identity(4), Factor::Identity)).is_err());
        assert!(op.push(Term::new(1.0, &[(0, 0, 1.0)], SpinAction::Identity(2), Factor::Identity)).is_err());
        assert!(op.push(Term::new(1.0, &[(0, 0, 1.0)], SpinAction::Identity(4), Factor::Momentum(3))).is_err());
    }
}
