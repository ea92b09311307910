//! Thick-restart Lanczos with full reorthogonalization, and a dense oracle.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{pairwise_sum, pairwise_sum_real};
use crate::operator::DENSE_LIMIT;

type C = Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "sigma", rename_all = "lowercase")]
pub enum Target {
    Lowest,
    Highest,
    /// Largest `|θ|`, used on inverted operators.
    LargestMagnitude,
    /// Eigenvalues closest to the shift, found through `(O − σ)²`.
    Nearest(f64),
}

#[derive(Clone, Debug)]
pub struct LanczosOptions {
    pub how_many: usize,
    pub target: Target,
    /// Absolute residual tolerance `‖Ov − θv‖`.
    pub tol: f64,
    /// Budget of operator applications.
    pub max_matvecs: usize,
    /// Maximum basis size before a restart.
    pub krylov_dim: usize,
    pub seed: u64,
    pub start: Option<Vec<C>>,
    pub check_hermitian: bool,
    /// With [`Target::LargestMagnitude`], Ritz values below this magnitude
    /// need not converge.
    pub magnitude_floor: f64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions {
            how_many: 1,
            target: Target::Lowest,
            tol: 1e-8,
            max_matvecs: 20_000,
            krylov_dim: 40,
            seed: 0,
            start: None,
            check_hermitian: true,
            magnitude_floor: 0.0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EigResult {
    /// Ascending.
    pub ritz_values: Vec<f64>,
    /// `‖O v_i − θ_i v_i‖`, recomputed from the returned vectors.
    pub residual_norms: Vec<f64>,
    pub converged: Vec<bool>,
    /// Operator applications used.
    pub iterations: usize,
    pub restarts: usize,
    /// Smallest Ritz value of the projected matrix after every expansion step.
    pub lowest_history: Vec<f64>,
    #[serde(skip)]
    pub vectors: Vec<Vec<C>>,
}

impl EigResult {
    pub fn all_converged(&self) -> bool {
        self.converged.iter().all(|c| *c)
    }
}

fn dotc(a: &[C], b: &[C]) -> C {
    pairwise_sum(a.len(), &|i| a[i].conj() * b[i])
}

fn norm(a: &[C]) -> f64 {
    pairwise_sum_real(a.len(), &|i| a[i].norm_sqr()).sqrt()
}

fn random_vector(dim: usize, rng: &mut impl Rng) -> Vec<C> {
    (0..dim).map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

/// Removes the components of `w` along `basis` (two passes), returning the
/// accumulated coefficients.
fn orthogonalize(basis: &[Vec<C>], w: &mut [C]) -> Vec<C> {
    let mut total = vec![C::default(); basis.len()];
    for _ in 0..2 {
        let h: Vec<C> = basis.par_iter().map(|v| dotc(v, w)).collect();
        w.par_chunks_mut(4096).enumerate().for_each(|(ci, chunk)| {
            let off = ci * 4096;
            for (v, hv) in basis.iter().zip(&h) {
                let seg = &v[off..off + chunk.len()];
                for (x, y) in chunk.iter_mut().zip(seg) {
                    *x -= hv * y;
                }
            }
        });
        for (t, x) in total.iter_mut().zip(&h) {
            *t += x;
        }
    }
    total
}

/// `Σ_j V_j Y[j, col]` for each selected column.
fn combine(basis: &[Vec<C>], y: &DMatrix<C>, cols: &[usize]) -> Vec<Vec<C>> {
    let dim = basis[0].len();
    cols.par_iter()
        .map(|&c| {
            let mut out = vec![C::default(); dim];
            for (j, v) in basis.iter().enumerate() {
                let coef = y[(j, c)];
                if coef == C::default() {
                    continue;
                }
                for (o, x) in out.iter_mut().zip(v) {
                    *o += coef * x;
                }
            }
            out
        })
        .collect()
}

fn hermitian_eig(h: &DMatrix<C>) -> (Vec<f64>, DMatrix<C>) {
    let sym = (h + h.adjoint()) * C::from(0.5);
    let eig = nalgebra::linalg::SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = DMatrix::from_fn(h.nrows(), h.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

/// Spot-checks `|⟨Ox,y⟩ − ⟨x,Oy⟩| ≤ 1e-8·‖x‖‖y‖·max(1, ‖Ox‖/‖x‖)` on three
/// random pairs.
pub fn check_hermitian<F>(apply: &F, dim: usize, seed: u64) -> Result<f64>
where
    F: Fn(&[C]) -> Vec<C> + Sync,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_4e27);
    let mut worst: f64 = 0.0;
    for _ in 0..3 {
        let x = random_vector(dim, &mut rng);
        let y = random_vector(dim, &mut rng);
        let ox = apply(&x);
        let oy = apply(&y);
        let dev = (dotc(&y, &ox) - dotc(&oy, &x)).norm();
        let (nx, ny) = (norm(&x), norm(&y));
        let bound = 1e-8 * nx * ny * (norm(&ox) / nx).max(1.0);
        if dev > bound {
            return Err(Error::NonHermitian { deviation: dev, bound });
        }
        worst = worst.max(dev / (nx * ny));
    }
    Ok(worst)
}

/// Eigenpairs of a Hermitian operator given only its action.
pub fn lanczos<F>(apply: F, dim: usize, opts: &LanczosOptions) -> Result<EigResult>
where
    F: Fn(&[C]) -> Vec<C> + Sync,
{
    if dim == 0 || opts.how_many == 0 || opts.how_many > dim {
        return Err(Error::InvalidArgument(format!("how_many = {} for dimension {dim}", opts.how_many)));
    }
    if opts.check_hermitian {
        check_hermitian(&apply, dim, opts.seed)?;
    }
    let kdim = opts.krylov_dim.max(opts.how_many + 8).min(dim);
    let keep = (opts.how_many + (kdim - opts.how_many) / 2).min(kdim - 1).max(opts.how_many);
    let mut matvecs = 0usize;
    let sigma = match opts.target {
        Target::Nearest(s) => Some(s),
        _ => None,
    };
    let op = |x: &[C], count: &mut usize| -> Vec<C> {
        match sigma {
            None => {
                *count += 1;
                apply(x)
            }
            Some(s) => {
                let mut y = apply(x);
                y.iter_mut().zip(x).for_each(|(a, b)| *a -= s * b);
                let mut z = apply(&y);
                z.iter_mut().zip(&y).for_each(|(a, b)| *a -= s * b);
                *count += 2;
                z
            }
        }
    };
    // Ordering of projected eigenvalues (ascending) into "most wanted first".
    let wanted_order = |vals: &[f64]| -> Vec<usize> {
        let mut idx: Vec<usize> = (0..vals.len()).collect();
        match opts.target {
            Target::Highest => idx.reverse(),
            Target::LargestMagnitude => idx.sort_by(|&a, &b| vals[b].abs().total_cmp(&vals[a].abs())),
            _ => {}
        }
        idx
    };

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut v0 = match &opts.start {
        Some(s) if s.len() == dim => s.clone(),
        Some(s) => return Err(Error::InvalidArgument(format!("start vector has length {}, expected {dim}", s.len()))),
        None => random_vector(dim, &mut rng),
    };
    let n0 = norm(&v0);
    if n0 == 0.0 {
        return Err(Error::ZeroField);
    }
    v0.iter_mut().for_each(|x| *x /= n0);

    let mut basis: Vec<Vec<C>> = vec![v0];
    let mut h = DMatrix::<C>::zeros(kdim, kdim);
    let mut locked = 0usize;
    let mut history = Vec::new();
    let mut restarts = 0usize;
    let (values, vectors, residuals) = loop {
        let mut residual = Vec::new();
        let mut beta = 0.0;
        for j in locked..kdim {
            let mut w = op(&basis[j], &mut matvecs);
            let coef = orthogonalize(&basis, &mut w);
            for (i, c) in coef.iter().enumerate() {
                h[(i, j)] = *c;
                h[(j, i)] = c.conj();
            }
            h[(j, j)] = C::from(coef[j].re);
            beta = norm(&w);
            let sub = h.view((0, 0), (j + 1, j + 1)).into_owned();
            history.push(hermitian_eig(&sub).0[0]);
            let scale = h.view((0, 0), (j + 1, j + 1)).iter().fold(0.0_f64, |a, z| a.max(z.norm())).max(1e-300);
            if beta <= 1e-13 * scale {
                // Invariant subspace: continue from a fresh orthogonal direction.
                let mut fresh = random_vector(dim, &mut rng);
                orthogonalize(&basis, &mut fresh);
                let nf = norm(&fresh);
                fresh.iter_mut().for_each(|x| *x /= nf);
                beta = 0.0;
                w = fresh;
            } else {
                w.iter_mut().for_each(|x| *x /= beta);
            }
            if j + 1 < kdim {
                h[(j + 1, j)] = C::from(beta);
                h[(j, j + 1)] = C::from(beta);
                basis.push(w);
            } else {
                residual = w;
            }
        }

        let (vals, y) = hermitian_eig(&h);
        let order = wanted_order(&vals);
        let wanted: Vec<usize> = order[..opts.how_many].to_vec();
        let floor = match opts.target {
            Target::LargestMagnitude => opts.magnitude_floor,
            _ => 0.0,
        };
        let estimates: Vec<f64> = wanted
            .iter()
            .filter(|&&i| vals[i].abs() >= floor)
            .map(|&i| beta * y[(kdim - 1, i)].norm())
            .collect();
        let exhausted = matvecs >= opts.max_matvecs;
        let promising = match sigma {
            None => estimates.iter().all(|e| *e <= opts.tol),
            Some(_) => true,
        };
        if promising || exhausted {
            let keep_cols: Vec<usize> = order[..keep].to_vec();
            let candidates = match sigma {
                None => combine(&basis, &y, &wanted),
                Some(_) => combine(&basis, &y, &keep_cols),
            };
            let (values, vectors, residuals) = finalize(&apply, candidates, opts.how_many, sigma, &mut matvecs);
            if exhausted || residuals.iter().zip(&values).all(|(r, v)| *r <= opts.tol || v.abs() < floor) {
                break (values, vectors, residuals);
            }
        }

        // Thick restart on the most wanted Ritz vectors.
        let keep_cols: Vec<usize> = order[..keep].to_vec();
        let new_basis = combine(&basis, &y, &keep_cols);
        let mut new_h = DMatrix::<C>::zeros(kdim, kdim);
        for (a, &c) in keep_cols.iter().enumerate() {
            new_h[(a, a)] = C::from(vals[c]);
            let b = y[(kdim - 1, c)].conj() * beta;
            new_h[(keep, a)] = b;
            new_h[(a, keep)] = b.conj();
        }
        basis = new_basis;
        basis.push(residual);
        h = new_h;
        locked = keep;
        restarts += 1;
    };

    let converged = residuals.iter().map(|r| *r <= opts.tol).collect();
    Ok(EigResult {
        ritz_values: values,
        residual_norms: residuals,
        converged,
        iterations: matvecs,
        restarts,
        lowest_history: history,
        vectors,
    })
}

/// Rayleigh–Ritz of the original operator on `candidates`, returning the
/// `how_many` wanted pairs sorted ascending with recomputed residuals.
fn finalize<F>(apply: &F, mut candidates: Vec<Vec<C>>, how_many: usize, sigma: Option<f64>, matvecs: &mut usize) -> (Vec<f64>, Vec<Vec<C>>, Vec<f64>)
where
    F: Fn(&[C]) -> Vec<C> + Sync,
{
    // Re-orthonormalize (Ritz vectors are orthonormal up to rounding).
    let mut ortho: Vec<Vec<C>> = Vec::with_capacity(candidates.len());
    for mut v in candidates.drain(..) {
        orthogonalize(&ortho, &mut v);
        let n = norm(&v);
        if n > 1e-10 {
            v.iter_mut().for_each(|x| *x /= n);
            ortho.push(v);
        }
    }
    let images: Vec<Vec<C>> = ortho.iter().map(|v| apply(v)).collect();
    *matvecs += ortho.len();
    let k = ortho.len();
    let g = DMatrix::from_fn(k, k, |i, j| dotc(&ortho[i], &images[j]));
    let (vals, z) = hermitian_eig(&g);
    let mut idx: Vec<usize> = (0..k).collect();
    if let Some(s) = sigma {
        idx.sort_by(|&a, &b| (vals[a] - s).abs().total_cmp(&(vals[b] - s).abs()));
        idx.truncate(how_many);
    } else {
        idx.truncate(how_many.min(k));
    }
    idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let vectors = combine(&ortho, &z, &idx);
    let applied = combine(&images, &z, &idx);
    let values: Vec<f64> = idx.iter().map(|&i| vals[i]).collect();
    let residuals = vectors
        .iter()
        .zip(&applied)
        .zip(&values)
        .map(|((v, av), th)| {
            let r: Vec<C> = av.iter().zip(v).map(|(a, b)| a - b * th).collect();
            norm(&r)
        })
        .collect();
    (values, vectors, residuals)
}

/// Recomputes `‖Ov − θv‖` for each returned pair.
pub fn recompute_residuals<F>(apply: &F, result: &EigResult) -> Vec<f64>
where
    F: Fn(&[C]) -> Vec<C> + Sync,
{
    result
        .vectors
        .iter()
        .zip(&result.ritz_values)
        .map(|(v, th)| {
            let av = apply(v);
            let r: Vec<C> = av.iter().zip(v).map(|(a, b)| a - b * th).collect();
            norm(&r)
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct ShiftInvertOptions {
    pub sigma: f64,
    pub how_many: usize,
    /// Residual tolerance for `‖Ov − Ev‖` of the returned pairs.
    pub tol: f64,
    pub inner_tol: f64,
    pub inner_max: usize,
    /// Budget of outer (inverse) applications.
    pub max_outer: usize,
    pub krylov_dim: usize,
    pub seed: u64,
    pub start: Option<Vec<C>>,
    /// Only eigenvalues with `|E − σ| < radius` have to converge.
    pub radius: f64,
}

impl Default for ShiftInvertOptions {
    fn default() -> Self {
        ShiftInvertOptions {
            sigma: 0.0,
            how_many: 1,
            tol: 1e-6,
            inner_tol: 1e-11,
            inner_max: 2000,
            max_outer: 400,
            krylov_dim: 30,
            seed: 0,
            start: None,
            radius: f64::INFINITY,
        }
    }
}

/// Eigenpairs of `O` nearest `σ` from Lanczos on `(O − σ)⁻¹`. Each inverse
/// application is a MINRES solve preconditioned by `precond ≈ |O − σ|⁻¹`.
/// Values are sorted ascending; residuals are those of `O` itself and
/// `iterations` counts applications of `O`.
pub fn shift_invert<F, M>(apply: F, precond: M, dim: usize, opts: &ShiftInvertOptions) -> Result<EigResult>
where
    F: Fn(&[C]) -> Vec<C> + Sync,
    M: Fn(&[C]) -> Vec<C> + Sync,
{
    let sigma = opts.sigma;
    let shifted = |x: &[C]| -> Vec<C> {
        let mut y = apply(x);
        y.iter_mut().zip(x).for_each(|(a, b)| *a -= b * sigma);
        y
    };
    let count = std::sync::atomic::AtomicUsize::new(0);
    let inverse = |x: &[C]| {
        let (y, info) = minres(&shifted, &precond, x, opts.inner_tol, opts.inner_max);
        count.fetch_add(info.iterations + 1, std::sync::atomic::Ordering::Relaxed);
        y
    };
    let lopts = LanczosOptions {
        how_many: opts.how_many,
        target: Target::LargestMagnitude,
        tol: 1e-2 * opts.tol,
        max_matvecs: opts.max_outer,
        krylov_dim: opts.krylov_dim,
        seed: opts.seed,
        start: opts.start.clone(),
        check_hermitian: false,
        magnitude_floor: 1.0 / opts.radius,
    };
    let res = lanczos(inverse, dim, &lopts)?;
    let mut pairs: Vec<(f64, Vec<C>)> =
        res.ritz_values.iter().zip(res.vectors).map(|(t, v)| (sigma + 1.0 / t, v)).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let residuals: Vec<f64> = pairs
        .iter()
        .map(|(e, v)| {
            let r: Vec<C> = apply(v).iter().zip(v).map(|(a, b)| a - b * e).collect();
            norm(&r) / norm(v)
        })
        .collect();
    Ok(EigResult {
        ritz_values: pairs.iter().map(|p| p.0).collect(),
        converged: residuals.iter().map(|r| *r <= opts.tol).collect(),
        residual_norms: residuals,
        iterations: count.into_inner() + pairs.len(),
        restarts: res.restarts,
        lowest_history: res.lowest_history,
        vectors: pairs.into_iter().map(|p| p.1).collect(),
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct MinresInfo {
    pub iterations: usize,
    /// Preconditioned residual norm relative to that of `b`.
    pub relative_residual: f64,
    pub converged: bool,
}

fn dot(a: &[C], b: &[C]) -> C {
    a.par_iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Preconditioned MINRES for Hermitian `A` (possibly indefinite) with a
/// Hermitian positive definite preconditioner `precond ≈ |A|⁻¹`.
pub fn minres<A, M>(apply: &A, precond: &M, b: &[C], tol: f64, max_iter: usize) -> (Vec<C>, MinresInfo)
where
    A: Fn(&[C]) -> Vec<C> + Sync,
    M: Fn(&[C]) -> Vec<C> + Sync,
{
    let n = b.len();
    let mut x = vec![C::default(); n];
    let mut v_prev = vec![C::default(); n];
    let mut v = b.to_vec();
    let mut z = precond(&v);
    let mut gamma = dot(&z, &v).re.max(0.0).sqrt();
    let mut info = MinresInfo::default();
    if gamma == 0.0 {
        info.converged = true;
        return (x, info);
    }
    let beta0 = gamma;
    let (mut gamma_prev, mut eta) = (1.0, gamma);
    let (mut c_prev, mut c, mut s_prev, mut s) = (1.0, 1.0, 0.0, 0.0);
    let mut w_prev = vec![C::default(); n];
    let mut w = vec![C::default(); n];
    for j in 1..=max_iter {
        z.par_iter_mut().for_each(|t| *t /= gamma);
        let az = apply(&z);
        let delta = dot(&az, &z).re;
        let (a1, a2) = (delta / gamma, gamma / gamma_prev);
        let v_next: Vec<C> = az
            .par_iter()
            .zip(&v)
            .zip(&v_prev)
            .map(|((p, q), r)| p - q * a1 - r * a2)
            .collect();
        let z_next = precond(&v_next);
        let gamma_next = dot(&z_next, &v_next).re.max(0.0).sqrt();
        let alpha0 = c * delta - c_prev * s * gamma;
        let alpha1 = alpha0.hypot(gamma_next);
        let alpha2 = s * delta + c_prev * c * gamma;
        let alpha3 = s_prev * gamma;
        let (c_next, s_next) = (alpha0 / alpha1, gamma_next / alpha1);
        let w_next: Vec<C> = z
            .par_iter()
            .zip(&w_prev)
            .zip(&w)
            .map(|((zz, wp), ww)| (zz - wp * alpha3 - ww * alpha2) / alpha1)
            .collect();
        let step = c_next * eta;
        x.par_iter_mut().zip(&w_next).for_each(|(xi, wi)| *xi += wi * step);
        eta = -s_next * eta;
        info.iterations = j;
        info.relative_residual = eta.abs() / beta0;
        if info.relative_residual <= tol || gamma_next == 0.0 {
            info.converged = true;
            break;
        }
        v_prev = std::mem::replace(&mut v, v_next);
        z = z_next;
        w_prev = std::mem::replace(&mut w, w_next);
        gamma_prev = gamma;
        gamma = gamma_next;
        c_prev = c;
        c = c_next;
        s_prev = s;
        s = s_next;
    }
    (x, info)
}

#[derive(Clone, Debug)]
pub struct DenseEig {
    /// Ascending.
    pub values: Vec<f64>,
    pub vectors: DMatrix<C>,
}

impl DenseEig {
    /// `‖M − VΛV†‖_F / ‖M‖_F`.
    pub fn reconstruction_error(&self, m: &DMatrix<C>) -> f64 {
        let lam = DMatrix::from_diagonal(&DVector::from_iterator(self.values.len(), self.values.iter().map(|v| C::from(*v))));
        let rec = &self.vectors * lam * self.vectors.adjoint();
        (m - rec).norm() / m.norm().max(1e-300)
    }
}

/// Full Hermitian eigendecomposition.
pub fn dense_eig(m: &DMatrix<C>) -> Result<DenseEig> {
    let dim = m.nrows();
    if dim > DENSE_LIMIT {
        return Err(Error::DimensionTooLarge { dim, limit: DENSE_LIMIT });
    }
    if m.ncols() != dim {
        return Err(Error::InvalidArgument("matrix must be square".into()));
    }
    let (values, vectors) = hermitian_eig(m);
    Ok(DenseEig { values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minres_solves_an_indefinite_system() {
        let n = 60;
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let diag: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 1.0 + i as f64 } else { -0.5 - i as f64 }).collect();
        let off: Vec<C> = (0..n).map(|_| C::new(rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2))).collect();
        // Tridiagonal Hermitian with a diagonal |A|⁻¹ preconditioner.
        let apply = |x: &[C]| -> Vec<C> {
            (0..n)
                .map(|i| {
                    let mut y = x[i] * diag[i];
                    if i > 0 {
                        y += off[i - 1].conj() * x[i - 1];
                    }
                    if i + 1 < n {
                        y += off[i] * x[i + 1];
                    }
                    y
                })
                .collect()
        };
        let precond = |x: &[C]| -> Vec<C> { x.iter().zip(&diag).map(|(v, d)| v / d.abs()).collect() };
        let b: Vec<C> = (0..n).map(|i| C::new(1.0, i as f64 * 0.1)).collect();
        let (x, info) = minres(&apply, &precond, &b, 1e-12, 500);
        assert!(info.converged);
        let r: Vec<C> = apply(&x).iter().zip(&b).map(|(a, c)| a - c).collect();
        assert!(norm(&r) / norm(&b) < 1e-10, "{info:?}");
    }

    fn diag_op(d: Vec<f64>) -> impl Fn(&[C]) -> Vec<C> + Sync {
        move |x: &[C]| x.iter().zip(&d).map(|(a, b)| a * b).collect()
    }

    #[test]
    fn lowest_of_a_diagonal_operator() {
        let d: Vec<f64> = (1..=100).map(|i| i as f64).collect();
        let opts = LanczosOptions {
            how_many: 3,
            tol: 1e-10,
            krylov_dim: 30,
            ..Default::default()
        };
        let r = lanczos(diag_op(d.clone()), 100, &opts).unwrap();
        assert!(r.all_converged());
        for (got, want) in r.ritz_values.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-9);
        }
        let again = recompute_residuals(&diag_op(d), &r);
        for (a, b) in again.iter().zip(&r.residual_norms) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn lowest_ritz_value_never_increases() {
        let d: Vec<f64> = (0..400).map(|i| ((i * 37) % 400) as f64 * 0.01).collect();
        let opts = LanczosOptions {
            how_many: 2,
            tol: 1e-9,
            krylov_dim: 20,
            ..Default::default()
        };
        let r = lanczos(diag_op(d), 400, &opts).unwrap();
        assert!(r.restarts > 0);
        for w in r.lowest_history.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "{} then {}", w[0], w[1]);
        }
    }

    #[test]
    fn highest_and_nearest() {
        let d: Vec<f64> = (0..200).map(|i| i as f64 * 0.5 - 30.0).collect();
        let hi = lanczos(
            diag_op(d.clone()),
            200,
            &LanczosOptions {
                how_many: 2,
                target: Target::Highest,
                tol: 1e-9,
                ..Default::default()
            },
        )
        .unwrap();
        assert!((hi.ritz_values[1] - 69.5).abs() < 1e-8);
        assert!((hi.ritz_values[0] - 69.0).abs() < 1e-8);
        let near = lanczos(
            diag_op(d),
            200,
            &LanczosOptions {
                how_many: 2,
                target: Target::Nearest(0.3),
                tol: 1e-8,
                max_matvecs: 40_000,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(near.all_converged());
        assert!((near.ritz_values[0] - 0.0).abs() < 1e-8);
        assert!((near.ritz_values[1] - 0.5).abs() < 1e-8);
    }

    #[test]
    fn non_hermitian_operators_are_rejected() {
        let op = |x: &[C]| {
            let mut y = vec![C::default(); x.len()];
            for i in 1..x.len() {
                y[i] = x[i - 1];
            }
            y
        };
        let r = lanczos(op, 50, &LanczosOptions::default());
        assert!(matches!(r, Err(Error::NonHermitian { .. })));
    }

    #[test]
    fn dense_oracle_examples() {
        let rep = crate::clifford::standard_dirac_rep();
        let beta = rep.beta.to_float();
        let e = dense_eig(&beta).unwrap();
        assert_eq!(e.values, vec![-1.0, -1.0, 1.0, 1.0]);
        assert!(e.reconstruction_error(&beta) < 1e-14);
        let s = crate::clifford::to_dmatrix(&crate::clifford::free_symbol([3.0, 0.0, 4.0], 0.0).matrix);
        let e = dense_eig(&s).unwrap();
        for (g, w) in e.values.iter().zip([-5.0, -5.0, 5.0, 5.0]) {
            assert!((g - w).abs() < 1e-12);
        }
        assert!(matches!(
            dense_eig(&DMatrix::zeros(DENSE_LIMIT + 1, DENSE_LIMIT + 1)),
            Err(Error::DimensionTooLarge { .. })
        ));
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let d: Vec<f64> = (0..300).map(|i| (i as f64).sqrt()).collect();
        let opts = LanczosOptions {
            how_many: 2,
            tol: 1e-9,
            seed: 42,
            ..Default::default()
        };
        let a = lanczos(diag_op(d.clone()), 300, &opts).unwrap();
        let b = lanczos(diag_op(d), 300, &opts).unwrap();
        assert_eq!(a.ritz_values, b.ritz_values);
        assert_eq!(a.residual_norms, b.residual_norms);
    }
}
