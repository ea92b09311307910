//! The umbrella identity suite: every exact algebraic identity plus the
//! small-grid oracle comparisons, in one pass.

use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::antisym::{antisymmetrize, exchange, TwoBodyField};
use crate::clifford::{check_clifford, pauli, standard_dirac_rep, to_dmatrix, DiracRep};
use crate::error::Result;
use crate::exact::{ExactComplex, ExactMatrix, Rational};
use crate::field::Field;
use crate::grid::GridSpec;
use crate::hamiltonian::{hdc_minus_operator, hdc_operator, hdc_plus_operator, FormCoupling, PotentialSpec};
use crate::kron::{
    apply_left, apply_right, build_s, build_t, canonical_form, kron, kron_sum_blocks, mat, plus_form, two_body_free_symbol, vec,
    LowerCoupling,
};
use crate::operator::{build_dense, StructuredOperator};
use crate::probes::square::square_identity_check;
use crate::report::{CheckRecord, ProbeReport};

pub const ANCHOR_CLIFFORD: &str = "a_j a_k + a_k a_j = 2 delta_jk I4";
pub const ANCHOR_BLOCK: &str = "M1 (x) I2 + I2 (x) M2 = [[2B, A2, A1, 0], [A2, 0, 0, A1], [A1, 0, 0, A2], [0, A1, A2, -2B]]";
pub const ANCHOR_VEC: &str = "H0(xi1) (x) I4 + I4 (x) H0(xi2) = [[2m I4, h2, h1, 0], ...] after reordering";
pub const ANCHOR_MAT: &str = "Mat[(A (x) I2) vec M] = M tA, Mat[(I2 (x) B) vec M] = B M";
pub const ANCHOR_FORM: &str = "<H_DC Psi, Phi> = <H+_DC Psi, Phi> = <H-_DC Psi, Phi> on antisymmetric states";
pub const ANCHOR_CANO: &str = "tT H_DC T = diag(H00, -H00, H00, -H00) + mass coupling + V I16";
pub const ANCHOR_EXCHANGE: &str = "Pi H_DC = H_DC Pi";
pub const ANCHOR_DENSE: &str = "matrix-free apply = assembled matrix";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Random draws for the algebraic identities and the 16×16 symbols.
    pub trials: usize,
    /// Grid points per axis for the 6D exchange and form checks.
    pub field_points: usize,
    pub field_box: f64,
    /// Random vectors for the dense-oracle comparison at `N = 2`.
    pub dense_vectors: usize,
    pub square_points: usize,
    /// Negative control: replaces `β` by `I₄`.
    pub perturb_beta: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: 1,
            trials: 100,
            field_points: 4,
            field_box: 6.0,
            dense_vectors: 50,
            square_points: 8,
            perturb_beta: false,
        }
    }
}

/// The standard representation, or the control with `β = I₄`.
pub fn dirac_rep(perturb_beta: bool) -> DiracRep {
    let mut rep = standard_dirac_rep();
    if perturb_beta {
        rep.beta = ExactMatrix::identity(4);
    }
    rep
}

fn random_exact(rng: &mut impl Rng, n: usize) -> ExactMatrix {
    ExactMatrix::from_fn(n, n, |_, _| ExactComplex::integer(rng.gen_range(-5..=5), rng.gen_range(-5..=5)))
}

fn random_hermitian(rng: &mut impl Rng, n: usize) -> ExactMatrix {
    let a = random_exact(rng, n);
    &a + &a.adjoint()
}

/// Largest exact deviation of [`kron_sum_blocks`] from `M₁⊗I₂ + I₂⊗M₂`.
pub fn block_kron_deviation(trials: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let i2 = ExactMatrix::identity(2);
    let mut worst: f64 = 0.0;
    for t in 0..trials {
        let n = 1 + t % 2;
        let b = random_hermitian(&mut rng, n);
        let a1 = random_hermitian(&mut rng, n);
        let a2 = random_hermitian(&mut rng, n);
        let m = |a: &ExactMatrix| {
            let mut out = ExactMatrix::zeros(2 * n, 2 * n);
            out.set_block(0, 0, &b);
            out.set_block(0, n, a);
            out.set_block(n, 0, a);
            out.set_block(n, n, &(-&b));
            out
        };
        // Kronecker with I₂ on block level: interleave as a 2×2 grid of blocks.
        let big = |x: &ExactMatrix, left: bool| -> ExactMatrix {
            let mut out = ExactMatrix::zeros(4 * n, 4 * n);
            for (bi, bj) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                let blk = x.block(bi * n, bj * n, n, n);
                for d in 0..2 {
                    let (r, c) = if left { (2 * bi + d, 2 * bj + d) } else { (2 * d + bi, 2 * d + bj) };
                    out.set_block(r * n, c * n, &blk);
                }
            }
            out
        };
        let oracle = &big(&m(&a1), true) + &big(&m(&a2), false);
        if n == 1 {
            let plain = &kron(&m(&a1), &i2) + &kron(&i2, &m(&a2));
            worst = worst.max(plain.max_abs_deviation(&oracle));
        }
        worst = worst.max(kron_sum_blocks(&b, &a1, &a2)?.max_abs_deviation(&oracle));
    }
    Ok(worst)
}

/// Largest deviation between the plain-Kronecker and block-form two-body
/// symbols over random `(ξ₁, ξ₂, m)`.
pub fn vec_symbol_deviation(trials: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let xi1 = [0; 3].map(|_| rng.gen_range(-5.0..5.0));
        let xi2 = [0; 3].map(|_| rng.gen_range(-5.0..5.0));
        let m = rng.gen_range(0.0..3.0);
        worst = worst.max(two_body_free_symbol(xi1, xi2, m)?.consistency);
    }
    Ok(worst)
}

/// vec/Mat correspondence on Gaussian-integer matrices, where floating point is exact.
pub fn mat_deviation(trials: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || Matrix2::from_fn(|_, _| Complex64::new(rng.gen_range(-9..=9) as f64, rng.gen_range(-9..=9) as f64));
    let i2 = DMatrix::<Complex64>::identity(2, 2);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let (a, b, m) = (draw(), draw(), draw());
        let v = DVector::from_column_slice(vec(&m).as_slice());
        let left = to_dmatrix(&a).kronecker(&i2) * &v;
        let right = i2.kronecker(&to_dmatrix(&b)) * &v;
        let left = mat(&nalgebra::Vector4::from_column_slice(left.as_slice()));
        let right = mat(&nalgebra::Vector4::from_column_slice(right.as_slice()));
        worst = worst.max((left - apply_left(&a, &m)).norm()).max((right - apply_right(&b, &m)).norm());
        let packed = vec(&m);
        worst = worst.max((mat(&packed) - m).norm()).max((vec(&mat(&packed)) - packed).norm());
    }
    worst
}

fn sigma_dot_exact(xi: [i64; 3]) -> Result<ExactMatrix> {
    let mut out = ExactMatrix::zeros(2, 2);
    for (j, x) in xi.iter().enumerate() {
        out = &out + &pauli(j + 1)?.scale(Rational::from_integer(*x));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ConjugationDeviation {
    /// `ᵗS(A⊕B)S` against the half-sum/half-difference blocks.
    pub s: f64,
    /// `ᵗT·(plus form)·T` against the canonical form.
    pub t: f64,
    /// Same against the lower coupling as printed for `H₋₋`; nonzero.
    pub t_displayed: f64,
    pub orthogonal: bool,
}

pub fn conjugation_deviation(trials: usize, seed: u64) -> Result<ConjugationDeviation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (s, t) = (build_s(), build_t());
    let half = Rational::new(1, 2);
    let mut out = ConjugationDeviation {
        s: 0.0,
        t: 0.0,
        t_displayed: f64::INFINITY,
        orthogonal: s.is_orthogonal() && t.is_orthogonal(),
    };
    for _ in 0..trials {
        let a = random_exact(&mut rng, 4);
        let b = random_exact(&mut rng, 4);
        let mut want = ExactMatrix::zeros(8, 8);
        let sum = (&a + &b).scale(half);
        let diff = (&a - &b).scale(half);
        want.set_block(0, 0, &sum);
        want.set_block(0, 4, &diff);
        want.set_block(4, 0, &diff);
        want.set_block(4, 4, &sum);
        out.s = out.s.max(s.conjugate_exact(&a.direct_sum(&b)).max_abs_deviation(&want));

        let xi = [0; 3].map(|_| rng.gen_range(-4..=4));
        let h = kron(&ExactMatrix::identity(2), &sigma_dot_exact(xi)?);
        let mass = ExactMatrix::identity(4).scale(Rational::from_integer(rng.gen_range(1..=3)));
        let pot = ExactMatrix::identity(4).scale(Rational::new(rng.gen_range(-6..=6), 2));
        let conj = t.conjugate_exact(&plus_form(&h, &mass, &pot));
        out.t = out.t.max(conj.max_abs_deviation(&canonical_form(&h, &mass, &pot, LowerCoupling::Conjugated)));
        out.t_displayed = out.t_displayed.min(conj.max_abs_deviation(&canonical_form(&h, &mass, &pot, LowerCoupling::Displayed)));
    }
    Ok(out)
}

/// Potential used by the field checks.
pub fn field_potential() -> PotentialSpec {
    PotentialSpec::new(-0.5, 1.0)
}

/// Max relative deviation `‖Dx − Ax‖/‖Dx‖` between an assembled matrix and
/// the matrix-free apply over random vectors.
pub fn dense_deviation(op: &StructuredOperator, vectors: usize, rng: &mut impl Rng) -> Result<f64> {
    let dense = build_dense(op)?;
    let grid = *op.grid();
    let mut worst: f64 = 0.0;
    for _ in 0..vectors {
        let x = Field::random(grid, op.ndim(), op.ncomp(), rng);
        let y = op.apply(&x)?;
        let yd = &dense * DVector::from_column_slice(x.data());
        let err = yd.iter().zip(y.data()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        worst = worst.max(err / yd.norm().max(f64::MIN_POSITIVE));
    }
    Ok(worst)
}

/// Dense-oracle deviations at `N = 2` for `H_DC`, `H⁺_DC`, `H⁻_DC`.
pub fn dense_oracle(vectors: usize, seed: u64) -> Result<Vec<(String, f64)>> {
    let grid = GridSpec::new(2, 4.0)?;
    let pot = field_potential();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ops = [
        ("H_DC", hdc_operator(grid, &pot, 1.0)?),
        ("H+_DC", hdc_plus_operator(grid, &pot, 1.0, FormCoupling::ExchangeFolded)?),
        ("H-_DC", hdc_minus_operator(grid, &pot, 1.0, FormCoupling::ExchangeFolded)?),
    ];
    let mut out = Vec::new();
    for (name, op) in &ops {
        out.push((name.to_string(), dense_deviation(op, vectors, &mut rng)?));
    }
    Ok(out)
}

/// `‖[Π, H_DC]Ψ‖ / ‖H_DC Ψ‖` on a band-limited random field.
pub fn exchange_commutator(grid: GridSpec, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let psi = TwoBodyField::band_limited(grid, grid.points / 4, &mut rng);
    let op = hdc_operator(grid, &field_potential(), 1.0)?;
    let h_psi = op.apply(psi.field())?;
    let h_pi = op.apply(exchange(&psi).field())?;
    let pi_h = exchange(&TwoBodyField::from_field(h_psi.clone())?);
    Ok(pi_h.field().sub(&h_pi)?.norm() / h_psi.norm())
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct FormDeviation {
    pub plus: f64,
    pub minus: f64,
}

/// `|⟨H_DCΨ,Φ⟩ − ⟨H^±_DCΨ,Φ⟩| / (‖Ψ‖‖Φ‖)` on antisymmetric band-limited pairs.
pub fn form_deviation(grid: GridSpec, coupling: FormCoupling, seed: u64) -> Result<FormDeviation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mode = (grid.points / 4).max(1);
    let psi = antisymmetrize(&TwoBodyField::band_limited(grid, mode, &mut rng));
    let phi = antisymmetrize(&TwoBodyField::band_limited(grid, mode, &mut rng));
    let pot = field_potential();
    let scale = psi.norm() * phi.norm();
    let form = |op: StructuredOperator| -> Result<Complex64> { op.apply(psi.field())?.inner(phi.field()) };
    let full = form(hdc_operator(grid, &pot, 1.0)?)?;
    let plus = form(hdc_plus_operator(grid, &pot, 1.0, coupling)?)?;
    let minus = form(hdc_minus_operator(grid, &pot, 1.0, coupling)?)?;
    Ok(FormDeviation {
        plus: (full - plus).norm() / scale,
        minus: (full - minus).norm() / scale,
    })
}

pub const EXCHANGE_TOL: f64 = 1e-10;
pub const FORM_TOL: f64 = 1e-9;
pub const DENSE_TOL: f64 = 1e-12;
pub const VEC_TOL: f64 = 1e-12;

/// Runs the whole suite. Every record carries the identity it tests.
pub fn verify_all(opts: &VerifyOptions) -> Result<ProbeReport> {
    let start = std::time::Instant::now();
    let mut report = ProbeReport::new("verify", serde_json::to_value(opts)?);
    let seed = opts.seed;

    report.extend(check_clifford(&dirac_rep(opts.perturb_beta)));
    report.push(CheckRecord::compare("block Kronecker formula", ANCHOR_BLOCK, block_kron_deviation(opts.trials, seed)?, 0.0));
    report.push(CheckRecord::compare(
        "two-body symbol block form",
        ANCHOR_VEC,
        vec_symbol_deviation(opts.trials, seed.wrapping_add(1))?,
        VEC_TOL,
    ));
    report.push(CheckRecord::compare("vec/Mat actions", ANCHOR_MAT, mat_deviation(opts.trials, seed.wrapping_add(2)), 0.0));

    let conj = conjugation_deviation(opts.trials.min(20), seed.wrapping_add(3))?;
    report.push(CheckRecord::compare(
        "S and T orthogonal",
        "tS S = I8, tT T = I16",
        if conj.orthogonal { 0.0 } else { 1.0 },
        0.0,
    ));
    report.push(CheckRecord::compare("S conjugation", "tS (A + B) S = [[(A+B)/2, (A-B)/2], [(A-B)/2, (A+B)/2]]", conj.s, 0.0));
    report.push(CheckRecord::compare("T conjugation of the plus form", ANCHOR_CANO, conj.t, 0.0));

    let grid = GridSpec::new(opts.field_points, opts.field_box)?;
    let form = form_deviation(grid, FormCoupling::ExchangeFolded, seed.wrapping_add(4))?;
    report.push(CheckRecord::compare("form equality (plus)", ANCHOR_FORM, form.plus, FORM_TOL));
    report.push(CheckRecord::compare("form equality (minus)", ANCHOR_FORM, form.minus, FORM_TOL));
    report.push(CheckRecord::compare(
        "exchange commutes with H_DC",
        ANCHOR_EXCHANGE,
        exchange_commutator(grid, seed.wrapping_add(5))?,
        EXCHANGE_TOL,
    ));
    for (name, dev) in dense_oracle(opts.dense_vectors, seed.wrapping_add(6))? {
        report.push(CheckRecord::compare(format!("dense oracle {name}"), ANCHOR_DENSE, dev, DENSE_TOL));
    }

    let square = square_identity_check(1.0, GridSpec::new(opts.square_points, 6.0)?, seed.wrapping_add(7))?;
    report.extend(square.records());

    let literal = form_deviation(grid, FormCoupling::TotalMomentum, seed.wrapping_add(4))?;
    report.data = serde_json::json!({
        "conjugation": conj,
        "form_exchange_folded": form,
        "form_total_momentum": literal,
        "square": square,
    });
    report.elapsed_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}
