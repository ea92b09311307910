//! Pauli and Dirac matrices, the free Dirac symbol and its plane-wave
//! eigenvectors.

use nalgebra::{DMatrix, Matrix2, Matrix4, Vector2, Vector4};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exact::{ExactComplex, ExactMatrix};
use crate::report::CheckRecord;

pub type Vec3 = [f64; 3];

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);
const CI: Complex64 = Complex64::new(0.0, 1.0);

/// Exact Pauli matrix `σ_j`, `j ∈ {1, 2, 3}`.
pub fn pauli(j: usize) -> Result<ExactMatrix> {
    let entries: [(i64, i64); 4] = match j {
        1 => [(0, 0), (1, 0), (1, 0), (0, 0)],
        2 => [(0, 0), (0, -1), (0, 1), (0, 0)],
        3 => [(1, 0), (0, 0), (0, 0), (-1, 0)],
        _ => return Err(Error::IndexOutOfRange(j)),
    };
    Ok(ExactMatrix::from_gaussian_integers(2, 2, &entries))
}

/// Floating-point Pauli matrix; `axis` is zero-based.
pub fn sigma(axis: usize) -> Matrix2<Complex64> {
    match axis {
        0 => Matrix2::new(C0, C1, C1, C0),
        1 => Matrix2::new(C0, -CI, CI, C0),
        2 => Matrix2::new(C1, C0, C0, -C1),
        _ => panic!("sigma axis {axis} out of range"),
    }
}

/// `σ·v`.
pub fn sigma_dot(v: Vec3) -> Matrix2<Complex64> {
    sigma(0) * Complex64::from(v[0]) + sigma(1) * Complex64::from(v[1]) + sigma(2) * Complex64::from(v[2])
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiracRep {
    pub alpha: [ExactMatrix; 3],
    pub beta: ExactMatrix,
}

impl DiracRep {
    /// `[α₁, α₂, α₃, β]`.
    pub fn generators(&self) -> [&ExactMatrix; 4] {
        [&self.alpha[0], &self.alpha[1], &self.alpha[2], &self.beta]
    }

    pub fn alpha_f(&self, axis: usize) -> Matrix4<Complex64> {
        to_matrix4(&self.alpha[axis])
    }

    pub fn beta_f(&self) -> Matrix4<Complex64> {
        to_matrix4(&self.beta)
    }
}

fn to_matrix4(m: &ExactMatrix) -> Matrix4<Complex64> {
    Matrix4::from_fn(|i, j| m[(i, j)].to_c64())
}

/// Standard representation: `α_j = antidiag(σ_j, σ_j)`, `β = diag(I₂, −I₂)`.
pub fn standard_dirac_rep() -> DiracRep {
    let alpha = [1, 2, 3].map(|j| {
        let s = pauli(j).expect("valid index");
        let mut a = ExactMatrix::zeros(4, 4);
        a.set_block(0, 2, &s);
        a.set_block(2, 0, &s);
        a
    });
    let beta = ExactMatrix::diagonal(&[
        ExactComplex::ONE,
        ExactComplex::ONE,
        -ExactComplex::ONE,
        -ExactComplex::ONE,
    ]);
    DiracRep { alpha, beta }
}

const GENERATOR_NAMES: [&str; 4] = ["alpha1", "alpha2", "alpha3", "beta"];

/// Evaluates the ten anticommutators `{a_j, a_k} = 2δ_jk I₄` exactly.
pub fn check_clifford(rep: &DiracRep) -> Vec<CheckRecord> {
    let gens = rep.generators();
    let two_i = ExactMatrix::identity(4).scale(2.into());
    let zero = ExactMatrix::zeros(4, 4);
    let mut out = Vec::with_capacity(10);
    for j in 0..4 {
        for k in j..4 {
            let anti = &(gens[j] * gens[k]) + &(gens[k] * gens[j]);
            let expected = if j == k { &two_i } else { &zero };
            let dev = anti.max_abs_deviation(expected);
            out.push(CheckRecord::compare(
                format!("anticommutator {{{}, {}}}", GENERATOR_NAMES[j], GENERATOR_NAMES[k]),
                "a_j a_k + a_k a_j = 2 delta_jk I4",
                dev,
                0.0,
            ));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct FreeSymbol {
    pub xi: Vec3,
    pub mass: f64,
    pub matrix: Matrix4<Complex64>,
}

impl FreeSymbol {
    pub fn energy(&self) -> f64 {
        (norm_sq(self.xi) + self.mass * self.mass).sqrt()
    }
}

pub(crate) fn norm_sq(v: Vec3) -> f64 {
    v[0] * v[0] + v[1] * v[1] + v[2] * v[2]
}

/// `α·ξ + mβ` in the standard representation.
pub fn free_symbol(xi: Vec3, m: f64) -> FreeSymbol {
    let rep = standard_dirac_rep();
    let mut matrix = rep.beta_f() * Complex64::from(m);
    for (a, x) in xi.iter().enumerate() {
        matrix += rep.alpha_f(a) * Complex64::from(*x);
    }
    FreeSymbol { xi, mass: m, matrix }
}

/// Orthonormal eigenbasis of the free symbol.
#[derive(Clone, Debug, PartialEq)]
pub struct PlaneWaveBasis {
    pub energy: f64,
    /// Eigenvalue `+E`, helicities `+1, −1`.
    pub positive: [Vector4<Complex64>; 2],
    /// Eigenvalue `−E`, helicities `+1, −1`.
    pub negative: [Vector4<Complex64>; 2],
}

impl PlaneWaveBasis {
    pub fn all(&self) -> [Vector4<Complex64>; 4] {
        [self.positive[0], self.positive[1], self.negative[0], self.negative[1]]
    }
}

/// Eigenvectors of `σ·n̂` for eigenvalues `+1` and `−1`.
fn helicity_spinors(xi: Vec3) -> [Vector2<Complex64>; 2] {
    let r = norm_sq(xi).sqrt();
    if r == 0.0 {
        return [Vector2::new(C1, C0), Vector2::new(C0, C1)];
    }
    let n = [xi[0] / r, xi[1] / r, xi[2] / r];
    let plus = if n[2] > -0.5 {
        Vector2::new(Complex64::from(1.0 + n[2]), Complex64::new(n[0], n[1]))
    } else {
        Vector2::new(Complex64::new(n[0], -n[1]), Complex64::from(1.0 - n[2]))
    };
    let plus = plus / Complex64::from(plus.norm());
    let minus = Vector2::new(-plus[1].conj(), plus[0].conj());
    [plus, minus]
}

fn fix_phase(v: Vector4<Complex64>) -> Vector4<Complex64> {
    let scale = v.norm();
    match v.iter().find(|c| c.norm() > 1e-12 * scale) {
        Some(lead) => v * (lead.conj() / lead.norm()),
        None => v,
    }
}

/// Helicity-basis eigenvectors of `α·ξ + mβ` with eigenvalues `±E`,
/// `E = √(|ξ|² + m²)`. Each vector's first nonzero component is real positive.
pub fn plane_wave_eigenvectors(xi: Vec3, m: f64) -> Result<PlaneWaveBasis> {
    if m < 0.0 {
        return Err(Error::InvalidArgument(format!("mass must be nonnegative, got {m}")));
    }
    let p = norm_sq(xi).sqrt();
    if p == 0.0 && m == 0.0 {
        return Err(Error::DegenerateSymbol);
    }
    let e = (p * p + m * m).sqrt();
    let nrm = ((e + m) / (2.0 * e)).sqrt();
    let ratio = p / (e + m);
    let chis = helicity_spinors(xi);
    let helicity = [1.0, -1.0];
    let mut positive = [Vector4::zeros(); 2];
    let mut negative = [Vector4::zeros(); 2];
    for (i, chi) in chis.iter().enumerate() {
        let s = helicity[i] * ratio;
        let u = Vector4::new(chi[0], chi[1], chi[0] * s, chi[1] * s) * Complex64::from(nrm);
        let v = Vector4::new(-chi[0] * s, -chi[1] * s, chi[0], chi[1]) * Complex64::from(nrm);
        positive[i] = fix_phase(u);
        negative[i] = fix_phase(v);
    }
    Ok(PlaneWaveBasis {
        energy: e,
        positive,
        negative,
    })
}

pub(crate) fn to_dmatrix<const R: usize, const C: usize>(
    m: &nalgebra::SMatrix<Complex64, R, C>,
) -> DMatrix<Complex64> {
    DMatrix::from_fn(R, C, |i, j| m[(i, j)])
}
