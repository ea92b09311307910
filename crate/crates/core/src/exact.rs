//! Exact arithmetic for the small matrices of the Dirac algebra.
//!
//! Entries live in the Gaussian extension of `Q(√2)`: every real and imaginary
//! part is `p + q√2` with rational `p`, `q`. That covers the Pauli and Dirac
//! matrices, Kronecker products of them, and the orthogonal transforms with
//! `1/√2` entries, while keeping products and sums exact.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::Ratio;

pub type Rational = Ratio<i64>;

/// A real number `rat + root2 * √2` with rational coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Surd {
    pub rat: Rational,
    pub root2: Rational,
}

impl Surd {
    pub const ZERO: Surd = Surd {
        rat: Ratio::new_raw(0, 1),
        root2: Ratio::new_raw(0, 1),
    };
    pub const ONE: Surd = Surd {
        rat: Ratio::new_raw(1, 1),
        root2: Ratio::new_raw(0, 1),
    };

    pub fn integer(n: i64) -> Self {
        Surd {
            rat: Rational::from_integer(n),
            root2: Rational::from_integer(0),
        }
    }

    pub fn rational(num: i64, den: i64) -> Self {
        Surd {
            rat: Rational::new(num, den),
            root2: Rational::from_integer(0),
        }
    }

    /// `1/√2 = √2/2`.
    pub fn inv_sqrt2() -> Self {
        Surd {
            rat: Rational::from_integer(0),
            root2: Rational::new(1, 2),
        }
    }

    pub fn is_zero(&self) -> bool {
        *self.rat.numer() == 0 && *self.root2.numer() == 0
    }

    pub fn to_f64(self) -> f64 {
        ratio_to_f64(self.rat) + ratio_to_f64(self.root2) * std::f64::consts::SQRT_2
    }

    pub fn scale(self, r: Rational) -> Self {
        Surd {
            rat: self.rat * r,
            root2: self.root2 * r,
        }
    }
}

fn ratio_to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

impl Add for Surd {
    type Output = Surd;
    fn add(self, o: Surd) -> Surd {
        Surd {
            rat: self.rat + o.rat,
            root2: self.root2 + o.root2,
        }
    }
}

impl Sub for Surd {
    type Output = Surd;
    fn sub(self, o: Surd) -> Surd {
        Surd {
            rat: self.rat - o.rat,
            root2: self.root2 - o.root2,
        }
    }
}

impl Neg for Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd {
            rat: -self.rat,
            root2: -self.root2,
        }
    }
}

impl Mul for Surd {
    type Output = Surd;
    fn mul(self, o: Surd) -> Surd {
        let two = Rational::from_integer(2);
        Surd {
            rat: self.rat * o.rat + two * self.root2 * o.root2,
            root2: self.rat * o.root2 + self.root2 * o.rat,
        }
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.rat == Rational::from_integer(0), *self.root2.numer() == 0) {
            (_, true) => write!(f, "{}", self.rat),
            (true, false) => write!(f, "{}√2", self.root2),
            (false, false) => write!(f, "{}+{}√2", self.rat, self.root2),
        }
    }
}

/// A complex number whose parts are [`Surd`]s.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct ExactComplex {
    pub re: Surd,
    pub im: Surd,
}

impl ExactComplex {
    pub const ZERO: ExactComplex = ExactComplex {
        re: Surd::ZERO,
        im: Surd::ZERO,
    };
    pub const ONE: ExactComplex = ExactComplex {
        re: Surd::ONE,
        im: Surd::ZERO,
    };
    pub const I: ExactComplex = ExactComplex {
        re: Surd::ZERO,
        im: Surd::ONE,
    };

    pub fn real(re: Surd) -> Self {
        ExactComplex { re, im: Surd::ZERO }
    }

    pub fn integer(re: i64, im: i64) -> Self {
        ExactComplex {
            re: Surd::integer(re),
            im: Surd::integer(im),
        }
    }

    pub fn conj(self) -> Self {
        ExactComplex {
            re: self.re,
            im: -self.im,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn scale(self, r: Rational) -> Self {
        ExactComplex {
            re: self.re.scale(r),
            im: self.im.scale(r),
        }
    }
}

impl Add for ExactComplex {
    type Output = ExactComplex;
    fn add(self, o: Self) -> Self {
        ExactComplex {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }
}

impl Sub for ExactComplex {
    type Output = ExactComplex;
    fn sub(self, o: Self) -> Self {
        ExactComplex {
            re: self.re - o.re,
            im: self.im - o.im,
        }
    }
}

impl Neg for ExactComplex {
    type Output = ExactComplex;
    fn neg(self) -> Self {
        ExactComplex {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Mul for ExactComplex {
    type Output = ExactComplex;
    fn mul(self, o: Self) -> Self {
        ExactComplex {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
}

/// Dense matrix with exact entries, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<ExactComplex>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExactMatrix {
            rows,
            cols,
            data: vec![ExactComplex::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ExactComplex::ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> ExactComplex) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ExactMatrix { rows, cols, data }
    }

    /// Builds a matrix from integer real and imaginary parts.
    pub fn from_gaussian_integers(rows: usize, cols: usize, entries: &[(i64, i64)]) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count must equal rows*cols");
        Self::from_fn(rows, cols, |i, j| {
            let (re, im) = entries[i * cols + j];
            ExactComplex::integer(re, im)
        })
    }

    pub fn diagonal(entries: &[ExactComplex]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = *e;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn is_hermitian(&self) -> bool {
        self.is_square() && *self == self.adjoint()
    }

    pub fn scale(&self, r: Rational) -> Self {
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|e| e.scale(r)).collect(),
        }
    }

    pub fn scale_by(&self, c: ExactComplex) -> Self {
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|e| *e * c).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(ExactComplex::is_zero)
    }

    /// Largest absolute entry of `self - other`, evaluated after the exact
    /// subtraction; it is `0.0` exactly when the matrices are equal.
    pub fn max_abs_deviation(&self, other: &ExactMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| {
                let d = *a - *b;
                if d.is_zero() {
                    0.0
                } else {
                    d.to_c64().norm()
                }
            })
            .fold(0.0, f64::max)
    }

    pub fn to_float(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].to_c64())
    }

    /// Copies `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &ExactMatrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)];
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> ExactMatrix {
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    /// Direct sum `self ⊕ other`.
    pub fn direct_sum(&self, other: &ExactMatrix) -> ExactMatrix {
        let mut out = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        out.set_block(0, 0, self);
        out.set_block(self.rows, self.cols, other);
        out
    }

    pub fn matmul(&self, other: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = out[(i, j)] + a * b;
                    }
                }
            }
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for ExactMatrix {
    type Output = ExactComplex;
    fn index(&self, (i, j): (usize, usize)) -> &ExactComplex {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ExactMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut ExactComplex {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ExactMatrix {
    type Output = ExactMatrix;
    fn add(self, o: &ExactMatrix) -> ExactMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "shape mismatch");
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| *a + *b).collect(),
        }
    }
}

impl Sub for &ExactMatrix {
    type Output = ExactMatrix;
    fn sub(self, o: &ExactMatrix) -> ExactMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "shape mismatch");
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| *a - *b).collect(),
        }
    }
}

impl Neg for &ExactMatrix {
    type Output = ExactMatrix;
    fn neg(self) -> ExactMatrix {
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| -*a).collect(),
        }
    }
}

impl Mul for &ExactMatrix {
    type Output = ExactMatrix;
    fn mul(self, o: &ExactMatrix) -> ExactMatrix {
        self.matmul(o)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn surd_arithmetic_is_exact() {
        let r = Surd::inv_sqrt2();
        assert_eq!(r * r, Surd::rational(1, 2));
        let a = Surd {
            rat: Rational::new(3, 4),
            root2: Rational::new(-1, 2),
        };
        // (3/4 - √2/2)(3/4 + √2/2) = 9/16 - 1/2
        let b = Surd {
            rat: Rational::new(3, 4),
            root2: Rational::new(1, 2),
        };
        assert_eq!(a * b, Surd::rational(1, 16));
        assert!((a.to_f64() - (0.75 - std::f64::consts::FRAC_1_SQRT_2)).abs() < 1e-15);
    }

    #[test]
    fn complex_unit_squares_to_minus_one() {
        assert_eq!(ExactComplex::I * ExactComplex::I, -ExactComplex::ONE);
    }

    #[test]
    fn deviation_is_zero_iff_equal() {
        let a = ExactMatrix::from_gaussian_integers(2, 2, &[(1, 0), (0, 1), (0, -1), (2, 0)]);
        assert!(a.is_hermitian());
        assert_eq!(a.max_abs_deviation(&a.clone()), 0.0);
        let b = a.scale(Rational::from_integer(2));
        assert_eq!(b.max_abs_deviation(&a), 2.0);
    }

    #[test]
    fn direct_sum_and_blocks() {
        let i2 = ExactMatrix::identity(2);
        let d = i2.direct_sum(&(-&i2));
        assert_eq!(d.block(2, 2, 2, 2), -&i2);
        assert!(d.block(0, 2, 2, 2).is_zero());
    }
}
