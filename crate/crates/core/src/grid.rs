//! Periodic tensor grids, momentum lattices and multidimensional FFTs.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Treatment of the unpaired Nyquist frequency of an even grid.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NyquistMode {
    /// Lattice `2π/L · {−N/2, …, N/2−1}`.
    #[default]
    Signed,
    /// Same lattice with the `−N/2` mode mapped to zero, which makes the
    /// momentum set symmetric under `p → −p`.
    Zeroed,
}

/// Regularization of Coulomb singularities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "lowercase")]
pub enum Regularization {
    /// Multiply the interaction by `χ(n|x₁−x₂|)²`.
    Bn { n: u32 },
    /// Clamp `1/r` at `value`.
    Cap { value: f64 },
}

impl Default for Regularization {
    fn default() -> Self {
        Regularization::Bn { n: 4 }
    }
}

impl fmt::Display for Regularization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regularization::Bn { n } => write!(f, "bn:{n}"),
            Regularization::Cap { value } => write!(f, "cap:{value}"),
        }
    }
}

impl FromStr for Regularization {
    type Err = Error;

    /// Parses `bn:<n>` or `cap:<value>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("regularization '{s}' is not bn:<n> or cap:<value>"));
        let (kind, arg) = s.split_once(':').ok_or_else(bad)?;
        match kind {
            "bn" => {
                let n: u32 = arg.parse().map_err(|_| bad())?;
                if n == 0 {
                    return Err(bad());
                }
                Ok(Regularization::Bn { n })
            }
            "cap" => {
                let value: f64 = arg.parse().map_err(|_| bad())?;
                if !(value > 0.0 && value.is_finite()) {
                    return Err(bad());
                }
                Ok(Regularization::Cap { value })
            }
            _ => Err(bad()),
        }
    }
}

/// Quintic smoothstep: 0 for `t ≤ 1`, 1 for `t ≥ 2`, `C²` in between.
pub fn chi(t: f64) -> f64 {
    if t <= 1.0 {
        0.0
    } else if t >= 2.0 {
        1.0
    } else {
        let s = t - 1.0;
        s * s * s * (s * (6.0 * s - 15.0) + 10.0)
    }
}

/// Derivative of [`chi`].
pub fn chi_prime(t: f64) -> f64 {
    if t <= 1.0 || t >= 2.0 {
        0.0
    } else {
        let s = t - 1.0;
        30.0 * s * s * (s - 1.0) * (s - 1.0)
    }
}

/// One-dimensional grid shared by every axis of a tensor grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub points: usize,
    pub box_len: f64,
    pub offset: bool,
    #[serde(default)]
    pub regularization: Regularization,
    #[serde(default)]
    pub nyquist: NyquistMode,
}

impl GridSpec {
    /// Offset grid with default regularization and signed Nyquist mode.
    pub fn new(points: usize, box_len: f64) -> Result<Self> {
        if points < 2 || points % 2 != 0 {
            return Err(Error::InvalidGrid(format!("points per axis must be even and >= 2, got {points}")));
        }
        if !(box_len > 0.0 && box_len.is_finite()) {
            return Err(Error::InvalidGrid(format!("box length must be positive, got {box_len}")));
        }
        Ok(GridSpec {
            points,
            box_len,
            offset: true,
            regularization: Regularization::default(),
            nyquist: NyquistMode::Signed,
        })
    }

    pub fn with_regularization(mut self, reg: Regularization) -> Self {
        self.regularization = reg;
        self
    }

    pub fn with_nyquist(mut self, mode: NyquistMode) -> Self {
        self.nyquist = mode;
        self
    }

    pub fn with_offset(mut self, offset: bool) -> Self {
        self.offset = offset;
        self
    }

    pub fn spacing(&self) -> f64 {
        self.box_len / self.points as f64
    }

    /// Coordinate of sample `j`.
    pub fn coord(&self, j: usize) -> f64 {
        let shift = if self.offset { 0.5 } else { 0.0 };
        (j as f64 + shift) * self.spacing() - 0.5 * self.box_len
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.points).map(|j| self.coord(j)).collect()
    }

    /// Momentum of FFT bin `q` (FFT ordering).
    pub fn wavenumber(&self, q: usize) -> f64 {
        let n = self.points;
        let unit = 2.0 * std::f64::consts::PI / self.box_len;
        if q < n / 2 {
            q as f64 * unit
        } else if q == n / 2 {
            match self.nyquist {
                NyquistMode::Signed => -((n / 2) as f64) * unit,
                NyquistMode::Zeroed => 0.0,
            }
        } else {
            (q as f64 - n as f64) * unit
        }
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.points).map(|q| self.wavenumber(q)).collect()
    }

    /// Number of sites of the `ndim`-dimensional tensor grid.
    pub fn sites(&self, ndim: usize) -> usize {
        self.points.pow(ndim as u32)
    }

    /// Quadrature weight `(L/N)^ndim`.
    pub fn cell_volume(&self, ndim: usize) -> f64 {
        self.spacing().powi(ndim as i32)
    }

    /// Per-axis indices of `site`, most significant axis first.
    pub fn site_indices(&self, site: usize, ndim: usize, out: &mut [usize]) {
        let mut rest = site;
        for a in (0..ndim).rev() {
            out[a] = rest % self.points;
            rest /= self.points;
        }
    }

    pub fn same_lattice(&self, other: &GridSpec) -> bool {
        self.points == other.points && self.box_len == other.box_len && self.offset == other.offset && self.nyquist == other.nyquist
    }

    /// Periodic minimum-image displacement.
    pub fn min_image(&self, d: f64) -> f64 {
        let l = self.box_len;
        d - l * (d / l).round()
    }
}

/// Multidimensional FFT over the tensor grid, one component at a time.
#[derive(Clone)]
pub struct FftNd {
    n: usize,
    ndim: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl FftNd {
    pub fn new(n: usize, ndim: usize) -> Self {
        let mut planner = FftPlanner::new();
        FftNd {
            n,
            ndim,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.ndim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Unnormalized forward transform (`e^{−2πi qj/N}` kernel).
    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, &self.forward);
    }

    /// Inverse transform including the `1/N^ndim` factor.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inverse);
        let s = 1.0 / self.len() as f64;
        data.iter_mut().for_each(|x| *x *= s);
    }

    fn transform(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        assert_eq!(data.len(), self.len(), "FFT buffer length mismatch");
        let n = self.n;
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        for axis in 0..self.ndim {
            let stride = n.pow((self.ndim - 1 - axis) as u32);
            if stride == 1 {
                fft.process_with_scratch(data, &mut scratch);
                continue;
            }
            let block = n * stride;
            let mut buf = vec![Complex64::default(); block];
            for chunk in data.chunks_mut(block) {
                for j in 0..n {
                    let row = &chunk[j * stride..(j + 1) * stride];
                    for (t, v) in row.iter().enumerate() {
                        buf[t * n + j] = *v;
                    }
                }
                fft.process_with_scratch(&mut buf, &mut scratch);
                for j in 0..n {
                    let row = &mut chunk[j * stride..(j + 1) * stride];
                    for (t, v) in row.iter_mut().enumerate() {
                        *v = buf[t * n + j];
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offset_grid_avoids_the_origin() {
        let g = GridSpec::new(8, 4.0).unwrap();
        assert!(g.coords().iter().all(|x| *x != 0.0));
        assert_eq!(g.coord(0), -1.75);
        assert_eq!(g.coord(7), 1.75);
        assert!(GridSpec::new(7, 1.0).is_err());
        assert!(GridSpec::new(8, -1.0).is_err());
    }

    #[test]
    fn momentum_lattice_orders() {
        let g = GridSpec::new(4, 2.0 * std::f64::consts::PI).unwrap();
        assert_eq!(g.wavenumbers(), vec![0.0, 1.0, -2.0, -1.0]);
        let z = g.with_nyquist(NyquistMode::Zeroed);
        assert_eq!(z.wavenumbers(), vec![0.0, 1.0, 0.0, -1.0]);
    }

    #[test]
    fn chi_profile() {
        assert_eq!(chi(0.5), 0.0);
        assert_eq!(chi(1.0), 0.0);
        assert_eq!(chi(2.0), 1.0);
        assert_eq!(chi(3.0), 1.0);
        assert!((chi(1.5) - 0.5).abs() < 1e-15);
        let h = 1e-6;
        for t in [1.1, 1.37, 1.8] {
            let fd = (chi(t + h) - chi(t - h)) / (2.0 * h);
            assert!((fd - chi_prime(t)).abs() < 1e-8);
        }
    }

    #[test]
    fn regularization_parses() {
        assert_eq!("bn:3".parse::<Regularization>().unwrap(), Regularization::Bn { n: 3 });
        assert_eq!("cap:12.5".parse::<Regularization>().unwrap(), Regularization::Cap { value: 12.5 });
        assert!("bn:0".parse::<Regularization>().is_err());
        assert!("foo".parse::<Regularization>().is_err());
        assert_eq!(Regularization::Bn { n: 5 }.to_string(), "bn:5");
    }

    #[test]
    fn fft_matches_direct_dft_in_3d() {
        let n = 4;
        let fft = FftNd::new(n, 3);
        let data: Vec<Complex64> = (0..64).map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos())).collect();
        let mut out = data.clone();
        fft.forward(&mut out);
        let idx = |s: usize| [s / 16, (s / 4) % 4, s % 4];
        for q in 0..64 {
            let qi = idx(q);
            let mut acc = Complex64::default();
            for (j, v) in data.iter().enumerate() {
                let ji = idx(j);
                let phase = -2.0 * std::f64::consts::PI * (qi[0] * ji[0] + qi[1] * ji[1] + qi[2] * ji[2]) as f64 / n as f64;
                acc += v * Complex64::from_polar(1.0, phase);
            }
            assert!((acc - out[q]).norm() < 1e-12);
        }
        fft.inverse(&mut out);
        for (a, b) in out.iter().zip(&data) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn min_image_wraps() {
        let g = GridSpec::new(8, 10.0).unwrap();
        assert!((g.min_image(9.0) + 1.0).abs() < 1e-15);
        assert!((g.min_image(-6.0) - 4.0).abs() < 1e-15);
    }
}
