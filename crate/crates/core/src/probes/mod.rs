//! Numerical probes of spectral statements: Weyl ladders, Hardy-type
//! inequalities, squared-operator identities, a hydrogenic benchmark and the
//! κ-scan of the relative-coordinate operator.

pub mod hardy;
pub mod hydrogenic;
pub mod kappa;
pub mod square;
pub mod weyl;

use num_complex::Complex64;

use crate::field::Field;
use crate::grid::{FftNd, GridSpec};

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len().min(y.len()) as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// `Σ_c conj(f_c)·g_c` at every site.
pub(crate) fn pointwise_inner(f: &Field, g: &Field) -> Vec<Complex64> {
    let sites = f.sites();
    let mut out = vec![Complex64::default(); sites];
    for c in 0..f.ncomp() {
        for ((o, a), b) in out.iter_mut().zip(f.component(c)).zip(g.component(c)) {
            *o += a.conj() * b;
        }
    }
    out
}

/// Applies a Fourier-diagonal multiplier to every component of a 3D field.
pub fn fourier_multiply(f: &Field, symbol: &[f64]) -> Field {
    f.with_data(fourier_multiply_slice(f.grid(), f.data(), symbol))
}

/// Same on raw component-major data over a 3D grid.
pub(crate) fn fourier_multiply_slice(grid: &GridSpec, x: &[Complex64], symbol: &[f64]) -> Vec<Complex64> {
    let fft = FftNd::new(grid.points, 3);
    let sites = grid.sites(3);
    let mut data = x.to_vec();
    for comp in data.chunks_mut(sites) {
        fft.forward(comp);
        comp.iter_mut().zip(symbol).for_each(|(z, s)| *z *= s);
        fft.inverse(comp);
    }
    data
}

/// `(a|k|² + b)^{−1/2}`: the exact `|H₀ − σ|⁻¹` of every free operator here
/// at the centre of its gap, by the square identities.
pub(crate) fn inverse_root_symbol(grid: &GridSpec, a: f64, b: f64) -> Vec<f64> {
    k_squared(grid).iter().map(|k| 1.0 / (a * k + b).sqrt()).collect()
}

/// `|k|²` on the 3D FFT lattice of `f`'s grid.
pub fn k_squared(grid: &GridSpec) -> Vec<f64> {
    let k = grid.wavenumbers();
    let n = grid.points;
    (0..grid.sites(3))
        .map(|s| {
            let (a, b, c) = (s / (n * n), (s / n) % n, s % n);
            k[a] * k[a] + k[b] * k[b] + k[c] * k[c]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_a_power_law() {
        let x = [4.0, 8.0, 16.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(-1.3)).collect();
        assert!((loglog_slope(&x, &y) + 1.3).abs() < 1e-12);
    }
}
