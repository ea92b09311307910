//! Multi-component complex fields on tensor grids, with binary I/O.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{FftNd, GridSpec};

const MAGIC: &[u8; 8] = b"DCFIELD1";
const PAIRWISE_BASE: usize = 512;

/// Sum of `f(i)` for `i in 0..n` over a fixed binary tree, so the result does
/// not depend on the number of worker threads.
pub fn pairwise_sum<F>(n: usize, f: &F) -> Complex64
where
    F: Fn(usize) -> Complex64 + Sync,
{
    fn go<F: Fn(usize) -> Complex64 + Sync>(lo: usize, hi: usize, f: &F) -> Complex64 {
        if hi - lo <= PAIRWISE_BASE {
            let mut acc = Complex64::default();
            for i in lo..hi {
                acc += f(i);
            }
            return acc;
        }
        let mid = lo + (hi - lo) / 2;
        let (a, b) = rayon::join(|| go(lo, mid, f), || go(mid, hi, f));
        a + b
    }
    go(0, n, f)
}

/// Real-valued counterpart of [`pairwise_sum`].
pub fn pairwise_sum_real<F>(n: usize, f: &F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    pairwise_sum(n, &|i| Complex64::from(f(i))).re
}

/// `ncomp` complex components over an `ndim`-dimensional grid, stored
/// component-major: `data[c * sites + site]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    grid: GridSpec,
    ndim: usize,
    ncomp: usize,
    data: Vec<Complex64>,
}

impl Field {
    pub fn zeros(grid: GridSpec, ndim: usize, ncomp: usize) -> Self {
        Field {
            grid,
            ndim,
            ncomp,
            data: vec![Complex64::default(); ncomp * grid.sites(ndim)],
        }
    }

    pub fn from_vec(grid: GridSpec, ndim: usize, ncomp: usize, data: Vec<Complex64>) -> Result<Self> {
        let want = ncomp * grid.sites(ndim);
        if data.len() != want {
            return Err(Error::GridMismatch(format!("data length {} does not match {want}", data.len())));
        }
        Ok(Field { grid, ndim, ncomp, data })
    }

    /// Samples `f(component, coordinates)` at every site.
    pub fn from_fn(grid: GridSpec, ndim: usize, ncomp: usize, f: impl Fn(usize, &[f64]) -> Complex64 + Sync) -> Self {
        let sites = grid.sites(ndim);
        let coords = grid.coords();
        let mut data = vec![Complex64::default(); ncomp * sites];
        data.par_chunks_mut(sites).enumerate().for_each(|(c, comp)| {
            let mut idx = vec![0usize; ndim];
            let mut x = vec![0.0; ndim];
            for (site, v) in comp.iter_mut().enumerate() {
                grid.site_indices(site, ndim, &mut idx);
                for a in 0..ndim {
                    x[a] = coords[idx[a]];
                }
                *v = f(c, &x);
            }
        });
        Field { grid, ndim, ncomp, data }
    }

    /// Independent uniform samples in the unit square of each component.
    pub fn random(grid: GridSpec, ndim: usize, ncomp: usize, rng: &mut impl Rng) -> Self {
        let n = ncomp * grid.sites(ndim);
        let data = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        Field { grid, ndim, ncomp, data }
    }

    /// Random field whose Fourier modes vanish outside `|q| <= max_mode` on
    /// every axis (signed mode index).
    pub fn band_limited(grid: GridSpec, ndim: usize, ncomp: usize, max_mode: usize, rng: &mut impl Rng) -> Self {
        let n = grid.points;
        let sites = grid.sites(ndim);
        let fft = FftNd::new(n, ndim);
        let mut data = vec![Complex64::default(); ncomp * sites];
        let mut idx = vec![0usize; ndim];
        for comp in data.chunks_mut(sites) {
            for (site, v) in comp.iter_mut().enumerate() {
                grid.site_indices(site, ndim, &mut idx);
                let inside = idx.iter().all(|&q| {
                    let signed = if q <= n / 2 { q } else { n - q };
                    signed <= max_mode && !(n % 2 == 0 && q == n / 2)
                });
                if inside {
                    *v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                }
            }
            fft.inverse(comp);
        }
        Field { grid, ndim, ncomp, data }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn ndim(&self) -> usize {
        self.ndim
    }

    pub fn ncomp(&self) -> usize {
        self.ncomp
    }

    pub fn sites(&self) -> usize {
        self.data.len() / self.ncomp.max(1)
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let s = self.sites();
        &self.data[c * s..(c + 1) * s]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        let s = self.sites();
        &mut self.data[c * s..(c + 1) * s]
    }

    /// A field on the same grid with the given data.
    pub fn with_data(&self, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), self.data.len(), "data length mismatch");
        Field {
            grid: self.grid,
            ndim: self.ndim,
            ncomp: self.ncomp,
            data,
        }
    }

    pub fn zeros_like(&self) -> Self {
        Field::zeros(self.grid, self.ndim, self.ncomp)
    }

    pub fn check_compatible(&self, other: &Field) -> Result<()> {
        if !self.grid.same_lattice(&other.grid) || self.ndim != other.ndim || self.ncomp != other.ncomp {
            return Err(Error::GridMismatch(format!(
                "fields differ: {}x{}^{} vs {}x{}^{}",
                self.ncomp, self.grid.points, self.ndim, other.ncomp, other.grid.points, other.ndim
            )));
        }
        Ok(())
    }

    /// `Σ F·conj(G)·(L/N)^ndim`, summed over a fixed tree.
    pub fn inner(&self, other: &Field) -> Result<Complex64> {
        self.check_compatible(other)?;
        let (a, b) = (&self.data, &other.data);
        let s = pairwise_sum(a.len(), &|i| a[i] * b[i].conj());
        Ok(s * self.grid.cell_volume(self.ndim))
    }

    pub fn norm_sq(&self) -> f64 {
        let a = &self.data;
        pairwise_sum_real(a.len(), &|i| a[i].norm_sqr()) * self.grid.cell_volume(self.ndim)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scale(&mut self, s: Complex64) {
        self.data.par_iter_mut().for_each(|x| *x *= s);
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        out.scale(s);
        out
    }

    /// `self += a·x`.
    pub fn axpy(&mut self, a: Complex64, x: &Field) -> Result<()> {
        self.check_compatible(x)?;
        self.data.par_iter_mut().zip(&x.data).for_each(|(y, x)| *y += a * x);
        Ok(())
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        let mut out = self.clone();
        out.axpy(Complex64::from(-1.0), other)?;
        Ok(out)
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        let mut out = self.clone();
        out.axpy(Complex64::from(1.0), other)?;
        Ok(out)
    }

    /// Pointwise multiplication of every component by a real scalar field.
    pub fn multiply_by(&mut self, weights: &[f64]) {
        let s = self.sites();
        assert_eq!(weights.len(), s, "multiplier length mismatch");
        self.data.par_chunks_mut(s).for_each(|comp| {
            for (v, w) in comp.iter_mut().zip(weights) {
                *v *= *w;
            }
        });
    }

    fn metadata(&self) -> FieldMetadata {
        FieldMetadata {
            format: "dcfield-v1".into(),
            ndim: self.ndim,
            ncomp: self.ncomp,
            grid: self.grid,
            layout: "component-major, site index with axis 0 most significant, little-endian f64 (re, im)".into(),
        }
    }

    /// Writes the binary file at `path` and a JSON sidecar at `path.json`.
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        w.write_all(MAGIC)?;
        w.write_all(&(self.ndim as u32).to_le_bytes())?;
        w.write_all(&(self.grid.points as u64).to_le_bytes())?;
        w.write_all(&(self.ncomp as u64).to_le_bytes())?;
        w.write_all(&self.grid.box_len.to_le_bytes())?;
        w.write_all(&[self.grid.offset as u8])?;
        for z in &self.data {
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())?;
        }
        w.flush()?;
        let sidecar = std::fs::File::create(sidecar_path(path))?;
        serde_json::to_writer_pretty(sidecar, &self.metadata())?;
        Ok(())
    }

    /// Reads a field written by [`Field::write`]. Grid policies come from the
    /// sidecar when present.
    pub fn read(path: &Path) -> Result<Field> {
        let mut r = std::io::BufReader::new(std::fs::File::open(path)?);
        let magic = read_array::<8>(&mut r)?;
        if &magic != MAGIC {
            return Err(Error::MalformedFile("bad magic".into()));
        }
        let ndim = read_u32(&mut r)? as usize;
        let points = read_u64(&mut r)? as usize;
        let ncomp = read_u64(&mut r)? as usize;
        let box_len = f64::from_le_bytes(read_array(&mut r)?);
        let offset = read_array::<1>(&mut r)?[0] != 0;
        if ndim == 0 || ndim > 6 || ncomp == 0 {
            return Err(Error::MalformedFile(format!("implausible header ndim={ndim} ncomp={ncomp}")));
        }
        let mut grid = GridSpec::new(points, box_len).map_err(|e| Error::MalformedFile(e.to_string()))?;
        grid.offset = offset;
        if let Ok(f) = std::fs::File::open(sidecar_path(path)) {
            let meta: FieldMetadata = serde_json::from_reader(f)?;
            grid.regularization = meta.grid.regularization;
            grid.nyquist = meta.grid.nyquist;
        }
        let len = ncomp * grid.sites(ndim);
        let mut data = Vec::with_capacity(len);
        for _ in 0..len {
            let re = f64::from_le_bytes(read_array(&mut r)?);
            let im = f64::from_le_bytes(read_array(&mut r)?);
            data.push(Complex64::new(re, im));
        }
        let mut rest = Vec::new();
        r.read_to_end(&mut rest)?;
        if !rest.is_empty() {
            return Err(Error::MalformedFile(format!("{} trailing bytes", rest.len())));
        }
        Field::from_vec(grid, ndim, ncomp, data)
    }
}

#[derive(Serialize, Deserialize)]
struct FieldMetadata {
    format: String,
    ndim: usize,
    ncomp: usize,
    grid: GridSpec,
    layout: String,
}

fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    s.into()
}

fn read_array<const K: usize>(r: &mut impl Read) -> Result<[u8; K]> {
    let mut buf = [0u8; K];
    r.read_exact(&mut buf)
        .map_err(|e| Error::MalformedFile(format!("truncated file: {e}")))?;
    Ok(buf)
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    Ok(u32::from_le_bytes(read_array(r)?))
}

fn read_u64(r: &mut impl Read) -> Result<u64> {
    Ok(u64::from_le_bytes(read_array(r)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pairwise_sum_matches_naive() {
        let s = pairwise_sum(10_000, &|i| Complex64::new(i as f64, -(i as f64)));
        let want = (0..10_000).map(|i| i as f64).sum::<f64>();
        assert_eq!(s, Complex64::new(want, -want));
    }

    #[test]
    fn inner_product_is_weighted_dot() {
        let g = GridSpec::new(4, 3.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = Field::random(g, 3, 2, &mut rng);
        let b = Field::random(g, 3, 2, &mut rng);
        let naive: Complex64 = a.data().iter().zip(b.data()).map(|(x, y)| x * y.conj()).sum();
        let ip = a.inner(&b).unwrap();
        assert!((ip - naive * g.cell_volume(3)).norm() < 1e-12);
        assert!((ip - b.inner(&a).unwrap().conj()).norm() < 1e-12);
        assert!(a.norm_sq() > 0.0);
    }

    #[test]
    fn band_limited_fields_have_no_high_modes() {
        let g = GridSpec::new(8, 5.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = Field::band_limited(g, 2, 1, 1, &mut rng);
        let mut spec = f.component(0).to_vec();
        FftNd::new(8, 2).forward(&mut spec);
        for (site, v) in spec.iter().enumerate() {
            let (q0, q1) = (site / 8, site % 8);
            let low = |q: usize| q <= 1 || q >= 7;
            if !(low(q0) && low(q1)) {
                assert!(v.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn binary_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let g = GridSpec::new(4, 2.5).unwrap().with_nyquist(crate::grid::NyquistMode::Zeroed);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = Field::random(g, 3, 4, &mut rng);
        let p = dir.path().join("f.bin");
        f.write(&p).unwrap();
        let back = Field::read(&p).unwrap();
        assert_eq!(back, f);
        std::fs::write(&p, b"garbage").unwrap();
        assert!(matches!(Field::read(&p), Err(Error::MalformedFile(_))));
    }

    #[test]
    fn incompatible_fields_are_rejected() {
        let a = Field::zeros(GridSpec::new(4, 1.0).unwrap(), 3, 1);
        let b = Field::zeros(GridSpec::new(4, 2.0).unwrap(), 3, 1);
        assert!(matches!(a.inner(&b), Err(Error::GridMismatch(_))));
    }
}
