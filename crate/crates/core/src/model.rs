//! The model operator `ℍ = α·p₁ + α·p₂ + 2mβ + k₁/|r₁| + k₂/|r₂| + k₀/|r₁−r₂|`
//! and its fibres in the rotated coordinates `y₁ = (r₁+r₂)/√2`,
//! `y₂ = (r₁−r₂)/√2`:
//!
//! `H_{y₂} = √2 α·p_{y₁} + 2mβ + √2k₁/|y₁+y₂| + √2k₂/|y₁−y₂| + k₀/(√2|y₂|)`.
//!
//! Nothing acts in `y₂`, so `ℍ` is a direct integral of the fibres.

use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clifford::{plane_wave_eigenvectors, standard_dirac_rep, to_dmatrix};
use crate::eigen::{check_hermitian, dense_eig, shift_invert, ShiftInvertOptions};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::{GridSpec, NyquistMode};
use crate::hamiltonian::{centred_coulomb_field, COUPLING_LIMIT};
use crate::operator::{build_dense, Factor, SpinAction, StructuredOperator, Term};
use crate::probes::kappa::{confinement_excess, overlays, scan_family, Branch, Overlay, ScanOptions, Section, LABEL};
use crate::probes::{fourier_multiply_slice, loglog_slope};
use crate::probes::weyl::bump;
use crate::report::CheckRecord;

pub type Vec3 = [f64; 3];

const SQRT_2: f64 = std::f64::consts::SQRT_2;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub k1: f64,
    pub k2: f64,
    pub k0: f64,
    pub m: f64,
    pub y2: Vec3,
}

impl Default for ModelSpec {
    fn default() -> Self {
        ModelSpec { k1: -0.5, k2: -0.3, k0: 1.0, m: 1.0, y2: [0.0, 0.0, 1.0] }
    }
}

impl ModelSpec {
    /// `|k₁|, |k₂| < √3/2`.
    pub fn in_coupling_limit(&self) -> bool {
        self.k1.abs() < COUPLING_LIMIT && self.k2.abs() < COUPLING_LIMIT
    }

    pub fn y2_norm(&self) -> f64 {
        self.y2.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `k₀/(√2|y₂|)`.
    pub fn shift(&self) -> Result<f64> {
        if self.k0 == 0.0 {
            return Ok(0.0);
        }
        let r = self.y2_norm();
        if r == 0.0 {
            return Err(Error::CoincidentSingularity);
        }
        Ok(self.k0 / (SQRT_2 * r))
    }

    pub fn with_y2(&self, y2: Vec3) -> Self {
        ModelSpec { y2, ..*self }
    }

    pub fn swapped(&self) -> Self {
        ModelSpec { k1: self.k2, k2: self.k1, ..*self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m >= 0.0) {
            return Err(Error::InvalidSpec(format!("mass must be nonnegative, got {}", self.m)));
        }
        self.shift().map(|_| ())
    }
}

/// Two-centre potential `√2k₁/|y+y₂| + √2k₂/|y−y₂|`.
pub fn model_potential(grid: &GridSpec, spec: &ModelSpec) -> Vec<f64> {
    let y2 = spec.y2;
    let mut v = vec![0.0; grid.sites(3)];
    if spec.k1 != 0.0 {
        let f = centred_coulomb_field(SQRT_2 * spec.k1, y2.map(|c| -c), grid);
        v.iter_mut().zip(&f).for_each(|(a, b)| *a += b);
    }
    if spec.k2 != 0.0 {
        let f = centred_coulomb_field(SQRT_2 * spec.k2, y2, grid);
        v.iter_mut().zip(&f).for_each(|(a, b)| *a += b);
    }
    v
}

/// The fibre operator `H_{y₂}` on 4-component fields over the `y₁` grid.
pub fn build_model_y(grid: GridSpec, spec: &ModelSpec) -> Result<StructuredOperator> {
    spec.validate()?;
    let rep = standard_dirac_rep();
    let mut op = StructuredOperator::new(grid, 3, 1, 4);
    for a in 0..3 {
        op.push(Term::new(SQRT_2, &[(0, 0, 1.0)], SpinAction::Dense(to_dmatrix(&rep.alpha_f(a))), Factor::Momentum(a)))?;
    }
    if spec.m != 0.0 {
        op.push(Term::new(2.0 * spec.m, &[(0, 0, 1.0)], SpinAction::Dense(to_dmatrix(&rep.beta_f())), Factor::Identity))?;
    }
    if spec.k1 != 0.0 || spec.k2 != 0.0 {
        let v = Arc::new(model_potential(&grid, spec));
        op.push(Term::new(1.0, &[(0, 0, 1.0)], SpinAction::Identity(4), Factor::Multiplier(v)))?;
    }
    let shift = spec.shift()?;
    Ok(if shift != 0.0 { op.shifted(shift) } else { op })
}

/// `|√2α·p + 2mβ|⁻¹ = (2|p|² + 4m²)^{−1/2}` on the grid.
fn free_symbol(grid: &GridSpec, m: f64) -> Vec<f64> {
    crate::probes::inverse_root_symbol(grid, 2.0, 4.0 * m * m)
}

/// `(Pψ)(y) = βψ(−y)` on an offset grid, where `−y` is the site `N−1−j`.
pub fn mirror(f: &Field) -> Field {
    let grid = *f.grid();
    let n = grid.points;
    let sites = f.sites();
    let beta = to_dmatrix(&standard_dirac_rep().beta_f());
    let mut out = f.zeros_like();
    let data = out.data_mut();
    let src = f.data();
    for s in 0..sites {
        let (i, j, k) = (s / (n * n), (s / n) % n, s % n);
        let t = ((n - 1 - i) * n + (n - 1 - j)) * n + (n - 1 - k);
        for c in 0..4 {
            let mut acc = Complex64::default();
            for d in 0..4 {
                acc += beta[(c, d)] * src[d * sites + s];
            }
            data[c * sites + t] = acc;
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct AdditiveCheck {
    pub shift: f64,
    /// Largest `|E_i(k₀) − E_i(0) − shift|` of dense spectra.
    pub dense_points: usize,
    pub dense_deviation: f64,
    /// Same for shift-invert runs at `σ` and `σ + shift`.
    pub lanczos_deviation: f64,
    pub lanczos_tol: f64,
}

/// Converged eigenvalues within `2m` of `target`, ascending.
fn lanczos_values(op: &StructuredOperator, m: f64, target: f64, how_many: usize, tol: f64, seed: u64) -> Result<Vec<f64>> {
    let grid = *op.grid();
    let symbol = free_symbol(&grid, m);
    let opts = ShiftInvertOptions { sigma: target, how_many, tol, seed, radius: 2.0 * m, ..Default::default() };
    let res = shift_invert(|x| op.apply_slice(x), |x| fourier_multiply_slice(&grid, x, &symbol), op.dim(), &opts)?;
    let found: Vec<f64> = (0..res.ritz_values.len())
        .filter(|&i| res.converged[i] && (res.ritz_values[i] - target).abs() < 2.0 * m)
        .map(|i| res.ritz_values[i])
        .collect();
    Ok(found)
}

fn max_gap(a: &[f64], b: &[f64], shift: f64) -> f64 {
    if a.len() != b.len() || a.is_empty() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (y - x - shift).abs()).fold(0.0, f64::max)
}

/// Spectra with `k₀ = 0` and with the given `k₀` differ by `k₀/(√2|y₂|)`.
pub fn additive_constant_check(spec: &ModelSpec, grid: GridSpec, dense_points: usize, seed: u64) -> Result<AdditiveCheck> {
    let shift = spec.shift()?;
    let bare = ModelSpec { k0: 0.0, ..*spec };
    let small = GridSpec::new(dense_points, grid.box_len)?;
    let d0 = dense_eig(&build_dense(&build_model_y(small, &bare)?)?)?;
    let d1 = dense_eig(&build_dense(&build_model_y(small, spec)?)?)?;
    let tol = 1e-9;
    let l0 = lanczos_values(&build_model_y(grid, &bare)?, spec.m, 0.0, 4, tol, seed)?;
    let l1 = lanczos_values(&build_model_y(grid, spec)?, spec.m, shift, 4, tol, seed)?;
    Ok(AdditiveCheck {
        shift,
        dense_points,
        dense_deviation: max_gap(&d0.values, &d1.values, shift),
        lanczos_deviation: max_gap(&l0, &l1, shift),
        lanczos_tol: tol,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MirrorCheck {
    /// `‖P H(k₁,k₂) x − H(k₂,k₁) P x‖ / ‖H(k₂,k₁) P x‖` on a random field.
    pub intertwining: f64,
    pub spectra: (Vec<f64>, Vec<f64>),
    pub spectral_deviation: f64,
}

/// Swapping `k₁ ↔ k₂` is conjugation by `P`; needs the symmetric momentum set.
pub fn mirror_check(spec: &ModelSpec, grid: GridSpec, seed: u64) -> Result<MirrorCheck> {
    let grid = grid.with_nyquist(NyquistMode::Zeroed).with_offset(true);
    let a = build_model_y(grid, spec)?;
    let b = build_model_y(grid, &spec.swapped())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = Field::random(grid, 3, 4, &mut rng);
    let lhs = mirror(&a.apply(&x)?);
    let rhs = b.apply(&mirror(&x))?;
    let intertwining = lhs.sub(&rhs)?.norm() / rhs.norm();
    let target = spec.shift()?;
    let sa = lanczos_values(&a, spec.m, target, 4, 1e-10, seed)?;
    let sb = lanczos_values(&b, spec.m, target, 4, 1e-10, seed.wrapping_add(1))?;
    let spectral_deviation = max_gap(&sa, &sb, 0.0);
    Ok(MirrorCheck { intertwining, spectra: (sa, sb), spectral_deviation })
}

/// Eigenvalue of `√2α·p + 2mβ + √2k/|y|` below `2m`: `2m√(1 − k²)`.
pub fn single_well_ground(k: f64, m: f64) -> f64 {
    2.0 * m * (1.0 - k * k).sqrt()
}

#[derive(Clone, Debug, Serialize)]
pub struct DecouplingCheck {
    /// Distance of each centre from the origin.
    pub separation: f64,
    pub double_well: Vec<f64>,
    pub single_wells: Vec<f64>,
    /// Single-well levels shifted by `⟨ψ, V_other ψ⟩`, the first-order effect
    /// of the other centre's Coulomb tail.
    pub corrected: Vec<f64>,
    /// Largest distance of a double-well gap level from the single-well levels.
    pub raw_deviation: f64,
    /// Same against the corrected levels.
    pub deviation: f64,
}

fn nearest_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().map(|e| b.iter().map(|s| (e - s).abs()).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max)
}

/// With `k₀ = 0` the double well splits into the two wells run separately,
/// up to the Coulomb tail of each centre at the other, which decays only
/// like `1/|y₂|`. Levels are compared after first-order correction for it.
pub fn decoupling_check(spec: &ModelSpec, grid: GridSpec, opts: &ScanOptions, seed: u64) -> Result<DecouplingCheck> {
    let bare = ModelSpec { k0: 0.0, ..*spec };
    let gap = (-2.0 * bare.m, 2.0 * bare.m);
    let centres = vec![bare.y2.map(|v| -v), bare.y2];
    let in_gap = |s: &Section| -> Vec<usize> {
        (0..s.eigenvalues.len())
            .filter(|&i| s.converged[i] && s.eigenvalues[i] > gap.0 + opts.edge_margin && s.eigenvalues[i] < gap.1 - opts.edge_margin)
            .collect()
    };
    let symbol = free_symbol(&grid, bare.m);
    let solve = |s: &ModelSpec, centres: &[Vec3], seed| {
        crate::probes::kappa::solve_section(&build_model_y(grid, s)?, 1.0, 0.0, 2.0 * bare.m, &symbol, centres, opts, seed, None)
    };
    let d = solve(&bare, &centres, seed)?;
    let double: Vec<f64> = in_gap(&d).into_iter().map(|i| d.eigenvalues[i]).collect();
    let sites = grid.sites(3);
    let mut singles = Vec::new();
    let mut corrected = Vec::new();
    let wells = [
        (ModelSpec { k2: 0.0, ..bare }, ModelSpec { k1: 0.0, ..bare }, &centres[..1]),
        (ModelSpec { k1: 0.0, ..bare }, ModelSpec { k2: 0.0, ..bare }, &centres[1..]),
    ];
    for (w, (own, other, c)) in wells.iter().enumerate() {
        let sec = solve(own, c, seed + 1 + w as u64)?;
        let v_other = model_potential(&grid, other);
        for i in in_gap(&sec) {
            let v = &sec.vectors[i];
            let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            let tail: f64 = v.iter().enumerate().map(|(j, z)| z.norm_sqr() * v_other[j % sites]).sum::<f64>() / norm;
            singles.push(sec.eigenvalues[i]);
            corrected.push(sec.eigenvalues[i] + tail);
        }
    }
    Ok(DecouplingCheck {
        separation: bare.y2_norm(),
        raw_deviation: nearest_gap(&double, &singles),
        deviation: nearest_gap(&double, &corrected),
        double_well: double,
        single_wells: singles,
        corrected,
    })
}

/// One target of the fibrewise Weyl ladder: a shell packet in `y₁` at free
/// energy `ε` times a bump in `y₂` around `y₂*` of width `∝ 1/n`. The packet
/// approximates `E = ε + k₀/(√2|y₂*|)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelWeylSpec {
    pub epsilon: f64,
    pub y2_norm: f64,
    pub n_values: Vec<usize>,
    pub points: usize,
    pub shell_unit: f64,
    pub box_factor: f64,
    /// Bump half-width is `width·|y₂*|/n` per axis.
    pub width: f64,
}

impl ModelWeylSpec {
    pub fn new(epsilon: f64, y2_norm: f64) -> Self {
        ModelWeylSpec {
            epsilon,
            y2_norm,
            n_values: vec![4, 8, 16],
            points: 32,
            shell_unit: 0.5,
            box_factor: 6.0,
            width: 2.0,
        }
    }

    pub fn energy(&self, spec: &ModelSpec) -> f64 {
        self.epsilon + spec.k0 / (SQRT_2 * self.y2_norm)
    }
}

pub fn default_weyl_targets() -> Vec<ModelWeylSpec> {
    vec![ModelWeylSpec::new(2.5, 1.0), ModelWeylSpec::new(-2.5, 0.5), ModelWeylSpec::new(-2.2, 0.25)]
}

const GAUSS6: [(f64, f64); 6] = [
    (-0.932_469_514_203_152, 0.171_324_492_379_170),
    (-0.661_209_386_466_265, 0.360_761_573_048_139),
    (-0.238_619_186_083_197, 0.467_913_934_572_691),
    (0.238_619_186_083_197, 0.467_913_934_572_691),
    (0.661_209_386_466_265, 0.360_761_573_048_139),
    (0.932_469_514_203_152, 0.171_324_492_379_170),
];

#[derive(Clone, Debug, Serialize)]
pub struct ModelWeylRow {
    pub n: usize,
    pub box_len: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ModelWeylLadder {
    pub spec: ModelWeylSpec,
    pub energy: f64,
    pub rows: Vec<ModelWeylRow>,
    pub slope: f64,
    pub decreasing: bool,
}

/// `‖(ℍ − E)ψₙ‖` for `ψₙ = fₙ(y₁)gₙ(y₂)`, with the `y₂` integral done by
/// product Gauss–Legendre quadrature over the bump's support.
pub fn model_weyl_ladder(spec: &ModelSpec, target: &ModelWeylSpec) -> Result<ModelWeylLadder> {
    let m = spec.m;
    if target.epsilon.abs() <= 2.0 * m {
        return Err(Error::InvalidSpec(format!("free energy {} is not outside (-2m, 2m)", target.epsilon)));
    }
    if !(target.y2_norm > 0.0) {
        return Err(Error::CoincidentSingularity);
    }
    let xi = ((target.epsilon.powi(2) - 4.0 * m * m) / 2.0).sqrt();
    let basis = plane_wave_eigenvectors([xi, 0.0, 0.0], SQRT_2 * m)?;
    let spinor = if target.epsilon > 0.0 { basis.positive[0] } else { basis.negative[0] };
    let energy = target.energy(spec);
    let centre = [0.0, 0.0, target.y2_norm];
    let mut rows = Vec::new();
    for &n in &target.n_values {
        let r0 = n as f64 * target.shell_unit;
        let grid = GridSpec::new(target.points, target.box_factor * r0)?;
        let mut f = Field::from_fn(grid, 3, 4, |c, y| {
            let r = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
            spinor[c] * Complex64::from_polar(bump(r / r0), xi * y[0])
        });
        let nrm = f.norm();
        f.scale(Complex64::from(1.0 / nrm));
        let free = build_model_y(grid, &ModelSpec { k1: 0.0, k2: 0.0, k0: 0.0, ..*spec })?.shifted(-target.epsilon);
        let base = free.apply(&f)?;
        let half = target.width * target.y2_norm / n as f64;
        let (mut num, mut den) = (0.0, 0.0);
        for (ta, wa) in GAUSS6 {
            for (tb, wb) in GAUSS6 {
                for (tc, wc) in GAUSS6 {
                    let t = [ta, tb, tc];
                    let g: f64 = t.iter().map(|s| (-1.0 / (1.0 - s * s)).exp()).product();
                    let w = wa * wb * wc * g * g;
                    let y2 = [centre[0] + half * ta, centre[1] + half * tb, centre[2] + half * tc];
                    let fibre = spec.with_y2(y2);
                    let mut v = model_potential(&grid, &fibre);
                    let delta = fibre.shift()? - (energy - target.epsilon);
                    v.iter_mut().for_each(|x| *x += delta);
                    let mut r = f.clone();
                    r.multiply_by(&v);
                    r.axpy(Complex64::from(1.0), &base)?;
                    num += w * r.norm_sq();
                    den += w;
                }
            }
        }
        rows.push(ModelWeylRow { n, box_len: grid.box_len, residual: (num / den).sqrt() });
    }
    let ns: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let res: Vec<f64> = rows.iter().map(|r| r.residual).collect();
    Ok(ModelWeylLadder {
        spec: target.clone(),
        energy,
        slope: loglog_slope(&ns, &res),
        decreasing: res.windows(2).all(|w| w[1] < w[0]),
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelProbeSpec {
    pub model: ModelSpec,
    pub points: usize,
    pub box_len: f64,
    pub kappas: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub options: ScanOptions,
    pub dense_points: usize,
    pub weyl: Vec<ModelWeylSpec>,
    pub seed: u64,
}

impl Default for ModelProbeSpec {
    fn default() -> Self {
        ModelProbeSpec {
            model: ModelSpec::default(),
            points: 20,
            box_len: 16.0,
            kappas: (0..9).map(|i| 1.0 + 0.25 * i as f64).collect(),
            lambdas: vec![-1.0, 0.0, 1.0, 2.0],
            options: ScanOptions { how_many: 4, ..Default::default() },
            dense_points: 6,
            weyl: default_weyl_targets(),
            seed: 5,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ModelReport {
    pub label: &'static str,
    pub spec: ModelProbeSpec,
    pub in_coupling_limit: bool,
    pub hermitian_defect: f64,
    pub additive: AdditiveCheck,
    pub mirror: MirrorCheck,
    pub decoupling: Vec<DecouplingCheck>,
    pub gap: (f64, f64),
    pub sections: Vec<Section>,
    pub branches: Vec<Branch>,
    pub overlays: Vec<Overlay>,
    pub confinement_excess: f64,
    pub weyl: Vec<ModelWeylLadder>,
}

pub fn model_spectrum_probe(spec: &ModelProbeSpec) -> Result<ModelReport> {
    let model = spec.model;
    model.validate()?;
    if spec.kappas.len() < 2 {
        return Err(Error::InvalidSpec("the model scan needs at least two kappa values".into()));
    }
    let grid = GridSpec::new(spec.points, spec.box_len)?;
    let op = build_model_y(grid, &model)?;
    let hermitian_defect = check_hermitian(&|x: &[Complex64]| op.apply_slice(x), op.dim(), spec.seed)?;
    let additive = additive_constant_check(&model, grid, spec.dense_points, spec.seed)?;
    let mirror = mirror_check(&model, grid, spec.seed)?;
    // Mismatch at the middle and the largest κ; it should shrink.
    let decoupling = [spec.kappas[spec.kappas.len() / 2], spec.kappas[spec.kappas.len() - 1]]
        .iter()
        .map(|k| decoupling_check(&model.with_y2(model.y2.map(|v| v * k)), grid, &spec.options, spec.seed))
        .collect::<Result<Vec<_>>>()?;

    // The κ-scan follows the fibres without the k₀ constant, which enters
    // only through the overlaid curve.
    let bare = ModelSpec { k0: 0.0, ..model };
    let gap = (-2.0 * model.m, 2.0 * model.m);
    let symbol = free_symbol(&grid, model.m);
    let (sections, branches) = scan_family(
        &spec.kappas,
        gap,
        &symbol,
        |kappa| build_model_y(grid, &bare.with_y2(bare.y2.map(|v| kappa * v))),
        |kappa| {
            let c = model.y2.map(|v| kappa * v);
            vec![c, c.map(|v| -v)]
        },
        &spec.options,
        spec.seed,
    )?;
    let y2n = model.y2_norm();
    let curve = |lambda: f64, kappa: f64| lambda - model.k0 / (SQRT_2 * kappa * y2n);
    let ov = overlays(crate::hamiltonian::Sector::Full, &branches, &spec.lambdas, curve, &spec.options);
    let weyl = spec.weyl.iter().map(|t| model_weyl_ladder(&model, t)).collect::<Result<Vec<_>>>()?;
    Ok(ModelReport {
        label: LABEL,
        spec: spec.clone(),
        in_coupling_limit: model.in_coupling_limit(),
        hermitian_defect,
        additive,
        mirror,
        decoupling,
        gap,
        confinement_excess: confinement_excess(&sections, gap, &spec.options),
        sections,
        branches,
        overlays: ov,
        weyl,
    })
}

impl ModelReport {
    pub fn records(&self) -> Vec<CheckRecord> {
        let opts = &self.spec.options;
        let mut out = vec![
            CheckRecord::compare("model fibre is Hermitian", "H_{y2} self-adjoint", self.hermitian_defect, 1e-10),
            CheckRecord::compare(
                "k0 term shifts the dense spectrum",
                "k0/(sqrt2 |y2|) additive constant",
                self.additive.dense_deviation,
                1e-10,
            ),
            CheckRecord::compare(
                "k0 term shifts the Lanczos spectrum",
                "k0/(sqrt2 |y2|) additive constant",
                self.additive.lanczos_deviation,
                self.additive.lanczos_tol,
            ),
            CheckRecord::compare("mirror intertwines k1 <-> k2", "P H(k1,k2) = H(k2,k1) P", self.mirror.intertwining, 1e-12),
            CheckRecord::compare("mirror spectra agree", "spec H(k1,k2) = spec H(k2,k1)", self.mirror.spectral_deviation, 1e-8),
            CheckRecord::compare(
                "k0 = 0 mismatch with single wells shrinks as wells separate",
                "double well = union of single wells",
                match self.decoupling.as_slice() {
                    [near, far] => far.deviation / near.deviation,
                    _ => f64::INFINITY,
                },
                1.0,
            ),
            CheckRecord::compare(
                "evidence: localized levels inside (-2m, 2m)",
                "E_n(kappa) in (-2m, 2m)",
                self.confinement_excess,
                opts.resolution_tol,
            ),
            CheckRecord::compare(
                "evidence: no branch tracks the Coulomb curve",
                "E_n(kappa) = lambda - k0/(sqrt2 kappa |y2|)",
                self.overlays.iter().map(|o| o.longest_run).max().unwrap_or(0) as f64,
                (opts.track_run - 1) as f64,
            ),
        ];
        for l in &self.weyl {
            out.push(CheckRecord::compare(
                format!("model Weyl slope at E = {:.4}", l.energy),
                "sigma_ess(H) = R",
                (l.slope + 1.0).abs(),
                0.2,
            ));
            out.push(CheckRecord::compare(
                format!("model Weyl residuals decrease at E = {:.4}", l.energy),
                "sigma_ess(H) = R",
                if l.decreasing { 0.0 } else { 1.0 },
                0.0,
            ));
        }
        out
    }

    /// `series` 0: branch values against κ; 1: Weyl residuals against n.
    pub const CSV_HEADER: [&'static str; 4] = ["series", "index", "x", "value"];

    pub fn csv_rows(&self) -> Vec<Vec<f64>> {
        let mut rows = Vec::new();
        for (bi, b) in self.branches.iter().enumerate() {
            for (k, v) in b.kappas.iter().zip(&b.values) {
                rows.push(vec![0.0, bi as f64, *k, *v]);
            }
        }
        for (li, l) in self.weyl.iter().enumerate() {
            for r in &l.rows {
                rows.push(vec![1.0, li as f64, r.n as f64, r.residual]);
            }
        }
        rows
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_fibre_symbol() {
        // √2α·p + 2mβ has eigenvalues ±√(2|p|² + 4m²) on plane waves.
        let grid = GridSpec::new(8, 6.0).unwrap();
        let spec = ModelSpec { k1: 0.0, k2: 0.0, k0: 0.0, m: 0.7, y2: [0.0, 0.0, 1.0] };
        let op = build_model_y(grid, &spec).unwrap();
        let unit = 2.0 * std::f64::consts::PI / 6.0;
        let p = [unit, -2.0 * unit, 0.0];
        let basis = plane_wave_eigenvectors(p, SQRT_2 * spec.m).unwrap();
        let e = (2.0 * (p[0] * p[0] + p[1] * p[1]) + 4.0 * spec.m * spec.m).sqrt();
        for (s, sign) in [(basis.positive[1], 1.0), (basis.negative[0], -1.0)] {
            let f = Field::from_fn(grid, 3, 4, |c, y| s[c] * Complex64::from_polar(1.0, p[0] * y[0] + p[1] * y[1]));
            let d = op.apply(&f).unwrap().sub(&f.scaled(Complex64::from(sign * e))).unwrap();
            assert!(d.norm() / f.norm() < 1e-12);
        }
    }

    #[test]
    fn coincident_centres_need_zero_k0() {
        let grid = GridSpec::new(4, 4.0).unwrap();
        let spec = ModelSpec { y2: [0.0; 3], ..Default::default() };
        assert!(matches!(build_model_y(grid, &spec), Err(Error::CoincidentSingularity)));
        assert!(build_model_y(grid, &ModelSpec { k0: 0.0, ..spec }).is_ok());
    }

    #[test]
    fn hermitian_on_random_fields() {
        let grid = GridSpec::new(8, 8.0).unwrap();
        let op = build_model_y(grid, &ModelSpec::default()).unwrap();
        let d = check_hermitian(&|x: &[Complex64]| op.apply_slice(x), op.dim(), 3).unwrap();
        assert!(d < 1e-10);
    }

    #[test]
    fn dense_spectrum_shifts_by_the_constant() {
        let grid = GridSpec::new(4, 6.0).unwrap();
        let spec = ModelSpec { y2: [0.3, 0.0, 0.4], ..Default::default() };
        let bare = ModelSpec { k0: 0.0, ..spec };
        let a = dense_eig(&build_dense(&build_model_y(grid, &bare).unwrap()).unwrap()).unwrap();
        let b = dense_eig(&build_dense(&build_model_y(grid, &spec).unwrap()).unwrap()).unwrap();
        assert!((spec.shift().unwrap() - 1.0 / (SQRT_2 * 0.5)).abs() < 1e-15);
        assert!(max_gap(&a.values, &b.values, spec.shift().unwrap()) < 1e-10);
    }

    #[test]
    fn mirror_intertwines_on_the_zeroed_lattice() {
        let spec = ModelSpec { k1: -0.5, k2: -0.2, y2: [0.4, -0.7, 1.1], ..Default::default() };
        let grid = GridSpec::new(8, 7.0).unwrap().with_nyquist(NyquistMode::Zeroed);
        let a = build_model_y(grid, &spec).unwrap();
        let b = build_model_y(grid, &spec.swapped()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x = Field::random(grid, 3, 4, &mut rng);
        let lhs = mirror(&a.apply(&x).unwrap());
        let rhs = b.apply(&mirror(&x)).unwrap();
        assert!(lhs.sub(&rhs).unwrap().norm() / rhs.norm() < 1e-12);
        // P is an involution.
        assert!(mirror(&mirror(&x)).sub(&x).unwrap().norm() < 1e-14);
    }

    #[test]
    fn signed_nyquist_breaks_the_mirror() {
        let spec = ModelSpec { k1: -0.5, k2: -0.2, ..Default::default() };
        let grid = GridSpec::new(8, 7.0).unwrap();
        let a = build_model_y(grid, &spec).unwrap();
        let b = build_model_y(grid, &spec.swapped()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x = Field::random(grid, 3, 4, &mut rng);
        let rhs = b.apply(&mirror(&x)).unwrap();
        assert!(mirror(&a.apply(&x).unwrap()).sub(&rhs).unwrap().norm() / rhs.norm() > 1e-3);
    }

    #[test]
    fn single_well_closed_form_scales_from_the_one_particle_level() {
        // √2(α·p + √2mβ + k/|y|): twice the one-particle level at mass √2m.
        let k = -0.5;
        assert!((single_well_ground(k, 1.0) - SQRT_2 * crate::probes::hydrogenic::closed_form(k, SQRT_2)).abs() < 1e-14);
    }

    #[test]
    fn weyl_targets_need_free_energies_outside_the_gap() {
        let r = model_weyl_ladder(&ModelSpec::default(), &ModelWeylSpec::new(1.5, 1.0));
        assert!(matches!(r, Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn small_weyl_ladder_decays() {
        let t = ModelWeylSpec { n_values: vec![2, 4, 8], points: 16, ..ModelWeylSpec::new(2.5, 1.0) };
        let l = model_weyl_ladder(&ModelSpec::default(), &t).unwrap();
        assert!(l.decreasing, "{:?}", l.rows);
    }
}
