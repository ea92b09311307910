//! Weyl singular sequences for the two-body operator.
//!
//! The state at ladder step `n` is `w = c(u ⊗ v − v ⊗ u)` with
//! `u = χ_s e^{iξ·x} u(ξ)` and `v = χ_n e^{iη·x} v(η)`, where `χ_s` is a
//! normalized smooth bump supported on the shell `s r₀ < |x| < 2 s r₀`.
//! `u(ξ)` has eigenvalue `λ` for `α·ξ + mβ` and `v(η)` eigenvalue `−μ` for
//! `α·η + mβ`, so the target is `λ − μ`.
//!
//! The residual `‖(H_DC − (λ−μ))w‖` is evaluated without forming the 6D field:
//! the kinetic and one-body parts factor into 3D inner products, and the
//! interaction `k₀K(x₁−x₂)` reduces to periodic 3D convolutions with the same
//! kernel the 6D operator samples. The result equals the 6D discrete residual
//! up to rounding.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{loglog_slope, pointwise_inner};
use crate::antisym::{labels, TwoBodyField};
use crate::clifford::plane_wave_eigenvectors;
use crate::error::{Error, Result};
use crate::field::{pairwise_sum, Field};
use crate::grid::{FftNd, GridSpec, Regularization};
use crate::hamiltonian::{dirac_operator, interaction_inverse, PotentialSpec};
use crate::report::CheckRecord;

type C = Complex64;

/// Fraction of the half box a shell may reach.
const FIT: f64 = 0.95;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeylSpec {
    /// `|ξ|`, with `ξ ∥ e₃`.
    pub xi: f64,
    /// `|η|`, with `η ∥ e₁`.
    pub eta: f64,
    pub mass: f64,
    pub pot: PotentialSpec,
    pub n_values: Vec<usize>,
    pub points: usize,
    /// Length unit `r₀` of the shells.
    pub shell_unit: f64,
    /// Box length in units of `n r₀`.
    pub box_factor: f64,
    pub regularization: Regularization,
}

impl WeylSpec {
    pub fn new(xi: f64, eta: f64, mass: f64, pot: PotentialSpec) -> Self {
        WeylSpec {
            xi,
            eta,
            mass,
            pot,
            n_values: vec![4, 8, 16],
            points: 32,
            shell_unit: 0.125,
            box_factor: 6.0,
            regularization: Regularization::default(),
        }
    }

    /// Targets `λ, μ > m` give `|ξ|² = λ² − m²`, `|η|² = μ² − m²`.
    pub fn from_energies(lambda: f64, mu: f64, mass: f64, pot: PotentialSpec) -> Result<Self> {
        if !(lambda > mass && mu > mass) {
            return Err(Error::InvalidSpec(format!("need λ, μ > m, got λ = {lambda}, μ = {mu}, m = {mass}")));
        }
        Ok(Self::new((lambda * lambda - mass * mass).sqrt(), (mu * mu - mass * mass).sqrt(), mass, pot))
    }

    pub fn lambda(&self) -> f64 {
        (self.xi * self.xi + self.mass * self.mass).sqrt()
    }

    pub fn mu(&self) -> f64 {
        (self.eta * self.eta + self.mass * self.mass).sqrt()
    }

    /// `λ − μ`.
    pub fn target(&self) -> f64 {
        self.lambda() - self.mu()
    }

    pub fn box_len(&self, n: usize) -> f64 {
        self.box_factor * n as f64 * self.shell_unit
    }

    pub fn grid(&self, n: usize) -> Result<GridSpec> {
        Ok(GridSpec::new(self.points, self.box_len(n))?.with_regularization(self.regularization))
    }

    /// Shell index of `u`: `n²`, capped so the shell stays inside the box.
    pub fn u_shell(&self, n: usize) -> (usize, bool) {
        let cap = (FIT * self.box_len(n) / (4.0 * self.shell_unit)).floor() as usize;
        let want = n * n;
        if want > cap {
            (cap, true)
        } else {
            (want, false)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.xi > 0.0 && self.eta > 0.0 && self.mass >= 0.0) {
            return Err(Error::InvalidSpec("need |ξ|, |η| > 0 and m ≥ 0".into()));
        }
        if self.n_values.is_empty() || self.n_values.windows(2).any(|w| w[1] <= w[0]) || self.n_values[0] == 0 {
            return Err(Error::InvalidSpec("n values must be positive and increasing".into()));
        }
        if !(self.shell_unit > 0.0) {
            return Err(Error::InvalidSpec("shell unit must be positive".into()));
        }
        for &n in &self.n_values {
            let outer = 2.0 * n as f64 * self.shell_unit;
            if outer > FIT * 0.5 * self.box_len(n) {
                return Err(Error::InvalidSpec(format!(
                    "shell {n} < |x|/r0 < {} does not fit the box of length {}",
                    2 * n,
                    self.box_len(n)
                )));
            }
        }
        Ok(())
    }
}

/// The three default targets for mass `m = 1`: `λ−μ < 0`, `0 < λ−μ < 2m`
/// and `λ−μ > 2m`.
pub fn default_targets(pot: PotentialSpec) -> Vec<WeylSpec> {
    [(1.0, 2.0), (2.0, 1.0), (3.0, 0.3)]
        .iter()
        .map(|&(xi, eta)| WeylSpec::new(xi, eta, 1.0, pot))
        .collect()
}

/// Smooth bump on `1 < t < 2`.
pub fn bump(t: f64) -> f64 {
    let q = 2.0 * t - 3.0;
    if q.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - q * q)).exp()
    }
}

/// `χ(|x|/R) e^{i k·x} spinor`, normalized on the grid.
fn shell_wave(grid: GridSpec, radius: f64, k: [f64; 3], spinor: nalgebra::Vector4<C>) -> Result<Field> {
    let mut f = Field::from_fn(grid, 3, 4, |c, x| {
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        let phase = k[0] * x[0] + k[1] * x[1] + k[2] * x[2];
        spinor[c] * C::from_polar(bump(r / radius), phase)
    });
    let nrm = f.norm();
    if nrm == 0.0 {
        return Err(Error::ZeroField);
    }
    f.scale(C::from(1.0 / nrm));
    Ok(f)
}

/// `w = c(u ⊗ v − v ⊗ u)` in factored form.
#[derive(Clone, Debug)]
pub struct WeylState {
    pub n: usize,
    pub u_shell: usize,
    pub cap_binds: bool,
    pub u: Field,
    pub v: Field,
    pub coefficient: f64,
    /// `⟨u, v⟩`.
    pub overlap: C,
}

impl WeylState {
    pub fn build(spec: &WeylSpec, n: usize) -> Result<Self> {
        let grid = spec.grid(n)?;
        let (u_shell, cap_binds) = spec.u_shell(n);
        let ub = plane_wave_eigenvectors([0.0, 0.0, spec.xi], spec.mass)?;
        let vb = plane_wave_eigenvectors([spec.eta, 0.0, 0.0], spec.mass)?;
        let u = shell_wave(grid, u_shell as f64 * spec.shell_unit, [0.0, 0.0, spec.xi], ub.positive[0])?;
        let v = shell_wave(grid, n as f64 * spec.shell_unit, [spec.eta, 0.0, 0.0], vb.negative[0])?;
        let overlap = u.inner(&v)?;
        let gap = 1.0 - overlap.norm_sqr();
        if gap <= 1e-14 {
            return Err(Error::InvalidSpec("u and v are parallel; the antisymmetric product vanishes".into()));
        }
        Ok(WeylState {
            n,
            u_shell,
            cap_binds,
            u,
            v,
            coefficient: 1.0 / (2.0 * gap).sqrt(),
            overlap,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        self.u.grid()
    }

    /// `‖w‖` from the factored Gram matrix.
    pub fn norm(&self) -> f64 {
        let uu = self.u.norm_sq();
        let vv = self.v.norm_sq();
        let sq = 2.0 * uu * vv - 2.0 * (self.overlap * self.overlap.conj()).re;
        self.coefficient * sq.max(0.0).sqrt()
    }

    /// Component `c` of `w` at the site pair `(x₁, x₂)`.
    pub fn value(&self, c: usize, s1: usize, s2: usize) -> C {
        let (l1, sp1, l2, sp2) = labels(c);
        let (a, b) = (2 * l1 + sp1, 2 * l2 + sp2);
        let sites = self.u.sites();
        let u = |k: usize, s: usize| self.u.data()[k * sites + s];
        let v = |k: usize, s: usize| self.v.data()[k * sites + s];
        (u(a, s1) * v(b, s2) - v(a, s1) * u(b, s2)) * self.coefficient
    }

    /// Largest `|w_c(x₁,x₂) + (Πw)_c(x₁,x₂)|` over random samples, relative to
    /// the largest sampled entry.
    pub fn membership_defect(&self, samples: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sites = self.u.sites();
        let (mut worst, mut scale) = (0.0_f64, 0.0_f64);
        for _ in 0..samples {
            let c = rng.gen_range(0..16);
            let (s1, s2) = (rng.gen_range(0..sites), rng.gen_range(0..sites));
            let (l1, sp1, l2, sp2) = labels(c);
            let swapped = crate::kron::block_index(l2, sp2, l1, sp1);
            let w = self.value(c, s1, s2);
            let pw = self.value(swapped, s2, s1);
            worst = worst.max((w + pw).norm());
            scale = scale.max(w.norm());
        }
        if scale == 0.0 {
            0.0
        } else {
            worst / scale
        }
    }

    /// The full 16-component field (small grids only).
    pub fn to_two_body(&self) -> Result<TwoBodyField> {
        let uv = TwoBodyField::product(&self.u, &self.v)?;
        let vu = TwoBodyField::product(&self.v, &self.u)?;
        let data = uv
            .field()
            .data()
            .iter()
            .zip(vu.field().data())
            .map(|(a, b)| (a - b) * self.coefficient)
            .collect();
        TwoBodyField::from_field(uv.field().with_data(data))
    }
}

/// Regularized interaction kernel `K(d)` on the periodic difference lattice.
pub fn interaction_kernel(grid: &GridSpec) -> Vec<f64> {
    let n = grid.points;
    let h = grid.spacing();
    let d = |q: usize| grid.min_image(q as f64 * h);
    (0..grid.sites(3))
        .map(|s| {
            let (a, b, c) = (d(s / (n * n)), d((s / n) % n), d(s % n));
            interaction_inverse((a * a + b * b + c * c).sqrt(), grid.regularization)
        })
        .collect()
}

struct Convolver {
    fft: FftNd,
    kernel_hat: Vec<C>,
    weight: f64,
}

impl Convolver {
    fn new(grid: &GridSpec, kernel: &[f64]) -> Self {
        let fft = FftNd::new(grid.points, 3);
        let mut kernel_hat: Vec<C> = kernel.iter().map(|k| C::from(*k)).collect();
        fft.forward(&mut kernel_hat);
        Convolver {
            fft,
            kernel_hat,
            weight: grid.cell_volume(3).powi(2),
        }
    }

    /// `⟨f ⊗ g, K (p ⊗ q)⟩`.
    fn pair(&self, f: &Field, p: &Field, g: &Field, q: &Field) -> C {
        let a = pointwise_inner(f, p);
        let mut b = pointwise_inner(g, q);
        self.fft.forward(&mut b);
        b.iter_mut().zip(&self.kernel_hat).for_each(|(x, k)| *x *= k);
        self.fft.inverse(&mut b);
        pairwise_sum(a.len(), &|i| a[i] * b[i]) * self.weight
    }
}

/// `‖(H_DC − (λ−μ))w‖` evaluated in factored form.
pub fn reduced_residual(state: &WeylState, spec: &WeylSpec) -> Result<f64> {
    let grid = *state.grid();
    let h1 = dirac_operator(grid, spec.mass, spec.pot.k)?;
    let (u, v) = (&state.u, &state.v);
    let mut a = h1.apply(u)?;
    a.axpy(C::from(-spec.lambda()), u)?;
    let mut b = h1.apply(v)?;
    b.axpy(C::from(spec.mu()), v)?;
    let c = state.coefficient;
    let kinetic: [(&Field, &Field, f64); 4] = [(&a, v, 1.0), (u, &b, 1.0), (&b, u, -1.0), (v, &a, -1.0)];
    let mut total = 0.0;
    for (f1, g1, s1) in &kinetic {
        for (f2, g2, s2) in &kinetic {
            total += s1 * s2 * (f1.inner(f2)? * g1.inner(g2)?).re;
        }
    }
    total *= c * c;
    let k0 = spec.pot.k0;
    if k0 != 0.0 {
        let kernel = interaction_kernel(&grid);
        let squared: Vec<f64> = kernel.iter().map(|k| k * k).collect();
        let conv = Convolver::new(&grid, &kernel);
        let conv2 = Convolver::new(&grid, &squared);
        let state_terms: [(&Field, &Field, f64); 2] = [(u, v, 1.0), (v, u, -1.0)];
        let mut cross = C::default();
        for (f, g, s) in &kinetic {
            for (p, q, e) in &state_terms {
                cross += conv.pair(f, p, g, q) * (s * e);
            }
        }
        let mut quad = C::default();
        for (p1, q1, e1) in &state_terms {
            for (p2, q2, e2) in &state_terms {
                quad += conv2.pair(p1, p2, q1, q2) * (e1 * e2);
            }
        }
        total += c * c * (2.0 * k0 * cross.re + k0 * k0 * quad.re);
    }
    Ok(total.max(0.0).sqrt())
}

#[derive(Clone, Debug, Serialize)]
pub struct WeylRow {
    pub n: usize,
    pub u_shell: usize,
    pub cap_binds: bool,
    pub box_len: f64,
    pub spacing: f64,
    pub residual: f64,
    pub norm: f64,
    pub overlap: f64,
    pub membership_defect: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct WeylLadder {
    pub spec: WeylSpec,
    pub lambda: f64,
    pub mu: f64,
    pub target: f64,
    /// True when `ξ` and `η` sit on the momentum lattice of every grid.
    pub on_lattice: bool,
    pub rows: Vec<WeylRow>,
    pub slope: f64,
    pub decreasing: bool,
}

fn on_lattice(k: f64, box_len: f64) -> bool {
    let q = k * box_len / (2.0 * std::f64::consts::PI);
    (q - q.round()).abs() < 1e-9
}

pub fn weyl_probe(spec: &WeylSpec, seed: u64) -> Result<WeylLadder> {
    spec.validate()?;
    let mut rows = Vec::new();
    let mut lattice = true;
    for &n in &spec.n_values {
        let state = WeylState::build(spec, n)?;
        let residual = reduced_residual(&state, spec)?;
        let l = spec.box_len(n);
        lattice &= on_lattice(spec.xi, l) && on_lattice(spec.eta, l);
        rows.push(WeylRow {
            n,
            u_shell: state.u_shell,
            cap_binds: state.cap_binds,
            box_len: l,
            spacing: state.grid().spacing(),
            residual,
            norm: state.norm(),
            overlap: state.overlap.norm(),
            membership_defect: state.membership_defect(2000, seed ^ n as u64),
        });
    }
    let ns: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let res: Vec<f64> = rows.iter().map(|r| r.residual).collect();
    let slope = if rows.len() >= 2 { loglog_slope(&ns, &res) } else { f64::NAN };
    let decreasing = res.windows(2).all(|w| w[1] < w[0]);
    Ok(WeylLadder {
        spec: spec.clone(),
        lambda: spec.lambda(),
        mu: spec.mu(),
        target: spec.target(),
        on_lattice: lattice,
        rows,
        slope,
        decreasing,
    })
}

impl WeylLadder {
    pub fn records(&self) -> Vec<CheckRecord> {
        let label = format!("lambda-mu = {:.4}", self.target);
        let anchor = "(H_DC - (lambda - mu)) w_n -> 0, w_n = (u_{n^2} (x) v_n - v_n (x) u_{n^2})/sqrt 2";
        let mut out = vec![
            CheckRecord::compare(format!("weyl slope ({label})"), anchor, (self.slope + 1.0).abs(), 0.2),
            CheckRecord::compare(
                format!("weyl residual decreasing ({label})"),
                anchor,
                if self.decreasing { 0.0 } else { 1.0 },
                0.0,
            ),
        ];
        let norm_dev = self.rows.iter().map(|r| (r.norm - 1.0).abs()).fold(0.0, f64::max);
        out.push(CheckRecord::compare(format!("weyl state normalized ({label})"), "||w_n|| = 1", norm_dev, 1e-8));
        let memb = self.rows.iter().map(|r| r.membership_defect).fold(0.0, f64::max);
        out.push(CheckRecord::compare(format!("weyl state antisymmetric ({label})"), "w_n in H^2_A", memb, 1e-12));
        out
    }

    pub fn csv_rows(&self) -> Vec<Vec<f64>> {
        self.rows
            .iter()
            .map(|r| vec![r.n as f64, r.u_shell as f64, r.box_len, r.residual, r.norm])
            .collect()
    }

    pub const CSV_HEADER: [&'static str; 5] = ["n", "u_shell", "box", "residual", "norm"];
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::antisym::{block_relation_defect, exchange};
    use crate::hamiltonian::hdc_operator;

    fn small_spec(pot: PotentialSpec) -> WeylSpec {
        WeylSpec {
            n_values: vec![2],
            points: 8,
            shell_unit: 0.5,
            ..WeylSpec::new(1.0, 0.8, 1.0, pot)
        }
    }

    #[test]
    fn factored_residual_matches_six_dimensional_apply() {
        let spec = small_spec(PotentialSpec::new(-0.4, 0.7));
        let state = WeylState::build(&spec, 2).unwrap();
        let w = state.to_two_body().unwrap();
        assert!((w.norm() - 1.0).abs() < 1e-12);
        assert!((state.norm() - 1.0).abs() < 1e-12);
        let op = hdc_operator(*state.grid(), &spec.pot, spec.mass).unwrap();
        let mut r = op.apply(w.field()).unwrap();
        r.axpy(C::from(-spec.target()), w.field()).unwrap();
        let reduced = reduced_residual(&state, &spec).unwrap();
        assert!((r.norm() - reduced).abs() <= 1e-9 * r.norm(), "6D {} vs reduced {reduced}", r.norm());
    }

    #[test]
    fn state_is_antisymmetric() {
        let spec = small_spec(PotentialSpec::free());
        let state = WeylState::build(&spec, 2).unwrap();
        let w = state.to_two_body().unwrap();
        assert!(block_relation_defect(&w, -1.0) < 1e-14);
        let pw = exchange(&w);
        let sum: f64 = w.field().data().iter().zip(pw.field().data()).map(|(a, b)| (a + b).norm()).fold(0.0, f64::max);
        assert!(sum < 1e-14);
        assert_eq!(state.membership_defect(500, 3), 0.0);
    }

    /// Radial quadrature of `‖∇χ‖² / ‖χ‖²` for `χ = bump(|x|/R)`.
    fn gradient_norm_sq(radius: f64) -> f64 {
        let steps = 20_000;
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..steps {
            let t = 1.0 + (i as f64 + 0.5) / steps as f64;
            let q = 2.0 * t - 3.0;
            let b = bump(t);
            let db = b * (-4.0 * q / (1.0 - q * q).powi(2));
            num += db * db * t * t;
            den += b * b * t * t;
        }
        num / den / (radius * radius)
    }

    #[test]
    fn free_residual_is_the_cutoff_gradient() {
        let spec = WeylSpec {
            n_values: vec![6],
            points: 48,
            shell_unit: 0.5,
            ..WeylSpec::new(1.0, 2.0, 1.0, PotentialSpec::free())
        };
        let state = WeylState::build(&spec, 6).unwrap();
        let got = reduced_residual(&state, &spec).unwrap();
        let ru = state.u_shell as f64 * spec.shell_unit;
        let rv = 6.0 * spec.shell_unit;
        let want = (gradient_norm_sq(ru) + gradient_norm_sq(rv)).sqrt();
        assert!((got - want).abs() < 2e-2 * want, "{got} vs {want}");
    }

    #[test]
    fn shells_must_fit() {
        let spec = WeylSpec {
            box_factor: 3.0,
            ..WeylSpec::new(1.0, 1.0, 1.0, PotentialSpec::free())
        };
        assert!(matches!(spec.validate(), Err(Error::InvalidSpec(_))));
        assert!(WeylSpec::from_energies(0.5, 2.0, 1.0, PotentialSpec::free()).is_err());
    }

    #[test]
    fn u_shell_cap() {
        let spec = WeylSpec::new(1.0, 1.0, 1.0, PotentialSpec::free());
        assert_eq!(spec.u_shell(1), (1, false));
        let (s, binds) = spec.u_shell(8);
        assert!(binds && s < 64 && 2.0 * s as f64 * spec.shell_unit <= 0.5 * spec.box_len(8));
    }
}
