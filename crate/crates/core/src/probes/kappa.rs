//! κ-scan of the relative-coordinate operator `H(κ) = H_{κy₂}`: gap
//! eigenvalue branches, their confinement to the sector gap, and a comparison
//! with the Coulomb curve `λ − k₀/(√2κ|y₂|)`.
//!
//! This is an evidence probe. Finite grids can neither prove nor refute the
//! absence of eigenvalues of the two-body operator.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{fourier_multiply_slice, inverse_root_symbol};
use crate::eigen::{shift_invert, ShiftInvertOptions};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::hamiltonian::{build_y_operator_reduced, PotentialSpec, Sector};
use crate::operator::StructuredOperator;
use crate::report::CheckRecord;

pub type Vec3 = [f64; 3];

pub const LABEL: &str = "evidence";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    pub how_many: usize,
    pub tol: f64,
    /// Budget of inverse applications per section.
    pub max_outer: usize,
    pub krylov_dim: usize,
    /// Relative residual of the inner MINRES solves.
    pub inner_tol: f64,
    /// Start each section from the previous section's eigenvectors.
    pub warm_start: bool,
    /// Eigenvalues closer than this to a gap edge are not branch points.
    pub edge_margin: f64,
    /// Eigenvalues closer than this are one degenerate cluster.
    pub cluster_tol: f64,
    pub overlap_min: f64,
    pub well_weight_min: f64,
    /// Radius of the well neighbourhoods, as a fraction of the box.
    pub well_radius: f64,
    /// Allowed excursion of localized eigenvalues outside the gap.
    pub resolution_tol: f64,
    /// Maximal distance between a branch and the Coulomb curve to count as a match.
    pub match_tol: f64,
    /// Consecutive matches needed to say a branch tracks the curve.
    pub track_run: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            how_many: 4,
            tol: 1e-7,
            max_outer: 200,
            krylov_dim: 30,
            inner_tol: 1e-9,
            warm_start: true,
            edge_margin: 1e-6,
            cluster_tol: 1e-6,
            overlap_min: 0.9,
            well_weight_min: 0.5,
            well_radius: 0.25,
            resolution_tol: 1e-2,
            match_tol: 1e-3,
            track_run: 3,
        }
    }
}

/// Eigenpairs of one κ-section.
#[derive(Clone, Debug, Serialize)]
pub struct Section {
    pub kappa: f64,
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    pub converged: Vec<bool>,
    /// Weight of each eigenvector near the wells.
    pub well_weight: Vec<f64>,
    pub matvecs: usize,
    #[serde(skip)]
    pub vectors: Vec<Vec<Complex64>>,
}

impl Section {
    fn localized(&self, i: usize, opts: &ScanOptions) -> bool {
        self.converged[i] && self.well_weight[i] >= opts.well_weight_min
    }

    fn in_gap(&self, i: usize, gap: (f64, f64), opts: &ScanOptions) -> bool {
        let e = self.eigenvalues[i];
        self.localized(i, opts) && e > gap.0 + opts.edge_margin && e < gap.1 - opts.edge_margin
    }
}

fn well_mask(grid: &GridSpec, centers: &[Vec3], radius: f64) -> Vec<bool> {
    let x = grid.coords();
    let n = grid.points;
    (0..grid.sites(3))
        .map(|s| {
            let p = [x[s / (n * n)], x[(s / n) % n], x[s % n]];
            centers.iter().any(|c| {
                let d2: f64 = (0..3).map(|a| (p[a] - c[a]).powi(2)).sum();
                d2 <= radius * radius
            })
        })
        .collect()
}

fn well_start(grid: &GridSpec, ncomp: usize, centers: &[Vec3], seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = grid.coords();
    let n = grid.points;
    let sites = grid.sites(3);
    let mut out = vec![Complex64::default(); sites * ncomp];
    for c in 0..ncomp {
        for s in 0..sites {
            let p = [x[s / (n * n)], x[(s / n) % n], x[s % n]];
            let env: f64 = centers
                .iter()
                .map(|ctr| (-(0..3).map(|a| (p[a] - ctr[a]).powi(2)).sum::<f64>() / 2.0).exp())
                .sum();
            out[c * sites + s] = env * Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
        }
    }
    out
}

/// Solves one section for eigenvalues within `radius` of `target` by
/// shift-invert Lanczos, with `symbol` the Fourier multiplier of the free
/// `|H₀ − target|⁻¹`, and measures localization. Without `start` the
/// iteration starts from random noise under Gaussians at the wells.
pub fn solve_section(
    op: &StructuredOperator,
    kappa: f64,
    target: f64,
    radius: f64,
    symbol: &[f64],
    centers: &[Vec3],
    opts: &ScanOptions,
    seed: u64,
    start: Option<Vec<Complex64>>,
) -> Result<Section> {
    let grid = *op.grid();
    let sopts = ShiftInvertOptions {
        sigma: target,
        how_many: opts.how_many,
        tol: opts.tol,
        max_outer: opts.max_outer,
        krylov_dim: opts.krylov_dim,
        seed,
        start: Some(start.unwrap_or_else(|| well_start(&grid, op.ncomp(), centers, seed))),
        radius,
        inner_tol: opts.inner_tol,
        ..Default::default()
    };
    let res = shift_invert(|x| op.apply_slice(x), |x| fourier_multiply_slice(&grid, x, symbol), op.dim(), &sopts)?;
    let mask = well_mask(&grid, centers, opts.well_radius * grid.box_len);
    let sites = grid.sites(3);
    let well_weight = res
        .vectors
        .iter()
        .map(|v| {
            let total: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            let inside: f64 = v.iter().enumerate().filter(|(i, _)| mask[i % sites]).map(|(_, z)| z.norm_sqr()).sum();
            inside / total.max(f64::MIN_POSITIVE)
        })
        .collect();
    Ok(Section {
        kappa,
        eigenvalues: res.ritz_values.clone(),
        residuals: res.residual_norms.clone(),
        converged: res.converged.clone(),
        well_weight,
        matvecs: res.iterations,
        vectors: res.vectors,
    })
}

/// A continuity-tracked curve of degenerate clusters.
#[derive(Clone, Debug, Serialize)]
pub struct Branch {
    pub kappas: Vec<f64>,
    pub values: Vec<f64>,
    pub multiplicity: Vec<usize>,
    /// Cluster overlap with the previous point (first entry is 1).
    pub overlaps: Vec<f64>,
}

struct Cluster {
    value: f64,
    members: Vec<usize>,
}

fn clusters(sec: &Section, gap: (f64, f64), opts: &ScanOptions) -> Vec<Cluster> {
    let mut idx: Vec<usize> = (0..sec.eigenvalues.len()).filter(|&i| sec.in_gap(i, gap, opts)).collect();
    idx.sort_by(|a, b| sec.eigenvalues[*a].total_cmp(&sec.eigenvalues[*b]));
    let mut out: Vec<Cluster> = Vec::new();
    for i in idx {
        let e = sec.eigenvalues[i];
        match out.last_mut() {
            Some(c) if (e - sec.eigenvalues[*c.members.last().unwrap()]).abs() <= opts.cluster_tol => c.members.push(i),
            _ => out.push(Cluster { value: e, members: vec![i] }),
        }
    }
    for c in &mut out {
        c.value = c.members.iter().map(|&i| sec.eigenvalues[i]).sum::<f64>() / c.members.len() as f64;
    }
    out
}

/// Fraction of the smaller cluster captured by the larger one.
fn cluster_overlap(a: &Section, ca: &Cluster, b: &Section, cb: &Cluster) -> f64 {
    let mut s = 0.0;
    for &i in &ca.members {
        for &j in &cb.members {
            let dot: Complex64 = a.vectors[i].iter().zip(&b.vectors[j]).map(|(x, y)| x.conj() * y).sum();
            s += dot.norm_sqr();
        }
    }
    s / ca.members.len().min(cb.members.len()) as f64
}

/// Links clusters of adjacent sections by maximal overlap; a link below
/// `overlap_min` ends the branch and starts a new one.
pub fn track_branches(sections: &[Section], gap: (f64, f64), opts: &ScanOptions) -> Vec<Branch> {
    let mut branches: Vec<Branch> = Vec::new();
    // Open branch index for every cluster of the previous section.
    let mut open: Vec<Option<usize>> = Vec::new();
    let mut prev: Vec<Cluster> = Vec::new();
    for (si, sec) in sections.iter().enumerate() {
        let cur = clusters(sec, gap, opts);
        let mut next_open = vec![None; cur.len()];
        let mut taken = vec![false; prev.len()];
        for (ci, c) in cur.iter().enumerate() {
            let best = if si == 0 {
                None
            } else {
                prev.iter()
                    .enumerate()
                    .filter(|(pi, _)| !taken[*pi])
                    .map(|(pi, p)| (pi, cluster_overlap(&sections[si - 1], p, sec, c)))
                    .max_by(|a, b| a.1.total_cmp(&b.1))
            };
            match best {
                Some((pi, ov)) if ov >= opts.overlap_min && open[pi].is_some() => {
                    taken[pi] = true;
                    let b = open[pi].unwrap();
                    branches[b].kappas.push(sec.kappa);
                    branches[b].values.push(c.value);
                    branches[b].multiplicity.push(c.members.len());
                    branches[b].overlaps.push(ov);
                    next_open[ci] = Some(b);
                }
                _ => {
                    branches.push(Branch {
                        kappas: vec![sec.kappa],
                        values: vec![c.value],
                        multiplicity: vec![c.members.len()],
                        overlaps: vec![1.0],
                    });
                    next_open[ci] = Some(branches.len() - 1);
                }
            }
        }
        open = next_open;
        prev = cur;
    }
    branches
}

/// Longest run of consecutive branch points within `tol` of `curve(κ)`.
pub fn longest_match(branch: &Branch, curve: impl Fn(f64) -> f64, tol: f64) -> usize {
    let mut best = 0;
    let mut run = 0;
    for (k, e) in branch.kappas.iter().zip(&branch.values) {
        if (e - curve(*k)).abs() <= tol {
            run += 1;
            best = best.max(run);
        } else {
            run = 0;
        }
    }
    best
}

/// Largest distance of a localized, converged eigenvalue outside the gap.
pub fn confinement_excess(sections: &[Section], gap: (f64, f64), opts: &ScanOptions) -> f64 {
    sections
        .iter()
        .flat_map(|s| (0..s.eigenvalues.len()).filter(|&i| s.localized(i, opts)).map(move |i| s.eigenvalues[i]))
        .map(|e| (gap.0 - e).max(e - gap.1).max(0.0))
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, Serialize)]
pub struct SectorScan {
    pub sector: Sector,
    pub gap: (f64, f64),
    pub sections: Vec<Section>,
    pub branches: Vec<Branch>,
    pub confinement_excess: f64,
    pub min_link_overlap: f64,
}

/// Sum of the previous section's converged vectors with random weights.
fn warm_start(prev: &Section, dim: usize, seed: u64) -> Option<Vec<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![Complex64::default(); dim];
    let mut any = false;
    for (v, _) in prev.vectors.iter().zip(&prev.converged).filter(|(v, c)| **c && v.len() == dim) {
        let w = Complex64::new(rng.gen::<f64>() + 0.5, rng.gen::<f64>() - 0.5);
        for (a, b) in out.iter_mut().zip(v) {
            *a += w * b;
        }
        any = true;
    }
    any.then_some(out)
}

/// Scans any κ-family with a fixed gap; `build(κ)` gives the section operator,
/// `symbol` the free `|H₀ − σ|⁻¹` at the gap centre `σ`, and `centers(κ)` the
/// well positions used for localization.
pub fn scan_family(
    kappas: &[f64],
    gap: (f64, f64),
    symbol: &[f64],
    build: impl Fn(f64) -> Result<StructuredOperator>,
    centers: impl Fn(f64) -> Vec<Vec3>,
    opts: &ScanOptions,
    seed: u64,
) -> Result<(Vec<Section>, Vec<Branch>)> {
    if kappas.is_empty() || kappas.iter().any(|k| !(*k > 0.0)) {
        return Err(Error::InvalidArgument("κ values must be positive".into()));
    }
    let target = 0.5 * (gap.0 + gap.1);
    let mut sections = Vec::with_capacity(kappas.len());
    for (i, &k) in kappas.iter().enumerate() {
        let op = build(k)?;
        let start = match sections.last() {
            Some(prev) if opts.warm_start => warm_start(prev, op.dim(), seed.wrapping_add(i as u64)),
            _ => None,
        };
        sections.push(solve_section(&op, k, target, 0.5 * (gap.1 - gap.0), symbol, &centers(k), opts, seed.wrapping_add(i as u64), start)?);
    }
    let branches = track_branches(&sections, gap, opts);
    Ok((sections, branches))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KappaScanSpec {
    pub y2: Vec3,
    pub kappas: Vec<f64>,
    pub k: f64,
    pub k0: f64,
    pub mass: f64,
    pub points: usize,
    pub box_len: f64,
    /// λ values for the Coulomb-curve overlay, in addition to the adversarial
    /// ones fitted through each branch.
    pub lambdas: Vec<f64>,
    pub sectors: Vec<Sector>,
    pub options: ScanOptions,
    pub seed: u64,
}

impl Default for KappaScanSpec {
    fn default() -> Self {
        KappaScanSpec {
            y2: [0.0, 0.0, 1.0],
            kappas: (0..9).map(|i| 1.0 + 0.25 * i as f64).collect(),
            k: -0.5,
            k0: 1.0,
            mass: 1.0,
            points: 20,
            box_len: 16.0,
            lambdas: vec![0.5, 1.0, 1.5, 2.0],
            sectors: vec![Sector::PlusPlus, Sector::MinusMinus],
            options: ScanOptions::default(),
            seed: 3,
        }
    }
}

impl KappaScanSpec {
    pub fn validate(&self) -> Result<()> {
        if self.y2.iter().all(|v| *v == 0.0) {
            return Err(Error::CoincidentSingularity);
        }
        if self.sectors.contains(&Sector::Full) {
            return Err(Error::InvalidSpec("scan the ++ and -- sectors separately".into()));
        }
        Ok(())
    }

    pub fn y2_norm(&self) -> f64 {
        self.y2.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `λ − k₀/(√2κ|y₂|)`.
    pub fn curve(&self, lambda: f64, kappa: f64) -> f64 {
        lambda - self.k0 / (std::f64::consts::SQRT_2 * kappa * self.y2_norm())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Overlay {
    pub sector: Sector,
    pub lambda: f64,
    /// Fitted so the curve passes through a branch point.
    pub adversarial: bool,
    pub branch: Option<usize>,
    pub longest_run: usize,
    pub tracks: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct KappaReport {
    pub label: &'static str,
    pub spec: KappaScanSpec,
    pub sectors: Vec<SectorScan>,
    pub overlays: Vec<Overlay>,
    pub branch_count: usize,
    pub confinement_excess: f64,
    pub any_tracks: bool,
}

/// Curve overlays for `lambdas` plus one adversarial λ per branch, fitted at
/// the branch's middle point.
pub fn overlays(
    sector: Sector,
    branches: &[Branch],
    lambdas: &[f64],
    curve: impl Fn(f64, f64) -> f64,
    opts: &ScanOptions,
) -> Vec<Overlay> {
    let mut out = Vec::new();
    for &lambda in lambdas {
        let (bi, run) = branches
            .iter()
            .enumerate()
            .map(|(i, b)| (Some(i), longest_match(b, |k| curve(lambda, k), opts.match_tol)))
            .max_by_key(|(_, r)| *r)
            .unwrap_or((None, 0));
        out.push(Overlay { sector, lambda, adversarial: false, branch: bi, longest_run: run, tracks: run >= opts.track_run });
    }
    for (i, b) in branches.iter().enumerate() {
        let mid = b.kappas.len() / 2;
        let lambda = b.values[mid] - curve(0.0_f64, b.kappas[mid]);
        let run = longest_match(b, |k| curve(lambda, k), opts.match_tol);
        out.push(Overlay { sector, lambda, adversarial: true, branch: Some(i), longest_run: run, tracks: run >= opts.track_run });
    }
    out
}

pub fn kappa_scan(spec: &KappaScanSpec) -> Result<KappaReport> {
    spec.validate()?;
    let grid = GridSpec::new(spec.points, spec.box_len)?;
    let pot = PotentialSpec::new(spec.k, spec.k0);
    let mut sectors = Vec::new();
    let mut all_overlays = Vec::new();
    for (si, &sector) in spec.sectors.iter().enumerate() {
        let gap = sector.gap(spec.mass);
        let build = |kappa: f64| {
            let y2 = spec.y2.map(|v| kappa * v);
            build_y_operator_reduced(grid, &pot, spec.mass, y2, sector)
        };
        let centers = |kappa: f64| {
            let c = spec.y2.map(|v| kappa * v);
            vec![c, c.map(|v| -v)]
        };
        // (H₊₊ − m)² = (H₋₋ + m)² = 2|p|² + m² for the free blocks.
        let symbol = inverse_root_symbol(&grid, 2.0, spec.mass * spec.mass);
        let (sections, branches) =
            scan_family(&spec.kappas, gap, &symbol, build, centers, &spec.options, spec.seed.wrapping_add(100 * si as u64))?;
        all_overlays.extend(overlays(sector, &branches, &spec.lambdas, |l, k| spec.curve(l, k), &spec.options));
        let min_link_overlap = branches.iter().flat_map(|b| b.overlaps.iter().copied()).fold(1.0, f64::min);
        sectors.push(SectorScan {
            sector,
            gap,
            confinement_excess: confinement_excess(&sections, gap, &spec.options),
            sections,
            branches,
            min_link_overlap,
        });
    }
    Ok(KappaReport {
        label: LABEL,
        spec: spec.clone(),
        branch_count: sectors.iter().map(|s| s.branches.len()).sum(),
        confinement_excess: sectors.iter().map(|s| s.confinement_excess).fold(0.0, f64::max),
        any_tracks: all_overlays.iter().any(|o| o.tracks),
        sectors,
        overlays: all_overlays,
    })
}

impl KappaReport {
    pub fn records(&self) -> Vec<CheckRecord> {
        let tol = self.spec.options.resolution_tol;
        let longest = self.overlays.iter().map(|o| o.longest_run).max().unwrap_or(0);
        vec![
            CheckRecord::compare(
                "evidence: localized eigenvalues stay inside the sector gaps",
                "E_n(kappa) in (-2m,0) u (0,2m)",
                self.confinement_excess,
                tol,
            ),
            CheckRecord::compare(
                "evidence: no branch tracks the Coulomb curve",
                "E_n(kappa) = lambda - k0/(sqrt2 kappa |y2|)",
                longest as f64,
                (self.spec.options.track_run - 1) as f64,
            ),
        ]
    }

    pub const CSV_HEADER: [&'static str; 5] = ["sector", "branch", "kappa", "value", "multiplicity"];

    pub fn csv_rows(&self) -> Vec<Vec<f64>> {
        let mut rows = Vec::new();
        for (si, s) in self.sectors.iter().enumerate() {
            for (bi, b) in s.branches.iter().enumerate() {
                for j in 0..b.kappas.len() {
                    rows.push(vec![si as f64, bi as f64, b.kappas[j], b.values[j], b.multiplicity[j] as f64]);
                }
            }
        }
        rows
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn section(kappa: f64, values: &[f64], vectors: Vec<Vec<Complex64>>) -> Section {
        Section {
            kappa,
            eigenvalues: values.to_vec(),
            residuals: vec![0.0; values.len()],
            converged: vec![true; values.len()],
            well_weight: vec![1.0; values.len()],
            matvecs: 0,
            vectors,
        }
    }

    fn e(i: usize, n: usize) -> Vec<Complex64> {
        (0..n).map(|j| Complex64::from(if i == j { 1.0 } else { 0.0 })).collect()
    }

    #[test]
    fn tracking_links_by_overlap_and_splits_on_rotation() {
        let opts = ScanOptions::default();
        let gap = (0.0, 2.0);
        let s0 = section(1.0, &[0.5, 1.5], vec![e(0, 3), e(1, 3)]);
        // Levels cross: the vectors decide the links, not the ordering.
        let s1 = section(1.25, &[0.7, 1.2], vec![e(1, 3), e(0, 3)]);
        let s2 = section(1.5, &[0.8, 1.1], vec![e(2, 3), e(0, 3)]);
        let b = track_branches(&[s0, s1, s2], gap, &opts);
        assert_eq!(b.len(), 3);
        assert_eq!(b[0].values, vec![0.5, 1.2, 1.1]);
        assert_eq!(b[1].values, vec![1.5, 0.7]);
        assert_eq!(b[2].values, vec![0.8]);
    }

    #[test]
    fn degenerate_clusters_are_matched_as_subspaces() {
        let opts = ScanOptions::default();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let rot = |a: f64, b: f64| vec![Complex64::from(a), Complex64::from(b)];
        let s0 = section(1.0, &[1.0, 1.0], vec![e(0, 2), e(1, 2)]);
        let s1 = section(2.0, &[1.1, 1.1], vec![rot(s, s), rot(s, -s)]);
        let b = track_branches(&[s0, s1], (0.0, 2.0), &opts);
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].multiplicity, vec![2, 2]);
        assert!((b[0].overlaps[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn curve_matching_needs_consecutive_points() {
        let b = Branch {
            kappas: vec![1.0, 2.0, 3.0, 4.0],
            values: vec![1.0, 2.0, 3.0, 9.0],
            multiplicity: vec![1; 4],
            overlaps: vec![1.0; 4],
        };
        assert_eq!(longest_match(&b, |k| k, 1e-3), 3);
        assert_eq!(longest_match(&b, |k| if k == 2.0 { 0.0 } else { k }, 1e-3), 1);
    }

    #[test]
    fn adversarial_lambda_hits_its_branch_once() {
        let spec = KappaScanSpec::default();
        let b = Branch {
            kappas: vec![1.0, 1.25, 1.5],
            values: vec![1.5, 1.5, 1.5],
            multiplicity: vec![2; 3],
            overlaps: vec![1.0; 3],
        };
        let o = overlays(Sector::PlusPlus, &[b], &[], |l, k| spec.curve(l, k), &spec.options);
        assert_eq!(o.len(), 1);
        assert_eq!(o[0].longest_run, 1);
        assert!(!o[0].tracks);
    }

    #[test]
    fn free_sections_have_no_branches() {
        let spec = KappaScanSpec {
            k: 0.0,
            points: 8,
            box_len: 8.0,
            kappas: vec![1.0, 1.5],
            options: ScanOptions { how_many: 2, ..Default::default() },
            ..Default::default()
        };
        let r = kappa_scan(&spec).unwrap();
        assert_eq!(r.branch_count, 0);
        assert!(!r.any_tracks);
        assert!(r.records().iter().all(|c| c.passed()));
    }

    #[test]
    fn zero_y2_is_rejected() {
        let spec = KappaScanSpec { y2: [0.0; 3], ..Default::default() };
        assert!(matches!(kappa_scan(&spec), Err(Error::CoincidentSingularity)));
    }
}
