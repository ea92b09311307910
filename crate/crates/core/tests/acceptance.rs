//! Acceptance run: one line per criterion, nonzero exit if any fails.
//!
//! Runs as a plain binary (`harness = false`) so the lines are always shown.
//! `DCOP_ACCEPT=1,3,5` restricts the run to the listed criteria.

use std::time::{Duration, Instant};

use dirac_coulomb::clifford::{check_clifford, standard_dirac_rep};
use dirac_coulomb::grid::GridSpec;
use dirac_coulomb::hamiltonian::FormCoupling;
use dirac_coulomb::model::{additive_constant_check, mirror_check, ModelProbeSpec};
use dirac_coulomb::probes::hardy::{hardy_probe, HardySpec};
use dirac_coulomb::probes::hydrogenic::{hydrogenic_validation, HydrogenicSpec};
use dirac_coulomb::probes::kappa::{kappa_scan, KappaScanSpec, LABEL};
use dirac_coulomb::probes::square::square_identity_check;
use dirac_coulomb::probes::weyl::{default_targets, weyl_probe};
use dirac_coulomb::verify::{
    block_kron_deviation, conjugation_deviation, dense_oracle, exchange_commutator, field_potential, form_deviation,
    mat_deviation, vec_symbol_deviation,
};
use dirac_coulomb::Result;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome { pass, detail: detail.into() })
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

fn exact_identities(t: Instant) -> Result<Outcome> {
    let clifford = check_clifford(&standard_dirac_rep()).iter().map(|r| r.deviation).fold(0.0, f64::max);
    let block = block_kron_deviation(100, 1)?;
    let mat = mat_deviation(100, 1);
    let conj = conjugation_deviation(100, 1)?;
    let worst = [clifford, block, mat, conj.s, conj.t].into_iter().fold(0.0, f64::max);
    let el = t.elapsed();
    outcome(worst == 0.0 && conj.orthogonal && within(el, 1.0), format!("max deviation {worst:e} (exact), {:.3} s < 1 s", el.as_secs_f64()))
}

fn vec_consistency(t: Instant) -> Result<Outcome> {
    let dev = vec_symbol_deviation(100, 1)?;
    let el = t.elapsed();
    outcome(dev <= 1e-12 && within(el, 5.0), format!("100 symbols, max deviation {dev:.2e} <= 1e-12, {:.2} s < 5 s", el.as_secs_f64()))
}

fn dense_equivalence(t: Instant) -> Result<Outcome> {
    let devs = dense_oracle(50, 1)?;
    let worst = devs.iter().map(|(_, d)| *d).fold(0.0, f64::max);
    let el = t.elapsed();
    let names: Vec<&str> = devs.iter().map(|(n, _)| n.as_str()).collect();
    outcome(
        devs.len() == 3 && worst <= 1e-12 && within(el, 30.0),
        format!("{names:?} on 50 vectors, max rel. deviation {worst:.2e} <= 1e-12, {:.1} s < 30 s", el.as_secs_f64()),
    )
}

fn antisymmetric_invariance(t: Instant) -> Result<Outcome> {
    let grid = GridSpec::new(8, 6.0)?;
    let comm = exchange_commutator(grid, 1)?;
    let form = form_deviation(grid, FormCoupling::ExchangeFolded, 1)?;
    let fworst = form.plus.max(form.minus);
    let el = t.elapsed();
    outcome(
        comm <= 1e-10 && fworst <= 1e-9 && within(el, 120.0),
        format!("N=8 commutator {comm:.2e} <= 1e-10, form deviation {fworst:.2e} <= 1e-9, {:.1} s < 120 s", el.as_secs_f64()),
    )
}

fn square_identities(_: Instant) -> Result<Outcome> {
    let r = square_identity_check(1.0, GridSpec::new(16, 8.0)?, 1)?;
    let worst = r.plus_plus.max(r.minus_minus).max(r.h00);
    outcome(worst <= 1e-12, format!("N=16 max rel. deviation {worst:.2e} <= 1e-12"))
}

fn weyl_ladders(t: Instant) -> Result<Outcome> {
    let mut pass = true;
    let mut parts = Vec::new();
    let (mut below, mut above) = (false, false);
    for spec in default_targets(field_potential()) {
        let l = weyl_probe(&spec, 1)?;
        let ok = (l.slope + 1.0).abs() <= 0.2 && l.decreasing && l.rows.iter().map(|r| r.n).eq([4, 8, 16]);
        pass &= ok;
        below |= ok && l.target < 0.0;
        above |= ok && l.target > 2.0 * spec.mass;
        parts.push(format!("lambda-mu {:+.2}: slope {:.3}", l.target, l.slope));
    }
    let el = t.elapsed();
    outcome(
        pass && below && above && parts.len() >= 3 && within(el, 600.0),
        format!("{} (need -1 +- 0.2), {:.0} s < 600 s", parts.join(", "), el.as_secs_f64()),
    )
}

fn hardy(t: Instant) -> Result<Outcome> {
    let spec = HardySpec::default();
    let r = hardy_probe(&spec, true, true)?;
    let win_ok = r.win_ratios.len() == 100 && r.win_min >= 1.0 - 1e-3;
    let ha_worst = r.ha.iter().map(|s| s.worst_ratio.unwrap_or(f64::INFINITY)).fold(0.0, f64::max);
    let mus_ok = [0.0, 0.25, 0.5].iter().all(|m| r.ha.iter().any(|s| s.mu_hat == *m));
    let el = t.elapsed();
    outcome(
        win_ok && mus_ok && ha_worst <= 1.0 + 1e-3 && within(el, 120.0),
        format!(
            "WIN min ratio {:.6} >= 0.999 over {} trials, HA worst ratio {ha_worst:.6} <= 1.001, {:.1} s < 120 s",
            r.win_min,
            r.win_ratios.len(),
            el.as_secs_f64()
        ),
    )
}

fn hydrogenic(t: Instant) -> Result<Outcome> {
    let r = hydrogenic_validation(&HydrogenicSpec::default())?;
    let last = r.rows.last().expect("grid rows");
    let err = last.relative_error.unwrap_or(f64::INFINITY);
    let el = t.elapsed();
    outcome(
        last.points == 48 && err <= 1e-2 && r.monotone && within(el, 600.0),
        format!(
            "oracle {:.6}, N=48 E = {:.6}, rel. error {err:.2e} <= 1e-2, monotone {}, {:.0} s < 600 s",
            r.oracle.unwrap_or(f64::NAN),
            last.eigenvalue.unwrap_or(f64::NAN),
            r.monotone,
            el.as_secs_f64()
        ),
    )
}

fn no_eigenvalue_evidence(_: Instant) -> Result<Outcome> {
    let r = kappa_scan(&KappaScanSpec::default())?;
    let longest = r.overlays.iter().map(|o| o.longest_run).max().unwrap_or(0);
    let tested = r.overlays.len();
    outcome(
        r.label == LABEL && r.branch_count > 0 && r.confinement_excess == 0.0 && !r.any_tracks,
        format!(
            "[{}] {} branches, excursion outside gaps {:.1e}, {tested} curves, longest match run {longest} < 3",
            r.label, r.branch_count, r.confinement_excess
        ),
    )
}

fn model_operator(t: Instant) -> Result<Outcome> {
    let spec = ModelProbeSpec::default();
    let grid = GridSpec::new(spec.points, spec.box_len)?;
    let add = additive_constant_check(&spec.model, grid, spec.dense_points, spec.seed)?;
    let mir = mirror_check(&spec.model, grid, spec.seed)?;
    let el = t.elapsed();
    outcome(
        add.dense_deviation <= 1e-10
            && add.lanczos_deviation <= add.lanczos_tol
            && mir.spectral_deviation <= 1e-8
            && spec.model.k1 != spec.model.k2
            && within(el, 300.0),
        format!(
            "k0 shift dense {:.1e}, Lanczos {:.1e} <= {:.0e}; mirror spectra {:.1e} <= 1e-8; {:.0} s < 300 s",
            add.dense_deviation,
            add.lanczos_deviation,
            add.lanczos_tol,
            mir.spectral_deviation,
            el.as_secs_f64()
        ),
    )
}

type Check = fn(Instant) -> Result<Outcome>;

fn main() {
    let criteria: [(usize, &str, Check); 10] = [
        (1, "exact identities", exact_identities),
        (2, "two-body symbol consistency", vec_consistency),
        (3, "dense oracle", dense_equivalence),
        (4, "antisymmetric invariance", antisymmetric_invariance),
        (5, "square identities", square_identities),
        (6, "Weyl ladders", weyl_ladders),
        (7, "Hardy probes", hardy),
        (8, "hydrogenic validation", hydrogenic),
        (9, "no-eigenvalue evidence", no_eigenvalue_evidence),
        (10, "model operator", model_operator),
    ];
    // `cargo test` passes harness flags such as `--nocapture`; only bare
    // numbers select criteria, as does DCOP_ACCEPT.
    let mut only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    if let Ok(v) = std::env::var("DCOP_ACCEPT") {
        only.extend(v.split(',').filter_map(|s| s.trim().parse::<usize>().ok()));
    }
    let mut failed = 0;
    for (id, name, check) in criteria {
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let t = Instant::now();
        let (pass, detail) = match check(t) {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!pass);
        println!("criterion {id:2} {:<4} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
