//! Gap eigenvalue branches of `H(κ)` and the Coulomb-curve comparison.

use dirac_coulomb::probes::kappa::{kappa_scan, KappaScanSpec};

fn main() -> dirac_coulomb::Result<()> {
    let report = kappa_scan(&KappaScanSpec::default())?;
    println!("[{}]", report.label);
    for s in &report.sectors {
        println!("sector {:?}, gap {:?}", s.sector, s.gap);
        for sec in &s.sections {
            let vals: Vec<String> = sec
                .eigenvalues
                .iter()
                .zip(&sec.well_weight)
                .zip(&sec.converged)
                .map(|((e, w), c)| format!("{e:.6}{}(w={w:.2})", if *c { "" } else { "?" }))
                .collect();
            println!("  kappa = {:.2}  matvecs = {:5}  {}", sec.kappa, sec.matvecs, vals.join(" "));
        }
        for (i, b) in s.branches.iter().enumerate() {
            println!("  branch {i}: {:?} -> {:?} (mult {:?})", b.kappas, b.values, b.multiplicity);
        }
    }
    for o in &report.overlays {
        println!(
            "  overlay {:?} lambda = {:.4}{}  longest run = {}",
            o.sector,
            o.lambda,
            if o.adversarial { " (fitted)" } else { "" },
            o.longest_run
        );
    }
    for r in report.records() {
        println!("{:?} {} dev = {:.3e} tol = {:.1e}", r.status, r.name, r.deviation, r.tolerance);
    }
    Ok(())
}
