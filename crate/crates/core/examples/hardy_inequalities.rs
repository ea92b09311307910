//! Discrete Hardy-type inequalities on a trial family.

use dirac_coulomb::probes::hardy::{hardy_probe, HardySpec};

fn main() -> dirac_coulomb::Result<()> {
    let spec = HardySpec { family_size: 40, ..Default::default() };
    let report = hardy_probe(&spec, true, true)?;
    println!("win: min ratio over {} trials = {:.6}", report.win_ratios.len(), report.win_min);
    for s in &report.ha {
        match s.worst_ratio {
            Some(r) => println!("ha: mu = {:.2}  {:<28}  a = {:.4}  worst ratio = {r:.6}", s.mu_hat, s.q.label(), s.a.unwrap_or(f64::NAN)),
            None => println!("ha: mu = {:.2}  {:<28}  vacuous", s.mu_hat, s.q.label()),
        }
    }
    Ok(())
}
