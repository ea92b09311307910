//! Weyl residual ladders for the default (λ, μ) targets.
//!
//! `cargo run --release --example weyl_ladder`

use dirac_coulomb::hamiltonian::PotentialSpec;
use dirac_coulomb::probes::weyl::{default_targets, weyl_probe};

fn main() -> dirac_coulomb::Result<()> {
    let pot = PotentialSpec::new(-0.5, 1.0);
    for spec in default_targets(pot) {
        let ladder = weyl_probe(&spec, 1)?;
        println!(
            "lambda = {:.4}  mu = {:.4}  lambda - mu = {:+.4}  slope = {:.3}",
            ladder.lambda, ladder.mu, ladder.target, ladder.slope
        );
        for row in &ladder.rows {
            println!(
                "  n = {:2}  u-shell = {:2}{}  box = {:6.2}  residual = {:.4e}  norm = {:.12}",
                row.n,
                row.u_shell,
                if row.cap_binds { "*" } else { " " },
                row.box_len,
                row.residual,
                row.norm
            );
        }
    }
    Ok(())
}
