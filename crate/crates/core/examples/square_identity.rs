//! Spectral exactness of the sector square identities on random fields.

use dirac_coulomb::grid::GridSpec;
use dirac_coulomb::probes::square::square_identity_check;

fn main() -> dirac_coulomb::Result<()> {
    for n in [8, 16] {
        let r = square_identity_check(1.0, GridSpec::new(n, 8.0)?, 1)?;
        println!("N = {n:2}  ++: {:.2e}  --: {:.2e}  H00: {:.2e}", r.plus_plus, r.minus_minus, r.h00);
    }
    Ok(())
}
