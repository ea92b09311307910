//! The full identity suite, as run by `dcop verify`.

use dirac_coulomb::verify::{verify_all, VerifyOptions};

fn main() -> dirac_coulomb::Result<()> {
    let report = verify_all(&VerifyOptions::default())?;
    for r in &report.records {
        println!("{:?}  {:<48} {:.2e} (tol {:.0e})", r.status, r.name, r.deviation, r.tolerance);
    }
    println!("{}", report.summary());
    Ok(())
}
