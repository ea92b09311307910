//! Ground state of `α·p + mβ + k/|x|` on refining grids, against the radial
//! shooting oracle.

use dirac_coulomb::probes::hydrogenic::{hydrogenic_validation, HydrogenicSpec};

fn main() -> dirac_coulomb::Result<()> {
    let spec = HydrogenicSpec::default();
    let report = hydrogenic_validation(&spec)?;
    println!("k = {}  m = {}", report.k, report.mass);
    println!("closed form   {:.10}", report.closed_form);
    println!("radial oracle {:.10}", report.oracle.unwrap_or(f64::NAN));
    for row in &report.rows {
        println!(
            "N = {:2}  E = {:.8}  rel. error = {:.3e}  matvecs = {}",
            row.points,
            row.eigenvalue.unwrap_or(f64::NAN),
            row.relative_error.unwrap_or(f64::NAN),
            row.matvecs
        );
    }
    println!("monotone: {}", report.monotone);
    Ok(())
}
