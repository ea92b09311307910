//! Additive `k₀` shift and the `k₁ ↔ k₂` mirror of the model fibre operator.

use dirac_coulomb::grid::GridSpec;
use dirac_coulomb::model::{additive_constant_check, mirror_check, ModelSpec};

fn main() -> dirac_coulomb::Result<()> {
    let spec = ModelSpec::default();
    let grid = GridSpec::new(16, 12.0)?;
    println!("{spec:?}");

    let add = additive_constant_check(&spec, grid, 6, 1)?;
    println!("shift k0/(sqrt2 |y2|) = {:.10}", add.shift);
    println!("dense spectra (N = {}): max deviation {:.2e}", add.dense_points, add.dense_deviation);
    println!("shift-invert: max deviation {:.2e} (tol {:.0e})", add.lanczos_deviation, add.lanczos_tol);

    let mir = mirror_check(&spec, grid, 1)?;
    println!("mirror intertwining defect {:.2e}", mir.intertwining);
    println!("spectrum (k1, k2): {:.8?}", mir.spectra.0);
    println!("spectrum (k2, k1): {:.8?}", mir.spectra.1);
    println!("max deviation {:.2e}", mir.spectral_deviation);
    Ok(())
}
