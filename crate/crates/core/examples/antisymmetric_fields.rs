//! Exchange antisymmetry of two-body fields and its preservation by `H_DC`.

use dirac_coulomb::antisym::{antisymmetrize, block_relation_defect, exchange, is_antisymmetric, TwoBodyField};
use dirac_coulomb::grid::GridSpec;
use dirac_coulomb::hamiltonian::{apply_hdc, PotentialSpec};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> dirac_coulomb::Result<()> {
    let grid = GridSpec::new(4, 6.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let psi = antisymmetrize(&TwoBodyField::band_limited(grid, 1, &mut rng));
    println!("dim = {}", psi.field().data().len());
    println!("antisymmetric: {}", is_antisymmetric(&psi, 1e-12));
    println!("block relation defect F_kj = -F_jk^T: {:.2e}", block_relation_defect(&psi, -1.0));

    let pot = PotentialSpec::new(-0.5, 1.0);
    let h = apply_hdc(&psi, &pot, 1.0)?;
    let mut defect = exchange(&h);
    defect.field_mut().axpy(Complex64::new(1.0, 0.0), h.field())?;
    println!("||Pi H psi - H psi|| / ||H psi|| with Pi psi = -psi: {:.2e}", defect.norm() / h.norm());
    Ok(())
}
