//! Matrix-free application of the two-body operator on a 6D grid.
//!
//! `cargo run --example hdc_apply -- 8`

use std::time::Instant;

use dirac_coulomb::eigen::check_hermitian;
use dirac_coulomb::field::Field;
use dirac_coulomb::grid::GridSpec;
use dirac_coulomb::hamiltonian::{hdc_operator, PotentialSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> dirac_coulomb::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(6);
    let grid = GridSpec::new(n, 6.0)?;
    let op = hdc_operator(grid, &PotentialSpec::new(-0.5, 1.0), 1.0)?;
    println!("N = {n}, 6D sites = {}, components = {}, dim = {}", grid.sites(6), op.ncomp(), op.dim());

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let x = Field::random(grid, 6, op.ncomp(), &mut rng);
    let t = Instant::now();
    let y = op.apply(&x)?;
    println!("one apply: {:.3} s", t.elapsed().as_secs_f64());
    println!("<x, Hx> = {:.6}", x.inner(&y)?);

    let defect = check_hermitian(&|v: &[_]| op.apply_slice(v), op.dim(), 2)?;
    println!("Hermiticity defect: {defect:.2e}");
    Ok(())
}
