//! Extremal eigenvalues of `H_DC` at N=2 from restarted Lanczos, checked
//! against a dense diagonalization of the assembled matrix.

use dirac_coulomb::eigen::{dense_eig, lanczos, LanczosOptions, Target};
use dirac_coulomb::grid::GridSpec;
use dirac_coulomb::hamiltonian::{hdc_operator, PotentialSpec};
use dirac_coulomb::operator::build_dense;

fn main() -> dirac_coulomb::Result<()> {
    let grid = GridSpec::new(2, 4.0)?;
    let op = hdc_operator(grid, &PotentialSpec::new(-0.5, 1.0), 1.0)?;
    let dense = dense_eig(&build_dense(&op)?)?;
    println!("dim = {}, dense spectrum in [{:.6}, {:.6}]", op.dim(), dense.values[0], dense.values[op.dim() - 1]);

    for target in [Target::Lowest, Target::Highest] {
        let opts = LanczosOptions { how_many: 4, target, tol: 1e-10, seed: 1, ..Default::default() };
        let res = lanczos(|x| op.apply_slice(x), op.dim(), &opts)?;
        println!("{target:?} ({} matvecs, {} restarts)", res.iterations, res.restarts);
        for (v, r) in res.ritz_values.iter().zip(&res.residual_norms) {
            let nearest = dense.values.iter().map(|d| (d - v).abs()).fold(f64::INFINITY, f64::min);
            println!("  {v:+.10}  residual {r:.1e}  |dense - ritz| {nearest:.1e}");
        }
    }
    Ok(())
}
