//! The free two-body symbol in Kronecker order and in block order.
//!
//! Its eigenvalues are `±E(ξ₁) ± E(ξ₂)` with `E(ξ) = √(|ξ|² + m²)`.

use dirac_coulomb::eigen::dense_eig;
use dirac_coulomb::kron::{block_order_permutation, two_body_free_symbol, BasisOrder};

fn main() -> dirac_coulomb::Result<()> {
    let (xi1, xi2, m) = ([0.3, -1.2, 0.5], [1.0, 0.4, -0.7], 1.0);
    let sym = two_body_free_symbol(xi1, xi2, m)?;
    println!("block order permutation: {:?}", block_order_permutation());
    println!("max |blocks - P plain P^T| = {:.2e}", sym.consistency);

    let e = |x: [f64; 3]| (x.iter().map(|v| v * v).sum::<f64>() + m * m).sqrt();
    let (e1, e2) = (e(xi1), e(xi2));
    let mut expected = vec![-e1 - e2, -e1 + e2, e1 - e2, e1 + e2];
    expected.sort_by(f64::total_cmp);
    println!("expected (each 4-fold): {expected:.6?}");

    for order in [BasisOrder::PlainKron, BasisOrder::LargeSmall] {
        let vals = dense_eig(sym.matrix(order))?.values;
        let distinct: Vec<f64> = vals.chunks(4).map(|c| c[0]).collect();
        println!("{order:?}: {distinct:.6?}");
    }
    Ok(())
}
