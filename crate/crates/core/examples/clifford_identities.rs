//! Exact anticommutators of the standard Dirac matrices, and what happens
//! when one generator is scaled.

use dirac_coulomb::clifford::{check_clifford, standard_dirac_rep};

fn main() {
    let rep = standard_dirac_rep();
    for r in check_clifford(&rep) {
        println!("{:<28} deviation = {}", r.name, r.deviation);
    }

    let mut scaled = rep.clone();
    scaled.alpha[0] = scaled.alpha[0].scale(2.into());
    let bad: Vec<_> = check_clifford(&scaled).into_iter().filter(|r| !r.passed()).collect();
    println!("\nwith alpha1 -> 2 alpha1, {} relations fail:", bad.len());
    for r in bad {
        println!("  {:<28} deviation = {}", r.name, r.deviation);
    }
}
