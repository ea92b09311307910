//! Randomized invariants of the discrete operators.

use dirac_coulomb::antisym::{antisymmetrize, exchange, is_antisymmetric, symmetrize, TwoBodyField};
use dirac_coulomb::eigen::dense_eig;
use dirac_coulomb::field::Field;
use dirac_coulomb::grid::GridSpec;
use dirac_coulomb::hamiltonian::{apply_hdc, build_y_operator, dirac_operator, hdc_operator, PotentialSpec, Sector};
use dirac_coulomb::kron::two_body_free_symbol;
use dirac_coulomb::probes::square::square_deviation;
use dirac_coulomb::probes::{fourier_multiply, k_squared};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn exchange_is_an_involution(seed in any::<u64>()) {
        let grid = GridSpec::new(2, 3.0).unwrap();
        let psi = TwoBodyField::random(grid, &mut rng(seed));
        let back = exchange(&exchange(&psi));
        prop_assert_eq!(back.field().data(), psi.field().data());
    }

    #[test]
    fn projections_split_every_field(seed in any::<u64>()) {
        let grid = GridSpec::new(2, 3.0).unwrap();
        let psi = TwoBodyField::random(grid, &mut rng(seed));
        let a = antisymmetrize(&psi);
        let s = symmetrize(&psi);
        prop_assert!(is_antisymmetric(&a, 1e-14));
        prop_assert!(is_antisymmetric(&antisymmetrize(&a), 1e-14));
        let sum = a.field().add(s.field()).unwrap();
        prop_assert!(sum.sub(psi.field()).unwrap().norm() <= 1e-14 * psi.norm());
        prop_assert!(a.inner(&s).unwrap().norm() <= 1e-12 * psi.norm() * psi.norm());
    }

    #[test]
    fn hdc_is_hermitian_for_any_couplings(
        k in -0.9..0.9f64, k0 in 0.0..2.0f64, m in 0.0..2.0f64, seed in any::<u64>()
    ) {
        let grid = GridSpec::new(2, 4.0).unwrap();
        let op = hdc_operator(grid, &PotentialSpec::new(k, k0), m).unwrap();
        let mut r = rng(seed);
        let x = TwoBodyField::random(grid, &mut r).into_field();
        let y = TwoBodyField::random(grid, &mut r).into_field();
        let lhs = op.apply(&x).unwrap().inner(&y).unwrap();
        let rhs = x.inner(&op.apply(&y).unwrap()).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
    }

    #[test]
    fn hdc_preserves_antisymmetry(k in -0.9..0.9f64, m in 0.0..2.0f64, seed in any::<u64>()) {
        let grid = GridSpec::new(4, 5.0).unwrap();
        let psi = antisymmetrize(&TwoBodyField::band_limited(grid, 1, &mut rng(seed)));
        let h = apply_hdc(&psi, &PotentialSpec::new(k, 1.0), m).unwrap();
        let mut d = exchange(&h);
        d.field_mut().axpy(Complex64::new(1.0, 0.0), h.field()).unwrap();
        prop_assert!(d.norm() <= 1e-12 * h.norm());
    }

    #[test]
    fn free_symbol_spectrum_is_sums_of_one_body_energies(
        a in prop::array::uniform3(-3.0..3.0f64), b in prop::array::uniform3(-3.0..3.0f64), m in 0.0..2.0f64
    ) {
        let sym = two_body_free_symbol(a, b, m).unwrap();
        let e = |x: [f64; 3]| (x.iter().map(|v| v * v).sum::<f64>() + m * m).sqrt();
        let mut expected: Vec<f64> = [1.0, -1.0]
            .iter()
            .flat_map(|s1| [1.0, -1.0].map(|s2| s1 * e(a) + s2 * e(b)))
            .flat_map(|v| [v; 4])
            .collect();
        expected.sort_by(f64::total_cmp);
        let got = dense_eig(&sym.blocks).unwrap().values;
        for (x, y) in got.iter().zip(&expected) {
            prop_assert!((x - y).abs() <= 1e-10 * (1.0 + y.abs()));
        }
    }

    #[test]
    fn free_dirac_squares_to_laplacian_plus_mass(m in 0.0..3.0f64, seed in any::<u64>()) {
        let grid = GridSpec::new(8, 7.0).unwrap();
        let op = dirac_operator(grid, m, 0.0).unwrap();
        let x = Field::random(grid, 3, 4, &mut rng(seed));
        let hh = op.apply(&op.apply(&x).unwrap()).unwrap();
        let symbol: Vec<f64> = k_squared(&grid).iter().map(|v| v + m * m).collect();
        let expect = fourier_multiply(&x, &symbol);
        prop_assert!(hh.sub(&expect).unwrap().norm() <= 1e-12 * expect.norm());
    }

    #[test]
    fn sector_squares_hold_for_any_mass(m in 0.0..3.0f64, seed in any::<u64>()) {
        let grid = GridSpec::new(8, 6.0).unwrap();
        let free = PotentialSpec::free();
        let pp = build_y_operator(grid, &free, m, [0.0, 0.0, 1.0], Sector::PlusPlus).unwrap().shifted(-m);
        prop_assert!(square_deviation(&pp, m, seed).unwrap() <= 1e-12);
    }
}
