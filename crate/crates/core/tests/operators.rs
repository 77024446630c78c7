#![allow(clippy::needless_range_loop)]

mod common;

use common::{random_density, random_hermitian, to_rows};
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use realclock_core::operator::{
    build_projector, eigendecompose, unitary_evolve, ComplexMatrix, DensityMatrix, HermitianOperator,
};
use realclock_core::Error;
use realclock_oracles::expm;

#[test]
fn random_hermitian_reconstructs() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..20 {
        let h = random_hermitian(&mut rng, 6, 2.0);
        let dec = eigendecompose(&h).unwrap();
        let diag = ComplexMatrix::from_real_diagonal(dec.eigenvalues());
        let rebuilt = dec.from_eigenbasis(&diag);
        assert!((&rebuilt - h.matrix()).max_abs() <= 1e-10);
        assert!(dec.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
        let v = dec.eigenvectors();
        let gram = &v.adjoint() * v;
        assert!((&gram - &ComplexMatrix::identity(6)).max_abs() <= 1e-10);
    }
}

#[test]
fn non_hermitian_input_names_entry() {
    let m = ComplexMatrix::from_row_slice(
        2,
        &[
            C64::new(1.0, 0.0),
            C64::new(2.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
        ],
    )
    .unwrap();
    match HermitianOperator::new(m) {
        Err(Error::NotHermitian { row, col, .. }) => assert_eq!((row.min(col), row.max(col)), (0, 1)),
        other => panic!("{other:?}"),
    }
}

#[test]
fn projector_examples() {
    let a = HermitianOperator::from_real_diagonal(&[0.0, 1.0, 2.0]);
    let p = build_projector(&a, 1.0, 0.5).unwrap();
    assert_eq!(p.matrix(), &ComplexMatrix::from_real_diagonal(&[0.0, 1.0, 0.0]));
    let empty = build_projector(&a, 10.0, 0.5).unwrap();
    assert_eq!(empty.matrix().max_abs(), 0.0);
    assert_eq!(empty.rank(), 0);

    let px = build_projector(&HermitianOperator::pauli_x(), 1.0, 0.1).unwrap();
    let m = px.matrix();
    assert!((&(m * m) - m).max_abs() < 1e-12);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..2 {
        let image = m[(i, 0)] * s + m[(i, 1)] * s;
        assert!((image - C64::new(s, 0.0)).norm() < 1e-12);
    }
    assert!(build_projector(&a, 1.0, 0.0).is_err());
}

#[test]
fn unitary_examples() {
    let h = HermitianOperator::qubit(1.0);
    let rho = common::plus();
    let same = unitary_evolve(&rho, &h, 0.0).unwrap();
    assert!((&same.matrix().clone() - rho.matrix()).max_abs() < 1e-15);
    let period = unitary_evolve(&rho, &h, 2.0 * std::f64::consts::PI).unwrap();
    assert!((&period.matrix().clone() - rho.matrix()).max_abs() < 1e-14);
    assert!(matches!(
        unitary_evolve(&DensityMatrix::maximally_mixed(3), &h, 1.0),
        Err(Error::DimensionMismatch { .. })
    ));
}

#[test]
fn qubit_phase_against_taylor_exponential() {
    let omega = 1.7;
    let t = 3.1;
    let h = HermitianOperator::qubit(omega);
    let rho = common::plus();
    let out = unitary_evolve(&rho, &h, t).unwrap();
    let gen: Vec<Vec<C64>> = to_rows(h.matrix())
        .into_iter()
        .map(|row| row.into_iter().map(|v| v * C64::new(0.0, -t)).collect())
        .collect();
    let u = expm::expm(&gen);
    let reference = expm::matmul(&expm::matmul(&u, &to_rows(rho.matrix())), &expm::adjoint(&u));
    for i in 0..2 {
        for j in 0..2 {
            assert!((out.matrix()[(i, j)] - reference[i][j]).norm() < 1e-13);
        }
    }
    let expected = C64::new(0.5, 0.0) * C64::from_polar(1.0, -omega * t);
    assert!((out.matrix()[(1, 0)] - expected).norm() < 1e-14);
    assert!((out.matrix()[(0, 1)].norm() - 0.5).abs() < 1e-15);
}

#[test]
fn random_unitary_against_taylor_exponential() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for n in 2..=5 {
        let h = random_hermitian(&mut rng, n, 1.0);
        let rho = random_density(&mut rng, n);
        let t = 2.5;
        let out = unitary_evolve(&rho, &h, t).unwrap();
        let gen: Vec<Vec<C64>> = to_rows(h.matrix())
            .into_iter()
            .map(|row| row.into_iter().map(|v| v * C64::new(0.0, -t)).collect())
            .collect();
        let u = expm::expm(&gen);
        let reference = expm::matmul(&expm::matmul(&u, &to_rows(rho.matrix())), &expm::adjoint(&u));
        for i in 0..n {
            for j in 0..n {
                assert!((out.matrix()[(i, j)] - reference[i][j]).norm() < 1e-12);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn unitary_preserves_spectrum(seed in any::<u64>(), n in 2usize..6, t in -10.0f64..10.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_hermitian(&mut rng, n, 5.0);
        let rho = random_density(&mut rng, n);
        let out = unitary_evolve(&rho, &h, t).unwrap();
        for (a, b) in rho.eigenvalues().iter().zip(out.eigenvalues()) {
            prop_assert!((a - b).abs() <= 1e-9);
        }
        prop_assert!((out.matrix().trace() - C64::new(1.0, 0.0)).norm() <= 1e-10);
        prop_assert!(out.matrix().hermiticity_defect().0 <= 1e-12);
    }

    #[test]
    fn projector_commutes(seed in any::<u64>(), n in 2usize..7, center in -2.0f64..2.0, halfwidth in 0.05f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_hermitian(&mut rng, n, 1.0);
        let p = build_projector(&a, center, halfwidth).unwrap();
        prop_assert!(p.matrix().commutator(a.matrix()).max_abs() <= 1e-10);
        let m = p.matrix();
        prop_assert!((&(m * m) - m).max_abs() <= 1e-10);
    }

    #[test]
    fn degenerate_spectrum_selection_is_basis_independent(seed in any::<u64>()) {
        // Rotate diag(1, 1, 3) by a random unitary; the projector onto the
        // degenerate pair must not depend on the basis chosen inside it.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_hermitian(&mut rng, 3, 1.0);
        let dec = eigendecompose(&g).unwrap();
        let d = ComplexMatrix::from_real_diagonal(&[1.0, 1.0, 3.0]);
        let a = HermitianOperator::new(dec.from_eigenbasis(&d).hermitian_part()).unwrap();
        let p = build_projector(&a, 1.0, 0.5).unwrap();
        prop_assert_eq!(p.rank(), 2);
        let expected = dec.from_eigenbasis(&ComplexMatrix::from_real_diagonal(&[1.0, 1.0, 0.0]));
        prop_assert!((&expected - p.matrix()).max_abs() < 1e-10);
    }
}
