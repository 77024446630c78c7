use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use realclock_core::clock::ClockModel;
use realclock_core::evolution::{evolve_master, EvolutionConfig};
use realclock_core::operator::{unitary_evolve, DensityMatrix};
use realclock_core::quadrature::TimeGrid;
use realclock_core::zurek::{
    brute_force_z, recurrence_scan, reduced_density, suppression_exponent, z_ideal, z_realclock, CoherenceMode,
    SpinBath,
};
use realclock_oracles::BigFixed;
use std::f64::consts::PI;

/// Off-diagonal entry of the system block after tracing out the bath, from a
/// full density matrix.
fn traced_coherence(rho: &DensityMatrix) -> C64 {
    let half = rho.dim() / 2;
    (0..half).map(|e| rho.matrix()[(e, half + e)]).sum()
}

#[test]
fn random_baths_agree_with_state_vectors() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut worst: f64 = 0.0;
    for _ in 0..60 {
        let n = rng.random_range(1..=10);
        let bath = SpinBath::random(n, 0.1, 2.0, &mut rng).unwrap();
        for _ in 0..10 {
            let t = rng.random_range(0.0..20.0);
            worst = worst.max((z_ideal(&bath, t) - brute_force_z(&bath, t).unwrap()).norm());
        }
    }
    assert!(worst <= 1e-10, "{worst}");
}

#[test]
fn eight_atoms_over_hundred_times() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let bath = SpinBath::random(8, 0.1, 2.0, &mut rng).unwrap();
    for k in 0..100 {
        let t = 20.0 * k as f64 / 99.0;
        let d = (z_ideal(&bath, t) - brute_force_z(&bath, t).unwrap()).norm();
        assert!(d <= 1e-10);
    }
}

#[test]
fn full_interaction_hamiltonian_cross_check() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for n in 1..=6 {
        let bath = SpinBath::random(n, 0.1, 2.0, &mut rng).unwrap();
        let h = bath.interaction_hamiltonian().unwrap();
        let rho0 = DensityMatrix::pure(&bath.initial_state().unwrap()).unwrap();
        let (a, b) = bath.system_amplitudes();
        for t in [0.4, 3.3, 11.0] {
            // The product formula follows the exp(+i H t) phase convention.
            let rho = unitary_evolve(&rho0, &h, -t).unwrap();
            let z = traced_coherence(&rho) / (a * b.conj());
            assert!((z - z_ideal(&bath, t)).norm() < 1e-10, "n = {n}, t = {t}");
        }
    }
}

#[test]
fn single_atom_master_equation_decay_rate() {
    let g = 0.4;
    let t_planck = 0.05;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let bath = SpinBath::random(1, g, g, &mut rng).unwrap();
    let h = bath.interaction_hamiltonian().unwrap();
    let rho0 = DensityMatrix::pure(&bath.initial_state().unwrap()).unwrap();
    let clock = ClockModel::fundamental_limit(t_planck, 100.0).unwrap();
    let cfg = EvolutionConfig::new(0.5, TimeGrid::new(0.0, 1.0, 3).unwrap()).unwrap();
    let traj = evolve_master(&rho0, &h, &clock, 9.0, &cfg).unwrap();
    let (a, b) = bath.system_amplitudes();
    for p in traj.iter().skip(1) {
        let z_master = traced_coherence(&p.state) / (a * b.conj());
        let ratio = z_master.norm() / z_ideal(&bath, p.time).norm();
        let expected = z_realclock(&bath, p.time, t_planck).norm() / z_ideal(&bath, p.time).norm();
        assert!((ratio - expected).abs() < 1e-9, "t = {}", p.time);
    }
}

#[test]
fn realclock_example() {
    let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let bath = SpinBath::new((1..=6).map(|k| 0.3 * k as f64).collect(), vec![(s, s); 6], (s, s)).unwrap();
    let t = 10.0;
    let ratio = z_realclock(&bath, t, 0.05).norm() / z_ideal(&bath, t).norm();
    let tp = BigFixed::from_f64(0.05);
    let mut exponent = BigFixed::zero();
    for k in 1..=6 {
        let two_g = &BigFixed::from_int(2) * &BigFixed::from_f64(0.3 * k as f64);
        exponent = &exponent + &two_g.powi(2);
    }
    let exponent = &(&exponent * &tp.cbrt().powi(4)) * &BigFixed::from_f64(t).cbrt().powi(2);
    let exact = (-exponent).exp().to_f64();
    assert!((ratio - exact).abs() <= 1e-12 * exact);
    assert_eq!(z_realclock(&bath, 0.0, 0.05), C64::new(1.0, 0.0));
    assert_eq!(z_realclock(&bath, 7.0, 1e-300), z_ideal(&bath, 7.0));
}

#[test]
fn commensurate_recurrence_and_suppression() {
    let g0 = 0.3;
    let bath = SpinBath::commensurate(6, g0).unwrap();
    let t_rec = PI / g0;
    assert!(z_ideal(&bath, t_rec).norm() >= 1.0 - 1e-9);
    let envelope = (-suppression_exponent(&bath, t_rec, 0.05)).exp();
    assert!(z_realclock(&bath, t_rec, 0.05).norm() <= envelope);
    assert!(envelope < 0.5);

    let horizon = 3.0 * PI / g0;
    let ideal = recurrence_scan(&bath, CoherenceMode::Ideal, horizon, 3001, 0.5).unwrap();
    assert!(ideal
        .exceedances
        .iter()
        .any(|&(t, m)| (t - t_rec).abs() < 1e-5 && m >= 1.0 - 1e-9));
    let real = recurrence_scan(&bath, CoherenceMode::RealClock { t_planck: 0.05 }, horizon, 3001, 0.5).unwrap();
    assert!(real.exceedances.iter().all(|&(t, _)| t < 1.0));
    assert!(real.running_sup.windows(2).all(|w| w[1] <= w[0]));
    assert!(recurrence_scan(&bath, CoherenceMode::Ideal, horizon, 999, 0.5).is_err());
}

fn bath_strategy() -> impl Strategy<Value = SpinBath> {
    (any::<u64>(), 1usize..8).prop_map(|(seed, n)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        SpinBath::random(n, 0.0, 2.0, &mut rng).unwrap()
    })
}

proptest! {
    #[test]
    fn realclock_never_exceeds_ideal(bath in bath_strategy(), t in 0.0f64..50.0, tp in 1e-4f64..0.2) {
        let ideal = z_ideal(&bath, t).norm();
        let real = z_realclock(&bath, t, tp).norm();
        prop_assert!(real <= ideal);
        if t > 0.0 && ideal > 0.0 && bath.couplings().iter().any(|&g| g > 1e-3) {
            prop_assert!(real < ideal);
        }
        prop_assert!(real <= (-suppression_exponent(&bath, t, tp)).exp());
        prop_assert!(ideal <= 1.0 + 1e-12);
    }

    #[test]
    fn reduced_state_is_valid(bath in bath_strategy(), t in 0.0f64..50.0, tp in 1e-4f64..0.2) {
        let (a, b) = bath.system_amplitudes();
        for z in [z_ideal(&bath, t), z_realclock(&bath, t, tp)] {
            let (state, rho) = reduced_density(&bath, z).unwrap();
            prop_assert_eq!(state.populations, [a.norm_sqr(), b.norm_sqr()]);
            for ev in rho.eigenvalues() {
                prop_assert!((-1e-12..=1.0 + 1e-12).contains(&ev));
            }
        }
    }

    #[test]
    fn populations_are_time_independent(seed in any::<u64>(), n in 1usize..6, t in 0.0f64..20.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bath = SpinBath::random(n, 0.1, 2.0, &mut rng).unwrap();
        let psi = bath.state_at(t).unwrap();
        let half = psi.len() / 2;
        let up: f64 = psi[..half].iter().map(|c| c.norm_sqr()).sum();
        prop_assert!((up - bath.system_amplitudes().0.norm_sqr()).abs() < 1e-12);
    }
}
