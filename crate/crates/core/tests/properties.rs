//! Physical-consistency properties of channels, steps and the sampler.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use percwalk::channels::{calibrate, make_bitflip, make_dephasing, KrausChannel, NoiseKind};
use percwalk::lattice::LatticeSpec;
use percwalk::qmatrix::{hermitian_eigen, hermitian_eigenvalues, partial_trace_position, trace_distance, ComplexMatrix, DensityOperator};
use percwalk::walk::{
    evolve_exact, evolve_monte_carlo_ensemble, exact_step, CoinSpec, MonteCarloOptions, PureEnsemble, TrajectoryMode,
    WalkerState,
};

fn random_density(rng: &mut impl Rng, dim: usize) -> DensityOperator {
    let g: Vec<Complex64> =
        (0..dim * dim).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let g = ComplexMatrix::new(dim, dim, g).unwrap();
    let m = &g * &g.adjoint();
    let t = m.trace().re;
    DensityOperator::new(m.scale_real(1.0 / t)).unwrap()
}

fn channels(rng: &mut impl Rng) -> Vec<KrausChannel> {
    vec![
        KrausChannel::identity(),
        make_dephasing(rng.random_range(0.0..=1.0)).unwrap(),
        make_bitflip(rng.random_range(0.0..=0.5)).unwrap(),
    ]
}

#[test]
fn channels_preserve_trace_and_positivity() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let rho = random_density(&mut rng, 2);
        for ch in channels(&mut rng) {
            let out = ch.apply_matrix(rho.matrix()).unwrap();
            assert!((out.trace().re - 1.0).abs() < 1e-12);
            assert!(out.hermitian_defect() < 1e-14);
            assert!(hermitian_eigenvalues(&out).unwrap()[0] >= -1e-12);
        }
    }
}

#[test]
fn channels_contract_trace_distance() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..300 {
        let (a, b) = (random_density(&mut rng, 2), random_density(&mut rng, 2));
        let before = trace_distance(&a, &b).unwrap();
        for ch in channels(&mut rng) {
            let after = trace_distance(&ch.apply(&a).unwrap(), &ch.apply(&b).unwrap()).unwrap();
            assert!(after <= before + 1e-12);
        }
    }
}

#[test]
fn partial_trace_contracts_trace_distance() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let (a, b) = (random_density(&mut rng, 8), random_density(&mut rng, 8));
        let full = trace_distance(&a, &b).unwrap();
        let coin = trace_distance(&partial_trace_position(&a).unwrap(), &partial_trace_position(&b).unwrap()).unwrap();
        assert!(coin <= full + 1e-12);
    }
}

#[test]
fn percolated_noisy_steps_stay_physical() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let lattices = [LatticeSpec::new(2).unwrap(), LatticeSpec::new(3).unwrap()];
    for i in 0..100 {
        let l = lattices[i % 2];
        let rho = random_density(&mut rng, 2 * l.vertices());
        let kind = [NoiseKind::None, NoiseKind::Dephasing, NoiseKind::Bitflip][i % 3];
        let noise = calibrate(kind, rng.random_range(0.0..2.0), 1.0).unwrap();
        let coin = CoinSpec::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let out = exact_step(rho.matrix(), &l, rng.random_range(0.0..=1.0), &coin, &noise).unwrap();
        assert!((out.trace().re - 1.0).abs() < 1e-9);
        assert!(hermitian_eigenvalues(&out).unwrap()[0] >= -1e-7);
    }
}

/// The sampler's error shrinks like `1/√T`.
#[test]
fn monte_carlo_error_scales_as_inverse_sqrt() {
    let l = LatticeSpec::new(2).unwrap();
    let coin_state = DensityOperator::pure(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]).unwrap();
    let rho0 = WalkerState::localized(l, &coin_state).unwrap();
    let noise = calibrate(NoiseKind::Dephasing, 0.3, 1.0).unwrap();
    let coin = CoinSpec::hadamard();
    let exact = evolve_exact(&rho0, 3, 0.5, &coin, &noise).unwrap();
    let init = PureEnsemble::from_state(&rho0).unwrap();

    let mut scaled = Vec::new();
    for t in [400usize, 1600, 6400] {
        let mut opts = MonteCarloOptions::new(t, 99);
        opts.mode = TrajectoryMode::PureState;
        let est = evolve_monte_carlo_ensemble(&init, 3, 0.5, &coin, &noise, &opts).unwrap();
        let se = est.standard_error().unwrap();
        let mean_se = se.as_slice().iter().map(|z| z.re + z.im).sum::<f64>() / se.as_slice().len() as f64;
        scaled.push(mean_se * (t as f64).sqrt());
        let err = est.state().unwrap().matrix().max_abs_diff(exact.matrix());
        let max_se = se.as_slice().iter().map(|z| z.re.max(z.im)).fold(0.0, f64::max);
        assert!(err <= 6.0 * max_se, "T = {t}: error {err} vs SE {max_se}");
    }
    for w in scaled.windows(2) {
        assert!((w[1] / w[0] - 1.0).abs() < 0.15, "SE·√T drifted: {scaled:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigendecomposition_reconstructs(seed in any::<u64>(), dim in 1usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_density(&mut rng, dim);
        let eig = hermitian_eigen(rho.matrix()).unwrap();
        prop_assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(eig.vectors.unitarity_defect() < 1e-10);
        let diag = ComplexMatrix::diagonal(&eig.values.iter().map(|&v| Complex64::new(v, 0.0)).collect::<Vec<_>>());
        let back = &(&eig.vectors * &diag) * &eig.vectors.adjoint();
        prop_assert!(back.max_abs_diff(rho.matrix()) < 1e-10);
        prop_assert!((eig.values.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn calibrated_channels_are_complete(gamma in 0.0f64..50.0, dt in 0.01f64..5.0) {
        for kind in [NoiseKind::Dephasing, NoiseKind::Bitflip] {
            let spec = calibrate(kind, gamma, dt).unwrap();
            prop_assert!(spec.channel().completeness_defect() < 1e-12);
        }
    }
}
