use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use slotcap::capacity::InputMode;
use slotcap::channel::{lambda_full, one_photon_summary, ChannelMap, NoiseModel};
use slotcap::group::{mc_orthogonality, DElement, Spin};
use slotcap::measurement::simulate_shots;
use slotcap::qstate::{
    basis, embed_block, ket, random_density, random_pure, truncate_to_blocks, werner_parameter,
    BasisTag, DensityOperator, C64,
};

const SAMPLES: usize = 100_000;
const TOL: f64 = 5e-3;

fn inputs(seed: u64, n: usize) -> Vec<DensityOperator> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            if i % 2 == 0 {
                random_pure(&mut rng, 9, BasisTag::TwoSlot).unwrap()
            } else {
                random_density(&mut rng, 9, BasisTag::TwoSlot).unwrap()
            }
        })
        .collect()
}

#[test]
fn sampled_twirl_matches_closed_form() {
    let states = inputs(5, 20);
    for (qi, q) in [0.0, 0.25, 0.5, 0.75, 1.0].into_iter().enumerate() {
        let noise = NoiseModel::mixture(q).unwrap();
        let exact = ChannelMap::analytic(noise);
        let mut worst = 0.0_f64;
        for (i, rho) in states.iter().enumerate() {
            let mc = ChannelMap::monte_carlo(noise, SAMPLES, (qi * 100 + i) as u64);
            let a = lambda_full(rho, &exact).unwrap();
            let b = lambda_full(rho, &mc).unwrap();
            worst = worst.max(a.matrix().max_abs_diff(b.matrix()));
        }
        assert!(worst < TOL, "q = {q}: deviation {worst}");
    }
}

#[test]
fn singlet_through_half_mixture_is_werner() {
    let singlet = DensityOperator::pure(&ket(9, basis::SINGLET), BasisTag::TwoSlot).unwrap();
    let map = ChannelMap::monte_carlo(NoiseModel::mixture(0.5).unwrap(), SAMPLES, 11);
    let out = lambda_full(&singlet, &map).unwrap();
    let block = truncate_to_blocks(&out).unwrap().blocks[2].clone().unwrap();
    let c = werner_parameter(&block.with_basis(BasisTag::Generic).unwrap()).unwrap();
    assert!((c + 0.5).abs() < TOL, "c = {c}");
}

#[test]
fn one_photon_projector_keeps_half_weights() {
    // |V_A⟩ and |V_B⟩ projectors mixed with equal weight
    let m = slotcap::qstate::ComplexMatrix::from_real_diagonal(&[0.0, 0.5, 0.0, 0.5]);
    let rho1 = DensityOperator::new(m, BasisTag::OnePhoton).unwrap();
    let rho = embed_block(&rho1, 1).unwrap();
    let map = ChannelMap::monte_carlo(NoiseModel::mixture(1.0).unwrap(), SAMPLES, 3);
    let out = lambda_full(&rho, &map).unwrap();
    let b1 = truncate_to_blocks(&out).unwrap().blocks[1].clone().unwrap();
    let s = one_photon_summary(&b1).unwrap();
    assert!((s.a - 0.5).abs() < TOL, "a = {}", s.a);
    assert!(s.b.norm() < TOL, "b = {}", s.b);
}

#[test]
fn coherence_shrinks_by_mixture_weight() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = ket(9, basis::V_A);
    v[basis::V_B] = C64::new(h, 0.0);
    v[basis::V_A] = C64::new(h, 0.0);
    let rho = DensityOperator::pure(&v, BasisTag::TwoSlot).unwrap();
    for q in [0.0, 0.3, 0.7, 1.0] {
        let noise = NoiseModel::mixture(q).unwrap();
        let perfect = lambda_full(&rho, &ChannelMap::analytic(NoiseModel::perfect())).unwrap();
        let noisy = lambda_full(&rho, &ChannelMap::monte_carlo(noise, SAMPLES, 17)).unwrap();
        let b_of = |x: &DensityOperator| {
            let blk = truncate_to_blocks(x).unwrap().blocks[1].clone().unwrap();
            one_photon_summary(&blk).unwrap().b
        };
        let ratio = b_of(&noisy).norm() / b_of(&perfect).norm();
        assert!((ratio - q).abs() < 2.0 * TOL, "q = {q}: ratio {ratio}");
    }
}

#[test]
fn schur_orthogonality_cases() {
    let cases = [
        (
            DElement::new(Spin::Half, 0, 0).unwrap(),
            DElement::new(Spin::Half, 0, 0).unwrap(),
            0.5,
        ),
        (
            DElement::new(Spin::One, 1, 1).unwrap(),
            DElement::new(Spin::Half, 0, 0).unwrap(),
            0.0,
        ),
        (
            DElement::new(Spin::One, 0, 0).unwrap(),
            DElement::new(Spin::One, 1, 1).unwrap(),
            0.0,
        ),
    ];
    for (i, (l, r, expected)) in cases.into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(40 + i as u64);
        let est = mc_orthogonality(l, r, SAMPLES, &mut rng).unwrap();
        assert!((est.value() - C64::new(expected, 0.0)).norm() < TOL);
        // the reported standard error is consistent with the actual error
        assert!((est.value() - C64::new(expected, 0.0)).norm() < 5.0 * est.std_error + 1e-12);
    }
}

#[test]
fn shot_simulation_endpoints() {
    let perfect = simulate_shots(
        InputMode::Entangled,
        &NoiseModel::mixture(1.0).unwrap(),
        1_000_000,
        0,
        1,
    )
    .unwrap();
    assert!((perfect.empirical_mi - 1.0).abs() < 0.01);
    assert!(perfect.within_three_sigma(), "{perfect:?}");

    let dead = simulate_shots(
        InputMode::Entangled,
        &NoiseModel::mixture(0.0).unwrap(),
        1_000_000,
        0,
        1,
    )
    .unwrap();
    assert!(dead.empirical_mi.abs() < 0.01);
    assert!(dead.within_three_sigma(), "{dead:?}");
}

#[test]
fn shot_simulation_tracks_analytic_mi() {
    for (mode, q) in [
        (InputMode::Entangled, 0.6),
        (InputMode::Separable, 1.0),
        (InputMode::Separable, 0.5),
    ] {
        let r = simulate_shots(mode, &NoiseModel::mixture(q).unwrap(), 200_000, 9, 2).unwrap();
        assert!(r.within_three_sigma(), "{r:?}");
        assert_eq!(r.counts.iter().flatten().sum::<u64>(), 200_000);
    }
}

#[test]
fn shot_simulation_is_reproducible_and_validated() {
    let noise = NoiseModel::mixture(0.8).unwrap();
    let a = simulate_shots(InputMode::Entangled, &noise, 20_000, 123, 3).unwrap();
    let b = simulate_shots(InputMode::Entangled, &noise, 20_000, 123, 3).unwrap();
    assert_eq!(a, b);
    assert!(simulate_shots(InputMode::Entangled, &noise, 9_999, 0, 1).is_err());
    let unsampleable = NoiseModel::new(0.5, 0.5).unwrap();
    assert!(simulate_shots(InputMode::Entangled, &unsampleable, 20_000, 0, 1).is_err());
}
