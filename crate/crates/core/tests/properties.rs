mod common;

use common::*;
use proptest::prelude::*;

use starkskin::entanglement::{
    entropy_profile, gaussian_smooth, mutual_information, subsystem_entropy, SubsystemSpec, SPECTRUM_CLAMP,
};
use starkskin::model::{build_hamiltonian, effective_from_jumps, ModelParams};
use starkskin::propagation::{
    correlation_matrix, init_z2_state, step_qr_factors, Propagator, PropagatorChoice, SlaterState,
};
use starkskin::scaling::{
    collapse_quality, cft_log_fit, fit_collapse, power_law_fit, CollapseBounds, CollapseOptions,
    CollapseParams, ScalingDataset, ScalingPoint,
};
use starkskin::spectral::{biorthogonal_eigendecomposition, hermitize_similarity};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

/// Short trajectory returning every intermediate state.
fn evolve(gamma: f64, delta: f64, length: usize, dt: f64, steps: usize) -> Vec<SlaterState> {
    let params = ModelParams::open(gamma, delta, length).unwrap();
    let h = build_hamiltonian(&params).unwrap();
    let prop = Propagator::new(&h, dt, PropagatorChoice::Auto).unwrap();
    let mut states = vec![init_z2_state(length).unwrap()];
    for _ in 0..steps {
        let (next, _) = step_qr_factors(states.last().unwrap(), &prop).unwrap();
        states.push(next);
    }
    states
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn correlation_matrix_is_a_rank_n_projector(
        gamma in -0.9f64..0.9,
        delta in 0.0f64..3.0,
        half in 2usize..9,
        dt in 0.05f64..2.0,
    ) {
        let length = 2 * half;
        for s in evolve(gamma, delta, length, dt, 12) {
            let d = correlation_matrix(&s).diagnostics(half).unwrap();
            prop_assert!(d.worst() < 1e-8, "{d:?}");
        }
    }

    #[test]
    fn entropy_is_symmetric_for_pure_states(
        gamma in -0.9f64..0.9,
        delta in 0.0f64..3.0,
        half in 2usize..9,
    ) {
        let length = 2 * half;
        let s = evolve(gamma, delta, length, 0.7, 10).pop().unwrap();
        let profile = entropy_profile(&correlation_matrix(&s)).unwrap();
        for &(l, v) in &profile {
            let complement = subsystem_entropy(
                &correlation_matrix(&s),
                &SubsystemSpec::range(l + 1, length, length).unwrap(),
            )
            .unwrap()
            .nats;
            prop_assert!((v - complement).abs() < 1e-6, "l={l}: {v} vs {complement}");
        }
    }

    #[test]
    fn entropy_bounds_and_mutual_information_sign(
        length in 4usize..13,
        particles in 1usize..6,
        seed in 0u64..10_000,
        split in 1usize..12,
    ) {
        let particles = particles.min(length - 1);
        let q = random_slater(length, particles, seed);
        let c = correlation_matrix(&SlaterState { orbitals: q, time: 0.0 });
        let split = split.min(length - 1);
        let a = SubsystemSpec::range(1, split, length).unwrap();
        let s = subsystem_entropy(&c, &a).unwrap().nats;
        prop_assert!(s >= 0.0);
        prop_assert!(s <= a.len() as f64 * 2f64.ln() + 1e-8);
        if split + 2 <= length {
            let b = SubsystemSpec::range(split + 2, length, length).unwrap();
            prop_assert!(mutual_information(&c, &a, &b).unwrap() >= -1e-8);
        }
    }

    #[test]
    fn correlation_entropy_matches_fock_space(
        length in 2usize..11,
        particles in 1usize..6,
        seed in 0u64..10_000,
        ell in 1usize..10,
    ) {
        let particles = particles.min(length - 1).max(1);
        let ell = ell.min(length - 1);
        let q = random_slater(length, particles, seed);
        let c = correlation_matrix(&SlaterState { orbitals: q.clone(), time: 0.0 });
        let a = subsystem_entropy(&c, &SubsystemSpec::range(1, ell, length).unwrap()).unwrap().nats;
        let b = fock_block_entropy(&q, ell);
        prop_assert!((a - b).abs() < 1e-8, "{a} vs {b}");
    }

    #[test]
    fn hermitian_steps_need_no_renormalization(
        delta in 0.0f64..3.0,
        half in 2usize..9,
        dt in 0.05f64..2.0,
    ) {
        let length = 2 * half;
        let h = build_hamiltonian(&ModelParams::open(0.0, delta, length).unwrap()).unwrap();
        let prop = Propagator::new(&h, dt, PropagatorChoice::Auto).unwrap();
        let mut s = init_z2_state(length).unwrap();
        for _ in 0..8 {
            let (next, r) = step_qr_factors(&s, &prop).unwrap();
            let off = r
                .indexed_iter()
                .map(|((i, j), z)| if i == j { (z.norm() - 1.0).abs() } else { z.norm() })
                .fold(0.0_f64, f64::max);
            prop_assert!(off < 1e-8, "{off}");
            s = next;
        }
    }

    #[test]
    fn tilt_alone_leaves_the_product_state_unentangled(
        delta in 0.0f64..10.0,
        half in 1usize..9,
        dt in 0.1f64..10.0,
    ) {
        let length = 2 * half;
        let h = build_hamiltonian(&ModelParams::open(0.0, delta, length).unwrap()).unwrap();
        let mut h = h;
        for i in 0..length {
            for j in 0..length {
                if i != j {
                    h.entries[[i, j]] = num_complex::Complex64::new(0.0, 0.0);
                }
            }
        }
        let prop = Propagator::new(&h, dt, PropagatorChoice::Auto).unwrap();
        let mut s = init_z2_state(length).unwrap();
        for _ in 0..5 {
            s = step_qr_factors(&s, &prop).unwrap().0;
            let c = correlation_matrix(&s);
            // Clamping the spectrum away from {0, 1} leaves a per-mode floor.
            let floor = SPECTRUM_CLAMP * (1.0 - SPECTRUM_CLAMP.ln()) * 1.01;
            for (l, v) in entropy_profile(&c).unwrap() {
                prop_assert!(v.abs() <= l as f64 * floor, "l={l}: {v}");
            }
        }
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn hamiltonian_structure(gamma in -0.99f64..0.99, delta in 0.0f64..20.0, length in 2usize..40) {
        let p = ModelParams::open(gamma, delta, length).unwrap();
        let h = build_hamiltonian(&p).unwrap();
        let trace: f64 = h.entries.diag().iter().map(|z| z.re).sum();
        let expected = delta * (length * (length + 1)) as f64 / 2.0;
        prop_assert!((trace - expected).abs() <= 1e-12 * expected.max(1.0));
        for ((i, j), z) in h.entries.indexed_iter() {
            if i.abs_diff(j) > 1 {
                prop_assert_eq!(z.norm(), 0.0);
            }
        }
        let mirrored = build_hamiltonian(&ModelParams::open(-gamma, delta, length).unwrap()).unwrap();
        for ((i, j), z) in h.entries.indexed_iter() {
            if i != j {
                prop_assert_eq!(*z, mirrored.entries[[j, i]]);
            }
        }
    }

    #[test]
    fn jump_construction_is_exact_when_hermitian(delta in 0.0f64..20.0, length in 2usize..40) {
        let p = ModelParams::open(0.0, delta, length).unwrap();
        prop_assert_eq!(
            effective_from_jumps(&p).unwrap().entries,
            build_hamiltonian(&p).unwrap().entries
        );
    }

    #[test]
    fn smoothing_preserves_constants_and_length(
        value in -5.0f64..5.0,
        n in 1usize..300,
        sigma in 0.0f64..40.0,
    ) {
        let series = vec![value; n];
        let out = gaussian_smooth(&series, sigma);
        prop_assert_eq!(out.len(), n);
        for v in out {
            prop_assert!((v - value).abs() <= 1e-12 * value.abs().max(1.0));
        }
    }

    #[test]
    fn power_law_exponent_ignores_prefactor(
        beta in -2.0f64..2.0,
        prefactor in 0.01f64..100.0,
        c in 0.01f64..100.0,
    ) {
        let sizes = [16usize, 32, 48, 64, 96];
        let values: Vec<f64> = sizes.iter().map(|&l| prefactor * (l as f64).powf(beta)).collect();
        let scaled: Vec<f64> = values.iter().map(|v| v * c).collect();
        let a = power_law_fit(&sizes, &values).unwrap();
        let b = power_law_fit(&sizes, &scaled).unwrap();
        prop_assert!((a.beta - beta).abs() < 1e-10);
        prop_assert!((a.beta - b.beta).abs() < 1e-10);
    }

    #[test]
    fn cft_fit_recovers_exact_profiles(c in -3.0f64..3.0, constant in -2.0f64..2.0, half in 4usize..40) {
        let length = 2 * half;
        let profile: Vec<(usize, f64)> = (1..length)
            .map(|l| (l, c / 6.0 * (std::f64::consts::PI * l as f64 / length as f64).sin().ln() + constant))
            .collect();
        let fit = cft_log_fit(&profile, length).unwrap();
        prop_assert!((fit.c - c).abs() < 1e-10);
        prop_assert!((fit.constant - constant).abs() < 1e-10);
        prop_assert!(fit.rms_residual < 1e-10);
    }

    #[test]
    fn similarity_preserves_spectrum(gamma in -0.8f64..0.8, delta in 0.0f64..3.0, length in 2usize..24) {
        let h = build_hamiltonian(&ModelParams::open(gamma, delta, length).unwrap()).unwrap();
        let (herm, _) = hermitize_similarity(&h).unwrap();
        let mut a: Vec<f64> = herm.eigenvalues().unwrap().to_vec();
        a.sort_by(f64::total_cmp);
        let spec = biorthogonal_eigendecomposition(&h).unwrap();
        let mut b: Vec<f64> = spec.eigenvalues.iter().map(|z| z.re).collect();
        b.sort_by(f64::total_cmp);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-8, "{x} vs {y}");
        }
        prop_assert!(spec.eigenvalues.iter().all(|z| z.im.abs() < 1e-8));
    }
}

fn noisy_dataset(seed: u64) -> ScalingDataset {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut pts = Vec::new();
    for &l in &[16usize, 32, 64] {
        for i in 0..6 {
            pts.push(ScalingPoint::new(l, 0.05 * (i + 1) as f64, rng.random_range(0.1..3.0)));
        }
    }
    ScalingDataset::new(pts)
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn collapse_quality_is_non_negative_and_quadratic(
        seed in 0u64..1000,
        dc in 0.0f64..0.4,
        nu in 0.3f64..5.0,
        zeta in -1.0f64..4.0,
        c in 0.1f64..10.0,
    ) {
        let data = noisy_dataset(seed);
        let q = collapse_quality(&data, dc, nu, zeta);
        if let Ok(q) = q {
            prop_assert!(q >= 0.0);
            let scaled = ScalingDataset::new(
                data.points.iter().map(|p| ScalingPoint { s_half: p.s_half * c, ..*p }).collect(),
            );
            let qc = collapse_quality(&scaled, dc, nu, zeta).unwrap();
            prop_assert!((qc - c * c * q).abs() <= 1e-9 * qc.abs().max(1e-300));
        }
    }

    #[test]
    fn exact_linear_ansatz_collapses_perfectly(
        dc in 0.05f64..0.3,
        nu in 0.8f64..3.0,
        zeta in 0.0f64..3.0,
        slope in -2.0f64..2.0,
        offset in 0.5f64..2.0,
    ) {
        let deltas: Vec<f64> = (0..10).map(|i| 0.1 + 0.01 * i as f64).collect();
        let data = synthetic_collapse(&[32, 64, 96], &deltas, dc, nu, zeta, |x| offset + slope * x);
        if let Ok(q) = collapse_quality(&data, dc, nu, zeta) {
            let scale: f64 = data.points.iter().map(|p| p.s_half * p.s_half).sum::<f64>() / data.points.len() as f64;
            prop_assert!(q <= 1e-20 * scale.max(1.0), "{q}");
        }
    }
}

#[test]
fn collapse_fit_is_deterministic() {
    let deltas: Vec<f64> = (0..12).map(|i| 0.05 + 0.025 * i as f64).collect();
    let data = synthetic_collapse(&[32, 64, 96], &deltas, 0.15, 1.9, 2.0, |x| master_curve(x, 1.0, 1.5, 0.2));
    let opts = CollapseOptions {
        bootstrap_n: 12,
        seed: 42,
        ..Default::default()
    };
    let init = CollapseParams::new(0.2, 1.5, 1.5);
    let a = fit_collapse(&data, init, &CollapseBounds::default(), &opts).unwrap();
    let b = fit_collapse(&data, init, &CollapseBounds::default(), &opts).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}
