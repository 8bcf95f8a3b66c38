use std::f64::consts::TAU;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use anderson_qsim::circuit::{
    extract_effective_phases, map_iteration_stream, phase_generator_stream, r_gamma_stream, symmetric_pair_stream,
    PhaseGeneratorSpec, ThetaSign,
};
use anderson_qsim::imperfections::{run_with_imperfections, ImperfectionChannel, ImperfectionProfile};
use anderson_qsim::model::{KickSchedule, ModelParams};
use anderson_qsim::observables::{circular_distance, ipr, top_two_marginal, w_probability};
use anderson_qsim::qft::{qft, Direction};
use anderson_qsim::{Basis, GateStream, StateVector};

fn action(stream: &GateStream, n: usize, lower: usize) -> [[Complex64; 2]; 2] {
    let half = 1usize << (n - 1);
    let mut m = [[Complex64::default(); 2]; 2];
    for a in 0..2 {
        let mut psi = StateVector::basis_state(n, a * half + lower).unwrap();
        psi.set_basis(Basis::Phase);
        stream.apply(&mut psi).unwrap();
        m[0][a] = psi.amplitudes()[lower];
        m[1][a] = psi.amplitudes()[half + lower];
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn r_gamma_matches_closed_form(gamma in 0.0f64..=0.5, lower in 0usize..8, minus in any::<bool>()) {
        let n = 4;
        let sign = if minus { ThetaSign::Minus } else { ThetaSign::Plus };
        let tb = TAU * lower as f64 / 16.0 * if minus { -1.0 } else { 1.0 };
        let m = action(&r_gamma_stream(gamma, sign, n), n, lower);
        let s = (gamma / 2.0).sin().powi(2);
        let scalar = (gamma / 2.0).cos().powi(2) - s * (2.0 * tb).cos();
        let z = gamma.sin() * tb.cos();
        let x = s * (2.0 * tb).sin();
        let want = [[Complex64::new(scalar, -z), Complex64::new(0.0, x)], [Complex64::new(0.0, x), Complex64::new(scalar, z)]];
        for a in 0..2 {
            for b in 0..2 {
                prop_assert!((m[b][a] - want[b][a]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn phase_generator_is_diagonal(n in 2usize..=5, seed in any::<u64>()) {
        let spec = PhaseGeneratorSpec::from_params(&ModelParams::new(n, 1.0, seed));
        let stream = phase_generator_stream(&spec);
        let chi = extract_effective_phases(&spec);
        for j in 0..1usize << n {
            let mut psi = StateVector::basis_state(n, j).unwrap();
            stream.apply(&mut psi).unwrap();
            for (i, a) in psi.amplitudes().iter().enumerate() {
                let want = if i == j { Complex64::from_polar(1.0, chi[j]) } else { Complex64::default() };
                prop_assert!((a - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn qft_round_trip(n in 2usize..=7, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = StateVector::random(n, &mut rng).unwrap();
        let mut out = psi.clone();
        qft(&mut out, Direction::Forward).unwrap();
        qft(&mut out, Direction::Inverse).unwrap();
        prop_assert!(out.max_abs_diff(&psi) < 1e-12);
    }

    #[test]
    fn iteration_is_unitary_and_invertible(n in 2usize..=6, k in 0.0f64..3.0, t in 0u64..1000, seed in any::<u64>()) {
        let params = ModelParams::new(n, k, seed);
        let stream = map_iteration_stream(&params, &PhaseGeneratorSpec::from_params(&params), t);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = StateVector::random(n, &mut rng).unwrap();
        let mut out = psi.clone();
        stream.apply(&mut out).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
        stream.adjoint().apply(&mut out).unwrap();
        prop_assert!(out.max_abs_diff(&psi) < 1e-10);
    }

    #[test]
    fn schedule_sub_steps_never_exceed_target(k_t in 0.0f64..5.0, gamma in 0.01f64..0.5) {
        let s = KickSchedule::new(0, k_t, gamma);
        if k_t == 0.0 {
            prop_assert_eq!(s.l_t, 0);
        } else {
            prop_assert!(s.gamma_t <= gamma * (1.0 + 1e-8));
            prop_assert!((s.gamma_t * s.l_t as f64 - k_t).abs() < 1e-12);
        }
    }

    #[test]
    fn observables_stay_in_range(n in 2usize..=8, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = StateVector::random(n, &mut rng).unwrap();
        let dim = psi.dim() as f64;
        let xi = ipr(&psi);
        prop_assert!((1.0 - 1e-9..=dim + 1e-9).contains(&xi));
        let w = w_probability(&psi);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&w));
        let m = top_two_marginal(&psi);
        prop_assert!((m[1] + m[2] - w).abs() < 1e-12);
    }

    #[test]
    fn circular_distance_is_centered(n in 1usize..=12, a in any::<usize>(), b in any::<usize>()) {
        let dim = 1usize << n;
        let (a, b) = (a % dim, b % dim);
        let d = circular_distance(a, b, dim);
        let half = (dim / 2) as i64;
        prop_assert!(-half <= d && d < half.max(1));
        prop_assert_eq!((b as i64 + d).rem_euclid(dim as i64), a as i64);
    }

    #[test]
    fn imperfect_evolution_preserves_norm(eps in 0.0f64..1e-2, mu in 0.0f64..1e-2, seed in any::<u64>()) {
        let n = 5;
        let params = ModelParams::new(n, 1.4, seed);
        let stream = map_iteration_stream(&params, &PhaseGeneratorSpec::from_params(&params), 3);
        let channel = ImperfectionChannel::new(&ImperfectionProfile::sample(n, eps, mu, seed));
        let mut psi = StateVector::new(n).unwrap();
        run_with_imperfections(&mut psi, &stream, &channel).unwrap();
        prop_assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn profile_scales_linearly_with_strength(seed in any::<u64>(), scale in 0.1f64..10.0) {
        let a = ImperfectionProfile::sample(7, 1e-4, 2e-4, seed);
        let b = ImperfectionProfile::sample(7, scale * 1e-4, scale * 2e-4, seed);
        for (x, y) in a.eta.iter().zip(&b.eta).chain(a.couplings.iter().zip(&b.couplings)) {
            prop_assert!((scale * x - y).abs() <= 1e-15);
            prop_assert!(x.abs() <= 1e-4);
        }
    }
}

#[test]
fn symmetric_pair_error_is_third_order() {
    let n = 7;
    let err = |g: f64| {
        let stream = symmetric_pair_stream(g, n);
        (0..1usize << (n - 1))
            .map(|lower| {
                let m = action(&stream, n, lower);
                let phi = g * (TAU * lower as f64 / (1usize << n) as f64).cos();
                (m[0][0] - Complex64::from_polar(1.0, -phi)).norm()
                    + (m[1][1] - Complex64::from_polar(1.0, phi)).norm()
                    + m[0][1].norm()
                    + m[1][0].norm()
            })
            .fold(0.0, f64::max)
    };
    for g in [0.4, 0.2] {
        let r = err(g) / err(g / 2.0);
        assert!((6.0..=10.0).contains(&r), "ratio {r} at gamma {g}");
    }
}

/// Kolmogorov-Smirnov statistic of `xs` (in `[0, 1)`) against the uniform law.
fn ks_uniform(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| ((i + 1) as f64 / n - x).max(x - i as f64 / n))
        .fold(0.0, f64::max)
}

#[test]
fn effective_phases_look_uniform() {
    // asymptotic one-sample critical value at significance 0.01
    let critical = 1.6276 / 1024f64.sqrt();
    let passed = (0..10)
        .filter(|&seed| {
            let spec = PhaseGeneratorSpec::from_params(&ModelParams::new(10, 1.0, seed));
            let xs = extract_effective_phases(&spec).into_iter().map(|c| c.rem_euclid(TAU) / TAU).collect();
            ks_uniform(xs) < critical
        })
        .count();
    assert!(passed >= 8, "{passed} of 10 seeds pass");
}

#[test]
fn thousand_iterations_keep_norm() {
    let n = 8;
    let params = ModelParams::new(n, 1.8, 4);
    let spec = PhaseGeneratorSpec::from_params(&params);
    let mut psi = StateVector::new(n).unwrap();
    for t in 0..1000 {
        map_iteration_stream(&params, &spec, t).apply(&mut psi).unwrap();
    }
    assert!((psi.norm_sqr() - 1.0).abs() <= 1e-7);
}

#[test]
fn ks_statistic_sanity() {
    let grid: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
    assert!(ks_uniform(grid) <= 0.0005 + 1e-12);
    assert!(ks_uniform(vec![0.0; 10]) >= 0.999);
}
