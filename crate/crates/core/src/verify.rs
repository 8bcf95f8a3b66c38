//! Self-check battery behind `aqsim verify`: identities and convergence orders of the
//! gate decomposition, each compared against a direct evaluation.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::circuit::{
    extract_effective_phases, kick_stream, map_iteration_stream, phase_generator_stream, r_gamma_stream,
    symmetric_pair_stream, PhaseGeneratorSpec, ThetaSign,
};
use crate::error::Result;
use crate::imperfections::{ImperfectionChannel, ImperfectionProfile};
use crate::model::{KickSchedule, ModelParams};
use crate::oracle::{OraclePhases, OracleStepper};
use crate::qft::{qft, Direction};
use crate::state::{Basis, StateVector};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub bound: String,
    pub passed: bool,
}

fn check(name: &'static str, value: f64, passed: bool, bound: impl Into<String>) -> Check {
    Check { name, value, bound: bound.into(), passed }
}

type M2 = [[Complex64; 2]; 2];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Action of a stream on qubit 1 at phase-grid point `lower` (lower bits), as a 2x2 matrix.
fn block(stream: &crate::gates::GateStream, n: usize, lower: usize) -> Result<M2> {
    let half = 1usize << (n - 1);
    let mut m = [[Complex64::default(); 2]; 2];
    for a in 0..2 {
        let mut psi = StateVector::basis_state(n, a * half + lower)?;
        psi.set_basis(Basis::Phase);
        stream.apply(&mut psi)?;
        for b in 0..2 {
            m[b][a] = psi.amplitudes()[b * half + lower];
        }
    }
    Ok(m)
}

fn r_gamma_closed_form(gamma: f64, tb: f64) -> M2 {
    let (sh, s2) = ((gamma / 2.0).sin().powi(2), (gamma / 2.0).cos().powi(2));
    let scalar = s2 - sh * (2.0 * tb).cos();
    let z = gamma.sin() * tb.cos();
    let x = sh * (2.0 * tb).sin();
    [[c(scalar, -z), c(0.0, x)], [c(0.0, x), c(scalar, z)]]
}

fn max_diff(a: &M2, b: &M2) -> f64 {
    a.iter().flatten().zip(b.iter().flatten()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn theta_bar(n: usize, lower: usize) -> f64 {
    TAU * lower as f64 / (1usize << n) as f64
}

pub fn r_gamma_identity_error(cases: usize, n: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let gamma = rng.gen_range(0.0..=0.5);
        let lower = rng.gen_range(0..1usize << (n - 1));
        let m = block(&r_gamma_stream(gamma, ThetaSign::Plus, n), n, lower)?;
        worst = worst.max(max_diff(&m, &r_gamma_closed_form(gamma, theta_bar(n, lower))));
    }
    Ok(worst)
}

/// `max_theta |R_{g/2}(tb) R_{g/2}(-tb) - exp(-i g sz cos tb)|` over the phase grid.
pub fn symmetric_pair_error(gamma: f64, n: usize) -> Result<f64> {
    let stream = symmetric_pair_stream(gamma, n);
    let mut worst = 0.0f64;
    for lower in 0..1usize << (n - 1) {
        let m = block(&stream, n, lower)?;
        let phi = gamma * theta_bar(n, lower).cos();
        let exact = [[Complex64::from_polar(1.0, -phi), c(0.0, 0.0)], [c(0.0, 0.0), Complex64::from_polar(1.0, phi)]];
        worst = worst.max(max_diff(&m, &exact));
    }
    Ok(worst)
}

/// Max deviation of the full kick stream from `exp(-i k cos theta_j)` on the grid.
pub fn kick_error(k: f64, steps: usize, n: usize) -> Result<f64> {
    let stream = kick_stream(&KickSchedule::with_steps(0, k, steps), n);
    let dim = 1usize << n;
    let mut worst = 0.0f64;
    for j in 0..dim {
        let mut psi = StateVector::basis_state(n, j)?;
        psi.set_basis(Basis::Phase);
        stream.apply(&mut psi)?;
        let mut want = vec![Complex64::default(); dim];
        want[j] = Complex64::from_polar(1.0, -k * (TAU * j as f64 / dim as f64).cos());
        let err = psi.amplitudes().iter().zip(&want).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        worst = worst.max(err);
    }
    Ok(worst)
}

pub fn qft_dft_error(n: usize, states: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = 1usize << n;
    let mut worst = 0.0f64;
    for _ in 0..states {
        let psi = StateVector::random(n, &mut rng)?;
        let mut got = psi.clone();
        qft(&mut got, Direction::Forward)?;
        let norm = (dim as f64).sqrt().recip();
        for j in 0..dim {
            let want: Complex64 = psi
                .amplitudes()
                .iter()
                .enumerate()
                .map(|(m, a)| a * Complex64::from_polar(norm, TAU * ((m * j) % dim) as f64 / dim as f64))
                .sum();
            worst = worst.max((got.amplitudes()[j] - want).norm());
        }
    }
    Ok(worst)
}

/// Largest off-diagonal element of `U_T` over all basis states.
pub fn phase_generator_offdiagonal(n: usize, seed: u64) -> Result<f64> {
    let spec = PhaseGeneratorSpec::from_params(&ModelParams::new(n, 1.0, seed));
    let stream = phase_generator_stream(&spec);
    let chi = extract_effective_phases(&spec);
    let mut worst = 0.0f64;
    for j in 0..1usize << n {
        let mut psi = StateVector::basis_state(n, j)?;
        stream.apply(&mut psi)?;
        for (i, a) in psi.amplitudes().iter().enumerate() {
            let want = if i == j { Complex64::from_polar(1.0, chi[j]) } else { Complex64::default() };
            worst = worst.max((a - want).norm());
        }
    }
    Ok(worst)
}

/// Fidelity between one circuit iteration and one exact oracle kick at `t = 0`.
pub fn circuit_oracle_fidelity(n: usize, k: f64, seed: u64) -> Result<(f64, f64)> {
    let params = ModelParams::new(n, k, seed);
    let spec = PhaseGeneratorSpec::from_params(&params);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let psi = StateVector::random(n, &mut rng)?;
    let mut a = psi.clone();
    map_iteration_stream(&params, &spec, 0).apply(&mut a)?;
    let mut b = psi;
    OracleStepper::new(&OraclePhases::from_circuit(&spec), &params)?.step(&mut b, 0)?;
    let sched = params.schedule(0);
    let bound = 1.0 - 10.0 * sched.l_t as f64 * sched.gamma_t.powi(3);
    Ok((a.fidelity(&b)?, bound))
}

/// Norm drift after `t_max` imperfect circuit iterations.
pub fn norm_drift(n: usize, t_max: u64) -> Result<f64> {
    let params = ModelParams::new(n, 1.5, 9);
    let spec = PhaseGeneratorSpec::from_params(&params);
    let channel = ImperfectionChannel::new(&ImperfectionProfile::sample(n, 1e-3, 1e-3, 9));
    let mut psi = StateVector::new(n)?;
    for t in 0..t_max {
        crate::imperfections::run_with_imperfections(&mut psi, &map_iteration_stream(&params, &spec, t), &channel)?;
    }
    Ok((psi.norm_sqr() - 1.0).abs())
}

/// Runs every check. Takes a few seconds in release builds.
pub fn run_battery() -> Result<Vec<Check>> {
    let mut out = Vec::new();

    let e = r_gamma_identity_error(100, 10, 1)?;
    out.push(check("r_gamma_closed_form", e, e <= 1e-12, "<= 1e-12"));

    let errs = [0.4, 0.2, 0.1].iter().map(|&g| symmetric_pair_error(g, 8)).collect::<Result<Vec<_>>>()?;
    for (name, r) in [("third_order_ratio_0.4", errs[0] / errs[1]), ("third_order_ratio_0.2", errs[1] / errs[2])] {
        out.push(check(name, r, (6.0..=10.0).contains(&r), "8 +- 25%"));
    }

    let coarse = kick_error(1.0, 5, 6)?;
    let fine = kick_error(1.0, 10, 6)?;
    out.push(check("kick_bound", coarse, coarse < 5.0 * 5.0 * 0.2f64.powi(3), "< 5 l gamma^3"));
    let r = coarse / fine;
    out.push(check("kick_convergence_ratio", r, (3.0..=5.0).contains(&r), "4 +- 1"));

    let e = (2..=8).map(|n| qft_dft_error(n, 20, n as u64)).collect::<Result<Vec<_>>>()?.into_iter().fold(0.0, f64::max);
    out.push(check("qft_vs_dft", e, e <= 1e-10, "<= 1e-10"));

    let e = (2..=5).map(|n| phase_generator_offdiagonal(n, 7 + n as u64)).collect::<Result<Vec<_>>>()?.into_iter().fold(0.0, f64::max);
    out.push(check("phase_generator_diagonal", e, e <= 1e-12, "<= 1e-12"));

    let (f, bound) = circuit_oracle_fidelity(6, 1.0, 3)?;
    out.push(check("circuit_vs_oracle", f, f >= bound, format!(">= {bound:.6}")));

    let d = norm_drift(8, 1000)?;
    out.push(check("norm_drift_t1000", d, d <= 1e-7, "<= 1e-7"));

    let identity = r_gamma_closed_form(0.3, 0.0);
    let collapse = max_diff(&identity, &[[Complex64::from_polar(1.0, -0.3), c(0.0, 0.0)], [c(0.0, 0.0), Complex64::from_polar(1.0, 0.3)]]);
    out.push(check("closed_form_collapse", collapse, collapse <= 1e-15, "<= 1e-15"));
    Ok(out)
}
