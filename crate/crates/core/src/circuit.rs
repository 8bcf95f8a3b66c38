//! Gate-level realization of one kicked-rotator map iteration.
//!
//! One iteration is: random phase generator `U_T` (diagonal in momentum), forward QFT,
//! kick `exp(-i k_t cos theta)` built from S-powers and qubit-1 rotations, inverse QFT.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{Gate, GateStream};
use crate::model::{integer_ratio, KickSchedule, ModelParams};
use crate::qft::{qft_stream, Direction};
use crate::state::qubit_mask;

/// One `(CNOT(control, target), exp(i phase sigma_z_target))` element of `U_T^(2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasePair {
    pub control: usize,
    pub target: usize,
    pub phase: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseGeneratorSpec {
    pub n_qubits: usize,
    /// `phi_j` of `U_T^(1) = prod_j exp(i phi_j sigma_z_j)`, indexed by qubit - 1.
    pub phases: Vec<f64>,
    pub pairs: Vec<PhasePair>,
}

/// Draws `n_q + M` phases in `[0, 2 pi)` and `M` ordered distinct qubit pairs.
pub fn build_phase_generator<R: Rng + ?Sized>(params: &ModelParams, rng: &mut R) -> PhaseGeneratorSpec {
    let n = params.n_qubits;
    let phases = (0..n).map(|_| rng.gen_range(0.0..TAU)).collect();
    let pairs = (0..params.m_pairs())
        .map(|_| {
            let control = rng.gen_range(1..=n);
            // uniform over the other n - 1 qubits
            let mut target = rng.gen_range(1..n);
            if target >= control {
                target += 1;
            }
            PhasePair { control, target, phase: rng.gen_range(0.0..TAU) }
        })
        .collect();
    PhaseGeneratorSpec { n_qubits: n, phases, pairs }
}

impl PhaseGeneratorSpec {
    /// Generator drawn from the model seed.
    pub fn from_params(params: &ModelParams) -> Self {
        build_phase_generator(params, &mut ChaCha8Rng::seed_from_u64(params.seed))
    }
}

/// `U_T = U_T^(2) U_T^(1)` as gates: the `n_q` single-qubit phases, then each pair as
/// CNOT followed by the phase on its target, then all CNOTs again in reverse order.
/// The reversed tail undoes the net permutation, so the operator is diagonal.
pub fn phase_generator_stream(spec: &PhaseGeneratorSpec) -> GateStream {
    let mut stream = GateStream::with_capacity(spec.n_qubits + 3 * spec.pairs.len());
    for (j, &angle) in spec.phases.iter().enumerate() {
        stream.push(Gate::PhaseZ { qubit: j + 1, angle });
    }
    for p in &spec.pairs {
        stream.push(Gate::CNot { control: p.control, target: p.target });
        stream.push(Gate::PhaseZ { qubit: p.target, angle: p.phase });
    }
    for p in spec.pairs.iter().rev() {
        stream.push(Gate::CNot { control: p.control, target: p.target });
    }
    stream
}

/// `chi(n)` with `U_T |n> = e^{i chi(n)} |n>`, by following each basis index through the
/// CNOT permutations. Not reduced modulo `2 pi`.
pub fn extract_effective_phases(spec: &PhaseGeneratorSpec) -> Vec<f64> {
    let n = spec.n_qubits;
    let masks: Vec<usize> = (1..=n).map(|q| qubit_mask(n, q)).collect();
    let sz = |b: usize, q: usize| if b & masks[q - 1] == 0 { 1.0 } else { -1.0 };
    (0..1usize << n)
        .map(|index| {
            let mut chi: f64 = spec.phases.iter().enumerate().map(|(j, phi)| phi * sz(index, j + 1)).sum();
            let mut b = index;
            for p in &spec.pairs {
                if b & masks[p.control - 1] != 0 {
                    b ^= masks[p.target - 1];
                }
                chi += p.phase * sz(b, p.target);
            }
            chi
        })
        .collect()
}

/// `S^m = exp(i m a1 theta_bar)` as `n_q - 1` controlled phases `C_{1,j}(pi m 2^{1-j})`.
pub fn s_power_stream(m: i32, n_qubits: usize) -> Result<GateStream> {
    if m.abs() > 2 {
        return Err(Error::InvalidPower(m));
    }
    let mut stream = GateStream::with_capacity(n_qubits.saturating_sub(1));
    if m == 0 {
        return Ok(stream);
    }
    push_s_power(&mut stream, m, n_qubits);
    Ok(stream)
}

fn push_s_power(stream: &mut GateStream, m: i32, n_qubits: usize) {
    for j in 2..=n_qubits {
        let angle = PI * f64::from(m) / f64::from(1u32 << (j - 1));
        stream.push(Gate::CPhase { qubit_a: 1, qubit_b: j, angle });
    }
}

/// `H S^m H` on qubit 1.
fn push_hsh(stream: &mut GateStream, m: i32, n_qubits: usize) {
    stream.push(Gate::Hadamard { qubit: 1 });
    push_s_power(stream, m, n_qubits);
    stream.push(Gate::Hadamard { qubit: 1 });
}

/// `exp(-i a sigma_z_1)`.
fn push_z(stream: &mut GateStream, a: f64) {
    stream.push(Gate::PhaseZ { qubit: 1, angle: -a });
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThetaSign {
    Plus,
    Minus,
}

impl ThetaSign {
    fn factor(self) -> i32 {
        match self {
            ThetaSign::Plus => 1,
            ThetaSign::Minus => -1,
        }
    }
}

/// `R_gamma(+-theta_bar) = H S H exp(-i gamma/2 sigma_z) H S^-2 H exp(-i gamma/2 sigma_z) H S H`,
/// with the S powers negated for `Minus`. The sequence is a palindrome, so operator and
/// application order coincide.
pub fn r_gamma_stream(gamma: f64, sign: ThetaSign, n_qubits: usize) -> GateStream {
    let s = sign.factor();
    let mut stream = GateStream::with_capacity(4 * n_qubits + 8);
    push_hsh(&mut stream, s, n_qubits);
    push_z(&mut stream, gamma / 2.0);
    push_hsh(&mut stream, -2 * s, n_qubits);
    push_z(&mut stream, gamma / 2.0);
    push_hsh(&mut stream, s, n_qubits);
    stream
}

/// The operator `R_{gamma/2}(theta_bar) R_{gamma/2}(-theta_bar)` in merged form
/// `H S H e^{-i gamma/4 sz} H S^-2 H e^{-i gamma/2 sz} H S^2 H e^{-i gamma/4 sz} H S^-1 H`.
pub fn symmetric_pair_stream(gamma: f64, n_qubits: usize) -> GateStream {
    kick_stream(&KickSchedule::with_steps(0, gamma, 1), n_qubits)
}

/// `(R_{gamma_t/2}(theta_bar) R_{gamma_t/2}(-theta_bar))^{l_t}`, approximating
/// `exp(-i k_t cos theta)` in the phase representation.
///
/// Within each pair the S and Hadamard blocks are merged; between consecutive pairs the
/// trailing `H S H` and the leading `H S^-1 H` cancel exactly and the two quarter
/// rotations fuse, leaving `2 (n_q + 2)` gates per interior step.
pub fn kick_stream(schedule: &KickSchedule, n_qubits: usize) -> GateStream {
    let l = schedule.l_t;
    if l == 0 || schedule.gamma_t == 0.0 {
        return GateStream::new();
    }
    let g = schedule.gamma_t;
    let mut stream = GateStream::with_capacity(2 * l * (n_qubits + 2) + 2 * n_qubits + 4);
    // application order is the reverse of the operator product
    push_hsh(&mut stream, -1, n_qubits);
    push_z(&mut stream, g / 4.0);
    for step in 0..l {
        push_hsh(&mut stream, 2, n_qubits);
        push_z(&mut stream, g / 2.0);
        push_hsh(&mut stream, -2, n_qubits);
        push_z(&mut stream, if step + 1 == l { g / 4.0 } else { g / 2.0 });
    }
    push_hsh(&mut stream, 1, n_qubits);
    stream
}

/// Gate stream of one full map iteration at kick index `t`.
///
/// The QFT bit reversals are not executed: instead the kick is emitted on mirrored qubit
/// labels (`q -> n_q + 1 - q`), which is the same operator
/// `QFT^-1 K QFT = G^dag (B K B) G` with `B` the reversal and `G` the gate part.
pub fn map_iteration_stream(params: &ModelParams, spec: &PhaseGeneratorSpec, t: u64) -> GateStream {
    let n = params.n_qubits;
    let mut stream = phase_generator_stream(spec);
    stream.append(&qft_stream(n, Direction::Forward));
    stream.append(&kick_stream(&params.schedule(t), n).relabel(|q| n + 1 - q));
    stream.append(&qft_stream(n, Direction::Inverse));
    stream
}

/// `n_g = 2 [k / gamma] (n_q + 2) + n_q^2 + 6 n_q + 3 M + 9` at the bare `k`.
pub fn gate_count(params: &ModelParams) -> usize {
    let n = params.n_qubits;
    2 * integer_ratio(params.k, params.gamma_target) * (n + 2) + n * n + 6 * n + 3 * params.m_pairs() + 9
}
