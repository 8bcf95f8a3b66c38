//! Quantum Fourier transform between the momentum and phase representations.
//!
//! Forward: `psi(theta_j) = N^{-1/2} sum_n e^{+2 pi i n j / N} psi_n`, `theta_j = 2 pi j / N`.
//! The gate-level transform is `n_q (n_q + 1) / 2` Hadamard/CPhase gates followed by a
//! bit-reversal of the basis index, which is bookkeeping and costs no gates.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::gates::{Gate, GateStream};
use crate::state::{Basis, StateVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    /// momentum -> phase
    Forward,
    /// phase -> momentum
    Inverse,
}

/// Hadamard/CPhase part of the transform, excluding the bit reversal.
///
/// For `Forward` the reversal comes after the stream; for `Inverse` it comes before.
pub fn qft_stream(n_qubits: usize, direction: Direction) -> GateStream {
    let mut stream = GateStream::with_capacity(n_qubits * (n_qubits + 1) / 2);
    for q in 1..=n_qubits {
        stream.push(Gate::Hadamard { qubit: q });
        for r in q + 1..=n_qubits {
            stream.push(Gate::CPhase { qubit_a: q, qubit_b: r, angle: PI / f64::from(1u32 << (r - q)) });
        }
    }
    match direction {
        Direction::Forward => stream,
        Direction::Inverse => stream.adjoint(),
    }
}

/// Gate-level transform including the final (or initial) bit reversal.
pub fn qft(state: &mut StateVector, direction: Direction) -> Result<()> {
    let stream = qft_stream(state.n_qubits(), direction);
    match direction {
        Direction::Forward => {
            stream.apply(state)?;
            state.bit_reverse();
            state.set_basis(Basis::Phase);
        }
        Direction::Inverse => {
            state.bit_reverse();
            stream.apply(state)?;
            state.set_basis(Basis::Momentum);
        }
    }
    Ok(())
}

/// Same unitary as [`qft`] through a fused O(N log N) FFT. Only valid where no
/// per-gate imperfections need to be injected.
pub fn qft_fast(state: &mut StateVector, direction: Direction) {
    let n = state.dim();
    let mut planner = FftPlanner::<f64>::new();
    // rustfft's forward kernel carries e^{-2 pi i}, so our Forward is its inverse
    let fft = match direction {
        Direction::Forward => planner.plan_fft_inverse(n),
        Direction::Inverse => planner.plan_fft_forward(n),
    };
    let amps = state.amplitudes_mut();
    fft.process(amps);
    let scale = 1.0 / (n as f64).sqrt();
    amps.iter_mut().for_each(|a| *a *= scale);
    state.set_basis(match direction {
        Direction::Forward => Basis::Phase,
        Direction::Inverse => Basis::Momentum,
    });
}

/// Cached FFT plans for repeated transforms of one size.
pub(crate) struct FastQft {
    forward: std::sync::Arc<dyn rustfft::Fft<f64>>,
    inverse: std::sync::Arc<dyn rustfft::Fft<f64>>,
    scratch: Vec<Complex64>,
    scale: f64,
}

impl FastQft {
    pub(crate) fn new(dim: usize) -> Self {
        let mut planner = FftPlanner::<f64>::new();
        let forward = planner.plan_fft_inverse(dim);
        let inverse = planner.plan_fft_forward(dim);
        let scratch_len = forward.get_inplace_scratch_len().max(inverse.get_inplace_scratch_len());
        Self {
            forward,
            inverse,
            scratch: vec![Complex64::default(); scratch_len],
            scale: 1.0 / (dim as f64).sqrt(),
        }
    }

    pub(crate) fn apply(&mut self, amps: &mut [Complex64], direction: Direction) {
        let plan = match direction {
            Direction::Forward => &self.forward,
            Direction::Inverse => &self.inverse,
        };
        plan.process_with_scratch(amps, &mut self.scratch);
        let scale = self.scale;
        amps.iter_mut().for_each(|a| *a *= scale);
    }
}
