//! Exact split-operator evolution of the kicked rotator: momentum phases, FFT to the
//! phase grid, exact kick, FFT back. Reference for the gate-level circuit and the fast
//! engine for long ideal runs.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{extract_effective_phases, PhaseGeneratorSpec};
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::observables::{ObservableRecord, ObservableSeries};
use crate::qft::{Direction, FastQft};
use crate::state::StateVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseSource {
    FromCircuit,
    IndependentUniform(u64),
    Explicit,
}

/// Rotation phases `H0(n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OraclePhases {
    pub h0: Vec<f64>,
    pub source: PhaseSource,
}

impl OraclePhases {
    /// `H0(n) = -chi(n) mod 2 pi`, so that `exp(-i H0) = U_T` exactly.
    pub fn from_circuit(spec: &PhaseGeneratorSpec) -> Self {
        let h0 = extract_effective_phases(spec).into_iter().map(|c| (-c).rem_euclid(TAU)).collect();
        Self { h0, source: PhaseSource::FromCircuit }
    }

    pub fn independent_uniform(dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h0 = (0..dim).map(|_| rng.gen_range(0.0..TAU)).collect();
        Self { h0, source: PhaseSource::IndependentUniform(seed) }
    }

    pub fn explicit(h0: Vec<f64>) -> Result<Self> {
        if let Some(x) = h0.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidParams(format!("non-finite rotation phase {x}")));
        }
        Ok(Self { h0, source: PhaseSource::Explicit })
    }

    pub fn len(&self) -> usize {
        self.h0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h0.is_empty()
    }
}

/// Reusable propagator with cached FFT plans.
pub struct OracleStepper {
    params: ModelParams,
    rotation: Vec<Complex64>,
    cos_theta: Vec<f64>,
    fft: FastQft,
}

impl OracleStepper {
    pub fn new(phases: &OraclePhases, params: &ModelParams) -> Result<Self> {
        params.validate()?;
        let dim = params.dim();
        if phases.len() != dim {
            return Err(Error::SizeMismatch { expected: dim, found: phases.len() });
        }
        Ok(Self {
            params: params.clone(),
            rotation: phases.h0.iter().map(|h| Complex64::from_polar(1.0, -h)).collect(),
            cos_theta: (0..dim).map(|j| (TAU * j as f64 / dim as f64).cos()).collect(),
            fft: FastQft::new(dim),
        })
    }

    /// One kick at index `t`: `psi <- exp(-i k_t cos theta) exp(-i H0(n)) psi`.
    pub fn step(&mut self, state: &mut StateVector, t: u64) -> Result<()> {
        if state.dim() != self.rotation.len() {
            return Err(Error::SizeMismatch { expected: self.rotation.len(), found: state.dim() });
        }
        let k_t = self.params.kick_strength(t);
        let amps = state.amplitudes_mut();
        amps.iter_mut().zip(&self.rotation).for_each(|(a, r)| *a *= r);
        self.fft.apply(amps, Direction::Forward);
        amps.iter_mut()
            .zip(&self.cos_theta)
            .for_each(|(a, c)| *a *= Complex64::from_polar(1.0, -k_t * c));
        self.fft.apply(amps, Direction::Inverse);
        Ok(())
    }
}

pub fn oracle_step(state: &mut StateVector, phases: &OraclePhases, params: &ModelParams, t: u64) -> Result<()> {
    OracleStepper::new(phases, params)?.step(state, t)
}

/// Runs kicks `0..t_max`, recording at `t = 0`, every `record_every` kicks, and at `t_max`.
pub fn oracle_evolve(
    state: &mut StateVector,
    phases: &OraclePhases,
    params: &ModelParams,
    t_max: u64,
    record_every: u64,
) -> Result<ObservableSeries> {
    let mut stepper = OracleStepper::new(phases, params)?;
    let every = record_every.max(1);
    let mut series = ObservableSeries::default();
    series.push(ObservableRecord::from_state(0, state, false));
    for t in 0..t_max {
        stepper.step(state, t)?;
        let done = t + 1;
        if done % every == 0 || done == t_max {
            series.push(ObservableRecord::from_state(done, state, false));
        }
    }
    Ok(series)
}
