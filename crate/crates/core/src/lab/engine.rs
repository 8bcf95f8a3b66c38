use serde::{Deserialize, Serialize};

use crate::circuit::{map_iteration_stream, PhaseGeneratorSpec};
use crate::error::{Error, Result};
use crate::imperfections::{run_with_imperfections, ImperfectionChannel, ImperfectionProfile};
use crate::model::ModelParams;
use crate::observables::{ObservableRecord, ObservableSeries};
use crate::oracle::{OraclePhases, OracleStepper};
use crate::state::StateVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineKind {
    Circuit,
    Oracle,
}

/// Where the oracle engine takes its rotation phases from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseChoice {
    /// Effective phases of the circuit's random phase generator (same disorder as the circuit).
    #[default]
    FromCircuit,
    /// Fresh uniform phases from the realization seed.
    Independent,
}

/// Everything that fixes one disorder realization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySetup {
    pub params: ModelParams,
    pub engine: EngineKind,
    pub epsilon: f64,
    pub mu: f64,
    pub phases: PhaseChoice,
}

impl TrajectorySetup {
    pub fn generator(&self) -> PhaseGeneratorSpec {
        PhaseGeneratorSpec::from_params(&self.params)
    }

    pub fn profile(&self) -> ImperfectionProfile {
        ImperfectionProfile::sample(self.params.n_qubits, self.epsilon, self.mu, self.params.seed)
    }

    pub fn oracle_phases(&self) -> OraclePhases {
        match self.phases {
            PhaseChoice::FromCircuit => OraclePhases::from_circuit(&self.generator()),
            PhaseChoice::Independent => OraclePhases::independent_uniform(self.params.dim(), self.params.seed),
        }
    }

    pub fn propagator(&self) -> Result<Propagator> {
        self.params.validate()?;
        match self.engine {
            EngineKind::Oracle => {
                if self.epsilon != 0.0 || self.mu != 0.0 {
                    return Err(Error::InvalidParams(
                        "imperfections are defined per gate and need the circuit engine".into(),
                    ));
                }
                Ok(Propagator::Oracle(OracleStepper::new(&self.oracle_phases(), &self.params)?))
            }
            EngineKind::Circuit => Ok(Propagator::Circuit(CircuitStepper::new(
                self.params.clone(),
                self.generator(),
                &self.profile(),
            ))),
        }
    }
}

pub struct CircuitStepper {
    params: ModelParams,
    spec: PhaseGeneratorSpec,
    channel: ImperfectionChannel,
}

impl CircuitStepper {
    pub fn new(params: ModelParams, spec: PhaseGeneratorSpec, profile: &ImperfectionProfile) -> Self {
        Self { params, spec, channel: ImperfectionChannel::new(profile) }
    }

    pub fn step(&mut self, state: &mut StateVector, t: u64) -> Result<()> {
        let stream = map_iteration_stream(&self.params, &self.spec, t);
        run_with_imperfections(state, &stream, &self.channel)
    }
}

pub enum Propagator {
    Oracle(OracleStepper),
    Circuit(CircuitStepper),
}

impl Propagator {
    pub fn step(&mut self, state: &mut StateVector, t: u64) -> Result<()> {
        match self {
            Propagator::Oracle(p) => p.step(state, t),
            Propagator::Circuit(p) => p.step(state, t),
        }
    }
}

/// What to keep from a run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RecordPlan {
    /// Record the series every this many kicks (0 = never, besides t = 0 and t_max).
    pub record_every: u64,
    pub keep_profiles: bool,
    /// Trailing fraction of kicks averaged into the final observables.
    pub average_fraction: f64,
}

impl Default for RecordPlan {
    fn default() -> Self {
        Self { record_every: 0, keep_profiles: false, average_fraction: 0.1 }
    }
}

/// Observables averaged over the trailing window of a run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct WindowAverage {
    pub xi: f64,
    pub w: f64,
    pub second_moment: f64,
    pub samples: usize,
}

pub struct TrajectoryOutcome {
    pub series: ObservableSeries,
    pub average: WindowAverage,
    pub final_state: StateVector,
}

/// Number of trailing kicks averaged for a run of `t_max` kicks.
pub fn window_len(t_max: u64, fraction: f64) -> u64 {
    if t_max == 0 {
        0
    } else {
        ((fraction * t_max as f64).ceil() as u64).clamp(1, t_max)
    }
}

/// Evolves `|0...0>` for `t_max` kicks.
pub fn run_trajectory(setup: &TrajectorySetup, t_max: u64, plan: RecordPlan) -> Result<TrajectoryOutcome> {
    let mut propagator = setup.propagator()?;
    let mut state = StateVector::new(setup.params.n_qubits)?;
    let mut series = ObservableSeries::default();
    series.push(ObservableRecord::from_state(0, &state, plan.keep_profiles));

    let window_start = t_max - window_len(t_max, plan.average_fraction);
    let mut acc = WindowAverage::default();
    for t in 0..t_max {
        propagator.step(&mut state, t)?;
        let done = t + 1;
        let on_schedule = plan.record_every > 0 && done % plan.record_every == 0;
        let in_window = done > window_start;
        if on_schedule || done == t_max || in_window {
            let rec = ObservableRecord::from_state(done, &state, plan.keep_profiles && (on_schedule || done == t_max));
            if in_window {
                acc.xi += rec.xi;
                acc.w += rec.w;
                acc.second_moment += rec.second_moment;
                acc.samples += 1;
            }
            if on_schedule || done == t_max {
                series.push(rec);
            }
        }
    }
    let average = if acc.samples == 0 {
        let r = &series.records[0];
        WindowAverage { xi: r.xi, w: r.w, second_moment: r.second_moment, samples: 1 }
    } else {
        let n = acc.samples as f64;
        WindowAverage { xi: acc.xi / n, w: acc.w / n, second_moment: acc.second_moment / n, samples: acc.samples }
    };
    Ok(TrajectoryOutcome { series, average, final_state: state })
}
