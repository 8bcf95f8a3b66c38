//! Elementary gate set and its state-vector kernels.
//!
//! Conventions: `sigma_z |0> = +|0>`, so `PhaseZ(q, a) = exp(i a sigma_z_q)` multiplies
//! basis states with bit q clear by `e^{+ia}` and set by `e^{-ia}`. `CPhase(a, b, phi)`
//! multiplies by `e^{i phi}` when both bits are set.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmt::g17;
use crate::state::{check_qubit, qubit_mask, StateVector};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    PhaseZ { qubit: usize, angle: f64 },
    Hadamard { qubit: usize },
    CNot { control: usize, target: usize },
    CPhase { qubit_a: usize, qubit_b: usize, angle: f64 },
}

impl Gate {
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        match *self {
            Gate::PhaseZ { qubit, .. } | Gate::Hadamard { qubit } => check_qubit(n_qubits, qubit),
            Gate::CNot { control: a, target: b } | Gate::CPhase { qubit_a: a, qubit_b: b, .. } => {
                check_qubit(n_qubits, a)?;
                check_qubit(n_qubits, b)?;
                if a == b {
                    return Err(Error::DegenerateGate { qubit: a });
                }
                Ok(())
            }
        }
    }

    pub fn adjoint(&self) -> Gate {
        match *self {
            Gate::PhaseZ { qubit, angle } => Gate::PhaseZ { qubit, angle: -angle },
            Gate::CPhase { qubit_a, qubit_b, angle } => Gate::CPhase { qubit_a, qubit_b, angle: -angle },
            g => g,
        }
    }

    /// Same gate with every qubit index passed through `map`.
    pub fn relabel(&self, map: impl Fn(usize) -> usize) -> Gate {
        match *self {
            Gate::PhaseZ { qubit, angle } => Gate::PhaseZ { qubit: map(qubit), angle },
            Gate::Hadamard { qubit } => Gate::Hadamard { qubit: map(qubit) },
            Gate::CNot { control, target } => Gate::CNot { control: map(control), target: map(target) },
            Gate::CPhase { qubit_a, qubit_b, angle } => {
                Gate::CPhase { qubit_a: map(qubit_a), qubit_b: map(qubit_b), angle }
            }
        }
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(self, Gate::PhaseZ { .. } | Gate::CPhase { .. })
    }
}

/// Applies `gate` to `state` in place.
pub fn apply_gate(state: &mut StateVector, gate: &Gate) -> Result<()> {
    let n = state.n_qubits();
    gate.validate(n)?;
    let amps = state.amplitudes_mut();
    match *gate {
        Gate::PhaseZ { qubit, angle } => {
            let mask = qubit_mask(n, qubit);
            let up = Complex64::from_polar(1.0, angle);
            let down = up.conj();
            for (i, a) in amps.iter_mut().enumerate() {
                *a *= if i & mask == 0 { up } else { down };
            }
        }
        Gate::Hadamard { qubit } => {
            let mask = qubit_mask(n, qubit);
            let s = std::f64::consts::FRAC_1_SQRT_2;
            for i in 0..amps.len() {
                if i & mask == 0 {
                    let (a, b) = (amps[i], amps[i | mask]);
                    amps[i] = (a + b) * s;
                    amps[i | mask] = (a - b) * s;
                }
            }
        }
        Gate::CNot { control, target } => {
            let cm = qubit_mask(n, control);
            let tm = qubit_mask(n, target);
            for i in 0..amps.len() {
                if i & cm != 0 && i & tm == 0 {
                    amps.swap(i, i | tm);
                }
            }
        }
        Gate::CPhase { qubit_a, qubit_b, angle } => {
            let both = qubit_mask(n, qubit_a) | qubit_mask(n, qubit_b);
            let phase = Complex64::from_polar(1.0, angle);
            for (i, a) in amps.iter_mut().enumerate() {
                if i & both == both {
                    *a *= phase;
                }
            }
        }
    }
    Ok(())
}

/// Applies `exp(i angle sigma_x_a sigma_x_b) = cos(angle) I + i sin(angle) sigma_x_a sigma_x_b`.
pub fn apply_two_qubit_xx_rotation(state: &mut StateVector, qubit_a: usize, qubit_b: usize, angle: f64) -> Result<()> {
    let n = state.n_qubits();
    check_qubit(n, qubit_a)?;
    check_qubit(n, qubit_b)?;
    if qubit_a == qubit_b {
        return Err(Error::DegenerateGate { qubit: qubit_a });
    }
    let flip = qubit_mask(n, qubit_a) | qubit_mask(n, qubit_b);
    xx_kernel(state.amplitudes_mut(), flip, angle.cos(), angle.sin());
    Ok(())
}

/// `sigma_x sigma_x` mixes each index with `i ^ flip`.
#[inline]
pub(crate) fn xx_kernel(amps: &mut [Complex64], flip: usize, cos: f64, sin: f64) {
    let isin = Complex64::new(0.0, sin);
    for i in 0..amps.len() {
        let j = i ^ flip;
        if j > i {
            let (a, b) = (amps[i], amps[j]);
            amps[i] = a * cos + b * isin;
            amps[j] = b * cos + a * isin;
        }
    }
}

/// Ordered gate list; element 0 acts first.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GateStream {
    gates: Vec<Gate>,
}

impl GateStream {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(cap: usize) -> Self {
        Self { gates: Vec::with_capacity(cap) }
    }

    pub fn push(&mut self, gate: Gate) {
        self.gates.push(gate);
    }

    pub fn append(&mut self, other: &GateStream) {
        self.gates.extend_from_slice(&other.gates);
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Gate> {
        self.gates.iter()
    }

    /// Stream of the adjoint operator: reversed order, every gate inverted.
    pub fn adjoint(&self) -> GateStream {
        Self { gates: self.gates.iter().rev().map(Gate::adjoint).collect() }
    }

    pub fn relabel(&self, map: impl Fn(usize) -> usize) -> GateStream {
        Self { gates: self.gates.iter().map(|g| g.relabel(&map)).collect() }
    }

    /// Applies every gate in order, without imperfections.
    pub fn apply(&self, state: &mut StateVector) -> Result<()> {
        self.gates.iter().try_for_each(|g| apply_gate(state, g))
    }
}

impl FromIterator<Gate> for GateStream {
    fn from_iter<I: IntoIterator<Item = Gate>>(iter: I) -> Self {
        Self { gates: iter.into_iter().collect() }
    }
}

impl<'a> IntoIterator for &'a GateStream {
    type Item = &'a Gate;
    type IntoIter = std::slice::Iter<'a, Gate>;
    fn into_iter(self) -> Self::IntoIter {
        self.gates.iter()
    }
}

// Line format: `phasez q angle`, `h q`, `cnot c t`, `cphase a b angle`.
impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::PhaseZ { qubit, angle } => write!(f, "phasez {qubit} {}", g17(angle)),
            Gate::Hadamard { qubit } => write!(f, "h {qubit}"),
            Gate::CNot { control, target } => write!(f, "cnot {control} {target}"),
            Gate::CPhase { qubit_a, qubit_b, angle } => write!(f, "cphase {qubit_a} {qubit_b} {}", g17(angle)),
        }
    }
}

impl FromStr for Gate {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let fields: Vec<&str> = s.split_whitespace().collect();
        let idx = |i: usize| -> std::result::Result<usize, String> {
            fields
                .get(i)
                .ok_or_else(|| format!("missing field {i}"))?
                .parse()
                .map_err(|e| format!("bad qubit index {:?}: {e}", fields[i]))
        };
        let angle = |i: usize| -> std::result::Result<f64, String> {
            fields
                .get(i)
                .ok_or_else(|| format!("missing field {i}"))?
                .parse()
                .map_err(|e| format!("bad angle {:?}: {e}", fields[i]))
        };
        let (gate, arity) = match fields.first().copied() {
            Some("phasez") => (Gate::PhaseZ { qubit: idx(1)?, angle: angle(2)? }, 3),
            Some("h") => (Gate::Hadamard { qubit: idx(1)? }, 2),
            Some("cnot") => (Gate::CNot { control: idx(1)?, target: idx(2)? }, 3),
            Some("cphase") => (Gate::CPhase { qubit_a: idx(1)?, qubit_b: idx(2)?, angle: angle(3)? }, 4),
            Some(other) => return Err(format!("unknown gate kind {other:?}")),
            None => return Err("empty line".into()),
        };
        if fields.len() != arity {
            return Err(format!("expected {arity} fields, found {}", fields.len()));
        }
        Ok(gate)
    }
}

impl GateStream {
    /// One gate per line, angles in `%.17g`.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.gates.len() * 24);
        for g in &self.gates {
            out.push_str(&g.to_string());
            out.push('\n');
        }
        out
    }

    /// Parses [`GateStream::to_text`] output. Blank lines and `#` comments are skipped.
    pub fn from_text(text: &str) -> Result<Self> {
        text.lines()
            .enumerate()
            .filter(|(_, l)| {
                let l = l.trim();
                !l.is_empty() && !l.starts_with('#')
            })
            .map(|(i, l)| l.parse().map_err(|message| Error::GateParse { line: i + 1, message }))
            .collect()
    }
}
