//! Localization diagnostics of a momentum-representation wave function.

use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmt::g17;
use crate::state::StateVector;

/// Inverse participation ratio `1 / sum_n |psi_n|^4`.
pub fn ipr(state: &StateVector) -> f64 {
    ipr_from_profile(&state.probabilities())
}

pub fn ipr_from_profile(profile: &[f64]) -> f64 {
    1.0 / profile.iter().map(|p| p * p).sum::<f64>()
}

/// Signed distance on the momentum circle, in `[-N/2, N/2)`.
#[inline]
pub fn circular_distance(n: usize, n0: usize, dim: usize) -> i64 {
    let half = (dim / 2) as i64;
    (n as i64 - n0 as i64 + half).rem_euclid(dim as i64) - half
}

/// `sum_n d(n, n0)^2 |psi_n|^2` with circular `d`.
pub fn second_moment(state: &StateVector, n0: usize) -> f64 {
    second_moment_from_profile(&state.probabilities(), n0)
}

pub fn second_moment_from_profile(profile: &[f64], n0: usize) -> f64 {
    let dim = profile.len();
    profile
        .iter()
        .enumerate()
        .map(|(n, p)| {
            let d = circular_distance(n, n0, dim) as f64;
            d * d * p
        })
        .sum()
}

/// Probability on `N/4 <= n < 3N/4`, i.e. the top two qubits reading `01` or `10`.
pub fn w_probability(state: &StateVector) -> f64 {
    w_from_profile(&state.probabilities())
}

pub fn w_from_profile(profile: &[f64]) -> f64 {
    let dim = profile.len();
    profile[dim / 4..3 * dim / 4].iter().sum()
}

/// Outcome probabilities of measuring qubits 1 and 2 (index = 2 a1 + a2).
pub fn top_two_marginal(state: &StateVector) -> [f64; 4] {
    let quarter = state.dim() / 4;
    let mut out = [0.0; 4];
    for (n, a) in state.amplitudes().iter().enumerate() {
        out[n / quarter] += a.norm_sqr();
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub shots: usize,
}

/// Simulated projective measurements of the top two qubits.
pub fn sample_w<R: Rng + ?Sized>(state: &StateVector, shots: usize, rng: &mut R) -> Result<WEstimate> {
    if shots == 0 {
        return Err(Error::InvalidParams("shots must be >= 1".into()));
    }
    let m = top_two_marginal(state);
    let total: f64 = m.iter().sum();
    let mut hits = 0usize;
    for _ in 0..shots {
        let u = rng.gen::<f64>() * total;
        let mut acc = 0.0;
        let mut outcome = 3;
        for (i, p) in m.iter().enumerate() {
            acc += p;
            if u < acc {
                outcome = i;
                break;
            }
        }
        if outcome == 1 || outcome == 2 {
            hits += 1;
        }
    }
    let estimate = hits as f64 / shots as f64;
    Ok(WEstimate { estimate, stderr: (estimate * (1.0 - estimate) / shots as f64).sqrt(), shots })
}

/// Mean probability per level over levels farther than `core_halfwidth` from `n0 = 0`.
pub fn tail_plateau_level(profile: &[f64], core_halfwidth: usize) -> Result<f64> {
    let dim = profile.len();
    if core_halfwidth >= dim / 2 {
        return Err(Error::InvalidWidth { width: core_halfwidth, levels: dim });
    }
    let (sum, count) = profile
        .iter()
        .enumerate()
        .filter(|(n, _)| circular_distance(*n, 0, dim).unsigned_abs() as usize > core_halfwidth)
        .fold((0.0, 0usize), |(s, c), (_, p)| (s + p, c + 1));
    Ok(sum / count as f64)
}

/// Decades between the peak probability and the largest probability in the far half of
/// the circle (`|d| >= N/4`). A localized profile scores high.
pub fn envelope_decades(profile: &[f64]) -> f64 {
    let dim = profile.len();
    let peak = profile.iter().copied().fold(0.0, f64::max);
    let far = profile
        .iter()
        .enumerate()
        .filter(|(n, _)| circular_distance(*n, 0, dim).unsigned_abs() as usize >= dim / 4)
        .map(|(_, p)| *p)
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    (peak / far).log10()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObservableRecord {
    pub t: u64,
    pub xi: f64,
    pub second_moment: f64,
    pub w: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile: Option<Vec<f64>>,
}

impl ObservableRecord {
    pub fn from_state(t: u64, state: &StateVector, keep_profile: bool) -> Self {
        let profile = state.probabilities();
        Self {
            t,
            xi: ipr_from_profile(&profile),
            second_moment: second_moment_from_profile(&profile, 0),
            w: w_from_profile(&profile),
            profile: keep_profile.then_some(profile),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ObservableSeries {
    pub records: Vec<ObservableRecord>,
}

impl ObservableSeries {
    pub fn push(&mut self, record: ObservableRecord) {
        self.records.push(record);
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&ObservableRecord> {
        self.records.last()
    }

    /// CSV with header `t,xi,n2,W`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "t,xi,n2,W")?;
        for r in &self.records {
            writeln!(out, "{},{},{},{}", r.t, g17(r.xi), g17(r.second_moment), g17(r.w))?;
        }
        Ok(())
    }

    /// Concatenated little-endian `f64` profiles of every record that kept one.
    pub fn write_profiles<W: Write>(&self, mut out: W) -> Result<usize> {
        let mut written = 0;
        for p in self.records.iter().filter_map(|r| r.profile.as_ref()) {
            for x in p {
                out.write_all(&x.to_le_bytes())?;
            }
            written += 1;
        }
        Ok(written)
    }
}
