//! Parameters of the quasi-periodically kicked rotator.
//!
//! Kick potential `V(theta, t) = k (1 + 0.75 cos(w1 t) cos(w2 t)) cos(theta)` with
//! `w1 = 2 pi / lambda`, `w2 = 2 pi / lambda^2`, and `lambda` the real root of
//! `x^3 - x - 1 = 0`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Modulation depth of the kick amplitude.
pub const MODULATION_DEPTH: f64 = 0.75;

/// Default sub-step size for the kick decomposition.
pub const DEFAULT_GAMMA: f64 = 0.2;

/// Slack for integer-part evaluations of ratios like `k / gamma`, which sit exactly on
/// integers for common inputs (1.2 / 0.2 = 5.999...).
const RATIO_SLACK: f64 = 1e-9;

/// Real root of `x^3 - x - 1 = 0` (the plastic number), via Cardano.
pub fn plastic_number() -> f64 {
    let s = 69f64.sqrt();
    ((9.0 + s) / 18.0).cbrt() + ((9.0 - s) / 18.0).cbrt()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n_qubits: usize,
    pub k: f64,
    pub gamma_target: f64,
    /// Number of (CNOT, phase) pairs in the random phase generator; `None` means `2 n_q`.
    #[serde(default)]
    pub phase_pairs: Option<usize>,
    pub seed: u64,
}

impl ModelParams {
    pub fn new(n_qubits: usize, k: f64, seed: u64) -> Self {
        Self { n_qubits, k, gamma_target: DEFAULT_GAMMA, phase_pairs: None, seed }
    }

    pub fn with_gamma(mut self, gamma_target: f64) -> Self {
        self.gamma_target = gamma_target;
        self
    }

    pub fn with_phase_pairs(mut self, m: usize) -> Self {
        self.phase_pairs = Some(m);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=crate::state::MAX_QUBITS).contains(&self.n_qubits) {
            return Err(Error::InvalidParams(format!("n_qubits = {}", self.n_qubits)));
        }
        if !(self.k >= 0.0 && self.k.is_finite()) {
            return Err(Error::InvalidParams(format!("k = {} must be finite and >= 0", self.k)));
        }
        if !(self.gamma_target > 0.0 && self.gamma_target <= 0.5) {
            return Err(Error::InvalidParams(format!("gamma_target = {} outside (0, 0.5]", self.gamma_target)));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn m_pairs(&self) -> usize {
        self.phase_pairs.unwrap_or(2 * self.n_qubits)
    }

    pub fn lambda(&self) -> f64 {
        plastic_number()
    }

    pub fn omega1(&self) -> f64 {
        TAU / plastic_number()
    }

    pub fn omega2(&self) -> f64 {
        TAU / plastic_number().powi(2)
    }

    /// Modulated amplitude `k(t)`.
    pub fn kick_strength(&self, t: u64) -> f64 {
        let t = t as f64;
        self.k * (1.0 + MODULATION_DEPTH * (self.omega1() * t).cos() * (self.omega2() * t).cos())
    }

    pub fn schedule(&self, t: u64) -> KickSchedule {
        KickSchedule::new(t, self.kick_strength(t), self.gamma_target)
    }
}

/// Sub-stepping of one kick: `l_t = ceil(k_t / gamma_target)`, `gamma_t = k_t / l_t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KickSchedule {
    pub t: u64,
    pub k_t: f64,
    pub l_t: usize,
    pub gamma_t: f64,
}

impl KickSchedule {
    pub fn new(t: u64, k_t: f64, gamma_target: f64) -> Self {
        if k_t == 0.0 {
            return Self { t, k_t, l_t: 0, gamma_t: 0.0 };
        }
        let l_t = ((k_t.abs() / gamma_target - RATIO_SLACK).ceil() as usize).max(1);
        Self { t, k_t, l_t, gamma_t: k_t / l_t as f64 }
    }

    /// Fixed sub-step count; used by convergence studies.
    pub fn with_steps(t: u64, k_t: f64, l_t: usize) -> Self {
        let gamma_t = if l_t == 0 { 0.0 } else { k_t / l_t as f64 };
        Self { t, k_t, l_t, gamma_t }
    }
}

/// `[k / gamma]`, the integer part used by the gate-count formula.
pub(crate) fn integer_ratio(k: f64, gamma: f64) -> usize {
    (k / gamma + RATIO_SLACK).floor() as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_is_cubic_root() {
        let l = plastic_number();
        assert!((l.powi(3) - l - 1.0).abs() < 1e-12);
        assert!((l - 1.3247179572447).abs() < 1e-12);
    }

    #[test]
    fn modulated_strength_in_band() {
        let p = ModelParams::new(6, 1.4, 0);
        for t in 0..5000 {
            let s = p.schedule(t);
            assert!(s.k_t >= 0.25 * p.k - 1e-12 && s.k_t <= 1.75 * p.k + 1e-12);
            assert!(s.l_t >= 1);
            assert!(s.gamma_t <= p.gamma_target + 1e-12);
            assert!((s.gamma_t * s.l_t as f64 - s.k_t).abs() < 1e-12);
        }
        assert!((p.kick_strength(0) - 1.75 * 1.4).abs() < 1e-15);
    }

    #[test]
    fn exact_multiples_do_not_round_up() {
        assert_eq!(KickSchedule::new(0, 1.2, 0.2).l_t, 6);
        assert_eq!(KickSchedule::new(0, 1.0, 0.2).l_t, 5);
        assert_eq!(KickSchedule::new(0, 1.01, 0.2).l_t, 6);
        assert_eq!(integer_ratio(1.2, 0.2), 6);
        assert_eq!(integer_ratio(1.8, 0.2), 9);
    }

    #[test]
    fn zero_kick_has_no_steps() {
        let s = KickSchedule::new(3, 0.0, 0.2);
        assert_eq!(s.l_t, 0);
    }

    #[test]
    fn validation() {
        assert!(ModelParams::new(8, 1.8, 0).validate().is_ok());
        assert!(ModelParams::new(1, 1.8, 0).validate().is_err());
        assert!(ModelParams::new(8, -1.0, 0).validate().is_err());
        assert!(ModelParams::new(8, 1.0, 0).with_gamma(0.6).validate().is_err());
        assert_eq!(ModelParams::new(10, 1.0, 0).m_pairs(), 20);
    }
}
