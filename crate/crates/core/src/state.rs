//! Dense state vector over an `n_q`-qubit register.
//!
//! Qubit 1 is the most significant bit of the basis index, so for a phase
//! representation index `j` the binary expansion `j / N = 0.a1 a2 ... a_nq`
//! reads qubits 1..=n_q left to right.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest register we are willing to allocate densely.
pub const MAX_QUBITS: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    Momentum,
    Phase,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
    n_qubits: usize,
    basis: Basis,
}

/// Bit mask of a 1-based qubit index inside the basis index.
#[inline]
pub fn qubit_mask(n_qubits: usize, qubit: usize) -> usize {
    1 << (n_qubits - qubit)
}

pub(crate) fn check_qubit(n_qubits: usize, qubit: usize) -> Result<()> {
    if qubit == 0 || qubit > n_qubits {
        return Err(Error::IndexOutOfRange { qubit, n_qubits });
    }
    Ok(())
}

fn check_register(n_qubits: usize) -> Result<()> {
    if !(2..=MAX_QUBITS).contains(&n_qubits) {
        return Err(Error::InvalidParams(format!(
            "register size {n_qubits} outside 2..={MAX_QUBITS}"
        )));
    }
    Ok(())
}

impl StateVector {
    /// `|00...0>` in the momentum representation (momentum `n0 = 0`).
    pub fn new(n_qubits: usize) -> Result<Self> {
        Self::basis_state(n_qubits, 0)
    }

    pub fn basis_state(n_qubits: usize, index: usize) -> Result<Self> {
        check_register(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::SizeMismatch { expected: dim, found: index });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amps, n_qubits, basis: Basis::Momentum })
    }

    /// Wraps raw amplitudes. The length must be a power of two with at least 2 qubits;
    /// normalization is the caller's responsibility.
    pub fn from_amplitudes(amps: Vec<Complex64>, basis: Basis) -> Result<Self> {
        let len = amps.len();
        if !len.is_power_of_two() {
            return Err(Error::SizeMismatch { expected: len.next_power_of_two(), found: len });
        }
        let n_qubits = len.trailing_zeros() as usize;
        check_register(n_qubits)?;
        Ok(Self { amps, n_qubits, basis })
    }

    /// Normalized state with i.i.d. uniform real and imaginary parts.
    pub fn random<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Result<Self> {
        check_register(n_qubits)?;
        let amps = (0..1usize << n_qubits)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let mut state = Self { amps, n_qubits, basis: Basis::Momentum };
        state.normalize();
        Ok(state)
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    #[inline]
    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn set_basis(&mut self, basis: Basis) {
        self.basis = basis;
    }

    #[inline]
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    #[inline]
    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) {
        let scale = 1.0 / self.norm_sqr().sqrt();
        self.amps.iter_mut().for_each(|a| *a *= scale);
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::SizeMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Largest pointwise amplitude difference.
    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Reverses the bit order of every basis index (qubit q <-> qubit n_q + 1 - q).
    /// A pure relabeling, no gates involved.
    pub fn bit_reverse(&mut self) {
        let shift = usize::BITS as usize - self.n_qubits;
        for i in 0..self.amps.len() {
            let r = i.reverse_bits() >> shift;
            if r > i {
                self.amps.swap(i, r);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn initial_state_is_origin() {
        let s = StateVector::new(3).unwrap();
        assert_eq!(s.dim(), 8);
        assert_eq!(s.amplitudes()[0], Complex64::new(1.0, 0.0));
        assert_eq!(s.basis(), Basis::Momentum);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(StateVector::new(1).is_err());
        assert!(StateVector::from_amplitudes(vec![Complex64::default(); 6], Basis::Phase).is_err());
        assert!(StateVector::basis_state(2, 4).is_err());
    }

    #[test]
    fn mask_puts_qubit_one_at_msb() {
        assert_eq!(qubit_mask(4, 1), 0b1000);
        assert_eq!(qubit_mask(4, 4), 0b0001);
    }

    #[test]
    fn bit_reverse_is_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = StateVector::random(5, &mut rng).unwrap();
        let mut r = s.clone();
        r.bit_reverse();
        assert_eq!(r.amplitudes()[0b00001], s.amplitudes()[0b10000]);
        assert_eq!(r.amplitudes()[0b00110], s.amplitudes()[0b01100]);
        r.bit_reverse();
        assert_eq!(r, s);
    }

    #[test]
    fn random_state_is_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = StateVector::random(6, &mut rng).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-14);
    }
}
