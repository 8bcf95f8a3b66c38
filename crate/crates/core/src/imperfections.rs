//! Static imperfections: after every elementary gate the register picks up
//! `exp(i sum_j (eta_j sigma_z_j + mu_j sigma_x_j sigma_x_{j+1}))` with qubit `n_q`
//! coupled back to qubit 1.
//!
//! The exponential is applied split as `prod_j exp(i mu_j XX) * exp(i sum_j eta_j Z_j)`
//! (Z part first). Each factor is exact and the XX terms commute among themselves; the
//! split error against the exact exponential is second order, `O(eps * mu)` per gate.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{apply_gate, xx_kernel, GateStream};
use crate::state::{qubit_mask, StateVector};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImperfectionProfile {
    pub n_qubits: usize,
    pub epsilon: f64,
    pub mu: f64,
    pub seed: u64,
    /// `eta_j` in `[-eps/2, eps/2]`, indexed by qubit - 1.
    pub eta: Vec<f64>,
    /// `mu_j` in `[-mu/2, mu/2]` coupling qubit `j` to qubit `j % n_q + 1`.
    pub couplings: Vec<f64>,
}

impl ImperfectionProfile {
    pub fn zero(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            epsilon: 0.0,
            mu: 0.0,
            seed: 0,
            eta: vec![0.0; n_qubits],
            couplings: vec![0.0; n_qubits],
        }
    }

    /// Uniform draws. The unit-interval draws depend on `seed` only, so the same seed at
    /// different strengths gives proportionally scaled profiles.
    pub fn sample(n_qubits: usize, epsilon: f64, mu: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(1);
        let eta = (0..n_qubits).map(|_| epsilon * (rng.gen::<f64>() - 0.5)).collect();
        rng.set_stream(2);
        let couplings = (0..n_qubits).map(|_| mu * (rng.gen::<f64>() - 0.5)).collect();
        Self { n_qubits, epsilon, mu, seed, eta, couplings }
    }

    pub fn is_zero(&self) -> bool {
        self.eta.iter().chain(&self.couplings).all(|&x| x == 0.0)
    }

    /// Qubit pair `(j, j+1)` of coupling `j`, wrapping `n_q -> 1`.
    pub fn coupled_pair(&self, j: usize) -> (usize, usize) {
        (j, j % self.n_qubits + 1)
    }
}

/// Precomputed per-gate phase operator for one profile.
#[derive(Clone, Debug)]
pub struct ImperfectionChannel {
    n_qubits: usize,
    diagonal: Option<Vec<Complex64>>,
    /// (flip mask, cos mu_j, sin mu_j)
    xx: Vec<(usize, f64, f64)>,
}

impl ImperfectionChannel {
    pub fn new(profile: &ImperfectionProfile) -> Self {
        let n = profile.n_qubits;
        let diagonal = profile.eta.iter().any(|&e| e != 0.0).then(|| {
            (0..1usize << n)
                .map(|b| {
                    let phase: f64 = profile
                        .eta
                        .iter()
                        .enumerate()
                        .map(|(j, eta)| if b & qubit_mask(n, j + 1) == 0 { *eta } else { -eta })
                        .sum();
                    Complex64::from_polar(1.0, phase)
                })
                .collect()
        });
        let xx = profile
            .couplings
            .iter()
            .enumerate()
            .filter(|(_, mu)| **mu != 0.0)
            .map(|(j, mu)| {
                let (a, b) = profile.coupled_pair(j + 1);
                (qubit_mask(n, a) | qubit_mask(n, b), mu.cos(), mu.sin())
            })
            .collect();
        Self { n_qubits: n, diagonal, xx }
    }

    pub fn is_identity(&self) -> bool {
        self.diagonal.is_none() && self.xx.is_empty()
    }

    pub fn apply(&self, state: &mut StateVector) -> Result<()> {
        if state.n_qubits() != self.n_qubits {
            return Err(Error::SizeMismatch { expected: self.n_qubits, found: state.n_qubits() });
        }
        let amps = state.amplitudes_mut();
        if let Some(diag) = &self.diagonal {
            amps.iter_mut().zip(diag).for_each(|(a, d)| *a *= d);
        }
        for &(flip, c, s) in &self.xx {
            xx_kernel(amps, flip, c, s);
        }
        Ok(())
    }
}

pub fn apply_imperfection(state: &mut StateVector, profile: &ImperfectionProfile) -> Result<()> {
    if state.n_qubits() != profile.n_qubits {
        return Err(Error::SizeMismatch { expected: profile.n_qubits, found: state.n_qubits() });
    }
    ImperfectionChannel::new(profile).apply(state)
}

/// Every gate of `stream` followed by one application of the channel.
pub fn run_with_imperfections(state: &mut StateVector, stream: &GateStream, channel: &ImperfectionChannel) -> Result<()> {
    if channel.is_identity() {
        return stream.apply(state);
    }
    if state.n_qubits() != channel.n_qubits {
        return Err(Error::SizeMismatch { expected: channel.n_qubits, found: state.n_qubits() });
    }
    for gate in stream {
        apply_gate(state, gate)?;
        channel.apply(state)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::Gate;
    use rand::SeedableRng;

    type Matrix = Vec<Vec<Complex64>>;

    fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
        let n = a.len();
        (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect())
            .collect()
    }

    /// exp(i H) by Taylor series; fine for the tiny norms used here.
    fn expm_i(h: &Matrix) -> Matrix {
        let n = h.len();
        let mut result: Matrix = (0..n)
            .map(|i| (0..n).map(|j| if i == j { Complex64::new(1.0, 0.0) } else { Complex64::default() }).collect())
            .collect();
        let mut term = result.clone();
        let ih: Matrix = h.iter().map(|r| r.iter().map(|x| x * Complex64::i()).collect()).collect();
        for k in 1..30 {
            term = matmul(&term, &ih).into_iter().map(|r| r.into_iter().map(|x| x / k as f64).collect()).collect();
            for i in 0..n {
                for j in 0..n {
                    result[i][j] += term[i][j];
                }
            }
        }
        result
    }

    /// Dense `phi_hat = sum_j eta_j Z_j + mu_j X_j X_{j+1}`.
    fn phi_hat(p: &ImperfectionProfile) -> Matrix {
        let n = p.n_qubits;
        let dim = 1 << n;
        let mut h = vec![vec![Complex64::default(); dim]; dim];
        for b in 0..dim {
            for j in 0..n {
                let bit = b & (1 << (n - 1 - j)) != 0;
                h[b][b] += if bit { -p.eta[j] } else { p.eta[j] };
                let (qa, qb) = (j, (j + 1) % n);
                let flipped = b ^ (1 << (n - 1 - qa)) ^ (1 << (n - 1 - qb));
                h[flipped][b] += p.couplings[j];
            }
        }
        h
    }

    #[test]
    fn zero_profile_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s0 = StateVector::random(4, &mut rng).unwrap();
        let mut s = s0.clone();
        apply_imperfection(&mut s, &ImperfectionProfile::sample(4, 0.0, 0.0, 9)).unwrap();
        assert_eq!(s, s0);
        assert!(ImperfectionChannel::new(&ImperfectionProfile::zero(4)).is_identity());
    }

    #[test]
    fn profile_bounds_and_scaling() {
        let p = ImperfectionProfile::sample(9, 1e-3, 4e-3, 5);
        assert!(p.eta.iter().all(|e| e.abs() <= 0.5e-3));
        assert!(p.couplings.iter().all(|m| m.abs() <= 2e-3));
        assert_eq!(p.coupled_pair(9), (9, 1));
        let q = ImperfectionProfile::sample(9, 2e-3, 8e-3, 5);
        for (a, b) in p.eta.iter().zip(&q.eta) {
            assert!((2.0 * a - b).abs() < 1e-18);
        }
        assert_eq!(p, ImperfectionProfile::sample(9, 1e-3, 4e-3, 5));
    }

    #[test]
    fn size_mismatch() {
        let mut s = StateVector::new(3).unwrap();
        let p = ImperfectionProfile::sample(4, 1e-3, 0.0, 1);
        assert!(matches!(apply_imperfection(&mut s, &p), Err(Error::SizeMismatch { .. })));
    }

    #[test]
    fn diagonal_part_matches_direct_evaluation() {
        let p = ImperfectionProfile::sample(3, 0.3, 0.0, 11);
        for b in 0..8 {
            let mut s = StateVector::basis_state(3, b).unwrap();
            apply_imperfection(&mut s, &p).unwrap();
            let want: f64 = (0..3).map(|j| if b & (4 >> j) == 0 { p.eta[j] } else { -p.eta[j] }).sum();
            assert!((s.amplitudes()[b] - Complex64::from_polar(1.0, want)).norm() < 1e-14);
        }
    }

    #[test]
    fn split_close_to_exact_exponential() {
        let p = ImperfectionProfile::sample(3, 1e-2, 1e-2, 21);
        let u = expm_i(&phi_hat(&p));
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s0 = StateVector::random(3, &mut rng).unwrap();
        let exact: Vec<Complex64> =
            (0..8).map(|i| (0..8).map(|j| u[i][j] * s0.amplitudes()[j]).sum()).collect();
        let mut s = s0.clone();
        apply_imperfection(&mut s, &p).unwrap();
        let err = s.amplitudes().iter().zip(&exact).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err <= 1e-4, "split error {err}");
        // commuting case (mu = 0) is exact
        let p0 = ImperfectionProfile::sample(3, 1e-2, 0.0, 21);
        let u0 = expm_i(&phi_hat(&p0));
        let mut s = s0.clone();
        apply_imperfection(&mut s, &p0).unwrap();
        for i in 0..8 {
            let e: Complex64 = (0..8).map(|j| u0[i][j] * s0.amplitudes()[j]).sum();
            assert!((s.amplitudes()[i] - e).norm() < 1e-14);
        }
    }

    #[test]
    fn runs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s0 = StateVector::random(5, &mut rng).unwrap();
        let stream: GateStream = (1..=5)
            .flat_map(|q| [Gate::Hadamard { qubit: q }, Gate::CNot { control: q, target: q % 5 + 1 }])
            .collect();

        let mut s = s0.clone();
        let ch = ImperfectionChannel::new(&ImperfectionProfile::sample(5, 1e-3, 1e-3, 4));
        run_with_imperfections(&mut s, &GateStream::new(), &ch).unwrap();
        assert_eq!(s, s0);

        let mut perfect = s0.clone();
        stream.apply(&mut perfect).unwrap();
        let mut zero = s0.clone();
        run_with_imperfections(&mut zero, &stream, &ImperfectionChannel::new(&ImperfectionProfile::zero(5))).unwrap();
        assert_eq!(perfect, zero);

        let mut noisy = s0.clone();
        run_with_imperfections(&mut noisy, &stream, &ch).unwrap();
        assert!((noisy.norm_sqr() - 1.0).abs() <= stream.len() as f64 * 1e-12);
        assert!(noisy.max_abs_diff(&perfect) > 0.0);
    }
}
