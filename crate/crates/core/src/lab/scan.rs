use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::engine::{run_trajectory, EngineKind, PhaseChoice, RecordPlan, TrajectorySetup, WindowAverage};
use crate::error::{Error, Result};
use crate::fmt::g17;
use crate::model::ModelParams;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub n_qubits: usize,
    pub gamma_target: f64,
    pub phase_pairs: Option<usize>,
    pub k_grid: Vec<f64>,
    /// One disorder realization per seed; every k uses the same realizations.
    pub seeds: Vec<u64>,
    pub t_max: u64,
    pub engine: EngineKind,
    pub epsilon: f64,
    pub mu: f64,
    pub phases: PhaseChoice,
    pub average_fraction: f64,
}

impl ScanConfig {
    pub fn setup(&self, k: f64, seed: u64) -> TrajectorySetup {
        let mut params = ModelParams::new(self.n_qubits, k, seed).with_gamma(self.gamma_target);
        params.phase_pairs = self.phase_pairs;
        TrajectorySetup { params, engine: self.engine, epsilon: self.epsilon, mu: self.mu, phases: self.phases }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub k: f64,
    pub xi: f64,
    pub xi_stderr: f64,
    pub w: f64,
    pub w_stderr: f64,
    pub second_moment: f64,
    pub second_moment_stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub points: Vec<ScanPoint>,
    pub n_realizations: usize,
    pub t_max: u64,
    pub engine: EngineKind,
    pub epsilon: f64,
    pub mu: f64,
}

impl ScanResult {
    pub fn k_grid(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.k).collect()
    }

    /// CSV with header `k,xi,xi_stderr,W,W_stderr,n2,n2_stderr,realizations`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "k,xi,xi_stderr,W,W_stderr,n2,n2_stderr,realizations")?;
        for p in &self.points {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                g17(p.k),
                g17(p.xi),
                g17(p.xi_stderr),
                g17(p.w),
                g17(p.w_stderr),
                g17(p.second_moment),
                g17(p.second_moment_stderr),
                self.n_realizations
            )?;
        }
        Ok(())
    }
}

/// Mean and standard error of the mean (0 for a single sample).
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Evolves every (k, seed) pair on the current rayon pool and averages over seeds.
pub fn scan_k(config: &ScanConfig) -> Result<ScanResult> {
    if config.k_grid.is_empty() {
        return Err(Error::InvalidParams("k grid is empty".into()));
    }
    if config.seeds.is_empty() {
        return Err(Error::InvalidParams("need at least one realization seed".into()));
    }
    if config.k_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParams("k grid must be strictly ascending".into()));
    }
    let plan = RecordPlan { average_fraction: config.average_fraction, ..RecordPlan::default() };
    let items: Vec<(usize, usize)> = (0..config.k_grid.len())
        .flat_map(|ki| (0..config.seeds.len()).map(move |si| (ki, si)))
        .collect();
    // collect() keeps item order, so aggregation below does not depend on scheduling
    let outcomes: Vec<WindowAverage> = items
        .par_iter()
        .map(|&(ki, si)| {
            let setup = config.setup(config.k_grid[ki], config.seeds[si]);
            run_trajectory(&setup, config.t_max, plan).map(|o| o.average)
        })
        .collect::<Result<_>>()?;

    let ns = config.seeds.len();
    let points = config
        .k_grid
        .iter()
        .enumerate()
        .map(|(ki, &k)| {
            let chunk = &outcomes[ki * ns..(ki + 1) * ns];
            let (xi, xi_stderr) = mean_stderr(&chunk.iter().map(|o| o.xi).collect::<Vec<_>>());
            let (w, w_stderr) = mean_stderr(&chunk.iter().map(|o| o.w).collect::<Vec<_>>());
            let (n2, n2_err) = mean_stderr(&chunk.iter().map(|o| o.second_moment).collect::<Vec<_>>());
            ScanPoint { k, xi, xi_stderr, w, w_stderr, second_moment: n2, second_moment_stderr: n2_err }
        })
        .collect();
    Ok(ScanResult {
        points,
        n_realizations: ns,
        t_max: config.t_max,
        engine: config.engine,
        epsilon: config.epsilon,
        mu: config.mu,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(k_grid: Vec<f64>, t_max: u64) -> ScanConfig {
        ScanConfig {
            n_qubits: 6,
            gamma_target: 0.2,
            phase_pairs: None,
            k_grid,
            seeds: vec![11],
            t_max,
            engine: EngineKind::Oracle,
            epsilon: 0.0,
            mu: 0.0,
            phases: PhaseChoice::FromCircuit,
            average_fraction: 0.1,
        }
    }

    #[test]
    fn initial_state_scan() {
        let r = scan_k(&config(vec![1.5], 0)).unwrap();
        assert_eq!(r.points[0].xi, 1.0);
        assert_eq!(r.points[0].w, 0.0);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(scan_k(&config(vec![], 1)).is_err());
        assert!(scan_k(&config(vec![2.0, 1.0], 1)).is_err());
        let mut c = config(vec![1.0], 1);
        c.seeds.clear();
        assert!(scan_k(&c).is_err());
    }

    #[test]
    fn stats() {
        assert_eq!(mean_stderr(&[3.0]), (3.0, 0.0));
        let (m, s) = mean_stderr(&[1.0, 2.0, 3.0, 4.0]);
        assert!((m - 2.5).abs() < 1e-15);
        assert!((s - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn scan_is_deterministic() {
        let mut c = config(vec![1.0, 2.0], 50);
        c.seeds = vec![1, 2, 3];
        let a = scan_k(&c).unwrap();
        let b = scan_k(&c).unwrap();
        assert_eq!(a, b);
        let mut buf = Vec::new();
        a.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 3);
    }
}
