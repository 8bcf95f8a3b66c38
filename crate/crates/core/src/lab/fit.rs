//! Power-law fit `dk_c = A * eps_tilde^alpha` by least squares in log-log coordinates.

use std::io::Write;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::circuit::gate_count;
use crate::error::{Error, Result};
use crate::fmt::g17;
use crate::model::ModelParams;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub eps_tilde: f64,
    pub delta_kc: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    /// Points that entered the regression.
    pub points: Vec<ScalingPoint>,
    pub a: f64,
    pub alpha: f64,
    pub a_stderr: f64,
    pub alpha_stderr: f64,
    pub excluded: usize,
}

impl ScalingFit {
    pub fn predict(&self, eps_tilde: f64) -> f64 {
        self.a * eps_tilde.powf(self.alpha)
    }

    /// CSV with header `eps_tilde,delta_kc,fitted`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "eps_tilde,delta_kc,fitted")?;
        for p in &self.points {
            writeln!(out, "{},{},{}", g17(p.eps_tilde), g17(p.delta_kc), g17(self.predict(p.eps_tilde)))?;
        }
        Ok(())
    }
}

/// Rescaled imperfection strength `eps * n_g * sqrt(n_q)`.
pub fn rescaled_strength(epsilon: f64, params: &ModelParams) -> f64 {
    epsilon * gate_count(params) as f64 * (params.n_qubits as f64).sqrt()
}

/// Ordinary least squares of `ln dk_c` on `ln eps_tilde`.
///
/// Points with non-positive coordinates are dropped with a warning. Standard errors
/// come from the residual variance; `A`'s error is propagated from the intercept's.
pub fn fit_scaling(points: &[ScalingPoint]) -> Result<ScalingFit> {
    if points.len() < 3 {
        return Err(Error::InsufficientPoints { found: points.len() });
    }
    let kept: Vec<ScalingPoint> = points.iter().copied().filter(|p| p.eps_tilde > 0.0 && p.delta_kc > 0.0).collect();
    let excluded = points.len() - kept.len();
    if excluded > 0 {
        warn!("excluding {excluded} scaling point(s) with non-positive shift or strength");
    }
    if kept.len() < 3 {
        return Err(Error::NonPositiveShift { excluded, remaining: kept.len() });
    }

    let n = kept.len() as f64;
    let xs: Vec<f64> = kept.iter().map(|p| p.eps_tilde.ln()).collect();
    let ys: Vec<f64> = kept.iter().map(|p| p.delta_kc.ln()).collect();
    let x_mean = xs.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - x_mean).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParams("all scaling points share one eps_tilde".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - x_mean) * (y - y_mean)).sum();
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let rss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let s2 = rss / (n - 2.0);
    let slope_se = (s2 / sxx).sqrt();
    let intercept_se = (s2 * (1.0 / n + x_mean * x_mean / sxx)).sqrt();
    let a = intercept.exp();
    Ok(ScalingFit { points: kept, a, alpha: slope, a_stderr: a * intercept_se, alpha_stderr: slope_se, excluded })
}
