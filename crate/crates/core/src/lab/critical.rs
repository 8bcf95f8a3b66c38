use serde::{Deserialize, Serialize};

use super::scan::ScanResult;
use crate::error::{Error, Result};

/// W level halfway between the localized (0) and delocalized (1/2) limits.
pub const W_THRESHOLD: f64 = 0.25;

/// Minimum `xi_max / xi_min` for a scan to count as spanning the transition.
pub const MIN_IPR_CONTRAST: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalMethod {
    IprMidpoint,
    WThreshold,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub k_c: f64,
    pub stderr: f64,
    pub method: CriticalMethod,
    /// Level whose crossing defines `k_c`.
    pub level: f64,
}

/// Locates the localization-delocalization crossing in a scan.
///
/// `IprMidpoint` interpolates where the averaged IPR crosses the midpoint of the scan's
/// own smallest and largest values; `WThreshold` where the averaged W crosses 0.25.
/// The first upward crossing along the ascending k grid is used.
pub fn find_critical_point(scan: &ScanResult, method: CriticalMethod) -> Result<CriticalPoint> {
    let ks = scan.k_grid();
    let (ys, errs): (Vec<f64>, Vec<f64>) = match method {
        CriticalMethod::IprMidpoint => scan.points.iter().map(|p| (p.xi, p.xi_stderr)).unzip(),
        CriticalMethod::WThreshold => scan.points.iter().map(|p| (p.w, p.w_stderr)).unzip(),
    };
    let lo = ys.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let level = match method {
        CriticalMethod::IprMidpoint => {
            if !(hi >= MIN_IPR_CONTRAST * lo) {
                return Err(Error::NoTransitionInRange(format!(
                    "IPR spans only {lo:.3}..{hi:.3}, need a ratio of {MIN_IPR_CONTRAST}"
                )));
            }
            0.5 * (lo + hi)
        }
        CriticalMethod::WThreshold => {
            if !(lo < W_THRESHOLD && hi >= W_THRESHOLD) {
                return Err(Error::NoTransitionInRange(format!(
                    "W spans {lo:.4}..{hi:.4}, never crosses {W_THRESHOLD}"
                )));
            }
            W_THRESHOLD
        }
    };
    let (k_c, stderr) = crossing(&ks, &ys, &errs, level)
        .ok_or_else(|| Error::NoTransitionInRange(format!("no upward crossing of {level}")))?;
    Ok(CriticalPoint { k_c, stderr, method, level })
}

/// First `i` with `y_i < level <= y_{i+1}`, linearly interpolated, with the point errors
/// propagated through the interpolation weights.
pub fn crossing(ks: &[f64], ys: &[f64], errs: &[f64], level: f64) -> Option<(f64, f64)> {
    (0..ks.len().saturating_sub(1)).find(|&i| ys[i] < level && level <= ys[i + 1]).map(|i| {
        let (a, b) = (ys[i], ys[i + 1]);
        let dk = ks[i + 1] - ks[i];
        let dy = b - a;
        let k_c = ks[i] + (level - a) / dy * dk;
        let da = (level - b) / (dy * dy) * dk * errs[i];
        let db = (level - a) / (dy * dy) * dk * errs[i + 1];
        (k_c, da.hypot(db))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::engine::EngineKind;
    use crate::lab::scan::ScanPoint;

    fn scan(ks: &[f64], xi: impl Fn(f64) -> f64, w: impl Fn(f64) -> f64) -> ScanResult {
        ScanResult {
            points: ks
                .iter()
                .map(|&k| ScanPoint {
                    k,
                    xi: xi(k),
                    xi_stderr: 0.0,
                    w: w(k),
                    w_stderr: 0.0,
                    second_moment: 0.0,
                    second_moment_stderr: 0.0,
                })
                .collect(),
            n_realizations: 1,
            t_max: 0,
            engine: EngineKind::Oracle,
            epsilon: 0.0,
            mu: 0.0,
        }
    }

    fn grid() -> Vec<f64> {
        (0..17).map(|i| 1.0 + 0.1 * i as f64).collect()
    }

    #[test]
    fn synthetic_step() {
        let s = scan(&grid(), |k| if k < 2.0 - 1e-9 { 1.0 } else { 1024.0 }, |k| if k < 2.0 - 1e-9 { 0.0 } else { 0.5 });
        let ipr = find_critical_point(&s, CriticalMethod::IprMidpoint).unwrap();
        assert!((ipr.k_c - 2.0).abs() <= 0.1);
        let w = find_critical_point(&s, CriticalMethod::WThreshold).unwrap();
        assert!((w.k_c - 2.0).abs() <= 0.1);
        assert!((ipr.k_c - w.k_c).abs() <= 0.2);
    }

    #[test]
    fn linear_ramp_interpolates_exactly() {
        let s = scan(&grid(), |k| 10.0 * (k - 0.9), |k| 0.25 * (k - 1.0));
        let c = find_critical_point(&s, CriticalMethod::IprMidpoint).unwrap();
        assert!((c.k_c - 1.8).abs() < 1e-12);
        let c = find_critical_point(&s, CriticalMethod::WThreshold).unwrap();
        assert!((c.k_c - 2.0).abs() < 1e-12);
    }

    #[test]
    fn flat_scans_have_no_transition() {
        let s = scan(&grid(), |_| 3.0, |_| 0.0);
        assert!(matches!(find_critical_point(&s, CriticalMethod::IprMidpoint), Err(Error::NoTransitionInRange(_))));
        assert!(matches!(find_critical_point(&s, CriticalMethod::WThreshold), Err(Error::NoTransitionInRange(_))));
    }

    #[test]
    fn error_propagation() {
        let (k, e) = crossing(&[0.0, 1.0], &[0.0, 2.0], &[0.2, 0.2], 1.0).unwrap();
        assert!((k - 0.5).abs() < 1e-15);
        // each endpoint contributes half its error
        assert!((e - (0.05f64 * 0.05 * 2.0).sqrt()).abs() < 1e-15);
    }
}
