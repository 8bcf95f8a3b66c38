//! Config-driven runs. Every run writes `metadata.json`, its CSV outputs and a
//! `MANIFEST` whose first line reads `status: complete` only once everything is flushed.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use super::config::{ExperimentConfig, Pipeline};
use super::critical::{find_critical_point, CriticalMethod, CriticalPoint};
use super::engine::{run_trajectory, RecordPlan, TrajectorySetup};
use super::fit::{fit_scaling, rescaled_strength, ScalingPoint};
use super::realization_seeds;
use super::scan::{scan_k, ScanConfig, ScanResult};
use crate::error::{Error, Result};
use crate::fmt::g17;
use crate::model::ModelParams;
use crate::observables::circular_distance;

/// Ideal critical point used when no `epsilon = 0` scan or `reference_kc` is available.
pub const NOMINAL_KC: f64 = 1.8;

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RunSummary {
    pub files: Vec<String>,
}

struct Outputs {
    dir: PathBuf,
    files: Vec<String>,
    pipeline: Pipeline,
}

impl Outputs {
    fn create(&mut self, name: &str) -> Result<BufWriter<File>> {
        self.files.push(name.to_string());
        Ok(BufWriter::new(File::create(self.dir.join(name))?))
    }

    fn write_with(&mut self, name: &str, f: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
        let mut w = self.create(name)?;
        f(&mut w)?;
        w.flush()?;
        Ok(())
    }

    fn manifest(&self, error: Option<&Error>) -> Result<()> {
        let mut text = String::new();
        match error {
            None => text.push_str("status: complete\n"),
            Some(e) => text.push_str(&format!("status: incomplete\nerror: {e}\n")),
        }
        text.push_str(&format!("pipeline: {:?}\nversion: {}\nfiles:\n", self.pipeline, env!("CARGO_PKG_VERSION")));
        for f in &self.files {
            text.push_str(f);
            text.push('\n');
        }
        fs::write(self.dir.join("MANIFEST"), text)?;
        Ok(())
    }
}

/// Runs the configured pipeline, writing artifacts into `out_dir`.
pub fn run_experiment(config: &ExperimentConfig, out_dir: &Path) -> Result<RunSummary> {
    config.validate()?;
    fs::create_dir_all(out_dir)?;
    let mut out = Outputs { dir: out_dir.to_path_buf(), files: Vec::new(), pipeline: config.pipeline };
    out.manifest(Some(&Error::InvalidParams("run in progress".into())))?;
    let result = match config.pipeline {
        Pipeline::Evolve => evolve(config, &mut out),
        Pipeline::Scan => scan(config, &mut out),
        Pipeline::Critical => critical(config, &mut out).map(|_| ()),
        Pipeline::Scaling => scaling(config, &mut out),
    };
    match result {
        Ok(()) => {
            out.manifest(None)?;
            Ok(RunSummary { files: out.files })
        }
        Err(e) => {
            out.manifest(Some(&e))?;
            Err(e)
        }
    }
}

fn base_metadata(config: &ExperimentConfig, seeds: &[u64]) -> Value {
    json!({
        "code_version": env!("CARGO_PKG_VERSION"),
        "config": config,
        "realization_seeds": seeds,
    })
}

fn write_metadata(out: &mut Outputs, meta: &Value) -> Result<()> {
    out.write_with("metadata.json", |w| {
        serde_json::to_writer_pretty(&mut *w, meta)?;
        writeln!(w)?;
        Ok(())
    })
}

fn evolve(config: &ExperimentConfig, out: &mut Outputs) -> Result<()> {
    let seed = realization_seeds(config.seed, 1)[0];
    let mut params = ModelParams::new(config.n_qubits, config.k, seed).with_gamma(config.gamma_target);
    params.phase_pairs = config.phase_pairs;
    let setup = TrajectorySetup {
        params,
        engine: config.engine,
        epsilon: config.epsilon,
        mu: config.mu,
        phases: config.phases,
    };
    let plan = RecordPlan {
        record_every: config.record_every,
        keep_profiles: config.save_profiles,
        average_fraction: config.average_fraction,
    };
    let outcome = run_trajectory(&setup, config.t_max, plan)?;

    out.write_with("series.csv", |w| outcome.series.write_csv(w))?;
    if config.save_profiles {
        out.write_with("profiles.bin", |w| outcome.series.write_profiles(w).map(|_| ()))?;
    }
    let probs = outcome.final_state.probabilities();
    out.write_with("profile_final.csv", |w| {
        writeln!(w, "n,d,prob")?;
        let dim = probs.len();
        for (n, p) in probs.iter().enumerate() {
            writeln!(w, "{n},{},{}", circular_distance(n, 0, dim), g17(*p))?;
        }
        Ok(())
    })?;

    let mut meta = base_metadata(config, &[seed]);
    meta["engine"] = json!(config.engine);
    meta["phase_generator"] = json!(setup.generator());
    meta["imperfection_profile"] = json!(setup.profile());
    meta["window_average"] = json!(outcome.average);
    meta["profile_dump"] = json!({"levels": probs.len(), "records": outcome.series.records.iter().filter(|r| r.profile.is_some()).count(), "format": "f64 little-endian"});
    write_metadata(out, &meta)
}

fn scan_config(config: &ExperimentConfig, seeds: &[u64], epsilon: f64, mu: f64) -> ScanConfig {
    ScanConfig {
        n_qubits: config.n_qubits,
        gamma_target: config.gamma_target,
        phase_pairs: config.phase_pairs,
        k_grid: config.k_values(),
        seeds: seeds.to_vec(),
        t_max: config.t_max,
        engine: config.engine,
        epsilon,
        mu,
        phases: config.phases,
        average_fraction: config.average_fraction,
    }
}

fn critical_json(scan: &ScanResult) -> Value {
    let entry = |m| match find_critical_point(scan, m) {
        Ok(c) => json!(c),
        Err(e) => json!({"error": e.to_string()}),
    };
    json!({
        "ipr_midpoint": entry(CriticalMethod::IprMidpoint),
        "w_threshold": entry(CriticalMethod::WThreshold),
    })
}

fn profiles_json(config: &ExperimentConfig, seeds: &[u64], epsilon: f64, mu: f64) -> Value {
    let sc = scan_config(config, seeds, epsilon, mu);
    json!(seeds.iter().map(|&s| sc.setup(config.k, s).profile()).collect::<Vec<_>>())
}

fn scan(config: &ExperimentConfig, out: &mut Outputs) -> Result<()> {
    let seeds = realization_seeds(config.seed, config.realizations);
    let result = scan_k(&scan_config(config, &seeds, config.epsilon, config.mu))?;
    out.write_with("scan.csv", |w| result.write_csv(w))?;
    let mut meta = base_metadata(config, &seeds);
    meta["engine"] = json!(config.engine);
    meta["imperfection_profiles"] = profiles_json(config, &seeds, config.epsilon, config.mu);
    meta["critical_point"] = critical_json(&result);
    write_metadata(out, &meta)
}

struct CriticalRow {
    epsilon: f64,
    mu: f64,
    ipr: Option<CriticalPoint>,
    w: Option<CriticalPoint>,
}

fn critical(config: &ExperimentConfig, out: &mut Outputs) -> Result<(Vec<CriticalRow>, f64)> {
    let seeds = realization_seeds(config.seed, config.realizations);
    let mut rows = Vec::new();
    let mut scans = Vec::new();
    for (i, &eps) in config.epsilons.iter().enumerate() {
        let mu = config.mu_for(eps);
        let result = scan_k(&scan_config(config, &seeds, eps, mu))?;
        out.write_with(&format!("scan_eps{i:02}.csv"), |w| result.write_csv(w))?;
        rows.push(CriticalRow {
            epsilon: eps,
            mu,
            ipr: find_critical_point(&result, CriticalMethod::IprMidpoint).ok(),
            w: find_critical_point(&result, CriticalMethod::WThreshold).ok(),
        });
        scans.push(json!({
            "epsilon": eps,
            "mu": mu,
            "critical_point": critical_json(&result),
            "imperfection_profiles": profiles_json(config, &seeds, eps, mu),
        }));
    }
    let reference_kc = config
        .reference_kc
        .or_else(|| rows.iter().find(|r| r.epsilon == 0.0 && r.mu == 0.0).and_then(|r| r.ipr.map(|c| c.k_c)))
        .unwrap_or(NOMINAL_KC);
    let params = reference_params(config, reference_kc);

    let opt = |c: Option<CriticalPoint>| c.map_or(("nan".to_string(), "nan".to_string()), |c| (g17(c.k_c), g17(c.stderr)));
    out.write_with("critical.csv", |w| {
        writeln!(w, "epsilon,mu,eps_tilde,kc_ipr,kc_ipr_stderr,kc_w,kc_w_stderr")?;
        for r in &rows {
            let (ki, kie) = opt(r.ipr);
            let (kw, kwe) = opt(r.w);
            writeln!(w, "{},{},{},{ki},{kie},{kw},{kwe}", g17(r.epsilon), g17(r.mu), g17(rescaled_strength(r.epsilon, &params)))?;
        }
        Ok(())
    })?;
    let mut meta = base_metadata(config, &seeds);
    meta["engine"] = json!(config.engine);
    meta["reference_kc"] = json!(reference_kc);
    meta["gate_count_at_reference"] = json!(crate::circuit::gate_count(&params));
    meta["scans"] = json!(scans);
    write_metadata(out, &meta)?;
    Ok((rows, reference_kc))
}

fn reference_params(config: &ExperimentConfig, k: f64) -> ModelParams {
    let mut params = ModelParams::new(config.n_qubits, k, 0).with_gamma(config.gamma_target);
    params.phase_pairs = config.phase_pairs;
    params
}

fn scaling(config: &ExperimentConfig, out: &mut Outputs) -> Result<()> {
    let points: Vec<ScalingPoint> = match &config.points {
        Some(pts) => pts.iter().map(|&[e, d]| ScalingPoint { eps_tilde: e, delta_kc: d }).collect(),
        None => {
            let (rows, reference_kc) = critical(config, out)?;
            let params = reference_params(config, reference_kc);
            rows.iter()
                .filter(|r| r.epsilon > 0.0)
                .filter_map(|r| {
                    r.ipr.map(|c| ScalingPoint {
                        eps_tilde: rescaled_strength(r.epsilon, &params),
                        delta_kc: reference_kc - c.k_c,
                    })
                })
                .collect()
        }
    };
    let fit = fit_scaling(&points)?;
    out.write_with("scaling.csv", |w| fit.write_csv(w))?;
    out.write_with("fit.json", |w| {
        serde_json::to_writer_pretty(&mut *w, &fit)?;
        writeln!(w)?;
        Ok(())
    })?;
    if config.points.is_some() {
        write_metadata(out, &base_metadata(config, &[]))?;
    }
    Ok(())
}
