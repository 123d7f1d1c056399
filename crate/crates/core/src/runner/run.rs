//! End-to-end pipeline: sample, herald, sweep, reconstruct, Wigner.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::time::Instant;

use super::config::ExperimentConfig;
use crate::empirics::{sweep_quadratures, QuadratureDataset};
use crate::error::{Error, Result};
use crate::model::{generate_ensemble_with, EnsembleOptions, HeraldedEnsemble};
use crate::tomography::{reconstruct, DensityMatrix, PatternTable};
use crate::wigner::{evaluate_grid, fidelity, spacs_state, WignerGrid};

pub const CONFIG_FILE: &str = "config.cfg";
pub const DATASET_STEM: &str = "dataset";
pub const ENSEMBLE_FILE: &str = "ensemble.json";
pub const DENSITY_FILE: &str = "density_matrix.json";
pub const WIGNER_STEM: &str = "wigner";
pub const REPORT_FILE: &str = "report.json";
pub const FAILED_MARKER: &str = "FAILED";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

/// Heralding statistics persisted next to the dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub seed: u64,
    pub total_trials: u64,
    pub accepted: usize,
    pub efficiency: f64,
}

impl From<&HeraldedEnsemble> for EnsembleSummary {
    fn from(e: &HeraldedEnsemble) -> Self {
        Self { seed: e.seed, total_trials: e.total_trials, accepted: e.accepted, efficiency: e.efficiency }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub heralding: Option<EnsembleSummary>,
    pub raw_trace: f64,
    pub diagonal: Vec<f64>,
    pub eigenvalues: Vec<f64>,
    /// Grid-level minimum.
    pub wigner_min: f64,
    pub wigner_argmin: Complex64,
    pub wigner_min_refined: f64,
    pub wigner_max: f64,
    pub wigner_argmax: Complex64,
    pub fidelity_ideal_spacs: f64,
    pub warnings: Vec<String>,
    pub timings: Vec<StageTiming>,
    pub seed: u64,
    pub version: String,
    pub output_dir: Option<PathBuf>,
}

impl RunReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        if let Some(h) = &self.heralding {
            s += &format!(
                "heralding: {} of {} trials accepted (efficiency {:.6e})\n",
                h.accepted, h.total_trials, h.efficiency
            );
        }
        s += &format!("raw trace: {:.6}\n", self.raw_trace);
        let diag: Vec<String> = self.diagonal.iter().map(|d| format!("{d:.4}")).collect();
        s += &format!("rho diagonal: [{}]\n", diag.join(", "));
        s += &format!(
            "wigner min: {:.4} at ({:.3}, {:.3}) (refined {:.4})\n",
            self.wigner_min, self.wigner_argmin.re, self.wigner_argmin.im, self.wigner_min_refined
        );
        s += &format!(
            "wigner max: {:.4} at ({:.3}, {:.3})\n",
            self.wigner_max, self.wigner_argmax.re, self.wigner_argmax.im
        );
        s += &format!("fidelity to ideal photon-added state: {:.4}\n", self.fidelity_ideal_spacs);
        for w in &self.warnings {
            s += &format!("warning: {w}\n");
        }
        for t in &self.timings {
            s += &format!("time {}: {:.2}s\n", t.stage, t.seconds);
        }
        s
    }
}

/// Everything the pipeline produced, kept in memory.
#[derive(Clone, Debug)]
pub struct PipelineOutput {
    pub ensemble: HeraldedEnsemble,
    pub dataset: QuadratureDataset,
    pub rho: DensityMatrix,
    pub wigner: WignerGrid,
    pub report: RunReport,
}

struct Timer(Vec<StageTiming>);

impl Timer {
    fn time<T>(&mut self, stage: &'static str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let out = f().map_err(|e| e.in_stage(stage));
        self.0.push(StageTiming { stage: stage.into(), seconds: start.elapsed().as_secs_f64() });
        out
    }
}

/// Tomography and Wigner stages plus the report, shared by fresh runs and
/// re-analysis of persisted data.
fn analyze(
    config: &ExperimentConfig,
    dataset: &QuadratureDataset,
    timer: &mut Timer,
) -> Result<(DensityMatrix, WignerGrid, RunReport)> {
    let rho = timer.time("tomography", || {
        let table = PatternTable::new(config.n_max, &dataset.grid.centers())?;
        reconstruct(dataset, &table)
    })?;
    let wigner = timer.time("wigner", || evaluate_grid(&rho, &config.wigner))?;
    let fid = if config.n_max >= 2 {
        fidelity(&rho, &spacs_state(config.params.alpha, config.n_max)?)?
    } else {
        f64::NAN
    };
    let report = RunReport {
        heralding: None,
        raw_trace: rho.raw_trace,
        diagonal: rho.diagonal(),
        eigenvalues: rho.eigenvalues(),
        wigner_min: wigner.min.value,
        wigner_argmin: wigner.min.location,
        wigner_min_refined: wigner.min.refined_value,
        wigner_max: wigner.max.value,
        wigner_argmax: wigner.max.location,
        fidelity_ideal_spacs: fid,
        warnings: rho.meta.warnings.clone(),
        timings: Vec::new(),
        seed: config.params.seed,
        version: env!("CARGO_PKG_VERSION").into(),
        output_dir: None,
    };
    Ok((rho, wigner, report))
}

/// Run the pipeline without touching the filesystem.
pub fn run_pipeline(config: &ExperimentConfig) -> Result<PipelineOutput> {
    run_stages(config, &mut Timer(Vec::new()))
}

fn run_stages(config: &ExperimentConfig, timer: &mut Timer) -> Result<PipelineOutput> {
    timer.time("config", || config.validate())?;
    let options = EnsembleOptions { max_trials: config.max_trials, ..Default::default() };
    let ensemble = timer.time("ensemble", || generate_ensemble_with(&config.params, &options))?;
    let dataset = timer.time("quadratures", || {
        let sweep = config.sweep.build()?;
        sweep_quadratures(&ensemble, &sweep, &config.histogram, Some(config.params))
    })?;
    let (rho, wigner, mut report) = analyze(config, &dataset, timer)?;
    report.heralding = Some(EnsembleSummary::from(&ensemble));
    if dataset.flagged() {
        report.warnings.push("quadrature samples fell outside the histogram range".into());
    }
    report.timings = timer.0.clone();
    Ok(PipelineOutput { ensemble, dataset, rho, wigner, report })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn write_artifacts(dir: &Path, out: &PipelineOutput) -> Result<()> {
    write_json(&dir.join(ENSEMBLE_FILE), &EnsembleSummary::from(&out.ensemble))?;
    out.dataset.write(dir, DATASET_STEM)?;
    out.rho.write(&dir.join(DENSITY_FILE))?;
    out.wigner.write(dir, WIGNER_STEM, out.rho.trace())?;
    Ok(())
}

fn mark_failed(dir: &Path, err: &Error) {
    let _ = std::fs::write(dir.join(FAILED_MARKER), format!("{err}\n"));
}

/// Run the full pipeline and persist every artifact in `config.output_dir`.
///
/// On failure a `FAILED` marker holding the error is written next to
/// whatever artifacts were already produced.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunReport> {
    let dir = config.output_dir.clone();
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let _ = std::fs::remove_file(dir.join(FAILED_MARKER));
    config.save(&dir.join(CONFIG_FILE))?;
    let mut timer = Timer(Vec::new());
    let result = run_stages(config, &mut timer).and_then(|out| {
        timer.time("write", || write_artifacts(&dir, &out))?;
        let mut report = out.report;
        report.timings = timer.0.clone();
        report.output_dir = Some(dir.clone());
        write_json(&dir.join(REPORT_FILE), &report)?;
        Ok(report)
    });
    if let Err(e) = &result {
        mark_failed(&dir, e);
    }
    result
}

/// Recompute the tomography and Wigner stages from a run directory's
/// persisted config and dataset.
pub fn reanalyze(dir: &Path) -> Result<RunReport> {
    let config = ExperimentConfig::load(&dir.join(CONFIG_FILE))?;
    let dataset = QuadratureDataset::read(dir, DATASET_STEM)?;
    let mut timer = Timer(Vec::new());
    let (_, _, mut report) = analyze(&config, &dataset, &mut timer)?;
    let ensemble = dir.join(ENSEMBLE_FILE);
    if let Ok(text) = std::fs::read_to_string(&ensemble) {
        report.heralding = Some(serde_json::from_str(&text)?);
    }
    report.timings = timer.0;
    report.output_dir = Some(dir.to_path_buf());
    Ok(report)
}
