//! Phase-swept quadrature data and per-phase histogram densities.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{quadrature, HeraldedEnsemble, ModelParams};

/// Out-of-range fraction above which a histogram is flagged.
pub const DEFAULT_WARN_FRACTION: f64 = 1e-3;
/// Out-of-range fraction above which a histogram is rejected.
pub const MAX_OUT_OF_RANGE_FRACTION: f64 = 0.05;

/// Ordered homodyne phases in radians, starting at 0 and covering `[0, pi]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaSweep {
    pub theta_values: Vec<f64>,
    pub step: f64,
}

impl ThetaSweep {
    /// `0, step, 2 step, ...` up to and including `stop_deg`.
    pub fn from_degrees(stop_deg: f64, step_deg: f64) -> Result<Self> {
        if !(step_deg.is_finite() && step_deg > 0.0) {
            return Err(Error::invalid("theta_step_deg", format!("must be > 0, got {step_deg}")));
        }
        if !(stop_deg.is_finite() && stop_deg >= 0.0) {
            return Err(Error::invalid("theta_stop_deg", format!("must be >= 0, got {stop_deg}")));
        }
        let count = (stop_deg / step_deg + 1e-9).floor() as usize + 1;
        let theta_values = (0..count).map(|k| (k as f64 * step_deg).to_radians()).collect();
        let sweep = Self { theta_values, step: step_deg.to_radians() };
        sweep.validate()?;
        Ok(sweep)
    }

    /// The 181-point, 1 degree sweep over `[0, 180]` degrees.
    pub fn half_turn_degrees() -> Self {
        Self::from_degrees(180.0, 1.0).expect("valid default sweep")
    }

    pub fn len(&self) -> usize {
        self.theta_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta_values.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let t = &self.theta_values;
        if t.is_empty() {
            return Err(Error::invalid("theta_sweep", "empty"));
        }
        if t[0] != 0.0 {
            return Err(Error::invalid("theta_sweep", "must start at 0"));
        }
        if t.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("theta_sweep", "must be strictly increasing"));
        }
        if t.iter().any(|&x| x >= PI + self.step / 2.0) {
            return Err(Error::invalid("theta_sweep", "phases must lie below pi + step/2"));
        }
        Ok(())
    }

    /// Whether the sweep reaches both ends of `[0, pi]`.
    pub fn covers_half_turn(&self) -> bool {
        match (self.theta_values.first(), self.theta_values.last()) {
            (Some(&first), Some(&last)) => first.abs() < 1e-12 && last >= PI - 1e-9,
            _ => false,
        }
    }

    /// Composite trapezoid weights over the sweep.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        trapezoid_weights(&self.theta_values)
    }
}

/// Trapezoid weights for a (possibly non-uniform) increasing abscissa.
pub fn trapezoid_weights(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut w = vec![0.0; n];
    for k in 0..n.saturating_sub(1) {
        let h = 0.5 * (x[k + 1] - x[k]);
        w[k] += h;
        w[k + 1] += h;
    }
    w
}

/// Uniform histogram grid over `[q_min, q_max]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramSpec {
    pub q_min: f64,
    pub q_max: f64,
    pub bins: usize,
}

impl Default for HistogramSpec {
    fn default() -> Self {
        Self { q_min: -8.0, q_max: 8.0, bins: 201 }
    }
}

impl HistogramSpec {
    pub fn validate(&self) -> Result<()> {
        if self.bins == 0 {
            return Err(Error::invalid("bins", "need at least one bin"));
        }
        if !(self.q_min.is_finite() && self.q_max.is_finite() && self.q_max > self.q_min) {
            return Err(Error::invalid("q_range", format!("need q_min < q_max, got [{}, {}]", self.q_min, self.q_max)));
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        (self.q_max - self.q_min) / self.bins as f64
    }

    pub fn edges(&self) -> Vec<f64> {
        let span = self.q_max - self.q_min;
        (0..=self.bins)
            .map(|i| self.q_min + span * i as f64 / self.bins as f64)
            .collect()
    }

    pub fn centers(&self) -> Vec<f64> {
        let span = self.q_max - self.q_min;
        (0..self.bins)
            .map(|i| self.q_min + span * (i as f64 + 0.5) / self.bins as f64)
            .collect()
    }

    /// Bin holding `q`, with `q_max` itself in the last bin.
    pub fn bin_of(&self, q: f64) -> Option<usize> {
        if !(q >= self.q_min && q <= self.q_max) {
            return None;
        }
        let idx = ((q - self.q_min) / self.width()).floor() as usize;
        Some(idx.min(self.bins - 1))
    }

    /// Rebuild a spec from explicit edges, which must be uniform.
    pub fn from_edges(edges: &[f64]) -> Result<Self> {
        if edges.len() < 2 {
            return Err(Error::invalid("bin_edges", "need at least two edges"));
        }
        let spec = Self { q_min: edges[0], q_max: edges[edges.len() - 1], bins: edges.len() - 1 };
        spec.validate()?;
        let dq = spec.width();
        for (i, e) in edges.iter().enumerate() {
            if (e - (spec.q_min + dq * i as f64)).abs() > 1e-9 * dq {
                return Err(Error::invalid("bin_edges", "edges must be uniform"));
            }
        }
        Ok(spec)
    }
}

/// Histogram density estimate for one phase.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub counts: Vec<u64>,
    /// `counts / (n * dq)`.
    pub density: Vec<f64>,
    pub n: usize,
    pub out_of_range: usize,
    /// Set when more than the warning fraction fell outside the grid, or `n = 0`.
    pub flagged: bool,
}

impl DensityEstimate {
    pub fn out_of_range_fraction(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.out_of_range as f64 / self.n as f64
        }
    }
}

/// Plain histogram estimate of a density.
///
/// Empty input yields an all-zero density with `flagged` set.
pub fn estimate_density(samples: &[f64], grid: &HistogramSpec) -> Result<DensityEstimate> {
    estimate_density_with(samples, grid, DEFAULT_WARN_FRACTION)
}

pub fn estimate_density_with(
    samples: &[f64],
    grid: &HistogramSpec,
    warn_fraction: f64,
) -> Result<DensityEstimate> {
    grid.validate()?;
    let mut counts = vec![0u64; grid.bins];
    let mut out_of_range = 0usize;
    for &q in samples {
        match grid.bin_of(q) {
            Some(i) => counts[i] += 1,
            None => out_of_range += 1,
        }
    }
    let n = samples.len();
    if n == 0 {
        return Ok(DensityEstimate {
            density: vec![0.0; grid.bins],
            counts,
            n,
            out_of_range,
            flagged: true,
        });
    }
    let fraction = out_of_range as f64 / n as f64;
    if fraction > MAX_OUT_OF_RANGE_FRACTION {
        return Err(Error::GridTooNarrow { fraction, q_min: grid.q_min, q_max: grid.q_max });
    }
    let norm = 1.0 / (n as f64 * grid.width());
    let density = counts.iter().map(|&c| c as f64 * norm).collect();
    Ok(DensityEstimate { counts, density, n, out_of_range, flagged: fraction > warn_fraction })
}

/// Quadrature samples and their histogram densities at every phase of a sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureDataset {
    pub sweep: ThetaSweep,
    pub grid: HistogramSpec,
    /// Raw samples per phase; `None` for datasets loaded from disk.
    pub samples: Option<Vec<Vec<f64>>>,
    pub estimates: Vec<DensityEstimate>,
    pub params: Option<ModelParams>,
}

impl QuadratureDataset {
    /// Build from raw samples, one vector per phase.
    pub fn from_samples(
        sweep: ThetaSweep,
        grid: HistogramSpec,
        samples: Vec<Vec<f64>>,
        params: Option<ModelParams>,
    ) -> Result<Self> {
        sweep.validate()?;
        if samples.len() != sweep.len() {
            return Err(Error::invalid("samples", "one sample vector per phase required"));
        }
        let estimates = samples
            .par_iter()
            .map(|s| estimate_density(s, &grid))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { sweep, grid, samples: Some(samples), estimates, params })
    }

    pub fn density(&self, theta_index: usize) -> &[f64] {
        &self.estimates[theta_index].density
    }

    pub fn sample_count(&self) -> usize {
        self.estimates.iter().map(|e| e.n).sum()
    }

    /// Whether any phase exceeded the out-of-range warning fraction.
    pub fn flagged(&self) -> bool {
        self.estimates.iter().any(|e| e.flagged)
    }

    /// Keep only the phases for which `keep(theta)` holds.
    pub fn restrict_phases(&self, keep: impl Fn(f64) -> bool) -> Self {
        let idx: Vec<usize> = (0..self.sweep.len()).filter(|&j| keep(self.sweep.theta_values[j])).collect();
        Self {
            sweep: ThetaSweep {
                theta_values: idx.iter().map(|&j| self.sweep.theta_values[j]).collect(),
                step: self.sweep.step,
            },
            grid: self.grid,
            samples: self.samples.as_ref().map(|s| idx.iter().map(|&j| s[j].clone()).collect()),
            estimates: idx.iter().map(|&j| self.estimates[j].clone()).collect(),
            params: self.params,
        }
    }

    /// CSV with columns `theta_deg,q_bin_center,density`, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let centers = self.grid.centers();
        let mut out = String::from("theta_deg,q_bin_center,density\n");
        for (theta, est) in self.sweep.theta_values.iter().zip(&self.estimates) {
            let deg = theta.to_degrees();
            for (q, p) in centers.iter().zip(&est.density) {
                let _ = writeln!(out, "{deg:.16e},{q:.16e},{p:.16e}");
            }
        }
        out
    }

    pub fn sidecar(&self) -> DatasetSidecar {
        DatasetSidecar {
            params: self.params,
            theta_values: self.sweep.theta_values.clone(),
            theta_step: self.sweep.step,
            bin_edges: self.grid.edges(),
            counts: self.estimates.iter().map(|e| e.counts.clone()).collect(),
            sample_counts: self.estimates.iter().map(|e| e.n).collect(),
            out_of_range: self.estimates.iter().map(|e| e.out_of_range).collect(),
            flagged: self.estimates.iter().map(|e| e.flagged).collect(),
        }
    }

    /// Write `<stem>.csv` and `<stem>.json` into `dir`.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<()> {
        let csv = dir.join(format!("{stem}.csv"));
        std::fs::write(&csv, self.to_csv()).map_err(|e| Error::io(&csv, e))?;
        let json = dir.join(format!("{stem}.json"));
        let text = serde_json::to_string_pretty(&self.sidecar())?;
        std::fs::write(&json, text).map_err(|e| Error::io(&json, e))?;
        Ok(())
    }

    pub fn read(dir: &Path, stem: &str) -> Result<Self> {
        let csv_path = dir.join(format!("{stem}.csv"));
        let json_path = dir.join(format!("{stem}.json"));
        let csv = std::fs::read_to_string(&csv_path).map_err(|e| Error::io(&csv_path, e))?;
        let json = std::fs::read_to_string(&json_path).map_err(|e| Error::io(&json_path, e))?;
        let sidecar: DatasetSidecar = serde_json::from_str(&json)?;
        Self::from_parts(&csv, sidecar)
    }

    pub fn from_parts(csv: &str, sidecar: DatasetSidecar) -> Result<Self> {
        let grid = HistogramSpec::from_edges(&sidecar.bin_edges)?;
        let sweep = ThetaSweep { theta_values: sidecar.theta_values, step: sidecar.theta_step };
        sweep.validate()?;
        let rows = sweep.len() * grid.bins;
        let mut density = Vec::with_capacity(rows);
        for (line_no, line) in csv.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(Error::parse("dataset csv", format!("line {}: expected 3 columns", line_no + 1)));
            }
            let p: f64 = fields[2]
                .trim()
                .parse()
                .map_err(|e| Error::parse("dataset csv", format!("line {}: {e}", line_no + 1)))?;
            density.push(p);
        }
        let consistent = density.len() == rows
            && sidecar.counts.len() == sweep.len()
            && sidecar.sample_counts.len() == sweep.len()
            && sidecar.out_of_range.len() == sweep.len()
            && sidecar.flagged.len() == sweep.len()
            && sidecar.counts.iter().all(|c| c.len() == grid.bins);
        if !consistent {
            return Err(Error::parse("dataset", "csv rows and sidecar shapes disagree"));
        }
        let estimates = density
            .chunks(grid.bins)
            .enumerate()
            .map(|(j, d)| DensityEstimate {
                counts: sidecar.counts[j].clone(),
                density: d.to_vec(),
                n: sidecar.sample_counts[j],
                out_of_range: sidecar.out_of_range[j],
                flagged: sidecar.flagged[j],
            })
            .collect();
        Ok(Self { sweep, grid, samples: None, estimates, params: sidecar.params })
    }
}

/// JSON companion of the dataset CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetSidecar {
    pub params: Option<ModelParams>,
    pub theta_values: Vec<f64>,
    pub theta_step: f64,
    pub bin_edges: Vec<f64>,
    pub counts: Vec<Vec<u64>>,
    pub sample_counts: Vec<usize>,
    pub out_of_range: Vec<usize>,
    pub flagged: Vec<bool>,
}

/// Quadratures of the whole heralded ensemble at every phase of the sweep.
///
/// The same conditioned ensemble is reused for every phase.
pub fn sweep_quadratures(
    ensemble: &HeraldedEnsemble,
    sweep: &ThetaSweep,
    grid: &HistogramSpec,
    params: Option<ModelParams>,
) -> Result<QuadratureDataset> {
    if ensemble.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let samples: Vec<Vec<f64>> = sweep
        .theta_values
        .par_iter()
        .map(|&theta| ensemble.c_s.iter().map(|&c| quadrature(c, theta)).collect())
        .collect();
    QuadratureDataset::from_samples(sweep.clone(), *grid, samples, params)
}
