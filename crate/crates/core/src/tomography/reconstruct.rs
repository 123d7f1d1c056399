//! Linear inversion of phase-swept quadrature densities.
//!
//! `rho_nm = (1/pi) integral_0^pi dtheta e^{i(n-m) theta} integral dq p_theta(q) f_nm(q)`,
//! evaluated with composite trapezoid rules in both variables.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

use super::density::{DensityMatrix, ReconstructionMeta};
use super::oracle::quadrature_density;
use super::pattern::{pattern_functions_at, PatternTable, MAX_PATTERN_MODES};
use crate::empirics::{trapezoid_weights, DensityEstimate, HistogramSpec, QuadratureDataset, ThetaSweep};
use crate::error::{Error, Result};

pub(crate) fn require_half_turn(sweep: &ThetaSweep) -> Result<()> {
    if sweep.covers_half_turn() {
        Ok(())
    } else {
        Err(Error::SweepIncomplete {
            first: sweep.theta_values.first().copied().unwrap_or(f64::NAN),
            last: sweep.theta_values.last().copied().unwrap_or(f64::NAN),
        })
    }
}

fn meta_for(dataset: &QuadratureDataset, method: &str) -> ReconstructionMeta {
    ReconstructionMeta {
        method: method.into(),
        params: dataset.params,
        total_samples: dataset.sample_count(),
        theta_count: dataset.sweep.len(),
        theta_first: dataset.sweep.theta_values.first().copied().unwrap_or(0.0),
        theta_last: dataset.sweep.theta_values.last().copied().unwrap_or(0.0),
        grid: Some(dataset.grid),
        warnings: Vec::new(),
    }
}

/// Accumulate `(1/pi) sum_j w_j e^{i(n-m) theta_j} g_j(n, m)` into a matrix
/// and finish it: Hermitian part, unit trace, diagonal check.
fn assemble(
    n_max: usize,
    sweep: &ThetaSweep,
    per_theta: Vec<Vec<f64>>,
    meta: ReconstructionMeta,
) -> DensityMatrix {
    let weights = sweep.trapezoid_weights();
    let mut rho = DensityMatrix::zeros(n_max);
    for n in 0..n_max {
        for m in 0..n_max {
            let d = n as f64 - m as f64;
            let mut acc = Complex64::new(0.0, 0.0);
            for ((&theta, &w), g) in sweep.theta_values.iter().zip(&weights).zip(&per_theta) {
                acc += Complex64::from_polar(w * g[n * n_max + m], d * theta);
            }
            rho.set(n, m, acc / PI);
        }
    }
    rho.meta = meta;
    rho.hermitize();
    rho.normalize_trace();
    rho.check_diagonal();
    rho
}

/// Histogram-integral reconstruction.
pub fn reconstruct(dataset: &QuadratureDataset, patterns: &PatternTable) -> Result<DensityMatrix> {
    let centers = dataset.grid.centers();
    if centers.len() != patterns.q_grid.len()
        || centers.iter().zip(&patterns.q_grid).any(|(a, b)| (a - b).abs() > 1e-12)
    {
        return Err(Error::GridMismatch(format!(
            "dataset has {} bins on [{}, {}], table has {} points",
            centers.len(),
            dataset.grid.q_min,
            dataset.grid.q_max,
            patterns.q_grid.len()
        )));
    }
    require_half_turn(&dataset.sweep)?;
    let n_max = patterns.n_max;
    let qw: Vec<f64> = trapezoid_weights(&centers);
    let per_theta: Vec<Vec<f64>> = dataset
        .estimates
        .par_iter()
        .map(|est| {
            let weighted: Vec<f64> = est.density.iter().zip(&qw).map(|(p, w)| p * w).collect();
            let mut g = vec![0.0; n_max * n_max];
            for n in 0..n_max {
                for m in 0..n_max {
                    g[n * n_max + m] = patterns.row(n, m).iter().zip(&weighted).map(|(f, p)| f * p).sum();
                }
            }
            g
        })
        .collect();
    let mut meta = meta_for(dataset, "histogram-integral");
    if dataset.flagged() {
        meta.warnings.push("some phases lost more than 0.1% of samples outside the q grid".into());
    }
    Ok(assemble(n_max, &dataset.sweep, per_theta, meta))
}

/// Sample-mean estimator: pattern functions averaged over the raw samples at
/// each phase, with the same phase weighting as [`reconstruct`].
pub fn reconstruct_direct(dataset: &QuadratureDataset, n_max: usize) -> Result<DensityMatrix> {
    if n_max == 0 || n_max > MAX_PATTERN_MODES {
        return Err(Error::TruncationTooLarge { requested: n_max, limit: MAX_PATTERN_MODES });
    }
    let samples = dataset
        .samples
        .as_ref()
        .ok_or_else(|| Error::invalid("dataset", "raw samples are required for the sample-mean estimator"))?;
    require_half_turn(&dataset.sweep)?;
    let per_theta: Vec<Vec<f64>> = samples
        .par_iter()
        .map(|qs| {
            let mut g = vec![0.0; n_max * n_max];
            for &q in qs {
                for (acc, f) in g.iter_mut().zip(pattern_functions_at(n_max, q)) {
                    *acc += f;
                }
            }
            let inv = 1.0 / qs.len().max(1) as f64;
            g.iter_mut().for_each(|x| *x *= inv);
            g
        })
        .collect();
    Ok(assemble(n_max, &dataset.sweep, per_theta, meta_for(dataset, "sample-mean")))
}

/// Noise-free dataset whose densities are the exact quadrature distributions
/// of `rho` at the bin centers.
pub fn synthetic_dataset(rho: &DensityMatrix, sweep: &ThetaSweep, grid: &HistogramSpec) -> QuadratureDataset {
    let centers = grid.centers();
    let estimates = sweep
        .theta_values
        .iter()
        .map(|&theta| DensityEstimate {
            counts: vec![0; grid.bins],
            density: centers.iter().map(|&q| quadrature_density(rho, theta, q)).collect(),
            n: 0,
            out_of_range: 0,
            flagged: false,
        })
        .collect();
    QuadratureDataset { sweep: sweep.clone(), grid: *grid, samples: None, estimates, params: None }
}
