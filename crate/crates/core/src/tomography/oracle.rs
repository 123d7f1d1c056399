//! Least-squares inversion of the forward map `rho -> p_theta(q)`.
//!
//! Independent of the pattern functions: it only uses the regular
//! wavefunctions, so agreement with [`super::reconstruct`] cross-checks the
//! whole pattern-function route.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::density::DensityMatrix;
use super::reconstruct::require_half_turn;
use super::wavefunction::regular_wavefunctions;
use crate::empirics::QuadratureDataset;
use crate::error::{Error, Result};

/// Condition number above which the inversion is refused.
pub const MAX_CONDITION: f64 = 1e8;

/// `p_theta(q) = sum_jk rho_jk psi_j(q) psi_k(q) e^{-i(j-k) theta}`.
pub fn quadrature_density(rho: &DensityMatrix, theta: f64, q: f64) -> f64 {
    let n = rho.n_max;
    let psi = regular_wavefunctions(n, q);
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..n {
        for k in 0..n {
            let phase = Complex64::from_polar(1.0, -(j as f64 - k as f64) * theta);
            acc += rho.get(j, k) * phase * (psi[j] * psi[k]);
        }
    }
    acc.re
}

/// Modes fitted by [`forward_map_oracle`] before the leading block is kept.
pub const FIT_MODES: usize = 16;

/// Least-squares estimate of the leading `n_max` block of `rho`, fitted in a
/// basis of `max(n_max, FIT_MODES)` modes.
///
/// Fitting only `n_max` modes would fold the population of higher modes into
/// the kept block; the pattern-function estimator is blind to them instead.
pub fn forward_map_oracle(dataset: &QuadratureDataset, n_max: usize) -> Result<DensityMatrix> {
    forward_map_fit(dataset, n_max, n_max.max(FIT_MODES))
}

/// Fit a Hermitian, unit-trace `rho` over `fit_modes` modes to every
/// histogram value of the dataset and return its leading `n_max` block,
/// renormalized to unit trace.
///
/// Unknowns are `rho_nn` for `n >= 1` (with `rho_00 = 1 - sum`) and the real
/// and imaginary parts of `rho_jk`, `j < k`.
pub fn forward_map_fit(dataset: &QuadratureDataset, n_max: usize, fit_modes: usize) -> Result<DensityMatrix> {
    if n_max == 0 {
        return Err(Error::invalid("n_max", "need at least one mode"));
    }
    if fit_modes < n_max {
        return Err(Error::invalid("fit_modes", "must be at least n_max"));
    }
    require_half_turn(&dataset.sweep)?;
    let f = fit_modes;
    let pairs: Vec<(usize, usize)> = (0..f).flat_map(|j| (j + 1..f).map(move |k| (j, k))).collect();
    let unknowns = (f - 1) + 2 * pairs.len();
    let centers = dataset.grid.centers();
    let psi: Vec<Vec<f64>> = centers.iter().map(|&q| regular_wavefunctions(f, q)).collect();

    let rows = dataset.sweep.len() * centers.len();
    let mut design = DMatrix::<f64>::zeros(rows, unknowns);
    let mut target = DVector::<f64>::zeros(rows);
    for (j_theta, (&theta, est)) in dataset.sweep.theta_values.iter().zip(&dataset.estimates).enumerate() {
        for (i, p) in psi.iter().enumerate() {
            let row = j_theta * centers.len() + i;
            target[row] = est.density[i] - p[0] * p[0];
            for n in 1..f {
                design[(row, n - 1)] = p[n] * p[n] - p[0] * p[0];
            }
            for (idx, &(j, k)) in pairs.iter().enumerate() {
                let d = j as f64 - k as f64;
                let amp = 2.0 * p[j] * p[k];
                design[(row, f - 1 + 2 * idx)] = amp * (d * theta).cos();
                design[(row, f + 2 * idx)] = amp * (d * theta).sin();
            }
        }
    }

    let mut full = DensityMatrix::zeros(f);
    if unknowns > 0 {
        let svd = design.svd(true, true);
        let max = svd.singular_values.max();
        let min = svd.singular_values.min();
        let condition = if min > 0.0 { max / min } else { f64::INFINITY };
        if condition > MAX_CONDITION {
            return Err(Error::IllConditioned(condition));
        }
        let x = svd.solve(&target, 0.0).map_err(|e| Error::invalid("design matrix", e.to_string()))?;
        let mut rest = 0.0;
        for n in 1..f {
            full.set(n, n, Complex64::new(x[n - 1], 0.0));
            rest += x[n - 1];
        }
        full.set(0, 0, Complex64::new(1.0 - rest, 0.0));
        for (idx, &(j, k)) in pairs.iter().enumerate() {
            let v = Complex64::new(x[f - 1 + 2 * idx], x[f + 2 * idx]);
            full.set(j, k, v);
            full.set(k, j, v.conj());
        }
    } else {
        full.set(0, 0, Complex64::new(1.0, 0.0));
    }
    let mut rho = DensityMatrix::from_fn(n_max, |j, k| full.get(j, k));
    rho.meta.method = format!("forward-map least squares ({f} fitted modes)");
    rho.meta.params = dataset.params;
    rho.meta.total_samples = dataset.sample_count();
    rho.meta.theta_count = dataset.sweep.len();
    rho.meta.grid = Some(dataset.grid);
    rho.normalize_trace();
    rho.check_diagonal();
    Ok(rho)
}
