//! Wigner function of a truncated density matrix in the Laguerre basis.
//!
//! Phase-space convention: `alpha = (x + i p) / sqrt(2)` where `x` is the
//! quadrature at phase 0 and `p` the one at phase pi/2, both in the units of
//! [`crate::model::quadrature`]. With this scaling the vacuum is
//! `W = (2/pi) exp(-2|alpha|^2)`, `integral W d^2 alpha = 1`, and the phase-0
//! quadrature density is `p_0(q) = (1/sqrt(2)) integral W(q/sqrt(2) + i y) dy`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_2_PI, SQRT_2};
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::special::{factorial, laguerre};
use crate::tomography::DensityMatrix;

/// Wigner function of the operator `|n><m|` at `alpha`.
///
/// For `n >= m`:
/// `(2/pi) (-1)^m sqrt(m!/n!) (2 conj(alpha))^(n-m) exp(-2|alpha|^2) L_m^(n-m)(4|alpha|^2)`,
/// and `W_nm = conj(W_mn)` otherwise.
pub fn wigner_basis(n: usize, m: usize, alpha: Complex64) -> Complex64 {
    if n < m {
        return wigner_basis(m, n, alpha).conj();
    }
    let r2 = alpha.norm_sqr();
    let k = n - m;
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    let radial = FRAC_2_PI * sign * (factorial(m) / factorial(n)).sqrt() * (-2.0 * r2).exp()
        * laguerre(m, k as f64, 4.0 * r2);
    (alpha.conj() * 2.0).powu(k as u32) * radial
}

/// Full complex double sum `sum_nm rho_nm W_nm(alpha)`.
pub fn wigner_value_complex(rho: &DensityMatrix, alpha: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for n in 0..rho.n_max {
        for m in 0..rho.n_max {
            acc += rho.get(n, m) * wigner_basis(n, m, alpha);
        }
    }
    acc
}

/// Real Wigner value: diagonal terms plus `2 Re[rho_nm W_nm]` for `n > m`.
pub fn wigner_value(rho: &DensityMatrix, alpha: Complex64) -> f64 {
    let mut acc = 0.0;
    for n in 0..rho.n_max {
        acc += rho.get(n, n).re * wigner_basis(n, n, alpha).re;
        for m in 0..n {
            acc += 2.0 * (rho.get(n, m) * wigner_basis(n, m, alpha)).re;
        }
    }
    acc
}

/// Rectangular grid over `Re alpha` and `Im alpha`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WignerGridSpec {
    pub re_min: f64,
    pub re_max: f64,
    pub re_points: usize,
    pub im_min: f64,
    pub im_max: f64,
    pub im_points: usize,
}

impl Default for WignerGridSpec {
    fn default() -> Self {
        Self::square(4.0, 161)
    }
}

impl WignerGridSpec {
    pub fn square(half_width: f64, points: usize) -> Self {
        Self {
            re_min: -half_width,
            re_max: half_width,
            re_points: points,
            im_min: -half_width,
            im_max: half_width,
            im_points: points,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.re_points < 2 || self.im_points < 2 {
            return Err(Error::invalid("grid", "need at least 2 points per axis"));
        }
        if !(self.re_max > self.re_min && self.im_max > self.im_min) {
            return Err(Error::invalid("grid", "axis bounds must be increasing"));
        }
        Ok(())
    }

    fn axis(min: f64, max: f64, points: usize) -> Vec<f64> {
        (0..points).map(|k| min + (max - min) * k as f64 / (points - 1) as f64).collect()
    }

    pub fn re_axis(&self) -> Vec<f64> {
        Self::axis(self.re_min, self.re_max, self.re_points)
    }

    pub fn im_axis(&self) -> Vec<f64> {
        Self::axis(self.im_min, self.im_max, self.im_points)
    }
}

/// Located extremum, on the grid and after a local quadratic refinement.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub value: f64,
    pub location: Complex64,
    pub refined_value: f64,
    pub refined_location: Complex64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WignerGrid {
    pub spec: WignerGridSpec,
    pub re_axis: Vec<f64>,
    pub im_axis: Vec<f64>,
    /// `values[iy * re_axis.len() + ix]`.
    pub values: Vec<f64>,
    pub min: Extremum,
    pub max: Extremum,
    /// Largest `|Im W|` of the full complex double sum over the grid.
    pub imag_residue: f64,
}

impl WignerGrid {
    pub fn value(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.re_axis.len() + ix]
    }

    pub fn cell_area(&self) -> f64 {
        (self.re_axis[1] - self.re_axis[0]) * (self.im_axis[1] - self.im_axis[0])
    }

    /// `dx dy sum W`, which approximates the trace of the state.
    pub fn integral(&self) -> f64 {
        self.cell_area() * self.values.iter().sum::<f64>()
    }

    /// CSV with columns `x,y,W` (`alpha = x + i y`).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,W\n");
        for (iy, y) in self.im_axis.iter().enumerate() {
            for (ix, x) in self.re_axis.iter().enumerate() {
                let _ = writeln!(out, "{x:.16e},{y:.16e},{:.16e}", self.value(ix, iy));
            }
        }
        out
    }

    pub fn summary(&self, trace: f64) -> WignerSummary {
        WignerSummary {
            spec: self.spec,
            min: self.min,
            max: self.max,
            integral: self.integral(),
            trace,
            imag_residue: self.imag_residue,
        }
    }

    pub fn write(&self, dir: &Path, stem: &str, trace: f64) -> Result<()> {
        let csv = dir.join(format!("{stem}.csv"));
        std::fs::write(&csv, self.to_csv()).map_err(|e| Error::io(&csv, e))?;
        let json = dir.join(format!("{stem}.json"));
        let text = serde_json::to_string_pretty(&self.summary(trace))?;
        std::fs::write(&json, text).map_err(|e| Error::io(&json, e))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WignerSummary {
    pub spec: WignerGridSpec,
    pub min: Extremum,
    pub max: Extremum,
    pub integral: f64,
    pub trace: f64,
    pub imag_residue: f64,
}

pub fn evaluate_grid(rho: &DensityMatrix, spec: &WignerGridSpec) -> Result<WignerGrid> {
    spec.validate()?;
    let re_axis = spec.re_axis();
    let im_axis = spec.im_axis();
    let rows: Vec<(Vec<f64>, f64)> = im_axis
        .par_iter()
        .map(|&y| {
            let mut residue = 0.0f64;
            let row = re_axis
                .iter()
                .map(|&x| {
                    let alpha = Complex64::new(x, y);
                    residue = residue.max(wigner_value_complex(rho, alpha).im.abs());
                    wigner_value(rho, alpha)
                })
                .collect();
            (row, residue)
        })
        .collect();
    let imag_residue = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let values: Vec<f64> = rows.into_iter().flat_map(|r| r.0).collect();
    let nx = re_axis.len();
    let argmin = (0..values.len()).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap_or(0);
    let argmax = (0..values.len()).max_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap_or(0);
    let min = refine(&values, &re_axis, &im_axis, argmin % nx, argmin / nx);
    let max = refine(&values, &re_axis, &im_axis, argmax % nx, argmax / nx);
    Ok(WignerGrid { spec: *spec, re_axis, im_axis, values, min, max, imag_residue })
}

/// Separable parabola through the 3x3 neighbourhood of a grid extremum.
fn refine(values: &[f64], re: &[f64], im: &[f64], ix: usize, iy: usize) -> Extremum {
    let nx = re.len();
    let at = |i: usize, j: usize| values[j * nx + i];
    let f0 = at(ix, iy);
    let axis_fit = |lo: Option<f64>, hi: Option<f64>, h: f64| -> (f64, f64) {
        match (lo, hi) {
            (Some(fm), Some(fp)) => {
                let curv = fm - 2.0 * f0 + fp;
                if curv == 0.0 {
                    return (0.0, 0.0);
                }
                let t = (0.5 * (fm - fp) / curv).clamp(-1.0, 1.0);
                // Change of the fitted parabola from the centre value.
                (t * h, 0.5 * (fp - fm) * t + 0.5 * curv * t * t)
            }
            _ => (0.0, 0.0),
        }
    };
    let hx = re[1] - re[0];
    let hy = im[1] - im[0];
    let (dx, vx) = axis_fit(
        ix.checked_sub(1).map(|i| at(i, iy)),
        (ix + 1 < nx).then(|| at(ix + 1, iy)),
        hx,
    );
    let (dy, vy) = axis_fit(
        iy.checked_sub(1).map(|j| at(ix, j)),
        (iy + 1 < im.len()).then(|| at(ix, iy + 1)),
        hy,
    );
    Extremum {
        value: f0,
        location: Complex64::new(re[ix], im[iy]),
        refined_value: f0 + vx + vy,
        refined_location: Complex64::new(re[ix] + dx, im[iy] + dy),
    }
}

/// Truncated coherent-state amplitudes `exp(-|a|^2/2) a^n / sqrt(n!)`.
pub fn coherent_state(alpha: Complex64, n_max: usize) -> Vec<Complex64> {
    let norm = (-0.5 * alpha.norm_sqr()).exp();
    (0..n_max).map(|n| alpha.powu(n as u32) * (norm / factorial(n).sqrt())).collect()
}

/// Photon-added coherent state `a^dagger |alpha>`, truncated to `n_max` modes
/// and renormalized. Amplitudes are proportional to
/// `sqrt(n) alpha^(n-1) / sqrt((n-1)!)` for `n >= 1`.
pub fn spacs_state(alpha: Complex64, n_max: usize) -> Result<Vec<Complex64>> {
    if n_max < 2 {
        return Err(Error::invalid("n_max", "photon-added state needs at least 2 modes"));
    }
    let mut v: Vec<Complex64> = (0..n_max)
        .map(|n| {
            if n == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                alpha.powu(n as u32 - 1) * ((n as f64).sqrt() / factorial(n - 1).sqrt())
            }
        })
        .collect();
    let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|c| *c /= norm);
    Ok(v)
}

pub fn ideal_spacs(alpha: Complex64, n_max: usize) -> Result<DensityMatrix> {
    let mut rho = DensityMatrix::pure(&spacs_state(alpha, n_max)?);
    rho.meta.method = "ideal photon-added coherent state".into();
    Ok(rho)
}

/// `<psi|rho|psi>` for a normalized pure reference. Not clipped: a
/// non-positive tomographic `rho` can give values outside `[0, 1]`.
pub fn fidelity(rho: &DensityMatrix, reference: &[Complex64]) -> Result<f64> {
    if reference.len() != rho.n_max {
        return Err(Error::invalid("reference", "truncation differs from the density matrix"));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for n in 0..rho.n_max {
        for m in 0..rho.n_max {
            acc += reference[n].conj() * rho.get(n, m) * reference[m];
        }
    }
    Ok(acc.re)
}

/// Phase-0 quadrature density implied by the Wigner function,
/// `(1/sqrt(2)) integral W(q/sqrt(2) + i y) dy`, by the trapezoid rule on
/// `[-half_width, half_width]`.
pub fn wigner_marginal(rho: &DensityMatrix, q: f64, half_width: f64, points: usize) -> f64 {
    let h = 2.0 * half_width / (points - 1) as f64;
    let x = q / SQRT_2;
    let mut s = 0.0;
    for k in 0..points {
        let y = -half_width + k as f64 * h;
        let w = if k == 0 || k == points - 1 { 0.5 } else { 1.0 };
        s += w * wigner_value(rho, Complex64::new(x, y));
    }
    s * h / SQRT_2
}
