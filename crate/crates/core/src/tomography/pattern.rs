//! Pattern functions `f_nm(q) = d/dq [psi_lo(q) phi_hi(q)]` with
//! `lo = min(n, m)` and `hi = max(n, m)`.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::sync::OnceLock;

use super::wavefunction::{irregular_with_derivatives_scaled, regular_with_derivatives};
use crate::error::{Error, Result};

/// Largest truncation accepted by [`PatternTable::new`].
pub const MAX_PATTERN_MODES: usize = 12;

/// Seed scale of the irregular wavefunctions, chosen so that
/// `integral f_00 psi_0^2 dq = 1`. Evaluated once by Simpson's rule on a fine
/// grid.
pub fn irregular_scale() -> f64 {
    static SCALE: OnceLock<f64> = OnceLock::new();
    *SCALE.get_or_init(|| 1.0 / ground_calibration_integral(1.0))
}

fn ground_calibration_integral(scale: f64) -> f64 {
    let (a, b, n) = (-12.0f64, 12.0f64, 24_000usize);
    let h = (b - a) / n as f64;
    let integrand = |q: f64| {
        let (psi, dpsi) = regular_with_derivatives(1, q);
        let (phi, dphi) = irregular_with_derivatives_scaled(1, q, scale);
        (dpsi[0] * phi[0] + psi[0] * dphi[0]) * psi[0] * psi[0]
    };
    let mut s = integrand(a) + integrand(b);
    for k in 1..n {
        s += integrand(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// All `f_nm(q)` for `n, m < n_max`, row-major.
pub fn pattern_functions_at(n_max: usize, q: f64) -> Vec<f64> {
    let (psi, dpsi) = regular_with_derivatives(n_max, q);
    let (phi, dphi) = irregular_with_derivatives_scaled(n_max, q, irregular_scale());
    let mut out = vec![0.0; n_max * n_max];
    for n in 0..n_max {
        for m in n..n_max {
            let f = dpsi[n] * phi[m] + psi[n] * dphi[m];
            out[n * n_max + m] = f;
            out[m * n_max + n] = f;
        }
    }
    out
}

pub fn pattern_function(n: usize, m: usize, q: f64) -> f64 {
    let n_max = n.max(m) + 1;
    pattern_functions_at(n_max, q)[n * n_max + m]
}

/// Pattern functions tabulated on a quadrature grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatternTable {
    pub n_max: usize,
    pub q_grid: Vec<f64>,
    /// `values[(n * n_max + m) * q_grid.len() + i] = f_nm(q_grid[i])`.
    values: Vec<f64>,
}

impl PatternTable {
    pub fn new(n_max: usize, q_grid: &[f64]) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::invalid("n_max", "need at least one mode"));
        }
        if n_max > MAX_PATTERN_MODES {
            return Err(Error::TruncationTooLarge { requested: n_max, limit: MAX_PATTERN_MODES });
        }
        let len = q_grid.len();
        let mut values = vec![0.0; n_max * n_max * len];
        for (i, &q) in q_grid.iter().enumerate() {
            for (nm, f) in pattern_functions_at(n_max, q).into_iter().enumerate() {
                values[nm * len + i] = f;
            }
        }
        Ok(Self { n_max, q_grid: q_grid.to_vec(), values })
    }

    /// `f_nm` on the grid.
    pub fn row(&self, n: usize, m: usize) -> &[f64] {
        let len = self.q_grid.len();
        let start = (n * self.n_max + m) * len;
        &self.values[start..start + len]
    }

    /// CSV with columns `q,n,m,f` for inspection.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("q,n,m,f\n");
        for n in 0..self.n_max {
            for m in 0..self.n_max {
                for (q, f) in self.q_grid.iter().zip(self.row(n, m)) {
                    let _ = writeln!(out, "{q:.16e},{n},{m},{f:.16e}");
                }
            }
        }
        out
    }
}
