use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::empirics::HistogramSpec;
use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Diagonal entries below this are reported as warnings.
pub const NEGATIVE_DIAGONAL_TOLERANCE: f64 = -0.02;

/// Where a density matrix came from.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionMeta {
    pub method: String,
    pub params: Option<ModelParams>,
    pub total_samples: usize,
    pub theta_count: usize,
    pub theta_first: f64,
    pub theta_last: f64,
    pub grid: Option<HistogramSpec>,
    pub warnings: Vec<String>,
}

/// Truncated Fock-basis density matrix `rho_nm = <n|rho|m>`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix {
    pub n_max: usize,
    /// Row-major `n_max x n_max`.
    entries: Vec<Complex64>,
    /// Trace before normalization.
    pub raw_trace: f64,
    pub meta: ReconstructionMeta,
}

impl DensityMatrix {
    pub fn zeros(n_max: usize) -> Self {
        Self {
            n_max,
            entries: vec![Complex64::new(0.0, 0.0); n_max * n_max],
            raw_trace: 0.0,
            meta: ReconstructionMeta::default(),
        }
    }

    /// `|psi><psi|` for a normalized state vector.
    pub fn pure(state: &[Complex64]) -> Self {
        let n = state.len();
        let mut rho = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                rho.entries[i * n + j] = state[i] * state[j].conj();
            }
        }
        rho.raw_trace = rho.trace();
        rho.meta.method = "pure".into();
        rho
    }

    /// Fock state `|k><k|` in an `n_max`-mode truncation.
    pub fn fock(k: usize, n_max: usize) -> Self {
        let mut v = vec![Complex64::new(0.0, 0.0); n_max];
        v[k] = Complex64::new(1.0, 0.0);
        Self::pure(&v)
    }

    pub fn from_fn(n_max: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut rho = Self::zeros(n_max);
        for n in 0..n_max {
            for m in 0..n_max {
                rho.entries[n * n_max + m] = f(n, m);
            }
        }
        rho.raw_trace = rho.trace();
        rho
    }

    pub fn get(&self, n: usize, m: usize) -> Complex64 {
        self.entries[n * self.n_max + m]
    }

    pub fn set(&mut self, n: usize, m: usize, value: Complex64) {
        self.entries[n * self.n_max + m] = value;
    }

    pub fn trace(&self) -> f64 {
        (0..self.n_max).map(|n| self.get(n, n).re).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n_max).map(|n| self.get(n, n).re).collect()
    }

    pub fn max_hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for n in 0..self.n_max {
            for m in 0..self.n_max {
                worst = worst.max((self.get(n, m) - self.get(m, n).conj()).norm());
            }
        }
        worst
    }

    /// Replace with `(rho + rho^dagger) / 2`.
    pub fn hermitize(&mut self) {
        for n in 0..self.n_max {
            self.entries[n * self.n_max + n].im = 0.0;
            for m in n + 1..self.n_max {
                let avg = 0.5 * (self.get(n, m) + self.get(m, n).conj());
                self.set(n, m, avg);
                self.set(m, n, avg.conj());
            }
        }
    }

    /// Divide by the current trace, recording it as `raw_trace`, then absorb
    /// the rounding residue into the last diagonal entry so the trace is
    /// exactly one.
    pub fn normalize_trace(&mut self) {
        let t = self.trace();
        self.raw_trace = t;
        if t == 0.0 || !t.is_finite() {
            return;
        }
        for e in &mut self.entries {
            *e /= t;
        }
        // The trace is summed in index order, so it equals `rest + last`.
        // `1 - rest` is exact whenever `rest` lies in [0.5, 2]; otherwise
        // `|last|` is large enough that a few ulp steps settle the sum.
        let n = self.n_max;
        let rest: f64 = (0..n - 1).map(|k| self.get(k, k).re).sum();
        let idx = n * n - 1;
        self.entries[idx].re = 1.0 - rest;
        for _ in 0..64 {
            let t = self.trace();
            if t == 1.0 {
                break;
            }
            let e = &mut self.entries[idx].re;
            *e = if t > 1.0 { e.next_down() } else { e.next_up() };
        }
    }

    /// Flag diagonal entries more negative than the statistical tolerance.
    pub fn check_diagonal(&mut self) {
        for n in 0..self.n_max {
            let d = self.get(n, n).re;
            if d < NEGATIVE_DIAGONAL_TOLERANCE {
                self.meta.warnings.push(format!("rho_{n}{n} = {d:.4} is negative beyond tolerance"));
            }
        }
    }

    /// `a * self + (1 - a) * other`.
    pub fn mix(&self, a: f64, other: &Self) -> Self {
        assert_eq!(self.n_max, other.n_max);
        let mut out = self.clone();
        for (o, (x, y)) in out.entries.iter_mut().zip(self.entries.iter().zip(&other.entries)) {
            *o = x * a + y * (1.0 - a);
        }
        out.raw_trace = out.trace();
        out
    }

    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.n_max, self.n_max, |i, j| self.get(i, j))
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut h = self.clone();
        h.hermitize();
        let mut ev: Vec<f64> = h.to_matrix().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn purity(&self) -> f64 {
        let m = self.to_matrix();
        (&m * &m).trace().re
    }

    pub fn max_abs_difference(&self, other: &Self) -> f64 {
        assert_eq!(self.n_max, other.n_max);
        self.entries.iter().zip(&other.entries).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&DensityMatrixFile::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: DensityMatrixFile = serde_json::from_str(text)?;
        file.try_into()
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

/// On-disk layout: separate real and imaginary matrices.
#[derive(Serialize, Deserialize)]
struct DensityMatrixFile {
    n_max: usize,
    real: Vec<Vec<f64>>,
    imag: Vec<Vec<f64>>,
    raw_trace: f64,
    trace: f64,
    eigenvalues: Vec<f64>,
    metadata: ReconstructionMeta,
}

impl From<&DensityMatrix> for DensityMatrixFile {
    fn from(rho: &DensityMatrix) -> Self {
        let rows = |f: fn(Complex64) -> f64| {
            (0..rho.n_max).map(|n| (0..rho.n_max).map(|m| f(rho.get(n, m))).collect()).collect()
        };
        Self {
            n_max: rho.n_max,
            real: rows(|c| c.re),
            imag: rows(|c| c.im),
            raw_trace: rho.raw_trace,
            trace: rho.trace(),
            eigenvalues: rho.eigenvalues(),
            metadata: rho.meta.clone(),
        }
    }
}

impl TryFrom<DensityMatrixFile> for DensityMatrix {
    type Error = Error;

    fn try_from(f: DensityMatrixFile) -> Result<Self> {
        let n = f.n_max;
        let square = |m: &Vec<Vec<f64>>| m.len() == n && m.iter().all(|r| r.len() == n);
        if !square(&f.real) || !square(&f.imag) {
            return Err(Error::parse("density matrix", "entries are not n_max x n_max"));
        }
        let mut rho = DensityMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                rho.set(i, j, Complex64::new(f.real[i][j], f.imag[i][j]));
            }
        }
        rho.raw_trace = f.raw_trace;
        rho.meta = f.metadata;
        Ok(rho)
    }
}
