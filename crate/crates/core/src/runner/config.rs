//! Experiment configuration and its flat `key = value` file format.
//!
//! Blank lines and lines starting with `#` are ignored. Unknown keys are
//! errors. Keys that are absent keep their defaults, so a file may hold only
//! the values that differ from the default scenario.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::empirics::{HistogramSpec, ThetaSweep};
use crate::error::{Error, Result};
use crate::model::{ModelParams, DEFAULT_MAX_TRIALS};
use crate::tomography::MAX_PATTERN_MODES;
use crate::wigner::WignerGridSpec;

/// Phase sweep from 0 to `stop_deg` inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub stop_deg: f64,
    pub step_deg: f64,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self { stop_deg: 180.0, step_deg: 1.0 }
    }
}

impl SweepSpec {
    pub fn build(&self) -> Result<ThetaSweep> {
        ThetaSweep::from_degrees(self.stop_deg, self.step_deg)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReportFormat {
    #[default]
    Text,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(Self::Text),
            "json" => Ok(Self::Json),
            other => Err(Error::invalid("format", format!("expected `text` or `json`, got `{other}`"))),
        }
    }
}

impl ReportFormat {
    fn as_str(&self) -> &'static str {
        match self {
            Self::Text => "text",
            Self::Json => "json",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub params: ModelParams,
    pub max_trials: u64,
    pub sweep: SweepSpec,
    pub histogram: HistogramSpec,
    pub n_max: usize,
    pub wigner: WignerGridSpec,
    pub output_dir: PathBuf,
    pub format: ReportFormat,
}

impl Default for ExperimentConfig {
    /// Heralded vacuum with four-mode reconstruction and a 1 degree sweep.
    fn default() -> Self {
        Self {
            params: ModelParams::default(),
            max_trials: DEFAULT_MAX_TRIALS,
            sweep: SweepSpec::default(),
            histogram: HistogramSpec::default(),
            n_max: 4,
            wigner: WignerGridSpec::default(),
            output_dir: PathBuf::from("spacs-run"),
            format: ReportFormat::Text,
        }
    }
}

/// Config keys in file order.
pub const KEYS: &[&str] = &[
    "alpha_re",
    "alpha_im",
    "sigma",
    "r",
    "gamma",
    "seed",
    "samples",
    "max_trials",
    "theta_stop_deg",
    "theta_step_deg",
    "q_min",
    "q_max",
    "bins",
    "nmax",
    "grid_points",
    "grid_half_width",
    "out",
    "format",
];

fn num<T: FromStr>(key: &'static str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| Error::invalid(key, format!("cannot parse `{value}`: {e}")))
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.max_trials == 0 {
            return Err(Error::invalid("max_trials", "must be at least 1"));
        }
        self.sweep.build()?;
        self.histogram.validate()?;
        if self.n_max == 0 || self.n_max > MAX_PATTERN_MODES {
            return Err(Error::invalid("nmax", format!("must be in 1..={MAX_PATTERN_MODES}")));
        }
        self.wigner.validate()
    }

    /// Apply one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "alpha_re" => self.params.alpha.re = num("alpha_re", value)?,
            "alpha_im" => self.params.alpha.im = num("alpha_im", value)?,
            "sigma" => self.params.sigma = num("sigma", value)?,
            "r" => self.params.r = num("r", value)?,
            "gamma" => self.params.gamma = num("gamma", value)?,
            "seed" => self.params.seed = num("seed", value)?,
            "samples" => self.params.target_conditioned = num("samples", value)?,
            "max_trials" => self.max_trials = num("max_trials", value)?,
            "theta_stop_deg" => self.sweep.stop_deg = num("theta_stop_deg", value)?,
            "theta_step_deg" => self.sweep.step_deg = num("theta_step_deg", value)?,
            "q_min" => self.histogram.q_min = num("q_min", value)?,
            "q_max" => self.histogram.q_max = num("q_max", value)?,
            "bins" => self.histogram.bins = num("bins", value)?,
            "nmax" => self.n_max = num("nmax", value)?,
            "grid_points" => {
                let p = num("grid_points", value)?;
                self.wigner.re_points = p;
                self.wigner.im_points = p;
            }
            "grid_half_width" => {
                let h: f64 = num("grid_half_width", value)?;
                self.wigner = WignerGridSpec::square(h, self.wigner.re_points);
            }
            "out" => self.output_dir = PathBuf::from(value),
            "format" => self.format = value.parse()?,
            other => return Err(Error::parse("config", format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    pub fn parse_kv(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (line_no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse("config", format!("line {}: expected key = value", line_no + 1)))?;
            cfg.set(key.trim(), value)?;
        }
        Ok(cfg)
    }

    pub fn to_kv(&self) -> String {
        let p = &self.params;
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        put("alpha_re", p.alpha.re.to_string());
        put("alpha_im", p.alpha.im.to_string());
        put("sigma", p.sigma.to_string());
        put("r", p.r.to_string());
        put("gamma", p.gamma.to_string());
        put("seed", p.seed.to_string());
        put("samples", p.target_conditioned.to_string());
        put("max_trials", self.max_trials.to_string());
        put("theta_stop_deg", self.sweep.stop_deg.to_string());
        put("theta_step_deg", self.sweep.step_deg.to_string());
        put("q_min", self.histogram.q_min.to_string());
        put("q_max", self.histogram.q_max.to_string());
        put("bins", self.histogram.bins.to_string());
        put("nmax", self.n_max.to_string());
        put("grid_points", self.wigner.re_points.to_string());
        put("grid_half_width", self.wigner.re_max.to_string());
        put("out", self.output_dir.display().to_string());
        put("format", self.format.as_str().to_string());
        out
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_kv(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_kv()).map_err(|e| Error::io(path, e))
    }

    pub fn with_alpha(mut self, alpha: Complex64) -> Self {
        self.params.alpha = alpha;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn defaults_are_the_heralded_vacuum_scenario() {
        let c = ExperimentConfig::default();
        assert_eq!(c.params.alpha, Complex64::new(0.0, 0.0));
        assert_eq!(c.params.sigma, std::f64::consts::FRAC_1_SQRT_2);
        assert_eq!(c.params.gamma, 2.5);
        assert_eq!(c.params.r, 0.4);
        assert_eq!(c.params.target_conditioned, 65_536);
        assert_eq!(c.n_max, 4);
        assert_eq!(c.sweep.build().unwrap().len(), 181);
        c.validate().unwrap();
    }

    #[test]
    fn partial_files_and_comments() {
        let c = ExperimentConfig::parse_kv("# scenario\n\nr = 0.8\n  gamma=1.5  \n").unwrap();
        assert_eq!(c.params.r, 0.8);
        assert_eq!(c.params.gamma, 1.5);
        assert_eq!(c.params.sigma, std::f64::consts::FRAC_1_SQRT_2);
    }

    #[test]
    fn bad_lines_are_rejected() {
        assert!(ExperimentConfig::parse_kv("colour = blue").is_err());
        assert!(ExperimentConfig::parse_kv("gamma 2").is_err());
        assert!(ExperimentConfig::parse_kv("gamma = two").is_err());
    }

    proptest! {
        #[test]
        fn kv_round_trip(
            are in -5.0f64..5.0, aim in -5.0f64..5.0, sigma in 0.01f64..3.0, r in 0.0f64..2.0,
            gamma in 0.0f64..4.0, seed: u64, samples in 1usize..1_000_000, bins in 1usize..1000,
            nmax in 1usize..12, points in 2usize..400, half in 0.1f64..10.0, step in 0.1f64..10.0,
        ) {
            let mut c = ExperimentConfig::default();
            c.params.alpha = Complex64::new(are, aim);
            c.params.sigma = sigma;
            c.params.r = r;
            c.params.gamma = gamma;
            c.params.seed = seed;
            c.params.target_conditioned = samples;
            c.histogram.bins = bins;
            c.n_max = nmax;
            c.wigner = WignerGridSpec::square(half, points);
            c.sweep.step_deg = step;
            c.format = ReportFormat::Json;
            c.output_dir = PathBuf::from("out/dir with space");
            prop_assert_eq!(ExperimentConfig::parse_kv(&c.to_kv()).unwrap(), c);
        }
    }
}
