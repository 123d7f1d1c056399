//! Classical stochastic model of the heralded signal mode.
//!
//! Signal and idler start as `a_s = alpha + sigma z_s` and `a_i = sigma z_i`
//! with standard complex Gaussian fluctuations, are mixed by a two-mode
//! Bogoliubov transform of strength `r`, and the signal is kept only when the
//! idler amplitude crosses the herald threshold `|b_i| > gamma`.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use crate::error::{Error, Result};
use crate::rng::{standard_complex_normal, substream};

/// Default cap on unconditioned trials before [`generate_ensemble`] gives up.
pub const DEFAULT_MAX_TRIALS: u64 = 1_000_000_000;

/// Trials per independently seeded substream.
pub const CHUNK_TRIALS: u64 = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub alpha: Complex64,
    pub sigma: f64,
    pub r: f64,
    pub gamma: f64,
    pub seed: u64,
    pub target_conditioned: usize,
}

impl Default for ModelParams {
    /// Heralded vacuum: `alpha = 0`, vacuum-scale noise, `r = 0.4`, `gamma = 2.5`,
    /// `2^16` conditioned samples.
    fn default() -> Self {
        Self {
            alpha: Complex64::new(0.0, 0.0),
            sigma: FRAC_1_SQRT_2,
            r: 0.4,
            gamma: 2.5,
            seed: 1,
            target_conditioned: 1 << 16,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.re.is_finite() && self.alpha.im.is_finite()) {
            return Err(Error::invalid("alpha", "must be finite"));
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::invalid("sigma", format!("must be > 0, got {}", self.sigma)));
        }
        if !(self.r.is_finite() && self.r >= 0.0) {
            return Err(Error::invalid("r", format!("must be >= 0, got {}", self.r)));
        }
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err(Error::invalid("gamma", format!("must be >= 0, got {}", self.gamma)));
        }
        if self.target_conditioned == 0 {
            return Err(Error::invalid("target_conditioned", "must be at least 1"));
        }
        Ok(())
    }

    /// Mean of the unconditioned quadrature at phase `theta`.
    pub fn unconditioned_quadrature_mean(&self, theta: f64) -> f64 {
        SQRT_2 * self.r.cosh() * (self.alpha * Complex64::from_polar(1.0, -theta)).re
    }

    /// Variance of the unconditioned quadrature (phase independent).
    pub fn unconditioned_quadrature_variance(&self) -> f64 {
        let c = self.r.cosh();
        (2.0 * c * c - 1.0) * self.sigma * self.sigma
    }

    /// `E[|b_i|^2]` of the unconditioned idler.
    pub fn idler_mean_power(&self) -> f64 {
        let (c, s) = (self.r.cosh(), self.r.sinh());
        (c * c + s * s) * self.sigma * self.sigma + s * s * self.alpha.norm_sqr()
    }
}

/// One joint draw of signal and idler fluctuations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModePair {
    pub z_s: Complex64,
    pub z_i: Complex64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransformedPair {
    pub b_s: Complex64,
    pub b_i: Complex64,
}

/// Signal amplitudes that passed the herald, with their provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct HeraldedEnsemble {
    pub c_s: Vec<Complex64>,
    pub total_trials: u64,
    pub accepted: usize,
    pub efficiency: f64,
    pub seed: u64,
}

impl HeraldedEnsemble {
    pub fn len(&self) -> usize {
        self.c_s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c_s.is_empty()
    }
}

pub fn sample_mode_pair<R: Rng + ?Sized>(rng: &mut R) -> ModePair {
    let z_s = standard_complex_normal(rng);
    let z_i = standard_complex_normal(rng);
    ModePair { z_s, z_i }
}

pub fn input_amplitudes(pair: &ModePair, params: &ModelParams) -> (Complex64, Complex64) {
    (params.alpha + pair.z_s * params.sigma, pair.z_i * params.sigma)
}

pub fn bogoliubov(a_s: Complex64, a_i: Complex64, r: f64) -> TransformedPair {
    let (c, s) = (r.cosh(), r.sinh());
    TransformedPair {
        b_s: a_s * c + a_i.conj() * s,
        b_i: a_i * c + a_s.conj() * s,
    }
}

/// Threshold-crossing detection: `|b_i| > gamma`, strictly.
pub fn herald(pair: &TransformedPair, gamma: f64) -> bool {
    pair.b_i.norm() > gamma
}

/// Balanced homodyne readout `sqrt(2) Re[c e^{-i theta}]`.
#[inline]
pub fn quadrature(c: Complex64, theta: f64) -> f64 {
    let (s, co) = theta.sin_cos();
    SQRT_2 * (c.re * co + c.im * s)
}

/// Tuning for [`generate_ensemble_with`].
#[derive(Clone, Copy, Debug)]
pub struct EnsembleOptions {
    pub max_trials: u64,
    /// Chunks evaluated per parallel wave. Affects speed only, never output.
    pub wave_chunks: usize,
}

impl Default for EnsembleOptions {
    fn default() -> Self {
        Self { max_trials: DEFAULT_MAX_TRIALS, wave_chunks: 4 * rayon::current_num_threads() }
    }
}

pub fn generate_ensemble(params: &ModelParams) -> Result<HeraldedEnsemble> {
    generate_ensemble_with(params, &EnsembleOptions::default())
}

/// Draws trials until `params.target_conditioned` of them pass the herald.
///
/// Trial `t` belongs to chunk `t / CHUNK_TRIALS` and is drawn from substream
/// `chunk` of `params.seed`, so the output depends only on `params` and never
/// on thread count or wave size. The ensemble stops at the exact trial that
/// reaches the target; `total_trials` counts through that trial.
pub fn generate_ensemble_with(
    params: &ModelParams,
    options: &EnsembleOptions,
) -> Result<HeraldedEnsemble> {
    params.validate()?;
    if options.max_trials == 0 {
        return Err(Error::invalid("max_trials", "must be at least 1"));
    }
    let target = params.target_conditioned;
    let total_chunks = options.max_trials.div_ceil(CHUNK_TRIALS);
    let wave = options.wave_chunks.max(1) as u64;

    let mut c_s = Vec::with_capacity(target);
    let mut next_chunk = 0u64;
    while next_chunk < total_chunks {
        let end = (next_chunk + wave).min(total_chunks);
        let results: Vec<Vec<(u64, Complex64)>> = (next_chunk..end)
            .into_par_iter()
            .map(|chunk| {
                let start = chunk * CHUNK_TRIALS;
                let len = CHUNK_TRIALS.min(options.max_trials - start);
                run_chunk(params, chunk, len)
            })
            .collect();
        for (offset, accepted) in results.into_iter().enumerate() {
            let chunk_start = (next_chunk + offset as u64) * CHUNK_TRIALS;
            for (local, b_s) in accepted {
                c_s.push(b_s);
                if c_s.len() == target {
                    let total_trials = chunk_start + local + 1;
                    return Ok(HeraldedEnsemble {
                        accepted: target,
                        efficiency: target as f64 / total_trials as f64,
                        total_trials,
                        c_s,
                        seed: params.seed,
                    });
                }
            }
        }
        next_chunk = end;
    }
    Err(Error::AbortedAfterMaxTrials {
        trials: options.max_trials,
        accepted: c_s.len(),
        target,
    })
}

/// Accepted `(local trial index, b_s)` pairs of one chunk.
fn run_chunk(params: &ModelParams, chunk: u64, len: u64) -> Vec<(u64, Complex64)> {
    let mut rng = substream(params.seed, chunk);
    let (ch, sh) = (params.r.cosh(), params.r.sinh());
    let sigma = params.sigma;
    // Cheap reject well below the threshold; the exact test matches `herald`.
    let reject_below = params.gamma * params.gamma * (1.0 - 1e-9);
    let mut out = Vec::new();
    for local in 0..len {
        let pair = sample_mode_pair(&mut rng);
        let a_s = params.alpha + pair.z_s * sigma;
        let a_i = pair.z_i * sigma;
        // Herald on b_i first; b_s is only formed for accepted trials.
        let b_i = a_i * ch + a_s.conj() * sh;
        if b_i.norm_sqr() > reject_below && b_i.norm() > params.gamma {
            out.push((local, a_s * ch + a_i.conj() * sh));
        }
    }
    out
}

/// Second-order statistics of a sample of `(b_s, b_i)` pairs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairCovariance {
    /// `E[b_s b_s^*]`, `E[b_i b_i^*]`, `E[b_s b_i^*]` about the means.
    pub covariance: [Complex64; 3],
    /// `E[b_s b_s]`, `E[b_i b_i]`, `E[b_s b_i]` about the means.
    pub pseudo_covariance: [Complex64; 3],
}

/// Sample covariance and pseudo-covariance; a diagnostic of how improper and
/// correlated the transformed modes are.
pub fn pair_covariance(pairs: &[TransformedPair]) -> PairCovariance {
    let n = pairs.len().max(1) as f64;
    let mean_s = pairs.iter().map(|p| p.b_s).sum::<Complex64>() / n;
    let mean_i = pairs.iter().map(|p| p.b_i).sum::<Complex64>() / n;
    let zero = Complex64::new(0.0, 0.0);
    let mut cov = [zero; 3];
    let mut pcov = [zero; 3];
    for p in pairs {
        let s = p.b_s - mean_s;
        let i = p.b_i - mean_i;
        cov[0] += s * s.conj();
        cov[1] += i * i.conj();
        cov[2] += s * i.conj();
        pcov[0] += s * s;
        pcov[1] += i * i;
        pcov[2] += s * i;
    }
    PairCovariance {
        covariance: cov.map(|c| c / n),
        pseudo_covariance: pcov.map(|c| c / n),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn input_amplitude_examples() {
        let mut p = ModelParams { alpha: c(1.0, 0.0), ..Default::default() };
        let zero = ModePair { z_s: c(0.0, 0.0), z_i: c(0.0, 0.0) };
        assert_eq!(input_amplitudes(&zero, &p), (c(1.0, 0.0), c(0.0, 0.0)));

        p.alpha = c(0.0, 0.0);
        let pair = ModePair { z_s: c(1.0, 1.0), z_i: c(0.0, 0.0) };
        let (a_s, _) = input_amplitudes(&pair, &p);
        assert!(close(a_s, c(FRAC_1_SQRT_2, FRAC_1_SQRT_2), 1e-15));

        p.alpha = c(2.0, -1.0);
        p.sigma = 0.8;
        let pair = ModePair { z_s: c(0.0, 0.5), z_i: c(0.0, 0.0) };
        let (a_s, _) = input_amplitudes(&pair, &p);
        assert!(close(a_s, c(2.0, -0.6), 1e-15));
    }

    #[test]
    fn bogoliubov_examples() {
        let a_s = c(0.3, -1.2);
        let a_i = c(-0.7, 0.25);
        assert_eq!(bogoliubov(a_s, a_i, 0.0), TransformedPair { b_s: a_s, b_i: a_i });

        // cosh(0.4), sinh(0.4) from a 30-digit evaluation.
        let t = bogoliubov(c(1.0, 0.0), c(0.0, 1.0), 0.4);
        assert!(close(t.b_s, c(1.081_072_371_838_454_8, -0.410_752_325_802_815_5), 1e-14));
        assert!(close(t.b_i, c(0.410_752_325_802_815_5, 1.081_072_371_838_454_8), 1e-14));
    }

    #[test]
    fn herald_threshold_is_strict() {
        let p = TransformedPair { b_s: c(0.0, 0.0), b_i: c(3.0, 4.0) };
        assert!(!herald(&p, 5.0));
        assert!(herald(&p, 4.9));
        let tiny = TransformedPair { b_s: c(0.0, 0.0), b_i: c(1e-300, 0.0) };
        assert!(herald(&tiny, 0.0));
    }

    #[test]
    fn quadrature_examples() {
        assert!((quadrature(c(1.0, 0.0), 0.0) - SQRT_2).abs() < 1e-15);
        assert!((quadrature(c(0.0, 1.0), std::f64::consts::FRAC_PI_2) - SQRT_2).abs() < 1e-15);
        // sqrt(2) (3 cos 0.7 + 4 sin 0.7) at 30 digits.
        assert!((quadrature(c(3.0, 4.0), 0.7) - 6.889_196_144_647_164_6).abs() < 1e-13);
    }

    #[test]
    fn mode_pairs_are_seed_deterministic() {
        let mut a = substream(42, 0);
        let mut b = substream(42, 0);
        for _ in 0..100 {
            assert_eq!(sample_mode_pair(&mut a), sample_mode_pair(&mut b));
        }
    }

    #[test]
    fn mode_pair_moments() {
        let mut rng = substream(2024, 0);
        let n = 1_000_000;
        let mut sum = c(0.0, 0.0);
        let mut power = 0.0;
        for _ in 0..n {
            let p = sample_mode_pair(&mut rng);
            sum += p.z_s;
            power += p.z_s.norm_sqr();
        }
        let mean = sum / n as f64;
        let power = power / n as f64;
        assert!(mean.norm() < 0.004, "mean {mean}");
        assert!((0.997..=1.003).contains(&power), "power {power}");
    }

    #[test]
    fn herald_free_ensemble_accepts_every_trial() {
        let p = ModelParams { gamma: 0.0, target_conditioned: 1000, ..Default::default() };
        let e = generate_ensemble(&p).unwrap();
        assert_eq!(e.accepted, 1000);
        assert_eq!(e.c_s.len(), 1000);
        assert_eq!(e.total_trials, 1000);
        assert_eq!(e.efficiency, 1.0);
    }

    #[test]
    fn ensemble_is_independent_of_wave_size() {
        let p = ModelParams { gamma: 1.5, target_conditioned: 20_000, seed: 9, ..Default::default() };
        let a = generate_ensemble_with(&p, &EnsembleOptions { max_trials: DEFAULT_MAX_TRIALS, wave_chunks: 1 }).unwrap();
        let b = generate_ensemble_with(&p, &EnsembleOptions { max_trials: DEFAULT_MAX_TRIALS, wave_chunks: 7 }).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, generate_ensemble(&p).unwrap());
    }

    #[test]
    fn trial_cap_aborts() {
        let p = ModelParams { gamma: 6.0, target_conditioned: 10, ..Default::default() };
        let err = generate_ensemble_with(&p, &EnsembleOptions { max_trials: 100_000, wave_chunks: 2 })
            .unwrap_err();
        assert!(matches!(err, Error::AbortedAfterMaxTrials { trials: 100_000, .. }));
    }

    #[test]
    fn invalid_params_are_rejected() {
        for p in [
            ModelParams { sigma: 0.0, ..Default::default() },
            ModelParams { r: -0.1, ..Default::default() },
            ModelParams { gamma: -1.0, ..Default::default() },
            ModelParams { target_conditioned: 0, ..Default::default() },
        ] {
            assert!(matches!(p.validate(), Err(Error::InvalidParameter { .. })));
        }
    }

    #[test]
    fn squeezed_pairs_are_improper_and_correlated() {
        let p = ModelParams { alpha: c(0.0, 0.0), r: 0.8, ..Default::default() };
        let mut rng = substream(5, 0);
        let pairs: Vec<_> = (0..200_000)
            .map(|_| {
                let (a_s, a_i) = input_amplitudes(&sample_mode_pair(&mut rng), &p);
                bogoliubov(a_s, a_i, p.r)
            })
            .collect();
        let stats = pair_covariance(&pairs);
        // E[b_s b_i] = 2 sigma^2 cosh r sinh r; covariance between modes vanishes.
        let expected = 2.0 * 0.5 * 0.8f64.cosh() * 0.8f64.sinh();
        assert!((stats.pseudo_covariance[2].re - expected).abs() < 0.02);
        assert!(stats.covariance[2].norm() < 0.02);
        assert!(stats.pseudo_covariance[0].norm() < 0.02);
    }
}
