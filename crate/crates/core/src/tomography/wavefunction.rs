//! Regular and irregular harmonic-oscillator wavefunctions.
//!
//! Both families obey the ladder recurrence
//! `u_{n+1} = sqrt(2/(n+1)) q u_n - sqrt(n/(n+1)) u_{n-1}` and the derivative
//! identity `u_n' = (sqrt(n) u_{n-1} - sqrt(n+1) u_{n+1}) / sqrt(2)`. The
//! irregular family is seeded from Dawson's integral:
//!
//! ```text
//! phi_0 = c exp(q^2/2) F(q)
//! phi_1 = c exp(q^2/2) (2 q F(q) - 1) / sqrt(2)
//! ```
//!
//! where `c` is fixed once by the calibration in [`super::pattern`].

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use crate::special::dawson;

/// Highest mode index the recurrences are used for.
pub const MAX_MODE: usize = 64;

/// `psi_0 .. psi_{count-1}` at `q`.
pub fn regular_wavefunctions(count: usize, q: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    out.push(PI.powf(-0.25) * (-0.5 * q * q).exp());
    if count > 1 {
        out.push(SQRT_2 * q * out[0]);
    }
    extend_by_recurrence(&mut out, count, q);
    out
}

pub fn regular_wavefunction(n: usize, q: f64) -> f64 {
    regular_wavefunctions(n + 1, q)[n]
}

/// `phi_0 .. phi_{count-1}` at `q` for seed scale `scale`.
pub fn irregular_wavefunctions_scaled(count: usize, q: f64, scale: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    let grow = scale * (0.5 * q * q).exp();
    let f = dawson(q);
    out.push(grow * f);
    if count > 1 {
        out.push(grow * (2.0 * q * f - 1.0) * FRAC_1_SQRT_2);
    }
    extend_by_recurrence(&mut out, count, q);
    out
}

/// Calibrated irregular wavefunctions.
pub fn irregular_wavefunctions(count: usize, q: f64) -> Vec<f64> {
    irregular_wavefunctions_scaled(count, q, super::pattern::irregular_scale())
}

pub fn irregular_wavefunction(n: usize, q: f64) -> f64 {
    irregular_wavefunctions(n + 1, q)[n]
}

fn extend_by_recurrence(out: &mut Vec<f64>, count: usize, q: f64) {
    while out.len() < count {
        let n = out.len() - 1;
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * q * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
        out.push(next);
    }
}

/// Derivatives of the first `values.len() - 1` functions of a family, given
/// one extra value at the top. `lowered_ground` is `a u_0`, which is zero for
/// the regular family and `c exp(q^2/2) / sqrt(2)` for the irregular one.
pub(crate) fn ladder_derivatives(values: &[f64], lowered_ground: f64) -> Vec<f64> {
    (0..values.len() - 1)
        .map(|n| {
            let nf = n as f64;
            let down = if n == 0 { lowered_ground } else { nf.sqrt() * values[n - 1] };
            (down - (nf + 1.0).sqrt() * values[n + 1]) * FRAC_1_SQRT_2
        })
        .collect()
}

/// `(psi_n, psi_n')` for `n < count`.
pub fn regular_with_derivatives(count: usize, q: f64) -> (Vec<f64>, Vec<f64>) {
    let mut values = regular_wavefunctions(count + 1, q);
    let d = ladder_derivatives(&values, 0.0);
    values.truncate(count);
    (values, d)
}

/// `(phi_n, phi_n')` for `n < count` with seed scale `scale`.
pub fn irregular_with_derivatives_scaled(count: usize, q: f64, scale: f64) -> (Vec<f64>, Vec<f64>) {
    let mut values = irregular_wavefunctions_scaled(count + 1, q, scale);
    let lowered = scale * (0.5 * q * q).exp() * FRAC_1_SQRT_2;
    let d = ladder_derivatives(&values, lowered);
    values.truncate(count);
    (values, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCALE: f64 = 1.0;

    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let n = n + n % 2;
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for k in 1..n {
            s += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    fn hermite(n: usize, x: f64) -> f64 {
        // Physicists' Hermite polynomials, explicit low orders.
        match n {
            0 => 1.0,
            1 => 2.0 * x,
            2 => 4.0 * x * x - 2.0,
            3 => 8.0 * x.powi(3) - 12.0 * x,
            4 => 16.0 * x.powi(4) - 48.0 * x * x + 12.0,
            5 => 32.0 * x.powi(5) - 160.0 * x.powi(3) + 120.0 * x,
            _ => unreachable!(),
        }
    }

    #[test]
    fn ground_state_at_origin() {
        assert!((regular_wavefunction(0, 0.0) - 0.751_125_544_464_942_5).abs() < 1e-15);
        assert_eq!(regular_wavefunction(1, 0.0), 0.0);
    }

    #[test]
    fn recurrence_matches_hermite_closed_form() {
        for n in 0..6 {
            for &q in &[-2.5, -0.3, 0.0, 0.9, 3.1] {
                let exact = hermite(n, q) * (-0.5 * q * q).exp()
                    / (PI.powf(0.25) * 2f64.powf(n as f64 / 2.0) * crate::special::factorial(n).sqrt());
                assert!((regular_wavefunction(n, q) - exact).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn regular_wavefunctions_are_normalized() {
        for n in 0..6 {
            let norm = simpson(|q| regular_wavefunction(n, q).powi(2), -12.0, 12.0, 20_000);
            assert!((norm - 1.0).abs() < 1e-8, "n={n}: {norm}");
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-5;
        for &q in &[-3.0, -0.7, 0.2, 1.5, 4.0] {
            let (_, dpsi) = regular_with_derivatives(6, q);
            let (_, dphi) = irregular_with_derivatives_scaled(6, q, SCALE);
            for n in 0..6 {
                let fd = (regular_wavefunction(n, q + h) - regular_wavefunction(n, q - h)) / (2.0 * h);
                assert!((dpsi[n] - fd).abs() < 1e-8 * (1.0 + fd.abs()));
                let phi = |x| irregular_wavefunctions_scaled(n + 1, x, SCALE)[n];
                let fd = (phi(q + h) - phi(q - h)) / (2.0 * h);
                assert!((dphi[n] - fd).abs() < 1e-6 * (1.0 + fd.abs()), "n={n} q={q}");
            }
        }
    }

    #[test]
    fn irregular_recurrence_residual() {
        for k in 0..=160 {
            let q = -8.0 + 0.1 * k as f64;
            let phi = irregular_wavefunctions_scaled(8, q, SCALE);
            for n in 1..7 {
                let nf = n as f64;
                let rhs = (2.0 / (nf + 1.0)).sqrt() * q * phi[n] - (nf / (nf + 1.0)).sqrt() * phi[n - 1];
                let scale = phi[n + 1].abs().max(rhs.abs()).max(1.0);
                assert!((phi[n + 1] - rhs).abs() / scale < 1e-10);
            }
        }
    }

    #[test]
    fn irregular_solves_oscillator_equation() {
        // u'' = (q^2 - 2n - 1) u, checked by central differences of the
        // analytic first derivative.
        let h = 1e-5;
        for &q in &[-2.0, -0.4, 0.6, 2.7] {
            for n in 0..5 {
                let d = |x| irregular_with_derivatives_scaled(5, x, SCALE).1[n];
                let second = (d(q + h) - d(q - h)) / (2.0 * h);
                let u = irregular_wavefunctions_scaled(5, q, SCALE)[n];
                let want = (q * q - 2.0 * n as f64 - 1.0) * u;
                assert!((second - want).abs() < 1e-5 * (1.0 + want.abs()), "n={n} q={q}");
            }
        }
    }

    #[test]
    fn wronskian_is_constant() {
        for n in 0..6 {
            let w = |q: f64| {
                let (psi, dpsi) = regular_with_derivatives(6, q);
                let (phi, dphi) = irregular_with_derivatives_scaled(6, q, SCALE);
                psi[n] * dphi[n] - dpsi[n] * phi[n]
            };
            let w0 = w(0.0);
            assert!(w0.abs() > 0.1);
            for k in 0..=80 {
                let q = -8.0 + 0.2 * k as f64;
                assert!((w(q) - w0).abs() < 1e-6, "n={n} q={q}: {} vs {w0}", w(q));
            }
        }
    }

    #[test]
    fn parities() {
        for &q in &[0.3, 1.1, 2.9, 6.5] {
            let psi_p = regular_wavefunctions(8, q);
            let psi_m = regular_wavefunctions(8, -q);
            let phi_p = irregular_wavefunctions_scaled(8, q, SCALE);
            let phi_m = irregular_wavefunctions_scaled(8, -q, SCALE);
            for n in 0..8 {
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                assert!((psi_m[n] - sign * psi_p[n]).abs() < 1e-10 * (1.0 + psi_p[n].abs()));
                assert!((phi_m[n] + sign * phi_p[n]).abs() < 1e-10 * (1.0 + phi_p[n].abs()));
            }
        }
    }
}
