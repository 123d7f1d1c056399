//! Special functions used by the pattern functions and the Wigner basis.

/// Dawson's integral `F(x) = exp(-x^2) * integral_0^x exp(t^2) dt`.
///
/// Positive-term series `exp(-x^2) sum x^(2k+1) / (k! (2k+1))` for `|x| <= 10`,
/// where it is free of cancellation, and the asymptotic expansion beyond.
pub fn dawson(x: f64) -> f64 {
    let ax = x.abs();
    let value = if ax <= 10.0 {
        dawson_series(ax)
    } else {
        dawson_asymptotic(ax)
    };
    value.copysign(x)
}

fn dawson_series(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= x2 / k;
        let contrib = term / (2.0 * k + 1.0);
        sum += contrib;
        if contrib < sum * 1e-17 {
            break;
        }
    }
    sum * (-x2).exp()
}

fn dawson_asymptotic(x: f64) -> f64 {
    // 1/(2x) * sum_k (2k-1)!! / (2x^2)^k
    let inv = 1.0 / (2.0 * x * x);
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        let next = term * (2 * k - 1) as f64 * inv;
        if next >= term || next < 1e-18 {
            break;
        }
        term = next;
        sum += term;
    }
    sum / (2.0 * x)
}

/// Generalized Laguerre polynomial `L_n^(k)(x)` by upward recurrence in `n`.
pub fn laguerre(n: usize, k: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + k - x;
    for j in 1..n {
        let j = j as f64;
        let next = ((2.0 * j + 1.0 + k - x) * cur - (j + k) * prev) / (j + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}
