//! Gamma function at positive integers, the upper incomplete gamma function
//! for non-negative integer order, and the exponential integral E₁.
//!
//! Integer orders n ≥ 1 always go through the finite series
//! `Γ(n, x) = (n−1)! e^{−x} Σ_{k<n} x^k / k!`; there is no generic
//! continuous-parameter code path here.

use std::sync::LazyLock;

use crate::error::{Error, Result};

/// Largest `n` with a finite `Γ(n) = (n−1)!` in `f64`.
pub const MAX_GAMMA_ARG: u32 = 171;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const LN_FACT_TABLE: usize = 1024;
const MAX_ITER: usize = 500;

static LN_FACTORIALS: LazyLock<Vec<f64>> = LazyLock::new(|| {
    let mut table = Vec::with_capacity(LN_FACT_TABLE);
    let mut acc = 0.0_f64;
    table.push(0.0);
    for k in 1..LN_FACT_TABLE {
        acc += (k as f64).ln();
        table.push(acc);
    }
    table
});

/// `Γ(n) = (n−1)!` for integer `n ≥ 1`.
pub fn gamma(n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("gamma(n) requires n >= 1"));
    }
    if n > MAX_GAMMA_ARG {
        return Err(Error::Overflow(format!("gamma({n}) exceeds f64 range")));
    }
    Ok((1..n).fold(1.0_f64, |acc, k| acc * k as f64))
}

/// `ln k!`, exact table lookup for small `k` and Stirling's series beyond.
pub fn ln_factorial(k: u32) -> f64 {
    let k = k as usize;
    if k < LN_FACT_TABLE {
        return LN_FACTORIALS[k];
    }
    let x = k as f64 + 1.0;
    // ln Γ(x) Stirling series, accurate to well below 1e-15 for x > 1000
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * x)
        - 1.0 / (360.0 * x.powi(3))
}

/// `ln C(n, k)`.
pub fn ln_binomial(n: u32, k: u32) -> f64 {
    debug_assert!(k <= n);
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// `ln Σ_{k=0}^{n-1} x^k / k!` for `n ≥ 1`, `x ≥ 0`, via log-sum-exp.
fn ln_truncated_exp_series(n: u32, x: f64) -> f64 {
    debug_assert!(n >= 1 && x >= 0.0);
    if x == 0.0 {
        return 0.0;
    }
    let lx = x.ln();
    // terms peak at k ≈ x
    let k_peak = (x.floor() as u64).min(n as u64 - 1) as u32;
    let peak = k_peak as f64 * lx - ln_factorial(k_peak);
    let sum: f64 = (0..n)
        .map(|k| (k as f64 * lx - ln_factorial(k) - peak).exp())
        .sum();
    peak + sum.ln()
}

/// Regularized upper incomplete gamma `Q(n, x) = Γ(n, x) / Γ(n)
/// = e^{−x} Σ_{k<n} x^k / k!` for integer `n ≥ 1`.
pub fn regularized_upper_gamma(n: u32, x: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("regularized upper gamma requires n >= 1"));
    }
    if !(x >= 0.0) {
        return Err(Error::domain(format!("x = {x} must be non-negative")));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    if x < 600.0 && n <= MAX_GAMMA_ARG {
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..n {
            term *= x / k as f64;
            sum += term;
        }
        Ok((-x).exp() * sum)
    } else {
        Ok((ln_truncated_exp_series(n, x) - x).exp())
    }
}

/// Upper incomplete gamma `Γ(n, x)` for integer `n ≥ 0`, `x ≥ 0`.
///
/// `n ≥ 1` uses the finite elementary series; `n = 0` is the exponential
/// integral `E₁(x)`, divergent at `x = 0`.
pub fn upper_incomplete_gamma(n: u32, x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::domain(format!("x = {x} must be non-negative")));
    }
    if n == 0 {
        return exp_integral_e1(x);
    }
    if x == 0.0 {
        return gamma(n);
    }
    if n <= MAX_GAMMA_ARG && x < 600.0 {
        let factorial = gamma(n)?;
        Ok(factorial * regularized_upper_gamma(n, x)?)
    } else {
        let value = ln_upper_incomplete_gamma(n, x)?.exp();
        if value.is_infinite() {
            return Err(Error::Overflow(format!("Gamma({n}, {x}) exceeds f64 range")));
        }
        Ok(value)
    }
}

/// `ln Γ(n, x)` for integer `n ≥ 1`; finite for every `x ≥ 0`.
pub fn ln_upper_incomplete_gamma(n: u32, x: f64) -> Result<f64> {
    if n == 0 {
        let e1 = exp_integral_e1(x)?;
        return Ok(e1.ln());
    }
    if !(x >= 0.0) {
        return Err(Error::domain(format!("x = {x} must be non-negative")));
    }
    Ok(ln_factorial(n - 1) - x + ln_truncated_exp_series(n, x))
}

/// Exponential integral `E₁(x) = Γ(0, x) = ∫ₓ^∞ e^{−t}/t dt` for `x > 0`.
///
/// Power series below 1, modified-Lentz continued fraction from 1 upward.
pub fn exp_integral_e1(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain(format!(
            "E1(x) requires x > 0, got {x} (Gamma(0, 0) diverges)"
        )));
    }
    if x < 1.0 {
        // E1(x) = −γ − ln x − Σ_{k≥1} (−x)^k / (k·k!)
        let mut sum = 0.0;
        let mut fact_term = 1.0; // (−x)^k / k!
        for k in 1..MAX_ITER {
            fact_term *= -x / k as f64;
            let term = fact_term / k as f64;
            sum += term;
            if term.abs() <= 1e-17 * sum.abs() {
                return Ok(-EULER_GAMMA - x.ln() - sum);
            }
        }
        Err(Error::NonConvergence {
            what: "E1 power series",
            iterations: MAX_ITER,
        })
    } else {
        Ok(exp_integral_e1_scaled_cf(x)? * (-x).exp())
    }
}

/// `e^{x} E₁(x)` for `x ≥ 1` by continued fraction.
fn exp_integral_e1_scaled_cf(x: f64) -> Result<f64> {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() <= 1e-16 {
            return Ok(h);
        }
    }
    Err(Error::NonConvergence {
        what: "E1 continued fraction",
        iterations: MAX_ITER,
    })
}

/// `e^{x} E₂(x)` for `x ≥ 0`, where `E₂(x) = e^{−x} − x E₁(x)`.
///
/// The difference cancels badly for large `x`, so `x ≥ 1` uses the
/// continued fraction for `E₂` directly.
pub fn exp_integral_e2_scaled(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::domain(format!("E2(x) requires x >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    if x < 1.0 {
        return Ok(1.0 - x * exp_integral_e1_scaled(x)?);
    }
    const TINY: f64 = 1e-300;
    let mut b = x + 2.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -((i * (i + 1)) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() <= 1e-16 {
            return Ok(h);
        }
    }
    Err(Error::NonConvergence {
        what: "E2 continued fraction",
        iterations: MAX_ITER,
    })
}

/// `e^{x} E₁(x)` for any `x > 0`.
pub fn exp_integral_e1_scaled(x: f64) -> Result<f64> {
    if x >= 1.0 {
        exp_integral_e1_scaled_cf(x)
    } else {
        Ok(exp_integral_e1(x)? * x.exp())
    }
}
