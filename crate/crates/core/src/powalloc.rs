//! Lagrangian water-level for the per-stream power rule
//! `p*(x) = (λ/(ln2·E[Y]) − (p_p E[Z] + N₀)/x)^+` under the average
//! interference-temperature constraint, plus the fixed-power baseline.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linkstats::LinkStats;
use crate::quad;
use crate::specfun;

/// One link scenario. Every power, threshold and `q` is linear and
/// normalised to the noise floor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    /// Transmit antennas at ST (= spatial streams).
    pub m: u32,
    /// Receive antennas at SR.
    pub n: u32,
    pub l_t: u32,
    pub l_r: u32,
    pub p_p: f64,
    pub p_max: f64,
    /// Interference temperature.
    pub q: f64,
    pub n0: f64,
    pub gamma_th: f64,
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m < 1 {
            return Err(Error::config("system.m", "M must be >= 1"));
        }
        if self.n < self.m {
            return Err(Error::config(
                "system.n",
                format!("N >= M required, got N = {} < M = {}", self.n, self.m),
            ));
        }
        if self.l_t < 1 {
            return Err(Error::config("system.l_t", "L_T must be >= 1"));
        }
        if self.l_r < 1 {
            return Err(Error::config("system.l_r", "L_R must be >= 1"));
        }
        let checks = [
            ("system.p_max", self.p_max),
            ("system.q", self.q),
            ("system.n0", self.n0),
            ("system.gamma_th", self.gamma_th),
        ];
        for (path, v) in checks {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(path, format!("must be > 0, got {v}")));
            }
        }
        // p_p = 0 is the noise-only link
        if !(self.p_p >= 0.0 && self.p_p.is_finite()) {
            return Err(Error::config("system.p_p", format!("must be >= 0, got {}", self.p_p)));
        }
        Ok(())
    }

    /// Checks that the stats carry one mean per primary node.
    pub fn validate_with(&self, stats: &LinkStats) -> Result<()> {
        self.validate()?;
        if stats.l_t() != self.l_t as usize {
            return Err(Error::config(
                "means.z_per_pt",
                format!("{} entries for L_T = {}", stats.l_t(), self.l_t),
            ));
        }
        if stats.l_r() != self.l_r as usize {
            return Err(Error::config(
                "means.y_per_pr",
                format!("{} entries for L_R = {}", stats.l_r(), self.l_r),
            ));
        }
        Ok(())
    }

    /// Shape of the Erlang-distributed effective ZF gain, `N − M + 1`.
    pub fn zf_diversity(&self) -> u32 {
        self.n - self.m + 1
    }
}

/// Lagrange multiplier and the quantities derived from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerSolution {
    pub lambda: f64,
    /// Activation threshold `C`: streams with `X_i ≤ C` stay silent.
    pub c_threshold: f64,
    /// `min{Q/(M E[Y]), p_max/M}`.
    pub target_mean_power: f64,
    /// `λ/(ln2 · E[Y])`, the water level.
    pub slope: f64,
    /// `p_p E[Z] + N₀`.
    pub offset: f64,
}

impl PowerSolution {
    pub fn from_lambda(lambda: f64, config: &SystemConfig, stats: &LinkStats) -> Self {
        let ey = stats.mean_y();
        let offset = config.p_p * stats.mean_z() + config.n0;
        PowerSolution {
            lambda,
            c_threshold: LN_2 * (ey * config.n0 + config.p_p * ey * stats.mean_z()) / lambda,
            target_mean_power: conventional_power(config, stats),
            slope: lambda / (LN_2 * ey),
            offset,
        }
    }
}

/// Fixed per-stream power `min{Q/(M E[Y]), p_max/M}`.
pub fn conventional_power(config: &SystemConfig, stats: &LinkStats) -> f64 {
    let m = config.m as f64;
    (config.q / (m * stats.mean_y())).min(config.p_max / m)
}

/// Large-`N` limit of `p*`; coincides with [`conventional_power`].
pub fn asymptotic_power(config: &SystemConfig, stats: &LinkStats) -> f64 {
    conventional_power(config, stats)
}

/// Large-`N` limit of λ: `min{ln2·Q/M, ln2·E[Y]·p_max/M}`.
pub fn asymptotic_lambda(config: &SystemConfig, stats: &LinkStats) -> f64 {
    let m = config.m as f64;
    (LN_2 * config.q / m).min(LN_2 * stats.mean_y() * config.p_max / m)
}

pub fn optimal_power(x_i: f64, sol: &PowerSolution) -> f64 {
    if x_i <= 0.0 {
        return 0.0;
    }
    (sol.slope - sol.offset / x_i).max(0.0)
}

/// `E_X[p*(X)]` in closed form for `X ~ Erlang(N−M+1, E[X])`.
///
/// With `c = C/E[X]` and `n = N − M`:
/// `N > M`: `(1/Γ(n+1)) [λ Γ(n+1, c)/(ln2 E[Y]) − (p_p E[Z] + N₀) Γ(n, c)/E[X]]`,
/// `N = M`: `e^{−c} λ/(ln2 E[Y]) − (p_p E[Z] + N₀) Γ(0, c)/E[X]`.
///
/// Since `(p_p E[Z] + N₀)/E[X] = c λ/(ln2 E[Y])`, the bracket collapses to
/// `e^{−c} Σ_{j<n} (c^j/j!)(1 − j/n)` for `n ≥ 1` and to `E₂(c)` for
/// `n = 0`. Both are evaluated without the subtraction, which loses every
/// digit once `c` is large.
pub fn mean_power_closed_form(lambda: f64, config: &SystemConfig, stats: &LinkStats) -> Result<f64> {
    let sol = PowerSolution::from_lambda(lambda, config, stats);
    let c = sol.c_threshold / stats.mean_x;
    let n = config.n - config.m;
    let fraction = if n == 0 {
        (-c).exp() * specfun::exp_integral_e2_scaled(c)?
    } else if c == 0.0 {
        1.0
    } else {
        let lc = c.ln();
        let nf = n as f64;
        let terms: Vec<f64> = (0..n)
            .map(|j| j as f64 * lc - specfun::ln_factorial(j) + ((nf - j as f64) / nf).ln())
            .collect();
        let peak = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = terms.iter().map(|t| (t - peak).exp()).sum();
        (peak + sum.ln() - c).exp()
    };
    Ok(sol.slope * fraction)
}

/// Literal two-term form of [`mean_power_closed_form`], kept for tests.
#[cfg(test)]
fn mean_power_two_terms(lambda: f64, config: &SystemConfig, stats: &LinkStats) -> f64 {
    let sol = PowerSolution::from_lambda(lambda, config, stats);
    let ex = stats.mean_x;
    let c = sol.c_threshold / ex;
    let n = config.n - config.m;
    if n > 0 {
        let fact = specfun::gamma(n + 1).unwrap();
        (sol.slope * specfun::upper_incomplete_gamma(n + 1, c).unwrap()
            - sol.offset * specfun::upper_incomplete_gamma(n, c).unwrap() / ex)
            / fact
    } else {
        (-c).exp() * sol.slope - sol.offset * specfun::upper_incomplete_gamma(0, c).unwrap() / ex
    }
}

/// Same expectation by adaptive quadrature of
/// `∫_C^∞ (λ/(ln2 E[Y]) − (p_p E[Z] + N₀)/x) f_X(x) dx`.
pub fn mean_power_by_quadrature(
    lambda: f64,
    config: &SystemConfig,
    stats: &LinkStats,
) -> Result<f64> {
    let sol = PowerSolution::from_lambda(lambda, config, stats);
    let ex = stats.mean_x;
    let n = config.n - config.m;
    let ln_norm = specfun::ln_factorial(n) + (n as f64 + 1.0) * ex.ln();
    let density = |x: f64| {
        if x <= 0.0 {
            return 0.0;
        }
        (n as f64 * x.ln() - x / ex - ln_norm).exp()
    };
    let mode = n as f64 * ex;
    let scale = if sol.c_threshold < mode { mode.max(ex) } else { ex };
    let r = quad::integrate_to_infinity(
        |x| (sol.slope - sol.offset / x) * density(x),
        sol.c_threshold,
        scale,
        1e-300,
        1e-13,
    )?;
    Ok(r.value)
}

/// Bisection bracket and cap.
const MAX_BISECTIONS: usize = 200;
const MAX_EXPANSIONS: usize = 60;
/// Relative residual accepted on the mean-power constraint.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Solves `E_X[p*] = min{Q/(M E[Y]), p_max/M}` for λ.
///
/// Bracket starts at `[1e−6, 1e6]` times the large-`N` λ and widens
/// geometrically until it straddles the target. Bisection runs on `ln λ`;
/// every midpoint is checked to lie between the endpoint values.
pub fn solve_lambda(config: &SystemConfig, stats: &LinkStats) -> Result<PowerSolution> {
    config.validate_with(stats)?;
    let target = conventional_power(config, stats);
    let f = |lambda: f64| mean_power_closed_form(lambda, config, stats);
    let anchor = asymptotic_lambda(config, stats);

    let mut lo = anchor * 1e-6;
    let mut hi = anchor * 1e6;
    let mut f_lo = f(lo)?;
    let mut f_hi = f(hi)?;
    let mut expansions = 0;
    while !(f_lo < target && f_hi > target) {
        if expansions == MAX_EXPANSIONS {
            return Err(Error::NoRoot {
                lo,
                hi,
                f_lo,
                f_hi,
                target,
            });
        }
        if f_lo >= target {
            lo *= 1e-3;
            f_lo = f(lo)?;
        }
        if f_hi <= target {
            hi *= 1e3;
            f_hi = f(hi)?;
        }
        expansions += 1;
    }

    for _ in 0..MAX_BISECTIONS {
        let mid = (lo.ln() + 0.5 * (hi.ln() - lo.ln())).exp();
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid)?;
        // the log-sum in the closed form carries ~ε·C/E[X] relative noise,
        // which is large for massive arrays; sized to the exit tolerance
        let slack = RESIDUAL_TOL * target;
        if f_mid < f_lo - slack || f_mid > f_hi + slack {
            return Err(Error::NotMonotone { lambda: mid });
        }
        if f_mid == target {
            lo = mid;
            hi = mid;
            f_lo = f_mid;
            f_hi = f_mid;
            break;
        }
        if f_mid < target {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }
    let (lambda, value) = if (f_lo - target).abs() <= (f_hi - target).abs() {
        (lo, f_lo)
    } else {
        (hi, f_hi)
    };
    if (value - target).abs() > RESIDUAL_TOL * target {
        return Err(Error::NonConvergence {
            what: "lambda bisection",
            iterations: MAX_BISECTIONS,
        });
    }
    Ok(PowerSolution::from_lambda(lambda, config, stats))
}
