//! Per-stream outage probability for the optimal and the fixed power rule,
//! large-array SINR limits, and integrals of the outage curve (ergodic
//! capacity, binary SER).
//!
//! With `a = ln2·E[Y]/(λ E[X])`, `β = a γ p_p`, `δ = a γ N₀ + C/E[X]` and
//! `r_k = βE[Z_k]/(1 + βE[Z_k])` every closed form here is
//!
//! `1 − P_out = Σ_k w_k Σ_{m=0}^{n} Pois(m; δ) · Σ_{j=0}^{n−m} (1 − r_k) r_k^j`
//!
//! i.e. the exp·Γ(l+1, ·) products are folded into a Poisson and a
//! geometric (negative-binomial for co-located PTs) weight, each evaluated
//! from logarithms. No term can overflow.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypoexp;
use crate::linkstats::LinkStats;
use crate::powalloc::{conventional_power, PowerSolution, SystemConfig};
use crate::quad;
use crate::specfun;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutageBranch {
    General,
    EqualAntennas,
    IidPts,
    IidPtsEqualAntennas,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutageResult {
    pub p_out: f64,
    pub branch: OutageBranch,
    pub lambda_used: f64,
    pub c_used: f64,
}

/// Outage kernel parameters for one threshold.
#[derive(Debug, Clone, Copy)]
struct Kernel {
    /// Shape offset `n = N − M`.
    n: u32,
    beta: f64,
    delta: f64,
}

impl Kernel {
    /// `a` is the reciprocal water level scaled by `E[X]`, `c0 = C/E[X]`.
    fn new(config: &SystemConfig, a: f64, c0: f64, gamma_th: f64) -> Self {
        Kernel {
            n: config.n - config.m,
            beta: a * gamma_th * config.p_p,
            delta: a * gamma_th * config.n0 + c0,
        }
    }

    fn optimal(config: &SystemConfig, stats: &LinkStats, sol: &PowerSolution, gamma_th: f64) -> Self {
        let a = 1.0 / (sol.slope * stats.mean_x);
        Kernel::new(config, a, sol.c_threshold / stats.mean_x, gamma_th)
    }

    fn fixed(config: &SystemConfig, stats: &LinkStats, p: f64, gamma_th: f64) -> Self {
        Kernel::new(config, 1.0 / (p * stats.mean_x), 0.0, gamma_th)
    }
}

/// `ln Pois(m; δ)` for `m = 0..=n`.
fn ln_poisson(n: u32, delta: f64) -> Vec<f64> {
    if delta == 0.0 {
        return (0..=n).map(|m| if m == 0 { 0.0 } else { f64::NEG_INFINITY }).collect();
    }
    let ld = delta.ln();
    (0..=n)
        .map(|m| -delta + m as f64 * ld - specfun::ln_factorial(m))
        .collect()
}

/// Cumulative negative-binomial mass `Pr[S ≤ j]`, `S ~ NB(shape, r)`,
/// for `j = 0..=n`.
fn nb_cdf(n: u32, shape: u32, r: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n as usize + 1);
    if r == 0.0 {
        out.resize(n as usize + 1, 1.0);
        return out;
    }
    let ln_r = r.ln();
    let ln_q = (-r).ln_1p();
    let mut acc = 0.0;
    for s in 0..=n {
        let ln_pmf = specfun::ln_binomial(s + shape - 1, s) + s as f64 * ln_r + shape as f64 * ln_q;
        acc += ln_pmf.exp();
        out.push(acc.min(1.0));
    }
    out
}

/// `Σ_m Pois(m; δ) · Pr[S ≤ n − m]` for one interference component.
fn mixture(k: &Kernel, shape: u32, mean_z: f64) -> f64 {
    let bm = k.beta * mean_z;
    let r = bm / (1.0 + bm);
    let pois = ln_poisson(k.n, k.delta);
    let cdf = nb_cdf(k.n, shape, r);
    (0..=k.n as usize)
        .map(|m| pois[m].exp() * cdf[k.n as usize - m])
        .sum()
}

/// Success probability with i.n.i.d. PT→SR links via partial fractions.
fn success_general(k: &Kernel, means: &[f64]) -> f64 {
    if k.beta == 0.0 {
        return specfun::regularized_upper_gamma(k.n + 1, k.delta).unwrap_or(0.0);
    }
    let m = hypoexp::untie(means);
    let w = hypoexp::weights(&m);
    w.iter().zip(&m).map(|(wk, mu)| wk * mixture(k, 1, *mu)).sum()
}

/// Single-exponential-sum form valid when `N = M`.
fn success_equal_antennas(k: &Kernel, means: &[f64]) -> f64 {
    let m = hypoexp::untie(means);
    let w = hypoexp::weights(&m);
    (-k.delta).exp()
        * w
            .iter()
            .zip(&m)
            .map(|(wk, mu)| wk / (1.0 + k.beta * mu))
            .sum::<f64>()
}

/// Co-located PTs: `Z ~ Gamma(L_T, E[Z_iid])`.
fn success_iid(k: &Kernel, l_t: u32, mean_z: f64) -> f64 {
    mixture(k, l_t, mean_z)
}

fn success_iid_equal_antennas(k: &Kernel, l_t: u32, mean_z: f64) -> f64 {
    (-k.delta).exp() / (1.0 + k.beta * mean_z).powi(l_t as i32)
}

fn result(success: f64, branch: OutageBranch, sol: &PowerSolution) -> OutageResult {
    OutageResult {
        p_out: (1.0 - success).clamp(0.0, 1.0),
        branch,
        lambda_used: sol.lambda,
        c_used: sol.c_threshold,
    }
}

/// CDF of the received power `p*·X` at `x ≥ 0`.
pub fn received_power_cdf(
    x: f64,
    sol: &PowerSolution,
    config: &SystemConfig,
    stats: &LinkStats,
) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::domain(format!("x = {x} must be non-negative")));
    }
    let u = x / (sol.slope * stats.mean_x) + sol.c_threshold / stats.mean_x;
    let q = specfun::regularized_upper_gamma(config.n - config.m + 1, u)?;
    Ok((1.0 - q).clamp(0.0, 1.0))
}

/// Double-sum closed form over `l ∈ [0, N−M]` and the PT index.
pub fn outage_general(config: &SystemConfig, stats: &LinkStats, sol: &PowerSolution) -> Result<OutageResult> {
    config.validate_with(stats)?;
    let k = Kernel::optimal(config, stats, sol, config.gamma_th);
    Ok(result(success_general(&k, &stats.mean_z_per_pt), OutageBranch::General, sol))
}

pub fn outage_equal_antennas(
    config: &SystemConfig,
    stats: &LinkStats,
    sol: &PowerSolution,
) -> Result<OutageResult> {
    config.validate_with(stats)?;
    if config.m != config.n {
        return Err(Error::precondition(format!(
            "equal-antenna form needs M = N, got M = {}, N = {}",
            config.m, config.n
        )));
    }
    let k = Kernel::optimal(config, stats, sol, config.gamma_th);
    Ok(result(
        success_equal_antennas(&k, &stats.mean_z_per_pt),
        OutageBranch::EqualAntennas,
        sol,
    ))
}

/// Co-located (i.i.d.) PT antennas; collapses to a single term when `M = N`.
pub fn outage_iid_pts(config: &SystemConfig, stats: &LinkStats, sol: &PowerSolution) -> Result<OutageResult> {
    config.validate_with(stats)?;
    if !stats.iid_z {
        return Err(Error::precondition("co-located form needs identical E[Z_k]"));
    }
    let k = Kernel::optimal(config, stats, sol, config.gamma_th);
    let mu = stats.mean_z_per_pt[0];
    if config.m == config.n {
        Ok(result(
            success_iid_equal_antennas(&k, config.l_t, mu),
            OutageBranch::IidPtsEqualAntennas,
            sol,
        ))
    } else {
        Ok(result(success_iid(&k, config.l_t, mu), OutageBranch::IidPts, sol))
    }
}

/// Co-located PTs through the double sum, also when `M = N`.
pub fn outage_iid_pts_series(config: &SystemConfig, stats: &LinkStats, sol: &PowerSolution) -> Result<OutageResult> {
    config.validate_with(stats)?;
    if !stats.iid_z {
        return Err(Error::precondition("co-located form needs identical E[Z_k]"));
    }
    let k = Kernel::optimal(config, stats, sol, config.gamma_th);
    Ok(result(success_iid(&k, config.l_t, stats.mean_z_per_pt[0]), OutageBranch::IidPts, sol))
}

/// Picks the most specific closed form that applies.
pub fn outage_probability(
    config: &SystemConfig,
    stats: &LinkStats,
    sol: &PowerSolution,
) -> Result<OutageResult> {
    if stats.iid_z {
        outage_iid_pts(config, stats, sol)
    } else if config.m == config.n {
        outage_equal_antennas(config, stats, sol)
    } else {
        outage_general(config, stats, sol)
    }
}

/// Outage of the dispatcher's branch at an arbitrary threshold.
pub fn outage_at_threshold(
    gamma_th: f64,
    config: &SystemConfig,
    stats: &LinkStats,
    sol: &PowerSolution,
) -> Result<f64> {
    let cfg = SystemConfig { gamma_th, ..*config };
    Ok(outage_probability(&cfg, stats, sol)?.p_out)
}

fn success_any(k: &Kernel, config: &SystemConfig, stats: &LinkStats) -> f64 {
    if stats.iid_z {
        if config.m == config.n {
            success_iid_equal_antennas(k, config.l_t, stats.mean_z_per_pt[0])
        } else {
            success_iid(k, config.l_t, stats.mean_z_per_pt[0])
        }
    } else if config.m == config.n {
        success_equal_antennas(k, &stats.mean_z_per_pt)
    } else {
        success_general(k, &stats.mean_z_per_pt)
    }
}

/// Outage with the fixed per-stream power `min{Q/(M E[Y]), p_max/M}`.
pub fn outage_conventional(config: &SystemConfig, stats: &LinkStats) -> Result<f64> {
    config.validate_with(stats)?;
    let p = conventional_power(config, stats);
    let k = Kernel::fixed(config, stats, p, config.gamma_th);
    Ok((1.0 - success_any(&k, config, stats)).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AsymptoticCase {
    /// `N → ∞` with `M`, `L_T` finite.
    RxMassive,
    /// `M, N, L_T → ∞`, `N/M` fixed.
    BothMassiveLtMassive,
    /// `M, N → ∞`, `N/M` fixed, `L_T` finite.
    BothMassiveLtFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticSinr {
    /// Limiting SINR; `+∞` for [`AsymptoticCase::RxMassive`].
    pub value: f64,
    /// Finite value before the limit, where one exists.
    pub pre_limit: Option<f64>,
}

/// Channel-hardened SINR limits. `z_realization` is the PT→SR gain sum
/// `Z` and is needed for the cases where it does not harden.
pub fn asymptotic_sinr(
    case: AsymptoticCase,
    config: &SystemConfig,
    stats: &LinkStats,
    sol: &PowerSolution,
    z_realization: Option<f64>,
) -> Result<AsymptoticSinr> {
    let gain = sol.slope * stats.mean_x * config.zf_diversity() as f64;
    let need_z = || {
        z_realization
            .filter(|z| *z >= 0.0)
            .ok_or_else(|| Error::precondition("this case needs a non-negative Z realization"))
    };
    match case {
        AsymptoticCase::RxMassive => {
            let z = need_z()?;
            Ok(AsymptoticSinr {
                value: f64::INFINITY,
                pre_limit: Some(gain / (config.p_p * z + config.n0)),
            })
        }
        AsymptoticCase::BothMassiveLtMassive => {
            let trace: f64 = stats.mean_z_per_pt.iter().sum();
            let denom = config.p_p / stats.l_t() as f64 * trace;
            Ok(AsymptoticSinr {
                value: gain / denom,
                pre_limit: None,
            })
        }
        AsymptoticCase::BothMassiveLtFinite => {
            let z = need_z()?;
            let denom = config.p_p * z + config.n0;
            let kappa = config.n as f64 / config.m as f64;
            let ey = stats.mean_y();
            let value = config.q.min(ey * config.p_max) * stats.mean_x / ey * (kappa - 1.0) / denom;
            Ok(AsymptoticSinr {
                value,
                pre_limit: Some(gain / denom),
            })
        }
    }
}

/// `log₂(1 + SINR)` at the hardened SINR with `L_T → ∞`.
pub fn deterministic_rate(config: &SystemConfig, stats: &LinkStats, sol: &PowerSolution) -> Result<f64> {
    let s = asymptotic_sinr(AsymptoticCase::BothMassiveLtMassive, config, stats, sol, None)?;
    Ok((1.0 + s.value).log2())
}

/// Rough SINR scale used to place the quadrature knee.
fn sinr_scale(config: &SystemConfig, stats: &LinkStats, sol: &PowerSolution) -> f64 {
    let typical = sol.slope * stats.mean_x * config.zf_diversity() as f64
        / (config.p_p * stats.mean_z() + config.n0);
    typical.max(1e-3)
}

/// `(1/ln2) ∫₀^∞ (1 − P_out(x))/(1 + x) dx` in bps/Hz.
pub fn ergodic_capacity(config: &SystemConfig, stats: &LinkStats, sol: &PowerSolution) -> Result<f64> {
    config.validate_with(stats)?;
    let integrand = |x: f64| {
        let k = Kernel::optimal(config, stats, sol, x);
        success_any(&k, config, stats) / (1.0 + x)
    };
    let r = quad::integrate_to_infinity(integrand, 0.0, sinr_scale(config, stats, sol), 1e-6 * LN_2, 1e-9)?;
    Ok(r.value / LN_2)
}

/// `(A√B/(2√π)) ∫₀^∞ e^{−Bx} x^{−1/2} P_out(x) dx`, integrated in `t = √x`.
pub fn average_ser_binary(
    config: &SystemConfig,
    stats: &LinkStats,
    sol: &PowerSolution,
    a: f64,
    b: f64,
) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::domain("modulation constants must be positive"));
    }
    config.validate_with(stats)?;
    let integrand = |t: f64| {
        let x = t * t;
        let k = Kernel::optimal(config, stats, sol, x);
        let p_out = (1.0 - success_any(&k, config, stats)).clamp(0.0, 1.0);
        2.0 * (-b * x).exp() * p_out
    };
    let r = quad::integrate_to_infinity(integrand, 0.0, 1.0 / b.sqrt(), 1e-14, 1e-10)?;
    Ok((a * b.sqrt() / (2.0 * PI.sqrt()) * r.value).clamp(0.0, a / 2.0))
}
