//! Interference leakage at the primary receivers and the iterative
//! antenna reduction that keeps it below a target probability.

use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypoexp;
use crate::linkstats::LinkStats;
use crate::outage::outage_probability;
use crate::powalloc::{optimal_power, solve_lambda, PowerSolution, SystemConfig};
use crate::rng::{self, substream};

/// `Pr[min_j Σ_i p_i |y_j^(i)|² > Q]` given per-antenna powers.
///
/// Each PR contributes the tail of a sum of exponentials with means
/// `p_i · E[|Y_j|²]`; the PRs are independent so the tails multiply.
/// Zero-power antennas are dropped first.
pub fn leakage_probability(powers: &[f64], mean_y_per_pr: &[f64], q: f64) -> Result<f64> {
    if !(q > 0.0) {
        return Err(Error::domain(format!("Q = {q} must be positive")));
    }
    if powers.iter().any(|&p| !(p >= 0.0 && p.is_finite())) {
        return Err(Error::domain("powers must be finite and non-negative"));
    }
    let active: Vec<f64> = powers.iter().copied().filter(|&p| p > 0.0).collect();
    if active.is_empty() {
        return Ok(0.0);
    }
    let mut prob = 1.0;
    for &mu in mean_y_per_pr {
        let means: Vec<f64> = active.iter().map(|p| p * mu).collect();
        prob *= hypoexp::ccdf(q, &means);
    }
    Ok(prob.clamp(0.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeakageReport {
    /// `(active antennas, leakage probability)` in evaluation order.
    pub steps: Vec<(usize, f64)>,
    pub m_effective: usize,
    pub suspended: bool,
    /// Antenna indices still on, ascending.
    pub active: Vec<usize>,
}

/// Switches antennas off one at a time until the leakage probability is
/// at most `t_g`. The antenna removed is the one with the largest average
/// interference `p_i · max_j E[|Y_j|²]`, lowest index on ties. Powers of
/// the remaining antennas are kept.
pub fn reduce_antennas(
    x_gains: &[f64],
    sol: &PowerSolution,
    config: &SystemConfig,
    stats: &LinkStats,
    t_g: f64,
) -> Result<LeakageReport> {
    if x_gains.len() != config.m as usize {
        return Err(Error::precondition(format!(
            "expected {} gains, got {}",
            config.m,
            x_gains.len()
        )));
    }
    if !(t_g > 0.0 && t_g <= 1.0) {
        return Err(Error::domain(format!("t_g = {t_g} must lie in (0, 1]")));
    }
    let powers: Vec<f64> = x_gains.iter().map(|&x| optimal_power(x, sol)).collect();
    let mut active: Vec<usize> = (0..powers.len()).collect();
    let mut steps = Vec::new();
    while !active.is_empty() {
        let current: Vec<f64> = active.iter().map(|&i| powers[i]).collect();
        let p = leakage_probability(&current, &stats.mean_y_per_pr, config.q)?;
        steps.push((active.len(), p));
        if p <= t_g {
            break;
        }
        // with a common max_j E[|Y_j|²] the ranking is by power alone
        let mut worst = 0;
        for pos in 1..active.len() {
            if powers[active[pos]] > powers[active[worst]] {
                worst = pos;
            }
        }
        active.remove(worst);
    }
    Ok(LeakageReport {
        m_effective: active.len(),
        suspended: active.is_empty(),
        steps,
        active,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AntennaPmf {
    /// `Pr[M_E = l]` for `l = 0..=M`.
    pub pmf: Vec<f64>,
    pub mean_active: f64,
    pub std_error: f64,
    pub trials: u64,
}

/// Draws one gain vector per trial, runs [`reduce_antennas`] and tallies
/// the number of antennas left on.
pub fn antenna_pmf(
    config: &SystemConfig,
    stats: &LinkStats,
    sol: &PowerSolution,
    t_g: f64,
    trials: u64,
    seed: u64,
) -> Result<AntennaPmf> {
    if trials == 0 {
        return Err(Error::domain("trials must be >= 1"));
    }
    config.validate_with(stats)?;
    let m = config.m as usize;
    let erlang = Gamma::new(config.zf_diversity() as f64, stats.mean_x)
        .map_err(|e| Error::domain(e.to_string()))?;
    let counts = rng::chunked(
        trials,
        || Ok(vec![0u64; m + 1]),
        |t, acc: &mut Result<Vec<u64>>| {
            let Ok(counts) = acc else { return };
            let mut r = rng::trial_rng(seed, substream::ANTENNAS, t);
            let x: Vec<f64> = (0..m).map(|_| erlang.sample(&mut r)).collect();
            match reduce_antennas(&x, sol, config, stats, t_g) {
                Ok(rep) => counts[rep.m_effective] += 1,
                Err(e) => *acc = Err(e),
            }
        },
        |a, b| match (a.as_mut(), b) {
            (Ok(x), Ok(y)) => x.iter_mut().zip(y).for_each(|(u, v)| *u += v),
            (Ok(_), Err(e)) => *a = Err(e),
            _ => {}
        },
    )?;
    let n = trials as f64;
    let pmf: Vec<f64> = counts.iter().map(|&c| c as f64 / n).collect();
    let mean_active: f64 = pmf.iter().enumerate().map(|(l, p)| l as f64 * p).sum();
    let second: f64 = pmf.iter().enumerate().map(|(l, p)| (l * l) as f64 * p).sum();
    let var = if trials > 1 {
        ((second - mean_active * mean_active) * n / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(AntennaPmf {
        pmf,
        mean_active,
        std_error: (var / n).sqrt(),
        trials,
    })
}

/// Outage of the reduced array averaged over the antenna count:
/// `Pr[M_E = 0] + Σ_{l≥1} Pr[M_E = l] · P_out(M = l)`, with λ solved anew
/// for every `l`. A suspended link is in outage.
pub fn reduced_outage(config: &SystemConfig, stats: &LinkStats, pmf: &AntennaPmf) -> Result<f64> {
    if pmf.pmf.len() != config.m as usize + 1 {
        return Err(Error::precondition(format!(
            "pmf has {} entries for M = {}",
            pmf.pmf.len(),
            config.m
        )));
    }
    let mut total = pmf.pmf[0];
    for (l, &w) in pmf.pmf.iter().enumerate().skip(1) {
        if w == 0.0 {
            continue;
        }
        let cfg = SystemConfig { m: l as u32, ..*config };
        let sol = solve_lambda(&cfg, stats)?;
        total += w * outage_probability(&cfg, stats, &sol)?.p_out;
    }
    Ok(total.clamp(0.0, 1.0))
}
