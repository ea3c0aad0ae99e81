//! Monte-Carlo reference: full Rayleigh channel matrices, ZF detection,
//! and empirical outage, rate, SER, leakage and power statistics.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::leakage::reduce_antennas;
use crate::linkstats::LinkStats;
use crate::powalloc::{conventional_power, optimal_power, solve_lambda, PowerSolution, SystemConfig};
use crate::rng::{self, substream, Moments};

/// Redraws allowed when a channel matrix is numerically rank deficient.
const MAX_REDRAWS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub trials: u64,
    pub seed: u64,
}

impl McEstimate {
    fn from_moments(m: &Moments, seed: u64) -> Self {
        McEstimate {
            value: m.mean(),
            std_error: m.std_error(),
            trials: m.count,
            seed,
        }
    }

    /// `|value − reference|` in units of the standard error.
    pub fn z_score(&self, reference: f64) -> f64 {
        let d = (self.value - reference).abs();
        if self.std_error == 0.0 {
            return if d == 0.0 { 0.0 } else { f64::INFINITY };
        }
        d / self.std_error
    }
}

/// One realization of every channel in the scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelDraw {
    /// ST→SR, N×M, entry variance `E[X]`.
    pub h: DMatrix<Complex64>,
    /// PT→SR, N×L_T, column `k` variance `E[Z_k]`.
    pub h_p: DMatrix<Complex64>,
    /// `|y_j^(i)|²`, L_R×M.
    pub y: DMatrix<f64>,
}

fn complex_normal(rng: &mut ChaCha8Rng, variance: f64) -> Complex64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(s * re, s * im)
}

fn draw_links(config: &SystemConfig, stats: &LinkStats, rng: &mut ChaCha8Rng) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
    let (n, m, l_t) = (config.n as usize, config.m as usize, stats.l_t());
    let h = DMatrix::from_fn(n, m, |_, _| complex_normal(rng, stats.mean_x));
    let h_p = DMatrix::from_fn(n, l_t, |_, k| complex_normal(rng, stats.mean_z_per_pt[k]));
    (h, h_p)
}

pub fn draw(config: &SystemConfig, stats: &LinkStats, rng: &mut ChaCha8Rng) -> ChannelDraw {
    let (h, h_p) = draw_links(config, stats, rng);
    let y = DMatrix::from_fn(stats.l_r(), config.m as usize, |j, _| {
        let e: f64 = Exp1.sample(rng);
        e * stats.mean_y_per_pr[j]
    });
    ChannelDraw { h, h_p, y }
}

/// Per-stream SINR after ZF with `G = H P^{1/2}` and `G† = (GᴴG)⁻¹Gᴴ`:
/// `1/(p_p ‖[G†]_i H_p‖² + N₀ ‖[G†]_i‖²)`. Streams with zero power are
/// left out of `G` and get SINR 0.
pub fn zf_sinr(draw: &ChannelDraw, powers: &[f64], config: &SystemConfig) -> Result<Vec<f64>> {
    let m = draw.h.ncols();
    if powers.len() != m {
        return Err(Error::precondition(format!("expected {m} powers, got {}", powers.len())));
    }
    let on: Vec<usize> = (0..m).filter(|&i| powers[i] > 0.0).collect();
    let mut out = vec![0.0; m];
    if on.is_empty() {
        return Ok(out);
    }
    let mut g = draw.h.select_columns(&on);
    for (c, &i) in on.iter().enumerate() {
        let s = Complex64::new(powers[i].sqrt(), 0.0);
        g.column_mut(c).iter_mut().for_each(|v| *v *= s);
    }
    let gram = g.adjoint() * &g;
    let inv = gram
        .cholesky()
        .ok_or_else(|| Error::precondition("H P^{1/2} is rank deficient"))?
        .inverse();
    let pinv = inv * g.adjoint();
    let proj = &pinv * &draw.h_p;
    for (r, &i) in on.iter().enumerate() {
        let a: f64 = proj.row(r).iter().map(|v| v.norm_sqr()).sum();
        let b: f64 = pinv.row(r).iter().map(|v| v.norm_sqr()).sum();
        out[i] = 1.0 / (config.p_p * a + config.n0 * b);
    }
    Ok(out)
}

/// Unit-power ZF gains `X_i = ‖[H†]_i‖⁻²` and projected interference
/// `Z_i = ‖[H†]_i H_p‖² / ‖[H†]_i‖²`. `None` if `H` is rank deficient.
pub fn zf_gains(h: &DMatrix<Complex64>, h_p: &DMatrix<Complex64>) -> Option<(Vec<f64>, Vec<f64>)> {
    let gram = h.adjoint() * h;
    let inv = gram.cholesky()?.inverse();
    let pinv = &inv * h.adjoint();
    let proj = pinv * h_p;
    let m = h.ncols();
    let mut x = Vec::with_capacity(m);
    let mut z = Vec::with_capacity(m);
    for i in 0..m {
        let d = inv[(i, i)].re;
        if !(d > 0.0 && d.is_finite()) {
            return None;
        }
        x.push(1.0 / d);
        z.push(proj.row(i).iter().map(|v| v.norm_sqr()).sum::<f64>() / d);
    }
    Some((x, z))
}

fn draw_gains(config: &SystemConfig, stats: &LinkStats, rng: &mut ChaCha8Rng) -> Result<(DMatrix<Complex64>, DMatrix<Complex64>, Vec<f64>, Vec<f64>)> {
    for _ in 0..MAX_REDRAWS {
        let (h, h_p) = draw_links(config, stats, rng);
        if let Some((x, z)) = zf_gains(&h, &h_p) {
            return Ok((h, h_p, x, z));
        }
    }
    Err(Error::NonConvergence {
        what: "full-rank channel draw",
        iterations: MAX_REDRAWS,
    })
}

type Acc = Result<Moments>;

fn merge(a: &mut Acc, b: Acc) {
    match (a.as_mut(), b) {
        (Ok(x), Ok(y)) => x.merge(&y),
        (Ok(_), Err(e)) => *a = Err(e),
        _ => {}
    }
}

/// Averages `metric(X_i, Z_i)` over the streams of each trial and then
/// over trials.
fn stream_average<F>(config: &SystemConfig, stats: &LinkStats, trials: u64, seed: u64, metric: F) -> Result<McEstimate>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    if trials == 0 {
        return Err(Error::domain("trials must be >= 1"));
    }
    config.validate_with(stats)?;
    let m = rng::chunked(
        trials,
        || Ok(Moments::default()),
        |t, acc: &mut Acc| {
            let Ok(mom) = acc else { return };
            let mut r = rng::trial_rng(seed, substream::CHANNEL, t);
            match draw_gains(config, stats, &mut r) {
                Ok((_, _, x, z)) => {
                    let s: f64 = x.iter().zip(&z).map(|(&xi, &zi)| metric(xi, zi)).sum();
                    mom.push(s / x.len() as f64);
                }
                Err(e) => *acc = Err(e),
            }
        },
        merge,
    )?;
    Ok(McEstimate::from_moments(&m, seed))
}

fn sinr(p: f64, x: f64, z: f64, config: &SystemConfig) -> f64 {
    p * x / (config.p_p * z + config.n0)
}

/// Fraction of streams with SINR below `γ_th` under the optimal rule.
pub fn empirical_outage(
    config: &SystemConfig,
    stats: &LinkStats,
    sol: &PowerSolution,
    trials: u64,
    seed: u64,
) -> Result<McEstimate> {
    let g = config.gamma_th;
    stream_average(config, stats, trials, seed, |x, z| {
        let s = sinr(optimal_power(x, sol), x, z, config);
        if s < g {
            1.0
        } else {
            0.0
        }
    })
}

/// Same with the fixed per-stream power.
pub fn empirical_outage_conventional(config: &SystemConfig, stats: &LinkStats, trials: u64, seed: u64) -> Result<McEstimate> {
    let p = conventional_power(config, stats);
    let g = config.gamma_th;
    stream_average(config, stats, trials, seed, |x, z| {
        if sinr(p, x, z, config) < g {
            1.0
        } else {
            0.0
        }
    })
}

/// `E[log₂(1 + SINR)]` per stream.
pub fn empirical_rate(
    config: &SystemConfig,
    stats: &LinkStats,
    sol: &PowerSolution,
    trials: u64,
    seed: u64,
) -> Result<McEstimate> {
    stream_average(config, stats, trials, seed, |x, z| {
        sinr(optimal_power(x, sol), x, z, config).ln_1p() / std::f64::consts::LN_2
    })
}

/// Binary-modulation error rate `E[(A/2) erfc(√(B·SINR))]`.
pub fn empirical_ser(
    config: &SystemConfig,
    stats: &LinkStats,
    sol: &PowerSolution,
    a: f64,
    b: f64,
    trials: u64,
    seed: u64,
) -> Result<McEstimate> {
    stream_average(config, stats, trials, seed, |x, z| {
        let s = sinr(optimal_power(x, sol), x, z, config);
        0.5 * a * statrs::function::erf::erfc((b * s).sqrt())
    })
}

/// Outage with and without antenna reduction, on common channel draws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedOutage {
    pub fixed: McEstimate,
    pub reduced: McEstimate,
    pub mean_active: f64,
}

/// For each draw: the fixed-`M` outage fraction, and the outage fraction
/// of the array left on by the reduction. The kept array is treated as an
/// `M_E`-stream link: ZF is recomputed on the kept columns and the powers
/// come from λ re-solved for `M = M_E`. A suspended draw counts as outage.
pub fn empirical_outage_reduced(
    config: &SystemConfig,
    stats: &LinkStats,
    sol: &PowerSolution,
    t_g: f64,
    trials: u64,
    seed: u64,
) -> Result<ReducedOutage> {
    if trials == 0 {
        return Err(Error::domain("trials must be >= 1"));
    }
    config.validate_with(stats)?;
    let g = config.gamma_th;
    let kept_solutions = (1..=config.m)
        .map(|l| solve_lambda(&SystemConfig { m: l, ..*config }, stats))
        .collect::<Result<Vec<_>>>()?;
    type Triple = Result<(Moments, Moments, Moments)>;
    let acc = rng::chunked(
        trials,
        || Ok((Moments::default(), Moments::default(), Moments::default())),
        |t, acc: &mut Triple| {
            let Ok((fixed, reduced, active)) = acc else { return };
            let mut r = rng::trial_rng(seed, substream::CHANNEL, t);
            let mut step = || -> Result<(f64, f64, usize)> {
                let (h, h_p, x, z) = draw_gains(config, stats, &mut r)?;
                let powers: Vec<f64> = x.iter().map(|&xi| optimal_power(xi, sol)).collect();
                let out_fixed = x
                    .iter()
                    .zip(&z)
                    .zip(&powers)
                    .filter(|((&xi, &zi), &p)| sinr(p, xi, zi, config) < g)
                    .count() as f64
                    / x.len() as f64;
                let rep = reduce_antennas(&x, sol, config, stats, t_g)?;
                if rep.suspended {
                    return Ok((out_fixed, 1.0, 0));
                }
                let hs = h.select_columns(&rep.active);
                let (xs, zs) = zf_gains(&hs, &h_p)
                    .ok_or_else(|| Error::precondition("column subset lost rank"))?;
                let kept_sol = &kept_solutions[rep.m_effective - 1];
                let outs = xs
                    .iter()
                    .zip(&zs)
                    .filter(|(&xi, &zi)| sinr(optimal_power(xi, kept_sol), xi, zi, config) < g)
                    .count() as f64;
                Ok((out_fixed, outs / rep.active.len() as f64, rep.m_effective))
            };
            match step() {
                Ok((f, red, k)) => {
                    fixed.push(f);
                    reduced.push(red);
                    active.push(k as f64);
                }
                Err(e) => *acc = Err(e),
            }
        },
        |a, b| match (a.as_mut(), b) {
            (Ok(x), Ok(y)) => {
                x.0.merge(&y.0);
                x.1.merge(&y.1);
                x.2.merge(&y.2);
            }
            (Ok(_), Err(e)) => *a = Err(e),
            _ => {}
        },
    )?;
    Ok(ReducedOutage {
        fixed: McEstimate::from_moments(&acc.0, seed),
        reduced: McEstimate::from_moments(&acc.1, seed),
        mean_active: acc.2.mean(),
    })
}

/// Frequency of `min_j Σ_i p_i |y_j^(i)|² > Q` over exponential draws.
pub fn empirical_leakage(powers: &[f64], mean_y_per_pr: &[f64], q: f64, trials: u64, seed: u64) -> Result<McEstimate> {
    if trials == 0 {
        return Err(Error::domain("trials must be >= 1"));
    }
    if mean_y_per_pr.is_empty() {
        return Err(Error::domain("need at least one primary receiver"));
    }
    let m = rng::chunked(
        trials,
        Moments::default,
        |t, mom: &mut Moments| {
            let mut r = rng::trial_rng(seed, substream::LEAKAGE, t);
            let mut min = f64::INFINITY;
            for &mu in mean_y_per_pr {
                let s: f64 = powers
                    .iter()
                    .map(|&p| {
                        let e: f64 = Exp1.sample(&mut r);
                        p * mu * e
                    })
                    .sum();
                min = min.min(s);
            }
            mom.push(if min > q { 1.0 } else { 0.0 });
        },
        |a, b| a.merge(&b),
    );
    Ok(McEstimate::from_moments(&m, seed))
}

/// Mean of `p*(X)` over direct Erlang draws of `X`.
pub fn empirical_mean_power(
    config: &SystemConfig,
    stats: &LinkStats,
    sol: &PowerSolution,
    trials: u64,
    seed: u64,
) -> Result<McEstimate> {
    if trials == 0 {
        return Err(Error::domain("trials must be >= 1"));
    }
    let erlang = Gamma::new(config.zf_diversity() as f64, stats.mean_x).map_err(|e| Error::domain(e.to_string()))?;
    let m = rng::chunked(
        trials,
        Moments::default,
        |t, mom: &mut Moments| {
            let mut r = rng::trial_rng(seed, substream::ERLANG, t);
            mom.push(optimal_power(erlang.sample(&mut r), sol));
        },
        |a, b| a.merge(&b),
    );
    Ok(McEstimate::from_moments(&m, seed))
}

/// Two-sample Kolmogorov–Smirnov statistic and asymptotic p-value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

pub fn ks_two_sample(a: &mut [f64], b: &mut [f64]) -> KsResult {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len(), b.len());
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0f64;
    while i < n && j < m {
        let v = a[i].min(b[j]);
        while i < n && a[i] <= v {
            i += 1;
        }
        while j < m && b[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let en = ((n * m) as f64 / (n + m) as f64).sqrt();
    KsResult {
        statistic: d,
        p_value: kolmogorov_q((en + 0.12 + 0.11 / en) * d),
    }
}

/// Kolmogorov tail `2 Σ_{k≥1} (−1)^{k−1} e^{−2k²x²}`.
fn kolmogorov_q(x: f64) -> f64 {
    if x < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * x * x).exp();
        sum += sign * term;
        if term < 1e-17 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainLawCheck {
    /// ZF gain of stream 0 against Erlang(N−M+1, E[X]).
    pub gain: KsResult,
    /// Projected interference of stream 0 against the exponential sum.
    pub interference: KsResult,
}

/// Compares full-ZF statistics of stream 0 with direct samples of their
/// claimed laws.
pub fn gain_distribution_check(config: &SystemConfig, stats: &LinkStats, trials: u64, seed: u64) -> Result<GainLawCheck> {
    config.validate_with(stats)?;
    if trials < 2 {
        return Err(Error::domain("need at least two trials"));
    }
    let erlang = Gamma::new(config.zf_diversity() as f64, stats.mean_x).map_err(|e| Error::domain(e.to_string()))?;
    let n = trials as usize;
    let mut zf_x = Vec::with_capacity(n);
    let mut zf_z = Vec::with_capacity(n);
    for t in 0..trials {
        let mut r = rng::trial_rng(seed, substream::CHANNEL, t);
        let (_, _, x, z) = draw_gains(config, stats, &mut r)?;
        zf_x.push(x[0]);
        zf_z.push(z[0]);
    }
    let mut ref_x = Vec::with_capacity(n);
    let mut ref_z = Vec::with_capacity(n);
    for t in 0..trials {
        let mut r = rng::trial_rng(seed, substream::REFERENCE, t);
        ref_x.push(erlang.sample(&mut r));
        let z: f64 = stats
            .mean_z_per_pt
            .iter()
            .map(|&mu| {
                let e: f64 = Exp1.sample(&mut r);
                mu * e
            })
            .sum();
        ref_z.push(z);
    }
    Ok(GainLawCheck {
        gain: ks_two_sample(&mut zf_x, &mut ref_x),
        interference: ks_two_sample(&mut zf_z, &mut ref_z),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linkstats::LinkStats;
    use crate::powalloc::solve_lambda;
    use rand::Rng;

    fn cfg(m: u32, n: u32, l_t: u32) -> SystemConfig {
        SystemConfig {
            m,
            n,
            l_t,
            l_r: 1,
            p_p: 10.0,
            p_max: 100.0,
            q: 5.0,
            n0: 1.0,
            gamma_th: 2.0,
        }
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn scalar_zf() {
        let mut config = cfg(1, 1, 1);
        config.p_p = 0.0;
        let d = ChannelDraw {
            h: DMatrix::from_element(1, 1, c(1.0, 1.0)),
            h_p: DMatrix::from_element(1, 1, c(0.3, 0.0)),
            y: DMatrix::from_element(1, 1, 1.0),
        };
        let s = zf_sinr(&d, &[4.0], &config).unwrap();
        assert!((s[0] - 8.0).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_columns_decouple() {
        let mut config = cfg(2, 3, 1);
        config.p_p = 0.0;
        let h = DMatrix::from_row_slice(3, 2, &[c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.5), c(0.0, 0.0), c(0.0, 0.0)]);
        let d = ChannelDraw {
            h,
            h_p: DMatrix::from_element(3, 1, c(1.0, 0.0)),
            y: DMatrix::from_element(1, 2, 1.0),
        };
        let s = zf_sinr(&d, &[3.0, 0.5], &config).unwrap();
        assert!((s[0] - 3.0 * 4.0).abs() < 1e-12);
        assert!((s[1] - 0.5 * 2.25).abs() < 1e-12);
        let s = zf_sinr(&d, &[3.0, 0.0], &config).unwrap();
        assert_eq!(s[1], 0.0);
    }

    #[test]
    fn pseudo_inverse_matches_svd_oracle_and_identity_holds() {
        let config = cfg(2, 4, 2);
        let stats = LinkStats::new(1.3, vec![1.0], vec![0.4, 0.9]).unwrap();
        for t in 0..20 {
            let mut r = rng::trial_rng(5, 77, t);
            let d = draw(&config, &stats, &mut r);
            let powers = [0.7, 2.1];
            let s = zf_sinr(&d, &powers, &config).unwrap();
            let mut g = d.h.clone();
            for (i, &p) in powers.iter().enumerate() {
                g.column_mut(i).iter_mut().for_each(|v| *v *= c(p.sqrt(), 0.0));
            }
            let pinv = g.clone().pseudo_inverse(1e-14).unwrap();
            for i in 0..2 {
                let row = pinv.row(i);
                let b: f64 = row.iter().map(|v| v.norm_sqr()).sum();
                let a: f64 = (row * &d.h_p).iter().map(|v| v.norm_sqr()).sum();
                let oracle = 1.0 / (config.p_p * a + config.n0 * b);
                assert!((s[i] / oracle - 1.0).abs() < 1e-10);
                assert!((s[i] * (config.p_p * a + config.n0 * b) - 1.0).abs() < 1e-12);
            }
            // fast gains reproduce the same SINR
            let (x, z) = zf_gains(&d.h, &d.h_p).unwrap();
            for i in 0..2 {
                let fast = powers[i] * x[i] / (config.p_p * z[i] + config.n0);
                assert!((fast / s[i] - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn huge_threshold_always_outage_and_zero_power_zero_rate() {
        let mut config = cfg(2, 3, 1);
        let stats = LinkStats::new(1.0, vec![1.0], vec![1.0]).unwrap();
        let sol = solve_lambda(&config, &stats).unwrap();
        config.gamma_th = 1e12;
        let e = empirical_outage(&config, &stats, &sol, 2000, 1).unwrap();
        assert_eq!(e.value, 1.0);
        let dead = PowerSolution::from_lambda(1e-300, &config, &stats);
        let r = empirical_rate(&config, &stats, &dead, 2000, 1).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn noise_only_massive_rx_has_tiny_outage() {
        let mut config = cfg(2, 40, 1);
        config.p_p = 0.0;
        config.gamma_th = 1.0;
        let stats = LinkStats::new(1.0, vec![1.0], vec![1.0]).unwrap();
        let sol = solve_lambda(&config, &stats).unwrap();
        let e = empirical_outage(&config, &stats, &sol, 20_000, 4).unwrap();
        // X < (γN₀ + N₀)/slope has Erlang(39) probability far below 1e−3
        let thr = (config.gamma_th * config.n0 + sol.offset) / sol.slope;
        let tail = 1.0 - crate::specfun::regularized_upper_gamma(config.zf_diversity(), thr / stats.mean_x).unwrap();
        assert!(tail < 1e-3);
        assert!(e.value < 1e-3);
    }

    #[test]
    fn ks_detects_shift_and_accepts_same_law() {
        let mut a: Vec<f64> = (0..5000).map(|t| rng::trial_rng(1, 0, t).random::<f64>()).collect();
        let mut b: Vec<f64> = (0..5000).map(|t| rng::trial_rng(2, 0, t).random::<f64>()).collect();
        assert!(ks_two_sample(&mut a, &mut b).p_value > 0.01);
        let mut c: Vec<f64> = b.iter().map(|v| v + 0.1).collect();
        assert!(ks_two_sample(&mut a, &mut c).p_value < 1e-6);
    }

    #[test]
    fn leakage_frequency_matches_anchor() {
        let e = empirical_leakage(&[1.0], &[1.0], 1.0, 100_000, 3).unwrap();
        assert!(e.z_score((-1.0f64).exp()) < 4.0);
        let e = empirical_leakage(&[1.0], &[1.0], 1e-12, 1000, 3).unwrap();
        assert_eq!(e.value, 1.0);
    }

    #[test]
    fn identical_seed_identical_bits() {
        let config = cfg(2, 3, 2);
        let stats = LinkStats::new(1.0, vec![1.0], vec![0.3, 0.6]).unwrap();
        let sol = solve_lambda(&config, &stats).unwrap();
        let a = empirical_outage(&config, &stats, &sol, 5000, 8).unwrap();
        let b = empirical_outage(&config, &stats, &sol, 5000, 8).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
    }
}
