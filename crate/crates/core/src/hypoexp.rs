//! Sums of independent exponentials with (nominally) distinct means.
//!
//! The partial-fraction form `f(z) = Σ_k w_k e^{−z/μ_k}/μ_k` with
//! `w_k = Π_{j≠k} μ_k/(μ_k − μ_j)` is undefined at ties. Means that agree
//! to relative 1e−9 are pulled apart multiplicatively by `1 + r·1e−7`
//! (`r` = rank within the tie group) before evaluation. For a group of
//! `g` tied means the weights grow like `1e7^{g−1}`, so the induced
//! absolute error is about `ε·1e7^{g−1}` plus an `O(1e−7)` model
//! perturbation: fine for pairs, useless for larger groups (use the
//! Erlang/Gamma closed forms there).
//!
//! [`ccdf`] does not rely on the perturbation: when the alternating sum
//! is ill-conditioned it switches to a phase-type evaluation whose terms
//! are all non-negative.

/// Relative gap below which two means count as tied.
pub const TIE_RELATIVE: f64 = 1e-9;
/// Multiplicative offset step applied inside a tie group.
pub const TIE_OFFSET: f64 = 1e-7;

/// Copy of `means` with tied entries separated.
pub fn untie(means: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..means.len()).collect();
    order.sort_by(|&a, &b| means[a].total_cmp(&means[b]).then(a.cmp(&b)));
    let mut out = means.to_vec();
    let mut group_start = 0;
    for pos in 1..=order.len() {
        let closes = pos == order.len() || {
            let head = means[order[group_start]];
            (means[order[pos]] - head).abs() > TIE_RELATIVE * head.abs()
        };
        if closes {
            for (rank, &idx) in order[group_start..pos].iter().enumerate() {
                out[idx] = means[idx] * (1.0 + TIE_OFFSET * rank as f64);
            }
            group_start = pos;
        }
    }
    out
}

/// True when some pair of means would be perturbed by [`untie`].
pub fn has_ties(means: &[f64]) -> bool {
    untie(means) != means
}

/// Partial-fraction weights `Π_{j≠k} μ_k/(μ_k − μ_j)` on untied means.
pub fn weights(means: &[f64]) -> Vec<f64> {
    (0..means.len())
        .map(|k| {
            means
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, &mj)| means[k] / (means[k] - mj))
                .product()
        })
        .collect()
}

/// Mean of the sum via the weighted form `Σ_k w_k μ_k`.
pub fn mean(means: &[f64]) -> f64 {
    let m = untie(means);
    let terms: Vec<f64> = weights(&m).iter().zip(&m).map(|(w, mu)| w * mu).collect();
    let value: f64 = terms.iter().sum();
    let magnitude: f64 = terms.iter().map(|x| x.abs()).sum();
    // same cancellation budget as `ccdf`; past it the weights carry no digits
    if value > 0.0 && magnitude <= 1e3 * value {
        value
    } else {
        means.iter().sum()
    }
}

/// Density of the sum at `z ≥ 0`.
pub fn pdf(z: f64, means: &[f64]) -> f64 {
    let m = untie(means);
    let w = weights(&m);
    let v: f64 = w
        .iter()
        .zip(&m)
        .map(|(wk, mu)| wk * (-z / mu).exp() / mu)
        .sum();
    v.max(0.0)
}

/// `Pr[Σ_k E_k > t]`, `E_k ~ Exp(mean μ_k)`, for `t ≥ 0`.
pub fn ccdf(t: f64, means: &[f64]) -> f64 {
    if means.is_empty() || t <= 0.0 {
        return if means.is_empty() && t >= 0.0 { 0.0 } else { 1.0 };
    }
    if means.len() == 1 {
        return (-t / means[0]).exp();
    }
    if !has_ties(means) {
        let w = weights(means);
        let terms: Vec<f64> = w
            .iter()
            .zip(means)
            .map(|(wk, mu)| wk * (-t / mu).exp())
            .collect();
        let value: f64 = terms.iter().sum();
        let magnitude: f64 = terms.iter().map(|x| x.abs()).sum();
        // at most ~3 digits of cancellation allowed on this route
        if magnitude <= 1e3 * value.abs().max(1e-3) {
            return value.clamp(0.0, 1.0);
        }
    }
    phase_type_ccdf(t, means)
}

/// Absorption-time tail of the pure-birth chain with rates `1/μ_k`:
/// `e₁ᵀ exp(A t) 𝟏` with `A` upper bidiagonal. Uses uniformization when
/// `Λt` is moderate and non-negative scaling-and-squaring otherwise;
/// neither involves subtraction.
fn phase_type_ccdf(t: f64, means: &[f64]) -> f64 {
    let rates: Vec<f64> = means.iter().map(|m| 1.0 / m).collect();
    let lambda = rates.iter().cloned().fold(0.0, f64::max);
    let lt = lambda * t;
    if lt <= 700.0 {
        uniformized_ccdf(&rates, lambda, lt)
    } else {
        squared_ccdf(&rates, lambda, t)
    }
}

fn uniformized_ccdf(rates: &[f64], lambda: f64, lt: f64) -> f64 {
    let n = rates.len();
    // P = I + A/Λ: stay prob 1 − r_i/Λ, advance prob r_i/Λ
    let stay: Vec<f64> = rates.iter().map(|r| 1.0 - r / lambda).collect();
    let adv: Vec<f64> = rates.iter().map(|r| r / lambda).collect();
    let mut v = vec![0.0; n];
    v[0] = 1.0;
    let mut poisson = (-lt).exp();
    let mut result = poisson; // k = 0: mass still in transient states is 1
    let mut k = 0usize;
    loop {
        k += 1;
        for i in (0..n).rev() {
            let from_prev = if i > 0 { v[i - 1] * adv[i - 1] } else { 0.0 };
            v[i] = v[i] * stay[i] + from_prev;
        }
        poisson *= lt / k as f64;
        let transient: f64 = v.iter().sum();
        result += poisson * transient;
        let kf = k as f64;
        // remaining Poisson mass ≤ p_k · Λt / (k + 1 − Λt) once past the mode
        if kf + 1.0 > lt && poisson * transient * lt / (kf + 1.0 - lt) < 1e-18 {
            break;
        }
        if transient < 1e-300 || k > 1_000_000 {
            break;
        }
    }
    result.clamp(0.0, 1.0)
}

fn squared_ccdf(rates: &[f64], lambda: f64, t: f64) -> f64 {
    let n = rates.len();
    // B = (A + Λ I) t is entry-wise non-negative
    let mut b = vec![0.0; n * n];
    for i in 0..n {
        b[i * n + i] = (lambda - rates[i]) * t;
        if i + 1 < n {
            b[i * n + i + 1] = rates[i] * t;
        }
    }
    let norm = b
        .chunks(n)
        .map(|row| row.iter().sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = (norm / 0.5).log2().ceil().max(0.0) as u32;
    let scale = 0.5f64.powi(squarings as i32);
    for x in b.iter_mut() {
        *x *= scale;
    }
    // Taylor series of exp(B / 2^s), all terms non-negative
    let mut exp_b = identity(n);
    let mut term = identity(n);
    for k in 1..40 {
        term = matmul_upper(&term, &b, n);
        let inv_k = 1.0 / k as f64;
        let mut max_term = 0.0f64;
        for x in term.iter_mut() {
            *x *= inv_k;
            max_term = max_term.max(*x);
        }
        for (e, t) in exp_b.iter_mut().zip(&term) {
            *e += t;
        }
        if max_term < 1e-18 {
            break;
        }
    }
    // repeated squaring with running log-scale to avoid overflow
    let mut log_scale = 0.0;
    for _ in 0..squarings {
        exp_b = matmul_upper(&exp_b, &exp_b, n);
        log_scale *= 2.0;
        let peak = exp_b.iter().cloned().fold(0.0, f64::max);
        if peak > 1e100 {
            for x in exp_b.iter_mut() {
                *x /= peak;
            }
            log_scale += peak.ln();
        }
    }
    let row_sum: f64 = exp_b[..n].iter().sum();
    if row_sum <= 0.0 {
        return 0.0;
    }
    (row_sum.ln() + log_scale - lambda * t).exp().clamp(0.0, 1.0)
}

fn identity(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    m
}

/// Product of two upper-triangular row-major matrices.
fn matmul_upper(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n * n];
    for i in 0..n {
        for k in i..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            for j in k..n {
                c[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    c
}
