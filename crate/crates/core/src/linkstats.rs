//! Second-order channel statistics: path-loss gains, the mean of the
//! strongest ST→PR interference link (maximum of exponentials) and the
//! aggregate PT→SR interference (sum of exponentials).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypoexp;

/// Node distances in meters plus the path-loss law `(d/d_ref)^{−α}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub d_st_sr: f64,
    pub d_pt_sr: Vec<f64>,
    pub d_st_pr: Vec<f64>,
    pub d_ref: f64,
    pub alpha: f64,
}

impl Geometry {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.d_st_sr) {
            return Err(Error::config("geometry.d_st_sr", "must be > 0"));
        }
        if !positive(self.d_ref) {
            return Err(Error::config("geometry.d_ref", "must be > 0"));
        }
        if !positive(self.alpha) {
            return Err(Error::config("geometry.alpha", "must be > 0"));
        }
        if self.d_pt_sr.is_empty() || !self.d_pt_sr.iter().all(|&d| positive(d)) {
            return Err(Error::config("geometry.d_pt_sr", "needs >= 1 positive distance"));
        }
        if self.d_st_pr.is_empty() || !self.d_st_pr.iter().all(|&d| positive(d)) {
            return Err(Error::config("geometry.d_st_pr", "needs >= 1 positive distance"));
        }
        Ok(())
    }
}

/// All average channel gains of one scenario.
///
/// `mean_y` and `mean_z` are derived once at construction. `Z` is the pure
/// channel-gain sum `Σ_k |z_k|²`; the primary power `p_p` multiplies it
/// separately wherever it enters an SINR.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkStats {
    pub mean_x: f64,
    pub mean_y_per_pr: Vec<f64>,
    pub mean_z_per_pt: Vec<f64>,
    pub iid_y: bool,
    pub iid_z: bool,
    mean_y: f64,
    mean_z: f64,
}

impl LinkStats {
    /// Builds stats from explicit means. The i.i.d. flags are set when every
    /// entry of the corresponding list is identical.
    pub fn new(mean_x: f64, mean_y_per_pr: Vec<f64>, mean_z_per_pt: Vec<f64>) -> Result<Self> {
        let iid_y = all_equal(&mean_y_per_pr);
        let iid_z = all_equal(&mean_z_per_pt);
        Self::with_flags(mean_x, mean_y_per_pr, mean_z_per_pt, iid_y, iid_z)
    }

    pub fn with_flags(
        mean_x: f64,
        mean_y_per_pr: Vec<f64>,
        mean_z_per_pt: Vec<f64>,
        iid_y: bool,
        iid_z: bool,
    ) -> Result<Self> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(mean_x) {
            return Err(Error::config("means.x", "E[X] must be > 0"));
        }
        if mean_y_per_pr.is_empty() || !mean_y_per_pr.iter().all(|&v| positive(v)) {
            return Err(Error::config("means.y_per_pr", "needs >= 1 positive mean"));
        }
        if mean_z_per_pt.is_empty() || !mean_z_per_pt.iter().all(|&v| positive(v)) {
            return Err(Error::config("means.z_per_pt", "needs >= 1 positive mean"));
        }
        if iid_y && !all_equal(&mean_y_per_pr) {
            return Err(Error::config("means.y_per_pr", "declared i.i.d. but entries differ"));
        }
        if iid_z && !all_equal(&mean_z_per_pt) {
            return Err(Error::config("means.z_per_pt", "declared i.i.d. but entries differ"));
        }
        let mean_y = if iid_y {
            mean_max_iid(mean_y_per_pr[0], mean_y_per_pr.len() as u32)?
        } else {
            mean_max_inid(&mean_y_per_pr)?
        };
        let mean_z = if iid_z {
            mean_z_per_pt.len() as f64 * mean_z_per_pt[0]
        } else {
            mean_sum_inid(&mean_z_per_pt)?
        };
        if !(positive(mean_y) && positive(mean_z)) {
            return Err(Error::domain(format!(
                "derived E[Y] = {mean_y}, E[Z] = {mean_z} must be positive and finite"
            )));
        }
        Ok(LinkStats {
            mean_x,
            mean_y_per_pr,
            mean_z_per_pt,
            iid_y,
            iid_z,
            mean_y,
            mean_z,
        })
    }

    pub fn from_geometry(geometry: &Geometry) -> Result<Self> {
        geometry.validate()?;
        let g = |d: f64| pathloss_gain(d, geometry.d_ref, geometry.alpha);
        let mean_x = g(geometry.d_st_sr)?;
        let ys = geometry.d_st_pr.iter().map(|&d| g(d)).collect::<Result<Vec<_>>>()?;
        let zs = geometry.d_pt_sr.iter().map(|&d| g(d)).collect::<Result<Vec<_>>>()?;
        Self::new(mean_x, ys, zs)
    }

    /// `E[Y]`, the mean of `max_j |y_j|²` over the primary receivers.
    pub fn mean_y(&self) -> f64 {
        self.mean_y
    }

    /// `E[Z] = E[Σ_k |z_k|²]`.
    pub fn mean_z(&self) -> f64 {
        self.mean_z
    }

    pub fn l_t(&self) -> usize {
        self.mean_z_per_pt.len()
    }

    pub fn l_r(&self) -> usize {
        self.mean_y_per_pr.len()
    }
}

fn all_equal(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[0] == w[1])
}

/// Path-loss gain `(d/d_ref)^{−α}`.
pub fn pathloss_gain(d: f64, d_ref: f64, alpha: f64) -> Result<f64> {
    if !(d > 0.0 && d_ref > 0.0 && alpha > 0.0) {
        return Err(Error::domain(format!(
            "pathloss_gain needs positive inputs, got d={d}, d_ref={d_ref}, alpha={alpha}"
        )));
    }
    Ok((d / d_ref).powf(-alpha))
}

/// Mean of the maximum of independent exponentials with the given means.
///
/// Evaluates the alternating sum over the density's terms
/// `Σ_l Σ_{S ⊆ [L]∖{l}} (−1)^{|S|} / (μ_l (1/μ_l + Σ_{n∈S} 1/μ_n)²)`.
/// Ordered index tuples of length `k` appear `k!` times each in the nested
/// form, which cancels the `1/k!` factor; each subset is visited once here.
pub fn mean_max_inid(means: &[f64]) -> Result<f64> {
    if means.is_empty() {
        return Err(Error::domain("mean_max_inid needs at least one mean"));
    }
    if means.iter().any(|&m| !(m > 0.0)) {
        return Err(Error::domain("means must be positive"));
    }
    let l_r = means.len();
    if l_r > 24 {
        return Err(Error::domain("mean_max_inid enumerates subsets; L_R <= 24"));
    }
    let rates: Vec<f64> = means.iter().map(|m| 1.0 / m).collect();
    let mut total = 0.0;
    for l in 0..l_r {
        let others: Vec<f64> = (0..l_r).filter(|&j| j != l).map(|j| rates[j]).collect();
        let mut acc = 0.0;
        for mask in 0u32..(1u32 << others.len()) {
            let mut rate_sum = rates[l];
            for (bit, r) in others.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    rate_sum += r;
                }
            }
            let sign = if mask.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign / (rate_sum * rate_sum);
        }
        total += rates[l] * acc;
    }
    Ok(total)
}

/// Mean of the maximum of `l_r` i.i.d. exponentials with common `mean`:
/// `L_R · μ · Σ_{k<L_R} (−1)^k C(L_R−1, k)/(k+1)²`.
pub fn mean_max_iid(mean: f64, l_r: u32) -> Result<f64> {
    if !(mean > 0.0) || l_r == 0 {
        return Err(Error::domain("mean_max_iid needs mean > 0 and l_r >= 1"));
    }
    let mut binom = 1.0f64;
    let mut sum = 0.0;
    for k in 0..l_r {
        if k > 0 {
            binom *= (l_r - k) as f64 / k as f64;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let kp1 = (k + 1) as f64;
        sum += sign * binom / (kp1 * kp1);
    }
    Ok(l_r as f64 * mean * sum)
}

/// Mean of the sum of independent exponentials through the
/// partial-fraction weights, `Σ_k (Π_{j≠k} μ_k/(μ_k − μ_j)) μ_k`.
pub fn mean_sum_inid(means: &[f64]) -> Result<f64> {
    if means.is_empty() {
        return Err(Error::domain("mean_sum_inid needs at least one mean"));
    }
    if means.iter().any(|&m| !(m > 0.0)) {
        return Err(Error::domain("means must be positive"));
    }
    Ok(hypoexp::mean(means))
}

/// Density of `Σ_k |z_k|²` at `z`.
pub fn sum_density_inid(z: f64, means: &[f64]) -> Result<f64> {
    if !(z >= 0.0) {
        return Err(Error::domain("z must be non-negative"));
    }
    if means.is_empty() || means.iter().any(|&m| !(m > 0.0)) {
        return Err(Error::domain("means must be positive"));
    }
    Ok(hypoexp::pdf(z, means))
}

/// `E[Y]` for the given stats.
pub fn effective_mean_y(stats: &LinkStats) -> f64 {
    stats.mean_y()
}
