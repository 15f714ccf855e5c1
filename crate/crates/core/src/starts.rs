//! Parametric start densities f(·, θ̂): fitting, clipped evaluation and scores.
//!
//! Clipping keeps the start away from zero in the tails. For every family
//! the clip region is the interval between the fitted Φ(−t) and Φ(t)
//! quantiles (t = 2.5 by default, so about 0.6% and 99.4%); outside it the
//! start is frozen at its value at the nearer endpoint. For the normal this
//! is exactly μ̂ ± 2.5σ̂. Inside the region the start is additionally kept
//! at or above the smaller endpoint value, which only matters for
//! multimodal mixture starts.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)] // inherent f64 methods shadow it when a dependency links std
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::densities::{Component, NormalMixture};
use crate::math::{
    bisect_increasing, digamma, gamma_p, ln_gamma, ln_normal_pdf, log_sum_exp, mean_and_ml_variance, normal_cdf,
    normal_pdf,
};
use crate::{Error, Result};

/// Default clip threshold in standard units.
pub const DEFAULT_CLIP: f64 = 2.5;

const EM_MAX_ITER: usize = 200;
const EM_TOL: f64 = 1e-8;
const EM_MAX_ATTEMPTS: usize = 5;
const EM_DEGENERATE_FRACTION: f64 = 1e-6;

/// Which parametric family to fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartFamily {
    /// f ≡ 1; the estimator reduces to the classic kernel estimator.
    Constant,
    Normal,
    LogNormal,
    Gamma,
    /// k-component normal mixture fitted by EM from the given seed.
    NormalMixture { k: usize, seed: u64 },
}

impl StartFamily {
    pub fn name(&self) -> &'static str {
        match self {
            StartFamily::Constant => "constant",
            StartFamily::Normal => "normal",
            StartFamily::LogNormal => "lognormal",
            StartFamily::Gamma => "gamma",
            StartFamily::NormalMixture { .. } => "normal_mixture",
        }
    }
}

impl fmt::Display for StartFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StartFamily::NormalMixture { k, .. } => write!(f, "mixture:{k}"),
            other => f.write_str(other.name()),
        }
    }
}

impl core::str::FromStr for StartFamily {
    type Err = Error;

    /// Accepts `constant`, `normal`, `lognormal`, `gamma`, `mixture` (two
    /// components) or `mixture:K`; the mixture seed defaults to 0.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constant" | "uniform" | "none" => Ok(StartFamily::Constant),
            "normal" => Ok(StartFamily::Normal),
            "lognormal" => Ok(StartFamily::LogNormal),
            "gamma" => Ok(StartFamily::Gamma),
            "mixture" | "normal_mixture" => Ok(StartFamily::NormalMixture { k: 2, seed: 0 }),
            other => {
                let k = other
                    .strip_prefix("mixture:")
                    .and_then(|k| k.parse::<usize>().ok())
                    .filter(|&k| k >= 1)
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown start family '{other}'")))?;
                Ok(StartFamily::NormalMixture { k, seed: 0 })
            }
        }
    }
}

/// Fitted parameters of a start.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "family", content = "params", rename_all = "snake_case"))]
pub enum StartParams {
    Constant,
    Normal { mu: f64, sd: f64 },
    /// Parameters of log X.
    #[cfg_attr(feature = "serde", serde(rename = "lognormal"))]
    LogNormal { mu: f64, sd: f64 },
    /// Density β^α x^{α−1}e^{−βx}/Γ(α).
    Gamma { shape: f64, rate: f64 },
    NormalMixture(NormalMixture),
}

/// A fitted start, ready for clipped evaluation.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "StartRepr", into = "StartRepr"))]
pub struct FittedStart {
    params: StartParams,
    clip: Option<f64>,
    // clip interval and floor, cached at construction
    bounds: Option<(f64, f64)>,
    ln_floor: f64,
}

#[cfg(feature = "serde")]
#[derive(serde::Serialize, serde::Deserialize)]
struct StartRepr {
    #[serde(flatten)]
    params: StartParams,
    clip: Option<f64>,
}

#[cfg(feature = "serde")]
impl TryFrom<StartRepr> for FittedStart {
    type Error = Error;

    fn try_from(r: StartRepr) -> Result<Self> {
        FittedStart::new(r.params, r.clip)
    }
}

#[cfg(feature = "serde")]
impl From<FittedStart> for StartRepr {
    fn from(s: FittedStart) -> Self {
        StartRepr { params: s.params, clip: s.clip }
    }
}

impl FittedStart {
    /// Validates parameters and prepares the clip region. `clip` is the
    /// threshold t in standard units; `None` disables clipping.
    pub fn new(params: StartParams, clip: Option<f64>) -> Result<Self> {
        match &params {
            StartParams::Normal { sd, mu } | StartParams::LogNormal { sd, mu } => {
                if !(*sd > 0.0) || !sd.is_finite() || !mu.is_finite() {
                    return Err(Error::InvalidArgument(format!("start needs finite mean and sd > 0, got ({mu}, {sd})")));
                }
            }
            StartParams::Gamma { shape, rate } => {
                if !(*shape > 0.0 && *rate > 0.0) || !shape.is_finite() || !rate.is_finite() {
                    return Err(Error::InvalidArgument(format!(
                        "gamma start needs shape, rate > 0, got ({shape}, {rate})"
                    )));
                }
            }
            StartParams::Constant | StartParams::NormalMixture(_) => {}
        }
        if let Some(t) = clip {
            if !(t > 0.0) || !t.is_finite() {
                return Err(Error::InvalidArgument(format!("clip threshold must be positive, got {t}")));
            }
        }
        let mut start = FittedStart { params, clip, bounds: None, ln_floor: f64::NEG_INFINITY };
        if let Some(t) = clip {
            if let Some((lo, hi)) = start.quantile_interval(t) {
                start.bounds = Some((lo, hi));
                start.ln_floor = start.ln_density(lo).min(start.ln_density(hi));
            }
        }
        Ok(start)
    }

    /// The constant start f ≡ 1.
    pub fn constant() -> Self {
        FittedStart { params: StartParams::Constant, clip: None, bounds: None, ln_floor: f64::NEG_INFINITY }
    }

    /// A normal start with the default clip.
    pub fn normal(mu: f64, sd: f64) -> Result<Self> {
        Self::new(StartParams::Normal { mu, sd }, Some(DEFAULT_CLIP))
    }

    pub fn params(&self) -> &StartParams {
        &self.params
    }

    pub fn clip(&self) -> Option<f64> {
        self.clip
    }

    /// The same start with a different clip threshold.
    pub fn with_clip(&self, clip: Option<f64>) -> Result<Self> {
        Self::new(self.params.clone(), clip)
    }

    pub fn family(&self) -> StartFamily {
        match &self.params {
            StartParams::Constant => StartFamily::Constant,
            StartParams::Normal { .. } => StartFamily::Normal,
            StartParams::LogNormal { .. } => StartFamily::LogNormal,
            StartParams::Gamma { .. } => StartFamily::Gamma,
            StartParams::NormalMixture(m) => StartFamily::NormalMixture { k: m.components().len(), seed: 0 },
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.params, StartParams::Constant)
    }

    /// (μ̂, σ̂) for a normal start.
    pub fn normal_params(&self) -> Option<(f64, f64)> {
        match self.params {
            StartParams::Normal { mu, sd } => Some((mu, sd)),
            _ => None,
        }
    }

    /// The clip interval, if clipping is active for this family.
    pub fn clip_bounds(&self) -> Option<(f64, f64)> {
        self.bounds
    }

    fn quantile_interval(&self, t: f64) -> Option<(f64, f64)> {
        let p_lo = normal_cdf(-t);
        let p_hi = normal_cdf(t);
        match &self.params {
            StartParams::Constant => None,
            StartParams::Normal { mu, sd } => Some((mu - t * sd, mu + t * sd)),
            StartParams::LogNormal { mu, sd } => Some(((mu - t * sd).exp(), (mu + t * sd).exp())),
            StartParams::Gamma { shape, rate } => {
                let cdf = |x: f64| gamma_p(*shape, rate * x);
                let mut upper = (shape + 10.0 * shape.sqrt() + 10.0) / rate;
                while cdf(upper) < p_hi {
                    upper *= 2.0;
                }
                Some((bisect_increasing(cdf, p_lo, 0.0, upper), bisect_increasing(cdf, p_hi, 0.0, upper)))
            }
            StartParams::NormalMixture(m) => {
                let (lo, hi) = m.support_range();
                Some((bisect_increasing(|x| m.cdf(x), p_lo, lo, hi), bisect_increasing(|x| m.cdf(x), p_hi, lo, hi)))
            }
        }
    }

    /// ln of the unclipped family density; `-inf` off the support.
    pub fn ln_density(&self, x: f64) -> f64 {
        match &self.params {
            StartParams::Constant => 0.0,
            StartParams::Normal { mu, sd } => ln_normal_pdf(x - mu, *sd),
            StartParams::LogNormal { mu, sd } => {
                if x <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    let y = x.ln();
                    ln_normal_pdf(y - mu, *sd) - y
                }
            }
            StartParams::Gamma { shape, rate } => {
                if x < 0.0 || (x == 0.0 && *shape > 1.0) {
                    f64::NEG_INFINITY
                } else if x == 0.0 && *shape < 1.0 {
                    f64::INFINITY
                } else if x == 0.0 {
                    rate.ln()
                } else {
                    shape * rate.ln() + (shape - 1.0) * x.ln() - rate * x - ln_gamma(*shape)
                }
            }
            StartParams::NormalMixture(m) => {
                log_sum_exp(m.components().iter().map(|c| c.p.ln() + ln_normal_pdf(x - c.mu, c.sd)))
            }
        }
    }

    /// ln f̄(x, θ̂), clipped when a clip threshold is set.
    pub fn ln_eval(&self, x: f64) -> f64 {
        match self.bounds {
            Some((lo, hi)) => self.ln_density(x.clamp(lo, hi)).max(self.ln_floor),
            None => self.ln_density(x),
        }
    }

    /// f̄(x, θ̂). Errors when an unclipped positive-support start is
    /// evaluated at x ≤ 0.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let v = self.ln_eval(x);
        if v == f64::NEG_INFINITY {
            return Err(Error::StartVanishes(x));
        }
        Ok(v.exp())
    }

    /// Gradient of ln f(x, θ) in the family's natural parameters:
    /// normal and lognormal (μ, σ), gamma (shape, rate), mixture one
    /// (p_i, μ_i, σ_i) triple per component with unconstrained weights.
    pub fn score(&self, x: f64) -> Result<Vec<f64>> {
        match &self.params {
            StartParams::Constant => Err(Error::UnsupportedFamily("constant")),
            StartParams::Normal { mu, sd } => Ok(normal_score(x, *mu, *sd).to_vec()),
            StartParams::LogNormal { mu, sd } => {
                if x <= 0.0 {
                    return Err(Error::NonPositiveData("lognormal score needs x > 0"));
                }
                Ok(normal_score(x.ln(), *mu, *sd).to_vec())
            }
            StartParams::Gamma { shape, rate } => {
                if x <= 0.0 {
                    return Err(Error::NonPositiveData("gamma score needs x > 0"));
                }
                Ok(alloc::vec![rate.ln() + x.ln() - digamma(*shape), shape / rate - x])
            }
            StartParams::NormalMixture(m) => {
                let f = m.pdf(x);
                let mut out = Vec::with_capacity(3 * m.components().len());
                for c in m.components() {
                    let fi = normal_pdf(x - c.mu, c.sd);
                    let resp = c.p * fi / f;
                    let [dmu, dsd] = normal_score(x, c.mu, c.sd);
                    out.extend_from_slice(&[fi / f, resp * dmu, resp * dsd]);
                }
                Ok(out)
            }
        }
    }
}

fn normal_score(x: f64, mu: f64, sd: f64) -> [f64; 2] {
    let u = x - mu;
    [u / (sd * sd), (u * u - sd * sd) / (sd * sd * sd)]
}

fn check_len(data: &[f64], need: usize) -> Result<()> {
    if data.len() < need {
        return Err(Error::TooFewObservations { need, got: data.len() });
    }
    Ok(())
}

fn check_positive(data: &[f64], what: &'static str) -> Result<()> {
    if data.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::NonPositiveData(what));
    }
    Ok(())
}

fn ml_mean_sd(data: &[f64]) -> Result<(f64, f64)> {
    let (mean, var) = mean_and_ml_variance(data);
    if !(var > 0.0) {
        return Err(Error::ZeroVariance);
    }
    Ok((mean, var.sqrt()))
}

/// Fits `family` to `data` with the default clip (none for the constant).
pub fn fit_start(family: StartFamily, data: &[f64]) -> Result<FittedStart> {
    fit_start_with_clip(family, data, Some(DEFAULT_CLIP))
}

/// Fits `family` to `data`: normal by mean and ML variance, lognormal the
/// same on log scale, gamma by moments (α̂ = m̂²/v̂, β̂ = m̂/v̂), mixture by EM.
pub fn fit_start_with_clip(family: StartFamily, data: &[f64], clip: Option<f64>) -> Result<FittedStart> {
    let params = match family {
        StartFamily::Constant => {
            check_len(data, 1)?;
            return Ok(FittedStart::constant());
        }
        StartFamily::Normal => {
            check_len(data, 2)?;
            let (mu, sd) = ml_mean_sd(data)?;
            StartParams::Normal { mu, sd }
        }
        StartFamily::LogNormal => {
            check_len(data, 2)?;
            check_positive(data, "lognormal start needs positive data")?;
            let logs: Vec<f64> = data.iter().map(|x| x.ln()).collect();
            let (mu, sd) = ml_mean_sd(&logs)?;
            StartParams::LogNormal { mu, sd }
        }
        StartFamily::Gamma => {
            check_len(data, 2)?;
            check_positive(data, "gamma start needs positive data")?;
            let (m, sd) = ml_mean_sd(data)?;
            let v = sd * sd;
            StartParams::Gamma { shape: m * m / v, rate: m / v }
        }
        StartFamily::NormalMixture { k, seed } => StartParams::NormalMixture(em_fit_mixture(data, k, seed)?.0),
    };
    FittedStart::new(params, clip)
}

/// Leave-one-out refits θ̂_(i), i = 1..n, in O(n) total by downdating the
/// sufficient statistics. Mixture starts are not supported.
pub fn leave_one_out_fits(start: &FittedStart, data: &[f64]) -> Result<Vec<FittedStart>> {
    check_len(data, 3)?;
    let clip = start.clip();
    match start.params() {
        StartParams::Constant => Ok(alloc::vec![FittedStart::constant(); data.len()]),
        StartParams::Normal { .. } => downdated(data, |x| x)?
            .into_iter()
            .map(|(mu, sd)| FittedStart::new(StartParams::Normal { mu, sd }, clip))
            .collect(),
        StartParams::LogNormal { .. } => {
            check_positive(data, "lognormal start needs positive data")?;
            downdated(data, |x| x.ln())?
                .into_iter()
                .map(|(mu, sd)| FittedStart::new(StartParams::LogNormal { mu, sd }, clip))
                .collect()
        }
        StartParams::Gamma { .. } => {
            check_positive(data, "gamma start needs positive data")?;
            downdated(data, |x| x)?
                .into_iter()
                .map(|(m, sd)| {
                    let v = sd * sd;
                    FittedStart::new(StartParams::Gamma { shape: m * m / v, rate: m / v }, clip)
                })
                .collect()
        }
        StartParams::NormalMixture(_) => Err(Error::UnsupportedFamily("normal_mixture")),
    }
}

// (mean, ML sd) of the transformed data with each point left out in turn.
fn downdated(data: &[f64], g: impl Fn(f64) -> f64) -> Result<Vec<(f64, f64)>> {
    let ys: Vec<f64> = data.iter().map(|&x| g(x)).collect();
    let n = ys.len() as f64;
    let (mean, var) = mean_and_ml_variance(&ys);
    let ss = var * n;
    ys.iter()
        .map(|&y| {
            let d = y - mean;
            let m = mean - d / (n - 1.0);
            let v = (ss - d * d * n / (n - 1.0)).max(0.0) / (n - 1.0);
            if !(v > 0.0) {
                return Err(Error::ZeroVariance);
            }
            Ok((m, v.sqrt()))
        })
        .collect()
}

/// Fits a k-component normal mixture by EM. Returns the mixture (components
/// sorted by mean) and the log-likelihood after each iteration.
///
/// Starting values come from k-means++ seeding driven by `seed`. A fit in
/// which some component collapses (sd below 1e-6 of the sample sd) is
/// retried with seeds `seed + 1`, … up to five attempts in total.
pub fn em_fit_mixture(data: &[f64], k: usize, seed: u64) -> Result<(NormalMixture, Vec<f64>)> {
    if k == 0 {
        return Err(Error::InvalidArgument("mixture needs at least one component".into()));
    }
    check_len(data, 10 * k)?;
    let (_, sd_all) = ml_mean_sd(data)?;
    for attempt in 0..EM_MAX_ATTEMPTS as u64 {
        if let Some(fit) = em_attempt(data, k, seed.wrapping_add(attempt), sd_all)? {
            return Ok(fit);
        }
    }
    Err(Error::EmDegenerate(k))
}

fn em_attempt(data: &[f64], k: usize, seed: u64, sd_all: f64) -> Result<Option<(NormalMixture, Vec<f64>)>> {
    let n = data.len();
    let min_sd = EM_DEGENERATE_FRACTION * sd_all;
    let mut comps = kmeans_pp_init(data, k, seed, sd_all);
    let mut resp = alloc::vec![0.0; n * k];
    let mut trace = Vec::new();
    let mut prev = f64::NEG_INFINITY;
    for _ in 0..EM_MAX_ITER {
        // E step in log space
        let mut ll = 0.0;
        for (i, &x) in data.iter().enumerate() {
            let row = &mut resp[i * k..(i + 1) * k];
            for (r, c) in row.iter_mut().zip(&comps) {
                *r = c.p.ln() + ln_normal_pdf(x - c.mu, c.sd);
            }
            let lse = log_sum_exp(row.iter().copied());
            ll += lse;
            for r in row.iter_mut() {
                *r = (*r - lse).exp();
            }
        }
        if !ll.is_finite() {
            return Ok(None);
        }
        // M step
        for (j, c) in comps.iter_mut().enumerate() {
            let w: f64 = (0..n).map(|i| resp[i * k + j]).sum();
            if !(w > 0.0) {
                return Ok(None);
            }
            let mu = (0..n).map(|i| resp[i * k + j] * data[i]).sum::<f64>() / w;
            let var = (0..n).map(|i| resp[i * k + j] * (data[i] - mu) * (data[i] - mu)).sum::<f64>() / w;
            let sd = var.sqrt();
            if !(sd >= min_sd) {
                return Ok(None);
            }
            *c = Component::new(w / n as f64, mu, sd);
        }
        trace.push(ll);
        if ll - prev < EM_TOL {
            break;
        }
        prev = ll;
    }
    let final_ll: f64 = data.iter().map(|&x| mixture_ln_pdf(&comps, x)).sum();
    trace.push(final_ll);
    comps.sort_by(|a, b| a.mu.total_cmp(&b.mu));
    let total: f64 = comps.iter().map(|c| c.p).sum();
    Ok(Some((NormalMixture::with_tolerance(comps, 1e-9 * total.max(1.0))?, trace)))
}

fn mixture_ln_pdf(comps: &[Component], x: f64) -> f64 {
    log_sum_exp(comps.iter().map(|c| c.p.ln() + ln_normal_pdf(x - c.mu, c.sd)))
}

fn kmeans_pp_init(data: &[f64], k: usize, seed: u64, sd_all: f64) -> Vec<Component> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let n = data.len();
    let mut centers = alloc::vec![data[rng.random_range(0..n)]];
    let mut d2: Vec<f64> = data.iter().map(|x| (x - centers[0]) * (x - centers[0])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = n - 1;
            for (i, d) in d2.iter().enumerate() {
                acc += d;
                if acc > target {
                    pick = i;
                    break;
                }
            }
            data[pick]
        } else {
            data[rng.random_range(0..n)]
        };
        centers.push(next);
        for (d, x) in d2.iter_mut().zip(data) {
            *d = d.min((x - next) * (x - next));
        }
    }
    // one assignment pass gives initial weights and spreads
    let mut count = alloc::vec![0usize; k];
    let mut sum = alloc::vec![0.0; k];
    let mut sum2 = alloc::vec![0.0; k];
    for &x in data {
        let j = (0..k)
            .min_by(|&a, &b| (x - centers[a]).abs().total_cmp(&(x - centers[b]).abs()))
            .unwrap_or(0);
        count[j] += 1;
        sum[j] += x;
        sum2[j] += x * x;
    }
    (0..k)
        .map(|j| {
            if count[j] == 0 {
                return Component::new(1.0 / n as f64, centers[j], sd_all / k as f64);
            }
            let c = count[j] as f64;
            let mu = sum[j] / c;
            let var = (sum2[j] / c - mu * mu).max(0.0);
            let sd = if var > 0.0 { var.sqrt().max(0.05 * sd_all) } else { sd_all / k as f64 };
            Component::new(c / n as f64, mu, sd)
        })
        .collect()
}
