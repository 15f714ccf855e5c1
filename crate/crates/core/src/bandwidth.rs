//! Bandwidth selection for the start-times-correction estimator.
//!
//! Every rule targets the AMISE-optimal h* = {R(K)/σ_K⁴}^{1/5}R_new^{−1/5}n^{−1/5}
//! where R_new = ∫(f₀r'')² replaces the classic ∫(f'')². The rules differ in
//! how R_new is estimated: two Hermite expansions, a nonparametric plug-in,
//! or cross-validation curves. Data-driven choices never exceed the
//! oversmoothing bound h_os.

use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)] // inherent f64 methods shadow it when a dependency links std
use num_traits::Float;

use crate::estimator::DensityEstimate;
use crate::exact_mise::gaussian_product;
use crate::hermite::{classic_coeffs, robust_coeffs, roughness_from_coeffs};
use crate::kernels::{check_bandwidth, KernelShape, KernelSpec};
use crate::math::{mean_and_ml_variance, normal_pdf, sqrt_pi};
use crate::quadrature::{geomspace, integrate_with_breaks, linspace};
use crate::starts::{leave_one_out_fits, FittedStart};
use crate::{Error, Result};

/// Brace values at or below this are treated as an exactly normal shape.
const DEGENERATE_BRACE: f64 = 1e-12;
const DEFAULT_GRID_POINTS: usize = 60;
const DEFAULT_GRID_LOW: f64 = 0.05;
const QUAD_TOL: f64 = 1e-12;
const MAX_BREAKS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum BandwidthMethod {
    /// h* from a known R_new.
    AmiseOracle,
    RuleGamma,
    RuleDelta,
    Plugin,
    Bcv,
    Ucv,
}

impl BandwidthMethod {
    pub fn name(self) -> &'static str {
        match self {
            BandwidthMethod::AmiseOracle => "amise_oracle",
            BandwidthMethod::RuleGamma => "rule_gamma",
            BandwidthMethod::RuleDelta => "rule_delta",
            BandwidthMethod::Plugin => "plugin",
            BandwidthMethod::Bcv => "bcv",
            BandwidthMethod::Ucv => "ucv",
        }
    }
}

impl fmt::Display for BandwidthMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl core::str::FromStr for BandwidthMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "amise_oracle" | "oracle" => Ok(BandwidthMethod::AmiseOracle),
            "rule_gamma" | "gamma" => Ok(BandwidthMethod::RuleGamma),
            "rule_delta" | "delta" => Ok(BandwidthMethod::RuleDelta),
            "plugin" => Ok(BandwidthMethod::Plugin),
            "bcv" => Ok(BandwidthMethod::Bcv),
            "ucv" => Ok(BandwidthMethod::Ucv),
            other => Err(Error::InvalidArgument(alloc::format!("unknown bandwidth method '{other}'"))),
        }
    }
}

/// A criterion sampled on a bandwidth grid.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BandwidthCurve {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BandwidthDiagnostics {
    /// The oversmoothing cap (0 for the oracle, which is not capped).
    pub h_os: f64,
    /// The rule's value exceeded h_os or its roughness was degenerate.
    pub clamped: bool,
    /// R_new used to form h.
    pub roughness: Option<f64>,
    /// Undebiased plug-in roughness.
    pub raw_roughness: Option<f64>,
    /// The plug-in roughness was not positive and rule_delta was used instead.
    pub fallback: bool,
    pub curve: Option<BandwidthCurve>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BandwidthChoice {
    pub h: f64,
    pub method: BandwidthMethod,
    pub diagnostics: BandwidthDiagnostics,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandwidthOptions {
    /// Known R_new for [`BandwidthMethod::AmiseOracle`].
    pub oracle_roughness: Option<f64>,
    /// Pilot bandwidth for the plug-in; defaults to the rule_delta choice.
    pub pilot: Option<f64>,
    pub plugin_iterations: usize,
    /// Grid for bcv/ucv; defaults to 60 log-spaced points on [0.05h_os, h_os].
    pub grid: Option<Vec<f64>>,
}

impl Default for BandwidthOptions {
    fn default() -> Self {
        BandwidthOptions { oracle_roughness: None, pilot: None, plugin_iterations: 1, grid: None }
    }
}

fn ml_sd(data: &[f64]) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::TooFewObservations { need: 1, got: 0 });
    }
    let (_, var) = mean_and_ml_variance(data);
    if !(var > 0.0) {
        return Err(Error::ZeroVariance);
    }
    Ok(var.sqrt())
}

fn require_gaussian(kernel: &KernelSpec) -> Result<f64> {
    match (kernel.shape, kernel.roughness_second_deriv) {
        (KernelShape::Gaussian, Some(r)) => Ok(r),
        _ => Err(Error::KernelNotSmooth(kernel.shape.name())),
    }
}

/// Oversmoothing bound 3{R(K)/(35σ_K⁴)}^{1/5}σn^{−1/5}, which is 1.144σn^{−1/5}
/// for the Gaussian kernel.
pub fn h_os(kernel: &KernelSpec, sd: f64, n: usize) -> f64 {
    3.0 * (kernel.roughness / (35.0 * kernel.sigma2 * kernel.sigma2)).powf(0.2) * sd * (n as f64).powf(-0.2)
}

/// ¼σ_K⁴h⁴R_new + R(K)/(nh).
pub fn amise(kernel: &KernelSpec, r_new: f64, n: usize, h: f64) -> f64 {
    0.25 * kernel.sigma2 * kernel.sigma2 * h.powi(4) * r_new + kernel.roughness / (n as f64 * h)
}

/// The AMISE minimiser and the minimal AMISE (5/4){σ_K R(K)}^{4/5}R_new^{1/5}n^{−4/5}.
pub fn amise_h(kernel: &KernelSpec, r_new: f64, n: usize) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::TooFewObservations { need: 1, got: 0 });
    }
    if !(r_new > 0.0) || !r_new.is_finite() {
        return Err(Error::DegenerateRoughness);
    }
    let nf = n as f64;
    let s4 = kernel.sigma2 * kernel.sigma2;
    let h = (kernel.roughness / s4).powf(0.2) * r_new.powf(-0.2) * nf.powf(-0.2);
    let min = 1.25 * (kernel.sigma2.sqrt() * kernel.roughness).powf(0.8) * r_new.powf(0.2) * nf.powf(-0.8);
    Ok((h, min))
}

/// Gaussian-kernel h from classic coefficients γ₀…γ₅ without the h_os clamp:
/// (4/3)^{1/5}{(2/3)γ₃² + ¼γ₄² + (5/72)γ₅² − ⅓γ₃γ₅}^{−1/5}σn^{−1/5}.
pub fn h_from_gamma(gammas: &[f64], sd: f64, n: usize) -> Result<f64> {
    if gammas.len() < 6 {
        return Err(Error::InsufficientDegree { need: 5, got: gammas.len().saturating_sub(1) });
    }
    let (g3, g4, g5) = (gammas[3], gammas[4], gammas[5]);
    let brace = (2.0 / 3.0) * g3 * g3 + 0.25 * g4 * g4 + (5.0 / 72.0) * g5 * g5 - g3 * g5 / 3.0;
    if !(brace > DEGENERATE_BRACE) {
        return Err(Error::DegenerateRoughness);
    }
    Ok((4.0f64 / 3.0).powf(0.2) * brace.powf(-0.2) * sd * (n as f64).powf(-0.2))
}

/// Gaussian-kernel h from robust coefficients δ₀…δ₅ without the h_os clamp:
/// (1/4)^{1/5}(δ₂² + δ₃² + δ₄²/2 + δ₅²/6)^{−1/5}σn^{−1/5}.
pub fn h_from_delta(deltas: &[f64], sd: f64, n: usize) -> Result<f64> {
    if deltas.len() < 6 {
        return Err(Error::InsufficientDegree { need: 5, got: deltas.len().saturating_sub(1) });
    }
    let d = deltas;
    let brace = d[2] * d[2] + d[3] * d[3] + d[4] * d[4] / 2.0 + d[5] * d[5] / 6.0;
    if !(brace > DEGENERATE_BRACE) {
        return Err(Error::DegenerateRoughness);
    }
    Ok(0.25f64.powf(0.2) * brace.powf(-0.2) * sd * (n as f64).powf(-0.2))
}

/// h* for a known R_new; not capped.
pub fn amise_oracle(kernel: &KernelSpec, r_new: f64, n: usize) -> Result<BandwidthChoice> {
    let (h, _) = amise_h(kernel, r_new, n)?;
    Ok(BandwidthChoice {
        h,
        method: BandwidthMethod::AmiseOracle,
        diagnostics: BandwidthDiagnostics { roughness: Some(r_new), ..Default::default() },
    })
}

// h* from an estimated roughness, falling back to h_os when it is degenerate.
fn capped_choice(kernel: &KernelSpec, r_new: f64, n: usize, cap: f64, method: BandwidthMethod) -> BandwidthChoice {
    let (h, clamped) = match amise_h(kernel, r_new, n) {
        Ok((h, _)) if h <= cap => (h, false),
        _ => (cap, true),
    };
    BandwidthChoice {
        h,
        method,
        diagnostics: BandwidthDiagnostics { h_os: cap, clamped, roughness: Some(r_new), ..Default::default() },
    }
}

/// Hermite rule from the classic skewness/kurtosis/pentakosis coefficients.
pub fn rule_gamma(data: &[f64], kernel: &KernelSpec) -> Result<BandwidthChoice> {
    let c = classic_coeffs(data)?;
    let r = roughness_from_coeffs(&c)?;
    // the brace is a positive multiple of r, so the degenerate check is on r
    let r = if r * c.scale.powi(5) > DEGENERATE_BRACE { r } else { 0.0 };
    Ok(capped_choice(kernel, r, data.len(), h_os(kernel, c.scale, data.len()), BandwidthMethod::RuleGamma))
}

/// Hermite rule from the robust coefficients δ₂…δ₅.
pub fn rule_delta(data: &[f64], kernel: &KernelSpec) -> Result<BandwidthChoice> {
    if data.len() < 5 {
        return Err(Error::TooFewObservations { need: 5, got: data.len() });
    }
    let c = robust_coeffs(data, 5)?;
    let r = roughness_from_coeffs(&c)?;
    let r = if r * c.scale.powi(5) > DEGENERATE_BRACE { r } else { 0.0 };
    Ok(capped_choice(kernel, r, data.len(), h_os(kernel, c.scale, data.len()), BandwidthMethod::RuleDelta))
}

/// Raw and debiased plug-in estimates of R_new.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PluginRoughness {
    /// n⁻²h⁻⁶Σ_{i,j}∫f̄(x)²K''((X_i − x)/h)K''((X_j − x)/h)/(f̄(X_i)f̄(X_j))dx
    pub raw: f64,
    /// (n/(n − 1)){raw − R(K'')/(nh⁵)}, floored at 0.
    pub debiased: f64,
    /// The debiased value was negative before flooring.
    pub floored: bool,
}

// (−ln f̄(X_i)) and, for the closed forms, the normal start parameters:
// Some(None) for the constant start, Some(Some(..)) for an unclipped normal.
fn ln_weights(data: &[f64], start: &FittedStart) -> Result<Vec<f64>> {
    data.iter()
        .map(|&x| {
            let v = start.ln_eval(x);
            if v == f64::NEG_INFINITY {
                Err(Error::StartVanishes(x))
            } else {
                Ok(-v)
            }
        })
        .collect()
}

fn closed_form_start(start: &FittedStart) -> Option<Option<(f64, f64)>> {
    if start.is_constant() {
        return Some(None);
    }
    match (start.normal_params(), start.clip_bounds()) {
        (Some(p), None) => Some(Some(p)),
        _ => None,
    }
}

// Gaussian factors and log prefactor contributed by f̄(x)².
fn start_square_factor(normal: Option<(f64, f64)>) -> (Option<(f64, f64)>, f64) {
    match normal {
        // φ_σ(u)² = φ_{σ/√2}(u)/(2√πσ)
        Some((mu, sd)) => (Some((sd / core::f64::consts::SQRT_2, mu)), -(2.0 * sqrt_pi() * sd).ln()),
        None => (None, 0.0),
    }
}

fn quadrature_breaks(data: &[f64], h: f64) -> Vec<f64> {
    let lo = data.iter().copied().fold(f64::INFINITY, f64::min) - 10.0 * h;
    let hi = data.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 10.0 * h;
    let count = (((hi - lo) / (0.5 * h)).ceil() as usize + 1).clamp(33, MAX_BREAKS);
    linspace(lo, hi, count)
}

/// ∫(f̄r̂'')² with pilot bandwidth `h`, Gaussian kernel only.
///
/// Uses the Gaussian product identity for the constant and unclipped normal
/// starts, adaptive quadrature otherwise.
pub fn plugin_roughness(data: &[f64], start: &FittedStart, kernel: &KernelSpec, h: f64) -> Result<PluginRoughness> {
    let rkpp = require_gaussian(kernel)?;
    check_bandwidth(h)?;
    if data.len() < 2 {
        return Err(Error::TooFewObservations { need: 2, got: data.len() });
    }
    let lw = ln_weights(data, start)?;
    let n = data.len() as f64;
    let raw = match closed_form_start(start) {
        Some(normal) => {
            let (extra, ln_pref) = start_square_factor(normal);
            let mut total = 0.0;
            for i in 0..data.len() {
                for j in i..data.len() {
                    let (ln_mass, m, v) = match extra {
                        Some(f) => gaussian_product(&[(h, data[i]), (h, data[j]), f]),
                        None => gaussian_product(&[(h, data[i]), (h, data[j])]),
                    };
                    let (a, b, s2) = ((m - data[i]) / h, (m - data[j]) / h, v / (h * h));
                    // E[((Z + a)² − 1)((Z + b)² − 1)], Z ~ N(0, s²)
                    let quartic = 3.0 * s2 * s2 + s2 * (a * a + b * b + 4.0 * a * b) + a * a * b * b;
                    let e = quartic - (s2 + a * a) - (s2 + b * b) + 1.0;
                    let term = (lw[i] + lw[j] + ln_pref + ln_mass).exp() * e;
                    total += if i == j { term } else { 2.0 * term };
                }
            }
            total / (n * n * h.powi(4))
        }
        None => {
            let rpp = |x: f64| {
                let s: f64 = data
                    .iter()
                    .zip(&lw)
                    .map(|(&xi, &w)| {
                        let u = (xi - x) / h;
                        (u * u - 1.0) * crate::math::phi(u) * w.exp()
                    })
                    .sum();
                s / (n * h.powi(3))
            };
            let f = |x: f64| {
                let v = rpp(x) * start.ln_eval(x).exp();
                v * v
            };
            integrate_with_breaks(f, &quadrature_breaks(data, h), QUAD_TOL)?
        }
    };
    let debiased = n / (n - 1.0) * (raw - rkpp / (n * h.powi(5)));
    Ok(PluginRoughness { raw, debiased: debiased.max(0.0), floored: debiased < 0.0 })
}

/// Plug-in rule: R_new estimated at a pilot bandwidth, then h*; optionally
/// iterated with the previous h as the next pilot.
pub fn plugin(
    data: &[f64],
    start: &FittedStart,
    kernel: &KernelSpec,
    pilot: Option<f64>,
    iterations: usize,
) -> Result<BandwidthChoice> {
    require_gaussian(kernel)?;
    let sd = ml_sd(data)?;
    let n = data.len();
    let cap = h_os(kernel, sd, n);
    let mut h = match pilot {
        Some(p) => p,
        None => rule_delta(data, kernel)?.h,
    };
    let mut last = None;
    for _ in 0..iterations.max(1) {
        let pr = plugin_roughness(data, start, kernel, h)?;
        if pr.floored || pr.debiased <= 0.0 {
            let mut fb = rule_delta(data, kernel)?;
            fb.method = BandwidthMethod::Plugin;
            fb.diagnostics.fallback = true;
            fb.diagnostics.raw_roughness = Some(pr.raw);
            return Ok(fb);
        }
        let choice = capped_choice(kernel, pr.debiased, n, cap, BandwidthMethod::Plugin);
        h = choice.h;
        last = Some((choice, pr.raw));
    }
    let (mut choice, raw) = last.ok_or(Error::DegenerateRoughness)?;
    choice.diagnostics.raw_roughness = Some(raw);
    Ok(choice)
}

/// Default cross-validation grid: log-spaced on [0.05h_os, h_os].
pub fn default_grid(data: &[f64], kernel: &KernelSpec) -> Result<Vec<f64>> {
    let cap = h_os(kernel, ml_sd(data)?, data.len());
    Ok(geomspace(DEFAULT_GRID_LOW * cap, cap, DEFAULT_GRID_POINTS))
}

fn check_grid(grid: &[f64], cap: f64) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    for &h in grid {
        check_bandwidth(h)?;
        if h > cap * (1.0 + 1e-12) {
            return Err(Error::InvalidArgument(alloc::format!("grid value {h} exceeds h_os = {cap}")));
        }
    }
    Ok(())
}

fn grid_minimum(grid: &[f64], values: &[f64]) -> Result<f64> {
    let mut best: Option<usize> = None;
    for (i, v) in values.iter().enumerate() {
        if v.is_finite() && best.is_none_or(|b| *v < values[b]) {
            best = Some(i);
        }
    }
    best.map(|i| grid[i]).ok_or(Error::EmptyGrid)
}

/// ¼σ_K⁴h⁴{R̂_new(h) − R(K'')/(nh⁵)} + R(K)/(nh) at each grid value.
pub fn bcv_curve(data: &[f64], start: &FittedStart, kernel: &KernelSpec, grid: &[f64]) -> Result<Vec<f64>> {
    let rkpp = require_gaussian(kernel)?;
    let n = data.len() as f64;
    grid.iter()
        .map(|&h| {
            let raw = plugin_roughness(data, start, kernel, h)?.raw;
            Ok(0.25 * kernel.sigma2 * kernel.sigma2 * h.powi(4) * (raw - rkpp / (n * h.powi(5)))
                + kernel.roughness / (n * h))
        })
        .collect()
}

/// Biased cross-validation over `grid` (all values in (0, h_os]).
pub fn bcv(data: &[f64], start: &FittedStart, kernel: &KernelSpec, grid: &[f64]) -> Result<BandwidthChoice> {
    let cap = h_os(kernel, ml_sd(data)?, data.len());
    check_grid(grid, cap)?;
    let values = bcv_curve(data, start, kernel, grid)?;
    let h = grid_minimum(grid, &values)?;
    Ok(BandwidthChoice {
        h,
        method: BandwidthMethod::Bcv,
        diagnostics: BandwidthDiagnostics {
            h_os: cap,
            curve: Some(BandwidthCurve { grid: grid.to_vec(), values }),
            ..Default::default()
        },
    })
}

/// ∫f̂² for the estimator with this start and Gaussian kernel.
pub fn integrated_square(data: &[f64], start: &FittedStart, h: f64) -> Result<f64> {
    check_bandwidth(h)?;
    if data.is_empty() {
        return Err(Error::TooFewObservations { need: 1, got: 0 });
    }
    let n = data.len() as f64;
    match closed_form_start(start) {
        Some(normal) => {
            let lw = ln_weights(data, start)?;
            let (extra, ln_pref) = start_square_factor(normal);
            let mut total = 0.0;
            for i in 0..data.len() {
                for j in i..data.len() {
                    let ln_mass = match extra {
                        Some(f) => gaussian_product(&[(h, data[i]), (h, data[j]), f]).0,
                        None => gaussian_product(&[(h, data[i]), (h, data[j])]).0,
                    };
                    let v = (lw[i] + lw[j] + ln_pref + ln_mass).exp();
                    total += if i == j { v } else { 2.0 * v };
                }
            }
            Ok(total / (n * n))
        }
        None => {
            let est = DensityEstimate::new(data.to_vec(), KernelSpec::gaussian(), h, start.clone(), false)?;
            integrate_with_breaks(|x| est.eval(x).powi(2), &quadrature_breaks(data, h), QUAD_TOL)
        }
    }
}

/// ∫f̂_h² − (2/n)Σf̂_{h,(i)}(X_i) at each grid value, where f̂_{(i)} drops X_i
/// and uses the start refitted without it.
pub fn ucv_curve(data: &[f64], start: &FittedStart, kernel: &KernelSpec, grid: &[f64]) -> Result<Vec<f64>> {
    require_gaussian(kernel)?;
    if data.len() < 3 {
        return Err(Error::TooFewObservations { need: 3, got: data.len() });
    }
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let n = data.len();
    let loo = leave_one_out_fits(start, data)?;
    // ln f̄_(i)(X_j), row i
    let ln_f: Vec<Vec<f64>> = loo.iter().map(|s| data.iter().map(|&x| s.ln_eval(x)).collect()).collect();
    for row in &ln_f {
        if let Some(pos) = row.iter().position(|v| *v == f64::NEG_INFINITY) {
            return Err(Error::StartVanishes(data[pos]));
        }
    }
    grid.iter()
        .map(|&h| {
            let sq = integrated_square(data, start, h)?;
            let mut cv = 0.0;
            for i in 0..n {
                let mut s = 0.0;
                for j in 0..n {
                    if j != i {
                        s += normal_pdf(data[j] - data[i], h) * (ln_f[i][i] - ln_f[i][j]).exp();
                    }
                }
                cv += s / (n - 1) as f64;
            }
            Ok(sq - 2.0 * cv / n as f64)
        })
        .collect()
}

/// Least-squares cross-validation over `grid` (all values in (0, h_os]).
pub fn ucv(data: &[f64], start: &FittedStart, kernel: &KernelSpec, grid: &[f64]) -> Result<BandwidthChoice> {
    let cap = h_os(kernel, ml_sd(data)?, data.len());
    check_grid(grid, cap)?;
    let values = ucv_curve(data, start, kernel, grid)?;
    let h = grid_minimum(grid, &values)?;
    Ok(BandwidthChoice {
        h,
        method: BandwidthMethod::Ucv,
        diagnostics: BandwidthDiagnostics {
            h_os: cap,
            curve: Some(BandwidthCurve { grid: grid.to_vec(), values }),
            ..Default::default()
        },
    })
}

/// Dispatches to the selector for `method`.
pub fn select_bandwidth(
    data: &[f64],
    method: BandwidthMethod,
    start: &FittedStart,
    kernel: &KernelSpec,
    opts: &BandwidthOptions,
) -> Result<BandwidthChoice> {
    let grid = || match &opts.grid {
        Some(g) => Ok(g.clone()),
        None => default_grid(data, kernel),
    };
    match method {
        BandwidthMethod::AmiseOracle => {
            let r = opts
                .oracle_roughness
                .ok_or_else(|| Error::InvalidArgument("amise_oracle needs the true roughness".to_string()))?;
            amise_oracle(kernel, r, data.len().max(1))
        }
        BandwidthMethod::RuleGamma => rule_gamma(data, kernel),
        BandwidthMethod::RuleDelta => rule_delta(data, kernel),
        BandwidthMethod::Plugin => plugin(data, start, kernel, opts.pilot, opts.plugin_iterations),
        BandwidthMethod::Bcv => bcv(data, start, kernel, &grid()?),
        BandwidthMethod::Ucv => ucv(data, start, kernel, &grid()?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::NormalMixture;
    use crate::starts::{fit_start_with_clip, StartFamily};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn gaussian_h_os_constant() {
        let k = KernelSpec::gaussian();
        assert!(close(h_os(&k, 1.0, 1), 1.144, 5e-4));
    }

    #[test]
    fn amise_h_examples() {
        let k = KernelSpec::gaussian();
        let r = 3.0 / (8.0 * sqrt_pi());
        let (h, min) = amise_h(&k, r, 100).unwrap();
        assert!(close(h, 0.4216, 1e-4));
        assert!(close(h, (4.0f64 / 3.0).powf(0.2) * 100f64.powf(-0.2), 1e-14));
        assert!(close(min, amise(&k, r, 100, h), 1e-15));
        let (h2, _) = amise_h(&k, 2.0 * r, 100).unwrap();
        assert!(close(h2 / h, 2f64.powf(-0.2), 1e-14));
        let (h3, _) = amise_h(&k, r, 3200).unwrap();
        assert!(close(h / h3, 2.0, 1e-12));
        assert_eq!(amise_h(&k, 0.0, 10), Err(Error::DegenerateRoughness));
        for i in 0..=400 {
            let g = h * (0.25 + 3.75 * i as f64 / 400.0);
            assert!(amise(&k, r, 100, g) >= min - 1e-12);
        }
    }

    #[test]
    fn hermite_rule_examples() {
        let h = h_from_gamma(&[1.0, 0.0, 0.0, 0.0, 1.0, 0.0], 1.0, 100).unwrap();
        assert!(close(h, 0.5565, 1e-4));
        let h = h_from_delta(&[0.0, 0.0, 0.1, 0.0, 0.0, 0.0], 1.0, 100).unwrap();
        assert!(close(h, 0.25f64.powf(0.2) * 0.01f64.powf(-0.2) * 100f64.powf(-0.2), 1e-12));
        assert_eq!(h_from_gamma(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0], 1.0, 100), Err(Error::DegenerateRoughness));
    }

    #[test]
    fn rules_match_raw_forms() {
        let m = NormalMixture::new(alloc::vec![
            crate::densities::Component { p: 0.7, mu: 0.0, sd: 1.0 },
            crate::densities::Component { p: 0.3, mu: 2.0, sd: 0.4 },
        ])
        .unwrap();
        let data = m.sample(400, 3).unwrap();
        let k = KernelSpec::gaussian();
        let g = rule_gamma(&data, &k).unwrap();
        let c = classic_coeffs(&data).unwrap();
        let raw = h_from_gamma(&c.values, c.scale, data.len()).unwrap();
        assert!(close(g.h, raw.min(g.diagnostics.h_os), 1e-12));
        let d = rule_delta(&data, &k).unwrap();
        let c = robust_coeffs(&data, 5).unwrap();
        let raw = h_from_delta(&c.values, c.scale, data.len()).unwrap();
        assert!(close(d.h, raw.min(d.diagnostics.h_os), 1e-12));
    }

    #[test]
    fn degenerate_roughness_clamps() {
        let k = KernelSpec::gaussian();
        let g = capped_choice(&k, 0.0, 100, 0.5, BandwidthMethod::RuleGamma);
        assert!(g.diagnostics.clamped && g.h == 0.5);
    }

    #[test]
    fn epanechnikov_rejected_by_plugin() {
        let k = KernelSpec::new(KernelShape::Epanechnikov);
        let s = FittedStart::constant();
        assert_eq!(
            plugin_roughness(&[0.0, 1.0, 2.0], &s, &k, 0.5),
            Err(Error::KernelNotSmooth("epanechnikov"))
        );
    }

    // brute-force trapezoid of (f̄ r̂'')² on a fine grid
    fn trapezoid_roughness(data: &[f64], start: &FittedStart, h: f64) -> f64 {
        let n = data.len() as f64;
        let grid = linspace(-15.0, 15.0, 20_001);
        let f = |x: f64| {
            let s: f64 = data
                .iter()
                .map(|&xi| {
                    let u = (xi - x) / h;
                    (u * u - 1.0) * crate::math::phi(u) / start.eval(xi).unwrap()
                })
                .sum();
            (start.eval(x).unwrap() * s / (n * h.powi(3))).powi(2)
        };
        let dx = grid[1] - grid[0];
        grid.iter().map(|&x| f(x)).sum::<f64>() * dx
    }

    #[test]
    fn plugin_closed_form_matches_trapezoid() {
        let data = NormalMixture::normal(0.3, 1.2).unwrap().sample(20, 9).unwrap();
        let k = KernelSpec::gaussian();
        for start in [
            FittedStart::constant(),
            fit_start_with_clip(StartFamily::Normal, &data, None).unwrap(),
            fit_start_with_clip(StartFamily::Normal, &data, Some(2.5)).unwrap(),
        ] {
            let pr = plugin_roughness(&data, &start, &k, 0.6).unwrap();
            let t = trapezoid_roughness(&data, &start, 0.6);
            assert!(close(pr.raw, t, 1e-6 * t.max(1.0)), "{:?}: {} vs {}", start.family(), pr.raw, t);
        }
    }

    #[test]
    fn integrated_square_matches_trapezoid() {
        let data = NormalMixture::normal(0.0, 1.0).unwrap().sample(12, 4).unwrap();
        for start in [FittedStart::constant(), fit_start_with_clip(StartFamily::Normal, &data, None).unwrap()] {
            let est = DensityEstimate::new(data.clone(), KernelSpec::gaussian(), 0.4, start.clone(), false).unwrap();
            let grid = linspace(-12.0, 12.0, 20_001);
            let dx = grid[1] - grid[0];
            let t = grid.iter().map(|&x| est.eval(x).powi(2)).sum::<f64>() * dx;
            assert!(close(integrated_square(&data, &start, 0.4).unwrap(), t, 1e-8));
        }
    }

    #[test]
    fn constant_start_ucv_is_textbook() {
        let data = NormalMixture::normal(0.0, 1.0).unwrap().sample(15, 21).unwrap();
        let n = data.len() as f64;
        let h = 0.45;
        let mut sq = 0.0;
        let mut loo = 0.0;
        for (i, &a) in data.iter().enumerate() {
            for (j, &b) in data.iter().enumerate() {
                sq += normal_pdf(a - b, h * core::f64::consts::SQRT_2);
                if i != j {
                    loo += normal_pdf(a - b, h);
                }
            }
        }
        let expected = sq / (n * n) - 2.0 * loo / (n * (n - 1.0));
        let got = ucv_curve(&data, &FittedStart::constant(), &KernelSpec::gaussian(), &[h]).unwrap()[0];
        assert!(close(got, expected, 1e-12), "{got} vs {expected}");
    }

    #[test]
    fn bcv_recomposes_from_plugin_parts() {
        let data = NormalMixture::normal(0.0, 1.0).unwrap().sample(50, 2).unwrap();
        let start = fit_start_with_clip(StartFamily::Normal, &data, None).unwrap();
        let k = KernelSpec::gaussian();
        let grid = default_grid(&data, &k).unwrap();
        let choice = bcv(&data, &start, &k, &grid).unwrap();
        let curve = choice.diagnostics.curve.unwrap();
        let n = data.len() as f64;
        for (&h, &v) in curve.grid.iter().zip(&curve.values).step_by(7) {
            let raw = plugin_roughness(&data, &start, &k, h).unwrap().raw;
            let direct = 0.25 * h.powi(4) * (raw - 3.0 / (8.0 * sqrt_pi() * n * h.powi(5))) + 1.0 / (2.0 * sqrt_pi() * n * h);
            assert!(close(v, direct, 1e-12 * direct.abs().max(1.0)));
        }
        assert!(choice.h <= choice.diagnostics.h_os);
    }

    #[test]
    fn grid_errors() {
        let data = [0.0, 1.0, 3.0, 4.5];
        let k = KernelSpec::gaussian();
        assert_eq!(ucv(&data, &FittedStart::constant(), &k, &[]), Err(Error::EmptyGrid));
        assert!(matches!(ucv(&data, &FittedStart::constant(), &k, &[100.0]), Err(Error::InvalidArgument(_))));
        assert!(matches!(
            ucv_curve(&[1.0, 2.0], &FittedStart::constant(), &k, &[0.5]),
            Err(Error::TooFewObservations { .. })
        ));
    }

    #[test]
    fn method_names_round_trip() {
        for m in [
            BandwidthMethod::AmiseOracle,
            BandwidthMethod::RuleGamma,
            BandwidthMethod::RuleDelta,
            BandwidthMethod::Plugin,
            BandwidthMethod::Bcv,
            BandwidthMethod::Ucv,
        ] {
            assert_eq!(m.name().parse::<BandwidthMethod>().unwrap(), m);
        }
    }
}
