//! The classic kernel estimator and the start-times-correction estimator
//!
//! ```text
//! f̂(x) = f̄(x, θ̂) · (1/n) Σ K_h(X_i − x) / f̄(X_i, θ̂)
//! ```
//!
//! where f̄ is the (by default clipped) start. A constant start gives back the
//! classic estimator exactly.

use alloc::vec::Vec;

#[allow(unused_imports)] // inherent f64 methods shadow it when a dependency links std
use num_traits::Float;

use crate::hermite::classic_coeffs;
use crate::kernels::{check_bandwidth, KernelShape, KernelSpec};
use crate::quadrature::{integrate_with_breaks, linspace};
use crate::starts::FittedStart;
use crate::{Error, Result};

const INTEGRAL_TOL: f64 = 1e-11;
const MAX_INTEGRAL_BREAKS: usize = 4000;

/// Classic kernel estimate (1/n)ΣK_h(X_i − x).
pub fn estimate_kernel(data: &[f64], kernel: &KernelSpec, h: f64, x: f64) -> Result<f64> {
    check_bandwidth(h)?;
    if data.is_empty() {
        return Err(Error::TooFewObservations { need: 1, got: 0 });
    }
    Ok(data.iter().map(|&xi| kernel.scaled(h, xi - x)).sum::<f64>() / data.len() as f64)
}

/// ∫f̂ and, on the normal-start/Gaussian-kernel path, the approximation
/// 1 + ⅛γ̂₄h⁴/σ̂⁴.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralReport {
    pub integral: f64,
    pub kurtosis_approx: Option<f64>,
}

/// r̂ and the goodness-of-fit statistic
/// Z(x) = {log r̂(x) + ½v(x)}/v(x)^{1/2} with v(x) = R(K)/(nh f̄(x, θ̂)).
/// `log_r` and `z` are `None` where r̂(x) = 0.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CorrectionCurve {
    pub grid: Vec<f64>,
    pub r_hat: Vec<f64>,
    pub log_r: Vec<Option<f64>>,
    pub z: Vec<Option<f64>>,
}

/// A fitted one-dimensional density estimate.
#[derive(Debug, Clone)]
pub struct DensityEstimate {
    data: Vec<f64>,
    kernel: KernelSpec,
    h: f64,
    start: FittedStart,
    normalize: bool,
    // −ln f̄(X_i, θ̂)
    ln_weights: Vec<f64>,
    norm: f64,
}

impl DensityEstimate {
    /// Builds the estimate; `normalize` divides by ∫f̂ (computed once here).
    pub fn new(data: Vec<f64>, kernel: KernelSpec, h: f64, start: FittedStart, normalize: bool) -> Result<Self> {
        check_bandwidth(h)?;
        if data.is_empty() {
            return Err(Error::TooFewObservations { need: 1, got: 0 });
        }
        let ln_weights = data
            .iter()
            .map(|&x| {
                let v = start.ln_eval(x);
                if v == f64::NEG_INFINITY {
                    Err(Error::StartVanishes(x))
                } else {
                    Ok(-v)
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        let mut est = DensityEstimate { data, kernel, h, start, normalize: false, ln_weights, norm: 1.0 };
        if normalize {
            est.norm = est.integral()?.integral;
            est.normalize = true;
        }
        Ok(est)
    }

    /// The classic kernel estimator as a [`DensityEstimate`].
    pub fn kernel_only(data: Vec<f64>, kernel: KernelSpec, h: f64) -> Result<Self> {
        Self::new(data, kernel, h, FittedStart::constant(), false)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn start(&self) -> &FittedStart {
        &self.start
    }

    pub fn normalized(&self) -> bool {
        self.normalize
    }

    fn n(&self) -> f64 {
        self.data.len() as f64
    }

    /// r̂(x) = (1/n)ΣK_h(X_i − x)/f̄(X_i, θ̂).
    pub fn correction(&self, x: f64) -> f64 {
        let radius = self.kernel.support_radius().map(|r| r * self.h);
        let mut sum = 0.0;
        for (&xi, &lw) in self.data.iter().zip(&self.ln_weights) {
            if let Some(r) = radius {
                if (xi - x).abs() > r {
                    continue;
                }
            }
            sum += self.kernel.scaled(self.h, xi - x) * lw.exp();
        }
        sum / self.n()
    }

    /// f̂(x), divided by ∫f̂ when normalisation is on.
    pub fn eval(&self, x: f64) -> f64 {
        let raw = if self.start.is_constant() {
            self.correction(x)
        } else {
            let ln_fx = self.start.ln_eval(x);
            let radius = self.kernel.support_radius().map(|r| r * self.h);
            let mut sum = 0.0;
            for (&xi, &lw) in self.data.iter().zip(&self.ln_weights) {
                if let Some(r) = radius {
                    if (xi - x).abs() > r {
                        continue;
                    }
                }
                let k = self.kernel.scaled(self.h, xi - x);
                if k > 0.0 {
                    sum += k * (ln_fx + lw).exp();
                }
            }
            sum / self.n()
        };
        raw / self.norm
    }

    /// f̂ on a grid.
    pub fn eval_grid(&self, grid: &[f64]) -> Vec<f64> {
        grid.iter().map(|&x| self.eval(x)).collect()
    }

    /// Exponent-ratio form for a normal start with the Gaussian kernel:
    /// f̂(x) = (1/n)Σ(2π)^{-1/2}h⁻¹exp{−½u_i² − ½z̄(x)² + ½z̄(X_i)²} with
    /// u_i = (X_i − x)/h and z̄ the clipped standardised value. `None` when
    /// the start or kernel does not fit this form.
    pub fn eval_exponent_ratio(&self, x: f64) -> Option<f64> {
        let (mu, sd) = self.start.normal_params()?;
        if self.kernel.shape != KernelShape::Gaussian {
            return None;
        }
        let t = self.start.clip().unwrap_or(f64::INFINITY);
        let zbar = |v: f64| ((v - mu) / sd).clamp(-t, t);
        let zx = zbar(x);
        let sum: f64 = self
            .data
            .iter()
            .map(|&xi| {
                let u = (xi - x) / self.h;
                let zi = zbar(xi);
                (-0.5 * u * u - 0.5 * zx * zx + 0.5 * zi * zi).exp()
            })
            .sum();
        Some(sum / (self.n() * self.h * crate::math::SQRT_2PI) / self.norm)
    }

    /// ∫f̂ (of the unnormalised estimate). Exactly 1 for the constant start;
    /// the closed form (1+h²/σ̂²)^{−1/2}(1/n)Σexp{½h²(X_i−μ̂)²/(σ̂²(σ̂²+h²))}
    /// for an unclipped normal start with the Gaussian kernel; adaptive
    /// quadrature otherwise.
    pub fn integral(&self) -> Result<IntegralReport> {
        if self.start.is_constant() {
            return Ok(IntegralReport { integral: 1.0, kurtosis_approx: None });
        }
        let gaussian_normal = self.kernel.shape == KernelShape::Gaussian && self.start.normal_params().is_some();
        let kurtosis_approx = match self.start.normal_params() {
            Some((_, sd)) if gaussian_normal && self.data.len() >= 5 => {
                let g4 = classic_coeffs(&self.data)?.values[4];
                Some(1.0 + g4 * self.h.powi(4) / (8.0 * sd.powi(4)))
            }
            _ => None,
        };
        let integral = match self.start.normal_params() {
            Some((mu, sd)) if gaussian_normal && self.start.clip().is_none() => {
                let (s2, h2) = (sd * sd, self.h * self.h);
                let sum: f64 = self
                    .data
                    .iter()
                    .map(|&xi| (0.5 * h2 * (xi - mu) * (xi - mu) / (s2 * (s2 + h2))).exp())
                    .sum();
                sum / self.n() / (1.0 + h2 / s2).sqrt()
            }
            _ => self.integral_by_quadrature()?,
        };
        Ok(IntegralReport { integral, kurtosis_approx })
    }

    /// ∫f̂ by adaptive quadrature, whatever the start.
    pub fn integral_by_quadrature(&self) -> Result<f64> {
        let reach = self.kernel.effective_radius() * self.h;
        let (mut lo, mut hi) = self
            .data
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
        if let Some((mu, _)) = self.start.normal_params() {
            if self.start.clip().is_none() {
                lo = lo.min(mu);
                hi = hi.max(mu);
            }
        }
        lo -= reach;
        hi += reach;
        let pieces = (((hi - lo) / self.h).ceil() as usize * 2).clamp(8, MAX_INTEGRAL_BREAKS);
        let mut breaks = linspace(lo, hi, pieces + 1);
        if let Some((a, b)) = self.start.clip_bounds() {
            breaks.extend_from_slice(&[a, b]);
        }
        if self.kernel.support_radius().is_some() {
            let r = self.kernel.effective_radius() * self.h;
            for &x in &self.data {
                breaks.extend_from_slice(&[x - r, x + r]);
            }
        }
        breaks.retain(|b| *b >= lo && *b <= hi);
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let scale = self.norm;
        integrate_with_breaks(|x| self.eval(x) * scale, &breaks, INTEGRAL_TOL)
    }

    /// r̂ and Z on a grid.
    pub fn correction_curve(&self, grid: &[f64]) -> Result<CorrectionCurve> {
        if grid.is_empty() {
            return Err(Error::EmptyGrid);
        }
        let nh = self.n() * self.h;
        let mut r_hat = Vec::with_capacity(grid.len());
        let mut log_r = Vec::with_capacity(grid.len());
        let mut z = Vec::with_capacity(grid.len());
        for &x in grid {
            let r = self.correction(x);
            let v = self.kernel.roughness / (nh * self.start.ln_eval(x).exp());
            r_hat.push(r);
            if r > 0.0 {
                let lr = r.ln();
                log_r.push(Some(lr));
                let zx = (lr + 0.5 * v) / v.sqrt();
                z.push(zx.is_finite().then_some(zx));
            } else {
                log_r.push(None);
                z.push(None);
            }
        }
        Ok(CorrectionCurve { grid: grid.to_vec(), r_hat, log_r, z })
    }
}
