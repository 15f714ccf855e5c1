//! The d-dimensional estimator with a multinormal start.
//!
//! Data are sphered, Y_i = Σ̂^{−1/2}(X_i − μ̂), so one scalar bandwidth h acts
//! on every axis. The estimate is
//! f̂(x) = (1/n)Σ N(x; X_i, h²Σ̂)·exp{−½q(x)}/exp{−½q(X_i)} with q the squared
//! Mahalanobis distance from μ̂ (capped at the clip radius).

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)] // inherent f64 methods shadow it when a dependency links std
use num_traits::Float;

use crate::hermite::hermite_all;
use crate::math::{factorial, LN_SQRT_2PI};
use crate::starts::DEFAULT_CLIP;
use crate::{Error, Result};

const EIGEN_RATIO: f64 = 1e-10;
/// Oversmoothing constant in sphered coordinates.
const OVERSMOOTH: f64 = 1.144;
const DEGENERATE_BRACE: f64 = 1e-12;
pub const DEFAULT_MAX_DEGREE: usize = 4;

/// ML mean and covariance with the symmetric roots of the covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct Sphering {
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
    /// Σ̂^{1/2}
    pub root: DMatrix<f64>,
    /// Σ̂^{−1/2}
    pub root_inv: DMatrix<f64>,
    pub ln_det: f64,
}

impl Sphering {
    pub fn fit(data: &DMatrix<f64>) -> Result<Self> {
        let (n, d) = data.shape();
        if d == 0 {
            return Err(Error::InvalidArgument("data has no columns".into()));
        }
        if n < d + 1 {
            return Err(Error::TooFewObservations { need: d + 1, got: n });
        }
        let nf = n as f64;
        let mean = DVector::from_iterator(d, (0..d).map(|k| data.column(k).sum() / nf));
        let mut cov = DMatrix::zeros(d, d);
        for row in data.row_iter() {
            let c = row.transpose() - &mean;
            cov += &c * c.transpose();
        }
        cov /= nf;
        let eig = cov.clone().symmetric_eigen();
        let max = eig.eigenvalues.max();
        let min = eig.eigenvalues.min();
        if !(max > 0.0) || !(min > EIGEN_RATIO * max) {
            return Err(Error::SingularCovariance);
        }
        let q = &eig.eigenvectors;
        let sqrt = DMatrix::from_diagonal(&eig.eigenvalues.map(|v| v.sqrt()));
        let inv_sqrt = DMatrix::from_diagonal(&eig.eigenvalues.map(|v| 1.0 / v.sqrt()));
        let root = q * sqrt * q.transpose();
        let root_inv = q * inv_sqrt * q.transpose();
        let ln_det = eig.eigenvalues.iter().map(|v| v.ln()).sum();
        Ok(Sphering { mean, cov, root, root_inv, ln_det })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Σ̂^{−1/2}(x − μ̂)
    pub fn apply(&self, x: &[f64]) -> Result<DVector<f64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        Ok(&self.root_inv * (DVector::from_column_slice(x) - &self.mean))
    }

    /// μ̂ + Σ̂^{1/2}y
    pub fn invert(&self, y: &DVector<f64>) -> DVector<f64> {
        &self.mean + &self.root * y
    }
}

/// Sphered data (one row per observation) and the transform used.
pub fn sphere(data: &DMatrix<f64>) -> Result<(DMatrix<f64>, Sphering)> {
    let s = Sphering::fit(data)?;
    let mut y = DMatrix::zeros(data.nrows(), data.ncols());
    for (i, row) in data.row_iter().enumerate() {
        let v = &s.root_inv * (row.transpose() - &s.mean);
        y.set_row(i, &v.transpose());
    }
    Ok((y, s))
}

/// Product-Gaussian kernel estimate (1/n)Σ∏_k φ_{h_k}(X_{ik} − x_k).
pub fn mv_kernel_estimate(data: &DMatrix<f64>, bandwidths: &[f64], x: &[f64]) -> Result<f64> {
    let (n, d) = data.shape();
    if bandwidths.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: bandwidths.len() });
    }
    if x.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: x.len() });
    }
    for &h in bandwidths {
        crate::kernels::check_bandwidth(h)?;
    }
    if n == 0 {
        return Err(Error::TooFewObservations { need: 1, got: 0 });
    }
    let ln_norm: f64 = bandwidths.iter().map(|h| h.ln() + LN_SQRT_2PI).sum();
    let mut total = 0.0;
    for row in data.row_iter() {
        let q: f64 = (0..d).map(|k| ((row[k] - x[k]) / bandwidths[k]).powi(2)).sum();
        total += (-0.5 * q - ln_norm).exp();
    }
    Ok(total / n as f64)
}

/// Whether the kernel factor carries |Σ̂|^{−1/2}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum MvNormalization {
    /// N(x; X_i, h²Σ̂) kernels, so the estimate integrates to about 1.
    #[default]
    Normalized,
    /// (2π)^{−d/2}h^{−d}exp{−½(x − X_i)'Σ̂⁻¹(x − X_i)/h²} without the determinant.
    Literal,
}

/// Multinormal-start estimate in d dimensions.
#[derive(Debug, Clone)]
pub struct MvEstimate {
    sphering: Sphering,
    y: Vec<DVector<f64>>,
    h: f64,
    clip: Option<f64>,
    normalization: MvNormalization,
    // ½q̄(Y_i), the clipped half squared radius
    half_q: Vec<f64>,
}

impl MvEstimate {
    /// Fits μ̂, Σ̂ by maximum likelihood and clips the start at Mahalanobis
    /// radius 2.5.
    pub fn new(data: &DMatrix<f64>, h: f64) -> Result<Self> {
        Self::with_options(data, h, Some(DEFAULT_CLIP), MvNormalization::Normalized)
    }

    pub fn with_options(
        data: &DMatrix<f64>,
        h: f64,
        clip: Option<f64>,
        normalization: MvNormalization,
    ) -> Result<Self> {
        crate::kernels::check_bandwidth(h)?;
        if let Some(t) = clip {
            if !(t > 0.0) || !t.is_finite() {
                return Err(Error::InvalidArgument(alloc::format!("clip radius must be positive, got {t}")));
            }
        }
        let (ys, sphering) = sphere(data)?;
        let y: Vec<DVector<f64>> = ys.row_iter().map(|r| r.transpose()).collect();
        let mut est = MvEstimate { sphering, y, h, clip, normalization, half_q: Vec::new() };
        est.half_q = est.y.iter().map(|v| est.clipped_half_q(v)).collect();
        Ok(est)
    }

    fn clipped_half_q(&self, y: &DVector<f64>) -> f64 {
        let q = y.norm_squared();
        0.5 * match self.clip {
            Some(t) => q.min(t * t),
            None => q,
        }
    }

    pub fn sphering(&self) -> &Sphering {
        &self.sphering
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn dim(&self) -> usize {
        self.sphering.dim()
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let y = self.sphering.apply(x)?;
        let d = self.dim() as f64;
        let h2 = self.h * self.h;
        let mut ln_norm = d * (LN_SQRT_2PI + self.h.ln());
        if self.normalization == MvNormalization::Normalized {
            ln_norm += 0.5 * self.sphering.ln_det;
        }
        let hq_x = self.clipped_half_q(&y);
        let mut total = 0.0;
        for (yi, hq_i) in self.y.iter().zip(&self.half_q) {
            let k = -0.5 * (&y - yi).norm_squared() / h2;
            total += (k - ln_norm - hq_x + hq_i).exp();
        }
        Ok(total / self.y.len() as f64)
    }
}

/// Sphered-coordinate bandwidth and how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MvBandwidth {
    pub h: f64,
    /// 1.144·n^{−1/(d+4)}
    pub cap: f64,
    pub brace: f64,
    pub clamped: bool,
}

/// Multi-indices in ℕ^d of total degree ≤ `max_total`.
pub fn multi_indices(d: usize, max_total: usize) -> Vec<Vec<usize>> {
    fn rec(d: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == d {
            out.push(cur.clone());
            return;
        }
        for j in 0..=left {
            cur.push(j);
            rec(d, left - j, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, max_total, &mut Vec::with_capacity(d), &mut out);
    out
}

/// Robust multivariate Hermite coefficients
/// δ̂_j = 2^{d/2}(1/n)Σexp(−½|Y_i|²)∏_k H_{j_k}(√2·Y_{ik}) for |j| ≤ max_total.
pub fn mv_robust_coeffs(data: &DMatrix<f64>, max_total: usize) -> Result<BTreeMap<Vec<usize>, f64>> {
    let (ys, _) = sphere(data)?;
    let (n, d) = ys.shape();
    let indices = multi_indices(d, max_total);
    let mut out: BTreeMap<Vec<usize>, f64> = indices.iter().map(|j| (j.clone(), 0.0)).collect();
    let scale = 2f64.powf(0.5 * d as f64) / n as f64;
    for row in ys.row_iter() {
        let w = (-0.5 * row.norm_squared()).exp();
        let herm: Vec<Vec<f64>> =
            (0..d).map(|k| hermite_all(max_total, core::f64::consts::SQRT_2 * row[k])).collect();
        for j in &indices {
            let prod: f64 = j.iter().enumerate().map(|(k, &jk)| herm[k][jk]).product();
            *out.get_mut(j).expect("index enumerated above") += scale * w * prod;
        }
    }
    Ok(out)
}

/// Σ_{|j| ≤ max_degree}(δ_{j+2e₁} + … + δ_{j+2e_d})²/(j₁!…j_d!).
pub fn mv_roughness_brace(deltas: &BTreeMap<Vec<usize>, f64>, d: usize, max_degree: usize) -> f64 {
    let mut brace = 0.0;
    for j in multi_indices(d, max_degree) {
        let mut s = 0.0;
        for k in 0..d {
            let mut shifted = j.clone();
            shifted[k] += 2;
            s += deltas.get(&shifted).copied().unwrap_or(0.0);
        }
        let fact: f64 = j.iter().map(|&jk| factorial(jk)).product();
        brace += s * s / fact;
    }
    brace
}

/// ĥ = (d/4)^{1/(d+4)}·brace^{−1/(d+4)}·n^{−1/(d+4)} in sphered coordinates,
/// clamped to 1.144·n^{−1/(d+4)}.
pub fn mv_bandwidth(data: &DMatrix<f64>, max_degree: usize) -> Result<MvBandwidth> {
    let (n, d) = data.shape();
    let deltas = mv_robust_coeffs(data, max_degree + 2)?;
    let brace = mv_roughness_brace(&deltas, d, max_degree);
    let p = 1.0 / (d as f64 + 4.0);
    let nf = n as f64;
    let cap = OVERSMOOTH * nf.powf(-p);
    if !(brace > DEGENERATE_BRACE) {
        return Ok(MvBandwidth { h: cap, cap, brace, clamped: true });
    }
    let h = (d as f64 / 4.0).powf(p) * brace.powf(-p) * nf.powf(-p);
    Ok(if h > cap {
        MvBandwidth { h: cap, cap, brace, clamped: true }
    } else {
        MvBandwidth { h, cap, brace, clamped: false }
    })
}
