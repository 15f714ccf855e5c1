//! Hermite polynomials and the two Hermite expansions around the normal.
//!
//! The classic expansion writes f(x) = σ⁻¹φ(y){1 + Σ_{j≥3} γ_j H_j(y)/j!}
//! with y = (x − μ)/σ; the robust one uses H_j(√2·y) and coefficients δ_j
//! whose empirical versions have bounded summands. Both lead to closed forms
//! for the roughness ∫(f₀r'')² that feed the Hermite bandwidth rules.

use alloc::vec::Vec;

#[allow(unused_imports)] // inherent f64 methods shadow it when a dependency links std
use num_traits::Float;

use crate::math::{factorial, mean_and_ml_variance, sqrt_pi};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum HermiteKind {
    /// γ_j = E H_j((X − μ)/σ).
    ClassicGamma,
    /// δ_j = √2·E H_j(√2(X − μ)/σ)exp{−½((X − μ)/σ)²}.
    RobustDelta,
}

/// Expansion coefficients indexed from 0, together with the location and
/// scale they were standardised with.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HermiteCoeffs {
    pub kind: HermiteKind,
    pub values: Vec<f64>,
    pub center: f64,
    pub scale: f64,
}

/// Probabilists' Hermite polynomial H_j(x), with φ^{(j)} = (−1)^j φ·H_j.
pub fn hermite_poly(j: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, x);
    if j == 0 {
        return prev;
    }
    for k in 1..j {
        let next = x * cur - k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// H_0(x), …, H_max(x) in one pass.
pub fn hermite_all(max: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(max + 1);
    out.push(1.0);
    if max >= 1 {
        out.push(x);
    }
    for k in 1..max {
        let next = x * out[k] - k as f64 * out[k - 1];
        out.push(next);
    }
    out
}

/// A_{j,k} = ∫H_j(y)H_k(y)φ(y)²dy.
pub fn a_jk(j: usize, k: usize) -> f64 {
    if (j + k) % 2 == 1 {
        return 0.0;
    }
    let p = (j + k) / 2;
    let sign = if (j + p).is_multiple_of(2) { 1.0 } else { -1.0 };
    // (2p)!/(p!·2^{2p}) built as a running product to stay finite
    let ratio = (1..=p).fold(1.0, |acc, i| acc * (p + i) as f64 / 4.0);
    sign * ratio / (2.0 * sqrt_pi())
}

fn standardized(data: &[f64]) -> Result<(f64, f64)> {
    let (mean, var) = mean_and_ml_variance(data);
    if !(var > 0.0) {
        return Err(Error::ZeroVariance);
    }
    Ok((mean, var.sqrt()))
}

/// γ₀…γ₅ from standardised sample moments: γ₃ = m₃, γ₄ = m₄ − 3,
/// γ₅ = m₅ − 10m₃ (so every coefficient vanishes for the normal).
pub fn classic_coeffs(data: &[f64]) -> Result<HermiteCoeffs> {
    if data.len() < 5 {
        return Err(Error::TooFewObservations { need: 5, got: data.len() });
    }
    let (center, scale) = standardized(data)?;
    let n = data.len() as f64;
    let mut m = [0.0f64; 6];
    for &x in data {
        let z = (x - center) / scale;
        let mut zk = 1.0;
        for slot in m.iter_mut() {
            *slot += zk;
            zk *= z;
        }
    }
    for slot in m.iter_mut() {
        *slot /= n;
    }
    Ok(HermiteCoeffs {
        kind: HermiteKind::ClassicGamma,
        values: alloc::vec![1.0, 0.0, 0.0, m[3], m[4] - 3.0, m[5] - 10.0 * m[3]],
        center,
        scale,
    })
}

/// δ̂₀…δ̂_{max_j} standardised by the sample mean and ML standard deviation.
pub fn robust_coeffs(data: &[f64], max_j: usize) -> Result<HermiteCoeffs> {
    if data.len() < 2 {
        return Err(Error::TooFewObservations { need: 2, got: data.len() });
    }
    if max_j < 2 {
        return Err(Error::InsufficientDegree { need: 2, got: max_j });
    }
    let (center, scale) = standardized(data)?;
    let mut values = alloc::vec![0.0; max_j + 1];
    for &x in data {
        let z = (x - center) / scale;
        let w = core::f64::consts::SQRT_2 * (-0.5 * z * z).exp();
        for (slot, hj) in values.iter_mut().zip(hermite_all(max_j, core::f64::consts::SQRT_2 * z)) {
            *slot += w * hj;
        }
    }
    let n = data.len() as f64;
    for v in values.iter_mut() {
        *v /= n;
    }
    Ok(HermiteCoeffs { kind: HermiteKind::RobustDelta, values, center, scale })
}

/// sup_z |H_j(√2·z)e^{−z²/2}|, the bound on one robust summand (before the √2 factor).
pub fn robust_summand_bound(j: usize) -> f64 {
    // the envelope decays like e^{−z²/2}; 0.001-spaced scan over |z| ≤ 12
    (0..=12_000)
        .map(|i| {
            let z = i as f64 * 1e-3;
            (hermite_poly(j, core::f64::consts::SQRT_2 * z) * (-0.5 * z * z).exp()).abs()
        })
        .fold(0.0, f64::max)
}

/// Roughness ∫(f₀r'')² implied by the coefficients.
///
/// Classic coefficients use the closed form through pentakosis (needs
/// γ₀…γ₅); robust coefficients use every δ_j supplied (needs δ₀…δ₂).
pub fn roughness_from_coeffs(c: &HermiteCoeffs) -> Result<f64> {
    let s5 = c.scale.powi(5);
    match c.kind {
        HermiteKind::ClassicGamma => {
            if c.values.len() < 6 {
                return Err(Error::InsufficientDegree { need: 5, got: c.values.len().saturating_sub(1) });
            }
            let (g3, g4, g5) = (c.values[3], c.values[4], c.values[5]);
            let brace = (2.0 / 3.0) * g3 * g3 + 0.25 * g4 * g4 + (5.0 / 72.0) * g5 * g5 - g3 * g5 / 3.0;
            Ok(3.0 / (8.0 * sqrt_pi()) * brace / s5)
        }
        HermiteKind::RobustDelta => {
            if c.values.len() < 3 {
                return Err(Error::InsufficientDegree { need: 2, got: c.values.len().saturating_sub(1) });
            }
            let sum: f64 = c.values[2..].iter().enumerate().map(|(j, d)| d * d / factorial(j)).sum();
            Ok(2.0 / sqrt_pi() * sum / s5)
        }
    }
}

/// ∫(f'')² for a classic expansion with coefficients γ₀…γ_m, as the
/// double sum σ⁻⁵Σ(γ_j/j!)(γ_k/k!)A_{j+2,k+2}.
pub fn classic_r_trad(gammas: &[f64], scale: f64) -> f64 {
    let mut total = 0.0;
    for (j, gj) in gammas.iter().enumerate() {
        for (k, gk) in gammas.iter().enumerate() {
            total += gj / factorial(j) * gk / factorial(k) * a_jk(j + 2, k + 2);
        }
    }
    total / scale.powi(5)
}

/// ∫(f₀r'')² for a classic expansion, as σ⁻⁵Σ_{j,k≥2}γ_jγ_k A_{j−2,k−2}/((j−2)!(k−2)!).
pub fn classic_r_new(gammas: &[f64], scale: f64) -> f64 {
    let mut total = 0.0;
    for (j, gj) in gammas.iter().enumerate().skip(2) {
        for (k, gk) in gammas.iter().enumerate().skip(2) {
            total += gj / factorial(j - 2) * gk / factorial(k - 2) * a_jk(j - 2, k - 2);
        }
    }
    total / scale.powi(5)
}
