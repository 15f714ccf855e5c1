//! Exact finite-sample MISE and ISE when the truth is a normal mixture.
//!
//! [`mise_kernel`] is the Marron–Wand formula for the classic estimator with
//! the Gaussian kernel. [`mise_new`] is the corresponding closed form for the
//! normal-start estimator with fixed start parameters (μ₀, σ₀), written as
//! (1 − 1/n)E A₁ + (1/n)E A₂ − 2E B + R(f). Every term is a sum of Gaussian
//! integrals, so all exponents are accumulated in log space to survive very
//! narrow components.

use alloc::vec::Vec;

#[allow(unused_imports)] // inherent f64 methods shadow it when a dependency links std
use num_traits::Float;

use crate::densities::{marron_wand, NormalMixture};
use crate::math::{ln_normal_pdf, normal_pdf, LN_SQRT_2PI, SQRT_2PI};
use crate::quadrature::{geomspace, golden_section};
use crate::{Error, Result};

const SCAN_POINTS: usize = 64;
const GLOBAL_SCAN_POINTS: usize = 4096;

/// Best-case comparison of the two estimators for one truth and sample size.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MiseReport {
    pub case_id: usize,
    pub n: usize,
    pub h_star_new: f64,
    pub mise_star_new: f64,
    pub h_star_trad: f64,
    pub mise_star_trad: f64,
    /// mise_star_new / mise_star_trad
    pub ratio: f64,
}

/// Mass, mean and variance of ∏φ_{σ_j}(x − μ_j) as a function of x, the
/// mass in log form. `factors` are (σ_j, μ_j) pairs.
pub(crate) fn gaussian_product(factors: &[(f64, f64)]) -> (f64, f64, f64) {
    let prec: f64 = factors.iter().map(|(s, _)| 1.0 / (s * s)).sum();
    let var = 1.0 / prec;
    let mean = var * factors.iter().map(|(s, m)| m / (s * s)).sum::<f64>();
    // reference point a = mean makes the exponential correction vanish
    let ln_mass =
        LN_SQRT_2PI + 0.5 * var.ln() + factors.iter().map(|&(s, m)| ln_normal_pdf(m - mean, s)).sum::<f64>();
    (ln_mass, mean, var)
}

/// ∫∏φ_{σ_j}(x − μ_j)dx evaluated as
/// √(2π)σ̃[∏φ_{σ_j}(μ_j − a)]exp[½σ̃²{Σ(μ_j − a)/σ_j²}²] with 1/σ̃² = Σ1/σ_j².
/// The value does not depend on the reference point `a`.
pub fn gaussian_product_integral(factors: &[(f64, f64)], a: f64) -> Result<f64> {
    if factors.is_empty() {
        return Err(Error::InvalidArgument("empty product".into()));
    }
    if factors.iter().any(|(s, _)| !(*s > 0.0)) {
        return Err(Error::InvalidArgument("product factors need sd > 0".into()));
    }
    let var = 1.0 / factors.iter().map(|(s, _)| 1.0 / (s * s)).sum::<f64>();
    let lin: f64 = factors.iter().map(|(s, m)| (m - a) / (s * s)).sum();
    let ln_prod: f64 = factors.iter().map(|&(s, m)| ln_normal_pdf(m - a, s)).sum();
    Ok((LN_SQRT_2PI + 0.5 * var.ln() + ln_prod + 0.5 * var * lin * lin).exp())
}

/// R(f) = ∫f² = Σp_ip_jφ_{(σ_i²+σ_j²)^{1/2}}(μ_j − μ_i).
pub fn mixture_l2(m: &NormalMixture) -> f64 {
    let c = m.components();
    let mut total = 0.0;
    for a in c {
        for b in c {
            total += a.p * b.p * normal_pdf(b.mu - a.mu, (a.sd * a.sd + b.sd * b.sd).sqrt());
        }
    }
    total
}

/// Exact MISE of the classic estimator with the Gaussian kernel.
pub fn mise_kernel(m: &NormalMixture, h: f64, n: usize) -> Result<f64> {
    crate::kernels::check_bandwidth(h)?;
    if n == 0 {
        return Err(Error::TooFewObservations { need: 1, got: 0 });
    }
    let nf = n as f64;
    let c = m.components();
    let h2 = h * h;
    let mut total = 1.0 / (2.0 * crate::math::sqrt_pi() * nf * h);
    for a in c {
        for b in c {
            let s2 = a.sd * a.sd + b.sd * b.sd;
            let d = b.mu - a.mu;
            total += a.p
                * b.p
                * ((1.0 - 1.0 / nf) * normal_pdf(d, (s2 + 2.0 * h2).sqrt()) - 2.0 * normal_pdf(d, (s2 + h2).sqrt())
                    + normal_pdf(d, s2.sqrt()));
        }
    }
    Ok(total)
}

// Per-component quantities of the closed form, after shifting so μ₀ = 0.
struct Prepared {
    p: f64,
    mu: f64,
    inv: f64,  // 1/σ_i²
    b2: f64,   // 1 + h²/σ_i² − h²/σ₀²
    alpha: f64, // 1/σ_i² − 1/σ₀²
    beta: f64, // μ_i/σ_i² − μ₀/σ₀²
    e2: f64,   // 2 + h²/σ_i² − 2h²/σ₀²
}

/// Largest h for which every radicand of the closed form stays positive
/// (infinite when none can vanish).
pub fn mise_new_domain_cap(m: &NormalMixture, sd0: f64) -> f64 {
    let inv0 = 1.0 / (sd0 * sd0);
    let mut cap = f64::INFINITY;
    for c in m.components() {
        let inv = 1.0 / (c.sd * c.sd);
        // b_i² = 1 + h²(1/σ_i² − 1/σ₀²)
        if inv < inv0 {
            cap = cap.min((1.0 / (inv0 - inv)).sqrt());
        }
        // e_i² = 2 + h²(1/σ_i² − 2/σ₀²)
        if inv < 2.0 * inv0 {
            cap = cap.min((2.0 / (2.0 * inv0 - inv)).sqrt());
        }
    }
    // c_ij, f_i, k_ij vanish before b_i, e_i do, so bisect for the boundary
    let mut hi = cap;
    if !hi.is_finite() {
        hi = sd0;
        while check_domain(m, 0.0, sd0, hi).is_ok() {
            if hi > 1e6 * sd0 {
                return f64::INFINITY;
            }
            hi *= 2.0;
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if check_domain(m, 0.0, sd0, mid).is_ok() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

fn check_domain(m: &NormalMixture, mu0: f64, sd0: f64, h: f64) -> Result<()> {
    mise_new_terms(m, mu0, sd0, h).map(|_| ())
}

/// (E A₁, E A₂, E B) for [`mise_new`].
fn mise_new_terms(m: &NormalMixture, mu0: f64, sd0: f64, h: f64) -> Result<(f64, f64, f64)> {
    let t = h * h;
    let inv0 = 1.0 / (sd0 * sd0);
    let comps: Vec<Prepared> = m
        .components()
        .iter()
        .map(|c| {
            let inv = 1.0 / (c.sd * c.sd);
            let mu = c.mu - mu0;
            Prepared {
                p: c.p,
                mu,
                inv,
                b2: 1.0 + t * inv - t * inv0,
                alpha: inv - inv0,
                beta: mu * inv,
                e2: 2.0 + t * inv - 2.0 * t * inv0,
            }
        })
        .collect();
    for c in &comps {
        if !(c.b2 > 0.0) {
            return Err(Error::MiseDomain("b_i"));
        }
        if !(c.e2 > 0.0) {
            return Err(Error::MiseDomain("e_i"));
        }
    }
    // ln φ_{σ_i}(μ_i)
    let ln_phi_mu = |c: &Prepared| -0.5 * c.mu * c.mu * c.inv + 0.5 * c.inv.ln() - LN_SQRT_2PI;

    let mut a1 = 0.0;
    let mut b = 0.0;
    for ci in &comps {
        let qi = ci.alpha * ci.alpha * t / ci.b2;
        let ri = ci.alpha * ci.beta * t / ci.b2;
        let si = 0.5 * ci.beta * ci.beta * t / ci.b2;
        for cj in &comps {
            let qj = cj.alpha * cj.alpha * t / cj.b2;
            let rj = cj.alpha * cj.beta * t / cj.b2;
            let sj = 0.5 * cj.beta * cj.beta * t / cj.b2;
            let base = ci.p.ln() + cj.p.ln() + ln_phi_mu(ci) + ln_phi_mu(cj) + LN_SQRT_2PI;
            let lin = ci.mu * ci.inv + cj.mu * cj.inv;

            let c2 = ci.inv + cj.inv - qi - qj;
            if !(c2 > 0.0) {
                return Err(Error::MiseDomain("c_ij"));
            }
            let d = lin - ri - rj;
            a1 += (base - 0.5 * (ci.b2 * cj.b2).ln() - 0.5 * c2.ln() + 0.5 * d * d / c2 + si + sj).exp();

            let k2 = ci.inv + cj.inv - qi;
            if !(k2 > 0.0) {
                return Err(Error::MiseDomain("k_ij"));
            }
            let l = lin - ri;
            b += (base - 0.5 * ci.b2.ln() - 0.5 * k2.ln() + 0.5 * l * l / k2 + si).exp();
        }
    }

    let mut a2 = 0.0;
    for c in &comps {
        let gamma = c.inv - 2.0 * inv0;
        let eta = c.mu * c.inv;
        let f2 = c.inv - gamma * gamma * t / c.e2;
        if !(f2 > 0.0) {
            return Err(Error::MiseDomain("f_i"));
        }
        let g = c.mu * c.inv - gamma * eta * t / c.e2;
        let expo = 0.5 * g * g / f2 - 0.5 * c.mu * c.mu * c.inv + 0.5 * eta * eta * t / c.e2;
        a2 += (c.p.ln() + 0.5 * c.inv.ln() - 0.5 * (c.e2 * f2).ln() + expo).exp();
    }
    a2 /= h * SQRT_2PI;
    Ok((a1, a2, b))
}

/// Exact MISE of the normal-start estimator with Gaussian kernel and fixed
/// start parameters (μ₀, σ₀) when the truth is the mixture `m`.
pub fn mise_new(m: &NormalMixture, mu0: f64, sd0: f64, h: f64, n: usize) -> Result<f64> {
    crate::kernels::check_bandwidth(h)?;
    if !(sd0 > 0.0) {
        return Err(Error::InvalidArgument("start sd must be positive".into()));
    }
    if n == 0 {
        return Err(Error::TooFewObservations { need: 1, got: 0 });
    }
    let (a1, a2, b) = mise_new_terms(m, mu0, sd0, h)?;
    let nf = n as f64;
    Ok((1.0 - 1.0 / nf) * a1 + a2 / nf - 2.0 * b + mixture_l2(m))
}

/// True mixture and fixed start parameters for [`mise_new`].
#[derive(Debug, Clone, Copy)]
pub struct NewMiseInputs<'a> {
    pub mixture: &'a NormalMixture,
    pub mu0: f64,
    pub sd0: f64,
    pub h: f64,
}

impl NewMiseInputs<'_> {
    /// Errors with the name of the first non-positive radicand.
    pub fn check_domain(&self) -> Result<()> {
        check_domain(self.mixture, self.mu0, self.sd0, self.h)
    }

    pub fn mise(&self, n: usize) -> Result<f64> {
        mise_new(self.mixture, self.mu0, self.sd0, self.h, n)
    }
}

/// Exact ISE ∫(f̂ − f)² of the normal-start estimator built from `data` with
/// start parameters (μ̂, σ̂) and the Gaussian kernel, against the mixture truth.
pub fn ise_new(data: &[f64], mu_hat: f64, sd_hat: f64, h: f64, m: &NormalMixture) -> Result<f64> {
    crate::kernels::check_bandwidth(h)?;
    if data.is_empty() {
        return Err(Error::TooFewObservations { need: 1, got: 0 });
    }
    if !(sd_hat > 0.0) {
        return Err(Error::InvalidArgument("start sd must be positive".into()));
    }
    let n = data.len() as f64;
    // f̂(x) = (1/n)Σ w_i φ_h(x − X_i)φ_σ̂(x − μ̂), ln w_i = −ln φ_σ̂(X_i − μ̂)
    let ln_w: Vec<f64> = data.iter().map(|&x| -ln_normal_pdf(x - mu_hat, sd_hat)).collect();
    let s_half = sd_hat / core::f64::consts::SQRT_2;
    // φ_σ̂(u)² = φ_{σ̂/√2}(u)/(2√π σ̂)
    let ln_sq = -(2.0 * crate::math::sqrt_pi() * sd_hat).ln();
    let mut a = 0.0;
    for i in 0..data.len() {
        for j in i..data.len() {
            let (ln_mass, _, _) = gaussian_product(&[(h, data[i]), (h, data[j]), (s_half, mu_hat)]);
            let v = (ln_w[i] + ln_w[j] + ln_sq + ln_mass).exp();
            a += if i == j { v } else { 2.0 * v };
        }
    }
    a /= n * n;
    let mut b = 0.0;
    for (i, &x) in data.iter().enumerate() {
        for c in m.components() {
            let (ln_mass, _, _) = gaussian_product(&[(h, x), (sd_hat, mu_hat), (c.sd, c.mu)]);
            b += c.p * (ln_w[i] + ln_mass).exp();
        }
    }
    b /= n;
    Ok(a - 2.0 * b + mixture_l2(m))
}

/// Minimises `curve` over `[lo, hi]`.
///
/// A 64-point log-spaced scan first checks that the sampled curve falls and
/// then rises; if so the minimum is refined by golden section between the
/// scan neighbours of the best point. Otherwise a 4096-point scan picks the
/// global minimum before the same refinement. Ties go to the smaller h.
pub fn optimal_h(curve: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Result<(f64, f64)> {
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::InvalidBracket(lo, hi));
    }
    let coarse = geomspace(lo, hi, SCAN_POINTS);
    let values: Vec<f64> = coarse.iter().map(|&h| curve(h)).collect();
    let (grid, values) = if is_unimodal(&values) {
        (coarse, values)
    } else {
        let fine = geomspace(lo, hi, GLOBAL_SCAN_POINTS);
        let v = fine.iter().map(|&h| curve(h)).collect();
        (fine, v)
    };
    let best = argmin_first(&values).ok_or(Error::QuadratureFailed(f64::NAN))?;
    let a = grid[best.saturating_sub(1)];
    let b = grid[(best + 1).min(grid.len() - 1)];
    let (h, v) = golden_section(&curve, a, b, 1e-10 * b);
    if v <= values[best] {
        Ok((h, v))
    } else {
        Ok((grid[best], values[best]))
    }
}

fn argmin_first(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, v) in values.iter().enumerate() {
        if !v.is_finite() {
            continue;
        }
        match best {
            Some(b) if values[b] <= *v => {}
            _ => best = Some(i),
        }
    }
    best
}

fn is_unimodal(values: &[f64]) -> bool {
    if values.iter().any(|v| !v.is_finite()) {
        return false;
    }
    let mut rising = false;
    for w in values.windows(2) {
        if w[1] > w[0] {
            rising = true;
        } else if rising && w[1] < w[0] {
            return false;
        }
    }
    true
}

/// Search bracket for h: [0.01σ₀, 3σ₀], shrunk below the closed form's
/// domain cap when that is smaller.
pub fn search_bracket(m: &NormalMixture) -> (f64, f64) {
    let (_, sd0) = m.moments();
    let cap = mise_new_domain_cap(m, sd0);
    (0.01 * sd0, (3.0 * sd0).min(0.999 * cap))
}

/// Optimal h and minimal MISE for both estimators, the normal start using
/// the mixture's own mean and standard deviation.
pub fn mise_report(m: &NormalMixture, case_id: usize, n: usize) -> Result<MiseReport> {
    let (mu0, sd0) = m.moments();
    let (lo, hi) = search_bracket(m);
    let (h_new, mise_new_star) = optimal_h(|h| mise_new(m, mu0, sd0, h, n).unwrap_or(f64::INFINITY), lo, hi)?;
    let (h_trad, mise_trad_star) =
        optimal_h(|h| mise_kernel(m, h, n).unwrap_or(f64::INFINITY), 0.01 * sd0, 3.0 * sd0)?;
    Ok(MiseReport {
        case_id,
        n,
        h_star_new: h_new,
        mise_star_new: mise_new_star,
        h_star_trad: h_trad,
        mise_star_trad: mise_trad_star,
        ratio: mise_new_star / mise_trad_star,
    })
}

/// One [`MiseReport`] per (case, n) over Marron–Wand cases.
pub fn benchmark_table(cases: &[usize], ns: &[usize]) -> Result<Vec<MiseReport>> {
    let mut out = Vec::with_capacity(cases.len() * ns.len());
    for &case in cases {
        let m = marron_wand(case)?;
        for &n in ns {
            out.push(mise_report(&m, case, n)?);
        }
    }
    Ok(out)
}
