//! Nadaraya–Watson smoothing with a parametric mean start:
//! m̂(x) = Σy_i{m(x, β̂)/m(x_i, β̂)}K_h(x − x_i) / ΣK_h(x − x_i).

use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)] // inherent f64 methods shadow it when a dependency links std
use num_traits::Float;

use crate::kernels::{check_bandwidth, KernelSpec};
use crate::{Error, Result};

/// Fitted start values smaller than this fraction of sd(y) in magnitude are
/// pushed out to it before dividing.
pub const FLOOR_FRACTION: f64 = 0.05;
const MIN_KERNEL_MASS: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum MeanStartKind {
    Constant,
    Linear,
}

impl fmt::Display for MeanStartKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MeanStartKind::Constant => "constant",
            MeanStartKind::Linear => "linear",
        })
    }
}

impl core::str::FromStr for MeanStartKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constant" => Ok(MeanStartKind::Constant),
            "linear" => Ok(MeanStartKind::Linear),
            other => Err(Error::InvalidArgument(alloc::format!("unknown mean start '{other}'"))),
        }
    }
}

/// Least-squares β̂₁ + β̂₂x (β̂₂ = 0 for the constant kind).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MeanStart {
    pub kind: MeanStartKind,
    pub beta: [f64; 2],
    /// 0.05·sd(y)
    pub floor: f64,
}

impl MeanStart {
    pub fn eval(&self, x: f64) -> f64 {
        self.beta[0] + self.beta[1] * x
    }

    /// m(x, β̂) with magnitude at least `floor`, sign kept (0 goes up).
    pub fn divisor(&self, x: f64) -> f64 {
        let v = self.eval(x);
        if v.abs() >= self.floor {
            v
        } else if v < 0.0 {
            -self.floor
        } else {
            self.floor
        }
    }
}

fn check_pairs(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: y.len() });
    }
    if x.len() < 2 {
        return Err(Error::TooFewObservations { need: 2, got: x.len() });
    }
    Ok(())
}

pub fn fit_mean_start(x: &[f64], y: &[f64], kind: MeanStartKind) -> Result<MeanStart> {
    check_pairs(x, y)?;
    let n = x.len() as f64;
    let ybar = y.iter().sum::<f64>() / n;
    let sd_y = (y.iter().map(|v| (v - ybar) * (v - ybar)).sum::<f64>() / n).sqrt();
    let beta = match kind {
        MeanStartKind::Constant => [ybar, 0.0],
        MeanStartKind::Linear => {
            let xbar = x.iter().sum::<f64>() / n;
            let sxx: f64 = x.iter().map(|v| (v - xbar) * (v - xbar)).sum();
            if !(sxx > 0.0) {
                return Err(Error::DegenerateDesign);
            }
            let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - xbar) * (b - ybar)).sum();
            let slope = sxy / sxx;
            [ybar - slope * xbar, slope]
        }
    };
    Ok(MeanStart { kind, beta, floor: FLOOR_FRACTION * sd_y })
}

#[derive(Debug, Clone)]
pub struct RegressionFit {
    x: Vec<f64>,
    y: Vec<f64>,
    kernel: KernelSpec,
    h: f64,
    start: MeanStart,
    // y_i/m(x_i, β̂) with the floored divisor
    scaled_y: Vec<f64>,
}

impl RegressionFit {
    pub fn new(x: Vec<f64>, y: Vec<f64>, kernel: KernelSpec, h: f64, kind: MeanStartKind) -> Result<Self> {
        let start = fit_mean_start(&x, &y, kind)?;
        Self::with_start(x, y, kernel, h, start)
    }

    pub fn with_start(x: Vec<f64>, y: Vec<f64>, kernel: KernelSpec, h: f64, start: MeanStart) -> Result<Self> {
        check_pairs(&x, &y)?;
        check_bandwidth(h)?;
        let scaled_y = x.iter().zip(&y).map(|(&xi, &yi)| yi / start.divisor(xi)).collect();
        Ok(RegressionFit { x, y, kernel, h, start, scaled_y })
    }

    pub fn start(&self) -> &MeanStart {
        &self.start
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.x.iter().copied().zip(self.y.iter().copied())
    }

    /// m̂(x); errors where no observation carries kernel weight.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let mut num = 0.0;
        let mut den = 0.0;
        for (&xi, &sy) in self.x.iter().zip(&self.scaled_y) {
            let k = self.kernel.scaled(self.h, x - xi);
            num += sy * k;
            den += k;
        }
        if !(den > MIN_KERNEL_MASS) {
            return Err(Error::NoLocalData(x));
        }
        Ok(self.start.eval(x) * num / den)
    }
}

/// Classic Nadaraya–Watson ΣyᵢK_h(x − xᵢ)/ΣK_h(x − xᵢ).
pub fn nadaraya_watson(x: &[f64], y: &[f64], kernel: &KernelSpec, h: f64, at: f64) -> Result<f64> {
    check_pairs(x, y)?;
    check_bandwidth(h)?;
    let mut num = 0.0;
    let mut den = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        let k = kernel.scaled(h, at - xi);
        num += yi * k;
        den += k;
    }
    if !(den > MIN_KERNEL_MASS) {
        return Err(Error::NoLocalData(at));
    }
    Ok(num / den)
}
