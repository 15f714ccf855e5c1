//! Symmetric probability kernels and their moment constants.
//!
//! The Epanechnikov kernel is used in the scaling `(3/2)(1 − 4z²)` on
//! `[−½, ½]`. Any other rescaling gives the same estimator family with a
//! proportionally rescaled bandwidth, so nothing is lost by fixing one.

use core::fmt;

#[allow(unused_imports)] // inherent f64 methods shadow it when a dependency links std
use num_traits::Float;

use crate::math::{phi, sqrt_pi};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum KernelShape {
    Gaussian,
    Epanechnikov,
    /// Uniform on `[−½, ½]`.
    Uniform,
}

impl KernelShape {
    pub fn name(self) -> &'static str {
        match self {
            KernelShape::Gaussian => "gaussian",
            KernelShape::Epanechnikov => "epanechnikov",
            KernelShape::Uniform => "uniform",
        }
    }
}

impl fmt::Display for KernelShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl core::str::FromStr for KernelShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" | "normal" => Ok(KernelShape::Gaussian),
            "epanechnikov" => Ok(KernelShape::Epanechnikov),
            "uniform" => Ok(KernelShape::Uniform),
            other => Err(Error::InvalidArgument(alloc::format!("unknown kernel '{other}'"))),
        }
    }
}

/// A kernel with its constants σ_K² = ∫z²K, R(K) = ∫K² and, for the
/// Gaussian only, R(K'') = ∫(K'')².
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KernelSpec {
    pub shape: KernelShape,
    pub sigma2: f64,
    pub roughness: f64,
    pub roughness_second_deriv: Option<f64>,
}

impl KernelSpec {
    pub fn new(shape: KernelShape) -> Self {
        match shape {
            KernelShape::Gaussian => KernelSpec {
                shape,
                sigma2: 1.0,
                roughness: 1.0 / (2.0 * sqrt_pi()),
                roughness_second_deriv: Some(3.0 / (8.0 * sqrt_pi())),
            },
            KernelShape::Epanechnikov => KernelSpec {
                shape,
                sigma2: 0.05,
                roughness: 1.2,
                roughness_second_deriv: None,
            },
            KernelShape::Uniform => KernelSpec {
                shape,
                sigma2: 1.0 / 12.0,
                roughness: 1.0,
                roughness_second_deriv: None,
            },
        }
    }

    pub fn gaussian() -> Self {
        Self::new(KernelShape::Gaussian)
    }

    /// K(z).
    #[inline]
    pub fn eval(&self, z: f64) -> f64 {
        match self.shape {
            KernelShape::Gaussian => phi(z),
            KernelShape::Epanechnikov => {
                if z.abs() < 0.5 {
                    1.5 * (1.0 - 4.0 * z * z)
                } else {
                    0.0
                }
            }
            KernelShape::Uniform => {
                if z.abs() < 0.5 {
                    1.0
                } else if z.abs() == 0.5 {
                    0.5
                } else {
                    0.0
                }
            }
        }
    }

    /// K_h(z) = h⁻¹K(z/h).
    pub fn eval_scaled(&self, h: f64, z: f64) -> Result<f64> {
        check_bandwidth(h)?;
        Ok(self.scaled(h, z))
    }

    /// Unchecked K_h(z); the caller guarantees h > 0.
    #[inline]
    pub(crate) fn scaled(&self, h: f64, z: f64) -> f64 {
        self.eval(z / h) / h
    }

    /// K''(z) for smooth kernels.
    pub fn second_derivative(&self, z: f64) -> Result<f64> {
        match self.shape {
            KernelShape::Gaussian => Ok((z * z - 1.0) * phi(z)),
            other => Err(Error::KernelNotSmooth(other.name())),
        }
    }

    /// Half-width of the support in units of h, `None` for unbounded support.
    pub fn support_radius(&self) -> Option<f64> {
        match self.shape {
            KernelShape::Gaussian => None,
            _ => Some(0.5),
        }
    }

    /// Half-width beyond which K is negligible (exactly zero for compact
    /// kernels, below 1e-30 relative for the Gaussian).
    pub fn effective_radius(&self) -> f64 {
        self.support_radius().unwrap_or(12.0)
    }

    pub fn is_smooth(&self) -> bool {
        self.roughness_second_deriv.is_some()
    }
}

pub(crate) fn check_bandwidth(h: f64) -> Result<()> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveBandwidth(h))
    }
}
