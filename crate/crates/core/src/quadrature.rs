//! Adaptive Gauss–Kronrod integration and one-dimensional minimisation.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent f64 methods shadow it when a dependency links std
use num_traits::Float;

use crate::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 20_000;

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

// Ordered by error estimate so the heap pops the worst interval first.
impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Segment { a, b, value: kronrod * half, error: ((kronrod - gauss) * half).abs() }
}

/// Integrates `f` over `[a, b]` to absolute tolerance `abs_tol`.
///
/// Intervals are bisected worst-first until the summed error estimate drops
/// below the tolerance (or below a relative 1e-14 floor set by roundoff).
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> Result<f64> {
    integrate_with_breaks(f, &[a, b], abs_tol)
}

/// Like [`integrate`], with the range pre-split at `breaks` (sorted, at
/// least two points). Use it for integrands with kinks or narrow features.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(f: F, breaks: &[f64], abs_tol: f64) -> Result<f64> {
    if breaks.len() < 2 {
        return Ok(0.0);
    }
    let mut heap: BinaryHeap<Segment> = breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| kronrod15(&f, w[0], w[1]))
        .collect();
    let mut total: f64 = heap.iter().map(|s| s.value).sum();
    let mut err: f64 = heap.iter().map(|s| s.error).sum();
    let mut scale: f64 = heap.iter().map(|s| s.value.abs()).sum();
    loop {
        if !total.is_finite() {
            return Err(Error::QuadratureFailed(f64::NAN));
        }
        if err <= abs_tol.max(1e-14 * scale) {
            // re-sum to shed drift from the running totals
            let exact_err: f64 = heap.iter().map(|s| s.error).sum();
            if exact_err <= abs_tol.max(1e-14 * scale) {
                return Ok(heap.iter().map(|s| s.value).sum());
            }
            err = exact_err;
        }
        if heap.len() >= MAX_INTERVALS {
            return Err(Error::QuadratureFailed(err));
        }
        let s = match heap.pop() {
            Some(s) => s,
            None => return Ok(0.0),
        };
        let mid = 0.5 * (s.a + s.b);
        if mid <= s.a || mid >= s.b {
            return Err(Error::QuadratureFailed(err));
        }
        let left = kronrod15(&f, s.a, mid);
        let right = kronrod15(&f, mid, s.b);
        total += left.value + right.value - s.value;
        err += left.error + right.error - s.error;
        scale += left.value.abs() + right.value.abs() - s.value.abs();
        heap.push(left);
        heap.push(right);
    }
}

/// `count` evenly spaced breakpoints from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return alloc::vec![lo];
    }
    let step = (hi - lo) / (count - 1) as f64;
    (0..count).map(|i| if i + 1 == count { hi } else { lo + step * i as f64 }).collect()
}

/// `count` log-spaced points from `lo` to `hi` inclusive (both positive).
pub fn geomspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    linspace(lo.ln(), hi.ln(), count).into_iter().map(f64::exp).collect()
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a minimum of `f` on `[lo, hi]`; stops once the
/// bracket is narrower than `tol`. Returns `(argmin, min)`.
pub fn golden_section<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Locates zero crossings of `f` on `[lo, hi]`: scans `scan` evenly spaced
/// points and bisects every bracket with a sign change.
pub fn sign_changes<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, scan: usize) -> Vec<f64> {
    let xs = linspace(lo, hi, scan);
    let mut roots = Vec::new();
    let mut prev_x = xs[0];
    let mut prev_f = f(prev_x);
    for &x in &xs[1..] {
        let fx = f(x);
        if prev_f == 0.0 {
            roots.push(prev_x);
        } else if prev_f * fx < 0.0 {
            let (mut a, mut b, mut fa) = (prev_x, x, prev_f);
            for _ in 0..100 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                let fm = f(m);
                if fm * fa <= 0.0 {
                    b = m;
                } else {
                    a = m;
                    fa = fm;
                }
            }
            roots.push(0.5 * (a + b));
        }
        prev_x = x;
        prev_f = fx;
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{phi, sqrt_pi};

    #[test]
    fn integrates_gaussian_square() {
        let v = integrate(|x| phi(x) * phi(x), -12.0, 12.0, 1e-13).unwrap();
        assert!((v - 1.0 / (2.0 * sqrt_pi())).abs() < 1e-13);
    }

    #[test]
    fn integrates_kinked_integrand_with_breaks() {
        let v = integrate_with_breaks(|x: f64| x.abs(), &[-1.0, 0.0, 2.0], 1e-12).unwrap();
        assert!((v - 2.5).abs() < 1e-12);
    }

    #[test]
    fn golden_section_on_quadratic() {
        let (x, fx) = golden_section(|h| (h - 2.0) * (h - 2.0) + 1.0, 0.0, 5.0, 1e-9);
        assert!((x - 2.0).abs() < 1e-6);
        assert!((fx - 1.0).abs() < 1e-12);
    }

    #[test]
    fn finds_roots_of_hermite_two() {
        let r = sign_changes(|x| x * x - 1.0, -3.0, 3.0, 4096);
        assert_eq!(r.len(), 2);
        assert!((r[0] + 1.0).abs() < 1e-12 && (r[1] - 1.0).abs() < 1e-12);
    }
}
