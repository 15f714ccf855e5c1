use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use semistart_core::bandwidth::{
    bcv, default_grid, h_os, plugin, rule_delta, rule_gamma, ucv, BandwidthChoice,
};
use semistart_core::densities::{marron_wand, Component};
use semistart_core::hermite::hermite_poly;
use semistart_core::multivariate::{MvEstimate, MvNormalization};
use semistart_core::starts::{fit_start, fit_start_with_clip, StartFamily};
use semistart_core::{DensityEstimate, FittedStart, KernelSpec, NormalMixture};

#[test]
fn difficulty_scores_are_scale_free() {
    for case in 1..=15 {
        let m = marron_wand(case).unwrap();
        let r = m.roughness();
        let l = m.l1_measures().unwrap();
        for c in [0.1, 3.0] {
            let s = m.affine(c, 0.7);
            let rs = s.roughness();
            let ls = s.l1_measures().unwrap();
            assert!((rs.rho_trad - r.rho_trad).abs() < 1e-8, "case {case} c {c}");
            assert!((rs.rho_new - r.rho_new).abs() < 1e-8, "case {case} c {c}");
            assert!((ls.rho1_trad - l.rho1_trad).abs() < 1e-8, "case {case} c {c}");
            assert!((ls.rho1_new - l.rho1_new).abs() < 1e-8, "case {case} c {c}");
        }
    }
}

// (−1)^j φ^{(j)}(x)/φ(x) through the Cauchy integral on a circle of radius r,
// a route to the derivatives that never touches the Hermite recurrence.
fn phi_derivative_ratio(j: usize, x: f64) -> f64 {
    let m = 128;
    let r = 1.0;
    let mut acc = 0.0;
    for k in 0..m {
        let t = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
        let (a, b) = (x + r * t.cos(), r * t.sin());
        // φ(a + ib)/φ(x) = exp{−½(a² − b² − x²) − iab}
        let mag = (-0.5 * (a * a - b * b - x * x)).exp();
        let arg = -a * b - j as f64 * t;
        acc += mag * arg.cos();
    }
    let fact: f64 = (1..=j).map(|v| v as f64).product();
    let d = fact * acc / (m as f64 * r.powi(j as i32));
    if j.is_multiple_of(2) {
        d
    } else {
        -d
    }
}

#[test]
fn hermite_recurrence_matches_derivatives_of_phi() {
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(11);
    for _ in 0..50 {
        let x: f64 = rand::Rng::random_range(&mut rng, -3.0..3.0);
        for j in 0..=8 {
            let a = hermite_poly(j, x);
            let b = phi_derivative_ratio(j, x);
            assert!((a - b).abs() < 1e-4 * (1.0 + a.abs()), "j {j} x {x}: {a} vs {b}");
        }
    }
}

fn skewed(n: usize, seed: u64) -> Vec<f64> {
    NormalMixture::new(vec![Component::new(0.75, 0.0, 1.0), Component::new(0.25, 1.5, 0.5)])
        .unwrap()
        .sample(n, seed)
        .unwrap()
}

fn assert_scaled(a: &BandwidthChoice, b: &BandwidthChoice, c: f64, what: &str) {
    assert!(a.h > 0.0 && a.h <= a.diagnostics.h_os * (1.0 + 1e-12), "{what}: {} > {}", a.h, a.diagnostics.h_os);
    assert!((b.h - c * a.h).abs() <= 1e-9 * b.h, "{what}: {} vs {}", b.h, c * a.h);
}

#[test]
fn bandwidth_rules_are_scale_equivariant() {
    let k = KernelSpec::gaussian();
    let data = skewed(150, 5);
    for c in [0.2, 7.0] {
        let scaled: Vec<f64> = data.iter().map(|x| c * x - 3.0).collect();
        assert_scaled(&rule_gamma(&data, &k).unwrap(), &rule_gamma(&scaled, &k).unwrap(), c, "gamma");
        assert_scaled(&rule_delta(&data, &k).unwrap(), &rule_delta(&scaled, &k).unwrap(), c, "delta");
        for clip in [None, Some(2.5)] {
            let s0 = fit_start_with_clip(StartFamily::Normal, &data, clip).unwrap();
            let s1 = fit_start_with_clip(StartFamily::Normal, &scaled, clip).unwrap();
            assert_scaled(&plugin(&data, &s0, &k, None, 1).unwrap(), &plugin(&scaled, &s1, &k, None, 1).unwrap(), c, "plugin");
            let g0 = default_grid(&data, &k).unwrap();
            let g1 = default_grid(&scaled, &k).unwrap();
            assert_scaled(&bcv(&data, &s0, &k, &g0).unwrap(), &bcv(&scaled, &s1, &k, &g1).unwrap(), c, "bcv");
            if clip.is_none() {
                assert_scaled(&ucv(&data, &s0, &k, &g0).unwrap(), &ucv(&scaled, &s1, &k, &g1).unwrap(), c, "ucv");
            }
        }
    }
}

#[test]
fn multivariate_estimate_is_affine_equivariant() {
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(3);
    let raw: DMatrix<f64> = DMatrix::from_fn(120, 2, |_, _| StandardNormal.sample(&mut rng));
    let data = DMatrix::from_fn(120, 2, |i, j| if j == 0 { raw[(i, 0)] } else { raw[(i, 1)] + 0.4 * raw[(i, 0)].powi(2) });
    let a: DMatrix<f64> = DMatrix::from_row_slice(2, 2, &[1.5, -0.7, 0.3, 0.4]);
    let shift = [2.0, -1.0];
    let jac = a.determinant().abs();
    let mapped = DMatrix::from_fn(120, 2, |i, j| (a.row(j) * data.row(i).transpose())[(0, 0)] + shift[j]);
    for norm in [MvNormalization::Normalized, MvNormalization::Literal] {
        let e0 = MvEstimate::with_options(&data, 0.6, Some(2.5), norm).unwrap();
        let e1 = MvEstimate::with_options(&mapped, 0.6, Some(2.5), norm).unwrap();
        for x in [[0.0, 0.0], [1.0, 0.5], [-2.0, 3.0]] {
            let y = [a[(0, 0)] * x[0] + a[(0, 1)] * x[1] + shift[0], a[(1, 0)] * x[0] + a[(1, 1)] * x[1] + shift[1]];
            let v0 = e0.eval(&x).unwrap();
            let v1 = e1.eval(&y).unwrap();
            let expect = match norm {
                MvNormalization::Normalized => v0 / jac,
                // without the determinant the estimate does not rescale
                MvNormalization::Literal => v0,
            };
            assert!((v1 - expect).abs() <= 1e-8 * expect.max(1e-300), "{norm:?} {x:?}: {v1} vs {expect}");
        }
    }
}

#[test]
fn multivariate_one_dimensional_path_matches_estimator() {
    let data = skewed(80, 2);
    let m = DMatrix::from_column_slice(80, 1, &data);
    let start = fit_start(StartFamily::Normal, &data).unwrap();
    let (_, sd) = start.normal_params().unwrap();
    let h = 0.4;
    let e = MvEstimate::new(&m, h).unwrap();
    let d = DensityEstimate::new(data.clone(), KernelSpec::gaussian(), h * sd, start, false).unwrap();
    for x in [-3.0, -0.5, 0.0, 1.2, 4.0] {
        let a = e.eval(&[x]).unwrap();
        let b = d.eval(x);
        assert!((a - b).abs() < 1e-12 * b.max(1.0), "{x}: {a} vs {b}");
    }
}

fn trapezoid_2d(e: &MvEstimate) -> f64 {
    let m = 241;
    let step = 12.0 / (m - 1) as f64;
    let mut total = 0.0;
    for i in 0..m {
        for j in 0..m {
            let w = if i == 0 || i == m - 1 { 0.5 } else { 1.0 } * if j == 0 || j == m - 1 { 0.5 } else { 1.0 };
            total += w * e.eval(&[-6.0 + i as f64 * step, -6.0 + j as f64 * step]).unwrap();
        }
    }
    total * step * step
}

#[test]
fn multivariate_estimate_integrates_to_about_one() {
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(17);
    let data: DMatrix<f64> = DMatrix::from_fn(500, 2, |_, _| StandardNormal.sample(&mut rng));
    let e = MvEstimate::with_options(&data, 0.7, None, MvNormalization::Normalized).unwrap();
    let total = trapezoid_2d(&e);
    assert!((total - 1.0).abs() < 0.02, "{total}");
    let h = semistart_core::multivariate::mv_bandwidth(&data, 4).unwrap().h;
    let total = trapezoid_2d(&MvEstimate::new(&data, h).unwrap());
    assert!((total - 1.0).abs() < 0.02, "{total}");
}

#[test]
fn h_os_is_scale_equivariant() {
    let k = KernelSpec::gaussian();
    assert!((h_os(&k, 3.0, 100) - 3.0 * h_os(&k, 1.0, 100)).abs() < 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn estimate_is_nonnegative(seed in 0u64..10_000, n in 2usize..40, h in 0.02f64..3.0, x in -8.0f64..8.0, clip in proptest::option::of(0.5f64..4.0)) {
        let data = skewed(n, seed);
        let start = fit_start_with_clip(StartFamily::Normal, &data, clip).unwrap_or_else(|_| FittedStart::constant());
        for shape in ["gaussian", "epanechnikov", "uniform"] {
            let k = KernelSpec::new(shape.parse().unwrap());
            let e = DensityEstimate::new(data.clone(), k, h, start.clone(), false).unwrap();
            prop_assert!(e.eval(x) >= 0.0);
        }
    }

    #[test]
    fn normal_start_fit_is_equivariant(seed in 0u64..1000, c in -5.0f64..5.0, b in -10.0f64..10.0) {
        prop_assume!(c.abs() > 0.05);
        let data = skewed(30, seed);
        let moved: Vec<f64> = data.iter().map(|x| c * x + b).collect();
        let (m0, s0) = fit_start(StartFamily::Normal, &data).unwrap().normal_params().unwrap();
        let (m1, s1) = fit_start(StartFamily::Normal, &moved).unwrap().normal_params().unwrap();
        prop_assert!((m1 - (c * m0 + b)).abs() < 1e-9 * (1.0 + m1.abs()));
        prop_assert!((s1 - c.abs() * s0).abs() < 1e-9 * s1);
    }

    #[test]
    fn product_integral_ignores_reference(a in -5.0f64..5.0, s1 in 0.2f64..3.0, s2 in 0.2f64..3.0, m1 in -2.0f64..2.0, m2 in -2.0f64..2.0) {
        use semistart_core::exact_mise::gaussian_product_integral;
        let f = [(s1, m1), (s2, m2), (1.0, 0.0)];
        let v0 = gaussian_product_integral(&f, 0.0).unwrap();
        let v1 = gaussian_product_integral(&f, a).unwrap();
        prop_assert!((v0 - v1).abs() <= 1e-10 * v0);
    }
}
