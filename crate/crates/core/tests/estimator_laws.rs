use semistart_core::densities::marron_wand;
use semistart_core::math::{normal_pdf, phi};
use semistart_core::quadrature::integrate;
use semistart_core::starts::{fit_start_with_clip, StartFamily};
use semistart_core::{DensityEstimate, KernelSpec, NormalMixture};

// E f̂(x) with a fixed standard normal start and E f̃(x) for the classic
// estimator, both by quadrature against the known truth.
fn expectations(m: &NormalMixture, h: f64, x: f64) -> (f64, f64) {
    let (lo, hi) = (x - 14.0 * h, x + 14.0 * h);
    let new = phi(x) * integrate(|y| normal_pdf(y - x, h) * m.pdf(y) / phi(y), lo, hi, 1e-15).unwrap();
    let trad = integrate(|y| normal_pdf(y - x, h) * m.pdf(y), lo, hi, 1e-15).unwrap();
    (new, trad)
}

#[test]
fn gap_between_estimators_follows_second_order_law() {
    let m = marron_wand(2).unwrap();
    for x in [-1.0, 0.0, 1.0] {
        let limit = x * m.pdf_d1(x) + 0.5 * (x * x + 1.0) * m.pdf(x);
        let mut last = f64::INFINITY;
        for h in [0.2, 0.1, 0.05] {
            let (new, trad) = expectations(&m, h, x);
            let err = ((new - trad) / (h * h) - limit).abs();
            assert!(err < last, "x {x} h {h}: error {err} did not shrink");
            last = err;
        }
        assert!(last < 0.01, "x {x}: {last}");
    }
}

#[test]
fn integral_matches_kurtosis_correction_to_sixth_order() {
    let data = NormalMixture::new(vec![
        semistart_core::densities::Component::new(0.8, 0.0, 1.0),
        semistart_core::densities::Component::new(0.2, 0.0, 3.0),
    ])
    .unwrap()
    .sample(300, 8)
    .unwrap();
    let start = fit_start_with_clip(StartFamily::Normal, &data, None).unwrap();
    let err = |h: f64| {
        let e = DensityEstimate::new(data.clone(), KernelSpec::gaussian(), h, start.clone(), false).unwrap();
        let r = e.integral().unwrap();
        (r.integral - r.kurtosis_approx.unwrap()).abs()
    };
    let (e1, e2) = (err(0.1), err(0.05));
    assert!(e1 / e2 >= 32.0, "{e1} / {e2}");
    assert!(err(0.2) / e1 >= 32.0);
}
