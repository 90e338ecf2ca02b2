use landscape_idos::scaling::{
    effective_constants, fit_affine, scaling_analysis_in, transform_curve, ScalingTransform,
};
use landscape_idos::{DistributionKind, EnergyGrid, SampledCurve};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Sampled {
    e: Vec<f64>,
    v: Vec<f64>,
}

impl SampledCurve for Sampled {
    fn energies(&self) -> &[f64] {
        &self.e
    }

    fn values(&self) -> &[f64] {
        &self.v
    }
}

/// `e^a · E^{d/2} · e^{b E^{-d/2}}` on a log grid inside `(0, 1)`.
fn closed_form(a: f64, b: f64, d: usize) -> Sampled {
    let grid = EnergyGrid::log(0.01, 0.5, 80).unwrap();
    let h = d as f64 / 2.0;
    Sampled {
        e: grid.values().to_vec(),
        v: grid
            .values()
            .iter()
            .map(|&e| a.exp() * e.powf(h) * (b * e.powf(-h)).exp())
            .collect(),
    }
}

#[test]
fn closed_form_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for d in [1, 2] {
        let transform = ScalingTransform::new(DistributionKind::Binary, d);
        for _ in 0..50 {
            let a = rng.random_range(-2.0..2.0);
            let b = rng.random_range(-0.2..-0.01);
            let points = transform_curve(&closed_form(a, b, d), &transform, 0.01, 0.5).unwrap();
            let fit = fit_affine(&points).unwrap();
            assert!(
                (fit.slope - a).abs() <= 1e-8 && (fit.intercept - b).abs() <= 1e-8,
                "{fit:?} vs ({a}, {b})"
            );
        }
    }
}

#[test]
fn transform_inverts_to_log_count() {
    let curve = closed_form(0.3, -0.05, 1);
    let transform = ScalingTransform::new(DistributionKind::Binary, 1);
    for (&e, &n) in curve.e.iter().zip(&curve.v) {
        let (x, y) = transform.apply(e, n).unwrap();
        assert!((y / x + 0.5 * e.ln() - n.ln()).abs() <= 1e-12);
    }
}

#[test]
fn known_effective_constants_are_recovered() {
    let (c5, c6): (f64, f64) = (0.25, 0.9);
    for d in [1, 2] {
        let h = d as f64 / 2.0;
        let (a, b) = (0.4, -0.03);
        let nu = closed_form(a, b, d);
        let n = closed_form(c5.ln() + a + h * c6.ln(), b * c6.powf(-h), d);
        let transform = ScalingTransform::new(DistributionKind::Binary, d);
        let report = scaling_analysis_in(&n, &nu, transform, 0.01, 0.5).unwrap();
        assert!((report.c5_eff - c5).abs() <= 1e-8, "{report:?}");
        assert!((report.c6_eff - c6).abs() <= 1e-8, "{report:?}");
        let same = effective_constants(&report.fit_nu, &report.fit_nu, d).unwrap();
        assert!((same.0 - 1.0).abs() < 1e-12 && (same.1 - 1.0).abs() < 1e-12);
    }
}

#[test]
fn noisy_line_is_fitted_closely() {
    let eps = 1e-3;
    let points: Vec<(f64, f64)> = (0..40)
        .map(|i| {
            let x = i as f64 / 10.0;
            (x, 2.0 * x + 1.0 + if i % 2 == 0 { eps } else { -eps })
        })
        .collect();
    let fit = fit_affine(&points).unwrap();
    assert!((fit.slope - 2.0).abs() <= 10.0 * eps);
    assert!((fit.intercept - 1.0).abs() <= 10.0 * eps);
    assert!(fit.r_squared > 0.999);
}
