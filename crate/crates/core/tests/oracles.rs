//! Library results against independent reference computations.

use std::f64::consts::{LOG2_E, PI};

use approx::assert_relative_eq;
use heatcap::comparison::{frequency_waterfill, gallager_gaussian_capacity, FilterProfile, GaussianFilterSpec};
use heatcap::heat::{
    capacity_closed_form, capacity_exact_discrete, capacity_quadrature, rate_bits_per_second, relative_spread,
    snr_to_energy, CapacityReport, MethodSet,
};
use heatcap::w0::ToleranceConfig;
use heatcap::waterfill::{waterfill_discrete, QuadraturePath};
use heatcap::{HeatChannelGeometry, ModeSpectrum, QuadratureSpec};

/// Composite trapezoid over `[a, b]` with `n` panels.
fn trapezoid(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|i| f(a + i as f64 * h)).sum();
    h * (0.5 * (f(a) + f(b)) + inner)
}

#[test]
fn gallager_matches_trapezoid_oracle() {
    let (beta_g, n0) = (3.0, 0.8);
    let half_n0 = 0.5 * n0;
    // water level at twice the noise floor: band edge where exp(2 pi f^2 / beta_g^2) = 2
    let nu = 2.0 * half_n0;
    let edge = beta_g * (2f64.ln() / (2.0 * PI)).sqrt();
    let noise = |f: f64| half_n0 * (2.0 * PI * f * f / (beta_g * beta_g)).exp();
    let n = 1_000_000;
    let power = trapezoid(|f| (nu - noise(f)).max(0.0), -edge, edge, n);
    let capacity = trapezoid(|f| 0.5 * (nu / noise(f)).log2(), -edge, edge, n);

    let spec = GaussianFilterSpec::new(beta_g, n0).unwrap();
    let r = frequency_waterfill(&FilterProfile::from(&spec), n0, power, &QuadratureSpec::default()).unwrap();
    assert_relative_eq!(r.capacity_bits_per_s, capacity, max_relative = 1e-8);
    assert_relative_eq!(r.water_level, nu, max_relative = 1e-8);
    assert_relative_eq!(r.upper, edge, max_relative = 1e-8);
    assert_eq!(gallager_gaussian_capacity(&spec, power).unwrap(), r.capacity_bits_per_s);
}

/// Water-fill by trying every active count on sorted levels.
fn brute_force_waterfill(levels: &[f64], s: f64) -> (f64, f64) {
    let mut sorted = levels.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut nu = sorted[0] + s;
    let mut sum = 0.0;
    for (k, &n) in sorted.iter().enumerate() {
        sum += n;
        let candidate = (s + sum) / (k + 1) as f64;
        if candidate > n {
            nu = candidate;
        }
    }
    let c = sorted.iter().filter(|&&n| n < nu).map(|&n| 0.5 * (nu / n).ln()).sum();
    (nu, c)
}

#[test]
fn discrete_waterfill_matches_brute_force() {
    let cases: [(&[f64], f64); 4] = [
        (&[1.0], 1.0),
        (&[1.0, 4.0], 1.0),
        (&[0.3, 0.9, 1.1, 2.5, 7.0], 4.2),
        (&[5.0, 5.0, 5.0, 50.0], 1000.0),
    ];
    for (levels, s) in cases {
        let (nu, c) = brute_force_waterfill(levels, s);
        let r = waterfill_discrete(
            &ModeSpectrum::new(levels.to_vec()).unwrap(),
            s,
            &ToleranceConfig::default(),
        )
        .unwrap();
        assert_relative_eq!(r.water_level, nu, max_relative = 1e-12);
        assert_relative_eq!(r.capacity_nats, c, max_relative = 1e-12);
    }
    assert!(ModeSpectrum::new(vec![2.0, 1.0]).is_err());
}

#[test]
fn heat_ladder_matches_brute_force() {
    let geom = HeatChannelGeometry::new(50e-12, 200e9, 1.0).unwrap();
    let s = 10_000.0;
    let levels: Vec<f64> = (0..200).map(|k| ((2 * k + 1) as f64 / 10.0).exp()).collect();
    let (nu, c) = brute_force_waterfill(&levels, s);
    let r = capacity_exact_discrete(&geom, s).unwrap();
    assert_eq!(r.active_count, 30);
    assert_relative_eq!(r.water_level, nu, max_relative = 1e-12);
    assert_relative_eq!(r.capacity_nats, c, max_relative = 1e-12);
}

#[test]
fn three_methods_agree() {
    for (tbp, bound) in [(10.0, 0.01), (1000.0, 0.001)] {
        let geom = HeatChannelGeometry::from_tbp(tbp, 1.0).unwrap();
        let s = 2000.0 * 0.5 * tbp;
        let report = CapacityReport::compute(&geom, s, MethodSet::ALL, &QuadratureSpec::default(), bound).unwrap();
        assert_eq!(report.spreads.len(), 3);
        assert!(
            report.max_spread() <= bound,
            "tbp {tbp}: spread {}",
            report.max_spread()
        );
        assert!(report.is_consistent());
    }
}

#[test]
fn capacity_depends_on_energy_over_theta2_only() {
    let spec = QuadratureSpec::default();
    for (tbp, s) in [(10.0, 10_000.0), (3.0, 0.7)] {
        let a = HeatChannelGeometry::from_tbp(tbp, 1.5).unwrap();
        let b = HeatChannelGeometry::from_tbp(tbp, 3.0).unwrap();
        assert_eq!(
            capacity_closed_form(&a, s).unwrap(),
            capacity_closed_form(&b, 2.0 * s).unwrap()
        );
        assert_eq!(
            capacity_exact_discrete(&a, s).unwrap().capacity_nats,
            capacity_exact_discrete(&b, 2.0 * s).unwrap().capacity_nats
        );
        for path in [QuadraturePath::Collapsed, QuadraturePath::TensorGrid] {
            assert_eq!(
                capacity_quadrature(&a, s, &spec, path).unwrap().capacity_nats,
                capacity_quadrature(&b, 2.0 * s, &spec, path).unwrap().capacity_nats
            );
        }
    }
}

#[test]
fn rate_over_one_transmission_is_closed_form() {
    let geom = HeatChannelGeometry::new(50e-12, 200e9, 0.3).unwrap();
    for snr in [1e-3, 0.5, 159.15494309189535, 1e4] {
        let per_transmission = rate_bits_per_second(&geom, snr).unwrap() * geom.duration();
        let closed = capacity_closed_form(&geom, snr_to_energy(&geom, snr).unwrap()).unwrap() * LOG2_E;
        assert!(relative_spread(per_transmission, closed) < 1e-12);
    }
}

#[test]
fn example_rate() {
    let geom = HeatChannelGeometry::new(50e-12, 200e9, 1.0).unwrap();
    let rate = rate_bits_per_second(&geom, 1000.0 / (2.0 * PI)).unwrap();
    assert_relative_eq!(rate, 2.06132563538998e11, max_relative = 1e-12);
}
