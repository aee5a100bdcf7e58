mod common;

use approx::assert_abs_diff_eq;
use common::*;
use grav_core::catalog::{DE_SITTER, FLRW_DUST, MINKOWSKI, SCHWARZSCHILD};
use grav_core::quasilocal::{
    annulus_difference, gauss_legendre, killing_check, komar_energy, schwarzschild_normalized_mass, sphere_quadrature,
    KillingData, Normalization, SurfaceSpec,
};
use grav_core::verification::random_event;
use grav_core::{DerivativeScheme, Event, GravError, Vec4};
use proptest::prelude::*;
use std::f64::consts::{FRAC_PI_2, PI};

fn komar(name: &str, surface: SurfaceSpec, norm: Normalization) -> grav_core::Result<f64> {
    let k = KillingData::time_translation();
    Ok(komar_energy(&chart(name), &surface, &k, norm, &DerivativeScheme::default())?.energy)
}

#[test]
fn killing_checks_on_catalog_fields() {
    let s = DerivativeScheme::default();
    let k = KillingData::time_translation();
    let mut r = rng(11);

    let events: Vec<Event> = (0..10).map(|_| random_event(SCHWARZSCHILD, &mut r)).collect();
    let rep = killing_check(&chart(SCHWARZSCHILD), &k, &events, &s).unwrap();
    assert_eq!(rep.checked, 10);
    assert!(rep.is_static(1e-10), "{rep:?}");

    let events: Vec<Event> = (0..10).map(|_| random_event(MINKOWSKI, &mut r)).collect();
    let rep = killing_check(&chart(MINKOWSKI), &k, &events, &s).unwrap();
    assert_eq!(
        (rep.killing_residual, rep.orthogonality_residual, rep.exterior_residual),
        (0.0, 0.0, 0.0)
    );

    let events: Vec<Event> = (0..10).map(|_| random_event(FLRW_DUST, &mut r)).collect();
    let rep = killing_check(&chart(FLRW_DUST), &k, &events, &s).unwrap();
    assert!(rep.killing_residual > 0.1);
    assert!(!rep.is_killing(1e-8));
}

#[test]
fn horizon_events_are_excluded() {
    let k = KillingData::time_translation();
    let events = [Event::new(0.0, 2.0, FRAC_PI_2, 0.0), Event::new(0.0, 10.0, FRAC_PI_2, 0.0)];
    let rep = killing_check(&chart(SCHWARZSCHILD), &k, &events, &DerivativeScheme::default()).unwrap();
    assert_eq!(rep.checked, 1);
    assert_eq!(rep.excluded, vec![events[0].0]);
}

#[test]
fn rotation_field_through_finite_differences() {
    let k = KillingData::from_fn(|x| Vec4::new(0.0, -x.0[2], x.0[1], 0.0), true);
    let events = [Event::new(0.0, 1.0, 0.5, -0.3), Event::new(1.0, -2.0, 1.5, 0.7)];
    let rep = killing_check(&chart(MINKOWSKI), &k, &events, &DerivativeScheme::default()).unwrap();
    assert!(rep.is_static(1e-8), "{rep:?}");
}

#[test]
fn schwarzschild_energy_is_the_mass() {
    let e = komar(SCHWARZSCHILD, SurfaceSpec::sphere(10.0), Normalization::Infinity).unwrap();
    assert_abs_diff_eq!(e, 1.0, epsilon = 1e-8);
    let full = komar_energy(
        &chart(SCHWARZSCHILD),
        &SurfaceSpec::sphere(10.0),
        &KillingData::time_translation(),
        Normalization::Infinity,
        &DerivativeScheme::default(),
    )
    .unwrap();
    assert_eq!(full.raw_signed, -full.energy);
    assert_abs_diff_eq!(full.area, 400.0 * PI, epsilon = 1e-10 * 400.0 * PI);
}

#[test]
fn flat_space_has_no_energy() {
    let r = komar_energy(
        &chart(MINKOWSKI),
        &SurfaceSpec::sphere(3.0),
        &KillingData::time_translation(),
        Normalization::Infinity,
        &DerivativeScheme::default(),
    )
    .unwrap();
    assert_eq!(r.energy, 0.0);
    assert_abs_diff_eq!(r.area, 36.0 * PI, epsilon = 1e-10 * 36.0 * PI);
}

#[test]
fn vacuum_annulus_carries_no_energy() {
    let d = annulus_difference(
        &chart(SCHWARZSCHILD),
        &SurfaceSpec::sphere(8.0),
        &SurfaceSpec::sphere(12.0),
        &KillingData::time_translation(),
        Normalization::Infinity,
        &DerivativeScheme::default(),
    )
    .unwrap();
    assert!(d.abs() < 1e-8);
}

#[test]
fn energy_is_independent_of_radius() {
    for r0 in [3.0, 4.5, 10.0, 25.0, 60.0, 100.0] {
        let e = komar(SCHWARZSCHILD, SurfaceSpec::sphere(r0), Normalization::Infinity).unwrap();
        assert!((e - 1.0).abs() < 1e-8, "r0 = {r0}: {e}");
    }
}

#[test]
fn normalized_mass_closed_form() {
    assert_abs_diff_eq!(schwarzschild_normalized_mass(1.0, 4.0).unwrap(), 1.4142136, epsilon = 1e-7);
    assert_abs_diff_eq!(schwarzschild_normalized_mass(1.0, 1e12).unwrap(), 1.0, epsilon = 1e-11);
    assert_eq!(schwarzschild_normalized_mass(0.0, 5.0).unwrap(), 0.0);
    assert!(matches!(schwarzschild_normalized_mass(1.0, 2.0), Err(GravError::Domain { .. })));
    assert!(matches!(schwarzschild_normalized_mass(1.0, 1.5), Err(GravError::Domain { .. })));
}

#[test]
fn normalization_routes_agree() {
    for r0 in [3.0, 4.0, 10.0, 100.0] {
        let closed = schwarzschild_normalized_mass(1.0, r0).unwrap();
        let at_radius = komar(SCHWARZSCHILD, SurfaceSpec::sphere(10.0), Normalization::Radius(r0)).unwrap();
        let rescaled = komar(
            SCHWARZSCHILD,
            SurfaceSpec::sphere(10.0),
            Normalization::Scale(1.0 / (1.0 - 2.0 / r0).sqrt()),
        )
        .unwrap();
        assert!((at_radius / closed - 1.0).abs() < 1e-8, "r0 = {r0}");
        assert!((rescaled / closed - 1.0).abs() < 1e-8, "r0 = {r0}");
    }
}

#[test]
fn horizon_and_flatness_guards() {
    let at_horizon = komar(SCHWARZSCHILD, SurfaceSpec::sphere(2.0), Normalization::Infinity).unwrap_err();
    assert!(matches!(at_horizon, GravError::HorizonProximity { .. }));
    let normalize_on_horizon = komar(SCHWARZSCHILD, SurfaceSpec::sphere(5.0), Normalization::Radius(2.0)).unwrap_err();
    assert!(matches!(normalize_on_horizon, GravError::HorizonProximity { .. }));
    let not_flat = komar(DE_SITTER, SurfaceSpec::sphere(0.5), Normalization::Infinity).unwrap_err();
    assert!(matches!(not_flat, GravError::InvalidSpec(_)));
    assert!(komar(DE_SITTER, SurfaceSpec::sphere(0.5), Normalization::Radius(0.1)).unwrap().is_finite());
    assert!(komar(SCHWARZSCHILD, SurfaceSpec::sphere(10.0), Normalization::Scale(-1.0)).is_err());
    assert!(komar(SCHWARZSCHILD, SurfaceSpec::sphere(10.0).with_nodes(0, 8), Normalization::Infinity).is_err());
}

#[test]
fn doubling_nodes_leaves_constant_integrand_alone() {
    let coarse = komar(SCHWARZSCHILD, SurfaceSpec::sphere(10.0), Normalization::Infinity).unwrap();
    let fine = komar(SCHWARZSCHILD, SurfaceSpec::sphere(10.0).with_nodes(64, 128), Normalization::Infinity).unwrap();
    assert!((coarse - fine).abs() < 1e-12);
}

#[test]
fn quadrature_converges_on_smooth_integrands() {
    // ∮ exp(a n·e_x) dΩ = 4π sinh(a)/a.
    let a = 2.0f64;
    let exact = 4.0 * PI * a.sinh() / a;
    let f = |theta: f64, phi: f64| (a * theta.sin() * phi.cos()).exp();
    let err = |n: usize| (sphere_quadrature(n, 2 * n, &f) - exact).abs();
    let errs: Vec<f64> = [3, 6, 12].iter().map(|&n| err(n)).collect();
    assert!(errs[0] > 1e-8, "{errs:?}");
    assert!(errs[0] / errs[1] >= 16.0, "{errs:?}");
    assert!(errs[2] < 1e-12, "{errs:?}");

    // Gauss–Legendre is exact through degree 2n − 1.
    let (x, w) = gauss_legendre(5);
    assert_abs_diff_eq!(w.iter().sum::<f64>(), 2.0, epsilon = 1e-14);
    let p9: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(8)).sum();
    assert_abs_diff_eq!(p9, 2.0 / 9.0, epsilon = 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn energy_is_homogeneous_in_k(lambda in 0.05f64..20.0) {
        let base = komar(SCHWARZSCHILD, SurfaceSpec::sphere(10.0), Normalization::Scale(1.0)).unwrap();
        let scaled = komar(SCHWARZSCHILD, SurfaceSpec::sphere(10.0), Normalization::Scale(lambda)).unwrap();
        prop_assert!((scaled / (lambda * base) - 1.0).abs() < 1e-12);
    }
}
