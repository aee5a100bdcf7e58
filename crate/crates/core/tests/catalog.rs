mod common;

use approx::assert_abs_diff_eq;
use common::*;
use grav_core::catalog::{
    self, flrw_density, get_matter, get_metric, list, Params, DE_SITTER, FLRW_DUST, MINKOWSKI, NAMES, SCHWARZSCHILD,
};
use grav_core::curvature::christoffel;
use grav_core::tensor::{principal_pressures, static_observer};
use grav_core::verification::random_event;
use grav_core::{CurvatureBundle, DerivativeScheme, Event, GravError, Mat4, MatterKind, Vec4};
use std::f64::consts::{FRAC_PI_2, PI};

fn params(pairs: &[(&str, f64)]) -> Params {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

#[test]
fn metric_examples() {
    let x = Event::new(0.3, 1.0, -2.0, 0.5);
    assert_eq!(chart(MINKOWSKI).components(&x), Mat4::from_diagonal(&Vec4::new(-1.0, 1.0, 1.0, 1.0)));
    let g = chart(SCHWARZSCHILD).components(&Event::new(0.0, 10.0, FRAC_PI_2, 0.0));
    assert_abs_diff_eq!(g[(0, 0)], -0.8, epsilon = 1e-15);
    assert_abs_diff_eq!(g[(1, 1)], 1.25, epsilon = 1e-15);
    assert_abs_diff_eq!(chart(FLRW_DUST).components(&Event::new(1.0, 0.0, 0.0, 0.0))[(1, 1)], 1.0, epsilon = 1e-15);
}

#[test]
fn matter_examples() {
    let x = Event::new(0.0, 10.0, FRAC_PI_2, 0.0);
    let vac = get_matter(SCHWARZSCHILD, &Params::new()).unwrap();
    assert_eq!(vac.kind(), MatterKind::Vacuum);
    assert_eq!(vac.at(&x).unwrap().max_abs(), 0.0);

    let dust = get_matter(FLRW_DUST, &Params::new()).unwrap();
    let y = Event::new(1.0, 0.0, 0.0, 0.0);
    let t = dust.at(&y).unwrap();
    let obs = static_observer(&chart(FLRW_DUST).local(&y).unwrap()).unwrap();
    assert_abs_diff_eq!(t.quadratic(obs.u()), 1.0 / (6.0 * PI), epsilon = 1e-16);
    assert_abs_diff_eq!(flrw_density(1.0), 0.0530516, epsilon = 1e-7);
    assert_eq!(principal_pressures(&t, &obs).unwrap().pressures, [0.0; 3]);

    let ds = get_matter(DE_SITTER, &params(&[("Lambda", 1.0)])).unwrap();
    assert_eq!(ds.lambda(), 1.0);
    assert_eq!(ds.at(&Event::new(0.0, 0.5, 1.0, 0.0)).unwrap().max_abs(), 0.0);
}

#[test]
fn registry_errors() {
    for (name, p) in [
        ("kerr", Params::new()),
        (SCHWARZSCHILD, params(&[("M", 0.0)])),
        (SCHWARZSCHILD, params(&[("M", -1.0)])),
        (SCHWARZSCHILD, params(&[("Q", 1.0)])),
        (DE_SITTER, params(&[("Lambda", f64::NAN)])),
    ] {
        assert!(matches!(get_metric(name, &p), Err(GravError::Registry(_))), "{name} {p:?}");
        assert!(matches!(get_matter(name, &p), Err(GravError::Registry(_))), "{name} {p:?}");
    }
}

#[test]
fn listing_covers_every_entry() {
    let infos = list();
    assert_eq!(infos.iter().map(|i| i.name.as_str()).collect::<Vec<_>>(), NAMES);
    let s = infos.iter().find(|i| i.name == SCHWARZSCHILD).unwrap();
    assert_eq!(s.parameters[0].name, "M");
    assert!(!s.boundaries.is_empty());
}

#[test]
fn every_entry_solves_the_field_equations() {
    let s = DerivativeScheme::default();
    let mut r = rng(17);
    for e in catalog::all_default() {
        for _ in 0..20 {
            let x = random_event(&e.name, &mut r);
            let b = CurvatureBundle::compute(&e.chart, &x, &s).unwrap();
            let t = e.matter.effective_at(&e.chart, &x).unwrap();
            let residual = b.einstein.minus(&t.scaled(8.0 * PI)).unwrap().max_abs();
            assert!(residual < 1e-6, "{}: {residual:e} at {:?}", e.name, x.0);
        }
    }
}

#[test]
fn de_sitter_is_a_lambda_vacuum() {
    let s = DerivativeScheme::default();
    let mut r = rng(19);
    for lambda in [0.5, 1.0, 2.0] {
        let ch = get_metric(DE_SITTER, &params(&[("Lambda", lambda)])).unwrap();
        for _ in 0..20 {
            let mut x = random_event(DE_SITTER, &mut r);
            // Keep inside the smaller horizon for larger Λ.
            x.0[1] *= (1.0 / lambda).sqrt().min(1.0);
            let b = CurvatureBundle::compute(&ch, &x, &s).unwrap();
            let lhs = b.einstein.plus(&b.metric.metric_tensor().scaled(lambda)).unwrap();
            assert!(lhs.max_abs() < 1e-6);
        }
    }
}

/// Γ^a_{bc} of Schwarzschild in (t, r, θ, φ), written out by hand.
fn schwarzschild_symbols(m: f64, r: f64, theta: f64) -> [[[f64; 4]; 4]; 4] {
    let f = 1.0 - 2.0 * m / r;
    let mut g = [[[0.0; 4]; 4]; 4];
    let mut set = |a: usize, b: usize, c: usize, v: f64| {
        g[a][b][c] = v;
        g[a][c][b] = v;
    };
    set(0, 0, 1, m / (r * r * f));
    set(1, 0, 0, m * f / (r * r));
    set(1, 1, 1, -m / (r * r * f));
    set(1, 2, 2, -r * f);
    set(1, 3, 3, -r * f * theta.sin().powi(2));
    set(2, 1, 2, 1.0 / r);
    set(2, 3, 3, -theta.sin() * theta.cos());
    set(3, 1, 3, 1.0 / r);
    set(3, 2, 3, theta.cos() / theta.sin());
    g
}

#[test]
fn schwarzschild_christoffels_match_closed_form() {
    let mut r = rng(23);
    for m in [1.0, 2.5] {
        let ch = get_metric(SCHWARZSCHILD, &params(&[("M", m)])).unwrap();
        for _ in 0..20 {
            let mut x = random_event(SCHWARZSCHILD, &mut r);
            x.0[1] *= m;
            let got = christoffel(&ch, &x, &DerivativeScheme::default()).unwrap();
            let want = schwarzschild_symbols(m, x.0[1], x.0[2]);
            for a in 0..4 {
                for b in 0..4 {
                    for c in 0..4 {
                        assert!((got.get(a, b, c) - want[a][b][c]).abs() < 1e-10, "Γ^{a}_{b}{c} at {:?}", x.0);
                    }
                }
            }
        }
    }
}

#[test]
fn komar_mass_metadata() {
    assert_eq!(entry(SCHWARZSCHILD).komar_mass(), Some(1.0));
    assert_eq!(entry(MINKOWSKI).komar_mass(), Some(0.0));
    assert_eq!(entry(FLRW_DUST).komar_mass(), None);
    assert_eq!(entry(DE_SITTER).lambda(), 1.0);
    assert_eq!(entry(FLRW_DUST).lambda(), 0.0);
}
