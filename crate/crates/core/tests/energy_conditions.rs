mod common;

use approx::assert_abs_diff_eq;
use common::*;
use grav_core::catalog::{MINKOWSKI, NAMES};
use grav_core::conditions::{
    check, check_all, check_dominant, check_strong, check_weak, grid_minimum, mixed_form, reevaluate, Certificate,
};
use grav_core::stress::total_energy_tensor;
use grav_core::tensor::static_observer;
use grav_core::verification::random_symmetric;
use grav_core::{
    BoostGrid, Condition, ConditionVerdict, CurvatureBundle, DerivativeScheme, Event, LocalMetric, Mat4, Observer,
    StressEnergyField, SymTensor2, Vec4, Verdict,
};
use proptest::prelude::*;
use rand::Rng;
use std::f64::consts::PI;

fn rest() -> (LocalMetric, Observer) {
    let m = chart(MINKOWSKI).local(&Event::new(0.0, 0.0, 0.0, 0.0)).unwrap();
    let obs = static_observer(&m).unwrap();
    (m, obs)
}

fn fluid(rho: f64, p: f64) -> SymTensor2 {
    let x = Event::new(0.0, 0.0, 0.0, 0.0);
    StressEnergyField::perfect_fluid(chart(MINKOWSKI), rho, p).at(&x).unwrap()
}

fn assert_valid_failure(v: &ConditionVerdict, t: &SymTensor2, m: &LocalMetric) {
    assert!(v.verdict.fails(), "{v:?}");
    let w = v.witness.expect("failing verdict carries a witness");
    assert!(w.value < 0.0);
    let again = reevaluate(v.condition, t, m, &w).unwrap();
    assert_abs_diff_eq!(again, w.value, epsilon = 1e-12 * (1.0 + w.value.abs()));
    assert!(m.norm2(&Vec4::from(w.observer)) < 0.0);
}

#[test]
fn weak_condition_examples() {
    let (m, obs) = rest();
    let grid = BoostGrid::default();
    assert!(check_weak(&fluid(1.0, 0.1), &m, &obs, &grid).unwrap().verdict.holds());
    let bad = fluid(1.0, -1.5);
    let v = check_weak(&bad, &m, &obs, &grid).unwrap();
    assert_valid_failure(&v, &bad, &m);
    // The witness must be a moving observer: at rest the density is +1.
    assert!(v.witness.unwrap().observer[0] > 1.0 + 1e-6);
    let zero = check_weak(&SymTensor2::zero(m.event), &m, &obs, &grid).unwrap();
    assert!(zero.verdict.holds());
    assert_eq!(zero.margin, 0.0);
}

#[test]
fn strong_condition_examples() {
    let (m, obs) = rest();
    let grid = BoostGrid::default();
    let good = check_strong(&fluid(1.0, 0.1), &m, &obs, &grid).unwrap();
    assert_eq!(good.verdict, Verdict::Holds(Certificate::Exact));
    assert_abs_diff_eq!(good.margin, 0.65, epsilon = 1e-12);

    let lambda = m.metric_tensor().scaled(-1.0 / (8.0 * PI));
    let v = check_strong(&lambda, &m, &obs, &grid).unwrap();
    assert_valid_failure(&v, &lambda, &m);
    assert_abs_diff_eq!(v.witness.unwrap().value, -1.0 / (8.0 * PI), epsilon = 1e-12);
    assert!(check_strong(&SymTensor2::zero(m.event), &m, &obs, &grid).unwrap().verdict.holds());
}

#[test]
fn dominant_condition_examples() {
    let (m, obs) = rest();
    let grid = BoostGrid::default();
    assert!(check_dominant(&fluid(1.0, 0.1), &m, &obs, &grid).unwrap().verdict.holds());
    let bad = fluid(1.0, 1.5);
    let v = check_dominant(&bad, &m, &obs, &grid).unwrap();
    assert_valid_failure(&v, &bad, &m);
    assert!(check_dominant(&SymTensor2::zero(m.event), &m, &obs, &grid).unwrap().verdict.holds());
}

#[test]
fn null_radiation_sits_on_the_boundary() {
    let (m, obs) = rest();
    let x = m.event;
    let t = StressEnergyField::electromagnetic_wave(1.0, 1.0).at(&x).unwrap();
    for v in check_all(&t, &m, &obs, &BoostGrid::default()).unwrap() {
        assert!(v.verdict.holds(), "{v:?}");
    }
}

#[test]
fn mixed_form_examples() {
    let (m, obs) = rest();
    assert_eq!(mixed_form(&m.metric_tensor(), &m), Mat4::identity());
    let dust = fluid(2.0, 0.0);
    assert_eq!(mixed_form(&dust, &m) * obs.u(), -2.0 * obs.u());
}

#[test]
fn strong_condition_matches_ricci_focusing() {
    let grid = BoostGrid {
        levels: 8,
        ..BoostGrid::default()
    };
    for e in grav_core::catalog::all_default() {
        let x = grav_core::catalog::sample_event(&e.name);
        let b = CurvatureBundle::compute(&e.chart, &x, &DerivativeScheme::default()).unwrap();
        let obs = static_observer(&b.metric).unwrap();
        let t = e.matter.effective_at(&e.chart, &x).unwrap();
        let verdict = check_strong(&t, &b.metric, &obs, &grid).unwrap();
        let ric_min = grid_minimum(&b.ricci, &obs, &grid);
        assert_eq!(verdict.verdict.holds(), ric_min >= -1e-6, "{}: {verdict:?} vs {ric_min}", e.name);
    }
}

fn verdict_kind(v: &Verdict) -> u8 {
    match v {
        Verdict::Holds(_) => 0,
        Verdict::Fails => 1,
        Verdict::Inconclusive => 2,
    }
}

/// A type-I fluid seen from a random boosted frame at a random catalog event.
fn random_fluid(seed: u64, k: usize) -> (LocalMetric, Observer, SymTensor2) {
    let mut r = rng(seed);
    let (_, x, m, obs) = random_setup(NAMES[k], &mut r);
    let rho: f64 = r.random_range(-1.0..2.0);
    let p: [f64; 3] = [0, 1, 2].map(|_| r.random_range(-2.0..2.0));
    let mut c = rho * obs.u() * obs.u().transpose();
    for (i, pi) in p.iter().enumerate() {
        c += *pi * obs.leg(i) * obs.leg(i).transpose();
    }
    let lower = m.g * c * m.g;
    let reference = static_observer(&m).unwrap();
    (m, reference, SymTensor2::symmetrized(x, lower))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn verdicts_are_scale_invariant(seed in any::<u64>(), k in 0..NAMES.len(), s in 0.1f64..10.0) {
        let (m, reference, t) = random_fluid(seed, k);
        let grid = BoostGrid { levels: 8, ..BoostGrid::default() };
        let a = check_all(&t, &m, &reference, &grid).unwrap();
        let b = check_all(&t.scaled(s), &m, &reference, &grid).unwrap();
        for (va, vb) in a.iter().zip(&b) {
            // Margins near the boundary tolerance are allowed to flip.
            if va.margin.abs() > 1e-6 {
                prop_assert_eq!(verdict_kind(&va.verdict), verdict_kind(&vb.verdict), "{:?} vs {:?}", va, vb);
            }
        }
    }

    #[test]
    fn failing_verdicts_carry_valid_witnesses(seed in any::<u64>(), k in 0..NAMES.len()) {
        let mut r = rng(seed);
        let (_, x, m, _) = random_setup(NAMES[k], &mut r);
        let reference = static_observer(&m).unwrap();
        let t = random_symmetric(x, &mut r);
        let grid = BoostGrid { levels: 8, ..BoostGrid::default() };
        for c in Condition::ALL {
            let v = check(c, &t, &m, &reference, &grid).unwrap();
            if v.verdict.fails() {
                let w = v.witness.unwrap();
                let again = reevaluate(c, &t, &m, &w).unwrap();
                prop_assert!(again < 0.0);
                prop_assert!((again - w.value).abs() < 1e-10 * (1.0 + w.value.abs()));
            }
        }
    }

    #[test]
    fn mixed_form_defining_relation(seed in any::<u64>(), k in 0..NAMES.len()) {
        let mut r = rng(seed);
        let (_, x, m, _) = random_setup(NAMES[k], &mut r);
        let a = random_symmetric(x, &mut r);
        let v = |r: &mut rand_chacha::ChaCha8Rng| Vec4::from([0, 1, 2, 3].map(|_| r.random_range(-1.0..1.0)));
        let (u, w) = (v(&mut r), v(&mut r));
        let at = mixed_form(&a, &m);
        prop_assert!((m.dot(&(at * u), &w) - a.apply(&u, &w)).abs() < 1e-12 * (1.0 + m.g.abs().max()));
        let c = m.contract(&a).unwrap();
        let h = mixed_form(&total_energy_tensor(&a, &m).unwrap(), &m);
        let expected = at * 2.0 - Mat4::identity() * c;
        prop_assert!((h - expected).abs().max() < 1e-12 * (1.0 + at.abs().max()));
    }

    #[test]
    fn grid_observers_are_unit_future_timelike(seed in any::<u64>(), k in 0..NAMES.len()) {
        let mut r = rng(seed);
        let (_, _, m, obs) = random_setup(NAMES[k], &mut r);
        let grid = BoostGrid { random_samples: 16, seed, ..BoostGrid::default() };
        let us = grid.observers(&obs);
        prop_assert!(us.len() >= 24 * 26 + 16);
        for u in us {
            prop_assert!((m.norm2(&u) + 1.0).abs() < 1e-10);
            prop_assert!(u[0] > 0.0);
        }
    }
}
