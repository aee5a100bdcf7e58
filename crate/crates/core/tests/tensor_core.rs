mod common;

use approx::assert_abs_diff_eq;
use common::*;
use grav_core::catalog::{self, MINKOWSKI, NAMES, SCHWARZSCHILD};
use grav_core::tensor::{
    self, orthonormal_frame, polarize, principal_pressures, reconstruct_symmetric, standard_sample_set, static_observer,
};
use grav_core::verification::{random_event, random_symmetric};
use grav_core::{Event, GravError, LocalMetric, Mat4, SymTensor2, TangentVector, Vec4};
use nalgebra::{Matrix3, SymmetricEigen};
use proptest::prelude::*;
use rand::Rng;

fn minkowski_at_origin() -> LocalMetric {
    chart(MINKOWSKI).local(&Event::new(0.0, 0.0, 0.0, 0.0)).unwrap()
}

#[test]
fn metric_trace_is_four_everywhere() {
    let mut r = rng(1);
    for name in NAMES {
        let ch = chart(name);
        for _ in 0..20 {
            let x = random_event(name, &mut r);
            let m = ch.local(&x).unwrap();
            assert_abs_diff_eq!(tensor::contract(&m.metric_tensor(), &ch).unwrap(), 4.0, epsilon = 1e-12);
        }
    }
}

#[test]
fn zero_and_rest_dust_traces() {
    let m = minkowski_at_origin();
    let x = m.event;
    assert_eq!(m.contract(&SymTensor2::zero(x)).unwrap(), 0.0);
    let mut d = Mat4::zeros();
    d[(0, 0)] = 2.0;
    assert_abs_diff_eq!(m.contract(&SymTensor2::new(x, d).unwrap()).unwrap(), -2.0, epsilon = 1e-15);
}

#[test]
fn contract_rejects_mismatched_event() {
    let ch = chart(MINKOWSKI);
    let t = SymTensor2::zero(Event::new(1.0, 0.0, 0.0, 0.0));
    let m = ch.local(&Event::new(0.0, 0.0, 0.0, 0.0)).unwrap();
    assert!(matches!(m.contract(&t), Err(GravError::EventMismatch { .. })));
}

#[test]
fn projection_examples() {
    let m = minkowski_at_origin();
    let x = m.event;
    let u = TangentVector::from_array(x, [1.0, 0.0, 0.0, 0.0]);
    let w = TangentVector::from_array(x, [2.0, 3.0, 0.0, 0.0]);
    assert_eq!(m.project(&u, &w).unwrap().components, Vec4::new(0.0, 3.0, 0.0, 0.0));
    assert_eq!(m.project(&u, &u).unwrap().components, Vec4::zeros());
}

#[test]
fn projection_requires_unit_velocity() {
    let m = minkowski_at_origin();
    let x = m.event;
    let u = TangentVector::from_array(x, [2.0, 0.0, 0.0, 0.0]);
    let w = TangentVector::from_array(x, [0.0, 1.0, 0.0, 0.0]);
    assert!(matches!(m.project(&u, &w), Err(GravError::NotUnitTimelike { .. })));
}

#[test]
fn schwarzschild_static_frame() {
    let ch = chart(SCHWARZSCHILD);
    let x = Event::new(0.0, 10.0, std::f64::consts::FRAC_PI_2, 0.0);
    let m = ch.local(&x).unwrap();
    let obs = static_observer(&m).unwrap();
    assert_abs_diff_eq!(obs.u()[0], 1.0 / 0.8f64.sqrt(), epsilon = 1e-14);
    let radial = (0..3).find(|&i| obs.leg(i)[1].abs() > 0.5).unwrap();
    assert_abs_diff_eq!(obs.leg(radial)[1].abs(), 0.8f64.sqrt(), epsilon = 1e-14);
    for k in [0, 2, 3] {
        assert_abs_diff_eq!(obs.leg(radial)[k], 0.0, epsilon = 1e-14);
    }
    assert!(obs.orthonormality_residual(&m) < 1e-10);
}

#[test]
fn orthonormal_frame_rejects_non_unit() {
    let m = minkowski_at_origin();
    let u = TangentVector::from_array(m.event, [1.0, 0.5, 0.0, 0.0]);
    assert!(matches!(orthonormal_frame(&m, &u), Err(GravError::NotUnitTimelike { .. })));
}

#[test]
fn principal_pressures_examples() {
    let m = minkowski_at_origin();
    let x = m.event;
    let obs = static_observer(&m).unwrap();
    let dust = SymTensor2::new(x, Mat4::from_diagonal(&Vec4::new(1.0, 0.0, 0.0, 0.0))).unwrap();
    assert_eq!(principal_pressures(&dust, &obs).unwrap().pressures, [0.0; 3]);
    let fluid = SymTensor2::new(x, Mat4::from_diagonal(&Vec4::new(1.0, 0.3, 0.3, 0.3))).unwrap();
    let p = principal_pressures(&fluid, &obs).unwrap().pressures;
    for v in p {
        assert_abs_diff_eq!(v, 0.3, epsilon = 1e-12);
    }
}

#[test]
fn polarization_examples() {
    let m = minkowski_at_origin();
    let e0 = Vec4::new(1.0, 0.0, 0.0, 0.0);
    assert_abs_diff_eq!(polarize(|v| m.norm2(v), &e0, &e0), -1.0, epsilon = 1e-15);
    let y = Vec4::new(0.3, -1.0, 2.0, 0.5);
    assert_eq!(polarize(|_| 0.0, &e0, &y), 0.0);
}

#[test]
fn reconstruction_recovers_metric() {
    let m = minkowski_at_origin();
    let obs = static_observer(&m).unwrap();
    let samples: Vec<_> = standard_sample_set(&obs).into_iter().map(|u| (u, -1.0)).collect();
    let rec = reconstruct_symmetric(&m, &samples).unwrap();
    assert!((rec.tensor.components - m.g).abs().max() < 1e-10);
}

#[test]
fn reconstruction_needs_samples() {
    let m = minkowski_at_origin();
    assert!(matches!(reconstruct_symmetric(&m, &[]), Err(GravError::Underdetermined { .. })));
    let u = TangentVector::from_array(m.event, [1.0, 0.0, 0.0, 0.0]);
    let repeated = vec![(u, 1.0); 12];
    assert!(matches!(reconstruct_symmetric(&m, &repeated), Err(GravError::Underdetermined { .. })));
}

#[test]
fn reconstruction_ignores_antisymmetric_part() {
    let mut r = rng(7);
    let m = minkowski_at_origin();
    let obs = static_observer(&m).unwrap();
    let s = random_symmetric(m.event, &mut r);
    let mut a = Mat4::zeros();
    for i in 0..4 {
        for j in (i + 1)..4 {
            let v: f64 = r.random_range(-1.0..1.0);
            a[(i, j)] = v;
            a[(j, i)] = -v;
        }
    }
    let full = s.components + a;
    let samples: Vec<_> = standard_sample_set(&obs)
        .into_iter()
        .map(|u| {
            let v = (u.components.transpose() * full * u.components)[(0, 0)];
            (u, v)
        })
        .collect();
    let rec = reconstruct_symmetric(&m, &samples).unwrap();
    assert!((rec.tensor.components - s.components).abs().max() < 1e-10);
}

fn seeds() -> impl Strategy<Value = (u64, usize)> {
    (any::<u64>(), 0..NAMES.len())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projection_is_linear_idempotent_and_orthogonal((seed, k) in seeds()) {
        let mut r = rng(seed);
        let (ch, x, m, obs) = random_setup(NAMES[k], &mut r);
        let u = obs.velocity;
        let v = |r: &mut rand_chacha::ChaCha8Rng| TangentVector::from_array(x, [0, 1, 2, 3].map(|_| r.random_range(-2.0..2.0)));
        let (w1, w2) = (v(&mut r), v(&mut r));
        let a: f64 = r.random_range(-3.0..3.0);
        let p = |w: &TangentVector| tensor::project(&ch, &u, w).unwrap().components;
        let combo = TangentVector::new(x, w1.components * a + w2.components);
        let scale = 1.0 + w1.components.amax() * a.abs() + w2.components.amax();
        let lin = p(&combo) - (p(&w1) * a + p(&w2));
        prop_assert!(lin.amax() < 1e-8 * scale);
        let once = TangentVector::new(x, p(&w1));
        prop_assert!((p(&once) - once.components).amax() < 1e-9 * (1.0 + once.components.amax()));
        prop_assert!(m.dot(&u.components, &once.components).abs() < 1e-9 * (1.0 + once.components.amax()));
    }

    #[test]
    fn principal_pressures_match_eigen_oracle((seed, k) in seeds()) {
        let mut r = rng(seed);
        let (_, x, m, obs) = random_setup(NAMES[k], &mut r);
        let t = random_symmetric(x, &mut r);
        let pp = principal_pressures(&t, &obs).unwrap();
        let spatial = Matrix3::from_fn(|i, j| t.apply(obs.leg(i), obs.leg(j)));
        let mut oracle: Vec<f64> = SymmetricEigen::new(spatial).eigenvalues.iter().copied().collect();
        oracle.sort_by(|a, b| b.total_cmp(a));
        let scale = 1.0 + spatial.abs().max();
        prop_assert!(max_abs_diff(&pp.pressures, &oracle) < 1e-10 * scale);
        prop_assert!(pp.observer.orthonormality_residual(&m) < 1e-10);
        // Σp = c(T) + T(u,u)
        let c = m.contract(&t).unwrap();
        prop_assert!((pp.sum() - (c + t.quadratic(obs.u()))).abs() < 1e-10 * scale);
    }

    #[test]
    fn polarization_recovers_bilinear_form((seed, k) in seeds()) {
        let mut r = rng(seed);
        let x = random_event(NAMES[k], &mut r);
        let s = random_symmetric(x, &mut r);
        let v = |r: &mut rand_chacha::ChaCha8Rng| Vec4::from([0, 1, 2, 3].map(|_| r.random_range(-2.0..2.0)));
        let (a, b) = (v(&mut r), v(&mut r));
        let f = |w: &Vec4| s.quadratic(w);
        prop_assert!((polarize(f, &a, &b) - s.apply(&a, &b)).abs() < 1e-12 * 16.0);
        prop_assert!((f(&(a + b)) - f(&a) - f(&b) - 2.0 * s.apply(&a, &b)).abs() < 1e-11);
    }

    #[test]
    fn reconstruction_round_trips((seed, k) in seeds()) {
        let mut r = rng(seed);
        let (_, x, m, obs) = random_setup(NAMES[k], &mut r);
        let s = random_symmetric(x, &mut r);
        let samples: Vec<_> = standard_sample_set(&obs).into_iter().map(|u| (u, s.quadratic(&u.components))).collect();
        let rec = reconstruct_symmetric(&m, &samples).unwrap();
        prop_assert!(rec.tensor.minus(&s).unwrap().max_abs() < 1e-9);
        prop_assert!(rec.residual < 1e-9);
    }

    #[test]
    fn catalog_metrics_are_lorentzian((seed, k) in seeds()) {
        let mut r = rng(seed);
        let name = NAMES[k];
        let x = random_event(name, &mut r);
        let d = catalog::get_metric(name, &Default::default()).unwrap().diagnostics(&x);
        prop_assert!(d.is_lorentzian());
        prop_assert!(d.inverse_residual < 1e-12);
        prop_assert!(d.max_asymmetry == 0.0);
    }
}
