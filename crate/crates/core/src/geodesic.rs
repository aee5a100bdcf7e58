//! Timelike geodesics, Jacobi fields and the tidal reading of Ric(u,u).
//!
//! Everything is integrated with classical RK4 in proper time on the joint
//! state (x, u, extra vectors). Extra vectors are either parallel-transported
//! (ė = −Γ(u,e)) or Jacobi pairs (e, w = ∇_u e) obeying
//! ∇_u w = −R(e,u)u.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::chart::SpacetimeChart;
use crate::curvature::{christoffel, CurvatureBundle};
use crate::error::{GravError, Result};
use crate::fd::DerivativeScheme;
use crate::stress::{total_energy_tensor, StressEnergyField};
use crate::tensor::{static_observer, Event, LocalMetric, Observer, Vec4};

/// Smallest step the integrator will halve down to.
/// Deepest halving of the nominal step. Past it the step is accepted and its
/// drift shows up in `max_drift`.
const MAX_HALVINGS: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorOptions {
    pub step: f64,
    /// Allowed growth of |g(u,u) + 1| over the whole span; each step gets its share.
    pub drift_tolerance: f64,
    pub scheme: DerivativeScheme,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            step: 1e-3,
            drift_tolerance: 1e-8,
            scheme: DerivativeScheme::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicState {
    pub tau: f64,
    pub event: Event,
    pub velocity: Vec4,
    /// Step used to reach this state.
    pub step: f64,
    /// Number of halvings applied to that step.
    pub halvings: u32,
}

impl GeodesicState {
    pub fn new(event: Event, velocity: Vec4) -> Self {
        Self {
            tau: 0.0,
            event,
            velocity,
            step: 0.0,
            halvings: 0,
        }
    }

    /// |g(u,u) + 1|
    pub fn norm_drift(&self, chart: &SpacetimeChart) -> Result<f64> {
        let m = chart.local(&self.event)?;
        Ok((m.norm2(&self.velocity) + 1.0).abs())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicPath {
    pub states: Vec<GeodesicState>,
    /// Why integration stopped before `tau_end`, if it did.
    pub exit: Option<GravError>,
    pub max_drift: f64,
}

impl GeodesicPath {
    pub fn last(&self) -> &GeodesicState {
        self.states.last().expect("path holds the initial state")
    }

    pub fn completed(&self) -> bool {
        self.exit.is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Extra {
    Transported,
    Jacobi,
}

/// Flat state: x (4), u (4), then 4 components per transported vector or 8 per Jacobi pair.
struct System<'a> {
    chart: &'a SpacetimeChart,
    scheme: DerivativeScheme,
    extras: Vec<Extra>,
}

impl System<'_> {
    fn needs_curvature(&self) -> bool {
        self.extras.contains(&Extra::Jacobi)
    }

    fn rhs(&self, y: &[f64]) -> Result<Vec<f64>> {
        let x = Event([y[0], y[1], y[2], y[3]]);
        let u = Vec4::from_column_slice(&y[4..8]);
        let (gamma, riemann) = if self.needs_curvature() {
            let b = CurvatureBundle::compute(self.chart, &x, &self.scheme)?;
            (b.christoffel, Some(b.riemann))
        } else {
            (christoffel(self.chart, &x, &self.scheme)?, None)
        };
        let mut out = Vec::with_capacity(y.len());
        out.extend(u.iter());
        out.extend((-gamma.contract(&u, &u)).iter());
        let mut at = 8;
        for extra in &self.extras {
            let e = Vec4::from_column_slice(&y[at..at + 4]);
            match extra {
                Extra::Transported => {
                    out.extend((-gamma.contract(&u, &e)).iter());
                    at += 4;
                }
                Extra::Jacobi => {
                    let w = Vec4::from_column_slice(&y[at + 4..at + 8]);
                    let r = riemann.as_ref().expect("curvature computed for Jacobi pairs");
                    out.extend((w - gamma.contract(&u, &e)).iter());
                    out.extend((-r.apply(&e, &u, &u) - gamma.contract(&u, &w)).iter());
                    at += 8;
                }
            }
        }
        Ok(out)
    }

    fn rk4(&self, y: &[f64], h: f64) -> Result<Vec<f64>> {
        let axpy = |a: &[f64], s: f64, b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(p, q)| p + s * q).collect() };
        let k1 = self.rhs(y)?;
        let k2 = self.rhs(&axpy(y, 0.5 * h, &k1))?;
        let k3 = self.rhs(&axpy(y, 0.5 * h, &k2))?;
        let k4 = self.rhs(&axpy(y, h, &k3))?;
        Ok((0..y.len())
            .map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect())
    }

    fn norm_excess(&self, y: &[f64]) -> Result<f64> {
        let m = self.chart.local(&Event([y[0], y[1], y[2], y[3]]))?;
        Ok((m.norm2(&Vec4::from_column_slice(&y[4..8])) + 1.0).abs())
    }
}

/// Raw trajectory of the flat state, one entry per accepted step.
struct Trajectory {
    tau: Vec<f64>,
    y: Vec<Vec<f64>>,
    steps: Vec<(f64, u32)>,
    exit: Option<GravError>,
    max_drift: f64,
}

fn run(system: &System, y0: Vec<f64>, tau0: f64, schedule: Schedule, opts: &IntegratorOptions) -> Result<Trajectory> {
    if !(opts.step > 0.0) || !opts.step.is_finite() {
        return Err(GravError::InvalidSpec(format!("integration step must be positive, got {}", opts.step)));
    }
    let mut traj = Trajectory {
        tau: vec![tau0],
        y: vec![y0.clone()],
        steps: vec![(0.0, 0)],
        exit: None,
        max_drift: system.norm_excess(&y0)?,
    };
    let mut y = y0;
    let mut tau = tau0;
    match schedule {
        Schedule::Adaptive { tau_end } => {
            let span = (tau_end - tau0).abs().max(opts.step);
            let dir = if tau_end >= tau0 { 1.0 } else { -1.0 };
            while (tau_end - tau) * dir > 1e-12 * span {
                let remaining = (tau_end - tau).abs();
                let mut h = opts.step.min(remaining);
                let mut halvings = 0;
                let before = system.norm_excess(&y)?;
                let next = loop {
                    match system.rk4(&y, dir * h) {
                        Ok(cand) => {
                            let after = system.norm_excess(&cand)?;
                            let allowed = opts.drift_tolerance * h / span;
                            if (after - before).abs() <= allowed || halvings >= MAX_HALVINGS {
                                break Ok((cand, after));
                            }
                        }
                        Err(e) => {
                            if halvings >= MAX_HALVINGS {
                                break Err(e);
                            }
                        }
                    }
                    h /= 2.0;
                    halvings += 1;
                };
                match next {
                    Ok((cand, after)) => {
                        tau += dir * h;
                        y = cand;
                        traj.max_drift = traj.max_drift.max(after);
                        traj.tau.push(tau);
                        traj.y.push(y.clone());
                        traj.steps.push((dir * h, halvings));
                    }
                    Err(e) => {
                        traj.exit = Some(e);
                        break;
                    }
                }
            }
        }
        Schedule::Fixed(steps) => {
            for h in steps {
                match system.rk4(&y, h) {
                    Ok(cand) => {
                        tau += h;
                        y = cand;
                        traj.max_drift = traj.max_drift.max(system.norm_excess(&y)?);
                        traj.tau.push(tau);
                        traj.y.push(y.clone());
                        traj.steps.push((h, 0));
                    }
                    Err(e) => {
                        traj.exit = Some(e);
                        break;
                    }
                }
            }
        }
    }
    Ok(traj)
}

enum Schedule {
    Adaptive { tau_end: f64 },
    Fixed(Vec<f64>),
}

fn initial_vector(state: &GeodesicState) -> Vec<f64> {
    state.event.0.iter().copied().chain(state.velocity.iter().copied()).collect()
}

fn states_of(traj: &Trajectory) -> Vec<GeodesicState> {
    traj.y
        .iter()
        .zip(&traj.tau)
        .zip(&traj.steps)
        .map(|((y, tau), (h, halvings))| GeodesicState {
            tau: *tau,
            event: Event([y[0], y[1], y[2], y[3]]),
            velocity: Vec4::from_column_slice(&y[4..8]),
            step: *h,
            halvings: *halvings,
        })
        .collect()
}

fn require_unit_timelike(chart: &SpacetimeChart, state: &GeodesicState) -> Result<LocalMetric> {
    let m = chart.local(&state.event)?;
    m.require_unit_future(&state.velocity, crate::tensor::UNIT_TOLERANCE)?;
    Ok(m)
}

/// Integrates ẍ + Γ(ẋ,ẋ) = 0 from `initial` to proper time `tau_end`.
///
/// Leaving the chart domain truncates the path and records the reason in
/// [`GeodesicPath::exit`].
pub fn integrate_geodesic(chart: &SpacetimeChart, initial: &GeodesicState, tau_end: f64, opts: &IntegratorOptions) -> Result<GeodesicPath> {
    require_unit_timelike(chart, initial)?;
    let system = System {
        chart,
        scheme: opts.scheme,
        extras: Vec::new(),
    };
    let traj = run(&system, initial_vector(initial), initial.tau, Schedule::Adaptive { tau_end }, opts)?;
    Ok(GeodesicPath {
        states: states_of(&traj),
        exit: traj.exit,
        max_drift: traj.max_drift,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviationState {
    pub base: GeodesicState,
    /// Deviation vector e.
    pub deviation: Vec4,
    /// ∇_u e.
    pub deviation_rate: Vec4,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeviationPath {
    pub states: Vec<DeviationState>,
    pub exit: Option<GravError>,
}

fn replay_schedule(base: &GeodesicPath) -> Vec<f64> {
    base.states.iter().skip(1).map(|s| s.step).collect()
}

/// Evolves a Jacobi field along a precomputed geodesic, reusing its step sequence.
pub fn integrate_jacobi(
    chart: &SpacetimeChart,
    base: &GeodesicPath,
    deviation: Vec4,
    deviation_rate: Vec4,
    scheme: &DerivativeScheme,
) -> Result<DeviationPath> {
    let system = System {
        chart,
        scheme: *scheme,
        extras: vec![Extra::Jacobi],
    };
    let first = base.states[0];
    let mut y0 = initial_vector(&first);
    y0.extend(deviation.iter());
    y0.extend(deviation_rate.iter());
    let opts = IntegratorOptions {
        scheme: *scheme,
        ..IntegratorOptions::default()
    };
    let traj = run(&system, y0, first.tau, Schedule::Fixed(replay_schedule(base)), &opts)?;
    let states = states_of(&traj)
        .into_iter()
        .zip(&traj.y)
        .map(|(base, y)| DeviationState {
            base,
            deviation: Vec4::from_column_slice(&y[8..12]),
            deviation_rate: Vec4::from_column_slice(&y[12..16]),
        })
        .collect();
    Ok(DeviationPath { states, exit: traj.exit })
}

/// Parallel-transports spatial frame legs along a precomputed geodesic.
pub fn transport_frame(chart: &SpacetimeChart, base: &GeodesicPath, legs: [Vec4; 3], scheme: &DerivativeScheme) -> Result<Vec<[Vec4; 3]>> {
    let system = System {
        chart,
        scheme: *scheme,
        extras: vec![Extra::Transported; 3],
    };
    let first = base.states[0];
    let mut y0 = initial_vector(&first);
    for l in &legs {
        y0.extend(l.iter());
    }
    let opts = IntegratorOptions {
        scheme: *scheme,
        ..IntegratorOptions::default()
    };
    let traj = run(&system, y0, first.tau, Schedule::Fixed(replay_schedule(base)), &opts)?;
    if let Some(e) = traj.exit {
        return Err(e);
    }
    Ok(traj
        .y
        .iter()
        .map(|y| [0, 1, 2].map(|i| Vec4::from_column_slice(&y[8 + 4 * i..12 + 4 * i])))
        .collect())
}

/// Largest deviation from orthonormality of (u, legs) along a transported frame.
pub fn frame_residual(chart: &SpacetimeChart, base: &GeodesicPath, frames: &[[Vec4; 3]]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (s, legs) in base.states.iter().zip(frames) {
        let m = chart.local(&s.event)?;
        let vs = [s.velocity, legs[0], legs[1], legs[2]];
        for a in 0..4 {
            for b in a..4 {
                let target = match (a, b) {
                    (0, 0) => -1.0,
                    _ if a == b => 1.0,
                    _ => 0.0,
                };
                worst = worst.max((m.dot(&vs[a], &vs[b]) - target).abs());
            }
        }
    }
    Ok(worst)
}

/// Coordinate separation (x_δ(τ) − x(τ))/δ between the base geodesic and the
/// neighbour started at x + δe with velocity u + δė, where ė = w − Γ(u,e).
/// Sampled at the base path's states.
pub fn neighbor_deviation(
    chart: &SpacetimeChart,
    base: &GeodesicPath,
    deviation: Vec4,
    deviation_rate: Vec4,
    delta: f64,
    scheme: &DerivativeScheme,
) -> Result<Vec<Vec4>> {
    let first = base.states[0];
    let gamma = christoffel(chart, &first.event, scheme)?;
    let edot = deviation_rate - gamma.contract(&first.velocity, &deviation);
    let system = System {
        chart,
        scheme: *scheme,
        extras: Vec::new(),
    };
    let y0: Vec<f64> = first
        .event
        .offset(&deviation, delta)
        .0
        .iter()
        .copied()
        .chain((first.velocity + edot * delta).iter().copied())
        .collect();
    let opts = IntegratorOptions {
        scheme: *scheme,
        ..IntegratorOptions::default()
    };
    let traj = run(&system, y0, first.tau, Schedule::Fixed(replay_schedule(base)), &opts)?;
    if let Some(e) = traj.exit {
        return Err(e);
    }
    Ok(traj
        .y
        .iter()
        .zip(&base.states)
        .map(|(y, s)| (Vec4::from_column_slice(&y[0..4]) - Vec4::from(s.event.0)) / delta)
        .collect())
}

/// g(e_i, R(e_i,u)u) for each spatial leg of the observer.
pub fn tidal_rates(bundle: &CurvatureBundle, obs: &Observer) -> [f64; 3] {
    let u = obs.u();
    [0, 1, 2].map(|i| {
        let e = obs.leg(i);
        bundle.metric.dot(e, &bundle.riemann.apply(e, u, u))
    })
}

/// −Σ_i g(e_i, R(e_i,u)u), which equals −Ric(u,u).
pub fn tidal_divergence(chart: &SpacetimeChart, x: &Event, obs: &Observer, scheme: &DerivativeScheme) -> Result<f64> {
    let bundle = CurvatureBundle::compute(chart, x, scheme)?;
    Ok(-tidal_rates(&bundle, obs).iter().sum::<f64>())
}

/// g(u, R(u,u)u): the time-leg term of the Ricci trace, identically zero.
pub fn tidal_time_term(bundle: &CurvatureBundle, obs: &Observer) -> f64 {
    let u = obs.u();
    bundle.metric.dot(u, &bundle.riemann.apply(u, u, u))
}

/// Uniform spherical dust cloud in Newtonian gravity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewtonOracle {
    pub rho: f64,
    pub g_newton: f64,
    pub radius: f64,
}

/// Divergence of the Newtonian acceleration and its split into radial and
/// transverse stretching rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewtonRates {
    pub divergence: f64,
    pub radial: f64,
    pub transverse: [f64; 2],
}

impl NewtonOracle {
    pub fn new(rho: f64, g_newton: f64, radius: f64) -> Result<Self> {
        if !(rho >= 0.0 && rho.is_finite()) || !(g_newton > 0.0 && g_newton.is_finite()) || !(radius > 0.0 && radius.is_finite()) {
            return Err(GravError::InvalidSpec(format!(
                "Newton oracle needs ρ ≥ 0, G_N > 0, radius > 0 (got {rho}, {g_newton}, {radius})"
            )));
        }
        Ok(Self { rho, g_newton, radius })
    }

    /// Oracle whose G_N·ρ reproduces a model density computed with G = 1.
    pub fn matched(model_rho: f64, g_newton: f64, radius: f64) -> Result<Self> {
        Self::new(model_rho / g_newton, g_newton, radius)
    }

    /// Mass inside radius r.
    pub fn enclosed_mass(&self, r: f64) -> f64 {
        4.0 / 3.0 * PI * r.min(self.radius).powi(3) * self.rho
    }

    /// a(x) = −G_N M(r)/r² along the radial unit vector.
    pub fn acceleration(&self, x: [f64; 3]) -> [f64; 3] {
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        if r == 0.0 {
            return [0.0; 3];
        }
        let a_r = -self.g_newton * self.enclosed_mass(r) / (r * r);
        x.map(|c| a_r * c / r)
    }
}

fn newton_jacobian(oracle: &NewtonOracle, p: [f64; 3], h: f64) -> [[f64; 3]; 3] {
    let mut jac = [[0.0; 3]; 3];
    for j in 0..3 {
        let mut plus = p;
        let mut minus = p;
        plus[j] += h;
        minus[j] -= h;
        let (ap, am) = (oracle.acceleration(plus), oracle.acceleration(minus));
        for i in 0..3 {
            jac[i][j] = (ap[i] - am[i]) / (2.0 * h);
        }
    }
    jac
}

/// Stretching rates of the Newtonian field at distance `r` from the centre,
/// by central differences of the full 3-vector field.
pub fn newton_rates(oracle: &NewtonOracle, r: f64) -> Result<NewtonRates> {
    if !(r >= 0.0) || r >= oracle.radius {
        return Err(GravError::Domain {
            event: [0.0, r, 0.0, 0.0],
            reason: format!("evaluation radius {r} must lie inside the cloud (radius {})", oracle.radius),
        });
    }
    let (radial_dir, t1, t2) = if r > 0.0 {
        let s = 1.0 / 3f64.sqrt();
        ([s, s, s], [1.0 / 2f64.sqrt(), -1.0 / 2f64.sqrt(), 0.0], [1.0 / 6f64.sqrt(), 1.0 / 6f64.sqrt(), -2.0 / 6f64.sqrt()])
    } else {
        ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0])
    };
    let p = radial_dir.map(|c| c * r);
    let h = (1e-3 * oracle.radius).min(0.25 * (oracle.radius - r)).max(f64::EPSILON.sqrt() * oracle.radius);
    let jac = newton_jacobian(oracle, p, h);
    let rate = |n: [f64; 3]| -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += n[i] * jac[i][j] * n[j];
            }
        }
        s
    };
    Ok(NewtonRates {
        divergence: jac[0][0] + jac[1][1] + jac[2][2],
        radial: rate(radial_dir),
        transverse: [rate(t1), rate(t2)],
    })
}

/// div a at distance `r`; −4πG_Nρ inside the cloud.
pub fn newton_dust_divergence(oracle: &NewtonOracle, r: f64) -> Result<f64> {
    Ok(newton_rates(oracle, r)?.divergence)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    /// Ric(u,u) / (4π G_N H_oracle(u,u)), with H_oracle(u,u) = ρ_oracle for dust.
    pub ratio: f64,
    /// Ric(u,u) / (−div a) from the Newtonian field.
    pub newton_ratio: f64,
    pub ric_uu: f64,
    /// H(u,u) of the model (G = 1).
    pub h_uu: f64,
    pub g_newton: f64,
}

/// Compares the relativistic focusing Ric(u,u) of a dust model with the
/// Newtonian cloud of the same G_N·ρ, at the comoving observer.
pub fn calibrate_g(
    chart: &SpacetimeChart,
    matter: &StressEnergyField,
    x: &Event,
    oracle: &NewtonOracle,
    scheme: &DerivativeScheme,
) -> Result<Calibration> {
    let bundle = CurvatureBundle::compute(chart, x, scheme)?;
    let obs = static_observer(&bundle.metric)?;
    let u = obs.u();
    let ric_uu = bundle.ricci.quadratic(u);
    let h_uu = total_energy_tensor(&matter.at(x)?, &bundle.metric)?.quadratic(u);
    if h_uu.abs() <= 1e-14 {
        return Err(GravError::UndefinedCalibration(format!(
            "H(u,u) = {h_uu:e} at {:?}; no matter to calibrate against",
            x.0
        )));
    }
    let scaled = oracle.g_newton * oracle.rho;
    if (scaled - h_uu).abs() > 1e-10 * h_uu.abs() {
        return Err(GravError::InvalidSpec(format!(
            "oracle G_N·ρ = {scaled} does not match the model density {h_uu}"
        )));
    }
    let newton = newton_dust_divergence(oracle, 0.5 * oracle.radius)?;
    Ok(Calibration {
        ratio: ric_uu / (4.0 * PI * scaled),
        newton_ratio: ric_uu / -newton,
        ric_uu,
        h_uu,
        g_newton: oracle.g_newton,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{get_metric, Params, MINKOWSKI};

    #[test]
    fn minkowski_straight_line() {
        let chart = get_metric(MINKOWSKI, &Params::new()).unwrap();
        let u = Vec4::new(1.25, 0.75, 0.0, 0.0);
        let start = GeodesicState::new(Event::new(0.0, 1.0, 2.0, 3.0), u);
        let path = integrate_geodesic(&chart, &start, 2.0, &IntegratorOptions { step: 0.1, ..Default::default() }).unwrap();
        assert!(path.completed());
        let end = path.last();
        assert!((end.tau - 2.0).abs() < 1e-12);
        for k in 0..4 {
            assert!((end.event.0[k] - (start.event.0[k] + 2.0 * u[k])).abs() < 1e-12);
        }

        let e0 = Vec4::new(0.0, 0.0, 1.0, 0.0);
        let w0 = Vec4::new(0.0, 0.0, 0.5, 0.25);
        let dev = integrate_jacobi(&chart, &path, e0, w0, &DerivativeScheme::default()).unwrap();
        let last = dev.states.last().unwrap();
        assert!((last.deviation - (e0 + w0 * 2.0)).amax() < 1e-12);
    }

    #[test]
    fn newton_cloud_examples() {
        let unit = NewtonOracle::new(1.0, 1.0, 2.0).unwrap();
        for r in [0.0, 0.3, 1.0, 1.9] {
            let rates = newton_rates(&unit, r).unwrap();
            assert!((rates.divergence + 4.0 * PI).abs() < 1e-10, "{r}: {}", rates.divergence);
            for v in [rates.radial, rates.transverse[0], rates.transverse[1]] {
                assert!((v + 4.0 * PI / 3.0).abs() < 1e-10);
            }
        }
        let empty = NewtonOracle::new(0.0, 1.0, 2.0).unwrap();
        assert_eq!(newton_dust_divergence(&empty, 1.0).unwrap(), 0.0);
        assert!(matches!(newton_dust_divergence(&unit, 2.5), Err(GravError::Domain { .. })));
    }
}
