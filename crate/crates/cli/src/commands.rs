//! One function per subcommand. Each fills a report or returns the first
//! validation error.

use std::f64::consts::PI;

use grav_core::catalog::{self, CatalogEntry};
use grav_core::conditions::{check_all, grid_minimum, type_one_decomposition};
use grav_core::curvature::metric_compatibility_residual;
use grav_core::geodesic::{
    calibrate_g, integrate_geodesic, integrate_jacobi, neighbor_deviation, tidal_divergence, tidal_rates, tidal_time_term,
    GeodesicState, IntegratorOptions, NewtonOracle,
};
use grav_core::quasilocal::{komar_energy, killing_check, schwarzschild_normalized_mass, KillingData, Normalization, SurfaceSpec};
use grav_core::stress::{divergence_balance, energy_report, grav_energy_tensor, total_energy_tensor, with_cosmological};
use grav_core::tensor::static_observer;
use grav_core::verification::{run_suite, SuiteConfig};
use grav_core::{
    BoostGrid, CurvatureBundle, DerivativeScheme, Event, GravError, LocalMetric, Mat4, Observer, Result, SymTensor2, Vec4,
};
use serde_json::json;

use crate::config::{CommandKind, ObserverSpec, RunConfig};
use crate::report::Report;

/// Step between the base geodesic and its neighbour in `deviate`.
const NEIGHBOR_OFFSET: f64 = 1e-4;

/// Outcome of a command: the report and whether every check passed.
pub struct Outcome {
    pub report: Report,
    pub all_passed: bool,
}

pub fn run(config: RunConfig) -> Result<Outcome> {
    let config = config.resolve()?;
    let mut ctx = Context::new(&config)?;
    let mut all_passed = true;
    match config.command {
        CommandKind::Curvature => ctx.curvature()?,
        CommandKind::Energy => ctx.energy()?,
        CommandKind::Conditions => ctx.conditions()?,
        CommandKind::Komar => ctx.komar()?,
        CommandKind::Deviate => ctx.deviate()?,
        CommandKind::Calibrate => ctx.calibrate()?,
        CommandKind::Verify => all_passed = ctx.verify()?,
        CommandKind::List => ctx.list(),
    }
    Ok(Outcome {
        report: ctx.report,
        all_passed,
    })
}

struct Context<'a> {
    config: &'a RunConfig,
    scheme: DerivativeScheme,
    entry: Option<CatalogEntry>,
    report: Report,
}

fn rows(m: &Mat4) -> [[f64; 4]; 4] {
    std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)]))
}

fn arr(v: &Vec4) -> [f64; 4] {
    [v[0], v[1], v[2], v[3]]
}

fn error_code(e: &Option<GravError>) -> Option<&'static str> {
    e.as_ref().map(GravError::code)
}

impl<'a> Context<'a> {
    fn new(config: &'a RunConfig) -> Result<Self> {
        let entry = match &config.metric {
            Some(name) if config.command.needs_metric() => Some(catalog::entry(name, &config.params)?),
            _ => None,
        };
        Ok(Self {
            config,
            scheme: config.scheme.derivative()?,
            entry,
            report: Report::new(config.clone()),
        })
    }

    fn entry(&self) -> &CatalogEntry {
        self.entry.as_ref().expect("resolve() checked the metric")
    }

    fn event(&self) -> Event {
        Event(self.config.at.expect("resolve() filled the event"))
    }

    fn grid(&self) -> BoostGrid {
        BoostGrid {
            levels: self.config.scheme.grid_levels,
            beta_max: self.config.scheme.beta_max,
            random_samples: self.config.scheme.grid_random,
            seed: self.config.seed,
        }
    }

    fn observer_at(&self, y: &Event) -> Result<Observer> {
        let e = self.entry();
        let metric = e.chart.local(y)?;
        observer_for(self.config.observer, e, &metric)
    }

    fn curvature(&mut self) -> Result<()> {
        let x = self.event();
        let e = self.entry();
        let b = CurvatureBundle::compute(&e.chart, &x, &self.scheme)?;
        let gamma: Vec<Vec<Vec<f64>>> = (0..4)
            .map(|a| (0..4).map(|i| (0..4).map(|j| b.christoffel.get(a, i, j)).collect()).collect())
            .collect();
        let riemann: Vec<Vec<Vec<Vec<f64>>>> = (0..4)
            .map(|a| {
                (0..4)
                    .map(|i| (0..4).map(|j| (0..4).map(|k| b.riemann.get(a, i, j, k)).collect()).collect())
                    .collect()
            })
            .collect();
        let t_eff = e.matter.effective_at(&e.chart, &x)?;
        let field_residual = b.einstein.minus(&t_eff.scaled(8.0 * PI))?.max_abs();
        let compat = metric_compatibility_residual(&e.chart, &x, &self.scheme)?;
        let diag = e.chart.diagnostics(&x);

        let r = &mut self.report;
        r.quantity("event", x.0);
        r.quantity("derivatives", if b.analytic { "analytic" } else { "finite-difference" });
        r.quantity("metric", rows(&b.metric.g));
        r.quantity("christoffel", gamma);
        r.quantity("riemann", riemann);
        r.quantity("ricci", rows(&b.ricci.components));
        r.quantity("scalar", b.scalar);
        r.quantity("einstein", rows(&b.einstein.components));
        r.residual("ricci_asymmetry", b.ricci_asymmetry);
        r.residual("christoffel_asymmetry", b.christoffel.max_asymmetry());
        r.residual("metric_compatibility", compat);
        r.residual("inverse", diag.inverse_residual);
        r.residual("field_equations", field_residual);
        Ok(())
    }

    fn energy(&mut self) -> Result<()> {
        let x = self.event();
        let e = self.entry();
        let metric = e.chart.local(&x)?;
        let obs = self.observer_at(&x)?;
        let u = *obs.u();
        let t = e.matter.at(&x)?;
        let lambda = e.lambda();
        let rep = energy_report(&t, &obs, &metric, lambda)?;
        let split = with_cosmological(&t, lambda, &metric)?;
        let b = CurvatureBundle::compute(&e.chart, &x, &self.scheme)?;
        let ric_uu = b.ricci.quadratic(&u);
        let source_residual = (ric_uu - 4.0 * PI * split.effective_total.quadratic(&u)).abs();
        let field = |y: &Event| e.matter.at(y);
        let observers = |y: &Event| self.observer_at(y);
        let balance = divergence_balance(&e.chart, &field, &x, &observers, &self.scheme)?;

        let r = &mut self.report;
        r.quantity("event", x.0);
        r.quantity("observer", arr(&u));
        r.quantity("rho", rep.rho);
        r.quantity("pressures", rep.pressures);
        r.quantity("trace", rep.trace);
        r.quantity("grav_energy", rep.grav_energy);
        r.quantity("total_energy", rep.total_energy);
        r.quantity("lambda", lambda);
        r.quantity(
            "cosmological",
            json!({
                "grav_energy": split.gravitational.quadratic(&u),
                "total_energy": split.total.quadratic(&u),
                "effective_rho": split.effective.quadratic(&u),
                "effective_grav_energy": split.effective_gravitational.quadratic(&u),
                "effective_total_energy": split.effective_total.quadratic(&u),
            }),
        );
        r.quantity("ricci_uu", ric_uu);
        r.quantity("stress_energy", rows(&t.components));
        r.quantity("grav_energy_tensor", rows(&grav_energy_tensor(&t, &metric)?.components));
        r.quantity("total_energy_tensor", rows(&total_energy_tensor(&t, &metric)?.components));
        r.quantity("divergence", balance);
        r.residual("identities", rep.identity_residual);
        r.residual("source_form", source_residual);
        r.residual("divergence_one_form", balance.one_form_residual);
        r.residual("divergence_observer", balance.observer_residual);
        Ok(())
    }

    fn conditions(&mut self) -> Result<()> {
        let x = self.event();
        let e = self.entry();
        let b = CurvatureBundle::compute(&e.chart, &x, &self.scheme)?;
        let obs = observer_for(self.config.observer, e, &b.metric)?;
        let t = e.matter.effective_at(&e.chart, &x)?;
        let grid = self.grid();
        let verdicts = check_all(&t, &b.metric, &obs, &grid)?;
        let ric_min = grid_minimum(&b.ricci, &obs, &grid);
        let u = *obs.u();

        let r = &mut self.report;
        r.quantity("event", x.0);
        r.quantity("observer", arr(&u));
        r.quantity("rho", t.quadratic(&u));
        r.quantity("trace", b.metric.contract(&t)?);
        r.quantity("grid_observers", grid.observers(&obs).len());
        r.quantity("ricci_grid_minimum", ric_min);
        for v in verdicts {
            r.verdict(v);
        }
        Ok(())
    }

    fn komar(&mut self) -> Result<()> {
        let e = self.entry();
        let x = self.event();
        let radius = self.config.radius.expect("resolve() filled the radius");
        let norm = self.config.normalize.expect("resolve() filled the normalization");
        let [n_theta, n_phi] = self.config.scheme.quad_nodes;
        let surface = SurfaceSpec {
            time: x.0[0],
            ..SurfaceSpec::sphere(radius).with_nodes(n_theta, n_phi)
        };
        let k = KillingData::time_translation();
        let res = komar_energy(&e.chart, &surface, &k, norm, &self.scheme)?;
        let layout = e.chart.layout();
        let probes: Vec<Event> = [(0.7, 0.0), (1.6, 2.0), (2.4, 4.5)]
            .iter()
            .map(|&(th, ph)| surface.embed(layout, th, ph).0)
            .collect();
        let killing = killing_check(&e.chart, &k, &probes, &self.scheme)?;
        let expected = match (norm, e.komar_mass()) {
            (Normalization::Infinity, Some(m)) => Some(m),
            (Normalization::Radius(r0), Some(m)) if e.name == catalog::SCHWARZSCHILD => {
                Some(schwarzschild_normalized_mass(m, r0)?)
            }
            _ => None,
        };

        let r = &mut self.report;
        r.quantity("komar_energy", res.energy);
        r.quantity("raw_signed", res.raw_signed);
        r.quantity("scale", res.scale);
        r.quantity("area", res.area);
        r.quantity("min_norm", res.min_norm);
        r.quantity("radius", radius);
        r.quantity("expected", expected);
        r.residual("expected", expected.map(|m| (res.energy - m).abs()));
        r.residual("killing", killing.killing_residual);
        r.residual("orthogonality", killing.orthogonality_residual);
        r.residual("exterior", killing.exterior_residual);
        Ok(())
    }

    fn deviate(&mut self) -> Result<()> {
        let e = self.entry();
        let x = self.event();
        let tau = self.config.tau.expect("resolve() filled tau");
        let b = CurvatureBundle::compute(&e.chart, &x, &self.scheme)?;
        let obs = observer_for(self.config.observer, e, &b.metric)?;
        let div = tidal_divergence(&e.chart, &x, &obs, &self.scheme)?;
        let ric_uu = b.ricci.quadratic(obs.u());
        let rates = tidal_rates(&b, &obs);
        let time_term = tidal_time_term(&b, &obs);

        let opts = IntegratorOptions {
            step: self.config.scheme.step,
            scheme: self.scheme,
            ..IntegratorOptions::default()
        };
        let base = integrate_geodesic(&e.chart, &GeodesicState::new(x, *obs.u()), tau, &opts)?;
        let e0 = *obs.leg(0);
        let w0 = Vec4::zeros();
        let jac = integrate_jacobi(&e.chart, &base, e0, w0, &self.scheme)?;
        let fd = neighbor_deviation(&e.chart, &base, e0, w0, NEIGHBOR_OFFSET, &self.scheme)?;
        let scale = jac.states.iter().map(|s| s.deviation.amax()).fold(0.0, f64::max);
        let mismatch = jac.states.iter().zip(&fd).map(|(s, n)| (s.deviation - n).amax()).fold(0.0, f64::max);
        let end = jac.states.last().expect("paths start with the initial state");
        let end_metric = e.chart.local(&end.base.event)?;

        let r = &mut self.report;
        r.quantity("event", x.0);
        r.quantity("observer", arr(obs.u()));
        r.quantity("tidal_divergence", div);
        r.quantity("ricci_uu", ric_uu);
        r.quantity("tidal_rates", rates);
        r.quantity("tau", end.base.tau);
        r.quantity("steps", base.states.len() - 1);
        r.quantity("final_event", end.base.event.0);
        r.quantity("deviation", arr(&end.deviation));
        r.quantity("deviation_length", end_metric.norm2(&end.deviation).max(0.0).sqrt());
        r.quantity("neighbor_deviation", fd.last().map(arr));
        r.quantity("exit", error_code(&base.exit));
        r.residual("tidal_trace", (div + ric_uu).abs());
        r.residual("tidal_time_term", time_term.abs());
        r.residual("norm_drift", base.max_drift);
        r.residual("jacobi_vs_neighbor", if scale > 0.0 { mismatch / scale } else { mismatch });
        Ok(())
    }

    fn calibrate(&mut self) -> Result<()> {
        let e = self.entry();
        let x = self.event();
        let g_newton = self.config.g_newton.expect("resolve() filled G_N");
        let metric = e.chart.local(&x)?;
        let u = *static_observer(&metric)?.u();
        let h_uu = total_energy_tensor(&e.matter.at(&x)?, &metric)?.quadratic(&u);
        let oracle = NewtonOracle::matched(h_uu.max(0.0), g_newton, 1.0)?;
        let cal = calibrate_g(&e.chart, &e.matter, &x, &oracle, &self.scheme)?;

        let r = &mut self.report;
        r.quantity("event", x.0);
        r.quantity("ratio", cal.ratio);
        r.quantity("newton_ratio", cal.newton_ratio);
        r.quantity("ricci_uu", cal.ric_uu);
        r.quantity("total_energy", cal.h_uu);
        r.quantity("g_newton", cal.g_newton);
        r.residual("ratio", (cal.ratio - 1.0).abs());
        r.residual("newton_ratio", (cal.newton_ratio - 1.0).abs());
        Ok(())
    }

    fn verify(&mut self) -> Result<bool> {
        let suite = SuiteConfig {
            seed: self.config.seed,
            scheme: self.scheme,
            grid: BoostGrid {
                levels: self.config.scheme.grid_levels,
                beta_max: self.config.scheme.beta_max,
                ..BoostGrid::default()
            },
        };
        let outcomes = run_suite(&self.config.suite, &suite);
        if outcomes.is_empty() {
            return Err(GravError::InvalidSpec(format!("no acceptance criteria match {:?}", self.config.suite)));
        }
        let passed = outcomes.iter().filter(|o| o.passed).count();
        let r = &mut self.report;
        r.quantity("criteria", outcomes.len());
        r.quantity("passed", passed);
        r.quantity("failed", outcomes.len() - passed);
        for o in &outcomes {
            r.verdict(o);
        }
        Ok(passed == outcomes.len())
    }

    fn list(&mut self) {
        self.report.quantity("metrics", catalog::list());
    }
}

fn observer_for(spec: ObserverSpec, entry: &CatalogEntry, metric: &LocalMetric) -> Result<Observer> {
    let rest = static_observer(metric)?;
    match spec {
        ObserverSpec::Static => Ok(rest),
        ObserverSpec::Comoving => {
            let t: SymTensor2 = entry.matter.effective_at(&entry.chart, &metric.event)?;
            type_one_decomposition(&t, metric, &rest)
                .map(|(obs, _)| obs)
                .ok_or_else(|| GravError::InvalidSpec("matter has no timelike rest frame here".into()))
        }
        ObserverSpec::Boosted { rapidity, direction } => rest.boosted(metric, rapidity, direction),
    }
}
