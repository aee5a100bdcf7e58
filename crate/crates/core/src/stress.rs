//! Matter models and the gravitational energy tensors built from them.
//!
//! For a covariant energy-stress tensor T the gravitational energy tensor is
//! T_g = T − c(T) g and the total source is H = T + T_g = 2T − c(T) g, so that
//! the field equation reads Ric = 4π H (G = 1). An observer with velocity u
//! sees T_g(u,u) = T(u,u) + c(T) = p_1 + p_2 + p_3, the sum of the principal
//! pressures, which equals the energy density of the light in a mirrored box
//! balancing those pressures (see [`laser_box`]).

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::chart::SpacetimeChart;
use crate::conditions::ConditionVerdict;
use crate::curvature::{cov_divergence, CurvatureBundle};
use crate::error::{GravError, Result};
use crate::fd::{gradient, DerivativeScheme};
use crate::tensor::{principal_pressures, static_observer, Event, LocalMetric, Mat4, Observer, SymTensor2, Vec4};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatterKind {
    Vacuum,
    Dust,
    PerfectFluid,
    Electromagnetic,
    FromEinstein,
    Custom,
}

type Evaluator = Arc<dyn Fn(&Event) -> Result<Mat4> + Send + Sync>;

/// Covariant energy-stress tensor field, optionally with a cosmological constant slot.
#[derive(Clone)]
pub struct StressEnergyField {
    kind: MatterKind,
    params: BTreeMap<String, f64>,
    lambda: f64,
    evaluator: Evaluator,
}

impl fmt::Debug for StressEnergyField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StressEnergyField")
            .field("kind", &self.kind)
            .field("params", &self.params)
            .field("lambda", &self.lambda)
            .finish()
    }
}

impl StressEnergyField {
    pub fn custom<F>(kind: MatterKind, f: F) -> Self
    where
        F: Fn(&Event) -> Result<Mat4> + Send + Sync + 'static,
    {
        Self {
            kind,
            params: BTreeMap::new(),
            lambda: 0.0,
            evaluator: Arc::new(f),
        }
    }

    pub fn vacuum() -> Self {
        Self::custom(MatterKind::Vacuum, |_| Ok(Mat4::zeros()))
    }

    /// Perfect fluid at rest in the chart: T = (ρ + p) u♭⊗u♭ + p g with u ∝ ∂_t.
    pub fn comoving_fluid<R, P>(chart: SpacetimeChart, density: R, pressure: P) -> Self
    where
        R: Fn(&Event) -> f64 + Send + Sync + 'static,
        P: Fn(&Event) -> f64 + Send + Sync + 'static,
    {
        Self::custom(MatterKind::PerfectFluid, move |x| {
            let metric = chart.local(x)?;
            let gtt = metric.g[(0, 0)];
            if !(gtt < 0.0) {
                return Err(GravError::domain(x, "∂_t not timelike; no comoving fluid"));
            }
            let u = Vec4::new(1.0 / (-gtt).sqrt(), 0.0, 0.0, 0.0);
            let u_low = metric.lower(&u);
            let (rho, p) = (density(x), pressure(x));
            Ok(u_low * u_low.transpose() * (rho + p) + metric.g * p)
        })
    }

    /// Fluid with constant density and isotropic pressure in the chart's rest frame.
    pub fn perfect_fluid(chart: SpacetimeChart, rho: f64, p: f64) -> Self {
        Self::comoving_fluid(chart, move |_| rho, move |_| p).with_params([("rho", rho), ("p", p)])
    }

    pub fn dust(chart: SpacetimeChart, rho: f64) -> Self {
        Self::perfect_fluid(chart, rho, 0.0).with_kind(MatterKind::Dust)
    }

    /// Electromagnetic plane wave travelling along +x in Minkowski Cartesian
    /// coordinates: T = ε(t − x) k♭⊗k♭ with k = ∂_t + ∂_x and
    /// ε(s) = `amplitude`·cos²(`wavenumber`·s). Trace-free and divergence-free.
    pub fn electromagnetic_wave(amplitude: f64, wavenumber: f64) -> Self {
        Self::custom(MatterKind::Electromagnetic, move |x| {
            let phase = wavenumber * (x.0[0] - x.0[1]);
            let eps = amplitude * phase.cos().powi(2);
            let k = Vec4::new(-1.0, 1.0, 0.0, 0.0);
            Ok(k * k.transpose() * eps)
        })
        .with_params([("amplitude", amplitude), ("wavenumber", wavenumber)])
    }

    /// T = E/(8π) evaluated from the curvature of `chart`.
    pub fn from_einstein(chart: SpacetimeChart, scheme: DerivativeScheme) -> Self {
        Self::custom(MatterKind::FromEinstein, move |x| {
            Ok(stress_from_einstein(&CurvatureBundle::compute(&chart, x, &scheme)?).components)
        })
    }

    pub fn with_kind(mut self, kind: MatterKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self.params.insert("Lambda".into(), lambda);
        self
    }

    pub fn with_params<const N: usize>(mut self, params: [(&str, f64); N]) -> Self {
        for (k, v) in params {
            self.params.insert(k.into(), v);
        }
        self
    }

    pub fn kind(&self) -> MatterKind {
        self.kind
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    /// T at `x` (without the cosmological term).
    pub fn at(&self, x: &Event) -> Result<SymTensor2> {
        SymTensor2::new(*x, (self.evaluator)(x)?)
    }

    /// T_Λ = T − (Λ/8π) g at `x`.
    pub fn effective_at(&self, chart: &SpacetimeChart, x: &Event) -> Result<SymTensor2> {
        let t = self.at(x)?;
        if self.lambda == 0.0 {
            return Ok(t);
        }
        let metric = chart.local(x)?;
        Ok(SymTensor2 {
            event: *x,
            components: t.components - metric.g * (self.lambda / (8.0 * PI)),
        })
    }
}

/// T_g = T − c(T) g.
pub fn grav_energy_tensor(t: &SymTensor2, metric: &LocalMetric) -> Result<SymTensor2> {
    let c = metric.contract(t)?;
    Ok(SymTensor2 {
        event: t.event,
        components: t.components - metric.g * c,
    })
}

/// H = 2T − c(T) g.
pub fn total_energy_tensor(t: &SymTensor2, metric: &LocalMetric) -> Result<SymTensor2> {
    let c = metric.contract(t)?;
    Ok(SymTensor2 {
        event: t.event,
        components: t.components * 2.0 - metric.g * c,
    })
}

/// T_g from geometry alone: (1/8π)(Ric + ½ R g).
pub fn grav_energy_geometric(bundle: &CurvatureBundle) -> SymTensor2 {
    SymTensor2 {
        event: bundle.event,
        components: (bundle.ricci.components + bundle.metric.g * (0.5 * bundle.scalar)) * (1.0 / (8.0 * PI)),
    }
}

/// T = E/(8π).
pub fn stress_from_einstein(bundle: &CurvatureBundle) -> SymTensor2 {
    bundle.einstein.scaled(1.0 / (8.0 * PI))
}

/// Energy tensors in the presence of a cosmological constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CosmologicalSplit {
    /// T_Λ = T − (Λ/8π) g
    pub effective: SymTensor2,
    /// T − c(T) g − (Λ/2π) g
    pub gravitational: SymTensor2,
    /// 2T − c(T) g − (Λ/2π) g
    pub total: SymTensor2,
    /// T_Λ − c(T_Λ) g
    pub effective_gravitational: SymTensor2,
    /// 2T_Λ − c(T_Λ) g; equals Ric/4π when Ric − ½Rg + Λg = 8πT holds.
    pub effective_total: SymTensor2,
}

pub fn with_cosmological(t: &SymTensor2, lambda: f64, metric: &LocalMetric) -> Result<CosmologicalSplit> {
    let c = metric.contract(t)?;
    let g = metric.g;
    let shift = g * (lambda / (2.0 * PI));
    let effective = SymTensor2 {
        event: t.event,
        components: t.components - g * (lambda / (8.0 * PI)),
    };
    Ok(CosmologicalSplit {
        effective,
        gravitational: SymTensor2 {
            event: t.event,
            components: t.components - g * c - shift,
        },
        total: SymTensor2 {
            event: t.event,
            components: t.components * 2.0 - g * c - shift,
        },
        effective_gravitational: grav_energy_tensor(&effective, metric)?,
        effective_total: total_energy_tensor(&effective, metric)?,
    })
}

/// Energy density and principal pressures seen by one observer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObserverDecomposition {
    pub rho: f64,
    /// Sorted descending.
    pub pressures: [f64; 3],
    /// c(T)
    pub trace: f64,
    /// Observer frame rotated onto the principal axes.
    pub principal_frame: Observer,
}

pub fn observer_decompose(t: &SymTensor2, obs: &Observer, metric: &LocalMetric) -> Result<ObserverDecomposition> {
    let rho = t.apply(obs.u(), obs.u());
    let pp = principal_pressures(t, obs)?;
    Ok(ObserverDecomposition {
        rho,
        pressures: pp.pressures,
        trace: metric.contract(t)?,
        principal_frame: pp.observer,
    })
}

/// Per-event summary of what an observer sees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub event: [f64; 4],
    pub velocity: [f64; 4],
    /// ρ = T(u,u)
    pub rho: f64,
    pub pressures: [f64; 3],
    /// c(T)
    pub trace: f64,
    /// T_g(u,u)
    pub grav_energy: f64,
    /// H(u,u)
    pub total_energy: f64,
    pub lambda: f64,
    /// max |T_g(u,u) − (ρ + c(T))|, |H(u,u) − (2ρ + c(T))|, |c(T) − (−ρ + Σp)|
    pub identity_residual: f64,
    #[serde(default)]
    pub verdicts: Vec<ConditionVerdict>,
    #[serde(default)]
    pub divergence: Option<DivergenceBalance>,
}

pub fn energy_report(t: &SymTensor2, obs: &Observer, metric: &LocalMetric, lambda: f64) -> Result<EnergyReport> {
    let d = observer_decompose(t, obs, metric)?;
    let u = obs.u();
    let tg = grav_energy_tensor(t, metric)?.quadratic(u);
    let h = total_energy_tensor(t, metric)?.quadratic(u);
    let sum_p: f64 = d.pressures.iter().sum();
    let identity_residual = [
        (tg - (d.rho + d.trace)).abs(),
        (h - (2.0 * d.rho + d.trace)).abs(),
        (d.trace - (-d.rho + sum_p)).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    Ok(EnergyReport {
        event: t.event.0,
        velocity: [u[0], u[1], u[2], u[3]],
        rho: d.rho,
        pressures: d.pressures,
        trace: d.trace,
        grav_energy: tg,
        total_energy: h,
        lambda,
        identity_residual,
        verdicts: Vec::new(),
        divergence: None,
    })
}

/// Terms of the gravitational energy flux balance at one event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivergenceBalance {
    /// div T
    pub div_t: [f64; 4],
    /// div T_g
    pub div_tg: [f64; 4],
    /// d[c(T)]
    pub d_trace: [f64; 4],
    /// max_β |(div T_g)_β + (d c(T))_β|
    pub one_form_residual: f64,
    /// (div T_g)(u)
    pub div_tg_u: f64,
    /// D_u ρ
    pub d_rho: f64,
    /// D_u (p_1 + p_2 + p_3)
    pub d_pressure_sum: f64,
    /// |(div T_g)(u) − (D_u ρ − D_u Σp)|
    pub observer_residual: f64,
}

/// Observer at rest in the chart at every event.
pub fn static_observer_field(chart: &SpacetimeChart) -> impl Fn(&Event) -> Result<Observer> + '_ {
    move |y: &Event| static_observer(&chart.local(y)?)
}

pub fn divergence_balance(
    chart: &SpacetimeChart,
    field: &dyn Fn(&Event) -> Result<SymTensor2>,
    x: &Event,
    observers: &dyn Fn(&Event) -> Result<Observer>,
    scheme: &DerivativeScheme,
) -> Result<DivergenceBalance> {
    let tg_field = |y: &Event| -> Result<SymTensor2> { grav_energy_tensor(&field(y)?, &chart.local(y)?) };
    let trace_field = |y: &Event| -> Result<f64> { chart.local(y)?.contract(&field(y)?) };
    let rho_field = |y: &Event| -> Result<f64> {
        let obs = observers(y)?;
        Ok(field(y)?.quadratic(obs.u()))
    };
    let pressure_field = |y: &Event| -> Result<f64> {
        let obs = observers(y)?;
        Ok(principal_pressures(&field(y)?, &obs)?.sum())
    };

    let div_t = cov_divergence(chart, field, x, scheme)?;
    let div_tg = cov_divergence(chart, &tg_field, x, scheme)?;
    let d_trace = gradient(&trace_field, x, scheme)?;
    let u = *observers(x)?.u();
    let d_rho = u.dot(&gradient(&rho_field, x, scheme)?);
    let d_pressure_sum = u.dot(&gradient(&pressure_field, x, scheme)?);
    let div_tg_u = div_tg.dot(&u);

    Ok(DivergenceBalance {
        div_t: div_t.into(),
        div_tg: div_tg.into(),
        d_trace: d_trace.into(),
        one_form_residual: (div_tg + d_trace).amax(),
        div_tg_u,
        d_rho,
        d_pressure_sum,
        observer_residual: (div_tg_u - (d_rho - d_pressure_sum)).abs(),
    })
}

/// A mirrored box filled with laser light along three orthogonal axes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaserBoxSpec {
    /// Photons travelling along each axis.
    pub photon_counts: [u64; 3],
    /// Spatial momentum of each photon, per axis (c = 1).
    pub photon_momenta: [f64; 3],
    /// Edge lengths δx, δy, δz.
    pub edges: [f64; 3],
}

impl LaserBoxSpec {
    pub fn volume(&self) -> f64 {
        self.edges.iter().product()
    }

    pub fn validate(&self) -> Result<()> {
        if self.edges.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return Err(GravError::InvalidSpec("box edges must be positive (V > 0)".into()));
        }
        if self.photon_momenta.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(GravError::InvalidSpec("photon momenta must be non-negative".into()));
        }
        Ok(())
    }

    /// Box of the given edges with one photon per axis carrying exactly the
    /// momentum needed to balance `pressures`.
    pub fn balancing(pressures: [f64; 3], edges: [f64; 3]) -> Result<Self> {
        if pressures.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(GravError::InvalidSpec(
                "laser light can only balance non-negative pressures".into(),
            ));
        }
        let v: f64 = edges.iter().product();
        let spec = Self {
            photon_counts: [1; 3],
            photon_momenta: pressures.map(|p| p * v),
            edges,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Momentum delivered to the two walls perpendicular to `axis` during `dt`:
    /// each photon reflects c·dt/δ times, transferring 2P per reflection.
    pub fn momentum_transfer(&self, axis: usize, dt: f64) -> f64 {
        2.0 * self.photon_momenta[axis] * self.photon_counts[axis] as f64 * dt / self.edges[axis]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaserBoxResult {
    /// Radiation pressure on the walls perpendicular to each axis.
    pub pressures: [f64; 3],
    /// Photon energy per unit volume for each axis' beams.
    pub energy_densities: [f64; 3],
    pub total_energy_density: f64,
}

pub fn laser_box(spec: &LaserBoxSpec) -> Result<LaserBoxResult> {
    spec.validate()?;
    let v = spec.volume();
    let mut pressures = [0.0; 3];
    let mut energy_densities = [0.0; 3];
    for a in 0..3 {
        let (b, c) = ((a + 1) % 3, (a + 2) % 3);
        let force = spec.momentum_transfer(a, 1.0);
        let wall_area = 2.0 * spec.edges[b] * spec.edges[c];
        pressures[a] = force / wall_area;
        energy_densities[a] = spec.photon_counts[a] as f64 * spec.photon_momenta[a] / v;
    }
    Ok(LaserBoxResult {
        pressures,
        energy_densities,
        total_energy_density: energy_densities.iter().sum(),
    })
}
