//! Registry of exact spacetimes with matched matter models.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::chart::{Boundary, MetricGradient, MetricHessian, MetricModel, SpacetimeChart, SpatialLayout};
use crate::error::{GravError, Result};
use crate::stress::StressEnergyField;
use crate::tensor::{Event, Mat4, Vec4};

pub type Params = BTreeMap<String, f64>;

pub const MINKOWSKI: &str = "minkowski";
pub const SCHWARZSCHILD: &str = "schwarzschild";
pub const FLRW_DUST: &str = "flrw-dust";
pub const DE_SITTER: &str = "de-sitter";

pub const NAMES: [&str; 4] = [MINKOWSKI, SCHWARZSCHILD, FLRW_DUST, DE_SITTER];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamInfo {
    pub name: String,
    pub default: f64,
    pub constraint: String,
}

/// Listing metadata for one catalog entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogInfo {
    pub name: String,
    pub description: String,
    pub coordinates: [String; 4],
    pub layout: SpatialLayout,
    pub parameters: Vec<ParamInfo>,
    pub boundaries: Vec<Boundary>,
}

/// A spacetime together with its matter content.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub params: Params,
    pub chart: SpacetimeChart,
    pub matter: StressEnergyField,
}

impl CatalogEntry {
    /// Cosmological constant carried by the matter model.
    pub fn lambda(&self) -> f64 {
        self.matter.lambda()
    }

    /// Komar energy enclosed by spheres in the static region, when known in closed form.
    pub fn komar_mass(&self) -> Option<f64> {
        match self.name.as_str() {
            MINKOWSKI => Some(0.0),
            SCHWARZSCHILD => Some(self.params[MASS]),
            _ => None,
        }
    }
}

const MASS: &str = "M";
const LAMBDA: &str = "Lambda";

fn schema(name: &str) -> Result<Vec<ParamInfo>> {
    let p = |n: &str, d: f64, c: &str| ParamInfo {
        name: n.into(),
        default: d,
        constraint: c.into(),
    };
    match name {
        MINKOWSKI | FLRW_DUST => Ok(vec![]),
        SCHWARZSCHILD => Ok(vec![p(MASS, 1.0, "M > 0")]),
        DE_SITTER => Ok(vec![p(LAMBDA, 1.0, "Lambda > 0")]),
        other => Err(GravError::Registry(format!(
            "unknown metric '{other}' (known: {})",
            NAMES.join(", ")
        ))),
    }
}

fn resolve(name: &str, params: &Params) -> Result<Params> {
    let schema = schema(name)?;
    for key in params.keys() {
        if !schema.iter().any(|p| &p.name == key) {
            return Err(GravError::Registry(format!("metric '{name}' has no parameter '{key}'")));
        }
    }
    let mut out = Params::new();
    for p in schema {
        let v = params.get(&p.name).copied().unwrap_or(p.default);
        if !(v.is_finite() && v > 0.0) {
            return Err(GravError::Registry(format!("{} must satisfy {} (got {v})", p.name, p.constraint)));
        }
        out.insert(p.name, v);
    }
    Ok(out)
}

struct Minkowski;

impl MetricModel for Minkowski {
    fn metric(&self, _x: &Event) -> Mat4 {
        Mat4::from_diagonal(&Vec4::new(-1.0, 1.0, 1.0, 1.0))
    }

    fn gradient(&self, _x: &Event) -> Option<MetricGradient> {
        Some([Mat4::zeros(); 4])
    }

    fn hessian(&self, _x: &Event) -> Option<MetricHessian> {
        Some([[Mat4::zeros(); 4]; 4])
    }
}

/// −F(r) dt² + dr²/F(r) + r² dΩ²
#[derive(Clone, Copy)]
enum Lapse {
    Schwarzschild { mass: f64 },
    DeSitter { lambda: f64 },
}

impl Lapse {
    /// (F, F', F'')
    fn eval(self, r: f64) -> (f64, f64, f64) {
        match self {
            Lapse::Schwarzschild { mass } => (
                1.0 - 2.0 * mass / r,
                2.0 * mass / (r * r),
                -4.0 * mass / (r * r * r),
            ),
            Lapse::DeSitter { lambda } => (1.0 - lambda * r * r / 3.0, -2.0 * lambda * r / 3.0, -2.0 * lambda / 3.0),
        }
    }
}

struct StaticSpherical(Lapse);

impl MetricModel for StaticSpherical {
    fn metric(&self, x: &Event) -> Mat4 {
        let [_, r, th, _] = x.0;
        let (f, _, _) = self.0.eval(r);
        let s = th.sin();
        Mat4::from_diagonal(&Vec4::new(-f, 1.0 / f, r * r, r * r * s * s))
    }

    fn gradient(&self, x: &Event) -> Option<MetricGradient> {
        let [_, r, th, _] = x.0;
        let (f, fp, _) = self.0.eval(r);
        let (s, c) = th.sin_cos();
        let mut d = [Mat4::zeros(); 4];
        d[1] = Mat4::from_diagonal(&Vec4::new(-fp, -fp / (f * f), 2.0 * r, 2.0 * r * s * s));
        d[2][(3, 3)] = 2.0 * r * r * s * c;
        Some(d)
    }

    fn hessian(&self, x: &Event) -> Option<MetricHessian> {
        let [_, r, th, _] = x.0;
        let (f, fp, fpp) = self.0.eval(r);
        let (s, c) = th.sin_cos();
        let mut h = [[Mat4::zeros(); 4]; 4];
        h[1][1] = Mat4::from_diagonal(&Vec4::new(
            -fpp,
            -fpp / (f * f) + 2.0 * fp * fp / (f * f * f),
            2.0,
            2.0 * s * s,
        ));
        h[1][2][(3, 3)] = 4.0 * r * s * c;
        h[2][1][(3, 3)] = 4.0 * r * s * c;
        h[2][2][(3, 3)] = 2.0 * r * r * (c * c - s * s);
        Some(h)
    }
}

/// Flat dust-filled FLRW, a(t) = t^{2/3}.
struct FlrwDust;

/// a(t) = t^{2/3}
pub fn flrw_scale_factor(t: f64) -> f64 {
    t.powf(2.0 / 3.0)
}

/// ρ(t) = 3(ȧ/a)²/(8π) = 1/(6π t²)
pub fn flrw_density(t: f64) -> f64 {
    1.0 / (6.0 * PI * t * t)
}

impl MetricModel for FlrwDust {
    fn metric(&self, x: &Event) -> Mat4 {
        let a2 = x.0[0].powf(4.0 / 3.0);
        Mat4::from_diagonal(&Vec4::new(-1.0, a2, a2, a2))
    }

    fn gradient(&self, x: &Event) -> Option<MetricGradient> {
        let t = x.0[0];
        let da2 = (4.0 / 3.0) * t.powf(1.0 / 3.0);
        let mut d = [Mat4::zeros(); 4];
        d[0] = Mat4::from_diagonal(&Vec4::new(0.0, da2, da2, da2));
        Some(d)
    }

    fn hessian(&self, x: &Event) -> Option<MetricHessian> {
        let t = x.0[0];
        let dda2 = (4.0 / 9.0) * t.powf(-2.0 / 3.0);
        let mut h = [[Mat4::zeros(); 4]; 4];
        h[0][0] = Mat4::from_diagonal(&Vec4::new(0.0, dda2, dda2, dda2));
        Some(h)
    }
}

/// Chart for a catalog metric.
pub fn get_metric(name: &str, params: &Params) -> Result<SpacetimeChart> {
    let p = resolve(name, params)?;
    Ok(match name {
        MINKOWSKI => SpacetimeChart::new(MINKOWSKI, ["t", "x", "y", "z"], SpatialLayout::Cartesian, Arc::new(Minkowski))
            .with_asymptotic_flatness(true),
        SCHWARZSCHILD => {
            let mass = p[MASS];
            SpacetimeChart::new(
                SCHWARZSCHILD,
                ["t", "r", "theta", "phi"],
                SpatialLayout::Spherical,
                Arc::new(StaticSpherical(Lapse::Schwarzschild { mass })),
            )
            .with_boundary(Boundary::above(1, 2.0 * mass, "event horizon r = 2M"))
            .with_asymptotic_flatness(true)
        }
        FLRW_DUST => SpacetimeChart::new(FLRW_DUST, ["t", "x", "y", "z"], SpatialLayout::Cartesian, Arc::new(FlrwDust))
            .with_boundary(Boundary::above(0, 0.0, "big bang t = 0")),
        DE_SITTER => {
            let lambda = p[LAMBDA];
            SpacetimeChart::new(
                DE_SITTER,
                ["t", "r", "theta", "phi"],
                SpatialLayout::Spherical,
                Arc::new(StaticSpherical(Lapse::DeSitter { lambda })),
            )
            .with_boundary(Boundary::below(1, (3.0 / lambda).sqrt(), "cosmological horizon r = sqrt(3/Lambda)"))
        }
        _ => unreachable!("resolve rejects unknown names"),
    })
}

/// Matter model matched to a catalog metric.
pub fn get_matter(name: &str, params: &Params) -> Result<StressEnergyField> {
    let p = resolve(name, params)?;
    Ok(match name {
        MINKOWSKI | SCHWARZSCHILD => StressEnergyField::vacuum(),
        FLRW_DUST => {
            let chart = get_metric(name, params)?;
            StressEnergyField::comoving_fluid(chart, |x: &Event| flrw_density(x.0[0]), |_: &Event| 0.0)
                .with_kind(crate::stress::MatterKind::Dust)
        }
        DE_SITTER => StressEnergyField::vacuum().with_lambda(p[LAMBDA]),
        _ => unreachable!("resolve rejects unknown names"),
    })
}

pub fn entry(name: &str, params: &Params) -> Result<CatalogEntry> {
    Ok(CatalogEntry {
        name: name.to_string(),
        params: resolve(name, params)?,
        chart: get_metric(name, params)?,
        matter: get_matter(name, params)?,
    })
}

/// Every catalog entry with default parameters.
pub fn all_default() -> Vec<CatalogEntry> {
    NAMES
        .iter()
        .map(|n| entry(n, &Params::new()).expect("defaults are valid"))
        .collect()
}

pub fn list() -> Vec<CatalogInfo> {
    NAMES
        .iter()
        .map(|&name| {
            let chart = get_metric(name, &Params::new()).expect("defaults are valid");
            let description = match name {
                MINKOWSKI => "flat spacetime, Cartesian coordinates",
                SCHWARZSCHILD => "vacuum exterior of a point mass M, Schwarzschild coordinates",
                FLRW_DUST => "flat dust-filled FLRW, a(t) = t^(2/3), rho(t) = 1/(6 pi t^2), comoving Cartesian coordinates",
                DE_SITTER => "vacuum with cosmological constant Lambda, static coordinates inside the horizon",
                _ => unreachable!(),
            };
            CatalogInfo {
                name: name.into(),
                description: description.into(),
                coordinates: chart.coordinates().clone(),
                layout: chart.layout(),
                parameters: schema(name).expect("known"),
                boundaries: chart.boundaries().to_vec(),
            }
        })
        .collect()
}

/// Coordinate box well inside the validity domain, used for sampling test
/// events with default parameters: per coordinate [low, high]. Angles stay
/// clear of the polar axis.
pub fn interior_box(name: &str) -> [[f64; 2]; 4] {
    let angles = [[0.3, PI - 0.3], [0.0, 2.0 * PI]];
    match name {
        SCHWARZSCHILD => [[-10.0, 10.0], [5.0, 50.0], angles[0], angles[1]],
        DE_SITTER => [[-1.0, 1.0], [0.1, 1.5], angles[0], angles[1]],
        FLRW_DUST => [[0.5, 3.0], [-5.0, 5.0], [-5.0, 5.0], [-5.0, 5.0]],
        _ => [[-5.0, 5.0]; 4],
    }
}

/// A representative interior event for each catalog entry.
pub fn sample_event(name: &str) -> Event {
    match name {
        SCHWARZSCHILD => Event::new(0.0, 10.0, PI / 2.0, 0.0),
        DE_SITTER => Event::new(0.0, 0.8, 1.1, 0.3),
        FLRW_DUST => Event::new(1.0, 0.0, 0.0, 0.0),
        _ => Event::new(0.0, 0.0, 0.0, 0.0),
    }
}
