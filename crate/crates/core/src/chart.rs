//! Coordinate charts carrying a Lorentzian metric.
//!
//! A [`SpacetimeChart`] wraps a [`MetricModel`] (the component functions
//! g_{αβ}(x) in geometric units) together with the metadata the numerical
//! routines need: coordinate labels, whether the spatial coordinates are
//! Cartesian or spherical, and the coordinate boundaries where the chart
//! breaks down (horizons, the big bang, polar axes).

use std::fmt;
use std::sync::Arc;

use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};

use crate::error::{GravError, Result};
use crate::tensor::{Event, LocalMetric, Mat4};

/// ∂_k g_{αβ}, indexed `[k]`.
pub type MetricGradient = [Mat4; 4];
/// ∂_k ∂_l g_{αβ}, indexed `[k][l]`.
pub type MetricHessian = [[Mat4; 4]; 4];

/// Component functions of a metric, with optional closed-form derivatives.
pub trait MetricModel: Send + Sync {
    fn metric(&self, x: &Event) -> Mat4;

    fn gradient(&self, _x: &Event) -> Option<MetricGradient> {
        None
    }

    fn hessian(&self, _x: &Event) -> Option<MetricHessian> {
        None
    }
}

/// Layout of the three spatial coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpatialLayout {
    /// (x, y, z)
    Cartesian,
    /// (r, θ, φ)
    Spherical,
}

/// A coordinate value where the chart breaks down.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Boundary {
    pub coordinate: usize,
    pub value: f64,
    /// `true` when valid events satisfy `x[coordinate] > value`.
    pub valid_above: bool,
    pub label: String,
}

impl Boundary {
    pub fn above(coordinate: usize, value: f64, label: impl Into<String>) -> Self {
        Self {
            coordinate,
            value,
            valid_above: true,
            label: label.into(),
        }
    }

    pub fn below(coordinate: usize, value: f64, label: impl Into<String>) -> Self {
        Self {
            coordinate,
            value,
            valid_above: false,
            label: label.into(),
        }
    }

    /// Signed distance into the valid side.
    pub fn clearance(&self, x: &Event) -> f64 {
        let v = x.0[self.coordinate];
        if self.valid_above {
            v - self.value
        } else {
            self.value - v
        }
    }
}

/// Pointwise sanity report for the metric at one event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricDiagnostics {
    pub max_asymmetry: f64,
    pub negative_eigenvalues: usize,
    pub positive_eigenvalues: usize,
    pub inverse_residual: f64,
}

impl MetricDiagnostics {
    pub fn is_lorentzian(&self) -> bool {
        self.negative_eigenvalues == 1 && self.positive_eigenvalues == 3
    }
}

struct FnMetric<F>(F);

impl<F> MetricModel for FnMetric<F>
where
    F: Fn(&Event) -> Mat4 + Send + Sync,
{
    fn metric(&self, x: &Event) -> Mat4 {
        (self.0)(x)
    }
}

/// Hides the analytic derivatives of another model so finite differences are used.
struct NumericOnly(Arc<dyn MetricModel>);

impl MetricModel for NumericOnly {
    fn metric(&self, x: &Event) -> Mat4 {
        self.0.metric(x)
    }
}

/// A coordinate patch with metric component functions. Index 0 is time.
#[derive(Clone)]
pub struct SpacetimeChart {
    name: String,
    coordinates: [String; 4],
    layout: SpatialLayout,
    boundaries: Vec<Boundary>,
    asymptotically_flat: bool,
    model: Arc<dyn MetricModel>,
}

impl fmt::Debug for SpacetimeChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpacetimeChart")
            .field("name", &self.name)
            .field("coordinates", &self.coordinates)
            .field("layout", &self.layout)
            .field("boundaries", &self.boundaries)
            .finish()
    }
}

impl SpacetimeChart {
    pub fn new(
        name: impl Into<String>,
        coordinates: [&str; 4],
        layout: SpatialLayout,
        model: Arc<dyn MetricModel>,
    ) -> Self {
        let mut boundaries = Vec::new();
        if layout == SpatialLayout::Spherical {
            boundaries.push(Boundary::above(1, 0.0, "origin r = 0"));
            boundaries.push(Boundary::above(2, 0.0, "polar axis θ = 0"));
            boundaries.push(Boundary::below(2, std::f64::consts::PI, "polar axis θ = π"));
        }
        Self {
            name: name.into(),
            coordinates: coordinates.map(String::from),
            layout,
            boundaries,
            asymptotically_flat: false,
            model,
        }
    }

    /// Chart from a bare component function; all derivatives are taken numerically.
    pub fn from_fn<F>(name: impl Into<String>, coordinates: [&str; 4], layout: SpatialLayout, f: F) -> Self
    where
        F: Fn(&Event) -> Mat4 + Send + Sync + 'static,
    {
        Self::new(name, coordinates, layout, Arc::new(FnMetric(f)))
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundaries.push(boundary);
        self
    }

    pub fn with_asymptotic_flatness(mut self, flat: bool) -> Self {
        self.asymptotically_flat = flat;
        self
    }

    /// Same chart, but analytic derivatives are hidden.
    pub fn without_analytic_derivatives(&self) -> Self {
        let mut chart = self.clone();
        chart.model = Arc::new(NumericOnly(self.model.clone()));
        chart
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn coordinates(&self) -> &[String; 4] {
        &self.coordinates
    }

    pub fn layout(&self) -> SpatialLayout {
        self.layout
    }

    pub fn boundaries(&self) -> &[Boundary] {
        &self.boundaries
    }

    pub fn is_asymptotically_flat(&self) -> bool {
        self.asymptotically_flat
    }

    pub fn has_analytic_derivatives(&self, x: &Event) -> bool {
        self.model.gradient(x).is_some() && self.model.hessian(x).is_some()
    }

    pub fn components(&self, x: &Event) -> Mat4 {
        self.model.metric(x)
    }

    pub fn analytic_gradient(&self, x: &Event) -> Option<MetricGradient> {
        self.model.gradient(x)
    }

    pub fn analytic_hessian(&self, x: &Event) -> Option<MetricHessian> {
        self.model.hessian(x)
    }

    /// Metric and inverse at `x`.
    pub fn local(&self, x: &Event) -> Result<LocalMetric> {
        if x.0.iter().any(|c| !c.is_finite()) {
            return Err(GravError::domain(x, "non-finite coordinates"));
        }
        LocalMetric::new(*x, self.components(x))
    }

    /// Fails unless `x` lies at least `margin` inside every chart boundary.
    pub fn check_domain(&self, x: &Event, margin: f64) -> Result<()> {
        if x.0.iter().any(|c| !c.is_finite()) {
            return Err(GravError::domain(x, "non-finite coordinates"));
        }
        for b in &self.boundaries {
            let clearance = b.clearance(x);
            if clearance <= margin {
                return Err(GravError::domain(
                    x,
                    format!(
                        "{} (clearance {clearance:.3e} ≤ margin {margin:.3e})",
                        b.label
                    ),
                ));
            }
        }
        Ok(())
    }

    pub fn diagnostics(&self, x: &Event) -> MetricDiagnostics {
        let g = self.components(x);
        let max_asymmetry = (g - g.transpose()).abs().max();
        let sym = (g + g.transpose()) * 0.5;
        let eig = SymmetricEigen::new(sym);
        let scale = eig.eigenvalues.abs().max().max(f64::MIN_POSITIVE);
        let negative_eigenvalues = eig.eigenvalues.iter().filter(|&&l| l < -1e-14 * scale).count();
        let positive_eigenvalues = eig.eigenvalues.iter().filter(|&&l| l > 1e-14 * scale).count();
        let inverse_residual = match sym.try_inverse() {
            Some(inv) => (inv * g - Mat4::identity()).abs().max(),
            None => f64::INFINITY,
        };
        MetricDiagnostics {
            max_asymmetry,
            negative_eigenvalues,
            positive_eigenvalues,
            inverse_residual,
        }
    }
}
