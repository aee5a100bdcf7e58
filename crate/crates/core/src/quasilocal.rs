//! Komar-type energy of a static Killing field on coordinate spheres.
//!
//! With ω = k♭ and f = ln|g(k,k)|, a static Killing field satisfies
//! dω = −ω∧df, and the surface integral reduces to
//! −(1/8π)∮ e^{f/2} D_n f dA over a sphere with outward unit normal n.
//! That raw quadrature comes out as −M for Schwarzschild with the outward
//! normal; [`KomarResult::energy`] flips the sign so positive mass reads
//! positive, and keeps the raw value alongside.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::chart::{SpacetimeChart, SpatialLayout};
use crate::curvature::{christoffel, metric_gradient};
use crate::error::{GravError, Result};
use crate::fd::{partial, DerivativeScheme};
use crate::tensor::{Event, Mat4, Vec4};

/// |g(k,k)| below this counts as touching a Killing horizon.
pub const HORIZON_TOLERANCE: f64 = 1e-9;

const NEWTON_ITERATIONS: usize = 100;

/// Gauss–Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi's initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..NEWTON_ITERATIONS {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (x * p1 - p0) / (x * x - 1.0))
}

/// Integral over the unit sphere of f(θ, φ) dΩ: Gauss–Legendre in cos θ, uniform in φ.
pub fn sphere_quadrature(n_theta: usize, n_phi: usize, f: &dyn Fn(f64, f64) -> f64) -> f64 {
    let (mu, w) = gauss_legendre(n_theta);
    let dphi = 2.0 * PI / n_phi as f64;
    let mut total = 0.0;
    for (m, wi) in mu.iter().zip(&w) {
        let theta = m.acos();
        let mut ring = 0.0;
        for j in 0..n_phi {
            ring += f(theta, dphi * (j as f64 + 0.5));
        }
        total += wi * ring * dphi;
    }
    total
}

/// Coordinate sphere of radius `radius` on the slice t = `time`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSpec {
    pub radius: f64,
    pub time: f64,
    pub n_theta: usize,
    pub n_phi: usize,
}

impl SurfaceSpec {
    pub fn sphere(radius: f64) -> Self {
        Self {
            radius,
            time: 0.0,
            n_theta: 32,
            n_phi: 64,
        }
    }

    pub fn with_nodes(mut self, n_theta: usize, n_phi: usize) -> Self {
        self.n_theta = n_theta;
        self.n_phi = n_phi;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0 && self.radius.is_finite()) || self.n_theta == 0 || self.n_phi == 0 {
            return Err(GravError::InvalidSpec(format!(
                "sphere needs radius > 0 and at least one node per angle (radius {}, nodes {}×{})",
                self.radius, self.n_theta, self.n_phi
            )));
        }
        Ok(())
    }

    /// Event at angles (θ, φ) and the tangent vectors ∂_θ, ∂_φ of the embedding.
    pub fn embed(&self, layout: SpatialLayout, theta: f64, phi: f64) -> (Event, Vec4, Vec4) {
        let r = self.radius;
        match layout {
            SpatialLayout::Spherical => (
                Event::new(self.time, r, theta, phi),
                Vec4::new(0.0, 0.0, 1.0, 0.0),
                Vec4::new(0.0, 0.0, 0.0, 1.0),
            ),
            SpatialLayout::Cartesian => {
                let (st, ct, sp, cp) = (theta.sin(), theta.cos(), phi.sin(), phi.cos());
                (
                    Event::new(self.time, r * st * cp, r * st * sp, r * ct),
                    Vec4::new(0.0, r * ct * cp, r * ct * sp, -r * st),
                    Vec4::new(0.0, -r * st * sp, r * st * cp, 0.0),
                )
            }
        }
    }

    /// Coordinate gradient of the radial function whose level set is the sphere.
    fn radial_gradient(&self, layout: SpatialLayout, x: &Event) -> Vec4 {
        match layout {
            SpatialLayout::Spherical => Vec4::new(0.0, 1.0, 0.0, 0.0),
            SpatialLayout::Cartesian => {
                let r = (x.0[1].powi(2) + x.0[2].powi(2) + x.0[3].powi(2)).sqrt();
                Vec4::new(0.0, x.0[1] / r, x.0[2] / r, x.0[3] / r)
            }
        }
    }

    /// Representative point used for normalizing at this radius.
    pub fn anchor(&self, layout: SpatialLayout) -> Event {
        self.embed(layout, PI / 2.0, 0.0).0
    }
}

type VectorField = Arc<dyn Fn(&Event) -> Vec4 + Send + Sync>;

/// A candidate Killing vector field k (contravariant components).
#[derive(Clone)]
pub struct KillingData {
    field: VectorField,
    constant: Option<Vec4>,
    /// Declared static: hypersurface-orthogonal as well as Killing.
    pub static_declared: bool,
}

impl fmt::Debug for KillingData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KillingData")
            .field("constant", &self.constant)
            .field("static_declared", &self.static_declared)
            .finish()
    }
}

impl KillingData {
    /// k = ∂_t.
    pub fn time_translation() -> Self {
        Self::constant(Vec4::new(1.0, 0.0, 0.0, 0.0), true)
    }

    /// Field with the same coordinate components everywhere.
    pub fn constant(k: Vec4, static_declared: bool) -> Self {
        Self {
            field: Arc::new(move |_| k),
            constant: Some(k),
            static_declared,
        }
    }

    pub fn from_fn<F>(f: F, static_declared: bool) -> Self
    where
        F: Fn(&Event) -> Vec4 + Send + Sync + 'static,
    {
        Self {
            field: Arc::new(f),
            constant: None,
            static_declared,
        }
    }

    /// λk.
    pub fn scaled(&self, lambda: f64) -> Self {
        let inner = self.field.clone();
        Self {
            field: Arc::new(move |x| inner(x) * lambda),
            constant: self.constant.map(|k| k * lambda),
            static_declared: self.static_declared,
        }
    }

    pub fn at(&self, x: &Event) -> Vec4 {
        (self.field)(x)
    }

    /// g(k,k) from the raw components (usable on a horizon where g is singular elsewhere).
    pub fn norm2(&self, chart: &SpacetimeChart, x: &Event) -> f64 {
        let k = self.at(x);
        (k.transpose() * chart.components(x) * k)[(0, 0)]
    }

    /// ω_a = g_ab k^b.
    pub fn one_form(&self, chart: &SpacetimeChart, x: &Event) -> Vec4 {
        chart.components(x) * self.at(x)
    }

    /// ∂_a ω_b as a matrix indexed (a, b).
    fn one_form_jacobian(&self, chart: &SpacetimeChart, x: &Event, scheme: &DerivativeScheme) -> Result<Mat4> {
        let mut jac = Mat4::zeros();
        match self.constant {
            Some(k) => {
                let dg = metric_gradient(chart, x, scheme)?;
                for a in 0..4 {
                    let row = dg[a] * k;
                    for b in 0..4 {
                        jac[(a, b)] = row[b];
                    }
                }
            }
            None => {
                let omega = |y: &Event| -> Result<Vec4> { Ok(self.one_form(chart, y)) };
                for a in 0..4 {
                    let d = partial(&omega, x, a, scheme)?;
                    for b in 0..4 {
                        jac[(a, b)] = d[b];
                    }
                }
            }
        }
        Ok(jac)
    }

    /// ∂_a f with f = ln|g(k,k)|.
    pub fn log_norm_gradient(&self, chart: &SpacetimeChart, x: &Event, scheme: &DerivativeScheme) -> Result<Vec4> {
        let n2 = self.norm2(chart, x);
        match self.constant {
            Some(k) => {
                let dg = metric_gradient(chart, x, scheme)?;
                Ok(Vec4::from_fn(|a, _| (k.transpose() * dg[a] * k)[(0, 0)] / n2))
            }
            None => {
                let f = |y: &Event| -> Result<f64> { Ok(self.norm2(chart, y).abs().ln()) };
                crate::fd::gradient(&f, x, scheme)
            }
        }
    }
}

/// How k is scaled before integrating.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum Normalization {
    /// Unit length at spatial infinity (asymptotically flat charts only).
    Infinity,
    /// Unit length at the given radius.
    Radius(f64),
    /// Explicit factor λ applied to k.
    Scale(f64),
}

impl Normalization {
    /// Factor applied to k.
    pub fn factor(&self, chart: &SpacetimeChart, k: &KillingData, surface: &SurfaceSpec) -> Result<f64> {
        match *self {
            Normalization::Infinity => {
                if !chart.is_asymptotically_flat() {
                    return Err(GravError::InvalidSpec(format!(
                        "chart '{}' is not asymptotically flat; normalize at a radius instead",
                        chart.name()
                    )));
                }
                Ok(1.0)
            }
            Normalization::Radius(r0) => {
                let at = SurfaceSpec { radius: r0, ..*surface };
                let x = at.anchor(chart.layout());
                let n2 = k.norm2(chart, &x);
                if !(n2.abs() > HORIZON_TOLERANCE) {
                    return Err(GravError::HorizonProximity { event: x.0, norm: n2 });
                }
                Ok(1.0 / n2.abs().sqrt())
            }
            Normalization::Scale(l) => {
                if !(l > 0.0 && l.is_finite()) {
                    return Err(GravError::InvalidSpec(format!("normalization factor must be positive, got {l}")));
                }
                Ok(l)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KomarResult {
    /// Energy with the orientation fixed so that Schwarzschild gives +M.
    pub energy: f64,
    /// −(1/8π)∮ e^{f/2} D_n f dA with the outward normal, as computed.
    pub raw_signed: f64,
    /// Factor applied to k.
    pub scale: f64,
    /// Quadrature estimate of the sphere's area.
    pub area: f64,
    /// Smallest |g(k,k)| over the nodes.
    pub min_norm: f64,
}

/// Komar energy of k on a coordinate sphere.
pub fn komar_energy(
    chart: &SpacetimeChart,
    surface: &SurfaceSpec,
    k: &KillingData,
    normalization: Normalization,
    scheme: &DerivativeScheme,
) -> Result<KomarResult> {
    surface.validate()?;
    let scale = normalization.factor(chart, k, surface)?;
    let kk = k.scaled(scale);
    let layout = chart.layout();

    let (mu, w) = gauss_legendre(surface.n_theta);
    let dphi = 2.0 * PI / surface.n_phi as f64;
    let mut integral = 0.0;
    let mut area = 0.0;
    let mut min_norm = f64::INFINITY;
    for (m, wi) in mu.iter().zip(&w) {
        let theta = m.acos();
        let sin_theta = (1.0 - m * m).sqrt();
        for j in 0..surface.n_phi {
            let phi = dphi * (j as f64 + 0.5);
            let (x, e_theta, e_phi) = surface.embed(layout, theta, phi);
            let n2 = kk.norm2(chart, &x);
            min_norm = min_norm.min(n2.abs());
            if !(n2.abs() > HORIZON_TOLERANCE) {
                return Err(GravError::HorizonProximity { event: x.0, norm: n2 });
            }
            let metric = chart.local(&x)?;
            let h = [
                [metric.dot(&e_theta, &e_theta), metric.dot(&e_theta, &e_phi)],
                [metric.dot(&e_phi, &e_theta), metric.dot(&e_phi, &e_phi)],
            ];
            let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
            // dA = √det h dθ dφ and dθ = −d(cos θ)/sin θ.
            let da = det.max(0.0).sqrt() / sin_theta * wi * dphi;

            // Outward unit normal within the slice orthogonal to the static observer.
            let kv = kk.at(&x);
            let u = kv / n2.abs().sqrt();
            let mut nvec = metric.raise(&surface.radial_gradient(layout, &x));
            nvec += u * metric.dot(&nvec, &u);
            let nn = metric.norm2(&nvec);
            if !(nn > 0.0) {
                return Err(GravError::GeometryDegenerate {
                    event: x.0,
                    reason: "sphere normal is not spacelike".into(),
                });
            }
            nvec /= nn.sqrt();

            let df = kk.log_norm_gradient(chart, &x, scheme)?;
            integral += n2.abs().sqrt() * nvec.dot(&df) * da;
            area += da;
        }
    }
    let raw_signed = -integral / (8.0 * PI);
    Ok(KomarResult {
        energy: -raw_signed,
        raw_signed,
        scale,
        area,
        min_norm,
    })
}

/// E(r_outer) − E(r_inner); zero when the annulus between the spheres is vacuum.
pub fn annulus_difference(
    chart: &SpacetimeChart,
    inner: &SurfaceSpec,
    outer: &SurfaceSpec,
    k: &KillingData,
    normalization: Normalization,
    scheme: &DerivativeScheme,
) -> Result<f64> {
    let a = komar_energy(chart, inner, k, normalization, scheme)?;
    let b = komar_energy(chart, outer, k, normalization, scheme)?;
    Ok(b.energy - a.energy)
}

/// M/√(1 − 2M/r_0): the Schwarzschild energy with k normalized at r_0.
pub fn schwarzschild_normalized_mass(m: f64, r0: f64) -> Result<f64> {
    if !(r0 > 2.0 * m) {
        return Err(GravError::Domain {
            event: [0.0, r0, 0.0, 0.0],
            reason: format!("normalization radius {r0} must exceed 2M = {}", 2.0 * m),
        });
    }
    Ok(m / (1.0 - 2.0 * m / r0).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KillingReport {
    /// max |∇_a ω_b + ∇_b ω_a|
    pub killing_residual: f64,
    /// max |ω∧dω|
    pub orthogonality_residual: f64,
    /// max |dω + ω∧df|
    pub exterior_residual: f64,
    pub checked: usize,
    /// Events skipped because g(k,k) vanishes there.
    pub excluded: Vec<[f64; 4]>,
}

impl KillingReport {
    pub fn is_killing(&self, tol: f64) -> bool {
        self.killing_residual < tol
    }

    pub fn is_static(&self, tol: f64) -> bool {
        self.is_killing(tol) && self.orthogonality_residual < tol && self.exterior_residual < tol
    }
}

/// Killing equation, hypersurface orthogonality and dω = −ω∧df at each event.
pub fn killing_check(chart: &SpacetimeChart, k: &KillingData, events: &[Event], scheme: &DerivativeScheme) -> Result<KillingReport> {
    let mut report = KillingReport {
        killing_residual: 0.0,
        orthogonality_residual: 0.0,
        exterior_residual: 0.0,
        checked: 0,
        excluded: Vec::new(),
    };
    for x in events {
        let n2 = k.norm2(chart, x);
        if !(n2.abs() > HORIZON_TOLERANCE) {
            report.excluded.push(x.0);
            continue;
        }
        let omega = k.one_form(chart, x);
        let jac = k.one_form_jacobian(chart, x, scheme)?;
        let gamma = christoffel(chart, x, scheme)?;
        let mut nabla = jac;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    nabla[(a, b)] -= gamma.0[c][a][b] * omega[c];
                }
            }
        }
        report.killing_residual = report.killing_residual.max((nabla + nabla.transpose()).amax());

        let d_omega = jac - jac.transpose();
        let mut wedge: f64 = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    let v = omega[a] * d_omega[(b, c)] + omega[b] * d_omega[(c, a)] + omega[c] * d_omega[(a, b)];
                    wedge = wedge.max(v.abs());
                }
            }
        }
        report.orthogonality_residual = report.orthogonality_residual.max(wedge);

        let df = k.log_norm_gradient(chart, x, scheme)?;
        let omega_df = omega * df.transpose() - df * omega.transpose();
        report.exterior_residual = report.exterior_residual.max((d_omega + omega_df).amax());
        report.checked += 1;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_matches_tabulated_nodes() {
        let (x, w) = gauss_legendre(3);
        let r = (3.0f64 / 5.0).sqrt();
        assert!((x[0] + r).abs() < 1e-15 && x[1].abs() < 1e-15 && (x[2] - r).abs() < 1e-15);
        assert!((w[0] - 5.0 / 9.0).abs() < 1e-15 && (w[1] - 8.0 / 9.0).abs() < 1e-15);
        let (_, w32) = gauss_legendre(32);
        assert!((w32.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn sphere_quadrature_integrates_harmonics() {
        let area = sphere_quadrature(32, 64, &|_, _| 1.0);
        assert!((area - 4.0 * PI).abs() < 1e-12);
        // ∫ cos²θ dΩ = 4π/3, ∫ sin²θ cos²φ dΩ = 4π/3
        let c2 = sphere_quadrature(32, 64, &|t, _| t.cos().powi(2));
        let x2 = sphere_quadrature(32, 64, &|t, p| (t.sin() * p.cos()).powi(2));
        assert!((c2 - 4.0 * PI / 3.0).abs() < 1e-12);
        assert!((x2 - 4.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn normalized_mass_examples() {
        assert!((schwarzschild_normalized_mass(1.0, 4.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(schwarzschild_normalized_mass(1.0, f64::INFINITY).unwrap(), 1.0);
        assert_eq!(schwarzschild_normalized_mass(0.0, 3.0).unwrap(), 0.0);
        assert!(matches!(schwarzschild_normalized_mass(1.0, 2.0), Err(GravError::Domain { .. })));
    }
}
