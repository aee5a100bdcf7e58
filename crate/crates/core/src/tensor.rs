//! Events, tangent vectors, symmetric rank-2 tensors and observer frames.
//!
//! Everything here works pointwise: a [`LocalMetric`] is the metric and its
//! inverse frozen at one event, and every vector or tensor carries the event it
//! is attached to so that mixing objects from different tangent spaces is
//! caught instead of silently producing numbers.

use nalgebra::{DMatrix, DVector, Matrix3, Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::chart::SpacetimeChart;
use crate::eigen::jacobi_eigen_sym3;
use crate::error::{GravError, Result};

pub type Vec4 = Vector4<f64>;
pub type Mat4 = Matrix4<f64>;

/// Tolerance on the orthonormality relations of an [`Observer`].
pub const FRAME_TOLERANCE: f64 = 1e-10;
/// Tolerance on g(u,u) = −1 for vectors entering frame construction.
pub const UNIT_TOLERANCE: f64 = 1e-8;
/// Allowed asymmetry of a [`SymTensor2`].
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Coordinates of a spacetime event; index 0 is the time coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event(pub [f64; 4]);

impl Event {
    pub fn new(t: f64, x1: f64, x2: f64, x3: f64) -> Self {
        Event([t, x1, x2, x3])
    }

    /// Copy with coordinate `k` shifted by `delta`.
    pub fn shifted(&self, k: usize, delta: f64) -> Self {
        let mut c = self.0;
        c[k] += delta;
        Event(c)
    }

    pub fn offset(&self, v: &Vec4, scale: f64) -> Self {
        Event([
            self.0[0] + scale * v[0],
            self.0[1] + scale * v[1],
            self.0[2] + scale * v[2],
            self.0[3] + scale * v[3],
        ])
    }
}

fn same_event(a: &Event, b: &Event) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(GravError::EventMismatch {
            left: a.0,
            right: b.0,
        })
    }
}

/// Contravariant vector in the tangent space at `event`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentVector {
    pub event: Event,
    pub components: Vec4,
}

impl TangentVector {
    pub fn new(event: Event, components: Vec4) -> Self {
        Self { event, components }
    }

    pub fn from_array(event: Event, c: [f64; 4]) -> Self {
        Self::new(event, Vec4::from(c))
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::new(self.event, self.components * s)
    }
}

/// Causal character of a tangent vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Causality {
    Timelike,
    Null,
    Spacelike,
}

/// Covariant symmetric rank-2 tensor at an event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymTensor2 {
    pub event: Event,
    pub components: Mat4,
}

impl SymTensor2 {
    /// Rejects matrices whose asymmetry exceeds [`SYMMETRY_TOLERANCE`] (relative to their size).
    pub fn new(event: Event, components: Mat4) -> Result<Self> {
        let asymmetry = (components - components.transpose()).abs().max();
        let scale = components.abs().max().max(1.0);
        if asymmetry > SYMMETRY_TOLERANCE * scale {
            return Err(GravError::NotSymmetric { asymmetry });
        }
        Ok(Self::symmetrized(event, components))
    }

    /// Symmetric part of `components`.
    pub fn symmetrized(event: Event, components: Mat4) -> Self {
        Self {
            event,
            components: (components + components.transpose()) * 0.5,
        }
    }

    pub fn zero(event: Event) -> Self {
        Self {
            event,
            components: Mat4::zeros(),
        }
    }

    /// A(u, v).
    pub fn apply(&self, u: &Vec4, v: &Vec4) -> f64 {
        u.dot(&(self.components * v))
    }

    pub fn eval(&self, u: &TangentVector, v: &TangentVector) -> Result<f64> {
        same_event(&self.event, &u.event)?;
        same_event(&self.event, &v.event)?;
        Ok(self.apply(&u.components, &v.components))
    }

    pub fn quadratic(&self, u: &Vec4) -> f64 {
        self.apply(u, u)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            event: self.event,
            components: self.components * s,
        }
    }

    pub fn plus(&self, other: &SymTensor2) -> Result<Self> {
        same_event(&self.event, &other.event)?;
        Ok(Self {
            event: self.event,
            components: self.components + other.components,
        })
    }

    pub fn minus(&self, other: &SymTensor2) -> Result<Self> {
        same_event(&self.event, &other.event)?;
        Ok(Self {
            event: self.event,
            components: self.components - other.components,
        })
    }

    /// Largest absolute component.
    pub fn max_abs(&self) -> f64 {
        self.components.abs().max()
    }
}

/// The metric and its inverse at one event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalMetric {
    pub event: Event,
    pub g: Mat4,
    pub inverse: Mat4,
}

impl LocalMetric {
    pub fn new(event: Event, g: Mat4) -> Result<Self> {
        let degenerate = |reason: String| GravError::GeometryDegenerate {
            event: event.0,
            reason,
        };
        if g.iter().any(|c| !c.is_finite()) {
            return Err(degenerate("non-finite metric components".into()));
        }
        let g = (g + g.transpose()) * 0.5;
        let inverse = g
            .try_inverse()
            .ok_or_else(|| degenerate("singular metric matrix".into()))?;
        let residual = (inverse * g - Mat4::identity()).abs().max();
        if !residual.is_finite() || residual > 1e-8 {
            return Err(degenerate(format!(
                "ill-conditioned metric (inverse residual {residual:e})"
            )));
        }
        let inverse = (inverse + inverse.transpose()) * 0.5;
        Ok(Self { event, g, inverse })
    }

    pub fn at(chart: &SpacetimeChart, event: &Event) -> Result<Self> {
        chart.local(event)
    }

    pub fn dot(&self, u: &Vec4, v: &Vec4) -> f64 {
        u.dot(&(self.g * v))
    }

    pub fn norm2(&self, u: &Vec4) -> f64 {
        self.dot(u, u)
    }

    pub fn inner(&self, u: &TangentVector, v: &TangentVector) -> Result<f64> {
        same_event(&self.event, &u.event)?;
        same_event(&self.event, &v.event)?;
        Ok(self.dot(&u.components, &v.components))
    }

    pub fn lower(&self, v: &Vec4) -> Vec4 {
        self.g * v
    }

    pub fn raise(&self, w: &Vec4) -> Vec4 {
        self.inverse * w
    }

    pub fn metric_tensor(&self) -> SymTensor2 {
        SymTensor2 {
            event: self.event,
            components: self.g,
        }
    }

    /// g^{αβ} A_{αβ}.
    pub fn contract(&self, a: &SymTensor2) -> Result<f64> {
        same_event(&self.event, &a.event)?;
        Ok(self.contract_components(&a.components))
    }

    pub fn contract_components(&self, a: &Mat4) -> f64 {
        self.inverse.component_mul(a).sum()
    }

    /// Sign-of-norm classification with absolute tolerance `tol`.
    pub fn classify(&self, v: &Vec4, tol: f64) -> Causality {
        let n = self.norm2(v);
        if n < -tol {
            Causality::Timelike
        } else if n > tol {
            Causality::Spacelike
        } else {
            Causality::Null
        }
    }

    /// P_u(w) = w + g(w,u) u.
    pub fn project(&self, u: &TangentVector, w: &TangentVector) -> Result<TangentVector> {
        same_event(&u.event, &w.event)?;
        same_event(&self.event, &u.event)?;
        self.require_unit_future(&u.components, UNIT_TOLERANCE)?;
        let c = self.dot(&w.components, &u.components);
        Ok(TangentVector::new(w.event, w.components + u.components * c))
    }

    /// Checks that `u` is a future-pointing unit timelike vector.
    pub fn require_unit_future(&self, u: &Vec4, tol: f64) -> Result<()> {
        let norm = self.norm2(u);
        if (norm + 1.0).abs() > tol || u[0] <= 0.0 || !norm.is_finite() {
            return Err(GravError::NotUnitTimelike {
                norm,
                time_component: u[0],
            });
        }
        Ok(())
    }
}

/// c(A) = g^{αβ}A_{αβ}, with the metric read from `chart`.
pub fn contract(a: &SymTensor2, chart: &SpacetimeChart) -> Result<f64> {
    chart.local(&a.event)?.contract(a)
}

/// P_u(w) with the metric read from `chart`.
pub fn project(chart: &SpacetimeChart, u: &TangentVector, w: &TangentVector) -> Result<TangentVector> {
    chart.local(&u.event)?.project(u, w)
}

/// A future unit timelike velocity with an orthonormal frame for its orthogonal complement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observer {
    pub velocity: TangentVector,
    pub frame: [TangentVector; 3],
}

impl Observer {
    /// Validates the orthonormality relations to [`FRAME_TOLERANCE`].
    pub fn new(metric: &LocalMetric, velocity: TangentVector, frame: [TangentVector; 3]) -> Result<Self> {
        same_event(&metric.event, &velocity.event)?;
        for e in &frame {
            same_event(&metric.event, &e.event)?;
        }
        let obs = Self { velocity, frame };
        metric.require_unit_future(&velocity.components, FRAME_TOLERANCE)?;
        let residual = obs.orthonormality_residual(metric);
        if residual > FRAME_TOLERANCE {
            return Err(GravError::GeometryDegenerate {
                event: metric.event.0,
                reason: format!("observer frame not orthonormal (residual {residual:e})"),
            });
        }
        Ok(obs)
    }

    pub fn event(&self) -> Event {
        self.velocity.event
    }

    pub fn u(&self) -> &Vec4 {
        &self.velocity.components
    }

    pub fn leg(&self, i: usize) -> &Vec4 {
        &self.frame[i].components
    }

    /// Frame (u, e_1, e_2, e_3) as matrix columns.
    pub fn frame_matrix(&self) -> Mat4 {
        Mat4::from_columns(&[
            self.velocity.components,
            self.frame[0].components,
            self.frame[1].components,
            self.frame[2].components,
        ])
    }

    /// Largest deviation from g(u,u) = −1, g(e_i,e_j) = δ_ij, g(u,e_i) = 0.
    pub fn orthonormality_residual(&self, metric: &LocalMetric) -> f64 {
        let f = self.frame_matrix();
        let gram = f.transpose() * metric.g * f;
        let eta = Mat4::from_diagonal(&Vec4::new(-1.0, 1.0, 1.0, 1.0));
        (gram - eta).abs().max()
    }

    /// Frame components A(f_a, f_b) in the observer's orthonormal basis.
    pub fn frame_components(&self, a: &SymTensor2) -> Mat4 {
        let f = self.frame_matrix();
        f.transpose() * a.components * f
    }

    /// Observer moving with `rapidity` along the spatial direction `direction`
    /// (components on this observer's frame legs). The frame is Lorentz-boosted.
    pub fn boosted(&self, metric: &LocalMetric, rapidity: f64, direction: [f64; 3]) -> Result<Self> {
        let len = direction.iter().map(|d| d * d).sum::<f64>().sqrt();
        if !(len > 0.0) || !len.is_finite() {
            return Err(GravError::InvalidSpec("boost direction must be a nonzero finite vector".into()));
        }
        let n: Vec4 = (0..3).map(|i| self.leg(i) * (direction[i] / len)).sum();
        let (ch, sh) = (rapidity.cosh(), rapidity.sinh());
        let u = self.u();
        let velocity = TangentVector::new(self.event(), u * ch + n * sh);
        let frame = self.frame.map(|e| {
            let c = metric.dot(&e.components, &n);
            TangentVector::new(self.event(), e.components + (n * (ch - 1.0) + u * sh) * c)
        });
        Observer::new(metric, velocity, frame)
    }
}

/// Deterministic orthonormal frame for `u^⊥`: Gram–Schmidt over the
/// coordinate basis, at each step taking the candidate with the largest
/// remaining norm. Legs are returned ordered by originating coordinate index.
pub fn orthonormal_frame(metric: &LocalMetric, u: &TangentVector) -> Result<Observer> {
    same_event(&metric.event, &u.event)?;
    metric.require_unit_future(&u.components, UNIT_TOLERANCE)?;
    // Renormalize so the residuals are at roundoff level.
    let uu = u.components / (-metric.norm2(&u.components)).sqrt();

    let scale = metric.g.abs().max();
    let mut legs: Vec<(usize, Vec4)> = Vec::with_capacity(3);
    let mut used = [false; 4];
    for _ in 0..3 {
        let mut best: Option<(usize, Vec4, f64)> = None;
        for k in 0..4 {
            if used[k] {
                continue;
            }
            let mut w = Vec4::zeros();
            w[k] = 1.0;
            // Two passes of modified Gram–Schmidt.
            for _ in 0..2 {
                w += uu * metric.dot(&w, &uu);
                for (_, e) in &legs {
                    w -= e * metric.dot(&w, e);
                }
            }
            let n2 = metric.norm2(&w);
            if best.as_ref().map_or(true, |b| n2 > b.2) {
                best = Some((k, w, n2));
            }
        }
        let (k, w, n2) = best.expect("at least one candidate remains");
        if !(n2 > 1e-14 * scale) {
            return Err(GravError::GeometryDegenerate {
                event: metric.event.0,
                reason: "cannot complete a spatial frame".into(),
            });
        }
        used[k] = true;
        legs.push((k, w / n2.sqrt()));
    }
    legs.sort_by_key(|(k, _)| *k);
    let ev = metric.event;
    Observer::new(
        metric,
        TangentVector::new(ev, uu),
        [
            TangentVector::new(ev, legs[0].1),
            TangentVector::new(ev, legs[1].1),
            TangentVector::new(ev, legs[2].1),
        ],
    )
}

/// Observer at rest in the chart: u ∝ ∂_t.
pub fn static_observer(metric: &LocalMetric) -> Result<Observer> {
    let gtt = metric.g[(0, 0)];
    if !(gtt < 0.0) {
        return Err(GravError::GeometryDegenerate {
            event: metric.event.0,
            reason: format!("∂_t is not timelike (g_tt = {gtt})"),
        });
    }
    let u = Vec4::new(1.0 / (-gtt).sqrt(), 0.0, 0.0, 0.0);
    orthonormal_frame(metric, &TangentVector::new(metric.event, u))
}

/// Principal pressures of a tensor as seen by an observer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrincipalPressures {
    /// Same velocity, frame rotated onto the principal axes.
    pub observer: Observer,
    /// Sorted descending.
    pub pressures: [f64; 3],
}

impl PrincipalPressures {
    pub fn sum(&self) -> f64 {
        self.pressures.iter().sum()
    }
}

/// Diagonalizes the restriction of `t` to `u^⊥`.
pub fn principal_pressures(t: &SymTensor2, obs: &Observer) -> Result<PrincipalPressures> {
    same_event(&t.event, &obs.event())?;
    let mut spatial = Matrix3::zeros();
    for i in 0..3 {
        for j in 0..3 {
            spatial[(i, j)] = t.apply(obs.leg(i), obs.leg(j));
        }
    }
    let (values, vectors) = jacobi_eigen_sym3(&spatial);
    let ev = obs.event();
    let rotated = [0, 1, 2].map(|k| {
        let c: Vec4 = (0..3).map(|i| obs.leg(i) * vectors[(i, k)]).sum();
        TangentVector::new(ev, c)
    });
    Ok(PrincipalPressures {
        observer: Observer {
            velocity: obs.velocity,
            frame: rotated,
        },
        pressures: values,
    })
}

/// S(x,y) = (1/4)[f(x+y) − f(x−y)] for the quadratic form `f` of a symmetric bilinear S.
pub fn polarize<F>(f: F, x: &Vec4, y: &Vec4) -> f64
where
    F: Fn(&Vec4) -> f64,
{
    0.25 * (f(&(x + y)) - f(&(x - y)))
}

/// The ten-vector sample set used for reconstruction: the observer's
/// velocity, its boosts with rapidity 0.5 along each frame leg, and boosts
/// of the same rapidity along the six diagonals (e_i ± e_j)/√2.
pub fn standard_sample_set(observer: &Observer) -> Vec<TangentVector> {
    const RAPIDITY: f64 = 0.5;
    let (ch, sh) = (RAPIDITY.cosh(), RAPIDITY.sinh());
    let u = observer.u();
    let ev = observer.event();
    let mut out = vec![TangentVector::new(ev, *u)];
    for i in 0..3 {
        out.push(TangentVector::new(ev, u * ch + observer.leg(i) * sh));
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        for sign in [1.0, -1.0] {
            let n = (observer.leg(i) + observer.leg(j) * sign) * r;
            out.push(TangentVector::new(ev, u * ch + n * sh));
        }
    }
    out
}

/// Result of recovering a symmetric tensor from its quadratic form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reconstruction {
    pub tensor: SymTensor2,
    /// max_k |S(u_k,u_k) − sample_k|
    pub residual: f64,
    pub condition: f64,
}

const SYM_INDEX: [(usize, usize); 10] = [
    (0, 0),
    (0, 1),
    (0, 2),
    (0, 3),
    (1, 1),
    (1, 2),
    (1, 3),
    (2, 2),
    (2, 3),
    (3, 3),
];

/// Recovers the unique symmetric tensor whose quadratic form takes the given
/// values on a spanning set of future unit timelike vectors.
pub fn reconstruct_symmetric(metric: &LocalMetric, samples: &[(TangentVector, f64)]) -> Result<Reconstruction> {
    for (u, v) in samples {
        same_event(&metric.event, &u.event)?;
        metric.require_unit_future(&u.components, UNIT_TOLERANCE)?;
        if !v.is_finite() {
            return Err(GravError::InvalidSpec("non-finite sample value".into()));
        }
    }
    let n = samples.len();
    if n == 0 {
        return Err(GravError::Underdetermined { rank: 0, condition: f64::INFINITY });
    }
    // Work in an orthonormal frame so the design matrix is not skewed by
    // coordinate scale factors; S = F^{-T} S_F F^{-1}.
    let frame = orthonormal_frame(metric, &samples[0].0)?.frame_matrix();
    let frame_inv = frame.try_inverse().ok_or_else(|| GravError::GeometryDegenerate {
        event: metric.event.0,
        reason: "observer frame not invertible".into(),
    })?;
    let local: Vec<Vec4> = samples.iter().map(|(u, _)| frame_inv * u.components).collect();
    let design = DMatrix::from_fn(n, 10, |row, col| {
        let (a, b) = SYM_INDEX[col];
        let u = &local[row];
        let m = if a == b { 1.0 } else { 2.0 };
        m * u[a] * u[b]
    });
    let rhs = DVector::from_iterator(n, samples.iter().map(|(_, v)| *v));

    let svd = design.clone().svd(true, true);
    let sv = &svd.singular_values;
    let smax = sv.max();
    let smin = if n >= 10 { sv.min() } else { 0.0 };
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let rank = sv.iter().filter(|&&s| s > smax * 1e-8).count();
    if n < 10 || rank < 10 || !(condition < 1e8) {
        return Err(GravError::Underdetermined { rank, condition });
    }
    let x = svd
        .solve(&rhs, 0.0)
        .map_err(|e| GravError::InvalidSpec(format!("least-squares solve failed: {e}")))?;
    let mut m = Mat4::zeros();
    for (col, &(a, b)) in SYM_INDEX.iter().enumerate() {
        m[(a, b)] = x[col];
        m[(b, a)] = x[col];
    }
    let tensor = SymTensor2::symmetrized(metric.event, frame_inv.transpose() * m * frame_inv);
    let residual = samples
        .iter()
        .map(|(u, v)| (tensor.quadratic(&u.components) - v).abs())
        .fold(0.0, f64::max);
    Ok(Reconstruction {
        tensor,
        residual,
        condition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn minkowski() -> LocalMetric {
        LocalMetric::new(Event::new(0.0, 0.0, 0.0, 0.0), Mat4::from_diagonal(&Vec4::new(-1.0, 1.0, 1.0, 1.0))).unwrap()
    }

    #[test]
    fn contraction_of_rest_dust() {
        let m = minkowski();
        let mut c = Mat4::zeros();
        c[(0, 0)] = 2.0;
        let t = SymTensor2::new(m.event, c).unwrap();
        assert_eq!(m.contract(&t).unwrap(), -2.0);
        assert_eq!(m.contract(&m.metric_tensor()).unwrap(), 4.0);
        assert_eq!(m.contract(&SymTensor2::zero(m.event)).unwrap(), 0.0);
    }

    #[test]
    fn singular_metric_is_rejected() {
        let err = LocalMetric::new(Event::new(0.0, 0.0, 0.0, 0.0), Mat4::from_diagonal(&Vec4::new(-1.0, 1.0, 0.0, 1.0)));
        assert!(matches!(err, Err(GravError::GeometryDegenerate { .. })));
    }

    #[test]
    fn projection_examples() {
        let m = minkowski();
        let u = TangentVector::from_array(m.event, [1.0, 0.0, 0.0, 0.0]);
        let w = TangentVector::from_array(m.event, [3.0, 1.0, 0.0, 0.0]);
        assert_eq!(m.project(&u, &w).unwrap().components, Vec4::new(0.0, 1.0, 0.0, 0.0));
        assert_eq!(m.project(&u, &u).unwrap().components, Vec4::zeros());
        let orth = TangentVector::from_array(m.event, [0.0, 0.3, -2.0, 1.0]);
        assert_eq!(m.project(&u, &orth).unwrap(), orth);

        let elsewhere = TangentVector::from_array(Event::new(1.0, 0.0, 0.0, 0.0), [0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(m.project(&u, &elsewhere), Err(GravError::EventMismatch { .. })));
    }

    #[test]
    fn minkowski_rest_frame_is_coordinate_basis() {
        let m = minkowski();
        let obs = static_observer(&m).unwrap();
        assert_eq!(obs.frame_matrix(), Mat4::identity());
    }

    #[test]
    fn frame_rejects_non_unit_velocity() {
        let m = minkowski();
        let u = TangentVector::from_array(m.event, [2.0, 0.0, 0.0, 0.0]);
        assert!(matches!(orthonormal_frame(&m, &u), Err(GravError::NotUnitTimelike { .. })));
        let past = TangentVector::from_array(m.event, [-1.0, 0.0, 0.0, 0.0]);
        assert!(orthonormal_frame(&m, &past).is_err());
    }

    #[test]
    fn boosted_frame_stays_orthonormal() {
        let m = minkowski();
        let obs = static_observer(&m).unwrap().boosted(&m, 0.5, [1.0, 0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(obs.u()[0], 0.5f64.cosh(), epsilon = 1e-15);
        assert_abs_diff_eq!(obs.u()[1], 0.5f64.sinh(), epsilon = 1e-15);
        assert!(obs.orthonormality_residual(&m) < 1e-14);
    }

    #[test]
    fn pressures_of_isotropic_fluid() {
        let m = minkowski();
        let t = SymTensor2::new(m.event, Mat4::from_diagonal(&Vec4::new(1.0, 0.1, 0.1, 0.1))).unwrap();
        let obs = static_observer(&m).unwrap();
        let pp = principal_pressures(&t, &obs).unwrap();
        for p in pp.pressures {
            assert_abs_diff_eq!(p, 0.1, epsilon = 1e-15);
        }
    }

    #[test]
    fn polarize_metric_and_zero_form() {
        let m = minkowski();
        let u = Vec4::new(1.0, 0.0, 0.0, 0.0);
        assert_eq!(polarize(|v| m.norm2(v), &u, &u), -1.0);
        assert_eq!(polarize(|_| 0.0, &u, &Vec4::new(0.0, 1.0, 2.0, 3.0)), 0.0);
    }

    #[test]
    fn too_few_samples_is_underdetermined() {
        let m = minkowski();
        let obs = static_observer(&m).unwrap();
        let samples: Vec<_> = standard_sample_set(&obs).into_iter().take(7).map(|u| (u, 0.0)).collect();
        match reconstruct_symmetric(&m, &samples) {
            Err(GravError::Underdetermined { rank, .. }) => assert!(rank <= 7),
            other => panic!("expected underdetermined, got {other:?}"),
        }
        // Ten copies of the same vector span a single direction.
        let u = obs.velocity;
        let samples: Vec<_> = (0..10).map(|_| (u, -1.0)).collect();
        assert!(matches!(
            reconstruct_symmetric(&m, &samples),
            Err(GravError::Underdetermined { rank: 1, .. })
        ));
    }
}
