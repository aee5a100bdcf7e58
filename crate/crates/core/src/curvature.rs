//! Levi-Civita connection and curvature of a chart at an event.
//!
//! Sign conventions: R(u,v) = [∇_u, ∇_v] − ∇_{[u,v]}, with components
//! R(∂_c, ∂_d) ∂_b = R^a_{bcd} ∂_a, and Ric(u,v) = ω^a(R(e_a, u) v), so that
//! Ric_{bc} = R^a_{cab}. With these, Ric(u,u) is minus the divergence of the
//! tidal acceleration field seen by an observer with velocity u.

use serde::{Deserialize, Serialize};

use crate::chart::{MetricGradient, MetricHessian, SpacetimeChart};
use crate::error::{GravError, Result};
use crate::fd::{partial, second_partial, DerivativeScheme};
use crate::tensor::{Event, LocalMetric, Mat4, SymTensor2, TangentVector, Vec4};

/// Metric with its first and second partial derivatives at an event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricJet {
    pub metric: LocalMetric,
    pub gradient: MetricGradient,
    pub hessian: MetricHessian,
    pub analytic: bool,
}

fn metric_field(chart: &SpacetimeChart) -> impl Fn(&Event) -> Result<Mat4> + '_ {
    move |y: &Event| Ok(chart.components(y))
}

/// ∂_k g_{αβ} at `x`, closed form when available and allowed.
pub fn metric_gradient(chart: &SpacetimeChart, x: &Event, scheme: &DerivativeScheme) -> Result<MetricGradient> {
    scheme.validate()?;
    chart.check_domain(x, scheme.margin())?;
    if scheme.use_analytic {
        if let Some(d) = chart.analytic_gradient(x) {
            return Ok(d);
        }
    }
    let f = metric_field(chart);
    let mut out = [Mat4::zeros(); 4];
    for (k, slot) in out.iter_mut().enumerate() {
        *slot = partial(&f, x, k, scheme)?;
    }
    Ok(out)
}

/// Metric, gradient and Hessian at `x`.
pub fn metric_jet(chart: &SpacetimeChart, x: &Event, scheme: &DerivativeScheme) -> Result<MetricJet> {
    scheme.validate()?;
    chart.check_domain(x, scheme.margin())?;
    let metric = chart.local(x)?;
    let gradient = metric_gradient(chart, x, scheme)?;

    let analytic_hessian = if scheme.use_analytic { chart.analytic_hessian(x) } else { None };
    let analytic = analytic_hessian.is_some() && scheme.use_analytic && chart.analytic_gradient(x).is_some();
    let hessian = match analytic_hessian {
        Some(h) => h,
        None => {
            let mut h = [[Mat4::zeros(); 4]; 4];
            let grad_available = scheme.use_analytic && chart.analytic_gradient(x).is_some();
            for k in 0..4 {
                for l in k..4 {
                    let v = if grad_available {
                        // Differentiate the closed-form gradient once.
                        let g = |y: &Event| -> Result<Mat4> { Ok(chart.analytic_gradient(y).expect("gradient")[l]) };
                        partial(&g, x, k, scheme)?
                    } else {
                        second_partial(&metric_field(chart), x, k, l, scheme)?
                    };
                    h[k][l] = v;
                    h[l][k] = v;
                }
            }
            h
        }
    };
    Ok(MetricJet {
        metric,
        gradient,
        hessian,
        analytic,
    })
}

/// Γ^a_{bc}, stored `[a][b][c]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Christoffel(pub [[[f64; 4]; 4]; 4]);

impl Christoffel {
    pub fn zero() -> Self {
        Christoffel([[[0.0; 4]; 4]; 4])
    }

    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.0[a][b][c]
    }

    /// Γ^a_{bc} u^b v^c.
    pub fn contract(&self, u: &Vec4, v: &Vec4) -> Vec4 {
        let mut out = Vec4::zeros();
        for a in 0..4 {
            let mut s = 0.0;
            for b in 0..4 {
                for c in 0..4 {
                    s += self.0[a][b][c] * u[b] * v[c];
                }
            }
            out[a] = s;
        }
        out
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut m: f64 = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    m = m.max((self.0[a][b][c] - self.0[a][c][b]).abs());
                }
            }
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().flatten().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// R^a_{bcd}, stored `[a][b][c][d]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Riemann(pub [[[[f64; 4]; 4]; 4]; 4]);

impl Riemann {
    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.0[a][b][c][d]
    }

    /// Components of R(u,v)w. Summed over c < d with the bivector u^c v^d − u^d v^c,
    /// so swapping u and v flips the sign exactly.
    pub fn apply(&self, u: &Vec4, v: &Vec4, w: &Vec4) -> Vec4 {
        let mut out = Vec4::zeros();
        for a in 0..4 {
            let mut s = 0.0;
            for b in 0..4 {
                if w[b] == 0.0 {
                    continue;
                }
                for c in 0..4 {
                    for d in (c + 1)..4 {
                        s += self.0[a][b][c][d] * w[b] * (u[c] * v[d] - u[d] * v[c]);
                    }
                }
            }
            out[a] = s;
        }
        out
    }

    /// Ric_{bc} = R^a_{cab}, before symmetrization.
    pub fn ricci_components(&self) -> Mat4 {
        let mut ric = Mat4::zeros();
        for b in 0..4 {
            for c in 0..4 {
                ric[(b, c)] = (0..4).map(|a| self.0[a][c][a][b]).sum();
            }
        }
        ric
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().flatten().flatten().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

fn christoffel_from(metric: &LocalMetric, dg: &MetricGradient) -> Christoffel {
    // Lowered symbol Γ_{dbc} = ½(∂_b g_dc + ∂_c g_db − ∂_d g_bc)
    let mut lowered = [[[0.0; 4]; 4]; 4];
    for d in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                lowered[d][b][c] = 0.5 * (dg[b][(d, c)] + dg[c][(d, b)] - dg[d][(b, c)]);
            }
        }
    }
    let mut out = [[[0.0; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for c in b..4 {
                let v: f64 = (0..4).map(|d| metric.inverse[(a, d)] * lowered[d][b][c]).sum();
                out[a][b][c] = v;
                out[a][c][b] = v;
            }
        }
    }
    Christoffel(out)
}

/// ∂_e Γ^a_{bc}, stored `[e][a][b][c]`.
fn christoffel_gradient(jet: &MetricJet) -> [[[[f64; 4]; 4]; 4]; 4] {
    let ginv = &jet.metric.inverse;
    let dg = &jet.gradient;
    let ddg = &jet.hessian;
    let mut out = [[[[0.0; 4]; 4]; 4]; 4];
    for e in 0..4 {
        let dginv = -(ginv * dg[e] * ginv);
        for a in 0..4 {
            for b in 0..4 {
                for c in b..4 {
                    let mut s = 0.0;
                    for d in 0..4 {
                        let lowered = dg[b][(d, c)] + dg[c][(d, b)] - dg[d][(b, c)];
                        let dlowered = ddg[e][b][(d, c)] + ddg[e][c][(d, b)] - ddg[e][d][(b, c)];
                        s += dginv[(a, d)] * lowered + ginv[(a, d)] * dlowered;
                    }
                    out[e][a][b][c] = 0.5 * s;
                    out[e][a][c][b] = 0.5 * s;
                }
            }
        }
    }
    out
}

fn riemann_from(gamma: &Christoffel, dgamma: &[[[[f64; 4]; 4]; 4]; 4]) -> Riemann {
    let g = &gamma.0;
    let mut out = [[[[0.0; 4]; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in (c + 1)..4 {
                    let mut v = dgamma[c][a][d][b] - dgamma[d][a][c][b];
                    for e in 0..4 {
                        v += g[a][c][e] * g[e][d][b] - g[a][d][e] * g[e][c][b];
                    }
                    out[a][b][c][d] = v;
                    out[a][b][d][c] = -v;
                }
            }
        }
    }
    Riemann(out)
}

/// Γ^a_{bc} at `x`.
pub fn christoffel(chart: &SpacetimeChart, x: &Event, scheme: &DerivativeScheme) -> Result<Christoffel> {
    let metric = chart.local(x)?;
    let dg = metric_gradient(chart, x, scheme)?;
    Ok(christoffel_from(&metric, &dg))
}

/// Connection and curvature at one event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureBundle {
    pub event: Event,
    pub metric: LocalMetric,
    pub christoffel: Christoffel,
    pub riemann: Riemann,
    /// Symmetric part of the Ricci contraction.
    pub ricci: SymTensor2,
    /// Largest |Ric_{bc} − Ric_{cb}| before symmetrization.
    pub ricci_asymmetry: f64,
    pub scalar: f64,
    pub einstein: SymTensor2,
    pub analytic: bool,
}

impl CurvatureBundle {
    pub fn compute(chart: &SpacetimeChart, x: &Event, scheme: &DerivativeScheme) -> Result<Self> {
        let jet = metric_jet(chart, x, scheme)?;
        Ok(Self::from_jet(&jet))
    }

    pub fn from_jet(jet: &MetricJet) -> Self {
        let metric = jet.metric;
        let christoffel = christoffel_from(&metric, &jet.gradient);
        let riemann = riemann_from(&christoffel, &christoffel_gradient(jet));
        let raw = riemann.ricci_components();
        let ricci_asymmetry = (raw - raw.transpose()).abs().max();
        let ricci = SymTensor2::symmetrized(metric.event, raw);
        let scalar = metric.contract_components(&ricci.components);
        let einstein = SymTensor2 {
            event: metric.event,
            components: ricci.components - metric.g * (0.5 * scalar),
        };
        Self {
            event: metric.event,
            metric,
            christoffel,
            riemann,
            ricci,
            ricci_asymmetry,
            scalar,
            einstein,
            analytic: jet.analytic,
        }
    }

    /// R(u,v)w.
    pub fn riemann_apply(&self, u: &TangentVector, v: &TangentVector, w: &TangentVector) -> Result<TangentVector> {
        for t in [u, v, w] {
            if t.event != self.event {
                return Err(GravError::EventMismatch {
                    left: self.event.0,
                    right: t.event.0,
                });
            }
        }
        Ok(TangentVector::new(
            self.event,
            self.riemann.apply(&u.components, &v.components, &w.components),
        ))
    }
}

/// R(u,v)w from a precomputed bundle.
pub fn riemann_apply(
    bundle: &CurvatureBundle,
    u: &TangentVector,
    v: &TangentVector,
    w: &TangentVector,
) -> Result<TangentVector> {
    bundle.riemann_apply(u, v, w)
}

pub fn ricci(chart: &SpacetimeChart, x: &Event, scheme: &DerivativeScheme) -> Result<SymTensor2> {
    Ok(CurvatureBundle::compute(chart, x, scheme)?.ricci)
}

pub fn scalar_curvature(bundle: &CurvatureBundle) -> f64 {
    bundle.scalar
}

pub fn einstein_tensor(bundle: &CurvatureBundle) -> SymTensor2 {
    bundle.einstein
}

/// Trace reversal Â = A − ½ c(A) g.
pub fn hat(a: &SymTensor2, metric: &LocalMetric) -> Result<SymTensor2> {
    let c = metric.contract(a)?;
    Ok(SymTensor2 {
        event: a.event,
        components: a.components - metric.g * (0.5 * c),
    })
}

/// (div A)_β = g^{αγ} ∇_α A_{γβ} for a symmetric tensor field.
pub fn cov_divergence(
    chart: &SpacetimeChart,
    field: &dyn Fn(&Event) -> Result<SymTensor2>,
    x: &Event,
    scheme: &DerivativeScheme,
) -> Result<Vec4> {
    scheme.validate()?;
    chart.check_domain(x, scheme.margin())?;
    let metric = chart.local(x)?;
    let gamma = christoffel(chart, x, scheme)?;
    let a = field(x)?.components;
    let comps = |y: &Event| -> Result<Mat4> { Ok(field(y)?.components) };
    let mut da = [Mat4::zeros(); 4];
    for (k, slot) in da.iter_mut().enumerate() {
        *slot = partial(&comps, x, k, scheme)?;
    }
    let ginv = &metric.inverse;
    let g = &gamma.0;
    let mut out = Vec4::zeros();
    for beta in 0..4 {
        let mut s = 0.0;
        for alpha in 0..4 {
            for gam in 0..4 {
                let w = ginv[(alpha, gam)];
                if w == 0.0 {
                    continue;
                }
                let mut nabla = da[alpha][(gam, beta)];
                for l in 0..4 {
                    nabla -= g[l][alpha][gam] * a[(l, beta)] + g[l][alpha][beta] * a[(gam, l)];
                }
                s += w * nabla;
            }
        }
        out[beta] = s;
    }
    Ok(out)
}

/// max |∇_c g_{ab}|: zero for the Levi-Civita connection.
pub fn metric_compatibility_residual(chart: &SpacetimeChart, x: &Event, scheme: &DerivativeScheme) -> Result<f64> {
    let metric = chart.local(x)?;
    let dg = metric_gradient(chart, x, scheme)?;
    let gamma = christoffel_from(&metric, &dg);
    let g = &metric.g;
    let mut worst: f64 = 0.0;
    for c in 0..4 {
        for a in 0..4 {
            for b in 0..4 {
                let mut v = dg[c][(a, b)];
                for d in 0..4 {
                    v -= gamma.0[d][c][a] * g[(d, b)] + gamma.0[d][c][b] * g[(a, d)];
                }
                worst = worst.max(v.abs());
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::SpatialLayout;

    fn flat() -> SpacetimeChart {
        SpacetimeChart::from_fn("flat", ["t", "x", "y", "z"], SpatialLayout::Cartesian, |_| {
            Mat4::from_diagonal(&Vec4::new(-1.0, 1.0, 1.0, 1.0))
        })
    }

    #[test]
    fn flat_space_has_no_curvature() {
        let b = CurvatureBundle::compute(&flat(), &Event::new(0.3, 1.0, -2.0, 0.5), &DerivativeScheme::default()).unwrap();
        assert_eq!(b.christoffel.max_abs(), 0.0);
        assert_eq!(b.riemann.max_abs(), 0.0);
        assert_eq!(b.scalar, 0.0);
    }

    #[test]
    fn hat_of_metric() {
        let chart = flat();
        let m = chart.local(&Event::new(0.0, 0.0, 0.0, 0.0)).unwrap();
        let h = hat(&m.metric_tensor(), &m).unwrap();
        assert_eq!(h.components, -m.g);
    }

    #[test]
    fn static_three_sphere_curvature() {
        // ds² = −dt² + dχ² + sin²χ dΩ²: unit 3-sphere slices, spatial Ricci = 2γ, R = 6.
        let chart = SpacetimeChart::from_fn("static-sphere", ["t", "chi", "theta", "phi"], SpatialLayout::Spherical, |x| {
            let s = x.0[1].sin();
            let st = x.0[2].sin();
            Mat4::from_diagonal(&Vec4::new(-1.0, 1.0, s * s, s * s * st * st))
        });
        let b = CurvatureBundle::compute(&chart, &Event::new(0.0, 1.1, 0.9, 0.2), &DerivativeScheme::default()).unwrap();
        assert!((b.scalar - 6.0).abs() < 1e-6, "R = {}", b.scalar);
        assert!(b.ricci.components[(0, 0)].abs() < 1e-6);
        assert!((b.ricci.components[(1, 1)] - 2.0).abs() < 1e-6);
    }

    #[test]
    fn stencil_must_fit_inside_domain() {
        let chart = flat().with_boundary(crate::chart::Boundary::above(0, 0.0, "t = 0"));
        let err = CurvatureBundle::compute(&chart, &Event::new(0.005, 0.0, 0.0, 0.0), &DerivativeScheme::default());
        assert!(matches!(err, Err(GravError::Domain { .. })));
    }
}
