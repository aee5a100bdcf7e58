//! Central finite-difference stencils with optional Richardson extrapolation.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{GravError, Result};
use crate::tensor::{Event, Mat4, Vec4};

/// Values that can be combined linearly by a stencil.
pub trait Linear: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {}

impl<T> Linear for T where T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T> {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StencilOrder {
    Second,
    Fourth,
}

impl StencilOrder {
    pub fn accuracy(self) -> i32 {
        match self {
            StencilOrder::Second => 2,
            StencilOrder::Fourth => 4,
        }
    }

    /// Furthest stencil node, in units of the step.
    pub fn reach(self) -> f64 {
        match self {
            StencilOrder::Second => 1.0,
            StencilOrder::Fourth => 2.0,
        }
    }
}

/// How partial derivatives of the metric (and of derived fields) are taken.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivativeScheme {
    /// Coordinate step h.
    pub step: f64,
    pub order: StencilOrder,
    pub richardson: bool,
    /// Use closed-form metric derivatives when the chart provides them.
    pub use_analytic: bool,
}

impl Default for DerivativeScheme {
    fn default() -> Self {
        Self {
            step: 1e-3,
            order: StencilOrder::Fourth,
            richardson: false,
            use_analytic: true,
        }
    }
}

impl DerivativeScheme {
    pub fn numeric(step: f64, order: StencilOrder) -> Self {
        Self {
            step,
            order,
            richardson: false,
            use_analytic: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0) || !self.step.is_finite() {
            return Err(GravError::InvalidSpec(format!(
                "finite-difference step must be positive, got {}",
                self.step
            )));
        }
        Ok(())
    }

    /// Required clearance from chart boundaries: ten steps.
    pub fn margin(&self) -> f64 {
        10.0 * self.step
    }

    fn richardson_factor(&self) -> f64 {
        2f64.powi(self.order.accuracy())
    }
}

fn d1_raw<T: Linear>(f: &dyn Fn(f64) -> Result<T>, h: f64, order: StencilOrder) -> Result<T> {
    Ok(match order {
        StencilOrder::Second => (f(h)? - f(-h)?) * (0.5 / h),
        StencilOrder::Fourth => {
            let near = f(h)? - f(-h)?;
            let far = f(2.0 * h)? - f(-2.0 * h)?;
            (near * 8.0 - far) * (1.0 / (12.0 * h))
        }
    })
}

fn d2_raw<T: Linear>(f: &dyn Fn(f64) -> Result<T>, h: f64, order: StencilOrder) -> Result<T> {
    let centre = f(0.0)?;
    Ok(match order {
        StencilOrder::Second => (f(h)? + f(-h)? - centre * 2.0) * (1.0 / (h * h)),
        StencilOrder::Fourth => {
            let near = f(h)? + f(-h)?;
            let far = f(2.0 * h)? + f(-2.0 * h)?;
            (near * 16.0 - far - centre * 30.0) * (1.0 / (12.0 * h * h))
        }
    })
}

/// d/ds f(s) at s = 0.
pub fn derivative<T: Linear>(f: &dyn Fn(f64) -> Result<T>, scheme: &DerivativeScheme) -> Result<T> {
    let h = scheme.step;
    let coarse = d1_raw(f, h, scheme.order)?;
    if !scheme.richardson {
        return Ok(coarse);
    }
    let fine = d1_raw(f, 0.5 * h, scheme.order)?;
    let k = scheme.richardson_factor();
    Ok((fine * k - coarse) * (1.0 / (k - 1.0)))
}

/// d²/ds² f(s) at s = 0.
pub fn second_derivative<T: Linear>(f: &dyn Fn(f64) -> Result<T>, scheme: &DerivativeScheme) -> Result<T> {
    let h = scheme.step;
    let coarse = d2_raw(f, h, scheme.order)?;
    if !scheme.richardson {
        return Ok(coarse);
    }
    let fine = d2_raw(f, 0.5 * h, scheme.order)?;
    let k = scheme.richardson_factor();
    Ok((fine * k - coarse) * (1.0 / (k - 1.0)))
}

/// ∂_k F at `x`.
pub fn partial<T: Linear>(
    field: &dyn Fn(&Event) -> Result<T>,
    x: &Event,
    k: usize,
    scheme: &DerivativeScheme,
) -> Result<T> {
    derivative(&|s| field(&x.shifted(k, s)), scheme)
}

/// ∂_k ∂_l F at `x`; the diagonal uses the three/five-point second-derivative stencil.
pub fn second_partial<T: Linear>(
    field: &dyn Fn(&Event) -> Result<T>,
    x: &Event,
    k: usize,
    l: usize,
    scheme: &DerivativeScheme,
) -> Result<T> {
    if k == l {
        second_derivative(&|s| field(&x.shifted(k, s)), scheme)
    } else {
        derivative(&|s| partial(field, &x.shifted(k, s), l, scheme), scheme)
    }
}

/// Covariant components ∂_μ f of a scalar field.
pub fn gradient(field: &dyn Fn(&Event) -> Result<f64>, x: &Event, scheme: &DerivativeScheme) -> Result<Vec4> {
    let mut out = Vec4::zeros();
    for k in 0..4 {
        out[k] = partial(field, x, k, scheme)?;
    }
    Ok(out)
}

/// (dω)_{μν} = ∂_μ ω_ν − ∂_ν ω_μ for a 1-form field given by covariant components.
pub fn exterior_derivative(
    field: &dyn Fn(&Event) -> Result<Vec4>,
    x: &Event,
    scheme: &DerivativeScheme,
) -> Result<Mat4> {
    let mut jac = Mat4::zeros();
    for mu in 0..4 {
        let d = partial(field, x, mu, scheme)?;
        for nu in 0..4 {
            jac[(mu, nu)] = d[nu];
        }
    }
    Ok(jac - jac.transpose())
}
