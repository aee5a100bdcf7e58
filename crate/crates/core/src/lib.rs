//! Curvature, energy-stress and gravitational energy tools for 4-dimensional
//! Lorentzian spacetimes in geometric units (G = c = 1, signature −+++).

pub mod catalog;
pub mod chart;
pub mod conditions;
pub mod curvature;
pub mod eigen;
pub mod error;
pub mod fd;
pub mod geodesic;
pub mod quasilocal;
pub mod stress;
pub mod tensor;
pub mod verification;

pub use chart::{Boundary, MetricModel, SpacetimeChart, SpatialLayout};
pub use conditions::{BoostGrid, Condition, ConditionVerdict, Verdict};
pub use curvature::{Christoffel, CurvatureBundle, Riemann};
pub use error::{GravError, Result};
pub use fd::{DerivativeScheme, StencilOrder};
pub use stress::{MatterKind, StressEnergyField};
pub use tensor::{Event, LocalMetric, Mat4, Observer, SymTensor2, TangentVector, Vec4};
