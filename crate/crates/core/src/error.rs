use thiserror::Error;

/// Errors raised by the geometry, matter and integration routines.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum GravError {
    /// The metric matrix could not be inverted (or is not Lorentzian) at an event.
    #[error("degenerate geometry at {event:?}: {reason}")]
    GeometryDegenerate { event: [f64; 4], reason: String },

    /// An event (or a finite-difference stencil around it) leaves the chart's validity domain.
    #[error("event {event:?} outside chart domain: {reason}")]
    Domain { event: [f64; 4], reason: String },

    /// Two objects that must live at the same event do not.
    #[error("base event mismatch: {left:?} vs {right:?}")]
    EventMismatch { left: [f64; 4], right: [f64; 4] },

    /// A vector that must be a unit future timelike vector is not.
    #[error("not a future unit timelike vector: g(u,u) = {norm}, u^0 = {time_component}")]
    NotUnitTimelike { norm: f64, time_component: f64 },

    /// A tensor that must be symmetric is not.
    #[error("tensor not symmetric: max asymmetry {asymmetry:e}")]
    NotSymmetric { asymmetry: f64 },

    /// The reconstruction sample set does not span the space of symmetric tensors.
    #[error("sample set underdetermined: rank {rank} of 10 (condition number {condition:e})")]
    Underdetermined { rank: usize, condition: f64 },

    /// Malformed input specification.
    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    /// Unknown catalog entry or invalid catalog parameters.
    #[error("registry error: {0}")]
    Registry(String),

    /// A surface touches (or comes too close to) a Killing horizon.
    #[error("surface too close to Killing horizon: |g(k,k)| = {norm:e} at {event:?}")]
    HorizonProximity { event: [f64; 4], norm: f64 },

    /// The Newtonian calibration has no defined value (zero total energy density).
    #[error("calibration undefined: {0}")]
    UndefinedCalibration(String),
}

impl GravError {
    /// Stable diagnostic code used in machine-readable reports.
    pub fn code(&self) -> &'static str {
        match self {
            GravError::GeometryDegenerate { .. } => "E_GEOMETRY_DEGENERATE",
            GravError::Domain { .. } => "E_DOMAIN",
            GravError::EventMismatch { .. } => "E_EVENT_MISMATCH",
            GravError::NotUnitTimelike { .. } => "E_NOT_UNIT_TIMELIKE",
            GravError::NotSymmetric { .. } => "E_NOT_SYMMETRIC",
            GravError::Underdetermined { .. } => "E_UNDERDETERMINED",
            GravError::InvalidSpec(_) => "E_INVALID_SPEC",
            GravError::Registry(_) => "E_REGISTRY",
            GravError::HorizonProximity { .. } => "E_HORIZON_PROXIMITY",
            GravError::UndefinedCalibration(_) => "E_UNDEFINED_CALIBRATION",
        }
    }

    pub(crate) fn domain(event: &crate::Event, reason: impl Into<String>) -> Self {
        GravError::Domain {
            event: event.0,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, GravError>;
