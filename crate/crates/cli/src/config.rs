//! Run configuration: the merged view of `--config` and command-line flags.

use clap::ValueEnum;
use grav_core::catalog::Params;
use grav_core::quasilocal::Normalization;
use grav_core::{DerivativeScheme, GravError, Result, StencilOrder};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Curvature,
    Energy,
    Conditions,
    Komar,
    Deviate,
    Calibrate,
    Verify,
    #[default]
    List,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Curvature => "curvature",
            CommandKind::Energy => "energy",
            CommandKind::Conditions => "conditions",
            CommandKind::Komar => "komar",
            CommandKind::Deviate => "deviate",
            CommandKind::Calibrate => "calibrate",
            CommandKind::Verify => "verify",
            CommandKind::List => "list",
        }
    }

    /// Whether the command evaluates something on a catalog metric.
    pub fn needs_metric(self) -> bool {
        !matches!(self, CommandKind::Verify | CommandKind::List)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Pretty,
}

/// Which observer the quantities are evaluated for.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ObserverSpec {
    /// At rest in the chart.
    #[default]
    Static,
    /// Rest frame of the matter, or the static observer when every frame qualifies.
    Comoving,
    /// Static observer boosted with the given rapidity along a frame direction.
    Boosted { rapidity: f64, direction: [f64; 3] },
}

impl std::str::FromStr for ObserverSpec {
    type Err = String;

    /// `static`, `comoving` or `boosted:φ:dx,dy,dz`.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "static" => return Ok(ObserverSpec::Static),
            "comoving" => return Ok(ObserverSpec::Comoving),
            _ => {}
        }
        let rest = s
            .strip_prefix("boosted:")
            .ok_or_else(|| format!("expected static, comoving or boosted:φ:dx,dy,dz, got '{s}'"))?;
        let (phi, dir) = rest
            .split_once(':')
            .ok_or_else(|| format!("boosted observer needs rapidity and direction, got '{s}'"))?;
        let rapidity = phi.trim().parse().map_err(|_| format!("bad rapidity '{phi}'"))?;
        let direction = parse_floats::<3>(dir)?;
        Ok(ObserverSpec::Boosted { rapidity, direction })
    }
}

/// Numerical knobs shared by the commands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchemeConfig {
    pub fd_step: f64,
    /// 2 or 4.
    pub fd_order: u8,
    pub richardson: bool,
    /// Use closed-form metric derivatives where the chart provides them.
    pub analytic: bool,
    /// Gauss–Legendre nodes in cos θ and uniform nodes in φ.
    pub quad_nodes: [usize; 2],
    pub grid_levels: usize,
    pub beta_max: f64,
    /// Extra observers drawn from the seeded generator on top of the grid.
    pub grid_random: usize,
    /// Proper-time step for geodesic integration.
    pub step: f64,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        let d = DerivativeScheme::default();
        Self {
            fd_step: d.step,
            fd_order: 4,
            richardson: d.richardson,
            analytic: d.use_analytic,
            quad_nodes: [32, 64],
            grid_levels: 24,
            beta_max: 0.999,
            grid_random: 64,
            step: 1e-2,
        }
    }
}

impl SchemeConfig {
    pub fn derivative(&self) -> Result<DerivativeScheme> {
        let order = match self.fd_order {
            2 => StencilOrder::Second,
            4 => StencilOrder::Fourth,
            n => return Err(GravError::InvalidSpec(format!("fd order must be 2 or 4, got {n}"))),
        };
        let scheme = DerivativeScheme {
            step: self.fd_step,
            order,
            richardson: self.richardson,
            use_analytic: self.analytic,
        };
        scheme.validate()?;
        Ok(scheme)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: CommandKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metric: Option<String>,
    pub params: Params,
    /// Event coordinates; defaults to the catalog's sample event.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub at: Option<[f64; 4]>,
    pub observer: ObserverSpec,
    pub scheme: SchemeConfig,
    /// Komar sphere radius.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalize: Option<Normalization>,
    /// Proper time span for `deviate`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    /// Newton's constant of the comparison cloud for `calibrate`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g_newton: Option<f64>,
    /// Acceptance criteria for `verify`; empty means all.
    pub suite: Vec<u32>,
    pub format: Format,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: CommandKind::default(),
            metric: None,
            params: Params::new(),
            at: None,
            observer: ObserverSpec::default(),
            scheme: SchemeConfig::default(),
            radius: None,
            normalize: None,
            tau: None,
            g_newton: None,
            suite: Vec::new(),
            format: Format::default(),
            seed: 42,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| GravError::InvalidSpec(format!("config: {e}")))
    }

    pub fn metric_name(&self) -> Result<&str> {
        self.metric
            .as_deref()
            .ok_or_else(|| GravError::InvalidSpec(format!("'{}' needs --metric", self.command.name())))
    }

    /// Fills in the defaults that depend on other fields, so the echoed
    /// config reproduces the run on its own.
    pub fn resolve(mut self) -> Result<Self> {
        self.scheme.derivative()?;
        if !self.command.needs_metric() {
            return Ok(self);
        }
        let name = self.metric_name()?.to_string();
        grav_core::catalog::entry(&name, &self.params)?;
        if self.at.is_none() {
            self.at = Some(grav_core::catalog::sample_event(&name).0);
        }
        match self.command {
            CommandKind::Komar => {
                self.radius.get_or_insert(10.0);
                self.normalize.get_or_insert(Normalization::Infinity);
            }
            CommandKind::Deviate => {
                self.tau.get_or_insert(1.0);
            }
            CommandKind::Calibrate => {
                self.g_newton.get_or_insert(1.0);
            }
            _ => {}
        }
        Ok(self)
    }
}

pub fn parse_floats<const N: usize>(s: &str) -> std::result::Result<[f64; N], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != N {
        return Err(format!("expected {N} comma-separated numbers, got '{s}'"));
    }
    let mut out = [0.0; N];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p.parse().map_err(|_| format!("not a number: '{p}'"))?;
    }
    Ok(out)
}

/// `M=1,Lambda=0.5` style parameter lists.
pub fn parse_params(s: &str) -> std::result::Result<Params, String> {
    let mut out = Params::new();
    for pair in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = pair.split_once('=').ok_or_else(|| format!("expected name=value, got '{pair}'"))?;
        let v: f64 = v.trim().parse().map_err(|_| format!("not a number: '{v}'"))?;
        out.insert(k.trim().to_string(), v);
    }
    Ok(out)
}

/// `infinity`, `radius:r` or `scale:λ`.
pub fn parse_normalization(s: &str) -> std::result::Result<Normalization, String> {
    if s == "infinity" {
        return Ok(Normalization::Infinity);
    }
    let (kind, value) = s
        .split_once(':')
        .ok_or_else(|| format!("expected infinity, radius:r or scale:λ, got '{s}'"))?;
    let v: f64 = value.parse().map_err(|_| format!("not a number: '{value}'"))?;
    match kind {
        "radius" => Ok(Normalization::Radius(v)),
        "scale" => Ok(Normalization::Scale(v)),
        _ => Err(format!("unknown normalization '{kind}'")),
    }
}

/// `32` (φ gets twice as many) or `32,64`.
pub fn parse_nodes(s: &str) -> std::result::Result<[usize; 2], String> {
    let parse = |p: &str| p.trim().parse::<usize>().map_err(|_| format!("not a node count: '{p}'"));
    match s.split_once(',') {
        Some((a, b)) => Ok([parse(a)?, parse(b)?]),
        None => {
            let n = parse(s)?;
            Ok([n, 2 * n])
        }
    }
}

/// `all` or a comma-separated list of criterion numbers.
pub fn parse_suite(s: &str) -> std::result::Result<Vec<u32>, String> {
    if s == "all" {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|p| p.trim().parse::<u32>().map_err(|_| format!("not a criterion number: '{p}'")))
        .collect()
}
