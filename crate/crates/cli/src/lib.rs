//! `grav` command-line front end: argument parsing, config merging and
//! exit-code policy. The numerical work lives in `grav-core`.

pub mod commands;
pub mod config;
pub mod report;

use clap::{Args, Parser, Subcommand};
use grav_core::catalog::Params;
use grav_core::quasilocal::Normalization;

use config::{parse_floats, parse_nodes, parse_normalization, parse_params, parse_suite, CommandKind, Format, ObserverSpec, RunConfig};
use report::{Diagnostic, Report};

/// Validation errors (bad flags, parameters, domains).
pub const EXIT_INVALID: i32 = 2;
/// `verify` ran but at least one check failed.
pub const EXIT_CHECK_FAILED: i32 = 1;

/// Diagnostic code for command-line syntax errors reported by the parser.
pub const E_USAGE: &str = "E_USAGE";
/// Diagnostic code for an unreadable or malformed `--config` file.
pub const E_CONFIG: &str = "E_CONFIG";

#[derive(Debug, Parser)]
#[command(name = "grav", version, about = "Curvature, gravitational energy and verification reports for catalog spacetimes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Christoffel symbols, Riemann, Ricci and Einstein tensors at an event.
    Curvature,
    /// Energy density, pressures and gravitational energy seen by an observer.
    Energy,
    /// Weak, strong and dominant energy conditions on the matter content.
    Conditions,
    /// Komar energy of the time-translation field on a coordinate sphere.
    Komar,
    /// Tidal rates, and a Jacobi field along the observer's geodesic.
    Deviate,
    /// Compares focusing with a Newtonian dust cloud to calibrate G.
    Calibrate,
    /// Runs the acceptance suite.
    Verify,
    /// Lists the catalog metrics and their parameters.
    List,
}

impl From<Command> for CommandKind {
    fn from(c: Command) -> Self {
        match c {
            Command::Curvature => CommandKind::Curvature,
            Command::Energy => CommandKind::Energy,
            Command::Conditions => CommandKind::Conditions,
            Command::Komar => CommandKind::Komar,
            Command::Deviate => CommandKind::Deviate,
            Command::Calibrate => CommandKind::Calibrate,
            Command::Verify => CommandKind::Verify,
            Command::List => CommandKind::List,
        }
    }
}

/// Criterion numbers given to `--suite`; empty means all.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SuiteIds(pub Vec<u32>);

/// Flags shared by every subcommand. Anything given here overrides `--config`.
#[derive(Debug, Clone, Default, Args)]
pub struct Opts {
    /// JSON file mirroring the run configuration.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<std::path::PathBuf>,
    /// Catalog metric (see `grav list`).
    #[arg(long, global = true)]
    pub metric: Option<String>,
    /// Metric parameters, e.g. M=1 or Lambda=0.5.
    #[arg(long, global = true, value_parser = parse_params)]
    pub params: Option<Params>,
    /// Event coordinates t,x1,x2,x3.
    #[arg(long, global = true, value_name = "T,X1,X2,X3", value_parser = parse_floats::<4>, allow_hyphen_values = true)]
    pub at: Option<[f64; 4]>,
    /// static, comoving or boosted:φ:dx,dy,dz.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub observer: Option<ObserverSpec>,
    /// Finite-difference step.
    #[arg(long, global = true)]
    pub fd_step: Option<f64>,
    /// Finite-difference stencil order (2 or 4).
    #[arg(long, global = true)]
    pub fd_order: Option<u8>,
    /// Richardson-extrapolate finite differences.
    #[arg(long, global = true)]
    pub richardson: bool,
    /// Ignore closed-form metric derivatives and difference numerically.
    #[arg(long, global = true)]
    pub numeric: bool,
    /// Sphere quadrature nodes: N (θ) or N,M (θ,φ).
    #[arg(long, global = true, value_parser = parse_nodes)]
    pub quad_nodes: Option<[usize; 2]>,
    /// Rapidity levels of the observer grid.
    #[arg(long, global = true)]
    pub grid_levels: Option<usize>,
    /// Proper-time step for geodesics.
    #[arg(long, global = true)]
    pub step: Option<f64>,
    /// Komar sphere radius.
    #[arg(long, global = true)]
    pub radius: Option<f64>,
    /// infinity, radius:r or scale:λ.
    #[arg(long, global = true, value_parser = parse_normalization)]
    pub normalize: Option<Normalization>,
    /// Proper time to follow the geodesic in `deviate`.
    #[arg(long, global = true)]
    pub tau: Option<f64>,
    /// Newton's constant of the comparison cloud in `calibrate`.
    #[arg(long, global = true)]
    pub g_newton: Option<f64>,
    /// all, or comma-separated criterion numbers.
    #[arg(long, global = true, value_parser = |s: &str| parse_suite(s).map(SuiteIds))]
    pub suite: Option<SuiteIds>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Seed for every random choice.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

impl Opts {
    /// Lays the flags over a base configuration.
    pub fn apply(&self, mut c: RunConfig) -> RunConfig {
        fn set<T: Clone>(dst: &mut T, src: &Option<T>) {
            if let Some(v) = src {
                *dst = v.clone();
            }
        }
        if self.metric.is_some() {
            c.metric = self.metric.clone();
        }
        set(&mut c.params, &self.params);
        if self.at.is_some() {
            c.at = self.at;
        }
        set(&mut c.observer, &self.observer);
        set(&mut c.scheme.fd_step, &self.fd_step);
        set(&mut c.scheme.fd_order, &self.fd_order);
        c.scheme.richardson |= self.richardson;
        c.scheme.analytic &= !self.numeric;
        set(&mut c.scheme.quad_nodes, &self.quad_nodes);
        set(&mut c.scheme.grid_levels, &self.grid_levels);
        set(&mut c.scheme.step, &self.step);
        if self.radius.is_some() {
            c.radius = self.radius;
        }
        if self.normalize.is_some() {
            c.normalize = self.normalize;
        }
        if self.tau.is_some() {
            c.tau = self.tau;
        }
        if self.g_newton.is_some() {
            c.g_newton = self.g_newton;
        }
        if let Some(SuiteIds(ids)) = &self.suite {
            c.suite = ids.clone();
        }
        set(&mut c.format, &self.format);
        set(&mut c.seed, &self.seed);
        c
    }
}

/// What a run printed and how it ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn failure(code: &str, message: &str, report: Option<(Report, Format)>) -> Output {
    let stdout = match report {
        Some((mut r, format)) => {
            r.error = Some(Diagnostic {
                code: code.into(),
                message: message.into(),
            });
            r.render(format)
        }
        None => String::new(),
    };
    Output {
        code: EXIT_INVALID,
        stdout,
        stderr: format!("grav: error[{code}]: {message}\n"),
    }
}

/// Builds the configuration for a parsed command line, reading `--config` if given.
pub fn build_config(cli: &Cli) -> Result<RunConfig, (&'static str, String)> {
    let base = match &cli.opts.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| (E_CONFIG, format!("{}: {e}", path.display())))?;
            RunConfig::from_json(&text).map_err(|e| (E_CONFIG, e.to_string()))?
        }
        None => RunConfig::default(),
    };
    let mut config = cli.opts.apply(base);
    config.command = cli.command.into();
    Ok(config)
}

/// Runs `grav` on the given arguments (including the program name).
pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
                    if e.exit_code() == 0 =>
                {
                    Output {
                        code: 0,
                        stdout: text,
                        stderr: String::new(),
                    }
                }
                _ => Output {
                    code: EXIT_INVALID,
                    stdout: String::new(),
                    stderr: format!("grav: error[{E_USAGE}]\n{text}"),
                },
            };
        }
    };
    let config = match build_config(&cli) {
        Ok(c) => c,
        Err((code, msg)) => return failure(code, &msg, None),
    };
    let format = config.format;
    match commands::run(config.clone()) {
        Ok(outcome) => Output {
            code: if outcome.all_passed { 0 } else { EXIT_CHECK_FAILED },
            stdout: outcome.report.render(format),
            stderr: String::new(),
        },
        Err(e) => failure(e.code(), &e.to_string(), Some((Report::new(config), format))),
    }
}
