use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Deserialize;
use serde_json::Value;

use svcalc_core::approximant::{CurveSide, NoiseFloor};
use svcalc_core::calculus::{HLadder, Side};
use svcalc_core::svf::{
    gallery, PiecewiseSpec, PiecewiseSvf, SetValuedFunction, DEFAULT_RESOLUTION,
};
use svcalc_core::Tolerances;

pub const RESOLUTION_ENV: &str = "SVCALC_DEFAULT_RESOLUTION";

/// Malformed command line, config or environment. Exits with code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage<T>(msg: impl Into<String>) -> anyhow::Result<T> {
    Err(UsageError(msg.into()).into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    #[default]
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Right,
    Left,
    Both,
}

impl From<SideArg> for CurveSide {
    fn from(s: SideArg) -> Self {
        match s {
            SideArg::Right => CurveSide::Right,
            SideArg::Left => CurveSide::Left,
            SideArg::Both => CurveSide::Both,
        }
    }
}

/// Which set-valued function to analyse.
#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SvfSpec {
    Gallery {
        name: String,
        #[serde(default)]
        params: Value,
    },
    Piecewise(PiecewiseSpec),
}

impl SvfSpec {
    pub fn build(&self) -> svcalc_core::Result<Box<dyn SetValuedFunction>> {
        Ok(match self {
            SvfSpec::Gallery { name, params } => Box::new(gallery(name, params)?),
            SvfSpec::Piecewise(spec) => Box::new(PiecewiseSvf::from_spec(spec)?),
        })
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

/// Contents of a `--config` file. Every field is optional; flags win.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    pub svf: Option<SvfSpec>,
    pub x0: Option<f64>,
    pub x: Option<f64>,
    pub sides: Option<Vec<Side>>,
    pub ladder: Option<HLadder>,
    pub resolution: Option<usize>,
    pub conv_tol: Option<f64>,
    pub noise_floor: Option<NoiseFloor>,
    pub tolerances: Tolerances,
    pub output: OutputSpec,
}

impl AnalysisConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => return usage(format!("cannot read config {}: {e}", path.display())),
        };
        match serde_json::from_str(&text) {
            Ok(c) => Ok(c),
            Err(e) => usage(format!("invalid config {}: {e}", path.display())),
        }
    }
}

/// Flags shared by the analysis subcommands.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// JSON analysis config
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Gallery function name (see `gallery list`)
    #[arg(long)]
    pub svf: Option<String>,
    /// Gallery parameters as JSON
    #[arg(long, requires = "svf")]
    pub params: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<f64>,
    #[arg(long, value_enum)]
    pub side: Option<SideArg>,
    /// Samples per interval component
    #[arg(long)]
    pub resolution: Option<usize>,
    #[arg(long)]
    pub h0: Option<f64>,
    #[arg(long)]
    pub ratio: Option<f64>,
    #[arg(long)]
    pub rungs: Option<usize>,
    /// Residual threshold for derivative convergence
    #[arg(long)]
    pub conv_tol: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Flags and config merged into one analysis request.
pub struct Analysis {
    pub svf: Option<Box<dyn SetValuedFunction>>,
    pub x0: Option<f64>,
    pub x: Option<f64>,
    pub side: Option<CurveSide>,
    pub ladder: HLadder,
    pub resolution: usize,
    pub conv_tol: Option<f64>,
    pub noise_floor: Option<NoiseFloor>,
    pub tol: Tolerances,
    pub format: Format,
    pub out: Option<PathBuf>,
}

fn env_resolution() -> anyhow::Result<Option<usize>> {
    match std::env::var(RESOLUTION_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) => Ok(Some(n)),
            Err(_) => usage(format!(
                "{RESOLUTION_ENV} must be a positive integer, got `{v}`"
            )),
        },
        Err(_) => Ok(None),
    }
}

fn curve_side(sides: &[Side]) -> anyhow::Result<CurveSide> {
    match (sides.contains(&Side::Right), sides.contains(&Side::Left)) {
        (true, true) => Ok(CurveSide::Both),
        (true, false) => Ok(CurveSide::Right),
        (false, true) => Ok(CurveSide::Left),
        (false, false) => usage("config `sides` must not be empty"),
    }
}

impl Analysis {
    /// Resolution precedence: flag, config, environment, built-in default.
    pub fn resolve(c: &Common, x: Option<f64>) -> anyhow::Result<Self> {
        let cfg = match &c.config {
            Some(p) => AnalysisConfig::load(p)?,
            None => AnalysisConfig::default(),
        };
        let spec = match (&c.svf, cfg.svf) {
            (Some(name), _) => {
                let params = match &c.params {
                    Some(p) => match serde_json::from_str(p) {
                        Ok(v) => v,
                        Err(e) => return usage(format!("--params is not valid JSON: {e}")),
                    },
                    None => Value::Null,
                };
                Some(SvfSpec::Gallery {
                    name: name.clone(),
                    params,
                })
            }
            (None, spec) => spec,
        };
        let svf = spec.map(|s| s.build()).transpose()?;

        let mut ladder = cfg.ladder.unwrap_or_default();
        if let Some(h0) = c.h0 {
            ladder.h0 = h0;
        }
        if let Some(r) = c.ratio {
            ladder.ratio = r;
        }
        if let Some(n) = c.rungs {
            ladder.rungs = n;
        }
        ladder.validate()?;

        let resolution = match c.resolution.or(cfg.resolution) {
            Some(n) => n,
            None => env_resolution()?.unwrap_or(DEFAULT_RESOLUTION),
        };
        if resolution < 2 {
            return usage(format!("resolution must be at least 2, got {resolution}"));
        }
        cfg.tolerances.validate()?;

        let side = match (c.side, &cfg.sides) {
            (Some(s), _) => Some(s.into()),
            (None, Some(sides)) => Some(curve_side(sides)?),
            (None, None) => None,
        };

        Ok(Analysis {
            svf,
            x0: c.x0.or(cfg.x0),
            x: x.or(cfg.x),
            side,
            ladder,
            resolution,
            conv_tol: c.conv_tol.or(cfg.conv_tol),
            noise_floor: cfg.noise_floor,
            tol: cfg.tolerances,
            format: c.format.or(cfg.output.format).unwrap_or_default(),
            out: c.out.clone().or(cfg.output.path),
        })
    }

    pub fn svf(&self) -> anyhow::Result<&dyn SetValuedFunction> {
        match &self.svf {
            Some(f) => Ok(f.as_ref()),
            None => usage("no function given: use --svf or a config with `svf`"),
        }
    }

    pub fn x0(&self) -> anyhow::Result<f64> {
        match self.x0 {
            Some(x) => Ok(x),
            None => usage("no base point given: use --x0 or a config with `x0`"),
        }
    }

    pub fn x(&self) -> anyhow::Result<f64> {
        match self.x {
            Some(x) => Ok(x),
            None => usage("no evaluation point given: use --x or a config with `x`"),
        }
    }

    /// Side selection with a per-command default, checked against the ladder.
    pub fn sides(&self, default: CurveSide) -> anyhow::Result<CurveSide> {
        let side = self.side.unwrap_or(default);
        self.check_sides(side)?;
        Ok(side)
    }

    /// x0 in the domain and the whole ladder inside it on every side.
    pub fn check_sides(&self, side: CurveSide) -> anyhow::Result<()> {
        let f = self.svf()?;
        let x0 = self.x0()?;
        f.domain().check(x0)?;
        for &s in side.sides() {
            self.ladder.check_domain(&f.domain(), x0, s)?;
        }
        Ok(())
    }
}
