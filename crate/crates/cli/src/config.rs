//! Command-line flags, JSON config files and their merge into a validated
//! [`RunConfig`].

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use sigmak_core::BoundaryGeometry;

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "sigmak", version, about = "Boundary expansions for the sigma_k-Ricci problem")]
#[command(allow_negative_numbers = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Expansion coefficients c_1 … c_{n-1}, c_{n,1} for a boundary geometry
    Coeffs,
    /// Check the recursion and the equation against the exact ball solution
    BallVerify,
    /// Radial solution with finite boundary value by shooting
    Shoot,
    /// Sign of F(-log d + C d) near an umbilic boundary
    Barrier,
    /// Fit the expansion to (d, u + log d) samples
    Fit,
    /// Membership of a spectrum in the cone Gamma_k^+
    Cone,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Coeffs => "coeffs",
            Command::BallVerify => "ball-verify",
            Command::Shoot => "shoot",
            Command::Barrier => "barrier",
            Command::Fit => "fit",
            Command::Cone => "cone",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Default, clap::Args)]
pub struct Flags {
    /// Ambient dimension
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Order of the sigma_k operator
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// Ball shorthand: dimension and radius
    #[arg(long, global = true, num_args = 2, value_names = ["N", "R"])]
    pub ball: Option<Vec<String>>,
    /// Principal curvatures, comma separated
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub kappas: Option<String>,
    /// Ball radius
    #[arg(long = "R", global = true)]
    pub radius: Option<f64>,
    /// Dirichlet value u(R) for shooting
    #[arg(long = "J", global = true)]
    pub boundary_value: Option<f64>,
    /// Barrier band width
    #[arg(long, global = true)]
    pub delta: Option<f64>,
    /// Barrier constant (upper bound of the search when --delta is absent)
    #[arg(long = "C", global = true)]
    pub c: Option<f64>,
    /// Grid size (shooting intervals, or residual sample points)
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Series truncation order
    #[arg(long, global = true)]
    pub order: Option<usize>,
    /// Spectrum for `cone`, comma separated
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    /// Sample CSV for `fit` with columns d,value
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Also emit the formal solution series as (j, l, coefficient) triples
    #[arg(long, global = true)]
    pub emit_series: bool,
    /// Output file; stdout when absent
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// JSON config file; flags take precedence
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// JSON geometry file: {"n", "kappas"} or {"n", "R"}
    #[arg(long, global = true)]
    pub geometry: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    n: Option<usize>,
    k: Option<usize>,
    #[serde(rename = "R")]
    radius: Option<f64>,
    kappas: Option<Vec<f64>>,
    geometry: Option<GeometryFile>,
    #[serde(rename = "J")]
    boundary_value: Option<f64>,
    delta: Option<f64>,
    #[serde(rename = "C")]
    c: Option<f64>,
    grid: Option<usize>,
    order: Option<usize>,
    lambda: Option<Vec<f64>>,
    input: Option<PathBuf>,
    emit_series: Option<bool>,
    out: Option<PathBuf>,
    format: Option<Format>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeometryFile {
    n: usize,
    kappas: Option<Vec<f64>>,
    #[serde(rename = "R")]
    radius: Option<f64>,
}

/// Fully merged and validated settings for one run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub geometry: Option<BoundaryGeometry>,
    /// Set when the geometry is a ball (or `--R` was given).
    pub radius: Option<f64>,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub boundary_value: Option<f64>,
    pub delta: Option<f64>,
    pub c: Option<f64>,
    pub grid: Option<usize>,
    pub order: Option<usize>,
    pub lambda: Option<Vec<f64>>,
    pub input: Option<PathBuf>,
    pub emit_series: bool,
    pub out: Option<PathBuf>,
    pub format: Format,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::validation(msg)
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path, what: &str) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {what} {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| invalid(format!("malformed {what} {}: {e}", path.display())))
}

fn parse_list(s: &str, what: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| invalid(format!("bad number {t:?} in --{what}"))))
        .collect()
}

fn finite(x: Option<f64>, what: &str) -> Result<Option<f64>, CliError> {
    match x {
        Some(v) if !v.is_finite() => Err(invalid(format!("{what} must be finite"))),
        _ => Ok(x),
    }
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, CliError> {
        let flags = cli.flags;
        let file: FileConfig = match &flags.config {
            Some(p) => read_json(p, "config file")?,
            None => FileConfig::default(),
        };
        let geometry_file = match &flags.geometry {
            Some(p) => Some(read_json::<GeometryFile>(p, "geometry file")?),
            None => file.geometry.clone(),
        };

        // layers, lowest precedence first: config file, geometry file, flags
        let mut n = file.n;
        let mut radius = file.radius;
        let mut kappas = file.kappas;
        if let Some(g) = geometry_file {
            if g.kappas.is_some() == g.radius.is_some() {
                return Err(invalid("geometry needs exactly one of \"kappas\" and \"R\""));
            }
            n = Some(g.n);
            radius = g.radius;
            kappas = g.kappas;
        }
        if let Some(v) = flags.n {
            n = Some(v);
        }
        if let Some(r) = flags.radius {
            radius = Some(r);
            kappas = None;
        }
        if let Some(s) = &flags.kappas {
            kappas = Some(parse_list(s, "kappas")?);
            radius = None;
        }
        if let Some(b) = &flags.ball {
            let bn: usize = b[0].parse().map_err(|_| invalid(format!("bad dimension {:?} in --ball", b[0])))?;
            let br: f64 = b[1].parse().map_err(|_| invalid(format!("bad radius {:?} in --ball", b[1])))?;
            if flags.n.is_some_and(|v| v != bn) {
                return Err(invalid("--n disagrees with --ball"));
            }
            n = Some(bn);
            radius = Some(br);
            kappas = None;
        }
        let radius = finite(radius, "R")?;
        if radius.is_some_and(|r| r <= 0.0) {
            return Err(invalid("R must be positive"));
        }

        let geometry = match (n, &kappas, radius) {
            (Some(n), Some(ks), _) => Some(BoundaryGeometry::new(n, ks.clone()).map_err(CliError::from_core)?),
            (Some(n), None, Some(r)) => Some(BoundaryGeometry::ball(n, r).map_err(CliError::from_core)?),
            (None, Some(_), _) => return Err(invalid("--kappas needs --n")),
            _ => None,
        };

        let lambda = match &flags.lambda {
            Some(s) => Some(parse_list(s, "lambda")?),
            None => file.lambda,
        };
        let cfg = RunConfig {
            command: cli.command,
            geometry,
            radius,
            n,
            k: flags.k.or(file.k),
            boundary_value: finite(flags.boundary_value.or(file.boundary_value), "J")?,
            delta: finite(flags.delta.or(file.delta), "delta")?,
            c: finite(flags.c.or(file.c), "C")?,
            grid: flags.grid.or(file.grid),
            order: flags.order.or(file.order),
            lambda,
            input: flags.input.or(file.input),
            emit_series: flags.emit_series || file.emit_series.unwrap_or(false),
            out: flags.out.or(file.out),
            format: flags.format.or(file.format).unwrap_or(Format::Json),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks that the options needed by the command are present and sane.
    fn validate(&self) -> Result<(), CliError> {
        let need_k = |cfg: &Self, n: usize| -> Result<usize, CliError> {
            let k = cfg.k.ok_or_else(|| invalid("--k is required"))?;
            if k == 0 || k > n {
                return Err(invalid(format!("k must lie in 1..={n}")));
            }
            Ok(k)
        };
        match self.command {
            Command::Coeffs => {
                let g = self.geometry.as_ref().ok_or_else(|| invalid("coeffs needs a geometry"))?;
                need_k(self, g.dim())?;
                if let Some(o) = self.order {
                    if o < g.dim() + 1 || o >= 2 * g.dim() {
                        return Err(invalid(format!("order must lie in {}..{}", g.dim() + 1, 2 * g.dim())));
                    }
                }
            }
            Command::BallVerify => {
                let (Some(n), Some(_)) = (self.n, self.radius) else {
                    return Err(invalid("ball-verify needs --ball N R"));
                };
                if self.k.is_some() {
                    need_k(self, n)?;
                }
                if self.grid.is_some_and(|g| g < 2) {
                    return Err(invalid("grid must be at least 2"));
                }
            }
            Command::Shoot => {
                let n = self.n.ok_or_else(|| invalid("shoot needs --n or --ball"))?;
                if n < 3 {
                    return Err(invalid("dimension must be at least 3"));
                }
                need_k(self, n)?;
                if self.boundary_value.is_none() {
                    return Err(invalid("shoot needs --J"));
                }
                if self.grid.is_some_and(|g| g < 100) {
                    return Err(invalid("grid must be at least 100"));
                }
            }
            Command::Barrier => {
                let g = self.geometry.as_ref().ok_or_else(|| invalid("barrier needs a geometry"))?;
                need_k(self, g.dim())?;
                if self.delta.is_some_and(|d| d <= 0.0) {
                    return Err(invalid("delta must be positive"));
                }
            }
            Command::Fit => {
                let n = self.n.ok_or_else(|| invalid("fit needs --n or --ball"))?;
                if n < 3 {
                    return Err(invalid("dimension must be at least 3"));
                }
                if self.input.is_none() && self.radius.is_none() {
                    return Err(invalid("fit needs --input or a ball radius"));
                }
            }
            Command::Cone => {
                let lambda = self.lambda.as_ref().ok_or_else(|| invalid("cone needs --lambda"))?;
                if lambda.iter().any(|x| !x.is_finite()) {
                    return Err(invalid("spectrum entries must be finite"));
                }
                let k = self.k.ok_or_else(|| invalid("--k is required"))?;
                if k == 0 {
                    return Err(invalid("k must be positive"));
                }
            }
        }
        Ok(())
    }
}
