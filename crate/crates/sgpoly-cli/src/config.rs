//! Command-line flags, the optional key=value config file, and the resolved
//! settings of a run.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use sgpoly::Backend;
use sgpoly::scalar::DEFAULT_PRECISION;

use crate::error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(name = "sgpoly", version, about = "Polynomials and Neumann spectra for the symmetric Laplacians on the Sierpinski gasket")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the constants derived from r.
    Params(Opts),
    /// Boundary values, V1 auxiliaries and derivatives of the monomials.
    Table(Opts),
    /// Values of P_{j,k} on V_level, as CSV plus an SVG rendering.
    Refine(Opts),
    /// Level-1 seeds and continuum limits of the six lowest Neumann branches.
    Spectrum(Opts),
    /// Ratio sequences against -1/(2λ3-λ2), and root localization over an r grid.
    Conjectures(Opts),
    /// Exact identity suite; exit status 0 iff every check passes.
    Verify(Opts),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Exact,
    Float,
}

#[derive(Clone, Debug, Default, Args)]
pub struct Opts {
    /// r as a decimal or p/q; repeat or comma-separate for several values.
    #[arg(long = "r", value_delimiter = ',', allow_hyphen_values = true)]
    pub r: Vec<String>,
    #[arg(long)]
    pub jmax: Option<usize>,
    #[arg(long, value_enum)]
    pub backend: Option<BackendArg>,
    /// Significand bits of the float backend.
    #[arg(long)]
    pub precision: Option<usize>,
    #[arg(long = "r-min")]
    pub r_min: Option<f64>,
    #[arg(long = "r-max")]
    pub r_max: Option<f64>,
    /// Number of grid points.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Log-spaced grid (default); `--log false` for linear spacing.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub log: Option<bool>,
    /// Mesh level for `refine`.
    #[arg(long)]
    pub level: Option<usize>,
    /// Monomial degree for `refine`.
    #[arg(long)]
    pub j: Option<usize>,
    /// Monomial family for `refine` (1, 2 or 3).
    #[arg(long)]
    pub k: Option<usize>,
    /// Output directory; without it the main CSV goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// key=value file supplying defaults for the flags above.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Parses `p/q`, an integer, or a decimal with optional exponent, exactly.
pub fn parse_r(s: &str) -> Result<BigRational> {
    let bad = || CliError::Usage(format!("cannot parse r from {s:?}"));
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(CliError::Usage(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(p, q));
    }
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty()
        || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut q = BigRational::from_integer(digits);
    let factor = BigRational::from_integer(num_traits::pow(ten, scale.unsigned_abs() as usize));
    q = if scale >= 0 { q * factor } else { q / factor };
    Ok(if neg { -q } else { q })
}

/// Reads `key = value` lines; `#` starts a comment.
pub fn read_config(path: &Path) -> Result<HashMap<String, String>> {
    let text = std::fs::read_to_string(path)?;
    let mut out = HashMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("{}:{}: expected key=value", path.display(), n + 1)))?;
        out.insert(k.trim().replace('-', "_"), v.trim().to_string());
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
    pub log: bool,
}

impl Default for Grid {
    fn default() -> Self {
        Grid { r_min: 0.05, r_max: 20.0, points: 400, log: true }
    }
}

impl Grid {
    pub fn validate(&self) -> Result<()> {
        if !(self.r_min > 0.0 && self.r_min < self.r_max && self.r_max.is_finite()) {
            return Err(CliError::Usage(format!("need 0 < r-min < r-max, got {} and {}", self.r_min, self.r_max)));
        }
        if self.points < 2 {
            return Err(CliError::Usage("grid needs at least 2 points".into()));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.points - 1;
        (0..=n)
            .map(|i| {
                let t = i as f64 / n as f64;
                if i == n {
                    self.r_max
                } else if self.log {
                    self.r_min * (self.r_max / self.r_min).powf(t)
                } else {
                    self.r_min + (self.r_max - self.r_min) * t
                }
            })
            .collect()
    }
}

/// Per-command defaults for settings that have no global default.
#[derive(Clone, Debug)]
pub struct Defaults {
    pub rs: Vec<BigRational>,
    pub jmax: usize,
    pub backend: BackendArg,
}

#[derive(Clone, Debug)]
pub struct Settings {
    pub rs: Vec<BigRational>,
    pub jmax: usize,
    pub backend: Backend,
    pub precision: usize,
    pub grid: Grid,
    /// True when any grid flag was given explicitly.
    pub grid_requested: bool,
    pub level: usize,
    pub j: usize,
    pub k: usize,
    pub out: Option<PathBuf>,
}

fn parse_value<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| CliError::Usage(format!("bad value {v:?} for {key}")))
}

impl Settings {
    /// Flags win over the config file, which wins over `defaults`.
    pub fn resolve(opts: &Opts, defaults: Defaults) -> Result<Self> {
        let file = match &opts.config {
            Some(p) => read_config(p)?,
            None => HashMap::new(),
        };
        fn pick<T: std::str::FromStr>(
            flag: Option<T>,
            file: &HashMap<String, String>,
            key: &str,
        ) -> Result<Option<T>> {
            match flag {
                Some(v) => Ok(Some(v)),
                None => file.get(key).map(|v| parse_value(key, v)).transpose(),
            }
        }
        let rs = if !opts.r.is_empty() {
            opts.r.iter().map(|s| parse_r(s)).collect::<Result<Vec<_>>>()?
        } else if let Some(v) = file.get("r") {
            v.split(',').map(parse_r).collect::<Result<Vec<_>>>()?
        } else {
            defaults.rs
        };
        let backend_arg = match (opts.backend, file.get("backend")) {
            (Some(b), _) => b,
            (None, Some(v)) => BackendArg::from_str(v, true).map_err(CliError::Usage)?,
            (None, None) => defaults.backend,
        };
        let precision = pick(opts.precision, &file, "precision")?.unwrap_or(DEFAULT_PRECISION);
        if precision < 64 {
            return Err(CliError::Usage(format!("precision must be at least 64 bits, got {precision}")));
        }
        let backend = match backend_arg {
            BackendArg::Exact => Backend::Exact,
            BackendArg::Float => Backend::Float { precision },
        };
        let d = Grid::default();
        let r_min = pick(opts.r_min, &file, "r_min")?;
        let r_max = pick(opts.r_max, &file, "r_max")?;
        let points = pick(opts.grid, &file, "grid")?;
        let log = pick(opts.log, &file, "log")?;
        let grid_requested = r_min.is_some() || r_max.is_some() || points.is_some() || log.is_some();
        let grid = Grid {
            r_min: r_min.unwrap_or(d.r_min),
            r_max: r_max.unwrap_or(d.r_max),
            points: points.unwrap_or(d.points),
            log: log.unwrap_or(d.log),
        };
        grid.validate()?;
        let jmax = pick(opts.jmax, &file, "jmax")?.unwrap_or(defaults.jmax);
        let out = match &opts.out {
            Some(p) => Some(p.clone()),
            None => file.get("out").map(PathBuf::from),
        };
        Ok(Settings {
            rs,
            jmax,
            backend,
            precision,
            grid,
            grid_requested,
            level: pick(opts.level, &file, "level")?.unwrap_or(4),
            j: pick(opts.j, &file, "j")?.unwrap_or(1),
            k: pick(opts.k, &file, "k")?.unwrap_or(1),
            out,
        })
    }

    pub fn single_r(&self) -> Result<&BigRational> {
        match self.rs.as_slice() {
            [r] => Ok(r),
            [] => Err(CliError::Usage("--r is required".into())),
            _ => Err(CliError::Usage("expected a single --r".into())),
        }
    }
}

/// The five values of r used by `verify` unless overridden.
pub fn default_verify_rs() -> Vec<BigRational> {
    [(1, 10), (1, 3), (1, 1), (2, 1), (10, 1)]
        .iter()
        .map(|&(p, q)| BigRational::new(BigInt::from(p), BigInt::from(q)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(d))
    }

    #[test]
    fn parses_rationals_and_decimals() {
        assert_eq!(parse_r("1/3").unwrap(), q(1, 3));
        assert_eq!(parse_r("0.25").unwrap(), q(1, 4));
        assert_eq!(parse_r("2").unwrap(), q(2, 1));
        assert_eq!(parse_r("1e-2").unwrap(), q(1, 100));
        assert_eq!(parse_r("-1.5").unwrap(), q(-3, 2));
        assert_eq!(parse_r(".5").unwrap(), q(1, 2));
        assert!(parse_r("abc").is_err());
        assert!(parse_r("1/0").is_err());
        assert!(parse_r("").is_err());
    }

    #[test]
    fn grid_endpoints() {
        let g = Grid { r_min: 0.1, r_max: 10.0, points: 3, log: true };
        let v = g.values();
        assert_eq!(v[0], 0.1);
        assert!((v[1] - 1.0).abs() < 1e-15);
        assert_eq!(v[2], 10.0);
        assert!(Grid { r_min: 2.0, r_max: 1.0, points: 3, log: false }.validate().is_err());
    }
}
