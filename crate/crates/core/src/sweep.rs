//! Parameter sweeps over `(a, κ)` grids and their CSV output.
//!
//! Configuration is line-oriented `key = value` text with `#` comments.
//! Grids are written `start:stop:step` (inclusive within half a step), as a
//! comma-separated list, or as a single number.

use crate::entanglement::DEFAULT_MAX_ORDER;
use crate::interaction::AtomParams;
use crate::pipeline::{solve_point, PointParams};
use rayon::prelude::*;
use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;
use thiserror::Error;

pub const CSV_HEADER: &str =
    "a,kappa,v,Delta,N_trunc,p_vacuum,sum_FA_sq,sum_FR_sq,entropy_bits,converged,wall_time_ms";

pub const DEFAULT_LENGTH: f64 = 1.0;
pub const DEFAULT_V: f64 = 0.5;
/// `√(2π²)`, resonant with the lowest massless mode.
pub const DEFAULT_DELTA: f64 = std::f64::consts::SQRT_2 * std::f64::consts::PI;
pub const DEFAULT_EPS: f64 = 0.01;
pub const DEFAULT_TRUNC_TOL: f64 = 1e-6;
pub const DEFAULT_QUAD_TOL: f64 = 1e-9;

/// Where a setting came from, for error messages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Line(usize),
    CommandLine,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Line(n) => write!(f, "line {n}"),
            Origin::CommandLine => f.write_str("command line"),
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ConfigError {
    #[error("{origin}: expected `key = value`, got {text:?}")]
    Syntax { origin: Origin, text: String },
    #[error("{origin}: unknown key `{key}`")]
    UnknownKey { origin: Origin, key: String },
    #[error("{origin}: key `{key}` appears twice")]
    Duplicate { origin: Origin, key: String },
    #[error("{origin}: key `{key}`: cannot parse {value:?}")]
    Malformed { origin: Origin, key: String, value: String },
    #[error("{origin}: key `{key}`: {reason}")]
    Invalid { origin: Origin, key: String, reason: String },
    #[error("no `{0}` grid given in the config file or on the command line")]
    MissingGrid(&'static str),
}

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("cannot build worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub v: f64,
    pub delta: f64,
    pub length: f64,
    pub eps: f64,
    pub accel: Vec<f64>,
    pub mass: Vec<f64>,
    pub trunc_tol: f64,
    pub quad_tol: f64,
    /// Largest truncation order tried before a point is flagged.
    pub max_order: u32,
    /// Worker count; 0 picks one per core.
    pub threads: usize,
    pub output: Option<PathBuf>,
    /// Record per-point wall time. Off by default so output is reproducible.
    pub timing: bool,
}

impl SweepConfig {
    /// Grid points in output order: acceleration outer, mass inner.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.accel.iter().flat_map(move |&a| self.mass.iter().map(move |&k| (a, k)))
    }

    pub fn atom(&self) -> AtomParams {
        AtomParams::new(self.delta, self.v, self.eps, self.length).expect("validated at parse time")
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Setting {
    origin: Origin,
    value: String,
}

/// Unvalidated settings collected from a file and command-line overrides.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    entries: Vec<(&'static str, Setting)>,
}

pub const KEYS: [&str; 12] =
    ["v", "Delta", "L", "eps", "accel", "mass", "trunc_tol", "quad_tol", "max_order", "threads", "output", "timing"];

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut raw = RawConfig::default();
        for (i, line) in text.lines().enumerate() {
            let origin = Origin::Line(i + 1);
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let Some((key, value)) = body.split_once('=') else {
                return Err(ConfigError::Syntax { origin, text: line.to_string() });
            };
            let (key, value) = (key.trim(), value.trim());
            let Some(known) = KEYS.iter().find(|k| **k == key) else {
                return Err(ConfigError::UnknownKey { origin, key: key.to_string() });
            };
            if raw.get(known).is_some() {
                return Err(ConfigError::Duplicate { origin, key: key.to_string() });
            }
            raw.entries.push((known, Setting { origin, value: value.to_string() }));
        }
        Ok(raw)
    }

    /// Set `key` from the command line, replacing any value from the file.
    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<(), ConfigError> {
        let Some(known) = KEYS.iter().find(|k| **k == key) else {
            return Err(ConfigError::UnknownKey { origin: Origin::CommandLine, key: key.to_string() });
        };
        self.entries.retain(|(k, _)| k != known);
        self.entries.push((known, Setting { origin: Origin::CommandLine, value: value.into() }));
        Ok(())
    }

    fn get(&self, key: &str) -> Option<&Setting> {
        self.entries.iter().find(|(k, _)| *k == key).map(|(_, s)| s)
    }

    fn number(&self, key: &'static str, default: f64) -> Result<(f64, Option<Origin>), ConfigError> {
        match self.get(key) {
            None => Ok((default, None)),
            Some(s) => parse_number(key, s).map(|x| (x, Some(s.origin))),
        }
    }

    fn grid(&self, key: &'static str) -> Result<(Vec<f64>, Origin), ConfigError> {
        let s = self.get(key).ok_or(ConfigError::MissingGrid(key))?;
        parse_grid(key, s).map(|g| (g, s.origin))
    }

    /// Apply defaults and validate.
    pub fn finish(&self) -> Result<SweepConfig, ConfigError> {
        let invalid = |key: &str, origin: Option<Origin>, reason: String| ConfigError::Invalid {
            origin: origin.unwrap_or(Origin::CommandLine),
            key: key.to_string(),
            reason,
        };
        let (v, v_at) = self.number("v", DEFAULT_V)?;
        if !(v > 0.0 && v < 1.0) {
            return Err(invalid("v", v_at, format!("velocity must satisfy 0 < v < 1, got {v}")));
        }
        let (delta, at) = self.number("Delta", DEFAULT_DELTA)?;
        if !(delta > 0.0) {
            return Err(invalid("Delta", at, format!("gap must be positive, got {delta}")));
        }
        let (length, at) = self.number("L", DEFAULT_LENGTH)?;
        if !(length > 0.0) {
            return Err(invalid("L", at, format!("length must be positive, got {length}")));
        }
        let (eps, at) = self.number("eps", DEFAULT_EPS)?;
        if !(eps > 0.0) {
            return Err(invalid("eps", at, format!("coupling must be positive, got {eps}")));
        }
        let (trunc_tol, at) = self.number("trunc_tol", DEFAULT_TRUNC_TOL)?;
        if !(trunc_tol > 0.0) {
            return Err(invalid("trunc_tol", at, format!("tolerance must be positive, got {trunc_tol}")));
        }
        let (quad_tol, at) = self.number("quad_tol", DEFAULT_QUAD_TOL)?;
        if !(quad_tol > 0.0) {
            return Err(invalid("quad_tol", at, format!("tolerance must be positive, got {quad_tol}")));
        }
        let max_order = match self.get("max_order") {
            None => DEFAULT_MAX_ORDER,
            Some(s) => match s.value.parse::<u32>() {
                Ok(n) if n >= 1 => n,
                _ => return Err(malformed("max_order", s)),
            },
        };
        let threads = match self.get("threads") {
            None => 0,
            Some(s) => s.value.parse::<usize>().map_err(|_| malformed("threads", s))?,
        };
        let timing = match self.get("timing") {
            None => false,
            Some(s) => match s.value.as_str() {
                "true" | "on" | "1" => true,
                "false" | "off" | "0" => false,
                _ => return Err(malformed("timing", s)),
            },
        };
        let output = self.get("output").map(|s| PathBuf::from(&s.value));

        let (accel, at) = self.grid("accel")?;
        let bound = 2.0 * v;
        for &a in &accel {
            if !(a >= 0.0) {
                return Err(invalid("accel", Some(at), format!("acceleration must be non-negative, got {a}")));
            }
            if a >= bound {
                return Err(invalid(
                    "accel",
                    Some(at),
                    format!("a = {a} violates the kinematic bound a < 2v = {bound}"),
                ));
            }
            if a * length >= 2.0 {
                return Err(invalid("accel", Some(at), format!("a·L = {} puts the cavity past the horizon", a * length)));
            }
        }
        let (mass, at) = self.grid("mass")?;
        if let Some(&k) = mass.iter().find(|k| !(**k >= 0.0)) {
            return Err(invalid("mass", Some(at), format!("mass must be non-negative, got {k}")));
        }
        Ok(SweepConfig { v, delta, length, eps, accel, mass, trunc_tol, quad_tol, max_order, threads, output, timing })
    }
}

fn malformed(key: &str, s: &Setting) -> ConfigError {
    ConfigError::Malformed { origin: s.origin, key: key.to_string(), value: s.value.clone() }
}

fn parse_number(key: &str, s: &Setting) -> Result<f64, ConfigError> {
    match s.value.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(malformed(key, s)),
    }
}

fn parse_grid(key: &str, s: &Setting) -> Result<Vec<f64>, ConfigError> {
    let number = |text: &str| -> Result<f64, ConfigError> {
        match text.trim().parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => Err(malformed(key, s)),
        }
    };
    let parts: Vec<&str> = s.value.split(':').collect();
    match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step) = (number(start)?, number(stop)?, number(step)?);
            if !(step > 0.0) || stop < start {
                return Err(ConfigError::Invalid {
                    origin: s.origin,
                    key: key.to_string(),
                    reason: format!("range needs start ≤ stop and step > 0, got {}", s.value),
                });
            }
            let count = ((stop - start) / step + 0.5).floor() as usize + 1;
            Ok((0..count).map(|i| start + i as f64 * step).collect())
        }
        [_] => {
            let values = s.value.split(',').map(number).collect::<Result<Vec<_>, _>>()?;
            Ok(values)
        }
        _ => Err(malformed(key, s)),
    }
}

/// Parse a complete configuration; both grids must be present.
pub fn parse_config(text: &str) -> Result<SweepConfig, ConfigError> {
    RawConfig::parse(text)?.finish()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub a: f64,
    pub kappa: f64,
    pub v: f64,
    pub delta: f64,
    pub n_trunc: u32,
    pub p_vacuum: f64,
    pub sum_fa_sq: f64,
    pub sum_fr_sq: f64,
    pub entropy_bits: f64,
    pub converged: bool,
    pub wall_time_ms: f64,
    /// Failure or non-convergence reason; not written to CSV.
    pub note: Option<String>,
}

impl SweepRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.a,
            self.kappa,
            self.v,
            self.delta,
            self.n_trunc,
            self.p_vacuum,
            self.sum_fa_sq,
            self.sum_fr_sq,
            self.entropy_bits,
            self.converged,
            self.wall_time_ms
        )
    }
}

/// Evaluate one grid point. Failures become a non-converged row.
pub fn run_point(cfg: &SweepConfig, accel: f64, kappa: f64) -> SweepRow {
    let start = Instant::now();
    let params = PointParams {
        accel,
        kappa,
        atom: cfg.atom(),
        quad_tol: cfg.quad_tol,
        trunc_tol: cfg.trunc_tol,
        max_order: cfg.max_order,
    };
    let outcome = solve_point(params);
    let wall_time_ms = if cfg.timing { start.elapsed().as_secs_f64() * 1e3 } else { 0.0 };
    let mut row = SweepRow {
        a: accel,
        kappa,
        v: cfg.v,
        delta: cfg.delta,
        n_trunc: 0,
        p_vacuum: f64::NAN,
        sum_fa_sq: f64::NAN,
        sum_fr_sq: f64::NAN,
        entropy_bits: f64::NAN,
        converged: false,
        wall_time_ms,
        note: None,
    };
    match outcome {
        Ok(out) => {
            row.n_trunc = out.result.order;
            row.p_vacuum = out.result.p;
            row.sum_fa_sq = out.sum_alice_sq;
            row.sum_fr_sq = out.sum_rob_sq;
            row.entropy_bits = out.result.entropy;
            row.converged = out.result.converged;
            row.note = out.note;
        }
        Err(e) => row.note = Some(e.to_string()),
    }
    if let Some(note) = &row.note {
        log::warn!("a = {accel}, kappa = {kappa}: {note}");
    }
    row
}

/// Evaluate every grid point on a worker pool. Rows come back in grid order
/// whatever the scheduling.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>, SweepError> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build()?;
    let points: Vec<(f64, f64)> = cfg.points().collect();
    Ok(pool.install(|| points.par_iter().map(|&(a, k)| run_point(cfg, a, k)).collect()))
}

pub fn write_csv<W: Write>(rows: &[SweepRow], mut out: W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(out, "{}", row.to_csv())?;
    }
    out.flush()
}

pub fn emit_csv(rows: &[SweepRow], path: &Path) -> Result<(), SweepError> {
    let io_err = |source| SweepError::Io { path: path.to_path_buf(), source };
    let file = File::create(path).map_err(io_err)?;
    write_csv(rows, BufWriter::new(file)).map_err(io_err)
}
