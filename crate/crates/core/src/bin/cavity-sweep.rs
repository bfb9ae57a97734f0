//! Batch sweep over acceleration and bare mass, written as CSV.
//!
//! Exit codes: 0 success, 1 configuration error, 2 some point did not
//! converge, 3 I/O error.

use cavity_entanglement::sweep::{self, RawConfig};
use clap::error::ErrorKind;
use clap::Parser;
use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_CONFIG: u8 = 1;
const EXIT_NOT_CONVERGED: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "cavity-sweep", version, about = "Cavity entanglement sweep over (a, kappa)")]
struct Cli {
    /// Config file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Acceleration grid, `start:stop:step` or a comma list.
    #[arg(long)]
    accel: Option<String>,
    /// Bare mass grid, `start:stop:step` or a comma list.
    #[arg(long)]
    mass: Option<String>,
    #[arg(long)]
    v: Option<String>,
    #[arg(long = "Delta")]
    delta: Option<String>,
    #[arg(long = "L")]
    length: Option<String>,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long = "trunc_tol")]
    trunc_tol: Option<String>,
    #[arg(long = "quad_tol")]
    quad_tol: Option<String>,
    /// Truncation order cap.
    #[arg(long = "max_order")]
    max_order: Option<String>,
    /// Worker threads, 0 for one per core.
    #[arg(long)]
    threads: Option<String>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Record per-point wall time instead of 0.
    #[arg(long)]
    timing: bool,
}

impl Cli {
    fn overrides(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        let text = [
            ("accel", &self.accel),
            ("mass", &self.mass),
            ("v", &self.v),
            ("Delta", &self.delta),
            ("L", &self.length),
            ("eps", &self.eps),
            ("trunc_tol", &self.trunc_tol),
            ("quad_tol", &self.quad_tol),
            ("max_order", &self.max_order),
            ("threads", &self.threads),
        ];
        for (key, value) in text {
            if let Some(v) = value {
                out.push((key, v.clone()));
            }
        }
        if let Some(p) = &self.output {
            out.push(("output", p.display().to_string()));
        }
        if self.timing {
            out.push(("timing", "true".to_string()));
        }
        out
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_CONFIG);
        }
    };

    let mut raw = match &cli.config {
        None => RawConfig::default(),
        Some(path) => {
            let text = match std::fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read {}: {e}", path.display());
                    return ExitCode::from(EXIT_IO);
                }
            };
            match RawConfig::parse(&text) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {}: {e}", path.display());
                    return ExitCode::from(EXIT_CONFIG);
                }
            }
        }
    };
    for (key, value) in cli.overrides() {
        raw.set(key, value).expect("flag names are config keys");
    }
    let cfg = match raw.finish() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };

    let rows = match sweep::run_sweep(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_IO);
        }
    };
    let written = match &cfg.output {
        Some(path) => sweep::emit_csv(&rows, path).map_err(|e| e.to_string()),
        None => sweep::write_csv(&rows, io::stdout().lock()).map_err(|e| format!("cannot write stdout: {e}")),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_IO);
    }
    let failed = rows.iter().filter(|r| !r.converged).count();
    if failed > 0 {
        eprintln!("{failed} of {} points did not converge", rows.len());
        return ExitCode::from(EXIT_NOT_CONVERGED);
    }
    ExitCode::SUCCESS
}
