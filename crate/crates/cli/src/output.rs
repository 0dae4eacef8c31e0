//! Run manifests, CSV formatting and file output.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use critgap::contour::Resolution;
use serde::Serialize;

/// Failure of a command, with its exit code.
#[derive(Debug)]
pub enum CliError {
    /// Invalid arguments: exit 2.
    Usage(String),
    /// Numerical or I/O failure: exit 1.
    Run(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Run(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Run(m) => f.write_str(m),
        }
    }
}

impl From<critgap::Error> for CliError {
    fn from(e: critgap::Error) -> Self {
        use critgap::Error::*;
        match e {
            Domain { .. } | Geometry(_) | Config(_) => CliError::Usage(e.to_string()),
            _ => CliError::Run(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Everything needed to reproduce a run.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub command: &'static str,
    pub params: serde_json::Value,
    pub resolution: Option<Resolution>,
    pub seed: Option<u64>,
    pub version: &'static str,
    pub threads: usize,
    pub started_unix_s: f64,
    pub wall_clock_s: f64,
    #[serde(skip)]
    start: Option<Instant>,
}

impl Manifest {
    pub fn start<P: Serialize>(
        command: &'static str,
        params: &P,
        resolution: Option<Resolution>,
        seed: Option<u64>,
        threads: usize,
    ) -> Self {
        Manifest {
            command,
            params: serde_json::to_value(params).expect("arguments serialize"),
            resolution,
            seed,
            version: env!("CARGO_PKG_VERSION"),
            threads,
            started_unix_s: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0.0, |d| d.as_secs_f64()),
            wall_clock_s: 0.0,
            start: Some(Instant::now()),
        }
    }

    pub fn finish(&mut self) {
        if let Some(t) = self.start {
            self.wall_clock_s = t.elapsed().as_secs_f64();
        }
    }

    /// The reproducible part (no timing) as one JSON line.
    pub fn header(&self) -> String {
        serde_json::json!({
            "command": self.command,
            "params": self.params,
            "resolution": self.resolution,
            "seed": self.seed,
            "version": self.version,
        })
        .to_string()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }
}

/// 17 significant digits, enough to round-trip any double.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

/// CSV with the manifest header as a leading comment line.
pub fn csv(manifest: &Manifest, columns: &[String], rows: &[Vec<f64>]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# {}", manifest.header());
    let _ = writeln!(s, "{}", columns.join(","));
    for r in rows {
        let cells: Vec<String> = r.iter().map(|&x| fmt_f64(x)).collect();
        let _ = writeln!(s, "{}", cells.join(","));
    }
    s
}

pub fn sidecar(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

/// Write `body` to `out` (with a manifest sidecar) or to stdout (manifest on stderr).
pub fn emit(out: Option<&Path>, body: &str, manifest: &mut Manifest) -> CliResult<ExitCode> {
    manifest.finish();
    match out {
        Some(p) => {
            write_file(p, body)?;
            write_file(&sidecar(p), &manifest.to_json())?;
        }
        None => {
            print!("{body}");
            eprintln!("{}", serde_json::to_string(manifest).expect("manifest serializes"));
        }
    }
    Ok(ExitCode::SUCCESS)
}

pub fn write_file(path: &Path, body: &str) -> CliResult<()> {
    std::fs::write(path, body).map_err(|e| CliError::Run(format!("writing {}: {e}", path.display())))
}
