use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::{emit_config, execute, parse_config, OutputFormat, ScenarioConfig, ScenarioReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_ASSERTION: i32 = 2;

pub const MANIFEST_NAME: &str = "manifest.json";
pub const RESOLVED_CONFIG_NAME: &str = "resolved.conf";

/// Command-line overrides applied on top of a configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOptions {
    pub output_dir: PathBuf,
    pub seed: Option<u64>,
    pub format: Option<OutputFormat>,
    pub tolerance_scale: f64,
}

impl RunOptions {
    pub fn new(output_dir: impl Into<PathBuf>) -> Self {
        RunOptions { output_dir: output_dir.into(), seed: None, format: None, tolerance_scale: 1.0 }
    }
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub exit_code: i32,
    /// Directory holding the outputs, when any were written.
    pub directory: Option<PathBuf>,
    /// Every file written, manifest last.
    pub files: Vec<PathBuf>,
    pub report: Option<ScenarioReport>,
    /// One-paragraph human summary or the error.
    pub message: String,
}

impl RunOutcome {
    fn failed(message: String) -> Self {
        RunOutcome { exit_code: EXIT_CONFIG, directory: None, files: Vec::new(), report: None, message }
    }
}

#[derive(Serialize)]
struct OutputEntry {
    file: String,
    bytes: usize,
    sha256: String,
}

#[derive(Serialize)]
struct Versions {
    relphase: &'static str,
    manifest: u32,
}

#[derive(Serialize)]
struct Timings {
    execute_ms: f64,
    write_ms: f64,
}

#[derive(Serialize)]
struct Manifest<'a> {
    scenario: &'a str,
    seed: u64,
    config_sha256: String,
    versions: Versions,
    format: &'a str,
    normalization: &'a str,
    tolerance_scale: f64,
    exit_code: i32,
    passed: bool,
    summary: &'a serde_json::Map<String, serde_json::Value>,
    checks: &'a [super::CheckOutcome],
    outputs: Vec<OutputEntry>,
    timings: Timings,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Reads, validates and runs a configuration file.
pub fn run_file(path: &Path, opts: &RunOptions) -> RunOutcome {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return RunOutcome::failed(format!("{}: {e}", path.display())),
    };
    match parse_config(&text) {
        Ok(cfg) => run_scenario(&cfg, opts),
        Err(err) => RunOutcome::failed(
            err.issues.iter().map(|i| format!("{}:{}:{}: {}", path.display(), i.line, i.column, i.message)).collect::<Vec<_>>().join("\n"),
        ),
    }
}

/// Applies the overrides, runs the scenario and writes its outputs plus a
/// manifest under `output_dir/<path>`. Exit code 0 when every assertion
/// holds, 2 when one fails, 1 when the run could not complete (nothing is
/// left on disk in that case).
pub fn run_scenario(config: &ScenarioConfig, opts: &RunOptions) -> RunOutcome {
    if !(opts.tolerance_scale.is_finite() && opts.tolerance_scale > 0.0) {
        return RunOutcome::failed(format!("tolerance scale must be positive, got {}", opts.tolerance_scale));
    }
    let mut cfg = config.clone();
    if let Some(seed) = opts.seed {
        cfg.seed = seed;
    }
    if let Some(format) = opts.format {
        cfg.output.format = format;
    }
    if opts.tolerance_scale != 1.0 {
        cfg.scale_tolerances(opts.tolerance_scale);
    }

    let started = Instant::now();
    let report = match execute(&cfg) {
        Ok(r) => r,
        Err(e) => return RunOutcome::failed(format!("{} failed: {e}", cfg.scenario)),
    };
    let execute_ms = started.elapsed().as_secs_f64() * 1e3;

    let written = Instant::now();
    let dir = opts.output_dir.join(cfg.output_subdir());
    let resolved = emit_config(&cfg);
    let main = match cfg.output.format {
        OutputFormat::Json => report.to_json(),
        OutputFormat::Csv => report.table.clone(),
        OutputFormat::Text => report.to_text(),
    };
    let mut pending: Vec<(String, Vec<u8>)> = vec![
        (format!("{}.{}", cfg.scenario.name(), cfg.output.format.extension()), main.into_bytes()),
        (RESOLVED_CONFIG_NAME.to_string(), resolved.clone().into_bytes()),
    ];
    pending.extend(report.artifacts.iter().map(|a| (a.name.clone(), a.bytes.clone())));

    let mut files = Vec::new();
    let cleanup = |files: &[PathBuf], msg: String| {
        for f in files {
            let _ = fs::remove_file(f);
        }
        RunOutcome::failed(msg)
    };
    if let Err(e) = fs::create_dir_all(&dir) {
        return RunOutcome::failed(format!("{}: {e}", dir.display()));
    }
    let mut entries = Vec::new();
    for (name, bytes) in &pending {
        let path = dir.join(name);
        if let Err(e) = fs::write(&path, bytes) {
            return cleanup(&files, format!("{}: {e}", path.display()));
        }
        files.push(path);
        entries.push(OutputEntry { file: name.clone(), bytes: bytes.len(), sha256: sha256_hex(bytes) });
    }

    let passed = report.passed();
    let exit_code = if passed { EXIT_OK } else { EXIT_ASSERTION };
    let manifest = Manifest {
        scenario: cfg.scenario.name(),
        seed: cfg.seed,
        config_sha256: sha256_hex(resolved.as_bytes()),
        versions: Versions { relphase: env!("CARGO_PKG_VERSION"), manifest: 1 },
        format: cfg.output.format.name(),
        normalization: cfg.output.normalization.name(),
        tolerance_scale: opts.tolerance_scale,
        exit_code,
        passed,
        summary: &report.summary,
        checks: &report.checks,
        outputs: entries,
        timings: Timings { execute_ms, write_ms: written.elapsed().as_secs_f64() * 1e3 },
    };
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    let manifest_path = dir.join(MANIFEST_NAME);
    if let Err(e) = fs::write(&manifest_path, text) {
        return cleanup(&files, format!("{}: {e}", manifest_path.display()));
    }
    files.push(manifest_path);

    let mut message = format!("{}: {} -> {}\n", cfg.scenario, if passed { "passed" } else { "assertion failed" }, dir.display());
    for c in &report.checks {
        message.push_str(&format!("  {} {}  {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail));
    }
    RunOutcome { exit_code, directory: Some(dir), files, report: Some(report), message }
}
