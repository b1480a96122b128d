//! Canonical demonstrations driven by a line-oriented configuration file.
//!
//! ```text
//! # comment
//! scenario = "two_slit"
//! seed = 0
//!
//! [system]
//! dim = 2                      # or j = 0.5
//! rho = "plus"
//! hamiltonian = "zero"
//! grid = [0.0, 1.0]
//!
//! [params]
//! screen = "plus"
//!
//! [assert]
//! expected_gap = -0.5
//!
//! [output]
//! format = "csv"
//! normalization = "unit_trace"
//! ```
//!
//! Every value is inline JSON. Missing keys take the defaults listed by
//! `relphase list-scenarios`.

mod config;
mod output;
mod params;
mod runners;
mod system;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use serde_json::Value;

pub use config::{ConfigError, ConfigIssue};
pub use output::{run_file, run_scenario, RunOptions, RunOutcome, EXIT_ASSERTION, EXIT_CONFIG, EXIT_OK};
pub use runners::{execute, Artifact, CheckOutcome, ScenarioReport};
pub use system::{HamiltonianSpec, StateSpec, SystemSpec};

use config::{inline, parse_raw, Entry, RawConfig};
use params::{assert_keys, param_keys, validate, Check};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    TwoSlit,
    PrecessionConsistency,
    ReproductionSweep,
    NegativityMap,
    ConditioningDemo,
    InferenceSearch,
    AxiomAudit,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 7] = [
        ScenarioKind::TwoSlit,
        ScenarioKind::PrecessionConsistency,
        ScenarioKind::ReproductionSweep,
        ScenarioKind::NegativityMap,
        ScenarioKind::ConditioningDemo,
        ScenarioKind::InferenceSearch,
        ScenarioKind::AxiomAudit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::TwoSlit => "two_slit",
            ScenarioKind::PrecessionConsistency => "precession_consistency",
            ScenarioKind::ReproductionSweep => "reproduction_sweep",
            ScenarioKind::NegativityMap => "negativity_map",
            ScenarioKind::ConditioningDemo => "conditioning_demo",
            ScenarioKind::InferenceSearch => "inference_search",
            ScenarioKind::AxiomAudit => "axiom_audit",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            ScenarioKind::TwoSlit => "two-slit intensities, interference and additivity gap",
            ScenarioKind::PrecessionConsistency => "weak and full consistency of a precessing spin's filter histories",
            ScenarioKind::ReproductionSweep => "random history pairs evaluated in Hilbert space and on phase space",
            ScenarioKind::NegativityMap => "symbol of a spin projector over the sphere and its negativity",
            ScenarioKind::ConditioningDemo => "evidence conditioning against state reduction, identity post-selection",
            ScenarioKind::InferenceSearch => "search for incompatible inferences across consistent sets",
            ScenarioKind::AxiomAudit => "the seven coherence axioms over random fixtures",
        }
    }

    /// System used when the `[system]` section leaves a key out.
    pub fn default_system(self) -> SystemSpec {
        let (rho, hamiltonian, grid) = match self {
            ScenarioKind::TwoSlit => (StateSpec::Named("plus".into()), HamiltonianSpec::Zero, vec![0.0, 1.0]),
            ScenarioKind::PrecessionConsistency => (
                StateSpec::Named("zero".into()),
                HamiltonianSpec::Pauli([0.0, 0.0, 0.5]),
                vec![0.0, std::f64::consts::FRAC_PI_2],
            ),
            ScenarioKind::ReproductionSweep => (StateSpec::Random, HamiltonianSpec::Random(1.0), vec![0.0, 0.4, 0.9]),
            ScenarioKind::NegativityMap => (StateSpec::Named("mixed".into()), HamiltonianSpec::Zero, vec![0.0]),
            ScenarioKind::ConditioningDemo => (StateSpec::Random, HamiltonianSpec::Random(1.0), vec![0.0, 0.5, 1.0]),
            ScenarioKind::InferenceSearch => (StateSpec::Random, HamiltonianSpec::Random(1.0), vec![0.0, 1.0]),
            ScenarioKind::AxiomAudit => (StateSpec::Random, HamiltonianSpec::Random(1.0), vec![0.0, 0.5, 1.0]),
        };
        SystemSpec { dim: 2, rho, hamiltonian, grid }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        ScenarioKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| {
            format!("unknown scenario {s:?}, expected one of {}", ScenarioKind::ALL.map(|k| k.name()).join(", "))
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

impl OutputFormat {
    pub fn name(self) -> &'static str {
        match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
            OutputFormat::Text => "text",
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
            OutputFormat::Text => "txt",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "text" => Ok(OutputFormat::Text),
            _ => Err(format!("unknown format {s:?}, expected json, csv or text")),
        }
    }
}

/// Scale of printed phase-space symbols.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Normalization {
    /// `F = Tr(A Δ)`, so the identity has symbol 1.
    #[serde(rename = "unit_trace")]
    UnitTrace,
    /// `c F` with the pairing constant `c`, `(2j+1)/4π` on the sphere.
    #[serde(rename = "paper_4_2")]
    Paper42,
}

impl Normalization {
    pub fn name(self) -> &'static str {
        match self {
            Normalization::UnitTrace => "unit_trace",
            Normalization::Paper42 => "paper_4_2",
        }
    }
}

impl FromStr for Normalization {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "unit_trace" => Ok(Normalization::UnitTrace),
            "paper_4_2" => Ok(Normalization::Paper42),
            _ => Err(format!("unknown normalization {s:?}, expected unit_trace or paper_4_2")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputSpec {
    pub format: OutputFormat,
    /// Directory under the output root; defaults to the scenario name.
    pub path: Option<String>,
    pub normalization: Normalization,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec { format: OutputFormat::Json, path: None, normalization: Normalization::UnitTrace }
    }
}

/// A fully resolved and validated scenario configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    pub seed: u64,
    pub system: SystemSpec,
    /// Scenario parameters, every documented key present.
    pub params: BTreeMap<String, Value>,
    /// Expectations and tolerances, every documented key present.
    pub assertions: BTreeMap<String, Value>,
    pub output: OutputSpec,
}

pub const MAX_SYSTEM_DIM: usize = 64;
const MAX_GRID: usize = 8;

/// Reads and validates a configuration.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    ScenarioConfig::from_raw(&parse_raw(text)?)
}

/// Canonical text form; `parse_config(&emit_config(c)) == Ok(c)`.
pub fn emit_config(c: &ScenarioConfig) -> String {
    fn line(out: &mut String, k: &str, v: &Value) {
        out.push_str(&format!("{k} = {}\n", inline(v)));
    }
    let mut out = String::new();
    line(&mut out, "scenario", &Value::from(c.scenario.name()));
    line(&mut out, "seed", &Value::from(c.seed));
    out.push_str("\n[system]\n");
    let sys = &c.system;
    line(&mut out, "dim", &Value::from(sys.dim));
    line(&mut out, "rho", &sys.rho.to_value());
    line(&mut out, "hamiltonian", &sys.hamiltonian.to_value());
    line(&mut out, "grid", &Value::from(sys.grid.clone()));
    for (section, map) in [("params", &c.params), ("assert", &c.assertions)] {
        out.push_str(&format!("\n[{section}]\n"));
        for (k, v) in map {
            line(&mut out, k, v);
        }
    }
    out.push_str("\n[output]\n");
    line(&mut out, "format", &Value::from(c.output.format.name()));
    line(&mut out, "normalization", &Value::from(c.output.normalization.name()));
    if let Some(p) = &c.output.path {
        line(&mut out, "path", &Value::from(p.as_str()));
    }
    out
}

struct Issues(Vec<ConfigIssue>);

impl Issues {
    fn at(&mut self, line: usize, column: usize, message: impl Into<String>) {
        self.0.push(ConfigIssue { line, column, message: message.into() });
    }

    fn entry(&mut self, e: &Entry, message: impl Into<String>) {
        self.at(e.line, e.column, message);
    }
}

fn find<'a>(entries: &'a [Entry], key: &str) -> Option<&'a Entry> {
    entries.iter().find(|e| e.key == key)
}

fn unknown_keys(entries: &[Entry], allowed: &[&str], section: &str, issues: &mut Issues) {
    for e in entries {
        if !allowed.contains(&e.key.as_str()) {
            issues.at(e.line, 1, format!("unknown key {} in {section}, expected one of {}", e.key, allowed.join(", ")));
        }
    }
}

fn parse_grid(v: &Value) -> Result<Vec<f64>, String> {
    let items = v.as_array().ok_or("grid must be a list of times")?;
    let times: Vec<f64> = items.iter().map(|t| t.as_f64().filter(|x| x.is_finite())).collect::<Option<_>>().ok_or("grid times must be finite numbers")?;
    if times.is_empty() || times.len() > MAX_GRID {
        return Err(format!("grid needs between 1 and {MAX_GRID} times"));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err("grid times must be strictly increasing".into());
    }
    Ok(times)
}

fn on_grid(grid: &[f64], t: f64) -> bool {
    grid.iter().any(|g| (g - t).abs() <= 1e-12 * g.abs().max(1.0))
}

impl ScenarioConfig {
    /// Every default filled in.
    pub fn defaults(kind: ScenarioKind) -> Self {
        let fill = |keys: &[params::Key]| keys.iter().map(|k| (k.name.to_string(), (k.default)())).collect();
        ScenarioConfig {
            scenario: kind,
            seed: 0,
            system: kind.default_system(),
            params: fill(param_keys(kind)),
            assertions: fill(assert_keys(kind)),
            output: OutputSpec::default(),
        }
    }

    fn from_raw(raw: &RawConfig) -> Result<Self, ConfigError> {
        let mut issues = Issues(Vec::new());
        let top = raw.section("");
        unknown_keys(top, &["scenario", "seed"], "the top level", &mut issues);
        let kind = match find(top, "scenario") {
            None => {
                issues.at(1, 1, "missing `scenario = \"...\"`");
                return Err(ConfigError { issues: issues.0 });
            }
            Some(e) => match e.value.as_str().map(ScenarioKind::from_str) {
                Some(Ok(k)) => k,
                Some(Err(msg)) => {
                    issues.entry(e, msg);
                    return Err(ConfigError { issues: issues.0 });
                }
                None => {
                    issues.entry(e, "scenario must be a string");
                    return Err(ConfigError { issues: issues.0 });
                }
            },
        };
        let mut cfg = ScenarioConfig::defaults(kind);
        if let Some(e) = find(top, "seed") {
            match e.value.as_u64() {
                Some(s) => cfg.seed = s,
                None => issues.entry(e, "seed must be an unsigned 64-bit integer"),
            }
        }

        let header = |name: &str| raw.sections.get(name).map(|(l, _)| *l).unwrap_or(1).max(1);
        let sys = raw.section("system");
        unknown_keys(sys, &["dim", "j", "rho", "hamiltonian", "grid"], "[system]", &mut issues);
        match (find(sys, "dim"), find(sys, "j")) {
            (Some(_), Some(e)) => issues.entry(e, "set either dim or j, not both"),
            (Some(e), None) => match e.value.as_u64() {
                Some(d) if (1..=MAX_SYSTEM_DIM as u64).contains(&d) => cfg.system.dim = d as usize,
                _ => issues.entry(e, format!("dim must be an integer between 1 and {MAX_SYSTEM_DIM}")),
            },
            (None, Some(e)) => {
                let two_j = e.value.as_f64().map(|j| 2.0 * j);
                match two_j {
                    Some(t) if t >= 1.0 && t.fract() == 0.0 && (t as usize) < MAX_SYSTEM_DIM => cfg.system.dim = t as usize + 1,
                    _ => issues.entry(e, "j must be a positive half-integer"),
                }
            }
            (None, None) => {}
        }
        let dim = cfg.system.dim;
        if let Some(e) = find(sys, "rho") {
            match StateSpec::from_value(&e.value) {
                Ok(s) => cfg.system.rho = s,
                Err(m) => issues.entry(e, format!("rho: {m}")),
            }
        }
        if let Some(e) = find(sys, "hamiltonian") {
            match HamiltonianSpec::from_value(&e.value) {
                Ok(h) => cfg.system.hamiltonian = h,
                Err(m) => issues.entry(e, format!("hamiltonian: {m}")),
            }
        }
        if let Some(e) = find(sys, "grid") {
            match parse_grid(&e.value) {
                Ok(g) => cfg.system.grid = g,
                Err(m) => issues.entry(e, m),
            }
        }
        let at_key = |key: &str| find(sys, key).map(|e| (e.line, e.column)).unwrap_or((header("system"), 1));
        if let Err(m) = cfg.system.rho.check(dim) {
            let (l, c) = at_key("rho");
            issues.at(l, c, format!("rho: {m}"));
        }
        if let Err(m) = cfg.system.hamiltonian.check(dim) {
            let (l, c) = at_key("hamiltonian");
            issues.at(l, c, format!("hamiltonian: {m}"));
        }

        for (section, keys, target) in [
            ("params", param_keys(kind), &mut cfg.params),
            ("assert", assert_keys(kind), &mut cfg.assertions),
        ] {
            let entries = raw.section(section);
            let names: Vec<&str> = keys.iter().map(|k| k.name).collect();
            unknown_keys(entries, &names, &format!("[{section}] of {kind}"), &mut issues);
            for key in keys {
                let (value, line, column) = match find(entries, key.name) {
                    Some(e) => (e.value.clone(), e.line, e.column),
                    None => ((key.default)(), header(section), 1),
                };
                match validate(key.check, &value, dim) {
                    Ok(()) => {
                        target.insert(key.name.to_string(), value);
                    }
                    Err(m) => issues.at(line, column, format!("{}: {m}", key.name)),
                }
            }
        }

        let out = raw.section("output");
        unknown_keys(out, &["format", "path", "normalization"], "[output]", &mut issues);
        if let Some(e) = find(out, "format") {
            match e.value.as_str().map(OutputFormat::from_str) {
                Some(Ok(f)) => cfg.output.format = f,
                Some(Err(m)) => issues.entry(e, m),
                None => issues.entry(e, "format must be a string"),
            }
        }
        if let Some(e) = find(out, "normalization") {
            match e.value.as_str().map(Normalization::from_str) {
                Some(Ok(n)) => cfg.output.normalization = n,
                Some(Err(m)) => issues.entry(e, m),
                None => issues.entry(e, "normalization must be a string"),
            }
        }
        if let Some(e) = find(out, "path") {
            match e.value.as_str() {
                Some(p) => match check_path(p) {
                    Ok(()) => cfg.output.path = Some(p.to_string()),
                    Err(m) => issues.entry(e, m),
                },
                None => issues.entry(e, "path must be a string"),
            }
        }

        if issues.0.is_empty() {
            let line_of = |section: &str, key: &str| {
                find(raw.section(section), key).map(|e| (e.line, e.column)).unwrap_or((header(section), 1))
            };
            for (section, key, message) in cfg.cross_checks() {
                let (l, c) = line_of(section, key);
                issues.at(l, c, message);
            }
        }
        if issues.0.is_empty() {
            Ok(cfg)
        } else {
            issues.0.sort_by_key(|i| (i.line, i.column));
            Err(ConfigError { issues: issues.0 })
        }
    }

    /// Constraints spanning several keys: (section, key, message).
    fn cross_checks(&self) -> Vec<(&'static str, &'static str, String)> {
        let mut out = Vec::new();
        let grid = &self.system.grid;
        let dim = self.system.dim;
        let num = |k: &str| self.params[k].as_f64().unwrap_or(f64::NAN);
        let count = |k: &str| self.params[k].as_u64().unwrap_or(0) as usize;
        if dim < 2 && self.scenario != ScenarioKind::NegativityMap {
            out.push(("system", "dim", "scenarios need dim >= 2".to_string()));
        }
        match self.scenario {
            ScenarioKind::TwoSlit => {
                for key in ["slit_time", "screen_time"] {
                    if !on_grid(grid, num(key)) {
                        out.push(("params", key, format!("{key} {} is not on the grid", num(key))));
                    }
                }
                if num("slit_time") >= num("screen_time") {
                    out.push(("params", "screen_time", "screen_time must come after slit_time".into()));
                }
            }
            ScenarioKind::PrecessionConsistency => {
                let n = grid.len() as u32;
                if n > 4 || dim.checked_pow(n).is_none_or(|h| h > 256) {
                    out.push(("system", "grid", format!("{dim}^{n} histories is more than the 256 allowed")));
                }
            }
            ScenarioKind::ReproductionSweep => {
                let sphere = self.params["sphere"].as_bool() == Some(true);
                if sphere && !(2..=crate::phase_space::MAX_TWO_J + 1).contains(&dim) {
                    out.push(("system", "dim", "the sphere supports spin 1/2 to 4 (dim 2 to 9)".into()));
                }
                if !sphere && self.params["torus_dim"].is_null() {
                    out.push(("params", "sphere", "nothing to sweep: sphere is false and torus_dim is null".into()));
                }
                if let Some(d) = self.params["torus_dim"].as_u64() {
                    let d = d as usize;
                    if let Err(m) = self.system.rho.check(d) {
                        out.push(("system", "rho", format!("rho does not fit the torus_dim {d} sweep: {m}")));
                    }
                    if let Err(m) = self.system.hamiltonian.check(d) {
                        out.push(("system", "hamiltonian", format!("hamiltonian does not fit the torus_dim {d} sweep: {m}")));
                    }
                }
                if count("max_order") > 2 * grid.len() {
                    out.push(("params", "max_order", format!("max_order exceeds twice the {} grid times", grid.len())));
                }
            }
            ScenarioKind::NegativityMap => {
                if !(2..=crate::phase_space::MAX_TWO_J + 1).contains(&dim) {
                    out.push(("system", "dim", "the sphere supports spin 1/2 to 4 (dim 2 to 9)".into()));
                }
            }
            ScenarioKind::ConditioningDemo => {
                if grid.len() < 2 {
                    out.push(("system", "grid", "conditioning needs at least two grid times".into()));
                }
            }
            ScenarioKind::InferenceSearch => {
                if count("partitions") > 0 && grid.len() < 2 {
                    out.push(("system", "grid", "random partitions need at least two grid times".into()));
                }
            }
            ScenarioKind::AxiomAudit => {
                for d in self.audit_dims() {
                    if let Err(m) = self.system.rho.check(d) {
                        out.push(("params", "dims", format!("rho in dim {d}: {m}")));
                    }
                    if let Err(m) = self.system.hamiltonian.check(d) {
                        out.push(("params", "dims", format!("hamiltonian in dim {d}: {m}")));
                    }
                }
            }
        }
        out
    }

    pub(crate) fn audit_dims(&self) -> Vec<usize> {
        match self.params.get("dims").and_then(Value::as_array) {
            Some(items) => items.iter().filter_map(|d| d.as_u64()).map(|d| d as usize).collect(),
            None => vec![self.system.dim],
        }
    }

    /// Multiplies every tolerance in `[assert]` by `scale`.
    pub fn scale_tolerances(&mut self, scale: f64) {
        for key in assert_keys(self.scenario) {
            if matches!(key.check, Check::Tolerance) {
                if let Some(v) = self.assertions.get_mut(key.name) {
                    if let Some(x) = v.as_f64() {
                        *v = Value::from(x * scale);
                    }
                }
            }
        }
    }

    /// Directory name under the output root.
    pub fn output_subdir(&self) -> &str {
        self.output.path.as_deref().unwrap_or(self.scenario.name())
    }

    pub(crate) fn param(&self, key: &str) -> &Value {
        &self.params[key]
    }

    pub(crate) fn assertion(&self, key: &str) -> &Value {
        &self.assertions[key]
    }
}

fn check_path(p: &str) -> Result<(), String> {
    let path = std::path::Path::new(p);
    if p.is_empty() {
        return Err("path must not be empty".into());
    }
    if path.is_absolute() {
        return Err("path must be relative to the output directory".into());
    }
    if path.components().any(|c| !matches!(c, std::path::Component::Normal(_))) {
        return Err("path must not contain '..' or '.' components".into());
    }
    Ok(())
}

/// Human-readable listing of scenarios with their parameters and defaults.
pub fn list_scenarios() -> String {
    let mut out = String::new();
    for kind in ScenarioKind::ALL {
        out.push_str(&format!("{:<24}{}\n", kind.name(), kind.description()));
        for (section, keys) in [("params", param_keys(kind)), ("assert", assert_keys(kind))] {
            for k in keys {
                let setting = format!("[{section}] {} = {}", k.name, inline(&(k.default)()));
                out.push_str(&format!("    {setting:<40}{}\n", k.doc));
            }
        }
    }
    out
}
