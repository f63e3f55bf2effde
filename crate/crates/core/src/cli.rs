//! Command-line surface: argument parsing, dispatch and serialization.

use std::collections::BTreeSet;
use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::Error;
use crate::grover::{
    grover_abstract, grover_embedded, optimal_iterations, record_variant, rotation_params, success_probability,
    GroverVariant,
};
use crate::lab::{
    endpoint_entropy, entanglement_profile, format_sig9, recurrence_budget, recurrence_probe, sweep, write_csv,
    Variant, MAX_ENTROPY_SITES,
};
use crate::label::{Coords, RegisterSet};
use crate::machine::{BallastMode, Recording, TaskConfig, TaskMachine, TARIFF};
use crate::paths::{direct_element, enumerate_phase_paths, pathsum_element};
use crate::state::{entanglement_entropy, Budget, SparseState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Trace,
    Coherent,
    Grover,
    RecordDemo,
    PathsumVerify,
    Sweep,
    Entropy,
    Recurrence,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Trace => "trace",
            Command::Coherent => "coherent",
            Command::Grover => "grover",
            Command::RecordDemo => "record-demo",
            Command::PathsumVerify => "pathsum-verify",
            Command::Sweep => "sweep",
            Command::Entropy => "entropy",
            Command::Recurrence => "recurrence",
        }
    }

    fn formats(self) -> &'static [Format] {
        match self {
            Command::Trace => &[Format::Json, Format::Tsv],
            Command::Sweep | Command::RecordDemo | Command::Entropy => &[Format::Json, Format::Csv],
            _ => &[Format::Json],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Tsv,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Tsv => "tsv",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Iterations {
    Auto,
    Fixed(u64),
}

#[derive(Parser, Debug)]
#[command(name = "qrobot", version, about = "Quantum robot lattice search simulator")]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// Dimension, or a comma list for sweep.
    #[arg(long)]
    d: Option<String>,
    /// Side length (power of two), or a comma list for sweep.
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    target: Option<String>,
    #[arg(long)]
    memory: Option<String>,
    /// sign | record
    #[arg(long)]
    recording: Option<String>,
    /// cyclic:K | unbounded
    #[arg(long)]
    ballast: Option<String>,
    /// auto | INT
    #[arg(long)]
    iterations: Option<String>,
    #[arg(long)]
    snapshots: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Largest step count for pathsum-verify.
    #[arg(long)]
    steps: Option<u32>,
    /// Random label pairs per step count for pathsum-verify.
    #[arg(long)]
    pairs: Option<usize>,
    /// Step interval for the entropy profile.
    #[arg(long)]
    stride: Option<u64>,
    /// Grover placement (after_return | at_endpoint) or sweep variants.
    #[arg(long)]
    variant: Option<String>,
    /// Zero the ballast before each diffusion (non-physical diagnostic).
    #[arg(long)]
    disentangle: bool,
    #[arg(long)]
    seed: Option<u64>,
}

/// A fully parsed and validated invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub d: Vec<usize>,
    pub n: Vec<u32>,
    pub target: Option<Coords>,
    pub memory: Option<Coords>,
    pub recording: Option<Recording>,
    pub ballast: BallastMode,
    pub iterations: Iterations,
    pub snapshots: Option<Vec<u64>>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub steps: Option<u32>,
    pub pairs: Option<usize>,
    pub stride: Option<u64>,
    pub variant: Option<String>,
    pub disentangle: bool,
    pub seed: Option<u64>,
}

/// A failed run: machine-greppable kind, message and exit status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub kind: &'static str,
    pub message: String,
    pub status: i32,
}

impl CliError {
    fn parse(kind: &'static str, message: impl Into<String>) -> Self {
        CliError { kind, message: message.into(), status: 2 }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error: {}: {}", self.kind, self.message.replace('\n', " "))
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let (kind, status) = match &e {
            Error::NotPowerOfTwo(_) | Error::ElementCount(_) => ("n-not-power-of-two", 2),
            Error::TargetOutside { .. } => ("target-outside-region", 2),
            Error::InvalidConfig(_) => ("invalid-value", 2),
            Error::RecordingMismatch { .. } => ("recording-mismatch", 2),
            Error::Budget { .. } => ("budget-exceeded", 3),
            Error::Guard { .. } | Error::PathGuard { .. } => ("guard", 3),
            Error::Io(_) => ("io", 4),
            Error::NonInjective { .. } | Error::Underflow { .. } | Error::Overflow { .. } | Error::TooFewRows(_) => {
                ("dynamics", 3)
            }
        };
        CliError { kind, message: e.to_string(), status }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError { kind: "io", message: e.to_string(), status: 4 }
    }
}

fn parse_list<T: std::str::FromStr>(flag: &str, s: &str) -> Result<Vec<T>, CliError> {
    let items: Option<Vec<T>> = s.split(',').map(|p| p.trim().parse().ok()).collect();
    match items {
        Some(v) if !v.is_empty() => Ok(v),
        _ => Err(CliError::parse("malformed-vector", format!("--{flag} '{s}' is not a comma list of integers"))),
    }
}

fn parse_vector(flag: &str, s: &str) -> Result<Coords, CliError> {
    Coords::parse(s)
        .ok_or_else(|| CliError::parse("malformed-vector", format!("--{flag} '{s}' is not a comma list of integers")))
}

fn parse_ballast(s: &str) -> Result<BallastMode, CliError> {
    if s == "unbounded" {
        return Ok(BallastMode::Unbounded);
    }
    s.strip_prefix("cyclic:")
        .and_then(|k| k.parse::<u32>().ok())
        .filter(|k| (1..=62).contains(k))
        .map(BallastMode::Cyclic)
        .ok_or_else(|| CliError::parse("invalid-value", format!("--ballast '{s}': expected cyclic:K (1..=62) or unbounded")))
}

fn single<T: Copy + fmt::Display>(flag: &str, values: &[T]) -> Result<T, CliError> {
    match values {
        [v] => Ok(*v),
        _ => Err(CliError::parse("invalid-value", format!("--{flag} takes a single value for this command"))),
    }
}

/// Parses an argument list (without the program name).
pub fn parse_cli<I, S>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let args = Args::try_parse_from(std::iter::once("qrobot".into()).chain(argv.into_iter().map(Into::into)))
        .map_err(|e| {
            let kind = match e.kind() {
                ErrorKind::UnknownArgument => "unknown-flag",
                ErrorKind::MissingRequiredArgument => "missing-argument",
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => "help",
                ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => "missing-argument",
                _ => "invalid-value",
            };
            let status = if kind == "help" { 0 } else { 2 };
            let message = if kind == "help" {
                e.to_string()
            } else {
                e.to_string().lines().next().unwrap_or_default().trim_start_matches("error: ").to_string()
            };
            CliError { kind, message, status }
        })?;
    build_config(args)
}

fn build_config(a: Args) -> Result<RunConfig, CliError> {
    let command = a.command;
    let d: Vec<usize> = match &a.d {
        Some(s) => parse_list("d", s)?,
        None => vec![2],
    };
    let n: Vec<u32> = match &a.n {
        Some(s) => parse_list("n", s)?,
        None => vec![4],
    };
    if let Some(&bad) = d.iter().find(|&&d| d == 0 || d > 8) {
        return Err(CliError::parse("invalid-value", format!("--d {bad} outside 1..=8")));
    }
    if let Some(&bad) = n.iter().find(|&&n| n < 2 || !n.is_power_of_two() || n > 1 << 16) {
        return Err(CliError::parse("n-not-power-of-two", format!("--n {bad} is not a power of two >= 2")));
    }
    if command != Command::Sweep {
        single("d", &d)?;
        single("n", &n)?;
    }
    let target = a.target.as_deref().map(|s| parse_vector("target", s)).transpose()?;
    let memory = a.memory.as_deref().map(|s| parse_vector("memory", s)).transpose()?;
    for (flag, v) in [("target", &target), ("memory", &memory)] {
        if v.is_some() && command == Command::Sweep {
            return Err(CliError::parse("invalid-value", format!("--{flag} is not used by sweep")));
        }
        if let Some(v) = v {
            let (dd, nn) = (d[0], n[0]);
            if v.len() != dd || v.iter().any(|&c| c >= nn) {
                return Err(CliError::parse(
                    "target-outside-region",
                    format!("--{flag} {v} outside [0,{}]^{dd}", nn - 1),
                ));
            }
        }
    }
    let recording = match a.recording.as_deref() {
        None => None,
        Some("sign") => Some(Recording::SignFlip),
        Some("record") => Some(Recording::RecordQubit),
        Some(other) => {
            return Err(CliError::parse("invalid-value", format!("--recording '{other}': expected sign or record")))
        }
    };
    let ballast = a.ballast.as_deref().map(parse_ballast).transpose()?.unwrap_or(BallastMode::Unbounded);
    let iterations = match a.iterations.as_deref() {
        None | Some("auto") => Iterations::Auto,
        Some(s) => Iterations::Fixed(s.parse().map_err(|_| {
            CliError::parse("invalid-value", format!("--iterations '{s}': expected auto or a non-negative integer"))
        })?),
    };
    let snapshots = a.snapshots.as_deref().map(|s| parse_list("snapshots", s)).transpose()?;
    let format = a.format.unwrap_or(Format::Json);
    if !command.formats().contains(&format) {
        return Err(CliError::parse(
            "invalid-value",
            format!("--format {} is not available for {}", format.name(), command.name()),
        ));
    }
    if let Some(v) = &a.variant {
        match command {
            Command::Grover => {
                parse_grover_variant(v)?;
            }
            Command::Sweep => {
                parse_sweep_variants(v)?;
            }
            _ => return Err(CliError::parse("invalid-value", format!("--variant is not used by {}", command.name()))),
        }
    }
    if command == Command::Trace && memory.is_none() {
        return Err(CliError::parse("missing-argument", "trace requires --memory"));
    }
    if command == Command::RecordDemo && recording == Some(Recording::SignFlip) {
        return Err(CliError::parse("recording-mismatch", "record-demo requires --recording record"));
    }
    if matches!(command, Command::Grover) && recording == Some(Recording::RecordQubit) {
        return Err(CliError::parse("recording-mismatch", "grover requires --recording sign"));
    }
    if let Some(s) = a.steps {
        if s == 0 || s > crate::paths::MAX_PATH_STEPS {
            return Err(CliError::parse("invalid-value", format!("--steps {s} outside 1..=12")));
        }
    }
    Ok(RunConfig {
        command,
        d,
        n,
        target,
        memory,
        recording,
        ballast,
        iterations,
        snapshots,
        out: a.out,
        format,
        steps: a.steps,
        pairs: a.pairs,
        stride: a.stride,
        variant: a.variant,
        disentangle: a.disentangle,
        seed: a.seed,
    })
}

fn parse_grover_variant(s: &str) -> Result<GroverVariant, CliError> {
    match s {
        "after_return" => Ok(GroverVariant::AfterReturn),
        "at_endpoint" => Ok(GroverVariant::AtEndpoint),
        _ => Err(CliError::parse("invalid-value", format!("--variant '{s}': expected after_return or at_endpoint"))),
    }
}

fn parse_sweep_variants(s: &str) -> Result<Vec<Variant>, CliError> {
    s.split(',')
        .map(|p| p.trim().parse::<Variant>().map_err(|e| CliError::parse("invalid-value", e)))
        .collect()
}

fn join<T: fmt::Display>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    /// Arguments that parse back to this configuration.
    pub fn to_argv(&self) -> Vec<String> {
        let mut out = vec![self.command.name().to_string()];
        let mut push = |flag: &str, value: String| {
            out.push(format!("--{flag}"));
            out.push(value);
        };
        push("d", join(&self.d));
        push("n", join(&self.n));
        if let Some(t) = &self.target {
            push("target", t.to_string());
        }
        if let Some(m) = &self.memory {
            push("memory", m.to_string());
        }
        if let Some(r) = self.recording {
            push("recording", if r == Recording::SignFlip { "sign" } else { "record" }.into());
        }
        push("ballast", self.ballast.to_string());
        push(
            "iterations",
            match self.iterations {
                Iterations::Auto => "auto".into(),
                Iterations::Fixed(m) => m.to_string(),
            },
        );
        if let Some(s) = &self.snapshots {
            push("snapshots", join(s));
        }
        if let Some(p) = &self.out {
            push("out", p.display().to_string());
        }
        push("format", self.format.name().into());
        if let Some(s) = self.steps {
            push("steps", s.to_string());
        }
        if let Some(p) = self.pairs {
            push("pairs", p.to_string());
        }
        if let Some(s) = self.stride {
            push("stride", s.to_string());
        }
        if let Some(v) = &self.variant {
            push("variant", v.clone());
        }
        if let Some(s) = self.seed {
            push("seed", s.to_string());
        }
        if self.disentangle {
            out.push("--disentangle".into());
        }
        out
    }

    /// Task parameters for single-instance commands. The target defaults to
    /// the far corner.
    pub fn task(&self, default_recording: Recording) -> Result<TaskConfig, CliError> {
        let d = self.d[0];
        let n = self.n[0];
        let target = self.target.clone().unwrap_or_else(|| Coords::splat(d, n - 1));
        let config = TaskConfig::new(d, n, target)?
            .with_recording(self.recording.unwrap_or(default_recording))
            .with_ballast(self.ballast);
        config.validate()?;
        Ok(config)
    }

    fn echo(&self) -> Value {
        json!({
            "command": self.command.name(),
            "argv": self.to_argv(),
            "d": self.d,
            "n": self.n,
            "target": self.target.as_ref().map(|t| t.as_slice().to_vec()),
            "memory": self.memory.as_ref().map(|t| t.as_slice().to_vec()),
            "recording": self.recording,
            "ballast": self.ballast.to_string(),
            "format": self.format.name(),
        })
    }
}

fn provenance() -> Value {
    let tariff: serde_json::Map<String, Value> = TARIFF.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
    json!({
        "artifact": "qrobot",
        "version": env!("CARGO_PKG_VERSION"),
        "tariff_steps": tariff,
    })
}

fn document(config: &RunConfig, result: Value) -> Value {
    json!({ "config": config.echo(), "provenance": provenance(), "result": result })
}

fn coords_json(c: &Coords) -> Value {
    json!(c.as_slice())
}

fn trace(config: &RunConfig) -> Result<Vec<u8>, CliError> {
    let task = config.task(Recording::SignFlip)?;
    let machine = TaskMachine::build(task)?;
    let memory = config.memory.clone().expect("validated");
    let run = machine.run_component(&memory)?;
    let mut buf = Vec::new();
    if config.format == Format::Tsv {
        run.write_tsv(&mut buf)?;
        return Ok(buf);
    }
    let rows: Vec<Value> = run
        .trajectory
        .iter()
        .enumerate()
        .map(|(i, l)| {
            json!({
                "step": i,
                "phase": crate::machine::PhaseKind::of(l),
                "position": coords_json(&l.position),
                "comp": coords_json(&l.comp),
                "output": l.output.to_string(),
                "record": l.record,
                "ballast": l.ballast,
                "head": l.head.to_string(),
            })
        })
        .collect();
    let result = json!({
        "memory": coords_json(&memory),
        "steps_total": run.steps(),
        "ledger": run.ledger,
        "phase": [run.phase.re, run.phase.im],
        "trajectory": rows,
    });
    to_json(&document(config, result))
}

fn coherent(config: &RunConfig) -> Result<Vec<u8>, CliError> {
    let task = config.task(Recording::SignFlip)?;
    Budget::from_env().check(task.sites())?;
    let machine = TaskMachine::build(task.clone())?;
    let wanted: BTreeSet<u64> = config.snapshots.clone().unwrap_or_default().into_iter().collect();
    let run = machine.run_coherent(&wanted)?;
    let profile = machine.completion_profile()?;
    let keep = RegisterSet::memory();
    let snapshots: Vec<Value> = run
        .snapshots
        .iter()
        .map(|(t, s)| {
            json!({
                "step": t,
                "terms": s.len(),
                "memory_entropy_bits": entanglement_entropy(s, keep),
            })
        })
        .collect();
    let components: Vec<Value> = run
        .final_state
        .iter()
        .map(|(l, a)| {
            json!({
                "memory": coords_json(&l.memory),
                "completion_steps": profile[&l.memory],
                "ballast": l.ballast,
                "record": l.record,
                "amplitude": [a.re, a.im],
            })
        })
        .collect();
    let result = json!({
        "steps_total": run.ledger.total,
        "ledger": run.ledger,
        "final_memory_entropy_bits": entanglement_entropy(&run.final_state, keep),
        "components": components,
        "snapshots": snapshots,
    });
    to_json(&document(config, result))
}

fn grover(config: &RunConfig) -> Result<Vec<u8>, CliError> {
    let task = config.task(Recording::SignFlip)?;
    let elements = task.sites();
    Budget::from_env().check(elements)?;
    let m = match config.iterations {
        Iterations::Auto => optimal_iterations(elements),
        Iterations::Fixed(m) => m,
    };
    let variant = config.variant.as_deref().map(parse_grover_variant).transpose()?.unwrap_or(GroverVariant::AfterReturn);
    let (theta, beta) = rotation_params(elements);
    let target_index = task.flatten(&task.target);
    let (_, p_abstract) = grover_abstract(elements, target_index, m)?;
    let run = grover_embedded(&task, m, variant, config.disentangle)?;
    let result = json!({
        "M": elements,
        "target_index": target_index,
        "m": m,
        "theta": theta,
        "beta": beta,
        "probability_closed_form": success_probability(elements, m),
        "probability_abstract": p_abstract,
        "probability_measured": run.probability,
        "steps_total": run.ledger.total,
        "ledger": run.ledger,
        "variant": variant,
        "disentangle_diagnostic": config.disentangle,
        "non_physical": config.disentangle,
    });
    to_json(&document(config, result))
}

fn record_demo(config: &RunConfig) -> Result<Vec<u8>, CliError> {
    let task = config.task(Recording::RecordQubit)?;
    Budget::from_env().check(task.sites())?;
    let m_max = match config.iterations {
        Iterations::Auto => (4.0 * (task.sites() as f64).sqrt()).ceil() as u64,
        Iterations::Fixed(m) => m,
    };
    let points = record_variant(&task, m_max)?;
    if config.format == Format::Csv {
        let mut buf = Vec::new();
        writeln!(buf, "m,probability,steps_total")?;
        for p in &points {
            writeln!(buf, "{},{},{}", p.m, format_sig9(p.probability), p.steps_total)?;
        }
        return Ok(buf);
    }
    let max = points.iter().map(|p| p.probability).fold(0.0, f64::max);
    let result = json!({ "points": points, "max_probability": max });
    to_json(&document(config, result))
}

fn pathsum_verify(config: &RunConfig) -> Result<Vec<u8>, CliError> {
    let task = config.task(Recording::SignFlip)?;
    let machine = TaskMachine::build(task)?;
    let max_n = config.steps.unwrap_or(6);
    let pairs = config.pairs.unwrap_or(50);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.unwrap_or(1));
    let mut per_n = Vec::new();
    let mut worst: f64 = 0.0;
    for n in 1..=max_n {
        let paths = enumerate_phase_paths(n)?;
        let mut max_diff: f64 = 0.0;
        let mut nonzero = 0;
        for i in 0..pairs {
            let w_in = machine.random_label(&mut rng);
            let w_out = if i % 2 == 0 {
                let s = machine.run_steps(&SparseState::basis(w_in.clone()), n as u64)?;
                let image = s.labels().next().cloned();
                image.unwrap_or_else(|| w_in.clone())
            } else {
                machine.random_label(&mut rng)
            };
            let a = pathsum_element(&machine, &w_out, &w_in, n)?;
            let b = direct_element(&machine, &w_out, &w_in, n)?;
            if b.norm() > 0.5 {
                nonzero += 1;
            }
            max_diff = max_diff.max((a - b).norm());
        }
        worst = worst.max(max_diff);
        per_n.push(json!({
            "n": n,
            "paths_per_start_kind": paths.len() / 2,
            "pairs": pairs,
            "nonzero_elements": nonzero,
            "max_abs_difference": max_diff,
        }));
    }
    let result = json!({ "per_n": per_n, "max_abs_difference": worst, "agree": worst < 1e-10 });
    to_json(&document(config, result))
}

fn run_sweep(config: &RunConfig) -> Result<Vec<u8>, CliError> {
    let variants = match &config.variant {
        Some(v) => parse_sweep_variants(v)?,
        None => Variant::ALL.to_vec(),
    };
    let rows = sweep(&variants, &config.d, &config.n, Budget::from_env())?;
    for r in rows.iter().filter(|r| r.skipped.is_some()) {
        eprintln!("warning: skipped {} d={} N={}: {}", r.variant, r.d, r.n, r.skipped.as_deref().unwrap_or(""));
    }
    if config.format == Format::Csv {
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf)?;
        return Ok(buf);
    }
    let rows: Vec<Value> = rows
        .iter()
        .map(|r| {
            let mut v = serde_json::to_value(r).expect("row serializes");
            v["max_entropy_bits"] = json!(format_sig9(r.max_entropy_bits));
            v
        })
        .collect();
    to_json(&document(config, json!({ "rows": rows })))
}

fn entropy(config: &RunConfig) -> Result<Vec<u8>, CliError> {
    let task = config.task(Recording::SignFlip)?;
    if task.sites() > MAX_ENTROPY_SITES {
        return Err(Error::Budget { needed: task.sites(), limit: MAX_ENTROPY_SITES }.into());
    }
    let profile = entanglement_profile(&task, config.stride.unwrap_or(1))?;
    if config.format == Format::Csv {
        let mut buf = Vec::new();
        writeln!(buf, "step,entropy_bits")?;
        for (t, s) in &profile {
            writeln!(buf, "{t},{}", format_sig9(*s))?;
        }
        return Ok(buf);
    }
    let rows: Vec<Value> = profile.iter().map(|(t, s)| json!({ "step": t, "entropy_bits": s })).collect();
    let result = json!({
        "profile": rows,
        "endpoint_entropy_bits": endpoint_entropy(&task)?,
        "bound_bits": task.d as f64 * task.k() as f64,
    });
    to_json(&document(config, result))
}

fn recurrence(config: &RunConfig) -> Result<Vec<u8>, CliError> {
    let task = config.task(Recording::SignFlip)?;
    let memory = config.memory.clone().unwrap_or_else(|| Coords::zeros(task.d));
    let report = recurrence_probe(&task, &memory, recurrence_budget(&task)?)?;
    let result = json!({
        "memory": coords_json(&memory),
        "ballast": task.ballast.to_string(),
        "recurrence_step": report.recurrence_step,
        "steps_searched": report.steps_searched,
        "recurred": report.recurrence_step.is_some(),
    });
    to_json(&document(config, result))
}

fn to_json(v: &Value) -> Result<Vec<u8>, CliError> {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    Ok(s.into_bytes())
}

/// Runs a parsed configuration and writes its output.
pub fn execute(config: &RunConfig) -> Result<(), CliError> {
    let bytes = match config.command {
        Command::Trace => trace(config)?,
        Command::Coherent => coherent(config)?,
        Command::Grover => grover(config)?,
        Command::RecordDemo => record_demo(config)?,
        Command::PathsumVerify => pathsum_verify(config)?,
        Command::Sweep => run_sweep(config)?,
        Command::Entropy => entropy(config)?,
        Command::Recurrence => recurrence(config)?,
    };
    match &config.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            w.write_all(&bytes)?;
            w.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(&bytes)?;
        }
    }
    Ok(())
}

/// Parses and executes; returns the process exit status.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let result = parse_cli(argv).and_then(|c| execute(&c));
    match result {
        Ok(()) => 0,
        Err(e) if e.kind == "help" => {
            print!("{}", e.message);
            0
        }
        Err(e) => {
            eprintln!("{e}");
            e.status
        }
    }
}
