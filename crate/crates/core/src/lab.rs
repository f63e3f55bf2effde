//! Step-count sweeps, scaling fits, the classical baseline, entanglement
//! profiles and ballast recurrence.

use std::collections::BTreeSet;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grover::{grover_schedule_ledger, optimal_iterations};
use crate::label::{ConfigLabel, Coords, RegisterSet};
use crate::machine::{BallastMode, StepKind, StepLedger, TaskConfig, TaskMachine};
use crate::state::{entanglement_entropy, entropy_bits, reduced_density, Budget};

/// Largest site count for which entropies are computed.
pub const MAX_ENTROPY_SITES: u64 = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    CoherentSearch,
    GroverAfterReturn,
    Classical,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::CoherentSearch, Variant::GroverAfterReturn, Variant::Classical];

    pub fn name(self) -> &'static str {
        match self {
            Variant::CoherentSearch => "coherent_search",
            Variant::GroverAfterReturn => "grover_after_return",
            Variant::Classical => "classical",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| format!("unknown variant '{s}'"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingRow {
    pub variant: Variant,
    pub d: usize,
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(rename = "M")]
    pub sites: u64,
    pub grover_iterations: u64,
    pub steps_total: u64,
    pub computation_steps: u64,
    pub action_steps: u64,
    pub carry_ops: u64,
    pub max_entropy_bits: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

impl ScalingRow {
    fn from_ledger(variant: Variant, config: &TaskConfig, ledger: StepLedger, entropy: f64) -> Self {
        ScalingRow {
            variant,
            d: config.d,
            n: config.n,
            sites: config.sites(),
            grover_iterations: ledger.grover_iterations,
            steps_total: ledger.total,
            computation_steps: ledger.computation_steps,
            action_steps: ledger.action_steps,
            carry_ops: ledger.carry_ops,
            max_entropy_bits: entropy,
            skipped: None,
        }
    }

    fn skipped(variant: Variant, d: usize, n: u32, reason: String) -> Self {
        ScalingRow {
            variant,
            d,
            n,
            sites: (n as u64).saturating_pow(d as u32),
            grover_iterations: 0,
            steps_total: 0,
            computation_steps: 0,
            action_steps: 0,
            carry_ops: 0,
            max_entropy_bits: f64::NAN,
            skipped: Some(reason),
        }
    }
}

/// A deterministic classical robot: a boustrophedon sweep over all sites.
///
/// At each site it looks (one step) and tests its site counter against the
/// last index (one comparison per counter qubit). Before the last site it
/// increments the counter (one step per carry) and moves one site. At the
/// last site it copies the found position into its memory. The target is
/// taken to sit at the last site visited, so the ledger is the worst case.
pub fn classical_baseline(config: &TaskConfig) -> StepLedger {
    let dk = config.d as u64 * config.k() as u64;
    let sites = config.sites();
    let mut ledger = StepLedger::default();
    for i in 0..sites {
        ledger.charge(StepKind::Look);
        for _ in 0..dk {
            ledger.charge(StepKind::Compare);
        }
        if i + 1 == sites {
            for _ in 0..dk {
                ledger.charge(StepKind::Copy);
            }
        } else {
            for _ in 0..1 + i.trailing_ones() {
                ledger.charge(StepKind::Carry);
            }
            ledger.charge(StepKind::Move);
        }
    }
    ledger
}

/// Steps to run every memory component's round trip one after another.
pub fn sequential_path_total(config: &TaskConfig) -> Result<u64> {
    let machine = TaskMachine::build(config.clone())?;
    Ok(machine.completion_profile()?.values().sum())
}

/// Largest memory entropy over every step of one coherent round.
pub fn round_max_entropy(machine: &TaskMachine) -> Result<f64> {
    let rounds = machine.round_length()?;
    let mut state = machine.initial_state();
    let keep = RegisterSet::memory();
    let mut best = entanglement_entropy(&state, keep);
    for _ in 0..rounds {
        state = machine.step(&state)?;
        best = best.max(entanglement_entropy(&state, keep));
    }
    Ok(best)
}

fn measure_row(variant: Variant, d: usize, n: u32, budget: Budget) -> Result<ScalingRow> {
    let config = TaskConfig::corner(d, n)?;
    let machine = TaskMachine::build(config.clone())?;
    let sites = config.sites();
    if variant != Variant::Classical {
        budget.check(sites)?;
    }
    let entropy = || -> Result<f64> {
        if sites <= MAX_ENTROPY_SITES {
            round_max_entropy(&machine)
        } else {
            Ok(f64::NAN)
        }
    };
    Ok(match variant {
        Variant::CoherentSearch => {
            let run = machine.run_coherent(&BTreeSet::new())?;
            ScalingRow::from_ledger(variant, &config, run.ledger, entropy()?)
        }
        Variant::GroverAfterReturn => {
            let ledger = grover_schedule_ledger(&machine, optimal_iterations(sites))?;
            ScalingRow::from_ledger(variant, &config, ledger, entropy()?)
        }
        Variant::Classical => ScalingRow::from_ledger(variant, &config, classical_baseline(&config), 0.0),
    })
}

/// One row per `(variant, d, n)`, in that nesting order. Rows whose state
/// would not fit the budget are returned marked as skipped.
pub fn sweep(variants: &[Variant], d_list: &[usize], n_list: &[u32], budget: Budget) -> Result<Vec<ScalingRow>> {
    for &n in n_list {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(n as u64));
        }
    }
    let jobs: Vec<(Variant, usize, u32)> = variants
        .iter()
        .flat_map(|&v| d_list.iter().flat_map(move |&d| n_list.iter().map(move |&n| (v, d, n))))
        .collect();
    jobs.into_par_iter()
        .map(|(v, d, n)| match measure_row(v, d, n, budget) {
            Err(Error::Budget { needed, limit }) => Ok(ScalingRow::skipped(
                v,
                d,
                n,
                format!("budget exceeded: need ~{needed} bytes, limit {limit} bytes"),
            )),
            other => other,
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScalingFit {
    pub p_hat: f64,
    pub intercept: f64,
    /// Largest relative deviation of a row from the fitted model.
    pub residual: f64,
}

/// Least-squares fit of `ln(steps / (log2 N + 1)) = p ln N + c`.
pub fn fit_scaling(rows: &[ScalingRow]) -> Result<ScalingFit> {
    let rows: Vec<&ScalingRow> = rows.iter().filter(|r| r.skipped.is_none()).collect();
    if rows.len() < 3 {
        return Err(Error::TooFewRows(rows.len()));
    }
    let points: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| {
            let n = r.n as f64;
            (n.ln(), (r.steps_total as f64 / (n.log2() + 1.0)).ln())
        })
        .collect();
    let count = points.len() as f64;
    let xbar = points.iter().map(|p| p.0).sum::<f64>() / count;
    let ybar = points.iter().map(|p| p.1).sum::<f64>() / count;
    let sxx: f64 = points.iter().map(|p| (p.0 - xbar).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - xbar) * (p.1 - ybar)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidConfig("scaling fit needs at least two distinct N".into()));
    }
    let p_hat = sxy / sxx;
    let intercept = ybar - p_hat * xbar;
    let residual = points
        .iter()
        .map(|&(x, y)| ((y - (p_hat * x + intercept)).exp() - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(ScalingFit { p_hat, intercept, residual })
}

/// Rows of one `(variant, d)` series.
pub fn select(rows: &[ScalingRow], variant: Variant, d: usize) -> Vec<ScalingRow> {
    rows.iter().filter(|r| r.variant == variant && r.d == d).cloned().collect()
}

fn check_entropy_size(config: &TaskConfig) -> Result<()> {
    let sites = config.sites();
    if sites > MAX_ENTROPY_SITES {
        let per = Budget::BYTES_PER_TERM;
        return Err(Error::Budget { needed: sites * sites * per, limit: MAX_ENTROPY_SITES * MAX_ENTROPY_SITES * per });
    }
    Ok(())
}

/// Memory entropy every `stride` steps of one coherent round, plus the last
/// step. Uses the dense reduced density matrix.
pub fn entanglement_profile(config: &TaskConfig, stride: u64) -> Result<Vec<(u64, f64)>> {
    check_entropy_size(config)?;
    let stride = stride.max(1);
    let machine = TaskMachine::build(config.clone())?;
    let rounds = machine.round_length()?;
    let mut state = machine.initial_state();
    let mut out = Vec::new();
    for t in 0..=rounds {
        if t % stride == 0 || t == rounds {
            out.push((t, entropy_bits(&reduced_density(&state, RegisterSet::memory()))));
        }
        if t < rounds {
            state = machine.step(&state)?;
        }
    }
    Ok(out)
}

/// Memory entropy with every component held at its endpoint hook.
pub fn endpoint_entropy(config: &TaskConfig) -> Result<f64> {
    check_entropy_size(config)?;
    let machine = TaskMachine::build(config.clone())?;
    let (state, _) = machine.run_to_endpoint(&machine.initial_state())?;
    Ok(entropy_bits(&reduced_density(&state, RegisterSet::memory())))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RecurrenceReport {
    /// First step at which the label equals its initial value.
    pub recurrence_step: Option<u64>,
    pub steps_searched: u64,
}

/// Default search length: four ballast periods of the longest round.
pub fn recurrence_budget(config: &TaskConfig) -> Result<u64> {
    let machine = TaskMachine::build(config.clone())?;
    let t_max = machine.round_length()?;
    Ok(match config.ballast {
        BallastMode::Cyclic(bits) => 4 * (1u64 << bits) * t_max,
        BallastMode::Unbounded => 4 * t_max * t_max,
    })
}

/// Follows one component past completion until its full label recurs.
pub fn recurrence_probe(config: &TaskConfig, memory: &Coords, budget: u64) -> Result<RecurrenceReport> {
    let machine = TaskMachine::build(config.clone())?;
    config.check_vector(memory)?;
    let start = ConfigLabel::start(memory.clone());
    let mut label = start.clone();
    for t in 1..=budget {
        label = machine.transition(&label).label;
        if label == start {
            return Ok(RecurrenceReport { recurrence_step: Some(t), steps_searched: t });
        }
    }
    Ok(RecurrenceReport { recurrence_step: None, steps_searched: budget })
}

/// `%.9g`-style formatting; NaN prints as `nan`.
pub fn format_sig9(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-4..9).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (8 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub const CSV_HEADER: &str =
    "variant,d,N,M,grover_iterations,steps_total,computation_steps,action_steps,carry_ops,max_entropy_bits";

/// Writes measured rows; skipped rows are left out.
pub fn write_csv<W: Write>(rows: &[ScalingRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows.iter().filter(|r| r.skipped.is_none()) {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            r.variant,
            r.d,
            r.n,
            r.sites,
            r.grover_iterations,
            r.steps_total,
            r.computation_steps,
            r.action_steps,
            r.carry_ops,
            format_sig9(r.max_entropy_bits)
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(n: u32, steps: u64) -> ScalingRow {
        let config = TaskConfig::corner(2, n).unwrap();
        let ledger = StepLedger { total: steps, ..Default::default() };
        ScalingRow::from_ledger(Variant::Classical, &config, ledger, 0.0)
    }

    fn popcount_sum(x: u64) -> u64 {
        2 * x - x.count_ones() as u64
    }

    #[test]
    fn classical_matches_closed_form() {
        for (d, n) in [(1, 2), (2, 2), (2, 4), (2, 8), (3, 4)] {
            let c = TaskConfig::corner(d, n).unwrap();
            let sites = c.sites();
            let dk = d as u64 * c.k() as u64;
            let expect = sites * (1 + dk) + popcount_sum(sites - 1) + (sites - 1) + dk;
            let l = classical_baseline(&c);
            assert_eq!(l.total, expect);
            assert_eq!(l.total, l.computation_steps + l.action_steps);
            assert_eq!(l.action_steps, sites - 1);
        }
    }

    #[test]
    fn sequential_total_is_sum_of_components() {
        let c = TaskConfig::corner(1, 2).unwrap();
        let m = TaskMachine::build(c.clone()).unwrap();
        let p = m.completion_profile().unwrap();
        let t0 = p[&Coords::from_slice(&[0])];
        let t1 = p[&Coords::from_slice(&[1])];
        assert_eq!(sequential_path_total(&c).unwrap(), t0 + t1);
        let c = TaskConfig::corner(2, 4).unwrap();
        let round = TaskMachine::build(c.clone()).unwrap().round_length().unwrap();
        assert!(sequential_path_total(&c).unwrap() >= round);
    }

    #[test]
    fn fit_recovers_exact_model() {
        let rows: Vec<ScalingRow> = [2u32, 4, 8, 16]
            .iter()
            .map(|&n| {
                let v = 7.0 * (n as f64).powi(2) * ((n as f64).log2() + 1.0);
                row(n, v.round() as u64)
            })
            .collect();
        let fit = fit_scaling(&rows).unwrap();
        assert!((fit.p_hat - 2.0).abs() < 1e-6);
        assert!(fit.residual < 1e-6);
        assert!(matches!(fit_scaling(&rows[..2]), Err(Error::TooFewRows(2))));
    }

    #[test]
    fn sig9_formatting() {
        assert_eq!(format_sig9(4.0), "4");
        assert_eq!(format_sig9(0.5053605102841573), "0.50536051");
        assert_eq!(format_sig9(1234567891.0), "1.23456789e+09");
        assert_eq!(format_sig9(0.000012345), "1.2345e-05");
        assert_eq!(format_sig9(f64::NAN), "nan");
        assert_eq!(format_sig9(0.0), "0");
        assert_eq!(format_sig9(3.9999999999), "4");
    }

    #[test]
    fn variant_names_round_trip() {
        for v in Variant::ALL {
            assert_eq!(v.name().parse::<Variant>().unwrap(), v);
        }
        assert!("grover".parse::<Variant>().is_err());
    }

    #[test]
    fn profile_starts_pure_and_peaks_at_endpoint() {
        let c = TaskConfig::new(2, 4, Coords::from_slice(&[1, 2])).unwrap();
        let profile = entanglement_profile(&c, 1).unwrap();
        assert_eq!(profile[0], (0, profile[0].1));
        assert!(profile[0].1.abs() < 1e-9);
        assert!((endpoint_entropy(&c).unwrap() - 4.0).abs() < 1e-9);
        let last = profile.last().unwrap().1;
        assert!(last > 1e-6);
        let bound = 4.0 + 1e-9;
        assert!(profile.iter().all(|&(_, s)| s <= bound));
    }

    #[test]
    fn recurrence_with_cyclic_ballast() {
        let c = TaskConfig::corner(1, 2).unwrap().with_ballast(BallastMode::Cyclic(2));
        let budget = recurrence_budget(&c).unwrap();
        let zero = Coords::from_slice(&[0]);
        let a = recurrence_probe(&c, &zero, budget).unwrap();
        let b = recurrence_probe(&c, &zero, budget).unwrap();
        assert_eq!(a, b);
        let m = TaskMachine::build(c.clone()).unwrap();
        let t0 = m.run_component(&zero).unwrap().steps();
        assert_eq!(a.recurrence_step, Some(t0 + 4));

        let u = TaskConfig::corner(1, 2).unwrap();
        let r = recurrence_probe(&u, &zero, 10_000).unwrap();
        assert_eq!(r.recurrence_step, None);
    }

    #[test]
    fn csv_layout() {
        let rows = vec![row(4, 10)];
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER);
        assert_eq!(lines.next().unwrap(), "classical,2,4,16,0,10,0,0,0,0");
    }
}
