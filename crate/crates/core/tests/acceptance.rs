//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use qrobot::grover::{
    grover_abstract, grover_embedded, grover_schedule_ledger, grover_trace, optimal_iterations, record_variant,
    restricted_q_matrix, rotation_params, success_probability, GroverVariant,
};
use qrobot::lab::{
    endpoint_entropy, entanglement_profile, fit_scaling, recurrence_budget, recurrence_probe, select, sweep, Variant,
};
use qrobot::machine::{ActionMap, ComputationMap, LabelMap, Transition, ViolationKind};
use qrobot::paths::{direct_element, enumerate_phase_paths, pathsum_element};
use qrobot::state::Budget;
use qrobot::{BallastMode, ConfigLabel, Coords, Recording, SparseState, TaskConfig, TaskMachine};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn within(elapsed: Duration, limit_secs: u64, what: &str) -> Result<(), String> {
    if elapsed > Duration::from_secs(limit_secs) {
        return Err(format!("{what} took {:.1}s, budget {limit_secs}s", elapsed.as_secs_f64()));
    }
    Ok(())
}

fn ac1_grover_closed_form() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for elements in [4u64, 16, 64, 256, 1024] {
        let m_max = 2 * optimal_iterations(elements);
        let trace = grover_trace(elements, elements / 3, m_max).map_err(err)?;
        for (m, p) in trace.iter().enumerate() {
            worst = worst.max((p - success_probability(elements, m as u64)).abs());
        }
    }
    ensure!(worst < 1e-9, "max deviation {worst:e}");
    let (_, p) = grover_abstract(4, 2, 1).map_err(err)?;
    ensure!((p - 1.0).abs() < 1e-12, "M=4 m=1 probability {p}");
    within(start.elapsed(), 10, "closed-form sweep")?;
    Ok(format!("max |measured - closed form| = {worst:.1e}; M=4,m=1 -> {p:.15}"))
}

fn ac2_rotation_matrix() -> Outcome {
    let mut worst: f64 = 0.0;
    for elements in [4u64, 16, 64] {
        let q = restricted_q_matrix(elements, 1).map_err(err)?;
        let (theta, _) = rotation_params(elements);
        let expect = [[theta.cos(), theta.sin()], [-theta.sin(), theta.cos()]];
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((q[i][j] - expect[i][j]).abs());
            }
        }
    }
    ensure!(worst < 1e-12, "max entry deviation {worst:e}");
    Ok(format!("basis (omega, alpha), max entry deviation {worst:.1e}"))
}

fn ac3_path_sum() -> Outcome {
    let start = Instant::now();
    let machine = TaskMachine::build(TaskConfig::corner(1, 2).map_err(err)?).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    let mut nonzero = 0;
    for n in 1..=6u32 {
        let per_kind = enumerate_phase_paths(n).map_err(err)?.len() / 2;
        ensure!(per_kind == 1 << (n - 1), "n={n}: {per_kind} compositions");
        for i in 0..50 {
            let w_in = machine.random_label(&mut rng);
            let w_out = if i % 2 == 0 {
                let s = machine.run_steps(&SparseState::basis(w_in.clone()), n as u64).map_err(err)?;
                let image = s.labels().next().cloned();
                image.expect("unitary image")
            } else {
                machine.random_label(&mut rng)
            };
            let a = pathsum_element(&machine, &w_out, &w_in, n).map_err(err)?;
            let b = direct_element(&machine, &w_out, &w_in, n).map_err(err)?;
            if b.norm() > 0.5 {
                nonzero += 1;
            }
            worst = worst.max((a - b).norm());
        }
    }
    ensure!(worst < 1e-10, "max |pathsum - direct| = {worst:e}");
    within(start.elapsed(), 60, "path-sum check")?;
    Ok(format!("300 pairs, {nonzero} non-zero elements, max deviation {worst:.1e}"))
}

struct MovingComputation(ComputationMap, u32);

impl LabelMap for MovingComputation {
    fn apply(&self, label: &ConfigLabel) -> Transition {
        let mut t = self.0.apply(label);
        t.label.position[0] = (t.label.position[0] + 1) % self.1;
        t
    }
}

struct EditingAction(ActionMap, u32);

impl LabelMap for EditingAction {
    fn apply(&self, label: &ConfigLabel) -> Transition {
        let mut t = self.0.apply(label);
        t.label.memory[0] = (t.label.memory[0] + 1) % self.1;
        t
    }
}

fn ac4_commutation() -> Outcome {
    let mut checked = 0;
    for (d, n) in [(1usize, 2u32), (2, 2), (2, 4)] {
        let config = TaskConfig::corner(d, n).map_err(err)?;
        let machine = TaskMachine::build(config.clone()).map_err(err)?;
        let reach = machine.reachable_labels().map_err(err)?;
        let report = machine.verify_conds_on(&reach);
        ensure!(report.passed(), "d={d} N={n}: {} violations", report.violations.len());
        checked += report.checked;

        let moving = TaskMachine::with_maps(
            config.clone(),
            Arc::new(ActionMap::new(&config)),
            Arc::new(MovingComputation(ComputationMap::new(&config), n)),
        )
        .map_err(err)?;
        let caught = moving.verify_conds_on(&reach);
        ensure!(
            caught.violations.iter().any(|v| v.kind == ViolationKind::ComputationMovesRobot),
            "d={d} N={n}: moving computation map not caught"
        );

        let editing = TaskMachine::with_maps(
            config.clone(),
            Arc::new(EditingAction(ActionMap::new(&config), n)),
            Arc::new(ComputationMap::new(&config)),
        )
        .map_err(err)?;
        let caught = editing.verify_conds_on(&reach);
        ensure!(
            caught.violations.iter().any(|v| v.kind == ViolationKind::ActionEditsRegisters),
            "d={d} N={n}: memory-editing action map not caught"
        );
    }
    Ok(format!("{checked} reachable labels clean; both corruptions witnessed"))
}

fn ac5_coherent_scaling() -> Outcome {
    let rows = sweep(&[Variant::CoherentSearch], &[2], &[2, 4, 8, 16], Budget::unlimited()).map_err(err)?;
    let fit = fit_scaling(&rows).map_err(err)?;
    ensure!((fit.p_hat - 1.0).abs() <= 0.15, "p_hat = {:.4}", fit.p_hat);
    let steps: Vec<u64> = rows.iter().map(|r| r.steps_total).collect();
    Ok(format!("steps {steps:?}, p_hat = {:.4}", fit.p_hat))
}

fn ac6_parity_d2() -> Outcome {
    let rows = sweep(&[Variant::GroverAfterReturn, Variant::Classical], &[2], &[4, 8, 16], Budget::unlimited())
        .map_err(err)?;
    let grover = fit_scaling(&select(&rows, Variant::GroverAfterReturn, 2)).map_err(err)?;
    let classical = fit_scaling(&select(&rows, Variant::Classical, 2)).map_err(err)?;
    ensure!((grover.p_hat - 2.0).abs() <= 0.2, "grover p_hat = {:.4}", grover.p_hat);
    ensure!(
        (grover.p_hat - classical.p_hat).abs() <= 0.2,
        "grover {:.4} vs classical {:.4}",
        grover.p_hat,
        classical.p_hat
    );
    Ok(format!("grover p_hat = {:.4}, classical p_hat = {:.4}", grover.p_hat, classical.p_hat))
}

fn ac7_advantage_d3() -> Outcome {
    let start = Instant::now();
    let rows = sweep(&[Variant::GroverAfterReturn, Variant::Classical], &[3], &[2, 4, 8], Budget::unlimited())
        .map_err(err)?;
    let grover = fit_scaling(&select(&rows, Variant::GroverAfterReturn, 3)).map_err(err)?;
    let classical = fit_scaling(&select(&rows, Variant::Classical, 3)).map_err(err)?;
    ensure!((grover.p_hat - 2.5).abs() <= 0.25, "grover p_hat = {:.4}", grover.p_hat);
    ensure!((classical.p_hat - 3.0).abs() <= 0.2, "classical p_hat = {:.4}", classical.p_hat);
    // Evolve all 512 components of d=3, N=8 through the full Grover schedule.
    let config = TaskConfig::corner(3, 8).map_err(err)?;
    let m = optimal_iterations(config.sites());
    let run = grover_embedded(&config, m, GroverVariant::AfterReturn, true).map_err(err)?;
    let machine = TaskMachine::build(config.clone()).map_err(err)?;
    let scheduled = grover_schedule_ledger(&machine, m).map_err(err)?;
    ensure!(run.ledger == scheduled, "simulated ledger {:?} != schedule {:?}", run.ledger, scheduled);
    let closed = success_probability(config.sites(), m);
    ensure!((run.probability - closed).abs() < 1e-6, "d=3 N=8 probability {}", run.probability);
    within(start.elapsed(), 300, "d=3 sweep")?;
    Ok(format!(
        "grover p_hat = {:.4}, classical p_hat = {:.4}; d=3 N=8 m={m}: {} steps, p = {:.6}",
        grover.p_hat, classical.p_hat, run.ledger.total, run.probability
    ))
}

fn ac8_entanglement() -> Outcome {
    let config = TaskConfig::new(2, 4, Coords::from_slice(&[1, 2])).map_err(err)?;
    let profile = entanglement_profile(&config, 1).map_err(err)?;
    let first = profile[0];
    ensure!(first.0 == 0 && first.1.abs() < 1e-9, "entropy at step 0 = {}", first.1);
    let endpoint = endpoint_entropy(&config).map_err(err)?;
    ensure!((endpoint - 4.0).abs() < 1e-9, "endpoint entropy {endpoint}");
    let last = profile.last().expect("profile").1;
    ensure!(last > 1e-9, "entropy after return {last}");
    let (_, abstract_p) = grover_abstract(16, config.flatten(&config.target), 3).map_err(err)?;
    let honest = grover_embedded(&config, 3, GroverVariant::AfterReturn, false).map_err(err)?;
    ensure!(honest.probability < abstract_p, "honest {} vs abstract {abstract_p}", honest.probability);
    let flagged = grover_embedded(&config, 3, GroverVariant::AfterReturn, true).map_err(err)?;
    ensure!((flagged.probability - abstract_p).abs() < 1e-6, "diagnostic run {}", flagged.probability);
    Ok(format!(
        "S(0) = {:.1e}, S(endpoint) = {endpoint:.9}, S(returned) = {last:.4}; p honest = {:.6}, diagnostic = {:.6}, abstract = {abstract_p:.6}",
        first.1, honest.probability, flagged.probability
    ))
}

/// Largest target probability of the record-qubit variant at d=2, N=4.
const RECORD_MAX_PROBABILITY: f64 = 0.0625;

fn ac9_record_failure() -> Outcome {
    let config = TaskConfig::new(2, 4, Coords::from_slice(&[1, 2]))
        .map_err(err)?
        .with_recording(Recording::RecordQubit);
    let points = record_variant(&config, 16).map_err(err)?;
    ensure!((points[0].probability - 0.0625).abs() < 1e-15, "m=0 probability {}", points[0].probability);
    let max = points.iter().map(|p| p.probability).fold(0.0, f64::max);
    ensure!(max < 0.5, "max probability {max}");
    ensure!((max - RECORD_MAX_PROBABILITY).abs() < 1e-12, "max {max} drifted from regression constant");
    let worst_norm = points.iter().map(|p| (p.norm - 1.0).abs()).fold(0.0, f64::max);
    ensure!(worst_norm < 1e-12, "norm deviation {worst_norm:e}");
    Ok(format!("p(0) = {}, max over m<=16 = {max}, norm deviation {worst_norm:.1e}", points[0].probability))
}

fn ac10_recurrence() -> Outcome {
    let cyclic = TaskConfig::corner(1, 2).map_err(err)?.with_ballast(BallastMode::Cyclic(2));
    let zero = Coords::from_slice(&[0]);
    let budget = recurrence_budget(&cyclic).map_err(err)?;
    let a = recurrence_probe(&cyclic, &zero, budget).map_err(err)?;
    let b = recurrence_probe(&cyclic, &zero, budget).map_err(err)?;
    ensure!(a.recurrence_step.is_some(), "no recurrence within {budget} steps");
    ensure!(a == b, "runs disagree: {a:?} vs {b:?}");
    let unbounded = TaskConfig::corner(1, 2).map_err(err)?;
    let far = 1_000_000;
    let u = recurrence_probe(&unbounded, &zero, far).map_err(err)?;
    ensure!(u.recurrence_step.is_none(), "unbounded ballast recurred at {:?}", u.recurrence_step);
    Ok(format!("cyclic:2 recurs at step {}; unbounded: none in {far} steps", a.recurrence_step.unwrap()))
}

fn ac11_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(err)?;
    let mut outputs = Vec::new();
    for i in 0..2 {
        let path = dir.path().join(format!("rows{i}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_qrobot"))
            .args(["sweep", "--d", "2,3", "--n", "2,4,8", "--format", "csv", "--out"])
            .arg(&path)
            .status()
            .map_err(err)?;
        ensure!(status.success(), "sweep exited with {status}");
        outputs.push(std::fs::read(&path).map_err(err)?);
    }
    ensure!(outputs[0] == outputs[1], "sweep CSV differs between runs");
    let lines = outputs[0].iter().filter(|&&b| b == b'\n').count();
    Ok(format!("two runs byte-identical ({lines} lines)"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("AC1  grover closed form", ac1_grover_closed_form),
        ("AC2  rotation matrix", ac2_rotation_matrix),
        ("AC3  path-sum identity", ac3_path_sum),
        ("AC4  phase-routing conditions", ac4_commutation),
        ("AC5  coherent-search scaling", ac5_coherent_scaling),
        ("AC6  d=2 parity with classical", ac6_parity_d2),
        ("AC7  d=3 advantage", ac7_advantage_d3),
        ("AC8  entanglement obstruction", ac8_entanglement),
        ("AC9  record-qubit failure", ac9_record_failure),
        ("AC10 finite-ballast recurrence", ac10_recurrence),
        ("AC11 sweep determinism", ac11_determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {name} ({secs:.2}s): {detail}"),
            Err(reason) => {
                failed += 1;
                println!("FAIL {name} ({secs:.2}s): {reason}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 11 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
