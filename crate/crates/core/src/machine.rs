//! The search task: phase-routed step operator, the on-board micro-program,
//! and step accounting.
//!
//! Every application of the step operator is one elementary step. With the
//! control bit set the computation map advances the program head by one
//! primitive (copy one qubit, compare one qubit pair, propagate one borrow or
//! carry, look, or bump the ballast); with it cleared the action map moves
//! the robot one site in the direction named by the output symbol and hands
//! control back.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::label::{ConfigLabel, Coords, HeadState, Output};
use crate::state::SparseState;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Recording {
    SignFlip,
    RecordQubit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BallastMode {
    /// Counter of the given number of qubits, wrapping modulo 2^qubits.
    Cyclic(u32),
    Unbounded,
}

impl fmt::Display for BallastMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BallastMode::Cyclic(k) => write!(f, "cyclic:{k}"),
            BallastMode::Unbounded => f.write_str("unbounded"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaskConfig {
    pub d: usize,
    pub n: u32,
    pub target: Coords,
    pub recording: Recording,
    pub ballast: BallastMode,
}

impl TaskConfig {
    /// Sign-flip recording, unbounded ballast.
    pub fn new(d: usize, n: u32, target: Coords) -> Result<Self> {
        let config = TaskConfig {
            d,
            n,
            target,
            recording: Recording::SignFlip,
            ballast: BallastMode::Unbounded,
        };
        config.validate()?;
        Ok(config)
    }

    /// Target in the far corner, all coordinates `n - 1`.
    pub fn corner(d: usize, n: u32) -> Result<Self> {
        Self::new(d, n, Coords::splat(d, n.saturating_sub(1)))
    }

    pub fn with_recording(mut self, recording: Recording) -> Self {
        self.recording = recording;
        self
    }

    pub fn with_ballast(mut self, ballast: BallastMode) -> Self {
        self.ballast = ballast;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.d > 8 {
            return Err(Error::InvalidConfig(format!("dimension {} outside 1..=8", self.d)));
        }
        if self.n < 2 || !self.n.is_power_of_two() || self.n > 1 << 16 {
            return Err(Error::NotPowerOfTwo(self.n as u64));
        }
        if self.target.len() != self.d || self.target.iter().any(|&c| c >= self.n) {
            return Err(Error::TargetOutside {
                target: self.target.to_string(),
                max: self.n as u64 - 1,
                d: self.d,
            });
        }
        if let BallastMode::Cyclic(k) = self.ballast {
            if k == 0 || k > 62 {
                return Err(Error::InvalidConfig(format!("cyclic ballast width {k} outside 1..=62")));
            }
        }
        Ok(())
    }

    /// Bits per register axis.
    pub fn k(&self) -> u32 {
        self.n.trailing_zeros()
    }

    /// Number of lattice sites, `n^d`.
    pub fn sites(&self) -> u64 {
        (self.n as u64).pow(self.d as u32)
    }

    /// Step cap for one component run.
    pub fn guard(&self) -> u64 {
        64 * self.d as u64 * self.n as u64 * (self.k() as u64 + 2)
    }

    /// Every d-vector in `[0, n-1]^d`, first axis most significant.
    pub fn all_vectors(&self) -> Vec<Coords> {
        let total = self.sites();
        (0..total).map(|i| self.unflatten(i)).collect()
    }

    pub fn unflatten(&self, mut index: u64) -> Coords {
        let mut out = Coords::zeros(self.d);
        for axis in (0..self.d).rev() {
            out[axis] = (index % self.n as u64) as u32;
            index /= self.n as u64;
        }
        out
    }

    pub fn flatten(&self, c: &Coords) -> u64 {
        c.iter().fold(0u64, |acc, &v| acc * self.n as u64 + v as u64)
    }

    pub fn check_vector(&self, c: &Coords) -> Result<()> {
        if c.len() != self.d || c.iter().any(|&v| v >= self.n) {
            return Err(Error::TargetOutside {
                target: c.to_string(),
                max: self.n as u64 - 1,
                d: self.d,
            });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseKind {
    Computation,
    Action,
}

impl PhaseKind {
    pub fn of(label: &ConfigLabel) -> Self {
        if label.control {
            PhaseKind::Computation
        } else {
            PhaseKind::Action
        }
    }

    pub fn control(self) -> bool {
        self == PhaseKind::Computation
    }
}

impl fmt::Display for PhaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PhaseKind::Computation => "computation",
            PhaseKind::Action => "action",
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct StepLedger {
    pub total: u64,
    pub computation_steps: u64,
    pub action_steps: u64,
    pub carry_ops: u64,
    pub grover_iterations: u64,
}

impl StepLedger {
    pub fn charge(&mut self, kind: StepKind) {
        self.total += 1;
        match kind {
            StepKind::Move => self.action_steps += 1,
            StepKind::Borrow | StepKind::Carry => {
                self.computation_steps += 1;
                self.carry_ops += 1;
            }
            _ => self.computation_steps += 1,
        }
    }

    /// Computation steps not tied to a single primitive (diffusion, looks).
    pub fn charge_computation(&mut self, steps: u64) {
        self.total += steps;
        self.computation_steps += steps;
    }

    pub fn add(&mut self, other: &StepLedger) {
        self.total += other.total;
        self.computation_steps += other.computation_steps;
        self.action_steps += other.action_steps;
        self.carry_ops += other.carry_ops;
        self.grover_iterations += other.grover_iterations;
    }

    pub fn times(&self, m: u64) -> StepLedger {
        StepLedger {
            total: self.total * m,
            computation_steps: self.computation_steps * m,
            action_steps: self.action_steps * m,
            carry_ops: self.carry_ops * m,
            grover_iterations: self.grover_iterations * m,
        }
    }
}

/// The primitive executed by one step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StepKind {
    Copy,
    Compare,
    Borrow,
    Carry,
    Move,
    Look,
    Ballast,
}

/// Step charges per primitive, reported with every result.
pub const TARIFF: [(&str, u64); 8] = [
    ("copy_qubit", 1),
    ("compare_qubit_pair", 1),
    ("borrow_propagation", 1),
    ("carry_propagation", 1),
    ("move_one_site", 1),
    ("look", 1),
    ("ballast_increment", 1),
    ("diffusion_per_memory_qubit", 1),
];

#[derive(Clone, Debug, PartialEq)]
pub struct Transition {
    pub label: ConfigLabel,
    pub phase: Complex64,
    pub kind: StepKind,
}

/// A single-label component of the step operator.
pub trait LabelMap: Send + Sync {
    fn apply(&self, label: &ConfigLabel) -> Transition;
}

/// The action-phase map: move one site per the output symbol, then hand
/// control to the computation phase.
#[derive(Clone, Debug)]
pub struct ActionMap {
    n: u32,
}

impl ActionMap {
    pub fn new(config: &TaskConfig) -> Self {
        ActionMap { n: config.n }
    }
}

impl LabelMap for ActionMap {
    fn apply(&self, label: &ConfigLabel) -> Transition {
        let mut next = label.clone();
        if let Some((axis, plus)) = label.output.direction() {
            let p = next.position[axis];
            next.position[axis] = if plus { (p + 1) % self.n } else { (p + self.n - 1) % self.n };
        }
        next.control = true;
        Transition { label: next, phase: ONE, kind: StepKind::Move }
    }
}

/// The computation-phase map: one primitive of the on-board program.
#[derive(Clone, Debug)]
pub struct ComputationMap {
    d: u8,
    k: u8,
    target: Coords,
    recording: Recording,
    ballast: BallastMode,
}

impl ComputationMap {
    pub fn new(config: &TaskConfig) -> Self {
        ComputationMap {
            d: config.d as u8,
            k: config.k() as u8,
            target: config.target.clone(),
            recording: config.recording,
            ballast: config.ballast,
        }
    }

    fn copy_bit(next: &mut ConfigLabel, a: u8, j: u8) {
        let a = a as usize;
        next.comp[a] ^= next.memory[a] & (1 << j);
    }
}

impl LabelMap for ComputationMap {
    fn apply(&self, label: &ConfigLabel) -> Transition {
        let (d, k) = (self.d, self.k);
        let mut next = label.clone();
        let mut phase = ONE;
        let kind;
        match label.head {
            HeadState::Copy { axis, bit } | HeadState::Uncopy { axis, bit } => {
                Self::copy_bit(&mut next, axis, bit);
                let copying = matches!(label.head, HeadState::Copy { .. });
                next.head = if bit + 1 < k {
                    if copying {
                        HeadState::Copy { axis, bit: bit + 1 }
                    } else {
                        HeadState::Uncopy { axis, bit: bit + 1 }
                    }
                } else if axis + 1 < d {
                    if copying {
                        HeadState::Copy { axis: axis + 1, bit: 0 }
                    } else {
                        HeadState::Uncopy { axis: axis + 1, bit: 0 }
                    }
                } else if copying {
                    HeadState::OutScan { axis: 0, bit: 0 }
                } else {
                    HeadState::Ballast
                };
                kind = StepKind::Copy;
            }
            HeadState::OutScan { axis, bit } => {
                let a = axis as usize;
                // A pending move has completed once comp differs from memory.
                if bit == 0 && label.comp[a] != label.memory[a] {
                    next.output = next.output.swapped(Output::Dn, Output::Plus(axis));
                }
                next.head = if bit + 1 < k {
                    HeadState::OutScan { axis, bit: bit + 1 }
                } else if label.comp[a] != 0 {
                    HeadState::Dec { axis, bit: 0 }
                } else if axis + 1 < d {
                    HeadState::OutScan { axis: axis + 1, bit: 0 }
                } else {
                    next.output = next.output.swapped(Output::Dn, Output::Look);
                    HeadState::Look
                };
                kind = StepKind::Compare;
            }
            HeadState::Dec { axis, bit } => {
                let a = axis as usize;
                let was_set = label.comp[a] >> bit & 1 == 1;
                next.comp[a] ^= 1 << bit;
                if was_set || bit + 1 == k {
                    next.output = next.output.swapped(Output::Dn, Output::Plus(axis));
                    next.control = false;
                    next.head = HeadState::OutScan { axis, bit: 0 };
                } else {
                    next.head = HeadState::Dec { axis, bit: bit + 1 };
                }
                kind = StepKind::Borrow;
            }
            HeadState::Look => {
                if label.position == self.target {
                    match self.recording {
                        Recording::SignFlip => phase = -ONE,
                        Recording::RecordQubit => next.record = !next.record,
                    }
                }
                next.output = next.output.swapped(Output::Look, Output::Dn);
                next.head = HeadState::RetScan { axis: d - 1, bit: 0 };
                kind = StepKind::Look;
            }
            HeadState::RetScan { axis, bit } => {
                let a = axis as usize;
                if bit == 0 && label.comp[a] != 0 {
                    next.output = next.output.swapped(Output::Dn, Output::Minus(axis));
                }
                next.head = if bit + 1 < k {
                    HeadState::RetScan { axis, bit: bit + 1 }
                } else if label.comp[a] != label.memory[a] {
                    HeadState::Inc { axis, bit: 0 }
                } else if axis > 0 {
                    HeadState::RetScan { axis: axis - 1, bit: 0 }
                } else {
                    HeadState::Uncopy { axis: 0, bit: 0 }
                };
                kind = StepKind::Compare;
            }
            HeadState::Inc { axis, bit } => {
                let a = axis as usize;
                let was_clear = label.comp[a] >> bit & 1 == 0;
                next.comp[a] ^= 1 << bit;
                if was_clear || bit + 1 == k {
                    next.output = next.output.swapped(Output::Dn, Output::Minus(axis));
                    next.control = false;
                    next.head = HeadState::RetScan { axis, bit: 0 };
                } else {
                    next.head = HeadState::Inc { axis, bit: bit + 1 };
                }
                kind = StepKind::Carry;
            }
            HeadState::Ballast => {
                match self.ballast {
                    BallastMode::Unbounded => next.ballast = label.ballast.wrapping_add(1),
                    BallastMode::Cyclic(bits) => {
                        next.ballast = (label.ballast + 1) & ((1u64 << bits) - 1);
                        if next.ballast == 0 {
                            next.head = HeadState::START;
                        }
                    }
                }
                kind = StepKind::Ballast;
            }
        }
        Transition { label: next, phase, kind }
    }
}

/// `(value - 1, borrows)` where `borrows = 1 + trailing zeros of value`.
pub fn decrement(value: u64, width: u32) -> Result<(u64, u32)> {
    if value == 0 {
        return Err(Error::Underflow { width });
    }
    Ok((value - 1, 1 + value.trailing_zeros()))
}

/// `(value + 1, carries)` where `carries = 1 + trailing ones of value`.
pub fn increment(value: u64, width: u32) -> Result<(u64, u32)> {
    if width < 64 && value + 1 >= 1u64 << width {
        return Err(Error::Overflow { width });
    }
    Ok((value + 1, 1 + value.trailing_ones()))
}

/// Result of running one memory component to completion.
#[derive(Clone, Debug)]
pub struct ComponentRun {
    /// Labels at steps `0..=T`.
    pub trajectory: Vec<ConfigLabel>,
    /// Accumulated phase of the component.
    pub phase: Complex64,
    pub ledger: StepLedger,
}

impl ComponentRun {
    pub fn steps(&self) -> u64 {
        self.ledger.total
    }

    pub fn final_label(&self) -> &ConfigLabel {
        self.trajectory.last().expect("trajectory holds the start label")
    }

    /// Tab-separated trajectory: step, phase kind, position, comp, output, ballast.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (step, l) in self.trajectory.iter().enumerate() {
            writeln!(
                w,
                "{step}\t{}\t{}\t{}\t{}\t{}",
                PhaseKind::of(l),
                l.position,
                l.comp,
                l.output,
                l.ballast
            )?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct CoherentRun {
    pub final_state: SparseState,
    pub snapshots: Vec<(u64, SparseState)>,
    pub ledger: StepLedger,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    ComputationMovesRobot,
    ActionChangesOutput,
    ActionEditsRegisters,
}

#[derive(Clone, Debug)]
pub struct Violation {
    pub kind: ViolationKind,
    pub label: ConfigLabel,
}

#[derive(Clone, Debug, Default)]
pub struct CondsReport {
    pub checked: usize,
    pub violations: Vec<Violation>,
}

impl CondsReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Clone)]
pub struct TaskMachine {
    pub config: TaskConfig,
    pub gamma_a: Arc<dyn LabelMap>,
    pub gamma_c: Arc<dyn LabelMap>,
}

impl fmt::Debug for TaskMachine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TaskMachine").field("config", &self.config).finish_non_exhaustive()
    }
}

impl TaskMachine {
    pub fn build(config: TaskConfig) -> Result<Self> {
        config.validate()?;
        Ok(TaskMachine {
            gamma_a: Arc::new(ActionMap::new(&config)),
            gamma_c: Arc::new(ComputationMap::new(&config)),
            config,
        })
    }

    /// Machine with caller-supplied phase maps.
    pub fn with_maps(config: TaskConfig, gamma_a: Arc<dyn LabelMap>, gamma_c: Arc<dyn LabelMap>) -> Result<Self> {
        config.validate()?;
        Ok(TaskMachine { config, gamma_a, gamma_c })
    }

    /// Routes a basis label through the map selected by its control bit.
    pub fn transition(&self, label: &ConfigLabel) -> Transition {
        if label.control {
            self.gamma_c.apply(label)
        } else {
            self.gamma_a.apply(label)
        }
    }

    pub fn step(&self, state: &SparseState) -> Result<SparseState> {
        state.apply_component_map(|l| {
            let t = self.transition(l);
            (t.label, t.phase)
        })
    }

    /// One application of `Gamma P^c_kind`: terms in the other phase are dropped.
    pub fn step_projected(&self, state: &SparseState, kind: PhaseKind) -> Result<SparseState> {
        let part = SparseState::from_terms(
            state
                .iter()
                .filter(|(l, _)| PhaseKind::of(l) == kind)
                .map(|(l, a)| (l.clone(), *a)),
        );
        self.step(&part)
    }

    pub fn initial_label(&self, memory: Coords) -> ConfigLabel {
        ConfigLabel::start(memory)
    }

    /// Uniform memory superposition, prepared by Walsh-Hadamard on `|0>_m`.
    pub fn initial_state(&self) -> SparseState {
        let start = ConfigLabel::start(Coords::zeros(self.config.d));
        SparseState::basis(start).walsh_hadamard(self.config.d, self.config.k())
    }

    /// Runs one memory component from the start label until the program
    /// enters ballast stepping.
    pub fn run_component(&self, memory: &Coords) -> Result<ComponentRun> {
        self.config.check_vector(memory)?;
        let start = self.initial_label(memory.clone());
        self.run_label_until(start, |l| l.head == HeadState::Ballast)
    }

    /// Runs one component until the endpoint hook: the step right after look.
    pub fn run_component_to_endpoint(&self, memory: &Coords) -> Result<ComponentRun> {
        self.config.check_vector(memory)?;
        let start = self.initial_label(memory.clone());
        self.run_label_until(start, |l| self.at_endpoint(l))
    }

    /// True exactly on the label produced by the look step.
    pub fn at_endpoint(&self, label: &ConfigLabel) -> bool {
        label.control
            && label.head == HeadState::RetScan { axis: self.config.d as u8 - 1, bit: 0 }
            && label.comp.is_zero()
            && label.output == Output::Dn
    }

    fn run_label_until<F>(&self, start: ConfigLabel, done: F) -> Result<ComponentRun>
    where
        F: Fn(&ConfigLabel) -> bool,
    {
        let guard = self.config.guard();
        let mut ledger = StepLedger::default();
        let mut phase = ONE;
        let mut trajectory = vec![start];
        loop {
            let current = trajectory.last().unwrap();
            if done(current) && ledger.total > 0 {
                break;
            }
            if ledger.total >= guard {
                return Err(Error::Guard { limit: guard });
            }
            let t = self.transition(current);
            ledger.charge(t.kind);
            phase *= t.phase;
            trajectory.push(t.label);
        }
        Ok(ComponentRun { trajectory, phase, ledger })
    }

    /// Completion step count for every memory value, in lexicographic order.
    pub fn completion_profile(&self) -> Result<BTreeMap<Coords, u64>> {
        self.config
            .all_vectors()
            .into_par_iter()
            .map(|m| self.run_component(&m).map(|r| (m, r.steps())))
            .collect()
    }

    /// The slowest component's run; its length is the round length.
    pub fn critical_run(&self) -> Result<ComponentRun> {
        let profile = self.completion_profile()?;
        let (slowest, _) = profile
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
            .expect("region is non-empty");
        self.run_component(slowest)
    }

    /// Global step count for one full search round.
    pub fn round_length(&self) -> Result<u64> {
        Ok(self.critical_run()?.steps())
    }

    /// Evolves the uniform memory superposition for one full round.
    ///
    /// The round lasts as long as the slowest component; components that
    /// finish earlier keep stepping their ballast. Snapshot indices beyond
    /// the round are ignored. The ledger reports the global step count and
    /// the per-kind counts of the slowest component.
    pub fn run_coherent(&self, snapshots: &BTreeSet<u64>) -> Result<CoherentRun> {
        let critical = self.critical_run()?;
        let rounds = critical.steps();
        let mut state = self.initial_state();
        let mut taken = Vec::new();
        for t in 0..=rounds {
            if snapshots.contains(&t) {
                taken.push((t, state.clone()));
            }
            if t < rounds {
                state = self.step(&state)?;
            }
        }
        Ok(CoherentRun { final_state: state, snapshots: taken, ledger: critical.ledger })
    }

    /// Applies `steps` global steps.
    pub fn run_steps(&self, state: &SparseState, steps: u64) -> Result<SparseState> {
        let mut state = state.clone();
        for _ in 0..steps {
            state = self.step(&state)?;
        }
        Ok(state)
    }

    /// Runs each term to the endpoint hook separately, assembling the state
    /// in which every component sits just after its look. Returns the global
    /// step count (the slowest component's) alongside.
    pub fn run_to_endpoint(&self, state: &SparseState) -> Result<(SparseState, StepLedger)> {
        let mut worst = StepLedger::default();
        let mut terms = Vec::with_capacity(state.len());
        for (label, amp) in state.iter() {
            let run = self.run_label_until(label.clone(), |l| self.at_endpoint(l))?;
            if run.ledger.total > worst.total {
                worst = run.ledger;
            }
            terms.push((run.final_label().clone(), run.phase * amp));
        }
        let out = SparseState::from_terms(terms);
        if (out.norm_sqr() - state.norm_sqr()).abs() > 1e-9 {
            return Err(Error::NonInjective { label: "endpoint assembly".into() });
        }
        Ok((out, worst))
    }

    /// Steps the whole state until every term is ballast stepping.
    pub fn resume(&self, state: &SparseState) -> Result<(SparseState, StepLedger)> {
        let guard = self.config.guard();
        let mut state = state.clone();
        let mut ledger = StepLedger::default();
        while state.labels().any(|l| l.head != HeadState::Ballast) {
            if ledger.total >= guard {
                return Err(Error::Guard { limit: guard });
            }
            state = self.step(&state)?;
            ledger.charge_computation(1);
        }
        Ok((state, ledger))
    }

    /// The look primitive applied in place at the endpoint hook.
    pub fn local_look(&self, state: &SparseState) -> Result<SparseState> {
        let target = &self.config.target;
        match self.config.recording {
            Recording::SignFlip => Ok(state.apply_phase(|l| if &l.position == target { -ONE } else { ONE })),
            Recording::RecordQubit => state.apply_component_map(|l| {
                let mut next = l.clone();
                if &l.position == target {
                    next.record = !next.record;
                }
                (next, ONE)
            }),
        }
    }

    /// Points every ballast-stepping term back at the program start, keeping
    /// its ballast value.
    pub fn restart(&self, state: &SparseState) -> Result<SparseState> {
        state.apply_component_map(|l| {
            let mut next = l.clone();
            if next.head == HeadState::Ballast {
                next.head = HeadState::START;
            }
            (next, ONE)
        })
    }

    /// Zeroes the ballast of every term, merging terms that then coincide.
    /// Not unitary; used only by the disentanglement diagnostic.
    pub fn reset_ballast(&self, state: &SparseState) -> SparseState {
        SparseState::from_terms(state.iter().map(|(l, a)| {
            let mut next = l.clone();
            next.ballast = 0;
            (next, *a)
        }))
    }

    /// Every label visited by any component run, including the final ones.
    pub fn reachable_labels(&self) -> Result<BTreeSet<ConfigLabel>> {
        let runs: Vec<ComponentRun> = self
            .config
            .all_vectors()
            .into_par_iter()
            .map(|m| self.run_component(&m))
            .collect::<Result<_>>()?;
        let mut out = BTreeSet::new();
        for run in runs {
            for l in run.trajectory {
                let next = self.transition(&l).label;
                out.insert(l);
                out.insert(next);
            }
        }
        Ok(out)
    }

    /// Checks the phase-routing conditions on the given labels.
    pub fn verify_conds_on<'a, I>(&self, labels: I) -> CondsReport
    where
        I: IntoIterator<Item = &'a ConfigLabel>,
    {
        let mut report = CondsReport::default();
        for label in labels {
            report.checked += 1;
            let t = self.transition(label);
            if label.control {
                if t.label.position != label.position {
                    report.violations.push(Violation {
                        kind: ViolationKind::ComputationMovesRobot,
                        label: label.clone(),
                    });
                }
            } else {
                if t.label.output != label.output {
                    report.violations.push(Violation {
                        kind: ViolationKind::ActionChangesOutput,
                        label: label.clone(),
                    });
                }
                if t.label.memory != label.memory || t.label.comp != label.comp {
                    report.violations.push(Violation {
                        kind: ViolationKind::ActionEditsRegisters,
                        label: label.clone(),
                    });
                }
            }
        }
        report
    }

    /// Checks the phase-routing conditions on `trials` random well-formed
    /// labels drawn with the given seed.
    pub fn verify_conds(&self, trials: usize, seed: u64) -> CondsReport {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let labels: Vec<ConfigLabel> = (0..trials).map(|_| self.random_label(&mut rng)).collect();
        self.verify_conds_on(&labels)
    }

    /// A random label with every register inside its declared range.
    pub fn random_label<R: Rng>(&self, rng: &mut R) -> ConfigLabel {
        let c = &self.config;
        let (d, n, k) = (c.d, c.n, c.k() as u8);
        let vec = |rng: &mut R| (0..d).map(|_| rng.random_range(0..n)).collect::<Coords>();
        let alphabet = Output::alphabet(d);
        let axis = rng.random_range(0..d as u8);
        let bit = rng.random_range(0..k);
        let head = match rng.random_range(0..8) {
            0 => HeadState::Copy { axis, bit },
            1 => HeadState::OutScan { axis, bit },
            2 => HeadState::Dec { axis, bit },
            3 => HeadState::Look,
            4 => HeadState::RetScan { axis, bit },
            5 => HeadState::Inc { axis, bit },
            6 => HeadState::Uncopy { axis, bit },
            _ => HeadState::Ballast,
        };
        let ballast = match c.ballast {
            BallastMode::Cyclic(bits) => rng.random_range(0..1u64 << bits),
            BallastMode::Unbounded => rng.random_range(0..1u64 << 20),
        };
        ConfigLabel {
            position: vec(rng),
            memory: vec(rng),
            comp: vec(rng),
            output: alphabet[rng.random_range(0..alphabet.len())],
            control: rng.random_bool(0.5),
            record: c.recording == Recording::RecordQubit && rng.random_bool(0.5),
            ballast,
            head,
        }
    }
}
