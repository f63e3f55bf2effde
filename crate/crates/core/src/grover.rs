//! Grover amplification, abstract and built on the search machine.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::label::{ConfigLabel, Coords};
use crate::machine::{Recording, StepKind, StepLedger, TaskConfig, TaskMachine};
use crate::state::{Budget, SparseState};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GroverParams {
    /// Element count.
    pub elements: u64,
    pub target_index: u64,
    pub m: u64,
    pub theta: f64,
    pub beta: f64,
}

impl GroverParams {
    /// Parameters with `m` chosen by [`optimal_iterations`] when `None`.
    pub fn new(elements: u64, target_index: u64, m: Option<u64>) -> Result<Self> {
        check_elements(elements)?;
        if target_index >= elements {
            return Err(Error::InvalidConfig(format!("target index {target_index} >= {elements}")));
        }
        let (theta, beta) = rotation_params(elements);
        Ok(GroverParams {
            elements,
            target_index,
            m: m.unwrap_or_else(|| optimal_iterations(elements)),
            theta,
            beta,
        })
    }

    pub fn success_probability(&self) -> f64 {
        success_probability(self.elements, self.m)
    }
}

fn check_elements(elements: u64) -> Result<()> {
    if elements < 2 || !elements.is_power_of_two() {
        return Err(Error::ElementCount(elements));
    }
    Ok(())
}

/// `(theta, beta)` with `cos theta = 1 - 2/M` and `sin beta = 1/sqrt(M)`.
pub fn rotation_params(elements: u64) -> (f64, f64) {
    let m = elements as f64;
    let theta = (1.0 - 2.0 / m).acos();
    let beta = (1.0 / m.sqrt()).asin();
    (theta, beta)
}

/// `round(pi/(4 beta) - 1/2)`, ties to even, never negative.
pub fn optimal_iterations(elements: u64) -> u64 {
    let (_, beta) = rotation_params(elements);
    (PI / (4.0 * beta) - 0.5).round_ties_even().max(0.0) as u64
}

/// `sin^2((2m + 1) beta)`.
pub fn success_probability(elements: u64, m: u64) -> f64 {
    let (_, beta) = rotation_params(elements);
    ((2 * m + 1) as f64 * beta).sin().powi(2)
}

fn element_label(index: u64) -> ConfigLabel {
    ConfigLabel::start(Coords::from_slice(&[index as u32]))
}

/// Uniform superposition over `M` one-register elements, prepared by one
/// Hadamard per qubit on `|0>`.
pub fn uniform_state(elements: u64) -> Result<SparseState> {
    check_elements(elements)?;
    let bits = elements.trailing_zeros();
    Ok(SparseState::basis(element_label(0)).walsh_hadamard(1, bits))
}

/// `2|psi><psi| - 1` on the memory register, `psi` uniform, realized as
/// `W (2|0><0| - 1) W`.
pub fn memory_diffusion(state: &SparseState, d: usize, bits: u32) -> SparseState {
    let w = state.walsh_hadamard(d, bits);
    let reflected = w.apply_phase(|l| if l.memory.is_zero() { ONE } else { -ONE });
    reflected.walsh_hadamard(d, bits)
}

/// Sign flip on one memory value.
pub fn oracle(state: &SparseState, target: &Coords) -> SparseState {
    state.apply_phase(|l| if &l.memory == target { -ONE } else { ONE })
}

/// One Grover iterate `Q = -I_phi I_omega` on the one-register encoding.
pub fn grover_iterate(state: &SparseState, elements: u64, target_index: u64) -> SparseState {
    let target = Coords::from_slice(&[target_index as u32]);
    memory_diffusion(&oracle(state, &target), 1, elements.trailing_zeros())
}

fn target_probability(state: &SparseState, target_index: u64) -> f64 {
    state.amplitude(&element_label(target_index)).norm_sqr()
}

/// Measured success probability after each of `0..=m_max` iterations.
pub fn grover_trace(elements: u64, target_index: u64, m_max: u64) -> Result<Vec<f64>> {
    let params = GroverParams::new(elements, target_index, Some(m_max))?;
    let mut state = uniform_state(params.elements)?;
    let mut out = vec![target_probability(&state, target_index)];
    for _ in 0..m_max {
        state = grover_iterate(&state, elements, target_index);
        out.push(target_probability(&state, target_index));
    }
    Ok(out)
}

/// Applies `Q` `m` times to the uniform state.
pub fn grover_abstract(elements: u64, target_index: u64, m: u64) -> Result<(SparseState, f64)> {
    GroverParams::new(elements, target_index, Some(m))?;
    let mut state = uniform_state(elements)?;
    for _ in 0..m {
        state = grover_iterate(&state, elements, target_index);
    }
    let p = target_probability(&state, target_index);
    Ok((state, p))
}

/// Matrix of `Q` on span{|omega>, |alpha>} in that basis order, with
/// `|alpha>` the normalized uniform superposition of non-target elements.
/// Entry `[i][j]` is `<e_i|Q|e_j>`.
pub fn restricted_q_matrix(elements: u64, target_index: u64) -> Result<[[f64; 2]; 2]> {
    GroverParams::new(elements, target_index, Some(1))?;
    let omega = SparseState::basis(element_label(target_index));
    let uniform = uniform_state(elements)?;
    let m = elements as f64;
    let scale = 1.0 / ((m - 1.0) / m).sqrt();
    let alpha = SparseState::from_terms(
        uniform
            .iter()
            .filter(|(l, _)| l.memory[0] as u64 != target_index)
            .map(|(l, a)| (l.clone(), a * scale)),
    );
    let basis = [omega, alpha];
    let mut out = [[0.0; 2]; 2];
    for j in 0..2 {
        let image = grover_iterate(&basis[j], elements, target_index);
        for i in 0..2 {
            let e = basis[i].inner(&image);
            out[i][j] = e.re;
        }
    }
    Ok(out)
}

/// Where the diffusion step is applied relative to the robot's round trip.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GroverVariant {
    /// After every component has returned to the origin.
    AfterReturn,
    /// At the endpoint hook, while position is still correlated with memory.
    AtEndpoint,
}

impl fmt::Display for GroverVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroverVariant::AfterReturn => "after_return",
            GroverVariant::AtEndpoint => "at_endpoint",
        })
    }
}

#[derive(Clone, Debug)]
pub struct EmbeddedRun {
    pub state: SparseState,
    /// Probability that the memory register holds the target.
    pub probability: f64,
    pub ledger: StepLedger,
}

fn require(config: &TaskConfig, mode: Recording) -> Result<()> {
    if config.recording != mode {
        return Err(Error::RecordingMismatch {
            required: match mode {
                Recording::SignFlip => "sign recording",
                Recording::RecordQubit => "record-qubit recording",
            },
        });
    }
    Ok(())
}

fn memory_target_probability(state: &SparseState, target: &Coords) -> f64 {
    state.probability_where(|l| &l.memory == target) / state.norm_sqr()
}

/// Step ledger of `m` after-return iterations: `m` rounds plus `m`
/// diffusions of `d log2 N` steps each. Step counts do not depend on the
/// state, so no simulation is needed.
pub fn grover_schedule_ledger(machine: &TaskMachine, m: u64) -> Result<StepLedger> {
    let round = machine.critical_run()?.ledger;
    let mut ledger = round.times(m);
    ledger.charge_computation(m * diffusion_cost(&machine.config));
    ledger.grover_iterations = m;
    Ok(ledger)
}

fn diffusion_cost(config: &TaskConfig) -> u64 {
    config.d as u64 * config.k() as u64
}

/// Grover's algorithm with the oracle realized by full search rounds.
///
/// `disentangle` zeroes the ballast before each diffusion. It is a
/// non-physical diagnostic that separates the entanglement failure from the
/// oracle-cost failure.
pub fn grover_embedded(
    config: &TaskConfig,
    m: u64,
    variant: GroverVariant,
    disentangle: bool,
) -> Result<EmbeddedRun> {
    require(config, Recording::SignFlip)?;
    let machine = TaskMachine::build(config.clone())?;
    let budget = Budget::from_env();
    let dk = diffusion_cost(config);
    let bits = config.k();
    let mut ledger = StepLedger::default();
    let mut state = machine.initial_state();
    match variant {
        GroverVariant::AfterReturn => {
            let round = machine.critical_run()?.ledger;
            for i in 0..m {
                if i > 0 {
                    state = machine.restart(&state)?;
                }
                state = machine.run_steps(&state, round.total)?;
                ledger.add(&round);
                if disentangle {
                    state = machine.reset_ballast(&state);
                }
                state = memory_diffusion(&state, config.d, bits);
                ledger.charge_computation(dk);
                budget.check(state.len() as u64 * (1 << config.d))?;
            }
        }
        GroverVariant::AtEndpoint => {
            let (at_end, reach) = machine.run_to_endpoint(&state)?;
            state = at_end;
            ledger.add(&reach);
            for i in 0..m {
                if i > 0 {
                    state = machine.local_look(&state)?;
                    ledger.charge(StepKind::Look);
                }
                if disentangle {
                    state = machine.reset_ballast(&state);
                }
                state = memory_diffusion(&state, config.d, bits);
                ledger.charge_computation(dk);
                budget.check(state.len() as u64)?;
            }
            let (done, back) = machine.resume(&state)?;
            state = done;
            ledger.add(&back);
        }
    }
    ledger.grover_iterations = m;
    let probability = memory_target_probability(&state, &config.target);
    Ok(EmbeddedRun { state, probability, ledger })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RecordPoint {
    pub m: u64,
    /// Weight of the target memory value with the record qubit set.
    pub probability: f64,
    pub steps_total: u64,
    pub norm: f64,
}

/// One `U = -I_phi I_{|1>r}` iterate on memory and record registers.
pub fn record_iterate(state: &SparseState, d: usize, bits: u32) -> SparseState {
    let marked = state.apply_phase(|l| if l.record { -ONE } else { ONE });
    let w = marked.walsh_hadamard(d, bits);
    let reflected = w.apply_phase(|l| if !l.record && l.memory.is_zero() { ONE } else { -ONE });
    reflected.walsh_hadamard(d, bits)
}

/// Runs one coherent search with the record qubit, then iterates `U` and
/// reports the target-and-recorded probability for `m = 0..=m_max`.
pub fn record_variant(config: &TaskConfig, m_max: u64) -> Result<Vec<RecordPoint>> {
    require(config, Recording::RecordQubit)?;
    let machine = TaskMachine::build(config.clone())?;
    let run = machine.run_coherent(&BTreeSet::new())?;
    let mut state = run.final_state;
    let mut steps = run.ledger.total;
    let per_iteration = diffusion_cost(config) + 1;
    let mut out = Vec::with_capacity(m_max as usize + 1);
    for m in 0..=m_max {
        out.push(RecordPoint {
            m,
            probability: state.probability_where(|l| l.record && l.memory == config.target),
            steps_total: steps,
            norm: state.norm(),
        });
        if m < m_max {
            state = record_iterate(&state, config.d, config.k());
            steps += per_iteration;
        }
    }
    Ok(out)
}
