//! Expansion of `(Gamma_a + Gamma_c)^n` into alternating phase blocks.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::label::ConfigLabel;
use crate::machine::{PhaseKind, TaskMachine};
use crate::state::SparseState;

/// Largest step count the path enumeration accepts.
pub const MAX_PATH_STEPS: u32 = 12;

/// One term of the expansion: `durations[l]` consecutive steps of one phase
/// kind, kinds alternating from `start`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhasePath {
    pub start: PhaseKind,
    pub durations: Vec<u32>,
}

impl PhasePath {
    pub fn phases(&self) -> usize {
        self.durations.len()
    }

    pub fn steps(&self) -> u32 {
        self.durations.iter().sum()
    }

    /// `(kind, duration)` per block.
    pub fn blocks(&self) -> impl Iterator<Item = (PhaseKind, u32)> + '_ {
        self.durations.iter().enumerate().map(move |(i, &h)| {
            let kind = if i % 2 == 0 { self.start } else { other(self.start) };
            (kind, h)
        })
    }
}

fn other(kind: PhaseKind) -> PhaseKind {
    match kind {
        PhaseKind::Computation => PhaseKind::Action,
        PhaseKind::Action => PhaseKind::Computation,
    }
}

fn check_guard(n: u32) -> Result<()> {
    if n == 0 || n > MAX_PATH_STEPS {
        return Err(Error::PathGuard { n, max: MAX_PATH_STEPS });
    }
    Ok(())
}

/// Compositions of `n` in bitmask order: bit `i` of the mask cuts after
/// step `i + 1`.
pub fn compositions(n: u32) -> Vec<Vec<u32>> {
    (0u32..1 << (n - 1))
        .map(|mask| {
            let mut parts = Vec::new();
            let mut run = 1;
            for gap in 0..n - 1 {
                if mask >> gap & 1 == 1 {
                    parts.push(run);
                    run = 1;
                } else {
                    run += 1;
                }
            }
            parts.push(run);
            parts
        })
        .collect()
}

/// All phase paths of `n` steps, computation-first paths before action-first.
pub fn enumerate_phase_paths(n: u32) -> Result<Vec<PhasePath>> {
    check_guard(n)?;
    let comps = compositions(n);
    Ok([PhaseKind::Computation, PhaseKind::Action]
        .into_iter()
        .flat_map(|start| comps.iter().map(move |h| PhasePath { start, durations: h.clone() }))
        .collect())
}

/// `(Gamma_kind)^h |label>`, with `Gamma_kind = Gamma P^c_kind`.
pub fn block_column(machine: &TaskMachine, label: &ConfigLabel, kind: PhaseKind, h: u32) -> Result<SparseState> {
    let mut state = SparseState::basis(label.clone());
    for _ in 0..h {
        state = machine.step_projected(&state, kind)?;
        if state.is_empty() {
            break;
        }
    }
    Ok(state)
}

/// Sum over one phase path of the products of block matrix elements, the
/// intermediate labels ranging over the reachable support.
pub fn path_amplitude(
    machine: &TaskMachine,
    path: &PhasePath,
    w_out: &ConfigLabel,
    w_in: &ConfigLabel,
) -> Result<Complex64> {
    // Accumulated amplitude per intermediate label p_l.
    let mut frontier = SparseState::basis(w_in.clone());
    for (kind, h) in path.blocks() {
        let mut terms = Vec::new();
        for (p, amp) in frontier.iter() {
            let column = block_column(machine, p, kind, h)?;
            terms.extend(column.iter().map(|(q, el)| (q.clone(), el * amp)));
        }
        frontier = SparseState::from_terms(terms);
        if frontier.is_empty() {
            break;
        }
    }
    // The terminal factor P^c_0 + P^c_1 is the identity.
    Ok(frontier.amplitude(w_out))
}

/// `<w_out| Gamma^n |w_in>` as a sum over phase paths. Only paths whose first
/// block matches the control bit of `w_in` can contribute.
pub fn pathsum_element(machine: &TaskMachine, w_out: &ConfigLabel, w_in: &ConfigLabel, n: u32) -> Result<Complex64> {
    let start = PhaseKind::of(w_in);
    let mut total = Complex64::new(0.0, 0.0);
    for path in enumerate_phase_paths(n)?.iter().filter(|p| p.start == start) {
        total += path_amplitude(machine, path, w_out, w_in)?;
    }
    Ok(total)
}

/// `<w_out| Gamma^n |w_in>` by applying the step operator `n` times.
pub fn direct_element(machine: &TaskMachine, w_out: &ConfigLabel, w_in: &ConfigLabel, n: u32) -> Result<Complex64> {
    let state = machine.run_steps(&SparseState::basis(w_in.clone()), n as u64)?;
    Ok(state.amplitude(w_out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::Coords;
    use crate::machine::TaskConfig;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn toy() -> TaskMachine {
        TaskMachine::build(TaskConfig::new(1, 2, Coords::from_slice(&[1])).unwrap()).unwrap()
    }

    #[test]
    fn composition_counts() {
        assert_eq!(compositions(1), vec![vec![1]]);
        let mut c3 = compositions(3);
        c3.sort();
        assert_eq!(c3, vec![vec![1, 1, 1], vec![1, 2], vec![2, 1], vec![3]]);
        for n in 1..=MAX_PATH_STEPS {
            let paths = enumerate_phase_paths(n).unwrap();
            let per_kind = paths.iter().filter(|p| p.start == PhaseKind::Action).count();
            assert_eq!(per_kind, 1 << (n - 1));
            assert_eq!(paths.len(), 2 * per_kind);
            assert!(paths.iter().all(|p| p.steps() == n));
        }
        assert!(matches!(enumerate_phase_paths(0), Err(Error::PathGuard { .. })));
        assert!(matches!(enumerate_phase_paths(13), Err(Error::PathGuard { .. })));
    }

    #[test]
    fn one_step_is_the_matrix_element() {
        let m = toy();
        let w_in = ConfigLabel::start(Coords::from_slice(&[1]));
        let w_out = m.transition(&w_in).label;
        assert_eq!(pathsum_element(&m, &w_out, &w_in, 1).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(direct_element(&m, &w_in, &w_in, 0).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(direct_element(&m, &w_out, &w_in, 0).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn expansion_matches_direct_on_random_pairs() {
        let m = toy();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..40 {
            let w_in = m.random_label(&mut rng);
            let n = rng.random_range(1..=8);
            let direct = m.run_steps(&SparseState::basis(w_in.clone()), n as u64).unwrap();
            let w_out = if trial % 2 == 0 {
                direct.labels().next().unwrap().clone()
            } else {
                m.random_label(&mut rng)
            };
            let a = pathsum_element(&m, &w_out, &w_in, n).unwrap();
            let b = direct_element(&m, &w_out, &w_in, n).unwrap();
            assert!((a - b).norm() < 1e-10, "n={n} {w_in:?} -> {w_out:?}");
            assert!(b.norm() < 1e-12 || (b.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn blocks_concatenate() {
        let m = toy();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let l = m.random_label(&mut rng);
            let kind = PhaseKind::of(&l);
            let (h1, h2) = (rng.random_range(0..4), rng.random_range(0..4));
            let joined = block_column(&m, &l, kind, h1 + h2).unwrap();
            let first = block_column(&m, &l, kind, h2).unwrap();
            let mut terms = Vec::new();
            for (p, a) in first.iter() {
                for (q, b) in block_column(&m, p, kind, h1).unwrap().iter() {
                    terms.push((q.clone(), a * b));
                }
            }
            assert_eq!(SparseState::from_terms(terms), joined);
        }
    }
}
