//! Sparse amplitude maps over configuration labels, partial traces, and
//! entanglement entropy.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::label::{ConfigLabel, Register, RegisterSet};

/// Amplitudes with magnitude at or below this are dropped.
pub const PRUNE: f64 = 1e-14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A wavefunction stored as a sorted map from label to amplitude.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseState {
    terms: BTreeMap<ConfigLabel, Complex64>,
}

impl SparseState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn basis(label: ConfigLabel) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(label, ONE);
        SparseState { terms }
    }

    /// Sums amplitudes of repeated labels, then prunes.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (ConfigLabel, Complex64)>,
    {
        let mut map: BTreeMap<ConfigLabel, Complex64> = BTreeMap::new();
        for (label, amp) in terms {
            *map.entry(label).or_insert(ZERO) += amp;
        }
        map.retain(|_, a| a.norm() > PRUNE);
        SparseState { terms: map }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn amplitude(&self, label: &ConfigLabel) -> Complex64 {
        self.terms.get(label).copied().unwrap_or(ZERO)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ConfigLabel, &Complex64)> {
        self.terms.iter()
    }

    pub fn labels(&self) -> impl Iterator<Item = &ConfigLabel> {
        self.terms.keys()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &SparseState) -> Complex64 {
        let (small, large, flip) = if self.len() <= other.len() {
            (self, other, false)
        } else {
            (other, self, true)
        };
        let mut acc = ZERO;
        for (label, a) in &small.terms {
            if let Some(b) = large.terms.get(label) {
                acc += if flip { b.conj() * a } else { a.conj() * b };
            }
        }
        acc
    }

    pub fn scaled(&self, factor: Complex64) -> SparseState {
        SparseState::from_terms(self.terms.iter().map(|(l, a)| (l.clone(), a * factor)))
    }

    /// Sends each term `(k, a)` to `(f(k).0, f(k).1 * a)`. Fails if two
    /// labels land on the same image, since that map cannot be unitary.
    pub fn apply_component_map<F>(&self, mut f: F) -> Result<SparseState>
    where
        F: FnMut(&ConfigLabel) -> (ConfigLabel, Complex64),
    {
        let mut out = BTreeMap::new();
        for (label, amp) in &self.terms {
            let (image, phase) = f(label);
            match out.entry(image) {
                Entry::Occupied(e) => {
                    return Err(Error::NonInjective { label: format!("{:?}", e.key()) });
                }
                Entry::Vacant(e) => {
                    e.insert(phase * amp);
                }
            }
        }
        Ok(SparseState { terms: out })
    }

    /// Multiplies every amplitude by a label-dependent phase.
    pub fn apply_phase<F>(&self, mut phase: F) -> SparseState
    where
        F: FnMut(&ConfigLabel) -> Complex64,
    {
        let terms = self
            .terms
            .iter()
            .map(|(l, a)| (l.clone(), phase(l) * a))
            .collect();
        SparseState { terms }
    }

    /// Applies a 2x2 unitary `u` (row-major, `u[out][in]`) to one qubit of a
    /// register.
    pub fn apply_qubit_unitary(&self, qubit: Qubit, u: [[Complex64; 2]; 2]) -> SparseState {
        let mut out: BTreeMap<ConfigLabel, Complex64> = BTreeMap::new();
        for (label, amp) in &self.terms {
            let bit = qubit.get(label) as usize;
            for (value, row) in u.iter().enumerate() {
                let coeff = row[bit];
                if coeff == ZERO {
                    continue;
                }
                let image = qubit.set(label, value == 1);
                *out.entry(image).or_insert(ZERO) += coeff * amp;
            }
        }
        out.retain(|_, a| a.norm() > PRUNE);
        SparseState { terms: out }
    }

    /// Walsh-Hadamard on the low `bits` qubits of every axis of the memory
    /// register.
    pub fn walsh_hadamard(&self, d: usize, bits: u32) -> SparseState {
        let mut state = self.clone();
        for axis in 0..d {
            for bit in 0..bits {
                state = state.apply_qubit_unitary(Qubit::memory(axis, bit), hadamard());
            }
        }
        state
    }

    /// Total weight of terms whose label satisfies `pred`.
    pub fn probability_where<F>(&self, pred: F) -> f64
    where
        F: Fn(&ConfigLabel) -> bool,
    {
        self.terms
            .iter()
            .filter(|(l, _)| pred(l))
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Largest per-label amplitude difference against `other`.
    pub fn max_difference(&self, other: &SparseState) -> f64 {
        let mut worst: f64 = 0.0;
        for (l, a) in &self.terms {
            worst = worst.max((a - other.amplitude(l)).norm());
        }
        for (l, b) in &other.terms {
            if !self.terms.contains_key(l) {
                worst = worst.max(b.norm());
            }
        }
        worst
    }
}

pub fn hadamard() -> [[Complex64; 2]; 2] {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [[h, h], [h, -h]]
}

/// One qubit of the memory or computation register.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Qubit {
    pub register: Register,
    pub axis: usize,
    pub bit: u32,
}

impl Qubit {
    pub fn memory(axis: usize, bit: u32) -> Self {
        Qubit { register: Register::Memory, axis, bit }
    }

    pub fn comp(axis: usize, bit: u32) -> Self {
        Qubit { register: Register::Comp, axis, bit }
    }

    fn value(&self, label: &ConfigLabel) -> u32 {
        match self.register {
            Register::Memory => label.memory[self.axis],
            Register::Comp => label.comp[self.axis],
            Register::Position => label.position[self.axis],
            _ => panic!("qubit register must be memory, comp or position"),
        }
    }

    fn get(&self, label: &ConfigLabel) -> bool {
        self.value(label) >> self.bit & 1 == 1
    }

    fn set(&self, label: &ConfigLabel, on: bool) -> ConfigLabel {
        let mut out = label.clone();
        let mask = 1u32 << self.bit;
        let v = self.value(label);
        let nv = if on { v | mask } else { v & !mask };
        match self.register {
            Register::Memory => out.memory[self.axis] = nv,
            Register::Comp => out.comp[self.axis] = nv,
            Register::Position => out.position[self.axis] = nv,
            _ => unreachable!(),
        }
        out
    }
}

/// Dense reduced density matrix over the kept-register values seen on the
/// support. `basis[i]` is the masked label for row/column `i`.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    pub basis: Vec<ConfigLabel>,
    pub matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        if self.dim() == 0 {
            return Vec::new();
        }
        SymmetricEigen::new(self.matrix.clone()).eigenvalues.iter().copied().collect()
    }

    pub fn entry(&self, row: &ConfigLabel, col: &ConfigLabel) -> Complex64 {
        let i = self.basis.binary_search(row).ok();
        let j = self.basis.binary_search(col).ok();
        match (i, j) {
            (Some(i), Some(j)) => self.matrix[(i, j)],
            _ => ZERO,
        }
    }
}

fn group_by_split(
    state: &SparseState,
    keep: RegisterSet,
) -> (Vec<ConfigLabel>, Vec<ConfigLabel>, Vec<(usize, usize, Complex64)>) {
    let rest = keep.complement();
    let mut kept_index: BTreeMap<ConfigLabel, usize> = BTreeMap::new();
    let mut rest_index: HashMap<ConfigLabel, usize> = HashMap::new();
    let mut rest_keys = Vec::new();
    let mut entries = Vec::with_capacity(state.len());
    for (label, amp) in state.iter() {
        let k = label.masked(keep);
        let next = kept_index.len();
        let ki = *kept_index.entry(k).or_insert(next);
        let r = label.masked(rest);
        let ri = match rest_index.get(&r) {
            Some(&i) => i,
            None => {
                rest_keys.push(r.clone());
                rest_index.insert(r, rest_keys.len() - 1);
                rest_keys.len() - 1
            }
        };
        entries.push((ki, ri, *amp));
    }
    // Renumber kept keys in sorted order so the dense basis is ordered.
    let mut kept: Vec<(ConfigLabel, usize)> = kept_index.into_iter().collect();
    let mut remap = vec![0; kept.len()];
    for (sorted, (_, old)) in kept.iter().enumerate() {
        remap[*old] = sorted;
    }
    for e in &mut entries {
        e.0 = remap[e.0];
    }
    let kept_keys = kept.drain(..).map(|(k, _)| k).collect();
    (kept_keys, rest_keys, entries)
}

/// `Tr_rest |psi><psi|` over the registers in `keep`.
pub fn reduced_density(state: &SparseState, keep: RegisterSet) -> DensityMatrix {
    let (kept, rest, entries) = group_by_split(state, keep);
    let mut columns: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); rest.len()];
    for (k, r, a) in entries {
        columns[r].push((k, a));
    }
    let n = kept.len();
    let mut matrix = DMatrix::<Complex64>::zeros(n, n);
    for col in &columns {
        for &(i, a) in col {
            for &(j, b) in col {
                matrix[(i, j)] += a * b.conj();
            }
        }
    }
    DensityMatrix { basis: kept, matrix }
}

/// Von Neumann entropy in bits; eigenvalues at or below 1e-12 are skipped.
pub fn entropy_bits(rho: &DensityMatrix) -> f64 {
    entropy_of(&rho.eigenvalues())
}

fn entropy_of(eigenvalues: &[f64]) -> f64 {
    eigenvalues
        .iter()
        .filter(|&&l| l > 1e-12)
        .map(|&l| -l * l.log2())
        .sum::<f64>()
        .max(0.0)
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Entropy of the `keep` marginal, computed block by block.
///
/// The bipartite graph kept-value/rest-value splits the state into
/// independent Schmidt blocks; each block is diagonalized on its smaller
/// side. Agrees with `entropy_bits(&reduced_density(..))` but scales to
/// states whose marginal is too large for one dense matrix.
pub fn entanglement_entropy(state: &SparseState, keep: RegisterSet) -> f64 {
    let (kept, rest, entries) = group_by_split(state, keep);
    let nk = kept.len();
    let mut parent: Vec<usize> = (0..nk + rest.len()).collect();
    for &(k, r, _) in &entries {
        let a = find(&mut parent, k);
        let b = find(&mut parent, nk + r);
        if a != b {
            parent[a] = b;
        }
    }
    let mut blocks: BTreeMap<usize, Vec<(usize, usize, Complex64)>> = BTreeMap::new();
    for &(k, r, a) in &entries {
        let root = find(&mut parent, k);
        blocks.entry(root).or_default().push((k, r, a));
    }
    let mut total = 0.0;
    for block in blocks.values() {
        let mut ks: Vec<usize> = block.iter().map(|e| e.0).collect();
        let mut rs: Vec<usize> = block.iter().map(|e| e.1).collect();
        ks.sort_unstable();
        ks.dedup();
        rs.sort_unstable();
        rs.dedup();
        if ks.len() == 1 || rs.len() == 1 {
            let w: f64 = block.iter().map(|e| e.2.norm_sqr()).sum();
            total += entropy_of(&[w]);
            continue;
        }
        // Matrix A[k][r]; diagonalize A A^dag or A^dag A, whichever is smaller.
        let (rows, cols, by_row) = if ks.len() <= rs.len() {
            (&ks, &rs, true)
        } else {
            (&rs, &ks, false)
        };
        let mut a = DMatrix::<Complex64>::zeros(rows.len(), cols.len());
        for &(k, r, amp) in block {
            let (row, col) = if by_row { (k, r) } else { (r, k) };
            let i = rows.binary_search(&row).unwrap();
            let j = cols.binary_search(&col).unwrap();
            a[(i, j)] += amp;
        }
        let gram = &a * a.adjoint();
        let eig = SymmetricEigen::new(gram).eigenvalues;
        total += entropy_of(eig.as_slice());
    }
    total
}

/// Memory ceiling for sparse states, read from `QROBOT_BUDGET_MB`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub limit_bytes: u64,
}

impl Budget {
    /// Rough per-term footprint: map node, label with inline vectors, amplitude.
    pub const BYTES_PER_TERM: u64 = 192;

    pub fn from_env() -> Self {
        let mb = std::env::var("QROBOT_BUDGET_MB")
            .ok()
            .and_then(|v| v.trim().parse::<u64>().ok())
            .unwrap_or(512);
        Budget { limit_bytes: mb.saturating_mul(1 << 20) }
    }

    pub fn unlimited() -> Self {
        Budget { limit_bytes: u64::MAX }
    }

    pub fn check(&self, terms: u64) -> Result<()> {
        let needed = terms.saturating_mul(Self::BYTES_PER_TERM);
        if needed > self.limit_bytes {
            Err(Error::Budget { needed, limit: self.limit_bytes })
        } else {
            Ok(())
        }
    }
}
