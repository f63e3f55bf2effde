//! Configuration labels: one classical configuration of the robot, its
//! on-board registers, and the ballast counter.

use std::fmt;
use std::ops::{Index, IndexMut};

use smallvec::SmallVec;

/// A d-vector of lattice coordinates or register values.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coords(SmallVec<[u32; 4]>);

impl Coords {
    pub fn zeros(d: usize) -> Self {
        Coords(SmallVec::from_elem(0, d))
    }

    pub fn splat(d: usize, value: u32) -> Self {
        Coords(SmallVec::from_elem(value, d))
    }

    pub fn from_slice(values: &[u32]) -> Self {
        Coords(SmallVec::from_slice(values))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = &u32> {
        self.0.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0)
    }

    /// Parses `"c1,c2,..."`. Whitespace around entries is ignored.
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        if s.is_empty() {
            return None;
        }
        s.split(',')
            .map(|part| part.trim().parse::<u32>().ok())
            .collect::<Option<SmallVec<[u32; 4]>>>()
            .map(Coords)
    }
}

impl FromIterator<u32> for Coords {
    fn from_iter<I: IntoIterator<Item = u32>>(iter: I) -> Self {
        Coords(iter.into_iter().collect())
    }
}

impl Index<usize> for Coords {
    type Output = u32;
    fn index(&self, axis: usize) -> &u32 {
        &self.0[axis]
    }
}

impl IndexMut<usize> for Coords {
    fn index_mut(&mut self, axis: usize) -> &mut u32 {
        &mut self.0[axis]
    }
}

impl fmt::Display for Coords {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Coords {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

/// Output system symbol. Axes are zero-based internally and printed one-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Output {
    Dn,
    Plus(u8),
    Minus(u8),
    Look,
}

impl Output {
    /// The unit move this symbol requests of the action phase, if any.
    pub fn direction(self) -> Option<(usize, bool)> {
        match self {
            Output::Plus(a) => Some((a as usize, true)),
            Output::Minus(a) => Some((a as usize, false)),
            Output::Dn | Output::Look => None,
        }
    }

    /// Full output alphabet for a d-dimensional region.
    pub fn alphabet(d: usize) -> Vec<Output> {
        let mut out = vec![Output::Dn];
        for a in 0..d as u8 {
            out.push(Output::Plus(a));
            out.push(Output::Minus(a));
        }
        out.push(Output::Look);
        out
    }

    pub fn in_alphabet(self, d: usize) -> bool {
        match self {
            Output::Plus(a) | Output::Minus(a) => (a as usize) < d,
            Output::Dn | Output::Look => true,
        }
    }

    /// Exchanges `a` and `b`, leaving every other symbol alone.
    pub fn swapped(self, a: Output, b: Output) -> Output {
        if self == a {
            b
        } else if self == b {
            a
        } else {
            self
        }
    }
}

impl fmt::Display for Output {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Output::Dn => f.write_str("dn"),
            Output::Plus(a) => write!(f, "+x{}", a + 1),
            Output::Minus(a) => write!(f, "-x{}", a + 1),
            Output::Look => f.write_str("look"),
        }
    }
}

/// Program position of the on-board machine head.
///
/// `axis` and `bit` index the register axis and qubit the stage works on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HeadState {
    Copy { axis: u8, bit: u8 },
    OutScan { axis: u8, bit: u8 },
    Dec { axis: u8, bit: u8 },
    Look,
    RetScan { axis: u8, bit: u8 },
    Inc { axis: u8, bit: u8 },
    Uncopy { axis: u8, bit: u8 },
    Ballast,
}

impl HeadState {
    pub const START: HeadState = HeadState::Copy { axis: 0, bit: 0 };
}

impl fmt::Display for HeadState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            HeadState::Copy { axis, bit } => write!(f, "copy[{}].{bit}", axis + 1),
            HeadState::OutScan { axis, bit } => write!(f, "outscan[{}].{bit}", axis + 1),
            HeadState::Dec { axis, bit } => write!(f, "dec[{}].{bit}", axis + 1),
            HeadState::Look => f.write_str("look"),
            HeadState::RetScan { axis, bit } => write!(f, "retscan[{}].{bit}", axis + 1),
            HeadState::Inc { axis, bit } => write!(f, "inc[{}].{bit}", axis + 1),
            HeadState::Uncopy { axis, bit } => write!(f, "uncopy[{}].{bit}", axis + 1),
            HeadState::Ballast => f.write_str("ballast"),
        }
    }
}

/// One classical configuration of the whole system.
///
/// Ordering is lexicographic over the fields in declaration order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConfigLabel {
    pub position: Coords,
    pub memory: Coords,
    pub comp: Coords,
    pub output: Output,
    /// `true` while a computation phase is active.
    pub control: bool,
    pub record: bool,
    pub ballast: u64,
    pub head: HeadState,
}

impl ConfigLabel {
    /// Robot at the origin, `|memory>_m |0>_L |dn>_o |1>_c`, zero ballast.
    pub fn start(memory: Coords) -> Self {
        let d = memory.len();
        ConfigLabel {
            position: Coords::zeros(d),
            memory,
            comp: Coords::zeros(d),
            output: Output::Dn,
            control: true,
            record: false,
            ballast: 0,
            head: HeadState::START,
        }
    }

    /// Copy with every register outside `keep` replaced by a fixed filler, so
    /// two masked labels compare equal iff they agree on the kept registers.
    pub fn masked(&self, keep: RegisterSet) -> ConfigLabel {
        ConfigLabel {
            position: if keep.contains(Register::Position) { self.position.clone() } else { Coords::default() },
            memory: if keep.contains(Register::Memory) { self.memory.clone() } else { Coords::default() },
            comp: if keep.contains(Register::Comp) { self.comp.clone() } else { Coords::default() },
            output: if keep.contains(Register::Output) { self.output } else { Output::Dn },
            control: keep.contains(Register::Control) && self.control,
            record: keep.contains(Register::Record) && self.record,
            ballast: if keep.contains(Register::Ballast) { self.ballast } else { 0 },
            head: if keep.contains(Register::Head) { self.head } else { HeadState::START },
        }
    }

    /// Checks the per-label invariants for a region of side `n`.
    pub fn is_valid(&self, d: usize, n: u32, record_allowed: bool) -> bool {
        let in_range = |c: &Coords| c.len() == d && c.iter().all(|&v| v < n);
        in_range(&self.position)
            && in_range(&self.memory)
            && in_range(&self.comp)
            && self.output.in_alphabet(d)
            && (record_allowed || !self.record)
    }
}

impl fmt::Debug for ConfigLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[pos {} | m {} | L {} | o {} | c {} | r {} | b {} | {}]",
            self.position,
            self.memory,
            self.comp,
            self.output,
            self.control as u8,
            self.record as u8,
            self.ballast,
            self.head
        )
    }
}

impl fmt::Display for ConfigLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Register {
    Position,
    Memory,
    Comp,
    Output,
    Control,
    Record,
    Ballast,
    Head,
}

impl Register {
    const ALL: [Register; 8] = [
        Register::Position,
        Register::Memory,
        Register::Comp,
        Register::Output,
        Register::Control,
        Register::Record,
        Register::Ballast,
        Register::Head,
    ];

    fn bit(self) -> u8 {
        1 << (self as u8)
    }
}

/// A subset of the label's registers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct RegisterSet(u8);

impl RegisterSet {
    pub const EMPTY: RegisterSet = RegisterSet(0);

    pub fn of(registers: &[Register]) -> Self {
        registers.iter().fold(RegisterSet(0), |acc, r| acc.with(*r))
    }

    pub fn memory() -> Self {
        Self::of(&[Register::Memory])
    }

    pub fn with(self, r: Register) -> Self {
        RegisterSet(self.0 | r.bit())
    }

    pub fn contains(self, r: Register) -> bool {
        self.0 & r.bit() != 0
    }

    pub fn complement(self) -> Self {
        Register::ALL
            .iter()
            .filter(|r| !self.contains(**r))
            .fold(RegisterSet(0), |acc, r| acc.with(*r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coords_parse_and_display() {
        let c = Coords::parse(" 1, 2 ,3").unwrap();
        assert_eq!(c.as_slice(), &[1, 2, 3]);
        assert_eq!(c.to_string(), "1,2,3");
        assert!(Coords::parse("1,,2").is_none());
        assert!(Coords::parse("").is_none());
        assert!(Coords::parse("a").is_none());
    }

    #[test]
    fn alphabet_membership() {
        let alpha = Output::alphabet(2);
        assert_eq!(alpha.len(), 6);
        assert!(Output::Plus(1).in_alphabet(2));
        assert!(!Output::Minus(2).in_alphabet(2));
        assert_eq!(Output::Plus(0).to_string(), "+x1");
    }

    #[test]
    fn swap_is_an_involution() {
        for o in Output::alphabet(3) {
            let s = o.swapped(Output::Dn, Output::Plus(1));
            assert_eq!(s.swapped(Output::Dn, Output::Plus(1)), o);
        }
    }

    #[test]
    fn masking_keeps_only_selected_registers() {
        let mut a = ConfigLabel::start(Coords::from_slice(&[1, 2]));
        let mut b = a.clone();
        b.position = Coords::from_slice(&[3, 3]);
        b.ballast = 9;
        assert_eq!(a.masked(RegisterSet::memory()), b.masked(RegisterSet::memory()));
        a.memory = Coords::from_slice(&[0, 2]);
        assert_ne!(a.masked(RegisterSet::memory()), b.masked(RegisterSet::memory()));
        let rest = RegisterSet::memory().complement();
        assert!(!rest.contains(Register::Memory));
        assert!(rest.contains(Register::Ballast));
    }

    #[test]
    fn validity() {
        let l = ConfigLabel::start(Coords::from_slice(&[3, 1]));
        assert!(l.is_valid(2, 4, false));
        assert!(!l.is_valid(2, 2, false));
        let mut r = l.clone();
        r.record = true;
        assert!(!r.is_valid(2, 4, false));
        assert!(r.is_valid(2, 4, true));
    }
}
