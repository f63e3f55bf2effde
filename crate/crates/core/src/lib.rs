//! Discrete-time simulator of a quantum robot searching a lattice region.
//!
//! The robot, its on-board registers and a ballast counter evolve under a
//! step operator that alternates computation and action phases. The crate
//! measures step counts of the coherent search, of Grover amplification built
//! on top of it, and of a classical sweep, and tracks how the memory register
//! becomes entangled with the rest of the system.

pub mod cli;
pub mod error;
pub mod grover;
pub mod lab;
pub mod label;
pub mod machine;
pub mod paths;
pub mod state;

pub use error::{Error, Result};
pub use label::{ConfigLabel, Coords, HeadState, Output, Register, RegisterSet};
pub use machine::{BallastMode, PhaseKind, Recording, StepLedger, TaskConfig, TaskMachine};
pub use state::SparseState;
