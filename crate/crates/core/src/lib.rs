//! One-dimensional spin-1/2 wave-packet simulator for quantum-clock
//! measurements of traversal and tunneling times.
//!
//! Natural units are used throughout: `hbar = m = 1`, and the half-width `D`
//! of the spin-coupling region is the unit of length unless configured
//! otherwise.
//!
//! The crate is organised bottom-up:
//!
//! * [`grid`]: uniform grid, two-component wavefunction, Gaussian packets.
//! * [`fields`]: barrier and spin-coupling profiles sampled onto a grid.
//! * [`tridiag`]: complex tridiagonal (Thomas) solver.
//! * [`propagator`]: Strang-split Crank-Nicolson time stepping.
//! * [`observables`]: Larmor times, transmission, spin-flip probability.
//! * [`oracles`]: closed-form references (Rabi formula, transfer matrix).
//! * [`experiments`]: presets, sweep runner, JSON config, CSV output.

pub mod error;
pub mod experiments;
pub mod fields;
pub mod grid;
pub mod observables;
pub mod oracles;
pub mod propagator;
pub mod snapshot;
pub mod spin;
pub mod tridiag;

pub use error::{Error, Result};
pub use experiments::{
    preset, read_config, run, write_csv, ExperimentConfig, RunOptions, SweepResult, SweepRow,
};
pub use fields::{DiscretizedHamiltonian, PotentialProfile, SpinCouplingProfile};
pub use grid::{Grid1D, PacketSpec, SpinSign, SpinorField};
pub use observables::{ClockReadout, SpinExpectations};
pub use propagator::{EvolveDiagnostics, EvolveParams, Observer, Propagator, Resolution};

/// Complex amplitude type used everywhere.
pub type C64 = num_complex::Complex64;
