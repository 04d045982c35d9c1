//! Quantized phase-space disk for the harmonic oscillator in Bargmann space.
//!
//! The spectral projector `Π_N` onto oscillator levels `0..=N` (at
//! `ℏ = 1/N`) cuts observables down to banded "generalized Toeplitz"
//! matrices. This crate builds those matrices, propagates projected coherent
//! states under `e^{−itN ΠQ̂Π}`, evaluates Husimi densities, and checks trace
//! asymptotics, commutator localization, edge symbols and Egorov tracking
//! against classical references.
//!
//! Layers, bottom up:
//!
//! * [`phase`]: classical points, Hamiltonians, flows, disk quadrature.
//! * [`bargmann`]: states, coherent states, Husimi grids.
//! * [`cutops`]: banded operators, projectors, fiber Toeplitz models.
//! * [`spectral`]: eigendecomposition, functional calculus, propagation.
//! * [`experiments`]: validation drivers producing JSON reports.
//! * [`cli`]: the `zollcut` command line.

pub mod bargmann;
pub mod cli;
pub mod cutops;
pub mod error;
pub mod experiments;
pub mod phase;
pub mod quadrature;
pub mod spectral;

pub use bargmann::{coherent_state, husimi, inner, BargmannState, GridSpec, HusimiGrid, SimulationScale};
pub use cutops::{
    build_p_matrix, build_projector, build_q_matrix, commutator, cut_operator, edge_symbol_error,
    fiber_toeplitz, BandMatrix, BandedHermitian, MatrixEntries, ToeplitzFiber,
};
pub use error::{Error, Result};
pub use experiments::{ExperimentReport, Observable, SpectralFunction};
pub use phase::{Domain, Hamiltonian, PhasePoint};
pub use spectral::{apply_function, eigendecompose, propagate, EigenSystem, Propagator};
