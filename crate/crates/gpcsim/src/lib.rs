//! Desk-scale reproduction of a quantum-computer test of the generalized
//! Pauli constraints for three fermions in six orbitals.
//!
//! The pipeline mirrors the experiment end to end:
//!
//! 1. [`circuits`] builds the three Ry/CNOT state-preparation circuits and
//!    [`qstate`] simulates them exactly on a 3-qubit statevector.
//! 2. [`tomography`] reconstructs each 1-qubit reduced density matrix from
//!    shot counts in the Z/X/Y bases and reports the sorted minimal
//!    eigenvalues (n4, n5, n6).
//! 3. [`fockspace`] provides an independent 64-dimensional second-quantized
//!    oracle: the qubit state is mapped to 3 electrons in 6 orbitals, the
//!    6x6 one-particle reduced density matrix is formed, and its spectrum is
//!    checked against the qubit-side occupations.
//! 4. [`polytope`] tests every occupation triple against the Pauli and
//!    Borland-Dennis (generalized Pauli) polytopes; [`sampler`] reproduces
//!    the grid scan with greedy minimum-distance selection that picks the
//!    measured parameter sets; [`noise`] and [`stats`] cover the
//!    calibration-driven error model and the batch distance statistics.
//!
//! Conventions used throughout (fixed once, asserted by tests):
//!
//! * Qubits are indexed from 0; qubit 0 is the most significant bit of a
//!   basis-state index, so `|q0 q1 q2>` reads left to right.
//! * Angles are radians everywhere in the library; degrees appear only at
//!   the CLI and scan-configuration boundary.
//! * Orbitals are indexed 1..=6; orbital 1 is the most significant bit of a
//!   6-bit occupation string.

pub mod circuits;
pub mod fockspace;
pub mod linalg;
pub mod noise;
pub mod polytope;
pub mod qstate;
pub mod records;
pub mod sampler;
pub mod seed;
pub mod stats;
pub mod tomography;

pub use qstate::{Circuit, CountsTable, DensityMatrix, Gate, OneQubitRDM, StateVector};
