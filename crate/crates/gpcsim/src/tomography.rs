//! Linear-inversion tomography of 1-qubit reduced density matrices.
//!
//! Each qubit's RDM is reconstructed from shot counts taken in three
//! measurement settings (Z, X, Y), applied to all qubits simultaneously:
//!
//! * `d00` is the Z-basis zero fraction,
//! * `Re d01 = f_X(0) - 1/2` (pre-rotation H),
//! * `Im d01 = 1/2 - f_Y(0)` (pre-rotation S-dagger then H).
//!
//! The imaginary sign is fixed so that the state `(|0> + i|1>)/sqrt(2)`
//! yields `Im d01 = -1/2` under `d01 = <0|rho|1>`; a unit test locks this.
//! The occupation triple is the sorted list of minimal RDM eigenvalues.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use crate::qstate::OneQubitRDM;
use crate::qstate::{
    reduced_1q_rdm, run_circuit, sample_counts, Circuit, CountsTable, Gate, QstateError,
    StateVector,
};
use crate::seed;

#[derive(Debug, Error)]
pub enum TomographyError {
    #[error("shot totals disagree across settings: {0:?}")]
    ShotMismatch([u64; 3]),
    #[error(transparent)]
    Qstate(#[from] QstateError),
    #[error("occupation triple requires a 3-qubit state, got {0} qubits")]
    NotThreeQubits(usize),
}

/// Measurement basis for one shot batch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    Z,
    X,
    Y,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::Z, Basis::X, Basis::Y];

    /// Gates appended to a circuit so that a computational-basis readout
    /// measures this basis. Applied to one qubit; callers append the
    /// fragment for every qubit since single-qubit rotations commute.
    pub fn pre_rotation(self, qubit: usize) -> Vec<Gate> {
        match self {
            Basis::Z => vec![],
            Basis::X => vec![Gate::H { target: qubit }],
            Basis::Y => vec![Gate::SDagger { target: qubit }, Gate::H { target: qubit }],
        }
    }

    /// Pre-rotation fragments for all qubits of a register.
    pub fn pre_rotation_all(self, n_qubits: usize) -> Vec<Gate> {
        (0..n_qubits).flat_map(|q| self.pre_rotation(q)).collect()
    }
}

/// The qubit-restricted one-body rotation
/// `[[cos(phi), -g sin(phi)], [g sin(phi), cos(phi)]]` with `g = +-1`.
///
/// At `phi = pi/4` this equals `H Z` for `g = +1` and `Z H` for `g = -1`,
/// up to global phase.
pub fn build_rotation_unitary(phi: f64, gamma_sign: i8) -> [[num_complex::Complex64; 2]; 2] {
    assert!(
        gamma_sign == 1 || gamma_sign == -1,
        "gamma_sign must be +1 or -1"
    );
    let g = f64::from(gamma_sign);
    let c = num_complex::Complex64::new(phi.cos(), 0.0);
    let s = num_complex::Complex64::new(g * phi.sin(), 0.0);
    [[c, -s], [s, c]]
}

/// Sorted minimal eigenvalues of the three 1-qubit RDMs.
///
/// Noiseless values lie in [0, 1/2]; reconstructed values are clamped to
/// [0, 1] before sorting and the triple is stored descending.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OccupationTriple {
    pub n4: f64,
    pub n5: f64,
    pub n6: f64,
}

impl OccupationTriple {
    /// Sort three occupation values descending. Does not clamp.
    pub fn from_sorted(values: [f64; 3]) -> Self {
        let mut v = values;
        v.sort_by(|a, b| b.partial_cmp(a).expect("occupations are finite"));
        Self {
            n4: v[0],
            n5: v[1],
            n6: v[2],
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.n4, self.n5, self.n6]
    }

    pub fn distance(&self, other: &OccupationTriple) -> f64 {
        let d = [self.n4 - other.n4, self.n5 - other.n5, self.n6 - other.n6];
        (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
    }
}

/// Exact occupation triple of a 3-qubit pure state via partial traces and
/// closed-form 2x2 eigenvalues.
pub fn occupations_exact(state: &StateVector) -> Result<OccupationTriple, TomographyError> {
    if state.n_qubits() != 3 {
        return Err(TomographyError::NotThreeQubits(state.n_qubits()));
    }
    let mut mins = [0.0; 3];
    for (qubit, slot) in mins.iter_mut().enumerate() {
        *slot = reduced_1q_rdm(state, qubit)?.min_eigenvalue();
    }
    Ok(OccupationTriple::from_sorted(mins))
}

/// Reconstruct one qubit's RDM from exact zero-fractions in the three bases.
pub fn rdm_from_frequencies(f_z0: f64, f_x0: f64, f_y0: f64) -> OneQubitRDM {
    OneQubitRDM {
        d00: f_z0,
        d11: 1.0 - f_z0,
        d01_re: f_x0 - 0.5,
        d01_im: 0.5 - f_y0,
    }
}

/// Reconstruct one qubit's RDM from counts tables in the three settings.
pub fn estimate_rdm(
    counts_z: &CountsTable,
    counts_x: &CountsTable,
    counts_y: &CountsTable,
    qubit: usize,
) -> Result<OneQubitRDM, TomographyError> {
    let shots = [counts_z.shots, counts_x.shots, counts_y.shots];
    if shots[0] != shots[1] || shots[0] != shots[2] {
        return Err(TomographyError::ShotMismatch(shots));
    }
    Ok(rdm_from_frequencies(
        counts_z.zero_fraction(qubit)?,
        counts_x.zero_fraction(qubit)?,
        counts_y.zero_fraction(qubit)?,
    ))
}

/// Shot-based tomography output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasuredOccupations {
    pub occupations: OccupationTriple,
    /// Raw counts per setting, ordered Z, X, Y.
    pub counts: [CountsTable; 3],
    /// Number of eigenvalues clamped into [0, 1] during reconstruction.
    pub clamp_events: u32,
}

/// Assemble the occupation triple from three counts tables, clamping each
/// minimal eigenvalue into [0, 1] and counting the clamps.
pub fn occupations_from_counts(
    counts: &[CountsTable; 3],
) -> Result<(OccupationTriple, u32), TomographyError> {
    let n_qubits = counts[0].n_qubits()?;
    if n_qubits != 3 {
        return Err(TomographyError::NotThreeQubits(n_qubits));
    }
    let mut mins = [0.0f64; 3];
    let mut clamp_events = 0;
    for (qubit, slot) in mins.iter_mut().enumerate() {
        let rdm = estimate_rdm(&counts[0], &counts[1], &counts[2], qubit)?;
        let min = rdm.min_eigenvalue();
        let clamped = min.clamp(0.0, 1.0);
        if clamped != min {
            clamp_events += 1;
        }
        *slot = clamped;
    }
    Ok((OccupationTriple::from_sorted(mins), clamp_events))
}

/// Shot-based tomography of a noiseless prepared state.
///
/// Each of the three settings draws `shots` samples; setting seeds are
/// derived from `seed` so a run can be replayed setting by setting. The
/// gate-noise path lives in [`crate::noise::occupations_measured_noisy`],
/// which needs the preparation circuit rather than the prepared state.
pub fn occupations_measured(
    state: &StateVector,
    shots: u64,
    seed: u64,
) -> Result<MeasuredOccupations, TomographyError> {
    let mut tables = Vec::with_capacity(3);
    for (index, basis) in Basis::ALL.iter().enumerate() {
        let mut rotated = state.clone();
        for gate in basis.pre_rotation_all(state.n_qubits()) {
            rotated = crate::qstate::apply_gate(&rotated, &gate)?;
        }
        let table = sample_counts(&rotated, shots, seed::derive(seed, "setting", index as u64))?;
        tables.push(table);
    }
    let counts: [CountsTable; 3] = tables.try_into().expect("three settings");
    let (occupations, clamp_events) = occupations_from_counts(&counts)?;
    Ok(MeasuredOccupations {
        occupations,
        counts,
        clamp_events,
    })
}

/// Exact (infinite-shot) tomography frequencies of a prepared state:
/// zero-fraction per qubit for each setting, bypassing sampling.
pub fn exact_setting_frequencies(
    state: &StateVector,
    basis: Basis,
) -> Result<Vec<f64>, TomographyError> {
    let mut rotated = state.clone();
    for gate in basis.pre_rotation_all(state.n_qubits()) {
        rotated = crate::qstate::apply_gate(&rotated, &gate)?;
    }
    let probs = rotated.probabilities();
    let n = state.n_qubits();
    let mut fractions = vec![0.0; n];
    for (index, p) in probs.iter().enumerate() {
        for (qubit, fraction) in fractions.iter_mut().enumerate() {
            if state.bit_of(index, qubit) == 0 {
                *fraction += p;
            }
        }
    }
    Ok(fractions)
}

/// Run a preparation circuit and measure it with shot-based tomography.
pub fn measure_circuit(
    circuit: &Circuit,
    shots: u64,
    seed: u64,
) -> Result<MeasuredOccupations, TomographyError> {
    let state = run_circuit(circuit, &StateVector::zero(circuit.n_qubits()))?;
    occupations_measured(&state, shots, seed)
}
