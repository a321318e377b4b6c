//! Exact statevector and density-matrix simulation of small qubit registers.
//!
//! Bit convention: qubit `q` occupies bit `n_qubits - 1 - q` of a basis-state
//! index, i.e. qubit 0 is the most significant bit and `|q0 q1 q2>` reads
//! left to right. Every module in this crate relies on this single
//! convention; `tests` pins it.
//!
//! All values are immutable after construction and all operations are pure,
//! so states and circuits can be evaluated freely in parallel. RNG state is
//! passed in explicitly via seeds.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Norm drift tolerated when accepting externally supplied amplitudes.
pub const NORM_TOL: f64 = 1e-10;
/// Unitarity tolerance for user-supplied 2x2 matrices.
pub const UNITARY_TOL: f64 = 1e-12;
/// Kraus completeness tolerance for quantum channels.
pub const KRAUS_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum QstateError {
    #[error("qubit index {index} out of range for {n_qubits} qubit(s)")]
    QubitOutOfRange { index: usize, n_qubits: usize },
    #[error("control and target qubits coincide (qubit {0})")]
    ControlEqualsTarget(usize),
    #[error("2x2 matrix deviates from unitarity by {deviation:.3e}")]
    NotUnitary { deviation: f64 },
    #[error("amplitude vector has length {len}, expected {expected}")]
    DimensionMismatch { len: usize, expected: usize },
    #[error("state norm is {norm}, expected 1 within {tol:.1e}")]
    NotNormalized { norm: f64, tol: f64 },
    #[error("shot count must be at least 1")]
    NoShots,
    #[error("Kraus set deviates from completeness by {deviation:.3e}")]
    KrausIncomplete { deviation: f64 },
    #[error("Kraus operator has shape {rows}x{cols}, expected {dim}x{dim}")]
    KrausShape {
        rows: usize,
        cols: usize,
        dim: usize,
    },
    #[error("counts table is empty")]
    EmptyCounts,
    #[error("counts key {key:?} does not have {expected} bits")]
    BadCountsKey { key: String, expected: usize },
}

/// Complex amplitudes of an `n`-qubit pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// The all-zeros computational basis state `|0...0>`.
    pub fn zero(n_qubits: usize) -> Self {
        let mut amplitudes = vec![Complex64::ZERO; 1 << n_qubits];
        amplitudes[0] = Complex64::ONE;
        Self {
            n_qubits,
            amplitudes,
        }
    }

    /// A computational basis state given by its index.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self, QstateError> {
        let dim = 1 << n_qubits;
        if index >= dim {
            return Err(QstateError::DimensionMismatch {
                len: index,
                expected: dim,
            });
        }
        let mut amplitudes = vec![Complex64::ZERO; dim];
        amplitudes[index] = Complex64::ONE;
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Build a state from raw amplitudes; the norm must already be 1.
    pub fn new(n_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self, QstateError> {
        let expected = 1 << n_qubits;
        if amplitudes.len() != expected {
            return Err(QstateError::DimensionMismatch {
                len: amplitudes.len(),
                expected,
            });
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(QstateError::NotNormalized {
                norm,
                tol: NORM_TOL,
            });
        }
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Haar-like random state: normalized complex Gaussian amplitudes.
    pub fn random<R: rand::Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Self {
        let normal = rand_distr::StandardNormal;
        let mut amplitudes: Vec<Complex64> = (0..1usize << n_qubits)
            .map(|_| Complex64::new(normal.sample(rng), normal.sample(rng)))
            .collect();
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut amplitudes {
            *a /= norm;
        }
        Self {
            n_qubits,
            amplitudes,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Measurement probabilities `|amplitude|^2` by basis index.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Bit of `qubit` within basis-state `index` under the MSB convention.
    #[inline]
    pub fn bit_of(&self, index: usize, qubit: usize) -> usize {
        (index >> (self.n_qubits - 1 - qubit)) & 1
    }

    pub fn to_density_matrix(&self) -> DensityMatrix {
        let dim = self.amplitudes.len();
        let entries = DMatrix::from_fn(dim, dim, |r, c| {
            self.amplitudes[r] * self.amplitudes[c].conj()
        });
        DensityMatrix {
            n_qubits: self.n_qubits,
            entries,
        }
    }
}

/// A single gate acting on named qubits.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    /// Rotation about the Bloch y-axis with the half-angle convention:
    /// `[[cos(t/2), -sin(t/2)], [sin(t/2), cos(t/2)]]`.
    Ry {
        target: usize,
        angle: f64,
    },
    CNOT {
        control: usize,
        target: usize,
    },
    H {
        target: usize,
    },
    X {
        target: usize,
    },
    Z {
        target: usize,
    },
    SDagger {
        target: usize,
    },
    Unitary1Q {
        target: usize,
        matrix: [[Complex64; 2]; 2],
    },
}

impl Gate {
    pub fn target(&self) -> usize {
        match self {
            Gate::Ry { target, .. }
            | Gate::CNOT { target, .. }
            | Gate::H { target }
            | Gate::X { target }
            | Gate::Z { target }
            | Gate::SDagger { target }
            | Gate::Unitary1Q { target, .. } => *target,
        }
    }

    pub fn control(&self) -> Option<usize> {
        match self {
            Gate::CNOT { control, .. } => Some(*control),
            _ => None,
        }
    }

    pub fn validate(&self, n_qubits: usize) -> Result<(), QstateError> {
        let check = |index: usize| {
            if index < n_qubits {
                Ok(())
            } else {
                Err(QstateError::QubitOutOfRange { index, n_qubits })
            }
        };
        check(self.target())?;
        if let Gate::CNOT { control, target } = self {
            check(*control)?;
            if control == target {
                return Err(QstateError::ControlEqualsTarget(*control));
            }
        }
        if let Gate::Unitary1Q { matrix, .. } = self {
            let dev = unitarity_deviation(matrix);
            if dev > UNITARY_TOL {
                return Err(QstateError::NotUnitary { deviation: dev });
            }
        }
        Ok(())
    }

    /// The 2x2 matrix of a single-qubit gate; `None` for CNOT.
    pub fn matrix_1q(&self) -> Option<[[Complex64; 2]; 2]> {
        let o = Complex64::ZERO;
        let l = Complex64::ONE;
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        match self {
            Gate::Ry { angle, .. } => {
                let (s, c) = (angle / 2.0).sin_cos();
                let (s, c) = (Complex64::new(s, 0.0), Complex64::new(c, 0.0));
                Some([[c, -s], [s, c]])
            }
            Gate::H { .. } => Some([[h, h], [h, -h]]),
            Gate::X { .. } => Some([[o, l], [l, o]]),
            Gate::Z { .. } => Some([[l, o], [o, -l]]),
            Gate::SDagger { .. } => Some([[l, o], [o, Complex64::new(0.0, -1.0)]]),
            Gate::Unitary1Q { matrix, .. } => Some(*matrix),
            Gate::CNOT { .. } => None,
        }
    }
}

fn unitarity_deviation(m: &[[Complex64; 2]; 2]) -> f64 {
    // max |(M^dag M - I)_{rc}|
    let mut dev: f64 = 0.0;
    for r in 0..2 {
        for c in 0..2 {
            let mut acc = Complex64::ZERO;
            for row in m {
                acc += row[r].conj() * row[c];
            }
            let target = if r == c {
                Complex64::ONE
            } else {
                Complex64::ZERO
            };
            dev = dev.max((acc - target).norm());
        }
    }
    dev
}

/// An ordered gate sequence over a fixed register, applied first to last.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize, gates: Vec<Gate>) -> Result<Self, QstateError> {
        for gate in &gates {
            gate.validate(n_qubits)?;
        }
        Ok(Self { n_qubits, gates })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// A new circuit with extra gates appended after the existing ones.
    pub fn extended(&self, extra: &[Gate]) -> Result<Self, QstateError> {
        let mut gates = self.gates.clone();
        gates.extend_from_slice(extra);
        Circuit::new(self.n_qubits, gates)
    }
}

/// Apply one gate to a state, returning the transformed state.
pub fn apply_gate(state: &StateVector, gate: &Gate) -> Result<StateVector, QstateError> {
    gate.validate(state.n_qubits)?;
    let mut amplitudes = state.amplitudes.clone();
    apply_gate_unchecked(&mut amplitudes, state.n_qubits, gate);
    Ok(StateVector {
        n_qubits: state.n_qubits,
        amplitudes,
    })
}

/// Run a circuit on an initial state (left fold of `apply_gate`).
pub fn run_circuit(circuit: &Circuit, initial: &StateVector) -> Result<StateVector, QstateError> {
    if circuit.n_qubits != initial.n_qubits {
        return Err(QstateError::DimensionMismatch {
            len: initial.amplitudes.len(),
            expected: 1 << circuit.n_qubits,
        });
    }
    let mut amplitudes = initial.amplitudes.clone();
    for gate in &circuit.gates {
        apply_gate_unchecked(&mut amplitudes, circuit.n_qubits, gate);
    }
    Ok(StateVector {
        n_qubits: circuit.n_qubits,
        amplitudes,
    })
}

pub(crate) fn apply_gate_unchecked(amplitudes: &mut [Complex64], n_qubits: usize, gate: &Gate) {
    match gate {
        Gate::CNOT { control, target } => {
            let cbit = 1usize << (n_qubits - 1 - control);
            let tbit = 1usize << (n_qubits - 1 - target);
            for i in 0..amplitudes.len() {
                if i & cbit != 0 && i & tbit == 0 {
                    amplitudes.swap(i, i | tbit);
                }
            }
        }
        _ => {
            let m = gate.matrix_1q().expect("single-qubit gate");
            let tbit = 1usize << (n_qubits - 1 - gate.target());
            for i in 0..amplitudes.len() {
                if i & tbit == 0 {
                    let a0 = amplitudes[i];
                    let a1 = amplitudes[i | tbit];
                    amplitudes[i] = m[0][0] * a0 + m[0][1] * a1;
                    amplitudes[i | tbit] = m[1][0] * a0 + m[1][1] * a1;
                }
            }
        }
    }
}

/// The full `2^n x 2^n` unitary matrix of a gate.
pub fn gate_unitary(gate: &Gate, n_qubits: usize) -> Result<DMatrix<Complex64>, QstateError> {
    gate.validate(n_qubits)?;
    let dim = 1 << n_qubits;
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for col in 0..dim {
        let mut amplitudes = vec![Complex64::ZERO; dim];
        amplitudes[col] = Complex64::ONE;
        apply_gate_unchecked(&mut amplitudes, n_qubits, gate);
        for row in 0..dim {
            m[(row, col)] = amplitudes[row];
        }
    }
    Ok(m)
}

/// The full unitary matrix of a circuit (product of its gates in order).
pub fn circuit_unitary(circuit: &Circuit) -> Result<DMatrix<Complex64>, QstateError> {
    let dim = 1 << circuit.n_qubits;
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for col in 0..dim {
        let mut amplitudes = vec![Complex64::ZERO; dim];
        amplitudes[col] = Complex64::ONE;
        for gate in &circuit.gates {
            apply_gate_unchecked(&mut amplitudes, circuit.n_qubits, gate);
        }
        for row in 0..dim {
            m[(row, col)] = amplitudes[row];
        }
    }
    Ok(m)
}

/// Shot counts over computational basis strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountsTable {
    pub shots: u64,
    pub counts: BTreeMap<String, u64>,
}

impl CountsTable {
    /// Number of qubits implied by the key width.
    pub fn n_qubits(&self) -> Result<usize, QstateError> {
        let mut keys = self.counts.keys();
        let first = keys.next().ok_or(QstateError::EmptyCounts)?;
        let width = first.len();
        for key in self.counts.keys() {
            if key.len() != width || key.bytes().any(|b| b != b'0' && b != b'1') {
                return Err(QstateError::BadCountsKey {
                    key: key.clone(),
                    expected: width,
                });
            }
        }
        Ok(width)
    }

    /// Fraction of shots in which `qubit` read out as 0.
    pub fn zero_fraction(&self, qubit: usize) -> Result<f64, QstateError> {
        let width = self.n_qubits()?;
        if qubit >= width {
            return Err(QstateError::QubitOutOfRange {
                index: qubit,
                n_qubits: width,
            });
        }
        let zeros: u64 = self
            .counts
            .iter()
            .filter(|(key, _)| key.as_bytes()[qubit] == b'0')
            .map(|(_, c)| *c)
            .sum();
        Ok(zeros as f64 / self.shots as f64)
    }
}

/// Multinomial draw from an explicit probability vector; deterministic per seed.
pub(crate) fn sample_from_probabilities(
    probabilities: &[f64],
    n_qubits: usize,
    shots: u64,
    seed: u64,
) -> Result<CountsTable, QstateError> {
    if shots == 0 {
        return Err(QstateError::NoShots);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = BTreeMap::new();
    let mut remaining_shots = shots;
    let mut remaining_mass = 1.0_f64;
    for (index, &p) in probabilities.iter().enumerate() {
        if remaining_shots == 0 {
            break;
        }
        let drawn = if index + 1 == probabilities.len() {
            remaining_shots
        } else {
            let q = (p / remaining_mass).clamp(0.0, 1.0);
            let b = Binomial::new(remaining_shots, q).expect("probability in [0, 1]");
            b.sample(&mut rng)
        };
        if drawn > 0 {
            counts.insert(format!("{index:0n_qubits$b}"), drawn);
            remaining_shots -= drawn;
        }
        remaining_mass = (remaining_mass - p).max(0.0);
    }
    Ok(CountsTable { shots, counts })
}

/// Sample measurement outcomes of all qubits in the computational basis.
pub fn sample_counts(
    state: &StateVector,
    shots: u64,
    seed: u64,
) -> Result<CountsTable, QstateError> {
    sample_from_probabilities(&state.probabilities(), state.n_qubits, shots, seed)
}

/// A 2x2 Hermitian reduced density matrix of a single qubit.
///
/// `d01` is `<0|rho|1>`; `d10` is its conjugate and is not stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OneQubitRDM {
    pub d00: f64,
    pub d11: f64,
    pub d01_re: f64,
    pub d01_im: f64,
}

impl OneQubitRDM {
    pub fn d01(&self) -> Complex64 {
        Complex64::new(self.d01_re, self.d01_im)
    }

    pub fn trace(&self) -> f64 {
        self.d00 + self.d11
    }

    /// Closed-form eigenvalues `(max, min)`:
    /// `tr/2 +- sqrt((d00-d11)^2/4 + |d01|^2)`.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let mid = (self.d00 + self.d11) / 2.0;
        let radius = ((self.d00 - self.d11) / 2.0).hypot(self.d01().norm());
        (mid + radius, mid - radius)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().1
    }
}

/// Partial trace of a pure state over all qubits except `qubit`.
pub fn reduced_1q_rdm(state: &StateVector, qubit: usize) -> Result<OneQubitRDM, QstateError> {
    if qubit >= state.n_qubits {
        return Err(QstateError::QubitOutOfRange {
            index: qubit,
            n_qubits: state.n_qubits,
        });
    }
    let bit = 1usize << (state.n_qubits - 1 - qubit);
    let mut d00 = 0.0;
    let mut d11 = 0.0;
    let mut d01 = Complex64::ZERO;
    for i in 0..state.amplitudes.len() {
        if i & bit == 0 {
            let a0 = state.amplitudes[i];
            let a1 = state.amplitudes[i | bit];
            d00 += a0.norm_sqr();
            d11 += a1.norm_sqr();
            d01 += a0 * a1.conj();
        }
    }
    Ok(OneQubitRDM {
        d00,
        d11,
        d01_re: d01.re,
        d01_im: d01.im,
    })
}

/// A density matrix over the full register; used for noise studies only.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    entries: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn from_state(state: &StateVector) -> Self {
        state.to_density_matrix()
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    /// Conjugate the density matrix by a gate's unitary.
    pub fn apply_gate(&self, gate: &Gate) -> Result<Self, QstateError> {
        let u = gate_unitary(gate, self.n_qubits)?;
        let entries = &u * &self.entries * u.adjoint();
        Ok(Self {
            n_qubits: self.n_qubits,
            entries,
        })
    }

    /// Apply a completely positive trace-preserving map given by Kraus
    /// operators. Completeness `sum K^dag K = I` is enforced.
    pub fn apply_channel(&self, kraus_ops: &[DMatrix<Complex64>]) -> Result<Self, QstateError> {
        let dim = self.entries.nrows();
        let mut completeness = DMatrix::<Complex64>::zeros(dim, dim);
        for k in kraus_ops {
            if k.nrows() != dim || k.ncols() != dim {
                return Err(QstateError::KrausShape {
                    rows: k.nrows(),
                    cols: k.ncols(),
                    dim,
                });
            }
            completeness += k.adjoint() * k;
        }
        let deviation = crate::linalg::max_abs_diff(&completeness, &DMatrix::identity(dim, dim));
        if deviation > KRAUS_TOL {
            return Err(QstateError::KrausIncomplete { deviation });
        }
        let mut entries = DMatrix::<Complex64>::zeros(dim, dim);
        for k in kraus_ops {
            entries += k * &self.entries * k.adjoint();
        }
        Ok(Self {
            n_qubits: self.n_qubits,
            entries,
        })
    }

    /// Diagonal measurement probabilities, clipped at zero.
    pub fn diagonal_probabilities(&self) -> Vec<f64> {
        self.entries
            .diagonal()
            .iter()
            .map(|z| z.re.max(0.0))
            .collect()
    }

    /// Partial trace down to a single qubit.
    pub fn reduced_1q(&self, qubit: usize) -> Result<OneQubitRDM, QstateError> {
        if qubit >= self.n_qubits {
            return Err(QstateError::QubitOutOfRange {
                index: qubit,
                n_qubits: self.n_qubits,
            });
        }
        let bit = 1usize << (self.n_qubits - 1 - qubit);
        let mut d00 = Complex64::ZERO;
        let mut d11 = Complex64::ZERO;
        let mut d01 = Complex64::ZERO;
        for i in 0..self.entries.nrows() {
            if i & bit == 0 {
                d00 += self.entries[(i, i)];
                d11 += self.entries[(i | bit, i | bit)];
                d01 += self.entries[(i, i | bit)];
            }
        }
        Ok(OneQubitRDM {
            d00: d00.re,
            d11: d11.re,
            d01_re: d01.re,
            d01_im: d01.im,
        })
    }

    /// Hermiticity deviation, trace deviation from 1, and most negative
    /// eigenvalue; used by sanity checks.
    pub fn health(&self) -> (f64, f64, f64) {
        let herm = crate::linalg::max_abs_diff(&self.entries, &self.entries.adjoint());
        let trace_dev = (self.trace() - Complex64::ONE).norm();
        let (evals, _) = crate::linalg::hermitian_eigen_desc(&self.entries);
        let min_eig = evals.iter().copied().fold(f64::INFINITY, f64::min);
        (herm, trace_dev, min_eig)
    }
}
