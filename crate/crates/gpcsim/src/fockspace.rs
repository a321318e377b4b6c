//! Independent 3-electrons-in-6-orbitals oracle.
//!
//! States live in the 64-dimensional Fock space of 6 spin orbitals, indexed
//! by occupation bitstrings with orbital 1 as the most significant bit.
//! Basis determinants are defined with creation operators applied in
//! ascending orbital order, which fixes every relative sign.
//!
//! The qubit register maps in through the orbital pairing {1,6}, {2,5},
//! {3,4}: qubit k (0-based) in |0> occupies orbital k+1, in |1> orbital
//! 6-k. The 6x6 one-particle reduced density matrix uses the convention
//! `D_ij = <a+_j a_i>`, so occupations sit on the diagonal and the trace is
//! the particle number.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{expm, hermitian_eigen_desc, max_abs_diff};
use crate::qstate::StateVector;

pub const N_ORBITALS: usize = 6;
pub const FOCK_DIM: usize = 64;
/// Particle sector of every mapped state.
pub const N_PARTICLES: u32 = 3;
/// Orbital pairs sharing one electron, one pair per qubit.
pub const ORBITAL_PAIRS: [(usize, usize); 3] = [(1, 6), (2, 5), (3, 4)];

#[derive(Debug, Error)]
pub enum FockError {
    #[error("orbital {0} out of range 1..=6")]
    OrbitalOutOfRange(usize),
    #[error("orbital indices must differ, got {0}")]
    EqualOrbitals(usize),
    #[error("state has support {norm:.3e} outside the {expected}-particle sector")]
    WrongSector { norm: f64, expected: u32 },
    #[error("state norm is {0}, expected 1 within 1e-10")]
    NotNormalized(f64),
    #[error("qubit register must have 3 qubits, got {0}")]
    NotThreeQubits(usize),
    #[error(
        "matrix exponential disagrees with the closed form by {0:.3e}; this indicates an internal inconsistency"
    )]
    ClosedFormMismatch(f64),
}

/// Bit position of an orbital within a Fock index (orbital 1 = MSB).
#[inline]
fn orbital_bit(orbital: usize) -> usize {
    N_ORBITALS - orbital
}

fn check_orbital(orbital: usize) -> Result<(), FockError> {
    if (1..=N_ORBITALS).contains(&orbital) {
        Ok(())
    } else {
        Err(FockError::OrbitalOutOfRange(orbital))
    }
}

/// Sign picked up when moving a creation/annihilation operator for
/// `orbital` past the occupied orbitals of smaller index in `index`.
#[inline]
fn jordan_wigner_sign(index: usize, orbital: usize) -> f64 {
    let above = index >> (orbital_bit(orbital) + 1);
    if above.count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Amplitude vector over the 64 occupation strings, restricted to the
/// 3-particle sector.
#[derive(Debug, Clone, PartialEq)]
pub struct FermionState {
    amplitudes: Vec<Complex64>,
}

impl FermionState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self, FockError> {
        assert_eq!(amplitudes.len(), FOCK_DIM);
        let mut sector_norm = 0.0;
        let mut outside = 0.0;
        for (index, a) in amplitudes.iter().enumerate() {
            if index.count_ones() == N_PARTICLES {
                sector_norm += a.norm_sqr();
            } else {
                outside += a.norm_sqr();
            }
        }
        if outside.sqrt() > 1e-10 {
            return Err(FockError::WrongSector {
                norm: outside.sqrt(),
                expected: N_PARTICLES,
            });
        }
        let norm = (sector_norm + outside).sqrt();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(FockError::NotNormalized(norm));
        }
        Ok(Self { amplitudes })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `a_orbital |state>`, leaving the normalized sector (not renormalized).
    pub fn annihilate(&self, orbital: usize) -> Result<Vec<Complex64>, FockError> {
        check_orbital(orbital)?;
        let bit = 1usize << orbital_bit(orbital);
        let mut out = vec![Complex64::ZERO; FOCK_DIM];
        for (index, a) in self.amplitudes.iter().enumerate() {
            if index & bit != 0 {
                out[index & !bit] = *a * jordan_wigner_sign(index, orbital);
            }
        }
        Ok(out)
    }
}

/// 64x64 matrix of the creation operator for one orbital.
///
/// Entries are exactly 0 or +-1, so anticommutation identities hold in
/// exact arithmetic.
pub fn creation_matrix(orbital: usize) -> Result<DMatrix<f64>, FockError> {
    check_orbital(orbital)?;
    let bit = 1usize << orbital_bit(orbital);
    let mut m = DMatrix::<f64>::zeros(FOCK_DIM, FOCK_DIM);
    for col in 0..FOCK_DIM {
        if col & bit == 0 {
            m[(col | bit, col)] = jordan_wigner_sign(col, orbital);
        }
    }
    Ok(m)
}

/// 64x64 matrix of the annihilation operator (transpose of creation).
pub fn annihilation_matrix(orbital: usize) -> Result<DMatrix<f64>, FockError> {
    Ok(creation_matrix(orbital)?.transpose())
}

/// Map a 3-qubit state to the paired-orbital Fock space.
///
/// Basis rule: qubit k in |0> occupies orbital k+1, in |1> orbital 6-k;
/// amplitudes carry over with sign +1 because determinants are defined in
/// ascending creation order.
pub fn map_qubit_to_fermion(state: &StateVector) -> Result<FermionState, FockError> {
    if state.n_qubits() != 3 {
        return Err(FockError::NotThreeQubits(state.n_qubits()));
    }
    let mut amplitudes = vec![Complex64::ZERO; FOCK_DIM];
    for (qubit_index, amplitude) in state.amplitudes().iter().enumerate() {
        let mut fock_index = 0usize;
        for (qubit, &(low, high)) in ORBITAL_PAIRS.iter().enumerate() {
            let orbital = if state.bit_of(qubit_index, qubit) == 0 {
                low
            } else {
                high
            };
            fock_index |= 1 << orbital_bit(orbital);
        }
        amplitudes[fock_index] = *amplitude;
    }
    FermionState::new(amplitudes)
}

/// The 6x6 one-particle reduced density matrix, `D_ij = <a+_j a_i>`.
#[derive(Debug, Clone, PartialEq)]
pub struct OneRDM6 {
    entries: DMatrix<Complex64>,
}

impl OneRDM6 {
    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    /// Natural occupations sorted descending, with eigenvectors as columns.
    pub fn natural_orbitals(&self) -> (Vec<f64>, DMatrix<Complex64>) {
        hermitian_eigen_desc(&self.entries)
    }

    /// Natural occupations sorted descending.
    pub fn occupations(&self) -> [f64; 6] {
        let (vals, _) = self.natural_orbitals();
        std::array::from_fn(|i| vals[i])
    }
}

/// Form the 1-RDM of a fermionic state: `D_ij = <a_j psi | a_i psi>`.
pub fn one_rdm(state: &FermionState) -> Result<OneRDM6, FockError> {
    let holes: Vec<Vec<Complex64>> = (1..=N_ORBITALS)
        .map(|orbital| state.annihilate(orbital))
        .collect::<Result<_, _>>()?;
    let entries = DMatrix::from_fn(N_ORBITALS, N_ORBITALS, |i, j| {
        holes[j]
            .iter()
            .zip(holes[i].iter())
            .map(|(hj, hi)| hj.conj() * hi)
            .sum()
    });
    Ok(OneRDM6 { entries })
}

/// `<a+_i a_j>` evaluated by applying both operators to the state.
pub fn hop_expectation(state: &FermionState, i: usize, j: usize) -> Result<Complex64, FockError> {
    let ai = state.annihilate(i)?;
    let aj = state.annihilate(j)?;
    Ok(ai.iter().zip(aj.iter()).map(|(x, y)| x.conj() * y).sum())
}

/// Weights of single, double and triple excitations contributing to one
/// weakly occupied natural orbital.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExcitationSplit {
    /// Natural-orbital index in 4..=6.
    pub orbital: usize,
    pub singles_weight: f64,
    pub doubles_weight: f64,
    pub triples_weight: f64,
    /// The occupation eigenvalue n_u this split must sum to.
    pub occupation: f64,
}

impl ExcitationSplit {
    pub fn total(&self) -> f64 {
        self.singles_weight + self.doubles_weight + self.triples_weight
    }
}

/// Excitation decomposition of a state in its own natural-orbital basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcitationWeights {
    pub per_orbital: [ExcitationSplit; 3],
    /// Smallest gap between adjacent natural occupations; a near-zero gap
    /// means the natural-orbital basis (and hence the split) is not unique.
    pub min_occupation_gap: f64,
    pub degenerate: bool,
    /// The natural-orbital rotation actually used (columns = orbitals).
    pub rotation: DMatrix<Complex64>,
}

/// Decompose the occupation of each weakly occupied natural orbital into
/// single/double/triple-excitation weights relative to the reference
/// determinant of the 3 most occupied natural orbitals.
///
/// The state is rotated into the natural-orbital basis of its own 1-RDM;
/// the rotation is returned. With a degenerate 1-RDM spectrum the split is
/// basis-dependent and `degenerate` is set.
pub fn excitation_weights(state: &FermionState) -> Result<ExcitationWeights, FockError> {
    let rdm = one_rdm(state)?;
    let (occupations, rotation) = rdm.natural_orbitals();
    let min_occupation_gap = occupations
        .windows(2)
        .map(|w| (w[0] - w[1]).abs())
        .fold(f64::INFINITY, f64::min);
    let degenerate = min_occupation_gap < 1e-8;

    // Amplitudes in the rotated basis: c'_K = sum_J det(U[J,K])* c_J over
    // 3-subsets J, K of the orbitals.
    let subsets = three_subsets();
    let mut rotated = vec![Complex64::ZERO; subsets.len()];
    for (k_pos, k) in subsets.iter().enumerate() {
        let mut acc = Complex64::ZERO;
        for j in subsets.iter() {
            let c_j = state.amplitudes[subset_index(j)];
            if c_j.norm_sqr() == 0.0 {
                continue;
            }
            acc += det3(&rotation, j, k).conj() * c_j;
        }
        rotated[k_pos] = acc;
    }

    let mut per_orbital = [ExcitationSplit {
        orbital: 0,
        singles_weight: 0.0,
        doubles_weight: 0.0,
        triples_weight: 0.0,
        occupation: 0.0,
    }; 3];
    for (slot, orbital) in (4..=6).enumerate() {
        per_orbital[slot].orbital = orbital;
        per_orbital[slot].occupation = occupations[orbital - 1];
    }
    for (k_pos, k) in subsets.iter().enumerate() {
        let weight = rotated[k_pos].norm_sqr();
        if weight == 0.0 {
            continue;
        }
        let rank = k.iter().filter(|&&o| o > 3).count();
        for &occupied in k {
            if occupied > 3 {
                let split = &mut per_orbital[occupied - 4];
                match rank {
                    1 => split.singles_weight += weight,
                    2 => split.doubles_weight += weight,
                    3 => split.triples_weight += weight,
                    _ => unreachable!("orbital > 3 implies rank >= 1"),
                }
            }
        }
    }
    Ok(ExcitationWeights {
        per_orbital,
        min_occupation_gap,
        degenerate,
        rotation,
    })
}

/// All 3-element subsets of {1..6} in lexicographic order.
fn three_subsets() -> Vec<[usize; 3]> {
    let mut subsets = Vec::with_capacity(20);
    for a in 1..=4 {
        for b in (a + 1)..=5 {
            for c in (b + 1)..=6 {
                subsets.push([a, b, c]);
            }
        }
    }
    subsets
}

fn subset_index(subset: &[usize; 3]) -> usize {
    subset
        .iter()
        .fold(0usize, |acc, &o| acc | (1 << orbital_bit(o)))
}

/// Determinant of the 3x3 submatrix of `u` with rows `j`, columns `k`.
fn det3(u: &DMatrix<Complex64>, j: &[usize; 3], k: &[usize; 3]) -> Complex64 {
    let m = |r: usize, c: usize| u[(j[r] - 1, k[c] - 1)];
    m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
        - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
        + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0))
}

/// The antihermitian one-body rotation generator between orbitals i and j.
///
/// Real variant: `a+_i a_j - a+_j a_i`. Imaginary variant:
/// `-i (a+_i a_j + a+_j a_i)`; the sign is fixed so that the quarter-turn
/// observable reproduces `(D_ii + D_jj + i(D_ij - D_ji))/2` under the
/// `D_ij = <a+_j a_i>` convention.
pub fn excitation_generator(
    i: usize,
    j: usize,
    imaginary_variant: bool,
) -> Result<DMatrix<Complex64>, FockError> {
    if i == j {
        return Err(FockError::EqualOrbitals(i));
    }
    let hop_ij = creation_matrix(i)? * annihilation_matrix(j)?;
    let hop_ji = creation_matrix(j)? * annihilation_matrix(i)?;
    let m = if imaginary_variant {
        (hop_ij + hop_ji).map(|x| Complex64::new(0.0, -x))
    } else {
        (hop_ij - hop_ji).map(|x| Complex64::new(x, 0.0))
    };
    Ok(m)
}

/// Projector onto the subspace where exactly one of orbitals i, j is
/// occupied: `n_i + n_j - 2 n_i n_j`, diagonal in the occupation basis.
pub fn pair_projector(i: usize, j: usize) -> Result<DMatrix<Complex64>, FockError> {
    check_orbital(i)?;
    check_orbital(j)?;
    if i == j {
        return Err(FockError::EqualOrbitals(i));
    }
    let bi = 1usize << orbital_bit(i);
    let bj = 1usize << orbital_bit(j);
    let mut m = DMatrix::<Complex64>::zeros(FOCK_DIM, FOCK_DIM);
    for index in 0..FOCK_DIM {
        let ni = usize::from(index & bi != 0);
        let nj = usize::from(index & bj != 0);
        if ni + nj == 1 {
            m[(index, index)] = Complex64::ONE;
        }
    }
    Ok(m)
}

/// Closed form of `exp(phi * generator)`:
/// `beta cos(phi) + alpha sin(phi) + (1 - beta)` with `beta` the pair
/// projector. Valid for both generator variants because both square to
/// `-beta`.
pub fn pair_rotation_closed_form(
    i: usize,
    j: usize,
    phi: f64,
    imaginary_variant: bool,
) -> Result<DMatrix<Complex64>, FockError> {
    let alpha = excitation_generator(i, j, imaginary_variant)?;
    let beta = pair_projector(i, j)?;
    let eye = DMatrix::<Complex64>::identity(FOCK_DIM, FOCK_DIM);
    Ok(&beta * Complex64::new(phi.cos(), 0.0)
        + alpha * Complex64::new(phi.sin(), 0.0)
        + (eye - &beta))
}

/// Expectation of the rotated occupation `exp(-phi a) n_i exp(phi a)`.
///
/// Evaluated two independent ways: (a) the dense matrix exponential and
/// (b) the closed form `<n_i> + <zeta>/2 sin(2 phi) - <eta> sin^2(phi)`;
/// route (a) is returned after asserting the two agree to 1e-10.
pub fn bch_observable(
    state: &FermionState,
    i: usize,
    j: usize,
    phi: f64,
    imaginary_variant: bool,
) -> Result<f64, FockError> {
    check_orbital(i)?;
    check_orbital(j)?;
    if i == j {
        return Err(FockError::EqualOrbitals(i));
    }

    // (a) dense route
    let alpha = excitation_generator(i, j, imaginary_variant)?;
    let u = expm(&alpha.map(|x| x * Complex64::new(phi, 0.0)));
    let rotated: Vec<Complex64> = {
        let v = nalgebra::DVector::from_column_slice(&state.amplitudes);
        (&u * v).iter().copied().collect()
    };
    let bit = 1usize << orbital_bit(i);
    let direct: f64 = rotated
        .iter()
        .enumerate()
        .filter(|(index, _)| index & bit != 0)
        .map(|(_, a)| a.norm_sqr())
        .sum();

    // (b) closed-form route on the original state
    let n_i = occupation_expectation(state, i)?;
    let n_j = occupation_expectation(state, j)?;
    let hop_ij = hop_expectation(state, i, j)?;
    let hop_ji = hop_expectation(state, j, i)?;
    let zeta = if imaginary_variant {
        // commutator of n_i with the imaginary-variant generator
        (hop_ij - hop_ji) * Complex64::new(0.0, -1.0)
    } else {
        hop_ij + hop_ji
    };
    let closed = n_i + zeta.re / 2.0 * (2.0 * phi).sin() - (n_i - n_j) * phi.sin().powi(2);

    let disagreement = (direct - closed).abs();
    if disagreement > 1e-10 {
        return Err(FockError::ClosedFormMismatch(disagreement));
    }
    Ok(direct)
}

/// `<n_orbital>` of a fermionic state.
pub fn occupation_expectation(state: &FermionState, orbital: usize) -> Result<f64, FockError> {
    check_orbital(orbital)?;
    let bit = 1usize << orbital_bit(orbital);
    Ok(state
        .amplitudes
        .iter()
        .enumerate()
        .filter(|(index, _)| index & bit != 0)
        .map(|(_, a)| a.norm_sqr())
        .sum())
}

/// Verify the closed-form exponential identity for one pair and angle;
/// returns the maximum entrywise deviation between `expm` and the closed
/// form.
pub fn closed_form_deviation(
    i: usize,
    j: usize,
    phi: f64,
    imaginary_variant: bool,
) -> Result<f64, FockError> {
    let alpha = excitation_generator(i, j, imaginary_variant)?;
    let dense = expm(&alpha.map(|x| x * Complex64::new(phi, 0.0)));
    let closed = pair_rotation_closed_form(i, j, phi, imaginary_variant)?;
    Ok(max_abs_diff(&dense, &closed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{run_circuit, Circuit, Gate};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ghz() -> StateVector {
        let circuit = Circuit::new(
            3,
            vec![
                Gate::Ry {
                    target: 0,
                    angle: FRAC_PI_2,
                },
                Gate::CNOT {
                    control: 0,
                    target: 1,
                },
                Gate::CNOT {
                    control: 1,
                    target: 2,
                },
            ],
        )
        .unwrap();
        run_circuit(&circuit, &StateVector::zero(3)).unwrap()
    }

    #[test]
    fn creation_on_vacuum_has_plus_sign() {
        let m = creation_matrix(1).unwrap();
        assert_eq!(m[(0b100000, 0)], 1.0);
        // creating orbital 3 on |110000> crosses two occupied orbitals
        let m3 = creation_matrix(3).unwrap();
        assert_eq!(m3[(0b111000, 0b110000)], 1.0);
        // creating orbital 3 on |100000> crosses one occupied orbital
        assert_eq!(m3[(0b101000, 0b100000)], -1.0);
    }

    #[test]
    fn anticommutators_hold_exactly() {
        let eye = DMatrix::<f64>::identity(FOCK_DIM, FOCK_DIM);
        for orbital in 1..=6 {
            let cr = creation_matrix(orbital).unwrap();
            let an = annihilation_matrix(orbital).unwrap();
            let anti = &an * &cr + &cr * &an;
            assert_eq!(anti, eye, "{{a_{orbital}, a+_{orbital}}} != 1");
        }
        let cr2 = creation_matrix(2).unwrap();
        let an1 = annihilation_matrix(1).unwrap();
        let anti = &an1 * &cr2 + &cr2 * &an1;
        assert_eq!(anti, DMatrix::<f64>::zeros(FOCK_DIM, FOCK_DIM));
        // creations anticommute among themselves
        let cr1 = creation_matrix(1).unwrap();
        let anti = &cr1 * &cr2 + &cr2 * &cr1;
        assert_eq!(anti, DMatrix::<f64>::zeros(FOCK_DIM, FOCK_DIM));
    }

    #[test]
    fn annihilate_matches_matrix_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let state = map_qubit_to_fermion(&StateVector::random(3, &mut rng)).unwrap();
        for orbital in 1..=6 {
            let bits = state.annihilate(orbital).unwrap();
            let m = annihilation_matrix(orbital).unwrap();
            let v = nalgebra::DVector::from_column_slice(state.amplitudes());
            let via_matrix = m.map(|x| Complex64::new(x, 0.0)) * v;
            for (a, b) in bits.iter().zip(via_matrix.iter()) {
                assert!((a - b).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn qubit_mapping_reference_determinants() {
        let vacuum_image = map_qubit_to_fermion(&StateVector::zero(3)).unwrap();
        assert_abs_diff_eq!(vacuum_image.amplitudes()[0b111000].re, 1.0, epsilon = 1e-15);

        let ones = StateVector::basis(3, 0b111).unwrap();
        let image = map_qubit_to_fermion(&ones).unwrap();
        assert_abs_diff_eq!(image.amplitudes()[0b000111].re, 1.0, epsilon = 1e-15);

        let ghz_image = map_qubit_to_fermion(&ghz()).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(ghz_image.amplitudes()[0b111000].re, r, epsilon = 1e-12);
        assert_abs_diff_eq!(ghz_image.amplitudes()[0b000111].re, r, epsilon = 1e-12);
    }

    /// Dense 1-RDM via explicit operator matrices; the production path uses
    /// bit operations, so this is an independent route.
    fn brute_force_rdm(state: &FermionState) -> DMatrix<Complex64> {
        let v = nalgebra::DVector::from_column_slice(state.amplitudes());
        DMatrix::from_fn(6, 6, |i, j| {
            let op = creation_matrix(j + 1).unwrap() * annihilation_matrix(i + 1).unwrap();
            let w = op.map(|x| Complex64::new(x, 0.0)) * &v;
            v.dotc(&w)
        })
    }

    #[test]
    fn reference_determinant_rdm_is_diagonal() {
        let image = map_qubit_to_fermion(&StateVector::zero(3)).unwrap();
        let rdm = one_rdm(&image).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let expected = if i == j && i < 3 { 1.0 } else { 0.0 };
                assert!((rdm.entries()[(i, j)] - c(expected, 0.0)).norm() < 1e-14);
            }
        }
        assert_abs_diff_eq!(rdm.trace(), 3.0, epsilon = 1e-12);
    }

    #[test]
    fn ghz_image_rdm_is_half_identity() {
        let image = map_qubit_to_fermion(&ghz()).unwrap();
        let rdm = one_rdm(&image).unwrap();
        let brute = brute_force_rdm(&image);
        assert!(max_abs_diff(rdm.entries(), &brute) < 1e-12);
        for i in 0..6 {
            assert_abs_diff_eq!(rdm.entries()[(i, i)].re, 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn rdm_matches_brute_force_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let image = map_qubit_to_fermion(&StateVector::random(3, &mut rng)).unwrap();
            let rdm = one_rdm(&image).unwrap();
            let brute = brute_force_rdm(&image);
            assert!(max_abs_diff(rdm.entries(), &brute) < 1e-12);
        }
    }

    #[test]
    fn pairing_equalities_hold_for_circuit_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let t1: [f64; 3] = std::array::from_fn(|_| rng.random_range(-3.2..3.2));
            let t6: [f64; 6] = std::array::from_fn(|_| rng.random_range(-3.2..3.2));
            for state in [
                run_circuit(
                    &crate::circuits::build_alg1(t1.into()),
                    &StateVector::zero(3),
                )
                .unwrap(),
                run_circuit(
                    &crate::circuits::build_alg2(t6.into()),
                    &StateVector::zero(3),
                )
                .unwrap(),
            ] {
                let occ = one_rdm(&map_qubit_to_fermion(&state).unwrap())
                    .unwrap()
                    .occupations();
                assert!((occ[0] + occ[5] - 1.0).abs() < 1e-10);
                assert!((occ[1] + occ[4] - 1.0).abs() < 1e-10);
                assert!((occ[2] + occ[3] - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn spectrum_respects_pauli_bounds_and_sums_to_particle_number() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..100 {
            let image = map_qubit_to_fermion(&StateVector::random(3, &mut rng)).unwrap();
            let occ = one_rdm(&image).unwrap().occupations();
            for v in occ {
                assert!(v >= -1e-10 && v <= 1.0 + 1e-10);
            }
            let total: f64 = occ.iter().sum();
            assert_abs_diff_eq!(total, 3.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn oracle_matches_qubit_occupations() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let state = StateVector::random(3, &mut rng);
            let occ6 = one_rdm(&map_qubit_to_fermion(&state).unwrap())
                .unwrap()
                .occupations();
            let qubit_occ = crate::tomography::occupations_exact(&state).unwrap();
            assert!((occ6[3] - qubit_occ.n4).abs() < 1e-10);
            assert!((occ6[4] - qubit_occ.n5).abs() < 1e-10);
            assert!((occ6[5] - qubit_occ.n6).abs() < 1e-10);
        }
    }

    #[test]
    fn excitation_weights_of_reference_determinant_vanish() {
        let image = map_qubit_to_fermion(&StateVector::zero(3)).unwrap();
        let weights = excitation_weights(&image).unwrap();
        for split in weights.per_orbital {
            assert!(split.total() < 1e-12);
            assert!(split.occupation.abs() < 1e-12);
        }
    }

    #[test]
    fn excitation_weights_sum_to_occupations() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..100 {
            let image = map_qubit_to_fermion(&StateVector::random(3, &mut rng)).unwrap();
            let weights = excitation_weights(&image).unwrap();
            if weights.degenerate {
                continue;
            }
            for split in weights.per_orbital {
                assert!(
                    (split.total() - split.occupation).abs() < 1e-10,
                    "orbital {}: split total {} vs occupation {}",
                    split.orbital,
                    split.total(),
                    split.occupation
                );
            }
        }
    }

    #[test]
    fn ghz_image_contains_triple_excitation() {
        let image = map_qubit_to_fermion(&ghz()).unwrap();
        let weights = excitation_weights(&image).unwrap();
        assert!(weights.degenerate, "GHZ spectrum is fully degenerate");
        let total_triples: f64 = weights.per_orbital.iter().map(|s| s.triples_weight).sum();
        assert!(total_triples > 0.4, "triples {total_triples}");
    }

    #[test]
    fn bd_pinned_state_has_no_triples() {
        // theta2 = theta3 = 0 pins the slack to zero exactly.
        let state = run_circuit(
            &crate::circuits::build_alg1([0.6, 0.0, 0.0].into()),
            &StateVector::zero(3),
        )
        .unwrap();
        let image = map_qubit_to_fermion(&state).unwrap();
        let weights = excitation_weights(&image).unwrap();
        let total_triples: f64 = weights.per_orbital.iter().map(|s| s.triples_weight).sum();
        assert!(total_triples < 1e-10, "triples {total_triples}");
    }

    #[test]
    fn closed_form_exponential_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..20 {
            let phi: f64 = rng.random_range(-3.2..3.2);
            for (i, j) in ORBITAL_PAIRS {
                for imaginary in [false, true] {
                    let dev = closed_form_deviation(i, j, phi, imaginary).unwrap();
                    assert!(dev < 1e-12, "pair ({i},{j}), phi {phi}: deviation {dev}");
                }
            }
        }
    }

    #[test]
    fn bch_at_zero_angle_gives_occupation() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let image = map_qubit_to_fermion(&StateVector::random(3, &mut rng)).unwrap();
        let rdm = one_rdm(&image).unwrap();
        for (i, j) in ORBITAL_PAIRS {
            let v = bch_observable(&image, i, j, 0.0, false).unwrap();
            assert!((v - rdm.entries()[(i - 1, i - 1)].re).abs() < 1e-12);
        }
    }

    #[test]
    fn bch_quarter_turn_reads_off_rdm_combinations() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..25 {
            let image = map_qubit_to_fermion(&StateVector::random(3, &mut rng)).unwrap();
            let rdm = one_rdm(&image).unwrap();
            let d = |a: usize, b: usize| rdm.entries()[(a - 1, b - 1)];
            for (i, j) in ORBITAL_PAIRS {
                let real = bch_observable(&image, i, j, FRAC_PI_4, false).unwrap();
                let expected = 0.5 * (d(i, i).re + d(j, j).re + d(i, j).re + d(j, i).re);
                assert!((real - expected).abs() < 1e-10);

                let imag = bch_observable(&image, i, j, FRAC_PI_4, true).unwrap();
                let combo = d(i, j) - d(j, i);
                let expected = 0.5 * (d(i, i).re + d(j, j).re + (Complex64::i() * combo).re);
                assert!((imag - expected).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn errors_are_reported() {
        assert!(matches!(
            creation_matrix(0),
            Err(FockError::OrbitalOutOfRange(0))
        ));
        assert!(matches!(
            creation_matrix(7),
            Err(FockError::OrbitalOutOfRange(7))
        ));
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let image = map_qubit_to_fermion(&StateVector::random(3, &mut rng)).unwrap();
        assert!(matches!(
            bch_observable(&image, 2, 2, 0.3, false),
            Err(FockError::EqualOrbitals(2))
        ));
        // wrong-sector state
        let mut amps = vec![Complex64::ZERO; FOCK_DIM];
        amps[0b110000] = Complex64::ONE;
        assert!(matches!(
            FermionState::new(amps),
            Err(FockError::WrongSector { .. })
        ));
    }
}
