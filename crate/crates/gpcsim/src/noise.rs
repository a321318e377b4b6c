//! Calibration-driven noise model and noisy measurement paths.
//!
//! The model is deliberately simple: one depolarizing application per gate
//! on the gate's support, with the probability taken directly from the
//! calibration gate-error number (single-qubit error for rotations and
//! basis changes, pair error for CNOT), and a symmetric classical readout
//! flip per qubit. Measurement pre-rotations are gates and receive gate
//! noise like any other. T1/T2 damping over the gate-plus-buffer interval
//! is available but off by default; at ~6 gates x 90 ns against coherence
//! times of 40-70 us its effect is below a percent.
//!
//! Evolution runs on the 8x8 density matrix. Sampling happens on the
//! readout-confused diagonal, so per-seed determinism matches the
//! noiseless sampling path exactly.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuits::Algorithm;
use crate::qstate::{
    run_circuit, Circuit, CountsTable, DensityMatrix, Gate, QstateError, StateVector,
};
use crate::seed;
use crate::tomography::{
    occupations_exact, occupations_from_counts, Basis, MeasuredOccupations, OccupationTriple,
    TomographyError,
};

#[derive(Debug, Error)]
pub enum NoiseError {
    #[error("calibration table lists no qubit {0}")]
    UnknownDeviceQubit(usize),
    #[error("calibration table has no pair entry for device qubits ({0}, {1})")]
    MissingPair(usize, usize),
    #[error("probability {value} for {what} is outside [0, 1]")]
    BadProbability { what: String, value: f64 },
    #[error("calibration: {0}")]
    BadCalibration(String),
    #[error(transparent)]
    Qstate(#[from] QstateError),
    #[error(transparent)]
    Tomography(#[from] TomographyError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Per-qubit calibration row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitCalibration {
    pub index: usize,
    pub t1_us: f64,
    pub t2_us: f64,
    pub frequency_ghz: f64,
    pub gate_error: f64,
    pub readout_error: f64,
}

/// Two-qubit gate error row (undirected pair).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairCalibration {
    pub qubits: [usize; 2],
    pub gate_error: f64,
}

/// Device calibration data: per-qubit coherence and error numbers plus
/// per-pair two-qubit gate errors and device metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationTable {
    pub device: String,
    pub nickname: String,
    pub calibration_date: String,
    pub temperature_k: f64,
    pub version: String,
    pub buffer_ns: f64,
    pub gate_time_ns: f64,
    pub qubits: Vec<QubitCalibration>,
    pub pairs: Vec<PairCalibration>,
}

/// The checked-in ibmqx2 ("Sparrow") calibration snapshot.
pub const BUILTIN_CALIBRATION_JSON: &str = include_str!("../data/ibmqx2_sparrow.json");

impl CalibrationTable {
    pub fn builtin_ibmqx2() -> CalibrationTable {
        serde_json::from_str(BUILTIN_CALIBRATION_JSON).expect("builtin calibration parses")
    }

    pub fn from_json_path(path: &std::path::Path) -> Result<CalibrationTable, NoiseError> {
        let table: CalibrationTable = serde_json::from_reader(std::fs::File::open(path)?)?;
        table.validate()?;
        Ok(table)
    }

    pub fn validate(&self) -> Result<(), NoiseError> {
        for q in &self.qubits {
            if !(0.0..=1.0).contains(&q.gate_error) || !(0.0..=1.0).contains(&q.readout_error) {
                return Err(NoiseError::BadCalibration(format!(
                    "qubit {} error rates outside [0, 1]",
                    q.index
                )));
            }
            if q.t1_us <= 0.0 || q.t2_us <= 0.0 {
                return Err(NoiseError::BadCalibration(format!(
                    "qubit {} coherence times must be positive",
                    q.index
                )));
            }
        }
        for p in &self.pairs {
            if !(0.0..=1.0).contains(&p.gate_error) {
                return Err(NoiseError::BadCalibration(format!(
                    "pair {:?} error rate outside [0, 1]",
                    p.qubits
                )));
            }
        }
        Ok(())
    }

    fn qubit(&self, index: usize) -> Result<&QubitCalibration, NoiseError> {
        self.qubits
            .iter()
            .find(|q| q.index == index)
            .ok_or(NoiseError::UnknownDeviceQubit(index))
    }

    fn pair_error(&self, a: usize, b: usize) -> Option<f64> {
        self.pairs
            .iter()
            .find(|p| p.qubits == [a, b] || p.qubits == [b, a])
            .map(|p| p.gate_error)
    }
}

/// Amplitude- and phase-damping rates for one qubit over one gate interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DampingRates {
    /// 1 - exp(-t/T1)
    pub gamma_amplitude: f64,
    /// (1 - exp(-t/Tphi))/2 with 1/Tphi = 1/T2 - 1/(2 T1), floored at 0
    pub lambda_phase: f64,
}

/// Options controlling which parts of the calibration feed the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseOptions {
    /// Device qubit backing each circuit qubit.
    pub layout: [usize; 3],
    pub include_gate_noise: bool,
    pub include_readout: bool,
    /// T1/T2 damping per gate interval; off by default.
    pub include_damping: bool,
}

impl Default for NoiseOptions {
    fn default() -> Self {
        NoiseOptions {
            // The connected triangle with the lowest two-qubit gate errors.
            layout: [3, 2, 4],
            include_gate_noise: true,
            include_readout: true,
            include_damping: false,
        }
    }
}

impl NoiseOptions {
    pub fn readout_only() -> Self {
        NoiseOptions {
            include_gate_noise: false,
            ..NoiseOptions::default()
        }
    }
}

/// Noise model over the three circuit qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    pub readout_flip: [f64; 3],
    pub gate_1q: [f64; 3],
    /// Depolarizing probability per unordered circuit-qubit pair; `None`
    /// when the calibration lists no entry for the mapped device pair.
    pub gate_2q: BTreeMap<(usize, usize), Option<f64>>,
    pub damping: Option<[DampingRates; 3]>,
    /// Human-readable provenance recorded into experiment records.
    pub id: String,
}

impl NoiseModel {
    /// No-op model: zero flip and depolarizing probabilities.
    pub fn identity() -> NoiseModel {
        let mut gate_2q = BTreeMap::new();
        for (a, b) in [(0usize, 1usize), (0, 2), (1, 2)] {
            gate_2q.insert((a, b), Some(0.0));
        }
        NoiseModel {
            readout_flip: [0.0; 3],
            gate_1q: [0.0; 3],
            gate_2q,
            damping: None,
            id: "identity".into(),
        }
    }

    /// Uniform depolarizing strength on every gate, no readout error.
    pub fn uniform_depolarizing(p: f64) -> NoiseModel {
        let mut model = NoiseModel::identity();
        model.gate_1q = [p; 3];
        for v in model.gate_2q.values_mut() {
            *v = Some(p);
        }
        model.id = format!("depolarizing({p})");
        model
    }

    /// Uniform readout flip probability, no gate noise.
    pub fn uniform_readout(f: f64) -> NoiseModel {
        let mut model = NoiseModel::identity();
        model.readout_flip = [f; 3];
        model.id = format!("readout({f})");
        model
    }

    fn pair(&self, a: usize, b: usize) -> Result<f64, NoiseError> {
        let key = (a.min(b), a.max(b));
        self.gate_2q
            .get(&key)
            .copied()
            .flatten()
            .ok_or(NoiseError::MissingPair(a, b))
    }
}

/// Build the noise model from a calibration table.
///
/// Depolarizing probability per gate is the reported gate error; readout
/// flip per qubit is the reported readout error; damping rates come from
/// T1/T2 over the gate time plus buffer when enabled.
pub fn noise_model_from_calibration(
    table: &CalibrationTable,
    options: &NoiseOptions,
) -> Result<NoiseModel, NoiseError> {
    table.validate()?;
    let mut readout_flip = [0.0; 3];
    let mut gate_1q = [0.0; 3];
    let mut damping_rates = [DampingRates {
        gamma_amplitude: 0.0,
        lambda_phase: 0.0,
    }; 3];
    let interval_us = (table.gate_time_ns + table.buffer_ns) * 1e-3;
    for (circuit_qubit, &device_qubit) in options.layout.iter().enumerate() {
        let cal = table.qubit(device_qubit)?;
        if options.include_readout {
            readout_flip[circuit_qubit] = cal.readout_error;
        }
        if options.include_gate_noise {
            gate_1q[circuit_qubit] = cal.gate_error;
        }
        let gamma_amplitude = 1.0 - (-interval_us / cal.t1_us).exp();
        let inv_tphi = (1.0 / cal.t2_us - 0.5 / cal.t1_us).max(0.0);
        let lambda_phase = (1.0 - (-interval_us * inv_tphi).exp()) / 2.0;
        damping_rates[circuit_qubit] = DampingRates {
            gamma_amplitude,
            lambda_phase,
        };
    }
    let mut gate_2q = BTreeMap::new();
    for (a, b) in [(0usize, 1usize), (0, 2), (1, 2)] {
        let entry = if options.include_gate_noise {
            table.pair_error(options.layout[a], options.layout[b])
        } else {
            Some(0.0)
        };
        gate_2q.insert((a, b), entry);
    }
    Ok(NoiseModel {
        readout_flip,
        gate_1q,
        gate_2q,
        damping: options.include_damping.then_some(damping_rates),
        id: format!(
            "{}[{}] layout {:?}{}{}",
            table.device,
            table.calibration_date,
            options.layout,
            if options.include_gate_noise {
                ""
            } else {
                " readout-only"
            },
            if options.include_damping {
                " +damping"
            } else {
                ""
            },
        ),
    })
}

// ---- channels -------------------------------------------------------------

fn check_probability(what: &str, value: f64) -> Result<(), NoiseError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(NoiseError::BadProbability {
            what: what.to_string(),
            value,
        })
    }
}

/// Embed a 2x2 (not necessarily unitary) matrix on one qubit of a register.
fn embed_1q(m: [[Complex64; 2]; 2], qubit: usize, n_qubits: usize) -> DMatrix<Complex64> {
    let dim = 1usize << n_qubits;
    let bit = 1usize << (n_qubits - 1 - qubit);
    let mut full = DMatrix::<Complex64>::zeros(dim, dim);
    for col in 0..dim {
        let b = usize::from(col & bit != 0);
        for (r, row_m) in m.iter().enumerate() {
            let row = if r == 1 { col | bit } else { col & !bit };
            full[(row, col)] += row_m[b];
        }
    }
    full
}

fn pauli_matrices() -> [[[Complex64; 2]; 2]; 4] {
    let o = Complex64::ZERO;
    let l = Complex64::ONE;
    let i = Complex64::i();
    [
        [[l, o], [o, l]],
        [[o, l], [l, o]],
        [[o, -i], [i, o]],
        [[l, o], [o, -l]],
    ]
}

/// Kraus set of the single-qubit depolarizing channel with "mix toward
/// maximally mixed with probability p" normalization.
pub fn depolarizing_kraus_1q(
    p: f64,
    qubit: usize,
    n_qubits: usize,
) -> Result<Vec<DMatrix<Complex64>>, NoiseError> {
    check_probability("depolarizing", p)?;
    let paulis = pauli_matrices();
    let mut ops = Vec::with_capacity(4);
    for (k, pauli) in paulis.iter().enumerate() {
        let weight = if k == 0 { 1.0 - 3.0 * p / 4.0 } else { p / 4.0 };
        ops.push(embed_1q(*pauli, qubit, n_qubits) * Complex64::new(weight.sqrt(), 0.0));
    }
    Ok(ops)
}

/// Kraus set of the two-qubit depolarizing channel.
pub fn depolarizing_kraus_2q(
    p: f64,
    qubit_a: usize,
    qubit_b: usize,
    n_qubits: usize,
) -> Result<Vec<DMatrix<Complex64>>, NoiseError> {
    check_probability("depolarizing", p)?;
    let paulis = pauli_matrices();
    let mut ops = Vec::with_capacity(16);
    for (ka, pa) in paulis.iter().enumerate() {
        let ma = embed_1q(*pa, qubit_a, n_qubits);
        for (kb, pb) in paulis.iter().enumerate() {
            let weight = if ka == 0 && kb == 0 {
                1.0 - 15.0 * p / 16.0
            } else {
                p / 16.0
            };
            let mb = embed_1q(*pb, qubit_b, n_qubits);
            ops.push(&ma * mb * Complex64::new(weight.sqrt(), 0.0));
        }
    }
    Ok(ops)
}

fn damping_kraus(
    rates: DampingRates,
    qubit: usize,
    n_qubits: usize,
) -> Result<Vec<Vec<DMatrix<Complex64>>>, NoiseError> {
    check_probability("amplitude damping", rates.gamma_amplitude)?;
    check_probability("phase damping", rates.lambda_phase)?;
    let o = Complex64::ZERO;
    let l = Complex64::ONE;
    let g = rates.gamma_amplitude;
    let amp = vec![
        embed_1q(
            [[l, o], [o, Complex64::new((1.0 - g).sqrt(), 0.0)]],
            qubit,
            n_qubits,
        ),
        embed_1q(
            [[o, Complex64::new(g.sqrt(), 0.0)], [o, o]],
            qubit,
            n_qubits,
        ),
    ];
    let lam = rates.lambda_phase;
    let phase = vec![
        embed_1q([[l, o], [o, l]], qubit, n_qubits) * Complex64::new((1.0 - lam).sqrt(), 0.0),
        embed_1q([[l, o], [o, -l]], qubit, n_qubits) * Complex64::new(lam.sqrt(), 0.0),
    ];
    Ok(vec![amp, phase])
}

/// Evolve the density matrix of `circuit` from |0..0>, applying the
/// depolarizing (and optional damping) channel after each gate on the
/// gate's support.
pub fn evolve_density(circuit: &Circuit, model: &NoiseModel) -> Result<DensityMatrix, NoiseError> {
    let n = circuit.n_qubits();
    let mut dm = StateVector::zero(n).to_density_matrix();
    for gate in circuit.gates() {
        dm = dm.apply_gate(gate)?;
        let support: Vec<usize> = match gate {
            Gate::CNOT { control, target } => {
                let p = model.pair(*control, *target)?;
                if p > 0.0 {
                    dm = dm.apply_channel(&depolarizing_kraus_2q(p, *control, *target, n)?)?;
                }
                vec![*control, *target]
            }
            _ => {
                let q = gate.target();
                let p = model.gate_1q[q];
                if p > 0.0 {
                    dm = dm.apply_channel(&depolarizing_kraus_1q(p, q, n)?)?;
                }
                vec![q]
            }
        };
        if let Some(damping) = &model.damping {
            for q in support {
                for kraus in damping_kraus(damping[q], q, n)? {
                    dm = dm.apply_channel(&kraus)?;
                }
            }
        }
    }
    Ok(dm)
}

/// Readout-confused outcome probabilities of a noisy circuit execution.
pub fn noisy_probabilities(circuit: &Circuit, model: &NoiseModel) -> Result<Vec<f64>, NoiseError> {
    let dm = evolve_density(circuit, model)?;
    let mut probs = dm.diagonal_probabilities();
    let n = circuit.n_qubits();
    for qubit in 0..n {
        let f = model.readout_flip[qubit];
        check_probability("readout flip", f)?;
        if f == 0.0 {
            continue;
        }
        let bit = 1usize << (n - 1 - qubit);
        let old = probs.clone();
        for (index, p) in probs.iter_mut().enumerate() {
            *p = (1.0 - f) * old[index] + f * old[index ^ bit];
        }
    }
    Ok(probs)
}

/// Sample measurement outcomes of a noisy circuit execution;
/// deterministic per seed, and identical to the noiseless sampler under
/// the identity model.
pub fn run_noisy(
    circuit: &Circuit,
    model: &NoiseModel,
    shots: u64,
    seed: u64,
) -> Result<CountsTable, NoiseError> {
    let probs = noisy_probabilities(circuit, model)?;
    Ok(crate::qstate::sample_from_probabilities(
        &probs,
        circuit.n_qubits(),
        shots,
        seed,
    )?)
}

/// Shot tomography of a noisy preparation: the three measurement settings
/// extend the circuit with their pre-rotations (which receive gate noise
/// too), each setting draws `shots` samples.
pub fn occupations_measured_noisy(
    circuit: &Circuit,
    model: &NoiseModel,
    shots: u64,
    seed: u64,
) -> Result<MeasuredOccupations, NoiseError> {
    let mut tables = Vec::with_capacity(3);
    for (index, basis) in Basis::ALL.iter().enumerate() {
        let extended = circuit.extended(&basis.pre_rotation_all(circuit.n_qubits()))?;
        tables.push(run_noisy(
            &extended,
            model,
            shots,
            seed::derive(seed, "setting", index as u64),
        )?);
    }
    let counts: [CountsTable; 3] = tables.try_into().expect("three settings");
    let (occupations, clamp_events) = occupations_from_counts(&counts)?;
    Ok(MeasuredOccupations {
        occupations,
        counts,
        clamp_events,
    })
}

/// Exact (infinite-shot) noisy occupations: readout-confused setting
/// frequencies fed through the same estimator, no sampling.
pub fn occupations_noisy_exact(
    circuit: &Circuit,
    model: &NoiseModel,
) -> Result<OccupationTriple, NoiseError> {
    let n = circuit.n_qubits();
    let mut fractions = [[0.0f64; 3]; 3];
    for (setting, basis) in Basis::ALL.iter().enumerate() {
        let extended = circuit.extended(&basis.pre_rotation_all(n))?;
        let probs = noisy_probabilities(&extended, model)?;
        for (index, p) in probs.iter().enumerate() {
            for (qubit, fraction) in fractions[setting].iter_mut().enumerate() {
                if index & (1 << (n - 1 - qubit)) == 0 {
                    *fraction += p;
                }
            }
        }
    }
    let mut mins = [0.0f64; 3];
    for (qubit, slot) in mins.iter_mut().enumerate() {
        let rdm = crate::tomography::rdm_from_frequencies(
            fractions[0][qubit],
            fractions[1][qubit],
            fractions[2][qubit],
        );
        *slot = rdm.min_eigenvalue().clamp(0.0, 1.0);
    }
    Ok(OccupationTriple::from_sorted(mins))
}

// ---- shift study -----------------------------------------------------------

/// Displacement statistics for one scanned point under a noise model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftReport {
    pub params_deg: Vec<f64>,
    pub ideal: OccupationTriple,
    pub mean_measured: [f64; 3],
    /// mean measured minus ideal, componentwise in (n4, n5, n6).
    pub mean_displacement: [f64; 3],
    pub mean_distance: f64,
    pub ideal_bd_slack: f64,
    pub mean_bd_slack_change: f64,
    /// Fraction of trials whose slack exceeded the ideal slack.
    pub inward_fraction: f64,
    pub trials: u32,
    pub shots: u64,
}

/// Measure each point `trials` times under the model and summarize how the
/// occupations move relative to the Borland-Dennis facet.
pub fn shift_study(
    algorithm: Algorithm,
    points_deg: &[Vec<f64>],
    model: &NoiseModel,
    shots: u64,
    trials: u32,
    seed: u64,
) -> Result<Vec<ShiftReport>, NoiseError> {
    assert!(trials > 0, "need at least one trial");
    let mut reports = Vec::with_capacity(points_deg.len());
    for (point_index, params_deg) in points_deg.iter().enumerate() {
        let radians: Vec<f64> = params_deg.iter().map(|d| d.to_radians()).collect();
        let circuit = algorithm.build(&radians);
        let ideal = occupations_exact(&run_circuit(&circuit, &StateVector::zero(3))?)?;
        let ideal_slack = ideal.n5 + ideal.n6 - ideal.n4;

        // The density evolution is deterministic; only sampling varies per
        // trial, so the three probability vectors are computed once.
        let mut setting_probs = Vec::with_capacity(3);
        for basis in Basis::ALL {
            let extended = circuit.extended(&basis.pre_rotation_all(3))?;
            setting_probs.push(noisy_probabilities(&extended, model)?);
        }

        let point_seed = seed::derive(seed, "point", point_index as u64);
        let mut sum = [0.0f64; 3];
        let mut sum_distance = 0.0;
        let mut sum_slack_change = 0.0;
        let mut inward = 0u32;
        for trial in 0..trials {
            let trial_seed = seed::derive(point_seed, "trial", u64::from(trial));
            let mut tables = Vec::with_capacity(3);
            for (setting, probs) in setting_probs.iter().enumerate() {
                tables.push(crate::qstate::sample_from_probabilities(
                    probs,
                    3,
                    shots,
                    seed::derive(trial_seed, "setting", setting as u64),
                )?);
            }
            let counts: [CountsTable; 3] = tables.try_into().expect("three settings");
            let (occ, _) = occupations_from_counts(&counts)?;
            let arr = occ.as_array();
            for (slot, v) in sum.iter_mut().zip(arr) {
                *slot += v;
            }
            sum_distance += occ.distance(&ideal);
            let slack = occ.n5 + occ.n6 - occ.n4;
            sum_slack_change += slack - ideal_slack;
            if slack > ideal_slack {
                inward += 1;
            }
        }
        let t = f64::from(trials);
        let mean_measured = [sum[0] / t, sum[1] / t, sum[2] / t];
        reports.push(ShiftReport {
            params_deg: params_deg.clone(),
            ideal,
            mean_measured,
            mean_displacement: [
                mean_measured[0] - ideal.n4,
                mean_measured[1] - ideal.n5,
                mean_measured[2] - ideal.n6,
            ],
            mean_distance: sum_distance / t,
            ideal_bd_slack: ideal_slack,
            mean_bd_slack_change: sum_slack_change / t,
            inward_fraction: f64::from(inward) / t,
            trials,
            shots,
        });
    }
    Ok(reports)
}
