//! The three Ry/CNOT state-preparation circuits.
//!
//! Each builder normalizes the operator-product notation into an explicit
//! application-order gate list (first applied first). Circuit qubits are
//! 0-based here; the conventional labels q1, q2, q3 map to indices 0, 1, 2.

use serde::{Deserialize, Serialize};

use crate::qstate::{Circuit, Gate};

/// Rotation angles (radians) of the three-parameter minimal circuit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Alg1Params {
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
}

impl From<[f64; 3]> for Alg1Params {
    fn from(t: [f64; 3]) -> Self {
        Self {
            theta1: t[0],
            theta2: t[1],
            theta3: t[2],
        }
    }
}

/// Rotation angles (radians) of the six-parameter redundant circuit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Alg2Params {
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
    pub theta4: f64,
    pub theta5: f64,
    pub theta6: f64,
}

impl From<[f64; 6]> for Alg2Params {
    fn from(t: [f64; 6]) -> Self {
        Self {
            theta1: t[0],
            theta2: t[1],
            theta3: t[2],
            theta4: t[3],
            theta5: t[4],
            theta6: t[5],
        }
    }
}

fn ry(target: usize, angle: f64) -> Gate {
    Gate::Ry { target, angle }
}

fn cnot(control: usize, target: usize) -> Gate {
    Gate::CNOT { control, target }
}

/// Rotation-before-control circuit: each rotation acts on the control qubit
/// of the CNOT that follows it.
///
/// Application order: Ry(alpha) q1, C(q1->q2), Ry(beta) q3, C(q3->q1),
/// Ry(gamma) q1, C(q1->q3).
pub fn build_main_circuit(alpha: f64, beta: f64, gamma: f64) -> Circuit {
    Circuit::new(
        3,
        vec![
            ry(0, alpha),
            cnot(0, 1),
            ry(2, beta),
            cnot(2, 0),
            ry(0, gamma),
            cnot(0, 2),
        ],
    )
    .expect("static gate list is valid")
}

/// Minimal three-rotation circuit.
///
/// Application order: Ry(t1) q1, C(q1->q3), Ry(t2) q1, C(q1->q2),
/// Ry(t3) q3, C(q3->q2). The prepared state is supported on the
/// even-parity basis states {|000>, |011>, |101>, |110>} only.
pub fn build_alg1(p: Alg1Params) -> Circuit {
    Circuit::new(
        3,
        vec![
            ry(0, p.theta1),
            cnot(0, 2),
            ry(0, p.theta2),
            cnot(0, 1),
            ry(2, p.theta3),
            cnot(2, 1),
        ],
    )
    .expect("static gate list is valid")
}

/// Six-rotation circuit with rotations on both qubits before each CNOT;
/// reaches states supported on all 8 basis states.
///
/// Application order: Ry(t1) q1, Ry(t2) q2, C(q2->q1), Ry(t3) q3,
/// Ry(t4) q2, C(q2->q3), Ry(t5) q1, Ry(t6) q3, C(q3->q1).
pub fn build_alg2(p: Alg2Params) -> Circuit {
    Circuit::new(
        3,
        vec![
            ry(0, p.theta1),
            ry(1, p.theta2),
            cnot(1, 0),
            ry(2, p.theta3),
            ry(1, p.theta4),
            cnot(1, 2),
            ry(0, p.theta5),
            ry(2, p.theta6),
            cnot(2, 0),
        ],
    )
    .expect("static gate list is valid")
}

/// Which preparation circuit a scan or run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Alg1,
    Alg2,
    Main,
}

impl Algorithm {
    pub fn n_params(self) -> usize {
        match self {
            Algorithm::Alg1 | Algorithm::Main => 3,
            Algorithm::Alg2 => 6,
        }
    }

    /// Build the preparation circuit from angles in radians.
    ///
    /// Panics if the angle count does not match [`Algorithm::n_params`].
    pub fn build(self, angles_rad: &[f64]) -> Circuit {
        assert_eq!(
            angles_rad.len(),
            self.n_params(),
            "wrong parameter count for {self:?}"
        );
        match self {
            Algorithm::Alg1 => build_alg1(Alg1Params::from([
                angles_rad[0],
                angles_rad[1],
                angles_rad[2],
            ])),
            Algorithm::Main => build_main_circuit(angles_rad[0], angles_rad[1], angles_rad[2]),
            Algorithm::Alg2 => build_alg2(Alg2Params::from([
                angles_rad[0],
                angles_rad[1],
                angles_rad[2],
                angles_rad[3],
                angles_rad[4],
                angles_rad[5],
            ])),
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Algorithm::Alg1 => write!(f, "alg1"),
            Algorithm::Alg2 => write!(f, "alg2"),
            Algorithm::Main => write!(f, "main"),
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "alg1" => Ok(Algorithm::Alg1),
            "alg2" => Ok(Algorithm::Alg2),
            "main" => Ok(Algorithm::Main),
            other => Err(format!("unknown algorithm {other:?}")),
        }
    }
}
