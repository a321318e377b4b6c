//! Parameter-grid scans with greedy minimum-distance selection.
//!
//! The grid parameter is the amplitude mixing angle phi of one rotation:
//! the circuit gate applied is Ry(2 phi), whose half-angle convention turns
//! a 0..45 degree grid into occupations sweeping the full [0, 1/2] range
//! (`sin^2 phi`). Selected points export their circuit angles (2 phi, in
//! degrees), which feed [`Algorithm::build`] directly.
//!
//! The three-parameter circuits are scanned over the full angle grid in
//! lexicographic order; the six-parameter circuit's grid (451^6 ~ 8e15
//! points) is infeasible to enumerate, so a seeded uniform subsample of
//! grid points is drawn instead, with the same greedy selection rule.
//!
//! A candidate is kept when its occupation triple is at least
//! `min_distance` (Euclidean) away from every previously kept point.
//! Selection is a serial fold over candidates in a fixed order; grid
//! evaluation parallelizes underneath it, so results are independent of
//! worker count.
//!
//! All circuits here consist of Ry and CNOT gates only, so amplitudes stay
//! real; the scan evaluates occupations on a real 8-vector. Equality with
//! the complex simulator path is pinned by tests.

use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuits::Algorithm;
use crate::polytope::PolytopeSpec;
use crate::tomography::OccupationTriple;

#[derive(Debug, Error)]
pub enum SamplerError {
    #[error("invalid scan config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("points file: {0}")]
    Malformed(String),
}

/// Scan configuration. Angles are degrees here (the scan boundary); they
/// are converted to radians when circuits are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub algorithm: Algorithm,
    pub angle_min_deg: f64,
    pub angle_max_deg: f64,
    pub step_deg: f64,
    /// Euclidean inclusion distance in occupation space.
    pub min_distance: f64,
    /// Number of grid points drawn for the six-parameter subsample scan.
    pub max_budget: u64,
    pub seed: u64,
}

impl ScanConfig {
    pub fn defaults(algorithm: Algorithm) -> Self {
        ScanConfig {
            algorithm,
            angle_min_deg: 0.0,
            angle_max_deg: 45.0,
            step_deg: 0.1,
            min_distance: 0.075,
            max_budget: 10_000_000,
            seed: 42,
        }
    }

    pub fn validate(&self) -> Result<(), SamplerError> {
        if !self.step_deg.is_finite() || self.step_deg <= 0.0 {
            return Err(SamplerError::InvalidConfig("step must be positive".into()));
        }
        if !self.min_distance.is_finite() || self.min_distance <= 0.0 {
            return Err(SamplerError::InvalidConfig(
                "min distance must be positive".into(),
            ));
        }
        if self.angle_max_deg < self.angle_min_deg {
            return Err(SamplerError::InvalidConfig(
                "angle range is inverted".into(),
            ));
        }
        if self.algorithm == Algorithm::Alg2 && self.max_budget == 0 {
            return Err(SamplerError::InvalidConfig(
                "subsample budget must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Number of grid values along one parameter axis.
    pub fn axis_len(&self) -> usize {
        ((self.angle_max_deg - self.angle_min_deg) / self.step_deg).round() as usize + 1
    }

    /// Amplitude mixing angle at a grid index, degrees.
    pub fn angle_deg(&self, index: usize) -> f64 {
        self.angle_min_deg + index as f64 * self.step_deg
    }

    /// Circuit rotation angle at a grid index, degrees (twice the mixing
    /// angle under the half-angle gate convention).
    pub fn circuit_angle_deg(&self, index: usize) -> f64 {
        2.0 * self.angle_deg(index)
    }
}

/// One kept scan point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectedPoint {
    /// Circuit angles in degrees.
    pub params_deg: Vec<f64>,
    pub occupations: OccupationTriple,
    pub bd_slack: f64,
}

/// Scan output: the kept points plus bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub schema: String,
    pub config: ScanConfig,
    pub evaluated: u64,
    pub selected: Vec<SelectedPoint>,
}

pub const POINTS_SCHEMA: &str = "gpcsim.points.v1";

// ---- fast real-amplitude evaluation -----------------------------------

#[inline]
fn ry_real(state: &mut [f64; 8], qubit: usize, cos_half: f64, sin_half: f64) {
    let tbit = 1usize << (2 - qubit);
    for i in 0..8 {
        if i & tbit == 0 {
            let a0 = state[i];
            let a1 = state[i | tbit];
            state[i] = cos_half * a0 - sin_half * a1;
            state[i | tbit] = sin_half * a0 + cos_half * a1;
        }
    }
}

#[inline]
fn cnot_real(state: &mut [f64; 8], control: usize, target: usize) {
    let cbit = 1usize << (2 - control);
    let tbit = 1usize << (2 - target);
    for i in 0..8 {
        if i & cbit != 0 && i & tbit == 0 {
            state.swap(i, i | tbit);
        }
    }
}

#[inline]
fn occupations_real(state: &[f64; 8]) -> [f64; 3] {
    let mut occ = [0.0f64; 3];
    for (qubit, slot) in occ.iter_mut().enumerate() {
        let tbit = 1usize << (2 - qubit);
        let mut d00 = 0.0;
        let mut d11 = 0.0;
        let mut d01 = 0.0;
        for i in 0..8 {
            if i & tbit == 0 {
                let a0 = state[i];
                let a1 = state[i | tbit];
                d00 += a0 * a0;
                d11 += a1 * a1;
                d01 += a0 * a1;
            }
        }
        let mid = (d00 + d11) / 2.0;
        let half_gap = (d00 - d11) / 2.0;
        *slot = mid - (half_gap * half_gap + d01 * d01).sqrt();
    }
    occ.sort_by(|a, b| b.partial_cmp(a).expect("finite occupations"));
    occ
}

/// Exact sorted occupations from half-angle cosine/sine pairs, one per
/// circuit parameter. Mirrors the gate lists in [`crate::circuits`]; the
/// two routes are pinned against each other by tests.
pub(crate) fn occupations_from_half_angles(algorithm: Algorithm, cs: &[(f64, f64)]) -> [f64; 3] {
    debug_assert_eq!(cs.len(), algorithm.n_params());
    let mut st = [0.0f64; 8];
    st[0] = 1.0;
    match algorithm {
        Algorithm::Alg1 => {
            ry_real(&mut st, 0, cs[0].0, cs[0].1);
            cnot_real(&mut st, 0, 2);
            ry_real(&mut st, 0, cs[1].0, cs[1].1);
            cnot_real(&mut st, 0, 1);
            ry_real(&mut st, 2, cs[2].0, cs[2].1);
            cnot_real(&mut st, 2, 1);
        }
        Algorithm::Main => {
            ry_real(&mut st, 0, cs[0].0, cs[0].1);
            cnot_real(&mut st, 0, 1);
            ry_real(&mut st, 2, cs[1].0, cs[1].1);
            cnot_real(&mut st, 2, 0);
            ry_real(&mut st, 0, cs[2].0, cs[2].1);
            cnot_real(&mut st, 0, 2);
        }
        Algorithm::Alg2 => {
            ry_real(&mut st, 0, cs[0].0, cs[0].1);
            ry_real(&mut st, 1, cs[1].0, cs[1].1);
            cnot_real(&mut st, 1, 0);
            ry_real(&mut st, 2, cs[2].0, cs[2].1);
            ry_real(&mut st, 1, cs[3].0, cs[3].1);
            cnot_real(&mut st, 1, 2);
            ry_real(&mut st, 0, cs[4].0, cs[4].1);
            ry_real(&mut st, 2, cs[5].0, cs[5].1);
            cnot_real(&mut st, 2, 0);
        }
    }
    occupations_real(&st)
}

/// Exact occupations of one parameter vector given in degrees.
pub fn occupations_at(algorithm: Algorithm, params_deg: &[f64]) -> OccupationTriple {
    let cs: Vec<(f64, f64)> = params_deg
        .iter()
        .map(|d| {
            let (s, c) = (d.to_radians() / 2.0).sin_cos();
            (c, s)
        })
        .collect();
    let occ = occupations_from_half_angles(algorithm, &cs);
    OccupationTriple {
        n4: occ[0],
        n5: occ[1],
        n6: occ[2],
    }
}

// ---- greedy selection ---------------------------------------------------

struct GreedySelector {
    min_distance_sq: f64,
    kept: Vec<[f64; 3]>,
    /// Index of the kept point that most recently rejected a candidate;
    /// consecutive grid points cluster, so testing it first short-circuits
    /// almost every rejection.
    last_rejector: usize,
}

impl GreedySelector {
    fn new(min_distance: f64) -> Self {
        GreedySelector {
            min_distance_sq: min_distance * min_distance,
            kept: Vec::new(),
            last_rejector: 0,
        }
    }

    #[inline]
    fn dist_sq(a: &[f64; 3], b: &[f64; 3]) -> f64 {
        let dx = a[0] - b[0];
        let dy = a[1] - b[1];
        let dz = a[2] - b[2];
        dx * dx + dy * dy + dz * dz
    }

    /// Returns true when the candidate is kept.
    #[inline]
    fn offer(&mut self, occ: &[f64; 3]) -> bool {
        if !self.kept.is_empty() {
            if Self::dist_sq(&self.kept[self.last_rejector], occ) < self.min_distance_sq {
                return false;
            }
            for (index, kept) in self.kept.iter().enumerate() {
                if index != self.last_rejector && Self::dist_sq(kept, occ) < self.min_distance_sq {
                    self.last_rejector = index;
                    return false;
                }
            }
        }
        self.kept.push(*occ);
        true
    }
}

/// Run the configured scan.
pub fn grid_scan(config: &ScanConfig) -> Result<ScanResult, SamplerError> {
    config.validate()?;
    match config.algorithm {
        Algorithm::Alg1 | Algorithm::Main => Ok(grid_scan_full(config)),
        Algorithm::Alg2 => Ok(grid_scan_subsample(config)),
    }
}

/// Full lexicographic scan over the 3-parameter grid. The outer axis is
/// processed chunk by chunk: each chunk is evaluated in parallel, then the
/// greedy filter folds over it in order.
fn grid_scan_full(config: &ScanConfig) -> ScanResult {
    let n = config.axis_len();
    // Half-angle pairs of the circuit rotation Ry(2 phi): cos/sin of phi.
    let trig: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let (s, c) = config.angle_deg(i).to_radians().sin_cos();
            (c, s)
        })
        .collect();
    let algorithm = config.algorithm;
    let mut selector = GreedySelector::new(config.min_distance);
    let mut selected = Vec::new();
    for i1 in 0..n {
        let cs1 = trig[i1];
        let chunk: Vec<Vec<[f64; 3]>> = (0..n)
            .into_par_iter()
            .map(|i2| {
                let cs2 = trig[i2];
                (0..n)
                    .map(|i3| occupations_from_half_angles(algorithm, &[cs1, cs2, trig[i3]]))
                    .collect()
            })
            .collect();
        for (i2, row) in chunk.iter().enumerate() {
            for (i3, occ) in row.iter().enumerate() {
                if selector.offer(occ) {
                    selected.push(SelectedPoint {
                        params_deg: vec![
                            config.circuit_angle_deg(i1),
                            config.circuit_angle_deg(i2),
                            config.circuit_angle_deg(i3),
                        ],
                        occupations: OccupationTriple {
                            n4: occ[0],
                            n5: occ[1],
                            n6: occ[2],
                        },
                        bd_slack: occ[1] + occ[2] - occ[0],
                    });
                }
            }
        }
    }
    ScanResult {
        schema: POINTS_SCHEMA.to_string(),
        config: *config,
        evaluated: (n as u64).pow(3),
        selected,
    }
}

/// Seeded uniform subsample of the 6-parameter grid, processed in draw
/// order.
fn grid_scan_subsample(config: &ScanConfig) -> ScanResult {
    let n = config.axis_len();
    let trig: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let (s, c) = config.angle_deg(i).to_radians().sin_cos();
            (c, s)
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut selector = GreedySelector::new(config.min_distance);
    let mut selected = Vec::new();
    let chunk_size = 1usize << 18;
    let mut remaining = config.max_budget;
    while remaining > 0 {
        let batch = remaining.min(chunk_size as u64) as usize;
        remaining -= batch as u64;
        let draws: Vec<[usize; 6]> = (0..batch)
            .map(|_| std::array::from_fn(|_| rng.random_range(0..n)))
            .collect();
        let occs: Vec<[f64; 3]> = draws
            .par_iter()
            .map(|ix| {
                let cs: [(f64, f64); 6] = std::array::from_fn(|k| trig[ix[k]]);
                occupations_from_half_angles(Algorithm::Alg2, &cs)
            })
            .collect();
        for (ix, occ) in draws.iter().zip(occs.iter()) {
            if selector.offer(occ) {
                selected.push(SelectedPoint {
                    params_deg: ix.iter().map(|&i| config.circuit_angle_deg(i)).collect(),
                    occupations: OccupationTriple {
                        n4: occ[0],
                        n5: occ[1],
                        n6: occ[2],
                    },
                    bd_slack: occ[1] + occ[2] - occ[0],
                });
            }
        }
    }
    ScanResult {
        schema: POINTS_SCHEMA.to_string(),
        config: *config,
        evaluated: config.max_budget,
        selected,
    }
}

// ---- coverage reporting -------------------------------------------------

/// How close the selected set comes to each polytope facet plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FacetCoverage {
    pub facet: String,
    /// Smallest absolute plane distance over selected points.
    pub min_distance: f64,
    pub points_within_1e3: usize,
    pub points_within_1e6: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageSummary {
    pub n_selected: usize,
    pub min_pairwise_distance: f64,
    pub min_bd_slack: f64,
    pub max_n4: f64,
    pub facets: Vec<FacetCoverage>,
}

pub fn coverage_summary(points: &[SelectedPoint]) -> CoverageSummary {
    let mut min_pairwise = f64::INFINITY;
    for (a_index, a) in points.iter().enumerate() {
        for b in points.iter().skip(a_index + 1) {
            min_pairwise = min_pairwise.min(a.occupations.distance(&b.occupations));
        }
    }
    let facets = PolytopeSpec::gpc()
        .halfspaces
        .iter()
        .map(|h| {
            let norm = (h.normal.iter().map(|x| x * x).sum::<f64>()).sqrt();
            let distances: Vec<f64> = points
                .iter()
                .map(|p| (h.slack(&p.occupations.as_array()) / norm).abs())
                .collect();
            FacetCoverage {
                facet: h.label.to_string(),
                min_distance: distances.iter().copied().fold(f64::INFINITY, f64::min),
                points_within_1e3: distances.iter().filter(|d| **d <= 1e-3).count(),
                points_within_1e6: distances.iter().filter(|d| **d <= 1e-6).count(),
            }
        })
        .collect();
    CoverageSummary {
        n_selected: points.len(),
        min_pairwise_distance: min_pairwise,
        min_bd_slack: points
            .iter()
            .map(|p| p.bd_slack)
            .fold(f64::INFINITY, f64::min),
        max_n4: points
            .iter()
            .map(|p| p.occupations.n4)
            .fold(f64::NEG_INFINITY, f64::max),
        facets,
    }
}

// ---- persistence ---------------------------------------------------------

/// Write points as CSV: algorithm, theta1..thetaN, n4, n5, n6, bd_slack.
/// Floats use shortest round-trip formatting, lossless on re-import.
pub fn write_points_csv<W: Write>(result: &ScanResult, writer: W) -> Result<(), SamplerError> {
    let mut w = csv::Writer::from_writer(writer);
    let n_params = result.config.algorithm.n_params();
    let mut header = vec!["algorithm".to_string()];
    for k in 1..=n_params {
        header.push(format!("theta{k}"));
    }
    header.extend(["n4", "n5", "n6", "bd_slack"].map(String::from));
    w.write_record(&header)?;
    for point in &result.selected {
        let mut record = vec![result.config.algorithm.to_string()];
        record.extend(point.params_deg.iter().map(|v| format!("{v}")));
        record.push(format!("{}", point.occupations.n4));
        record.push(format!("{}", point.occupations.n5));
        record.push(format!("{}", point.occupations.n6));
        record.push(format!("{}", point.bd_slack));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_points_csv_path(result: &ScanResult, path: &Path) -> Result<(), SamplerError> {
    write_points_csv(result, std::fs::File::create(path)?)
}

pub fn write_points_json_path(result: &ScanResult, path: &Path) -> Result<(), SamplerError> {
    let file = std::fs::File::create(path)?;
    serde_json::to_writer_pretty(file, result)?;
    Ok(())
}

pub fn read_points_json_path(path: &Path) -> Result<ScanResult, SamplerError> {
    let file = std::fs::File::open(path)?;
    let result: ScanResult = serde_json::from_reader(file)?;
    if result.schema != POINTS_SCHEMA {
        return Err(SamplerError::Malformed(format!(
            "unexpected schema {:?}",
            result.schema
        )));
    }
    Ok(result)
}

/// Read the CSV form; the algorithm column determines the theta count.
/// A header-only file yields an empty point list (the algorithm is then
/// inferred from the header's theta column count).
pub fn read_points_csv_path(path: &Path) -> Result<(Algorithm, Vec<SelectedPoint>), SamplerError> {
    let mut reader = csv::Reader::from_path(path)?;
    let theta_columns = reader
        .headers()?
        .iter()
        .filter(|h| h.starts_with("theta"))
        .count();
    let mut algorithm: Option<Algorithm> = None;
    let mut points = Vec::new();
    for row in reader.records() {
        let row = row?;
        let alg: Algorithm = row
            .get(0)
            .ok_or_else(|| SamplerError::Malformed("empty row".into()))?
            .parse()
            .map_err(SamplerError::Malformed)?;
        if *algorithm.get_or_insert(alg) != alg {
            return Err(SamplerError::Malformed(
                "mixed algorithms in one points file".into(),
            ));
        }
        let n_params = alg.n_params();
        let expected = 1 + n_params + 4;
        if row.len() != expected {
            return Err(SamplerError::Malformed(format!(
                "row has {} fields, expected {expected}",
                row.len()
            )));
        }
        let parse = |index: usize| -> Result<f64, SamplerError> {
            row.get(index)
                .unwrap()
                .parse::<f64>()
                .map_err(|e| SamplerError::Malformed(format!("field {index}: {e}")))
        };
        let params_deg: Vec<f64> = (1..=n_params).map(parse).collect::<Result<_, _>>()?;
        let n4 = parse(n_params + 1)?;
        let n5 = parse(n_params + 2)?;
        let n6 = parse(n_params + 3)?;
        let bd_slack = parse(n_params + 4)?;
        points.push(SelectedPoint {
            params_deg,
            occupations: OccupationTriple { n4, n5, n6 },
            bd_slack,
        });
    }
    let algorithm = match algorithm {
        Some(a) => a,
        None => match theta_columns {
            3 => Algorithm::Alg1,
            6 => Algorithm::Alg2,
            n => {
                return Err(SamplerError::Malformed(format!(
                    "empty points file with {n} theta columns"
                )))
            }
        },
    };
    Ok((algorithm, points))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{run_circuit, StateVector};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn coarse_config(algorithm: Algorithm) -> ScanConfig {
        ScanConfig {
            step_deg: 5.0,
            ..ScanConfig::defaults(algorithm)
        }
    }

    #[test]
    fn fast_path_matches_simulator() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for algorithm in [Algorithm::Alg1, Algorithm::Main, Algorithm::Alg2] {
            for _ in 0..200 {
                let params_deg: Vec<f64> = (0..algorithm.n_params())
                    .map(|_| rng.random_range(-180.0..180.0))
                    .collect();
                let fast = occupations_at(algorithm, &params_deg);
                let radians: Vec<f64> = params_deg.iter().map(|d| d.to_radians()).collect();
                let state = run_circuit(&algorithm.build(&radians), &StateVector::zero(3)).unwrap();
                let exact = crate::tomography::occupations_exact(&state).unwrap();
                assert!(
                    fast.distance(&exact) < 1e-12,
                    "{algorithm:?} {params_deg:?}: fast {fast:?} vs exact {exact:?}"
                );
            }
        }
    }

    #[test]
    fn degenerate_min_distance_selects_single_point() {
        let config = ScanConfig {
            min_distance: 10.0,
            ..coarse_config(Algorithm::Alg1)
        };
        let result = grid_scan(&config).unwrap();
        assert_eq!(result.selected.len(), 1);
        // first grid point: all angles at the range minimum
        assert_eq!(result.selected[0].params_deg, vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn scan_is_deterministic() {
        let config = coarse_config(Algorithm::Alg1);
        let a = grid_scan(&config).unwrap();
        let b = grid_scan(&config).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn pairwise_distance_property_holds() {
        for algorithm in [Algorithm::Alg1, Algorithm::Main] {
            let config = coarse_config(algorithm);
            let result = grid_scan(&config).unwrap();
            assert!(!result.selected.is_empty());
            let summary = coverage_summary(&result.selected);
            assert!(
                summary.min_pairwise_distance >= config.min_distance - 1e-12,
                "{algorithm:?}: min pairwise {}",
                summary.min_pairwise_distance
            );
            assert!(summary.min_bd_slack >= -1e-12);
        }
    }

    #[test]
    fn first_selected_point_pins_bd_facet() {
        let result = grid_scan(&coarse_config(Algorithm::Alg1)).unwrap();
        assert!(result.selected[0].bd_slack.abs() < 1e-12);
    }

    #[test]
    fn exported_params_reproduce_occupations_through_simulator() {
        for algorithm in [Algorithm::Alg1, Algorithm::Main] {
            let result = grid_scan(&coarse_config(algorithm)).unwrap();
            for point in &result.selected {
                let radians: Vec<f64> = point.params_deg.iter().map(|d| d.to_radians()).collect();
                let state = run_circuit(&algorithm.build(&radians), &StateVector::zero(3)).unwrap();
                let exact = crate::tomography::occupations_exact(&state).unwrap();
                assert!(
                    exact.distance(&point.occupations) < 1e-12,
                    "{algorithm:?} point {:?}",
                    point.params_deg
                );
            }
        }
    }

    #[test]
    fn full_range_scan_reaches_the_polytope_cap() {
        // mixing angle 45 deg = circuit angle 90 deg: occupations hit 1/2
        let result = grid_scan(&coarse_config(Algorithm::Alg1)).unwrap();
        let summary = coverage_summary(&result.selected);
        assert!(summary.max_n4 > 0.499, "max n4 {}", summary.max_n4);
    }

    #[test]
    fn alg2_subsample_is_deterministic_and_respects_distance() {
        let config = ScanConfig {
            max_budget: 50_000,
            ..coarse_config(Algorithm::Alg2)
        };
        let a = grid_scan(&config).unwrap();
        let b = grid_scan(&config).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.evaluated, 50_000);
        let summary = coverage_summary(&a.selected);
        assert!(summary.min_pairwise_distance >= config.min_distance - 1e-12);
        let other_seed = grid_scan(&ScanConfig { seed: 1, ..config }).unwrap();
        assert_ne!(a.selected, other_seed.selected);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let bad_step = ScanConfig {
            step_deg: 0.0,
            ..ScanConfig::defaults(Algorithm::Alg1)
        };
        assert!(grid_scan(&bad_step).is_err());
        let bad_dist = ScanConfig {
            min_distance: -1.0,
            ..ScanConfig::defaults(Algorithm::Alg1)
        };
        assert!(grid_scan(&bad_dist).is_err());
    }

    #[test]
    fn csv_round_trip_is_lossless() {
        let result = grid_scan(&coarse_config(Algorithm::Alg1)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("points.csv");
        write_points_csv_path(&result, &path).unwrap();
        let (algorithm, points) = read_points_csv_path(&path).unwrap();
        assert_eq!(algorithm, Algorithm::Alg1);
        assert_eq!(points.len(), result.selected.len());
        for (a, b) in points.iter().zip(result.selected.iter()) {
            assert_eq!(a, b, "round trip must be bit-exact");
        }
        // line count: header + one row per point
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), result.selected.len() + 1);
    }

    #[test]
    fn empty_points_csv_has_header_only() {
        let result = ScanResult {
            schema: POINTS_SCHEMA.into(),
            config: ScanConfig::defaults(Algorithm::Alg1),
            evaluated: 0,
            selected: vec![],
        };
        let mut buffer = Vec::new();
        write_points_csv(&result, &mut buffer).unwrap();
        let text = String::from_utf8(buffer).unwrap();
        assert_eq!(text.lines().count(), 1);
        assert!(text.starts_with("algorithm,theta1,theta2,theta3,n4,n5,n6,bd_slack"));
    }

    #[test]
    fn json_round_trip_preserves_everything() {
        let result = grid_scan(&coarse_config(Algorithm::Alg1)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("points.json");
        write_points_json_path(&result, &path).unwrap();
        let loaded = read_points_json_path(&path).unwrap();
        assert_eq!(loaded, result);
    }

    #[test]
    fn malformed_points_files_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "algorithm,theta1\nalg9,1.0\n").unwrap();
        assert!(read_points_csv_path(&path).is_err());
        let empty = dir.path().join("empty.csv");
        std::fs::write(&empty, "algorithm,theta1,theta2,theta3,n4,n5,n6,bd_slack\n").unwrap();
        let (algorithm, points) = read_points_csv_path(&empty).unwrap();
        assert_eq!(algorithm, Algorithm::Alg1);
        assert!(points.is_empty());
        let no_thetas = dir.path().join("no_thetas.csv");
        std::fs::write(&no_thetas, "algorithm,n4\n").unwrap();
        assert!(matches!(
            read_points_csv_path(&no_thetas),
            Err(SamplerError::Malformed(_))
        ));
    }
}
