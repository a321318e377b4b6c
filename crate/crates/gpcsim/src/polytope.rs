//! Constraint checking and geometry for the Pauli and generalized Pauli
//! occupation polytopes in (n4, n5, n6) space.
//!
//! Pauli polytope: 0 <= n6 <= n5 <= n4 <= 1/2 (volume 1/48).
//! Generalized Pauli polytope: additionally n4 - n5 - n6 <= 0 (volume 1/96,
//! half of the Pauli polytope).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::tomography::OccupationTriple;

/// Inside-tolerance used for exact (noiseless) occupation triples.
pub const IDEAL_TOL: f64 = 1e-9;
/// Default inside-tolerance for shot-reconstructed triples, of the order of
/// the 2048-shot 95% confidence radius.
pub const MEASURED_TOL: f64 = 0.02;

/// Slack values of every constraint for one occupation spectrum.
/// Violations are data, not errors: raw slacks are reported unclamped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstraintReport {
    /// min(n_i, 1 - n_i) for the six occupations, descending order.
    pub pauli_slacks: [f64; 6],
    /// n1 + n6 - 1, n2 + n5 - 1, n3 + n4 - 1.
    pub equality_residuals: [f64; 3],
    /// n5 + n6 - n4; negative means the forbidden (blue) region.
    pub bd_slack: f64,
    /// p2 + p3 - p1 on the three smallest occupations.
    pub higuchi_slack: f64,
    /// Input was not sorted descending.
    pub ordering_violation: bool,
    pub inside_pauli: bool,
    pub inside_gpc: bool,
}

/// Check a qubit-side occupation triple; the six fermionic occupations are
/// implied through the pairing equalities (residuals are zero by
/// construction on this path).
pub fn check_triple(occ: &OccupationTriple, tol: f64) -> ConstraintReport {
    let spectrum = [
        1.0 - occ.n6,
        1.0 - occ.n5,
        1.0 - occ.n4,
        occ.n4,
        occ.n5,
        occ.n6,
    ];
    check_spectrum_inner(&spectrum, tol, occ.n4 < occ.n5 || occ.n5 < occ.n6)
}

/// Check a full 6-value occupation spectrum (descending order expected).
pub fn check_spectrum(spectrum: &[f64; 6], tol: f64) -> ConstraintReport {
    let ordering_violation = spectrum.windows(2).any(|w| w[0] < w[1]);
    check_spectrum_inner(spectrum, tol, ordering_violation)
}

fn check_spectrum_inner(
    spectrum: &[f64; 6],
    tol: f64,
    ordering_violation: bool,
) -> ConstraintReport {
    let pauli_slacks: [f64; 6] = std::array::from_fn(|i| spectrum[i].min(1.0 - spectrum[i]));
    let equality_residuals = [
        spectrum[0] + spectrum[5] - 1.0,
        spectrum[1] + spectrum[4] - 1.0,
        spectrum[2] + spectrum[3] - 1.0,
    ];
    let bd_slack = spectrum[4] + spectrum[5] - spectrum[3];
    // The three smallest values play the role of the qubit eigenvalues.
    let (p1, p2, p3) = (spectrum[3], spectrum[4], spectrum[5]);
    let higuchi_slack = p2 + p3 - p1;
    let inside_pauli = pauli_slacks.iter().all(|s| *s >= -tol);
    let inside_gpc = inside_pauli && bd_slack >= -tol;
    ConstraintReport {
        pauli_slacks,
        equality_residuals,
        bd_slack,
        higuchi_slack,
        ordering_violation,
        inside_pauli,
        inside_gpc,
    }
}

/// Signed Euclidean distance to the Borland-Dennis facet plane
/// `n4 = n5 + n6`; positive on the allowed side.
pub fn distance_to_bd_facet(occ: &OccupationTriple) -> f64 {
    (occ.n5 + occ.n6 - occ.n4) / 3f64.sqrt()
}

/// Probability that `n_points` independently prepared random states all land
/// on the allowed half of the Pauli polytope by chance: `2^-n`.
pub fn violation_confidence(n_points: u32) -> f64 {
    0.5f64.powi(n_points as i32)
}

/// A halfspace `a . x <= b` over (n4, n5, n6).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfSpace {
    pub normal: [f64; 3],
    pub offset: f64,
    pub label: &'static str,
}

impl HalfSpace {
    pub fn slack(&self, x: &[f64; 3]) -> f64 {
        self.offset - (self.normal[0] * x[0] + self.normal[1] * x[1] + self.normal[2] * x[2])
    }
}

/// A named polytope as a halfspace list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolytopeSpec {
    pub name: &'static str,
    pub halfspaces: Vec<HalfSpace>,
}

impl PolytopeSpec {
    pub fn pauli() -> Self {
        PolytopeSpec {
            name: "pauli",
            halfspaces: vec![
                HalfSpace {
                    normal: [0.0, 0.0, -1.0],
                    offset: 0.0,
                    label: "n6_nonnegative",
                },
                HalfSpace {
                    normal: [0.0, -1.0, 1.0],
                    offset: 0.0,
                    label: "n6_below_n5",
                },
                HalfSpace {
                    normal: [-1.0, 1.0, 0.0],
                    offset: 0.0,
                    label: "n5_below_n4",
                },
                HalfSpace {
                    normal: [1.0, 0.0, 0.0],
                    offset: 0.5,
                    label: "n4_cap",
                },
            ],
        }
    }

    pub fn gpc() -> Self {
        let mut spec = Self::pauli();
        spec.name = "gpc";
        spec.halfspaces.push(HalfSpace {
            normal: [1.0, -1.0, -1.0],
            offset: 0.0,
            label: "borland_dennis",
        });
        spec
    }

    pub fn contains(&self, x: &[f64; 3], tol: f64) -> bool {
        self.halfspaces.iter().all(|h| h.slack(x) >= -tol)
    }

    /// Vertices as intersections of facet triples filtered by feasibility.
    pub fn vertices(&self) -> Vec<[f64; 3]> {
        let hs = &self.halfspaces;
        let mut vertices: Vec<[f64; 3]> = Vec::new();
        for i in 0..hs.len() {
            for j in (i + 1)..hs.len() {
                for k in (j + 1)..hs.len() {
                    let Some(x) = solve3(&hs[i], &hs[j], &hs[k]) else {
                        continue;
                    };
                    if !self.contains(&x, 1e-9) {
                        continue;
                    }
                    if vertices
                        .iter()
                        .all(|v| (0..3).map(|d| (v[d] - x[d]).abs()).sum::<f64>() > 1e-9)
                    {
                        vertices.push(x);
                    }
                }
            }
        }
        vertices.sort_by(|a, b| a.partial_cmp(b).expect("finite vertices"));
        vertices
    }
}

/// Cramer solve of the 3x3 system formed by three facet planes.
fn solve3(h1: &HalfSpace, h2: &HalfSpace, h3: &HalfSpace) -> Option<[f64; 3]> {
    let a = [h1.normal, h2.normal, h3.normal];
    let b = [h1.offset, h2.offset, h3.offset];
    let det = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(&a);
    if d.abs() < 1e-12 {
        return None;
    }
    let mut x = [0.0; 3];
    for col in 0..3 {
        let mut m = a;
        for row in 0..3 {
            m[row][col] = b[row];
        }
        x[col] = det(&m) / d;
    }
    Some(x)
}

/// Monte-Carlo volume estimate over the bounding box [0, 1/2]^3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeEstimate {
    pub samples: u64,
    pub pauli_hits: u64,
    pub gpc_hits: u64,
    /// Pauli volume / GPC volume.
    pub ratio: f64,
    /// Hit fraction times box volume (1/8).
    pub pauli_volume: f64,
    pub gpc_volume: f64,
}

/// Uniform sampling of the bounding box; deterministic per seed.
///
/// Panics if `samples < 10_000`, below which the ratio estimate is
/// meaningless (and could divide by zero).
pub fn monte_carlo_volume_ratio(samples: u64, seed: u64) -> VolumeEstimate {
    assert!(samples >= 10_000, "need at least 1e4 samples");
    let pauli = PolytopeSpec::pauli();
    let gpc = PolytopeSpec::gpc();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pauli_hits = 0u64;
    let mut gpc_hits = 0u64;
    for _ in 0..samples {
        let x = [
            rng.random_range(0.0..0.5),
            rng.random_range(0.0..0.5),
            rng.random_range(0.0..0.5),
        ];
        if pauli.contains(&x, 0.0) {
            pauli_hits += 1;
            if gpc.contains(&x, 0.0) {
                gpc_hits += 1;
            }
        }
    }
    let box_volume = 0.125;
    VolumeEstimate {
        samples,
        pauli_hits,
        gpc_hits,
        ratio: pauli_hits as f64 / gpc_hits as f64,
        pauli_volume: pauli_hits as f64 / samples as f64 * box_volume,
        gpc_volume: gpc_hits as f64 / samples as f64 * box_volume,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn triple(n4: f64, n5: f64, n6: f64) -> OccupationTriple {
        OccupationTriple { n4, n5, n6 }
    }

    #[test]
    fn interior_point_is_inside_both() {
        let report = check_triple(&triple(0.25, 0.20, 0.10), IDEAL_TOL);
        assert_abs_diff_eq!(report.bd_slack, 0.05, epsilon = 1e-12);
        assert!(report.inside_pauli && report.inside_gpc);
        assert!(!report.ordering_violation);
    }

    #[test]
    fn blue_region_point_is_pauli_only() {
        let report = check_triple(&triple(0.50, 0.20, 0.20), IDEAL_TOL);
        assert_abs_diff_eq!(report.bd_slack, -0.10, epsilon = 1e-12);
        assert!(report.inside_pauli);
        assert!(!report.inside_gpc);
    }

    #[test]
    fn ghz_vertex_has_half_slack() {
        let report = check_triple(&triple(0.5, 0.5, 0.5), IDEAL_TOL);
        assert_abs_diff_eq!(report.bd_slack, 0.5, epsilon = 1e-12);
        assert!(report.inside_gpc);
    }

    #[test]
    fn higuchi_equals_bd_when_equalities_hold() {
        let report = check_triple(&triple(0.4, 0.3, 0.1), IDEAL_TOL);
        assert!(report.equality_residuals.iter().all(|r| r.abs() < 1e-15));
        assert!((report.bd_slack - report.higuchi_slack).abs() < 1e-12);
    }

    #[test]
    fn spectrum_path_flags_ordering_violation() {
        let report = check_spectrum(&[0.9, 0.95, 0.7, 0.3, 0.05, 0.1], MEASURED_TOL);
        assert!(report.ordering_violation);
    }

    #[test]
    fn facet_distance_values() {
        assert_abs_diff_eq!(distance_to_bd_facet(&triple(0.0, 0.0, 0.0)), 0.0);
        assert_abs_diff_eq!(
            distance_to_bd_facet(&triple(0.5, 0.5, 0.5)),
            1.0 / (2.0 * 3f64.sqrt()),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            distance_to_bd_facet(&triple(0.4, 0.3, 0.1)),
            0.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn confidence_values() {
        assert_abs_diff_eq!(violation_confidence(0), 1.0);
        assert_abs_diff_eq!(violation_confidence(1), 0.5);
        let c60 = violation_confidence(60);
        assert_eq!(c60, 2f64.powi(-60));
        assert!((8.6e-19..8.7e-19).contains(&c60));
    }

    #[test]
    fn vertex_enumeration_matches_known_tetrahedra() {
        let pauli = PolytopeSpec::pauli().vertices();
        let expected_pauli = [
            [0.0, 0.0, 0.0],
            [0.5, 0.0, 0.0],
            [0.5, 0.5, 0.0],
            [0.5, 0.5, 0.5],
        ];
        assert_eq!(pauli.len(), 4);
        for (v, e) in pauli.iter().zip(expected_pauli.iter()) {
            for d in 0..3 {
                assert_abs_diff_eq!(v[d], e[d], epsilon = 1e-12);
            }
        }

        let gpc = PolytopeSpec::gpc().vertices();
        let expected_gpc = [
            [0.0, 0.0, 0.0],
            [0.5, 0.25, 0.25],
            [0.5, 0.5, 0.0],
            [0.5, 0.5, 0.5],
        ];
        assert_eq!(gpc.len(), 4);
        for (v, e) in gpc.iter().zip(expected_gpc.iter()) {
            for d in 0..3 {
                assert_abs_diff_eq!(v[d], e[d], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn volume_ratio_small_sample_sanity() {
        // Binomial bound at 1e5 samples: sd(ratio) ~ 0.026, use 4 sd.
        let est = monte_carlo_volume_ratio(100_000, 9);
        assert!((est.ratio - 2.0).abs() < 0.11, "ratio {}", est.ratio);
        assert!((est.pauli_volume - 1.0 / 48.0).abs() < 4.0 * 1.2e-4 * 3.0);
        assert!(est.gpc_hits > 0);
    }

    #[test]
    fn volume_ratio_deterministic() {
        let a = monte_carlo_volume_ratio(10_000, 4);
        let b = monte_carlo_volume_ratio(10_000, 4);
        assert_eq!(a, b);
    }
}
