//! Cross-module invariants that tie the scan, the circuit families and the
//! two constraint-checking routes together.

use gpcsim::circuits::Algorithm;
use gpcsim::fockspace::{map_qubit_to_fermion, one_rdm};
use gpcsim::polytope::{check_spectrum, check_triple, PolytopeSpec, IDEAL_TOL};
use gpcsim::qstate::StateVector;
use gpcsim::sampler::{grid_scan, ScanConfig};
use gpcsim::tomography::{occupations_exact, OccupationTriple};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Both circuit families reach every vertex of the generalized polytope:
/// each vertex has a selected point within the scan's covering resolution
/// (twice the inclusion distance).
#[test]
fn both_circuit_families_cover_the_polytope_vertices() {
    let vertices = PolytopeSpec::gpc().vertices();
    assert_eq!(vertices.len(), 4);
    for algorithm in [Algorithm::Alg1, Algorithm::Main] {
        let config = ScanConfig {
            step_deg: 0.5,
            ..ScanConfig::defaults(algorithm)
        };
        let result = grid_scan(&config).unwrap();
        for vertex in &vertices {
            let triple = OccupationTriple {
                n4: vertex[0],
                n5: vertex[1],
                n6: vertex[2],
            };
            let nearest = result
                .selected
                .iter()
                .map(|p| p.occupations.distance(&triple))
                .fold(f64::INFINITY, f64::min);
            assert!(
                nearest <= 2.0 * config.min_distance,
                "{algorithm:?}: vertex {vertex:?} nearest selected point {nearest:.4}"
            );
        }
    }
}

/// No ideal circuit state from any family enters the forbidden region.
#[test]
fn random_ideal_states_never_cross_the_bd_facet() {
    use gpcsim::sampler::occupations_at;
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    for algorithm in [Algorithm::Alg1, Algorithm::Alg2, Algorithm::Main] {
        for _ in 0..10_000 {
            let params: Vec<f64> = (0..algorithm.n_params())
                .map(|_| rng.random_range(0.0..360.0))
                .collect();
            let occ = occupations_at(algorithm, &params);
            let slack = occ.n5 + occ.n6 - occ.n4;
            assert!(slack >= -1e-12, "{algorithm:?} {params:?}: slack {slack}");
        }
    }
}

/// The fermionic-spectrum slack and the qubit-side Higuchi slack agree
/// whenever the pairing equalities hold, which the mapped sector
/// guarantees.
#[test]
fn spectrum_and_qubit_slack_routes_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..100 {
        let state = StateVector::random(3, &mut rng);
        let spectrum = one_rdm(&map_qubit_to_fermion(&state).unwrap())
            .unwrap()
            .occupations();
        let spectrum_report = check_spectrum(&spectrum, IDEAL_TOL);
        assert!(spectrum_report
            .equality_residuals
            .iter()
            .all(|r| r.abs() < 1e-10));
        let qubit_report = check_triple(&occupations_exact(&state).unwrap(), IDEAL_TOL);
        assert!(
            (spectrum_report.bd_slack - qubit_report.higuchi_slack).abs() < 1e-9,
            "spectrum slack {} vs qubit slack {}",
            spectrum_report.bd_slack,
            qubit_report.higuchi_slack
        );
        assert!(!spectrum_report.ordering_violation);
    }
}
