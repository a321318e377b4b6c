//! Experiment records: one row per measured point, serialized as
//! schema-versioned JSON.
//!
//! Floats round-trip losslessly (shortest-representation printing, exact
//! parsing). The `generated_at` timestamp is the only field excluded from
//! determinism comparisons.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuits::Algorithm;
use crate::polytope::ConstraintReport;
use crate::qstate::CountsTable;
use crate::tomography::OccupationTriple;

pub const RECORDS_SCHEMA: &str = "gpcsim.records.v1";

#[derive(Debug, Error)]
pub enum RecordsError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("records file: {0}")]
    Malformed(String),
}

/// Compact fingerprint of one counts table: shot total plus an FNV-1a hash
/// of the sorted outcome/count pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountsDigest {
    pub shots: u64,
    pub fnv1a: String,
}

impl CountsDigest {
    pub fn of(table: &CountsTable) -> CountsDigest {
        let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
        let mut feed = |bytes: &[u8]| {
            for &b in bytes {
                hash ^= u64::from(b);
                hash = hash.wrapping_mul(0x100_0000_01b3);
            }
        };
        feed(&table.shots.to_le_bytes());
        for (key, count) in &table.counts {
            feed(key.as_bytes());
            feed(&count.to_le_bytes());
        }
        CountsDigest {
            shots: table.shots,
            fnv1a: format!("{hash:016x}"),
        }
    }
}

/// One measured point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub point_id: u64,
    pub algorithm: Algorithm,
    pub params_deg: Vec<f64>,
    pub shots: u64,
    pub seed: u64,
    pub noise_model: String,
    pub ideal: OccupationTriple,
    pub measured: OccupationTriple,
    pub clamp_events: u32,
    pub report: ConstraintReport,
    /// Digests of the Z, X, Y counts tables.
    pub counts_digests: [CountsDigest; 3],
}

/// A records file: header plus rows sorted by point id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordsFile {
    pub schema: String,
    /// Seconds since the Unix epoch at write time; excluded from
    /// determinism comparisons.
    pub generated_at: u64,
    pub shots: u64,
    pub seed: u64,
    pub noise_model: String,
    pub inside_tolerance: f64,
    pub records: Vec<ExperimentRecord>,
}

impl RecordsFile {
    pub fn new(
        shots: u64,
        seed: u64,
        noise_model: String,
        inside_tolerance: f64,
        records: Vec<ExperimentRecord>,
    ) -> RecordsFile {
        RecordsFile {
            schema: RECORDS_SCHEMA.to_string(),
            generated_at: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            shots,
            seed,
            noise_model,
            inside_tolerance,
            records,
        }
    }

    pub fn write_json_path(&self, path: &Path) -> Result<(), RecordsError> {
        let file = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(file, self)?;
        Ok(())
    }

    pub fn read_json_path(path: &Path) -> Result<RecordsFile, RecordsError> {
        let file = std::fs::File::open(path)?;
        let records: RecordsFile = serde_json::from_reader(file)?;
        if records.schema != RECORDS_SCHEMA {
            return Err(RecordsError::Malformed(format!(
                "unexpected schema {:?}",
                records.schema
            )));
        }
        Ok(records)
    }

    /// Byte-comparable form with the timestamp normalized away.
    pub fn canonical_json(&self) -> Result<String, RecordsError> {
        let mut clone = self.clone();
        clone.generated_at = 0;
        Ok(serde_json::to_string_pretty(&clone)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::{check_triple, MEASURED_TOL};
    use std::collections::BTreeMap;

    fn dummy_record(point_id: u64) -> ExperimentRecord {
        let triple = OccupationTriple {
            n4: 0.2,
            n5: 0.15,
            n6: 0.1,
        };
        let table = CountsTable {
            shots: 16,
            counts: BTreeMap::from([("000".to_string(), 12u64), ("011".to_string(), 4)]),
        };
        ExperimentRecord {
            point_id,
            algorithm: Algorithm::Alg1,
            params_deg: vec![43.0, 3.0, 39.0],
            shots: 16,
            seed: 7,
            noise_model: "none".into(),
            ideal: triple,
            measured: triple,
            clamp_events: 0,
            report: check_triple(&triple, MEASURED_TOL),
            counts_digests: [
                CountsDigest::of(&table),
                CountsDigest::of(&table),
                CountsDigest::of(&table),
            ],
        }
    }

    #[test]
    fn digest_is_stable_and_sensitive() {
        let table = CountsTable {
            shots: 16,
            counts: BTreeMap::from([("000".to_string(), 12u64), ("011".to_string(), 4)]),
        };
        let a = CountsDigest::of(&table);
        let b = CountsDigest::of(&table);
        assert_eq!(a, b);
        let mut other = table.clone();
        *other.counts.get_mut("000").unwrap() = 11;
        other.counts.insert("001".to_string(), 1);
        assert_ne!(CountsDigest::of(&other).fnv1a, a.fnv1a);
    }

    #[test]
    fn records_round_trip_and_schema_check() {
        let file = RecordsFile::new(16, 7, "none".into(), MEASURED_TOL, vec![dummy_record(0)]);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("records.json");
        file.write_json_path(&path).unwrap();
        let loaded = RecordsFile::read_json_path(&path).unwrap();
        assert_eq!(loaded, file);

        std::fs::write(&path, "{\"schema\": \"other\"}").unwrap();
        assert!(RecordsFile::read_json_path(&path).is_err());
    }

    #[test]
    fn canonical_json_ignores_timestamp() {
        let mut a = RecordsFile::new(16, 7, "none".into(), MEASURED_TOL, vec![dummy_record(0)]);
        let mut b = a.clone();
        a.generated_at = 1;
        b.generated_at = 2;
        assert_eq!(a.canonical_json().unwrap(), b.canonical_json().unwrap());
    }
}
