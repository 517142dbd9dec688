//! JSON instance files and their conversion to exact core types.
//!
//! All numbers travel as rational strings, so a file round-trips through
//! parse and serialize without any loss.

use interlace_core::{
    parse_rational, ComplexRational, HermitianMatrix, Instance, RandomVectorSpec, VectorC,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// On-disk instance. `specs` describes finite-support random vectors;
/// `matrices` is a plain Hermitian family for commands that work on
/// expectations directly. Either part may be absent; each command states
/// which one it needs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub specs: Vec<SpecEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrices: Option<Vec<MatrixEntry>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecEntry {
    pub support: Vec<SupportEntry>,
}

/// One support atom: probability "p/q" and a vector of [re, im] pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupportEntry {
    pub prob: String,
    pub vector: Vec<[String; 2]>,
}

/// Row-major square matrix, one [re, im] pair per entry.
pub type MatrixEntry = Vec<Vec<[String; 2]>>;

/// Reads and parses a file, returning the raw bytes for digesting.
pub fn read_file(path: &std::path::Path) -> Result<(Vec<u8>, InstanceFile)> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    let file: InstanceFile = serde_json::from_slice(&bytes)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    Ok((bytes, file))
}

fn complex_entry(pair: &[String; 2], context: &str) -> Result<ComplexRational> {
    let re = parse_rational(&pair[0])
        .map_err(|e| CliError::Parse(format!("{context}: real part: {e}")))?;
    let im = parse_rational(&pair[1])
        .map_err(|e| CliError::Parse(format!("{context}: imaginary part: {e}")))?;
    Ok(ComplexRational::new(re, im))
}

fn support_vector(entry: &SupportEntry, dim: usize, context: &str) -> Result<VectorC> {
    if entry.vector.len() != dim {
        return Err(CliError::Parse(format!(
            "{context}: vector has {} entries, expected {dim}",
            entry.vector.len()
        )));
    }
    let entries = entry
        .vector
        .iter()
        .enumerate()
        .map(|(k, pair)| complex_entry(pair, &format!("{context}, entry {k}")))
        .collect::<Result<Vec<_>>>()?;
    VectorC::new(entries).map_err(CliError::Core)
}

/// Builds the random-vector instance; errors name the offending spec.
pub fn to_instance(file: &InstanceFile) -> Result<Instance> {
    if file.specs.is_empty() {
        return Err(CliError::Parse("the file contains no specs".into()));
    }
    let specs = file
        .specs
        .iter()
        .enumerate()
        .map(|(i, spec)| {
            let context = format!("spec {i}");
            let support = spec
                .support
                .iter()
                .enumerate()
                .map(|(k, atom)| {
                    let prob = parse_rational(&atom.prob).map_err(|e| {
                        CliError::Parse(format!("{context}, support {k}: probability: {e}"))
                    })?;
                    let vector =
                        support_vector(atom, file.dim, &format!("{context}, support {k}"))?;
                    Ok((prob, vector))
                })
                .collect::<Result<Vec<_>>>()?;
            RandomVectorSpec::new(support)
                .map_err(|e| CliError::Parse(format!("{context}: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    Instance::new(file.dim, specs).map_err(CliError::Core)
}

/// The plain matrix family; errors name the offending matrix.
pub fn to_matrices(file: &InstanceFile) -> Result<Vec<HermitianMatrix>> {
    let Some(matrices) = &file.matrices else {
        return Err(CliError::Parse("the file contains no matrices".into()));
    };
    matrices
        .iter()
        .enumerate()
        .map(|(i, rows)| {
            let context = format!("matrix {i}");
            if rows.len() != file.dim {
                return Err(CliError::Parse(format!(
                    "{context}: {} rows, expected {}",
                    rows.len(),
                    file.dim
                )));
            }
            let entries = rows
                .iter()
                .enumerate()
                .map(|(r, row)| {
                    if row.len() != file.dim {
                        return Err(CliError::Parse(format!(
                            "{context}, row {r}: {} entries, expected {}",
                            row.len(),
                            file.dim
                        )));
                    }
                    row.iter()
                        .enumerate()
                        .map(|(c, pair)| {
                            complex_entry(pair, &format!("{context}, entry ({r},{c})"))
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            HermitianMatrix::new(entries)
                .map_err(|e| CliError::Parse(format!("{context}: {e}")))
        })
        .collect()
}

/// Matrix family for expectation-level commands: explicit matrices if
/// present, otherwise the expected outer products of the specs.
pub fn hermitian_family(file: &InstanceFile) -> Result<Vec<HermitianMatrix>> {
    if file.matrices.is_some() {
        to_matrices(file)
    } else if !file.specs.is_empty() {
        Ok(to_instance(file)?.expected_matrices())
    } else {
        Err(CliError::Parse("the file contains neither specs nor matrices".into()))
    }
}

/// Vector list for partition commands: every spec must be deterministic.
pub fn to_vectors(file: &InstanceFile) -> Result<Vec<VectorC>> {
    let inst = to_instance(file)?;
    inst.specs()
        .iter()
        .enumerate()
        .map(|(i, spec)| {
            if !spec.is_deterministic() {
                return Err(CliError::Parse(format!(
                    "spec {i}: partitioning needs deterministic vectors, found {} support atoms",
                    spec.support().len()
                )));
            }
            Ok(spec.support()[0].1.clone())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform_pair_json() -> &'static str {
        r#"{
            "dim": 2,
            "specs": [
                {"support": [
                    {"prob": "1/2", "vector": [["1", "0"], ["0", "0"]]},
                    {"prob": "1/2", "vector": [["0", "0"], ["1", "0"]]}
                ]},
                {"support": [
                    {"prob": "1/2", "vector": [["1", "0"], ["0", "0"]]},
                    {"prob": "1/2", "vector": [["0", "0"], ["1", "0"]]}
                ]}
            ]
        }"#
    }

    #[test]
    fn round_trip_is_identity() {
        let file: InstanceFile = serde_json::from_str(uniform_pair_json()).unwrap();
        let text = serde_json::to_string(&file).unwrap();
        let again: InstanceFile = serde_json::from_str(&text).unwrap();
        assert_eq!(file, again);
    }

    #[test]
    fn instance_conversion_checks_dimensions() {
        let mut file: InstanceFile = serde_json::from_str(uniform_pair_json()).unwrap();
        file.specs[1].support[0].vector.pop();
        let err = to_instance(&file).unwrap_err();
        assert!(err.to_string().contains("spec 1"), "got: {err}");
    }

    #[test]
    fn bad_probability_sum_names_the_spec() {
        let mut file: InstanceFile = serde_json::from_str(uniform_pair_json()).unwrap();
        file.specs[0].support[0].prob = "1/3".into();
        let err = to_instance(&file).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("spec 0") && msg.contains("sum"), "got: {msg}");
    }

    #[test]
    fn matrices_parse_and_validate() {
        let file: InstanceFile = serde_json::from_str(
            r#"{
                "dim": 2,
                "matrices": [
                    [[["1/2", "0"], ["0", "0"]], [["0", "0"], ["1/2", "0"]]],
                    [[["0", "0"], ["0", "1/4"]], [["0", "-1/4"], ["0", "0"]]]
                ]
            }"#,
        )
        .unwrap();
        let ms = to_matrices(&file).unwrap();
        assert_eq!(ms.len(), 2);
        assert_eq!(ms[0].trace(), interlace_core::scalar::rat(1, 1));
    }

    #[test]
    fn non_hermitian_matrix_is_a_parse_error() {
        let file: InstanceFile = serde_json::from_str(
            r#"{
                "dim": 2,
                "matrices": [
                    [[["1", "0"], ["1", "0"]], [["0", "0"], ["1", "0"]]]
                ]
            }"#,
        )
        .unwrap();
        let err = to_matrices(&file).unwrap_err();
        assert_eq!(err.exit_code(), 4);
        assert!(err.to_string().contains("matrix 0"));
    }

    #[test]
    fn vectors_require_deterministic_specs() {
        let file: InstanceFile = serde_json::from_str(uniform_pair_json()).unwrap();
        let err = to_vectors(&file).unwrap_err();
        assert!(err.to_string().contains("deterministic"));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let res: std::result::Result<InstanceFile, _> =
            serde_json::from_str(r#"{"dim": 1, "vectors": []}"#);
        assert!(res.is_err());
    }

    mod round_trip_properties {
        use super::*;
        use proptest::prelude::*;

        fn rational_string() -> impl Strategy<Value = String> {
            (-9i64..=9, 1i64..=9).prop_map(|(n, d)| format!("{n}/{d}"))
        }

        fn support_entry(dim: usize) -> impl Strategy<Value = SupportEntry> {
            (
                rational_string(),
                proptest::collection::vec([rational_string(), rational_string()], dim),
            )
                .prop_map(|(prob, vector)| SupportEntry { prob, vector })
        }

        fn instance_file() -> impl Strategy<Value = InstanceFile> {
            (1usize..=3).prop_flat_map(|dim| {
                (
                    proptest::collection::vec(
                        proptest::collection::vec(support_entry(dim), 1..=3)
                            .prop_map(|support| SpecEntry { support }),
                        0..=3,
                    ),
                    proptest::option::of(proptest::collection::vec(
                        proptest::collection::vec(
                            proptest::collection::vec(
                                [rational_string(), rational_string()],
                                dim,
                            ),
                            dim,
                        ),
                        0..=2,
                    )),
                )
                    .prop_map(move |(specs, matrices)| InstanceFile { dim, specs, matrices })
            })
        }

        proptest! {
            // Serialization keeps every string verbatim, so any file value
            // survives a full cycle, valid instance or not.
            #[test]
            fn serialize_then_parse_is_identity(file in instance_file()) {
                let text = serde_json::to_string(&file).unwrap();
                let again: InstanceFile = serde_json::from_str(&text).unwrap();
                prop_assert_eq!(&file, &again);
                let pretty = serde_json::to_string_pretty(&file).unwrap();
                let from_pretty: InstanceFile = serde_json::from_str(&pretty).unwrap();
                prop_assert_eq!(&file, &from_pretty);
            }
        }
    }
}
