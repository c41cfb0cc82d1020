use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::families::{builtin_registry, find_entry, FamilyEntry, ParamPoint};
use crate::minproj::SubspaceL1;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Analysis {
    Solve,
    Probe,
    DupScan,
    Coding,
    Obstruct,
    Ladder,
    Synth,
}

impl Analysis {
    /// Dependency order.
    pub const ALL: [Analysis; 7] = [
        Analysis::Solve,
        Analysis::Probe,
        Analysis::DupScan,
        Analysis::Coding,
        Analysis::Obstruct,
        Analysis::Ladder,
        Analysis::Synth,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Analysis::Solve => "solve",
            Analysis::Probe => "probe",
            Analysis::DupScan => "dup-scan",
            Analysis::Coding => "coding",
            Analysis::Obstruct => "obstruct",
            Analysis::Ladder => "ladder",
            Analysis::Synth => "synth",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyRef {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, String>,
}

fn default_dup_levels() -> Vec<usize> {
    vec![2, 3]
}

fn default_coding_levels() -> Vec<usize> {
    vec![1, 2, 3]
}

fn default_ladder_levels() -> Vec<usize> {
    crate::continuum::DEFAULT_LADDER_LEVELS.to_vec()
}

fn default_deltas() -> Vec<String> {
    ["1/16", "1/64", "1/256"].map(String::from).to_vec()
}

/// On-disk problem description.
///
/// ```json
/// { "schema_version": 1, "ambient_dim": 2, "basis": [["1", "1"]],
///   "analyses": ["solve", "ladder"] }
/// ```
///
/// Each basis row is one basis vector. With `family` set and `basis`
/// omitted, the vectors come from the built-in registry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub schema_version: u32,
    #[serde(default)]
    pub ambient_dim: Option<usize>,
    #[serde(default)]
    pub basis: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub family: Option<FamilyRef>,
    pub analyses: Vec<Analysis>,
    #[serde(default = "default_dup_levels")]
    pub dup_levels: Vec<usize>,
    #[serde(default = "default_coding_levels")]
    pub coding_levels: Vec<usize>,
    #[serde(default = "default_ladder_levels")]
    pub ladder_levels: Vec<usize>,
    #[serde(default = "default_deltas")]
    pub deltas: Vec<String>,
}

fn schema(context: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema {
        context: context.into(),
        message: message.into(),
    }
}

fn parse_rational(context: String, s: &str) -> Result<Rational> {
    s.parse::<Rational>()
        .map_err(|e| Error::Parse(format!("{context}: {e}")))
}

impl ProblemFile {
    /// A problem over explicit basis vectors.
    pub fn from_subspace(v: &SubspaceL1, analyses: Vec<Analysis>) -> ProblemFile {
        ProblemFile {
            schema_version: SCHEMA_VERSION,
            ambient_dim: Some(v.ambient_dim()),
            basis: Some(
                (0..v.dim())
                    .map(|k| v.basis_vector(k).iter().map(Rational::to_string).collect())
                    .collect(),
            ),
            family: None,
            analyses,
            dup_levels: default_dup_levels(),
            coding_levels: default_coding_levels(),
            ladder_levels: default_ladder_levels(),
            deltas: default_deltas(),
        }
    }

    pub fn parse(text: &str) -> Result<ProblemFile> {
        let p: ProblemFile = serde_json::from_str(text).map_err(|e| {
            if e.is_data() {
                schema(format!("line {} column {}", e.line(), e.column()), e.to_string())
            } else {
                Error::Parse(e.to_string())
            }
        })?;
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(schema(
                "schema_version",
                format!("unsupported version {}, expected {SCHEMA_VERSION}", self.schema_version),
            ));
        }
        if self.analyses.is_empty() {
            return Err(schema("analyses", "at least one analysis is required"));
        }
        for (field, levels) in [
            ("dup_levels", &self.dup_levels),
            ("coding_levels", &self.coding_levels),
            ("ladder_levels", &self.ladder_levels),
        ] {
            if let Some(i) = levels.iter().position(|&m| m == 0) {
                return Err(schema(format!("{field}[{i}]"), "refinement levels start at 1"));
            }
        }
        for (i, d) in self.deltas.iter().enumerate() {
            let d = parse_rational(format!("deltas[{i}]"), d)?;
            if !d.is_positive() {
                return Err(schema(format!("deltas[{i}]"), "ramp width must be positive"));
            }
        }
        match (&self.basis, &self.family) {
            (None, None) => return Err(schema("basis", "either basis or family is required")),
            (Some(rows), _) => {
                let Some(dim) = self.ambient_dim else {
                    return Err(schema("ambient_dim", "required with an explicit basis"));
                };
                if rows.is_empty() {
                    return Err(schema("basis", "at least one basis row is required"));
                }
                for (i, row) in rows.iter().enumerate() {
                    if row.len() != dim {
                        return Err(schema(
                            format!("basis[{i}]"),
                            format!("row has {} entries, ambient_dim is {dim}", row.len()),
                        ));
                    }
                    for (j, s) in row.iter().enumerate() {
                        parse_rational(format!("basis[{i}][{j}]"), s)?;
                    }
                }
            }
            (None, Some(f)) => {
                for (k, s) in &f.params {
                    parse_rational(format!("family.params.{k}"), s)?;
                }
            }
        }
        Ok(())
    }

    pub fn family_entry(&self) -> Result<Option<FamilyEntry>> {
        let Some(f) = &self.family else {
            return Ok(None);
        };
        let registry = builtin_registry();
        find_entry(&registry, &f.name)
            .cloned()
            .map(Some)
            .ok_or_else(|| schema("family.name", format!("unknown family {:?}", f.name)))
    }

    pub fn family_params(&self) -> Result<ParamPoint> {
        let Some(f) = &self.family else {
            return Ok(ParamPoint::new());
        };
        f.params
            .iter()
            .map(|(k, s)| Ok((k.clone(), parse_rational(format!("family.params.{k}"), s)?)))
            .collect()
    }

    pub fn deltas(&self) -> Result<Vec<Rational>> {
        self.deltas
            .iter()
            .enumerate()
            .map(|(i, s)| parse_rational(format!("deltas[{i}]"), s))
            .collect()
    }

    pub fn subspace(&self) -> Result<SubspaceL1> {
        if let Some(rows) = &self.basis {
            let vectors = rows
                .iter()
                .enumerate()
                .map(|(i, row)| {
                    row.iter()
                        .enumerate()
                        .map(|(j, s)| parse_rational(format!("basis[{i}][{j}]"), s))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            let v = SubspaceL1::from_vectors(&vectors)?;
            return Ok(v);
        }
        let entry = self.family_entry()?.expect("validated: basis or family");
        entry.construct(&self.family_params()?)
    }

    /// Canonical serialization used for content hashing.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }
}

/// Reads, validates, and checks that the basis has full rank.
pub fn load_problem(path: &Path) -> Result<ProblemFile> {
    let text = std::fs::read_to_string(path)?;
    let p = ProblemFile::parse(&text)?;
    p.subspace()?;
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_loads() {
        let p = ProblemFile::parse(
            r#"{"schema_version":1,"ambient_dim":2,"basis":[["1","1"]],"analyses":["solve"]}"#,
        )
        .unwrap();
        assert_eq!(p.subspace().unwrap().dim(), 1);
        assert_eq!(p.dup_levels, vec![2, 3]);
    }

    #[test]
    fn wrong_row_length_names_the_row() {
        let err = ProblemFile::parse(
            r#"{"schema_version":1,"ambient_dim":2,"basis":[["1","1"],["1"]],"analyses":["solve"]}"#,
        )
        .unwrap_err();
        assert!(matches!(&err, Error::Schema { context, .. } if context == "basis[1]"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn bad_token_is_a_parse_error() {
        let err = ProblemFile::parse(
            r#"{"schema_version":1,"ambient_dim":2,"basis":[["1.5x","1"]],"analyses":["solve"]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Parse(ref m) if m.contains("basis[0][0]")), "{err}");
    }

    #[test]
    fn unknown_fields_and_analyses_are_rejected() {
        let err = ProblemFile::parse(
            r#"{"schema_version":1,"ambient_dim":2,"basis":[["1","1"]],"analyses":["solve"],"extra":1}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Schema { .. }), "{err}");
        let err = ProblemFile::parse(
            r#"{"schema_version":1,"ambient_dim":2,"basis":[["1","1"]],"analyses":["fly"]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Schema { .. }), "{err}");
    }

    #[test]
    fn rank_deficient_basis() {
        let p = ProblemFile::parse(
            r#"{"schema_version":1,"ambient_dim":2,"basis":[["1","1"],["2","2"]],"analyses":["solve"]}"#,
        )
        .unwrap();
        assert!(matches!(p.subspace(), Err(Error::RankDeficient { rank: 1, dim: 2 })));
    }

    #[test]
    fn family_reference() {
        let p = ProblemFile::parse(
            r#"{"schema_version":1,"family":{"name":"regular-2d","params":{"a":"2","b":"1"}},"analyses":["solve"]}"#,
        )
        .unwrap();
        let v = p.subspace().unwrap();
        assert_eq!((v.ambient_dim(), v.dim()), (8, 2));
    }
}
