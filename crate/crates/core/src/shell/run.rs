use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::continuum::{
    extract_coding, gram_matrix, ladder_for_subspace, piecewise_copy, q_norm, refinement_sweep,
    synthesize, wstar_obstruction_certificate,
};
use crate::duplication::{duplicate_subspace, invariance_scan_from};
use crate::error::{Error, Result};
use crate::exact::Matrix;
use crate::lp::Mode;
use crate::minproj::{
    kadec_snobar_check, solve_min_projection, solve_min_projection_float, MinProjResult,
    SubspaceL1,
};

use super::problem::{Analysis, ProblemFile};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorInfo {
    pub message: String,
    pub exit_code: i32,
}

impl From<&Error> for ErrorInfo {
    fn from(e: &Error) -> Self {
        ErrorInfo {
            message: e.to_string(),
            exit_code: e.exit_code(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Ok(Value),
    Error(ErrorInfo),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisRecord {
    pub analysis: Analysis,
    pub outcome: Outcome,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub problem_hash: String,
    pub timestamp: String,
    pub mode: Mode,
    pub results: Vec<AnalysisRecord>,
}

impl ResultRecord {
    pub fn get(&self, a: Analysis) -> Option<&Outcome> {
        self.results.iter().find(|r| r.analysis == a).map(|r| &r.outcome)
    }

    /// Exit code of the first failed analysis, or 0.
    pub fn exit_code(&self) -> i32 {
        self.results
            .iter()
            .find_map(|r| match &r.outcome {
                Outcome::Error(e) => Some(e.exit_code),
                Outcome::Ok(_) => None,
            })
            .unwrap_or(0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

/// `sha256(canonical problem JSON + "\n" + mode)`, hex.
pub fn problem_hash(p: &ProblemFile, mode: Mode) -> String {
    let mut h = Sha256::new();
    h.update(p.canonical_json().as_bytes());
    h.update(b"\n");
    h.update(mode.to_string().as_bytes());
    hex::encode(h.finalize())
}

/// Content-addressed record cache, one JSON file per problem hash.
#[derive(Clone, Debug)]
pub struct Store {
    dir: PathBuf,
}

impl Store {
    pub const ENV: &'static str = "PROJLAB_STORE";

    pub fn open(dir: impl Into<PathBuf>) -> Result<Store> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir)?;
        Ok(Store { dir })
    }

    pub fn from_env() -> Result<Option<Store>> {
        std::env::var_os(Store::ENV).map(Store::open).transpose()
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, hash: &str) -> PathBuf {
        self.dir.join(format!("{hash}.json"))
    }

    /// Raw bytes of a stored record.
    pub fn load_raw(&self, hash: &str) -> Result<Option<String>> {
        match std::fs::read_to_string(self.path(hash)) {
            Ok(s) => Ok(Some(s)),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e.into()),
        }
    }

    /// Write-then-rename, so readers never see a partial record.
    pub fn save_raw(&self, hash: &str, text: &str) -> Result<()> {
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(text.as_bytes())?;
        tmp.as_file().sync_all()?;
        tmp.persist(self.path(hash)).map_err(|e| Error::Io(e.error))?;
        Ok(())
    }
}

/// Result of [`run`]: the record and its exact serialized bytes.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub record: ResultRecord,
    pub json: String,
    pub from_store: bool,
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("serializable")
}

fn matrix_rows(m: &Matrix) -> Vec<Vec<String>> {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(ToString::to_string).collect())
        .collect()
}

fn solve_value(r: &MinProjResult) -> Value {
    json!({
        "value": r.value,
        "value_float": r.value.to_f64(),
        "dim": r.dim(),
        "ambient_dim": r.optimal.subspace().ambient_dim(),
        "functionals": matrix_rows(r.optimal.functionals()),
        "dual_certificate": r.dual_certificate,
        "kadec_snobar": kadec_snobar_check(r),
    })
}

fn exact_only(a: Analysis) -> Error {
    Error::Domain(format!("{} requires exact mode", a.name()))
}

fn run_exact(a: Analysis, p: &ProblemFile, v: &SubspaceL1, base: &MinProjResult) -> Result<Value> {
    match a {
        Analysis::Solve => Ok(solve_value(base)),
        Analysis::Probe => Ok(json!({
            "unique": base.unique,
            "face": base.face,
        })),
        Analysis::DupScan => Ok(to_value(&invariance_scan_from(v, base, &p.dup_levels, true)?)),
        Analysis::Coding => {
            let levels = refinement_sweep(base, &p.coding_levels, false)?;
            let rows = levels
                .iter()
                .map(|r| {
                    let basis = piecewise_copy(v, r.level)?;
                    let c = extract_coding(&r.result, &basis.partition)?;
                    let qn = q_norm(&c, &basis)?;
                    Ok(json!({
                        "level": r.level,
                        "lp_value": r.result.value,
                        "q_norm": qn,
                        "equal": qn == r.result.value,
                        "biorthogonal": gram_matrix(&c, &basis)? == Matrix::identity(v.dim()),
                        "coding": c,
                    }))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Value::Array(rows))
        }
        Analysis::Obstruct => Ok(to_value(&wstar_obstruction_certificate(v)?)),
        Analysis::Ladder => Ok(to_value(&ladder_for_subspace(v, &p.ladder_levels, Some(base))?)),
        Analysis::Synth => Ok(to_value(&synthesize(base, &p.deltas()?)?)),
    }
}

fn run_float(a: Analysis, p: &ProblemFile, v: &SubspaceL1) -> Result<Value> {
    match a {
        Analysis::Solve => Ok(to_value(&solve_min_projection_float(v)?)),
        Analysis::DupScan => {
            let base = solve_min_projection_float(v)?.value;
            let rows = p
                .dup_levels
                .par_iter()
                .map(|&m| {
                    let r = solve_min_projection_float(&duplicate_subspace(v, m)?)?;
                    Ok(json!({
                        "level": m,
                        "value": r.value,
                        "deviation": (r.value - base).abs(),
                    }))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(json!({ "base_value": base, "rows": rows, "advisory": true }))
        }
        other => Err(exact_only(other)),
    }
}

fn compute(p: &ProblemFile, mode: Mode) -> Vec<AnalysisRecord> {
    let mut requested: Vec<Analysis> = p.analyses.clone();
    requested.sort_by_key(|a| Analysis::ALL.iter().position(|b| b == a));
    requested.dedup();
    let record = |analysis, r: Result<Value>| AnalysisRecord {
        analysis,
        outcome: match r {
            Ok(v) => Outcome::Ok(v),
            Err(e) => Outcome::Error(ErrorInfo::from(&e)),
        },
    };
    let v = match p.subspace() {
        Ok(v) => v,
        Err(e) => {
            return requested
                .into_iter()
                .map(|a| record(a, Err(Error::Schema { context: "basis".into(), message: e.to_string() })))
                .collect()
        }
    };
    match mode {
        Mode::Float => requested
            .par_iter()
            .map(|&a| record(a, run_float(a, p, &v)))
            .collect(),
        Mode::Exact => {
            let probe = requested.iter().any(|a| {
                matches!(a, Analysis::Probe | Analysis::DupScan | Analysis::Ladder)
            });
            match solve_min_projection(&v, probe) {
                Ok(base) => requested
                    .par_iter()
                    .map(|&a| record(a, run_exact(a, p, &v, &base)))
                    .collect(),
                Err(e) => {
                    let info = ErrorInfo::from(&e);
                    requested
                        .into_iter()
                        .map(|a| AnalysisRecord {
                            analysis: a,
                            outcome: Outcome::Error(if a == Analysis::Solve {
                                info.clone()
                            } else {
                                ErrorInfo {
                                    message: format!("skipped: solve failed: {}", info.message),
                                    exit_code: info.exit_code,
                                }
                            }),
                        })
                        .collect()
                }
            }
        }
    }
}

/// Runs every requested analysis, consulting and filling `store` when
/// given. A cached record is returned byte for byte.
pub fn run(p: &ProblemFile, mode: Mode, store: Option<&Store>) -> Result<RunOutput> {
    p.validate()?;
    let hash = problem_hash(p, mode);
    if let Some(s) = store {
        if let Some(text) = s.load_raw(&hash)? {
            let record: ResultRecord = serde_json::from_str(&text)
                .map_err(|e| Error::Solver(format!("corrupt store entry {hash}: {e}")))?;
            return Ok(RunOutput {
                record,
                json: text,
                from_store: true,
            });
        }
    }
    let record = ResultRecord {
        problem_hash: hash.clone(),
        timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        mode,
        results: compute(p, mode),
    };
    let json = record.to_json();
    if let Some(s) = store {
        s.save_raw(&hash, &json)?;
    }
    Ok(RunOutput {
        record,
        json,
        from_store: false,
    })
}

/// Serialized results without the timestamp; equal across fresh runs.
pub fn results_json(record: &ResultRecord) -> String {
    serde_json::to_string(&record.results).expect("serializable")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem(analyses: &str) -> ProblemFile {
        ProblemFile::parse(&format!(
            r#"{{"schema_version":1,"ambient_dim":2,"basis":[["1","1"]],"analyses":{analyses}}}"#
        ))
        .unwrap()
    }

    #[test]
    fn solve_only_record() {
        let out = run(&problem(r#"["solve"]"#), Mode::Exact, None).unwrap();
        let Some(Outcome::Ok(v)) = out.record.get(Analysis::Solve) else {
            panic!("solve failed");
        };
        assert_eq!(v["value"], "1");
        assert_eq!(v["kadec_snobar"], true);
    }

    #[test]
    fn ladder_on_a_line() {
        let out = run(&problem(r#"["ladder"]"#), Mode::Exact, None).unwrap();
        let Some(Outcome::Ok(v)) = out.record.get(Analysis::Ladder) else {
            panic!("ladder failed");
        };
        assert_eq!(v["y_value"], "2");
    }

    #[test]
    fn repeat_run_is_served_from_store() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path()).unwrap();
        let p = problem(r#"["solve","dup-scan"]"#);
        let first = run(&p, Mode::Exact, Some(&store)).unwrap();
        assert!(!first.from_store);
        let second = run(&p, Mode::Exact, Some(&store)).unwrap();
        assert!(second.from_store);
        assert_eq!(first.json, second.json);
        let float = run(&p, Mode::Float, Some(&store)).unwrap();
        assert!(!float.from_store);
        assert_ne!(float.record.problem_hash, first.record.problem_hash);
    }

    #[test]
    fn float_mode_rejects_exact_only_analyses() {
        let out = run(&problem(r#"["solve","coding"]"#), Mode::Float, None).unwrap();
        assert!(matches!(out.record.get(Analysis::Solve), Some(Outcome::Ok(_))));
        assert!(matches!(out.record.get(Analysis::Coding), Some(Outcome::Error(_))));
        assert_eq!(out.record.exit_code(), 3);
    }

    #[test]
    fn sibling_failures_are_isolated() {
        let mut p = problem(r#"["solve","synth"]"#);
        p.deltas = vec!["1/2".into()];
        let out = run(&p, Mode::Exact, None).unwrap();
        assert!(matches!(out.record.get(Analysis::Solve), Some(Outcome::Ok(_))));
        assert!(matches!(out.record.get(Analysis::Synth), Some(Outcome::Error(_))));
    }
}
