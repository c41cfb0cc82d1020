//! Problem files, the result store, and report emission behind the
//! `projlab` binary.

mod problem;
mod reports;
mod run;

use std::path::Path;

pub use problem::{load_problem, Analysis, FamilyRef, ProblemFile, SCHEMA_VERSION};
pub use reports::{
    beta_table, emit_beta_table, find_target, Codim, Recipe, TargetReport, BETA_TABLE_ENUMERATE,
    BETA_TABLE_HEADER, BETA_TABLE_MAX_N, REGISTRY_CAVEAT,
};
pub use run::{
    problem_hash, results_json, run, AnalysisRecord, ErrorInfo, Outcome, ResultRecord, RunOutput,
    Store,
};

use crate::duplication::InvarianceScan;
use crate::error::{Error, Result};
use crate::families::{
    builtin_registry, find_entry, validate_family_entry, FamilyEntry, ValidationOptions,
    ValidationReport,
};

/// Reads a registry file (a JSON list of entries).
pub fn load_registry(path: &Path) -> Result<Vec<FamilyEntry>> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Schema {
        context: format!("{}: line {} column {}", path.display(), e.line(), e.column()),
        message: e.to_string(),
    })
}

pub fn save_registry(path: &Path, entries: &[FamilyEntry]) -> Result<()> {
    let text = serde_json::to_string_pretty(entries).expect("serializable");
    std::fs::write(path, text)?;
    Ok(())
}

/// Validates one entry of `registry` (the built-in one when `None`) on its
/// own grid.
pub fn family_validate(
    name: &str,
    registry: Option<&[FamilyEntry]>,
    opts: &ValidationOptions,
) -> Result<ValidationReport> {
    let builtin;
    let registry = match registry {
        Some(r) => r,
        None => {
            builtin = builtin_registry();
            &builtin
        }
    };
    let entry = find_entry(registry, name)
        .ok_or_else(|| Error::Domain(format!("no registry entry named {name:?}")))?;
    Ok(validate_family_entry(entry, &entry.grid, opts))
}

/// `level,value,unique,equal_to_base`.
pub fn scan_csv(scan: &InvarianceScan) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Solver(format!("csv: {e}"));
    w.write_record(["level", "value", "unique", "equal_to_base"]).map_err(csv_err)?;
    let opt = |u: Option<bool>| u.map_or("-".to_string(), |b| b.to_string());
    w.write_record(["1".into(), scan.base_value.to_string(), opt(scan.base_unique), "true".into()])
        .map_err(csv_err)?;
    for r in &scan.rows {
        w.write_record([
            r.level.to_string(),
            r.value.to_string(),
            opt(r.unique),
            r.equal_to_base.to_string(),
        ])
        .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Solver(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("utf-8"))
}
