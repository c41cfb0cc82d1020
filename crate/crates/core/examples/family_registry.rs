// The family registry: target formulas are trusted only after LP
// validation of a basis.

use projlab::families::{builtin_registry, validate_family_entry, ValidationOptions};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let opts = ValidationOptions::default();
    for entry in builtin_registry() {
        let report = validate_family_entry(&entry, &entry.grid, &opts);
        println!(
            "{:<24} {:?}: accepted = {}  confirms formula = {}",
            entry.name, entry.provenance, report.accepted, report.confirms_formula
        );
        for p in &report.points {
            let params: Vec<String> = p.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            println!(
                "    [{}] target {} lp {} -> {:?}{}",
                params.join(", "),
                p.target.as_ref().map_or("-".into(), ToString::to_string),
                p.lp_value.as_ref().map_or("-".into(), ToString::to_string),
                p.status,
                p.error.as_ref().map_or(String::new(), |e| format!(" ({e})"))
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("family_registry example");
}
