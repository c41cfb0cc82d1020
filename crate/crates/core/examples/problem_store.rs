// Problem files and the content-addressed result store.

use projlab::lp::Mode;
use projlab::shell::{load_problem, run, Store};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let path = dir.path().join("line.json");
    std::fs::write(
        &path,
        r#"{
  "schema_version": 1,
  "ambient_dim": 3,
  "basis": [["1", "1", "1"]],
  "analyses": ["solve", "probe", "ladder"],
  "ladder_levels": [1, 2]
}"#,
    )?;
    let problem = load_problem(&path)?;
    let store = Store::open(dir.path().join("store"))?;
    let first = run(&problem, Mode::Exact, Some(&store))?;
    let second = run(&problem, Mode::Exact, Some(&store))?;
    println!("hash {}", first.record.problem_hash);
    println!("second run from store: {}, identical bytes: {}", second.from_store, first.json == second.json);
    println!("{}", first.json.lines().take(12).collect::<Vec<_>>().join("\n"));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("problem_store example");
}
