// Continuous codings from step codings: ramps of width delta, then an
// exact Gram correction. Their norms approach lambda(V) from above.

use projlab::continuum::synthesize;
use projlab::families::dihedral_orbit;
use projlab::{solve_min_projection, Rational, SubspaceL1};

fn q(s: &str) -> Rational {
    s.parse().unwrap()
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cases = [
        ("span{(1,1)}", SubspaceL1::all_ones(2)?, vec!["1/16", "1/64", "1/256"]),
        ("span{e1,e2} in l1^3", SubspaceL1::coordinate(2, 3)?, vec!["1/16", "1/64", "1/256"]),
        // Cells have width 1/8, so ramps must stay below 1/16.
        ("V_{2,1}", dihedral_orbit(&q("2"), &q("1"))?, vec!["1/32", "1/64", "1/256"]),
    ];
    for (name, v, deltas) in cases {
        let r = solve_min_projection(&v, false)?;
        let deltas: Vec<Rational> = deltas.into_iter().map(q).collect();
        let rep = synthesize(&r, &deltas)?;
        println!("{name}: lambda = {}", rep.lambda);
        for row in &rep.rows {
            println!(
                "  delta = {:<6} q_norm - lambda = {:.6}  continuous = {}  biorthogonal = {}",
                row.delta.to_string(),
                row.gap_float,
                row.continuous,
                row.biorthogonal
            );
            assert!(row.lower_bound_holds);
        }
        assert!(rep.monotone);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("smoothing_sandwich example");
}
