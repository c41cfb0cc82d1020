// lambda(Y, C[0,1]) = 1 + lambda(W, M[0,1]) for Y the annihilator of W,
// with non-attainment certified by the rank obstruction and unique,
// consistent optima across refinement levels.

use projlab::continuum::{duality_ladder, ladder_for_subspace, LadderEvidence, DEFAULT_LADDER_LEVELS};
use projlab::families::dihedral_orbit;
use projlab::{Rational, SubspaceL1};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let line = ladder_for_subspace(&SubspaceL1::all_ones(2)?, &DEFAULT_LADDER_LEVELS, None)?;
    println!(
        "codim 1: lambda(W) = {}  lambda(Y) = {}  bounds ok = {}  attainment = {:?}",
        line.w_value, line.y_value, line.bounds_ok, line.attainment
    );

    let v = dihedral_orbit(&Rational::from(2), &Rational::from(1))?;
    let report = ladder_for_subspace(&v, &DEFAULT_LADDER_LEVELS, None)?;
    println!(
        "V_(2,1): lambda(W) = {}  lambda(Y) = {}  bounds ok = {}  attainment = {:?}",
        report.w_value, report.y_value, report.bounds_ok, report.attainment
    );
    for l in &report.certificates.levels {
        println!("  m = {}  value = {}  unique = {:?}  consistent = {}", l.level, l.value, l.unique, l.consistent);
    }

    let impossible = duality_ladder(&"3/2".parse()?, 2, LadderEvidence::default(), &[]);
    println!("lambda(W) = 3/2 in codim 2: bounds ok = {}", impossible.bounds_ok);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("duality_ladder example");
}
