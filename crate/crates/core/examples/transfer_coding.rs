// Piecewise-constant copies in L1[0,1]: step codings read off minimal
// projections have exactly the LP norm, and no constant coding can be
// biorthogonal in dimension >= 2.

use projlab::continuum::{
    extract_coding, gram_matrix, piecewise_copy, q_norm, refined_min_projection,
    wstar_obstruction_certificate,
};
use projlab::{solve_min_projection, Matrix, Rational, SubspaceL1};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let v = SubspaceL1::from_i64_vectors(&[&[1, 0, 1], &[0, 1, 1]])?;
    let base = solve_min_projection(&v, true)?;
    for m in [1, 2, 3] {
        let r = refined_min_projection(&base, m, true)?;
        let basis = piecewise_copy(&v, m)?;
        let c = extract_coding(&r.result, &basis.partition)?;
        let qn = q_norm(&c, &basis)?;
        println!(
            "m = {m}: cells = {:>2}  lambda = {}  q_norm = {}  biorthogonal = {}  consistent = {}",
            basis.partition.cells(),
            r.result.value,
            qn,
            gram_matrix(&c, &basis)? == Matrix::identity(2),
            r.consistent
        );
        assert_eq!(qn, r.result.value);
    }

    let x = [Rational::from(3), Rational::from(-2)];
    let copy = piecewise_copy(&v, 2)?;
    let member = v.member(&x)?;
    println!(
        "total variation of 3 y1 - 2 y2: {} (l1 norm of coefficients: {})",
        copy.total_variation(&x)?,
        projlab::exact::l1_norm(&member)
    );

    let cert = wstar_obstruction_certificate(&v)?;
    println!("integrals w = {:?}", cert.integrals.iter().map(ToString::to_string).collect::<Vec<_>>());
    for s in &cert.samples {
        println!("  c = {:?}  rank(c w^T) = {}", s.coding.iter().map(ToString::to_string).collect::<Vec<_>>(), s.rank);
    }
    println!("verdict: {:?}", cert.verdict);

    let line = wstar_obstruction_certificate(&SubspaceL1::all_ones(4)?)?;
    println!("all-ones line: {:?}, constant coding c = {}", line.verdict, line.witness.unwrap());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("transfer_coding example");
}
