// D_m keeps the projection constant; pushforwards keep projection norms.

use projlab::duplication::{duplicate_subspace, invariance_scan, pushforward_projection};
use projlab::{projection_norm, solve_min_projection, SubspaceL1};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let v = SubspaceL1::from_i64_vectors(&[&[2, -1, 0, 1], &[1, 1, 1, -3]])?;
    let scan = invariance_scan(&v, &[1, 2, 3], true)?;
    println!("lambda(V) = {} (unique: {:?})", scan.base_value, scan.base_unique);
    for row in &scan.rows {
        println!(
            "  m = {}  lambda(D_m V) = {}  unique = {:?}  equal = {}",
            row.level, row.value, row.unique, row.equal_to_base
        );
    }
    assert!(scan.all_equal);

    let r = solve_min_projection(&v, false)?;
    for m in [2, 3] {
        let pf = pushforward_projection(&r.optimal, m)?;
        assert_eq!(pf.subspace(), &duplicate_subspace(&v, m)?);
        println!("  ||pushforward at m = {m}|| = {}", projection_norm(&pf));
        assert_eq!(projection_norm(&pf), r.value);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("duplication_scan example");
}
