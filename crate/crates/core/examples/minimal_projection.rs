// Relative projection constants of small subspaces of l1^N.

use projlab::{kadec_snobar_check, projection_norm, solve_min_projection, SubspaceL1};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cases = [
        ("span{e1} in l1^2", SubspaceL1::coordinate(1, 2)?),
        ("span{(1,1)} in l1^2", SubspaceL1::all_ones(2)?),
        ("span{(1,1,1,1)} in l1^4", SubspaceL1::all_ones(4)?),
        (
            "span{(1,2,0,-1),(0,1,3,1)} in l1^4",
            SubspaceL1::from_i64_vectors(&[&[1, 2, 0, -1], &[0, 1, 3, 1]])?,
        ),
        (
            "span{(1,0,1),(0,1,1)} in l1^3",
            SubspaceL1::from_i64_vectors(&[&[1, 0, 1], &[0, 1, 1]])?,
        ),
    ];
    for (name, v) in cases {
        let r = solve_min_projection(&v, true)?;
        assert_eq!(projection_norm(&r.optimal), r.value);
        assert!(kadec_snobar_check(&r));
        println!(
            "{name:<38} lambda = {:<6} unique = {:?}",
            r.value.to_string(),
            r.unique.unwrap()
        );
        let u = r.optimal.functionals();
        for k in 0..u.rows() {
            let row: Vec<String> = u.row(k).iter().map(ToString::to_string).collect();
            println!("    u{} = [{}]", k + 1, row.join(", "));
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("minimal_projection example");
}
