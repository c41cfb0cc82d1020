// Minimax LP: minimize the largest group sum of |affine forms| subject to
// linear equalities, in exact arithmetic, then probe the optimal face.

use projlab::lp::{probe_optimal_face, solve_minimax, AffineForm, Equality, MinimaxProblem};
use projlab::Rational;

fn q(s: &str) -> Rational {
    s.parse().unwrap()
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    // min max(|x| + |y|, |x - 1|) subject to x + y = 1
    let p = MinimaxProblem {
        variables: 2,
        equalities: vec![Equality { coeffs: vec![q("1"), q("1")], rhs: q("1") }],
        abs_groups: vec![
            vec![
                AffineForm::new(vec![q("1"), q("0")], q("0")),
                AffineForm::new(vec![q("0"), q("1")], q("0")),
            ],
            vec![AffineForm::new(vec![q("1"), q("0")], q("-1"))],
        ],
    };
    let sol = solve_minimax(&p)?;
    println!("objective      {}", sol.objective);
    println!("assignment     {:?}", sol.assignment.iter().map(ToString::to_string).collect::<Vec<_>>());
    println!("group weights  {:?}", sol.group_weights.iter().map(ToString::to_string).collect::<Vec<_>>());
    println!("dual objective {} (verified: {})", sol.dual_objective, sol.certificate_verified);
    assert_eq!(sol.objective, q("1"));
    assert!(sol.strong_duality_holds());

    let face = probe_optimal_face(&p, &sol, &[0, 1])?;
    for r in &face.variable_ranges {
        println!("x{} in [{}, {}]", r.variable, r.min, r.max);
    }
    println!("unique optimum: {}", face.is_point);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("exact_lp example");
}
