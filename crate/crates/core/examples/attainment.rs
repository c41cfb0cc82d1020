// Norm attainment of functionals that define hyperplanes.

use projlab::continuum::{atomic_attainment_check, esssup_attainment_check, AtomicMeasure, PiecewiseLinear};
use projlab::Rational;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mu = AtomicMeasure::hyperplane_example(8);
    let (tv, exact) = mu.total_variation();
    let check = atomic_attainment_check(&mu)?;
    println!("sum 2^-m-1 delta_1/m - delta_0/2: |mu| = {tv} (exact: {exact}) -> {:?}: {}", check.verdict, check.reason);

    let finite = AtomicMeasure {
        atoms: vec![(Rational::frac(1, 3), Rational::frac(1, 2)), (Rational::one(), Rational::frac(1, 4))],
        tail: None,
    };
    println!("finite positive atoms -> {:?}", atomic_attainment_check(&finite)?.verdict);

    let t = PiecewiseLinear::identity();
    let check = esssup_attainment_check(&t);
    println!("f(t) = t on L1 -> {:?}: {}", check.verdict, check.reason);
    let tent = PiecewiseLinear::new(
        ["0", "1/4", "1/2", "1"].iter().map(|s| s.parse().unwrap()).collect(),
        ["0", "1", "1", "0"].iter().map(|s| s.parse().unwrap()).collect(),
    )?;
    println!("plateau on [1/4, 1/2] -> {:?}", esssup_attainment_check(&tent).verdict);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("attainment example");
}
