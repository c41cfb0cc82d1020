// Family parameters with a prescribed projection constant Lambda >= 2.

use projlab::shell::{find_target, Codim, Recipe};
use projlab::Rational;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let requests = [("2", Codim::Auto), ("11/5", Codim::Fixed(2)), ("12/5", Codim::Auto), ("5/2", Codim::Fixed(4)), ("4", Codim::Auto)];
    for (lambda, codim) in requests {
        let l: Rational = lambda.parse()?;
        let t = find_target(&l, codim)?;
        match &t.recipe {
            Recipe::Hyperplane { ladder, .. } => {
                println!("Lambda = {lambda}: hyperplane, lambda(Y) = {}, {:?}", ladder.y_value, ladder.attainment)
            }
            Recipe::Codim2 { r, inversion, a, b, .. } => println!(
                "Lambda = {lambda}: codim 2, r = {r}, t = {:.12}, (a, b) = ({}, {})",
                inversion.chosen.approx(),
                a.as_ref().map_or("-".into(), ToString::to_string),
                b.as_ref().map_or("-".into(), ToString::to_string)
            ),
            Recipe::Even { inversion, residual, beta_n, .. } => println!(
                "Lambda = {lambda}: codim {}, beta_n = {beta_n}, a = {:.12}, residual = {residual:.1e}",
                t.codim,
                inversion.a.to_f64()
            ),
        }
    }
    match find_target(&"26/10".parse()?, Codim::Fixed(4)) {
        Err(e) => println!("Lambda = 26/10 in codim 4: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("find_target example");
}
