// beta_n = C_n / 2^{n-1}, the mean absolute Rademacher sum.

use projlab::families::{beta_bruteforce, beta_closed, c_n, c_n_telescoped};
use projlab::shell::emit_beta_table;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for n in (2..=14).step_by(2) {
        assert_eq!(beta_closed(n)?, beta_bruteforce(n)?);
    }
    for n in (2..=40).step_by(2) {
        assert_eq!(c_n(n)?, c_n_telescoped(n)?);
    }
    print!("{}", emit_beta_table(20)?);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("beta_table example");
}
