use serde::{Deserialize, Serialize};

use crate::continuum::{
    atomic_attainment_check, duality_ladder, AtomicMeasure, AttainmentCheck, LadderEvidence,
    LadderReport,
};
use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::families::{
    beta_central_binomial, combinatorics_row, in_codim2_range, invert_rho2, invert_rho_even,
    rho2, rho_even, CombinatoricsRow, Rho2Inversion, RhoEvenInversion, RootValue,
};

pub const BETA_TABLE_MAX_N: u64 = 40;
/// Rows up to this `n` are checked against sign enumeration.
pub const BETA_TABLE_ENUMERATE: u64 = 14;

pub const BETA_TABLE_HEADER: [&str; 6] =
    ["n", "C_n", "beta_n", "beta_n_float", "stirling_ratio", "enumeration_check"];

/// Even `n` from 2 to `max_n`.
pub fn beta_table(max_n: u64) -> Result<Vec<CombinatoricsRow>> {
    if max_n > BETA_TABLE_MAX_N {
        return Err(Error::Domain(format!("max_n = {max_n} exceeds {BETA_TABLE_MAX_N}")));
    }
    (2..=max_n)
        .step_by(2)
        .map(|n| combinatorics_row(n, BETA_TABLE_ENUMERATE))
        .collect()
}

/// CSV with header [`BETA_TABLE_HEADER`]; the last column is `ok` when
/// enumeration agreed and `-` when it was not run.
pub fn emit_beta_table(max_n: u64) -> Result<String> {
    let rows = beta_table(max_n)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Solver(format!("csv: {e}"));
    w.write_record(BETA_TABLE_HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.c_n,
            r.beta_n.to_string(),
            r.beta_float.value().to_string(),
            r.stirling_ratio.value().to_string(),
            if r.beta_bruteforce.is_some() { "ok" } else { "-" }.to_string(),
        ])
        .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Solver(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("utf-8"))
}

pub const REGISTRY_CAVEAT: &str = "values come from asserted formulas; realizing bases are registry-dependent and only LP-validated entries may be reported as confirmed";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Codim {
    Auto,
    Fixed(usize),
}

impl std::str::FromStr for Codim {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(Codim::Auto);
        }
        s.parse()
            .map(Codim::Fixed)
            .map_err(|_| Error::Parse(format!("codim must be a positive integer or \"auto\", got {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "recipe")]
pub enum Recipe {
    /// Kernel of a functional given by an atomic measure.
    Hyperplane {
        measure: AtomicMeasure,
        attainment: AttainmentCheck,
        ladder: LadderReport,
    },
    /// `lambda(V_{a,b}) = r` with ratio `t = b/a`.
    Codim2 {
        r: Rational,
        inversion: Rho2Inversion,
        /// Integer parameters when the chosen ratio is rational.
        a: Option<Rational>,
        b: Option<Rational>,
        /// `1 + rho2(a, b) == Lambda` holds exactly.
        exact_check: Option<bool>,
    },
    /// `lambda = rho_n(a)` for the even family.
    Even {
        r: Rational,
        beta_n: Rational,
        inversion: RhoEvenInversion,
        /// `|1 + rho_n(a) - Lambda|` in double precision.
        residual: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetReport {
    pub lambda: Rational,
    pub codim: usize,
    #[serde(flatten)]
    pub recipe: Recipe,
    pub caveat: String,
}

const AUTO_MAX_N: u64 = 20_000;

fn hyperplane(lambda: &Rational) -> TargetReport {
    let measure = AtomicMeasure::hyperplane_example(8);
    let attainment = atomic_attainment_check(&measure).expect("well-formed measure");
    let evidence = LadderEvidence {
        hyperplane: Some(attainment.clone()),
        ..Default::default()
    };
    TargetReport {
        lambda: lambda.clone(),
        codim: 1,
        recipe: Recipe::Hyperplane {
            ladder: duality_ladder(&Rational::one(), 1, evidence, &[]),
            measure,
            attainment,
        },
        caveat: REGISTRY_CAVEAT.into(),
    }
}

fn codim2(lambda: &Rational, r: Rational) -> Result<TargetReport> {
    let inversion = invert_rho2(&r)?;
    let (a, b, exact_check) = match &inversion.chosen {
        RootValue::Exact(t) => {
            // t = b/a in lowest terms.
            let a = Rational::from_int(t.denom().clone());
            let b = Rational::from_int(t.numer().clone());
            let check = Rational::one() + rho2(&a, &b)? == *lambda;
            (Some(a), Some(b), Some(check))
        }
        RootValue::Enclosure { .. } => (None, None, None),
    };
    Ok(TargetReport {
        lambda: lambda.clone(),
        codim: 2,
        recipe: Recipe::Codim2 {
            r,
            inversion,
            a,
            b,
            exact_check,
        },
        caveat: REGISTRY_CAVEAT.into(),
    })
}

fn even(lambda: &Rational, n: u64, r: Rational) -> Result<TargetReport> {
    let inversion = invert_rho_even(n, &r)?;
    let residual = (Rational::one() + rho_even(n, &inversion.a)? - lambda).to_f64().abs();
    Ok(TargetReport {
        lambda: lambda.clone(),
        codim: n as usize,
        recipe: Recipe::Even {
            beta_n: beta_central_binomial(n)?,
            r,
            inversion,
            residual,
        },
        caveat: REGISTRY_CAVEAT.into(),
    })
}

/// Parameters of a family whose projection constant is `Lambda`.
pub fn find_target(lambda: &Rational, codim: Codim) -> Result<TargetReport> {
    let two = Rational::from(2);
    if lambda < &two {
        return Err(Error::Domain(format!("Lambda = {lambda} < 2 is not attainable")));
    }
    let r = lambda - Rational::one();
    match codim {
        Codim::Auto => {
            if lambda == &two {
                return Ok(hyperplane(lambda));
            }
            if in_codim2_range(&r) {
                return codim2(lambda, r);
            }
            let mut n = 4;
            while beta_central_binomial(n)? < r {
                n += 2;
                if n > AUTO_MAX_N {
                    return Err(Error::Domain(format!(
                        "no even n <= {AUTO_MAX_N} has beta_n >= {r}"
                    )));
                }
            }
            even(lambda, n, r)
        }
        Codim::Fixed(1) => {
            if lambda != &two {
                return Err(Error::Domain(format!(
                    "codimension 1 gives exactly 2, not {lambda}"
                )));
            }
            Ok(hyperplane(lambda))
        }
        Codim::Fixed(2) => {
            if !in_codim2_range(&r) {
                let bound = (&two * &r - Rational::one()).square();
                return Err(Error::Domain(format!(
                    "codimension 2 needs 1 < Lambda - 1 and (2(Lambda-1) - 1)^2 <= 2; got {bound}"
                )));
            }
            codim2(lambda, r)
        }
        Codim::Fixed(n) if n >= 4 && n % 2 == 0 => {
            let beta = beta_central_binomial(n as u64)?;
            if r > beta {
                return Err(Error::Domain(format!(
                    "codimension {n} reaches at most 1 + beta_{n} = {}, below {lambda}",
                    Rational::one() + &beta
                )));
            }
            if lambda == &two {
                return Err(Error::Domain(format!(
                    "codimension {n} family stays above 2; use codimension 1"
                )));
            }
            even(lambda, n as u64, r)
        }
        Codim::Fixed(n) => Err(Error::Domain(format!(
            "no family is registered for codimension {n}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::continuum::Attainment;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn beta_table_rows() {
        let csv = emit_beta_table(6).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "n,C_n,beta_n,beta_n_float,stirling_ratio,enumeration_check");
        assert!(lines[1].starts_with("2,2,1,1,"), "{}", lines[1]);
        assert!(lines[2].starts_with("4,12,3/2,1.5,"), "{}", lines[2]);
        assert!(lines[2].ends_with(",ok"));
        assert!(emit_beta_table(42).is_err());
        let full = emit_beta_table(40).unwrap();
        assert!(full.lines().last().unwrap().ends_with(",-"));
    }

    #[test]
    fn target_examples() {
        let h = find_target(&q("2"), Codim::Auto).unwrap();
        let Recipe::Hyperplane { ladder, .. } = &h.recipe else { panic!() };
        assert_eq!(ladder.y_value, q("2"));
        assert_eq!(ladder.attainment, Attainment::NotAttainedHyperplane);

        let t = find_target(&q("11/5"), Codim::Fixed(2)).unwrap();
        let Recipe::Codim2 { r, inversion, a, b, exact_check } = &t.recipe else { panic!() };
        assert_eq!(r, &q("6/5"));
        assert_eq!(inversion.chosen, RootValue::Exact(q("1/3")));
        assert_eq!((a.clone(), b.clone()), (Some(q("3")), Some(q("1"))));
        assert_eq!(*exact_check, Some(true));

        let e = find_target(&q("5/2"), Codim::Fixed(4)).unwrap();
        let Recipe::Even { inversion, .. } = &e.recipe else { panic!() };
        assert_eq!(inversion.a, q("0"));
        assert!(find_target(&q("26/10"), Codim::Fixed(4)).is_err());
        assert_eq!(find_target(&q("5/2"), Codim::Auto).unwrap().codim, 4);
        assert!(find_target(&q("19/10"), Codim::Auto).is_err());
        assert!(find_target(&q("3"), Codim::Fixed(2)).is_err());
        assert!(find_target(&q("3"), Codim::Fixed(3)).is_err());
    }

    #[test]
    fn auto_reaches_large_targets() {
        let t = find_target(&q("4"), Codim::Auto).unwrap();
        let Recipe::Even { residual, beta_n, .. } = &t.recipe else { panic!() };
        assert!(beta_n >= &q("3"));
        assert!(beta_central_binomial(t.codim as u64 - 2).unwrap() < q("3"));
        assert!(*residual <= 1e-12);
    }
}
