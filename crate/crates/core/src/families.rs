//! Closed-form projection constants, Rademacher combinatorics, parameter
//! inversion, and a registry of candidate family constructions.
//!
//! Formulas here are exact: `rho2(a, b) = (a^2 + ab) / (a^2 + b^2)` for the
//! two-dimensional regular family and
//! `rho_n(a) = (2^{n-1} / (C_n + n a) + a / (2^{n-1} + a))^{-1}` for the even
//! family, with `C_n = sum_{l < n/2} C(n, l) (n - 2l)`. The bases realizing
//! these constants are not derivable from the formulas; the registry keeps
//! target formulas separate from basis constructions and only trusts a
//! construction after LP validation.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::duplication::{invariance_scan_from, InvarianceScan};
use crate::error::{Error, Result};
use crate::exact::{binom, FloatMirror, Matrix, Rational};
use crate::minproj::{solve_min_projection, SubspaceL1};

fn require_even(n: u64, min: u64) -> Result<()> {
    if !n.is_multiple_of(2) || n < min {
        return Err(Error::Domain(format!("n must be even and >= {min}, got {n}")));
    }
    Ok(())
}

/// `C_n` by direct summation.
pub fn c_n(n: u64) -> Result<BigUint> {
    require_even(n, 2)?;
    Ok((0..n / 2)
        .map(|l| binom(n, l) * BigUint::from(n - 2 * l))
        .sum())
}

/// `C_n = n C(n-1, n/2-1)`.
pub fn c_n_telescoped(n: u64) -> Result<BigUint> {
    require_even(n, 2)?;
    Ok(BigUint::from(n) * binom(n - 1, n / 2 - 1))
}

fn pow2(k: u64) -> BigInt {
    BigInt::one() << k
}

/// `beta_n = C_n / 2^{n-1}`.
pub fn beta_closed(n: u64) -> Result<Rational> {
    let c = c_n(n)?;
    Rational::new(BigInt::from(c), pow2(n - 1))
}

/// `beta_n = n 2^{-n} C(n, n/2)`.
pub fn beta_central_binomial(n: u64) -> Result<Rational> {
    require_even(n, 2)?;
    Rational::new(BigInt::from(binom(n, n / 2) * BigUint::from(n)), pow2(n))
}

pub const BRUTEFORCE_MAX_N: u64 = 24;

/// `2^{-n} sum_{eps in {-1,1}^n} |eps_1 + ... + eps_n|` by enumeration.
pub fn beta_bruteforce(n: u64) -> Result<Rational> {
    if n == 0 {
        return Err(Error::Domain("n must be >= 1".into()));
    }
    if n > BRUTEFORCE_MAX_N {
        return Err(Error::Domain(format!(
            "n = {n} exceeds the enumeration budget of {BRUTEFORCE_MAX_N}"
        )));
    }
    // Bit set = coordinate equal to -1.
    let total: u64 = (0u64..1 << n)
        .into_par_iter()
        .map(|mask| (n as i64 - 2 * mask.count_ones() as i64).unsigned_abs())
        .sum();
    Rational::new(BigInt::from(total), pow2(n))
}

/// `beta_n / sqrt(2n / pi)` in double precision.
pub fn stirling_ratio(beta: &Rational, n: u64) -> FloatMirror {
    FloatMirror(beta.to_f64() / (2.0 * n as f64 / std::f64::consts::PI).sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CombinatoricsRow {
    pub n: u64,
    pub c_n: String,
    pub beta_n: Rational,
    /// `None` above the enumeration budget.
    pub beta_bruteforce: Option<Rational>,
    pub beta_float: FloatMirror,
    pub stirling_ratio: FloatMirror,
}

/// Enumeration cross-check is run for `n <= enumerate_up_to`.
pub fn combinatorics_row(n: u64, enumerate_up_to: u64) -> Result<CombinatoricsRow> {
    let c = c_n(n)?;
    if c != c_n_telescoped(n)? {
        return Err(Error::Solver(format!("C_{n}: summation and telescoped forms differ")));
    }
    let beta = beta_closed(n)?;
    let brute = if n <= enumerate_up_to.min(BRUTEFORCE_MAX_N) {
        let b = beta_bruteforce(n)?;
        if b != beta {
            return Err(Error::Solver(format!("beta_{n}: closed form {beta} != enumeration {b}")));
        }
        Some(b)
    } else {
        None
    };
    Ok(CombinatoricsRow {
        n,
        c_n: c.to_string(),
        beta_float: beta.mirror(),
        stirling_ratio: stirling_ratio(&beta, n),
        beta_n: beta,
        beta_bruteforce: brute,
    })
}

/// `(a^2 + ab) / (a^2 + b^2)` for `a > b > 0`.
pub fn rho2(a: &Rational, b: &Rational) -> Result<Rational> {
    if !b.is_positive() || a <= b {
        return Err(Error::Domain(format!("rho2 needs a > b > 0, got a = {a}, b = {b}")));
    }
    Ok((a.square() + a * b) / (a.square() + b.square()))
}

/// `(1 + t) / (1 + t^2)`.
pub fn rho2_ratio(t: &Rational) -> Rational {
    (Rational::one() + t) / (Rational::one() + t.square())
}

fn rho_even_unchecked(n: u64, c: &Rational, a: &Rational) -> Rational {
    let k = Rational::from_int(pow2(n - 1));
    let first = &k / (c + Rational::from(n as i64) * a);
    let second = a / (&k + a);
    (first + second).recip().expect("positive sum")
}

pub fn rho_even(n: u64, a: &Rational) -> Result<Rational> {
    require_even(n, 4)?;
    if a.is_negative() {
        return Err(Error::Domain(format!("rho_n needs a >= 0, got {a}")));
    }
    let c = Rational::from_int(BigInt::from(c_n(n)?));
    Ok(rho_even_unchecked(n, &c, a))
}

/// Exact value, or a rational enclosure of an irrational one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootValue {
    Exact(Rational),
    Enclosure { lo: Rational, hi: Rational, approx: f64 },
}

impl RootValue {
    pub fn approx(&self) -> f64 {
        match self {
            RootValue::Exact(x) => x.to_f64(),
            RootValue::Enclosure { approx, .. } => *approx,
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            RootValue::Exact(x) => Some(x),
            RootValue::Enclosure { .. } => None,
        }
    }
}

/// `(2r - 1)^2 <= 2`, i.e. `r <= (1 + sqrt 2) / 2`, together with `r > 1`.
pub fn in_codim2_range(r: &Rational) -> bool {
    let two = Rational::from(2);
    r > &Rational::one() && (&two * r - Rational::one()).square() <= two
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rho2Inversion {
    pub r: Rational,
    /// `1 - 4 r (r - 1)`; positive for every rational `r` in range.
    pub discriminant: Rational,
    /// Both ratios `t` with `rho(t) = r`, ascending.
    pub roots: Vec<RootValue>,
    pub chosen: RootValue,
}

const ENCLOSURE_BITS: u64 = 64;

/// Ratios `t = b/a` in `(0, 1)` with `(1 + t) / (1 + t^2) = r`, i.e. the
/// roots of `r t^2 - t + (r - 1) = 0`. The smaller root is chosen.
pub fn invert_rho2(r: &Rational) -> Result<Rho2Inversion> {
    if !in_codim2_range(r) {
        return Err(Error::Domain(format!(
            "r = {r} outside (1, (1+sqrt2)/2]: need r > 1 and (2r-1)^2 <= 2"
        )));
    }
    let one = Rational::one();
    let disc = &one - Rational::from(4) * r * (r - &one);
    let two_r = Rational::from(2) * r;
    let roots = match disc.sqrt_exact() {
        Some(s) => {
            let lo = (&one - &s) / &two_r;
            let hi = (&one + &s) / &two_r;
            if lo == hi {
                vec![RootValue::Exact(lo)]
            } else {
                vec![RootValue::Exact(lo), RootValue::Exact(hi)]
            }
        }
        None => {
            let (slo, shi) = sqrt_enclosure(&disc, ENCLOSURE_BITS);
            let approx_s = disc.to_f64().sqrt();
            vec![
                RootValue::Enclosure {
                    lo: (&one - &shi) / &two_r,
                    hi: (&one - &slo) / &two_r,
                    approx: (1.0 - approx_s) / two_r.to_f64(),
                },
                RootValue::Enclosure {
                    lo: (&one + &slo) / &two_r,
                    hi: (&one + &shi) / &two_r,
                    approx: (1.0 + approx_s) / two_r.to_f64(),
                },
            ]
        }
    };
    Ok(Rho2Inversion {
        r: r.clone(),
        discriminant: disc,
        chosen: roots[0].clone(),
        roots,
    })
}

/// `lo <= sqrt(x) <= hi` with `hi - lo <= 2^-bits / denom(x)`.
fn sqrt_enclosure(x: &Rational, bits: u64) -> (Rational, Rational) {
    // sqrt(p/q) = sqrt(p q) / q
    let pq = (x.numer() * x.denom()).to_biguint().expect("nonnegative");
    let scaled = pq << (2 * bits);
    let s = scaled.sqrt();
    let denom = x.denom() * pow2(bits);
    let lo = Rational::new(BigInt::from(s.clone()), denom.clone()).expect("nonzero");
    let hi = if &s * &s == scaled {
        lo.clone()
    } else {
        Rational::new(BigInt::from(s + 1u32), denom).expect("nonzero")
    };
    (lo, hi)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RhoEvenInversion {
    pub n: u64,
    pub r: Rational,
    pub a: Rational,
    /// `rho_n(a) == r` holds exactly.
    pub exact: bool,
    /// Every sign-change bracket `[lo, hi]` of `rho_n(a) - r` found by the
    /// scan; the returned root lies in the first one.
    pub brackets: Vec<(Rational, Rational)>,
    pub residual: f64,
}

const BISECTION_TOL: f64 = 1e-13;
const BISECTION_MAX_STEPS: usize = 400;

/// Scan grid `{0, 2^-10, ..., 2^20}`.
fn scan_grid() -> Vec<Rational> {
    std::iter::once(Rational::zero())
        .chain((-10..=20).map(|k| Rational::from(2).pow(k)))
        .collect()
}

/// Some `a >= 0` with `rho_n(a) = r` for `1 < r <= beta_n`.
///
/// The sign of `rho_n(a) - r` is evaluated exactly on a geometric grid; if
/// no sign change shows up the grid is extended by doubling (`rho_n -> 1`
/// guarantees one eventually). The smallest root is refined by exact
/// dyadic bisection until its float residual is below `1e-13`.
pub fn invert_rho_even(n: u64, r: &Rational) -> Result<RhoEvenInversion> {
    require_even(n, 4)?;
    let beta = beta_closed(n)?;
    if r <= &Rational::one() || r > &beta {
        return Err(Error::Domain(format!("r = {r} outside (1, beta_{n}] = (1, {beta}]")));
    }
    let c = Rational::from_int(BigInt::from(c_n(n)?));
    let g = |a: &Rational| rho_even_unchecked(n, &c, a) - r;
    if r == &beta {
        return Ok(RhoEvenInversion {
            n,
            r: r.clone(),
            a: Rational::zero(),
            exact: true,
            brackets: vec![(Rational::zero(), Rational::zero())],
            residual: 0.0,
        });
    }
    let mut grid = scan_grid();
    let mut brackets = Vec::new();
    let mut values: Vec<Rational> = grid.iter().map(&g).collect();
    loop {
        brackets.clear();
        for i in 0..grid.len() {
            if values[i].is_zero() {
                brackets.push((grid[i].clone(), grid[i].clone()));
            } else if i + 1 < grid.len() && values[i].signum() * values[i + 1].signum() < 0 {
                brackets.push((grid[i].clone(), grid[i + 1].clone()));
            }
        }
        if !brackets.is_empty() {
            break;
        }
        let last = grid.last().expect("nonempty grid").clone();
        if last > Rational::from(2).pow(200) {
            return Err(Error::Solver(format!("no sign change of rho_{n} - {r} found")));
        }
        let next = last * Rational::from(2);
        values.push(g(&next));
        grid.push(next);
    }
    let (mut lo, mut hi) = brackets[0].clone();
    let mut glo = g(&lo);
    let mut a = lo.clone();
    let mut exact = glo.is_zero();
    if !exact {
        for _ in 0..BISECTION_MAX_STEPS {
            let mid = (&lo + &hi) / Rational::from(2);
            let gm = g(&mid);
            a = mid.clone();
            if gm.is_zero() {
                exact = true;
                break;
            }
            if gm.to_f64().abs() <= BISECTION_TOL {
                break;
            }
            if gm.signum() == glo.signum() {
                lo = mid;
                glo = gm;
            } else {
                hi = mid;
            }
        }
    }
    let residual = g(&a).to_f64().abs();
    Ok(RhoEvenInversion {
        n,
        r: r.clone(),
        a,
        exact,
        brackets,
        residual,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// Test entries whose value is known independently.
    Synthetic,
    /// The target formula is asserted; no basis is available.
    AssertedFormula,
    /// A reconstructed basis that must pass LP validation.
    ConjecturalReconstruction,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constructor {
    /// Fixed basis; rows are basis vectors.
    Explicit { ambient_dim: usize, basis: Vec<Vec<Rational>> },
    /// `span{e_1..e_k}` in `l1^N`; parameters `k`, `N`.
    Coordinate,
    /// `span{(1,..,1)}` in `l1^N`; parameter `N`.
    AllOnes,
    /// Orbit of `(a, b)` under the signed permutations of `R^2`, as the
    /// eight rows of an `8 x 2` basis; parameters `a`, `b`.
    DihedralOrbit,
    Unavailable { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetFormula {
    Constant(Rational),
    /// `rho2(a, b)`.
    Rho2,
    /// `rho_n(a)` with parameters `n`, `a`.
    RhoEven,
}

pub type ParamPoint = BTreeMap<String, Rational>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyEntry {
    pub name: String,
    pub parameter_domain: String,
    pub constructor: Constructor,
    pub target: TargetFormula,
    pub provenance: Provenance,
    #[serde(default)]
    pub grid: Vec<ParamPoint>,
}

fn param(p: &ParamPoint, key: &str) -> Result<Rational> {
    p.get(key)
        .cloned()
        .ok_or_else(|| Error::Domain(format!("missing parameter {key:?}")))
}

fn param_usize(p: &ParamPoint, key: &str) -> Result<usize> {
    let v = param(p, key)?;
    if !v.is_integer() || v.is_negative() {
        return Err(Error::Domain(format!("parameter {key} = {v} must be a nonnegative integer")));
    }
    v.numer()
        .try_into()
        .map_err(|_| Error::Domain(format!("parameter {key} = {v} too large")))
}

/// The eight rows `(±a, ±b), (±b, ±a)` in a fixed order.
pub fn dihedral_orbit(a: &Rational, b: &Rational) -> Result<SubspaceL1> {
    let rows = vec![
        vec![a.clone(), b.clone()],
        vec![-a, b.clone()],
        vec![a.clone(), -b],
        vec![-a, -b],
        vec![b.clone(), a.clone()],
        vec![-b, a.clone()],
        vec![b.clone(), -a],
        vec![-b, -a],
    ];
    SubspaceL1::new(Matrix::from_rows(rows)?)
}

impl FamilyEntry {
    pub fn construct(&self, p: &ParamPoint) -> Result<SubspaceL1> {
        match &self.constructor {
            Constructor::Explicit { ambient_dim, basis } => {
                if let Some((i, row)) = basis.iter().enumerate().find(|(_, r)| r.len() != *ambient_dim) {
                    return Err(Error::Dimension(format!(
                        "basis row {i} has length {}, expected {ambient_dim}",
                        row.len()
                    )));
                }
                SubspaceL1::from_vectors(basis)
            }
            Constructor::Coordinate => {
                SubspaceL1::coordinate(param_usize(p, "k")?, param_usize(p, "N")?)
            }
            Constructor::AllOnes => SubspaceL1::all_ones(param_usize(p, "N")?),
            Constructor::DihedralOrbit => {
                let (a, b) = (param(p, "a")?, param(p, "b")?);
                if !b.is_positive() || a <= b {
                    return Err(Error::Domain(format!("need a > b > 0, got a = {a}, b = {b}")));
                }
                dihedral_orbit(&a, &b)
            }
            Constructor::Unavailable { reason } => {
                Err(Error::Domain(format!("no basis constructor: {reason}")))
            }
        }
    }

    pub fn target_value(&self, p: &ParamPoint) -> Result<Rational> {
        match &self.target {
            TargetFormula::Constant(v) => Ok(v.clone()),
            TargetFormula::Rho2 => rho2(&param(p, "a")?, &param(p, "b")?),
            TargetFormula::RhoEven => rho_even(param_usize(p, "n")? as u64, &param(p, "a")?),
        }
    }
}

fn point(pairs: &[(&str, i64)]) -> ParamPoint {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), Rational::from(*v)))
        .collect()
}

/// Built-in entries.
pub fn builtin_registry() -> Vec<FamilyEntry> {
    vec![
        FamilyEntry {
            name: "coordinate".into(),
            parameter_domain: "1 <= k <= N".into(),
            constructor: Constructor::Coordinate,
            target: TargetFormula::Constant(Rational::one()),
            provenance: Provenance::Synthetic,
            grid: vec![
                point(&[("k", 1), ("N", 2)]),
                point(&[("k", 2), ("N", 3)]),
                point(&[("k", 3), ("N", 6)]),
            ],
        },
        FamilyEntry {
            name: "all-ones".into(),
            parameter_domain: "N >= 1".into(),
            constructor: Constructor::AllOnes,
            target: TargetFormula::Constant(Rational::one()),
            provenance: Provenance::Synthetic,
            grid: vec![point(&[("N", 2)]), point(&[("N", 4)]), point(&[("N", 8)])],
        },
        FamilyEntry {
            name: "planted-wrong-diagonal".into(),
            parameter_domain: "none".into(),
            constructor: Constructor::Explicit {
                ambient_dim: 2,
                basis: vec![vec![Rational::one(), Rational::one()]],
            },
            target: TargetFormula::Constant(Rational::from(2)),
            provenance: Provenance::Synthetic,
            grid: vec![ParamPoint::new()],
        },
        FamilyEntry {
            name: "regular-2d".into(),
            parameter_domain: "a > b > 0".into(),
            constructor: Constructor::DihedralOrbit,
            target: TargetFormula::Rho2,
            provenance: Provenance::ConjecturalReconstruction,
            grid: vec![point(&[("a", 2), ("b", 1)]), point(&[("a", 3), ("b", 1)])],
        },
        FamilyEntry {
            name: "regular-even".into(),
            parameter_domain: "n even >= 4, a >= 0".into(),
            constructor: Constructor::Unavailable {
                reason: "basis of the even regular family lives in l1^{2 n! 2^n} and is not reconstructed".into(),
            },
            target: TargetFormula::RhoEven,
            provenance: Provenance::AssertedFormula,
            grid: vec![point(&[("n", 4), ("a", 0)]), point(&[("n", 4), ("a", 1)])],
        },
    ]
}

pub fn find_entry<'a>(registry: &'a [FamilyEntry], name: &str) -> Option<&'a FamilyEntry> {
    registry.iter().find(|e| e.name == name)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointStatus {
    Accepted,
    Rejected,
    ConstructorFailed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    pub params: ParamPoint,
    pub status: PointStatus,
    pub target: Option<Rational>,
    pub lp_value: Option<Rational>,
    pub equal: Option<bool>,
    pub unique: Option<bool>,
    pub duplication: Option<InvarianceScan>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub entry: String,
    pub provenance: Provenance,
    pub points: Vec<PointReport>,
    /// Every point accepted.
    pub accepted: bool,
    /// An accepted conjectural reconstruction; only then may its values be
    /// reported as agreeing with the asserted formula.
    pub confirms_formula: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationOptions {
    pub dup_levels: Vec<usize>,
    pub probe_uniqueness: bool,
    /// Also probe uniqueness on each duplicate.
    pub probe_duplicates: bool,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        ValidationOptions {
            dup_levels: vec![2, 3],
            probe_uniqueness: true,
            probe_duplicates: false,
        }
    }
}

fn validate_point(e: &FamilyEntry, p: &ParamPoint, opts: &ValidationOptions) -> PointReport {
    let mut report = PointReport {
        params: p.clone(),
        status: PointStatus::ConstructorFailed,
        target: None,
        lp_value: None,
        equal: None,
        unique: None,
        duplication: None,
        error: None,
    };
    let v = match e.construct(p) {
        Ok(v) => v,
        Err(err) => {
            report.error = Some(err.to_string());
            return report;
        }
    };
    let mut run = || -> Result<()> {
        let target = e.target_value(p)?;
        report.target = Some(target.clone());
        let r = solve_min_projection(&v, opts.probe_uniqueness)?;
        report.lp_value = Some(r.value.clone());
        report.unique = r.unique;
        let equal = r.value == target;
        report.equal = Some(equal);
        let scan = invariance_scan_from(&v, &r, &opts.dup_levels, opts.probe_duplicates)?;
        report.status = if equal && scan.all_equal {
            PointStatus::Accepted
        } else {
            PointStatus::Rejected
        };
        report.duplication = Some(scan);
        Ok(())
    };
    if let Err(err) = run() {
        report.status = PointStatus::Rejected;
        report.error = Some(err.to_string());
    }
    report
}

/// LP value against the target formula at each point, plus a duplication
/// scan. Failures are recorded per point.
pub fn validate_family_entry(
    e: &FamilyEntry,
    params: &[ParamPoint],
    opts: &ValidationOptions,
) -> ValidationReport {
    let points: Vec<PointReport> = params
        .par_iter()
        .map(|p| validate_point(e, p, opts))
        .collect();
    let accepted = !points.is_empty() && points.iter().all(|p| p.status == PointStatus::Accepted);
    ValidationReport {
        entry: e.name.clone(),
        provenance: e.provenance,
        confirms_formula: accepted && e.provenance == Provenance::ConjecturalReconstruction,
        accepted,
        points,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    /// Independent oracle: count sign vectors by recursion on the walk.
    fn walk_mean_abs(n: u64) -> Rational {
        // distribution of S_n over positions -n..=n
        let mut dist = vec![BigInt::zero(); 2 * n as usize + 1];
        dist[n as usize] = BigInt::one();
        for _ in 0..n {
            let mut next = vec![BigInt::zero(); dist.len()];
            for (i, c) in dist.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                next[i - 1] += c;
                next[i + 1] += c;
            }
            dist = next;
        }
        let total: BigInt = dist
            .iter()
            .enumerate()
            .map(|(i, c)| c * BigInt::from((i as i64 - n as i64).abs()))
            .sum();
        Rational::new(total, pow2(n)).unwrap()
    }

    #[test]
    fn c_n_spot_values() {
        assert_eq!(c_n(2).unwrap(), BigUint::from(2u32));
        assert_eq!(c_n(4).unwrap(), BigUint::from(12u32));
        assert_eq!(c_n(6).unwrap(), BigUint::from(60u32));
        assert!(c_n(5).is_err());
        assert!(c_n(0).is_err());
    }

    #[test]
    fn beta_spot_values() {
        assert_eq!(beta_closed(2).unwrap(), q("1"));
        assert_eq!(beta_closed(4).unwrap(), q("3/2"));
        assert_eq!(beta_closed(6).unwrap(), q("15/8"));
        assert_eq!(beta_bruteforce(1).unwrap(), q("1"));
        assert_eq!(beta_bruteforce(2).unwrap(), q("1"));
        assert_eq!(beta_bruteforce(4).unwrap(), q("3/2"));
        assert!(beta_closed(3).is_err());
        assert!(beta_bruteforce(25).is_err());
    }

    #[test]
    fn enumeration_agrees_with_walk_recursion() {
        for n in 1..=12 {
            assert_eq!(beta_bruteforce(n).unwrap(), walk_mean_abs(n), "n = {n}");
        }
    }

    #[test]
    fn closed_forms_agree() {
        for n in (2..=40).step_by(2) {
            assert_eq!(beta_closed(n).unwrap(), beta_central_binomial(n).unwrap());
        }
    }

    #[test]
    fn rho2_examples() {
        assert_eq!(rho2(&q("2"), &q("1")).unwrap(), q("6/5"));
        assert_eq!(rho2(&q("3"), &q("1")).unwrap(), q("6/5"));
        assert!(rho2(&q("1"), &q("1")).is_err());
        assert!(rho2(&q("2"), &q("0")).is_err());
        assert_eq!(rho2_ratio(&q("1/2")), q("6/5"));
    }

    #[test]
    fn rho_even_examples() {
        assert_eq!(rho_even(4, &q("0")).unwrap(), q("3/2"));
        assert_eq!(rho_even(6, &q("0")).unwrap(), beta_bruteforce(6).unwrap());
        let far = rho_even(4, &q("1000000")).unwrap().to_f64();
        assert!((far - 1.0).abs() < 1e-4, "{far}");
        assert!(rho_even(2, &q("0")).is_err());
        assert!(rho_even(4, &q("-1")).is_err());
    }

    #[test]
    fn invert_rho2_rational_roots() {
        let inv = invert_rho2(&q("6/5")).unwrap();
        assert_eq!(
            inv.roots,
            vec![RootValue::Exact(q("1/3")), RootValue::Exact(q("1/2"))]
        );
        assert_eq!(inv.chosen, RootValue::Exact(q("1/3")));
        for root in &inv.roots {
            assert_eq!(rho2_ratio(root.exact().unwrap()), q("6/5"));
        }
        assert!(invert_rho2(&q("3/2")).is_err());
        assert!(invert_rho2(&q("1")).is_err());
    }

    #[test]
    fn invert_rho2_irrational_roots_are_enclosed() {
        // r = 1.2 + 1/1000: discriminant not a square.
        let r = q("1201/1000");
        let inv = invert_rho2(&r).unwrap();
        assert!(inv.discriminant.is_positive());
        for root in &inv.roots {
            let RootValue::Enclosure { lo, hi, approx } = root else {
                panic!("expected enclosure");
            };
            assert!(lo < hi);
            // rho is increasing on the lower root's side and decreasing on
            // the upper's; in both cases r lies between rho(lo) and rho(hi).
            let (a, b) = (rho2_ratio(lo), rho2_ratio(hi));
            assert!((a <= r && r <= b) || (b <= r && r <= a));
            assert!((rho2_ratio(&Rational::from_f64_dyadic(*approx, 60).unwrap()).to_f64() - r.to_f64()).abs() < 1e-12);
        }
    }

    #[test]
    fn codim2_range_boundary() {
        // (1+sqrt2)/2 = 1.20710678...
        assert!(in_codim2_range(&q("1.2071")));
        assert!(!in_codim2_range(&q("1.2072")));
    }

    #[test]
    fn invert_rho_even_examples() {
        let top = invert_rho_even(4, &q("3/2")).unwrap();
        assert_eq!(top.a, q("0"));
        assert!(top.exact);

        let inv = invert_rho_even(4, &q("5/4")).unwrap();
        // Oracle: rho_4(a) = 5/4 reduces to -a^2 + 19a + 16 = 0, whose
        // nonnegative root is (19 + sqrt(425)) / 2.
        let expected = (19.0 + 425f64.sqrt()) / 2.0;
        assert!((inv.a.to_f64() - expected).abs() < 1e-9, "{}", inv.a.to_f64());
        assert!(inv.residual <= 1e-12);
        assert_eq!(inv.brackets.len(), 1);
        assert!(invert_rho_even(4, &q("2")).is_err());
        assert!(invert_rho_even(4, &q("1")).is_err());
    }

    #[test]
    fn invert_rho_even_near_one_extends_the_grid() {
        let r = q("1") + Rational::new(1, pow2(40)).unwrap();
        let inv = invert_rho_even(4, &r).unwrap();
        assert!(inv.a > Rational::from(2).pow(20));
        assert!(inv.residual <= 1e-12);
    }

    #[test]
    fn registry_point_errors_do_not_abort() {
        let reg = builtin_registry();
        let e = find_entry(&reg, "regular-even").unwrap();
        let report = validate_family_entry(e, &e.grid, &ValidationOptions::default());
        assert!(!report.accepted);
        assert!(report.points.iter().all(|p| p.status == PointStatus::ConstructorFailed));
    }

    #[test]
    fn synthetic_entries_accept_and_reject() {
        let reg = builtin_registry();
        let opts = ValidationOptions {
            probe_uniqueness: false,
            ..Default::default()
        };
        let coord = find_entry(&reg, "coordinate").unwrap();
        let report = validate_family_entry(coord, &coord.grid, &opts);
        assert!(report.accepted);
        assert!(!report.confirms_formula);
        let planted = find_entry(&reg, "planted-wrong-diagonal").unwrap();
        let report = validate_family_entry(planted, &planted.grid, &opts);
        assert!(!report.accepted);
        assert_eq!(report.points[0].lp_value, Some(q("1")));
        assert_eq!(report.points[0].equal, Some(false));
    }

    #[test]
    fn registry_round_trips_through_json() {
        let reg = builtin_registry();
        let s = serde_json::to_string(&reg).unwrap();
        let back: Vec<FamilyEntry> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, reg);
    }
}
