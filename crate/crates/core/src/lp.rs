//! Exact minimax linear programming.
//!
//! A [`MinimaxProblem`] asks for
//!
//! ```text
//! minimize t  subject to  E x = e,   sum_{f in G} |f(x)| <= t  for every group G,
//! ```
//!
//! where every `f` is an affine form. The solver works in three stages:
//!
//! 1. Exact presolve: the equality system is put in reduced row echelon form
//!    and eliminated (`x = x0 + K z`), forms are rewritten in the free
//!    coordinates `z`, constant forms are folded into their group, and forms
//!    that are scalar multiples of each other inside a group are merged into
//!    one weighted term.
//! 2. Linearization: every merged form `f` becomes `f(z) = p - q` with
//!    `p, q >= 0`, and every group becomes `sum w (p + q) + s = t`.
//! 3. A dense tableau simplex, started from a crash basis that is feasible by
//!    construction ("`t` is the largest group sum at `z = 0`"), so only a
//!    single phase is needed.
//!
//! In exact mode the simplex uses Dantzig pricing and falls back permanently
//! to Bland's rule after a run of degenerate pivots, which rules out cycling.
//! Duals are recovered from the reduced costs of the slack-like columns and
//! re-checked against the linearized data, so every optimal solution carries
//! a verified strong-duality certificate.

use std::collections::BTreeMap;
use std::fmt::Debug;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{Matrix, Rational};

/// `coeffs · x + offset`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineForm {
    pub coeffs: Vec<Rational>,
    pub offset: Rational,
}

impl AffineForm {
    pub fn new(coeffs: Vec<Rational>, offset: Rational) -> Self {
        AffineForm { coeffs, offset }
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        self.coeffs.iter().zip(x).map(|(a, b)| a * b).sum::<Rational>() + &self.offset
    }

    fn eval_f64(&self, x: &[f64]) -> f64 {
        self.coeffs
            .iter()
            .zip(x)
            .map(|(a, b)| a.to_f64() * b)
            .sum::<f64>()
            + self.offset.to_f64()
    }
}

/// `coeffs · x = rhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Equality {
    pub coeffs: Vec<Rational>,
    pub rhs: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimaxProblem {
    pub variables: usize,
    pub equalities: Vec<Equality>,
    pub abs_groups: Vec<Vec<AffineForm>>,
}

impl MinimaxProblem {
    pub fn validate(&self) -> Result<()> {
        for (i, eq) in self.equalities.iter().enumerate() {
            if eq.coeffs.len() != self.variables {
                return Err(Error::Malformed(format!(
                    "equality {i} has {} coefficients, expected {}",
                    eq.coeffs.len(),
                    self.variables
                )));
            }
        }
        for (g, group) in self.abs_groups.iter().enumerate() {
            for (f, form) in group.iter().enumerate() {
                if form.coeffs.len() != self.variables {
                    return Err(Error::Malformed(format!(
                        "form {f} of group {g} has {} coefficients, expected {}",
                        form.coeffs.len(),
                        self.variables
                    )));
                }
            }
        }
        if self.abs_groups.iter().all(Vec::is_empty) {
            return Err(Error::Malformed("no nonempty absolute-value group".into()));
        }
        Ok(())
    }

    /// Largest group sum at `x`.
    pub fn max_group_sum(&self, x: &[Rational]) -> Rational {
        self.group_sums(x)
            .into_iter()
            .fold(Rational::zero(), Rational::max)
    }

    pub fn group_sums(&self, x: &[Rational]) -> Vec<Rational> {
        self.abs_groups
            .iter()
            .map(|g| g.iter().map(|f| f.eval(x).abs()).sum())
            .collect()
    }

    pub fn satisfies_equalities(&self, x: &[Rational]) -> bool {
        self.equalities.iter().all(|eq| {
            eq.coeffs.iter().zip(x).map(|(a, b)| a * b).sum::<Rational>() == eq.rhs
        })
    }

    /// The same problem with variables relabelled: new variable `perm[i]`
    /// is old variable `i`.
    pub fn permute_variables(&self, perm: &[usize]) -> MinimaxProblem {
        let apply = |c: &[Rational]| {
            let mut out = vec![Rational::zero(); c.len()];
            for (i, v) in c.iter().enumerate() {
                out[perm[i]] = v.clone();
            }
            out
        };
        MinimaxProblem {
            variables: self.variables,
            equalities: self
                .equalities
                .iter()
                .map(|e| Equality {
                    coeffs: apply(&e.coeffs),
                    rhs: e.rhs.clone(),
                })
                .collect(),
            abs_groups: self
                .abs_groups
                .iter()
                .map(|g| {
                    g.iter()
                        .map(|f| AffineForm::new(apply(&f.coeffs), f.offset.clone()))
                        .collect()
                })
                .collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "float" => Ok(Mode::Float),
            other => Err(Error::Parse(format!("unknown mode {other:?}"))),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Float => "float",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Optimal solution of an exact solve. Infeasible and unbounded programs are
/// reported as [`Error::Infeasible`] / [`Error::Unbounded`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LpSolution {
    pub status: LpStatus,
    pub objective: Rational,
    pub assignment: Vec<Rational>,
    /// One multiplier per row of the linearized program: merged form rows
    /// first (group by group), then one row per group.
    pub dual_multipliers: Vec<Rational>,
    /// Group-row multipliers, negated so that they are nonnegative and sum
    /// to one at optimality.
    pub group_weights: Vec<Rational>,
    pub dual_objective: Rational,
    /// Dual feasibility and `dual_objective == objective`, rechecked from
    /// the linearized data.
    pub certificate_verified: bool,
    pub pivots: usize,
    #[serde(skip)]
    state: Option<Box<SolvedState>>,
}

impl LpSolution {
    pub fn strong_duality_holds(&self) -> bool {
        self.certificate_verified && self.dual_objective == self.objective
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FloatResiduals {
    pub max_equality_residual: f64,
    /// `max(0, max_group_sum - objective)`.
    pub max_group_excess: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FloatSolution {
    pub objective: f64,
    pub assignment: Vec<f64>,
    pub residuals: FloatResiduals,
    pub pivots: usize,
}

/// Range of a watched variable over the optimal face.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariableRange {
    pub variable: usize,
    pub min: Rational,
    pub max: Rational,
}

impl VariableRange {
    pub fn is_degenerate(&self) -> bool {
        self.min == self.max
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FaceProbe {
    pub variable_ranges: Vec<VariableRange>,
    pub is_point: bool,
}

/// Exact solve.
pub fn solve_minimax(p: &MinimaxProblem) -> Result<LpSolution> {
    p.validate()?;
    let reduced = Reduced::build(p)?;
    let lin = Linearized::from_reduced(&reduced);
    let mut tab: Tableau<Rational> = lin.crash_tableau();
    let pivots = tab.optimize()?;
    let objective = tab.objective_value();
    let z = lin.z_values(&tab);
    let assignment = reduced.lift(&z);
    let (duals, group_weights) = lin.recover_duals(&tab);
    let (certificate_verified, dual_objective) = lin.verify_duals(&duals);
    Ok(LpSolution {
        status: LpStatus::Optimal,
        objective,
        assignment,
        dual_multipliers: duals,
        group_weights,
        dual_objective,
        certificate_verified,
        pivots,
        state: Some(Box::new(SolvedState {
            reduced,
            lin,
            tableau: tab,
        })),
    })
}

/// Double-precision solve on the exactly presolved program.
pub fn solve_minimax_float(p: &MinimaxProblem) -> Result<FloatSolution> {
    p.validate()?;
    let reduced = Reduced::build(p)?;
    let lin = Linearized::from_reduced(&reduced);
    let exact_tab: Tableau<Rational> = lin.initial_tableau();
    let mut tab: Tableau<f64> = exact_tab.to_float();
    lin.crash(&mut tab);
    let pivots = tab.optimize()?;
    let objective = tab.objective_value();
    let z: Vec<f64> = lin.z_values(&tab);
    let assignment = reduced.lift_f64(&z);
    let max_equality_residual = p
        .equalities
        .iter()
        .map(|e| {
            let lhs: f64 = e
                .coeffs
                .iter()
                .zip(&assignment)
                .map(|(a, b)| a.to_f64() * b)
                .sum();
            (lhs - e.rhs.to_f64()).abs()
        })
        .fold(0.0, f64::max);
    let max_sum = p
        .abs_groups
        .iter()
        .map(|g| g.iter().map(|f| f.eval_f64(&assignment).abs()).sum::<f64>())
        .fold(0.0, f64::max);
    Ok(FloatSolution {
        objective,
        assignment,
        residuals: FloatResiduals {
            max_equality_residual,
            max_group_excess: (max_sum - objective).max(0.0),
        },
        pivots,
    })
}

/// Exact min and max of each watched variable over the optimal face.
///
/// The optimal face is `{ feasible points : nonbasic columns with positive
/// reduced cost are zero }`; each extremum is a warm-started simplex run on
/// that face, two per watched variable.
pub fn probe_optimal_face(
    p: &MinimaxProblem,
    s: &LpSolution,
    watched: &[usize],
) -> Result<FaceProbe> {
    if let Some(&bad) = watched.iter().find(|&&v| v >= p.variables) {
        return Err(Error::Malformed(format!(
            "watched variable {bad} out of range ({} variables)",
            p.variables
        )));
    }
    let state = match &s.state {
        Some(st) => st.clone(),
        None => {
            let fresh = solve_minimax(p)?;
            fresh.state.expect("fresh solve carries state")
        }
    };
    let face = state.tableau.restricted_to_optimal_face();
    let variable_ranges = watched
        .par_iter()
        .map(|&v| {
            let (constant, zc) = state.reduced.variable_in_z(v);
            let lo = state.lin.extremize(&face, &zc, false)?;
            let hi = state.lin.extremize(&face, &zc, true)?;
            Ok(VariableRange {
                variable: v,
                min: &constant + lo,
                max: &constant + hi,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let is_point = variable_ranges.iter().all(VariableRange::is_degenerate);
    Ok(FaceProbe {
        variable_ranges,
        is_point,
    })
}

#[derive(Clone, Debug)]
struct SolvedState {
    reduced: Reduced,
    lin: Linearized,
    tableau: Tableau<Rational>,
}

/// A weighted merged form in the free coordinates.
#[derive(Clone, Debug)]
struct MergedForm {
    coeffs: Vec<Rational>,
    offset: Rational,
    weight: Rational,
}

#[derive(Clone, Debug)]
struct ReducedGroup {
    constant: Rational,
    forms: Vec<MergedForm>,
}

/// Problem after elimination of the equality constraints.
#[derive(Clone, Debug)]
struct Reduced {
    /// Particular solution of the equalities.
    x0: Vec<Rational>,
    /// `variables x d`; column `l` is the `l`-th kernel direction.
    kernel: Matrix,
    groups: Vec<ReducedGroup>,
}

impl Reduced {
    fn build(p: &MinimaxProblem) -> Result<Reduced> {
        let nv = p.variables;
        let (x0, kernel) = if p.equalities.is_empty() {
            (vec![Rational::zero(); nv], Matrix::identity(nv))
        } else {
            let rows: Vec<Vec<Rational>> = p
                .equalities
                .iter()
                .map(|e| {
                    let mut r = e.coeffs.clone();
                    r.push(e.rhs.clone());
                    r
                })
                .collect();
            let aug = Matrix::from_rows(rows)?;
            let (r, pivots) = aug.rref();
            if pivots.last() == Some(&nv) {
                return Err(Error::InconsistentEqualities);
            }
            let mut x0 = vec![Rational::zero(); nv];
            for (i, &c) in pivots.iter().enumerate() {
                x0[c] = r[(i, nv)].clone();
            }
            let free: Vec<usize> = (0..nv).filter(|c| !pivots.contains(c)).collect();
            let mut kernel = Matrix::zeros(nv, free.len());
            for (l, &fc) in free.iter().enumerate() {
                kernel[(fc, l)] = Rational::one();
                for (i, &pc) in pivots.iter().enumerate() {
                    kernel[(pc, l)] = -&r[(i, fc)];
                }
            }
            (x0, kernel)
        };
        let d = kernel.cols();
        let groups = p
            .abs_groups
            .iter()
            .map(|group| {
                let mut constant = Rational::zero();
                // canonical direction -> (weight, representative)
                let mut merged: BTreeMap<Vec<Rational>, Rational> = BTreeMap::new();
                let mut order: Vec<Vec<Rational>> = Vec::new();
                for form in group {
                    let offset = form.eval(&x0);
                    let coeffs: Vec<Rational> = (0..d)
                        .map(|l| {
                            form.coeffs
                                .iter()
                                .enumerate()
                                .filter(|(_, a)| !a.is_zero())
                                .map(|(k, a)| a * &kernel[(k, l)])
                                .sum()
                        })
                        .collect();
                    let Some(lead) = coeffs.iter().find(|c| !c.is_zero()).cloned() else {
                        constant += offset.abs();
                        continue;
                    };
                    // Normalize so the leading coefficient is 1: |f| = |lead| * |f / lead|.
                    let inv = lead.recip().expect("nonzero");
                    let mut key: Vec<Rational> = coeffs.iter().map(|c| c * &inv).collect();
                    key.push(offset * &inv);
                    let w = lead.abs();
                    match merged.get_mut(&key) {
                        Some(acc) => *acc += w,
                        None => {
                            order.push(key.clone());
                            merged.insert(key, w);
                        }
                    }
                }
                let forms = order
                    .into_iter()
                    .map(|mut key| {
                        let offset = key.pop().expect("offset slot");
                        let weight = merged[&key_with(&key, &offset)].clone();
                        MergedForm {
                            coeffs: key,
                            offset,
                            weight,
                        }
                    })
                    .collect();
                ReducedGroup { constant, forms }
            })
            .collect();
        Ok(Reduced { x0, kernel, groups })
    }

    fn dim(&self) -> usize {
        self.kernel.cols()
    }

    fn lift(&self, z: &[Rational]) -> Vec<Rational> {
        let kz = self.kernel.mul_vec(z).expect("kernel width");
        self.x0.iter().zip(kz).map(|(a, b)| a + b).collect()
    }

    fn lift_f64(&self, z: &[f64]) -> Vec<f64> {
        (0..self.x0.len())
            .map(|k| {
                self.x0[k].to_f64()
                    + (0..self.dim())
                        .map(|l| self.kernel[(k, l)].to_f64() * z[l])
                        .sum::<f64>()
            })
            .collect()
    }

    /// `x_v = constant + zc · z`.
    fn variable_in_z(&self, v: usize) -> (Rational, Vec<Rational>) {
        (
            self.x0[v].clone(),
            (0..self.dim()).map(|l| self.kernel[(v, l)].clone()).collect(),
        )
    }
}

fn key_with(coeffs: &[Rational], offset: &Rational) -> Vec<Rational> {
    let mut k = coeffs.to_vec();
    k.push(offset.clone());
    k
}

/// Column layout of the linearized program.
#[derive(Clone, Debug)]
struct Linearized {
    d: usize,
    /// (group index, merged form) in row order.
    forms: Vec<(usize, MergedForm)>,
    group_constants: Vec<Rational>,
}

impl Linearized {
    fn from_reduced(r: &Reduced) -> Linearized {
        let forms = r
            .groups
            .iter()
            .enumerate()
            .flat_map(|(g, grp)| grp.forms.iter().cloned().map(move |f| (g, f)))
            .collect();
        Linearized {
            d: r.dim(),
            forms,
            group_constants: r.groups.iter().map(|g| g.constant.clone()).collect(),
        }
    }

    fn nforms(&self) -> usize {
        self.forms.len()
    }

    fn ngroups(&self) -> usize {
        self.group_constants.len()
    }

    fn col_zp(&self, l: usize) -> usize {
        l
    }
    fn col_zm(&self, l: usize) -> usize {
        self.d + l
    }
    fn col_p(&self, f: usize) -> usize {
        2 * self.d + f
    }
    fn col_q(&self, f: usize) -> usize {
        2 * self.d + self.nforms() + f
    }
    fn col_t(&self) -> usize {
        2 * self.d + 2 * self.nforms()
    }
    fn col_s(&self, g: usize) -> usize {
        self.col_t() + 1 + g
    }
    fn ncols(&self) -> usize {
        self.col_t() + 1 + self.ngroups()
    }
    fn row_group(&self, g: usize) -> usize {
        self.nforms() + g
    }

    /// Column entries of the linearized constraint matrix, as (row, value).
    fn rows(&self) -> (Vec<Vec<(usize, Rational)>>, Vec<Rational>) {
        let m = self.nforms() + self.ngroups();
        let mut rows: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); m];
        let mut rhs = vec![Rational::zero(); m];
        for (i, (g, f)) in self.forms.iter().enumerate() {
            // f(z) = p - q  <=>  a.z+ - a.z- - p + q = -c
            for (l, a) in f.coeffs.iter().enumerate() {
                if !a.is_zero() {
                    rows[i].push((self.col_zp(l), a.clone()));
                    rows[i].push((self.col_zm(l), -a));
                }
            }
            rows[i].push((self.col_p(i), -Rational::one()));
            rows[i].push((self.col_q(i), Rational::one()));
            rhs[i] = -&f.offset;
            let gr = self.row_group(*g);
            rows[gr].push((self.col_p(i), f.weight.clone()));
            rows[gr].push((self.col_q(i), f.weight.clone()));
        }
        for g in 0..self.ngroups() {
            let gr = self.row_group(g);
            rows[gr].push((self.col_t(), -Rational::one()));
            rows[gr].push((self.col_s(g), Rational::one()));
            rhs[gr] = -&self.group_constants[g];
        }
        (rows, rhs)
    }

    fn costs(&self) -> Vec<Rational> {
        let mut c = vec![Rational::zero(); self.ncols()];
        c[self.col_t()] = Rational::one();
        c
    }

    fn initial_tableau(&self) -> Tableau<Rational> {
        let (rows, rhs) = self.rows();
        let n = self.ncols();
        let a = rows
            .into_iter()
            .map(|entries| {
                let mut r = vec![Rational::zero(); n];
                for (c, v) in entries {
                    r[c] = v;
                }
                r
            })
            .collect();
        let mut tab = Tableau::new(a, rhs);
        tab.set_costs(&self.costs());
        tab
    }

    fn crash_tableau(&self) -> Tableau<Rational> {
        let mut tab = self.initial_tableau();
        self.crash(&mut tab);
        tab
    }

    /// Feasible starting basis: `q_f` or `p_f` per form (whichever equals
    /// `|f(0)|`), `t` on the heaviest group row, group slacks elsewhere.
    fn crash<T: Num>(&self, tab: &mut Tableau<T>) {
        for (i, (_, f)) in self.forms.iter().enumerate() {
            let col = if f.offset.is_positive() {
                self.col_p(i)
            } else {
                self.col_q(i)
            };
            tab.pivot(i, col);
        }
        // Group rows now read  -t + s_g + ... = -R_g  with R_g >= 0.
        let heaviest = (0..self.ngroups())
            .max_by(|&a, &b| {
                let (ra, rb) = (
                    tab.b[self.row_group(a)].neg(),
                    tab.b[self.row_group(b)].neg(),
                );
                ra.partial_cmp_num(&rb).then(b.cmp(&a))
            })
            .expect("at least one group");
        tab.pivot(self.row_group(heaviest), self.col_t());
        for g in 0..self.ngroups() {
            if g != heaviest {
                tab.pivot(self.row_group(g), self.col_s(g));
            }
        }
        tab.cost_from_basis();
    }

    fn z_values<T: Num>(&self, tab: &Tableau<T>) -> Vec<T> {
        let x = tab.primal_values();
        (0..self.d)
            .map(|l| x[self.col_zp(l)].sub(&x[self.col_zm(l)]))
            .collect()
    }

    /// Row duals from reduced costs `d_j = c_j - y . A_j` on the group slack
    /// and `q` columns, which are unit columns up to the group coupling.
    fn recover_duals(&self, tab: &Tableau<Rational>) -> (Vec<Rational>, Vec<Rational>) {
        let m = self.nforms() + self.ngroups();
        let mut y = vec![Rational::zero(); m];
        for g in 0..self.ngroups() {
            y[self.row_group(g)] = -&tab.reduced_costs[self.col_s(g)];
        }
        for (i, (g, f)) in self.forms.iter().enumerate() {
            // d_q = 0 - (y_i * 1 + y_g * w)
            y[i] = -&tab.reduced_costs[self.col_q(i)] - &y[self.row_group(*g)] * &f.weight;
        }
        let weights = (0..self.ngroups())
            .map(|g| -&y[self.row_group(g)])
            .collect();
        (y, weights)
    }

    /// Checks `c - A^T y >= 0` (with equality on the paired free columns)
    /// and returns `(feasible, b . y)`.
    fn verify_duals(&self, y: &[Rational]) -> (bool, Rational) {
        let (rows, rhs) = self.rows();
        let c = self.costs();
        let mut reduced = c;
        for (i, entries) in rows.iter().enumerate() {
            if y[i].is_zero() {
                continue;
            }
            for (col, v) in entries {
                reduced[*col] -= v * &y[i];
            }
        }
        let feasible = reduced.iter().all(|r| !r.is_negative());
        let obj = rhs.iter().zip(y).map(|(b, yi)| b * yi).sum();
        (feasible, obj)
    }

    /// Optimum of `±zc · z` over the stored optimal face.
    fn extremize(&self, face: &Tableau<Rational>, zc: &[Rational], maximize: bool) -> Result<Rational> {
        let mut tab = face.clone();
        let mut costs = vec![Rational::zero(); self.ncols()];
        for (l, c) in zc.iter().enumerate() {
            let c = if maximize { -c } else { c.clone() };
            costs[self.col_zm(l)] = -&c;
            costs[self.col_zp(l)] = c;
        }
        tab.set_costs(&costs);
        tab.optimize()?;
        let v = tab.objective_value();
        Ok(if maximize { -v } else { v })
    }
}

/// Scalar operations needed by the tableau; exact for [`Rational`],
/// tolerance-based for `f64`.
pub(crate) trait Num: Clone + Debug + Send + Sync {
    fn zero() -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn is_zero(&self) -> bool;
    fn is_pos(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn partial_cmp_num(&self, o: &Self) -> std::cmp::Ordering;
    const EXACT: bool;
}

impl Num for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
    fn is_pos(&self) -> bool {
        self.is_positive()
    }
    fn is_neg(&self) -> bool {
        self.is_negative()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn partial_cmp_num(&self, o: &Self) -> std::cmp::Ordering {
        self.cmp(o)
    }
    const EXACT: bool = true;
}

const FLOAT_EPS: f64 = 1e-10;

impl Num for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_rational(r: &Rational) -> Self {
        r.to_f64()
    }
    fn is_zero(&self) -> bool {
        self.abs() <= FLOAT_EPS
    }
    fn is_pos(&self) -> bool {
        *self > FLOAT_EPS
    }
    fn is_neg(&self) -> bool {
        *self < -FLOAT_EPS
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn partial_cmp_num(&self, o: &Self) -> std::cmp::Ordering {
        self.total_cmp(o)
    }
    const EXACT: bool = false;
}

/// Consecutive degenerate pivots tolerated before switching to Bland's rule.
const DEGENERATE_STREAK_LIMIT: usize = 50;
const FLOAT_PIVOT_LIMIT: usize = 1_000_000;

/// Dense simplex tableau in canonical form for `min c.x, A x = b, x >= 0`.
#[derive(Clone, Debug)]
struct Tableau<T> {
    a: Vec<Vec<T>>,
    b: Vec<T>,
    basis: Vec<Option<usize>>,
    is_basic: Vec<bool>,
    reduced_costs: Vec<T>,
    costs: Vec<T>,
    allowed: Vec<bool>,
}

impl<T: Num> Tableau<T> {
    fn new(a: Vec<Vec<T>>, b: Vec<T>) -> Self {
        let n = a.first().map_or(0, Vec::len);
        let m = a.len();
        Tableau {
            a,
            b,
            basis: vec![None; m],
            is_basic: vec![false; n],
            reduced_costs: vec![T::zero(); n],
            costs: vec![T::zero(); n],
            allowed: vec![true; n],
        }
    }

    fn set_costs(&mut self, c: &[Rational]) {
        self.costs = c.iter().map(T::from_rational).collect();
        self.cost_from_basis();
    }

    fn ncols(&self) -> usize {
        self.is_basic.len()
    }

    /// `d = c - c_B^T B^{-1} A` for the current basis.
    fn cost_from_basis(&mut self) {
        let mut d = self.costs.clone();
        for (i, bcol) in self.basis.iter().enumerate() {
            let Some(bc) = bcol else { continue };
            let cb = self.costs[*bc].clone();
            if cb.is_zero() {
                continue;
            }
            for (j, v) in self.a[i].iter().enumerate() {
                if !v.is_zero() {
                    d[j] = d[j].sub(&cb.mul(v));
                }
            }
        }
        self.reduced_costs = d;
    }

    fn objective_value(&self) -> T {
        self.basis
            .iter()
            .zip(&self.b)
            .filter_map(|(bc, bi)| bc.map(|c| self.costs[c].mul(bi)))
            .fold(T::zero(), |acc, v| acc.add(&v))
    }

    fn primal_values(&self) -> Vec<T> {
        let mut x = vec![T::zero(); self.ncols()];
        for (i, bc) in self.basis.iter().enumerate() {
            if let Some(c) = bc {
                x[*c] = self.b[i].clone();
            }
        }
        x
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let pv = self.a[r][q].clone();
        assert!(!pv.is_zero(), "pivot on zero element");
        let nz: Vec<usize> = (0..self.ncols()).filter(|&j| !self.a[r][j].is_zero()).collect();
        for &j in &nz {
            self.a[r][j] = self.a[r][j].div(&pv);
        }
        self.a[r][q] = Num::from_rational(&Rational::one());
        self.b[r] = self.b[r].div(&pv);
        let (pivot_row, pivot_b) = (self.a[r].clone(), self.b[r].clone());
        for i in 0..self.a.len() {
            if i == r {
                continue;
            }
            let f = self.a[i][q].clone();
            if f.is_zero() {
                continue;
            }
            let row = &mut self.a[i];
            for &j in &nz {
                row[j] = row[j].sub(&f.mul(&pivot_row[j]));
            }
            row[q] = T::zero();
            self.b[i] = self.b[i].sub(&f.mul(&pivot_b));
        }
        let f = self.reduced_costs[q].clone();
        if !f.is_zero() {
            for &j in &nz {
                self.reduced_costs[j] = self.reduced_costs[j].sub(&f.mul(&pivot_row[j]));
            }
        }
        self.reduced_costs[q] = T::zero();
        if let Some(old) = self.basis[r] {
            self.is_basic[old] = false;
        }
        self.basis[r] = Some(q);
        self.is_basic[q] = true;
    }

    /// Primal simplex from a feasible basis. Returns the pivot count.
    fn optimize(&mut self) -> Result<usize> {
        let mut pivots = 0;
        let mut streak = 0;
        let mut bland = false;
        loop {
            let candidates = (0..self.ncols())
                .filter(|&j| self.allowed[j] && !self.is_basic[j] && self.reduced_costs[j].is_neg());
            let entering = if bland {
                candidates.min()
            } else {
                candidates.min_by(|&a, &b| {
                    self.reduced_costs[a]
                        .partial_cmp_num(&self.reduced_costs[b])
                        .then(a.cmp(&b))
                })
            };
            let Some(q) = entering else {
                return Ok(pivots);
            };
            let mut leave: Option<usize> = None;
            for i in 0..self.a.len() {
                if !self.a[i][q].is_pos() {
                    continue;
                }
                leave = Some(match leave {
                    None => i,
                    Some(r) => {
                        // compare b_i / a_iq against b_r / a_rq
                        let lhs = self.b[i].mul(&self.a[r][q]);
                        let rhs = self.b[r].mul(&self.a[i][q]);
                        match lhs.sub(&rhs) {
                            d if d.is_neg() => i,
                            d if d.is_pos() => r,
                            _ => {
                                if self.basis[i] < self.basis[r] {
                                    i
                                } else {
                                    r
                                }
                            }
                        }
                    }
                });
            }
            let Some(r) = leave else {
                return Err(Error::Unbounded);
            };
            if self.b[r].is_zero() {
                streak += 1;
                if streak > DEGENERATE_STREAK_LIMIT {
                    bland = true;
                }
            } else {
                streak = 0;
            }
            self.pivot(r, q);
            pivots += 1;
            if !T::EXACT && pivots > FLOAT_PIVOT_LIMIT {
                return Err(Error::Solver("float simplex pivot limit exceeded".into()));
            }
        }
    }

    /// Freezes every nonbasic column with positive reduced cost at zero.
    fn restricted_to_optimal_face(&self) -> Tableau<T> {
        let mut t = self.clone();
        for j in 0..t.ncols() {
            if !t.is_basic[j] && t.reduced_costs[j].is_pos() {
                t.allowed[j] = false;
            }
        }
        t
    }
}

impl Tableau<Rational> {
    fn to_float(&self) -> Tableau<f64> {
        let cv = |v: &Rational| v.to_f64();
        Tableau {
            a: self.a.iter().map(|r| r.iter().map(cv).collect()).collect(),
            b: self.b.iter().map(cv).collect(),
            basis: self.basis.clone(),
            is_basic: self.is_basic.clone(),
            reduced_costs: self.reduced_costs.iter().map(cv).collect(),
            costs: self.costs.iter().map(cv).collect(),
            allowed: self.allowed.clone(),
        }
    }
}
