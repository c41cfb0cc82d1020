//! Minimal projections onto subspaces of `l1^N`.
//!
//! A projection onto `V = range(B)` (`B` is `N x n` of full column rank) is
//! written `P = B U` with `U B = I_n`; the rows of `U` are the dual
//! functionals. The `l1 -> l1` operator norm is the largest column
//! `l1`-norm of `B U`, so minimizing it is a [`MinimaxProblem`] in the
//! entries of `U`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{l1_norm, Matrix, Rational};
use crate::lp::{
    self, AffineForm, Equality, FaceProbe, FloatResiduals, MinimaxProblem, VariableRange,
};

/// An `n`-dimensional subspace of `l1^N`, stored as an `N x n` basis matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubspaceL1 {
    basis: Matrix,
}

impl SubspaceL1 {
    pub fn new(basis: Matrix) -> Result<Self> {
        let (big_n, n) = (basis.rows(), basis.cols());
        if n == 0 || n > big_n {
            return Err(Error::Dimension(format!(
                "subspace dimension {n} must satisfy 1 <= n <= N = {big_n}"
            )));
        }
        let rank = basis.rank();
        if rank < n {
            return Err(Error::RankDeficient { rank, dim: n });
        }
        Ok(SubspaceL1 { basis })
    }

    /// Subspace spanned by the given vectors of `l1^N`.
    pub fn from_vectors(vectors: &[Vec<Rational>]) -> Result<Self> {
        SubspaceL1::new(Matrix::from_columns(vectors)?)
    }

    pub fn from_i64_vectors(vectors: &[&[i64]]) -> Result<Self> {
        let v: Vec<Vec<Rational>> = vectors
            .iter()
            .map(|r| r.iter().map(|&x| Rational::from(x)).collect())
            .collect();
        SubspaceL1::from_vectors(&v)
    }

    /// `span{e_1, ..., e_k}` in `l1^N`.
    pub fn coordinate(k: usize, ambient: usize) -> Result<Self> {
        let vectors: Vec<Vec<Rational>> = (0..k)
            .map(|i| {
                (0..ambient)
                    .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                    .collect()
            })
            .collect();
        SubspaceL1::from_vectors(&vectors)
    }

    /// `span{(1, ..., 1)}` in `l1^N`.
    pub fn all_ones(ambient: usize) -> Result<Self> {
        SubspaceL1::from_vectors(&[vec![Rational::one(); ambient]])
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn basis_vector(&self, k: usize) -> Vec<Rational> {
        self.basis.column(k)
    }

    /// `sum_k coeffs[k] v_k`.
    pub fn member(&self, coeffs: &[Rational]) -> Result<Vec<Rational>> {
        self.basis.mul_vec(coeffs)
    }

    /// Basis `B T` for an `n x n` matrix `T`.
    pub fn change_basis(&self, t: &Matrix) -> Result<SubspaceL1> {
        SubspaceL1::new(self.basis.mul(t)?)
    }

    /// Relabels and sign-flips ambient coordinates: row `i` of the new basis
    /// is `signs[i]` times row `perm[i]` of the old one.
    pub fn signed_permutation(&self, perm: &[usize], signs: &[i64]) -> Result<SubspaceL1> {
        let rows: Vec<Vec<Rational>> = perm
            .iter()
            .zip(signs)
            .map(|(&p, &s)| {
                self.basis
                    .row(p)
                    .iter()
                    .map(|x| x * Rational::from(s))
                    .collect()
            })
            .collect();
        SubspaceL1::new(Matrix::from_rows(rows)?)
    }
}

/// The projection `x -> B U x` onto a subspace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectionL1 {
    subspace: SubspaceL1,
    /// `n x N`.
    functionals: Matrix,
}

impl ProjectionL1 {
    /// Checks `U B = I_n`.
    pub fn new(subspace: SubspaceL1, functionals: Matrix) -> Result<Self> {
        let (n, big_n) = (subspace.dim(), subspace.ambient_dim());
        if functionals.rows() != n || functionals.cols() != big_n {
            return Err(Error::Dimension(format!(
                "functional matrix is {}x{}, expected {n}x{big_n}",
                functionals.rows(),
                functionals.cols()
            )));
        }
        if functionals.mul(subspace.basis())? != Matrix::identity(n) {
            return Err(Error::Domain("U B != I: not a projection onto V".into()));
        }
        Ok(ProjectionL1 {
            subspace,
            functionals,
        })
    }

    pub fn subspace(&self) -> &SubspaceL1 {
        &self.subspace
    }

    pub fn functionals(&self) -> &Matrix {
        &self.functionals
    }

    /// The `N x N` matrix `B U`.
    pub fn matrix(&self) -> Matrix {
        self.subspace
            .basis()
            .mul(&self.functionals)
            .expect("shapes checked at construction")
    }

    pub fn apply(&self, x: &[Rational]) -> Result<Vec<Rational>> {
        let ux = self.functionals.mul_vec(x)?;
        self.subspace.member(&ux)
    }
}

/// Operator norm on `l1^N`: the largest column `l1`-norm of `B U`.
pub fn projection_norm(p: &ProjectionL1) -> Rational {
    let m = p.matrix();
    (0..m.cols())
        .map(|j| l1_norm(&m.column(j)))
        .fold(Rational::zero(), Rational::max)
}

/// Index of `U[k][j]` among the LP variables.
pub fn functional_variable(big_n: usize, k: usize, j: usize) -> usize {
    k * big_n + j
}

/// Variables are the entries of `U` (row-major), equalities are `U B = I`,
/// and group `j` holds the `N` forms `(B U)_{i,j}`.
pub fn build_problem(v: &SubspaceL1) -> MinimaxProblem {
    let (big_n, n) = (v.ambient_dim(), v.dim());
    let b = v.basis();
    let nv = n * big_n;
    let mut equalities = Vec::with_capacity(n * n);
    for k in 0..n {
        for l in 0..n {
            let mut coeffs = vec![Rational::zero(); nv];
            for j in 0..big_n {
                coeffs[functional_variable(big_n, k, j)] = b[(j, l)].clone();
            }
            let rhs = if k == l { Rational::one() } else { Rational::zero() };
            equalities.push(Equality { coeffs, rhs });
        }
    }
    let abs_groups = (0..big_n)
        .map(|j| {
            (0..big_n)
                .map(|i| {
                    let mut coeffs = vec![Rational::zero(); nv];
                    for k in 0..n {
                        coeffs[functional_variable(big_n, k, j)] = b[(i, k)].clone();
                    }
                    AffineForm::new(coeffs, Rational::zero())
                })
                .collect()
        })
        .collect();
    MinimaxProblem {
        variables: nv,
        equalities,
        abs_groups,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualCertificate {
    pub dual_multipliers: Vec<Rational>,
    /// Nonnegative weights on the ambient coordinates, summing to one.
    pub column_weights: Vec<Rational>,
    pub dual_objective: Rational,
    pub verified: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinProjResult {
    /// `lambda(V, l1^N)`.
    pub value: Rational,
    pub optimal: ProjectionL1,
    /// `None` unless uniqueness was probed.
    pub unique: Option<bool>,
    pub face: Option<FaceProbe>,
    /// Absent when `n = N` (no program is solved).
    pub dual_certificate: Option<DualCertificate>,
}

impl MinProjResult {
    pub fn dim(&self) -> usize {
        self.optimal.subspace().dim()
    }
}

pub fn solve_min_projection(v: &SubspaceL1, probe_uniqueness: bool) -> Result<MinProjResult> {
    let (big_n, n) = (v.ambient_dim(), v.dim());
    if n == big_n {
        // The only projection onto the whole space is the identity.
        let u = v.basis().inverse()?;
        let optimal = ProjectionL1::new(v.clone(), u.clone())?;
        let face = probe_uniqueness.then(|| FaceProbe {
            variable_ranges: (0..n * big_n)
                .map(|idx| VariableRange {
                    variable: idx,
                    min: u.entries()[idx].clone(),
                    max: u.entries()[idx].clone(),
                })
                .collect(),
            is_point: true,
        });
        return Ok(MinProjResult {
            value: projection_norm(&optimal),
            optimal,
            unique: probe_uniqueness.then_some(true),
            face,
            dual_certificate: None,
        });
    }
    let problem = build_problem(v);
    let sol = lp::solve_minimax(&problem)?;
    let u = Matrix::from_entries(n, big_n, sol.assignment.clone())?;
    let optimal = ProjectionL1::new(v.clone(), u)?;
    let value = projection_norm(&optimal);
    if value != sol.objective {
        return Err(Error::Solver(format!(
            "projection norm {value} disagrees with LP objective {}",
            sol.objective
        )));
    }
    let face = if probe_uniqueness {
        let watched: Vec<usize> = (0..problem.variables).collect();
        Some(lp::probe_optimal_face(&problem, &sol, &watched)?)
    } else {
        None
    };
    Ok(MinProjResult {
        value,
        optimal,
        unique: face.as_ref().map(|f| f.is_point),
        face,
        dual_certificate: Some(DualCertificate {
            column_weights: sol.group_weights.clone(),
            dual_objective: sol.dual_objective.clone(),
            verified: sol.strong_duality_holds(),
            dual_multipliers: sol.dual_multipliers,
        }),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FloatMinProj {
    pub value: f64,
    pub functionals: Vec<f64>,
    pub residuals: FloatResiduals,
}

/// Advisory double-precision solve.
pub fn solve_min_projection_float(v: &SubspaceL1) -> Result<FloatMinProj> {
    let problem = build_problem(v);
    let sol = lp::solve_minimax_float(&problem)?;
    Ok(FloatMinProj {
        value: sol.objective,
        functionals: sol.assignment,
        residuals: sol.residuals,
    })
}

/// `1 <= value` and `value^2 <= n`, the rational form of `value <= sqrt(n)`.
pub fn kadec_snobar_check(r: &MinProjResult) -> bool {
    kadec_snobar_holds(&r.value, r.dim())
}

pub fn kadec_snobar_holds(value: &Rational, dim: usize) -> bool {
    value >= &Rational::one() && value.square() <= Rational::from(dim as i64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn problem_shape_for_diagonal_line() {
        let v = SubspaceL1::from_vectors(&[vec![q("1/2"), q("1/2")]]).unwrap();
        let p = build_problem(&v);
        assert_eq!(p.variables, 2);
        assert_eq!(p.abs_groups.len(), 2);
        assert_eq!(p.equalities.len(), 1);
        // (1/2) u1 + (1/2) u2 = 1, i.e. u1 + u2 = 2.
        assert_eq!(p.equalities[0].coeffs, vec![q("1/2"), q("1/2")]);
        assert_eq!(p.equalities[0].rhs, q("1"));
    }

    #[test]
    fn full_space_forces_identity() {
        let v = SubspaceL1::coordinate(2, 2).unwrap();
        let p = build_problem(&v);
        assert_eq!(p.equalities.len(), 4);
        let r = solve_min_projection(&v, true).unwrap();
        assert_eq!(r.optimal.functionals(), &Matrix::identity(2));
        assert_eq!(r.value, q("1"));
        assert_eq!(r.unique, Some(true));
    }

    #[test]
    fn first_axis_problem() {
        let v = SubspaceL1::coordinate(1, 2).unwrap();
        let p = build_problem(&v);
        assert_eq!(p.variables, 2);
        assert_eq!(p.equalities.len(), 1);
        assert_eq!(p.equalities[0].coeffs, vec![q("1"), q("0")]);
    }

    #[test]
    fn norm_examples() {
        let id = ProjectionL1::new(SubspaceL1::coordinate(2, 2).unwrap(), Matrix::identity(2)).unwrap();
        assert_eq!(projection_norm(&id), q("1"));

        let diag = SubspaceL1::from_vectors(&[vec![q("1/2"), q("1/2")]]).unwrap();
        let u = Matrix::from_rows(vec![vec![q("1"), q("1")]]).unwrap();
        assert_eq!(projection_norm(&ProjectionL1::new(diag, u).unwrap()), q("1"));

        let axis = SubspaceL1::coordinate(1, 2).unwrap();
        let u = Matrix::from_rows(vec![vec![q("1"), q("1/2")]]).unwrap();
        assert_eq!(projection_norm(&ProjectionL1::new(axis, u).unwrap()), q("1"));
    }

    #[test]
    fn not_a_projection_rejected() {
        let axis = SubspaceL1::coordinate(1, 2).unwrap();
        let u = Matrix::from_rows(vec![vec![q("2"), q("0")]]).unwrap();
        assert!(ProjectionL1::new(axis, u).is_err());
    }

    #[test]
    fn rank_deficient_rejected() {
        let err = SubspaceL1::from_i64_vectors(&[&[1, 1, 0], &[2, 2, 0]]).unwrap_err();
        assert!(matches!(err, Error::RankDeficient { rank: 1, dim: 2 }));
    }

    #[test]
    fn solve_examples() {
        let ones = SubspaceL1::all_ones(4).unwrap();
        assert_eq!(solve_min_projection(&ones, false).unwrap().value, q("1"));

        let plane = SubspaceL1::coordinate(2, 3).unwrap();
        let r = solve_min_projection(&plane, false).unwrap();
        assert_eq!(r.value, q("1"));

        let axis = SubspaceL1::coordinate(1, 2).unwrap();
        let r = solve_min_projection(&axis, true).unwrap();
        assert_eq!(r.value, q("1"));
        assert_eq!(r.unique, Some(false));
        let range = &r.face.as_ref().unwrap().variable_ranges[1];
        assert_eq!((range.min.clone(), range.max.clone()), (q("-1"), q("1")));
        assert!(r.dual_certificate.as_ref().unwrap().verified);
    }

    #[test]
    fn kadec_snobar_examples() {
        assert!(kadec_snobar_holds(&q("1"), 1));
        assert!(kadec_snobar_holds(&q("6/5"), 2));
        assert!(!kadec_snobar_holds(&q("3/2"), 2));
        assert!(!kadec_snobar_holds(&q("9/10"), 2));
    }
}
