//! Piecewise-constant copies in `L1[0,1]`, coding families, and the
//! duality ladder for finite-codimensional subspaces of `C[0,1]`.
//!
//! A subspace `V` of `l1^N` is carried into `L1[0,1]` by sending `e_c` to
//! the normalized indicator `nu_c = N m chi_{I_c}` of cell `c` of the
//! uniform partition into `N m` cells (cell `j m + r` is copy `r` of piece
//! `j`, matching the duplication layout). A finite-rank operator on
//! measures `mu -> sum_k (int g_k dmu) y_k` is described by its coding
//! functions `g_k`; its norm is `sup_t || sum_k g_k(t) y_k ||_1`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::duplication::{duplicate_subspace, pushforward_projection};
use crate::error::{Error, Result};
use crate::exact::{mat_rank, Matrix, Rational};
use crate::minproj::{solve_min_projection, MinProjResult, SubspaceL1};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniformPartition {
    pub pieces: usize,
    pub refinement: usize,
}

impl UniformPartition {
    pub fn new(pieces: usize, refinement: usize) -> Result<Self> {
        if pieces == 0 || refinement == 0 {
            return Err(Error::Domain(format!(
                "partition needs N >= 1 and m >= 1, got N = {pieces}, m = {refinement}"
            )));
        }
        Ok(UniformPartition { pieces, refinement })
    }

    pub fn cells(&self) -> usize {
        self.pieces * self.refinement
    }

    pub fn cell_length(&self) -> Rational {
        Rational::frac(1, self.cells() as i64)
    }

    /// `c / (N m)` for `c = 0..=N m`.
    pub fn endpoints(&self) -> Vec<Rational> {
        let len = self.cells() as i64;
        (0..=len).map(|c| Rational::frac(c, len)).collect()
    }

    /// Cell of piece `j`, copy `r` (both 0-based).
    pub fn cell(&self, j: usize, r: usize) -> (Rational, Rational) {
        let c = (j * self.refinement + r) as i64;
        let len = self.cells() as i64;
        (Rational::frac(c, len), Rational::frac(c + 1, len))
    }
}

/// `J_{N,m}(D_m V)`: members are densities constant on each cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseConstantSubspace {
    pub partition: UniformPartition,
    /// Coordinates in the normalized indicators; `N m x n`.
    pub coefficients: SubspaceL1,
}

impl PiecewiseConstantSubspace {
    pub fn dim(&self) -> usize {
        self.coefficients.dim()
    }

    /// Density of `y_k` on cell `c`.
    pub fn density(&self, k: usize, c: usize) -> Rational {
        let nm = Rational::from(self.partition.cells() as i64);
        nm * &self.coefficients.basis()[(c, k)]
    }

    /// `int_0^1 |sum_k x_k y_k|`, integrated cell by cell.
    pub fn total_variation(&self, x: &[Rational]) -> Result<Rational> {
        if x.len() != self.dim() {
            return Err(Error::Dimension(format!(
                "{} coefficients for a {}-dimensional copy",
                x.len(),
                self.dim()
            )));
        }
        let len = self.partition.cell_length();
        Ok((0..self.partition.cells())
            .map(|c| {
                let d: Rational = x.iter().enumerate().map(|(k, xk)| xk * self.density(k, c)).sum();
                d.abs() * &len
            })
            .sum())
    }

    /// `w_l = int_0^1 y_l`.
    pub fn integrals(&self) -> Vec<Rational> {
        let b = self.coefficients.basis();
        (0..self.dim()).map(|l| b.column(l).iter().sum()).collect()
    }
}

pub fn piecewise_copy(v: &SubspaceL1, m: usize) -> Result<PiecewiseConstantSubspace> {
    Ok(PiecewiseConstantSubspace {
        partition: UniformPartition::new(v.ambient_dim(), m)?,
        coefficients: duplicate_subspace(v, m)?,
    })
}

/// One affine piece, by its one-sided limits at the two ends.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub left: Rational,
    pub right: Rational,
}

impl Segment {
    pub fn constant(v: Rational) -> Self {
        Segment { left: v.clone(), right: v }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodingFamily {
    /// `0 = t_0 < t_1 < ... < t_K = 1`.
    pub breakpoints: Vec<Rational>,
    /// `values[k][i]` is `g_k` on `[t_i, t_{i+1}]`.
    pub values: Vec<Vec<Segment>>,
    pub continuity_flag: bool,
}

impl CodingFamily {
    pub fn new(breakpoints: Vec<Rational>, values: Vec<Vec<Segment>>) -> Result<Self> {
        if breakpoints.len() < 2
            || !breakpoints[0].is_zero()
            || breakpoints.last() != Some(&Rational::one())
            || breakpoints.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(Error::Malformed(
                "breakpoints must increase strictly from 0 to 1".into(),
            ));
        }
        let segments = breakpoints.len() - 1;
        if let Some((k, _)) = values.iter().enumerate().find(|(_, g)| g.len() != segments) {
            return Err(Error::Malformed(format!(
                "coding function {k} has {} segments, expected {segments}",
                values[k].len()
            )));
        }
        let continuity_flag = values
            .iter()
            .all(|g| g.windows(2).all(|w| w[0].right == w[1].left));
        Ok(CodingFamily {
            breakpoints,
            values,
            continuity_flag,
        })
    }

    pub fn functions(&self) -> usize {
        self.values.len()
    }

    pub fn segments(&self) -> usize {
        self.breakpoints.len() - 1
    }

    /// Interior breakpoints where some `g_k` jumps.
    pub fn jumps(&self) -> Vec<usize> {
        (1..self.segments())
            .filter(|&i| self.values.iter().any(|g| g[i - 1].right != g[i].left))
            .collect()
    }

    fn value_in_segment(&self, k: usize, i: usize, t: &Rational) -> Rational {
        let seg = &self.values[k][i];
        let (a, b) = (&self.breakpoints[i], &self.breakpoints[i + 1]);
        &seg.left + (&seg.right - &seg.left) * (t - a) / (b - a)
    }

    fn min_segment_length(&self) -> Rational {
        self.breakpoints
            .windows(2)
            .map(|w| &w[1] - &w[0])
            .reduce(Rational::min)
            .expect("at least one segment")
    }

    /// `left multiplication`: `g'_k = sum_j a_{kj} g_j`.
    pub fn left_multiply(&self, a: &Matrix) -> Result<CodingFamily> {
        let n = self.functions();
        if a.cols() != n {
            return Err(Error::Dimension(format!("{}x{} matrix on {n} functions", a.rows(), a.cols())));
        }
        let values = (0..a.rows())
            .map(|k| {
                (0..self.segments())
                    .map(|i| {
                        let comb = |side: fn(&Segment) -> &Rational| -> Rational {
                            (0..n).map(|j| &a[(k, j)] * side(&self.values[j][i])).sum()
                        };
                        Segment {
                            left: comb(|s| &s.left),
                            right: comb(|s| &s.right),
                        }
                    })
                    .collect()
            })
            .collect();
        CodingFamily::new(self.breakpoints.clone(), values)
    }
}

fn check_basis(c: &CodingFamily, basis: &PiecewiseConstantSubspace) -> Result<()> {
    if c.functions() != basis.dim() {
        return Err(Error::Dimension(format!(
            "{} coding functions for a {}-dimensional copy",
            c.functions(),
            basis.dim()
        )));
    }
    Ok(())
}

/// `G_{kl} = int g_k y_l`, exact: the integrand is affine on every piece of
/// the common refinement of coding breakpoints and cells.
pub fn gram_matrix(c: &CodingFamily, basis: &PiecewiseConstantSubspace) -> Result<Matrix> {
    check_basis(c, basis)?;
    let n = c.functions();
    let cells = basis.partition.cells();
    let ends = basis.partition.endpoints();
    let mut g = Matrix::zeros(n, n);
    let (mut i, mut cell) = (0usize, 0usize);
    let mut start = Rational::zero();
    while i < c.segments() && cell < cells {
        let end = (&c.breakpoints[i + 1]).min(&ends[cell + 1]).clone();
        let width = &end - &start;
        let half = Rational::frac(1, 2);
        for k in 0..n {
            let avg = (c.value_in_segment(k, i, &start) + c.value_in_segment(k, i, &end)) * &half;
            let mass = avg * &width;
            for l in 0..n {
                g[(k, l)] = &g[(k, l)] + &mass * basis.density(l, cell);
            }
        }
        if end == c.breakpoints[i + 1] {
            i += 1;
        }
        if end == ends[cell + 1] {
            cell += 1;
        }
        start = end;
    }
    Ok(g)
}

/// Step coding `g_k = U_{k,c}` on cell `c`, read from a projection solved
/// on the coefficient space of the partition.
pub fn extract_coding(r: &MinProjResult, p: &UniformPartition) -> Result<CodingFamily> {
    let u = r.optimal.functionals();
    if u.cols() != p.cells() {
        return Err(Error::Dimension(format!(
            "projection on l1^{} does not match a partition with {} cells",
            u.cols(),
            p.cells()
        )));
    }
    let values = (0..u.rows())
        .map(|k| u.row(k).iter().cloned().map(Segment::constant).collect())
        .collect();
    CodingFamily::new(p.endpoints(), values)
}

/// `sup_t sum_c |sum_k g_k(t) B_{ck}|` over both one-sided values at every
/// breakpoint; on each segment the integrand is convex in `t`.
pub fn q_norm(c: &CodingFamily, basis: &PiecewiseConstantSubspace) -> Result<Rational> {
    check_basis(c, basis)?;
    let b = basis.coefficients.basis();
    let n = c.functions();
    let eval = |gv: Vec<&Rational>| -> Rational {
        (0..b.rows())
            .map(|row| {
                (0..n)
                    .map(|k| gv[k] * &b[(row, k)])
                    .sum::<Rational>()
                    .abs()
            })
            .sum()
    };
    Ok((0..c.segments())
        .into_par_iter()
        .map(|i| {
            let l = eval(c.values.iter().map(|g| &g[i].left).collect());
            let r = eval(c.values.iter().map(|g| &g[i].right).collect());
            l.max(r)
        })
        .reduce(Rational::zero, Rational::max))
}

/// Replaces every jump by a linear ramp of width `delta` centred on it and
/// re-biorthogonalizes with the inverse Gram matrix.
pub fn smooth_coding(
    c: &CodingFamily,
    delta: &Rational,
    basis: &PiecewiseConstantSubspace,
) -> Result<CodingFamily> {
    check_basis(c, basis)?;
    let half_min = c.min_segment_length() / Rational::from(2);
    if !delta.is_positive() || delta >= &half_min {
        return Err(Error::Domain(format!(
            "ramp width {delta} must lie in (0, {half_min})"
        )));
    }
    let jumps = c.jumps();
    let hd = delta / Rational::from(2);
    let mut breakpoints = vec![Rational::zero()];
    // Per output segment: (source segment, start, end), or a ramp between
    // two source segments.
    enum Piece {
        Source(usize, Rational, Rational),
        Ramp(usize, Rational, Rational),
    }
    let mut pieces = Vec::new();
    let mut start = Rational::zero();
    for i in 0..c.segments() {
        let end = if jumps.contains(&(i + 1)) {
            &c.breakpoints[i + 1] - &hd
        } else {
            c.breakpoints[i + 1].clone()
        };
        pieces.push(Piece::Source(i, start.clone(), end.clone()));
        breakpoints.push(end.clone());
        start = end;
        if jumps.contains(&(i + 1)) {
            let ramp_end = &c.breakpoints[i + 1] + &hd;
            pieces.push(Piece::Ramp(i, start.clone(), ramp_end.clone()));
            breakpoints.push(ramp_end.clone());
            start = ramp_end;
        }
    }
    let values: Vec<Vec<Segment>> = (0..c.functions())
        .map(|k| {
            pieces
                .iter()
                .map(|p| match p {
                    Piece::Source(i, s, e) => Segment {
                        left: c.value_in_segment(k, *i, s),
                        right: c.value_in_segment(k, *i, e),
                    },
                    Piece::Ramp(i, s, e) => Segment {
                        left: c.value_in_segment(k, *i, s),
                        right: c.value_in_segment(k, i + 1, e),
                    },
                })
                .collect()
        })
        .collect();
    let ramped = CodingFamily::new(breakpoints, values)?;
    let g = gram_matrix(&ramped, basis)?;
    let g_inv = g.inverse().map_err(|_| {
        Error::Domain(format!("Gram matrix singular at ramp width {delta}; use a smaller width"))
    })?;
    ramped.left_multiply(&g_inv)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SandwichRow {
    pub delta: Rational,
    pub q_norm: Rational,
    pub gap: Rational,
    pub gap_float: f64,
    pub lower_bound_holds: bool,
    pub biorthogonal: bool,
    pub continuous: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub lambda: Rational,
    pub rows: Vec<SandwichRow>,
    /// Gaps are non-increasing as `delta` decreases.
    pub monotone: bool,
}

/// Smooths the level-1 step coding of `r` at each width.
pub fn synthesize(r: &MinProjResult, deltas: &[Rational]) -> Result<SandwichReport> {
    let v = r.optimal.subspace();
    let basis = piecewise_copy(v, 1)?;
    let step = extract_coding(r, &basis.partition)?;
    let mut sorted: Vec<Rational> = deltas.to_vec();
    sorted.sort_by(|a, b| b.cmp(a));
    let rows = sorted
        .par_iter()
        .map(|d| {
            let s = smooth_coding(&step, d, &basis)?;
            let q = q_norm(&s, &basis)?;
            let gap = &q - &r.value;
            Ok(SandwichRow {
                delta: d.clone(),
                lower_bound_holds: !gap.is_negative(),
                gap_float: gap.to_f64(),
                biorthogonal: gram_matrix(&s, &basis)? == Matrix::identity(basis.dim()),
                continuous: s.continuity_flag,
                q_norm: q,
                gap,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SandwichReport {
        lambda: r.value.clone(),
        monotone: rows.windows(2).all(|w| w[1].gap <= w[0].gap),
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefinedResult {
    pub level: usize,
    pub result: MinProjResult,
    pub values_equal: bool,
    /// `None` unless both levels are known unique.
    pub optimum_matches_pushforward: Option<bool>,
    pub consistent: bool,
}

/// `lambda(D_m V)` compared against a level-1 solve.
pub fn refined_min_projection(
    base: &MinProjResult,
    m: usize,
    probe_uniqueness: bool,
) -> Result<RefinedResult> {
    let v = base.optimal.subspace();
    let result = if m == 1 {
        base.clone()
    } else {
        solve_min_projection(&duplicate_subspace(v, m)?, probe_uniqueness)?
    };
    let values_equal = result.value == base.value;
    let optimum_matches_pushforward = match (base.unique, result.unique) {
        (Some(true), Some(true)) => {
            let pf = pushforward_projection(&base.optimal, m)?;
            Some(pf.functionals() == result.optimal.functionals())
        }
        _ => None,
    };
    Ok(RefinedResult {
        level: m,
        values_equal,
        consistent: values_equal && optimum_matches_pushforward != Some(false),
        optimum_matches_pushforward,
        result,
    })
}

pub fn refinement_sweep(
    base: &MinProjResult,
    levels: &[usize],
    probe_uniqueness: bool,
) -> Result<Vec<RefinedResult>> {
    levels
        .par_iter()
        .map(|&m| refined_min_projection(base, m, probe_uniqueness))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObstructionVerdict {
    ObstructionHolds,
    NoObstruction,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankSample {
    pub coding: Vec<Rational>,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObstructionCertificate {
    pub dim: usize,
    /// `w_l = int y_l`.
    pub integrals: Vec<Rational>,
    pub samples: Vec<RankSample>,
    pub verdict: ObstructionVerdict,
    /// For `n = 1`: the constant coding `c = 1/w` with `c w = 1`.
    pub witness: Option<Rational>,
}

/// Constant codings `g_k = c_k` give `int g_k y_l = c_k w_l`, a matrix of
/// rank at most one, which is never `I_n` for `n >= 2`.
pub fn wstar_obstruction_certificate(v: &SubspaceL1) -> Result<ObstructionCertificate> {
    let copy = piecewise_copy(v, 1)?;
    let w = copy.integrals();
    let n = w.len();
    let mut codings: Vec<Vec<Rational>> = (0..n)
        .map(|k| (0..n).map(|j| Rational::from((j == k) as i64)).collect())
        .collect();
    codings.push(vec![Rational::one(); n]);
    codings.push((0..n).map(|j| Rational::from(j as i64 + 1)).collect());
    codings.push((0..n).map(|j| Rational::frac(if j % 2 == 0 { 1 } else { -1 }, j as i64 + 1)).collect());
    let samples: Vec<RankSample> = codings
        .into_iter()
        .map(|c| {
            let outer = Matrix::from_rows(
                c.iter()
                    .map(|ck| w.iter().map(|wl| ck * wl).collect())
                    .collect(),
            )
            .expect("square rows");
            RankSample {
                rank: mat_rank(&outer),
                coding: c,
            }
        })
        .collect();
    if samples.iter().any(|s| s.rank > 1) {
        return Err(Error::Solver("outer product of rank > 1".into()));
    }
    let (verdict, witness) = if n == 1 && !w[0].is_zero() {
        (ObstructionVerdict::NoObstruction, Some(w[0].recip()?))
    } else {
        (ObstructionVerdict::ObstructionHolds, None)
    };
    Ok(ObstructionCertificate {
        dim: n,
        integrals: w,
        samples,
        verdict,
        witness,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Attained,
    NotAttained,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimitSign {
    Positive,
    Negative,
    Mixed,
}

/// Atoms other than the listed ones, accumulating at one point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tail {
    pub accumulation_point: Rational,
    pub mass_bound: Rational,
    pub sign: LimitSign,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomicMeasure {
    pub atoms: Vec<(Rational, Rational)>,
    pub tail: Option<Tail>,
}

impl AtomicMeasure {
    /// `sum_m 2^{-m-1} delta_{1/m} - delta_0 / 2`, listing the first
    /// `listed` atoms of the sum and folding the rest into the tail.
    pub fn hyperplane_example(listed: u32) -> AtomicMeasure {
        let half = Rational::frac(1, 2);
        let mut atoms = vec![(Rational::zero(), -&half)];
        for m in 1..=listed as i64 {
            atoms.push((Rational::frac(1, m), &half * Rational::from(2).pow(-(m as i32))));
        }
        AtomicMeasure {
            atoms,
            tail: Some(Tail {
                accumulation_point: Rational::zero(),
                mass_bound: half * Rational::from(2).pow(-(listed as i32)),
                sign: LimitSign::Positive,
            }),
        }
    }

    fn validate(&self) -> Result<()> {
        let unit = |t: &Rational| !t.is_negative() && t <= &Rational::one();
        if let Some((t, _)) = self.atoms.iter().find(|(t, _)| !unit(t)) {
            return Err(Error::Malformed(format!("atom at {t} outside [0,1]")));
        }
        if let Some(tail) = &self.tail {
            if !unit(&tail.accumulation_point) {
                return Err(Error::Malformed(format!(
                    "accumulation point {} outside [0,1]",
                    tail.accumulation_point
                )));
            }
            if !tail.mass_bound.is_positive() {
                return Err(Error::Malformed(format!(
                    "tail mass bound {} must be positive",
                    tail.mass_bound
                )));
            }
        }
        Ok(())
    }

    /// Total variation, and whether it is exact (no tail).
    pub fn total_variation(&self) -> (Rational, bool) {
        let listed: Rational = self.atoms.iter().map(|(_, w)| w.abs()).sum();
        match &self.tail {
            None => (listed, true),
            Some(t) => (listed + &t.mass_bound, false),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttainmentCheck {
    pub verdict: Verdict,
    pub reason: String,
}

/// Whether the functional `h -> int h dmu` on `C[0,1]` attains its norm,
/// i.e. whether some continuous `h` with `|h| <= 1` equals `sign(w)` at
/// every atom.
pub fn atomic_attainment_check(mu: &AtomicMeasure) -> Result<AttainmentCheck> {
    mu.validate()?;
    let Some(tail) = &mu.tail else {
        return Ok(AttainmentCheck {
            verdict: Verdict::Attained,
            reason: "finitely many atoms: interpolate the signs".into(),
        });
    };
    let tail_sign = match tail.sign {
        LimitSign::Positive => 1,
        LimitSign::Negative => -1,
        LimitSign::Mixed => {
            return Ok(AttainmentCheck {
                verdict: Verdict::Inconclusive,
                reason: "tail sign does not settle".into(),
            })
        }
    };
    let at_point: Rational = mu
        .atoms
        .iter()
        .filter(|(t, _)| t == &tail.accumulation_point)
        .map(|(_, w)| w.clone())
        .sum();
    if at_point.signum() == -tail_sign {
        Ok(AttainmentCheck {
            verdict: Verdict::NotAttained,
            reason: format!(
                "h must tend to {tail_sign} along the atoms accumulating at {} but equal {} there",
                tail.accumulation_point,
                -tail_sign
            ),
        })
    } else {
        Ok(AttainmentCheck {
            verdict: Verdict::Attained,
            reason: format!(
                "signs agree at the accumulation point {}: interpolate the listed atoms",
                tail.accumulation_point
            ),
        })
    }
}

/// A continuous piecewise-linear function by its breakpoint values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseLinear {
    pub breakpoints: Vec<Rational>,
    pub values: Vec<Rational>,
}

impl PiecewiseLinear {
    pub fn new(breakpoints: Vec<Rational>, values: Vec<Rational>) -> Result<Self> {
        if breakpoints.len() < 2
            || breakpoints.len() != values.len()
            || !breakpoints[0].is_zero()
            || breakpoints.last() != Some(&Rational::one())
            || breakpoints.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(Error::Malformed(
                "need matching values on breakpoints increasing from 0 to 1".into(),
            ));
        }
        Ok(PiecewiseLinear { breakpoints, values })
    }

    pub fn identity() -> Self {
        PiecewiseLinear::new(vec![Rational::zero(), Rational::one()], vec![Rational::zero(), Rational::one()])
            .expect("valid")
    }
}

/// Whether `g -> int f g` on `L1[0,1]` attains its norm `ess sup |f|`:
/// exactly when `|f|` sits at its maximum on a segment of positive length.
pub fn esssup_attainment_check(f: &PiecewiseLinear) -> AttainmentCheck {
    let max = f
        .values
        .iter()
        .map(Rational::abs)
        .reduce(Rational::max)
        .expect("nonempty");
    let plateau = (0..f.values.len() - 1)
        .find(|&i| f.values[i] == f.values[i + 1] && f.values[i].abs() == max);
    match plateau {
        Some(i) => AttainmentCheck {
            verdict: Verdict::Attained,
            reason: format!(
                "|f| = {max} on [{}, {}]",
                f.breakpoints[i],
                f.breakpoints[i + 1]
            ),
        },
        None => AttainmentCheck {
            verdict: Verdict::NotAttained,
            reason: format!("|f| reaches {max} only at isolated points"),
        },
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Attainment {
    NotAttainedByWstarObstruction,
    AttainedHyperplane,
    NotAttainedHyperplane,
    Unknown,
}

/// Evidence offered to the ladder.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LadderEvidence {
    pub obstruction: Option<ObstructionCertificate>,
    pub levels: Vec<LevelEvidence>,
    pub hyperplane: Option<AttainmentCheck>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelEvidence {
    pub level: usize,
    pub value: Rational,
    pub unique: Option<bool>,
    pub consistent: bool,
}

impl From<&RefinedResult> for LevelEvidence {
    fn from(r: &RefinedResult) -> Self {
        LevelEvidence {
            level: r.level,
            value: r.result.value.clone(),
            unique: r.result.unique,
            consistent: r.consistent,
        }
    }
}

/// Required refinement levels before non-attainment is reported.
pub const DEFAULT_LADDER_LEVELS: [usize; 4] = [1, 2, 3, 4];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderReport {
    /// `lambda(W, M[0,1])`.
    pub w_value: Rational,
    /// `lambda(Y, C[0,1]) = 1 + w_value`.
    pub y_value: Rational,
    pub codim: usize,
    pub bounds_ok: bool,
    pub attainment: Attainment,
    pub certificates: LadderEvidence,
}

/// `lambda(Y) = 1 + lambda(W)`, with non-attainment issued only on exact
/// certificates: the rank obstruction together with unique, consistent
/// optima at every level in `required_levels`, or a hyperplane check.
pub fn duality_ladder(
    w_value: &Rational,
    codim: usize,
    evidence: LadderEvidence,
    required_levels: &[usize],
) -> LadderReport {
    let y_value = Rational::one() + w_value;
    let bounds_ok = y_value >= Rational::from(2) && w_value.square() <= Rational::from(codim as i64);
    let levels_ok = required_levels.iter().all(|m| {
        evidence
            .levels
            .iter()
            .any(|l| l.level == *m && l.unique == Some(true) && l.consistent && &l.value == w_value)
    });
    let attainment = match (&evidence.hyperplane, &evidence.obstruction) {
        (Some(h), _) if codim == 1 => match h.verdict {
            Verdict::Attained => Attainment::AttainedHyperplane,
            Verdict::NotAttained => Attainment::NotAttainedHyperplane,
            Verdict::Inconclusive => Attainment::Unknown,
        },
        (_, Some(o))
            if o.verdict == ObstructionVerdict::ObstructionHolds && o.dim == codim && levels_ok =>
        {
            Attainment::NotAttainedByWstarObstruction
        }
        _ => Attainment::Unknown,
    };
    LadderReport {
        w_value: w_value.clone(),
        y_value,
        codim,
        bounds_ok,
        attainment,
        certificates: evidence,
    }
}

/// Solves `W` at each level, attaches the obstruction certificate, and
/// climbs the ladder.
pub fn ladder_for_subspace(
    w: &SubspaceL1,
    levels: &[usize],
    base: Option<&MinProjResult>,
) -> Result<LadderReport> {
    let owned;
    let base = match base {
        Some(b) if b.unique.is_some() => b,
        _ => {
            owned = solve_min_projection(w, true)?;
            &owned
        }
    };
    let refined = refinement_sweep(base, levels, true)?;
    let evidence = LadderEvidence {
        obstruction: Some(wstar_obstruction_certificate(w)?),
        levels: refined.iter().map(LevelEvidence::from).collect(),
        hyperplane: None,
    };
    Ok(duality_ladder(&base.value, w.dim(), evidence, levels))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn diag() -> SubspaceL1 {
        SubspaceL1::from_i64_vectors(&[&[1, 1]]).unwrap()
    }

    #[test]
    fn piecewise_copy_examples() {
        let v = diag();
        assert_eq!(piecewise_copy(&v, 1).unwrap().coefficients, v);
        let c = piecewise_copy(&v, 2).unwrap();
        assert_eq!(c.coefficients.basis_vector(0), vec![q("1/2"); 4]);
        let full = SubspaceL1::coordinate(2, 2).unwrap();
        let c = piecewise_copy(&full, 1).unwrap();
        assert_eq!(c.total_variation(&[q("1"), q("-1")]).unwrap(), q("2"));
        assert_eq!(c.partition.cell(1, 0), (q("1/2"), q("1")));
    }

    #[test]
    fn extract_coding_identity() {
        let full = SubspaceL1::coordinate(2, 2).unwrap();
        let r = solve_min_projection(&full, false).unwrap();
        let basis = piecewise_copy(&full, 1).unwrap();
        let c = extract_coding(&r, &basis.partition).unwrap();
        assert_eq!(c.values[0], vec![Segment::constant(q("1")), Segment::constant(q("0"))]);
        assert!(!c.continuity_flag);
        assert_eq!(gram_matrix(&c, &basis).unwrap(), Matrix::identity(2));
        assert_eq!(q_norm(&c, &basis).unwrap(), q("1"));
        let wrong = UniformPartition::new(3, 1).unwrap();
        assert!(extract_coding(&r, &wrong).is_err());
    }

    #[test]
    fn q_norm_of_constant_coding() {
        let v = SubspaceL1::from_vectors(&[vec![q("1/2"), q("1/2")]]).unwrap();
        let basis = piecewise_copy(&v, 1).unwrap();
        let c = CodingFamily::new(vec![q("0"), q("1")], vec![vec![Segment::constant(q("1"))]]).unwrap();
        assert!(c.continuity_flag);
        assert_eq!(q_norm(&c, &basis).unwrap(), q("1"));
    }

    #[test]
    fn step_coding_norm_matches_lp() {
        let v = SubspaceL1::from_i64_vectors(&[&[1, 2, 0, -1], &[0, 1, 3, 1]]).unwrap();
        let base = solve_min_projection(&v, false).unwrap();
        for m in [1, 2, 3] {
            let r = refined_min_projection(&base, m, false).unwrap();
            let basis = piecewise_copy(&v, m).unwrap();
            let c = extract_coding(&r.result, &basis.partition).unwrap();
            assert_eq!(gram_matrix(&c, &basis).unwrap(), Matrix::identity(2));
            assert_eq!(q_norm(&c, &basis).unwrap(), r.result.value);
            assert!(r.values_equal);
        }
    }

    #[test]
    fn smoothing_without_jumps_is_identity() {
        let v = diag();
        let r = solve_min_projection(&v, false).unwrap();
        let basis = piecewise_copy(&v, 1).unwrap();
        let c = extract_coding(&r, &basis.partition).unwrap();
        assert!(c.jumps().is_empty());
        let s = smooth_coding(&c, &q("1/8"), &basis).unwrap();
        assert_eq!(s.values, c.values);
        assert!(smooth_coding(&c, &q("1/4"), &basis).is_err());
    }

    #[test]
    fn smoothing_two_cells() {
        let full = SubspaceL1::coordinate(2, 2).unwrap();
        let r = solve_min_projection(&full, false).unwrap();
        let basis = piecewise_copy(&full, 1).unwrap();
        let c = extract_coding(&r, &basis.partition).unwrap();
        let delta = q("1/8");
        let s = smooth_coding(&c, &delta, &basis).unwrap();
        assert!(s.continuity_flag);
        assert_eq!(gram_matrix(&s, &basis).unwrap(), Matrix::identity(2));
        // Before correction each ramp half loses 1/4 of its width in mass,
        // so the Gram entries move by at most delta.
        let ramped = smooth_coding_uncorrected(&c, &delta);
        let g = gram_matrix(&ramped, &basis).unwrap();
        for k in 0..2 {
            for l in 0..2 {
                let dev = (&g[(k, l)] - &Matrix::identity(2)[(k, l)]).abs();
                assert!(dev <= delta, "{dev}");
            }
        }
    }

    fn smooth_coding_uncorrected(c: &CodingFamily, delta: &Rational) -> CodingFamily {
        // Same ramps, built directly for the two-cell step coding.
        let hd = delta / Rational::from(2);
        let bp = vec![q("0"), q("1/2") - &hd, q("1/2") + &hd, q("1")];
        let values = c
            .values
            .iter()
            .map(|g| {
                vec![
                    g[0].clone(),
                    Segment { left: g[0].right.clone(), right: g[1].left.clone() },
                    g[1].clone(),
                ]
            })
            .collect();
        CodingFamily::new(bp, values).unwrap()
    }

    #[test]
    fn obstruction_examples() {
        let two = SubspaceL1::from_i64_vectors(&[&[1, 0, 1], &[0, 1, 1]]).unwrap();
        let cert = wstar_obstruction_certificate(&two).unwrap();
        assert_eq!(cert.verdict, ObstructionVerdict::ObstructionHolds);
        let four = SubspaceL1::coordinate(4, 5).unwrap();
        assert_eq!(
            wstar_obstruction_certificate(&four).unwrap().verdict,
            ObstructionVerdict::ObstructionHolds
        );
        let ones = SubspaceL1::all_ones(3).unwrap();
        let cert = wstar_obstruction_certificate(&ones).unwrap();
        assert_eq!(cert.verdict, ObstructionVerdict::NoObstruction);
        assert_eq!(cert.witness, Some(q("1/3")));
        let balanced = SubspaceL1::from_i64_vectors(&[&[1, -1]]).unwrap();
        assert_eq!(
            wstar_obstruction_certificate(&balanced).unwrap().verdict,
            ObstructionVerdict::ObstructionHolds
        );
    }

    #[test]
    fn refined_examples() {
        let base = solve_min_projection(&diag(), true).unwrap();
        for m in [1, 2, 3] {
            let r = refined_min_projection(&base, m, true).unwrap();
            assert_eq!(r.result.value, q("1"));
            assert!(r.consistent);
        }
        let axis = SubspaceL1::coordinate(1, 2).unwrap();
        let base = solve_min_projection(&axis, true).unwrap();
        let r = refined_min_projection(&base, 2, true).unwrap();
        assert_eq!(r.optimum_matches_pushforward, None);
        assert!(r.consistent);
    }

    #[test]
    fn ladder_examples() {
        let l = duality_ladder(&q("1"), 1, LadderEvidence::default(), &[]);
        assert_eq!(l.y_value, q("2"));
        assert!(l.bounds_ok);
        let l = duality_ladder(&q("3/2"), 2, LadderEvidence::default(), &[]);
        assert!(!l.bounds_ok);
        assert_eq!(l.attainment, Attainment::Unknown);
    }

    #[test]
    fn atomic_examples() {
        let mu = AtomicMeasure::hyperplane_example(6);
        assert_eq!(atomic_attainment_check(&mu).unwrap().verdict, Verdict::NotAttained);
        let (tv, exact) = mu.total_variation();
        assert_eq!(tv, q("1"));
        assert!(!exact);
        let point = AtomicMeasure { atoms: vec![(q("1/2"), q("1"))], tail: None };
        assert_eq!(atomic_attainment_check(&point).unwrap().verdict, Verdict::Attained);
        let mut positive = mu.clone();
        positive.atoms[0].1 = q("1/2");
        assert_eq!(atomic_attainment_check(&positive).unwrap().verdict, Verdict::Attained);
        let mut mixed = mu.clone();
        mixed.tail.as_mut().unwrap().sign = LimitSign::Mixed;
        assert_eq!(atomic_attainment_check(&mixed).unwrap().verdict, Verdict::Inconclusive);
        let mut bad = mu;
        bad.tail.as_mut().unwrap().accumulation_point = q("2");
        assert!(atomic_attainment_check(&bad).is_err());
    }

    #[test]
    fn esssup_examples() {
        assert_eq!(esssup_attainment_check(&PiecewiseLinear::identity()).verdict, Verdict::NotAttained);
        let one = PiecewiseLinear::new(vec![q("0"), q("1")], vec![q("1"), q("1")]).unwrap();
        assert_eq!(esssup_attainment_check(&one).verdict, Verdict::Attained);
        let plateau = PiecewiseLinear::new(
            vec![q("0"), q("1/4"), q("1/2"), q("1")],
            vec![q("0"), q("-1"), q("-1"), q("1/2")],
        )
        .unwrap();
        assert_eq!(esssup_attainment_check(&plateau).verdict, Verdict::Attained);
    }
}
