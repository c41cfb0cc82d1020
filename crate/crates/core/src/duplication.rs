//! The duplication operator `D_m` and its block maps.
//!
//! Coordinate `(j, r)` of `l1^{Nm}` (block `j`, copy `r`, both 0-based) is
//! stored at index `j * m + r`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{Matrix, Rational};
use crate::minproj::{solve_min_projection, MinProjResult, ProjectionL1, SubspaceL1};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DuplicationSpec {
    pub base_dim: usize,
    pub factor: usize,
}

impl DuplicationSpec {
    pub fn new(base_dim: usize, factor: usize) -> Result<Self> {
        if factor == 0 {
            return Err(Error::Domain("duplication factor must be >= 1".into()));
        }
        Ok(DuplicationSpec { base_dim, factor })
    }

    pub fn duplicated_dim(&self) -> usize {
        self.base_dim * self.factor
    }

    pub fn index(&self, block: usize, copy: usize) -> usize {
        block * self.factor + copy
    }
}

/// `D_m`, block sums, and block averaging for one [`DuplicationSpec`].
#[derive(Clone, Copy, Debug)]
pub struct BlockMaps {
    pub spec: DuplicationSpec,
}

impl BlockMaps {
    pub fn new(spec: DuplicationSpec) -> Self {
        BlockMaps { spec }
    }

    fn m(&self) -> Rational {
        Rational::from(self.spec.factor as i64)
    }

    /// `x_j -> (x_j/m, ..., x_j/m)`.
    pub fn duplicate(&self, x: &[Rational]) -> Vec<Rational> {
        let m = self.m();
        x.iter()
            .flat_map(|xj| std::iter::repeat_n(xj / &m, self.spec.factor))
            .collect()
    }

    pub fn block_sum(&self, z: &[Rational]) -> Vec<Rational> {
        z.chunks(self.spec.factor)
            .map(|block| block.iter().sum())
            .collect()
    }

    /// Replaces each block by its mean; a norm-one projection onto
    /// `D_m(l1^N)`.
    pub fn block_average(&self, z: &[Rational]) -> Vec<Rational> {
        let m = self.m();
        z.chunks(self.spec.factor)
            .flat_map(|block| {
                let mean = block.iter().sum::<Rational>() / &m;
                std::iter::repeat_n(mean, block.len())
            })
            .collect()
    }

    /// `Nm x N` matrix of `D_m`.
    pub fn duplicate_matrix(&self) -> Matrix {
        let (n, m) = (self.spec.base_dim, self.spec.factor);
        let mut d = Matrix::zeros(n * m, n);
        let inv = Rational::frac(1, m as i64);
        for j in 0..n {
            for r in 0..m {
                d[(self.spec.index(j, r), j)] = inv.clone();
            }
        }
        d
    }

    /// `N x Nm` matrix of the block sum.
    pub fn block_sum_matrix(&self) -> Matrix {
        let (n, m) = (self.spec.base_dim, self.spec.factor);
        let mut s = Matrix::zeros(n, n * m);
        for j in 0..n {
            for r in 0..m {
                s[(j, self.spec.index(j, r))] = Rational::one();
            }
        }
        s
    }

    /// `Nm x Nm` matrix of block averaging, `D_m S`.
    pub fn block_average_matrix(&self) -> Matrix {
        self.duplicate_matrix()
            .mul(&self.block_sum_matrix())
            .expect("compatible shapes")
    }
}

/// `D_m(V)`, with basis `D_m v_k`.
pub fn duplicate_subspace(v: &SubspaceL1, m: usize) -> Result<SubspaceL1> {
    let maps = BlockMaps::new(DuplicationSpec::new(v.ambient_dim(), m)?);
    SubspaceL1::new(maps.duplicate_matrix().mul(v.basis())?)
}

/// `D_m P D_m^{-1} B_m`, a projection onto `D_m(V)` with the norm of `P`.
///
/// With `P = B U`, the pushforward has functionals `U S` where `S` is the
/// block sum: `D_m^{-1} B_m = S`.
pub fn pushforward_projection(p: &ProjectionL1, m: usize) -> Result<ProjectionL1> {
    let v = p.subspace();
    let maps = BlockMaps::new(DuplicationSpec::new(v.ambient_dim(), m)?);
    let dv = duplicate_subspace(v, m)?;
    let u = p.functionals().mul(&maps.block_sum_matrix())?;
    ProjectionL1::new(dv, u)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub level: usize,
    pub value: Rational,
    pub unique: Option<bool>,
    pub equal_to_base: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvarianceScan {
    pub base_value: Rational,
    pub base_unique: Option<bool>,
    pub rows: Vec<ScanRow>,
    pub all_equal: bool,
}

/// Solves `lambda(D_m V)` at every requested level; uniqueness is probed
/// per level when asked and is reported, not assumed.
pub fn invariance_scan(
    v: &SubspaceL1,
    factors: &[usize],
    probe_uniqueness: bool,
) -> Result<InvarianceScan> {
    let base = solve_min_projection(v, probe_uniqueness)?;
    invariance_scan_from(v, &base, factors, probe_uniqueness)
}

/// As [`invariance_scan`], reusing an existing level-1 solve.
pub fn invariance_scan_from(
    v: &SubspaceL1,
    base: &MinProjResult,
    factors: &[usize],
    probe_uniqueness: bool,
) -> Result<InvarianceScan> {
    let rows = factors
        .par_iter()
        .map(|&m| {
            let r = if m == 1 && (base.unique.is_some() || !probe_uniqueness) {
                base.clone()
            } else {
                solve_min_projection(&duplicate_subspace(v, m)?, probe_uniqueness)?
            };
            Ok(ScanRow {
                level: m,
                equal_to_base: r.value == base.value,
                value: r.value,
                unique: r.unique,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(InvarianceScan {
        base_value: base.value.clone(),
        base_unique: base.unique,
        all_equal: rows.iter().all(|r| r.equal_to_base),
        rows,
    })
}
