//! Chevalley–Eilenberg cohomology of a nilpotent Lie algebra and its
//! T-invariant part.
//!
//! Cochains of degree `k` use the basis `e_I* = e_{i₁}* ∧ … ∧ e_{i_k}*` over
//! sorted index tuples `I`, in lexicographic order. The differential is
//! `(dω)(x₀,…,x_k) = Σ_{i<j} (−1)^{i+j} ω([xᵢ,xⱼ], x₀,…,x̂ᵢ,…,x̂ⱼ,…,x_k)`.

use std::collections::HashMap;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lie::NilpotentLieAlgebra;
use crate::linalg::{self, SpanBuilder};
use crate::matrix::Matrix;
use crate::rational::{self, Rational};

pub const DEFAULT_MAX_DIM: usize = 14;

/// Sequential or rayon-parallel evaluation over degrees; results are identical.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Exec {
    #[default]
    Sequential,
    Parallel,
}

impl Exec {
    fn map<T: Send, F>(self, n: usize, f: F) -> Vec<T>
    where
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            Exec::Sequential => (0..n).map(f).collect(),
            Exec::Parallel => (0..n).into_par_iter().map(f).collect(),
        }
    }
}

/// All `k`-element subsets of `0..n` as sorted tuples, lexicographically.
pub fn wedge_basis(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

#[derive(Clone, Debug)]
pub struct CEComplex {
    dim: usize,
    bases: Vec<Vec<Vec<usize>>>,
    /// `differentials[k]` maps degree `k` to degree `k + 1`.
    differentials: Vec<Matrix>,
}

impl CEComplex {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self, k: usize) -> &[Vec<usize>] {
        &self.bases[k]
    }

    pub fn differential(&self, k: usize) -> &Matrix {
        &self.differentials[k]
    }

    pub fn differentials(&self) -> &[Matrix] {
        &self.differentials
    }

    /// `d_{k+1} ∘ d_k = 0` in every degree.
    pub fn is_complex(&self) -> bool {
        self.differentials
            .windows(2)
            .all(|w| (&w[1] * &w[0]).is_zero())
    }
}

fn check_cap(dim: usize, max_dim: usize) -> Result<()> {
    if dim > max_dim {
        return Err(Error::DimensionCap { dim, cap: max_dim });
    }
    Ok(())
}

pub fn build_ce_complex(
    alg: &NilpotentLieAlgebra,
    max_dim: usize,
    exec: Exec,
) -> Result<CEComplex> {
    let n = alg.dim();
    check_cap(n, max_dim)?;
    let bases: Vec<Vec<Vec<usize>>> = (0..=n).map(|k| wedge_basis(n, k)).collect();
    let index: Vec<HashMap<&[usize], usize>> = bases
        .iter()
        .map(|b| {
            b.iter()
                .enumerate()
                .map(|(i, t)| (t.as_slice(), i))
                .collect()
        })
        .collect();
    let differentials = exec.map(n, |k| {
        let mut d = Matrix::zeros(bases[k + 1].len(), bases[k].len());
        for (row, j) in bases[k + 1].iter().enumerate() {
            for a in 0..j.len() {
                for b in a + 1..j.len() {
                    let rest: Vec<usize> = j
                        .iter()
                        .enumerate()
                        .filter(|&(p, _)| p != a && p != b)
                        .map(|(_, &x)| x)
                        .collect();
                    for (m, c) in alg.structure_constant(j[a], j[b]).iter().enumerate() {
                        if c.is_zero() || rest.contains(&m) {
                            continue;
                        }
                        let pos = rest.iter().filter(|&&r| r < m).count();
                        let mut i = rest.clone();
                        i.insert(pos, m);
                        let col = index[k][i.as_slice()];
                        let odd = (a + b + pos) % 2 == 1;
                        if odd {
                            d[(row, col)] -= c;
                        } else {
                            d[(row, col)] += c;
                        }
                    }
                }
            }
        }
        d
    });
    let c = CEComplex {
        dim: n,
        bases,
        differentials,
    };
    if !c.is_complex() {
        return Err(Error::InvalidAlgebra(
            "d ∘ d ≠ 0 on the cochain complex".into(),
        ));
    }
    Ok(c)
}

fn betti_from(dims: &[usize], ranks: &[usize]) -> Vec<usize> {
    (0..dims.len())
        .map(|k| {
            let out = ranks.get(k).copied().unwrap_or(0);
            let inc = if k > 0 { ranks[k - 1] } else { 0 };
            dims[k] - out - inc
        })
        .collect()
}

pub fn cohomology_ranks(c: &CEComplex, exec: Exec) -> Vec<usize> {
    let ranks = exec.map(c.differentials.len(), |k| linalg::rank(&c.differentials[k]));
    let dims: Vec<usize> = c.bases.iter().map(Vec::len).collect();
    betti_from(&dims, &ranks)
}

/// Pullback of `φ` on `Λᵏ𝔲*`: column `I`, row `J` holds `det φ[I, J]`.
pub fn exterior_pullback(phi: &Matrix, basis: &[Vec<usize>]) -> Result<Matrix> {
    let m = basis.len();
    let mut out = Matrix::zeros(m, m);
    for (col, i) in basis.iter().enumerate() {
        for (row, j) in basis.iter().enumerate() {
            out[(row, col)] = if i.is_empty() {
                Rational::one()
            } else {
                linalg::determinant(&phi.select(i, j))?
            };
        }
    }
    Ok(out)
}

/// For each T-generator, its action on every cochain degree.
#[derive(Clone, Debug)]
pub struct TActionOnCochains {
    pub matrices: Vec<Vec<Matrix>>,
}

/// Builds the cochain action of the given automorphisms and checks that each
/// matrix commutes with `d`.
pub fn t_action(c: &CEComplex, hol: &[Matrix], exec: Exec) -> Result<TActionOnCochains> {
    let matrices = hol
        .iter()
        .map(|phi| {
            exec.map(c.dim + 1, |k| exterior_pullback(phi, &c.bases[k]))
                .into_iter()
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    for per_degree in &matrices {
        for (k, d) in c.differentials.iter().enumerate() {
            if d * &per_degree[k] != &per_degree[k + 1] * d {
                return Err(Error::CommutationFailure { degree: k });
            }
        }
    }
    Ok(TActionOnCochains { matrices })
}

/// Fixed cochains in each degree (as basis columns) with the restricted differentials.
#[derive(Clone, Debug)]
pub struct InvariantComplex {
    pub bases: Vec<Matrix>,
    pub differentials: Vec<Matrix>,
}

impl InvariantComplex {
    pub fn dims(&self) -> Vec<usize> {
        self.bases.iter().map(Matrix::cols).collect()
    }

    pub fn betti(&self) -> Vec<usize> {
        let ranks: Vec<usize> = self.differentials.iter().map(linalg::rank).collect();
        betti_from(&self.dims(), &ranks)
    }

    pub fn is_complex(&self) -> bool {
        self.differentials
            .windows(2)
            .all(|w| (&w[1] * &w[0]).is_zero())
    }
}

pub fn invariant_subcomplex(
    c: &CEComplex,
    t: &TActionOnCochains,
    exec: Exec,
) -> Result<InvariantComplex> {
    let bases = exec
        .map(c.dim + 1, |k| {
            let gens: Vec<Matrix> = t.matrices.iter().map(|m| m[k].clone()).collect();
            let size = c.bases[k].len();
            linalg::fixed_space(&gens, size).map(|v| Matrix::from_columns(size, &v))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let differentials = exec
        .map(c.dim, |k| {
            let image = &c.differentials[k] * &bases[k];
            linalg::solve_matrix(&bases[k + 1], &image)?
                .ok_or(Error::CommutationFailure { degree: k })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(InvariantComplex {
        bases,
        differentials,
    })
}

/// Dimension of the T-fixed part of `Hᵏ(𝔲)`, computed from the action on
/// cocycle representatives modulo coboundaries.
pub fn invariants_of_cohomology(
    c: &CEComplex,
    t: &TActionOnCochains,
    exec: Exec,
) -> Result<Vec<usize>> {
    exec.map(c.dim + 1, |k| {
        let size = c.bases[k].len();
        let cocycles = if k < c.dim {
            linalg::kernel(&c.differentials[k])
        } else {
            linalg::identity_basis(size)
        };
        let coboundaries: Vec<Vec<Rational>> = if k > 0 {
            let (r, _) = linalg::rref(&c.differentials[k - 1].transpose());
            (0..r.rows())
                .map(|i| r.row(i).to_vec())
                .filter(|v| !linalg::is_zero_vec(v))
                .collect()
        } else {
            Vec::new()
        };
        let mut span = SpanBuilder::new(size);
        for b in &coboundaries {
            span.insert(b);
        }
        let reps: Vec<Vec<Rational>> = cocycles.into_iter().filter(|z| span.insert(z)).collect();
        let h = reps.len();
        if h == 0 {
            return Ok(0);
        }
        let mut cols = reps.clone();
        cols.extend(coboundaries.iter().cloned());
        let frame = Matrix::from_columns(size, &cols);
        let rep_mat = Matrix::from_columns(size, &reps);
        let mut actions = Vec::with_capacity(t.matrices.len());
        for m in &t.matrices {
            let moved = &m[k] * &rep_mat;
            let coeffs = linalg::solve_matrix(&frame, &moved)?
                .ok_or(Error::CommutationFailure { degree: k })?;
            actions.push(coeffs.block(0, 0, h, h));
        }
        Ok(linalg::fixed_space(&actions, h)?.len())
    })
    .into_iter()
    .collect()
}

/// Betti numbers of `H*(𝔲)^T`, computed as the cohomology of the invariant
/// subcomplex and cross-checked against the invariants of `H*(𝔲)`.
pub fn invariant_cohomology(
    c: &CEComplex,
    t: &TActionOnCochains,
    exec: Exec,
) -> Result<Vec<usize>> {
    let via_complex = invariant_subcomplex(c, t, exec)?.betti();
    let via_cohomology = invariants_of_cohomology(c, t, exec)?;
    for (k, (a, b)) in via_complex.iter().zip(&via_cohomology).enumerate() {
        if a != b {
            return Err(Error::CohomologyMismatch {
                degree: k,
                via_complex: *a,
                via_cohomology: *b,
            });
        }
    }
    Ok(via_complex)
}

pub fn euler_characteristic(betti: &[usize]) -> i64 {
    betti
        .iter()
        .enumerate()
        .map(|(k, &b)| if k % 2 == 0 { b as i64 } else { -(b as i64) })
        .sum()
}

pub fn is_palindromic(betti: &[usize]) -> bool {
    betti.iter().eq(betti.iter().rev())
}

/// All automorphisms have positive determinant.
pub fn orientation_preserving(hol: &[Matrix]) -> Result<bool> {
    for h in hol {
        if linalg::determinant(h)? <= Rational::zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BettiReport {
    pub betti_full: Vec<usize>,
    pub betti_invariant: Vec<usize>,
    pub euler: i64,
    /// Euler characteristic of the full complex `Σ (−1)ᵏ dim Λᵏ`.
    pub euler_full: i64,
    pub orientable: bool,
    /// Palindromic invariant Betti numbers, required only when orientable.
    pub duality_ok: bool,
}

pub fn betti_report(
    alg: &NilpotentLieAlgebra,
    hol: &[Matrix],
    max_dim: usize,
    exec: Exec,
) -> Result<BettiReport> {
    let c = build_ce_complex(alg, max_dim, exec)?;
    let t = t_action(&c, hol, exec)?;
    let betti_full = cohomology_ranks(&c, exec);
    let betti_invariant = invariant_cohomology(&c, &t, exec)?;
    let orientable = orientation_preserving(hol)?;
    let dims: Vec<usize> = c.bases.iter().map(Vec::len).collect();
    Ok(BettiReport {
        euler: euler_characteristic(&betti_invariant),
        euler_full: euler_characteristic(&dims),
        duality_ok: !orientable || is_palindromic(&betti_invariant),
        orientable,
        betti_full,
        betti_invariant,
    })
}

/// `χ` of the invariant complex as the average of `det(I − g)` over a finite
/// group of automorphisms: an independent check of the invariant dimensions.
pub fn averaged_euler(group: &[Matrix]) -> Result<Rational> {
    if group.is_empty() {
        return Err(Error::Invalid("empty group".into()));
    }
    let mut total = Rational::zero();
    for g in group {
        let n = g.rows();
        total += linalg::determinant(&(&Matrix::identity(n) - g))?;
    }
    Ok(total / rational::int(group.len() as i64))
}
