//! Jordan–Chevalley decomposition over ℚ.
//!
//! The semisimple part is found without leaving ℚ: with `q` the squarefree
//! part of the characteristic polynomial and `r = q'^{-1} mod q`, the Newton
//! step `x ← x − q(x)·r(x)` started at `x = m` squares the nilpotency order
//! of `q(x)` each round, so it reaches `q(x) = 0` after at most
//! `⌈log₂ n⌉ + 1` rounds. Every iterate is a polynomial in `m`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::Matrix;
use crate::poly::Poly;

/// `m = semisimple + nilpotent`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdditiveJordan {
    pub semisimple: Matrix,
    pub nilpotent: Matrix,
}

/// `g = semisimple · unipotent = unipotent · semisimple`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JordanPair {
    pub semisimple: Matrix,
    pub unipotent: Matrix,
}

fn newton_bound(n: usize) -> usize {
    let mut k = 0;
    while (1usize << k) < n {
        k += 1;
    }
    k + 1
}

pub fn additive_jordan(m: &Matrix) -> Result<AdditiveJordan> {
    let n = m.ensure_square()?;
    if n == 0 {
        return Ok(AdditiveJordan {
            semisimple: m.clone(),
            nilpotent: m.clone(),
        });
    }
    let q = linalg::charpoly(m)?.squarefree_part()?;
    // q and q' are coprime in characteristic zero
    let r = q.derivative().inverse_mod(&q).ok_or_else(|| {
        Error::Invalid("squarefree part shares a factor with its derivative".into())
    })?;

    let mut x = m.clone();
    for _ in 0..=newton_bound(n) {
        let qx = q.eval_matrix(&x)?;
        if qx.is_zero() {
            let nilpotent = m - &x;
            return Ok(AdditiveJordan {
                semisimple: x,
                nilpotent,
            });
        }
        x = &x - &(&qx * &r.eval_matrix(&x)?);
    }
    Err(Error::Invalid(format!(
        "Newton iteration did not converge within {} steps",
        newton_bound(n) + 1
    )))
}

pub fn multiplicative_jordan(g: &Matrix) -> Result<JordanPair> {
    let n = g.ensure_square()?;
    let AdditiveJordan {
        semisimple,
        nilpotent,
    } = additive_jordan(g)?;
    // g invertible <=> its semisimple part is
    let s_inv = linalg::inverse(&semisimple)?;
    let unipotent = &Matrix::identity(n) + &(&s_inv * &nilpotent);
    Ok(JordanPair {
        semisimple,
        unipotent,
    })
}

/// Squarefree minimal polynomial; over ℚ this is diagonalizability over ℚ̄.
pub fn is_semisimple(m: &Matrix) -> Result<bool> {
    Ok(linalg::min_poly(m)?.is_squarefree())
}

pub fn is_nilpotent(m: &Matrix) -> Result<bool> {
    let n = m.ensure_square()?;
    Ok(m.pow(n as u32).is_zero())
}

/// `(m − I)^n = 0`.
pub fn is_unipotent(m: &Matrix) -> Result<bool> {
    let n = m.ensure_square()?;
    is_nilpotent(&(m - &Matrix::identity(n)))
}

/// Minimal polynomial and predicate summary, as the CLI reports it.
#[derive(Clone, Debug, Serialize)]
pub struct PredicateReport {
    pub min_poly: String,
    pub semisimple: bool,
    pub unipotent: bool,
    pub nilpotent: bool,
    pub invertible: bool,
}

pub fn predicates(m: &Matrix) -> Result<PredicateReport> {
    let mp: Poly = linalg::min_poly(m)?;
    Ok(PredicateReport {
        min_poly: mp.to_string(),
        semisimple: mp.is_squarefree() || m.rows() == 0,
        unipotent: is_unipotent(m)?,
        nilpotent: is_nilpotent(m)?,
        invertible: !linalg::determinant(m)?.eq(&num_traits::Zero::zero()),
    })
}
