//! Multivariate polynomials over ℚ and polynomial self-maps of ℚⁿ.
//!
//! Used to write the action of a group element on `U ≅ ℚⁿ` (in first-kind
//! coordinates) as explicit polynomials, and to compare such maps exactly.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lie::NilpotentLieAlgebra;
use crate::matrix::Matrix;
use crate::rational::{self, Rational};

/// Sparse polynomial; terms keyed by exponent vectors in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, Rational::one());
        p
    }

    /// `Σ cᵢ xᵢ`.
    pub fn linear(coeffs: &[Rational]) -> Self {
        let n = coeffs.len();
        let mut p = Self::zero(n);
        for (i, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = 1;
            p.add_term(e, c.clone());
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    fn add_term(&mut self, e: Vec<u32>, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e.clone()).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Self {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter().zip(x).fold(c.clone(), |acc, (&k, xi)| {
                    acc * num_traits::pow(xi.clone(), k as usize)
                })
            })
            .fold(Rational::zero(), |a, b| a + b)
    }

    /// Substitute `xᵢ ↦ qᵢ`.
    pub fn compose(&self, q: &[MPoly]) -> Result<MPoly> {
        if q.len() != self.nvars {
            return Err(Error::DimensionMismatch(format!(
                "substituting {} polynomials into {} variables",
                q.len(),
                self.nvars
            )));
        }
        let m = q.first().map_or(0, |p| p.nvars);
        let mut powers: Vec<Vec<MPoly>> = q
            .iter()
            .map(|p| vec![MPoly::constant(m, Rational::one()), p.clone()])
            .collect();
        let mut out = MPoly::zero(m);
        for (e, c) in &self.terms {
            let mut term = MPoly::constant(m, c.clone());
            for (i, &k) in e.iter().enumerate() {
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().unwrap() * &q[i];
                    powers[i].push(next);
                }
                if k > 0 {
                    term = &term * &powers[i][k as usize];
                }
            }
            out = &out + &term;
        }
        Ok(out)
    }
}

impl Add for &MPoly {
    type Output = MPoly;
    fn add(self, rhs: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            let slot = out.terms.entry(e.clone()).or_insert_with(Rational::zero);
            *slot += c;
        }
        out.terms.retain(|_, v| !v.is_zero());
        out
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        MPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl Sub for &MPoly {
    type Output = MPoly;
    fn sub(self, rhs: &MPoly) -> MPoly {
        self + &(-rhs)
    }
}

impl Mul for &MPoly {
    type Output = MPoly;
    fn mul(self, rhs: &MPoly) -> MPoly {
        let mut out = MPoly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                let slot = out.terms.entry(e).or_insert_with(Rational::zero);
                *slot += c1 * c2;
            }
        }
        out.terms.retain(|_, v| !v.is_zero());
        out
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            match (idx, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let a = c.abs();
            let monomial: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| {
                    if k == 1 {
                        format!("x{}", i + 1)
                    } else {
                        format!("x{}^{k}", i + 1)
                    }
                })
                .collect();
            if monomial.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{}", monomial.join("*"))?;
            } else {
                write!(f, "{a}*{}", monomial.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Serialized as a list of `[exponents, "coeff"]` pairs in lexicographic order.
impl Serialize for MPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.terms.len()))?;
        for (e, c) in &self.terms {
            seq.serialize_element(&(e, rational::format(c)))?;
        }
        seq.end()
    }
}

/// A polynomial map `ℚⁿ → ℚⁿ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct PolynomialMap {
    components: Vec<MPoly>,
}

impl PolynomialMap {
    pub fn new(components: Vec<MPoly>) -> Self {
        Self { components }
    }

    pub fn identity(n: usize) -> Self {
        Self::new((0..n).map(|i| MPoly::var(n, i)).collect())
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[MPoly] {
        &self.components
    }

    pub fn degree(&self) -> u32 {
        self.components
            .iter()
            .filter_map(MPoly::degree)
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, x: &[Rational]) -> Vec<Rational> {
        self.components.iter().map(|p| p.eval(x)).collect()
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &PolynomialMap) -> Result<PolynomialMap> {
        self.components
            .iter()
            .map(|p| p.compose(&inner.components))
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.dim())
    }
}

/// Dense matrix with polynomial entries; enough algebra for exp/log series.
#[derive(Clone, Debug, PartialEq)]
struct PolyMatrix {
    n: usize,
    data: Vec<MPoly>,
}

impl PolyMatrix {
    fn constant(m: &Matrix, nvars: usize) -> Self {
        Self {
            n: m.rows(),
            data: m
                .entries()
                .iter()
                .map(|c| MPoly::constant(nvars, c.clone()))
                .collect(),
        }
    }

    fn identity(n: usize, nvars: usize) -> Self {
        Self::constant(&Matrix::identity(n), nvars)
    }

    fn is_zero(&self) -> bool {
        self.data.iter().all(MPoly::is_zero)
    }

    fn add(&self, o: &Self) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect(),
        }
    }

    fn scale(&self, c: &Rational) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|a| a.scale(c)).collect(),
        }
    }

    fn mul(&self, o: &Self) -> Self {
        let n = self.n;
        let nvars = self.data.first().map_or(0, MPoly::nvars);
        let mut data = vec![MPoly::zero(nvars); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = &self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &o.data[k * n + j];
                    if !b.is_zero() {
                        data[i * n + j] = &data[i * n + j] + &(a * b);
                    }
                }
            }
        }
        Self { n, data }
    }

    fn exp_nilpotent(&self, nvars: usize) -> Self {
        let mut acc = Self::identity(self.n, nvars);
        let mut term = Self::identity(self.n, nvars);
        for k in 1..self.n.max(1) {
            term = term.mul(self).scale(&rational::frac(1, k as i64));
            if term.is_zero() {
                break;
            }
            acc = acc.add(&term);
        }
        acc
    }

    /// `log` of a matrix that is unipotent at every rational point.
    fn log_unipotent(&self, nvars: usize) -> Self {
        let x = self.add(&Self::identity(self.n, nvars).scale(&-Rational::one()));
        let mut acc = Self::constant(&Matrix::zeros(self.n, self.n), nvars);
        let mut power = x.clone();
        for k in 1..self.n.max(1) {
            if power.is_zero() {
                break;
            }
            let c = rational::frac(if k % 2 == 1 { 1 } else { -1 }, k as i64);
            acc = acc.add(&power.scale(&c));
            power = power.mul(&x);
        }
        acc
    }
}

/// The map `x ↦ log(L · exp(φx) · R)` in first-kind coordinates of `alg`,
/// for group elements `L, R` of `U` and an automorphism `φ`.
pub fn affine_log_map(
    alg: &NilpotentLieAlgebra,
    left: &Matrix,
    phi: &Matrix,
    right: &Matrix,
) -> Result<PolynomialMap> {
    let d = alg.dim();
    let n = alg.ambient_dim()?;
    let basis = alg.ambient_basis().unwrap_or_default();
    let (positions, inverse) = alg.extractor()?;

    let phi_x: Vec<MPoly> = (0..d).map(|i| MPoly::linear(phi.row(i))).collect();
    let mut x = PolyMatrix::constant(&Matrix::zeros(n, n), d);
    for (e, p) in basis.iter().zip(&phi_x) {
        let term = PolyMatrix {
            n,
            data: e.entries().iter().map(|c| p.scale(c)).collect(),
        };
        x = x.add(&term);
    }
    let g = PolyMatrix::constant(left, d)
        .mul(&x.exp_nilpotent(d))
        .mul(&PolyMatrix::constant(right, d));
    let l = g.log_unipotent(d);

    let picked: Vec<&MPoly> = positions.iter().map(|&(i, j)| &l.data[i * n + j]).collect();
    let components = (0..d)
        .map(|k| {
            picked
                .iter()
                .zip(inverse.row(k))
                .fold(MPoly::zero(d), |acc, (p, c)| &acc + &p.scale(c))
        })
        .collect();
    Ok(PolynomialMap::new(components))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    #[test]
    fn arithmetic_and_eval() {
        let x = MPoly::var(2, 0);
        let y = MPoly::var(2, 1);
        let p = &(&x * &y) + &MPoly::constant(2, int(3));
        assert_eq!(p.degree(), Some(2));
        assert_eq!(p.eval(&[int(2), frac(1, 2)]), int(4));
        assert!((&p - &p).is_zero());
        assert_eq!(p.to_string(), "x1*x2 + 3");
        let q = p.compose(&[&y + &y, x.clone()]).unwrap();
        assert_eq!(q.eval(&[int(1), int(5)]), int(13));
    }

    #[test]
    fn heisenberg_translation() {
        let h = NilpotentLieAlgebra::heisenberg();
        let u = h.exp_coords(&[int(1), int(0), int(0)]).unwrap();
        let m = affine_log_map(&h, &u, &Matrix::identity(3), &Matrix::identity(3)).unwrap();
        // log(exp(e1)·exp(x)) = x + e1 + ½[e1, x]
        let expected = vec![
            &MPoly::var(3, 0) + &MPoly::constant(3, int(1)),
            MPoly::var(3, 1),
            &MPoly::var(3, 2) + &MPoly::var(3, 1).scale(&frac(1, 2)),
        ];
        assert_eq!(m.components(), expected.as_slice());
        assert_eq!(m.degree(), 1);
    }

    #[test]
    fn serialization_order() {
        let p = &MPoly::var(2, 1) + &MPoly::constant(2, frac(-1, 2));
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"[[[0,0],"-1/2"],[[0,1],"1"]]"#);
    }
}
