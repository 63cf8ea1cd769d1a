//! Nilpotent Lie algebras given by rational structure constants, and the
//! exp/log bridge to unipotent matrix groups.
//!
//! Group multiplication always happens in the ambient matrix realization;
//! the algebra only supplies coordinates. Coordinates are of the first kind:
//! a vector `x` stands for the group element `exp(Σ xᵢ Eᵢ)`.

use std::ops::Range;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jordan;
use crate::linalg::{self, SpanBuilder};
use crate::matrix::Matrix;
use crate::rational::{self, Rational};

/// `log(g) = Σ_{k≥1} (−1)^{k+1} (g − I)^k / k`, a finite sum for unipotent `g`.
pub fn unip_log(g: &Matrix) -> Result<Matrix> {
    let n = g.ensure_square()?;
    if !jordan::is_unipotent(g)? {
        return Err(Error::NotUnipotent);
    }
    let x = g - &Matrix::identity(n);
    let mut acc = Matrix::zeros(n, n);
    let mut power = x.clone();
    for k in 1..n.max(1) {
        if power.is_zero() {
            break;
        }
        let c = rational::frac(if k % 2 == 1 { 1 } else { -1 }, k as i64);
        acc = &acc + &power.scale(&c);
        power = &power * &x;
    }
    Ok(acc)
}

/// Finite exponential series of a nilpotent matrix.
pub fn nilp_exp(x: &Matrix) -> Result<Matrix> {
    let n = x.ensure_square()?;
    if !jordan::is_nilpotent(x)? {
        return Err(Error::NotNilpotent);
    }
    Ok(exp_series(x, n))
}

pub(crate) fn exp_series(x: &Matrix, n: usize) -> Matrix {
    let mut acc = Matrix::identity(n);
    let mut term = Matrix::identity(n);
    for k in 1..n.max(1) {
        term = (&term * x).scale(&rational::frac(1, k as i64));
        if term.is_zero() {
            break;
        }
        acc = &acc + &term;
    }
    acc
}

/// Reads Lie coordinates off ambient matrices: `coords = inverse · (entries at positions)`.
#[derive(Clone, Debug)]
struct Extractor {
    positions: Vec<(usize, usize)>,
    inverse: Matrix,
}

#[derive(Clone, Debug)]
struct Ambient {
    n: usize,
    basis: Vec<Matrix>,
    extractor: Extractor,
}

impl Ambient {
    fn new(basis: Vec<Matrix>, dim: usize) -> Result<Self> {
        if basis.len() != dim {
            return Err(Error::InvalidAlgebra(format!(
                "{} ambient matrices for a {dim}-dimensional algebra",
                basis.len()
            )));
        }
        let n = match basis.first() {
            Some(b) => b.ensure_square()?,
            None => 0,
        };
        for (i, b) in basis.iter().enumerate() {
            if b.rows() != n || b.cols() != n {
                return Err(Error::InvalidAlgebra(format!(
                    "ambient matrix {i} has the wrong size"
                )));
            }
            if !jordan::is_nilpotent(b)? {
                return Err(Error::InvalidAlgebra(format!(
                    "ambient matrix {i} is not nilpotent"
                )));
            }
        }
        // rows of `flat` are the flattened basis matrices
        let flat = Matrix::new(
            dim,
            n * n,
            basis
                .iter()
                .flat_map(|b| b.entries().iter().cloned())
                .collect(),
        )?;
        let (_, pivots) = linalg::rref(&flat);
        if pivots.len() != dim {
            return Err(Error::InvalidAlgebra(
                "ambient matrices are linearly dependent".into(),
            ));
        }
        let square = flat
            .select(&(0..dim).collect::<Vec<_>>(), &pivots)
            .transpose();
        let inverse = linalg::inverse(&square)?;
        let positions = pivots
            .iter()
            .map(|&p| (p / n.max(1), p % n.max(1)))
            .collect();
        Ok(Self {
            n,
            basis,
            extractor: Extractor { positions, inverse },
        })
    }
}

/// Basis adapted to the lower central series: columns of `basis` are Lie
/// coordinate vectors, grouped so that layer `k` spans a complement of
/// `L^{k+1}` in `L^k`.
#[derive(Clone, Debug)]
pub struct Filtration {
    pub basis: Matrix,
    pub inverse: Matrix,
    pub layers: Vec<Range<usize>>,
}

impl Filtration {
    /// Layer-`k` block of the adapted coordinates of `x`.
    pub fn layer_coords(&self, k: usize, x: &[Rational]) -> Vec<Rational> {
        let y = self.inverse.mul_vec(x);
        y[self.layers[k].clone()].to_vec()
    }

    /// Lie vector of layer-`k` adapted coordinates `z`.
    pub fn embed(&self, k: usize, z: &[Rational]) -> Vec<Rational> {
        let d = self.basis.rows();
        let mut y = vec![Rational::zero(); d];
        for (slot, v) in self.layers[k].clone().zip(z) {
            y[slot] = v.clone();
        }
        self.basis.mul_vec(&y)
    }

    /// Induced map of `phi` on the quotient `L^k / L^{k+1}`.
    pub fn layer_map(&self, k: usize, phi: &Matrix) -> Matrix {
        let adapted = &(&self.inverse * phi) * &self.basis;
        let r = self.layers[k].clone();
        adapted.block(r.start, r.start, r.len(), r.len())
    }
}

#[derive(Clone, Debug)]
pub struct NilpotentLieAlgebra {
    labels: Vec<String>,
    constants: Vec<Vec<Vec<Rational>>>,
    ambient: Option<Ambient>,
    lcs: Vec<Vec<Vec<Rational>>>,
}

impl PartialEq for NilpotentLieAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels
            && self.constants == other.constants
            && self.ambient_basis() == other.ambient_basis()
    }
}

impl NilpotentLieAlgebra {
    /// `constants[i][j][k]` is the coefficient of `e_k` in `[e_i, e_j]`.
    pub fn new(
        labels: Vec<String>,
        constants: Vec<Vec<Vec<Rational>>>,
        ambient: Option<Vec<Matrix>>,
    ) -> Result<Self> {
        let dim = labels.len();
        if constants.len() != dim
            || constants
                .iter()
                .any(|r| r.len() != dim || r.iter().any(|c| c.len() != dim))
        {
            return Err(Error::InvalidAlgebra(
                "structure constants have the wrong shape".into(),
            ));
        }
        for i in 0..dim {
            for j in 0..dim {
                if constants[i][j]
                    .iter()
                    .zip(&constants[j][i])
                    .any(|(a, b)| *a != -b.clone())
                {
                    return Err(Error::InvalidAlgebra(format!(
                        "antisymmetry fails for [{}, {}]",
                        labels[i], labels[j]
                    )));
                }
            }
        }
        let mut alg = Self {
            labels,
            constants,
            ambient: None,
            lcs: Vec::new(),
        };
        alg.check_jacobi()?;
        alg.lcs = alg.compute_lcs()?;
        if let Some(basis) = ambient {
            let amb = Ambient::new(basis, dim)?;
            for i in 0..dim {
                for j in i + 1..dim {
                    let lhs = amb.basis[i].commutator(&amb.basis[j]);
                    let rhs = alg.sum_ambient(&amb.basis, &alg.constants[i][j]);
                    if lhs != rhs {
                        return Err(Error::InvalidAlgebra(format!(
                            "ambient bracket of {} and {} does not match the structure constants",
                            alg.labels[i], alg.labels[j]
                        )));
                    }
                }
            }
            alg.ambient = Some(amb);
        }
        Ok(alg)
    }

    /// Sparse bracket table: entries `(i, j, coeffs)` mean `[e_i, e_j] = Σ coeffs_k e_k`.
    pub fn from_brackets(
        labels: Vec<String>,
        brackets: &[(usize, usize, Vec<Rational>)],
        ambient: Option<Vec<Matrix>>,
    ) -> Result<Self> {
        let dim = labels.len();
        let mut c = vec![vec![vec![Rational::zero(); dim]; dim]; dim];
        for (i, j, coeffs) in brackets {
            if *i >= dim || *j >= dim || coeffs.len() != dim {
                return Err(Error::InvalidAlgebra(format!(
                    "bracket entry ({i}, {j}) out of range"
                )));
            }
            if i == j {
                return Err(Error::InvalidAlgebra(format!("[e{i}, e{i}] must vanish")));
            }
            for k in 0..dim {
                c[*i][*j][k] = coeffs[k].clone();
                c[*j][*i][k] = -coeffs[k].clone();
            }
        }
        Self::new(labels, c, ambient)
    }

    pub fn default_labels(dim: usize) -> Vec<String> {
        (1..=dim).map(|i| format!("e{i}")).collect()
    }

    pub fn abelian(dim: usize) -> Self {
        let c = vec![vec![vec![Rational::zero(); dim]; dim]; dim];
        Self::new(Self::default_labels(dim), c, None).expect("abelian algebra")
    }

    /// Abelian ℚⁿ realized by translations `[[I, v], [0, 1]]` in dimension `n + 1`.
    pub fn abelian_translations(dim: usize) -> Self {
        let basis = (0..dim)
            .map(|i| {
                let mut m = Matrix::zeros(dim + 1, dim + 1);
                m[(i, dim)] = Rational::one();
                m
            })
            .collect();
        let c = vec![vec![vec![Rational::zero(); dim]; dim]; dim];
        Self::new(Self::default_labels(dim), c, Some(basis)).expect("abelian translations")
    }

    /// Heisenberg algebra in strictly upper triangular 3×3 matrices:
    /// `e1 = E₁₂, e2 = E₂₃, e3 = E₁₃`, `[e1, e2] = e3`.
    pub fn heisenberg() -> Self {
        let e = |i: usize, j: usize| {
            let mut m = Matrix::zeros(3, 3);
            m[(i, j)] = Rational::one();
            m
        };
        let one = rational::one;
        let z = rational::zero;
        Self::from_brackets(
            Self::default_labels(3),
            &[(0, 1, vec![z(), z(), one()])],
            Some(vec![e(0, 1), e(1, 2), e(0, 2)]),
        )
        .expect("heisenberg algebra")
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn structure_constant(&self, i: usize, j: usize) -> &[Rational] {
        &self.constants[i][j]
    }

    pub fn is_abelian(&self) -> bool {
        self.constants.iter().flatten().flatten().all(Zero::is_zero)
    }

    pub fn bracket(&self, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
        let d = self.dim();
        let mut out = vec![Rational::zero(); d];
        for (i, xi) in x.iter().enumerate().take(d) {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate().take(d) {
                if yj.is_zero() || i == j {
                    continue;
                }
                let f = xi * yj;
                for (o, c) in out.iter_mut().zip(&self.constants[i][j]) {
                    if !c.is_zero() {
                        *o += &f * c;
                    }
                }
            }
        }
        out
    }

    /// Matrix of `ad(x)` in the basis: column `j` is `[x, e_j]`.
    pub fn ad(&self, x: &[Rational]) -> Matrix {
        let cols: Vec<Vec<Rational>> = linalg::identity_basis(self.dim())
            .iter()
            .map(|e| self.bracket(x, e))
            .collect();
        Matrix::from_columns(self.dim(), &cols)
    }

    fn check_jacobi(&self) -> Result<()> {
        let d = self.dim();
        let basis = linalg::identity_basis(d);
        for i in 0..d {
            for j in i + 1..d {
                for k in j + 1..d {
                    let (a, b, c) = (&basis[i], &basis[j], &basis[k]);
                    let t1 = self.bracket(&self.bracket(a, b), c);
                    let t2 = self.bracket(&self.bracket(b, c), a);
                    let t3 = self.bracket(&self.bracket(c, a), b);
                    if t1
                        .iter()
                        .zip(&t2)
                        .zip(&t3)
                        .any(|((x, y), z)| !(x + y + z).is_zero())
                    {
                        return Err(Error::JacobiFailure(i, j, k));
                    }
                }
            }
        }
        Ok(())
    }

    fn compute_lcs(&self) -> Result<Vec<Vec<Vec<Rational>>>> {
        let d = self.dim();
        let basis = linalg::identity_basis(d);
        let mut series = vec![basis.clone()];
        loop {
            let current = series.last().unwrap();
            if current.is_empty() {
                return Ok(series);
            }
            let mut next = SpanBuilder::new(d);
            for e in &basis {
                for v in current {
                    next.insert(&self.bracket(e, v));
                }
            }
            if next.rank() == current.len() {
                return Err(Error::InvalidAlgebra(
                    "lower central series stabilizes at a nonzero ideal; algebra is not nilpotent"
                        .into(),
                ));
            }
            series.push(next.basis().to_vec());
        }
    }

    /// `L ⊇ [L, L] ⊇ … ⊇ 0`, each term as a basis of coordinate vectors.
    pub fn lower_central_series(&self) -> &[Vec<Vec<Rational>>] {
        &self.lcs
    }

    /// Number of nonzero terms of the lower central series.
    pub fn nilpotency_class(&self) -> usize {
        self.lcs.len() - 1
    }

    /// Joint kernel of all `ad(e_i)`.
    pub fn center(&self) -> Vec<Vec<Rational>> {
        let d = self.dim();
        let ads: Vec<Matrix> = linalg::identity_basis(d)
            .iter()
            .map(|e| self.ad(e))
            .collect();
        linalg::joint_kernel(&ads, d).expect("ad maps are square")
    }

    pub fn filtration(&self) -> Filtration {
        let d = self.dim();
        let c = self.nilpotency_class();
        let mut span = SpanBuilder::new(d);
        let mut per_layer: Vec<Vec<Vec<Rational>>> = vec![Vec::new(); c];
        for k in (0..c).rev() {
            for v in &self.lcs[k] {
                if span.insert(v) {
                    per_layer[k].push(v.clone());
                }
            }
        }
        let mut layers = Vec::with_capacity(c);
        let mut cols = Vec::with_capacity(d);
        for vs in per_layer {
            let start = cols.len();
            cols.extend(vs);
            layers.push(start..cols.len());
        }
        let basis = Matrix::from_columns(d, &cols);
        let inverse = linalg::inverse(&basis).expect("adapted basis is a basis");
        Filtration {
            basis,
            inverse,
            layers,
        }
    }

    /// `φ` is invertible and `φ[x, y] = [φx, φy]` on basis pairs.
    pub fn check_automorphism(&self, phi: &Matrix) -> Result<()> {
        let d = self.dim();
        if phi.rows() != d || phi.cols() != d {
            return Err(Error::NotAutomorphism(format!(
                "expected a {d}x{d} matrix, got {}x{}",
                phi.rows(),
                phi.cols()
            )));
        }
        if linalg::determinant(phi)?.is_zero() {
            return Err(Error::NotAutomorphism("matrix is singular".into()));
        }
        let cols = phi.columns();
        for i in 0..d {
            for j in i + 1..d {
                let lhs = phi.mul_vec(&self.constants[i][j]);
                let rhs = self.bracket(&cols[i], &cols[j]);
                if lhs != rhs {
                    return Err(Error::NotAutomorphism(format!(
                        "bracket of {} and {} is not preserved",
                        self.labels[i], self.labels[j]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn has_ambient(&self) -> bool {
        self.ambient.is_some()
    }

    pub fn ambient_basis(&self) -> Option<&[Matrix]> {
        self.ambient.as_ref().map(|a| a.basis.as_slice())
    }

    fn require_ambient(&self) -> Result<&Ambient> {
        self.ambient.as_ref().ok_or_else(|| {
            Error::InvalidAlgebra("operation needs an ambient matrix realization".into())
        })
    }

    pub fn ambient_dim(&self) -> Result<usize> {
        Ok(self.require_ambient()?.n)
    }

    fn sum_ambient(&self, basis: &[Matrix], coords: &[Rational]) -> Matrix {
        let n = basis.first().map_or(0, Matrix::rows);
        basis
            .iter()
            .zip(coords)
            .filter(|(_, c)| !c.is_zero())
            .fold(Matrix::zeros(n, n), |acc, (b, c)| &acc + &b.scale(c))
    }

    /// `Σ xᵢ Eᵢ` in the ambient realization.
    pub fn to_ambient(&self, x: &[Rational]) -> Result<Matrix> {
        let amb = self.require_ambient()?;
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "coordinate vector of length {} for a {}-dimensional algebra",
                x.len(),
                self.dim()
            )));
        }
        Ok(self.sum_ambient(&amb.basis, x))
    }

    /// Coordinates of an ambient matrix known to lie in the algebra; errors otherwise.
    pub fn coords_of(&self, m: &Matrix) -> Result<Vec<Rational>> {
        let amb = self.require_ambient()?;
        if m.rows() != amb.n || m.cols() != amb.n {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for ambient dimension {}",
                m.rows(),
                m.cols(),
                amb.n
            )));
        }
        let picked: Vec<Rational> = amb
            .extractor
            .positions
            .iter()
            .map(|&p| m[p].clone())
            .collect();
        let x = amb.extractor.inverse.mul_vec(&picked);
        if &self.sum_ambient(&amb.basis, &x) != m {
            return Err(Error::NotInAlgebra(format!("{m}")));
        }
        Ok(x)
    }

    /// Entry positions and left inverse used to read coordinates; exposed for
    /// symbolic extraction.
    pub(crate) fn extractor(&self) -> Result<(&[(usize, usize)], &Matrix)> {
        let amb = self.require_ambient()?;
        Ok((&amb.extractor.positions, &amb.extractor.inverse))
    }

    /// Group element `exp(Σ xᵢ Eᵢ)`.
    pub fn exp_coords(&self, x: &[Rational]) -> Result<Matrix> {
        let m = self.to_ambient(x)?;
        Ok(exp_series(&m, m.rows()))
    }

    /// First-kind coordinates of a group element of `U`.
    pub fn log_coords(&self, g: &Matrix) -> Result<Vec<Rational>> {
        self.coords_of(&unip_log(g)?)
    }

    pub fn contains_group_element(&self, g: &Matrix) -> bool {
        self.log_coords(g).is_ok()
    }

    /// `Φ(g) = exp(φ · log g)` for a Lie algebra automorphism `φ`.
    pub fn apply_automorphism(&self, phi: &Matrix, g: &Matrix) -> Result<Matrix> {
        if phi.is_identity() {
            return Ok(g.clone());
        }
        let x = self.log_coords(g)?;
        self.exp_coords(&phi.mul_vec(&x))
    }

    /// `Ad(v) = exp(ad(log v))` as a matrix in the Lie basis.
    pub fn adjoint(&self, v: &Matrix) -> Result<Matrix> {
        let x = self.log_coords(v)?;
        let a = self.ad(&x);
        Ok(exp_series(&a, self.dim()))
    }

    pub fn to_json(&self) -> LieAlgebraJson {
        let d = self.dim();
        let mut brackets = Vec::new();
        for i in 0..d {
            for j in i + 1..d {
                if self.constants[i][j].iter().any(|c| !c.is_zero()) {
                    brackets.push((
                        i,
                        j,
                        self.constants[i][j].iter().map(rational::format).collect(),
                    ));
                }
            }
        }
        LieAlgebraJson {
            dim: d,
            labels: self.labels.clone(),
            brackets,
            ambient: self.ambient_basis().map(<[Matrix]>::to_vec),
        }
    }

    pub fn from_json(j: &LieAlgebraJson) -> Result<Self> {
        if j.labels.len() != j.dim {
            return Err(Error::InvalidAlgebra(format!(
                "{} labels for dimension {}",
                j.labels.len(),
                j.dim
            )));
        }
        let brackets = j
            .brackets
            .iter()
            .map(|(a, b, c)| {
                let c = c
                    .iter()
                    .map(|s| rational::parse(s))
                    .collect::<Result<Vec<_>>>()?;
                Ok((*a, *b, c))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_brackets(j.labels.clone(), &brackets, j.ambient.clone())
    }
}

/// Wire form: `{dim, labels, brackets: [[i, j, [coeffs…]]…], ambient?}` with
/// zero-based indices and only the nonzero brackets with `i < j`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct LieAlgebraJson {
    pub dim: usize,
    pub labels: Vec<String>,
    #[serde(default)]
    pub brackets: Vec<(usize, usize, Vec<String>)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ambient: Option<Vec<Matrix>>,
}

/// Finitely many unipotent generators of a subgroup of `GL_n(ℚ)`.
#[derive(Clone, Debug)]
pub struct UnipotentGroupData {
    generators: Vec<Matrix>,
    dim_ambient: usize,
}

impl UnipotentGroupData {
    pub fn new(generators: Vec<Matrix>, dim_ambient: usize) -> Result<Self> {
        for g in &generators {
            if g.rows() != dim_ambient || g.cols() != dim_ambient {
                return Err(Error::DimensionMismatch(format!(
                    "generator of size {}x{} in ambient dimension {dim_ambient}",
                    g.rows(),
                    g.cols()
                )));
            }
            if !jordan::is_unipotent(g)? {
                return Err(Error::NotUnipotent);
            }
        }
        Ok(Self {
            generators,
            dim_ambient,
        })
    }

    pub fn generators(&self) -> &[Matrix] {
        &self.generators
    }

    pub fn dim_ambient(&self) -> usize {
        self.dim_ambient
    }
}

/// Lie algebra of the Zariski closure of the group generated by unipotent
/// matrices: the smallest bracket-closed ℚ-span containing their logarithms.
///
/// Basis elements are kept in order of discovery (logs first, then brackets).
pub fn lie_closure(group: &UnipotentGroupData) -> Result<NilpotentLieAlgebra> {
    let n = group.dim_ambient;
    let mut span = SpanBuilder::new(n * n);
    let mut basis: Vec<Matrix> = Vec::new();
    let push = |m: Matrix, span: &mut SpanBuilder, basis: &mut Vec<Matrix>| {
        if span.insert(m.entries()) {
            basis.push(m);
        }
    };
    for g in &group.generators {
        push(unip_log(g)?, &mut span, &mut basis);
    }
    let mut b = 0;
    while b < basis.len() {
        for a in 0..b {
            let c = basis[a].commutator(&basis[b]);
            push(c, &mut span, &mut basis);
        }
        b += 1;
    }

    let d = basis.len();
    // structure constants: solve for bracket coordinates in the discovered basis
    let flat = Matrix::from_columns(
        n * n,
        &basis
            .iter()
            .map(|m| m.entries().to_vec())
            .collect::<Vec<_>>(),
    );
    let mut c = vec![vec![vec![Rational::zero(); d]; d]; d];
    for i in 0..d {
        for j in i + 1..d {
            let br = basis[i].commutator(&basis[j]);
            let sol = linalg::solve(&flat, br.entries())?;
            let x = sol
                .particular
                .ok_or_else(|| Error::Invalid("bracket escaped the saturated span".into()))?;
            for k in 0..d {
                c[j][i][k] = -x[k].clone();
            }
            c[i][j] = x;
        }
    }
    NilpotentLieAlgebra::new(NilpotentLieAlgebra::default_labels(d), c, Some(basis))
}
