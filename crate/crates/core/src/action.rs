//! Affine actions `(u, φ)·g = u·Φ(g)` of Γ on a unipotent group `U`, worked
//! in first-kind coordinates of its Lie algebra.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jordan;
use crate::lie::NilpotentLieAlgebra;
use crate::linalg::{self, SpanBuilder};
use crate::matrix::Matrix;
use crate::mpoly::{self, PolynomialMap};
use crate::rational::{self, Rational};

/// `(translation, automorphism)`: translation is an ambient matrix in `U`,
/// automorphism is a Lie algebra automorphism in the basis of `𝔲`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct AffineElement {
    pub translation: Matrix,
    pub automorphism: Matrix,
}

impl AffineElement {
    pub fn identity(alg: &NilpotentLieAlgebra) -> Result<Self> {
        Ok(Self {
            translation: Matrix::identity(alg.ambient_dim()?),
            automorphism: Matrix::identity(alg.dim()),
        })
    }

    /// Pure translation by `exp(Σ xᵢ eᵢ)`.
    pub fn translation(alg: &NilpotentLieAlgebra, x: &[Rational]) -> Result<Self> {
        Ok(Self {
            translation: alg.exp_coords(x)?,
            automorphism: Matrix::identity(alg.dim()),
        })
    }

    /// Checks that the translation lies in `U` and the automorphism preserves brackets.
    pub fn check(&self, alg: &NilpotentLieAlgebra) -> Result<()> {
        alg.check_automorphism(&self.automorphism)?;
        alg.log_coords(&self.translation)?;
        Ok(())
    }

    pub fn is_identity(&self) -> bool {
        self.translation.is_identity() && self.automorphism.is_identity()
    }

    /// `self ∘ other`.
    pub fn compose(&self, alg: &NilpotentLieAlgebra, other: &Self) -> Result<Self> {
        let moved = alg.apply_automorphism(&self.automorphism, &other.translation)?;
        Ok(Self {
            translation: &self.translation * &moved,
            automorphism: &self.automorphism * &other.automorphism,
        })
    }

    pub fn inverse(&self, alg: &NilpotentLieAlgebra) -> Result<Self> {
        let phi_inv = linalg::inverse(&self.automorphism)?;
        let u_inv = linalg::inverse(&self.translation)?;
        Ok(Self {
            translation: alg.apply_automorphism(&phi_inv, &u_inv)?,
            automorphism: phi_inv,
        })
    }

    pub fn pow(&self, alg: &NilpotentLieAlgebra, k: i64) -> Result<Self> {
        let base = if k < 0 {
            self.inverse(alg)?
        } else {
            self.clone()
        };
        let mut acc = Self::identity(alg)?;
        for _ in 0..k.unsigned_abs() {
            acc = acc.compose(alg, &base)?;
        }
        Ok(acc)
    }

    /// The action on a group element of `U`.
    pub fn act(&self, alg: &NilpotentLieAlgebra, g: &Matrix) -> Result<Matrix> {
        Ok(&self.translation * &alg.apply_automorphism(&self.automorphism, g)?)
    }

    /// `log(u · exp(φ·p))` in coordinates.
    pub fn apply(&self, alg: &NilpotentLieAlgebra, p: &[Rational]) -> Result<Vec<Rational>> {
        if p.len() != alg.dim() {
            return Err(Error::DimensionMismatch(format!(
                "point of length {} in a {}-dimensional algebra",
                p.len(),
                alg.dim()
            )));
        }
        let moved = alg.exp_coords(&self.automorphism.mul_vec(p))?;
        alg.log_coords(&(&self.translation * &moved))
    }

    /// The same map written as polynomials in the coordinates.
    pub fn to_polynomial_map(&self, alg: &NilpotentLieAlgebra) -> Result<PolynomialMap> {
        let id = Matrix::identity(alg.ambient_dim()?);
        mpoly::affine_log_map(alg, &self.translation, &self.automorphism, &id)
    }
}

/// A word in named generators, stored as `(generator index, exponent)` syllables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Word(pub Vec<(usize, i64)>);

impl Word {
    /// Parses whitespace- or `*`-separated syllables `name` or `name^k`.
    /// `1` and the empty string denote the empty word.
    pub fn parse(s: &str, names: &[String]) -> Result<Self> {
        let mut out = Vec::new();
        for tok in s
            .split(|c: char| c.is_whitespace() || c == '*')
            .filter(|t| !t.is_empty())
        {
            if tok == "1" {
                continue;
            }
            let (name, exp) = match tok.split_once('^') {
                Some((n, e)) => {
                    let e: i64 = e
                        .trim_start_matches('(')
                        .trim_end_matches(')')
                        .parse()
                        .map_err(|_| Error::MalformedWord(s.to_string()))?;
                    (n, e)
                }
                None => (tok, 1),
            };
            let idx = names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| Error::UnknownGenerator(name.to_string()))?;
            if exp != 0 {
                out.push((idx, exp));
            }
        }
        Ok(Self(out))
    }

    pub fn letter(idx: usize, exp: i64) -> Self {
        Self(vec![(idx, exp)])
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of letters counted with multiplicity.
    pub fn len(&self) -> usize {
        self.0.iter().map(|(_, e)| e.unsigned_abs() as usize).sum()
    }

    /// Appends one syllable with free reduction against the last one.
    pub fn push(&mut self, idx: usize, exp: i64) {
        match self.0.last_mut() {
            Some((last, e)) if *last == idx => {
                *e += exp;
                if *e == 0 {
                    self.0.pop();
                }
            }
            _ => self.0.push((idx, exp)),
        }
    }

    pub fn render(&self, names: &[String]) -> String {
        if self.0.is_empty() {
            return "1".into();
        }
        self.0
            .iter()
            .map(|&(i, e)| {
                if e == 1 {
                    names[i].clone()
                } else {
                    format!("{}^{e}", names[i])
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Relator {
    pub name: String,
    pub word: String,
}

/// Finitely many named affine generators of Γ, with optional relators.
#[derive(Clone, Debug)]
pub struct GammaActionData {
    algebra: NilpotentLieAlgebra,
    names: Vec<String>,
    generators: Vec<AffineElement>,
    inverses: Vec<AffineElement>,
    relators: Vec<(Relator, Word)>,
    hirsch_rank: usize,
    fitting_labels: Vec<String>,
}

impl GammaActionData {
    pub fn new(
        algebra: NilpotentLieAlgebra,
        generators: Vec<(String, AffineElement)>,
        relators: Vec<Relator>,
        hirsch_rank: usize,
        fitting_labels: Vec<String>,
    ) -> Result<Self> {
        let names: Vec<String> = generators.iter().map(|(n, _)| n.clone()).collect();
        let mut seen = HashSet::new();
        for n in &names {
            if !seen.insert(n) {
                return Err(Error::Invalid(format!("duplicate generator name {n}")));
            }
        }
        let generators: Vec<AffineElement> = generators.into_iter().map(|(_, g)| g).collect();
        for g in &generators {
            g.check(&algebra)?;
        }
        let inverses = generators
            .iter()
            .map(|g| g.inverse(&algebra))
            .collect::<Result<Vec<_>>>()?;
        for l in &fitting_labels {
            if !names.contains(l) {
                return Err(Error::UnknownGenerator(l.clone()));
            }
        }
        let mut data = Self {
            algebra,
            names,
            generators,
            inverses,
            relators: Vec::new(),
            hirsch_rank,
            fitting_labels,
        };
        for r in relators {
            let w = Word::parse(&r.word, &data.names)?;
            if !data.eval(&w)?.is_identity() {
                return Err(Error::RelatorFailure(r.name));
            }
            data.relators.push((r, w));
        }
        Ok(data)
    }

    pub fn algebra(&self) -> &NilpotentLieAlgebra {
        &self.algebra
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn generators(&self) -> &[AffineElement] {
        &self.generators
    }

    pub fn generator(&self, name: &str) -> Option<&AffineElement> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| &self.generators[i])
    }

    pub fn relators(&self) -> impl Iterator<Item = (&Relator, &Word)> {
        self.relators.iter().map(|(r, w)| (r, w))
    }

    pub fn hirsch_rank(&self) -> usize {
        self.hirsch_rank
    }

    pub fn fitting_labels(&self) -> &[String] {
        &self.fitting_labels
    }

    fn letter(&self, idx: usize, exp: i64) -> &AffineElement {
        if exp > 0 {
            &self.generators[idx]
        } else {
            &self.inverses[idx]
        }
    }

    pub fn eval(&self, w: &Word) -> Result<AffineElement> {
        let mut acc = AffineElement::identity(&self.algebra)?;
        for &(i, e) in &w.0 {
            for _ in 0..e.unsigned_abs() {
                acc = acc.compose(&self.algebra, self.letter(i, e))?;
            }
        }
        Ok(acc)
    }

    pub fn parse_word(&self, s: &str) -> Result<Word> {
        Word::parse(s, &self.names)
    }

    pub fn render(&self, w: &Word) -> String {
        w.render(&self.names)
    }

    /// Distinct group elements reachable by words of length at most `radius`,
    /// in breadth-first order: generator `i` before its inverse, generators in
    /// declaration order. The identity comes first.
    pub fn ball(&self, radius: usize) -> Result<Vec<(Word, AffineElement)>> {
        let id = AffineElement::identity(&self.algebra)?;
        let mut seen: HashSet<AffineElement> = HashSet::from([id.clone()]);
        let mut out = vec![(Word::default(), id)];
        let mut frontier: VecDeque<usize> = VecDeque::from([0]);
        for _ in 0..radius {
            let mut next = VecDeque::new();
            while let Some(idx) = frontier.pop_front() {
                for i in 0..self.generators.len() {
                    for e in [1i64, -1] {
                        let elem = out[idx].1.compose(&self.algebra, self.letter(i, e))?;
                        if seen.contains(&elem) {
                            continue;
                        }
                        seen.insert(elem.clone());
                        let mut w = out[idx].0.clone();
                        w.push(i, e);
                        out.push((w, elem));
                        next.push_back(out.len() - 1);
                    }
                }
            }
            frontier = next;
        }
        Ok(out)
    }
}

/// Result of the layer-by-layer fixed point search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FixedPoint {
    Fixed {
        #[serde(with = "rational::serde_vec")]
        point: Vec<Rational>,
    },
    /// No fixed point: the layer equation at `layer` is inconsistent on every
    /// branch explored. `definitive` is false only when branching was truncated
    /// or the automorphism is not semisimple.
    Absent {
        layer: usize,
        branches_explored: usize,
        definitive: bool,
    },
}

const BRANCH_CAP: usize = 4096;

/// Solves `u·Φ(g) = g` descending the lower central series.
///
/// At layer `k` with `c = g⁻¹·u·Φ(g)` already in `exp(L^k)`, a correction
/// `g ← g·exp(z)` with `z` in the layer must satisfy `(I − φ̄) z̄ = c̄`.
pub fn fixed_point_solve(alg: &NilpotentLieAlgebra, a: &AffineElement) -> Result<FixedPoint> {
    let filt = alg.filtration();
    let phi = &a.automorphism;
    let semisimple = jordan::is_semisimple(phi)?;
    let n = alg.ambient_dim()?;
    let layers = filt.layers.len();
    let layer_ops: Vec<Matrix> = (0..layers)
        .map(|k| {
            let m = filt.layer_map(k, phi);
            &Matrix::identity(m.rows()) - &m
        })
        .collect();

    let mut stack: Vec<(usize, Matrix)> = vec![(0, Matrix::identity(n))];
    let mut explored = 0usize;
    let mut truncated = false;
    let mut branched = false;
    let mut deepest_failure = 0usize;
    while let Some((k, g)) = stack.pop() {
        let g_inv = linalg::inverse(&g)?;
        let c = &(&g_inv * &a.translation) * &alg.apply_automorphism(phi, &g)?;
        if k == layers {
            if c.is_identity() {
                return Ok(FixedPoint::Fixed {
                    point: alg.log_coords(&g)?,
                });
            }
            return Err(Error::Invalid(
                "central-series descent ended off the fixed set".into(),
            ));
        }
        explored += 1;
        let rhs = filt.layer_coords(k, &alg.log_coords(&c)?);
        let sol = linalg::solve(&layer_ops[k], &rhs)?;
        let Some(z) = sol.particular else {
            deepest_failure = deepest_failure.max(k);
            continue;
        };
        let step =
            |z: &[Rational]| -> Result<Matrix> { Ok(&g * &alg.exp_coords(&filt.embed(k, z))?) };
        if semisimple || sol.kernel.is_empty() {
            stack.push((k + 1, step(&z)?));
            continue;
        }
        branched = true;
        // later pushes are explored first; keep the particular branch on top
        for v in sol.kernel.iter().rev() {
            if stack.len() >= BRANCH_CAP {
                truncated = true;
                break;
            }
            let zv: Vec<Rational> = z.iter().zip(v).map(|(a, b)| a + b).collect();
            stack.push((k + 1, step(&zv)?));
        }
        stack.push((k + 1, step(&z)?));
    }
    Ok(FixedPoint::Absent {
        layer: deepest_failure,
        branches_explored: explored,
        definitive: semisimple || !(branched || truncated),
    })
}

/// Jordan decomposition `a = s ∘ n` of an affine element with semisimple
/// automorphism part: `n` is a pure translation commuting with `s`, and `s`
/// has a fixed point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AffineJordan {
    pub semisimple: AffineElement,
    pub unipotent: AffineElement,
}

pub fn affine_jordan(alg: &NilpotentLieAlgebra, a: &AffineElement) -> Result<AffineJordan> {
    let phi = &a.automorphism;
    if !jordan::is_semisimple(phi)? {
        return Err(Error::NotSemisimple);
    }
    let filt = alg.filtration();
    let n = alg.ambient_dim()?;
    let id_l = Matrix::identity(alg.dim());
    let twisted = |g: &Matrix| -> Result<Matrix> {
        let g_inv = linalg::inverse(g)?;
        Ok(&(&g_inv * &a.translation) * &alg.apply_automorphism(phi, g)?)
    };
    let mut g = Matrix::identity(n);
    for k in 0..filt.layers.len() {
        let c = twisted(&g)?;
        let drift = &alg.apply_automorphism(phi, &c)? * &linalg::inverse(&c)?;
        let delta: Vec<Rational> = filt
            .layer_coords(k, &alg.log_coords(&drift)?)
            .iter()
            .map(|x| -x)
            .collect();
        let m = filt.layer_map(k, &(phi - &id_l));
        let z = linalg::solve(&(&m * &m), &delta)?
            .particular
            .ok_or_else(|| Error::Invalid(format!("no twisted normal form at layer {k}")))?;
        g = &g * &alg.exp_coords(&filt.embed(k, &z))?;
    }
    let w = twisted(&g)?;
    if alg.apply_automorphism(phi, &w)? != w {
        return Err(Error::Invalid(
            "twisted normal form is not fixed by the automorphism".into(),
        ));
    }
    let unipotent = AffineElement {
        translation: &(&g * &w) * &linalg::inverse(&g)?,
        automorphism: id_l,
    };
    let semisimple = unipotent.inverse(alg)?.compose(alg, a)?;
    Ok(AffineJordan {
        semisimple,
        unipotent,
    })
}

/// Per-generator polynomial maps and their inverses.
#[derive(Clone, Debug, Serialize)]
pub struct GeneratorMaps {
    pub name: String,
    pub forward: PolynomialMap,
    pub inverse: PolynomialMap,
    pub degree: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct EmittedAction {
    pub dim: usize,
    pub degree_bound: u32,
    pub max_degree: u32,
    pub generators: Vec<GeneratorMaps>,
}

impl EmittedAction {
    fn map(&self, idx: usize, exp: i64) -> &PolynomialMap {
        if exp > 0 {
            &self.generators[idx].forward
        } else {
            &self.generators[idx].inverse
        }
    }

    /// Composite polynomial map of a word; the rightmost letter acts first.
    pub fn word_map(&self, w: &Word) -> Result<PolynomialMap> {
        let mut acc = PolynomialMap::identity(self.dim);
        for &(i, e) in &w.0 {
            for _ in 0..e.unsigned_abs() {
                acc = acc.compose(self.map(i, e))?;
            }
        }
        Ok(acc)
    }
}

/// Every generator and inverse as `x ↦ log(u·exp(φx))`. The degree bound is
/// the nilpotency class of `𝔲` (at least 1).
pub fn emit_polynomial_action(g: &GammaActionData) -> Result<EmittedAction> {
    let alg = &g.algebra;
    let generators = g
        .names
        .iter()
        .zip(g.generators.iter().zip(&g.inverses))
        .map(|(name, (f, inv))| {
            let forward = f.to_polynomial_map(alg)?;
            let inverse = inv.to_polynomial_map(alg)?;
            let degree = forward.degree().max(inverse.degree());
            Ok(GeneratorMaps {
                name: name.clone(),
                forward,
                inverse,
                degree,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_degree = generators.iter().map(|m| m.degree).max().unwrap_or(0);
    Ok(EmittedAction {
        dim: alg.dim(),
        degree_bound: alg.nilpotency_class().max(1) as u32,
        max_degree,
        generators,
    })
}

/// True iff every relator composes to the identity polynomial map.
pub fn relators_hold_polynomially(g: &GammaActionData, emitted: &EmittedAction) -> Result<bool> {
    for (_, w) in g.relators() {
        if !emitted.word_map(w)?.is_identity() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FreenessWitness {
    pub word: String,
    #[serde(with = "rational::serde_vec")]
    pub point: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FreenessReport {
    pub free: bool,
    pub radius: usize,
    /// Always false: the check covers a finite word ball only.
    pub complete: bool,
    pub elements_checked: usize,
    /// Elements whose fixed point search could not rule out a fixed point.
    pub inconclusive: Vec<String>,
    pub witness: Option<FreenessWitness>,
}

/// Looks for a fixed point of every nonidentity element in the word ball.
/// The witness is the first offender in ball order; `parallel` does not
/// change the output.
pub fn freeness_check(
    g: &GammaActionData,
    radius: usize,
    parallel: bool,
) -> Result<FreenessReport> {
    let ball = g.ball(radius)?;
    let elems = &ball[1..];
    let alg = &g.algebra;
    let results: Vec<Result<FixedPoint>> = if parallel {
        elems
            .par_iter()
            .map(|(_, e)| fixed_point_solve(alg, e))
            .collect()
    } else {
        elems
            .iter()
            .map(|(_, e)| fixed_point_solve(alg, e))
            .collect()
    };
    let mut witness = None;
    let mut inconclusive = Vec::new();
    for ((w, _), r) in elems.iter().zip(results) {
        match r? {
            FixedPoint::Fixed { point } => {
                witness = Some(FreenessWitness {
                    word: g.render(w),
                    point,
                });
                break;
            }
            FixedPoint::Absent {
                definitive: false, ..
            } => inconclusive.push(g.render(w)),
            FixedPoint::Absent { .. } => {}
        }
    }
    Ok(FreenessReport {
        free: witness.is_none(),
        radius,
        complete: false,
        elements_checked: elems.len(),
        inconclusive,
        witness,
    })
}

/// Orbit of the origin under the word ball, restricted to a coordinate box,
/// sorted and without repetitions.
pub fn orbit_sample(
    g: &GammaActionData,
    radius: usize,
    bounds: &[(Rational, Rational)],
) -> Result<Vec<Vec<Rational>>> {
    let d = g.algebra.dim();
    if bounds.len() != d {
        return Err(Error::DimensionMismatch(format!(
            "{} box bounds for a {d}-dimensional algebra",
            bounds.len()
        )));
    }
    let mut pts = Vec::new();
    for (_, e) in g.ball(radius)? {
        let p = g.algebra.log_coords(&e.translation)?;
        if p.iter().zip(bounds).all(|(x, (lo, hi))| lo <= x && x <= hi) {
            pts.push(p);
        }
    }
    pts.sort();
    pts.dedup();
    Ok(pts)
}

/// Dimension of the part of `center(𝔲)` fixed by every given automorphism.
pub fn central_fixed_rank(alg: &NilpotentLieAlgebra, hol: &[Matrix]) -> Result<usize> {
    let center = alg.center();
    if center.is_empty() {
        return Ok(0);
    }
    let d = alg.dim();
    let id = Matrix::identity(d);
    // coordinates y in the center basis with (φ − I)·C·y = 0 for all φ
    let c = Matrix::from_columns(d, &center);
    let stacked = hol.iter().map(|h| &(h - &id) * &c).collect::<Vec<_>>();
    if stacked.is_empty() {
        return Ok(center.len());
    }
    let m = Matrix::vstack(&stacked)?;
    Ok(linalg::kernel(&m).len())
}

/// Lie coordinates spanning the smallest subalgebra containing `vectors`.
pub fn subalgebra_span(alg: &NilpotentLieAlgebra, vectors: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let mut span = SpanBuilder::new(alg.dim());
    let mut basis: Vec<Vec<Rational>> = Vec::new();
    for v in vectors {
        if span.insert(v) {
            basis.push(v.clone());
        }
    }
    let mut b = 0;
    while b < basis.len() {
        for a in 0..b {
            let c = alg.bracket(&basis[a], &basis[b]);
            if !c.iter().all(Zero::is_zero) && span.insert(&c) {
                basis.push(c);
            }
        }
        b += 1;
    }
    basis
}

impl fmt::Display for FixedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FixedPoint::Fixed { point } => {
                let p: Vec<String> = point.iter().map(rational::format).collect();
                write!(f, "fixed point ({})", p.join(", "))
            }
            FixedPoint::Absent {
                layer, definitive, ..
            } => {
                write!(
                    f,
                    "no fixed point (layer {layer}, definitive: {definitive})"
                )
            }
        }
    }
}
