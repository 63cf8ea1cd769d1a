//! Induced embeddings of finite extensions.
//!
//! Given a faithful matrix representation `ρ` of `Γ`, a group `Δ ⊇ Γ` with
//! `Γ` normal of index `m`, right coset representatives `r₁ = 1, …, r_m`, and
//! matrices `Fᵢ` realizing `γ ↦ rᵢγrᵢ⁻¹` by conjugation, every `δ ∈ Δ`
//! satisfies `rᵢδ = γᵢ(δ)·r_{σ_δ(i)}`. The induced representation places
//! `ρ(γᵢ(δ))` in block `(i, σ_δ(i))`. On `Γ` it is `Ψ(g) = diag(Fᵢ g Fᵢ⁻¹)`.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::Serialize;

use crate::action::Word;
use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::Matrix;

/// How one generator of `Δ` moves the cosets: entry `i` is `(σ(i), γᵢ(δ))`,
/// with `γᵢ(δ)` a word in the generators of `Γ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetAction {
    pub name: String,
    pub table: Vec<(usize, String)>,
}

#[derive(Clone, Debug)]
pub struct ExtensionData {
    pub gamma_names: Vec<String>,
    pub gamma_matrices: Vec<Matrix>,
    /// `F₁ … F_m`; `F₁` must be the identity.
    pub conjugators: Vec<Matrix>,
    /// Generators of `Δ`. Every generator of `Γ` must appear here too.
    pub delta_generators: Vec<CosetAction>,
    /// Relators of `Δ`, as words in its generators.
    pub delta_relators: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct InducedExtension {
    pub block_dim: usize,
    pub index: usize,
    pub delta_names: Vec<String>,
    pub delta_matrices: Vec<Matrix>,
    pub conjugators: Vec<Matrix>,
    /// Permutation of the cosets for each generator of `Δ`.
    pub permutations: Vec<Vec<usize>>,
}

fn eval_matrix_word(w: &Word, mats: &[Matrix], inverses: &[Matrix], n: usize) -> Matrix {
    let mut acc = Matrix::identity(n);
    for &(i, e) in &w.0 {
        let m = if e > 0 { &mats[i] } else { &inverses[i] };
        for _ in 0..e.unsigned_abs() {
            acc = &acc * m;
        }
    }
    acc
}

fn compose_perm(p: &[usize], q: &[usize]) -> Vec<usize> {
    // apply p then q, matching block (i, σ(i)) products
    p.iter().map(|&i| q[i]).collect()
}

fn inverse_perm(p: &[usize]) -> Vec<usize> {
    let mut out = vec![0; p.len()];
    for (i, &j) in p.iter().enumerate() {
        out[j] = i;
    }
    out
}

pub fn induce_extension(data: &ExtensionData) -> Result<InducedExtension> {
    let m = data.conjugators.len();
    if m == 0 {
        return Err(Error::InconsistentCosetTable(
            "no coset representatives".into(),
        ));
    }
    let n = data
        .gamma_matrices
        .first()
        .map(Matrix::rows)
        .or_else(|| data.conjugators.first().map(Matrix::rows))
        .unwrap_or(0);
    if !data.conjugators[0].is_identity() {
        return Err(Error::InconsistentCosetTable(
            "the first representative must be the identity".into(),
        ));
    }
    for f in &data.conjugators {
        if f.rows() != n || f.cols() != n {
            return Err(Error::DimensionMismatch(
                "conjugator size differs from Γ's matrices".into(),
            ));
        }
    }
    let f_inv = data
        .conjugators
        .iter()
        .map(linalg::inverse)
        .collect::<Result<Vec<_>>>()?;
    let g_inv = data
        .gamma_matrices
        .iter()
        .map(linalg::inverse)
        .collect::<Result<Vec<_>>>()?;

    let mut permutations = Vec::new();
    let mut delta_matrices = Vec::new();
    for gen in &data.delta_generators {
        if gen.table.len() != m {
            return Err(Error::InconsistentCosetTable(format!(
                "{} has {} table entries for {m} cosets",
                gen.name,
                gen.table.len()
            )));
        }
        let sigma: Vec<usize> = gen.table.iter().map(|(s, _)| *s).collect();
        if sigma.iter().collect::<BTreeSet<_>>().len() != m || sigma.iter().any(|&s| s >= m) {
            return Err(Error::InconsistentCosetTable(format!(
                "{} does not permute the cosets",
                gen.name
            )));
        }
        let mut psi = Matrix::zeros(n * m, n * m);
        for (i, (s, word)) in gen.table.iter().enumerate() {
            let w = Word::parse(word, &data.gamma_names)?;
            psi.set_block(
                i * n,
                s * n,
                &eval_matrix_word(&w, &data.gamma_matrices, &g_inv, n),
            );
        }
        permutations.push(sigma);
        delta_matrices.push(psi);
    }

    // identity (1): for γ in Γ the table must read rᵢγrᵢ⁻¹ = Fᵢ ρ(γ) Fᵢ⁻¹ with σ = id
    for (gi, name) in data.gamma_names.iter().enumerate() {
        let pos = data
            .delta_generators
            .iter()
            .position(|g| &g.name == name)
            .ok_or_else(|| {
                Error::UnknownGenerator(format!("{name} is not listed among the generators of Δ"))
            })?;
        for i in 0..m {
            if permutations[pos][i] != i {
                return Err(Error::InconsistentCosetTable(format!(
                    "{name} lies in Γ but moves coset {i}"
                )));
            }
            let expected = &(&data.conjugators[i] * &data.gamma_matrices[gi]) * &f_inv[i];
            if delta_matrices[pos].block(i * n, i * n, n, n) != expected {
                return Err(Error::ExtensionIdentity {
                    coset: i,
                    generator: name.clone(),
                });
            }
        }
    }

    // the quotient must act regularly: transitive of order m
    let mut group: HashSet<Vec<usize>> = HashSet::from([(0..m).collect()]);
    let mut frontier: Vec<Vec<usize>> = group.iter().cloned().collect();
    while let Some(p) = frontier.pop() {
        for s in &permutations {
            for q in [compose_perm(&p, s), compose_perm(&p, &inverse_perm(s))] {
                if group.insert(q.clone()) {
                    frontier.push(q);
                }
            }
        }
    }
    let orbit: BTreeSet<usize> = group.iter().map(|p| p[0]).collect();
    if group.len() != m || orbit.len() != m {
        return Err(Error::InconsistentCosetTable(format!(
            "coset permutations generate a group of order {} with an orbit of size {} on {m} cosets",
            group.len(),
            orbit.len()
        )));
    }

    let out = InducedExtension {
        block_dim: n,
        index: m,
        delta_names: data
            .delta_generators
            .iter()
            .map(|g| g.name.clone())
            .collect(),
        delta_matrices,
        conjugators: data.conjugators.clone(),
        permutations,
    };
    for r in &data.delta_relators {
        let w = out.parse_word(r)?;
        if !out.eval(&w)?.is_identity() {
            return Err(Error::RelatorFailure(r.clone()));
        }
    }
    Ok(out)
}

impl InducedExtension {
    pub fn dim(&self) -> usize {
        self.block_dim * self.index
    }

    pub fn parse_word(&self, s: &str) -> Result<Word> {
        Word::parse(s, &self.delta_names)
    }

    pub fn eval(&self, w: &Word) -> Result<Matrix> {
        let inv = self
            .delta_matrices
            .iter()
            .map(linalg::inverse)
            .collect::<Result<Vec<_>>>()?;
        Ok(eval_matrix_word(w, &self.delta_matrices, &inv, self.dim()))
    }

    /// Coset permutation of a word; identity exactly on `Γ`.
    pub fn coset_permutation(&self, w: &Word) -> Vec<usize> {
        let mut acc: Vec<usize> = (0..self.index).collect();
        for &(i, e) in &w.0 {
            let p = if e > 0 {
                self.permutations[i].clone()
            } else {
                inverse_perm(&self.permutations[i])
            };
            for _ in 0..e.unsigned_abs() {
                acc = compose_perm(&acc, &p);
            }
        }
        acc
    }

    /// `Ψ(g) = diag(Fᵢ g Fᵢ⁻¹)`.
    pub fn psi(&self, g: &Matrix) -> Result<Matrix> {
        let blocks = self
            .conjugators
            .iter()
            .map(|f| Ok(&(f * g) * &linalg::inverse(f)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(Matrix::direct_sum(&blocks))
    }

    /// Whether `x` has the block-diagonal form `Ψ(g)` for some `g`.
    pub fn in_psi_image(&self, x: &Matrix) -> Result<bool> {
        let n = self.block_dim;
        let first = x.block(0, 0, n, n);
        Ok(*x == self.psi(&first)?)
    }

    /// Distinct images of words up to `radius`, with their words.
    pub fn ball(&self, radius: usize) -> Result<Vec<(Word, Matrix)>> {
        let inv = self
            .delta_matrices
            .iter()
            .map(linalg::inverse)
            .collect::<Result<Vec<_>>>()?;
        let id = Matrix::identity(self.dim());
        let mut seen: HashMap<Matrix, usize> = HashMap::from([(id.clone(), 0)]);
        let mut out = vec![(Word::default(), id)];
        let mut frontier = vec![0usize];
        for _ in 0..radius {
            let mut next = Vec::new();
            for &idx in &frontier {
                for (i, (fwd, bwd)) in self.delta_matrices.iter().zip(&inv).enumerate() {
                    for e in [1i64, -1] {
                        let m = if e > 0 { fwd } else { bwd };
                        let x = &out[idx].1 * m;
                        if seen.contains_key(&x) {
                            continue;
                        }
                        let mut w = out[idx].0.clone();
                        w.push(i, e);
                        seen.insert(x.clone(), out.len());
                        out.push((w, x));
                        next.push(out.len() - 1);
                    }
                }
            }
            frontier = next;
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntersectionReport {
    pub radius: usize,
    pub elements_checked: usize,
    /// Words whose image is in `Ψ(G)` but not in `Γ`, or the converse.
    pub violations: Vec<String>,
}

/// Checks `Ψ(G) ∩ ψ(Δ) = ψ(Γ)` on all words up to `radius`: an image is
/// block diagonal of the form `Ψ(g)` exactly when its coset permutation is trivial.
pub fn verify_intersection(ext: &InducedExtension, radius: usize) -> Result<IntersectionReport> {
    let ball = ext.ball(radius)?;
    let mut violations = Vec::new();
    for (w, x) in &ball {
        let in_gamma = ext
            .coset_permutation(w)
            .iter()
            .enumerate()
            .all(|(i, &j)| i == j);
        if ext.in_psi_image(x)? != in_gamma {
            violations.push(w.render(&ext.delta_names));
        }
    }
    Ok(IntersectionReport {
        radius,
        elements_checked: ball.len(),
        violations,
    })
}

/// Compares `ψ` with a reference faithful representation of `Δ` on the word
/// ball: two words agree under `ψ` iff they agree under the reference.
/// Returns the first pair of words that separates the two.
pub fn compare_with_reference(
    ext: &InducedExtension,
    reference: &[Matrix],
    radius: usize,
) -> Result<Option<(String, String)>> {
    if reference.len() != ext.delta_matrices.len() {
        return Err(Error::DimensionMismatch(
            "reference needs one matrix per generator".into(),
        ));
    }
    let n = reference.first().map_or(0, Matrix::rows);
    let ref_inv = reference
        .iter()
        .map(linalg::inverse)
        .collect::<Result<Vec<_>>>()?;
    let ball = ext.ball(radius)?;
    let mut by_ref: HashMap<Matrix, usize> = HashMap::new();
    for (idx, (w, _)) in ball.iter().enumerate() {
        let r = eval_matrix_word(w, reference, &ref_inv, n);
        if let Some(&other) = by_ref.get(&r) {
            // distinct ψ-images (the ball is deduplicated) with equal reference images
            return Ok(Some((
                ball[other].0.render(&ext.delta_names),
                w.render(&ext.delta_names),
            )));
        }
        by_ref.insert(r, idx);
    }
    Ok(None)
}
