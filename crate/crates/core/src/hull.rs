//! Split hulls `H = U ⋊ T`: `U` unipotent with Lie algebra `𝔲`, `T` given by
//! commuting semisimple generators and their action `c_U(t)` on `𝔲`.

use std::collections::HashSet;

use serde::Serialize;

use crate::action::{self, AffineElement, GammaActionData, Word};
use crate::error::{Error, Result};
use crate::jordan;
use crate::lie::{NilpotentLieAlgebra, UnipotentGroupData};
use crate::linalg;
use crate::matrix::Matrix;
use crate::mpoly::{self, PolynomialMap};

#[derive(Clone, Debug, PartialEq)]
pub struct TGenerator {
    pub label: String,
    /// Ambient matrix of `t`, when `T` is realized alongside `U`.
    pub ambient: Option<Matrix>,
    /// `c_U(t)` in the basis of `𝔲`.
    pub hol: Matrix,
}

#[derive(Clone, Debug)]
pub struct SplitHullData {
    algebra: NilpotentLieAlgebra,
    t_generators: Vec<TGenerator>,
}

impl SplitHullData {
    pub fn new(algebra: NilpotentLieAlgebra, t_generators: Vec<TGenerator>) -> Result<Self> {
        for t in &t_generators {
            Self::check_generator(&algebra, t)?;
        }
        Ok(Self {
            algebra,
            t_generators,
        })
    }

    pub(crate) fn check_generator(alg: &NilpotentLieAlgebra, t: &TGenerator) -> Result<()> {
        alg.check_automorphism(&t.hol)
            .map_err(|e| Error::NotAutomorphism(format!("{}: {e}", t.label)))?;
        if !jordan::is_semisimple(&t.hol)? {
            return Err(Error::NotSemisimple);
        }
        let Some(m) = &t.ambient else {
            return Ok(());
        };
        if !jordan::is_semisimple(m)? {
            return Err(Error::NotSemisimple);
        }
        let n = alg.ambient_dim()?;
        if m.rows() != n || m.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "T generator {} is {}x{}, ambient dimension is {n}",
                t.label,
                m.rows(),
                m.cols()
            )));
        }
        let m_inv = linalg::inverse(m)?;
        for (j, e) in alg.ambient_basis().unwrap_or_default().iter().enumerate() {
            let conj = &(m * e) * &m_inv;
            let coords = alg
                .coords_of(&conj)
                .map_err(|_| Error::NotNormalizing(t.label.clone()))?;
            if coords != t.hol.col(j) {
                return Err(Error::HolMismatch(t.label.clone()));
            }
        }
        Ok(())
    }

    pub fn algebra(&self) -> &NilpotentLieAlgebra {
        &self.algebra
    }

    pub fn t_generators(&self) -> &[TGenerator] {
        &self.t_generators
    }

    pub fn t_labels(&self) -> Vec<String> {
        self.t_generators.iter().map(|t| t.label.clone()).collect()
    }

    pub fn hol_matrices(&self) -> Vec<Matrix> {
        self.t_generators.iter().map(|t| t.hol.clone()).collect()
    }

    /// `U` as the group generated by `exp` of the basis matrices.
    pub fn unipotent_group(&self) -> Result<UnipotentGroupData> {
        let n = self.algebra.ambient_dim()?;
        let gens = self
            .algebra
            .ambient_basis()
            .unwrap_or_default()
            .iter()
            .map(crate::lie::nilp_exp)
            .collect::<Result<Vec<_>>>()?;
        UnipotentGroupData::new(gens, n)
    }

    /// `c_U` of a word in the T-generators.
    pub fn hol_of(&self, w: &Word) -> Result<Matrix> {
        let d = self.algebra.dim();
        let mut acc = Matrix::identity(d);
        for &(i, e) in &w.0 {
            let t = self
                .t_generators
                .get(i)
                .ok_or_else(|| Error::UnknownGenerator(format!("T generator #{i}")))?;
            let step = if e > 0 {
                t.hol.clone()
            } else {
                linalg::inverse(&t.hol)?
            };
            for _ in 0..e.unsigned_abs() {
                acc = &acc * &step;
            }
        }
        Ok(acc)
    }

    fn ambient_of(&self, w: &Word) -> Result<Option<Matrix>> {
        let n = self.algebra.ambient_dim()?;
        let mut acc = Matrix::identity(n);
        for &(i, e) in &w.0 {
            let Some(m) = &self.t_generators[i].ambient else {
                return Ok(None);
            };
            let step = if e > 0 {
                m.clone()
            } else {
                linalg::inverse(m)?
            };
            for _ in 0..e.unsigned_abs() {
                acc = &acc * &step;
            }
        }
        Ok(Some(acc))
    }

    /// `h = u·t ↦ (u, c_U(t))`.
    pub fn alpha_t(&self, u: &Matrix, t: &Word) -> Result<AffineElement> {
        self.algebra.log_coords(u)?;
        Ok(AffineElement {
            translation: u.clone(),
            automorphism: self.hol_of(t)?,
        })
    }
}

/// Re-expresses `α_T(h)` relative to the complement `T' = vTv⁻¹`:
/// `u' = u·Φ(v)·v⁻¹`, `φ' = Ad(v)·φ·Ad(v)⁻¹`.
pub fn conjugacy_transport(
    alg: &NilpotentLieAlgebra,
    v: &Matrix,
    a: &AffineElement,
) -> Result<AffineElement> {
    let ad = alg.adjoint(v)?;
    let v_inv = linalg::inverse(v)?;
    let translation = &(&a.translation * &alg.apply_automorphism(&a.automorphism, v)?) * &v_inv;
    Ok(AffineElement {
        translation,
        automorphism: &(&ad * &a.automorphism) * &linalg::inverse(&ad)?,
    })
}

/// `R_v : x ↦ log(exp(x)·v)` as a polynomial map.
pub fn right_multiplication(alg: &NilpotentLieAlgebra, v: &Matrix) -> Result<PolynomialMap> {
    let id = Matrix::identity(alg.ambient_dim()?);
    mpoly::affine_log_map(alg, &id, &Matrix::identity(alg.dim()), v)
}

/// Checks `α_T(h) ∘ R_v = R_v ∘ α_{T'}(h)` as an identity of polynomial maps.
pub fn intertwines(
    alg: &NilpotentLieAlgebra,
    v: &Matrix,
    original: &AffineElement,
    transported: &AffineElement,
) -> Result<bool> {
    let r = right_multiplication(alg, v)?;
    let lhs = original.to_polynomial_map(alg)?.compose(&r)?;
    let rhs = r.compose(&transported.to_polynomial_map(alg)?)?;
    Ok(lhs == rhs)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StrongRadicalReport {
    pub ok: bool,
    /// A T-word acting trivially on `𝔲` without being trivial.
    pub witness: Option<String>,
}

/// Word length searched for products of T-generators that act trivially.
const KERNEL_SEARCH_RADIUS: usize = 3;

/// No nontrivial element of `T` may centralize `U`. A generator whose hol is
/// the identity is a witness unless its ambient matrix is the identity too;
/// with ambient matrices, short products acting trivially are also searched.
pub fn strong_radical_check(h: &SplitHullData) -> Result<StrongRadicalReport> {
    let labels = h.t_labels();
    for (i, t) in h.t_generators.iter().enumerate() {
        if t.hol.is_identity() && !t.ambient.as_ref().is_some_and(Matrix::is_identity) {
            return Ok(StrongRadicalReport {
                ok: false,
                witness: Some(labels[i].clone()),
            });
        }
    }
    if h.t_generators.iter().all(|t| t.ambient.is_some()) && !h.t_generators.is_empty() {
        let mut frontier = vec![Word::default()];
        let mut seen: HashSet<Matrix> = HashSet::from([Matrix::identity(h.algebra.ambient_dim()?)]);
        for _ in 0..KERNEL_SEARCH_RADIUS {
            let mut next = Vec::new();
            for w in &frontier {
                for i in 0..h.t_generators.len() {
                    for e in [1i64, -1] {
                        let mut w2 = w.clone();
                        w2.push(i, e);
                        let Some(m) = h.ambient_of(&w2)? else {
                            continue;
                        };
                        if !seen.insert(m.clone()) {
                            continue;
                        }
                        if h.hol_of(&w2)?.is_identity() {
                            return Ok(StrongRadicalReport {
                                ok: false,
                                witness: Some(w2.render(&labels)),
                            });
                        }
                        next.push(w2);
                    }
                }
            }
            frontier = next;
        }
    }
    Ok(StrongRadicalReport {
        ok: true,
        witness: None,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DensityReport {
    /// Always `"surrogate"`: the check is necessary, not sufficient.
    pub method: String,
    pub ok: bool,
    pub unipotent_closure_dim: usize,
    pub fixed_space_dim_gamma: usize,
    pub fixed_space_dim_t: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HullCertificate {
    pub zariski_dense_ok: bool,
    pub strong_radical_ok: bool,
    pub dim_rank_ok: bool,
    pub dim_u: usize,
    pub hirsch_rank: usize,
    pub density: DensityReport,
    pub strong_radical: StrongRadicalReport,
    pub diagnostics: Vec<String>,
}

impl HullCertificate {
    pub fn passed(&self) -> bool {
        self.zariski_dense_ok && self.strong_radical_ok && self.dim_rank_ok
    }
}

fn density_surrogate(h: &SplitHullData, gamma: &GammaActionData) -> Result<DensityReport> {
    let alg = h.algebra();
    let mut logs = Vec::new();
    let mut hol_gamma = Vec::new();
    for g in gamma.generators() {
        let parts = action::affine_jordan(alg, g)?;
        logs.push(alg.log_coords(&parts.unipotent.translation)?);
        hol_gamma.push(g.automorphism.clone());
    }
    let closure = action::subalgebra_span(alg, &logs).len();
    let d = alg.dim();
    let fix_gamma = linalg::fixed_space(&hol_gamma, d)?.len();
    let fix_t = linalg::fixed_space(&h.hol_matrices(), d)?.len();
    Ok(DensityReport {
        method: "surrogate".into(),
        ok: closure == d && fix_gamma == fix_t,
        unipotent_closure_dim: closure,
        fixed_space_dim_gamma: fix_gamma,
        fixed_space_dim_t: fix_t,
    })
}

pub fn hull_axiom_check(h: &SplitHullData, gamma: &GammaActionData) -> Result<HullCertificate> {
    let mut diagnostics = Vec::new();
    let density = density_surrogate(h, gamma)?;
    if density.unipotent_closure_dim != h.algebra.dim() {
        diagnostics.push(format!(
            "unipotent parts of the generators span a {}-dimensional subalgebra of the {}-dimensional algebra",
            density.unipotent_closure_dim,
            h.algebra.dim()
        ));
    }
    if density.fixed_space_dim_gamma != density.fixed_space_dim_t {
        diagnostics.push(format!(
            "holonomy of the group fixes a {}-dimensional subspace, T fixes {}",
            density.fixed_space_dim_gamma, density.fixed_space_dim_t
        ));
    }
    let strong = strong_radical_check(h)?;
    if let Some(w) = &strong.witness {
        diagnostics.push(format!("T element {w} centralizes U"));
    }
    let dim_u = h.algebra.dim();
    let dim_rank_ok = dim_u == gamma.hirsch_rank();
    if !dim_rank_ok {
        diagnostics.push(format!(
            "dim U = {dim_u} but the Hirsch rank is {}",
            gamma.hirsch_rank()
        ));
    }
    Ok(HullCertificate {
        zariski_dense_ok: density.ok,
        strong_radical_ok: strong.ok,
        dim_rank_ok,
        dim_u,
        hirsch_rank: gamma.hirsch_rank(),
        density,
        strong_radical: strong,
        diagnostics,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FittingReport {
    pub ok: bool,
    /// Labeled generators with nontrivial holonomy.
    pub offenders: Vec<String>,
}

/// Every generator labeled as part of `Fitt(Γ)` must be a pure translation.
pub fn fitting_radical_check(gamma: &GammaActionData) -> FittingReport {
    let offenders: Vec<String> = gamma
        .fitting_labels()
        .iter()
        .filter(|l| {
            gamma
                .generator(l)
                .is_some_and(|g| !g.automorphism.is_identity())
        })
        .cloned()
        .collect();
    FittingReport {
        ok: offenders.is_empty(),
        offenders,
    }
}

/// Dimension of the subspace of `center(𝔲)` fixed by every T-generator and
/// every generator's holonomy.
pub fn torus_rank(gamma: &GammaActionData, h: &SplitHullData) -> Result<usize> {
    let mut hol = h.hol_matrices();
    hol.extend(gamma.generators().iter().map(|g| g.automorphism.clone()));
    action::central_fixed_rank(gamma.algebra(), &hol)
}
