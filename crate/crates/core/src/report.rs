//! The full pipeline for one bundle, as a deterministic report.

use serde::Serialize;

use crate::action::{self, FreenessReport};
use crate::bundle::Bundle;
use crate::cohomology::{self, Exec};
use crate::error::Result;
use crate::hull::{self, FittingReport, HullCertificate};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PolynomialActionSummary {
    pub degree_bound: u32,
    pub max_degree: u32,
    pub relators_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ManifoldReport {
    pub name: String,
    pub input_sha256: String,
    pub dim: usize,
    pub hirsch_rank: usize,
    pub certificate: HullCertificate,
    pub fitting: FittingReport,
    pub freeness: FreenessReport,
    pub betti_full: Vec<usize>,
    pub betti_invariant: Vec<usize>,
    pub euler_characteristic: i64,
    pub orientable: bool,
    pub duality_ok: bool,
    pub torus_rank: usize,
    pub polynomial_action: PolynomialActionSummary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReportOptions {
    pub radius: usize,
    pub max_dim: usize,
    pub parallel: bool,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            radius: 6,
            max_dim: cohomology::DEFAULT_MAX_DIM,
            parallel: false,
        }
    }
}

pub fn manifold_report(b: &Bundle, opts: ReportOptions) -> Result<ManifoldReport> {
    let exec = if opts.parallel {
        Exec::Parallel
    } else {
        Exec::Sequential
    };
    let alg = b.hull.algebra();
    let certificate = hull::hull_axiom_check(&b.hull, &b.group)?;
    let fitting = hull::fitting_radical_check(&b.group);
    let freeness = action::freeness_check(&b.group, opts.radius, opts.parallel)?;
    let betti = cohomology::betti_report(alg, &b.hull.hol_matrices(), opts.max_dim, exec)?;
    let emitted = action::emit_polynomial_action(&b.group)?;
    let relators_ok = action::relators_hold_polynomially(&b.group, &emitted)?;
    Ok(ManifoldReport {
        name: b.name.clone(),
        input_sha256: b.sha256.clone(),
        dim: alg.dim(),
        hirsch_rank: b.group.hirsch_rank(),
        certificate,
        fitting,
        freeness,
        betti_full: betti.betti_full,
        betti_invariant: betti.betti_invariant,
        euler_characteristic: betti.euler,
        orientable: betti.orientable,
        duality_ok: betti.duality_ok,
        torus_rank: hull::torus_rank(&b.group, &b.hull)?,
        polynomial_action: PolynomialActionSummary {
            degree_bound: emitted.degree_bound,
            max_degree: emitted.max_degree,
            relators_ok,
        },
    })
}
