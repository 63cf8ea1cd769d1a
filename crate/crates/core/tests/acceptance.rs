mod common;

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use infrasolv::action::{self, emit_polynomial_action, freeness_check};
use infrasolv::cohomology::{
    self, betti_report, build_ce_complex, invariant_subcomplex, invariants_of_cohomology, t_action,
    Exec, DEFAULT_MAX_DIM,
};
use infrasolv::hull::{self, hull_axiom_check, strong_radical_check, torus_rank};
use infrasolv::induce::{induce_extension, verify_intersection, CosetAction, ExtensionData};
use infrasolv::jordan::{self, multiplicative_jordan};
use infrasolv::lie::NilpotentLieAlgebra;
use infrasolv::linalg;
use infrasolv::rational::{int, zero};
use infrasolv::Matrix;
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if !$cond {
            return Err(format!($($msg)*));
        }
    };
}

const RANDOM_INPUTS: usize = 50;
const RANDOM_SEED: u64 = 0x5eed;

fn random_inputs() -> Vec<common::RandomInput> {
    let mut rng = common::rng(RANDOM_SEED);
    (0..RANDOM_INPUTS)
        .map(|_| common::random_input(&mut rng))
        .collect()
}

fn betti_numbers() -> Outcome {
    let cases: [(&str, &[usize]); 5] = [
        ("torus3", &[1, 3, 3, 1]),
        ("klein_bottle", &[1, 1, 0]),
        ("hantzsche_wendt", &[1, 0, 0, 1]),
        ("heisenberg", &[1, 2, 2, 1]),
        ("sol", &[1, 1, 1, 1]),
    ];
    let mut slowest = Duration::ZERO;
    for (name, expected) in cases {
        let b = common::load(name);
        let start = Instant::now();
        let r = betti_report(
            b.hull.algebra(),
            &b.hull.hol_matrices(),
            DEFAULT_MAX_DIM,
            Exec::Sequential,
        )
        .map_err(|e| format!("{name}: {e}"))?;
        let took = start.elapsed();
        ensure!(
            r.betti_invariant == expected,
            "{name}: got {:?}, want {expected:?}",
            r.betti_invariant
        );
        ensure!(took < Duration::from_secs(1), "{name}: took {took:?}");
        slowest = slowest.max(took);
    }
    Ok(format!("5 instances, slowest {slowest:.2?}"))
}

fn both_paths(
    alg: &NilpotentLieAlgebra,
    hol: &[Matrix],
) -> Result<(Vec<usize>, Vec<usize>), String> {
    let c = build_ce_complex(alg, DEFAULT_MAX_DIM, Exec::Sequential).map_err(|e| e.to_string())?;
    let t = t_action(&c, hol, Exec::Sequential).map_err(|e| e.to_string())?;
    let sub = invariant_subcomplex(&c, &t, Exec::Sequential).map_err(|e| e.to_string())?;
    let other = invariants_of_cohomology(&c, &t, Exec::Sequential).map_err(|e| e.to_string())?;
    Ok((sub.betti(), other))
}

fn reductivity_commutation() -> Outcome {
    for name in common::BUNDLES {
        let b = common::load(name);
        let (a, c) = both_paths(b.hull.algebra(), &b.hull.hol_matrices())?;
        ensure!(
            a == c,
            "{name}: invariant subcomplex {a:?} vs invariant cohomology {c:?}"
        );
    }
    let mut max_group = 0;
    for (i, input) in random_inputs().iter().enumerate() {
        let (a, c) = both_paths(&input.algebra, &input.hol)?;
        ensure!(a == c, "random input {i}: {a:?} vs {c:?}");
        max_group = max_group.max(input.group.len());
    }
    Ok(format!(
        "{} bundles, {RANDOM_INPUTS} random inputs (largest holonomy group {max_group})",
        common::BUNDLES.len()
    ))
}

fn jordan_suite() -> Outcome {
    let start = Instant::now();
    let mut rng = common::rng(RANDOM_SEED + 1);
    for i in 0..200 {
        let n = rng.gen_range(1..=6);
        let (g, known) = if i % 2 == 0 {
            (common::random_invertible(&mut rng, n), None)
        } else {
            let k = common::random_known_jordan(&mut rng, n);
            (k.matrix, Some(k.semisimple))
        };
        let p = multiplicative_jordan(&g).map_err(|e| format!("matrix {i}: {e}"))?;
        ensure!(
            &p.semisimple * &p.unipotent == g,
            "matrix {i}: parts do not multiply back"
        );
        ensure!(
            &p.semisimple * &p.unipotent == &p.unipotent * &p.semisimple,
            "matrix {i}: parts do not commute"
        );
        ensure!(
            jordan::is_semisimple(&p.semisimple).unwrap_or(false),
            "matrix {i}: s not semisimple"
        );
        ensure!(
            jordan::is_unipotent(&p.unipotent).unwrap_or(false),
            "matrix {i}: u not unipotent"
        );
        ensure!(
            (&p.unipotent - &Matrix::identity(n))
                .pow(n as u32)
                .is_zero(),
            "matrix {i}: (u - 1)^n != 0"
        );
        if let Some(s) = known {
            ensure!(
                p.semisimple == s,
                "matrix {i}: semisimple part differs from the constructed one"
            );
        }
    }
    for i in 0..50 {
        let n = rng.gen_range(1..=6);
        let k = common::random_known_jordan(&mut rng, n);
        let q = common::random_invertible(&mut rng, n);
        let q_inv = linalg::inverse(&q).map_err(|e| e.to_string())?;
        let conj = |m: &Matrix| &(&q * m) * &q_inv;
        let a = multiplicative_jordan(&k.matrix).map_err(|e| e.to_string())?;
        let b = multiplicative_jordan(&conj(&k.matrix)).map_err(|e| e.to_string())?;
        ensure!(
            b.semisimple == conj(&a.semisimple) && b.unipotent == conj(&a.unipotent),
            "conjugation {i}: decomposition does not transport"
        );
    }
    let took = start.elapsed();
    ensure!(took < Duration::from_secs(30), "took {took:?}");
    Ok(format!("200 matrices, 50 conjugations, {took:.2?}"))
}

fn homomorphism_and_transport() -> Outcome {
    for name in common::BUNDLES {
        let b = common::load(name);
        let emitted = emit_polynomial_action(&b.group).map_err(|e| format!("{name}: {e}"))?;
        let ok = action::relators_hold_polynomially(&b.group, &emitted)
            .map_err(|e| format!("{name}: {e}"))?;
        ensure!(ok, "{name}: a relator is not the identity map");
    }
    let b = common::load("heisenberg");
    let alg = b.group.algebra();
    let mut elements: Vec<_> = b.group.generators().to_vec();
    for g in b.group.generators() {
        elements.push(g.inverse(alg).map_err(|e| e.to_string())?);
    }
    let mut rng = common::rng(RANDOM_SEED + 2);
    for i in 0..20 {
        let x: Vec<_> = (0..alg.dim())
            .map(|_| common::small_rational(&mut rng))
            .collect();
        let v = alg.exp_coords(&x).map_err(|e| e.to_string())?;
        for a in &elements {
            let t = hull::conjugacy_transport(alg, &v, a).map_err(|e| e.to_string())?;
            ensure!(
                hull::intertwines(alg, &v, a, &t).map_err(|e| e.to_string())?,
                "v #{i}: intertwining fails"
            );
        }
    }
    Ok(format!(
        "{} bundles, 20 random v x {} elements",
        common::BUNDLES.len(),
        elements.len()
    ))
}

fn polynomial_geometry() -> Outcome {
    let b = common::load("heisenberg");
    let emitted = emit_polynomial_action(&b.group).map_err(|e| e.to_string())?;
    ensure!(
        emitted.degree_bound <= 2,
        "degree bound {}",
        emitted.degree_bound
    );
    for g in &emitted.generators {
        ensure!(
            g.forward.degree() <= emitted.degree_bound
                && g.inverse.degree() <= emitted.degree_bound,
            "{} exceeds the common bound",
            g.name
        );
        let fi = g.forward.compose(&g.inverse).map_err(|e| e.to_string())?;
        let if_ = g.inverse.compose(&g.forward).map_err(|e| e.to_string())?;
        ensure!(
            fi.is_identity() && if_.is_identity(),
            "{} and its inverse do not compose to the identity",
            g.name
        );
    }
    Ok(format!(
        "bound {}, max degree {}",
        emitted.degree_bound, emitted.max_degree
    ))
}

fn freeness_and_torus_rank() -> Outcome {
    let klein = common::load("klein_bottle");
    let rep = freeness_check(&klein.group, 6, false).map_err(|e| e.to_string())?;
    ensure!(
        rep.free && rep.inconclusive.is_empty(),
        "Klein bottle not free: {:?}",
        rep.witness
    );
    let klein_checked = rep.elements_checked;
    let kr = torus_rank(&klein.group, &klein.hull).map_err(|e| e.to_string())?;
    ensure!(kr == 1, "Klein bottle torus rank {kr}");

    let pillow = common::load_fixture("pillowcase_nonfree");
    let rep = freeness_check(&pillow.group, 6, false).map_err(|e| e.to_string())?;
    let w = rep.witness.ok_or("non-free fixture reported free")?;
    ensure!(
        w.word == "r" && w.point == vec![zero(), zero()],
        "wrong witness {} at {:?}",
        w.word,
        w.point
    );

    for (name, want) in [("torus3", 3), ("heisenberg", 1)] {
        let b = common::load(name);
        let r = torus_rank(&b.group, &b.hull).map_err(|e| e.to_string())?;
        ensure!(r == want, "{name}: torus rank {r}, want {want}");
    }
    Ok(format!(
        "Klein free over {klein_checked} elements, witness r at origin"
    ))
}

fn hull_axioms() -> Outcome {
    let b = common::load("heisenberg");
    let cert = hull_axiom_check(&b.hull, &b.group).map_err(|e| e.to_string())?;
    ensure!(
        cert.dim_u == 3 && cert.hirsch_rank == 3,
        "dim U {} vs rank {}",
        cert.dim_u,
        cert.hirsch_rank
    );
    ensure!(
        cert.dim_rank_ok && cert.strong_radical_ok,
        "certificate {:?}",
        cert.diagnostics
    );
    let bad = common::load_fixture("heisenberg_central_torus");
    let rep = strong_radical_check(&bad.hull).map_err(|e| e.to_string())?;
    ensure!(!rep.ok, "central torus passed the strong radical check");
    let w = rep.witness.ok_or("no witness")?;
    Ok(format!("3 = 3, central torus witness {w}"))
}

fn coset(name: &str, table: &[(usize, &str)]) -> CosetAction {
    CosetAction {
        name: name.into(),
        table: table.iter().map(|&(i, w)| (i, w.to_string())).collect(),
    }
}

fn induced_hull() -> Outcome {
    let t = |x: i64, y: i64| Matrix::from_i64(&[&[1, 0, x], &[0, 1, y], &[0, 0, 1]]);
    let cases = [
        (
            "infinite dihedral",
            ExtensionData {
                gamma_names: vec!["t".into()],
                gamma_matrices: vec![Matrix::from_i64(&[&[1, 1], &[0, 1]])],
                conjugators: vec![Matrix::identity(2), Matrix::diag(&[int(1), int(-1)])],
                delta_generators: vec![
                    coset("t", &[(0, "t"), (1, "t^-1")]),
                    coset("s", &[(1, "1"), (0, "1")]),
                ],
                delta_relators: vec!["s^2".into(), "s t s^-1 t".into()],
            },
        ),
        (
            "Klein bottle",
            ExtensionData {
                gamma_names: vec!["a".into(), "c".into()],
                gamma_matrices: vec![t(0, 1), t(1, 0)],
                conjugators: vec![
                    Matrix::identity(3),
                    Matrix::diag(&[int(1), int(-1), int(1)]),
                ],
                delta_generators: vec![
                    coset("a", &[(0, "a"), (1, "a^-1")]),
                    coset("b", &[(1, "1"), (0, "c")]),
                    coset("c", &[(0, "c"), (1, "c")]),
                ],
                delta_relators: vec![
                    "b a b^-1 a".into(),
                    "b^2 c^-1".into(),
                    "a c a^-1 c^-1".into(),
                ],
            },
        ),
    ];
    let mut checked = Vec::new();
    for (name, data) in cases {
        let ext = induce_extension(&data).map_err(|e| format!("{name}: {e}"))?;
        for r in &data.delta_relators {
            let w = ext.parse_word(r).map_err(|e| e.to_string())?;
            ensure!(
                ext.eval(&w).map_err(|e| e.to_string())?.is_identity(),
                "{name}: relator {r} fails"
            );
        }
        let rep = verify_intersection(&ext, 3).map_err(|e| e.to_string())?;
        ensure!(
            rep.violations.is_empty(),
            "{name}: violations {:?}",
            rep.violations
        );
        checked.push(format!("{name} {}", rep.elements_checked));
    }
    Ok(format!(
        "radius 3, elements checked: {}",
        checked.join(", ")
    ))
}

fn euler_and_differential() -> Outcome {
    let check = |label: &str, alg: &NilpotentLieAlgebra, hol: &[Matrix]| -> Result<(), String> {
        let c =
            build_ce_complex(alg, DEFAULT_MAX_DIM, Exec::Sequential).map_err(|e| e.to_string())?;
        ensure!(c.is_complex(), "{label}: d^2 != 0");
        let t = t_action(&c, hol, Exec::Sequential).map_err(|e| e.to_string())?;
        let sub = invariant_subcomplex(&c, &t, Exec::Sequential).map_err(|e| e.to_string())?;
        ensure!(sub.is_complex(), "{label}: invariant d^2 != 0");
        let chi = cohomology::euler_characteristic(&sub.betti());
        ensure!(chi == 0, "{label}: euler characteristic {chi}");
        Ok(())
    };
    for name in common::BUNDLES {
        let b = common::load(name);
        check(name, b.hull.algebra(), &b.hull.hol_matrices())?;
    }
    for (i, input) in random_inputs().iter().enumerate() {
        check(&format!("random input {i}"), &input.algebra, &input.hol)?;
    }
    Ok(format!(
        "{} bundles, {RANDOM_INPUTS} random inputs",
        common::BUNDLES.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("invariant Betti numbers", betti_numbers),
        (
            "cohomology of invariants = invariants of cohomology",
            reductivity_commutation,
        ),
        ("Jordan suite", jordan_suite),
        (
            "relator identities and conjugacy transport",
            homomorphism_and_transport,
        ),
        ("polynomial degree bound and inverses", polynomial_geometry),
        ("freeness and torus rank", freeness_and_torus_rank),
        ("hull axioms", hull_axioms),
        ("induced hull of finite extensions", induced_hull),
        ("Euler characteristic and d^2 = 0", euler_and_differential),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failures = 0;
    for (i, (title, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let took = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS  criterion {}: {title} ({detail}; {took:.2?})", i + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL  criterion {}: {title}: {why} ({took:.2?})", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
