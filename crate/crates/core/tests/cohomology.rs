mod common;

use infrasolv::cohomology::{
    self, betti_report, build_ce_complex, cohomology_ranks, invariant_subcomplex,
    invariants_of_cohomology, t_action, Exec, DEFAULT_MAX_DIM,
};
use infrasolv::lie::NilpotentLieAlgebra;
use infrasolv::rational::{int, zero};
use infrasolv::Matrix;
use proptest::prelude::*;

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[test]
fn bundled_invariant_betti_numbers() {
    let expected: [(&str, &[usize]); 8] = [
        ("torus2", &[1, 2, 1]),
        ("torus3", &[1, 3, 3, 1]),
        ("klein_bottle", &[1, 1, 0]),
        ("dicosm", &[1, 1, 1, 1]),
        ("hantzsche_wendt", &[1, 0, 0, 1]),
        ("heisenberg", &[1, 2, 2, 1]),
        ("heisenberg_infranil", &[1, 1, 1, 1]),
        ("sol", &[1, 1, 1, 1]),
    ];
    for (name, betti) in expected {
        let b = common::load(name);
        let r = betti_report(
            b.hull.algebra(),
            &b.hull.hol_matrices(),
            DEFAULT_MAX_DIM,
            Exec::Sequential,
        )
        .unwrap();
        assert_eq!(r.betti_invariant, betti, "{name}");
        assert_eq!(r.euler, 0, "{name}");
        assert!(r.duality_ok, "{name}");
    }
}

#[test]
fn parallel_matches_sequential_on_bundles() {
    for name in common::BUNDLES {
        let b = common::load(name);
        let hol = b.hull.hol_matrices();
        let seq = betti_report(b.hull.algebra(), &hol, DEFAULT_MAX_DIM, Exec::Sequential).unwrap();
        let par = betti_report(b.hull.algebra(), &hol, DEFAULT_MAX_DIM, Exec::Parallel).unwrap();
        assert_eq!(seq, par, "{name}");
    }
}

#[test]
fn wedge_dimensions_are_binomial() {
    for n in 0..=6 {
        for k in 0..=n {
            assert_eq!(cohomology::wedge_basis(n, k).len(), binomial(n, k));
        }
    }
}

#[test]
fn invariant_euler_on_bundles_matches_group_average() {
    for name in common::BUNDLES {
        let b = common::load(name);
        let hol = b.hull.hol_matrices();
        let d = b.hull.algebra().dim();
        // sol has an infinite T; the average only makes sense for finite groups
        if name == "sol" {
            continue;
        }
        let group = common::group_closure(&hol, d);
        assert_eq!(
            cohomology::averaged_euler(&group).unwrap(),
            zero(),
            "{name}"
        );
    }
}

#[test]
fn dimension_cap_is_enforced() {
    let alg = NilpotentLieAlgebra::abelian(3);
    assert!(build_ce_complex(&alg, 2, Exec::Sequential).is_err());
    assert!(build_ce_complex(&alg, 3, Exec::Sequential).is_ok());
}

#[test]
fn filiform_four_betti() {
    // [e1,e2]=e3, [e1,e3]=e4 has Betti numbers (1,2,2,2,1)
    let z = || vec![zero(); 4];
    let mut b12 = z();
    b12[2] = int(1);
    let mut b13 = z();
    b13[3] = int(1);
    let alg = NilpotentLieAlgebra::from_brackets(
        NilpotentLieAlgebra::default_labels(4),
        &[(0, 1, b12), (0, 2, b13)],
        None,
    )
    .unwrap();
    let c = build_ce_complex(&alg, DEFAULT_MAX_DIM, Exec::Sequential).unwrap();
    assert_eq!(cohomology_ranks(&c, Exec::Sequential), vec![1, 2, 2, 2, 1]);
}

#[test]
fn non_automorphism_is_rejected() {
    let alg = NilpotentLieAlgebra::heisenberg();
    let c = build_ce_complex(&alg, DEFAULT_MAX_DIM, Exec::Sequential).unwrap();
    let bad = Matrix::diag(&[int(2), int(1), int(1)]);
    assert!(t_action(&c, &[bad], Exec::Sequential).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_inputs_both_paths_agree(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let input = common::random_input(&mut rng);
        let n = input.algebra.dim();
        let c = build_ce_complex(&input.algebra, DEFAULT_MAX_DIM, Exec::Sequential).unwrap();
        prop_assert!(c.is_complex());
        let t = t_action(&c, &input.hol, Exec::Sequential).unwrap();
        let sub = invariant_subcomplex(&c, &t, Exec::Sequential).unwrap();
        prop_assert!(sub.is_complex());
        let via_invariants = sub.betti();
        let via_cohomology = invariants_of_cohomology(&c, &t, Exec::Sequential).unwrap();
        prop_assert_eq!(&via_invariants, &via_cohomology);

        let oracle = common::invariant_wedge_dims(&input.group, n);
        let dims: Vec<_> = sub.dims().into_iter().map(|d| int(d as i64)).collect();
        prop_assert_eq!(dims, oracle);

        prop_assert_eq!(cohomology::euler_characteristic(&via_invariants), 0);
        prop_assert_eq!(cohomology::averaged_euler(&input.group).unwrap(), zero());
    }

    #[test]
    fn full_cohomology_is_palindromic(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let input = common::random_input(&mut rng);
        let alg = &input.algebra;
        let c = build_ce_complex(alg, DEFAULT_MAX_DIM, Exec::Sequential).unwrap();
        let betti = cohomology_ranks(&c, Exec::Sequential);
        prop_assert!(cohomology::is_palindromic(&betti));
        prop_assert_eq!(betti[0], 1);
        // b₁ = dim 𝔲 − dim [𝔲, 𝔲]
        let derived = alg.lower_central_series().get(1).map_or(0, Vec::len);
        prop_assert_eq!(betti[1], alg.dim() - derived);
        prop_assert_eq!(cohomology::euler_characteristic(&betti), 0);
    }

    #[test]
    fn parallel_ranks_match(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let input = common::random_input(&mut rng);
        let seq = betti_report(&input.algebra, &input.hol, DEFAULT_MAX_DIM, Exec::Sequential).unwrap();
        let par = betti_report(&input.algebra, &input.hol, DEFAULT_MAX_DIM, Exec::Parallel).unwrap();
        prop_assert_eq!(seq, par);
    }
}
