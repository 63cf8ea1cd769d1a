#![allow(dead_code)]

use std::collections::HashSet;
use std::path::PathBuf;

use infrasolv::bundle::{self, Bundle};
use infrasolv::lie::NilpotentLieAlgebra;
use infrasolv::linalg;
use infrasolv::rational::{frac, int, one, zero};
use infrasolv::{Matrix, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const BUNDLES: [&str; 8] = [
    "torus2",
    "torus3",
    "klein_bottle",
    "dicosm",
    "hantzsche_wendt",
    "heisenberg",
    "heisenberg_infranil",
    "sol",
];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn bundle_path(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../bundles")
        .join(rel)
}

pub fn read_bundle_text(name: &str) -> String {
    std::fs::read_to_string(bundle_path(&format!("{name}.json"))).expect("bundle file")
}

pub fn load(name: &str) -> Bundle {
    bundle::load_bundle(&read_bundle_text(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn load_fixture(name: &str) -> Bundle {
    let text = std::fs::read_to_string(bundle_path(&format!("fixtures/{name}.json")))
        .expect("fixture file");
    bundle::load_bundle(&text).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn small_rational<R: Rng>(rng: &mut R) -> Rational {
    let den = [1, 1, 1, 2, 3][rng.gen_range(0..5)];
    frac(rng.gen_range(-4..=4), den)
}

pub fn random_matrix<R: Rng>(rng: &mut R, n: usize) -> Matrix {
    let data = (0..n * n).map(|_| small_rational(rng)).collect();
    Matrix::new(n, n, data).unwrap()
}

pub fn random_invertible<R: Rng>(rng: &mut R, n: usize) -> Matrix {
    loop {
        let m = random_matrix(rng, n);
        if linalg::rank(&m) == n {
            return m;
        }
    }
}

/// Unit lower triangular times unit upper triangular with small integer
/// entries: invertible over ℤ, keeps conjugates readable.
pub fn random_unimodular<R: Rng>(rng: &mut R, n: usize) -> Matrix {
    let mut l = Matrix::identity(n);
    let mut u = Matrix::identity(n);
    for i in 0..n {
        for j in 0..i {
            l[(i, j)] = int(rng.gen_range(-1..=1));
            u[(j, i)] = int(rng.gen_range(-1..=1));
        }
    }
    &l * &u
}

/// A matrix `g = P (S + N) P⁻¹` together with its known semisimple part `P S P⁻¹`.
pub struct KnownJordan {
    pub matrix: Matrix,
    pub semisimple: Matrix,
}

/// Blocks are Jordan blocks with rational eigenvalue, or repeated companion
/// blocks of `x² − a` chained by identity blocks above the diagonal.
pub fn random_known_jordan<R: Rng>(rng: &mut R, n: usize) -> KnownJordan {
    let mut s_blocks = Vec::new();
    let mut n_blocks = Vec::new();
    let mut left = n;
    while left > 0 {
        if left >= 2 && rng.gen_bool(0.4) {
            let a = [2, 3, 5, -1, -3][rng.gen_range(0..5)];
            let c = Matrix::from_i64(&[&[0, a], &[1, 0]]);
            let reps = if left >= 4 && rng.gen_bool(0.5) { 2 } else { 1 };
            let size = 2 * reps;
            let mut s = Matrix::zeros(size, size);
            let mut nil = Matrix::zeros(size, size);
            for r in 0..reps {
                s.set_block(2 * r, 2 * r, &c);
                if r + 1 < reps {
                    nil.set_block(2 * r, 2 * r + 2, &Matrix::identity(2));
                }
            }
            s_blocks.push(s);
            n_blocks.push(nil);
            left -= size;
        } else {
            let size = rng.gen_range(1..=left.min(3));
            let lambda = loop {
                let l = small_rational(rng);
                if l != zero() {
                    break l;
                }
            };
            let mut nil = Matrix::zeros(size, size);
            for i in 0..size - 1 {
                nil[(i, i + 1)] = one();
            }
            s_blocks.push(Matrix::identity(size).scale(&lambda));
            n_blocks.push(nil);
            left -= size;
        }
    }
    let s = Matrix::direct_sum(&s_blocks);
    let nil = Matrix::direct_sum(&n_blocks);
    let p = random_invertible(rng, n);
    let p_inv = linalg::inverse(&p).unwrap();
    KnownJordan {
        matrix: &(&p * &(&s + &nil)) * &p_inv,
        semisimple: &(&p * &s) * &p_inv,
    }
}

/// All products of the generators; panics if the group looks infinite.
pub fn group_closure(gens: &[Matrix], n: usize) -> Vec<Matrix> {
    let mut seen: HashSet<Matrix> = HashSet::new();
    let mut out = vec![Matrix::identity(n)];
    seen.insert(Matrix::identity(n));
    let mut i = 0;
    while i < out.len() {
        for g in gens {
            let x = &out[i] * g;
            if seen.insert(x.clone()) {
                out.push(x);
                assert!(out.len() <= 10_000, "generated group is too large");
            }
        }
        i += 1;
    }
    out
}

/// Graded building blocks whose sign-diagonal automorphisms are easy to list.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Block {
    Line,
    Heisenberg,
    Filiform,
}

impl Block {
    fn dim(self) -> usize {
        match self {
            Block::Line => 1,
            Block::Heisenberg => 3,
            Block::Filiform => 4,
        }
    }

    /// Brackets `[e_i, e_j] = e_k` in local indices.
    fn brackets(self) -> &'static [(usize, usize, usize)] {
        match self {
            Block::Line => &[],
            Block::Heisenberg => &[(0, 1, 2)],
            Block::Filiform => &[(0, 1, 2), (0, 2, 3)],
        }
    }

    /// A random automorphism of finite order, as a local matrix.
    fn random_automorphism<R: Rng>(self, rng: &mut R) -> Matrix {
        let mut sign = || if rng.gen_bool(0.5) { 1 } else { -1 };
        match self {
            Block::Line => Matrix::from_i64(&[&[sign()]]),
            Block::Heisenberg => {
                let (a, b) = (sign(), sign());
                if rng.gen_bool(0.3) {
                    // swap e1 and e2, which negates the bracket
                    Matrix::from_i64(&[&[0, b, 0], &[a, 0, 0], &[0, 0, -a * b]])
                } else {
                    Matrix::diag(&[int(a), int(b), int(a * b)])
                }
            }
            Block::Filiform => {
                let (a, b) = (sign(), sign());
                Matrix::diag(&[int(a), int(b), int(a * b), int(b)])
            }
        }
    }
}

/// A random nilpotent Lie algebra of dimension at most 6 with finitely many
/// automorphisms generating a finite group that fixes a common vector.
pub struct RandomInput {
    pub algebra: NilpotentLieAlgebra,
    pub hol: Vec<Matrix>,
    pub group: Vec<Matrix>,
}

pub fn random_input<R: Rng>(rng: &mut R) -> RandomInput {
    let mut blocks = vec![Block::Line];
    let target = rng.gen_range(1..=6);
    let mut dim = 1;
    loop {
        let choice = [Block::Line, Block::Heisenberg, Block::Filiform][rng.gen_range(0..3)];
        if dim + choice.dim() > target {
            break;
        }
        dim += choice.dim();
        blocks.push(choice);
    }
    let offsets: Vec<usize> = blocks
        .iter()
        .scan(0, |acc, b| {
            let o = *acc;
            *acc += b.dim();
            Some(o)
        })
        .collect();

    let mut brackets = Vec::new();
    for (b, &o) in blocks.iter().zip(&offsets) {
        for &(i, j, k) in b.brackets() {
            let mut v = vec![zero(); dim];
            v[o + k] = one();
            brackets.push((o + i, o + j, v));
        }
    }
    let graded = NilpotentLieAlgebra::from_brackets(
        NilpotentLieAlgebra::default_labels(dim),
        &brackets,
        None,
    )
    .expect("graded algebra");

    let ngens = rng.gen_range(1..=3);
    let mut hol = Vec::new();
    for _ in 0..ngens {
        let mut order: Vec<usize> = (0..blocks.len()).collect();
        if blocks.len() > 2 && rng.gen_bool(0.5) {
            // swap two blocks of equal type; slot 0 is the common fixed line
            let i = rng.gen_range(1..blocks.len());
            let j = rng.gen_range(1..blocks.len());
            if blocks[i] == blocks[j] {
                order.swap(i, j);
            }
        }
        let mut m = Matrix::zeros(dim, dim);
        m[(0, 0)] = one();
        for (slot, &src) in order.iter().enumerate().skip(1) {
            let local = blocks[src].random_automorphism(rng);
            m.set_block(offsets[slot], offsets[src], &local);
        }
        hol.push(m);
    }

    let p = random_unimodular(rng, dim);
    let p_inv = linalg::inverse(&p).unwrap();
    let cols = p.columns();
    let mut constants = vec![vec![vec![zero(); dim]; dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            constants[i][j] = p_inv.mul_vec(&graded.bracket(&cols[i], &cols[j]));
        }
    }
    let algebra =
        NilpotentLieAlgebra::new(NilpotentLieAlgebra::default_labels(dim), constants, None)
            .expect("conjugated algebra");
    let hol: Vec<Matrix> = hol.iter().map(|h| &(&p_inv * h) * &p).collect();
    let group = group_closure(&hol, dim);
    RandomInput {
        algebra,
        hol,
        group,
    }
}

/// `dim (Λᵏ V*)^G = (1/|G|) Σ_g e_k(g)`, with `e_k` read off the
/// characteristic polynomial.
pub fn invariant_wedge_dims(group: &[Matrix], n: usize) -> Vec<Rational> {
    let mut sums = vec![zero(); n + 1];
    for g in group {
        let cp = linalg::charpoly(g).unwrap();
        let c = cp.coeffs();
        for (k, s) in sums.iter_mut().enumerate() {
            let coeff = c.get(n - k).cloned().unwrap_or_else(zero);
            *s += if k % 2 == 0 { coeff } else { -coeff };
        }
    }
    let size = int(group.len() as i64);
    sums.into_iter().map(|s| s / size.clone()).collect()
}
