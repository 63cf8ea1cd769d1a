//! Exact linear algebra over ℚ.
//!
//! Elimination is fraction-free: every row is first scaled to integers and
//! reduced with Bareiss' method, so intermediate entries stay minors of the
//! input. Reduced fractions only appear when the echelon form is normalized.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::poly::Poly;
use crate::rational::Rational;

/// Row scaled to integers (multiplied by the lcm of its denominators).
fn integer_row(row: &[Rational]) -> Vec<BigInt> {
    let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
}

struct Echelon {
    rows: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
    swaps: usize,
}

fn bareiss(mut a: Vec<Vec<BigInt>>, ncols: usize) -> Echelon {
    let nrows = a.len();
    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    let mut swaps = 0;
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        if p != r {
            a.swap(p, r);
            swaps += 1;
        }
        let (top, bottom) = a.split_at_mut(r + 1);
        let pivot_row = &top[r];
        for row in bottom.iter_mut() {
            let f = row[c].clone();
            for j in c + 1..ncols {
                let v = &pivot_row[c] * &row[j] - &f * &pivot_row[j];
                let (q, rem) = v.div_rem(&prev);
                debug_assert!(rem.is_zero(), "Bareiss division must be exact");
                row[j] = q;
            }
            row[c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    Echelon {
        rows: a,
        pivots,
        swaps,
    }
}

fn echelon_of(m: &Matrix) -> Echelon {
    let rows = (0..m.rows()).map(|i| integer_row(m.row(i))).collect();
    bareiss(rows, m.cols())
}

pub fn rank(m: &Matrix) -> usize {
    echelon_of(m).pivots.len()
}

/// Reduced row echelon form and its pivot columns. Zero rows are dropped.
pub fn rref(m: &Matrix) -> (Matrix, Vec<usize>) {
    let e = echelon_of(m);
    let r = e.pivots.len();
    let n = m.cols();
    let mut rows: Vec<Vec<Rational>> = e.rows[..r]
        .iter()
        .zip(&e.pivots)
        .map(|(row, &p)| {
            let lead = row[p].clone();
            row.iter()
                .map(|x| Rational::new(x.clone(), lead.clone()))
                .collect()
        })
        .collect();
    for k in (0..r).rev() {
        let p = e.pivots[k];
        let (upper, lower) = rows.split_at_mut(k);
        let pivot_row = &lower[0];
        for row in upper.iter_mut() {
            if row[p].is_zero() {
                continue;
            }
            let f = row[p].clone();
            for j in p..n {
                if !pivot_row[j].is_zero() {
                    row[j] -= &f * &pivot_row[j];
                }
            }
        }
    }
    let out = Matrix::new(r, n, rows.into_iter().flatten().collect()).expect("rref shape");
    (out, e.pivots)
}

fn kernel_from_rref(rref: &Matrix, pivots: &[usize], ncols: usize) -> Vec<Vec<Rational>> {
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); ncols];
            v[f] = Rational::one();
            for (k, &p) in pivots.iter().enumerate() {
                v[p] = -rref[(k, f)].clone();
            }
            v
        })
        .collect()
}

/// Basis of `{x : m x = 0}`.
pub fn kernel(m: &Matrix) -> Vec<Vec<Rational>> {
    let (r, p) = rref(m);
    kernel_from_rref(&r, &p, m.cols())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    /// `None` when the system is inconsistent.
    pub particular: Option<Vec<Rational>>,
    pub kernel: Vec<Vec<Rational>>,
}

/// Solves `a x = b`: one particular solution plus a kernel basis.
pub fn solve(a: &Matrix, b: &[Rational]) -> Result<Solution> {
    if a.rows() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} equations but right-hand side of length {}",
            a.rows(),
            b.len()
        )));
    }
    let n = a.cols();
    let mut aug = Matrix::zeros(a.rows(), n + 1);
    aug.set_block(0, 0, a);
    aug.set_block(0, n, &Matrix::column(b));
    let (r, pivots) = rref(&aug);
    let inconsistent = pivots.last() == Some(&n);
    let a_pivots: Vec<usize> = pivots.iter().copied().filter(|&p| p < n).collect();
    let a_rref = r.block(0, 0, a_pivots.len(), n);
    let kernel = kernel_from_rref(&a_rref, &a_pivots, n);
    let particular = (!inconsistent).then(|| {
        let mut x = vec![Rational::zero(); n];
        for (k, &p) in a_pivots.iter().enumerate() {
            x[p] = r[(k, n)].clone();
        }
        x
    });
    Ok(Solution { particular, kernel })
}

/// Solves `a X = b` column by column; `None` if any column is inconsistent.
pub fn solve_matrix(a: &Matrix, b: &Matrix) -> Result<Option<Matrix>> {
    if a.rows() != b.rows() {
        return Err(Error::DimensionMismatch("solve_matrix row counts".into()));
    }
    let n = a.cols();
    let mut aug = Matrix::zeros(a.rows(), n + b.cols());
    aug.set_block(0, 0, a);
    aug.set_block(0, n, b);
    let (r, pivots) = rref(&aug);
    if pivots.iter().any(|&p| p >= n) {
        return Ok(None);
    }
    let mut x = Matrix::zeros(n, b.cols());
    for (k, &p) in pivots.iter().enumerate() {
        for j in 0..b.cols() {
            x[(p, j)] = r[(k, n + j)].clone();
        }
    }
    Ok(Some(x))
}

pub fn determinant(m: &Matrix) -> Result<Rational> {
    let n = m.ensure_square()?;
    if n == 0 {
        return Ok(Rational::one());
    }
    let mut scale = BigInt::one();
    let rows: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            let row = m.row(i);
            let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            scale *= &l;
            row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
        })
        .collect();
    let e = bareiss(rows, n);
    if e.pivots.len() < n {
        return Ok(Rational::zero());
    }
    let mut d = Rational::new(e.rows[n - 1][n - 1].clone(), scale);
    if e.swaps % 2 == 1 {
        d = -d;
    }
    Ok(d)
}

pub fn inverse(m: &Matrix) -> Result<Matrix> {
    let n = m.ensure_square()?;
    solve_matrix(m, &Matrix::identity(n))?.ok_or(Error::Singular)
}

/// Characteristic polynomial `det(xI - m)` by Faddeev–LeVerrier.
pub fn charpoly(m: &Matrix) -> Result<Poly> {
    let n = m.ensure_square()?;
    let mut c = vec![Rational::zero(); n + 1];
    c[n] = Rational::one();
    let mut mk = Matrix::zeros(n, n);
    for k in 1..=n {
        mk = &(m * &mk) + &Matrix::identity(n).scale(&c[n - k + 1]);
        let t = (m * &mk).trace();
        c[n - k] = -t / Rational::from_integer(BigInt::from(k));
    }
    Ok(Poly::new(c))
}

/// Monic minimal polynomial: lcm over basis vectors of the Krylov dependency
/// polynomial of each.
pub fn min_poly(m: &Matrix) -> Result<Poly> {
    let n = m.ensure_square()?;
    let mut acc = Poly::one();
    for i in 0..n {
        let mut e = vec![Rational::zero(); n];
        e[i] = Rational::one();
        let local = krylov_annihilator(m, e);
        acc = acc.lcm(&local);
    }
    Ok(acc)
}

fn krylov_annihilator(m: &Matrix, v0: Vec<Rational>) -> Poly {
    let n = v0.len();
    let mut chain = vec![v0];
    loop {
        let next = m.mul_vec(chain.last().unwrap());
        let basis = Matrix::from_columns(n, &chain);
        let sol = solve(&basis, &next).expect("krylov dimensions");
        if let Some(c) = sol.particular {
            // next = Σ c_j v_j  =>  x^k - Σ c_j x^j
            let mut coeffs: Vec<Rational> = c.into_iter().map(|x| -x).collect();
            coeffs.push(Rational::one());
            return Poly::new(coeffs);
        }
        chain.push(next);
    }
}

/// Basis (as vectors) of the joint kernel of several maps with equal column count.
pub fn joint_kernel(maps: &[Matrix], dim: usize) -> Result<Vec<Vec<Rational>>> {
    if maps.is_empty() {
        return Ok(identity_basis(dim));
    }
    if maps.iter().any(|m| m.cols() != dim) {
        return Err(Error::DimensionMismatch(
            "joint_kernel column counts".into(),
        ));
    }
    Ok(kernel(&Matrix::vstack(maps)?))
}

pub fn identity_basis(dim: usize) -> Vec<Vec<Rational>> {
    (0..dim)
        .map(|i| {
            let mut v = vec![Rational::zero(); dim];
            v[i] = Rational::one();
            v
        })
        .collect()
}

/// Fixed space `{x : g x = x for every g}`.
pub fn fixed_space(gens: &[Matrix], dim: usize) -> Result<Vec<Vec<Rational>>> {
    let id = Matrix::identity(dim);
    let maps: Vec<Matrix> = gens.iter().map(|g| g - &id).collect();
    joint_kernel(&maps, dim)
}

/// Incrementally maintained reduced echelon basis of a subspace of ℚ^d.
#[derive(Clone, Debug)]
pub struct SpanBuilder {
    dim: usize,
    rows: Vec<Vec<Rational>>,
    pivots: Vec<usize>,
}

impl SpanBuilder {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn reduce(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.dim, "vector length");
        let mut v = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v[p].is_zero() {
                continue;
            }
            let f = v[p].clone();
            for (x, r) in v.iter_mut().zip(row).skip(p) {
                if !r.is_zero() {
                    *x -= &f * r;
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    /// Adds `v`; returns `false` if it was already in the span.
    pub fn insert(&mut self, v: &[Rational]) -> bool {
        let mut r = self.reduce(v);
        let Some(p) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = r[p].recip();
        for x in r.iter_mut() {
            *x *= &inv;
        }
        for row in self.rows.iter_mut() {
            if row[p].is_zero() {
                continue;
            }
            let f = row[p].clone();
            for (x, y) in row.iter_mut().zip(&r).skip(p) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.rows.insert(at, r);
        true
    }

    pub fn basis(&self) -> &[Vec<Rational>] {
        &self.rows
    }
}

/// True when `v` has no nonzero entries.
pub fn is_zero_vec(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// Largest absolute numerator or denominator; a blow-up diagnostic.
pub fn height(m: &Matrix) -> BigInt {
    m.entries()
        .iter()
        .map(|x| x.numer().abs().max(x.denom().clone()))
        .max()
        .unwrap_or_else(BigInt::zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};
    use proptest::prelude::*;

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&Matrix::identity(2)), 2);
        assert_eq!(rank(&Matrix::zeros(3, 3)), 0);
        assert_eq!(rank(&Matrix::from_i64(&[&[1, 2], &[2, 4]])), 1);
    }

    #[test]
    fn solve_examples() {
        let s = solve(&Matrix::identity(2), &[int(1), int(2)]).unwrap();
        assert_eq!(s.particular, Some(vec![int(1), int(2)]));
        assert!(s.kernel.is_empty());

        let s = solve(&Matrix::from_i64(&[&[0, 0]]), &[int(1)]).unwrap();
        assert_eq!(s.particular, None);

        let s = solve(&Matrix::from_i64(&[&[1, 1]]), &[int(2)]).unwrap();
        assert_eq!(s.particular, Some(vec![int(2), int(0)]));
        assert_eq!(s.kernel, vec![vec![int(-1), int(1)]]);

        assert!(solve(&Matrix::identity(2), &[int(1)]).is_err());
    }

    #[test]
    fn min_poly_examples() {
        assert_eq!(
            min_poly(&Matrix::identity(2)).unwrap(),
            Poly::from_i64(&[-1, 1])
        );
        assert_eq!(
            min_poly(&Matrix::from_i64(&[&[0, 1], &[0, 0]])).unwrap(),
            Poly::from_i64(&[0, 0, 1])
        );
        assert_eq!(
            min_poly(&Matrix::from_i64(&[&[2, 1], &[0, 2]])).unwrap(),
            Poly::from_i64(&[4, -4, 1])
        );
        assert!(min_poly(&Matrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn charpoly_and_det() {
        let m = Matrix::from_i64(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        let p = charpoly(&m).unwrap();
        // det(xI - m) at x = 0 is -det(m) for odd n
        assert_eq!(p.eval(&int(0)), -determinant(&m).unwrap());
        assert_eq!(determinant(&m).unwrap(), int(18));
        assert!(p.eval_matrix(&m).unwrap().is_zero());
        let swap = Matrix::from_i64(&[&[0, 1], &[1, 0]]);
        assert_eq!(determinant(&swap).unwrap(), int(-1));
        let r =
            Matrix::from_rows(vec![vec![frac(1, 2), int(0)], vec![int(0), frac(2, 3)]]).unwrap();
        assert_eq!(determinant(&r).unwrap(), frac(1, 3));
    }

    #[test]
    fn inverse_roundtrip() {
        let m = Matrix::from_i64(&[&[2, 1], &[7, 4]]);
        let inv = inverse(&m).unwrap();
        assert!((&m * &inv).is_identity());
        assert_eq!(
            inverse(&Matrix::from_i64(&[&[1, 2], &[2, 4]])),
            Err(Error::Singular)
        );
    }

    #[test]
    fn span_builder() {
        let mut s = SpanBuilder::new(3);
        assert!(s.insert(&[int(1), int(2), int(0)]));
        assert!(s.insert(&[int(0), int(1), int(1)]));
        assert!(!s.insert(&[int(1), int(3), int(1)]));
        assert!(s.contains(&[int(2), int(5), int(1)]));
        assert!(!s.contains(&[int(0), int(0), int(1)]));
        assert_eq!(s.rank(), 2);
    }

    fn small_matrix(max: usize) -> impl Strategy<Value = Matrix> {
        (1..=max, 1..=max).prop_flat_map(|(r, c)| {
            proptest::collection::vec((-4i64..=4, 1i64..=3), r * c).prop_map(move |v| {
                Matrix::new(r, c, v.into_iter().map(|(p, q)| frac(p, q)).collect()).unwrap()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn rank_nullity(m in small_matrix(5)) {
            let k = kernel(&m);
            prop_assert_eq!(rank(&m) + k.len(), m.cols());
            for v in &k {
                prop_assert!(is_zero_vec(&m.mul_vec(v)));
            }
        }

        #[test]
        fn solve_is_exact(m in small_matrix(4), x in proptest::collection::vec(-5i64..=5, 4)) {
            let x: Vec<Rational> = x.into_iter().take(m.cols()).map(int).chain(std::iter::repeat(int(0))).take(m.cols()).collect();
            let b = m.mul_vec(&x);
            let s = solve(&m, &b).unwrap();
            let p = s.particular.expect("consistent by construction");
            prop_assert_eq!(m.mul_vec(&p), b);
            for v in &s.kernel {
                prop_assert!(is_zero_vec(&m.mul_vec(v)));
            }
        }

        #[test]
        fn min_poly_annihilates_and_divides_charpoly(m in small_matrix(4)) {
            prop_assume!(m.is_square());
            let mp = min_poly(&m).unwrap();
            prop_assert!(mp.eval_matrix(&m).unwrap().is_zero());
            let cp = charpoly(&m).unwrap();
            prop_assert!(cp.rem(&mp).is_zero());
        }

        #[test]
        fn squarefree_part_is_squarefree(m in small_matrix(4)) {
            prop_assume!(m.is_square());
            let q = charpoly(&m).unwrap().squarefree_part().unwrap();
            prop_assert_eq!(q.gcd(&q.derivative()), Poly::one());
        }
    }
}
