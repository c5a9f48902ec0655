//! Exact rational linear algebra: dense matrices over arbitrary-precision
//! rationals, rank and kernel via fraction-free elimination, and the
//! deterministic sampling primitives used everywhere else.
//!
//! Rank and kernel never leave exact arithmetic. Rows are cleared to
//! coprime integers and eliminated Bareiss-style, with the pivot chosen by
//! smallest nonzero magnitude to limit coefficient growth.

mod rng;

pub(crate) use rng::stream_id;
pub use rng::{sample_rational, RngState};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Exact scalar type used throughout: arbitrary-precision rational,
/// always stored reduced with positive denominator.
pub type Rational = num_rational::BigRational;

/// Dense row-major matrix over [`Rational`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl Matrix {
    /// Builds a matrix from a flat row-major entry list.
    /// Panics if `entries.len() != rows * cols`.
    pub fn new(rows: usize, cols: usize, entries: Vec<Rational>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count must be rows*cols");
        Matrix { rows, cols, entries }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix::new(rows, cols, vec![Rational::zero(); rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    /// Builds a matrix from rows; all rows must share one length.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        for r in &rows {
            assert_eq!(r.len(), ncols, "ragged rows");
        }
        Matrix::new(nrows, ncols, rows.into_iter().flatten().collect())
    }

    /// Convenience constructor from integer rows.
    pub fn from_integer_rows(rows: Vec<Vec<BigInt>>) -> Self {
        Matrix::from_rows(
            rows.into_iter().map(|r| r.into_iter().map(Rational::from_integer).collect()).collect(),
        )
    }

    /// Convenience constructor from machine-integer rows, mostly for tests.
    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| Rational::from_integer(v.into())).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zero(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c).clone());
            }
        }
        out
    }

    /// Matrix product; panics on incompatible shapes.
    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in mul");
        let mut out = Matrix::zero(self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = Rational::zero();
                for k in 0..self.cols {
                    if !self.get(r, k).is_zero() && !other.get(k, c).is_zero() {
                        acc += self.get(r, k) * other.get(k, c);
                    }
                }
                out.set(r, c, acc);
            }
        }
        out
    }

    /// Matrix-vector product; panics if `v.len() != cols`.
    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols, "shape mismatch in mul_vec");
        (0..self.rows)
            .map(|r| {
                let mut acc = Rational::zero();
                for (c, vc) in v.iter().enumerate() {
                    if !self.get(r, c).is_zero() && !vc.is_zero() {
                        acc += self.get(r, c) * vc;
                    }
                }
                acc
            })
            .collect()
    }

    /// Each row scaled to coprime integers (zero rows stay zero).
    /// Row scaling preserves rank and kernel, so elimination works on these.
    fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|r| {
                let row = self.row(r);
                let mut denom_lcm = BigInt::one();
                for v in row {
                    denom_lcm = denom_lcm.lcm(v.denom());
                }
                let ints: Vec<BigInt> =
                    row.iter().map(|v| v.numer() * (&denom_lcm / v.denom())).collect();
                primitive_part(ints)
            })
            .collect()
    }

    /// Rank over the rationals. Uses the parallel row elimination when the
    /// `parallel` feature is enabled.
    pub fn rank(&self) -> usize {
        bareiss_echelon(self.integer_rows(), true).pivot_cols.len()
    }

    /// Rank with the elimination forced onto one thread.
    pub fn rank_seq(&self) -> usize {
        bareiss_echelon(self.integer_rows(), false).pivot_cols.len()
    }

    /// Basis of the right kernel in the reduced column-echelon convention:
    /// one vector per free column in increasing column order, carrying 1 at
    /// its free column. Satisfies `rank + basis.len() == cols`.
    pub fn kernel_basis(&self) -> Vec<Vec<Rational>> {
        let ech = bareiss_echelon(self.integer_rows(), cfg!(feature = "parallel"));
        kernel_from_echelon(&ech, self.cols)
    }
}

/// Divides an integer vector by the gcd of its entries and flips signs so
/// the first nonzero entry is positive. Zero vectors are returned as-is.
pub(crate) fn primitive_part(mut v: Vec<BigInt>) -> Vec<BigInt> {
    let mut g = BigInt::zero();
    for x in &v {
        g = g.gcd(x);
        if g.is_one() {
            break;
        }
    }
    if g.is_zero() {
        return v;
    }
    if !g.is_one() {
        for x in &mut v {
            *x /= &g;
        }
    }
    if let Some(first) = v.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            for x in &mut v {
                *x = -std::mem::take(x);
            }
        }
    }
    v
}

pub(crate) struct Echelon {
    /// Rows in echelon order; row i has its leading entry at pivot_cols[i].
    pub rows: Vec<Vec<BigInt>>,
    pub pivot_cols: Vec<usize>,
}

/// Fraction-free (Bareiss) elimination on integer rows. The pivot in each
/// column is the candidate of smallest nonzero magnitude, which keeps the
/// intermediate minors small on the structured matrices seen here. The
/// division by the previous pivot is exact by Sylvester's identity.
pub(crate) fn bareiss_echelon(mut rows: Vec<Vec<BigInt>>, par: bool) -> Echelon {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivot_cols = Vec::new();
    let mut r = 0usize;
    let mut prev_pivot = BigInt::one();
    for col in 0..ncols {
        if r == rows.len() {
            break;
        }
        let pivot_row = (r..rows.len())
            .filter(|&i| !rows[i][col].is_zero())
            .min_by_key(|&i| (rows[i][col].magnitude().bits(), i));
        let Some(p) = pivot_row else { continue };
        rows.swap(r, p);
        let (head, tail) = rows.split_at_mut(r + 1);
        let pivot = &head[r];
        let pval = pivot[col].clone();
        let step = |row: &mut Vec<BigInt>| {
            if row[col].is_zero() {
                // Bareiss still rescales untouched rows; dividing by the
                // previous pivot afterwards keeps the invariant exact.
                for entry in row.iter_mut().take(ncols).skip(col) {
                    if !entry.is_zero() {
                        *entry = exact_div(&*entry * &pval, &prev_pivot);
                    }
                }
            } else {
                let factor = std::mem::replace(&mut row[col], BigInt::zero());
                for j in (col + 1)..ncols {
                    let t = &row[j] * &pval - &factor * &pivot[j];
                    row[j] = if t.is_zero() { t } else { exact_div(t, &prev_pivot) };
                }
            }
        };
        run_rows(tail, par, step);
        prev_pivot = pval;
        pivot_cols.push(col);
        r += 1;
    }
    rows.truncate(pivot_cols.len());
    Echelon { rows, pivot_cols }
}

/// Division known to be exact from Sylvester's identity; checked in debug.
#[inline]
fn exact_div(n: BigInt, d: &BigInt) -> BigInt {
    debug_assert!((&n % d).is_zero(), "non-exact division in fraction-free step");
    n / d
}

#[cfg(feature = "parallel")]
fn run_rows<F: Fn(&mut Vec<BigInt>) + Sync>(rows: &mut [Vec<BigInt>], par: bool, f: F) {
    use rayon::prelude::*;
    if par && rows.len() > 8 {
        rows.par_iter_mut().for_each(&f);
    } else {
        rows.iter_mut().for_each(f);
    }
}

#[cfg(not(feature = "parallel"))]
fn run_rows<F: Fn(&mut Vec<BigInt>) + Sync>(rows: &mut [Vec<BigInt>], _par: bool, f: F) {
    rows.iter_mut().for_each(f);
}

/// Kernel basis read off an echelon form by back substitution. For each
/// free column f (ascending) the vector has 1 at f, 0 at later free
/// columns, and exact rational values at the pivot columns.
fn kernel_from_echelon(ech: &Echelon, ncols: usize) -> Vec<Vec<Rational>> {
    let is_pivot: Vec<bool> = {
        let mut v = vec![false; ncols];
        for &c in &ech.pivot_cols {
            v[c] = true;
        }
        v
    };
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![Rational::zero(); ncols];
        v[free] = Rational::one();
        for i in (0..ech.pivot_cols.len()).rev() {
            let pc = ech.pivot_cols[i];
            if pc > free {
                continue;
            }
            let row = &ech.rows[i];
            let mut acc = Rational::zero();
            for c in (pc + 1)..=free {
                if !row[c].is_zero() && !v[c].is_zero() {
                    acc += Rational::from_integer(row[c].clone()) * &v[c];
                }
            }
            v[pc] = -acc / Rational::from_integer(row[pc].clone());
        }
        basis.push(v);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn rank_identity() {
        assert_eq!(Matrix::identity(5).rank(), 5);
    }

    #[test]
    fn rank_zero_matrix() {
        assert_eq!(Matrix::zero(3, 7).rank(), 0);
        assert_eq!(Matrix::zero(3, 7).kernel_basis().len(), 7);
    }

    #[test]
    fn rank_proportional_rows() {
        let m = Matrix::from_rows(vec![
            vec![rat(1, 2), rat(3, 1), rat(-1, 3)],
            vec![rat(3, 2), rat(9, 1), rat(-1, 1)],
        ]);
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn kernel_of_identity_is_empty() {
        assert!(Matrix::identity(3).kernel_basis().is_empty());
    }

    #[test]
    fn kernel_of_single_row() {
        let m = Matrix::from_i64_rows(&[&[1, 1, 0]]);
        let k = m.kernel_basis();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(m.mul_vec(v).iter().all(|x| x.is_zero()));
        }
        // Reduced convention: unit at the free columns 1 and 2.
        assert_eq!(k[0][1], Rational::one());
        assert_eq!(k[1][2], Rational::one());
        assert!(k[1][0].is_zero() && k[1][1].is_zero());
    }

    #[test]
    fn sample_rational_is_integral_and_bounded() {
        use num_bigint::BigUint;
        let mut rng = RngState::new(42);
        let mut sum = Rational::zero();
        let n: i64 = 10_000;
        for _ in 0..n {
            let v = sample_rational(&mut rng, 1000);
            assert!(v.is_integer());
            assert!(*v.numer().magnitude() <= BigUint::from(1000u32));
            sum += v;
        }
        // Mean of uniform draws on [-1000, 1000]: sigma = sqrt((2001^2-1)/12)
        // ~ 577.6, so a 3-sigma band for the sum of 10^4 draws is +-173300.
        assert!(sum.is_integer());
        assert!(
            *sum.numer().magnitude() <= BigUint::from(173_300u32),
            "sum {sum} outside 3-sigma band"
        );
    }

    #[test]
    fn sample_rational_is_deterministic() {
        let mut a = RngState::new(7);
        let mut b = RngState::new(7);
        for _ in 0..100 {
            assert_eq!(sample_rational(&mut a, 50), sample_rational(&mut b, 50));
        }
        let mut c = RngState::with_stream(7, 1);
        let first: Vec<_> = (0..20).map(|_| sample_rational(&mut c, 50)).collect();
        let mut d = RngState::with_stream(7, 1);
        let again: Vec<_> = (0..20).map(|_| sample_rational(&mut d, 50)).collect();
        assert_eq!(first, again);
    }

    fn small_matrix() -> impl Strategy<Value = Matrix> {
        (1usize..6, 1usize..6).prop_flat_map(|(r, c)| {
            proptest::collection::vec((-30i64..30, 1i64..6), r * c).prop_map(move |vals| {
                Matrix::new(r, c, vals.into_iter().map(|(n, d)| rat(n, d)).collect())
            })
        })
    }

    proptest! {
        #[test]
        fn rank_plus_nullity_is_cols(m in small_matrix()) {
            prop_assert_eq!(m.rank() + m.kernel_basis().len(), m.cols());
        }

        #[test]
        fn kernel_vectors_annihilate(m in small_matrix()) {
            for v in m.kernel_basis() {
                prop_assert!(m.mul_vec(&v).iter().all(|x| x.is_zero()));
            }
        }

        #[test]
        fn rank_equals_transpose_rank(m in small_matrix()) {
            prop_assert_eq!(m.rank(), m.transpose().rank());
        }

        #[test]
        fn rank_matches_sequential(m in small_matrix()) {
            prop_assert_eq!(m.rank(), m.rank_seq());
        }
    }
}
