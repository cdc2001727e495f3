//! Dense matrices over the integers with exact normal-form algorithms.
//!
//! Everything here is arbitrary precision: no entry ever wraps. The two
//! workhorses are the column-style Hermite normal form (used to canonicalize
//! lattice bases and to solve membership questions) and the Smith normal form
//! with its unimodular transforms (used for invariant factors and for the
//! diagonalization of Gram matrices).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Index, IndexMut};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMat {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMat { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMat::zero(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Builds from row slices of machine integers. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = IntMat::zero(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged row {i}");
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = BigInt::from(*v);
            }
        }
        m
    }

    pub fn from_bigint_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = IntMat::zero(r, c);
        for (i, row) in rows.into_iter().enumerate() {
            assert_eq!(row.len(), c, "ragged row {i}");
            for (j, v) in row.into_iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// Builds from column vectors, each of length `rows`.
    pub fn from_cols(rows: usize, cols: Vec<Vec<BigInt>>) -> Self {
        let mut m = IntMat::zero(rows, cols.len());
        for (j, col) in cols.into_iter().enumerate() {
            assert_eq!(col.len(), rows, "column {j} has wrong length");
            for (i, v) in col.into_iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn diagonal(entries: &[BigInt]) -> Self {
        let n = entries.len();
        let mut m = IntMat::zero(n, n);
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn col(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    if i == j { self[(i, j)].is_one() } else { self[(i, j)].is_zero() }
                })
            })
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.rows).all(|i| (0..i.min(self.cols)).all(|j| self[(i, j)].is_zero()))
    }

    pub fn transpose(&self) -> IntMat {
        let mut t = IntMat::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn add(&self, rhs: &IntMat) -> IntMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut m = self.clone();
        for (a, b) in m.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
        m
    }

    pub fn sub(&self, rhs: &IntMat) -> IntMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut m = self.clone();
        for (a, b) in m.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
        m
    }

    pub fn scale(&self, k: &BigInt) -> IntMat {
        let mut m = self.clone();
        for a in m.data.iter_mut() {
            *a *= k;
        }
        m
    }

    pub fn mul(&self, rhs: &IntMat) -> IntMat {
        assert_eq!(self.cols, rhs.rows, "inner dimension mismatch");
        let mut m = IntMat::zero(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let prod = a * &rhs[(k, j)];
                    m[(i, j)] += prod;
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "vector length mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| &self[(i, j)] * &v[j]).sum())
            .collect()
    }

    pub fn pow(&self, e: u32) -> IntMat {
        assert!(self.is_square());
        let mut acc = IntMat::identity(self.rows);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Horizontal concatenation [self | rhs].
    pub fn hcat(&self, rhs: &IntMat) -> IntMat {
        assert_eq!(self.rows, rhs.rows);
        let mut m = IntMat::zero(self.rows, self.cols + rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..rhs.cols {
                m[(i, self.cols + j)] = rhs[(i, j)].clone();
            }
        }
        m
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = -self[(i, j)].clone();
            self[(i, j)] = v;
        }
    }

    /// col_j -= q * col_k
    fn submul_col(&mut self, j: usize, k: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let t = q * &self[(i, k)];
            self[(i, j)] -= t;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self[(i, j)].clone();
            self[(i, j)] = v;
        }
    }

    /// row_i -= q * row_k
    fn submul_row(&mut self, i: usize, k: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let t = q * &self[(k, j)];
            self[(i, j)] -= t;
        }
    }

    /// Column-style Hermite normal form: self * transform = h with transform
    /// unimodular. Pivot rows are strictly increasing, pivots positive,
    /// entries right of a pivot zero and entries left of it reduced into
    /// [0, pivot). Columns beyond the pivot count are zero.
    pub fn hnf(&self) -> Hnf {
        let mut h = self.clone();
        let mut u = IntMat::identity(self.cols);
        let mut pivots = Vec::new();
        let mut pc = 0usize; // next pivot column
        for r in 0..self.rows {
            if pc == self.cols {
                break;
            }
            // bring a nonzero entry of row r into column pc
            let Some(j0) = (pc..self.cols).find(|&j| !h[(r, j)].is_zero()) else {
                continue;
            };
            h.swap_cols(pc, j0);
            u.swap_cols(pc, j0);
            // gcd out the rest of the row to the right
            for j in pc + 1..self.cols {
                while !h[(r, j)].is_zero() {
                    let q = h[(r, j)].div_floor(&h[(r, pc)]);
                    h.submul_col(j, pc, &q);
                    u.submul_col(j, pc, &q);
                    if !h[(r, j)].is_zero() {
                        h.swap_cols(pc, j);
                        u.swap_cols(pc, j);
                    }
                }
            }
            if h[(r, pc)].is_negative() {
                h.negate_col(pc);
                u.negate_col(pc);
            }
            // reduce earlier columns at this pivot row into [0, pivot)
            for j in 0..pc {
                let q = h[(r, j)].div_floor(&h[(r, pc)]);
                h.submul_col(j, pc, &q);
                u.submul_col(j, pc, &q);
            }
            pivots.push(r);
            pc += 1;
        }
        Hnf { h, transform: u, pivots }
    }

    /// Basis of the integer kernel {x : self * x = 0}; the span is saturated.
    pub fn kernel(&self) -> IntMat {
        let hnf = self.hnf();
        let k = hnf.pivots.len();
        let cols: Vec<Vec<BigInt>> = (k..self.cols).map(|j| hnf.transform.col(j)).collect();
        IntMat::from_cols(self.cols, cols)
    }

    /// Smith normal form: u * self * v = d with u, v unimodular and the
    /// diagonal nonnegative with each entry dividing the next.
    pub fn snf(&self) -> Snf {
        let mut d = self.clone();
        let mut u = IntMat::identity(self.rows);
        let mut v = IntMat::identity(self.cols);
        let steps = self.rows.min(self.cols);
        let mut t = 0usize;
        while t < steps {
            // locate a pivot of minimal absolute value in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..self.rows {
                for j in t..self.cols {
                    if d[(i, j)].is_zero() {
                        continue;
                    }
                    match best {
                        Some((bi, bj)) if d[(bi, bj)].abs() <= d[(i, j)].abs() => {}
                        _ => best = Some((i, j)),
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);
            loop {
                let mut dirty = false;
                for i in t + 1..self.rows {
                    if d[(i, t)].is_zero() {
                        continue;
                    }
                    let q = d[(i, t)].div_floor(&d[(t, t)]);
                    d.submul_row(i, t, &q);
                    u.submul_row(i, t, &q);
                    if !d[(i, t)].is_zero() {
                        d.swap_rows(t, i);
                        u.swap_rows(t, i);
                        dirty = true;
                    }
                }
                for j in t + 1..self.cols {
                    if d[(t, j)].is_zero() {
                        continue;
                    }
                    let q = d[(t, j)].div_floor(&d[(t, t)]);
                    d.submul_col(j, t, &q);
                    v.submul_col(j, t, &q);
                    if !d[(t, j)].is_zero() {
                        d.swap_cols(t, j);
                        v.swap_cols(t, j);
                        dirty = true;
                    }
                }
                if !dirty {
                    break;
                }
            }
            // enforce divisibility of the trailing block by the pivot
            let mut fixed = true;
            'scan: for i in t + 1..self.rows {
                for j in t + 1..self.cols {
                    if !d[(i, j)].mod_floor(&d[(t, t)]).is_zero() {
                        // fold row i into the pivot row and restart this step
                        let one = BigInt::from(-1);
                        d.submul_row(t, i, &one);
                        u.submul_row(t, i, &one);
                        fixed = false;
                        break 'scan;
                    }
                }
            }
            if !fixed {
                continue;
            }
            if d[(t, t)].is_negative() {
                d.negate_row(t);
                u.negate_row(t);
            }
            t += 1;
        }
        Snf { d, u, v }
    }

    /// Inverse of a unimodular matrix. The HNF of a unimodular matrix is the
    /// identity, so the accumulated transform is exactly the inverse.
    pub fn inverse_unimodular(&self) -> Option<IntMat> {
        if !self.is_square() {
            return None;
        }
        let hnf = self.hnf();
        if hnf.h.is_identity() {
            Some(hnf.transform)
        } else {
            None
        }
    }

    pub fn is_unimodular(&self) -> bool {
        self.is_square() && self.hnf().h.is_identity()
    }
}

impl Index<(usize, usize)> for IntMat {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Result of the column Hermite normal form: `a * transform = h`.
pub struct Hnf {
    pub h: IntMat,
    pub transform: IntMat,
    pub pivots: Vec<usize>,
}

/// Result of the Smith normal form: `u * a * v = d`.
pub struct Snf {
    pub d: IntMat,
    pub u: IntMat,
    pub v: IntMat,
}

impl Snf {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols())).map(|i| self.d[(i, i)].clone()).collect()
    }
}

/// Solves `h * x = b` where `h` is a column HNF with the given pivot rows.
/// Returns None when `b` is outside the column span over the integers.
pub fn hnf_solve(h: &IntMat, pivots: &[usize], b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(h.rows(), b.len());
    let mut v = b.to_vec();
    let mut x = vec![BigInt::zero(); h.cols()];
    for (j, &r) in pivots.iter().enumerate() {
        let (q, rem) = v[r].div_rem(&h[(r, j)]);
        if !rem.is_zero() {
            return None;
        }
        if !q.is_zero() {
            for i in 0..h.rows() {
                let t = &q * &h[(i, j)];
                v[i] -= t;
            }
        }
        x[j] = q;
    }
    if v.iter().all(Zero::is_zero) {
        Some(x)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mat(rows: &[Vec<i64>]) -> IntMat {
        IntMat::from_rows(rows)
    }

    #[test]
    fn hnf_of_simple_lattice() {
        // columns (1,1) and (0,2): the even-coordinate-sum lattice in Z^2
        let a = mat(&[vec![1, 0], vec![1, 2]]);
        let hnf = a.hnf();
        assert_eq!(hnf.h, mat(&[vec![1, 0], vec![1, 2]]));
        assert_eq!(hnf.pivots, vec![0, 1]);
        assert_eq!(a.mul(&hnf.transform), hnf.h);
    }

    #[test]
    fn hnf_canonicalizes_generating_sets() {
        // (2,0),(1,1),(3,1) and (1,1),(0,2),(2,0) generate the same lattice
        let a = mat(&[vec![2, 1, 3], vec![0, 1, 1]]);
        let b = mat(&[vec![1, 0, 2], vec![1, 2, 0]]);
        let ha = a.hnf();
        let hb = b.hnf();
        let trim = |h: &Hnf| {
            let k = h.pivots.len();
            IntMat::from_cols(h.h.rows(), (0..k).map(|j| h.h.col(j)).collect())
        };
        assert_eq!(trim(&ha), trim(&hb));
    }

    #[test]
    fn kernel_of_trace_matrix() {
        // Tr for the swap action: [[1,1],[1,1]]; kernel spanned by (1,-1)
        let a = mat(&[vec![1, 1], vec![1, 1]]);
        let k = a.kernel();
        assert_eq!(k.cols(), 1);
        assert!(a.mul(&k).is_zero());
    }

    #[test]
    fn snf_divisibility_chain() {
        let a = mat(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, 4, 16]]);
        let snf = a.snf();
        assert_eq!(snf.u.mul(&a).mul(&snf.v), snf.d);
        let diag = snf.diagonal();
        for w in diag.windows(2) {
            if !w[1].is_zero() {
                assert!(w[1].mod_floor(&w[0]).is_zero(), "chain broken: {diag:?}");
            }
        }
        assert!(snf.u.is_unimodular());
        assert!(snf.v.is_unimodular());
    }

    #[test]
    fn snf_of_hyperbolic_plane() {
        let b = mat(&[vec![0, 1], vec![1, 0]]);
        let snf = b.snf();
        assert_eq!(snf.diagonal(), vec![BigInt::from(1), BigInt::from(1)]);
    }

    #[test]
    fn unimodular_inverse_roundtrip() {
        let a = mat(&[vec![2, 1], vec![1, 1]]);
        let inv = a.inverse_unimodular().expect("det 1");
        assert!(a.mul(&inv).is_identity());
        assert!(inv.mul(&a).is_identity());
    }

    #[test]
    fn solve_against_hnf_basis() {
        let a = mat(&[vec![1, 0], vec![1, 2]]);
        let hnf = a.hnf();
        let inside = [BigInt::from(3), BigInt::from(5)];
        let x = hnf_solve(&hnf.h, &hnf.pivots, &inside).expect("member");
        assert_eq!(hnf.h.mul_vec(&x), inside.to_vec());
        let outside = [BigInt::from(1), BigInt::from(0)];
        assert!(hnf_solve(&hnf.h, &hnf.pivots, &outside).is_none());
    }

    fn small_matrix(rows: usize, cols: usize) -> impl Strategy<Value = IntMat> {
        proptest::collection::vec(-9i64..=9, rows * cols).prop_map(move |vals| {
            let rows_vec: Vec<Vec<i64>> =
                vals.chunks(cols).map(|c| c.to_vec()).collect();
            IntMat::from_rows(&rows_vec)
        })
    }

    proptest! {
        #[test]
        fn hnf_transform_is_unimodular(a in small_matrix(3, 4)) {
            let hnf = a.hnf();
            prop_assert_eq!(a.mul(&hnf.transform), hnf.h.clone());
            prop_assert!(hnf.transform.is_unimodular());
            // pivot rows strictly increase and pivots are positive
            for w in hnf.pivots.windows(2) {
                prop_assert!(w[0] < w[1]);
            }
            for (j, &r) in hnf.pivots.iter().enumerate() {
                prop_assert!(hnf.h[(r, j)].is_positive());
            }
        }

        #[test]
        fn snf_is_a_diagonalization(a in small_matrix(4, 3)) {
            let snf = a.snf();
            prop_assert_eq!(snf.u.mul(&a).mul(&snf.v), snf.d.clone());
            prop_assert!(snf.u.is_unimodular());
            prop_assert!(snf.v.is_unimodular());
            let diag = snf.diagonal();
            for w in diag.windows(2) {
                if !w[1].is_zero() {
                    prop_assert!(w[1].mod_floor(&w[0]).is_zero());
                }
            }
            for (i, e) in diag.iter().enumerate() {
                prop_assert!(!e.is_negative());
                for j in 0..snf.d.cols() {
                    if j != i && i < snf.d.rows() {
                        prop_assert!(snf.d[(i, j)].is_zero());
                    }
                }
            }
        }

        #[test]
        fn kernel_columns_annihilate(a in small_matrix(3, 5)) {
            let k = a.kernel();
            prop_assert!(a.mul(&k).is_zero());
            let rank = a.hnf().pivots.len();
            prop_assert_eq!(k.cols(), 5 - rank);
        }
    }
}
