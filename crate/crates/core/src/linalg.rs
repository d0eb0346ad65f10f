//! Exact integer and rational linear algebra.
//!
//! Everything here works over arbitrary-precision integers (`BigInt`) or
//! rationals (`BigRational`); no floating point is used anywhere. The three
//! workhorses are the column-style Hermite normal form, the Smith normal form
//! and the saturated integer kernel, which back the abelian group layer and
//! the polyhedral layer.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type IntVec = Vec<BigInt>;
pub type RatVec = Vec<BigRational>;

/// Dense integer matrix in row-major order.
#[derive(Clone, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigInt>,
}

impl std::fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zero(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        let mut m = IntMatrix::zero(r, c);
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = BigInt::from(*v);
            }
        }
        m
    }

    pub fn from_bigint_rows(rows: &[IntVec]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        let mut m = IntMatrix::zero(r, c);
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    /// Builds the matrix whose columns are the given vectors.
    pub fn from_cols(cols: &[IntVec]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, |col| col.len());
        assert!(cols.iter().all(|col| col.len() == r), "ragged columns");
        let mut m = IntMatrix::zero(r, c);
        for (j, col) in cols.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn row(&self, i: usize) -> IntVec {
        (0..self.cols).map(|j| self[(i, j)].clone()).collect()
    }

    pub fn col(&self, j: usize) -> IntVec {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut p = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self[(i, k)].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let add = &self[(i, k)] * &other[(k, j)];
                    p[(i, j)] += add;
                }
            }
        }
        p
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> IntVec {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| &self[(i, j)] * &v[j]).sum())
            .collect()
    }

    pub fn mul_rat_vec(&self, v: &[BigRational]) -> RatVec {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| BigRational::from(self[(i, j)].clone()) * &v[j])
                    .sum()
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
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

    /// col[a] := col[a] * x + col[b] * y, col[b] := col[a] * z + col[b] * w.
    fn combine_cols(&mut self, a: usize, b: usize, x: &BigInt, y: &BigInt, z: &BigInt, w: &BigInt) {
        for i in 0..self.rows {
            let va = self[(i, a)].clone();
            let vb = self[(i, b)].clone();
            self[(i, a)] = &va * x + &vb * y;
            self[(i, b)] = &va * z + &vb * w;
        }
    }

    fn add_col_multiple(&mut self, target: usize, source: usize, mult: &BigInt) {
        if mult.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let add = &self[(i, source)] * mult;
            self[(i, target)] += add;
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = -self[(i, j)].clone();
            self[(i, j)] = v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self[(i, j)].clone();
            self[(i, j)] = v;
        }
    }

    pub fn rank(&self) -> usize {
        self.hermite_form().pivots.len()
    }

    /// Determinant of a square matrix via fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = 1i32;
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                    Some(i) => {
                        a.swap_rows(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[(k, k)] * &a[(i, j)] - &a[(i, k)] * &a[(k, j)];
                    a[(i, j)] = &num / &prev;
                }
            }
            for i in k + 1..n {
                a[(i, k)] = BigInt::zero();
            }
            prev = a[(k, k)].clone();
        }
        let d = a[(n - 1, n - 1)].clone();
        if sign < 0 {
            -d
        } else {
            d
        }
    }

    /// Column-style Hermite normal form H = M * U with U unimodular.
    ///
    /// H is in column echelon form: pivot rows strictly increase from left to
    /// right, pivots are positive, entries to the left of a pivot in its row
    /// are reduced into [0, pivot), and zero columns sit at the right end.
    pub fn hermite_form(&self) -> Hnf {
        let mut h = self.clone();
        let mut u = IntMatrix::identity(self.cols);
        let mut pivots: Vec<usize> = Vec::new();
        let mut next = 0usize;
        for r in 0..self.rows {
            if next >= self.cols {
                break;
            }
            // Fold all nonzero entries of row r (at columns >= next) into
            // column `next` by extended-gcd column transforms.
            let mut found = false;
            for j in next..self.cols {
                if !h[(r, j)].is_zero() {
                    if !found {
                        h.swap_cols(next, j);
                        u.swap_cols(next, j);
                        found = true;
                    } else {
                        let a = h[(r, next)].clone();
                        let b = h[(r, j)].clone();
                        let eg = a.extended_gcd(&b);
                        let (g, x, y) = (eg.gcd, eg.x, eg.y);
                        let z = -(&b / &g);
                        let w = &a / &g;
                        h.combine_cols(next, j, &x, &y, &z, &w);
                        u.combine_cols(next, j, &x, &y, &z, &w);
                    }
                }
            }
            if !found {
                continue;
            }
            if h[(r, next)].is_negative() {
                h.negate_col(next);
                u.negate_col(next);
            }
            let pivot = h[(r, next)].clone();
            for j in 0..next {
                let q = h[(r, j)].div_floor(&pivot);
                let m = -q;
                h.add_col_multiple(j, next, &m);
                u.add_col_multiple(j, next, &m);
            }
            pivots.push(r);
            next += 1;
        }
        Hnf { h, u, pivots }
    }

    /// Smith normal form S = U * M * V with U, V unimodular, S diagonal with
    /// nonnegative entries d_1 | d_2 | ... .
    pub fn smith_form(&self) -> Snf {
        let mut s = self.clone();
        let mut u = IntMatrix::identity(self.rows);
        let mut v = IntMatrix::identity(self.cols);
        let n = self.rows.min(self.cols);
        for t in 0..n {
            loop {
                // Find a nonzero entry of minimal absolute value in the
                // remaining submatrix and move it to (t, t).
                let mut best: Option<(usize, usize)> = None;
                for i in t..self.rows {
                    for j in t..self.cols {
                        if s[(i, j)].is_zero() {
                            continue;
                        }
                        match best {
                            None => best = Some((i, j)),
                            Some((bi, bj)) => {
                                if s[(i, j)].abs() < s[(bi, bj)].abs() {
                                    best = Some((i, j));
                                }
                            }
                        }
                    }
                }
                let (bi, bj) = match best {
                    None => return Snf { u, s, v },
                    Some(p) => p,
                };
                s.swap_rows(t, bi);
                u.swap_rows(t, bi);
                s.swap_cols(t, bj);
                v.swap_cols(t, bj);

                let mut dirty = false;
                for i in t + 1..self.rows {
                    if !s[(i, t)].is_zero() {
                        let q = -(&s[(i, t)] / &s[(t, t)]);
                        row_add(&mut s, i, t, &q);
                        row_add(&mut u, i, t, &q);
                        if !s[(i, t)].is_zero() {
                            dirty = true;
                        }
                    }
                }
                for j in t + 1..self.cols {
                    if !s[(t, j)].is_zero() {
                        let q = -(&s[(t, j)] / &s[(t, t)]);
                        s.add_col_multiple(j, t, &q);
                        v.add_col_multiple(j, t, &q);
                        if !s[(t, j)].is_zero() {
                            dirty = true;
                        }
                    }
                }
                if dirty {
                    continue;
                }
                // Row t and column t are clear; enforce that the pivot
                // divides every remaining entry.
                let pivot = s[(t, t)].clone();
                let mut offender: Option<usize> = None;
                'scan: for i in t + 1..self.rows {
                    for j in t + 1..self.cols {
                        if !(&s[(i, j)] % &pivot).is_zero() {
                            offender = Some(i);
                            break 'scan;
                        }
                    }
                }
                match offender {
                    None => break,
                    Some(i) => {
                        let one = BigInt::one();
                        row_add(&mut s, t, i, &one);
                        row_add(&mut u, t, i, &one);
                    }
                }
            }
            if s[(t, t)].is_negative() {
                s.negate_row(t);
                u.negate_row(t);
            }
        }
        Snf { u, s, v }
    }

    /// Basis of the saturated integer kernel { x : M x = 0 }, as columns.
    ///
    /// The basis spans a direct summand of Z^cols, so the generated lattice
    /// equals the kernel of M over Q intersected with Z^cols.
    pub fn integer_kernel(&self) -> Vec<IntVec> {
        let hnf = self.hermite_form();
        let rank = hnf.pivots.len();
        (rank..self.cols).map(|j| hnf.u.col(j)).collect()
    }
}

fn row_add(m: &mut IntMatrix, target: usize, source: usize, mult: &BigInt) {
    if mult.is_zero() {
        return;
    }
    for j in 0..m.cols {
        let add = &m[(source, j)] * mult;
        m[(target, j)] += add;
    }
}

/// Result of a Hermite normal form computation: h = m * u.
pub struct Hnf {
    pub h: IntMatrix,
    pub u: IntMatrix,
    /// Pivot row of each nonzero column, strictly increasing.
    pub pivots: Vec<usize>,
}

/// Result of a Smith normal form computation: s = u * m * v.
pub struct Snf {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

impl Snf {
    /// Diagonal entries, padded with zeros up to min(rows, cols).
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.s.rows.min(self.s.cols)).map(|i| self.s[(i, i)].clone()).collect()
    }
}

/// One integer solution of M x = b, if any exists.
pub fn integer_solve(m: &IntMatrix, b: &[BigInt]) -> Option<IntVec> {
    assert_eq!(m.rows, b.len(), "dimension mismatch");
    let snf = m.smith_form();
    let ub = snf.u.mul_vec(b);
    let mut y = vec![BigInt::zero(); m.cols];
    for (i, c) in ub.iter().enumerate() {
        let s = if i < m.cols { snf.s[(i, i)].clone() } else { BigInt::zero() };
        if s.is_zero() {
            if !c.is_zero() {
                return None;
            }
        } else {
            let (q, rem) = c.div_rem(&s);
            if !rem.is_zero() {
                return None;
            }
            y[i] = q;
        }
    }
    Some(snf.v.mul_vec(&y))
}

/// One rational solution of M x = b, if the system is consistent.
pub fn rational_solve(m: &IntMatrix, b: &[BigInt]) -> Option<RatVec> {
    assert_eq!(m.rows, b.len(), "dimension mismatch");
    let rows = m.rows;
    let cols = m.cols;
    let mut a: Vec<RatVec> = (0..rows)
        .map(|i| {
            let mut row: RatVec = (0..cols).map(|j| big_rat(m[(i, j)].clone())).collect();
            row.push(big_rat(b[i].clone()));
            row
        })
        .collect();
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut r = 0usize;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].clone();
        for v in a[r].iter_mut() {
            *v = &*v / &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..=cols {
                    let sub = &a[r][j] * &f;
                    a[i][j] = &a[i][j] - &sub;
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    // Inconsistent if a zero row has nonzero right-hand side.
    for i in r..rows {
        if !a[i][cols].is_zero() {
            return None;
        }
    }
    let mut x = vec![BigRational::zero(); cols];
    for (k, &c) in pivot_cols.iter().enumerate() {
        x[c] = a[k][cols].clone();
    }
    Some(x)
}

pub fn big_rat(n: BigInt) -> BigRational {
    BigRational::from_integer(n)
}

/// Divides an integer vector by the gcd of its entries, keeping direction.
pub fn primitive(v: &[BigInt]) -> IntVec {
    let mut g = BigInt::zero();
    for x in v {
        g = g.gcd(x);
    }
    if g.is_zero() || g.is_one() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &g).collect()
}

/// Scales a rational vector to a primitive integer vector, keeping direction.
pub fn primitive_from_rational(v: &[BigRational]) -> IntVec {
    let mut denom_lcm = BigInt::one();
    for x in v {
        denom_lcm = denom_lcm.lcm(x.denom());
    }
    let ints: IntVec = v.iter().map(|x| x.numer() * (&denom_lcm / x.denom())).collect();
    primitive(&ints)
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    assert_eq!(a.len(), b.len(), "dimension mismatch");
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_rat_int(a: &[BigRational], b: &[BigInt]) -> BigRational {
    assert_eq!(a.len(), b.len(), "dimension mismatch");
    a.iter().zip(b).map(|(x, y)| x * big_rat(y.clone())).sum()
}

pub fn int_to_rat_vec(v: &[BigInt]) -> RatVec {
    v.iter().map(|x| big_rat(x.clone())).collect()
}

pub fn vec_from_i64(v: &[i64]) -> IntVec {
    v.iter().map(|&x| BigInt::from(x)).collect()
}
