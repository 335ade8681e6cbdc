//! Exact rational linear algebra.
//!
//! Elimination runs fraction-free (Bareiss) on denominator-cleared integer
//! rows, so intermediate entries stay at minor size instead of exploding the
//! way naive rational pivoting can. Kernels, solves and row reduction then
//! back-substitute over Q. Matrices here are small (at most a few dozen rows
//! by a few hundred columns), so an O(n^3) dense approach is the right

//! trade.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::exactnum::{IntPoly, Rational};

pub type QVec = Vec<Rational>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Rational>,
}

impl QMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        QMat { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<QVec>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row);
        }
        QMat { rows: r, cols: c, data }
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn scalar(n: usize, c: &Rational) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = c.clone();
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        QMat { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        QMat { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let data = self.data.iter().map(|a| a * c).collect();
        QMat { rows: self.rows, cols: self.cols, data }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Self::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        let p = a * b;
                        out[(i, j)] += p;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rational]) -> QVec {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = Rational::zero();
                for j in 0..self.cols {
                    let a = &self[(i, j)];
                    if !a.is_zero() && !v[j].is_zero() {
                        acc += a * &v[j];
                    }
                }
                acc
            })
            .collect()
    }

    pub fn trace(&self) -> Rational {
        assert_eq!(self.rows, self.cols);
        let mut t = Rational::zero();
        for i in 0..self.rows {
            t += &self[(i, i)];
        }
        t
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn submatrix_cols(&self, cols: &[usize]) -> Self {
        let mut out = Self::zero(self.rows, cols.len());
        for i in 0..self.rows {
            for (jj, &j) in cols.iter().enumerate() {
                out[(i, jj)] = self[(i, j)].clone();
            }
        }
        out
    }

    /// Evaluate a monic integer polynomial at this (square) matrix, Horner
    /// style.
    pub fn poly_eval(&self, p: &IntPoly) -> Self {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let coeffs = p.coeffs();
        if coeffs.is_empty() {
            return Self::zero(n, n);
        }
        let mut acc = Self::scalar(n, &Rational::from_integer(coeffs.last().unwrap().clone()));
        for c in coeffs.iter().rev().skip(1) {
            acc = acc.matmul(self);
            for i in 0..n {
                acc[(i, i)] += Rational::from_integer(c.clone());
            }
        }
        acc
    }
}

impl std::ops::Index<(usize, usize)> for QMat {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

/// Clear denominators row by row: each row is scaled by the lcm of its
/// denominators. Row scaling changes neither rank, kernel, nor row space.
fn to_integer_rows(m: &QMat) -> Vec<Vec<BigInt>> {
    (0..m.rows)
        .map(|i| {
            let row = m.row(i);
            let mut l = BigInt::one();
            for x in row {
                l = l.lcm(x.denom());
            }
            row.iter()
                .map(|x| {
                    let scaled = x * Rational::from_integer(l.clone());
                    debug_assert!(scaled.is_integer());
                    scaled.to_integer()
                })
                .collect()
        })
        .collect()
}

/// Fraction-free Bareiss elimination to row echelon form.
/// Returns (echelon integer rows, pivot column per used row).
fn bareiss_echelon(mut a: Vec<Vec<BigInt>>) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r >= rows {
            break;
        }
        // pick the smallest nonzero pivot to slow entry growth
        let mut pivot_row = None;
        for i in r..rows {
            if !a[i][c].is_zero() {
                match pivot_row {
                    None => pivot_row = Some(i),
                    Some(p) => {
                        if a[i][c].abs() < a[p][c].abs() {
                            pivot_row = Some(i);
                        }
                    }
                }
            }
        }
        let Some(p) = pivot_row else { continue };
        a.swap(r, p);
        for i in (r + 1)..rows {
            for j in (c + 1)..cols {
                let num = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                let (q, rem) = num.div_rem(&prev);
                debug_assert!(rem.is_zero(), "Bareiss division must be exact");
                a[i][j] = q;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    a.truncate(pivots.len().max(r));
    (a, pivots)
}

pub fn rank(m: &QMat) -> usize {
    if m.rows == 0 || m.cols == 0 {
        return 0;
    }
    let (_, pivots) = bareiss_echelon(to_integer_rows(m));
    pivots.len()
}

/// Reduced row echelon form over Q with the pivot columns, computed from the
/// Bareiss echelon by back-substitution.
pub fn rref(m: &QMat) -> (QMat, Vec<usize>) {
    if m.rows == 0 || m.cols == 0 {
        return (m.clone(), vec![]);
    }
    let (ech, pivots) = bareiss_echelon(to_integer_rows(m));
    let r = pivots.len();
    let cols = m.cols;
    let mut rows: Vec<QVec> = ech
        .into_iter()
        .take(r)
        .map(|row| row.into_iter().map(Rational::from_integer).collect())
        .collect();
    for i in (0..r).rev() {
        let pc = pivots[i];
        let lead = rows[i][pc].clone();
        for x in rows[i].iter_mut() {
            *x /= &lead;
        }
        for i2 in 0..i {
            let factor = rows[i2][pc].clone();
            if factor.is_zero() {
                continue;
            }
            for j in 0..cols {
                let sub = &factor * &rows[i][j];
                rows[i2][j] -= sub;
            }
        }
    }
    (QMat::from_rows(rows), pivots)
}

/// Gauss-Jordan with transform tracking: returns (R, T, pivots) with
/// T * M = R, R in reduced row echelon form restricted to M's columns, and
/// T invertible. Used where coordinates in the *original* rows are needed.
pub fn rref_transform(m: &QMat) -> (QMat, QMat, Vec<usize>) {
    let rows = m.rows;
    let cols = m.cols;
    let mut a = m.clone();
    let mut t = QMat::identity(rows);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r >= rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[(i, c)].is_zero()) else { continue };
        for j in 0..cols {
            let tmp = a[(p, j)].clone();
            a[(p, j)] = a[(r, j)].clone();
            a[(r, j)] = tmp;
        }
        for j in 0..rows {
            let tmp = t[(p, j)].clone();
            t[(p, j)] = t[(r, j)].clone();
            t[(r, j)] = tmp;
        }
        let lead = a[(r, c)].clone();
        for j in 0..cols {
            a[(r, j)] /= &lead;
        }
        for j in 0..rows {
            t[(r, j)] /= &lead;
        }
        for i in 0..rows {
            if i == r || a[(i, c)].is_zero() {
                continue;
            }
            let factor = a[(i, c)].clone();
            for j in 0..cols {
                let sub = &factor * &a[(r, j)];
                a[(i, j)] -= sub;
            }
            for j in 0..rows {
                let sub = &factor * &t[(r, j)];
                t[(i, j)] -= sub;
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, t, pivots)
}

/// Basis of the right kernel {x : M x = 0}.
pub fn kernel(m: &QMat) -> Vec<QVec> {
    let (r, pivots) = rref(m);
    let rank = pivots.len();
    let mut is_pivot = vec![false; m.cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let free: Vec<usize> = (0..m.cols).filter(|&j| !is_pivot[j]).collect();
    let mut basis = Vec::with_capacity(free.len());
    for &fc in &free {
        let mut v = vec![Rational::zero(); m.cols];
        v[fc] = Rational::one();
        for i in 0..rank {
            v[pivots[i]] = -r[(i, fc)].clone();
        }
        basis.push(v);
    }
    basis
}

/// Solve M x = b. Returns None when inconsistent.
pub fn solve(m: &QMat, b: &[Rational]) -> Option<QVec> {
    assert_eq!(m.rows, b.len());
    let mut aug = QMat::zero(m.rows, m.cols + 1);
    for i in 0..m.rows {
        for j in 0..m.cols {
            aug[(i, j)] = m[(i, j)].clone();
        }
        aug[(i, m.cols)] = b[i].clone();
    }
    let (r, pivots) = rref(&aug);
    if pivots.contains(&m.cols) {
        return None; // pivot in the augmented column
    }
    let mut x = vec![Rational::zero(); m.cols];
    for (i, &p) in pivots.iter().enumerate() {
        x[p] = r[(i, m.cols)].clone();
    }
    Some(x)
}

/// Intersection of row spaces is not needed; what the Hecke engine wants is
/// the intersection of kernels, done by stacking matrices.
pub fn stack(mats: &[&QMat]) -> QMat {
    let cols = mats[0].cols;
    let mut rows = Vec::new();
    for m in mats {
        assert_eq!(m.cols, cols);
        for i in 0..m.rows {
            rows.push(m.row(i).to_vec());
        }
    }
    QMat::from_rows(rows)
}

/// Characteristic polynomial of a square rational matrix via power-sum traces
/// and Newton's identities. The result must be integral for the matrices this
/// engine produces (Hecke operators preserve an integral lattice); the
/// integrality is asserted.
pub fn charpoly(m: &QMat) -> IntPoly {
    assert_eq!(m.rows, m.cols);
    let n = m.rows;
    if n == 0 {
        return IntPoly::from_i64(&[1]);
    }
    let mut power_traces = Vec::with_capacity(n);
    let mut cur = m.clone();
    power_traces.push(cur.trace());
    for _ in 1..n {
        cur = cur.matmul(m);
        power_traces.push(cur.trace());
    }
    // Newton: e_0 = 1, k e_k = sum_{i=1..k} (-1)^{i-1} e_{k-i} p_i
    let mut e = vec![Rational::one()];
    for k in 1..=n {
        let mut acc = Rational::zero();
        let mut sign = Rational::one();
        for i in 1..=k {
            acc += &sign * &e[k - i] * &power_traces[i - 1];
            sign = -sign;
        }
        e.push(acc / Rational::from_integer(BigInt::from(k)));
    }
    // charpoly = sum_{k} (-1)^k e_k X^{n-k}
    let mut coeffs = vec![BigInt::zero(); n + 1];
    let mut sign = BigInt::one();
    for k in 0..=n {
        let c = &e[k] * Rational::from_integer(sign.clone());
        assert!(c.is_integer(), "characteristic polynomial must be integral");
        coeffs[n - k] = c.to_integer();
        sign = -sign;
    }
    IntPoly::new(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{rat, ratio};

    fn m2(a: i64, b: i64, c: i64, d: i64) -> QMat {
        QMat::from_rows(vec![vec![rat(a), rat(b)], vec![rat(c), rat(d)]])
    }

    #[test]
    fn rank_and_kernel() {
        let m = QMat::from_rows(vec![
            vec![rat(1), rat(2), rat(3)],
            vec![rat(2), rat(4), rat(6)],
            vec![rat(1), rat(0), rat(1)],
        ]);
        assert_eq!(rank(&m), 2);
        let k = kernel(&m);
        assert_eq!(k.len(), 1);
        for v in &k {
            assert!(m.mul_vec(v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn solve_unique() {
        let m = m2(2, 1, 1, 3);
        let x = solve(&m, &[rat(5), rat(10)]).unwrap();
        assert_eq!(x, vec![rat(1), rat(3)]);
        assert!(solve(&m2(1, 2, 2, 4), &[rat(1), rat(3)]).is_none());
    }

    #[test]
    fn rational_entries() {
        let m = QMat::from_rows(vec![vec![ratio(1, 2), ratio(1, 3)], vec![ratio(1, 4), ratio(1, 5)]]);
        let x = solve(&m, &[rat(1), rat(1)]).unwrap();
        let b = m.mul_vec(&x);
        assert_eq!(b, vec![rat(1), rat(1)]);
    }

    #[test]
    fn charpoly_2x2() {
        // [[1,2],[3,4]]: X^2 - 5X - 2
        let p = charpoly(&m2(1, 2, 3, 4));
        assert_eq!(p, IntPoly::from_i64(&[-2, -5, 1]));
    }

    #[test]
    fn charpoly_companion() {
        // companion of X^3 - 7X - 6 = (X+1)(X+2)(X-3)
        let m = QMat::from_rows(vec![
            vec![rat(0), rat(0), rat(6)],
            vec![rat(1), rat(0), rat(7)],
            vec![rat(0), rat(1), rat(0)],
        ]);
        assert_eq!(charpoly(&m), IntPoly::from_i64(&[-6, -7, 0, 1]));
    }

    #[test]
    fn poly_eval_kills_matrix() {
        let m = m2(1, 2, 3, 4);
        let p = charpoly(&m);
        assert!(m.poly_eval(&p).is_zero(), "Cayley-Hamilton");
    }
}
