//! Exact square integer matrices and rational matrices.
//!
//! Powers of toral matrices grow exponentially, so nothing here uses
//! fixed-width integers or modular shortcuts.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::poly::IntPoly;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    n: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn identity(n: usize) -> Self {
        let mut data = vec![BigInt::zero(); n * n];
        for i in 0..n {
            data[i * n + i] = BigInt::one();
        }
        IntMatrix { n, data }
    }

    pub fn zeros(n: usize) -> Self {
        IntMatrix { n, data: vec![BigInt::zero(); n * n] }
    }

    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.as_ref().len() != n) {
            return Err(Error::NotSquare);
        }
        let data = rows.iter().flat_map(|r| r.as_ref().iter().map(|&v| BigInt::from(v))).collect();
        Ok(IntMatrix { n, data })
    }

    pub fn from_data(n: usize, data: Vec<BigInt>) -> Self {
        assert_eq!(data.len(), n * n);
        IntMatrix { n, data }
    }

    /// Companion matrix of a monic polynomial: ones on the subdiagonal and
    /// the negated low coefficients in the last column.
    pub fn companion(p: &IntPoly) -> Result<Self> {
        if !p.is_monic() || p.degree() == 0 {
            return Err(Error::InvalidArgument("companion matrix needs a monic nonconstant polynomial".into()));
        }
        let n = p.degree();
        let mut m = IntMatrix::zeros(n);
        for i in 1..n {
            m.data[i * n + i - 1] = BigInt::one();
        }
        for (i, c) in p.coeffs().iter().take(n).enumerate() {
            m.data[i * n + n - 1] = -c;
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.n + j]
    }

    pub fn rows_i64(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).to_i64()).collect())
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        *self == IntMatrix::identity(self.n)
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut data = vec![BigInt::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = &self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    data[i * n + j] += a * &other.data[k * n + j];
                }
            }
        }
        IntMatrix { n, data }
    }

    pub fn add(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, other.n);
        IntMatrix { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn scale(&self, k: &BigInt) -> IntMatrix {
        IntMatrix { n: self.n, data: self.data.iter().map(|a| a * k).collect() }
    }

    pub fn neg(&self) -> IntMatrix {
        IntMatrix { n: self.n, data: self.data.iter().map(|a| -a).collect() }
    }

    pub fn pow(&self, mut e: u64) -> IntMatrix {
        let mut base = self.clone();
        let mut acc = IntMatrix::identity(self.n);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Fraction-free Gaussian elimination.
    pub fn det(&self) -> BigInt {
        let n = self.n;
        let mut a = self.data.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[k * n + k].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !a[i * n + k].is_zero()) else {
                    return BigInt::zero();
                };
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j];
                    a[i * n + j] = v / &prev;
                }
            }
            prev = a[k * n + k].clone();
        }
        sign * &a[n * n - 1]
    }

    pub fn trace(&self) -> BigInt {
        (0..self.n).map(|i| self.get(i, i).clone()).sum()
    }

    /// `det(xI − M)` by the Faddeev–LeVerrier recursion; every division
    /// is exact over ℤ.
    pub fn char_poly(&self) -> IntPoly {
        let n = self.n;
        let mut coeffs = vec![BigInt::zero(); n + 1];
        coeffs[n] = BigInt::one();
        let mut mk = IntMatrix::zeros(n);
        for k in 1..=n {
            let c_prev = coeffs[n - k + 1].clone();
            mk = self.mul(&mk).add(&IntMatrix::identity(n).scale(&c_prev));
            let t = self.mul(&mk).trace();
            coeffs[n - k] = -(t / BigInt::from(k));
        }
        IntPoly::new(coeffs)
    }

    /// Evaluate `p(M)` by Horner's rule.
    pub fn eval_poly(&self, p: &IntPoly) -> IntMatrix {
        let mut acc = IntMatrix::zeros(self.n);
        let id = IntMatrix::identity(self.n);
        for c in p.coeffs().iter().rev() {
            acc = acc.mul(self).add(&id.scale(c));
        }
        acc
    }

    /// Inverse over ℤ; `None` unless `det = ±1`.
    pub fn inverse(&self) -> Option<IntMatrix> {
        let det = self.det();
        if !det.abs().is_one() {
            return None;
        }
        // Cayley–Hamilton: M^{-1} = −(M^{n−1} + c_{n−1}M^{n−2} + … + c_1 I) / c_0
        let cp = self.char_poly();
        let c = cp.coeffs();
        let c0 = c[0].clone();
        let tail = IntPoly::new(c[1..].to_vec());
        let adj = self.eval_poly(&tail);
        let inv = adj.scale(&(-c0.clone()));
        // c0 = ±1 so dividing equals multiplying
        debug_assert!(inv.mul(self).is_identity());
        Some(inv)
    }

    pub fn to_rat(&self) -> RatMatrix {
        RatMatrix {
            rows: self.n,
            cols: self.n,
            data: self.data.iter().map(|v| BigRational::from_integer(v.clone())).collect(),
        }
    }

    /// Entrywise absolute values as `f64` (used for growth bounds).
    pub fn abs_f64(&self) -> Vec<f64> {
        self.data.iter().map(|v| v.abs().to_f64().unwrap_or(f64::INFINITY)).collect()
    }
}

/// Dense rational matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![BigRational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RatMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigRational::one();
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, cols: &[Vec<BigRational>]) -> Self {
        let mut m = RatMatrix::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for i in 0..rows {
                m.data[i * cols.len() + j] = c[i].clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<BigRational> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = RatMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = a * other.get(k, j);
                    out.data[i * other.cols + j] += v;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, k: &BigRational) -> RatMatrix {
        RatMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * k).collect() }
    }

    pub fn pow(&self, mut e: u64) -> RatMatrix {
        assert_eq!(self.rows, self.cols);
        let mut base = self.clone();
        let mut acc = RatMatrix::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == RatMatrix::identity(self.rows)
    }

    pub fn eval_poly(&self, p: &IntPoly) -> RatMatrix {
        let n = self.rows;
        let id = RatMatrix::identity(n);
        let mut acc = RatMatrix::zeros(n, n);
        for c in p.coeffs().iter().rev() {
            acc = acc.mul(self).add(&id.scale(&BigRational::from_integer(c.clone())));
        }
        acc
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (RatMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&i| !m.get(i, col).is_zero()) else {
                continue;
            };
            for j in 0..m.cols {
                m.data.swap(row * m.cols + j, p * m.cols + j);
            }
            let inv = m.get(row, col).recip();
            for j in 0..m.cols {
                let v = m.get(row, j) * &inv;
                m.set(row, j, v);
            }
            for i in 0..m.rows {
                if i == row || m.get(i, col).is_zero() {
                    continue;
                }
                let f = m.get(i, col).clone();
                for j in 0..m.cols {
                    let v = m.get(i, j) - &f * m.get(row, j);
                    m.set(i, j, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel, each vector scaled to primitive integers.
    pub fn nullspace(&self) -> Vec<Vec<BigInt>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![BigRational::zero(); self.cols];
                v[f] = BigRational::one();
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = -r.get(row, f).clone();
                }
                primitive_vector(&v)
            })
            .collect()
    }

    /// Solve `self · X = rhs` for `X`, assuming `self` has full column rank
    /// and a solution exists. Returns `None` otherwise.
    pub fn solve(&self, rhs: &RatMatrix) -> Option<RatMatrix> {
        assert_eq!(self.rows, rhs.rows);
        let mut aug = RatMatrix::zeros(self.rows, self.cols + rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            for j in 0..rhs.cols {
                aug.set(i, self.cols + j, rhs.get(i, j).clone());
            }
        }
        let (r, pivots) = aug.rref();
        if pivots.len() != self.cols || pivots.iter().enumerate().any(|(i, &p)| p != i) {
            return None;
        }
        // rows past the pivots must be zero on the rhs block
        for i in self.cols..self.rows {
            if (0..rhs.cols).any(|j| !r.get(i, self.cols + j).is_zero()) {
                return None;
            }
        }
        let mut x = RatMatrix::zeros(self.cols, rhs.cols);
        for i in 0..self.cols {
            for j in 0..rhs.cols {
                x.set(i, j, r.get(i, self.cols + j).clone());
            }
        }
        Some(x)
    }

    /// Characteristic polynomial of a square rational matrix whose
    /// characteristic polynomial has integer coefficients; returns `None`
    /// when it does not.
    pub fn int_char_poly(&self) -> Option<IntPoly> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut coeffs = vec![BigRational::zero(); n + 1];
        coeffs[n] = BigRational::one();
        let mut mk = RatMatrix::zeros(n, n);
        for k in 1..=n {
            let c_prev = coeffs[n - k + 1].clone();
            mk = self.mul(&mk).add(&RatMatrix::identity(n).scale(&c_prev));
            let prod = self.mul(&mk);
            let t: BigRational = (0..n).map(|i| prod.get(i, i).clone()).sum();
            coeffs[n - k] = -(t / BigRational::from_integer(BigInt::from(k)));
        }
        if coeffs.iter().any(|c| !c.is_integer()) {
            return None;
        }
        Some(IntPoly::new(coeffs.iter().map(|c| c.to_integer()).collect()))
    }
}

/// Scale a rational vector to coprime integers with a positive first
/// nonzero entry.
pub fn primitive_vector(v: &[BigRational]) -> Vec<BigInt> {
    use num_integer::Integer;
    let lcm = v.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let ints: Vec<BigInt> = v.iter().map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    if g.is_zero() {
        return ints;
    }
    let sign = if ints.iter().find(|c| !c.is_zero()).is_some_and(|c| c.is_negative()) { -g } else { g };
    ints.iter().map(|c| c / &sign).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn determinant() {
        assert_eq!(m(&[&[2, 1], &[1, 1]]).det(), BigInt::from(1));
        assert_eq!(m(&[&[0, 1], &[1, 0]]).det(), BigInt::from(-1));
        assert_eq!(m(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]).det(), BigInt::zero());
        assert_eq!(m(&[&[2, 0, 1], &[1, 3, 0], &[0, 1, 4]]).det(), BigInt::from(25));
    }

    #[test]
    fn char_poly_small() {
        assert_eq!(m(&[&[2, 1], &[1, 1]]).char_poly(), IntPoly::from_i64(&[1, -3, 1]));
        assert_eq!(m(&[&[1, 0], &[0, 1]]).char_poly(), IntPoly::from_i64(&[1, -2, 1]));
        assert_eq!(m(&[&[2]]).char_poly(), IntPoly::from_i64(&[-2, 1]));
        let c = IntMatrix::companion(&IntPoly::from_i64(&[-1, -1, 0, 1])).unwrap();
        assert_eq!(c.char_poly(), IntPoly::from_i64(&[-1, -1, 0, 1]));
    }

    #[test]
    fn inverse_and_pow() {
        let cat = m(&[&[2, 1], &[1, 1]]);
        let inv = cat.inverse().unwrap();
        assert_eq!(inv, m(&[&[1, -1], &[-1, 2]]));
        assert_eq!(cat.pow(2), m(&[&[5, 3], &[3, 2]]));
        assert!(m(&[&[2]]).inverse().is_none());
    }

    #[test]
    fn nullspace_and_solve() {
        let a = m(&[&[1, 1], &[1, 1]]).to_rat();
        let ns = a.nullspace();
        assert_eq!(ns, alloc::vec![alloc::vec![BigInt::from(1), BigInt::from(-1)]]);
        let x = m(&[&[2, 1], &[1, 1]]).to_rat().solve(&RatMatrix::identity(2)).unwrap();
        assert_eq!(x, m(&[&[1, -1], &[-1, 2]]).to_rat());
    }
}
