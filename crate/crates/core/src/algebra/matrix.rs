//! Dense matrices over an arbitrary commutative ring, and their determinants.

use std::ops::{Index, IndexMut};

use super::scalar::{Field, Ring};
use crate::error::{Error, Result};

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<R> {
    rows: usize,
    cols: usize,
    data: Vec<R>,
}

impl<R> Index<(usize, usize)> for Mat<R> {
    type Output = R;
    fn index(&self, (r, c): (usize, usize)) -> &R {
        &self.data[r * self.cols + c]
    }
}

impl<R> IndexMut<(usize, usize)> for Mat<R> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut R {
        &mut self.data[r * self.cols + c]
    }
}

impl<R> Mat<R> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> R) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Mat { rows, cols, data }
    }

    /// Panics if rows are ragged.
    pub fn from_rows(rows: Vec<Vec<R>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged matrix rows");
        Mat { rows: nrows, cols: ncols, data: rows.into_iter().flatten().collect() }
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

    pub fn iter(&self) -> impl Iterator<Item = &R> {
        self.data.iter()
    }

    pub fn row(&self, r: usize) -> &[R] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn map<S>(&self, f: impl FnMut(&R) -> S) -> Mat<S> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }
}

impl<R: Clone> Mat<R> {
    pub fn filled(rows: usize, cols: usize, value: R) -> Self {
        Mat { rows, cols, data: vec![value; rows * cols] }
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    /// Copy of the matrix with row `skip_row` and column `skip_col` removed.
    pub fn minor(&self, skip_row: usize, skip_col: usize) -> Self {
        let rows: Vec<usize> = (0..self.rows).filter(|&r| r != skip_row).collect();
        let cols: Vec<usize> = (0..self.cols).filter(|&c| c != skip_col).collect();
        self.select(&rows, &cols)
    }

    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Mat::from_fn(rows.len(), cols.len(), |r, c| self[(rows[r], cols[c])].clone())
    }

    pub fn without_row(&self, skip: usize) -> Self {
        let rows: Vec<usize> = (0..self.rows).filter(|&r| r != skip).collect();
        let cols: Vec<usize> = (0..self.cols).collect();
        self.select(&rows, &cols)
    }

    /// Stack the rows of `self` on top of the rows of `other`.
    pub fn to_rows(&self) -> Vec<Vec<R>> {
        (0..self.rows()).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Mat { rows: self.rows + other.rows, cols: self.cols, data }
    }
}

impl<R: Ring> Mat<R> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat::filled(rows, cols, R::zero())
    }

    pub fn identity(n: usize) -> Self {
        Mat::from_fn(n, n, |r, c| if r == c { R::one() } else { R::zero() })
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        Mat::from_fn(self.rows, other.cols, |r, c| {
            let mut acc = R::zero();
            for k in 0..self.cols {
                let (a, b) = (&self[(r, k)], &other[(k, c)]);
                if !a.is_zero() && !b.is_zero() {
                    acc = acc + a.clone() * b.clone();
                }
            }
            acc
        })
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat::from_fn(self.rows, self.cols, |r, c| self[(r, c)].clone() + other[(r, c)].clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat::from_fn(self.rows, self.cols, |r, c| self[(r, c)].clone() - other[(r, c)].clone())
    }

    pub fn scale(&self, s: &R) -> Self {
        self.map(|v| v.clone() * s.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Ring::is_zero)
    }

    pub fn is_lower_triangular(&self) -> bool {
        (0..self.rows).all(|r| (r + 1..self.cols).all(|c| self[(r, c)].is_zero()))
    }

    /// Determinant by cofactor expansion along the first row. Works over any
    /// commutative ring; cost grows factorially, so use it for small sizes.
    pub fn det_laplace(&self) -> Result<R> {
        if !self.is_square() {
            return Err(Error::NonSquare { rows: self.rows, cols: self.cols });
        }
        Ok(laplace(self))
    }

    /// Matrix of cofactors `C[r][c] = (-1)^{r+c} det(minor(r, c))`.
    pub fn cofactors(&self) -> Result<Mat<R>> {
        if !self.is_square() {
            return Err(Error::NonSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        if n == 1 {
            return Ok(Mat::identity(1));
        }
        Ok(Mat::from_fn(n, n, |r, c| {
            let m = laplace(&self.minor(r, c));
            if (r + c) % 2 == 0 {
                m
            } else {
                -m
            }
        }))
    }
}

fn laplace<R: Ring>(m: &Mat<R>) -> R {
    match m.rows {
        0 => R::one(),
        1 => m[(0, 0)].clone(),
        2 => m[(0, 0)].clone() * m[(1, 1)].clone() - m[(0, 1)].clone() * m[(1, 0)].clone(),
        n => {
            let mut acc = R::zero();
            for c in 0..n {
                let a = &m[(0, c)];
                if a.is_zero() {
                    continue;
                }
                let term = a.clone() * laplace(&m.minor(0, c));
                acc = if c % 2 == 0 { acc + term } else { acc - term };
            }
            acc
        }
    }
}

/// Rings with an exact division used by fraction-free elimination.
pub trait ExactDiv: Ring {
    /// `self / d` if `d` divides `self` exactly.
    fn exact_div(&self, d: &Self) -> Option<Self>;
}

impl<R: ExactDiv> Mat<R> {
    /// Fraction-free (Bareiss) elimination. Every intermediate division is
    /// exact, so over an exact ring the result carries no rounding at all.
    pub fn det_bareiss(&self) -> Result<R> {
        if !self.is_square() {
            return Err(Error::NonSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(R::one());
        }
        let mut a = self.clone();
        let mut sign = false;
        let mut prev = R::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                let Some(p) = (k + 1..n).find(|&r| !a[(r, k)].is_zero()) else {
                    return Ok(R::zero());
                };
                for c in 0..n {
                    a.data.swap(k * n + c, p * n + c);
                }
                sign = !sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = a[(k, k)].clone() * a[(i, j)].clone() - a[(i, k)].clone() * a[(k, j)].clone();
                    a[(i, j)] = num
                        .exact_div(&prev)
                        .expect("Bareiss step must divide exactly by the previous pivot");
                }
                a[(i, k)] = R::zero();
            }
            prev = a[(k, k)].clone();
        }
        let d = a[(n - 1, n - 1)].clone();
        Ok(if sign { -d } else { d })
    }
}

impl<F: Field> Mat<F> {
    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> Result<F> {
        if !self.is_square() {
            return Err(Error::NonSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut det = F::one();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&x, &y| a[(x, k)].magnitude().total_cmp(&a[(y, k)].magnitude()))
                .unwrap();
            if a[(p, k)].is_zero() {
                return Ok(F::zero());
            }
            if p != k {
                for c in 0..n {
                    a.data.swap(k * n + c, p * n + c);
                }
                det = -det;
            }
            let pivot = a[(k, k)].clone();
            det = det * pivot.clone();
            let inv = pivot.inv();
            for i in k + 1..n {
                let f = a[(i, k)].clone() * inv.clone();
                if f.is_zero() {
                    continue;
                }
                for j in k + 1..n {
                    let v = a[(i, j)].clone() - f.clone() * a[(k, j)].clone();
                    a[(i, j)] = v;
                }
            }
        }
        Ok(det)
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv: Mat<F> = Mat::identity(n);
        for k in 0..n {
            let p = (k..n)
                .max_by(|&x, &y| a[(x, k)].magnitude().total_cmp(&a[(y, k)].magnitude()))
                .unwrap();
            if a[(p, k)].is_zero() {
                return None;
            }
            for c in 0..n {
                a.data.swap(k * n + c, p * n + c);
                inv.data.swap(k * n + c, p * n + c);
            }
            let pinv = a[(k, k)].inv();
            for c in 0..n {
                a[(k, c)] = a[(k, c)].clone() * pinv.clone();
                inv[(k, c)] = inv[(k, c)].clone() * pinv.clone();
            }
            for r in 0..n {
                if r == k || a[(r, k)].is_zero() {
                    continue;
                }
                let f = a[(r, k)].clone();
                for c in 0..n {
                    a[(r, c)] = a[(r, c)].clone() - f.clone() * a[(k, c)].clone();
                    inv[(r, c)] = inv[(r, c)].clone() - f.clone() * inv[(k, c)].clone();
                }
            }
        }
        Some(inv)
    }

    pub fn max_magnitude(&self) -> f64 {
        self.data.iter().map(Field::magnitude).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Rational;

    fn q(v: i64) -> Rational {
        Rational::from_i64(v)
    }

    #[test]
    fn small_determinants() {
        let m = Mat::from_rows(vec![vec![q(2), q(3)], vec![q(5), q(7)]]);
        assert_eq!(m.det_laplace().unwrap(), q(-1));
        assert_eq!(m.det().unwrap(), q(-1));
        assert_eq!(Mat::<Rational>::identity(3).det_laplace().unwrap(), q(1));
        assert!(Mat::<Rational>::zeros(2, 3).det_laplace().is_err());
    }

    #[test]
    fn inverse_round_trip() {
        let m = Mat::from_rows(vec![
            vec![q(2), q(0), q(1)],
            vec![q(1), q(3), q(0)],
            vec![q(0), q(1), q(4)],
        ]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Mat::identity(3));
    }

    #[test]
    fn cofactor_expansion_matches_det() {
        let m = Mat::from_rows(vec![
            vec![q(1), q(2), q(-1)],
            vec![q(0), q(3), q(5)],
            vec![q(4), q(-2), q(7)],
        ]);
        let c = m.cofactors().unwrap();
        let along_row: Rational = (0..3).map(|j| m[(1, j)].clone() * c[(1, j)].clone()).sum();
        assert_eq!(along_row, m.det().unwrap());
    }
}
