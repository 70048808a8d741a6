//! Dense bivariate polynomials `sum c[a][b] u^a v^b`.
//!
//! The two variables are anonymous; callers decide what they mean
//! (`(z1, z2)` for bracket expansions, `(w, z)` for spectral curves).

use std::ops::{Add, Mul, Neg, Sub};

use super::poly::Poly;
use super::scalar::Ring;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct BiPoly<R> {
    /// `grid[a][b]` multiplies `u^a v^b`; all rows share one length.
    grid: Vec<Vec<R>>,
}

/// Which linear factor [`BiPoly::div_linear`] removes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LinearFactor {
    /// `u - v`
    UMinusV,
    /// `v - u`
    VMinusU,
}

impl<R: Ring> BiPoly<R> {
    pub fn from_grid(grid: Vec<Vec<R>>) -> Self {
        let width = grid.iter().map(Vec::len).max().unwrap_or(0);
        let grid = grid
            .into_iter()
            .map(|mut row| {
                row.resize(width, R::zero());
                row
            })
            .collect();
        let mut p = BiPoly { grid };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.grid.last().is_some_and(|row| row.iter().all(Ring::is_zero)) {
            self.grid.pop();
        }
        let width = self
            .grid
            .iter()
            .map(|row| row.iter().rposition(|c| !c.is_zero()).map_or(0, |p| p + 1))
            .max()
            .unwrap_or(0);
        for row in &mut self.grid {
            row.truncate(width);
        }
        if width == 0 {
            self.grid.clear();
        }
    }

    /// `c u^a v^b`.
    pub fn monomial(c: R, a: usize, b: usize) -> Self {
        let mut grid = vec![vec![R::zero(); b + 1]; a + 1];
        grid[a][b] = c;
        BiPoly::from_grid(grid)
    }

    pub fn constant(c: R) -> Self {
        BiPoly::monomial(c, 0, 0)
    }

    /// Embed a univariate polynomial in the `u` variable.
    pub fn from_u(p: &Poly<R>) -> Self {
        BiPoly::from_grid(p.coeffs().iter().map(|c| vec![c.clone()]).collect())
    }

    /// Embed a univariate polynomial in the `v` variable.
    pub fn from_v(p: &Poly<R>) -> Self {
        BiPoly::from_grid(vec![p.coeffs().to_vec()])
    }

    pub fn coeff(&self, a: usize, b: usize) -> R {
        self.grid.get(a).and_then(|row| row.get(b)).cloned().unwrap_or_else(R::zero)
    }

    pub fn deg_u(&self) -> Option<usize> {
        self.grid.len().checked_sub(1)
    }

    pub fn deg_v(&self) -> Option<usize> {
        self.grid.first().and_then(|r| r.len().checked_sub(1))
    }

    pub fn is_zero(&self) -> bool {
        self.grid.is_empty()
    }

    /// Nonzero terms as `(a, b, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, &R)> {
        self.grid.iter().enumerate().flat_map(|(a, row)| {
            row.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(move |(b, c)| (a, b, c))
        })
    }

    /// The univariate polynomial in `v` multiplying `u^a`.
    pub fn u_slice(&self, a: usize) -> Poly<R> {
        Poly::new(self.grid.get(a).cloned().unwrap_or_default())
    }

    pub fn eval(&self, u: &R, v: &R) -> R {
        self.grid.iter().rev().fold(R::zero(), |acc, row| {
            acc * u.clone() + row.iter().rev().fold(R::zero(), |s, c| s * v.clone() + c.clone())
        })
    }

    /// Restriction to the diagonal `u = v`, as a univariate polynomial.
    pub fn diagonal(&self) -> Poly<R> {
        let mut out: Vec<R> = Vec::new();
        for (a, b, c) in self.terms() {
            let k = a + b;
            if out.len() <= k {
                out.resize(k + 1, R::zero());
            }
            out[k] = out[k].clone() + c.clone();
        }
        Poly::new(out)
    }

    /// Exact quotient by `u - v` (or `v - u`). Fails with
    /// [`Error::NotDivisible`] unless the diagonal restriction vanishes.
    pub fn div_linear(&self, which: LinearFactor) -> Result<Self> {
        if self.is_zero() {
            return Ok(self.clone());
        }
        // Synthetic division in `u` over R[v] by the monic factor (u - v).
        let d = self.grid.len() - 1;
        let width = self.grid[0].len();
        let v_times = |p: &[R]| -> Vec<R> {
            let mut out = vec![R::zero(); p.len() + 1];
            for (b, c) in p.iter().enumerate() {
                out[b + 1] = c.clone();
            }
            out
        };
        let add = |x: &[R], y: &[R]| -> Vec<R> {
            let n = x.len().max(y.len());
            (0..n)
                .map(|i| {
                    let a = x.get(i).cloned().unwrap_or_else(R::zero);
                    let b = y.get(i).cloned().unwrap_or_else(R::zero);
                    a + b
                })
                .collect()
        };
        let mut quot: Vec<Vec<R>> = vec![Vec::new(); d.max(1)];
        let mut carry: Vec<R> = vec![R::zero(); width];
        for a in (1..=d).rev() {
            let q = add(&self.grid[a], &carry);
            carry = v_times(&q);
            quot[a - 1] = q;
        }
        let remainder = add(&self.grid[0], &carry);
        if remainder.iter().any(|c| !c.is_zero()) {
            return Err(Error::NotDivisible(format!(
                "diagonal restriction has {} nonzero coefficients",
                remainder.iter().filter(|c| !c.is_zero()).count()
            )));
        }
        if d == 0 {
            return Ok(BiPoly::from_grid(vec![]));
        }
        let q = BiPoly::from_grid(quot);
        Ok(match which {
            LinearFactor::UMinusV => q,
            LinearFactor::VMinusU => -q,
        })
    }

    pub fn map<S: Ring>(&self, mut f: impl FnMut(&R) -> S) -> BiPoly<S> {
        BiPoly::from_grid(self.grid.iter().map(|row| row.iter().map(&mut f).collect()).collect())
    }

    pub fn scale(&self, s: &R) -> Self {
        self.map(|c| c.clone() * s.clone())
    }
}

impl<R: Ring> Add for BiPoly<R> {
    type Output = Self;
    fn add(self, other: Self) -> Self {
        let rows = self.grid.len().max(other.grid.len());
        let cols = self.grid.first().map_or(0, Vec::len).max(other.grid.first().map_or(0, Vec::len));
        let grid = (0..rows)
            .map(|a| (0..cols).map(|b| self.coeff(a, b) + other.coeff(a, b)).collect())
            .collect();
        BiPoly::from_grid(grid)
    }
}

impl<R: Ring> Neg for BiPoly<R> {
    type Output = Self;
    fn neg(self) -> Self {
        BiPoly { grid: self.grid.into_iter().map(|r| r.into_iter().map(|c| -c).collect()).collect() }
    }
}

impl<R: Ring> Sub for BiPoly<R> {
    type Output = Self;
    fn sub(self, other: Self) -> Self {
        self + (-other)
    }
}

impl<R: Ring> Mul for BiPoly<R> {
    type Output = Self;
    fn mul(self, other: Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return BiPoly::from_grid(vec![]);
        }
        let rows = self.grid.len() + other.grid.len() - 1;
        let cols = self.grid[0].len() + other.grid[0].len() - 1;
        let mut grid = vec![vec![R::zero(); cols]; rows];
        for (a1, b1, c1) in self.terms() {
            for (a2, b2, c2) in other.terms() {
                let cell = &mut grid[a1 + a2][b1 + b2];
                *cell = cell.clone() + c1.clone() * c2.clone();
            }
        }
        BiPoly::from_grid(grid)
    }
}

impl<R: Ring> Ring for BiPoly<R> {
    fn zero() -> Self {
        BiPoly::from_grid(vec![])
    }
    fn one() -> Self {
        BiPoly::constant(R::one())
    }
    fn is_zero(&self) -> bool {
        self.grid.is_empty()
    }
    fn from_i64(v: i64) -> Self {
        BiPoly::constant(R::from_i64(v))
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
    fn difference_of_squares() {
        // u^2 - v^2 = (u - v)(u + v)
        let p = BiPoly::monomial(q(1), 2, 0) - BiPoly::monomial(q(1), 0, 2);
        let quot = p.div_linear(LinearFactor::UMinusV).unwrap();
        assert_eq!(quot, BiPoly::monomial(q(1), 1, 0) + BiPoly::monomial(q(1), 0, 1));
        let lin = BiPoly::monomial(q(1), 1, 0) - BiPoly::monomial(q(1), 0, 1);
        assert_eq!(lin.div_linear(LinearFactor::UMinusV).unwrap(), BiPoly::constant(q(1)));
        assert_eq!(lin.div_linear(LinearFactor::VMinusU).unwrap(), BiPoly::constant(q(-1)));
    }

    #[test]
    fn rejects_nonvanishing_diagonal() {
        let p = BiPoly::monomial(q(1), 2, 0) + BiPoly::monomial(q(1), 0, 2);
        assert!(matches!(p.div_linear(LinearFactor::UMinusV), Err(Error::NotDivisible(_))));
    }

    #[test]
    fn eval_and_trim() {
        let p = BiPoly::from_grid(vec![vec![q(1), q(2), q(0)], vec![q(0), q(3), q(0)], vec![q(0), q(0), q(0)]]);
        assert_eq!(p.deg_u(), Some(1));
        assert_eq!(p.deg_v(), Some(1));
        // 1 + 2v + 3uv at (2, 5)
        assert_eq!(p.eval(&q(2), &q(5)), q(41));
    }
}
