//! Scalar backends.
//!
//! Two coefficient fields sit behind one interface: [`Rational`] (exact,
//! arbitrary precision, always in lowest terms) and [`Complex64`] (double
//! precision). Everything above this module is generic over [`Field`], so
//! polynomial identities can be checked bit-exactly and the root-finding
//! pipeline can run in floating point with the same code.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use super::matrix::Mat;
use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Commutative ring with identity.
pub trait Ring:
    Clone
    + Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;

    fn from_i64(v: i64) -> Self {
        let mut acc = Self::zero();
        let unit = if v < 0 { -Self::one() } else { Self::one() };
        for _ in 0..v.unsigned_abs() {
            acc = acc + unit.clone();
        }
        acc
    }

    fn pow(&self, e: usize) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }
}

/// Result of an overdetermined linear solve.
#[derive(Clone, Debug)]
pub struct LeastSquares<F> {
    pub solution: Vec<F>,
    /// Max absolute residual of `A x - b`.
    pub residual: f64,
    /// Reciprocal condition estimate of the (column-scaled) system matrix;
    /// exactly 1.0 on the exact backend when the system has full column rank.
    pub rcond: f64,
}

/// A coefficient field usable by every module of the crate.
pub trait Field: Ring + Div<Output = Self> {
    /// True for the exact rational backend.
    const EXACT: bool;

    fn from_ratio(num: i64, den: i64) -> Self;
    fn from_rational(q: &Rational) -> Self;
    /// Absolute value as a double (used for pivoting and reporting).
    fn magnitude(&self) -> f64;
    fn to_complex(&self) -> Complex64;
    /// Inverse of [`Field::to_complex`]; `None` on the exact backend.
    fn from_complex(z: Complex64) -> Option<Self>;

    fn inv(&self) -> Self {
        Self::one() / self.clone()
    }

    /// Draw a coefficient from the backend's sampling distribution:
    /// nonzero `p/q` with `|p| <= 5`, `1 <= q <= 3` (exact) or a uniform
    /// point of the unit disk (float).
    fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Solve `A x = b` in the least-squares sense, failing when `A` does not
    /// have full column rank.
    fn least_squares(a: &Mat<Self>, b: &[Self]) -> Result<LeastSquares<Self>>;
}

impl Ring for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
}

impl Field for Rational {
    const EXACT: bool = true;

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(self.to_f64().unwrap_or(f64::NAN), 0.0)
    }
    fn from_complex(_: Complex64) -> Option<Self> {
        None
    }
    fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut p: i64 = rng.random_range(1..=5);
        if rng.random_bool(0.5) {
            p = -p;
        }
        let q: i64 = rng.random_range(1..=3);
        Self::from_ratio(p, q)
    }
    fn least_squares(a: &Mat<Self>, b: &[Self]) -> Result<LeastSquares<Self>> {
        exact_solve(a, b)
    }
}

impl Ring for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn pow(&self, e: usize) -> Self {
        self.powu(e as u32)
    }
}

impl Field for Complex64 {
    const EXACT: bool = false;

    fn from_ratio(num: i64, den: i64) -> Self {
        Complex64::new(num as f64 / den as f64, 0.0)
    }
    fn from_rational(q: &Rational) -> Self {
        Complex64::new(q.to_f64().unwrap_or(f64::NAN), 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn to_complex(&self) -> Complex64 {
        *self
    }
    fn from_complex(z: Complex64) -> Option<Self> {
        Some(z)
    }
    fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let r = rng.random::<f64>().sqrt();
        let theta = rng.random::<f64>() * std::f64::consts::TAU;
        Complex64::from_polar(r, theta)
    }
    fn least_squares(a: &Mat<Self>, b: &[Self]) -> Result<LeastSquares<Self>> {
        float_least_squares(a, b)
    }
}

/// Row reduction over the rationals. Fails unless the system is consistent
/// and has full column rank.
fn exact_solve(a: &Mat<Rational>, b: &[Rational]) -> Result<LeastSquares<Rational>> {
    let (rows, cols) = (a.rows(), a.cols());
    if b.len() != rows {
        return Err(Error::DimensionMismatch { expected: rows, got: b.len() });
    }
    let mut aug: Vec<Vec<Rational>> = (0..rows)
        .map(|r| {
            let mut row: Vec<Rational> = (0..cols).map(|c| a[(r, c)].clone()).collect();
            row.push(b[r].clone());
            row
        })
        .collect();
    let mut pivot_row = 0;
    for col in 0..cols {
        let Some(p) = (pivot_row..rows).find(|&r| !Ring::is_zero(&aug[r][col])) else {
            return Err(Error::Domain(format!("rank deficient in column {col}")));
        };
        aug.swap(pivot_row, p);
        let inv = aug[pivot_row][col].inv();
        for v in aug[pivot_row].iter_mut() {
            *v = &*v * &inv;
        }
        let prow = aug[pivot_row].clone();
        for (r, row) in aug.iter_mut().enumerate() {
            if r != pivot_row && !Ring::is_zero(&row[col]) {
                let f = row[col].clone();
                for (v, pv) in row.iter_mut().zip(prow.iter()) {
                    *v = &*v - &(&f * pv);
                }
            }
        }
        pivot_row += 1;
    }
    if let Some(r) = (pivot_row..rows).find(|&r| !Ring::is_zero(&aug[r][cols])) {
        return Ok(LeastSquares {
            solution: (0..cols).map(|c| aug[c][cols].clone()).collect(),
            residual: aug[r][cols].magnitude().max(f64::MIN_POSITIVE),
            rcond: 1.0,
        });
    }
    Ok(LeastSquares {
        solution: (0..cols).map(|c| aug[c][cols].clone()).collect(),
        residual: 0.0,
        rcond: 1.0,
    })
}

fn float_least_squares(a: &Mat<Complex64>, b: &[Complex64]) -> Result<LeastSquares<Complex64>> {
    let (rows, cols) = (a.rows(), a.cols());
    if b.len() != rows {
        return Err(Error::DimensionMismatch { expected: rows, got: b.len() });
    }
    if cols == 0 {
        let residual = b.iter().map(|v| v.norm()).fold(0.0, f64::max);
        return Ok(LeastSquares { solution: vec![], residual, rcond: 1.0 });
    }
    if rows < cols {
        return Err(Error::Domain(format!("underdetermined system {rows}x{cols}")));
    }
    // Column equilibration so the condition estimate is scale free.
    let scales: Vec<f64> = (0..cols)
        .map(|c| {
            let n = (0..rows).map(|r| a[(r, c)].norm_sqr()).sum::<f64>().sqrt();
            if n > 0.0 {
                n
            } else {
                1.0
            }
        })
        .collect();
    let m = nalgebra::DMatrix::from_fn(rows, cols, |r, c| a[(r, c)] / scales[c]);
    let rhs = nalgebra::DVector::from_iterator(rows, b.iter().copied());
    let svd = m.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let rcond = if smax > 0.0 { smin / smax } else { 0.0 };
    let x = svd
        .solve(&rhs, smax * 1e-300)
        .map_err(|e| Error::Domain(format!("svd solve failed: {e}")))?;
    let res = &m * &x - &rhs;
    let residual = res.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if !residual.is_finite() || x.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::NonFinite("least squares"));
    }
    Ok(LeastSquares {
        solution: x.iter().zip(scales.iter()).map(|(v, s)| v / s).collect(),
        residual,
        rcond,
    })
}

/// Render a rational as `"p/q"` (or `"p"` for integers).
pub fn rational_to_string(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Serialization(format!("bad rational {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => Ok(Rational::from_integer(s.trim().parse().map_err(|_| bad())?)),
    }
}

pub fn check_finite(z: Complex64, context: &'static str) -> Result<Complex64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::NonFinite(context))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn rationals_stay_reduced() {
        let q = Rational::from_ratio(6, -4);
        assert_eq!(rational_to_string(&q), "-3/2");
        assert!(q.denom().is_positive());
        assert_eq!(parse_rational("-3/2").unwrap(), q);
        assert_eq!(parse_rational("7").unwrap(), Rational::from_i64(7));
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn exact_solve_detects_inconsistency() {
        let a = Mat::from_rows(vec![
            vec![Rational::from_i64(1), Rational::from_i64(0)],
            vec![Rational::from_i64(0), Rational::from_i64(1)],
            vec![Rational::from_i64(1), Rational::from_i64(1)],
        ]);
        let ok = [Rational::from_i64(2), Rational::from_i64(3), Rational::from_i64(5)];
        let sol = Rational::least_squares(&a, &ok).unwrap();
        assert_eq!(sol.residual, 0.0);
        assert_eq!(sol.solution, vec![Rational::from_i64(2), Rational::from_i64(3)]);
        let bad = [Rational::from_i64(2), Rational::from_i64(3), Rational::from_i64(6)];
        assert!(Rational::least_squares(&a, &bad).unwrap().residual > 0.0);
    }

    #[test]
    fn samples_are_in_range() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let q = Rational::sample(&mut rng);
            assert!(!Ring::is_zero(&q));
            assert!(q.abs() <= Rational::from_i64(5));
            let z = Complex64::sample(&mut rng);
            assert!(z.norm() <= 1.0);
        }
    }

    #[test]
    fn pow_matches_repeated_product() {
        let q = Rational::from_ratio(-2, 3);
        assert_eq!(Ring::pow(&q, 5), Rational::from_ratio(-32, 243));
        assert_eq!(Ring::pow(&q, 0), Rational::from_i64(1));
    }
}
