//! Scalars, polynomials, matrices and the numerical kernels built on them.

pub mod bipoly;
pub mod jet;
pub mod matrix;
pub mod mpoly;
pub mod poly;
pub mod roots;
pub mod scalar;
pub mod series;

pub use bipoly::{BiPoly, LinearFactor};
pub use jet::Jet;
pub use matrix::{ExactDiv, Mat};
pub use mpoly::{MPoly, Monomial};
pub use poly::Poly;
pub use roots::{poly_roots, poly_roots_with, RootMethod, RootOptions, RootReport};
pub use scalar::{Field, LeastSquares, Rational, Ring};
pub use series::{series_expand, GradedCharacter};

use crate::error::{Error, Result};

/// Matrix of univariate polynomials.
pub type PolyMatrix<F> = Mat<Poly<F>>;

/// Sizes up to this use cofactor expansion in [`polymat_det`].
const LAPLACE_LIMIT: usize = 4;

/// Determinant of a polynomial matrix.
///
/// Small matrices use cofactor expansion. Larger exact matrices use
/// fraction-free elimination over `F[z]`; larger float matrices are
/// evaluated on a circle of `deg + 1` points and interpolated back by an
/// inverse discrete Fourier transform.
pub fn polymat_det<F: Field>(m: &PolyMatrix<F>) -> Result<Poly<F>> {
    if !m.is_square() {
        return Err(Error::NonSquare { rows: m.rows(), cols: m.cols() });
    }
    if m.rows() <= LAPLACE_LIMIT {
        return m.det_laplace();
    }
    if F::EXACT {
        Ok(bareiss_poly(m))
    } else {
        det_by_interpolation(m)
    }
}

/// Fraction-free elimination over `F[z]`, dividing by the previous pivot at
/// each step. The divisions are exact in exact arithmetic.
fn bareiss_poly<F: Field>(m: &PolyMatrix<F>) -> Poly<F> {
    let n = m.rows();
    let mut a: Vec<Vec<Poly<F>>> = (0..n).map(|r| m.row(r).to_vec()).collect();
    let mut negate = false;
    let mut prev = Poly::constant(F::one());
    for k in 0..n.saturating_sub(1) {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                return Poly::new(vec![]);
            };
            a.swap(k, p);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a[k][k].clone() * a[i][j].clone() - a[i][k].clone() * a[k][j].clone();
                a[i][j] = num.div_rem(&prev).map(|(q, _)| q).unwrap_or_else(|| Poly::new(vec![]));
            }
            a[i][k] = Poly::new(vec![]);
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if negate {
        -d
    } else {
        d
    }
}

fn det_by_interpolation<F: Field>(m: &PolyMatrix<F>) -> Result<Poly<F>> {
    use num_complex::Complex64;
    let n = m.rows();
    let bound: usize = (0..n)
        .map(|r| m.row(r).iter().filter_map(Poly::degree).max().unwrap_or(0))
        .sum();
    let points = bound + 1;
    // Only the float backend reaches this branch; values are carried as
    // complex numbers and mapped back through `from_complex`.
    let to_c = |p: &Poly<F>| p.map(|c| c.to_complex());
    let mc: Mat<Poly<Complex64>> = m.map(to_c);
    let mut values = Vec::with_capacity(points);
    for j in 0..points {
        let z = Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / points as f64);
        let at = mc.map(|p| p.eval(&z));
        values.push(at.det()?);
    }
    let coeffs: Vec<Complex64> = (0..points)
        .map(|k| {
            let s: Complex64 = (0..points)
                .map(|j| {
                    values[j]
                        * Complex64::from_polar(1.0, -std::f64::consts::TAU * (j * k) as f64 / points as f64)
                })
                .sum();
            s / points as f64
        })
        .collect();
    Ok(Poly::new(coeffs.into_iter().map(F::from_complex).collect::<Option<Vec<_>>>().ok_or(
        Error::Domain("float interpolation requested for an exact backend".into()),
    )?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> Rational {
        Rational::from_i64(v)
    }

    fn pq(v: &[i64]) -> Poly<Rational> {
        Poly::new(v.iter().map(|&c| q(c)).collect())
    }

    #[test]
    fn identity_and_two_by_two() {
        let id: PolyMatrix<Rational> = Mat::identity(3);
        assert_eq!(polymat_det(&id).unwrap(), pq(&[1]));
        let m = Mat::from_rows(vec![vec![pq(&[2]), pq(&[3])], vec![pq(&[5]), pq(&[7])]]);
        assert_eq!(polymat_det(&m).unwrap(), pq(&[-1]));
        assert!(polymat_det(&Mat::<Poly<Rational>>::zeros(2, 3)).is_err());
    }

    #[test]
    fn large_exact_and_float_agree_with_laplace() {
        let m = Mat::from_fn(5, 5, |r, c| pq(&[(r * 3 + c) as i64 % 4 - 1, (r + 2 * c) as i64 % 3 - 1]));
        let via_bareiss = polymat_det(&m).unwrap();
        assert_eq!(via_bareiss, m.det_laplace().unwrap());
        let mf = m.map(|p| p.map(|c| c.to_complex()));
        let via_fft = polymat_det(&mf).unwrap();
        let want = via_bareiss.map(|c| c.to_complex());
        for k in 0..=5 {
            assert!((via_fft.coeff(k) - want.coeff(k)).norm() < 1e-10);
        }
    }
}
