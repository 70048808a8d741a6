//! Numerical check of the gauge-fixed bracket
//!
//! ```text
//! {l(z1) (x) l(z2)} = [r^12(z1, z2), l(z1) (x) 1] + [r^21(z2, z1), 1 (x) l(z2)]
//! r^12(z1, z2) = z2 / (z1 - z2) P + z2 sum_jk E_jk U^{N+1-j} (x) E_k1
//! ```
//!
//! The left side is computed from the m-bracket by the chain rule through
//! `l = s(m) m s(m)^{-1}`; the right side from the formula.
//!
//! Written this way the identity does not hold. It holds exactly once the
//! second commutator is subtracted and the `E_k1` tail is divided by
//! `s11`, both of which fall out of `E_k1 s^{-1} = E_k1 / s11` and the
//! usual `[r12, l1] - [r21, l2]` form. Both variants are evaluated.

use rand::Rng;
use serde::Serialize;

use crate::algebra::{Field, Jet, Mat};
use crate::lax::{gauge_matrix_s, lower_triangular_inverse, rng_from_seed, LaxMatrix, Shape};
use crate::error::{Error, Result};

use super::{Gradient, PoissonStructure};

/// Coefficient matrices of `s m s^{-1}` from those of `m`, over any ring
/// with division (used with jets to carry derivatives through `s`).
fn conjugate_by_gauge<R>(coeffs: &[Mat<R>], pole_degree: usize) -> Result<Vec<Mat<R>>>
where
    R: crate::algebra::Ring + std::ops::Div<Output = R>,
{
    let nn = coeffs[0].rows();
    let mu_minus = &coeffs[pole_degree];
    let mut current = Mat::from_rows(vec![coeffs[pole_degree - 1].row(0).to_vec()]);
    let mut rows = vec![Vec::new(); nn];
    for j in (0..nn).rev() {
        rows[j] = current.row(0).to_vec();
        current = current.mul(mu_minus);
    }
    let s = Mat::from_rows(rows);
    if (0..nn).any(|j| s[(j, j)].is_zero()) {
        return Err(Error::SingularGauge);
    }
    let s_inv = lower_triangular_inverse(&s);
    Ok(coeffs.iter().map(|c| s.mul(c).mul(&s_inv)).collect())
}

/// Value and m-gradient of every entry `l_ij(z)`.
pub fn l_gradients<F: Field>(m: &LaxMatrix<F>, z: &F) -> Result<Mat<Gradient<F>>> {
    if m.shape() != Shape::M {
        return Err(Error::Domain("l-gradients are taken with respect to m-coordinates".into()));
    }
    let (nn, n) = (m.order(), m.pole_degree());
    let point = m.coordinates();
    let dim = point.len();
    let list = crate::lax::slots(Shape::M, nn, n);
    let mut coeffs: Vec<Mat<Jet<F>>> = (0..=n).map(|_| Mat::zeros(nn, nn)).collect();
    for (w, idx) in list.iter().enumerate() {
        let e = idx.exponent(Shape::M, nn, n);
        coeffs[e][(idx.row, idx.col)] = Jet::variable(point[w].clone(), w, dim);
    }
    let l = conjugate_by_gauge(&coeffs, n)?;
    let zj = Jet::constant(z.clone());
    Ok(Mat::from_fn(nn, nn, |r, c| {
        // Horner in z over the jet coefficients
        let v = l.iter().rev().fold(Jet::constant(F::zero()), |acc, mat| acc * zj.clone() + mat[(r, c)].clone());
        Gradient { point: point.clone(), value: v.value.clone(), partials: v.gradient(dim) }
    }))
}

/// `A (x) B` with `[(i, k), (j, l)] = A_ij B_kl`.
fn kron<F: Field>(a: &Mat<F>, b: &Mat<F>) -> Mat<F> {
    let nn = a.rows();
    Mat::from_fn(nn * nn, nn * nn, |r, c| a[(r / nn, c / nn)].clone() * b[(r % nn, c % nn)].clone())
}

fn unit<F: Field>(nn: usize, r: usize, c: usize) -> Mat<F> {
    let mut e = Mat::zeros(nn, nn);
    e[(r, c)] = F::one();
    e
}

/// Swap the two tensor factors.
fn flip<F: Field>(t: &Mat<F>, nn: usize) -> Mat<F> {
    Mat::from_fn(nn * nn, nn * nn, |r, c| {
        let (i, k, j, l) = (r / nn, r % nn, c / nn, c % nn);
        t[(k * nn + i, l * nn + j)].clone()
    })
}

/// Which right-hand side to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RhatForm {
    /// The formula as usually quoted: `+[r^21, 1 (x) l]`, unit tail.
    AsWritten,
    /// `-[r^21, 1 (x) l]` with the tail scaled by `1 / s11`.
    Corrected,
}

/// `r^12(z1, z2)` as an `N^2 x N^2` matrix, the `E_k1` tail scaled by
/// `tail`.
pub fn rhat<F: Field>(nn: usize, z1: &F, z2: &F, tail: &F) -> Mat<F> {
    let perm = Mat::from_fn(nn * nn, nn * nn, |r, c| {
        let (i, k, j, l) = (r / nn, r % nn, c / nn, c % nn);
        if i == l && k == j {
            F::one()
        } else {
            F::zero()
        }
    });
    let mut out = perm.scale(&(z2.clone() / (z1.clone() - z2.clone())));
    let u: Mat<F> = Mat::from_fn(nn, nn, |r, c| if r == c + 1 { F::one() } else { F::zero() });
    for j in 0..nn {
        // 1-based power N + 1 - j
        let power = nn - j;
        let mut up = Mat::identity(nn);
        for _ in 0..power {
            up = up.mul(&u);
        }
        for k in 0..nn {
            let left = unit::<F>(nn, j, k).mul(&up);
            out = out.add(&kron(&left, &unit(nn, k, 0)).scale(&(z2.clone() * tail.clone())));
        }
    }
    out
}

fn commutator<F: Field>(a: &Mat<F>, b: &Mat<F>) -> Mat<F> {
    a.mul(b).sub(&b.mul(a))
}

/// Right side of the l-bracket identity at `(z1, z2)`.
pub fn rhat_bracket<F: Field>(l1: &Mat<F>, l2: &Mat<F>, z1: &F, z2: &F, s11: &F, form: RhatForm) -> Mat<F> {
    let nn = l1.rows();
    let id = Mat::identity(nn);
    let tail = match form {
        RhatForm::AsWritten => F::one(),
        RhatForm::Corrected => F::one() / s11.clone(),
    };
    let r12 = rhat(nn, z1, z2, &tail);
    let r21 = flip(&rhat(nn, z2, z1, &tail), nn);
    let first = commutator(&r12, &kron(l1, &id));
    let second = commutator(&r21, &kron(&id, l2));
    match form {
        RhatForm::AsWritten => first.add(&second),
        RhatForm::Corrected => first.sub(&second),
    }
}

/// Left side: `[(i, k), (j, l)] = {l_ij(z1), l_kl(z2)}`.
fn lhs_from_gradients<F: Field>(p: &PoissonStructure, g1: &Mat<Gradient<F>>, g2: &Mat<Gradient<F>>) -> Mat<F> {
    let nn = g1.rows();
    let x = &g1[(0, 0)].point;
    Mat::from_fn(nn * nn, nn * nn, |r, c| {
        let (i, k, j, l) = (r / nn, r % nn, c / nn, c % nn);
        p.contract(x, &g1[(i, j)].partials, &g2[(k, l)].partials)
    })
}

fn relative_gap<F: Field>(a: &Mat<F>, b: &Mat<F>) -> f64 {
    let scale = a.max_magnitude().max(b.max_magnitude()).max(f64::MIN_POSITIVE);
    a.sub(b).max_magnitude() / scale
}

#[derive(Clone, Debug, Serialize)]
pub struct RhatReport {
    /// Largest relative residual of the corrected identity.
    pub max_residual: f64,
    /// Largest relative residual of the identity as usually quoted.
    pub as_written_residual: f64,
    /// `(|z1 - z2|, corrected residual, as-written residual)` per sample.
    pub samples: Vec<(f64, f64, f64)>,
}

fn sample_pair<F: Field>(rng: &mut impl Rng) -> (F, F) {
    loop {
        let z1 = F::sample(rng);
        let z2 = F::sample(rng);
        if (z1.clone() - z2.clone()).magnitude() > 0.1 {
            return (z1, z2);
        }
    }
}

/// Compare both sides of the identity at `samples` random point pairs with
/// `|z1 - z2| > 0.1`; returns the largest relative residual.
pub fn check_rhat_identity<F: Field>(
    p: &PoissonStructure,
    m: &LaxMatrix<F>,
    samples: usize,
    seed: u64,
) -> Result<RhatReport> {
    let s11 = gauge_matrix_s(m)?[(0, 0)].clone();
    let mut rng = rng_from_seed(seed);
    let mut out = Vec::with_capacity(samples);
    for _ in 0..samples {
        let (z1, z2) = sample_pair::<F>(&mut rng);
        let g1 = l_gradients(m, &z1)?;
        let g2 = l_gradients(m, &z2)?;
        let lhs = lhs_from_gradients(p, &g1, &g2);
        let l1 = g1.map(|g| g.value.clone());
        let l2 = g2.map(|g| g.value.clone());
        let fixed = rhat_bracket(&l1, &l2, &z1, &z2, &s11, RhatForm::Corrected);
        let quoted = rhat_bracket(&l1, &l2, &z1, &z2, &s11, RhatForm::AsWritten);
        out.push(((z1 - z2).magnitude(), relative_gap(&lhs, &fixed), relative_gap(&lhs, &quoted)));
    }
    let max_residual = out.iter().map(|s| s.1).fold(0.0, f64::max);
    let as_written_residual = out.iter().map(|s| s.2).fold(0.0, f64::max);
    Ok(RhatReport { max_residual, as_written_residual, samples: out })
}

/// Residual of the identity when the l-gradients are replaced by central
/// differences of step `h`, for each step in `steps`.
pub fn rhat_step_sweep(
    p: &PoissonStructure,
    m: &LaxMatrix<num_complex::Complex64>,
    z1: num_complex::Complex64,
    z2: num_complex::Complex64,
    steps: &[f64],
) -> Result<Vec<(f64, f64)>> {
    use num_complex::Complex64;
    let (nn, n) = (m.order(), m.pole_degree());
    let x = m.coordinates();
    let eval_l = |y: &[Complex64], z: Complex64| -> Result<Mat<Complex64>> {
        let mm = LaxMatrix::from_coordinates(nn, n, Shape::M, y, None)?;
        let coeffs: Vec<Mat<Complex64>> = (0..=n).map(|e| mm.coefficient_matrix(e)).collect();
        let l = conjugate_by_gauge(&coeffs, n)?;
        Ok(Mat::from_fn(nn, nn, |r, c| l.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, mat| acc * z + mat[(r, c)])))
    };
    let l1 = eval_l(&x, z1)?;
    let l2 = eval_l(&x, z2)?;
    let s11 = gauge_matrix_s(m)?[(0, 0)];
    let rhs = rhat_bracket(&l1, &l2, &z1, &z2, &s11, RhatForm::Corrected);
    let mut out = Vec::with_capacity(steps.len());
    for &h in steps {
        let mut d1: Vec<Mat<Complex64>> = Vec::with_capacity(x.len());
        let mut d2: Vec<Mat<Complex64>> = Vec::with_capacity(x.len());
        for u in 0..x.len() {
            let mut plus = x.clone();
            let mut minus = x.clone();
            plus[u] += h;
            minus[u] -= h;
            let two_h = Complex64::new(2.0 * h, 0.0);
            d1.push(eval_l(&plus, z1)?.sub(&eval_l(&minus, z1)?).scale(&(Complex64::new(1.0, 0.0) / two_h)));
            d2.push(eval_l(&plus, z2)?.sub(&eval_l(&minus, z2)?).scale(&(Complex64::new(1.0, 0.0) / two_h)));
        }
        let grad = |d: &[Mat<Complex64>], r: usize, c: usize| -> Vec<Complex64> { d.iter().map(|m| m[(r, c)]).collect() };
        let lhs = Mat::from_fn(nn * nn, nn * nn, |r, c| {
            let (i, k, j, l) = (r / nn, r % nn, c / nn, c % nn);
            p.contract(&x, &grad(&d1, i, j), &grad(&d2, k, l))
        });
        out.push((h, relative_gap(&lhs, &rhs)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Rational;
    use crate::lax::{gauge_fix_l, sample_m};
    use crate::poisson::structure_constants;
    use num_complex::Complex64;

    #[test]
    fn gradients_reproduce_gauge_fixed_values() {
        let m = sample_m::<Rational>(3, 2, 4).unwrap();
        let l = gauge_fix_l(&m).unwrap();
        let z = Rational::from_ratio(3, 5);
        let g = l_gradients(&m, &z).unwrap();
        assert_eq!(g.map(|x| x.value.clone()), l.eval(&z));
    }

    #[test]
    fn corrected_identity_is_exact() {
        for (nn, n) in [(2, 2), (2, 3), (3, 2)] {
            let p = structure_constants(nn, n).unwrap();
            let m = sample_m::<Rational>(nn, n, 11).unwrap();
            let report = check_rhat_identity(&p, &m, 2, 1).unwrap();
            assert_eq!(report.max_residual, 0.0, "{report:?}");
            assert!(report.as_written_residual > 1e-3, "{report:?}");
        }
    }

    #[test]
    fn float_identity_and_step_sweep() {
        let p = structure_constants(2, 2).unwrap();
        let m = sample_m::<Complex64>(2, 2, 5).unwrap();
        let report = check_rhat_identity(&p, &m, 4, 2).unwrap();
        assert!(report.max_residual <= 1e-7, "{report:?}");
        let steps = [1e-6, 1e-4, 1e-2, 1e-1];
        let sweep = rhat_step_sweep(&p, &m, Complex64::new(0.3, 0.1), Complex64::new(-0.4, 0.5), &steps).unwrap();
        assert!(sweep[0].1 < 1e-6, "{sweep:?}");
        assert!(sweep.windows(2).skip(1).all(|w| w[0].1 <= w[1].1), "{sweep:?}");
    }
}
