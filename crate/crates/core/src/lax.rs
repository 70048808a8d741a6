//! Polynomial Lax matrices: the sampled space `m(z)`, its characteristic
//! polynomial, and the gauge-fixed form `l(z) = s m(z) s^{-1}`.
//!
//! Two coefficient shapes exist. In the m-shape every entry has exactly `n`
//! coefficient slots: exponents `0..n-1` on and above the diagonal and
//! `1..n` below it. In the l-shape the degrees are
//!
//! ```text
//! n-2  n-2  ...  n-2  n-1
//! n    n-1  ...  n-1  n-1
//! n-1  n    ...  n-1  n-1
//! ...
//! n-1  ...  ...  n    n-1
//! ```
//!
//! with the leading coefficients of the subdiagonal fixed to 1 and the
//! leading coefficient of `l_{1N}` equal to the constant `s11`.
//!
//! Slots are numbered from the top: slot 0 of an entry is its leading
//! coefficient. Storage inside [`Poly`] is ascending as everywhere else.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{Field, Mat, Poly, PolyMatrix, Ring};
use crate::curve::{check_orders, SpectralCurve};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    M,
    L,
}

/// Position `(row, col)` (0-based) and slot of a coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CoefficientIndex {
    pub row: usize,
    pub col: usize,
    pub slot: usize,
}

/// Nominal z-degree of entry `(row, col)`; negative means identically zero.
pub fn entry_degree(shape: Shape, order: usize, pole_degree: usize, row: usize, col: usize) -> i64 {
    let n = pole_degree as i64;
    match shape {
        Shape::M => {
            if row <= col {
                n - 1
            } else {
                n
            }
        }
        Shape::L => {
            if row == 0 {
                if col + 1 == order {
                    n - 1
                } else {
                    n - 2
                }
            } else if row == col + 1 {
                n
            } else {
                n - 1
            }
        }
    }
}

impl CoefficientIndex {
    /// The z-exponent this slot multiplies.
    pub fn exponent(&self, shape: Shape, order: usize, pole_degree: usize) -> usize {
        (entry_degree(shape, order, pole_degree, self.row, self.col) - self.slot as i64) as usize
    }

    /// Index of the slot multiplying `z^exponent` in entry `(row, col)`.
    pub fn from_exponent(
        shape: Shape,
        order: usize,
        pole_degree: usize,
        row: usize,
        col: usize,
        exponent: usize,
    ) -> Option<Self> {
        let deg = entry_degree(shape, order, pole_degree, row, col);
        if exponent as i64 > deg {
            return None;
        }
        let idx = CoefficientIndex { row, col, slot: (deg - exponent as i64) as usize };
        slots(shape, order, pole_degree).contains(&idx).then_some(idx)
    }
}

/// Exponents of the free coefficients of entry `(row, col)`, ascending.
pub fn free_exponents(shape: Shape, order: usize, pole_degree: usize, row: usize, col: usize) -> Vec<usize> {
    let n = pole_degree;
    match shape {
        Shape::M => {
            if row <= col {
                (0..n).collect()
            } else {
                (1..=n).collect()
            }
        }
        Shape::L => {
            let deg = entry_degree(shape, order, pole_degree, row, col);
            let fixed_top = (row == 0 && col + 1 == order) || row == col + 1;
            let top = if fixed_top { deg - 1 } else { deg };
            (0..=top).filter(|&e| e >= 0).map(|e| e as usize).collect()
        }
    }
}

/// All free coefficients of a shape, ordered by row, column and then slot.
pub fn slots(shape: Shape, order: usize, pole_degree: usize) -> Vec<CoefficientIndex> {
    let mut out = Vec::new();
    for row in 0..order {
        for col in 0..order {
            let deg = entry_degree(shape, order, pole_degree, row, col);
            let mut exps = free_exponents(shape, order, pole_degree, row, col);
            exps.reverse();
            for e in exps {
                out.push(CoefficientIndex { row, col, slot: (deg - e as i64) as usize });
            }
        }
    }
    out
}

/// Position of an m-shape coefficient in the flat coordinate vector.
pub fn m_flat_index(order: usize, pole_degree: usize, idx: &CoefficientIndex) -> usize {
    (idx.row * order + idx.col) * pole_degree + idx.slot
}

/// Number of free coefficients of an l-shape matrix, `nN^2 - N`.
pub fn free_coefficient_count(order: usize, pole_degree: usize) -> Result<usize> {
    check_orders(order, pole_degree)?;
    Ok(slots(Shape::L, order, pole_degree).len())
}

/// Weight of the coefficient of `z^exponent` in entry `(row, col)` for the
/// grading with `deg z = N`: `N(n - e) + i - j - 1` in 1-based indices.
pub fn grade(order: usize, pole_degree: usize, row: usize, col: usize, exponent: usize) -> i64 {
    let (nn, n) = (order as i64, pole_degree as i64);
    nn * (n - exponent as i64) + row as i64 - col as i64 - 1
}

#[derive(Clone, Debug, PartialEq)]
pub struct LaxMatrix<F> {
    order: usize,
    pole_degree: usize,
    shape: Shape,
    entries: PolyMatrix<F>,
    /// Leading coefficient of `l_{1N}` (l-shape only).
    s11: Option<F>,
}

impl<F: Field> LaxMatrix<F> {
    pub fn from_entries(
        order: usize,
        pole_degree: usize,
        shape: Shape,
        entries: PolyMatrix<F>,
        s11: Option<F>,
    ) -> Result<Self> {
        check_orders(order, pole_degree)?;
        if entries.rows() != order || entries.cols() != order {
            return Err(Error::DimensionMismatch { expected: order, got: entries.rows().max(entries.cols()) });
        }
        let s11 = match shape {
            Shape::M => None,
            Shape::L => Some(s11.ok_or_else(|| Error::Domain("l-shape needs the constant s11".into()))?),
        };
        let lax = LaxMatrix { order, pole_degree, shape, entries, s11 };
        lax.check_shape()?;
        Ok(lax)
    }

    /// Assemble from free coordinates listed in [`slots`] order.
    pub fn from_coordinates(
        order: usize,
        pole_degree: usize,
        shape: Shape,
        coords: &[F],
        s11: Option<F>,
    ) -> Result<Self> {
        check_orders(order, pole_degree)?;
        let list = slots(shape, order, pole_degree);
        if coords.len() != list.len() {
            return Err(Error::DimensionMismatch { expected: list.len(), got: coords.len() });
        }
        let mut grid: Vec<Vec<Vec<F>>> = vec![vec![Vec::new(); order]; order];
        for (idx, c) in list.iter().zip(coords) {
            let e = idx.exponent(shape, order, pole_degree);
            let cell = &mut grid[idx.row][idx.col];
            if cell.len() <= e {
                cell.resize(e + 1, F::zero());
            }
            cell[e] = c.clone();
        }
        if shape == Shape::L {
            let n = pole_degree;
            let s = s11.clone().ok_or_else(|| Error::Domain("l-shape needs the constant s11".into()))?;
            let cell = &mut grid[0][order - 1];
            if cell.len() < n {
                cell.resize(n, F::zero());
            }
            cell[n - 1] = s;
            for r in 1..order {
                let cell = &mut grid[r][r - 1];
                cell.resize(n + 1, F::zero());
                cell[n] = F::one();
            }
        }
        let entries = Mat::from_fn(order, order, |r, c| Poly::new(std::mem::take(&mut grid[r][c])));
        LaxMatrix::from_entries(order, pole_degree, shape, entries, s11)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn pole_degree(&self) -> usize {
        self.pole_degree
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn entries(&self) -> &PolyMatrix<F> {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> &Poly<F> {
        &self.entries[(row, col)]
    }

    pub fn s11(&self) -> Option<&F> {
        self.s11.as_ref()
    }

    /// Free coordinates in [`slots`] order.
    pub fn coordinates(&self) -> Vec<F> {
        slots(self.shape, self.order, self.pole_degree)
            .iter()
            .map(|idx| self.entries[(idx.row, idx.col)].coeff(idx.exponent(self.shape, self.order, self.pole_degree)))
            .collect()
    }

    /// Constant matrix multiplying `z^exponent`.
    pub fn coefficient_matrix(&self, exponent: usize) -> Mat<F> {
        self.entries.map(|p| p.coeff(exponent))
    }

    pub fn eval(&self, z: &F) -> Mat<F> {
        self.entries.map(|p| p.eval(z))
    }

    /// Verify every entry against the shape: no coefficient outside the
    /// free slots other than the fixed constants, and those constants exact.
    pub fn check_shape(&self) -> Result<()> {
        let (nn, n) = (self.order, self.pole_degree);
        for r in 0..nn {
            for c in 0..nn {
                let p = &self.entries[(r, c)];
                let free = free_exponents(self.shape, nn, n, r, c);
                for (e, coef) in p.coeffs().iter().enumerate() {
                    if coef.is_zero() || free.contains(&e) {
                        continue;
                    }
                    let fixed = match self.shape {
                        Shape::M => None,
                        Shape::L if r == c + 1 && e == n => Some(F::one()),
                        Shape::L if r == 0 && c + 1 == nn && e + 1 == n => self.s11.clone(),
                        Shape::L => None,
                    };
                    match fixed {
                        Some(v) if v == *coef => {}
                        _ => {
                            return Err(Error::ShapeMismatch(format!(
                                "entry ({}, {}) has a coefficient at z^{e} outside the {:?}-shape",
                                r + 1,
                                c + 1,
                                self.shape
                            )))
                        }
                    }
                }
                if self.shape == Shape::L {
                    let lead_ok = if r == c + 1 {
                        p.coeff(n) == F::one()
                    } else if r == 0 && c + 1 == nn {
                        Some(&p.coeff(n - 1)) == self.s11.as_ref()
                    } else {
                        true
                    };
                    if !lead_ok {
                        return Err(Error::ShapeMismatch(format!(
                            "entry ({}, {}) has the wrong fixed leading coefficient",
                            r + 1,
                            c + 1
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> LaxMatrix<G> {
        LaxMatrix {
            order: self.order,
            pole_degree: self.pole_degree,
            shape: self.shape,
            entries: self.entries.map(|p| p.map(&f)),
            s11: self.s11.as_ref().map(&f),
        }
    }
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random m-shape matrix; every free coefficient is drawn with
/// [`Field::sample`] in [`slots`] order.
pub fn sample_m<F: Field>(order: usize, pole_degree: usize, seed: u64) -> Result<LaxMatrix<F>> {
    check_orders(order, pole_degree)?;
    let mut rng = rng_from_seed(seed);
    let count = order * order * pole_degree;
    let coords: Vec<F> = (0..count).map(|_| F::sample(&mut rng)).collect();
    LaxMatrix::from_coordinates(order, pole_degree, Shape::M, &coords, None)
}

/// Subsets of `0..n` of size `k`, as sorted index lists.
pub(crate) fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..(1 << n))
        .filter(|mask| mask.count_ones() as usize == k)
        .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
        .collect()
}

/// `t_k` as the sum of principal `k`-minors, so that
/// `det(m + w) = w^N + t_1 w^{N-1} + ... + t_N`.
pub fn char_poly_coefficients<R: Ring>(entries: &Mat<R>) -> Vec<R> {
    let nn = entries.rows();
    (1..=nn)
        .map(|k| {
            subsets(nn, k).into_iter().fold(R::zero(), |acc, idx| {
                acc + entries.select(&idx, &idx).det_laplace().expect("principal minor is square")
            })
        })
        .collect()
}

pub fn char_poly_t<F: Field>(lax: &LaxMatrix<F>) -> Result<SpectralCurve<F>> {
    let t = char_poly_coefficients(lax.entries());
    SpectralCurve::new(lax.order, lax.pole_degree, t)
}

/// The constant gauge matrix whose `j`-th row is `mu_1 (mu^-)^{N-j}`, where
/// `mu^-` is the `z^n` coefficient matrix and `mu_1` the first row of the
/// `z^{n-1}` coefficient matrix.
pub fn gauge_matrix_s<F: Field>(m: &LaxMatrix<F>) -> Result<Mat<F>> {
    if m.shape != Shape::M {
        return Err(Error::Domain("gauge matrix is defined for m-shape matrices".into()));
    }
    let (nn, n) = (m.order, m.pole_degree);
    let mu_minus = m.coefficient_matrix(n);
    let mu1 = Mat::from_rows(vec![m.coefficient_matrix(n - 1).row(0).to_vec()]);
    let mut rows = vec![Vec::new(); nn];
    let mut current = mu1;
    for j in (0..nn).rev() {
        rows[j] = current.row(0).to_vec();
        current = current.mul(&mu_minus);
    }
    let s = Mat::from_rows(rows);
    let diag = (0..nn).fold(F::one(), |acc, j| acc * s[(j, j)].clone());
    let scale: f64 = (0..nn)
        .map(|r| s.row(r).iter().map(|v| v.magnitude()).fold(0.0, f64::max))
        .product();
    if diag.is_zero() || (!F::EXACT && diag.magnitude() <= 1e-12 * scale) {
        return Err(Error::SingularGauge);
    }
    Ok(s)
}

/// Inverse of a lower-triangular matrix by forward substitution.
pub(crate) fn lower_triangular_inverse<R: Ring + std::ops::Div<Output = R>>(s: &Mat<R>) -> Mat<R> {
    let n = s.rows();
    let mut inv: Mat<R> = Mat::zeros(n, n);
    for c in 0..n {
        for r in c..n {
            let mut acc = if r == c { R::one() } else { R::zero() };
            for k in c..r {
                acc = acc - s[(r, k)].clone() * inv[(k, c)].clone();
            }
            inv[(r, c)] = acc / s[(r, r)].clone();
        }
    }
    inv
}

/// `l = s m s^{-1}` in the l-shape.
///
/// Over the exact backend the shape is verified coefficient by coefficient.
/// Over floats the result is projected onto the shape (rounding residue in
/// structurally zero slots is dropped and the fixed constants are set
/// exactly).
pub fn gauge_fix_l<F: Field>(m: &LaxMatrix<F>) -> Result<LaxMatrix<F>> {
    let s = gauge_matrix_s(m)?;
    let s_inv = lower_triangular_inverse(&s);
    let (nn, n) = (m.order, m.pole_degree);
    let max_deg = n;
    let mut entries: PolyMatrix<F> = Mat::zeros(nn, nn);
    for e in 0..=max_deg {
        let c = s.mul(&m.coefficient_matrix(e)).mul(&s_inv);
        for r in 0..nn {
            for col in 0..nn {
                if !c[(r, col)].is_zero() {
                    entries[(r, col)] = entries[(r, col)].clone() + Poly::monomial(c[(r, col)].clone(), e);
                }
            }
        }
    }
    let s11 = s[(0, 0)].clone();
    if F::EXACT {
        return LaxMatrix::from_entries(nn, n, Shape::L, entries, Some(s11));
    }
    let lax = LaxMatrix { order: nn, pole_degree: n, shape: Shape::L, entries, s11: Some(s11.clone()) };
    LaxMatrix::from_coordinates(nn, n, Shape::L, &lax.coordinates(), Some(s11))
}

/// Outcome of a sampling loop that rejects non-generic instances.
#[derive(Clone, Debug)]
pub struct Sampled<T> {
    pub value: T,
    /// Seed of the accepted attempt.
    pub seed: u64,
    pub rejections: usize,
}

/// Seed of the `attempt`-th try derived from `seed`.
pub fn advance_seed(seed: u64, attempt: usize) -> u64 {
    seed.wrapping_add((attempt as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Run `attempt` on successive derived seeds until it succeeds or fails
/// with a non-genericity error.
pub fn resample<T>(seed: u64, max_retries: usize, mut attempt: impl FnMut(u64) -> Result<T>) -> Result<Sampled<T>> {
    let mut last = String::new();
    for k in 0..=max_retries {
        let s = advance_seed(seed, k);
        match attempt(s) {
            Ok(value) => return Ok(Sampled { value, seed: s, rejections: k }),
            Err(e) if e.is_genericity() => last = e.to_string(),
            Err(e) => return Err(e),
        }
    }
    Err(Error::GenericityExhausted { retries: max_retries, last })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Rational;
    use num_complex::Complex64;

    #[test]
    fn sampled_shape_n2() {
        let m = sample_m::<Rational>(2, 2, 11).unwrap();
        let m21 = m.entry(1, 0);
        assert!(m21.coeff(0).is_zero());
        assert_eq!(m21.degree(), Some(2));
        assert_eq!(m.coordinates().len(), 8);
    }

    #[test]
    fn sampled_shape_n1() {
        let m = sample_m::<Rational>(3, 1, 4).unwrap();
        for r in 0..3 {
            for c in 0..3 {
                let p = m.entry(r, c);
                if r <= c {
                    assert_eq!(p.degree(), Some(0));
                } else {
                    assert_eq!(p.degree(), Some(1));
                    assert!(p.coeff(0).is_zero());
                }
            }
        }
    }

    #[test]
    fn deterministic_sampling() {
        assert_eq!(sample_m::<Complex64>(3, 2, 9).unwrap(), sample_m::<Complex64>(3, 2, 9).unwrap());
        assert_ne!(sample_m::<Complex64>(3, 2, 9).unwrap(), sample_m::<Complex64>(3, 2, 10).unwrap());
    }

    #[test]
    fn two_by_two_characteristic_polynomial() {
        let m = sample_m::<Rational>(2, 2, 5).unwrap();
        let c = char_poly_t(&m).unwrap();
        let (a, b, cc, d) = (m.entry(0, 0), m.entry(0, 1), m.entry(1, 0), m.entry(1, 1));
        assert_eq!(c.t(1), &(a.clone() + d.clone()));
        assert_eq!(c.t(2), &(a.clone() * d.clone() - b.clone() * cc.clone()));
    }

    #[test]
    fn gauge_matrix_n2() {
        let m = sample_m::<Rational>(2, 3, 2).unwrap();
        let s = gauge_matrix_s(&m).unwrap();
        let mu11 = m.entry(0, 0).coeff(2);
        let mu12 = m.entry(0, 1).coeff(2);
        let mu_minus21 = m.entry(1, 0).coeff(3);
        assert_eq!(s[(0, 0)], mu12.clone() * mu_minus21);
        assert!(s[(0, 1)].is_zero());
        assert_eq!(s[(1, 0)], mu11);
        assert_eq!(s[(1, 1)], mu12);
    }

    #[test]
    fn counts() {
        assert_eq!(free_coefficient_count(2, 2).unwrap(), 6);
        assert_eq!(free_coefficient_count(3, 2).unwrap(), 15);
        for nn in 2..=5 {
            for n in 1..=4 {
                assert_eq!(free_coefficient_count(nn, n).unwrap(), n * nn * nn - nn);
            }
        }
    }

    #[test]
    fn slot_exponent_round_trip() {
        for shape in [Shape::M, Shape::L] {
            for idx in slots(shape, 3, 2) {
                let e = idx.exponent(shape, 3, 2);
                assert_eq!(CoefficientIndex::from_exponent(shape, 3, 2, idx.row, idx.col, e), Some(idx));
            }
        }
    }

    #[test]
    fn resample_counts_rejections() {
        let out = resample(1, 5, |s| if s == advance_seed(1, 2) { Ok(s) } else { Err(Error::SingularGauge) }).unwrap();
        assert_eq!(out.rejections, 2);
        assert!(matches!(resample(1, 2, |_| -> Result<()> { Err(Error::SingularGauge) }), Err(Error::GenericityExhausted { .. })));
        assert!(matches!(resample(1, 2, |_| -> Result<()> { Err(Error::ZeroPolynomial) }), Err(Error::ZeroPolynomial)));
    }
}
