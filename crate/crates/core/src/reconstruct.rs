//! Recovering the gauge-fixed matrix from a divisor and the curve.
//!
//! 1. For each `k` the polynomial `X_k(w, z)` vanishes at the `g` points.
//!    Its coefficients off the regular support are constants, so the rest
//!    solve a `g x g` linear system.
//! 2. `det L_k(w, z)` equals `z X_k` (or `X_N`), and the unknown entries of
//!    `L'` enter it triangularly by grade: a grade-`c` coefficient of
//!    `det L_k` is linear in the grade-`c` entries once all lower grades are
//!    known. Jets extract each stage's linear system mechanically.
//! 3. The first column enters `det(l + w)` linearly and is matched against
//!    the curve.

use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{BiPoly, Field, Jet, Mat, Poly, Ring};
use crate::curve::{check_orders, differential_index_set, genus, DifferentialIndex, SpectralCurve};
use crate::error::{Error, Result};
use crate::lax::{LaxMatrix, Shape};
use crate::sov::{separate, Divisor};

type C = Complex64;

/// Below this reciprocal condition number the evaluation matrix is treated
/// as singular.
pub const THETA_RCOND: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonomialSupport {
    /// `w^l z^k` with `k <= (N - 1 - l) n - 2`; exactly `g` of them.
    pub entries: Vec<DifferentialIndex>,
    /// `w^l z^{(N - l - 1) n - 1}` for `l = 0..N-2`, whose coefficients are
    /// constants.
    pub exceptional: Vec<DifferentialIndex>,
}

pub fn xk_support(order: usize, pole_degree: usize) -> Result<MonomialSupport> {
    check_orders(order, pole_degree)?;
    if pole_degree < 2 {
        return Err(Error::Domain("reconstruction needs n >= 2".into()));
    }
    let exceptional = (0..order - 1)
        .map(|l| DifferentialIndex { l, k: (order - l - 1) * pole_degree - 1 })
        .collect();
    Ok(MonomialSupport { entries: differential_index_set(order, pole_degree)?, exceptional })
}

/// `s11` recovered from the curve: `top(t_N) = (-1)^{N-1} s11`.
pub fn s11_from_curve<F: Field>(curve: &SpectralCurve<F>) -> F {
    let top = curve.top_coefficient(curve.order());
    if curve.order().is_multiple_of(2) {
        -top
    } else {
        top
    }
}

/// `L(w, z) = (z b; d) + w (0; I)` as an `N x (N-1)` matrix of polynomials
/// in `(w, z)`.
fn l_of_wz<R: Ring>(entries: &Mat<Poly<R>>) -> Mat<BiPoly<R>> {
    let nn = entries.rows();
    Mat::from_fn(nn, nn - 1, |r, c| {
        let p = BiPoly::from_v(&entries[(r, c + 1)]);
        let p = if r == 0 { p * BiPoly::monomial(R::one(), 0, 1) } else { p };
        if r == c + 1 {
            p + BiPoly::monomial(R::one(), 1, 0)
        } else {
            p
        }
    })
}

/// Row of `L` removed to form `L_k` (0-based).
fn dropped_row(order: usize, k: usize) -> usize {
    if k < order {
        k
    } else {
        0
    }
}

fn det_l_k<R: Ring>(big_l: &Mat<BiPoly<R>>, k: usize) -> Result<BiPoly<R>> {
    big_l.without_row(dropped_row(big_l.rows(), k)).det_laplace()
}

/// `X_k` computed directly from a known matrix: the minor of
/// `(b; d + w)` without row `k + 1` (`k < N`), or `det(d + w)`.
pub fn xk_from_lax<F: Field>(l: &LaxMatrix<F>, k: usize) -> Result<BiPoly<F>> {
    let nn = l.order();
    if k == 0 || k > nn {
        return Err(Error::IndexOutOfRange(format!("X_{k} with N = {nn}")));
    }
    let stacked = Mat::from_fn(nn, nn - 1, |r, c| {
        let p = BiPoly::from_v(l.entry(r, c + 1));
        if r == c + 1 {
            p + BiPoly::monomial(F::one(), 1, 0)
        } else {
            p
        }
    });
    stacked.without_row(dropped_row(nn, k)).det_laplace()
}

/// The matrix with only the fixed constants: `s11 z^{n-1}` in `l_1N` and
/// `z^n` on the subdiagonal.
fn template<F: Field>(order: usize, pole_degree: usize, s11: &F) -> Result<LaxMatrix<F>> {
    let coords = vec![F::zero(); order * order * pole_degree - order];
    LaxMatrix::from_coordinates(order, pole_degree, Shape::L, &coords, Some(s11.clone()))
}

/// Known coefficients of `X_k` as `(w-power, z-power, value)`.
pub fn xk_constants<F: Field>(curve: &SpectralCurve<F>, k: usize) -> Result<Vec<(usize, usize, F)>> {
    let (nn, n) = (curve.order(), curve.pole_degree());
    let support = xk_support(nn, n)?;
    if k < nn {
        let t = template(nn, n, &s11_from_curve(curve))?;
        let x = xk_from_lax(&t, k)?;
        Ok(support.exceptional.iter().map(|e| (e.l, e.k, x.coeff(e.l, e.k))).collect())
    } else {
        let mut out: Vec<(usize, usize, F)> =
            support.exceptional.iter().map(|e| (e.l, e.k, curve.top_coefficient(nn - e.l - 1))).collect();
        out.push((nn - 1, 0, F::one()));
        Ok(out)
    }
}

/// Solved `X_1 .. X_N`.
#[derive(Clone, Debug)]
pub struct XkPolynomials<F> {
    pub order: usize,
    pub pole_degree: usize,
    /// `x[k - 1]` is `X_k`, `w` as first variable.
    pub x: Vec<BiPoly<F>>,
    pub s11: F,
    /// Reciprocal condition number of the evaluation matrix.
    pub rcond: f64,
}

fn evaluation_matrix(support: &MonomialSupport, divisor: &Divisor) -> Mat<C> {
    Mat::from_fn(divisor.len(), support.entries.len(), |i, j| {
        let (p, e) = (&divisor.points[i], &support.entries[j]);
        p.w.powu(e.l as u32) * p.z.powu(e.k as u32)
    })
}

/// Solve for `X_k` so that it vanishes at every divisor point.
pub fn solve_xk(divisor: &Divisor, curve: &SpectralCurve<C>, k: usize) -> Result<(BiPoly<C>, f64)> {
    let (nn, n) = (curve.order(), curve.pole_degree());
    let support = xk_support(nn, n)?;
    if divisor.len() != support.entries.len() {
        return Err(Error::DimensionMismatch { expected: support.entries.len(), got: divisor.len() });
    }
    let constants = xk_constants(curve, k)?;
    let v = evaluation_matrix(&support, divisor);
    let rhs: Vec<C> = divisor
        .points
        .iter()
        .map(|p| -constants.iter().fold(C::new(0.0, 0.0), |acc, (a, b, c)| acc + c * p.w.powu(*a as u32) * p.z.powu(*b as u32)))
        .collect();
    let sol = C::least_squares(&v, &rhs)?;
    if sol.rcond < THETA_RCOND {
        return Err(Error::ThetaDivisorSingularity { rcond: sol.rcond });
    }
    let mut x = BiPoly::zero();
    for (e, c) in support.entries.iter().zip(&sol.solution) {
        x = x + BiPoly::monomial(*c, e.l, e.k);
    }
    for (a, b, c) in constants {
        x = x + BiPoly::monomial(c, a, b);
    }
    Ok((x, sol.rcond))
}

pub fn solve_all_xk(divisor: &Divisor, curve: &SpectralCurve<C>) -> Result<XkPolynomials<C>> {
    let mut x = Vec::with_capacity(curve.order());
    let mut rcond = f64::INFINITY;
    for k in 1..=curve.order() {
        let (xk, rc) = solve_xk(divisor, curve, k)?;
        rcond = rcond.min(rc);
        x.push(xk);
    }
    Ok(XkPolynomials {
        order: curve.order(),
        pole_degree: curve.pole_degree(),
        x,
        s11: s11_from_curve(curve),
        rcond,
    })
}

/// `X_k` for every `k` from a known matrix (the forward direction).
pub fn all_xk_from_lax<F: Field>(l: &LaxMatrix<F>) -> Result<XkPolynomials<F>> {
    let s11 = l.s11().cloned().ok_or_else(|| Error::Domain("X_k are defined for the l-shape".into()))?;
    let x = (1..=l.order()).map(|k| xk_from_lax(l, k)).collect::<Result<_>>()?;
    Ok(XkPolynomials { order: l.order(), pole_degree: l.pole_degree(), x, s11, rcond: 1.0 })
}

/// `V_k(w, z)`: `L_k` with every entry of `L'` set to zero.
pub fn v_matrix<F: Field>(order: usize, pole_degree: usize, k: usize, s11: &F) -> Result<Mat<BiPoly<F>>> {
    let t = template(order, pole_degree, s11)?;
    Ok(l_of_wz(t.entries()).without_row(dropped_row(order, k)))
}

/// One coordinate of `L'`: the coefficient of `z^q` at `(row, col)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct PrimeSlot {
    row: usize,
    col: usize,
    q: usize,
}

fn prime_slots(order: usize, pole_degree: usize) -> Vec<PrimeSlot> {
    let mut out = Vec::new();
    for row in 0..order {
        for col in 0..order - 1 {
            for q in 0..pole_degree {
                // z b has no constant term
                if row == 0 && q == 0 {
                    continue;
                }
                out.push(PrimeSlot { row, col, q });
            }
        }
    }
    out
}

fn prime_grade(order: usize, pole_degree: usize, s: &PrimeSlot) -> i64 {
    let (nn, n) = (order as i64, pole_degree as i64);
    let rho = if s.row == 0 { nn } else { s.row as i64 };
    nn * n - 1 + rho - (s.col as i64 + 1) - nn * s.q as i64
}

/// Grade of `det L_k`.
fn det_grade(order: usize, pole_degree: usize, k: usize) -> i64 {
    let (nn, n, k) = (order as i64, pole_degree as i64, k as i64);
    if k < nn {
        (k - 1) * (nn * n - 1) + nn * (nn - k) * n
    } else {
        (nn - 1) * (nn * n - 1)
    }
}

/// Columns `2..N` of `l` from `L'` (first column left zero).
fn columns_from_prime<R: Ring>(order: usize, pole_degree: usize, s11: &R, value: impl Fn(&PrimeSlot) -> R) -> Mat<Poly<R>> {
    let n = pole_degree;
    let mut grid: Vec<Vec<Vec<R>>> = vec![vec![vec![R::zero(); n + 1]; order]; order];
    for s in prime_slots(order, n) {
        let v = value(&s);
        if s.row == 0 {
            grid[0][s.col + 1][s.q - 1] = v;
        } else {
            grid[s.row][s.col + 1][s.q] = v;
        }
    }
    grid[0][order - 1][n - 1] = s11.clone();
    for r in 2..order {
        grid[r][r - 1][n] = R::one();
    }
    Mat::from_fn(order, order, |r, c| Poly::new(std::mem::take(&mut grid[r][c])))
}

/// Tolerances of [`reconstruct_with`].
#[derive(Clone, Copy, Debug)]
pub struct ReconstructOptions {
    /// Largest accepted stage residual relative to the stage's data.
    pub sweep_tol: f64,
    /// Largest accepted first-column residual relative to the curve.
    pub curve_tol: f64,
}

impl Default for ReconstructOptions {
    fn default() -> Self {
        ReconstructOptions { sweep_tol: 1e-6, curve_tol: 1e-6 }
    }
}

fn within<F: Field>(residual: f64, scale: f64, tol: f64) -> bool {
    if F::EXACT {
        residual == 0.0
    } else {
        residual <= tol * scale.max(1.0)
    }
}

/// Coefficient matrices `L'^(0) .. L'^(n-1)` (each `N x (N-1)`) from the
/// `X_k`, swept grade by grade. Also returns the largest relative stage
/// residual.
pub fn recover_lprime<F: Field>(xs: &XkPolynomials<F>, opts: ReconstructOptions) -> Result<(Vec<Mat<F>>, f64)> {
    let (nn, n) = (xs.order, xs.pole_degree);
    let slots = prime_slots(nn, n);
    let grades: Vec<i64> = slots.iter().map(|s| prime_grade(nn, n, s)).collect();
    let mut distinct = grades.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let targets: Vec<BiPoly<F>> = (1..=nn)
        .map(|k| {
            if k < nn {
                xs.x[k - 1].clone() * BiPoly::monomial(F::one(), 0, 1)
            } else {
                xs.x[k - 1].clone()
            }
        })
        .collect();
    let wg = (nn * n) as i64 - 1;
    let mut known: Vec<Option<F>> = vec![None; slots.len()];
    let mut worst: f64 = 0.0;
    for &gamma in &distinct {
        let unknown: Vec<usize> = (0..slots.len()).filter(|&i| grades[i] == gamma).collect();
        let dim = unknown.len();
        let jet_of = |i: usize| -> Jet<F> {
            if let Some(v) = &known[i] {
                Jet::constant(v.clone())
            } else if let Some(pos) = unknown.iter().position(|&u| u == i) {
                Jet::variable(F::zero(), pos, dim)
            } else {
                Jet::constant(F::zero())
            }
        };
        let lx = columns_from_prime(nn, n, &Jet::constant(xs.s11.clone()), |s| {
            jet_of(slots.iter().position(|t| t == s).expect("slot listed"))
        });
        let big_l = l_of_wz(&lx);
        let mut rows: Vec<Vec<F>> = Vec::new();
        let mut rhs: Vec<F> = Vec::new();
        for k in 1..=nn {
            let det = det_l_k(&big_l, k)?;
            let top = det_grade(nn, n, k);
            let max_p = nn - 1;
            for p in 0..=max_p {
                let rest = top - p as i64 * wg - gamma;
                if rest < 0 || rest % nn as i64 != 0 {
                    continue;
                }
                let e = (rest / nn as i64) as usize;
                let c = det.coeff(p, e);
                rows.push(c.gradient(dim));
                rhs.push(targets[k - 1].coeff(p, e) - c.value);
            }
        }
        let stage = |detail: String| Error::SweepInconsistency { grade: gamma.max(0) as usize, detail };
        if dim > 0 && rows.len() < dim {
            return Err(stage(format!("{} equations for {dim} unknowns", rows.len())));
        }
        let a = Mat::from_rows(rows);
        let scale = rhs.iter().map(Field::magnitude).fold(0.0, f64::max);
        let sol = if dim == 0 {
            let residual = rhs.iter().map(Field::magnitude).fold(0.0, f64::max);
            crate::algebra::LeastSquares { solution: vec![], residual, rcond: 1.0 }
        } else {
            F::least_squares(&a, &rhs).map_err(|e| stage(e.to_string()))?
        };
        if !F::EXACT && sol.rcond < THETA_RCOND {
            return Err(stage(format!("stage matrix is singular (rcond {:e})", sol.rcond)));
        }
        if !within::<F>(sol.residual, scale, opts.sweep_tol) {
            return Err(stage(format!("residual {:e}", sol.residual)));
        }
        worst = worst.max(sol.residual / scale.max(1.0));
        for (pos, &i) in unknown.iter().enumerate() {
            known[i] = Some(sol.solution[pos].clone());
        }
    }
    let mut out: Vec<Mat<F>> = (0..n).map(|_| Mat::zeros(nn, nn - 1)).collect();
    for (s, v) in slots.iter().zip(known) {
        out[s.q][(s.row, s.col)] = v.expect("every grade swept");
    }
    Ok((out, worst))
}

/// Columns `2..N` of `l` from the `L'` coefficient matrices.
pub fn columns_from_lprime<F: Field>(lprime: &[Mat<F>], s11: &F) -> Mat<Poly<F>> {
    let nn = lprime[0].rows();
    columns_from_prime(nn, lprime.len(), s11, |s| lprime[s.q][(s.row, s.col)].clone())
}

/// First-column polynomials `l_11 .. l_N1` given the other columns, by
/// matching `det(l + w)` against the curve coefficient by coefficient.
/// Returns the column and the relative residual.
pub fn recover_first_column<F: Field>(
    curve: &SpectralCurve<F>,
    partial: &Mat<Poly<F>>,
    tol: f64,
) -> Result<(Vec<Poly<F>>, f64)> {
    let (nn, n) = (curve.order(), curve.pole_degree());
    let a: Mat<BiPoly<F>> = Mat::from_fn(nn, nn, |r, c| {
        let p = if c == 0 { BiPoly::zero() } else { BiPoly::from_v(&partial[(r, c)]) };
        if r == c {
            p + BiPoly::monomial(F::one(), 1, 0)
        } else {
            p
        }
    });
    let cof = a.cofactors()?;
    // known part: the w on the diagonal and the fixed z^n of l_21
    let known = cof[(0, 0)].clone() * BiPoly::monomial(F::one(), 1, 0) + cof[(1, 0)].clone() * BiPoly::monomial(F::one(), 0, n);
    let unknowns: Vec<(usize, usize)> = (0..nn)
        .flat_map(|i| {
            let top = if i == 0 { n - 1 } else { n };
            (0..top).map(move |e| (i, e))
        })
        .collect();
    let contributions: Vec<BiPoly<F>> =
        unknowns.iter().map(|&(i, e)| cof[(i, 0)].clone() * BiPoly::monomial(F::one(), 0, e)).collect();
    let target = curve.to_bipoly() - known;
    let deg_w = nn;
    let deg_z = nn * n;
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for p in 0..=deg_w {
        for e in 0..=deg_z {
            let row: Vec<F> = contributions.iter().map(|c| c.coeff(p, e)).collect();
            let t = target.coeff(p, e);
            if row.iter().all(Ring::is_zero) && t.is_zero() {
                continue;
            }
            rows.push(row);
            rhs.push(t);
        }
    }
    let scale = curve.coefficients().iter().map(|t| t.max_magnitude()).fold(1.0, f64::max);
    let sol = F::least_squares(&Mat::from_rows(rows), &rhs).map_err(|_| Error::InconsistentCurve { residual: f64::INFINITY })?;
    let relative = sol.residual / scale;
    if !within::<F>(sol.residual, scale, tol) {
        return Err(Error::InconsistentCurve { residual: relative });
    }
    let mut cols: Vec<Vec<F>> = vec![vec![F::zero(); n + 1]; nn];
    for (&(i, e), v) in unknowns.iter().zip(sol.solution) {
        cols[i][e] = v;
    }
    cols[1][n] = F::one();
    Ok((cols.into_iter().map(Poly::new).collect(), relative))
}

#[derive(Clone, Debug, Serialize)]
pub struct Reconstruction {
    #[serde(skip)]
    pub matrix: LaxMatrix<C>,
    /// Smallest reciprocal condition number of the `X_k` systems.
    pub rcond: f64,
    pub sweep_residual: f64,
    pub first_column_residual: f64,
}

pub fn reconstruct(divisor: &Divisor, curve: &SpectralCurve<C>) -> Result<Reconstruction> {
    reconstruct_with(divisor, curve, ReconstructOptions::default())
}

pub fn reconstruct_with(divisor: &Divisor, curve: &SpectralCurve<C>, opts: ReconstructOptions) -> Result<Reconstruction> {
    let (nn, n) = (curve.order(), curve.pole_degree());
    if divisor.order != nn || divisor.pole_degree != n {
        return Err(Error::Domain("divisor and curve have different (N, n)".into()));
    }
    let xs = solve_all_xk(divisor, curve)?;
    let (lprime, sweep_residual) = recover_lprime(&xs, opts)?;
    let mut entries = columns_from_lprime(&lprime, &xs.s11);
    let (first, first_column_residual) = recover_first_column(curve, &entries, opts.curve_tol)?;
    for (r, p) in first.into_iter().enumerate() {
        entries[(r, 0)] = p;
    }
    let matrix = LaxMatrix::from_entries(nn, n, Shape::L, entries, Some(xs.s11))?;
    Ok(Reconstruction { matrix, rcond: xs.rcond, sweep_residual, first_column_residual })
}

/// `max |a - b| / max |a|` over the free coordinates.
pub fn coefficient_error<F: Field>(original: &LaxMatrix<F>, other: &LaxMatrix<F>) -> f64 {
    let a = original.coordinates();
    let b = other.coordinates();
    let scale = a.iter().map(Field::magnitude).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    a.iter().zip(&b).map(|(x, y)| (x.clone() - y.clone()).magnitude()).fold(0.0, f64::max) / scale
}

#[derive(Clone, Debug, Serialize)]
pub struct RoundTrip {
    pub error: f64,
    pub divisor: Divisor,
    pub reconstruction: Reconstruction,
}

/// Separate, reconstruct and compare.
pub fn roundtrip(l: &LaxMatrix<C>, seed: u64) -> Result<RoundTrip> {
    let curve = crate::lax::char_poly_t(l)?;
    let divisor = separate(l, seed)?;
    if divisor.len() != genus(l.order(), l.pole_degree())? {
        return Err(Error::DimensionMismatch { expected: genus(l.order(), l.pole_degree())?, got: divisor.len() });
    }
    let reconstruction = reconstruct(&divisor, &curve)?;
    let error = coefficient_error(l, &reconstruction.matrix);
    Ok(RoundTrip { error, divisor, reconstruction })
}

/// Residual growth when one divisor point is pushed off the curve.
#[derive(Clone, Debug, Serialize)]
pub struct Sensitivity {
    pub perturbation: f64,
    pub clean: f64,
    pub perturbed: f64,
}

/// Move `w` of the first point by `eps` and compare the combined sweep and
/// first-column residuals with and without the perturbation.
pub fn sensitivity(l: &LaxMatrix<C>, seed: u64, eps: f64) -> Result<Sensitivity> {
    let curve = crate::lax::char_poly_t(l)?;
    let divisor = separate(l, seed)?;
    let loose = ReconstructOptions { sweep_tol: f64::INFINITY, curve_tol: f64::INFINITY };
    let measure = |d: &Divisor| -> Result<f64> {
        let r = reconstruct_with(d, &curve, loose)?;
        Ok(r.sweep_residual.max(r.first_column_residual))
    };
    let clean = measure(&divisor)?;
    let mut moved = divisor.clone();
    moved.points[0].w += C::new(eps, 0.0);
    let perturbed = measure(&moved)?;
    Ok(Sensitivity { perturbation: eps, clean, perturbed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Rational;
    use crate::lax::{char_poly_t, gauge_fix_l, sample_m};

    fn exact_l(nn: usize, n: usize, seed: u64) -> LaxMatrix<Rational> {
        gauge_fix_l(&sample_m::<Rational>(nn, n, seed).unwrap()).unwrap()
    }

    fn float_l(nn: usize, n: usize, seed: u64) -> LaxMatrix<C> {
        gauge_fix_l(&sample_m::<C>(nn, n, seed).unwrap()).unwrap()
    }

    #[test]
    fn supports() {
        let s = xk_support(3, 2).unwrap();
        let want: Vec<_> = [(0, 0), (0, 1), (0, 2), (1, 0)].iter().map(|&(l, k)| DifferentialIndex { l, k }).collect();
        assert_eq!(s.entries, want);
        assert_eq!(s.exceptional, vec![DifferentialIndex { l: 0, k: 3 }, DifferentialIndex { l: 1, k: 1 }]);
        assert_eq!(xk_support(2, 2).unwrap().entries, vec![DifferentialIndex { l: 0, k: 0 }]);
        assert!(xk_support(3, 1).is_err());
    }

    #[test]
    fn forward_xk_have_the_stated_constants() {
        for (nn, n) in [(2, 2), (3, 2), (3, 3), (4, 2)] {
            let l = exact_l(nn, n, 6);
            let curve = char_poly_t(&l).unwrap();
            let support = xk_support(nn, n).unwrap();
            for k in 1..=nn {
                let x = xk_from_lax(&l, k).unwrap();
                for (a, b, c) in xk_constants(&curve, k).unwrap() {
                    assert_eq!(x.coeff(a, b), c, "({nn},{n}) X_{k} at w^{a} z^{b}");
                }
                // nothing outside support + constants
                for (a, b, c) in x.terms() {
                    let regular = support.entries.contains(&DifferentialIndex { l: a, k: b });
                    let fixed = support.exceptional.contains(&DifferentialIndex { l: a, k: b }) || (k == nn && a == nn - 1 && b == 0);
                    assert!(regular || fixed || Ring::is_zero(c), "({nn},{n}) X_{k} has w^{a} z^{b}");
                }
            }
        }
    }

    #[test]
    fn det_v() {
        let s11 = Rational::from_ratio(3, 7);
        for (nn, n) in [(3, 2), (4, 2), (3, 3)] {
            for k in 1..=nn {
                let d = v_matrix(nn, n, k, &s11).unwrap().det_laplace().unwrap();
                let want = if k < nn {
                    let sign = if nn % 2 == 0 { s11.clone() } else { -s11.clone() };
                    BiPoly::monomial(sign, k - 1, (nn - k) * n)
                } else {
                    BiPoly::monomial(Rational::from_i64(1), nn - 1, 0)
                };
                assert_eq!(d, want, "({nn},{n}) k={k}");
            }
        }
    }

    #[test]
    fn exact_sweep_recovers_every_column() {
        for (nn, n) in [(2, 2), (2, 3), (3, 2), (3, 3), (4, 2)] {
            let l = exact_l(nn, n, 13);
            let xs = all_xk_from_lax(&l).unwrap();
            let (lprime, res) = recover_lprime(&xs, ReconstructOptions::default()).unwrap();
            assert_eq!(res, 0.0);
            let mut cols = columns_from_lprime(&lprime, l.s11().unwrap());
            for r in 0..nn {
                for c in 1..nn {
                    assert_eq!(cols[(r, c)], *l.entry(r, c), "({nn},{n}) entry ({r},{c})");
                }
            }
            let curve = char_poly_t(&l).unwrap();
            let (first, _) = recover_first_column(&curve, &cols, 0.0).unwrap();
            for (r, p) in first.into_iter().enumerate() {
                assert_eq!(p, *l.entry(r, 0));
                cols[(r, 0)] = p;
            }
        }
    }

    #[test]
    fn corrupted_cofactor_is_inconsistent() {
        let l = exact_l(3, 2, 2);
        let curve = char_poly_t(&l).unwrap();
        let mut partial = l.entries().clone();
        partial[(1, 2)] = partial[(1, 2)].clone() + Poly::constant(Rational::from_i64(1));
        assert!(matches!(recover_first_column(&curve, &partial, 0.0), Err(Error::InconsistentCurve { .. })));
    }

    #[test]
    fn float_roundtrips() {
        for (nn, n, tol) in [(2, 2, 1e-8), (2, 3, 1e-7), (3, 2, 1e-6), (3, 3, 1e-6)] {
            let l = float_l(nn, n, 17);
            let rt = roundtrip(&l, 3).unwrap();
            assert!(rt.error <= tol, "({nn},{n}) {}", rt.error);
        }
    }

    #[test]
    fn off_curve_point_is_detected() {
        let l = float_l(3, 2, 17);
        let s = sensitivity(&l, 3, 1e-3).unwrap();
        assert!(s.perturbed >= 1e3 * s.clean.max(1e-16), "{s:?}");
    }

    #[test]
    fn independent_of_xi_and_point_order() {
        let l = float_l(3, 2, 21);
        let curve = char_poly_t(&l).unwrap();
        let a = reconstruct(&separate(&l, 1).unwrap(), &curve).unwrap().matrix;
        let d = separate(&l, 99).unwrap();
        let b = reconstruct(&d, &curve).unwrap().matrix;
        let c = reconstruct(&d.shuffled(5), &curve).unwrap().matrix;
        assert!(coefficient_error(&a, &b) <= 1e-8);
        assert!(coefficient_error(&a, &c) <= 1e-8);
    }
}
