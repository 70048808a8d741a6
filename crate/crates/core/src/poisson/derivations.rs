//! Gradings and the vector fields `D_ik x = {t_{N-k+1}^{(z^i)}, x}` acting on
//! polynomials in the m-coordinates.

use crate::algebra::{MPoly, Mat, Monomial, Poly, Rational, Ring};
use crate::lax::{char_poly_coefficients, entry_degree, grade, slots, CoefficientIndex, Shape};
use crate::error::{Error, Result};

use super::PoissonStructure;

/// Grade of a coefficient slot: the coefficient of `z^e` in entry `(i, j)`
/// has grade `N(n - e) + i - j - 1` (1-based `i, j`).
pub fn grade_of(idx: &CoefficientIndex, shape: Shape, order: usize, pole_degree: usize) -> Result<i64> {
    if !slots(shape, order, pole_degree).contains(idx) {
        let deg = entry_degree(shape, order, pole_degree, idx.row.min(order - 1), idx.col.min(order - 1));
        // fixed constants of the l-shape are graded too, with grade 0
        let fixed = shape == Shape::L
            && idx.slot == 0
            && idx.row < order
            && idx.col < order
            && ((idx.row == idx.col + 1) || (idx.row == 0 && idx.col + 1 == order));
        if !fixed {
            return Err(Error::IndexOutOfRange(format!("{idx:?} is not a slot of the {shape:?}-shape")));
        }
        return Ok(grade(order, pole_degree, idx.row, idx.col, deg as usize));
    }
    let e = idx.exponent(shape, order, pole_degree);
    Ok(grade(order, pole_degree, idx.row, idx.col, e))
}

/// Grades of the m-coordinates in flat order.
pub fn m_grade(order: usize, pole_degree: usize) -> Vec<i64> {
    slots(Shape::M, order, pole_degree)
        .iter()
        .map(|idx| grade(order, pole_degree, idx.row, idx.col, idx.exponent(Shape::M, order, pole_degree)))
        .collect()
}

/// Grade of the coefficient of `z^p` in `t_k`: `k(Nn - 1) - Np`.
pub fn t_coefficient_grade(order: usize, pole_degree: usize, k: usize, p: usize) -> i64 {
    let (nn, n) = (order as i64, pole_degree as i64);
    k as i64 * (nn * n - 1) - nn * p as i64
}

/// `deg D_ik = (Nn - 1)(N - k) - Ni`.
pub fn d_degree(order: usize, pole_degree: usize, i: usize, k: usize) -> i64 {
    let (nn, n) = (order as i64, pole_degree as i64);
    (nn * n - 1) * (nn - k as i64) - nn * i as i64
}

/// `t_1 .. t_N` with the m-coordinates as indeterminates.
pub fn symbolic_char_poly(order: usize, pole_degree: usize) -> Vec<Poly<MPoly<Rational>>> {
    let list = slots(Shape::M, order, pole_degree);
    let mut grid: Vec<Vec<Vec<MPoly<Rational>>>> = vec![vec![Vec::new(); order]; order];
    for (w, idx) in list.iter().enumerate() {
        let e = idx.exponent(Shape::M, order, pole_degree);
        let cell = &mut grid[idx.row][idx.col];
        if cell.len() <= e {
            cell.resize(e + 1, MPoly::zero());
        }
        cell[e] = MPoly::var(w);
    }
    let m = Mat::from_fn(order, order, |r, c| Poly::new(std::mem::take(&mut grid[r][c])));
    char_poly_coefficients(&m)
}

impl PoissonStructure {
    /// `{x_u, x_v}` as a polynomial.
    pub fn bracket_poly(&self, u: usize, v: usize) -> MPoly<Rational> {
        self.bracket(u, v)
            .iter()
            .fold(MPoly::zero(), |acc, (w, c)| acc + MPoly::term(c.clone(), Monomial::var(*w)))
    }

    /// `{f, g}` for polynomial functions of the m-coordinates.
    pub fn bracket_polys(&self, f: &MPoly<Rational>, g: &MPoly<Rational>) -> MPoly<Rational> {
        let d = self.dim();
        let df: Vec<MPoly<Rational>> = (0..d).map(|u| f.derivative(u)).collect();
        let dg: Vec<MPoly<Rational>> = (0..d).map(|v| g.derivative(v)).collect();
        let mut acc = MPoly::zero();
        for (&(u, v), _) in self.nonzero_pairs() {
            if df[u].is_zero() || dg[v].is_zero() {
                continue;
            }
            acc = acc + df[u].clone() * self.bracket_poly(u, v) * dg[v].clone();
        }
        acc
    }
}

/// Apply `D_ik`, the Hamiltonian vector field of the coefficient of `z^i`
/// in `t_{N-k+1}`, to `f`. Requires `1 <= k <= N - 1` and `1 <= i <= nk - 1`.
pub fn apply_d(p: &PoissonStructure, i: usize, k: usize, f: &MPoly<Rational>) -> Result<MPoly<Rational>> {
    let hamiltonian = d_hamiltonian(p, i, k)?;
    Ok(p.bracket_polys(&hamiltonian, f))
}

/// The generating coefficient `t_{N-k+1}^{((N-k+1)n - i - 1)}`.
pub fn d_hamiltonian(p: &PoissonStructure, i: usize, k: usize) -> Result<MPoly<Rational>> {
    let (nn, n) = (p.order(), p.pole_degree());
    if k < 1 || k > nn - 1 || i < 1 || i + 1 > n * k {
        return Err(Error::IndexOutOfRange(format!("D_({i},{k}) with N = {nn}, n = {n}")));
    }
    let kk = nn - k + 1;
    if i + 1 > kk * n {
        return Err(Error::IndexOutOfRange(format!(
            "slot (N-k+1)n - i - 1 of t_{kk} is negative for D_({i},{k})"
        )));
    }
    let t = symbolic_char_poly(nn, n);
    Ok(t[kk - 1].coeff(i))
}
