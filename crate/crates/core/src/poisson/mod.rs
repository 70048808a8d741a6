//! The linear r-matrix bracket on the coefficients of `m(z)`.
//!
//! The bracket is
//!
//! ```text
//! {m(z1) (x) m(z2)} = [r(z1, z2), m(z1) (x) 1 + 1 (x) m(z2)]
//! r(z1, z2) = (1/2 (z1 + z2) t00 + z1 t-+ + z2 t+-) / (z1 - z2)
//! ```
//!
//! Expanding the commutator with one basis coefficient switched on at a time
//! gives the structure constants `{x_u, x_v} = sum_w c_uv^w x_w` exactly.

mod checks;
mod derivations;
mod rhat;

use std::collections::BTreeMap;

pub use checks::{invariant_checks, jacobi_failures, jacobi_triples, random_triples, t_labels, InvariantReport, TLabel};
pub use derivations::{apply_d, d_degree, grade_of, m_grade, symbolic_char_poly, t_coefficient_grade};
pub use rhat::{check_rhat_identity, l_gradients, rhat, rhat_bracket, rhat_step_sweep, RhatForm, RhatReport};

use crate::algebra::{BiPoly, Field, LinearFactor, Mat, Rational, Ring};
use crate::curve::check_orders;
use crate::lax::{free_exponents, m_flat_index, slots, CoefficientIndex, LaxMatrix, Shape};
use crate::error::{Error, Result};

/// A linear form `sum c_w x_w` over the m-coordinates.
pub type LinearForm = Vec<(usize, Rational)>;

#[derive(Clone, Debug)]
pub struct PoissonStructure {
    order: usize,
    pole_degree: usize,
    /// `(u, v) -> {x_u, x_v}`; absent pairs bracket to zero.
    table: BTreeMap<(usize, usize), LinearForm>,
}

/// Coefficient of `E_ab (x) E_ba` in the numerator of the r-matrix.
fn r_weight(a: usize, b: usize) -> BiPoly<Rational> {
    let half = Rational::from_ratio(1, 2);
    match a.cmp(&b) {
        std::cmp::Ordering::Equal => BiPoly::monomial(half.clone(), 1, 0) + BiPoly::monomial(half, 0, 1),
        std::cmp::Ordering::Greater => BiPoly::monomial(Rational::one(), 1, 0),
        std::cmp::Ordering::Less => BiPoly::monomial(Rational::one(), 0, 1),
    }
}

/// Numerator of `[r, m(z1) (x) 1 + 1 (x) m(z2)]` for `m = z^e E_pq`, keyed
/// by the tensor component `(i, j, k, l)` of `E_ij (x) E_kl`.
pub fn commutator_numerator(
    order: usize,
    p: usize,
    q: usize,
    e: usize,
) -> BTreeMap<(usize, usize, usize, usize), BiPoly<Rational>> {
    let one = Rational::one();
    let z1e = BiPoly::monomial(one.clone(), e, 0);
    let z2e = BiPoly::monomial(one, 0, e);
    let mut out: BTreeMap<(usize, usize, usize, usize), BiPoly<Rational>> = BTreeMap::new();
    let mut add = |key, val: BiPoly<Rational>| {
        let slot = out.entry(key).or_insert_with(BiPoly::zero);
        *slot = slot.clone() + val;
    };
    for a in 0..order {
        // r (m (x) 1) - (1 (x) m) r
        add((a, q, p, a), r_weight(a, p) * z1e.clone() - r_weight(a, q) * z2e.clone());
        // r (1 (x) m) - (m (x) 1) r
        add((p, a, a, q), r_weight(p, a) * z2e.clone() - r_weight(q, a) * z1e.clone());
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// Compile the structure constants for order `N` and degree parameter `n`.
pub fn structure_constants(order: usize, pole_degree: usize) -> Result<PoissonStructure> {
    check_orders(order, pole_degree)?;
    let (nn, n) = (order, pole_degree);
    let mut table: BTreeMap<(usize, usize), BTreeMap<usize, Rational>> = BTreeMap::new();
    for basis in slots(Shape::M, nn, n) {
        let e = basis.exponent(Shape::M, nn, n);
        let w = m_flat_index(nn, n, &basis);
        for ((i, j, k, l), num) in commutator_numerator(nn, basis.row, basis.col, e) {
            let quot = num.div_linear(LinearFactor::UMinusV)?;
            for (a, b, c) in quot.terms() {
                let left = slot_index(nn, n, i, j, a)?;
                let right = slot_index(nn, n, k, l, b)?;
                let form = table.entry((left, right)).or_default();
                let acc = form.remove(&w).unwrap_or_else(Rational::zero) + c.clone();
                if !Ring::is_zero(&acc) {
                    form.insert(w, acc);
                }
            }
        }
    }
    let table = table
        .into_iter()
        .filter(|(_, f)| !f.is_empty())
        .map(|(key, f)| (key, f.into_iter().collect()))
        .collect();
    Ok(PoissonStructure { order, pole_degree, table })
}

fn slot_index(order: usize, pole_degree: usize, row: usize, col: usize, exponent: usize) -> Result<usize> {
    if !free_exponents(Shape::M, order, pole_degree, row, col).contains(&exponent) {
        return Err(Error::ShapeMismatch(format!(
            "bracket produced z^{exponent} in entry ({}, {})",
            row + 1,
            col + 1
        )));
    }
    let idx = CoefficientIndex::from_exponent(Shape::M, order, pole_degree, row, col, exponent)
        .expect("free exponent has a slot");
    Ok(m_flat_index(order, pole_degree, &idx))
}

/// Value and partial derivatives of a function of the m-coordinates at a
/// base point.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradient<F> {
    pub point: Vec<F>,
    pub value: F,
    pub partials: Vec<F>,
}

impl PoissonStructure {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn pole_degree(&self) -> usize {
        self.pole_degree
    }

    /// Number of m-coordinates, `nN^2`.
    pub fn dim(&self) -> usize {
        self.order * self.order * self.pole_degree
    }

    /// `{x_u, x_v}` as a linear form (empty when zero).
    pub fn bracket(&self, u: usize, v: usize) -> &[(usize, Rational)] {
        self.table.get(&(u, v)).map_or(&[], Vec::as_slice)
    }

    pub fn nonzero_pairs(&self) -> impl Iterator<Item = (&(usize, usize), &LinearForm)> {
        self.table.iter()
    }

    /// The bracket tensor `Pi_uv(x)` at a point.
    pub fn tensor_at<F: Field>(&self, x: &[F]) -> Result<Mat<F>> {
        let d = self.dim();
        if x.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: x.len() });
        }
        let mut pi = Mat::zeros(d, d);
        for (&(u, v), form) in &self.table {
            pi[(u, v)] = eval_form(form, x);
        }
        Ok(pi)
    }

    /// Exact antisymmetry of the table.
    pub fn is_antisymmetric(&self) -> bool {
        self.table.iter().all(|(&(u, v), form)| {
            let back = self.bracket(v, u);
            form.len() == back.len() && form.iter().zip(back).all(|((w1, c1), (w2, c2))| w1 == w2 && *c1 == -c2.clone())
        })
    }

    /// `{x_u, {x_v, x_w}} + cyclic` as a linear form; zero for a Poisson
    /// structure.
    pub fn jacobiator(&self, u: usize, v: usize, w: usize) -> LinearForm {
        let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
        for (a, b, c) in [(u, v, w), (v, w, u), (w, u, v)] {
            for (t, coef) in self.bracket(b, c) {
                for (s, coef2) in self.bracket(a, *t) {
                    let entry = acc.entry(*s).or_insert_with(Rational::zero);
                    *entry = entry.clone() + coef.clone() * coef2.clone();
                }
            }
        }
        acc.into_iter().filter(|(_, c)| !Ring::is_zero(c)).collect()
    }

    /// `sum_{u,v} df/dx_u Pi_uv dg/dx_v`.
    pub fn bracket_eval<F: Field>(&self, f: &Gradient<F>, g: &Gradient<F>) -> Result<F> {
        let d = self.dim();
        for grad in [f, g] {
            if grad.partials.len() != d || grad.point.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: grad.partials.len() });
            }
        }
        if f.point != g.point {
            return Err(Error::Domain("gradients taken at different base points".into()));
        }
        Ok(self.contract(&f.point, &f.partials, &g.partials))
    }

    /// Bracket of two gradient vectors at `x`, skipping zero partials.
    pub fn contract<F: Field>(&self, x: &[F], df: &[F], dg: &[F]) -> F {
        let mut acc = F::zero();
        for (&(u, v), form) in &self.table {
            if df[u].is_zero() || dg[v].is_zero() {
                continue;
            }
            acc = acc + df[u].clone() * eval_form(form, x) * dg[v].clone();
        }
        acc
    }
}

impl PoissonStructure {
    /// `sum |df_u| |Pi_uv| |dg_v|`, the scale against which cancellation in
    /// [`PoissonStructure::contract`] is measured.
    pub fn contract_magnitude<F: Field>(&self, x: &[F], df: &[F], dg: &[F]) -> f64 {
        let mut acc = 0.0;
        for (&(u, v), form) in &self.table {
            if df[u].is_zero() || dg[v].is_zero() {
                continue;
            }
            acc += df[u].magnitude() * eval_form(form, x).magnitude() * dg[v].magnitude();
        }
        acc
    }
}

pub(crate) fn eval_form<F: Field>(form: &[(usize, Rational)], x: &[F]) -> F {
    form.iter().fold(F::zero(), |acc, (w, c)| acc + F::from_rational(c) * x[*w].clone())
}

/// Gradients of every characteristic-polynomial coefficient at `m`,
/// `out[k - 1][p]` for the coefficient of `z^p` in `t_k`.
///
/// The derivative of `det(m + w)` with respect to entry `(i, j)` is its
/// cofactor, so every partial is read off a cofactor of `m(z) + w`.
pub fn t_gradients<F: Field>(m: &LaxMatrix<F>) -> Result<Vec<Vec<Gradient<F>>>> {
    if m.shape() != Shape::M {
        return Err(Error::Domain("t-gradients are taken with respect to m-coordinates".into()));
    }
    let (nn, n) = (m.order(), m.pole_degree());
    let point = m.coordinates();
    let a: Mat<BiPoly<F>> = Mat::from_fn(nn, nn, |r, c| {
        let mut p = BiPoly::from_v(m.entry(r, c));
        if r == c {
            p = p + BiPoly::monomial(F::one(), 1, 0);
        }
        p
    });
    let det = a.det_laplace()?;
    let cof = a.cofactors()?;
    let list = slots(Shape::M, nn, n);
    let mut out = Vec::with_capacity(nn);
    for k in 1..=nn {
        let wp = nn - k;
        let mut row = Vec::with_capacity(k * n);
        for p in 0..k * n {
            let partials = list
                .iter()
                .map(|idx| {
                    let e = idx.exponent(Shape::M, nn, n);
                    if p < e {
                        F::zero()
                    } else {
                        cof[(idx.row, idx.col)].coeff(wp, p - e)
                    }
                })
                .collect();
            row.push(Gradient { point: point.clone(), value: det.coeff(wp, p), partials });
        }
        out.push(row);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lax::sample_m;

    #[test]
    fn numerator_vanishes_on_diagonal() {
        for (p, q) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            for (_, num) in commutator_numerator(2, p, q, 1) {
                assert!(num.diagonal().is_zero());
            }
        }
    }

    #[test]
    fn small_tables_are_antisymmetric() {
        for (nn, n) in [(2, 1), (2, 2), (3, 1)] {
            let p = structure_constants(nn, n).unwrap();
            assert!(p.is_antisymmetric());
            assert!(p.nonzero_pairs().count() > 0);
        }
    }

    #[test]
    fn first_row_commutes() {
        let (nn, n) = (3, 2);
        let p = structure_constants(nn, n).unwrap();
        for j in 1..nn {
            for k in 1..nn {
                for a in 0..n {
                    for b in 0..n {
                        let u = m_flat_index(nn, n, &CoefficientIndex { row: 0, col: j, slot: a });
                        let v = m_flat_index(nn, n, &CoefficientIndex { row: 0, col: k, slot: b });
                        assert!(p.bracket(u, v).is_empty());
                    }
                }
            }
        }
    }

    #[test]
    fn self_bracket_vanishes() {
        let p = structure_constants(2, 2).unwrap();
        let m = sample_m::<Rational>(2, 2, 3).unwrap();
        let grads = t_gradients(&m).unwrap();
        let g = &grads[1][2];
        assert!(Ring::is_zero(&p.bracket_eval(g, g).unwrap()));
    }

    #[test]
    fn t_gradient_matches_difference_quotient() {
        // t is polynomial, so an exact forward difference of a linear
        // perturbation recovers the directional derivative plus higher terms;
        // compare over a step small enough in rationals by extrapolation.
        let m = sample_m::<Rational>(2, 2, 8).unwrap();
        let grads = t_gradients(&m).unwrap();
        let x = m.coordinates();
        let u = 3;
        let val = |h: Rational| {
            let mut y = x.clone();
            y[u] = y[u].clone() + h;
            let mm = LaxMatrix::from_coordinates(2, 2, Shape::M, &y, None).unwrap();
            crate::lax::char_poly_t(&mm).unwrap().t(2).coeff(2)
        };
        // t_2 is quadratic in x, so the central difference is exact
        let h = Rational::from_ratio(1, 7);
        let central = (val(h.clone()) - val(-h.clone())) / (h * Rational::from_i64(2));
        assert_eq!(central, grads[1][2].partials[u]);
    }
}
