//! Graded characters of the coefficient rings and the q-Euler characteristic.
//!
//! Everything is built from generator-degree multisets. The compact product
//! formulas are evaluated separately in [`closed_forms`] and compared
//! against the multiset construction, which is treated as authoritative.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::algebra::{series_expand, GradedCharacter, MPoly, Mat, Monomial, Poly, Rational, Ring};
use crate::curve::{check_orders, genus};
use crate::error::{Error, Result};
use crate::lax::{char_poly_coefficients, entry_degree, grade, slots, Shape};

/// Order of the series comparisons in [`closed_forms`].
pub const SERIES_ORDER: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RingId {
    /// Free ring on the coefficients of the gauge-fixed matrix.
    A,
    /// Free ring on the coefficients of the `t_k`.
    F,
    /// Free ring on the vector fields `D_ik`.
    D,
}

fn positive(ring: RingId, order: usize, pole_degree: usize, degrees: Vec<i64>) -> Result<Vec<u32>> {
    degrees
        .into_iter()
        .map(|d| {
            u32::try_from(d)
                .ok()
                .filter(|&d| d > 0)
                .ok_or_else(|| Error::Domain(format!("{ring:?}({order},{pole_degree}) has a generator of degree {d}")))
        })
        .collect()
}

/// Degrees of the free generators of `ring`.
pub fn generator_degrees(ring: RingId, order: usize, pole_degree: usize) -> Result<Vec<u32>> {
    check_orders(order, pole_degree)?;
    let (nn, n) = (order as i64, pole_degree as i64);
    let raw: Vec<i64> = match ring {
        RingId::A => slots(Shape::L, order, pole_degree)
            .iter()
            .map(|idx| grade(order, pole_degree, idx.row, idx.col, idx.exponent(Shape::L, order, pole_degree)))
            .collect(),
        RingId::F => (1..=nn)
            .flat_map(|k| (1..=n * k).filter(move |&i| !(k == nn && i == 1)).map(move |i| nn * i - k))
            .collect(),
        RingId::D => (1..nn).flat_map(|k| (1..n * k).map(move |i| nn * i - k)).collect(),
    };
    positive(ring, order, pole_degree, raw)
}

pub fn character(ring: RingId, order: usize, pole_degree: usize) -> Result<GradedCharacter> {
    Ok(GradedCharacter::free_ring(&generator_degrees(ring, order, pole_degree)?))
}

/// `sum deg D_ik` with `deg D_ik = (Nn - 1)(N - k) - Ni`, over the same
/// index set as the generators of `D`.
pub fn d_degree_sum(order: usize, pole_degree: usize) -> i64 {
    let (nn, n) = (order as i64, pole_degree as i64);
    (1..nn).flat_map(|k| (1..n * k).map(move |i| (nn * n - 1) * (nn - k) - nn * i)).sum()
}

/// `chi_q` before cancellation: numerator `F u D`, denominator `A`.
pub fn q_euler_uncancelled(order: usize, pole_degree: usize) -> Result<GradedCharacter> {
    if pole_degree < 2 {
        return Err(Error::Domain("q_euler needs n >= 2".into()));
    }
    let g = genus(order, pole_degree)?;
    let mut num = generator_degrees(RingId::F, order, pole_degree)?;
    num.extend(generator_degrees(RingId::D, order, pole_degree)?);
    let den = generator_degrees(RingId::A, order, pole_degree)?;
    Ok(GradedCharacter {
        sign: if g % 2 == 0 { 1 } else { -1 },
        q_power: -d_degree_sum(order, pole_degree),
        num,
        den,
    })
}

pub fn q_euler(order: usize, pole_degree: usize) -> Result<GradedCharacter> {
    Ok(q_euler_uncancelled(order, pole_degree)?.canonical())
}

/// `q -> 1` limit: each `[a] / [b]` tends to `a / b`.
pub fn euler_limit(chi: &GradedCharacter) -> Result<Rational> {
    let chi = chi.clone().canonical();
    if !chi.is_balanced() {
        return Err(Error::UnbalancedCharacter { num: chi.num.len(), den: chi.den.len() });
    }
    let prod = |v: &[u32]| v.iter().fold(BigInt::from(1), |acc, &a| acc * BigInt::from(a));
    Ok(Rational::new(BigInt::from(chi.sign) * prod(&chi.num), prod(&chi.den)))
}

pub fn euler_characteristic(order: usize, pole_degree: usize) -> Result<Rational> {
    euler_limit(&q_euler(order, pole_degree)?)
}

/// First-order coefficient `c` in `chi_q(1 - eps) = chi (1 + c eps + O(eps^2))`,
/// from `[a] = a eps (1 - (a - 1) eps / 2 + ...)` and `q^p = 1 - p eps + ...`.
pub fn near_one_drift(chi: &GradedCharacter) -> f64 {
    let half = |v: &[u32]| v.iter().map(|&a| (a as f64 - 1.0) / 2.0).sum::<f64>();
    -(chi.q_power as f64) - half(&chi.num) + half(&chi.den)
}

/// Monomial counts per grade `0..=order` of the free commutative ring on
/// generators of the given degrees.
pub fn char_series_oracle(degrees: &[u32], order: usize) -> Result<Vec<BigInt>> {
    if order > 64 {
        return Err(Error::Domain(format!("series order {order} exceeds 64")));
    }
    let mut counts = vec![BigInt::from(0); order + 1];
    counts[0] = BigInt::from(1);
    for &d in degrees {
        let d = d as usize;
        for g in d..=order {
            let prev = counts[g - d].clone();
            counts[g] += prev;
        }
    }
    Ok(counts)
}

#[derive(Clone, Debug, Serialize)]
pub struct RatioReport {
    pub order: usize,
    pub pole_degree: usize,
    /// `chi(N, n + 1) / chi(N, n)`.
    #[serde(serialize_with = "crate::cli::json::ser_rational")]
    pub ratio: Rational,
    /// The product formula for the same ratio.
    #[serde(serialize_with = "crate::cli::json::ser_rational")]
    pub product: Rational,
    pub agrees: bool,
    /// Whether the product agrees once the sign `(-1)^{g(n+1) - g(n)}` is
    /// applied.
    pub agrees_up_to_sign: bool,
}

/// The closed product for `chi_{n+1} / chi_n`.
pub fn ratio_product(order: usize, pole_degree: usize) -> Rational {
    let (nn, n) = (order as i64, pole_degree as i64);
    let mut r = Rational::from_i64(1);
    for k in 1..=nn {
        for i in 1..=nn {
            r /= Rational::from_i64(n * nn + k - 2 + i);
        }
    }
    for k in 1..nn {
        for i in 1..=k {
            r *= Rational::from_i64((n * k + i - 1) * nn - k);
        }
    }
    for k in 1..=nn {
        for i in 1..=k {
            r *= Rational::from_i64((n * k + i) * nn - k);
        }
    }
    r
}

pub fn euler_ratio(order: usize, pole_degree: usize) -> Result<RatioReport> {
    let lo = euler_characteristic(order, pole_degree)?;
    if Ring::is_zero(&lo) {
        return Err(Error::DivisionByZeroChi);
    }
    let hi = euler_characteristic(order, pole_degree + 1)?;
    let ratio = hi / lo;
    let product = ratio_product(order, pole_degree);
    let flip = (genus(order, pole_degree + 1)? - genus(order, pole_degree)?) % 2 == 1;
    let signed = if flip { -product.clone() } else { product.clone() };
    Ok(RatioReport {
        order,
        pole_degree,
        agrees: ratio == product,
        agrees_up_to_sign: ratio == signed,
        ratio,
        product,
    })
}

/// `|chi(N, n)|` against `2^g`.
#[derive(Clone, Debug, Serialize)]
pub struct GrowthRow {
    pub order: usize,
    pub pole_degree: usize,
    pub genus: usize,
    #[serde(serialize_with = "crate::cli::json::ser_rational")]
    pub chi: Rational,
    pub log_abs_chi: f64,
    pub g_log2: f64,
    pub exceeds: bool,
}

pub fn growth_row(order: usize, pole_degree: usize) -> Result<GrowthRow> {
    let chi = euler_characteristic(order, pole_degree)?;
    let g = genus(order, pole_degree)?;
    let abs = chi.numer().abs() / chi.denom();
    let exceeds = abs > BigInt::from(2).pow(g as u32);
    let log_abs_chi = big_ln(&abs);
    Ok(GrowthRow { order, pole_degree, genus: g, chi, log_abs_chi, g_log2: g as f64 * std::f64::consts::LN_2, exceeds })
}

fn big_ln(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 900;
    (x >> shift).to_f64().unwrap_or(f64::INFINITY).ln() + shift as f64 * std::f64::consts::LN_2
}

/// `[1][2]...[k]` as a multiset.
fn qfactorial(k: i64) -> Vec<u32> {
    (1..=k.max(0) as u32).collect()
}

/// The nested product for `ch A` with the inner bound of the diagonal
/// factor read as `n`.
pub fn ch_a_nested_product(order: usize, pole_degree: usize) -> GradedCharacter {
    let (nn, n) = (order as i64, pole_degree as i64);
    let mut den = Vec::new();
    for j in 1..nn {
        for alpha in 1..n {
            den.push(nn * alpha + nn - j);
        }
    }
    for alpha in 1..n {
        den.push(nn * alpha);
    }
    for i in 1..nn {
        for j in (1..=nn).filter(|&j| j != i) {
            for alpha in 1..=n {
                den.push(nn * alpha + i - j);
            }
        }
        for alpha in 1..=n {
            den.push(nn * alpha);
        }
    }
    GradedCharacter { sign: 1, q_power: 0, num: vec![], den: den.into_iter().map(|d| d as u32).collect() }.canonical()
}

/// `prod_{i=1}^N [i-1]! / [Nn+i-2]!`.
pub fn ch_a_compact_product(order: usize, pole_degree: usize) -> GradedCharacter {
    let (nn, n) = (order as i64, pole_degree as i64);
    let mut num = Vec::new();
    let mut den = Vec::new();
    for i in 1..=nn {
        num.extend(qfactorial(i - 1));
        den.extend(qfactorial(nn * n + i - 2));
    }
    GradedCharacter { sign: 1, q_power: 0, num, den }.canonical()
}

/// The product form of `chi_q`, uncancelled.
pub fn q_euler_product(order: usize, pole_degree: usize) -> Result<GradedCharacter> {
    let g = genus(order, pole_degree)?;
    let (nn, n) = (order as i64, pole_degree as i64);
    let mut num = Vec::new();
    let mut den = Vec::new();
    for k in 1..=nn {
        num.extend(qfactorial(k - 1));
        den.extend(qfactorial(nn * n + k - 2));
    }
    for k in 1..nn {
        num.push(((nn * n - 1) * k) as u32);
        for i in 1..n * k {
            num.push((nn * i - k) as u32);
            num.push((nn * i - k) as u32);
        }
    }
    for i in 1..nn * n {
        num.push((nn * i) as u32);
    }
    Ok(GradedCharacter { sign: if g % 2 == 0 { 1 } else { -1 }, q_power: -d_degree_sum(order, pole_degree), num, den })
}

/// The closed form of the `q -> 1` limit.
pub fn closed_form_euler(order: usize, pole_degree: usize) -> Result<Rational> {
    let g = genus(order, pole_degree)?;
    let (nn, n) = (order as i64, pole_degree as i64);
    let int = |v: i64| Rational::from_i64(v);
    let fact = |k: i64| (1..=k).fold(Rational::from_i64(1), |acc, i| acc * int(i));
    let mut r = Ring::pow(&int(nn * n - 1), (nn - 1) as usize) * Ring::pow(&int(nn), (nn * n - 1) as usize);
    for k in 1..=nn {
        r = r * fact(k - 1) / fact(nn * n + k - 2);
    }
    for k in 1..nn {
        let mut inner = int(k);
        for i in 1..n * k {
            inner *= Ring::pow(&int(nn * i - k), 2);
        }
        r *= inner;
    }
    r *= fact(nn * n - 1);
    Ok(if g % 2 == 0 { r } else { -r })
}

#[derive(Clone, Debug, Serialize)]
pub struct SeriesComparison {
    pub agrees: bool,
    /// First grade at which the two series differ.
    pub first_mismatch: Option<usize>,
}

fn compare_series(a: &GradedCharacter, b: &GradedCharacter, order: usize) -> SeriesComparison {
    let (sa, sb) = (series_expand(a, order), series_expand(b, order));
    let first_mismatch = if a.q_power != b.q_power { Some(0) } else { (0..=order).find(|&i| sa[i] != sb[i]) };
    SeriesComparison { agrees: first_mismatch.is_none(), first_mismatch }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosedFormReport {
    pub order: usize,
    pub pole_degree: usize,
    pub intermediate_ch_a: SeriesComparison,
    pub compact_ch_a: SeriesComparison,
    /// Factor counts of the product form of `chi_q` before cancellation.
    pub q_euler_counts: (usize, usize),
    /// Count the product form is claimed to have on each side.
    pub q_euler_claimed_count: usize,
    pub q_euler_agrees: bool,
    #[serde(serialize_with = "crate::cli::json::ser_rational")]
    pub euler_closed_form: Rational,
    #[serde(serialize_with = "crate::cli::json::ser_rational")]
    pub euler_first_principles: Rational,
    pub euler_agrees: bool,
}

/// Evaluate the compact formulas and compare them with the multiset
/// construction. Diagnostic only: disagreements are reported, not raised.
pub fn closed_forms(order: usize, pole_degree: usize) -> Result<ClosedFormReport> {
    let ch_a = character(RingId::A, order, pole_degree)?;
    let product_q = q_euler_product(order, pole_degree)?;
    let q_euler_counts = (product_q.num.len(), product_q.den.len());
    let first = q_euler(order, pole_degree)?;
    let (nn, n) = (order, pole_degree);
    let euler_first_principles = euler_limit(&first)?;
    let euler_closed_form = closed_form_euler(order, pole_degree)?;
    Ok(ClosedFormReport {
        order,
        pole_degree,
        intermediate_ch_a: compare_series(&ch_a_nested_product(order, pole_degree), &ch_a, SERIES_ORDER),
        compact_ch_a: compare_series(&ch_a_compact_product(order, pole_degree), &ch_a, SERIES_ORDER),
        q_euler_counts,
        q_euler_claimed_count: nn * (nn * n - 1) + nn * (nn - 1) / 2,
        q_euler_agrees: product_q.canonical() == first,
        euler_agrees: euler_closed_form == euler_first_principles,
        euler_closed_form,
        euler_first_principles,
    })
}

/// Graded dimensions of `A / (F^x A)` in grades `0..=max_grade`, by exact
/// linear algebra on each graded piece. `s11` is fixed to 1.
pub fn quotient_dimensions(order: usize, pole_degree: usize, max_grade: usize) -> Result<Vec<usize>> {
    let list = slots(Shape::L, order, pole_degree);
    let weights = generator_degrees(RingId::A, order, pole_degree)?;
    let one = MPoly::constant(Rational::from_i64(1));
    let mut grid: Vec<Vec<Vec<MPoly<Rational>>>> = (0..order)
        .map(|r| {
            (0..order)
                .map(|c| {
                    let deg = entry_degree(Shape::L, order, pole_degree, r, c);
                    vec![MPoly::zero(); (deg + 1).max(0) as usize]
                })
                .collect()
        })
        .collect();
    for (v, idx) in list.iter().enumerate() {
        grid[idx.row][idx.col][idx.exponent(Shape::L, order, pole_degree)] = MPoly::var(v);
    }
    grid[0][order - 1][pole_degree - 1] = one.clone();
    for r in 1..order {
        grid[r][r - 1][pole_degree] = one.clone();
    }
    let m = Mat::from_fn(order, order, |r, c| Poly::new(std::mem::take(&mut grid[r][c])));
    let t = char_poly_coefficients(&m);
    let weight = |v: usize| weights[v] as i64;
    // generators of the ideal: every non-constant t coefficient
    let mut gens: Vec<(usize, MPoly<Rational>)> = Vec::new();
    for tk in &t {
        for c in tk.coeffs() {
            let degs = c.weighted_degrees(weight);
            if c.is_zero() || degs.iter().all(|&d| d == 0) {
                continue;
            }
            if !c.is_homogeneous(weight) {
                return Err(Error::Domain("t coefficient is not homogeneous".into()));
            }
            gens.push((degs[0] as usize, c.clone()));
        }
    }
    let pieces = monomials_by_grade(&weights, max_grade);
    let mut out = Vec::with_capacity(max_grade + 1);
    for d in 0..=max_grade {
        let basis: HashMap<&Monomial, usize> = pieces[d].iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut rows: Vec<Vec<Rational>> = Vec::new();
        for (gd, f) in &gens {
            if *gd > d {
                continue;
            }
            for mono in &pieces[d - gd] {
                let prod = f.clone() * MPoly::term(Rational::from_i64(1), mono.clone());
                let mut row = vec![<Rational as Ring>::zero(); basis.len()];
                for (m, c) in prod.terms() {
                    row[basis[m]] = c.clone();
                }
                rows.push(row);
            }
        }
        out.push(basis.len() - rank(rows));
    }
    Ok(out)
}

fn monomials_by_grade(weights: &[u32], max_grade: usize) -> Vec<Vec<Monomial>> {
    let mut pieces: Vec<Vec<Monomial>> = vec![Vec::new(); max_grade + 1];
    pieces[0].push(Monomial::one());
    // extend by one variable at a time so each monomial is produced once
    for (v, &w) in weights.iter().enumerate() {
        let w = w as usize;
        for d in w..=max_grade {
            let extended: Vec<Monomial> = pieces[d - w].iter().map(|m| m.mul(&Monomial::var(v))).collect();
            pieces[d].extend(extended);
        }
    }
    pieces
}

fn rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(pivot) = (r..rows.len()).find(|&i| !Ring::is_zero(&rows[i][c])) else { continue };
        rows.swap(r, pivot);
        let inv = rows[r][c].recip();
        for i in r + 1..rows.len() {
            if Ring::is_zero(&rows[i][c]) {
                continue;
            }
            let f = &rows[i][c] * &inv;
            let (top, rest) = rows.split_at_mut(i);
            for (x, p) in rest[0][c..].iter_mut().zip(&top[r][c..]) {
                *x -= &f * p;
            }
        }
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted(mut v: Vec<u32>) -> Vec<u32> {
        v.sort_unstable();
        v
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn generator_multisets() {
        assert_eq!(sorted(generator_degrees(RingId::A, 2, 2).unwrap()), vec![1, 2, 2, 3, 3, 4]);
        assert_eq!(generator_degrees(RingId::F, 2, 2).unwrap(), vec![1, 3, 2, 4, 6]);
        assert_eq!(generator_degrees(RingId::D, 2, 2).unwrap(), vec![1]);
        for nn in 2..6 {
            for n in 2..6 {
                let a = generator_degrees(RingId::A, nn, n).unwrap().len();
                let f = generator_degrees(RingId::F, nn, n).unwrap().len();
                let d = generator_degrees(RingId::D, nn, n).unwrap().len();
                assert_eq!(a, n * nn * nn - nn);
                assert_eq!(f, n * nn * (nn + 1) / 2 - 1);
                assert_eq!(d, genus(nn, n).unwrap());
                assert_eq!(a, f + d);
            }
        }
    }

    #[test]
    fn q_euler_examples() {
        let c = q_euler(2, 2).unwrap();
        assert_eq!((c.sign, c.q_power, c.num.clone(), c.den.clone()), (-1, -1, vec![1, 6], vec![2, 3]));
        let c = q_euler(2, 3).unwrap();
        assert_eq!((c.sign, c.q_power, c.num.clone(), c.den.clone()), (1, -4, vec![1, 8, 10], vec![2, 4, 5]));
    }

    #[test]
    fn limits() {
        assert_eq!(euler_characteristic(2, 2).unwrap(), Rational::from_i64(-1));
        assert_eq!(euler_characteristic(2, 3).unwrap(), Rational::from_i64(2));
        assert_eq!(euler_characteristic(2, 4).unwrap(), Rational::from_i64(-5));
        assert_eq!(euler_ratio(2, 2).unwrap().ratio, Rational::from_i64(-2));
        let unbalanced = GradedCharacter { sign: 1, q_power: 0, num: vec![1], den: vec![] };
        assert!(matches!(euler_limit(&unbalanced), Err(Error::UnbalancedCharacter { num: 1, den: 0 })));
    }

    #[test]
    fn integral_on_grid() {
        for nn in 2..6 {
            for n in 2..6 {
                assert!(euler_characteristic(nn, n).unwrap().is_integer(), "({nn},{n})");
            }
        }
    }

    #[test]
    fn n_equals_two_growth_is_monotone() {
        let abs: Vec<Rational> = (2..=8).map(|n| euler_characteristic(2, n).unwrap().abs()).collect();
        assert!(abs.windows(2).all(|w| w[0] <= w[1]), "{abs:?}");
    }

    #[test]
    fn oracle_matches_expansion() {
        assert_eq!(char_series_oracle(&[1], 4).unwrap(), ints(&[1, 1, 1, 1, 1]));
        for (nn, n) in [(2, 2), (2, 3), (3, 2)] {
            for ring in [RingId::A, RingId::F, RingId::D] {
                let deg = generator_degrees(ring, nn, n).unwrap();
                let ch = character(ring, nn, n).unwrap();
                assert_eq!(char_series_oracle(&deg, 20).unwrap(), series_expand(&ch, 20), "{ring:?}({nn},{n})");
            }
        }
    }

    #[test]
    fn near_one() {
        let eps = 1e-6;
        for nn in 2..6 {
            for n in 2..6 {
                let exact = euler_characteristic(nn, n).unwrap().to_f64().unwrap();
                let chi = q_euler_uncancelled(nn, n).unwrap();
                let rel = chi.eval_near_one(1.0 - eps) / exact - 1.0;
                let c = near_one_drift(&chi);
                if nn == 2 {
                    // the first-order term vanishes: six digits and more
                    assert_eq!(c, 0.0);
                    assert!(rel.abs() < 5e-6, "({nn},{n}) {rel:e}");
                }
                // otherwise the deviation is the analytic drift, not noise
                assert!((rel - c * eps).abs() <= 10.0 * (c * eps).powi(2) + 1e-10, "({nn},{n}) {rel:e} vs {:e}", c * eps);
            }
        }
    }

    #[test]
    fn quotient_probe() {
        let dims = quotient_dimensions(2, 2, 6).unwrap();
        let ch = character(RingId::A, 2, 2).unwrap().div(&character(RingId::F, 2, 2).unwrap());
        let want: Vec<usize> = series_expand(&ch, 6).iter().map(|c| c.to_usize().unwrap()).collect();
        assert_eq!(dims, want);
    }
}
