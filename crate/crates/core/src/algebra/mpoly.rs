//! Sparse multivariate polynomials, used where coefficients of Lax matrices
//! have to be handled as indeterminates (symbolic characteristic
//! polynomials, derivations, graded pieces of coordinate rings).

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use super::scalar::Ring;

/// Sorted `(variable, exponent)` pairs with positive exponents.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(Vec<(usize, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: usize) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn from_exponents(pairs: impl IntoIterator<Item = (usize, u32)>) -> Self {
        let mut m = Monomial::one();
        for (v, e) in pairs {
            if e > 0 {
                m = m.mul(&Monomial(vec![(v, e)]));
            }
        }
        m
    }

    pub fn exponent(&self, v: usize) -> u32 {
        self.0.iter().find(|(x, _)| *x == v).map_or(0, |(_, e)| *e)
    }

    pub fn vars(&self) -> &[(usize, u32)] {
        &self.0
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    /// Weighted degree with one weight per variable.
    pub fn weighted_degree(&self, weight: impl Fn(usize) -> i64) -> i64 {
        self.0.iter().map(|&(v, e)| weight(v) * e as i64).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a, b) = (self.0[i], other.0[j]);
            match a.0.cmp(&b.0) {
                std::cmp::Ordering::Less => {
                    out.push(a);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a.0, a.1 + b.1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// Remove variable `v` entirely, returning its exponent.
    pub fn take(&self, v: usize) -> (u32, Monomial) {
        let e = self.exponent(v);
        (e, Monomial(self.0.iter().copied().filter(|(x, _)| *x != v).collect()))
    }

    /// `d/dv`: exponent of `v` and the lowered monomial, or `None`.
    fn lower(&self, v: usize) -> Option<(u32, Monomial)> {
        let e = self.exponent(v);
        if e == 0 {
            return None;
        }
        let inner = self
            .0
            .iter()
            .filter_map(|&(x, k)| if x == v { (k > 1).then_some((x, k - 1)) } else { Some((x, k)) })
            .collect();
        Some((e, Monomial(inner)))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MPoly<R> {
    terms: BTreeMap<Monomial, R>,
}

impl<R: Ring> MPoly<R> {
    pub fn term(c: R, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        MPoly { terms }
    }

    pub fn var(v: usize) -> Self {
        MPoly::term(R::one(), Monomial::var(v))
    }

    pub fn constant(c: R) -> Self {
        MPoly::term(c, Monomial::one())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &R)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> R {
        self.terms.get(m).cloned().unwrap_or_else(R::zero)
    }

    fn add_term(&mut self, m: Monomial, c: R) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let s = existing.clone() + c;
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *existing = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn derivative(&self, v: usize) -> Self {
        let mut out = MPoly::zero();
        for (m, c) in &self.terms {
            if let Some((e, low)) = m.lower(v) {
                out.add_term(low, c.clone() * R::from_i64(e as i64));
            }
        }
        out
    }

    /// Evaluate with values supplied per variable.
    pub fn eval(&self, value: impl Fn(usize) -> R) -> R {
        let mut acc = R::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in m.vars() {
                t = t * value(v).pow(e as usize);
            }
            acc = acc + t;
        }
        acc
    }

    /// Collect by the exponent of variable `v`: `self = sum_e v^e * out[e]`.
    pub fn collect_by(&self, v: usize) -> Vec<MPoly<R>> {
        let mut out: Vec<MPoly<R>> = Vec::new();
        for (m, c) in &self.terms {
            let (e, rest) = m.take(v);
            let e = e as usize;
            if out.len() <= e {
                out.resize(e + 1, MPoly::zero());
            }
            out[e].add_term(rest, c.clone());
        }
        out
    }

    /// Set of weighted degrees appearing in the polynomial.
    pub fn weighted_degrees(&self, weight: impl Fn(usize) -> i64 + Copy) -> Vec<i64> {
        let mut d: Vec<i64> = self.terms.keys().map(|m| m.weighted_degree(weight)).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    pub fn is_homogeneous(&self, weight: impl Fn(usize) -> i64 + Copy) -> bool {
        self.weighted_degrees(weight).len() <= 1
    }
}

impl<R: Ring> Add for MPoly<R> {
    type Output = Self;
    fn add(mut self, other: Self) -> Self {
        for (m, c) in other.terms {
            self.add_term(m, c);
        }
        self
    }
}

impl<R: Ring> Neg for MPoly<R> {
    type Output = Self;
    fn neg(self) -> Self {
        MPoly { terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect() }
    }
}

impl<R: Ring> Sub for MPoly<R> {
    type Output = Self;
    fn sub(self, other: Self) -> Self {
        self + (-other)
    }
}

impl<R: Ring> Mul for MPoly<R> {
    type Output = Self;
    fn mul(self, other: Self) -> Self {
        let mut out = MPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1.clone() * c2.clone());
            }
        }
        out
    }
}

impl<R: Ring> Ring for MPoly<R> {
    fn zero() -> Self {
        MPoly { terms: BTreeMap::new() }
    }
    fn one() -> Self {
        MPoly::constant(R::one())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn from_i64(v: i64) -> Self {
        MPoly::constant(R::from_i64(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Rational;

    #[test]
    fn product_rule_and_collect() {
        let x = MPoly::<Rational>::var(0);
        let y = MPoly::<Rational>::var(1);
        let f = x.clone() * x.clone() * y.clone() + y.clone();
        assert_eq!(f.derivative(0), MPoly::constant(Rational::from_i64(2)) * x.clone() * y.clone());
        let by_x = f.collect_by(0);
        assert_eq!(by_x.len(), 3);
        assert_eq!(by_x[2], y.clone());
        assert_eq!(by_x[0], y.clone());
        assert!(by_x[1].is_zero());
        assert_eq!(f.eval(|v| Rational::from_i64(v as i64 + 2)), Rational::from_i64(15));
        assert!((x.clone() - x).is_zero());
    }
}
