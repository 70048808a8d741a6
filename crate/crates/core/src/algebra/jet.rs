//! First-order jets: a value together with an exact linear form.
//!
//! Used for forward-mode gradients (implicit differentiation of separated
//! variables) and for extracting the part of a determinant that is linear in
//! a block of unknowns. Second-order terms are discarded by construction.

use std::ops::{Add, Div, Mul, Neg, Sub};

use super::scalar::{Field, Ring};

#[derive(Clone, Debug, PartialEq)]
pub struct Jet<F> {
    pub value: F,
    /// Partial derivatives; a shorter vector means the missing entries are zero.
    pub grad: Vec<F>,
}

impl<F: Field> Jet<F> {
    pub fn constant(value: F) -> Self {
        Jet { value, grad: Vec::new() }
    }

    /// The `index`-th coordinate of a `dim`-dimensional space, at `value`.
    pub fn variable(value: F, index: usize, dim: usize) -> Self {
        let mut grad = vec![F::zero(); dim];
        grad[index] = F::one();
        Jet { value, grad }
    }

    pub fn partial(&self, i: usize) -> F {
        self.grad.get(i).cloned().unwrap_or_else(F::zero)
    }

    /// Gradient padded to length `dim`.
    pub fn gradient(&self, dim: usize) -> Vec<F> {
        (0..dim).map(|i| self.partial(i)).collect()
    }

    fn combine(&self, other: &Self, a: &F, b: &F) -> Vec<F> {
        // a * self.grad + b * other.grad
        let n = self.grad.len().max(other.grad.len());
        (0..n)
            .map(|i| {
                let x = self.grad.get(i).map(|g| g.clone() * a.clone());
                let y = other.grad.get(i).map(|g| g.clone() * b.clone());
                match (x, y) {
                    (Some(x), Some(y)) => x + y,
                    (Some(x), None) => x,
                    (None, Some(y)) => y,
                    (None, None) => F::zero(),
                }
            })
            .collect()
    }
}

impl<F: Field> Add for Jet<F> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let grad = self.combine(&o, &F::one(), &F::one());
        Jet { value: self.value + o.value, grad }
    }
}

impl<F: Field> Sub for Jet<F> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let grad = self.combine(&o, &F::one(), &-F::one());
        Jet { value: self.value - o.value, grad }
    }
}

impl<F: Field> Neg for Jet<F> {
    type Output = Self;
    fn neg(self) -> Self {
        Jet { value: -self.value, grad: self.grad.into_iter().map(|g| -g).collect() }
    }
}

impl<F: Field> Mul for Jet<F> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let grad = self.combine(&o, &o.value, &self.value);
        Jet { value: self.value * o.value, grad }
    }
}

impl<F: Field> Div for Jet<F> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let inv = o.value.inv();
        let q = self.value.clone() * inv.clone();
        // (a/b)' = a'/b - (a/b) b'/b
        let grad = self.combine(&o, &inv, &(-(q.clone() * inv.clone())));
        Jet { value: q, grad }
    }
}

impl<F: Field> Ring for Jet<F> {
    fn zero() -> Self {
        Jet::constant(F::zero())
    }
    fn one() -> Self {
        Jet::constant(F::one())
    }
    fn is_zero(&self) -> bool {
        self.value.is_zero() && self.grad.iter().all(Ring::is_zero)
    }
    fn from_i64(v: i64) -> Self {
        Jet::constant(F::from_i64(v))
    }
}
