//! Graded characters written as products of q-numbers `[a] = 1 - q^a`,
//! and their power-series expansion.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

/// `sign * q^q_power * prod_{a in num} [a] / prod_{b in den} [b]`.
///
/// The q-number indices are kept as sorted multisets and only expanded on
/// demand.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedCharacter {
    pub sign: i8,
    pub q_power: i64,
    pub num: Vec<u32>,
    pub den: Vec<u32>,
}

impl GradedCharacter {
    pub fn one() -> Self {
        GradedCharacter { sign: 1, q_power: 0, num: vec![], den: vec![] }
    }

    /// Character of a free commutative ring on generators of the given
    /// (positive) degrees: `prod 1 / [d]`.
    pub fn free_ring(degrees: &[u32]) -> Self {
        GradedCharacter { sign: 1, q_power: 0, num: vec![], den: degrees.to_vec() }.canonical()
    }

    /// Sort both multisets and drop indices present in both. Factors with
    /// index 0 are never produced by well-formed inputs and are left alone.
    pub fn canonical(mut self) -> Self {
        self.num.sort_unstable();
        self.den.sort_unstable();
        let (mut num, mut den) = (Vec::new(), Vec::new());
        let (mut i, mut j) = (0, 0);
        while i < self.num.len() && j < self.den.len() {
            match self.num[i].cmp(&self.den[j]) {
                std::cmp::Ordering::Less => {
                    num.push(self.num[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    den.push(self.den[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        num.extend_from_slice(&self.num[i..]);
        den.extend_from_slice(&self.den[j..]);
        self.num = num;
        self.den = den;
        self
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut num = self.num.clone();
        num.extend_from_slice(&other.num);
        let mut den = self.den.clone();
        den.extend_from_slice(&other.den);
        GradedCharacter { sign: self.sign * other.sign, q_power: self.q_power + other.q_power, num, den }
            .canonical()
    }

    pub fn inverse(&self) -> Self {
        GradedCharacter { sign: self.sign, q_power: -self.q_power, num: self.den.clone(), den: self.num.clone() }
    }

    pub fn div(&self, other: &Self) -> Self {
        self.mul(&other.inverse())
    }

    pub fn is_balanced(&self) -> bool {
        self.num.len() == self.den.len()
    }

    /// Evaluate at a real `q` in `(0, 1)`, using `expm1` so factors near
    /// `q = 1` keep full relative precision.
    pub fn eval_near_one(&self, q: f64) -> f64 {
        let lnq = q.ln();
        let log_factor = |a: u32| (-(a as f64 * lnq).exp_m1()).ln();
        let log_abs: f64 = self.q_power as f64 * lnq + self.num.iter().map(|&a| log_factor(a)).sum::<f64>()
            - self.den.iter().map(|&b| log_factor(b)).sum::<f64>();
        self.sign as f64 * log_abs.exp()
    }
}

/// Coefficients of `q^0 .. q^order` of `sign * prod [a] / prod [b]`.
///
/// The `q^q_power` prefactor is not applied: entry `j` of the result is the
/// coefficient of `q^(q_power + j)` of the full character.
pub fn series_expand(ch: &GradedCharacter, order: usize) -> Vec<BigInt> {
    let len = order + 1;
    let mut numerator = vec![BigInt::zero(); len];
    numerator[0] = BigInt::from(ch.sign);
    for &a in &ch.num {
        multiply_by_one_minus(&mut numerator, a as usize);
    }
    // Expand the denominator polynomial and divide by it as a power series.
    let mut denominator = vec![BigInt::zero(); len];
    denominator[0] = BigInt::one();
    for &b in &ch.den {
        multiply_by_one_minus(&mut denominator, b as usize);
    }
    let mut out = vec![BigInt::zero(); len];
    for k in 0..len {
        let mut acc = numerator[k].clone();
        for j in 1..=k {
            if !denominator[j].is_zero() {
                acc -= &denominator[j] * &out[k - j];
            }
        }
        // denominator[0] == 1
        out[k] = acc;
    }
    out
}

/// In-place multiplication of a truncated series by `1 - q^a`.
fn multiply_by_one_minus(series: &mut [BigInt], a: usize) {
    if a == 0 {
        series.iter_mut().for_each(|c| *c = BigInt::zero());
        return;
    }
    for k in (a..series.len()).rev() {
        let prev = series[k - a].clone();
        series[k] -= prev;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn geometric_series() {
        let ch = GradedCharacter::free_ring(&[1]);
        assert_eq!(series_expand(&ch, 5), ints(&[1, 1, 1, 1, 1, 1]));
    }

    #[test]
    fn trivial_character() {
        assert_eq!(series_expand(&GradedCharacter::one(), 3), ints(&[1, 0, 0, 0]));
    }

    #[test]
    fn partitions_into_ones_and_twos() {
        let ch = GradedCharacter::free_ring(&[1, 2]);
        assert_eq!(series_expand(&ch, 7), ints(&[1, 1, 2, 2, 3, 3, 4, 4]));
    }

    #[test]
    fn cancellation() {
        let ch = GradedCharacter { sign: -1, q_power: -1, num: vec![6, 1, 3, 2, 4, 1], den: vec![3, 2, 2, 4, 1, 3] }
            .canonical();
        assert_eq!(ch.num, vec![1, 6]);
        assert_eq!(ch.den, vec![2, 3]);
    }

    #[test]
    fn numerator_polynomial() {
        // (1 - q)(1 - q^2) = 1 - q - q^2 + q^3
        let ch = GradedCharacter { sign: 1, q_power: 0, num: vec![1, 2], den: vec![] };
        assert_eq!(series_expand(&ch, 4), ints(&[1, -1, -1, 1, 0]));
    }
}
