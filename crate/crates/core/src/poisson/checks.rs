//! Exact checks of the compiled table: Jacobi identity on sampled triples,
//! involution of the spectral invariants and centrality of their top
//! coefficients.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::Field;
use crate::error::Result;
use crate::lax::{rng_from_seed, LaxMatrix};

use super::{t_gradients, Gradient, PoissonStructure};

/// Triples `(u, v, w)` for the Jacobi check: all of them when there are at
/// most `samples`, otherwise `samples` drawn uniformly.
pub fn jacobi_triples(dim: usize, samples: usize, seed: u64) -> Vec<(usize, usize, usize)> {
    if dim.pow(3) <= samples {
        return (0..dim).flat_map(|u| (0..dim).flat_map(move |v| (0..dim).map(move |w| (u, v, w)))).collect();
    }
    random_triples(dim, samples, seed)
}

/// `count` triples drawn uniformly with replacement.
pub fn random_triples(dim: usize, count: usize, seed: u64) -> Vec<(usize, usize, usize)> {
    let mut rng = rng_from_seed(seed);
    (0..count).map(|_| (rng.random_range(0..dim), rng.random_range(0..dim), rng.random_range(0..dim))).collect()
}

/// Number of triples whose Jacobiator is not identically zero.
pub fn jacobi_failures(p: &PoissonStructure, triples: &[(usize, usize, usize)]) -> usize {
    triples.par_iter().filter(|&&(u, v, w)| !p.jacobiator(u, v, w).is_empty()).count()
}

/// Labels `(k, z-power)` of the t-coefficients, in the order of
/// [`t_gradients`].
pub fn t_labels(order: usize, pole_degree: usize) -> Vec<(usize, usize)> {
    (1..=order).flat_map(|k| (0..k * pole_degree).map(move |p| (k, p))).collect()
}

/// `(k, p)`: the coefficient of `z^p` in `t_k`.
pub type TLabel = (usize, usize);

#[derive(Clone, Debug, Serialize)]
pub struct InvariantReport<F> {
    /// `max |{t_k^(i), t_l^(j)}|` over all pairs.
    pub involution: f64,
    /// `max |{t_k^(a), x_u}|` over the top `n` coefficients of each `t_k`
    /// and every coordinate.
    pub centrality: f64,
    /// Nonzero `{t_k^(p), t_l^(q)}` as `((k, p), (l, q), value)`.
    #[serde(skip)]
    pub involution_violations: Vec<(TLabel, TLabel, F)>,
    /// Nonzero `{t_k^(p), x_u}` as `((k, p), u, value)`.
    #[serde(skip)]
    pub centrality_violations: Vec<(TLabel, usize, F)>,
}

impl<F> InvariantReport<F> {
    pub fn holds(&self) -> bool {
        self.involution_violations.is_empty() && self.centrality_violations.is_empty()
    }
}

pub fn invariant_checks<F: Field>(p: &PoissonStructure, m: &LaxMatrix<F>) -> Result<InvariantReport<F>> {
    let (nn, n) = (m.order(), m.pole_degree());
    let grads: Vec<Gradient<F>> = t_gradients(m)?.into_iter().flatten().collect();
    let labels = t_labels(nn, n);
    let mut involution: f64 = 0.0;
    let mut involution_violations = Vec::new();
    for (a, ga) in grads.iter().enumerate() {
        for (b, gb) in grads.iter().enumerate().skip(a + 1) {
            let v = p.bracket_eval(ga, gb)?;
            involution = involution.max(v.magnitude());
            if !v.is_zero() {
                involution_violations.push((labels[a], labels[b], v));
            }
        }
    }
    let mut centrality: f64 = 0.0;
    let mut centrality_violations = Vec::new();
    let x = m.coordinates();
    for (a, ga) in grads.iter().enumerate() {
        let (k, power) = labels[a];
        if power < (k - 1) * n {
            continue;
        }
        for u in 0..p.dim() {
            let mut unit = vec![F::zero(); p.dim()];
            unit[u] = F::one();
            let v = p.contract(&x, &ga.partials, &unit);
            centrality = centrality.max(v.magnitude());
            if !v.is_zero() {
                centrality_violations.push((labels[a], u, v));
            }
        }
    }
    Ok(InvariantReport { involution, centrality, involution_violations, centrality_violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Rational;
    use crate::lax::sample_m;
    use crate::poisson::structure_constants;

    #[test]
    fn exhaustive_jacobi_for_small_tables() {
        for (nn, n) in [(2, 1), (2, 2)] {
            let p = structure_constants(nn, n).unwrap();
            let triples = jacobi_triples(p.dim(), 1 << 20, 0);
            assert_eq!(triples.len(), p.dim().pow(3));
            assert_eq!(jacobi_failures(&p, &triples), 0);
        }
    }

    #[test]
    fn invariants_exact() {
        for (nn, n) in [(2, 2), (3, 2)] {
            let p = structure_constants(nn, n).unwrap();
            let m = sample_m::<Rational>(nn, n, 9).unwrap();
            let r = invariant_checks(&p, &m).unwrap();
            assert!(r.holds(), "({nn},{n}) {:?} {:?}", r.involution_violations, r.centrality_violations);
        }
    }

    #[test]
    fn lower_coefficients_are_not_central() {
        // the check has teeth: t_2^(z^0) at (2,2) is not a Casimir
        let p = structure_constants(2, 2).unwrap();
        let m = sample_m::<Rational>(2, 2, 9).unwrap();
        let g = &t_gradients(&m).unwrap()[1][0];
        let x = m.coordinates();
        let nonzero = (0..p.dim()).any(|u| {
            let mut unit = vec![Rational::from_integer(0.into()); p.dim()];
            unit[u] = Rational::from_integer(1.into());
            !crate::algebra::Ring::is_zero(&p.contract(&x, &g.partials, &unit))
        });
        assert!(nonzero);
    }
}
