//! Build the exact quadratic Poisson structure on the coefficients of `m(z)`
//! and check antisymmetry, the Jacobi identity and that the spectral
//! invariants Poisson-commute.
//!
//!     cargo run --example poisson_structure -- 3 2

use specjac::algebra::Rational;
use specjac::lax::sample_m;
use specjac::poisson::{invariant_checks, jacobi_failures, jacobi_triples, structure_constants};

fn main() -> specjac::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let (order, pole_degree) = (args.first().copied().unwrap_or(2), args.get(1).copied().unwrap_or(2));

    let p = structure_constants(order, pole_degree)?;
    let pairs = p.nonzero_pairs().count();
    println!("N={order} n={pole_degree}: {} coordinates, {pairs} nonzero brackets", p.dim());
    println!("antisymmetric: {}", p.is_antisymmetric());

    let triples = jacobi_triples(p.dim(), 5000, 1);
    println!("jacobiator nonzero on {} of {} triples", jacobi_failures(&p, &triples), triples.len());

    // the t_k coefficients are Casimirs on top and commute among themselves
    let m = sample_m::<Rational>(order, pole_degree, 7)?;
    let report = invariant_checks(&p, &m)?;
    println!("involution residual {}, centrality residual {}", report.involution, report.centrality);
    Ok(())
}
