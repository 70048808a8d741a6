//! The gauge-fixed bracket `{l(z1) , l(z2)}` against the r-matrix form, in
//! the corrected normalization and as usually quoted.

use specjac::algebra::Rational;
use specjac::lax::sample_m;
use specjac::poisson::{check_rhat_identity, structure_constants};

fn main() -> specjac::Result<()> {
    for (order, pole_degree) in [(2, 2), (3, 2), (2, 3)] {
        let p = structure_constants(order, pole_degree)?;
        let m = sample_m::<Rational>(order, pole_degree, 1)?;
        let r = check_rhat_identity(&p, &m, 4, 9)?;
        println!(
            "N={order} n={pole_degree}: corrected {:.1e}, as quoted {:.2}",
            r.max_residual, r.as_written_residual
        );
    }
    Ok(())
}
