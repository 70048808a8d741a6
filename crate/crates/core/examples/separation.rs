//! Separated variables: the zeros of `B(z) = det Z(z)` and the matching
//! eigenvalues `w`, all of which land on the spectral curve.

use num_complex::Complex64;
use specjac::lax::{char_poly_t, resample, sample_m};
use specjac::sov::{det_z, separate};

fn main() -> specjac::Result<()> {
    let (order, pole_degree) = (3, 3);
    // resample on the rare non-generic draw
    let s = resample(3, 8, |seed| {
        let m = sample_m::<Complex64>(order, pole_degree, seed)?;
        let d = separate(&m, seed)?;
        Ok((m, d))
    })?;
    let (m, divisor) = s.value;
    let curve = char_poly_t(&m)?;

    println!("genus {}, deg B = {:?}", curve.genus(), det_z(&m)?.degree());
    println!("min root separation {:.3e}, xi margin {:.3e}", divisor.min_separation, divisor.rank_margin);
    for (p, r) in divisor.points.iter().zip(divisor.curve_residuals(&curve)) {
        println!("  z = {:>9.5}  w = {:>9.5}  residual {r:.1e}", p.z, p.w);
    }
    Ok(())
}
