//! Gauge-fix a random `m(z)` to the l-shape and show that the spectral curve
//! is untouched.

use specjac::algebra::Rational;
use specjac::lax::{char_poly_t, entry_degree, gauge_fix_l, gauge_matrix_s, sample_m, Shape};

fn main() -> specjac::Result<()> {
    let (order, pole_degree) = (3, 2);
    let m = sample_m::<Rational>(order, pole_degree, 42)?;
    let s = gauge_matrix_s(&m)?;
    let l = gauge_fix_l(&m)?;

    println!("s11 = {}", s[(0, 0)]);
    println!("entry degrees of l (bound in brackets):");
    for r in 0..order {
        let row: Vec<String> = (0..order)
            .map(|c| {
                let got = l.entry(r, c).degree().map_or("-".to_string(), |d| d.to_string());
                format!("{got}[{}]", entry_degree(Shape::L, order, pole_degree, r, c))
            })
            .collect();
        println!("  {}", row.join("  "));
    }

    let (cm, cl) = (char_poly_t(&m)?, char_poly_t(&l)?);
    println!("same spectral curve: {}", cm == cl);
    for k in 1..=order {
        println!("  t_{k}(z) = {}", cl.t(k));
    }
    Ok(())
}
