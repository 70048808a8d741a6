//! Brackets of the separated variables through implicit-function gradients.
//!
//! `{z_i, z_j}` and `{w_i, w_j}` vanish. `{z_i, w_j}` is diagonal and equal
//! to `-z_i` with the bracket normalized as in this crate, so `r_zw_opposite`
//! is the residual that goes to zero.

use num_complex::Complex64;
use specjac::lax::{resample, sample_m};
use specjac::poisson::structure_constants;
use specjac::sov::{canonical_bracket_check, gradient_fd_check};

fn main() -> specjac::Result<()> {
    let (order, pole_degree) = (3, 2);
    let p = structure_constants(order, pole_degree)?;
    let s = resample(11, 8, |seed| {
        let m = sample_m::<Complex64>(order, pole_degree, seed)?;
        let (d, r) = canonical_bracket_check(&p, &m, seed)?;
        Ok((gradient_fd_check(&m, &d, 1e-3)?, r))
    })?;
    let (fd, r) = s.value;
    println!("r_zz {:.1e}", r.r_zz);
    println!("r_zw {:.1e} (+z convention), r_zw_opposite {:.1e}", r.r_zw, r.r_zw_opposite);
    println!("r_ww {:.1e} scaled, {:.1e} absolute", r.r_ww, r.r_ww_absolute);
    println!("gradient vs finite differences {fd:.1e}");
    for (i, row) in r.zw.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|c| format!("{c:.3}")).collect();
        println!("  {{z_{i}, w_*}} = [{}]", cells.join(", "));
    }
    Ok(())
}
