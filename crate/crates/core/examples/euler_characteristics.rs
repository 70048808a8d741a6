//! Exact Euler characteristics of the affine Jacobian, the closed forms
//! next to the first-principles limit, and how fast `|chi|` outgrows `2^g`.

use specjac::euler::{euler_characteristic, euler_ratio, growth_row, closed_forms, q_euler};

fn main() -> specjac::Result<()> {
    println!("chi(N, n):");
    for order in 2..=4 {
        let row: Vec<String> = (2..=5).map(|n| euler_characteristic(order, n).map(|c| c.to_string())).collect::<Result<_, _>>()?;
        println!("  N={order}: {}", row.join("  "));
    }

    let chi_q = q_euler(2, 3)?;
    println!("chi_q(2,3): sign {} q^{} num {:?} den {:?}", chi_q.sign, chi_q.q_power, chi_q.num, chi_q.den);

    let closed = closed_forms(2, 2)?;
    println!("closed form at (2,2): {} vs limit {}", closed.euler_closed_form, closed.euler_first_principles);

    let r = euler_ratio(3, 2)?;
    println!("chi(3,3)/chi(3,2) = {} (product {}, up to sign: {})", r.ratio, r.product, r.agrees_up_to_sign);

    for n in 4..=6 {
        let g = growth_row(3, n)?;
        println!("N=3 n={n}: g={} log|chi|={:.2} g log 2={:.2}", g.genus, g.log_abs_chi, g.g_log2);
    }
    Ok(())
}
