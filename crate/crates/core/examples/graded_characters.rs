//! Characters of the graded rings A, F and D. The product formulas are
//! expanded and compared with a counting oracle over generator degrees, and
//! the quotient of A by the ideal of the invariants is counted directly.

use specjac::algebra::series_expand;
use specjac::euler::{char_series_oracle, character, generator_degrees, quotient_dimensions, RingId};

fn main() -> specjac::Result<()> {
    let (order, pole_degree) = (2, 2);
    for ring in [RingId::A, RingId::F, RingId::D] {
        let degrees = generator_degrees(ring, order, pole_degree)?;
        let series = series_expand(&character(ring, order, pole_degree)?, 12);
        let oracle = char_series_oracle(&degrees, 12)?;
        let shown: Vec<String> = series.iter().map(|c| c.to_string()).collect();
        println!("{ring:?} degrees {degrees:?}");
        println!("   series {}  oracle agrees: {}", shown.join(" "), series == oracle);
    }
    let quotient = character(RingId::A, order, pole_degree)?.div(&character(RingId::F, order, pole_degree)?);
    println!("chA/chF      {:?}", series_expand(&quotient, 8));
    println!("dim A/(F+)A  {:?}", quotient_dimensions(order, pole_degree, 8)?);
    Ok(())
}
