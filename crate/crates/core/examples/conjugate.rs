//! Complementary functions: closed form for t²/2, numeric table for ψ₁, and
//! the round trip back.

use blaschke_lab::orlicz::OrliczShape;

fn main() -> blaschke_lab::Result<()> {
    let sq = OrliczShape::power(2.0)?;
    let sq_conj = sq.conjugate()?;
    for s in [0.5, 2.0, 10.0] {
        println!("(t^2/2)*({s}) = {:.10}  expected {:.10}", sq_conj.value(s), s * s / 2.0);
    }

    let psi = OrliczShape::psi(1.0)?;
    let conj = psi.conjugate()?;
    println!("psi_1* table error {:.2e}", conj.table_error());
    for s in [1.0, 5.0, 20.0, 100.0] {
        println!("psi_1*({s:>5}) = {:.8e}   (psi_1*)'({s:>5}) = {:.8e}", conj.value(s), conj.deriv(s));
    }
    let back = conj.conjugate()?;
    for t in [0.1, 10.0, 1e4, 1e8] {
        let (a, b) = (back.value(t), psi.value(t));
        println!("psi_1**({t:e}) = {a:.8e}, psi_1 = {b:.8e}, rel {:.1e}", (a - b).abs() / b);
    }
    Ok(())
}
