//! Orlicz-class membership of the lattice shadow weight: a convergent series
//! with a two-sided remainder, and a divergent one with an explicit K.

use blaschke_lab::diagnostics::{weight_class_check, WeightClassInput};
use blaschke_lab::harmonic::ArcWeight;
use blaschke_lab::orlicz::OrliczShape;

fn main() -> blaschke_lab::Result<()> {
    let input = WeightClassInput::Section6Shadow { epsilon: 1.0 };
    for delta in [0.25, 0.5, 0.9, 1.0] {
        let r = weight_class_check(&input, &OrliczShape::psi(delta)?)?;
        match r.divergence_ln_k {
            Some(u) => println!("delta={delta}: {:?}, partial sums pass 10 by ln K = {u:.2}", r.verdict),
            None => println!(
                "delta={delta}: {:?}, modular in [{:.10}, {:.10}]",
                r.verdict, r.modular_lower, r.modular_upper
            ),
        }
    }
    let step = WeightClassInput::Explicit { weight: ArcWeight::from_arcs(&[(0.0, 0.3, 100.0)]) };
    let r = weight_class_check(&step, &OrliczShape::psi(1.0)?)?;
    println!("one tall arc: modular {:.6}", r.modular_lower);
    Ok(())
}
