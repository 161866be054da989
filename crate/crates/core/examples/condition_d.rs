//! Lower bounds for the constant in the dual condition: bounded on a Carleson
//! sequence, growing on the lattice sequence.

use blaschke_lab::diagnostics::{condition_d_search, DualConstraint, DualSearchOptions};
use blaschke_lab::orlicz::OrliczShape;
use blaschke_lab::sequences::{gen_radial, gen_section6, GeneratedSequence};

fn best(seq: &GeneratedSequence) -> blaschke_lab::Result<String> {
    let st = condition_d_search(seq, DualConstraint::orlicz(OrliczShape::psi(1.0)?)?, &DualSearchOptions::default())?;
    Ok(format!("ratio {:.5} on {} atoms (single atom {:.5})", st.ratio, st.support.len(), st.single_best))
}

fn main() -> blaschke_lab::Result<()> {
    for n in [10, 20] {
        println!("radial N={n}: {}", best(&gen_radial(0.5, n)?)?);
    }
    for n in [8, 11, 14] {
        println!("lattice n_max={n}: {}", best(&gen_section6(1.0, n)?)?);
    }
    Ok(())
}
