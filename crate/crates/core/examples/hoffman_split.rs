//! Splitting a separated sequence in two and fitting |B_1|, |B_2| against
//! each other off the sequence.

use blaschke_lab::diagnostics::{hoffman_split, hoffman_verify, HoffmanGrid};
use blaschke_lab::sequences::{gen_radial, gen_section6, separation_constant, GeneratedSequence};

fn report(label: &str, seq: &GeneratedSequence) -> blaschke_lab::Result<()> {
    let delta = separation_constant(&seq.points);
    let parts = hoffman_split(seq, delta)?;
    for grid in [HoffmanGrid::default(), HoffmanGrid::default().doubled()] {
        let f = hoffman_verify(seq, &parts, delta, &grid)?;
        println!(
            "{label} ({}+{} points, m={}): b = {}, a = {:.6}, c = {:.3}, eta = {:.4} (bound {:.4}), holds {} on {} grid points",
            parts.0.len(),
            parts.1.len(),
            grid.m,
            f.b,
            f.a,
            f.c,
            f.eta,
            f.eta_bound,
            f.holds,
            f.grid_points
        );
    }
    Ok(())
}

fn main() -> blaschke_lab::Result<()> {
    report("radial", &gen_radial(0.5, 30)?)?;
    report("lattice", &gen_section6(1.0, 10)?)
}
