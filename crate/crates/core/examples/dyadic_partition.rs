//! Dyadic squares, the four-colour split and certified separation between
//! same-colour squares.

use blaschke_lab::dyadic::{
    color_class, per_square_minimizer, split4, square_of, square_separation, DyadicIndex, DyadicSquare,
};
use blaschke_lab::sequences::gen_section6;

fn main() -> blaschke_lab::Result<()> {
    let seq = gen_section6(1.0, 6)?;
    for p in seq.points.iter().take(5) {
        let q = square_of(p);
        println!("{:?} -> {q:?}, class {}", p.to_complex(), color_class(q));
    }
    let parts = split4(&seq);
    println!("split sizes {:?}", parts.iter().map(|p| p.len()).collect::<Vec<_>>());
    let mins = per_square_minimizer(&parts[0], &seq)?;
    for m in mins.iter().take(4) {
        println!("square {:?}: phi {:.4}, |B_l(l)| {:.3e}", m.square, m.phi, m.m);
    }

    let a = DyadicSquare::new(DyadicIndex::new(2, 0)?);
    let b = DyadicSquare::new(DyadicIndex::new(2, 2)?);
    let s = square_separation(&a, &b, 64)?;
    println!("rho(Q(2,0), Q(2,2)) >= {:.6} (grid {:.6}, slack {:.2e})", s.bound, s.grid_min, s.slack);
    Ok(())
}
