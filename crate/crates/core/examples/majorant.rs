//! Does a boundary weight majorize φ_Λ? Shadow weights on the radial sequence,
//! below and above the minimal constant.

use std::f64::consts::PI;

use blaschke_lab::diagnostics::{majorant_check, minimal_shadow_c0, TailModel};
use blaschke_lab::harmonic::{shadow_weight, ArcWeight};
use blaschke_lab::sequences::gen_radial;

fn main() -> blaschke_lab::Result<()> {
    let seq = gen_radial(0.5, 20)?;
    let tail = TailModel::of(&seq);
    let c0 = minimal_shadow_c0(&seq, PI, tail)?;
    println!("minimal c0 for arcs of half-width pi(1-|l|): {c0:.6}");
    for f in [0.9, 1.0 + 1e-9, 1.5] {
        let r = majorant_check(&seq, &shadow_weight(&seq, c0 * f, PI)?, tail)?;
        let worst = r.rows.iter().map(|x| x.deficit.unwrap()).fold(f64::INFINITY, f64::min);
        println!("c0 x {f}: {:?}, smallest deficit {worst:.3e}", r.verdict);
    }
    let r = majorant_check(&seq, &ArcWeight::constant(5.0), tail)?;
    println!("constant 5: {:?} (M = {:.4})", r.verdict, r.m_sup);
    Ok(())
}
