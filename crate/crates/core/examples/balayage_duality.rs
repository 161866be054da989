//! The norm of a balayage as a functional, bracketed from both sides: the
//! dual norm above, explicit unit-norm weights below.

use blaschke_lab::harmonic::{balayage_dual_norm, pairing, pairing_ascent, ArcWeight, DiscreteMeasure};
use blaschke_lab::orlicz::{luxemburg_norm, OrliczShape};
use blaschke_lab::DiskPoint;

fn main() -> blaschke_lab::Result<()> {
    let psi = OrliczShape::psi(1.0)?;
    let conj = psi.conjugate()?;
    let mu = DiscreteMeasure::new(
        vec![DiskPoint::new(0.3, 0.1)?, DiskPoint::from_polar_gap(0.01, 4.0)?, DiskPoint::from_polar_gap(1e-3, 1.0)?],
        vec![1.0, 0.5, 0.25],
    )?;
    let dual = balayage_dual_norm(&mu, &psi, &conj, 512)?;
    println!("dual norm {:.10} (refined grid {:.10}, k = {:.4})", dual.value, dual.refined, dual.k);

    let asc = pairing_ascent(&mu, &psi, &conj, 512, 25)?;
    println!("ascent: {:.10} = {:.4} of the dual norm", asc.best_ratio, asc.best_ratio / dual.value);

    // an arbitrary weight, normalized, stays below
    let w = ArcWeight::from_arcs(&[(3.9, 0.2, 10.0), (0.9, 0.1, 30.0)]);
    let n = luxemburg_norm(&psi, &w.to_samples())?;
    println!("hand-picked weight: {:.6}", pairing(&w.scaled(1.0 / n), &mu));
    Ok(())
}
