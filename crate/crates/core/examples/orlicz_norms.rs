//! Luxemburg norms of arc indicators across shape families, against 1/φ⁻¹(1/a).

use std::f64::consts::TAU;

use blaschke_lab::harmonic::ArcWeight;
use blaschke_lab::orlicz::{luxemburg_norm, modular, ShapeSpec};

fn main() -> blaschke_lab::Result<()> {
    for spec in ["power:2", "psi:1", "psi:0.5", "loglog:1", "exp"] {
        let shape = spec.parse::<ShapeSpec>()?.build()?;
        print!("{spec:>9}:");
        for a in [0.5, 0.1, 0.01] {
            let w = ArcWeight::indicator(0.0, TAU * a, 1.0).to_samples();
            let n = luxemburg_norm(&shape, &w)?;
            print!("  a={a}: {n:.6} (formula {:.6})", 1.0 / shape.inverse(1.0 / a));
        }
        println!();
    }

    // the norm saturates the modular
    let shape = "psi:1".parse::<ShapeSpec>()?.build()?;
    let w = ArcWeight::from_arcs(&[(0.0, 1.0, 3.0), (2.0, 0.5, 40.0)]).to_samples();
    let n = luxemburg_norm(&shape, &w)?;
    println!("two arcs: norm {n:.8}, J(w/norm) = {:.10}", modular(&shape, &w.scaled(1.0 / n)));
    Ok(())
}
