//! Pseudohyperbolic distance, Blaschke factors and φ_Λ for a handful of points.

use blaschke_lab::{log_blaschke_at, mobius_factor, phi_lambda, pseudo_distance, DiskPoint};
use num_complex::Complex64;

fn main() -> blaschke_lab::Result<()> {
    let a = DiskPoint::new(0.5, 0.0)?;
    let b = DiskPoint::new(0.0, 0.5)?;
    println!("rho(a, b) = {:.12}", pseudo_distance(&a, &b));

    // b_a is an automorphism: distances survive the move
    let ma = DiskPoint::from_complex(mobius_factor(&a, a.to_complex()))?;
    let mb = DiskPoint::from_complex(mobius_factor(&a, b.to_complex()))?;
    println!("after b_a: rho = {:.12}, b_a(a) = {:?}", pseudo_distance(&ma, &mb), ma.to_complex());
    println!("|b_a(e^i)| = {:.15}", mobius_factor(&a, Complex64::from_polar(1.0, 1.0)).norm());

    // points near the circle are stored by their gap 1 - |z|, so this is exact
    let deep = DiskPoint::from_polar_gap(1e-12, 0.3)?;
    let pts = [a, b, deep];
    println!("log |B(0)| = {:.12}", log_blaschke_at(&pts, &DiskPoint::origin(), None).value());
    for i in 0..pts.len() {
        println!("phi_Lambda(lambda_{i}) = {:.6e}", phi_lambda(&pts, i)?);
    }
    Ok(())
}
