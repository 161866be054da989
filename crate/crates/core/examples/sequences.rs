//! The three generators: radial, the lattice sequence, and perturbed pairs.

use blaschke_lab::sequences::{
    blaschke_sum, gen_perturbed_pairs, gen_radial, gen_section6, section6_halfwidth, section6_k, separation_constant,
};

fn main() -> blaschke_lab::Result<()> {
    let radial = gen_radial(0.5, 20)?;
    println!(
        "radial q=1/2, N=20: {} points, sum(1-|z|) = {:.6}, delta = {:.6}",
        radial.len(),
        blaschke_sum(&radial.points),
        separation_constant(&radial.points)
    );

    for n in [2, 4, 6, 8] {
        let k = section6_k(n, 1.0);
        let hw = section6_halfwidth(n as u64, 1.0);
        println!("lattice stage {n}: k_n = {k}, {} points, half-width {hw:.4}", 2 * k + 1);
    }
    let lattice = gen_section6(1.0, 8)?;
    println!("lattice n_max=8: {} points, delta = {:.6}", lattice.len(), separation_constant(&lattice.points));

    // each point gets a twin at pseudohyperbolic distance e^-20
    let pairs = gen_perturbed_pairs(&gen_radial(0.5, 4)?, &[20.0; 4])?;
    let d = separation_constant(&pairs.points);
    println!("pairs: {} points, delta = {d:.3e} (e^-20 = {:.3e})", pairs.len(), (-20f64).exp());
    Ok(())
}
