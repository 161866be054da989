//! inf |B_λ(λ)| with tail brackets: a Carleson sequence, a nearly coincident
//! pair, and the lattice sequence whose truncations look harmless.

use blaschke_lab::diagnostics::{carleson_check, phi_section6_bracket, Section6Options, TailModel, CARLESON_THRESHOLD};
use blaschke_lab::sequences::{gen_perturbed_pairs, gen_radial, gen_section6};

fn main() -> blaschke_lab::Result<()> {
    for n in [10, 30, 35] {
        let seq = gen_radial(0.5, n)?;
        let r = carleson_check(&seq, TailModel::of(&seq), CARLESON_THRESHOLD)?;
        println!("radial N={n}: inf = {:.15} {:?}", r.inf_completed, r.report.verdict);
    }

    let pairs = gen_perturbed_pairs(&gen_radial(0.5, 4)?, &[20.0; 4])?;
    let r = carleson_check(&pairs, TailModel::of(&pairs), CARLESON_THRESHOLD)?;
    println!("pairs: M = {:.6}, inf = {:.3e} {:?}", r.report.m_sup, r.inf_completed, r.report.verdict);

    // truncating the lattice drops the deeper stages that dominate φ_Λ
    for n in [8, 10, 12, 14] {
        let seq = gen_section6(1.0, n)?;
        let r = carleson_check(&seq, TailModel::None, CARLESON_THRESHOLD)?;
        let full = phi_section6_bracket(1.0, n, &Section6Options::default())?;
        println!(
            "lattice n_max={n}: truncated M = {:.3}, phi at the top point of the full lattice = {:.3}",
            r.report.m_sup,
            full.mid()
        );
    }
    Ok(())
}
