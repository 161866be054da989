//! The lattice report: φ_Λ at λ_{n,0} for the infinite sequence, its
//! normalization, and the point-evaluation bound it is compared with.

use blaschke_lab::diagnostics::{section6_report, Section6Options};

fn main() -> blaschke_lab::Result<()> {
    let ns: Vec<u32> = (8..=14).collect();
    let rep = section6_report(1.0, &ns, &Section6Options::default())?;
    println!("  n        phi      +/-        R(n)   phi/psi^-1");
    for r in &rep.rows {
        println!(
            "{:>3} {:>10.4} {:>8.1e} {:>11.4} {:>12.4}",
            r.n, r.phi_lambda, r.tail_bound, r.r_stat, r.incompat_ratio
        );
    }
    println!("shadow weight in psi_0.5: {:?}, in psi_1: {:?}", rep.weight_half.verdict, rep.weight_full.verdict);
    for (n, d) in &rep.separation {
        print!("delta({n}) = {d:.4}  ");
    }
    println!();
    Ok(())
}
