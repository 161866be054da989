use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::{phi_all, DiskPoint};
use crate::harmonic::{poisson_kernel_at, BoundaryGrid};
use crate::numerics::golden_max;
use crate::orlicz::{orlicz_dual_norm, OrliczShape, WeightSamples};
use crate::sequences::GeneratedSequence;

/// Norm placed on `Σ c_λ P_λ`.
#[derive(Debug, Clone)]
pub enum DualConstraint {
    /// Dual of Luxemburg-normed `L^φ` (the Orlicz norm in `L^{φ*}`).
    Orlicz { phi: OrliczShape, conj: OrliczShape },
    /// `L^∞` on the grid nodes, the `φ(t) = t` degenerate.
    Sup,
}

impl DualConstraint {
    pub fn orlicz(phi: OrliczShape) -> Result<Self> {
        let conj = phi.conjugate()?;
        Ok(Self::Orlicz { phi, conj })
    }

    fn norm(&self, v: &WeightSamples) -> Result<f64> {
        match self {
            DualConstraint::Orlicz { phi, conj } => Ok(orlicz_dual_norm(phi, conj, v)?.0),
            DualConstraint::Sup => Ok(v.max_abs()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualSearchOptions {
    /// Coordinate updates.
    pub budget: usize,
    /// Points kept after ranking by single-atom ratio.
    pub candidates: usize,
    pub base_panels: usize,
    pub golden_iters: usize,
}

impl Default for DualSearchOptions {
    fn default() -> Self {
        Self { budget: 16, candidates: 16, base_panels: 512, golden_iters: 20 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualTraceRow {
    pub iteration: usize,
    pub support_size: usize,
    pub objective: f64,
    pub constraint: f64,
    pub ratio: f64,
}

/// Best coefficient vector found. `ratio` is a lower bound for the constant in (d).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualSearchState {
    /// Sequence indices with nonzero coefficient, increasing.
    pub support: Vec<usize>,
    pub coefficients: Vec<f64>,
    pub objective: f64,
    pub constraint: f64,
    pub ratio: f64,
    /// Best single-atom ratio over the whole truncation.
    pub single_best: f64,
    pub single_best_index: usize,
    pub trace: Vec<DualTraceRow>,
}

/// Candidate points with their kernel columns on a shared grid.
pub struct DualProblem {
    pub indices: Vec<usize>,
    pub phi: Vec<f64>,
    columns: Vec<Vec<f64>>,
    masses: Vec<f64>,
    constraint: DualConstraint,
}

impl DualProblem {
    pub fn new(
        points: &[DiskPoint],
        indices: Vec<usize>,
        phi: Vec<f64>,
        constraint: DualConstraint,
        base_panels: usize,
    ) -> Self {
        let atoms: Vec<DiskPoint> = indices.iter().map(|&i| points[i]).collect();
        let grid = BoundaryGrid::build(base_panels, &atoms, &[]);
        let columns = atoms.iter().map(|z| grid.nodes.par_iter().map(|&t| poisson_kernel_at(z, t)).collect()).collect();
        Self { indices, phi, columns, masses: grid.masses, constraint }
    }

    /// `(objective, constraint)` for coefficients over the candidates.
    pub fn evaluate(&self, c: &[f64]) -> Result<(f64, f64)> {
        let nodes = self.masses.len();
        let values: Vec<f64> = (0..nodes)
            .into_par_iter()
            .map(|i| {
                let mut s = 0.0;
                for (col, &cj) in self.columns.iter().zip(c) {
                    if cj != 0.0 {
                        s += cj * col[i];
                    }
                }
                s
            })
            .collect();
        let obj: f64 = c.iter().zip(&self.phi).map(|(a, b)| a * b).sum();
        let norm = self.constraint.norm(&WeightSamples { values, masses: self.masses.clone() })?;
        Ok((obj, norm))
    }

    pub fn ratio(&self, c: &[f64]) -> Result<f64> {
        let (o, n) = self.evaluate(c)?;
        Ok(if n > 0.0 { o / n } else { 0.0 })
    }
}

/// Single-atom ratio `φ_Λ(λ) / ‖P_λ‖`, which depends on `λ` only through `1 - |λ|`.
fn single_ratios(points: &[DiskPoint], phi: &[f64], constraint: &DualConstraint, base: usize) -> Result<Vec<f64>> {
    let mut gaps: Vec<u64> = points.iter().map(|p| p.gap().to_bits()).collect();
    gaps.sort_unstable();
    gaps.dedup();
    let norms: Vec<(u64, f64)> = gaps
        .par_iter()
        .map(|&bits| -> Result<(u64, f64)> {
            let z = DiskPoint::from_polar_gap(f64::from_bits(bits), 0.0)?;
            let p = DualProblem::new(&[z], vec![0], vec![1.0], constraint.clone(), base);
            Ok((bits, p.evaluate(&[1.0])?.1))
        })
        .collect::<Result<_>>()?;
    let cache: HashMap<u64, f64> = norms.into_iter().collect();
    Ok(points.iter().zip(phi).map(|(p, f)| f / cache[&p.gap().to_bits()]).collect())
}

/// Coordinate ascent on `Σ c_λ φ_Λ(λ) / ‖Σ c_λ P_λ‖`, from the best single atom.
///
/// Sequential and deterministic: candidates are visited in index order and each
/// update is a golden-section search on `c_j / Σ c` in `[0, 2]`, kept only if it
/// improves the ratio.
pub fn condition_d_search(
    seq: &GeneratedSequence,
    constraint: DualConstraint,
    opts: &DualSearchOptions,
) -> Result<DualSearchState> {
    if seq.is_empty() {
        return Err(invalid("sequence", "empty"));
    }
    if opts.candidates == 0 {
        return Err(invalid("candidates", "need at least one"));
    }
    let phi = phi_all(&seq.points)?;
    let single = single_ratios(&seq.points, &phi, &constraint, opts.base_panels)?;
    let mut order: Vec<usize> = (0..seq.len()).collect();
    order.sort_by(|&a, &b| single[b].total_cmp(&single[a]).then(a.cmp(&b)));
    let single_best_index = order[0];
    let mut picked: Vec<usize> = order.into_iter().take(opts.candidates).collect();
    picked.sort_unstable();
    let cand_phi: Vec<f64> = picked.iter().map(|&i| phi[i]).collect();
    let problem = DualProblem::new(&seq.points, picked.clone(), cand_phi, constraint, opts.base_panels);
    let m = picked.len();
    let mut c = vec![0.0; m];
    c[picked.iter().position(|&i| i == single_best_index).expect("best is a candidate")] = 1.0;
    let (mut obj, mut con) = problem.evaluate(&c)?;
    let mut ratio = obj / con;
    let mut trace = vec![DualTraceRow { iteration: 0, support_size: 1, objective: obj, constraint: con, ratio }];
    for it in 1..=opts.budget {
        let j = (it - 1) % m;
        let total: f64 = c.iter().sum();
        let mut trial = c.clone();
        let mut err = None;
        let mut at = |s: f64| -> f64 {
            trial[j] = s * total;
            match problem.ratio(&trial) {
                Ok(r) => r,
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            }
        };
        let (s_best, r_best) = golden_max(0.0, 2.0, opts.golden_iters, &mut at);
        let r_zero = at(0.0);
        if let Some(e) = err {
            return Err(e);
        }
        let s_new = if r_zero >= r_best { 0.0 } else { s_best };
        let mut next = c.clone();
        next[j] = s_new * total;
        if next.iter().any(|&x| x > 0.0) {
            let sum: f64 = next.iter().sum();
            next.iter_mut().for_each(|x| *x /= sum);
            let (o, n) = problem.evaluate(&next)?;
            if o / n > ratio {
                c = next;
                obj = o;
                con = n;
                ratio = o / n;
            }
        }
        trace.push(DualTraceRow {
            iteration: it,
            support_size: c.iter().filter(|&&x| x > 0.0).count(),
            objective: obj,
            constraint: con,
            ratio,
        });
    }
    let (support, coefficients): (Vec<usize>, Vec<f64>) =
        picked.iter().zip(&c).filter(|(_, &x)| x > 0.0).map(|(&i, &x)| (i, x)).unzip();
    Ok(DualSearchState {
        support,
        coefficients,
        objective: obj,
        constraint: con,
        ratio,
        single_best: single[single_best_index],
        single_best_index,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::gen_radial;

    #[test]
    fn single_atom_ratio_is_scale_free() {
        let s = gen_radial(0.5, 6).unwrap();
        let phi = phi_all(&s.points).unwrap();
        let p = DualProblem::new(
            &s.points,
            vec![2],
            vec![phi[2]],
            DualConstraint::orlicz(OrliczShape::power(2.0).unwrap()).unwrap(),
            256,
        );
        let a = p.ratio(&[1.0]).unwrap();
        let b = p.ratio(&[37.5]).unwrap();
        assert!((a - b).abs() <= 1e-12 * a);
    }

    #[test]
    fn sup_constraint_single_atom() {
        // ‖P_λ‖_∞ = (1+r)/(1-r), attained at arg λ
        let z = DiskPoint::from_polar_gap(0.25, 0.0).unwrap();
        let p = DualProblem::new(&[z], vec![0], vec![1.0], DualConstraint::Sup, 256);
        let (_, n) = p.evaluate(&[1.0]).unwrap();
        let exact = (1.0 + 0.75) / 0.25;
        assert!(n <= exact && n > 0.999 * exact, "{n}");
    }

    #[test]
    fn search_never_decreases_and_starts_at_single_best() {
        let s = gen_radial(0.5, 10).unwrap();
        let opts = DualSearchOptions { budget: 6, candidates: 6, base_panels: 256, golden_iters: 12 };
        let st =
            condition_d_search(&s, DualConstraint::orlicz(OrliczShape::power(2.0).unwrap()).unwrap(), &opts).unwrap();
        for w in st.trace.windows(2) {
            assert!(w[1].ratio >= w[0].ratio);
        }
        assert!((st.trace[0].ratio - st.single_best).abs() < 1e-9 * st.single_best);
        assert!(st.coefficients.iter().all(|&c| c > 0.0));
    }
}
