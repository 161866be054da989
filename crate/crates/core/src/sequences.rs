//! Sequence generators and global sequence diagnostics.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, LabError, Result};
use crate::geometry::{pseudo_distance, DiskPoint};
use crate::numerics::pairwise_sum;

/// How a sequence was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    Section6 { epsilon: f64, n_max: u32 },
    Radial { q: f64, n: u32 },
    PerturbedPairs { base: Box<Generator>, eta: Vec<f64> },
    Explicit,
}

/// A finite truncation of a Blaschke sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratedSequence {
    pub points: Vec<DiskPoint>,
    pub generator: Generator,
    /// Stage of each point, when the generator has stages.
    pub stage_of: Vec<Option<u32>>,
    /// Index within the stage (`k` for the lattice sequence).
    pub k_of: Vec<Option<i64>>,
}

impl GeneratedSequence {
    pub fn explicit(points: Vec<DiskPoint>) -> Self {
        let n = points.len();
        Self { points, generator: Generator::Explicit, stage_of: vec![None; n], k_of: vec![None; n] }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Keeps the points whose index passes `keep`, preserving order and labels.
    pub fn filter_indices(&self, keep: impl Fn(usize) -> bool) -> GeneratedSequence {
        let mut out = GeneratedSequence {
            points: Vec::new(),
            generator: Generator::Explicit,
            stage_of: Vec::new(),
            k_of: Vec::new(),
        };
        for i in (0..self.len()).filter(|&i| keep(i)) {
            out.points.push(self.points[i]);
            out.stage_of.push(self.stage_of[i]);
            out.k_of.push(self.k_of[i]);
        }
        out
    }

    /// Index of the point with the given stage and `k`.
    pub fn find(&self, stage: u32, k: i64) -> Option<usize> {
        (0..self.len()).find(|&i| self.stage_of[i] == Some(stage) && self.k_of[i] == Some(k))
    }
}

/// `k_n = ⌊2^n / (n ln^{1+ε} n)⌋`, capped at `⌊(2^n - 1)/2⌋` so the `2k_n + 1`
/// points of stage `n` stay on distinct lattice angles.
pub fn section6_k(n: u32, epsilon: f64) -> u64 {
    assert!(n >= 2 && n <= 62, "stage {n} outside the enumerable range");
    let nf = n as f64;
    let raw = (2f64.powi(n as i32) / (nf * nf.ln().powf(1.0 + epsilon))).floor() as u64;
    raw.min(((1u64 << n) - 1) / 2)
}

/// Angular half-width `2π k_j / 2^j` of stage `j`, valid for any `j >= 2`.
///
/// Beyond `j = 1000` the floor is dropped; the relative error is below `2^-900`.
pub fn section6_halfwidth(j: u64, epsilon: f64) -> f64 {
    let jf = j as f64;
    let g = jf * jf.ln().powf(1.0 + epsilon);
    if j <= 62 {
        TAU * section6_k(j as u32, epsilon) as f64 / 2f64.powi(j as i32)
    } else if j <= 1000 {
        let p = 2f64.powi(j as i32);
        TAU * (p / g).floor() / p
    } else {
        TAU / g
    }
}

fn check_eps(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(invalid("epsilon", format!("must be positive, got {epsilon}")));
    }
    Ok(())
}

/// λ_{n,k} = (1 - 2^{-n}) e^{2πik/2^n}, n = 2..=n_max, |k| <= k_n.
pub fn gen_section6(epsilon: f64, n_max: u32) -> Result<GeneratedSequence> {
    check_eps(epsilon)?;
    if !(2..=40).contains(&n_max) {
        return Err(invalid("n_max", format!("must lie in 2..=40, got {n_max}")));
    }
    let per_stage: Vec<Vec<(DiskPoint, u32, i64)>> = (2..=n_max)
        .into_par_iter()
        .map(|n| {
            let k = section6_k(n, epsilon) as i64;
            let gap = 2f64.powi(-(n as i32));
            let step = TAU * gap;
            (-k..=k).map(|l| (DiskPoint::from_polar_gap(gap, step * l as f64).expect("valid gap"), n, l)).collect()
        })
        .collect();
    let mut seq = GeneratedSequence {
        points: Vec::new(),
        generator: Generator::Section6 { epsilon, n_max },
        stage_of: Vec::new(),
        k_of: Vec::new(),
    };
    for (p, n, l) in per_stage.into_iter().flatten() {
        seq.points.push(p);
        seq.stage_of.push(Some(n));
        seq.k_of.push(Some(l));
    }
    Ok(seq)
}

/// λ_n = 1 - q^n on the positive axis, n = 1..=count.
pub fn gen_radial(q: f64, count: u32) -> Result<GeneratedSequence> {
    if !(q > 0.0 && q < 1.0) {
        return Err(invalid("q", format!("must lie in (0,1), got {q}")));
    }
    let mut seq = GeneratedSequence {
        points: Vec::with_capacity(count as usize),
        generator: Generator::Radial { q, n: count },
        stage_of: Vec::new(),
        k_of: Vec::new(),
    };
    for n in 1..=count {
        let gap = q.powi(n as i32);
        if gap <= 0.0 {
            return Err(invalid("n", format!("q^{n} underflows")));
        }
        seq.points.push(DiskPoint::from_polar_gap(gap, 0.0)?);
        seq.stage_of.push(Some(n));
        seq.k_of.push(Some(0));
    }
    Ok(seq)
}

/// Adds to every base point `λ` a partner `μ` further out on the same radius
/// with `ρ(λ, μ) = e^{-η}`. Output order is `λ_1, μ_1, λ_2, μ_2, …`.
pub fn gen_perturbed_pairs(base: &GeneratedSequence, eta: &[f64]) -> Result<GeneratedSequence> {
    if eta.len() != base.len() {
        return Err(invalid("eta", format!("need {} values, got {}", base.len(), eta.len())));
    }
    if let Some(&bad) = eta.iter().find(|&&e| !(e > 0.0)) {
        return Err(invalid("eta", format!("values must be positive, got {bad}")));
    }
    let mut out = GeneratedSequence {
        points: Vec::with_capacity(2 * base.len()),
        generator: Generator::PerturbedPairs { base: Box::new(base.generator.clone()), eta: eta.to_vec() },
        stage_of: Vec::new(),
        k_of: Vec::new(),
    };
    for (i, (lam, &e)) in base.points.iter().zip(eta).enumerate() {
        let t = (-e).exp();
        let nearest = base
            .points
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, p)| pseudo_distance(lam, p))
            .fold(f64::INFINITY, f64::min);
        if t >= nearest {
            return Err(LabError::Interleaving { index: i, rho: t, limit: nearest });
        }
        // s = (r + t)/(1 + r t)  ⇔  1 - s = (1 - r)(1 - t)/(1 + r t)
        let gap = lam.gap() * (-(-e).exp_m1()) / (1.0 + lam.modulus() * t);
        let mu = DiskPoint::from_polar_gap(gap, lam.theta())?;
        out.points.push(*lam);
        out.points.push(mu);
        for _ in 0..2 {
            out.stage_of.push(base.stage_of[i]);
            out.k_of.push(base.k_of[i]);
        }
    }
    Ok(out)
}

/// Σ (1 - |λ|²) over the truncation.
pub fn blaschke_sum(points: &[DiskPoint]) -> f64 {
    let v: Vec<f64> = points.iter().map(DiskPoint::one_minus_mod2).collect();
    pairwise_sum(&v)
}

/// Minimum pseudohyperbolic distance over distinct pairs; 1 for fewer than two points.
pub fn separation_constant(points: &[DiskPoint]) -> f64 {
    if points.len() < 2 {
        return 1.0;
    }
    (0..points.len() - 1)
        .into_par_iter()
        .map(|i| points[i + 1..].iter().map(|q| pseudo_distance(&points[i], q)).fold(f64::INFINITY, f64::min))
        .reduce(|| f64::INFINITY, f64::min)
}

/// Upper bound on the contribution of omitted stages to φ_Λ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub j_max: u64,
    pub bound: f64,
    /// Comparison constant `1/(2δ²)` used in the bound.
    pub constant: f64,
}

/// Number of points per dyadic stage `j` (gap `2^{-j}`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum StageProfile {
    /// `2k_j + 1` points at every stage, with the lattice formula for `k_j`.
    Section6 { epsilon: f64 },
    /// `counts[j]` points at stage `j`, none beyond the vector.
    Counts(Vec<u64>),
}

/// Stages summed explicitly before switching to the integral remainder.
const TAIL_EXPLICIT: u64 = 1000;

/// `(points at stage j) · 2^{1-j}`, an upper bound for `Σ (1 - |μ|²)` over the stage.
fn stage_weight(profile: &StageProfile, j: u64) -> f64 {
    let gj = 2f64.powi(-(j.min(1100) as i32));
    match profile {
        StageProfile::Section6 { epsilon } => {
            if j <= 62 {
                (2 * section6_k(j as u32, *epsilon) + 1) as f64 * 2.0 * gj
            } else {
                let jf = j as f64;
                4.0 / (jf * jf.ln().powf(1.0 + epsilon)) + 2.0 * gj
            }
        }
        StageProfile::Counts(c) => c.get(j as usize).copied().unwrap_or(0) as f64 * 2.0 * gj,
    }
}

/// Bound on `Σ_{μ in stages > J} log 1/|b_μ(λ)|`.
///
/// Uses `log(1/x) <= (1 - x²)/(2x²)` with `x >= δ = ρ(|λ|, 1 - 2^{-J-1})`, then
/// `1 - |μ|² <= 2^{1-j}` and `|1 - conj(μ)λ| >= 1 - |λ| r_j`.
pub fn tail_bound(profile: &StageProfile, lambda: &DiskPoint, j_max: u64) -> Result<TailEstimate> {
    let g = lambda.gap();
    let next_gap = 2f64.powi(-((j_max + 1).min(1074) as i32));
    if next_gap >= g {
        return Err(invalid("j_max", format!("stage cutoff {j_max} is not beyond the point's depth")));
    }
    let delta = {
        let a = DiskPoint::from_polar_gap(g, 0.0)?;
        let b = DiskPoint::from_polar_gap(next_gap.max(f64::MIN_POSITIVE), 0.0)?;
        pseudo_distance(&a, &b)
    };
    let c = 1.0 / (2.0 * delta * delta);
    let r = lambda.modulus();
    let mut terms = Vec::new();
    for j in (j_max + 1)..=TAIL_EXPLICIT {
        let gj = 2f64.powi(-(j as i32));
        let denom = 1.0 - r * (1.0 - gj);
        terms.push(stage_weight(profile, j) / (denom * denom));
    }
    let start = j_max.max(TAIL_EXPLICIT) as f64;
    let remainder = match profile {
        StageProfile::Section6 { epsilon } => {
            // (2k_j+1) 2^{1-j} <= 4/(j ln^{1+ε} j) + 2^{2-j}; Σ_{j>J} <= 4/(ε ln^ε J) + 2^{2-J}
            (4.0 / (epsilon * start.ln().powf(*epsilon)) + 2f64.powf(2.0 - start)) / (g * g)
        }
        StageProfile::Counts(cnt) => {
            let extra: f64 = ((start as u64 + 1)..cnt.len() as u64).map(|j| stage_weight(profile, j)).sum();
            extra / (g * g)
        }
    };
    terms.push(remainder);
    let bound = c * lambda.one_minus_mod2() * pairwise_sum(&terms);
    Ok(TailEstimate { j_max, bound, constant: c })
}

/// Stage counts of an explicit stage-labelled sequence.
pub fn stage_profile_of(seq: &GeneratedSequence) -> StageProfile {
    match &seq.generator {
        Generator::Section6 { epsilon, .. } => StageProfile::Section6 { epsilon: *epsilon },
        _ => {
            let mut counts = Vec::new();
            for (p, s) in seq.points.iter().zip(&seq.stage_of) {
                let j = s.map(|s| s as usize).unwrap_or_else(|| (-p.gap().log2()).floor() as usize);
                if counts.len() <= j {
                    counts.resize(j + 1, 0);
                }
                counts[j] += 1;
            }
            StageProfile::Counts(counts)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::phi_lambda;
    use proptest::prelude::*;

    #[test]
    fn k2_hand_value() {
        // 4/(2 (ln 2)²) = 4.16…, floor 4, capped to (4-1)/2 = 1
        let raw = (4.0 / (2.0 * 2f64.ln().powi(2))).floor();
        assert_eq!(raw, 4.0);
        assert_eq!(section6_k(2, 1.0), 1);
        // n = 8: 256/(8 · 4.324) = 7.4
        assert_eq!(section6_k(8, 1.0), 7);
    }

    #[test]
    fn section6_construction() {
        let s = gen_section6(1.0, 2).unwrap();
        assert!(s.points.iter().all(|p| (p.modulus() - 0.75).abs() == 0.0));
        assert!(gen_section6(0.0, 5).is_err());
        assert!(gen_section6(-1.0, 5).is_err());
        let s = gen_section6(1.0, 20).unwrap();
        let expect: u64 = (2..=20u32)
            .map(|n| {
                let nf = n as f64;
                let k = ((1u64 << n) as f64 / (nf * nf.ln() * nf.ln())).floor() as u64;
                2 * k.min(((1u64 << n) - 1) / 2) + 1
            })
            .sum();
        assert_eq!(s.len() as u64, expect);
        // canonical order: stage-major, k ascending
        for w in s.stage_of.windows(2).zip(s.k_of.windows(2)) {
            let ((a, b), (ka, kb)) = ((w.0[0], w.0[1]), (w.1[0], w.1[1]));
            assert!(a < b || (a == b && ka < kb));
        }
    }

    #[test]
    fn radial_examples() {
        let s = gen_radial(0.5, 3).unwrap();
        let m: Vec<f64> = s.points.iter().map(|p| p.modulus()).collect();
        assert_eq!(m, vec![0.5, 0.75, 0.875]);
        assert!(gen_radial(1.0, 3).is_err());
    }

    #[test]
    fn radial_separation_brute_force() {
        let s = gen_radial(0.5, 30).unwrap();
        let mut brute = f64::INFINITY;
        for i in 0..s.len() {
            for j in 0..s.len() {
                if i != j {
                    brute = brute.min(pseudo_distance(&s.points[i], &s.points[j]));
                }
            }
        }
        assert_eq!(separation_constant(&s.points), brute);
        // consecutive radial points: ρ(1-q^n, 1-q^{n+1}) → (1-q)/(1+q) = 1/3
        let consecutive =
            (0..s.len() - 1).map(|i| pseudo_distance(&s.points[i], &s.points[i + 1])).fold(f64::INFINITY, f64::min);
        assert_eq!(separation_constant(&gen_radial(0.5, 10).unwrap().points), {
            let t = gen_radial(0.5, 10).unwrap();
            (0..9).map(|i| pseudo_distance(&t.points[i], &t.points[i + 1])).fold(f64::INFINITY, f64::min)
        });
        assert!(consecutive > 0.33 && consecutive < 0.4);
        assert_eq!(separation_constant(&s.points[..1]), 1.0);
        let two = [DiskPoint::new(0.5, 0.0).unwrap(), DiskPoint::new(-0.5, 0.0).unwrap()];
        assert!((separation_constant(&two) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn perturbed_pair_examples() {
        let base = GeneratedSequence::explicit(vec![DiskPoint::new(0.5, 0.0).unwrap()]);
        let s = gen_perturbed_pairs(&base, &[2f64.ln()]).unwrap();
        let rho = pseudo_distance(&s.points[0], &s.points[1]);
        assert!((rho - 0.5).abs() < 1e-15);
        assert_eq!(s.points[1].im(), 0.0);
        let s = gen_perturbed_pairs(&base, &[20.0]).unwrap();
        assert!(pseudo_distance(&s.points[0], &s.points[1]) <= 1e-8);
        // interleaving is refused
        let radial = gen_radial(0.5, 4).unwrap();
        assert!(matches!(gen_perturbed_pairs(&radial, &[0.1; 4]), Err(LabError::Interleaving { .. })));
    }

    #[test]
    fn perturbed_residual_is_bounded() {
        let base = gen_radial(0.5, 20).unwrap();
        let eta: Vec<f64> = (0..20).map(|i| 3.0 + 0.5 * i as f64).collect();
        let s = gen_perturbed_pairs(&base, &eta).unwrap();
        for i in 0..20 {
            let with = phi_lambda(&s.points, 2 * i).unwrap();
            let without = phi_lambda(&base.points, i).unwrap();
            let resid = with - without - eta[i];
            // the partner also sees the other base points; this stays bounded by the base density
            assert!(resid.abs() < 2.0 * without + 1.0, "i={i} resid={resid}");
        }
    }

    #[test]
    fn blaschke_sum_examples() {
        assert_eq!(blaschke_sum(&[DiskPoint::new(0.5, 0.0).unwrap()]), 0.75);
        assert_eq!(blaschke_sum(&[]), 0.0);
        let s = gen_section6(1.0, 12).unwrap();
        let closed: f64 = (2..=12u32)
            .map(|n| {
                let g = 2f64.powi(-(n as i32));
                (2 * section6_k(n, 1.0) + 1) as f64 * (1.0 - (1.0 - g) * (1.0 - g))
            })
            .sum();
        assert!((blaschke_sum(&s.points) - closed).abs() < 1e-12);
    }

    #[test]
    fn tail_bound_monotone_and_dominates_direct_tail() {
        let n = 4u32;
        let lam = DiskPoint::from_polar_gap(2f64.powi(-4), 0.0).unwrap();
        let prof = StageProfile::Section6 { epsilon: 1.0 };
        let mut prev = f64::INFINITY;
        for j in (n as u64 + 8)..=(n as u64 + 24) {
            let b = tail_bound(&prof, &lam, j).unwrap().bound;
            assert!(b <= prev && b >= 0.0);
            prev = b;
        }
        let big = gen_section6(1.0, n + 24).unwrap();
        let cut = n as u64 + 16;
        let direct: f64 = big
            .points
            .iter()
            .zip(&big.stage_of)
            .filter(|(_, s)| s.unwrap() as u64 > cut)
            .map(|(p, _)| crate::geometry::neg_log_factor(&lam, p))
            .sum();
        let b = tail_bound(&prof, &lam, cut).unwrap().bound;
        assert!(direct <= b, "direct {direct} bound {b}");
        assert!(tail_bound(&prof, &lam, 1_000_000).unwrap().bound < tail_bound(&prof, &lam, 2000).unwrap().bound);
    }

    #[test]
    fn tail_bound_vanishes_for_finite_profile() {
        let s = gen_radial(0.5, 12).unwrap();
        let prof = stage_profile_of(&s);
        let b = tail_bound(&prof, &s.points[3], 12).unwrap();
        assert_eq!(b.bound, 0.0);
    }

    #[test]
    fn truncation_gap_within_tail_bound() {
        let n = 6u32;
        let small = gen_section6(1.0, n + 8).unwrap();
        let large = gen_section6(1.0, n + 16).unwrap();
        let i = small.find(n, 0).unwrap();
        let j = large.find(n, 0).unwrap();
        let diff = phi_lambda(&large.points, j).unwrap() - phi_lambda(&small.points, i).unwrap();
        let b = tail_bound(&StageProfile::Section6 { epsilon: 1.0 }, &small.points[i], (n + 8) as u64).unwrap();
        assert!(diff >= 0.0 && diff <= b.bound);
    }

    proptest! {
        #[test]
        fn separation_and_sum_permutation_invariant(seed in 0u64..1000) {
            use rand::{seq::SliceRandom, SeedableRng};
            let mut pts = gen_section6(1.0, 7).unwrap().points;
            let base_sep = separation_constant(&pts);
            let base_sum = blaschke_sum(&pts);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            pts.shuffle(&mut rng);
            prop_assert_eq!(separation_constant(&pts), base_sep);
            prop_assert!((blaschke_sum(&pts) - base_sum).abs() <= 1e-12);
        }
    }
}
