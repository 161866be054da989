use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyadic::square_of;
use crate::error::{invalid, Result};
use crate::geometry::{log_blaschke_at, phi_all, pseudo_distance, DiskPoint};
use crate::sequences::{separation_constant, GeneratedSequence};

/// Layer by Whitney level, angular order inside a layer, then alternate 1, 2, 1, 2, ...
/// across the whole sequence. Order within each part follows the input.
pub fn hoffman_split(seq: &GeneratedSequence, delta: f64) -> Result<(GeneratedSequence, GeneratedSequence)> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid("delta", format!("must lie in (0,1), got {delta}")));
    }
    let sep = separation_constant(&seq.points);
    if sep < delta {
        return Err(invalid("delta", format!("sequence separation {sep} is below {delta}")));
    }
    let mut layers: BTreeMap<u32, Vec<(f64, usize)>> = BTreeMap::new();
    for (i, p) in seq.points.iter().enumerate() {
        // argument in (-π, π]
        let t = p.theta();
        let arg = if t > PI { t - TAU } else { t };
        layers.entry(square_of(p).n).or_default().push((arg, i));
    }
    let mut first = vec![false; seq.len()];
    let mut flip = true;
    for layer in layers.values_mut() {
        layer.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for &(_, i) in layer.iter() {
            first[i] = flip;
            flip = !flip;
        }
    }
    Ok((seq.filter_indices(|i| first[i]), seq.filter_indices(|i| !first[i])))
}

/// Sampling grid for the fit: `m × m` points in every Whitney square within
/// `levels` levels and `spread` angular cells of a sequence point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HoffmanGrid {
    pub m: usize,
    pub levels: u32,
    pub spread: u64,
}

impl Default for HoffmanGrid {
    fn default() -> Self {
        Self { m: 6, levels: 2, spread: 3 }
    }
}

impl HoffmanGrid {
    /// Same squares, twice the samples per side.
    pub fn doubled(&self) -> Self {
        Self { m: 2 * self.m, ..*self }
    }
}

/// Fitted constants in the form `x/b - α <= y <= b x + α`, `x, y = log 1/|B_1|, log 1/|B_2|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoffmanFit {
    pub fitted: bool,
    pub b: f64,
    /// `a = e^{-α}`.
    pub a: f64,
    pub alpha: f64,
    /// `c = 1/(1+b)`.
    pub c: f64,
    /// Smallest `η` with `log 1/|(B_k)_λ(λ)| >= c φ_Λ(λ) - η` on the truncation.
    pub eta: f64,
    /// `α/(1+b)`, the value the fitted inequality would give if it reached `λ`.
    pub eta_bound: f64,
    /// The `η` bound holds at every truncated point with `(c, eta)`.
    pub holds: bool,
    /// Worst grid point at `b = B_MAX` when the fit fails.
    pub witness: Option<(f64, f64)>,
    pub grid_points: usize,
}

const B_MIN: f64 = 1.0;
const B_MAX: f64 = 8.0;
const B_STEP: f64 = 0.01;

/// Cap on `α`: `a >= 1e-4`.
pub fn alpha_cap() -> f64 {
    -(1e-4f64).ln()
}

fn grid_points(seq: &GeneratedSequence, delta: f64, grid: &HoffmanGrid) -> Vec<DiskPoint> {
    let mut squares = BTreeSet::new();
    for p in &seq.points {
        let home = square_of(p).n as i64;
        for n in (home - grid.levels as i64).max(0)..=home + grid.levels as i64 {
            let n = n as u32;
            let cells = 1u64 << n;
            let kc = ((p.theta() / TAU) * cells as f64).floor() as u64 % cells;
            let s = grid.spread.min(cells / 2);
            for dk in 0..=2 * s {
                squares.insert((n, (kc + cells + dk - s) % cells));
            }
        }
    }
    let m = grid.m;
    let squares: Vec<(u32, u64)> = squares.into_iter().collect();
    let per: Vec<Vec<DiskPoint>> = squares
        .par_iter()
        .map(|&(n, k)| {
            let g0 = 2f64.powi(-(n as i32));
            let step = TAU * g0;
            let mut out = Vec::new();
            for i in 0..m {
                let gap = g0 * 2f64.powf(-(i as f64 + 0.5) / m as f64);
                for t in 0..m {
                    let theta = step * (k as f64 + (t as f64 + 0.5) / m as f64);
                    let z = DiskPoint::from_polar_gap(gap, theta).expect("gap in (0,1)");
                    if seq.points.iter().all(|q| pseudo_distance(&z, q) >= 0.5 * delta) {
                        out.push(z);
                    }
                }
            }
            out
        })
        .collect();
    per.into_iter().flatten().collect()
}

fn neg_log(points: &[DiskPoint], z: &DiskPoint) -> f64 {
    -log_blaschke_at(points, z, None).value()
}

/// Fits `(a, b)` on a grid outside the `δ/2` discs, then derives `(c, η)`.
pub fn hoffman_verify(
    seq: &GeneratedSequence,
    parts: &(GeneratedSequence, GeneratedSequence),
    delta: f64,
    grid: &HoffmanGrid,
) -> Result<HoffmanFit> {
    if grid.m == 0 {
        return Err(invalid("m", "need at least one sample per side"));
    }
    if parts.0.len() + parts.1.len() != seq.len() {
        return Err(invalid("parts", "do not partition the sequence"));
    }
    if parts.0.is_empty() || parts.1.is_empty() {
        return Ok(HoffmanFit {
            fitted: true,
            b: 1.0,
            a: 1.0,
            alpha: 0.0,
            c: 1.0,
            eta: 0.0,
            eta_bound: 0.0,
            holds: true,
            witness: None,
            grid_points: 0,
        });
    }
    let zs = grid_points(seq, delta, grid);
    let xy: Vec<(f64, f64)> =
        zs.par_iter().map(|z| (neg_log(&parts.0.points, z), neg_log(&parts.1.points, z))).collect();
    let alpha_at = |b: f64| -> (f64, usize) {
        let mut best = (0.0, 0);
        for (i, &(x, y)) in xy.iter().enumerate() {
            let v = (y - b * x).max(x / b - y);
            if v > best.0 {
                best = (v, i);
            }
        }
        best
    };
    let steps = ((B_MAX - B_MIN) / B_STEP).round() as usize;
    let cap = alpha_cap();
    let found = (0..=steps).map(|i| B_MIN + i as f64 * B_STEP).find(|&b| alpha_at(b).0 <= cap);
    let Some(b) = found else {
        let (alpha, i) = alpha_at(B_MAX);
        return Ok(HoffmanFit {
            fitted: false,
            b: B_MAX,
            a: (-alpha).exp(),
            alpha,
            c: 1.0 / (1.0 + B_MAX),
            eta: f64::INFINITY,
            eta_bound: f64::INFINITY,
            holds: false,
            witness: Some((zs[i].re(), zs[i].im())),
            grid_points: zs.len(),
        });
    };
    let alpha = alpha_at(b).0;
    let c = 1.0 / (1.0 + b);
    let phi = phi_all(&seq.points)?;
    let phi1 = phi_all(&parts.0.points)?;
    let phi2 = phi_all(&parts.1.points)?;
    // parts keep input order, so walk both in step with the full sequence
    let mut eta: f64 = 0.0;
    let (mut i1, mut i2) = (0, 0);
    for (i, p) in seq.points.iter().enumerate() {
        let own = if i1 < parts.0.len() && parts.0.points[i1].same_as(p) {
            i1 += 1;
            phi1[i1 - 1]
        } else {
            i2 += 1;
            phi2[i2 - 1]
        };
        eta = eta.max(c * phi[i] - own);
    }
    Ok(HoffmanFit {
        fitted: true,
        b,
        a: (-alpha).exp(),
        alpha,
        c,
        eta,
        eta_bound: alpha / (1.0 + b),
        holds: eta.is_finite() && c <= 1.0,
        witness: None,
        grid_points: zs.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::{gen_radial, gen_section6};

    #[test]
    fn radial_alternates_by_stage() {
        let s = gen_radial(0.5, 10).unwrap();
        let (a, b) = hoffman_split(&s, separation_constant(&s.points)).unwrap();
        let sa: Vec<u32> = a.stage_of.iter().map(|x| x.unwrap()).collect();
        let sb: Vec<u32> = b.stage_of.iter().map(|x| x.unwrap()).collect();
        assert_eq!(sa, vec![1, 3, 5, 7, 9]);
        assert_eq!(sb, vec![2, 4, 6, 8, 10]);
    }

    #[test]
    fn empty_and_partition() {
        let e = GeneratedSequence::explicit(vec![]);
        let (a, b) = hoffman_split(&e, 0.5).unwrap();
        assert!(a.is_empty() && b.is_empty());
        let s = gen_section6(1.0, 7).unwrap();
        let d = separation_constant(&s.points);
        let (a, b) = hoffman_split(&s, d).unwrap();
        assert_eq!(a.len() + b.len(), s.len());
        for p in &s.points {
            let hits = a.points.iter().chain(&b.points).filter(|q| q.same_as(p)).count();
            assert_eq!(hits, 1);
        }
        assert!(separation_constant(&a.points) >= d);
        assert!(separation_constant(&b.points) >= d);
    }

    #[test]
    fn split_rejects_insufficient_separation() {
        let s = gen_radial(0.5, 5).unwrap();
        assert!(hoffman_split(&s, 0.99).is_err());
    }

    #[test]
    fn singleton_is_degenerate() {
        let s = GeneratedSequence::explicit(vec![DiskPoint::new(0.3, 0.2).unwrap()]);
        let parts = hoffman_split(&s, 0.5).unwrap();
        let f = hoffman_verify(&s, &parts, 0.5, &HoffmanGrid::default()).unwrap();
        assert!(f.holds && f.c == 1.0 && f.eta == 0.0);
    }

    #[test]
    fn radial_fit_is_finite_and_bound_holds() {
        let s = gen_radial(0.5, 30).unwrap();
        let d = separation_constant(&s.points);
        let parts = hoffman_split(&s, d).unwrap();
        let f = hoffman_verify(&s, &parts, d, &HoffmanGrid::default()).unwrap();
        assert!(f.fitted, "{f:?}");
        assert!(f.holds && f.c <= 1.0 && f.eta.is_finite());
        assert!(f.a > 0.0 && f.a <= 1.0 && f.b >= 1.0);
    }
}
