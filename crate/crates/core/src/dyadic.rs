//! Whitney dyadic squares, their 4-colouring, per-square minimisers and
//! certified separation bounds between squares.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, LabError, Result};
use crate::geometry::{phi_lambda, pseudo_distance, DiskPoint};
use crate::sequences::GeneratedSequence;

/// `(n, k)` with `0 <= k < 2^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DyadicIndex {
    pub n: u32,
    pub k: u64,
}

impl DyadicIndex {
    pub fn new(n: u32, k: u64) -> Result<Self> {
        if n > 62 || k >= (1u64 << n) {
            return Err(invalid("k", format!("need 0 <= k < 2^{n}, got {k}")));
        }
        Ok(Self { n, k })
    }
}

/// `Q_{n,k} = {r e^{iθ} : 1 - 2^{-n} <= r < 1 - 2^{-n-1}, 2πk 2^{-n} <= θ < 2π(k+1) 2^{-n}}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DyadicSquare {
    pub index: DyadicIndex,
}

impl DyadicSquare {
    pub fn new(index: DyadicIndex) -> Self {
        Self { index }
    }

    pub fn radial_interval(&self) -> (f64, f64) {
        let n = self.index.n as i32;
        (1.0 - 2f64.powi(-n), 1.0 - 2f64.powi(-n - 1))
    }

    pub fn angular_interval(&self) -> (f64, f64) {
        let w = TAU * 2f64.powi(-(self.index.n as i32));
        (w * self.index.k as f64, w * (self.index.k + 1) as f64)
    }

    /// Gap interval `(2^{-n-1}, 2^{-n}]` of `1 - |z|`.
    pub fn gap_interval(&self) -> (f64, f64) {
        let n = self.index.n as i32;
        (2f64.powi(-n - 1), 2f64.powi(-n))
    }

    /// Centre point `z_{n,k}` (mid-radius, mid-angle).
    pub fn center(&self) -> DiskPoint {
        let (g1, g2) = self.gap_interval();
        let (a, b) = self.angular_interval();
        DiskPoint::from_polar_gap(0.5 * (g1 + g2), 0.5 * (a + b)).expect("gap in (0,1]")
    }

    pub fn contains(&self, z: &DiskPoint) -> bool {
        square_of(z) == self.index
    }

    /// `m` points per side along the closed boundary, counter-clockwise.
    pub fn boundary_samples(&self, m: usize) -> Vec<DiskPoint> {
        let m = m.max(2);
        let (g_lo, g_hi) = self.gap_interval();
        let (a, b) = self.angular_interval();
        let mut out = Vec::with_capacity(4 * m);
        let at = |g: f64, t: f64| DiskPoint::from_polar_gap(g, t).expect("gap in (0,1]");
        for i in 0..m {
            let s = i as f64 / m as f64;
            out.push(at(g_hi, a + s * (b - a))); // inner arc
        }
        for i in 0..m {
            let s = i as f64 / m as f64;
            out.push(at(g_hi + s * (g_lo - g_hi), b)); // outgoing radius
        }
        for i in 0..m {
            let s = i as f64 / m as f64;
            out.push(at(g_lo, b - s * (b - a))); // outer arc
        }
        for i in 0..m {
            let s = i as f64 / m as f64;
            out.push(at(g_lo + s * (g_hi - g_lo), a)); // returning radius
        }
        out
    }
}

/// Index of the square containing `z`.
pub fn square_of(z: &DiskPoint) -> DyadicIndex {
    let g = z.gap();
    // 2^{-n-1} < g <= 2^{-n}
    let mut n = (-g.log2()).floor().max(0.0) as i64;
    while n > 0 && g > 2f64.powi(-(n as i32)) {
        n -= 1;
    }
    while g <= 2f64.powi(-(n as i32) - 1) {
        n += 1;
    }
    let n = n as u32;
    let cells = 2f64.powi(n as i32);
    let k = ((z.theta() / TAU) * cells).floor() as u64;
    let k = k.min((1u64 << n.min(62)) - 1);
    DyadicIndex { n, k }
}

/// Colour `1..=4` from `(n mod 2, k mod 2)`.
pub fn color_class(index: DyadicIndex) -> u8 {
    match (index.n % 2, index.k % 2) {
        (0, 0) => 1,
        (0, _) => 2,
        (_, 0) => 3,
        _ => 4,
    }
}

/// Splits a sequence by colour class, preserving order within each part.
pub fn split4(seq: &GeneratedSequence) -> [GeneratedSequence; 4] {
    let colors: Vec<u8> = seq.points.iter().map(|p| color_class(square_of(p))).collect();
    [1u8, 2, 3, 4].map(|c| seq.filter_indices(|i| colors[i] == c))
}

/// Per-square minimiser of `|B_λ(λ)|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SquareMinimizer {
    pub square: DyadicIndex,
    pub point: DiskPoint,
    /// `min |B_λ(λ)|` over the part's points in the square, `B` the full product.
    pub m: f64,
    pub phi: f64,
}

fn coord_key(p: &DiskPoint) -> (u64, u64) {
    (p.re().to_bits(), p.im().to_bits())
}

/// For every occupied square, the point of `part` with the largest `φ_Λ` (full sequence).
///
/// Ties go to the lexicographically smallest `(re, im)`, so the result does not
/// depend on the order of the input lists.
pub fn per_square_minimizer(part: &GeneratedSequence, full: &GeneratedSequence) -> Result<Vec<SquareMinimizer>> {
    let index_of: HashMap<(u64, u64), usize> = full.points.iter().enumerate().map(|(i, p)| (coord_key(p), i)).collect();
    let rows: Vec<(DyadicIndex, DiskPoint, f64)> = part
        .points
        .par_iter()
        .map(|p| {
            let &i = index_of
                .get(&coord_key(p))
                .ok_or_else(|| LabError::Precondition("part is not a subset of the full sequence".into()))?;
            Ok((square_of(p), *p, phi_lambda(&full.points, i)?))
        })
        .collect::<Result<_>>()?;
    let mut best: BTreeMap<DyadicIndex, (DiskPoint, f64)> = BTreeMap::new();
    for (sq, p, phi) in rows {
        let replace = match best.get(&sq) {
            None => true,
            Some((q, f)) => {
                phi > *f
                    || (phi == *f && (p.re(), p.im()).partial_cmp(&(q.re(), q.im())) == Some(std::cmp::Ordering::Less))
            }
        };
        if replace {
            best.insert(sq, (p, phi));
        }
    }
    Ok(best.into_iter().map(|(square, (point, phi))| SquareMinimizer { square, point, m: (-phi).exp(), phi }).collect())
}

/// Certified lower bound on `inf ρ(z, w)` over `z in Q`, `w in L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparationBound {
    pub grid_min: f64,
    pub slack: f64,
    pub bound: f64,
}

/// Grid minimum of `ρ` over the two boundaries minus the largest `ρ`-step
/// between neighbouring samples on each boundary. The sides are radii and
/// concentric arcs, along which `ρ` to the nearest sample is at most that step.
pub fn square_separation(q: &DyadicSquare, l: &DyadicSquare, samples_per_side: usize) -> Result<SeparationBound> {
    if q == l {
        return Err(LabError::Precondition("square_separation needs two distinct squares".into()));
    }
    if color_class(q.index) != color_class(l.index) {
        return Err(LabError::Precondition("squares must share a colour class".into()));
    }
    let a = q.boundary_samples(samples_per_side);
    let b = l.boundary_samples(samples_per_side);
    let step =
        |v: &[DiskPoint]| (0..v.len()).map(|i| pseudo_distance(&v[i], &v[(i + 1) % v.len()])).fold(0.0, f64::max);
    let slack = step(&a) + step(&b);
    let grid_min = a
        .par_iter()
        .map(|z| b.iter().map(|w| pseudo_distance(z, w)).fold(f64::INFINITY, f64::min))
        .reduce(|| f64::INFINITY, f64::min);
    Ok(SeparationBound { grid_min, slack, bound: grid_min - slack })
}
