//! Poisson kernel, harmonic measure of arcs, piecewise-constant boundary
//! weights, balayage of discrete measures and the weight/measure pairing.
//!
//! All boundary integrals use the normalized measure `dm = dθ/2π`.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyadic::DyadicSquare;
use crate::error::{invalid, Result};
use crate::geometry::{normalize_angle, BoundaryAngle, DiskPoint};
use crate::numerics::{det_par_sum, gl8_panel, golden_max, pairwise_sum};
use crate::orlicz::{luxemburg_norm, orlicz_dual_norm, OrliczShape, WeightSamples};
use crate::sequences::GeneratedSequence;

/// `P_z(ζ) = (1 - |z|²)/|ζ - z|²`, integrating to 1 against `dm`.
pub fn poisson_kernel(z: &DiskPoint, zeta: BoundaryAngle) -> f64 {
    poisson_kernel_at(z, zeta.theta())
}

#[inline]
pub(crate) fn poisson_kernel_at(z: &DiskPoint, theta: f64) -> f64 {
    let s = (0.5 * (theta - z.theta())).sin();
    let g = z.gap();
    z.one_minus_mod2() / (g * g + 4.0 * z.modulus() * s * s)
}

/// `∫_0^u P_z(e^{i(α+v)}) dv` for `u` in `[-π, π]`, extended by `F(u + 2π) = F(u) + 2π`.
fn kernel_primitive(z: &DiskPoint, u: f64) -> f64 {
    let k = (u / TAU).round();
    let v = u - k * TAU;
    let g = z.gap();
    let (s, c) = (0.5 * v).sin_cos();
    2.0 * ((2.0 - g) * s).atan2(g * c) + k * TAU
}

/// Harmonic measure at `z` of the arc from `theta1` counter-clockwise to `theta2`.
///
/// The arc length is `theta2 - theta1`, which must lie in `[0, 2π]`; callers
/// with reversed endpoints should add `2π`.
pub fn harmonic_measure_arc(z: &DiskPoint, theta1: f64, theta2: f64) -> f64 {
    let len = theta2 - theta1;
    if len <= 0.0 {
        return 0.0;
    }
    if len >= TAU {
        return 1.0;
    }
    let a = normalize_angle(theta1 - z.theta());
    let a = if a > PI { a - TAU } else { a };
    let b = a + len;
    let w = (kernel_primitive(z, b) - kernel_primitive(z, a)) / TAU;
    w.clamp(0.0, 1.0)
}

/// Piecewise-constant `w >= 0` on the circle.
///
/// Arc `i` is `[breakpoints[i], breakpoints[i+1])`; the last arc wraps to
/// `breakpoints[0] + 2π`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcWeight {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

/// Endpoints closer than this (radians) are treated as the same point.
pub const SNAP: f64 = 1e-14;

impl ArcWeight {
    pub fn constant(c: f64) -> Self {
        Self { breakpoints: vec![0.0], values: vec![c.max(0.0)] }
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    /// `value` on the arc from `theta1` counter-clockwise to `theta2`, 0 elsewhere.
    pub fn indicator(theta1: f64, theta2: f64, value: f64) -> Self {
        let mut len = theta2 - theta1;
        if len < 0.0 {
            len += TAU;
        }
        Self::from_arcs(&[(theta1, len, value)])
    }

    /// Sum of arcs `(start, length, value)`; overlapping arcs add.
    pub fn from_arcs(arcs: &[(f64, f64, f64)]) -> Self {
        let mut base = 0.0;
        let mut events: Vec<(f64, f64)> = Vec::with_capacity(2 * arcs.len() + 2);
        for &(start, len, value) in arcs {
            if !(len > 0.0) || value == 0.0 {
                continue;
            }
            if len >= TAU {
                base += value;
                continue;
            }
            let a = normalize_angle(start);
            let b = a + len;
            events.push((a, value));
            if b < TAU {
                events.push((b, -value));
            } else {
                events.push((TAU, -value));
                events.push((0.0, value));
                events.push((b - TAU, -value));
            }
        }
        events.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut bps = vec![0.0];
        let mut vals = Vec::new();
        let mut level = base;
        let mut i = 0;
        while i < events.len() {
            let pos = events[i].0;
            let mut delta = Vec::new();
            while i < events.len() && events[i].0 - pos <= SNAP {
                delta.push(events[i].1);
                i += 1;
            }
            let new_level = level + pairwise_sum(&delta);
            if pos <= SNAP {
                level = new_level;
                continue;
            }
            if pos >= TAU - SNAP {
                break;
            }
            vals.push(level);
            bps.push(pos);
            level = new_level;
        }
        vals.push(level);
        // add/subtract sweeps leave rounding residue where the true value is 0
        let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for v in &mut vals {
            if *v < 1e-12 * scale {
                *v = 0.0;
            }
        }
        Self::canonical(bps, vals)
    }

    fn canonical(bps: Vec<f64>, vals: Vec<f64>) -> Self {
        let mut b2 = Vec::with_capacity(bps.len());
        let mut v2: Vec<f64> = Vec::with_capacity(vals.len());
        for (b, v) in bps.into_iter().zip(vals) {
            if v2.last() == Some(&v) {
                continue;
            }
            b2.push(b);
            v2.push(v);
        }
        if v2.len() > 1 && v2.first() == v2.last() {
            // the last arc wraps into the first one
            b2.remove(0);
            v2.remove(0);
        }
        Self { breakpoints: b2, values: v2 }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Arcs as `(start, end, value)` with `end > start`, `end - start <= 2π`.
    pub fn arcs(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let n = self.breakpoints.len();
        (0..n).map(move |i| {
            let a = self.breakpoints[i];
            let b = if i + 1 < n { self.breakpoints[i + 1] } else { self.breakpoints[0] + TAU };
            (a, b, self.values[i])
        })
    }

    pub fn value_at(&self, theta: f64) -> f64 {
        let t = normalize_angle(theta);
        let i = self.breakpoints.partition_point(|&b| b <= t);
        if i == 0 {
            *self.values.last().expect("nonempty")
        } else {
            self.values[i - 1]
        }
    }

    /// `(value, arc length / 2π)` for every arc; the modular of an ArcWeight is exact on these.
    pub fn to_samples(&self) -> WeightSamples {
        let (v, m): (Vec<f64>, Vec<f64>) = self.arcs().map(|(a, b, v)| (v, (b - a) / TAU)).unzip();
        WeightSamples { values: v, masses: m }
    }

    /// `∫ w dm`.
    pub fn mean(&self) -> f64 {
        let parts: Vec<f64> = self.arcs().map(|(a, b, v)| v * (b - a) / TAU).collect();
        pairwise_sum(&parts)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { breakpoints: self.breakpoints.clone(), values: self.values.iter().map(|v| v * c).collect() }
    }

    /// Pointwise sum.
    pub fn add(&self, other: &ArcWeight) -> ArcWeight {
        let arcs: Vec<(f64, f64, f64)> = self.arcs().chain(other.arcs()).map(|(a, b, v)| (a, b - a, v)).collect();
        ArcWeight::from_arcs(&arcs)
    }
}

/// `P[w](z) = Σ value_i · ω(z, arc_i)`, exact for piecewise-constant `w`.
pub fn poisson_extension(w: &ArcWeight, z: &DiskPoint) -> f64 {
    let parts: Vec<f64> =
        w.arcs().map(|(a, b, v)| if v == 0.0 { 0.0 } else { v * harmonic_measure_arc(z, a, b) }).collect();
    pairwise_sum(&parts)
}

/// Finite positive atomic measure on the disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMeasure {
    pub atoms: Vec<DiskPoint>,
    pub masses: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(atoms: Vec<DiskPoint>, masses: Vec<f64>) -> Result<Self> {
        if atoms.len() != masses.len() {
            return Err(invalid("masses", "one mass per atom"));
        }
        if masses.iter().any(|&m| !(m > 0.0 && m.is_finite())) {
            return Err(invalid("masses", "masses must be positive and finite"));
        }
        Ok(Self { atoms, masses })
    }

    pub fn dirac(z: DiskPoint) -> Self {
        Self { atoms: vec![z], masses: vec![1.0] }
    }

    pub fn total_mass(&self) -> f64 {
        pairwise_sum(&self.masses)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { atoms: self.atoms.clone(), masses: self.masses.iter().map(|m| m * c).collect() }
    }

    /// `B(μ)(θ) = Σ m_i P_{z_i}(e^{iθ})`.
    pub fn balayage_at(&self, theta: f64) -> f64 {
        let parts: Vec<f64> =
            self.atoms.iter().zip(&self.masses).map(|(z, m)| m * poisson_kernel_at(z, theta)).collect();
        pairwise_sum(&parts)
    }
}

/// Composite 8-point Gauss-Legendre rule on the circle, masses normalized to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryGrid {
    /// Panel endpoints in `[0, 2π]`, increasing, first 0 and last 2π.
    pub panels: Vec<f64>,
    pub nodes: Vec<f64>,
    pub masses: Vec<f64>,
}

impl BoundaryGrid {
    /// `base` uniform panels, graded panels around each atom's argument (panel
    /// width `<= (1-|z|)/2` near the atom, so node spacing `<= (1-|z|)/8`), and
    /// panel breaks at every `extra_breaks` angle.
    pub fn build(base: usize, atoms: &[DiskPoint], extra_breaks: &[f64]) -> Self {
        let base = base.max(8);
        let h = TAU / base as f64;
        let mut breaks: Vec<f64> = (0..=base).map(|i| h * i as f64).collect();
        breaks.extend(extra_breaks.iter().map(|&t| normalize_angle(t)));
        for z in atoms {
            let d = z.gap();
            let alpha = z.theta();
            let mut x = 0.0f64;
            breaks.push(alpha);
            while x < h {
                x += (0.5 * d).max(0.25 * x);
                for t in [alpha + x, alpha - x] {
                    breaks.push(normalize_angle(t));
                }
            }
        }
        breaks.push(TAU);
        breaks.sort_by(f64::total_cmp);
        breaks.dedup_by(|a, b| (*a - *b).abs() <= SNAP);
        if let Some(last) = breaks.last_mut() {
            *last = TAU;
        }
        Self::from_panels(breaks)
    }

    fn from_panels(panels: Vec<f64>) -> Self {
        let mut nodes = Vec::with_capacity(8 * panels.len());
        let mut masses = Vec::with_capacity(8 * panels.len());
        for w in panels.windows(2) {
            gl8_panel(w[0], w[1], &mut nodes, &mut masses);
        }
        for m in &mut masses {
            *m /= TAU;
        }
        Self { panels, nodes, masses }
    }

    /// Every panel split in half.
    pub fn refine(&self) -> Self {
        let mut p = Vec::with_capacity(2 * self.panels.len());
        for w in self.panels.windows(2) {
            p.push(w[0]);
            p.push(0.5 * (w[0] + w[1]));
        }
        p.push(*self.panels.last().expect("nonempty"));
        Self::from_panels(p)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Samples `f` at the nodes, in parallel, node order preserved.
    pub fn sample(&self, f: impl Fn(f64) -> f64 + Sync) -> WeightSamples {
        let values: Vec<f64> = self.nodes.par_iter().map(|&t| f(t)).collect();
        WeightSamples { values, masses: self.masses.clone() }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64 + Sync) -> f64 {
        det_par_sum(self.nodes.len(), |i| self.masses[i] * f(self.nodes[i]))
    }

    /// Cell averages of per-node values as an ArcWeight over the panels.
    pub fn panel_average(&self, values: &[f64]) -> ArcWeight {
        let arcs: Vec<(f64, f64, f64)> = self
            .panels
            .windows(2)
            .enumerate()
            .map(|(p, w)| {
                let mut num = 0.0;
                let mut den = 0.0;
                for j in 8 * p..8 * p + 8 {
                    num += self.masses[j] * values[j];
                    den += self.masses[j];
                }
                (w[0], w[1] - w[0], num / den)
            })
            .collect();
        ArcWeight::from_arcs(&arcs)
    }
}

/// Default number of uniform base panels for balayage grids.
pub const DEFAULT_BASE_PANELS: usize = 2048;

/// `B(μ)` sampled on the graded grid adapted to `μ`.
pub fn balayage(mu: &DiscreteMeasure, base_panels: usize) -> (BoundaryGrid, WeightSamples) {
    let grid = BoundaryGrid::build(base_panels, &mu.atoms, &[]);
    let s = grid.sample(|t| mu.balayage_at(t));
    (grid, s)
}

/// Dual norm of `B(μ)` together with its grid-refinement check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualNormReport {
    pub value: f64,
    /// Same quantity on the grid with every panel halved.
    pub refined: f64,
    pub relative_change: f64,
    /// Optimal Amemiya scale `k`.
    pub k: f64,
    pub nodes: usize,
}

/// `‖B(μ)‖` as a functional on Luxemburg-normed `L^φ`, i.e. the Orlicz norm in `L^{φ*}`.
pub fn balayage_dual_norm(
    mu: &DiscreteMeasure,
    phi: &OrliczShape,
    conj: &OrliczShape,
    base_panels: usize,
) -> Result<DualNormReport> {
    let grid = BoundaryGrid::build(base_panels, &mu.atoms, &[]);
    let fine = grid.refine();
    let b = grid.sample(|t| mu.balayage_at(t));
    let bf = fine.sample(|t| mu.balayage_at(t));
    let (value, k) = orlicz_dual_norm(phi, conj, &b)?;
    let (refined, _) = orlicz_dual_norm(phi, conj, &bf)?;
    Ok(DualNormReport {
        value,
        refined,
        relative_change: (value - refined).abs() / refined.abs().max(f64::MIN_POSITIVE),
        k,
        nodes: grid.len(),
    })
}

/// Luxemburg norm of `B(μ)` in `L^{φ*}` (the smaller of the two standard norms).
pub fn balayage_luxemburg_norm(mu: &DiscreteMeasure, conj: &OrliczShape, base_panels: usize) -> Result<f64> {
    let (_, b) = balayage(mu, base_panels);
    luxemburg_norm(conj, &b)
}

/// `∫ P[w] dμ = Σ m_i P[w](z_i)`.
pub fn pairing(w: &ArcWeight, mu: &DiscreteMeasure) -> f64 {
    let parts: Vec<f64> = mu.atoms.iter().zip(&mu.masses).map(|(z, m)| m * poisson_extension(w, z)).collect();
    pairwise_sum(&parts)
}

/// Best pairing found over the extremal family `w_k = (φ*)'(k B(μ))`, cell
/// averaged and normalized in `L^φ`. Every value is a genuine pairing of an
/// ArcWeight with unit Luxemburg norm, so it is a lower bound for the dual norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AscentResult {
    pub best_ratio: f64,
    pub best_k: f64,
    pub evaluations: usize,
}

pub fn pairing_ascent(
    mu: &DiscreteMeasure,
    phi: &OrliczShape,
    conj: &OrliczShape,
    base_panels: usize,
    iterations: usize,
) -> Result<AscentResult> {
    let grid = BoundaryGrid::build(base_panels, &mu.atoms, &[]);
    let b = grid.sample(|t| mu.balayage_at(t));
    let (_, k_star) = orlicz_dual_norm(phi, conj, &b)?;
    let mut evals = 0usize;
    let mut ratio_at = |lk: f64| -> f64 {
        evals += 1;
        let k = lk.exp();
        let vals: Vec<f64> = b.values.iter().map(|&x| conj.deriv(k * x)).collect();
        let w = grid.panel_average(&vals);
        match luxemburg_norm(phi, &w.to_samples()) {
            Ok(n) if n > 0.0 && n.is_finite() => pairing(&w, mu) / n,
            _ => 0.0,
        }
    };
    let c = k_star.ln();
    let (lk, best) = golden_max(c - 2.0, c + 2.0, iterations, &mut ratio_at);
    Ok(AscentResult { best_ratio: best, best_k: lk.exp(), evaluations: evals })
}

/// Privalov shadow weight `c0 Σ χ_{I_λ}`, `I_λ` of half-width `c (1 - |λ|)` around `arg λ`.
pub fn shadow_weight(seq: &GeneratedSequence, c0: f64, c: f64) -> Result<ArcWeight> {
    if !(c0 > 0.0 && c > 0.0) {
        return Err(invalid("c0/c", "shadow constants must be positive"));
    }
    let arcs: Vec<(f64, f64, f64)> = seq
        .points
        .iter()
        .map(|p| {
            let hw = c * p.gap();
            (p.theta() - hw, 2.0 * hw, c0)
        })
        .collect();
    Ok(ArcWeight::from_arcs(&arcs))
}

/// Harnack constant for a region `{r e^{iθ} : r in [r1, r2], θ in [a, a + width]}`:
/// `u(z') <= e^D u(z)` where `D` bounds its hyperbolic diameter (metric `2|dz|/(1-|z|²)`).
pub fn harnack_region(r1: f64, r2: f64, width: f64) -> f64 {
    let hyp = |r: f64| ((1.0 + r) / (1.0 - r)).ln();
    let radial = hyp(r2) - hyp(r1);
    let arc = 2.0 * r1 * width.min(PI) / (1.0 - r1 * r1);
    let via_path = 2.0 * radial + arc;
    let via_origin = 2.0 * hyp(r2);
    via_path.min(via_origin).exp()
}

/// Harnack constant `c_H` valid for every pair of points of a dyadic square.
pub fn harnack_factor(square: &DyadicSquare) -> f64 {
    let (r1, r2) = square.radial_interval();
    let (a, b) = square.angular_interval();
    harnack_region(r1, r2, b - a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
        fn rec(
            f: &dyn Fn(f64) -> f64,
            a: f64,
            b: f64,
            fa: f64,
            fm: f64,
            fb: f64,
            whole: f64,
            tol: f64,
            depth: u32,
        ) -> f64 {
            let m = 0.5 * (a + b);
            let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
            let (flm, frm) = (f(lm), f(rm));
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
                return left + right + (left + right - whole) / 15.0;
            }
            rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
        let m = 0.5 * (a + b);
        let (fa, fm, fb) = (f(a), f(m), f(b));
        rec(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 50)
    }

    fn p(re: f64, im: f64) -> DiskPoint {
        DiskPoint::new(re, im).unwrap()
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(poisson_kernel(&DiskPoint::origin(), BoundaryAngle::new(1.3)), 1.0);
        assert!((poisson_kernel(&p(0.5, 0.0), BoundaryAngle::new(0.0)) - 3.0).abs() < 1e-15);
        let z = p(0.3, -0.6);
        let total = adaptive_simpson(&|t| poisson_kernel_at(&z, t), 0.0, TAU, 1e-13) / TAU;
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn arc_measure_examples() {
        let o = DiskPoint::origin();
        assert!((harmonic_measure_arc(&o, 0.5, 1.7) - 1.2 / TAU).abs() < 1e-15);
        assert_eq!(harmonic_measure_arc(&p(0.9, 0.1), 0.0, TAU), 1.0);
        let z = p(0.9, 0.0);
        let q = adaptive_simpson(&|t| poisson_kernel_at(&z, t), -0.1, 0.1, 1e-14) / TAU;
        assert!((harmonic_measure_arc(&z, -0.1, 0.1) - q).abs() < 1e-10);
        // additivity over a split
        let (a, m, b) = (5.9, 0.2, 1.4);
        let whole = harmonic_measure_arc(&z, a, b + TAU);
        let parts = harmonic_measure_arc(&z, a, m + TAU) + harmonic_measure_arc(&z, m, b);
        assert!((whole - parts).abs() < 1e-14);
    }

    #[test]
    fn arc_weight_canonical_form() {
        let w = ArcWeight::indicator(6.0, 0.5, 2.0);
        assert_eq!(w.value_at(0.1), 2.0);
        assert_eq!(w.value_at(6.1), 2.0);
        assert_eq!(w.value_at(3.0), 0.0);
        assert!((w.mean() - 2.0 * (0.5 + TAU - 6.0) / TAU).abs() < 1e-15);
        let twice = ArcWeight::from_arcs(&[(1.0, 0.5, 1.0), (1.0, 0.5, 1.0)]);
        assert_eq!(twice.value_at(1.2), 2.0);
        assert_eq!(twice.breakpoints().len(), 2);
        let c = ArcWeight::constant(3.0);
        assert_eq!(c.arcs().count(), 1);
        assert_eq!(ArcWeight::constant(1.0).add(&ArcWeight::constant(1.0)).values(), &[2.0]);
    }

    #[test]
    fn extension_examples() {
        let one = ArcWeight::constant(1.0);
        for z in [p(0.0, 0.0), p(0.99, 0.0), p(-0.3, 0.7)] {
            assert!((poisson_extension(&one, &z) - 1.0).abs() < 1e-15);
        }
        let z = p(0.4, 0.4);
        let w = ArcWeight::indicator(0.3, 1.1, 1.0);
        assert!((poisson_extension(&w, &z) - harmonic_measure_arc(&z, 0.3, 1.1)).abs() < 1e-15);
        // mean value at the origin
        let s = GeneratedSequence::explicit(vec![p(0.5, 0.0), p(0.0, 0.9), p(-0.7, 0.0)]);
        let u = shadow_weight(&s, 2.0, 1.0).unwrap();
        let expect = 2.0 * s.points.iter().map(|q| 2.0 * q.gap() / TAU).sum::<f64>();
        assert!((poisson_extension(&u, &DiskPoint::origin()) - expect).abs() < 1e-14);
    }

    #[test]
    fn extension_additive_over_refinement() {
        let w = ArcWeight::from_arcs(&[(0.2, 1.0, 3.0), (2.0, 0.7, 1.5)]);
        let split = ArcWeight::from_arcs(&[(0.2, 0.4, 3.0), (0.6, 0.6, 3.0), (2.0, 0.7, 1.5)]);
        assert_eq!(w, split);
        let z = p(0.2, 0.5);
        let parts: f64 = w
            .arcs()
            .map(|(a, b, v)| {
                let m = 0.5 * (a + b);
                v * (harmonic_measure_arc(&z, a, m) + harmonic_measure_arc(&z, m, b))
            })
            .sum();
        assert!((poisson_extension(&w, &z) - parts).abs() < 1e-14);
    }

    #[test]
    fn balayage_examples() {
        let d0 = DiscreteMeasure::dirac(DiskPoint::origin());
        assert_eq!(d0.balayage_at(2.0), 1.0);
        let mu = DiscreteMeasure::new(vec![p(0.6, 0.2), DiskPoint::from_polar_gap(1e-3, 2.0).unwrap()], vec![1.0, 2.0])
            .unwrap();
        let (grid, b) = balayage(&mu, 512);
        let total: f64 = b.values.iter().zip(&b.masses).map(|(v, m)| v * m).sum();
        assert!((total - 3.0).abs() < 1e-9);
        for i in 0..100 {
            let t = TAU * i as f64 / 100.0;
            let direct = poisson_kernel_at(&mu.atoms[0], t) + 2.0 * poisson_kernel_at(&mu.atoms[1], t);
            assert!((mu.balayage_at(t) - direct).abs() <= 1e-12 * direct);
        }
        // local spacing near the deep atom
        let near: Vec<f64> = grid.nodes.iter().copied().filter(|t| (t - 2.0).abs() < 5e-3).collect();
        let max_gap = near.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        assert!(max_gap <= 1e-3 / 8.0 * 1.5, "{max_gap}");
    }

    #[test]
    fn pairing_fubini_and_mean_value() {
        let mu = DiscreteMeasure::new(vec![p(0.5, 0.3), p(-0.2, -0.8)], vec![0.7, 1.3]).unwrap();
        assert!((pairing(&ArcWeight::constant(1.0), &mu) - 2.0).abs() < 1e-14);
        let w = ArcWeight::from_arcs(&[(0.1, 1.0, 2.0), (3.0, 2.0, 0.5)]);
        let grid = BoundaryGrid::build(1024, &mu.atoms, w.breakpoints());
        let fub = grid.integrate(|t| w.value_at(t) * mu.balayage_at(t));
        assert!((pairing(&w, &mu) - fub).abs() <= 1e-8 * fub);
        let d0 = DiscreteMeasure::dirac(DiskPoint::origin());
        assert!((pairing(&w, &d0) - w.mean()).abs() < 1e-15);
    }

    #[test]
    fn dual_norm_of_dirac_and_scaling() {
        let psi = OrliczShape::psi(1.0).unwrap();
        let conj = psi.conjugate().unwrap();
        let d0 = DiscreteMeasure::dirac(DiskPoint::origin());
        let lux = balayage_luxemburg_norm(&d0, &conj, 64).unwrap();
        assert!((lux - 1.0 / conj.inverse(1.0)).abs() < 1e-10);
        // for a constant the Orlicz norm is attained by w ≡ φ^{-1}(1)
        let r = balayage_dual_norm(&d0, &psi, &conj, 64).unwrap();
        assert!((r.value - psi.inverse(1.0)).abs() < 1e-9, "{} vs {}", r.value, psi.inverse(1.0));
        let mu = DiscreteMeasure::new(vec![p(0.3, 0.1), p(0.0, -0.9)], vec![1.0, 0.5]).unwrap();
        let a = balayage_dual_norm(&mu, &psi, &conj, 256).unwrap().value;
        let b = balayage_dual_norm(&mu.scaled(2.0), &psi, &conj, 256).unwrap().value;
        assert!((b - 2.0 * a).abs() <= 1e-9 * b);
        let deep = DiscreteMeasure::dirac(DiskPoint::from_polar_gap(2f64.powi(-10), 0.0).unwrap());
        let shallow = DiscreteMeasure::dirac(p(0.5, 0.0));
        let nd = balayage_dual_norm(&deep, &psi, &conj, 256).unwrap();
        let ns = balayage_dual_norm(&shallow, &psi, &conj, 256).unwrap();
        assert!(nd.value > ns.value);
        assert!(nd.relative_change < 1e-6 && ns.relative_change < 1e-6, "{nd:?} {ns:?}");
    }

    #[test]
    fn ascent_stays_below_dual_norm() {
        let psi = OrliczShape::psi(1.0).unwrap();
        let conj = psi.conjugate().unwrap();
        let mu = DiscreteMeasure::new(vec![p(0.3, 0.1), DiskPoint::from_polar_gap(0.01, 4.0).unwrap()], vec![1.0, 0.5])
            .unwrap();
        let dual = balayage_dual_norm(&mu, &psi, &conj, 512).unwrap().value;
        let asc = pairing_ascent(&mu, &psi, &conj, 512, 25).unwrap();
        assert!(asc.best_ratio <= dual * (1.0 + 1e-6), "{} {}", asc.best_ratio, dual);
        assert!(asc.best_ratio >= 0.9 * dual);
    }

    #[test]
    fn harnack_examples() {
        assert_eq!(harnack_region(0.5, 0.5, 0.0), 1.0);
        use crate::dyadic::{DyadicIndex, DyadicSquare};
        let sq = DyadicSquare::new(DyadicIndex::new(3, 1).unwrap());
        let ch = harnack_factor(&sq);
        let (r1, r2) = sq.radial_interval();
        let (a, b) = sq.angular_interval();
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let arcs: Vec<(f64, f64, f64)> =
                (0..3).map(|_| (rng.gen_range(0.0..TAU), rng.gen_range(0.01..3.0), rng.gen_range(0.1..5.0))).collect();
            let w = ArcWeight::from_arcs(&arcs);
            let mut pick = || DiskPoint::from_polar_gap(1.0 - rng.gen_range(r1..r2), rng.gen_range(a..b)).unwrap();
            let (z, zp) = (pick(), pick());
            let (u, up) = (poisson_extension(&w, &z), poisson_extension(&w, &zp));
            if u > 1e-12 {
                assert!(up <= ch * u * (1.0 + 1e-12));
            }
        }
        let band: Vec<f64> =
            (4..20).map(|n| harnack_factor(&DyadicSquare::new(DyadicIndex::new(n, 0).unwrap()))).collect();
        let (lo, hi) = band.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &x| (l.min(x), h.max(x)));
        assert!(hi / lo < 1.2, "{band:?}");
    }
}
