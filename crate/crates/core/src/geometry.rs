//! Points of the disk and circle, Möbius factors and log-domain Blaschke products.
//!
//! A [`DiskPoint`] keeps its polar form and the gap `1 - |z|` next to the
//! Cartesian coordinates. Points built with [`DiskPoint::from_polar_gap`]
//! carry the gap exactly, which is what lets deep points (gap ~ 2^-40) keep
//! full relative accuracy in `1 - |z|^2` and in pseudohyperbolic distances.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::numerics::det_par_sum;

/// Reduces an angle to `[0, 2π)`.
pub fn normalize_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// A point of the unit circle, stored by its argument in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryAngle {
    theta: f64,
}

impl BoundaryAngle {
    pub fn new(theta: f64) -> Self {
        Self { theta: normalize_angle(theta) }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.theta)
    }
}

impl From<BoundaryAngle> for Complex64 {
    fn from(a: BoundaryAngle) -> Self {
        a.to_complex()
    }
}

/// A point of the open unit disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "PointRepr", try_from = "PointRepr")]
pub struct DiskPoint {
    re: f64,
    im: f64,
    r: f64,
    theta: f64,
    gap: f64,
}

#[derive(Serialize, Deserialize)]
struct PointRepr {
    re: f64,
    im: f64,
}

impl From<DiskPoint> for PointRepr {
    fn from(p: DiskPoint) -> Self {
        PointRepr { re: p.re, im: p.im }
    }
}

impl TryFrom<PointRepr> for DiskPoint {
    type Error = LabError;
    fn try_from(p: PointRepr) -> Result<Self> {
        DiskPoint::new(p.re, p.im)
    }
}

impl DiskPoint {
    /// Cartesian constructor; rejects `|z| >= 1` and non-finite input.
    pub fn new(re: f64, im: f64) -> Result<Self> {
        if !re.is_finite() || !im.is_finite() {
            return Err(LabError::OutsideDisk { re, im });
        }
        let r = re.hypot(im);
        if r >= 1.0 {
            return Err(LabError::OutsideDisk { re, im });
        }
        let theta = if r == 0.0 { 0.0 } else { normalize_angle(im.atan2(re)) };
        Ok(Self { re, im, r, theta, gap: 1.0 - r })
    }

    /// Polar constructor from the exact gap `1 - |z|` in `(0, 1]` and an argument.
    pub fn from_polar_gap(gap: f64, theta: f64) -> Result<Self> {
        if !(gap > 0.0 && gap <= 1.0) || !theta.is_finite() {
            return Err(LabError::InvalidParameter {
                name: "gap",
                reason: format!("need 0 < gap <= 1 and finite angle, got gap={gap}, theta={theta}"),
            });
        }
        let r = 1.0 - gap;
        let theta = normalize_angle(theta);
        let (s, c) = theta.sin_cos();
        Ok(Self { re: r * c, im: r * s, r, theta, gap })
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        Self::new(z.re, z.im)
    }

    pub fn origin() -> Self {
        Self { re: 0.0, im: 0.0, r: 0.0, theta: 0.0, gap: 1.0 }
    }

    pub fn re(&self) -> f64 {
        self.re
    }
    pub fn im(&self) -> f64 {
        self.im
    }
    pub fn modulus(&self) -> f64 {
        self.r
    }
    /// Argument in `[0, 2π)`; 0 at the origin.
    pub fn theta(&self) -> f64 {
        self.theta
    }
    /// `1 - |z|`.
    pub fn gap(&self) -> f64 {
        self.gap
    }
    /// `1 - |z|^2`, computed as `gap (2 - gap)`.
    pub fn one_minus_mod2(&self) -> f64 {
        self.gap * (2.0 - self.gap)
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    /// Same coordinates, bit for bit.
    pub fn same_as(&self, other: &DiskPoint) -> bool {
        self.re == other.re && self.im == other.im
    }
}

impl From<DiskPoint> for Complex64 {
    fn from(p: DiskPoint) -> Self {
        p.to_complex()
    }
}

/// Log-modulus of a Blaschke product: a finite value `<= 0` or `-∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LogModulus {
    Finite(f64),
    NegInfinity,
}

impl LogModulus {
    pub fn value(&self) -> f64 {
        match self {
            LogModulus::Finite(v) => *v,
            LogModulus::NegInfinity => f64::NEG_INFINITY,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, LogModulus::Finite(_))
    }
}

/// `b_λ(z) = (|λ|/λ)(λ - z)/(1 - conj(λ) z)`, with `b_0(z) = z`.
pub fn mobius_factor(lambda: &DiskPoint, z: impl Into<Complex64>) -> Complex64 {
    let z = z.into();
    if lambda.r == 0.0 {
        return z;
    }
    let l = lambda.to_complex();
    let unit = Complex64::from_polar(1.0, -lambda.theta);
    unit * (l - z) / (Complex64::new(1.0, 0.0) - l.conj() * z)
}

/// `|z - w|^2` and `(1-|z|^2)(1-|w|^2)` in polar form.
#[inline]
fn d_and_p(z: &DiskPoint, w: &DiskPoint) -> (f64, f64) {
    let s = (0.5 * (z.theta - w.theta)).sin();
    let dg = z.gap - w.gap;
    let d = dg * dg + 4.0 * z.r * w.r * s * s;
    (d, z.one_minus_mod2() * w.one_minus_mod2())
}

/// Pseudohyperbolic distance `ρ(z, w) = |b_w(z)|`.
pub fn pseudo_distance(z: &DiskPoint, w: &DiskPoint) -> f64 {
    if z.same_as(w) {
        return 0.0;
    }
    let (d, p) = d_and_p(z, w);
    if d == 0.0 {
        return 0.0;
    }
    (d / (d + p)).sqrt()
}

/// `log(1/|b_w(z)|) = ½ log(1 + P/D)`; `+∞` when the points coincide.
#[inline]
pub fn neg_log_factor(z: &DiskPoint, w: &DiskPoint) -> f64 {
    if z.same_as(w) {
        return f64::INFINITY;
    }
    let (d, p) = d_and_p(z, w);
    if d == 0.0 {
        return f64::INFINITY;
    }
    0.5 * (p / d).ln_1p()
}

/// `log |B(z)|` over `points`, optionally omitting one index.
///
/// The term vector with `skip = Some(i)` is the term vector of the list with
/// point `i` removed, so both give the same bits.
pub fn log_blaschke_at(points: &[DiskPoint], z: &DiskPoint, skip: Option<usize>) -> LogModulus {
    let n = match skip {
        Some(i) if i < points.len() => points.len() - 1,
        _ => points.len(),
    };
    let s = det_par_sum(n, |i| {
        let j = match skip {
            Some(k) if i >= k => i + 1,
            _ => i,
        };
        neg_log_factor(z, &points[j])
    });
    if s.is_infinite() {
        LogModulus::NegInfinity
    } else {
        // -0.0 would print oddly for an empty product
        LogModulus::Finite(if s == 0.0 { 0.0 } else { -s })
    }
}

/// `φ_Λ(λ_i) = log 1/|B_{λ_i}(λ_i)|`.
pub fn phi_lambda(points: &[DiskPoint], index: usize) -> Result<f64> {
    let z = points.get(index).ok_or_else(|| LabError::InvalidParameter {
        name: "index",
        reason: format!("{index} out of range for {} points", points.len()),
    })?;
    match log_blaschke_at(points, z, Some(index)) {
        LogModulus::Finite(v) => Ok(-v),
        LogModulus::NegInfinity => {
            let second = points
                .iter()
                .enumerate()
                .position(|(j, p)| j != index && neg_log_factor(z, p).is_infinite())
                .unwrap_or(index);
            Err(LabError::CoincidentPoints { first: index, second })
        }
    }
}

/// φ_Λ at every point, in point order.
pub fn phi_all(points: &[DiskPoint]) -> Result<Vec<f64>> {
    use rayon::prelude::*;
    (0..points.len()).into_par_iter().map(|i| phi_lambda(points, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(re: f64, im: f64) -> DiskPoint {
        DiskPoint::new(re, im).unwrap()
    }

    #[test]
    fn rejects_outside() {
        assert!(DiskPoint::new(1.0, 0.0).is_err());
        assert!(DiskPoint::new(0.8, 0.6).is_err());
        assert!(DiskPoint::new(f64::NAN, 0.0).is_err());
        assert!(DiskPoint::from_polar_gap(0.0, 1.0).is_err());
    }

    #[test]
    fn mobius_examples() {
        let l = p(0.5, 0.0);
        assert!(mobius_factor(&l, l).norm() == 0.0);
        let b = mobius_factor(&l, BoundaryAngle::new(1.0));
        assert!((b.norm() - 1.0).abs() < 1e-14);
        let b0 = mobius_factor(&l, DiskPoint::origin());
        assert!((b0 - Complex64::new(0.5, 0.0)).norm() < 1e-16);
        // b_0 is the identity
        let z = p(0.2, -0.3);
        assert_eq!(mobius_factor(&DiskPoint::origin(), z), z.to_complex());
    }

    #[test]
    fn pseudo_distance_examples() {
        assert!((pseudo_distance(&DiskPoint::origin(), &p(0.7, 0.0)) - 0.7).abs() < 1e-15);
        let z = p(0.1, 0.4);
        assert_eq!(pseudo_distance(&z, &z), 0.0);
        let got = pseudo_distance(&p(0.3, 0.0), &p(0.5, 0.0));
        assert!((got - 0.2 / 0.85).abs() < 1e-15);
        assert!((pseudo_distance(&p(0.5, 0.0), &p(-0.5, 0.0)) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn log_blaschke_examples() {
        let one = [p(0.5, 0.0)];
        let v = log_blaschke_at(&one, &DiskPoint::origin(), None).value();
        assert!((v - 0.5f64.ln()).abs() < 1e-15);
        assert_eq!(log_blaschke_at(&one, &one[0], Some(0)), LogModulus::Finite(0.0));
        assert_eq!(log_blaschke_at(&one, &one[0], None), LogModulus::NegInfinity);
        let two = [p(0.5, 0.0), p(-0.5, 0.0)];
        let v = log_blaschke_at(&two, &two[0], Some(0)).value();
        assert!((v - (1.0f64 / 1.25).ln()).abs() < 1e-15);
    }

    #[test]
    fn phi_examples() {
        let two = [p(0.5, 0.0), p(-0.5, 0.0)];
        assert!((phi_lambda(&two, 0).unwrap() - 1.25f64.ln()).abs() < 1e-15);
        assert_eq!(phi_lambda(&[p(0.3, 0.0)], 0).unwrap(), 0.0);
        let rep = [p(0.4, 0.0), p(0.4, 0.0)];
        assert_eq!(phi_lambda(&rep, 0), Err(LabError::CoincidentPoints { first: 0, second: 1 }));
    }

    #[test]
    fn deep_points_keep_relative_accuracy() {
        // gap 2^-40, angle 2^-40 apart: D ≈ g², P ≈ 4g², so rho² ≈ 1/5
        let g = 2f64.powi(-40);
        let a = DiskPoint::from_polar_gap(g, 0.0).unwrap();
        let b = DiskPoint::from_polar_gap(g, g).unwrap();
        let rho = pseudo_distance(&a, &b);
        let expect = 0.2f64.sqrt();
        assert!((rho - expect).abs() < 1e-9, "{rho} vs {expect}");
    }

    fn arb_point() -> impl Strategy<Value = DiskPoint> {
        (0.0f64..0.99, 0.0f64..TAU).prop_map(|(r, t)| DiskPoint::from_polar_gap(1.0 - r, t).unwrap())
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(t in -100.0f64..100.0) {
            let a = normalize_angle(t);
            prop_assert!((0.0..TAU).contains(&a));
            prop_assert_eq!(normalize_angle(a), a);
        }

        #[test]
        fn rho_symmetric_and_bounded(z in arb_point(), w in arb_point()) {
            let a = pseudo_distance(&z, &w);
            let b = pseudo_distance(&w, &z);
            prop_assert_eq!(a, b);
            prop_assert!((0.0..1.0).contains(&a));
        }

        #[test]
        fn rho_matches_factor_modulus(z in arb_point(), w in arb_point()) {
            let direct = mobius_factor(&w, z).norm();
            prop_assert!((pseudo_distance(&z, &w) - direct).abs() < 1e-12);
        }

        #[test]
        fn skip_equals_removal(pts in prop::collection::vec(arb_point(), 1..60), z in arb_point(), i in 0usize..60) {
            let i = i % pts.len();
            let mut removed = pts.clone();
            removed.remove(i);
            let a = log_blaschke_at(&pts, &z, Some(i));
            let b = log_blaschke_at(&removed, &z, None);
            prop_assert_eq!(a.value().to_bits(), b.value().to_bits());
        }

        #[test]
        fn additivity(pts in prop::collection::vec(arb_point(), 1..40), z in arb_point()) {
            let total = log_blaschke_at(&pts, &z, None).value();
            let singles: f64 = pts.iter().map(|p| log_blaschke_at(std::slice::from_ref(p), &z, None).value()).sum();
            prop_assert!((total - singles).abs() <= 1e-12 * (1.0 + singles.abs()));
        }

        #[test]
        fn removing_a_point_never_raises_phi(pts in prop::collection::vec(arb_point(), 3..30), i in 0usize..30, j in 0usize..30) {
            let i = i % pts.len();
            let j = j % pts.len();
            prop_assume!(i != j);
            let before = phi_lambda(&pts, i).unwrap();
            let mut less = pts.clone();
            less.remove(j);
            let ii = if j < i { i - 1 } else { i };
            prop_assert!(phi_lambda(&less, ii).unwrap() <= before);
        }
    }
}
