//! Orlicz shape functions, modulars, Luxemburg and Orlicz norms, numeric conjugation.
//!
//! Shapes with a logarithmic factor are only convex beyond a point `t0`; below
//! it they are replaced by the power `φ(t0)(t/t0)^p` with `p = t0 φ'(t0)/φ(t0)`,
//! which matches value and slope at `t0` and keeps `φ(0) = 0`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, LabError, Result};
use crate::numerics::{bisect_predicate_log, det_par_sum, MAX_BISECTION};

/// Parameters of a shape; this is what gets serialized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ShapeSpec {
    /// `t^p / p`.
    Power { p: f64 },
    /// `t ln^ε t` beyond `t0 = e^{1+ε}`.
    PsiEps { epsilon: f64 },
    /// `t (ln ln t)^ε` beyond `t0 = e^e`.
    LogLog { epsilon: f64 },
    /// Piecewise-linear table of `e^t - 1` on `[0, 60]`.
    Exp,
    /// Piecewise-linear table through `(0,0)` and the given nodes; last slope continues.
    Table { t: Vec<f64>, phi: Vec<f64> },
    /// Numeric complementary function.
    Conjugate { of: Box<ShapeSpec> },
}

impl fmt::Display for ShapeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShapeSpec::Power { p } => write!(f, "power:{p}"),
            ShapeSpec::PsiEps { epsilon } => write!(f, "psi:{epsilon}"),
            ShapeSpec::LogLog { epsilon } => write!(f, "loglog:{epsilon}"),
            ShapeSpec::Exp => write!(f, "exp"),
            ShapeSpec::Table { t, .. } => write!(f, "table[{}]", t.len()),
            ShapeSpec::Conjugate { of } => write!(f, "conj:{of}"),
        }
    }
}

impl FromStr for ShapeSpec {
    type Err = LabError;

    /// Accepts `power:p`, `psi:ε`, `loglog:ε`, `exp`, `conj:<spec>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: &str| LabError::Spec { kind: "shape", input: s.to_string(), reason: reason.to_string() };
        if let Some(rest) = s.strip_prefix("conj:") {
            return Ok(ShapeSpec::Conjugate { of: Box::new(rest.parse()?) });
        }
        if s == "exp" {
            return Ok(ShapeSpec::Exp);
        }
        let (name, arg) = s.split_once(':').ok_or_else(|| bad("expected family:parameter"))?;
        let x: f64 = arg.trim().parse().map_err(|_| bad("parameter is not a number"))?;
        match name {
            "power" => Ok(ShapeSpec::Power { p: x }),
            "psi" => Ok(ShapeSpec::PsiEps { epsilon: x }),
            "loglog" => Ok(ShapeSpec::LogLog { epsilon: x }),
            _ => Err(bad("unknown family")),
        }
    }
}

impl ShapeSpec {
    pub fn build(&self) -> Result<OrliczShape> {
        OrliczShape::new(self.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Base {
    Psi(f64),
    LogLog(f64),
}

impl Base {
    fn value(self, t: f64) -> f64 {
        match self {
            Base::Psi(e) => t * t.ln().powf(e),
            Base::LogLog(e) => t * t.ln().ln().powf(e),
        }
    }

    fn deriv(self, t: f64) -> f64 {
        match self {
            Base::Psi(e) => {
                let l = t.ln();
                l.powf(e) + e * l.powf(e - 1.0)
            }
            Base::LogLog(e) => {
                let l = t.ln();
                let u = l.ln();
                u.powf(e) + e * u.powf(e - 1.0) / l
            }
        }
    }
}

#[derive(Debug, Clone)]
enum Kind {
    Power { p: f64 },
    Spliced { base: Base, t0: f64, v0: f64, d0: f64, p: f64 },
    Table { t: Vec<f64>, v: Vec<f64>, slope: Vec<f64> },
    Conjugate(Arc<ConjugateTable>),
}

/// A convex nondecreasing `φ: [0, ∞) → [0, ∞)` with `φ(0) = 0`.
#[derive(Debug, Clone)]
pub struct OrliczShape {
    spec: ShapeSpec,
    kind: Kind,
}

impl Serialize for OrliczShape {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Meta<'a> {
            #[serde(flatten)]
            spec: &'a ShapeSpec,
            splice_point: f64,
        }
        Meta { spec: &self.spec, splice_point: self.splice_point() }.serialize(s)
    }
}

fn exp_table() -> (Vec<f64>, Vec<f64>) {
    let t: Vec<f64> = (0..=3840).map(|i| i as f64 / 64.0).collect();
    let v = t.iter().map(|x| x.exp_m1()).collect();
    (t, v)
}

impl OrliczShape {
    pub fn new(spec: ShapeSpec) -> Result<Self> {
        let kind = match &spec {
            ShapeSpec::Power { p } => {
                if !(*p >= 1.0 && p.is_finite()) {
                    return Err(invalid("p", format!("power shape needs p >= 1, got {p}")));
                }
                Kind::Power { p: *p }
            }
            ShapeSpec::PsiEps { epsilon } | ShapeSpec::LogLog { epsilon } => {
                if !(*epsilon > 0.0 && epsilon.is_finite()) {
                    return Err(invalid("epsilon", format!("must be positive, got {epsilon}")));
                }
                let (base, t0) = match spec {
                    ShapeSpec::PsiEps { .. } => (Base::Psi(*epsilon), (1.0 + epsilon).exp()),
                    _ => (Base::LogLog(*epsilon), std::f64::consts::E.exp()),
                };
                let v0 = base.value(t0);
                let d0 = base.deriv(t0);
                Kind::Spliced { base, t0, v0, d0, p: t0 * d0 / v0 }
            }
            ShapeSpec::Exp => {
                let (t, v) = exp_table();
                table_kind(t, v)?
            }
            ShapeSpec::Table { t, phi } => {
                let mut tt = vec![0.0];
                let mut vv = vec![0.0];
                tt.extend_from_slice(t);
                vv.extend_from_slice(phi);
                table_kind(tt, vv)?
            }
            ShapeSpec::Conjugate { of } => {
                let base = of.build()?;
                Kind::Conjugate(Arc::new(ConjugateTable::build(&base)?))
            }
        };
        Ok(Self { spec, kind })
    }

    pub fn power(p: f64) -> Result<Self> {
        Self::new(ShapeSpec::Power { p })
    }

    pub fn psi(epsilon: f64) -> Result<Self> {
        Self::new(ShapeSpec::PsiEps { epsilon })
    }

    pub fn loglog(epsilon: f64) -> Result<Self> {
        Self::new(ShapeSpec::LogLog { epsilon })
    }

    pub fn exp_table() -> Self {
        Self::new(ShapeSpec::Exp).expect("static table is convex")
    }

    pub fn spec(&self) -> &ShapeSpec {
        &self.spec
    }

    /// Point below which the shape is the power replacement (0 if none).
    pub fn splice_point(&self) -> f64 {
        match &self.kind {
            Kind::Spliced { t0, .. } => *t0,
            _ => 0.0,
        }
    }

    /// Exponent of the power replacement on `[0, t0]`.
    pub fn splice_exponent(&self) -> Option<f64> {
        match &self.kind {
            Kind::Spliced { p, .. } => Some(*p),
            _ => None,
        }
    }

    /// `φ(t)`; 0 for `t <= 0`. May be `+∞` for a tabulated conjugate.
    pub fn value(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match &self.kind {
            Kind::Power { p } => t.powf(*p) / p,
            Kind::Spliced { base, t0, v0, p, .. } => {
                if t < *t0 {
                    v0 * (t / t0).powf(*p)
                } else {
                    base.value(t)
                }
            }
            Kind::Table { t: nodes, v, slope } => {
                let i = nodes.partition_point(|&x| x <= t) - 1;
                v[i] + slope[i] * (t - nodes[i])
            }
            Kind::Conjugate(c) => c.value(t),
        }
    }

    /// Right derivative `φ'(t)`.
    pub fn deriv(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        match &self.kind {
            Kind::Power { p } => {
                if *p == 1.0 {
                    1.0
                } else {
                    t.powf(p - 1.0)
                }
            }
            Kind::Spliced { base, t0, d0, p, .. } => {
                if t < *t0 {
                    d0 * (t / t0).powf(p - 1.0)
                } else {
                    base.deriv(t)
                }
            }
            Kind::Table { t: nodes, slope, .. } => {
                let i = nodes.partition_point(|&x| x <= t) - 1;
                slope[i]
            }
            Kind::Conjugate(c) => c.deriv(t),
        }
    }

    /// `sup φ'`; infinite for superlinear shapes.
    pub fn sup_derivative(&self) -> f64 {
        match &self.kind {
            Kind::Power { p } if *p == 1.0 => 1.0,
            Kind::Table { slope, .. } => *slope.last().expect("nonempty"),
            _ => f64::INFINITY,
        }
    }

    /// `φ^{-1}(u)`, the smallest `t` with `φ(t) = u`.
    pub fn inverse(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        if u.is_infinite() {
            return f64::INFINITY;
        }
        match &self.kind {
            Kind::Power { p } => (p * u).powf(1.0 / p),
            Kind::Spliced { base, t0, v0, p, .. } => {
                if u <= *v0 {
                    t0 * (u / v0).powf(1.0 / p)
                } else {
                    // base(t) >= t beyond t0, so the root lies in [t0, u]
                    let b = *base;
                    refine_root(*t0, u.max(*t0 * 2.0), |t| b.value(t) >= u)
                }
            }
            Kind::Table { t, v, slope } => {
                let i = v.partition_point(|&x| x < u).max(1) - 1;
                if slope[i] == 0.0 {
                    return t[i + 1];
                }
                t[i] + (u - v[i]) / slope[i]
            }
            Kind::Conjugate(c) => c.inverse(u),
        }
    }

    /// A maximiser `t` of `s t - φ(t)`, i.e. a solution of `φ'(t) = s`.
    /// Infinite when `s` exceeds `sup φ'`.
    pub fn deriv_inverse(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        match &self.kind {
            Kind::Power { p } => {
                if *p == 1.0 {
                    if s <= 1.0 {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                } else {
                    s.powf(1.0 / (p - 1.0))
                }
            }
            Kind::Spliced { base, t0, d0, p, .. } => {
                if s <= *d0 {
                    t0 * (s / d0).powf(1.0 / (p - 1.0))
                } else {
                    let b = *base;
                    let mut hi = *t0 * 2.0;
                    while b.deriv(hi) < s {
                        hi *= 16.0;
                        if !hi.is_finite() {
                            return f64::INFINITY;
                        }
                    }
                    refine_root(*t0, hi, |t| b.deriv(t) >= s)
                }
            }
            Kind::Table { t, slope, .. } => {
                let i = slope.partition_point(|&x| x < s);
                if i >= slope.len() {
                    f64::INFINITY
                } else {
                    t[i]
                }
            }
            Kind::Conjugate(c) => c.deriv_inverse(s),
        }
    }

    /// The complementary shape `φ*`, tabulated.
    pub fn conjugate(&self) -> Result<OrliczShape> {
        Ok(OrliczShape {
            spec: ShapeSpec::Conjugate { of: Box::new(self.spec.clone()) },
            kind: Kind::Conjugate(Arc::new(ConjugateTable::build(self)?)),
        })
    }

    /// `φ*(s)` with an error when the conjugate is infinite because `φ'` is bounded.
    pub fn conjugate_value(&self, s: f64) -> Result<f64> {
        let sup = self.sup_derivative();
        if s > sup {
            return Err(LabError::ConjugateInfinite { s, sup });
        }
        let t = self.deriv_inverse(s);
        Ok(s * t - self.value(t))
    }

    /// Interpolation error estimate of a tabulated conjugate (0 otherwise).
    pub fn table_error(&self) -> f64 {
        match &self.kind {
            Kind::Conjugate(c) => c.max_rel_error,
            _ => 0.0,
        }
    }
}

fn table_kind(t: Vec<f64>, v: Vec<f64>) -> Result<Kind> {
    if t.len() != v.len() || t.len() < 2 {
        return Err(invalid("table", "need matching node and value lists"));
    }
    if t[0] != 0.0 || v[0] != 0.0 {
        return Err(invalid("table", "must start at (0, 0)"));
    }
    let mut slope = Vec::with_capacity(t.len());
    for i in 0..t.len() - 1 {
        if !(t[i + 1] > t[i]) {
            return Err(invalid("table", "nodes must increase strictly"));
        }
        slope.push((v[i + 1] - v[i]) / (t[i + 1] - t[i]));
    }
    if slope.windows(2).any(|w| w[1] < w[0] * (1.0 - 1e-12)) || slope[0] < 0.0 {
        return Err(invalid("table", "values must be convex and nondecreasing"));
    }
    slope.push(*slope.last().expect("at least one segment"));
    Ok(Kind::Table { t, v, slope })
}

/// Geometric bisection down to a few ulps; the predicate is monotone.
fn refine_root(lo: f64, hi: f64, pred: impl FnMut(f64) -> bool) -> f64 {
    match bisect_predicate_log(lo, hi, 4.0 * f64::EPSILON, pred) {
        Ok((_, h)) => h,
        Err(_) => hi,
    }
}

/// Nodes `(s_i, φ*(s_i), t*(s_i))` with cubic Hermite values between nodes.
#[derive(Debug, Clone)]
pub struct ConjugateTable {
    s: Vec<f64>,
    v: Vec<f64>,
    d: Vec<f64>,
    /// Exponent of the power-law continuation below the first node.
    q0: f64,
    /// Largest relative gap between the Hermite value and the exact Legendre value at segment midpoints.
    pub max_rel_error: f64,
}

const CONJ_VALUE_CAP: f64 = 1e200;
const CONJ_MAX_NODES: usize = 2_000_000;

impl ConjugateTable {
    pub fn build(base: &OrliczShape) -> Result<Self> {
        let sup = base.sup_derivative();
        let s_ref = base.deriv(1.0).min(sup * 0.5);
        if !(s_ref > 0.0) {
            return Err(invalid("shape", "derivative vanishes at t = 1; cannot scale the conjugate table"));
        }
        let legendre = |s: f64| {
            let t = base.deriv_inverse(s);
            (s * t - base.value(t), t)
        };
        // the splice makes φ'' jump at t0; a node at φ'(t0) keeps Hermite accuracy there
        let kink = match base.splice_point() {
            t0 if t0 > 0.0 => base.deriv(t0),
            _ => f64::NAN,
        };
        let mut s = 1e-8 * s_ref;
        let (mut s_v, mut v_v, mut d_v) = (Vec::new(), Vec::new(), Vec::new());
        loop {
            let (v, t) = legendre(s);
            if !v.is_finite() || !t.is_finite() {
                break;
            }
            s_v.push(s);
            v_v.push(v.max(0.0));
            d_v.push(t);
            if v > CONJ_VALUE_CAP || s_v.len() >= CONJ_MAX_NODES {
                break;
            }
            let step = if v > 0.0 && t > 0.0 { (0.005 * s).min(0.01 * v / t) } else { 0.005 * s };
            let mut next = s + step;
            if s < kink && next > kink {
                next = kink;
            }
            if next >= sup {
                // bounded derivative: finish just below the supremum
                let last = sup * (1.0 - 1e-12);
                if last > s {
                    let (v, t) = legendre(last);
                    if v.is_finite() && t.is_finite() {
                        s_v.push(last);
                        v_v.push(v);
                        d_v.push(t);
                    }
                }
                break;
            }
            s = next;
        }
        if s_v.len() < 4 {
            return Err(invalid("shape", "conjugate table has too few nodes"));
        }
        let q0 = if v_v[0] > 0.0 { s_v[0] * d_v[0] / v_v[0] } else { 2.0 };
        let mut table = ConjugateTable { s: s_v, v: v_v, d: d_v, q0, max_rel_error: 0.0 };
        let n = table.s.len();
        let err = (0..n - 1)
            .map(|i| {
                let m = 0.5 * (table.s[i] + table.s[i + 1]);
                let (exact, _) = legendre(m);
                let got = table.value(m);
                if exact > 0.0 {
                    (got - exact).abs() / exact
                } else {
                    0.0
                }
            })
            .fold(0.0, f64::max);
        table.max_rel_error = err;
        Ok(table)
    }

    fn segment(&self, s: f64) -> usize {
        (self.s.partition_point(|&x| x <= s).max(1) - 1).min(self.s.len() - 2)
    }

    pub fn value(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        if s < self.s[0] {
            return self.v[0] * (s / self.s[0]).powf(self.q0);
        }
        if s > *self.s.last().expect("nonempty") {
            return f64::INFINITY;
        }
        let i = self.segment(s);
        let h = self.s[i + 1] - self.s[i];
        let x = (s - self.s[i]) / h;
        let x2 = x * x;
        let x3 = x2 * x;
        (2.0 * x3 - 3.0 * x2 + 1.0) * self.v[i]
            + (x3 - 2.0 * x2 + x) * h * self.d[i]
            + (-2.0 * x3 + 3.0 * x2) * self.v[i + 1]
            + (x3 - x2) * h * self.d[i + 1]
    }

    /// Linear interpolation of `t*`; monotone by construction.
    pub fn deriv(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        if s < self.s[0] {
            return self.q0 * self.v[0] / self.s[0] * (s / self.s[0]).powf(self.q0 - 1.0);
        }
        if s > *self.s.last().expect("nonempty") {
            return f64::INFINITY;
        }
        let i = self.segment(s);
        let x = (s - self.s[i]) / (self.s[i + 1] - self.s[i]);
        self.d[i] + x * (self.d[i + 1] - self.d[i])
    }

    pub fn deriv_inverse(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let d0 = self.q0 * self.v[0] / self.s[0];
        if t < d0 {
            return self.s[0] * (t / d0).powf(1.0 / (self.q0 - 1.0));
        }
        if t > *self.d.last().expect("nonempty") {
            return f64::INFINITY;
        }
        let i = (self.d.partition_point(|&x| x <= t).max(1) - 1).min(self.d.len() - 2);
        let span = self.d[i + 1] - self.d[i];
        if span <= 0.0 {
            return self.s[i];
        }
        self.s[i] + (t - self.d[i]) / span * (self.s[i + 1] - self.s[i])
    }

    pub fn inverse(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        if u < self.v[0] {
            return self.s[0] * (u / self.v[0]).powf(1.0 / self.q0);
        }
        if u > *self.v.last().expect("nonempty") {
            return f64::INFINITY;
        }
        let i = (self.v.partition_point(|&x| x < u).max(1) - 1).min(self.v.len() - 2);
        let (mut lo, mut hi) = (self.s[i], self.s[i + 1]);
        for _ in 0..MAX_BISECTION {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.value(mid) >= u {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }
}

/// Boundary function sampled with quadrature masses (a probability measure on the circle).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct WeightSamples {
    pub values: Vec<f64>,
    pub masses: Vec<f64>,
}

impl WeightSamples {
    pub fn new(values: Vec<f64>, masses: Vec<f64>) -> Result<Self> {
        if values.len() != masses.len() {
            return Err(invalid("samples", "values and masses differ in length"));
        }
        if masses.iter().any(|&m| !(m >= 0.0)) {
            return Err(invalid("samples", "masses must be nonnegative"));
        }
        Ok(Self { values, masses })
    }

    /// The constant function `c` on the whole circle.
    pub fn constant(c: f64) -> Self {
        Self { values: vec![c], masses: vec![1.0] }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { values: self.values.iter().map(|v| v * c).collect(), masses: self.masses.clone() }
    }

    pub fn total_mass(&self) -> f64 {
        det_par_sum(self.masses.len(), |i| self.masses[i])
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().zip(&self.masses).filter(|(_, &m)| m > 0.0).map(|(v, _)| v.abs()).fold(0.0, f64::max)
    }

    pub fn integral_abs(&self) -> f64 {
        det_par_sum(self.values.len(), |i| self.masses[i] * self.values[i].abs())
    }

    /// `∫ u v dm` against another sampling on the same nodes.
    pub fn dot(&self, other: &WeightSamples) -> f64 {
        debug_assert_eq!(self.values.len(), other.values.len());
        det_par_sum(self.values.len(), |i| self.masses[i] * self.values[i] * other.values[i])
    }
}

/// `J_φ(w) = ∫ φ(|w|) dm`.
pub fn modular(shape: &OrliczShape, w: &WeightSamples) -> f64 {
    det_par_sum(w.values.len(), |i| {
        let m = w.masses[i];
        if m == 0.0 {
            0.0
        } else {
            m * shape.value(w.values[i].abs())
        }
    })
}

/// Relative tolerance of every norm bisection (tighter than the 1e-10 contract).
pub const NORM_TOL: f64 = 1e-13;

/// Luxemburg norm `inf{t > 0 : J_φ(w/t) <= 1}`.
pub fn luxemburg_norm(shape: &OrliczShape, w: &WeightSamples) -> Result<f64> {
    let max = w.max_abs();
    if max == 0.0 {
        return Ok(0.0);
    }
    let mass = w.total_mass();
    let mean = w.integral_abs() / mass;
    // Jensen gives J(w/t) >= M φ(mean/t); the sup bound gives J(w/t) <= M φ(max/t)
    let lo = mean / shape.inverse(1.0 / mass) * (1.0 - 1e-9);
    let hi = max / shape.inverse(1.0 / mass) * (1.0 + 1e-9);
    if !(lo > 0.0 && hi.is_finite()) {
        return Err(invalid("weight", "norm bracket degenerate"));
    }
    let pred = |t: f64| modular(shape, &w.scaled(1.0 / t)) <= 1.0;
    if pred(lo) {
        return Ok(lo);
    }
    let (_, h) = bisect_predicate_log(lo, hi, NORM_TOL, pred)?;
    Ok(h)
}

/// `Φ(x) = φ(log⁺ x)`.
pub fn log_composed(shape: &OrliczShape, x: f64) -> f64 {
    if x <= 1.0 {
        0.0
    } else {
        shape.value(x.ln())
    }
}

/// `J_Φ(f) = ∫ φ(log⁺|f|) dm`.
pub fn log_modular(shape: &OrliczShape, f: &WeightSamples) -> f64 {
    det_par_sum(f.values.len(), |i| f.masses[i] * log_composed(shape, f.values[i].abs()))
}

/// F-norm `inf{t > 0 : J_Φ(f/t) <= t}` with `Φ = φ ∘ log⁺`.
pub fn fnorm(shape: &OrliczShape, f: &WeightSamples) -> Result<f64> {
    let max = f.max_abs();
    if max == 0.0 {
        return Ok(0.0);
    }
    let pred = |t: f64| log_modular(shape, &f.scaled(1.0 / t)) <= t;
    let hi = max.max(1.0);
    let mut lo = hi * 0.5;
    let mut guard = 0;
    while pred(lo) {
        lo *= 1e-3;
        guard += 1;
        if guard > 100 || lo < 1e-300 {
            return Ok(lo);
        }
    }
    let (_, h) = bisect_predicate_log(lo, hi, NORM_TOL, pred)?;
    Ok(h)
}

/// Orlicz (Amemiya) norm of `v` in `L^{φ*}`: `inf_k (1 + J_{φ*}(k v))/k`.
///
/// This is the norm of `v` as a functional on Luxemburg-normed `L^φ`. The
/// optimal `k` solves `J_φ((φ*)'(k|v|)) = 1`; returns `(norm, k)`.
pub fn orlicz_dual_norm(phi: &OrliczShape, conj: &OrliczShape, v: &WeightSamples) -> Result<(f64, f64)> {
    if v.max_abs() == 0.0 {
        return Ok((0.0, 0.0));
    }
    let g = |k: f64| det_par_sum(v.values.len(), |i| v.masses[i] * phi.value(conj.deriv(k * v.values[i].abs())));
    let mut lo = 1.0 / v.max_abs();
    while g(lo) > 1.0 {
        lo *= 0.5;
        if lo < 1e-300 {
            return Err(invalid("weight", "dual norm bracket underflow"));
        }
    }
    let mut hi = lo * 2.0;
    while g(hi) < 1.0 {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(invalid("weight", "dual norm bracket overflow"));
        }
    }
    let (_, k) = bisect_predicate_log(lo, hi, NORM_TOL, |k| g(k) >= 1.0)?;
    let jc = det_par_sum(v.values.len(), |i| v.masses[i] * conj.value(k * v.values[i].abs()));
    Ok(((1.0 + jc) / k, k))
}

/// Outcome of a Δ₂ or ∇₂ probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionProbeResult {
    pub holds: bool,
    /// `(M, K)` for Δ₂, `(d, t0)` for ∇₂.
    pub constants: (f64, f64),
    /// Probe point where the inequality is tightest (or fails worst).
    pub witness: f64,
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Largest admissible Δ₂ constant `M`.
pub const DELTA2_CAP: f64 = 1e3;
/// Largest admissible ∇₂ constant `d`.
pub const NABLA2_CAP: f64 = 64.0;

/// Fits `φ(2t) <= M φ(t) + K` on a log grid over `t_range`.
///
/// `M` is the largest ratio `φ(2t)/φ(t)` over the upper half of the grid (the
/// growth regime), `K` absorbs the lower half.
pub fn delta2_probe(shape: &OrliczShape, t_range: (f64, f64)) -> ConditionProbeResult {
    let grid = log_grid(t_range.0, t_range.1, 400);
    let half = grid.len() / 2;
    let (mut m, mut witness) = (0.0f64, grid[half]);
    for &t in &grid[half..] {
        let r = shape.value(2.0 * t) / shape.value(t);
        if r > m {
            m = r;
            witness = t;
        }
    }
    let k = grid.iter().map(|&t| shape.value(2.0 * t) - m * shape.value(t)).fold(0.0f64, f64::max);
    ConditionProbeResult { holds: m <= DELTA2_CAP && m.is_finite(), constants: (m, k), witness }
}

/// Fits `2φ(t) <= φ(d t)/d` for `t >= t0` with `d <= 64` on a log grid over `t_range`.
///
/// For each candidate `d` the smallest grid `t0` beyond which the inequality
/// holds is found; the probe succeeds when some `d` works from the lower half
/// of the range onward.
pub fn nabla2_probe(shape: &OrliczShape, t_range: (f64, f64)) -> ConditionProbeResult {
    let grid = log_grid(t_range.0, t_range.1, 400);
    let half = grid.len() / 2;
    let ds = log_grid(1.05, NABLA2_CAP, 120);
    let mut worst = (f64::INFINITY, grid[grid.len() - 1]);
    for &d in &ds {
        let ok = |t: f64| 2.0 * shape.value(t) <= shape.value(d * t) / d;
        let first_bad_from_top = grid.iter().rposition(|&t| !ok(t));
        match first_bad_from_top {
            None => return ConditionProbeResult { holds: true, constants: (d, grid[0]), witness: grid[0] },
            Some(i) if i < half => {
                return ConditionProbeResult { holds: true, constants: (d, grid[i + 1]), witness: grid[i] }
            }
            Some(i) => {
                let t = grid[i];
                let slack = shape.value(d * t) / (d * shape.value(t));
                if slack < worst.0 {
                    worst = (slack, t);
                }
            }
        }
    }
    ConditionProbeResult { holds: false, constants: (NABLA2_CAP, f64::NAN), witness: worst.1 }
}

/// `φ^{-1}(u)` together with the ratio `φ^{-1}(u) ln^ε(u) / u` for log-type shapes.
pub fn inverse_growth(shape: &OrliczShape, u: f64) -> (f64, Option<f64>) {
    let inv = shape.inverse(u);
    let ratio = match shape.spec() {
        ShapeSpec::PsiEps { epsilon } => Some(inv * u.ln().powf(*epsilon) / u),
        ShapeSpec::LogLog { epsilon } => Some(inv * u.ln().ln().powf(*epsilon) / u),
        _ => None,
    };
    (inv, ratio)
}
