use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::weight_class::{weight_class_check, WeightClassInput, WeightClassResult};
use crate::error::{invalid, LabError, Result};
use crate::geometry::{neg_log_factor, DiskPoint};
use crate::numerics::{det_par_sum, pairwise_sum};
use crate::orlicz::OrliczShape;
use crate::sequences::{gen_section6, section6_halfwidth, section6_k, separation_constant, tail_bound, StageProfile};

/// Stages beyond which the per-stage bracket gives way to the analytic tail.
pub const DEFAULT_J_FAR: u64 = 1_000_000;
/// Largest stage enumerated point by point.
const MAX_ENUMERATED: u32 = 36;
/// Required `half_width / φ` of the bracket.
const MAX_RELATIVE_WIDTH: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Section6Options {
    /// Stages `<= n + j_offset` are enumerated exactly.
    pub j_offset: u32,
    pub j_far: u64,
}

impl Default for Section6Options {
    fn default() -> Self {
        Self { j_offset: 16, j_far: DEFAULT_J_FAR }
    }
}

/// `φ_Λ(λ_{n,0})` for the untruncated lattice sequence, as a rigorous bracket.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiBracket {
    pub n: u32,
    /// Exact sum over stages `2..=j_enum`.
    pub enumerated: f64,
    pub j_enum: u32,
    pub lower: f64,
    pub upper: f64,
}

impl PhiBracket {
    pub fn mid(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.upper - self.lower)
    }
}

/// Bracket on `Σ_{|l| <= k_j} log 1/|b_{λ_{j,l}}(λ_{n,0})|` for a stage `j != n`.
///
/// The summand decreases in `|θ|` on `[0, π]`, so the lattice sum sits within
/// `f(0)` of `(2/h)∫_0^W f`. With `x = P/D` and `x(1 - x0/2) <= ln(1+x) <= x`, the
/// integral of `P/(2D)` is an arctangent.
pub fn stage_bracket(n: u32, j: u64, epsilon: f64) -> (f64, f64) {
    let gn = 2f64.powi(-(n as i32));
    let gj = 2f64.powi(-(j.min(1100) as i32));
    let w = section6_halfwidth(j, epsilon);
    let d = (gn - gj).abs();
    let s = 2.0 - gn - gj;
    let p = gn * (2.0 - gn) * gj * (2.0 - gj);
    let x0 = p / (d * d);
    let f0 = 0.5 * x0.ln_1p();
    let i1 = 2.0 / (d * s) * ((s / d) * (0.5 * w).tan()).atan();
    let scale = gn * (2.0 - gn) * (2.0 - gj) / TAU;
    let up = scale * i1 + f0;
    let lo = (scale * i1 * (1.0 - 0.5 * x0) - f0).max(0.0);
    (lo, up)
}

/// Analytic bracket for all stages `> big_j`.
fn far_tail(n: u32, big_j: u64, epsilon: f64) -> (f64, f64) {
    let gn = 2f64.powi(-(n as i32));
    let jf = big_j as f64;
    let g_next = 2f64.powf(-(jf + 1.0));
    let shrink = 1.0 - 2f64.powf(n as f64 - jf);
    // (2k_j+1) g_j <= 2/(j ln^{1+ε} j) + g_j and D >= g_n²(1 - 2^{n-J})²
    let upper = (2.0 - gn) / (gn * shrink * shrink) * (2.0 / (epsilon * jf.ln().powf(epsilon)) + 2f64.powf(-jf));
    // D <= g_n² + W_{J+1}², ln(1+x) >= x(1 - x0/2), (2k_j+1) g_j >= 2/(j ln^{1+ε} j) - g_j
    let w = section6_halfwidth(big_j + 1, epsilon);
    let x0 = gn * (2.0 - gn) * 2.0 * g_next / (gn * gn * shrink * shrink);
    let lower = gn * (2.0 - gn) * (2.0 - g_next) / (gn * gn + w * w)
        * (1.0 - 0.5 * x0)
        * (1.0 / (epsilon * (jf + 1.0).ln().powf(epsilon)) - 2f64.powf(-jf));
    (lower.max(0.0), upper)
}

/// Exact `Σ` over the points of stage `j` (skipping `λ_{n,0}` itself).
fn stage_exact(lambda: &DiskPoint, n: u32, j: u32, epsilon: f64) -> f64 {
    let k = section6_k(j, epsilon) as i64;
    let gap = 2f64.powi(-(j as i32));
    let step = TAU * gap;
    det_par_sum((2 * k + 1) as usize, |i| {
        let l = i as i64 - k;
        if j == n && l == 0 {
            return 0.0;
        }
        let mu = DiskPoint::from_polar_gap(gap, step * l as f64).expect("valid gap");
        neg_log_factor(lambda, &mu)
    })
}

/// `φ_Λ(λ_{n,0})` of the full lattice sequence: exact stages up to `n + j_offset`,
/// per-stage brackets up to `j_far`, analytic tail beyond.
pub fn phi_section6_bracket(epsilon: f64, n: u32, opts: &Section6Options) -> Result<PhiBracket> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(invalid("epsilon", format!("must be positive, got {epsilon}")));
    }
    if n < 2 {
        return Err(invalid("n", "stages start at 2"));
    }
    let j_enum = n + opts.j_offset;
    if j_enum > MAX_ENUMERATED {
        return Err(invalid("j_offset", format!("n + j_offset = {j_enum} exceeds {MAX_ENUMERATED}")));
    }
    if opts.j_far <= j_enum as u64 {
        return Err(invalid("j_far", "must exceed n + j_offset"));
    }
    let lambda = DiskPoint::from_polar_gap(2f64.powi(-(n as i32)), 0.0)?;
    let stages: Vec<f64> = (2..=j_enum).map(|j| stage_exact(&lambda, n, j, epsilon)).collect();
    let enumerated = pairwise_sum(&stages);
    let first = j_enum as u64 + 1;
    let count = (opts.j_far - first + 1) as usize;
    let lo_mid = det_par_sum(count, |i| stage_bracket(n, first + i as u64, epsilon).0);
    let hi_mid = det_par_sum(count, |i| stage_bracket(n, first + i as u64, epsilon).1);
    let (lo_far, hi_far) = far_tail(n, opts.j_far, epsilon);
    Ok(PhiBracket { n, enumerated, j_enum, lower: enumerated + lo_mid + lo_far, upper: enumerated + hi_mid + hi_far })
}

/// One row of the point-evaluation table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncompatibilityRow {
    pub n: u32,
    pub k: i64,
    pub re: f64,
    pub im: f64,
    /// `1 - |λ|`.
    pub gap: f64,
    pub phi_lambda: f64,
    pub phi_lower: f64,
    pub phi_upper: f64,
    /// Half-width of the bracket.
    pub tail_bound: f64,
    /// Stage-cutoff bound at `J = n + j_offset` (comparison-constant form).
    pub tail_bound_crude: f64,
    /// `4 / ((1-|λ|) ln^ε ln(1/(1-|λ|)))`.
    pub model: f64,
    /// `φ_Λ / model`.
    pub ratio: f64,
    /// `φ_Λ (1-|λ|) ln^ε ln(1/(1-|λ|))`.
    pub r_stat: f64,
    /// `ψ_ε⁻¹(1/(1-|λ|))`.
    pub psi_inverse: f64,
    /// `φ_Λ / ψ_ε⁻¹(1/(1-|λ|))`.
    pub incompat_ratio: f64,
    pub bound_c0_5: f64,
    pub bound_c1: f64,
    pub bound_c2: f64,
    pub bound_c4: f64,
    /// False for `n` below the asymptotic regime; no conclusion drawn there.
    pub asymptotic: bool,
}

/// Smallest `n` whose row enters the asymptotic comparison.
pub const ASYMPTOTIC_FROM: u32 = 6;

/// `φ_Λ(λ_{n,0})` against the point-evaluation bound `ψ_ε⁻¹(c_f/(1-|λ|))`.
pub fn pointeval_incompatibility(epsilon: f64, ns: &[u32], opts: &Section6Options) -> Result<Vec<IncompatibilityRow>> {
    let psi = OrliczShape::psi(epsilon)?;
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let b = phi_section6_bracket(epsilon, n, opts)?;
        let phi = b.mid();
        if b.half_width() > MAX_RELATIVE_WIDTH * phi {
            return Err(LabError::Precondition(format!(
                "bracket half-width {} exceeds 1% of φ = {phi} at n = {n}",
                b.half_width()
            )));
        }
        let gap = 2f64.powi(-(n as i32));
        let lambda = DiskPoint::from_polar_gap(gap, 0.0)?;
        let crude = tail_bound(&StageProfile::Section6 { epsilon }, &lambda, b.j_enum as u64)?.bound;
        let lnln = (1.0 / gap).ln().ln().powf(epsilon);
        let model = 4.0 / (gap * lnln);
        let pinv = psi.inverse(1.0 / gap);
        rows.push(IncompatibilityRow {
            n,
            k: 0,
            re: lambda.re(),
            im: lambda.im(),
            gap,
            phi_lambda: phi,
            phi_lower: b.lower,
            phi_upper: b.upper,
            tail_bound: b.half_width(),
            tail_bound_crude: crude,
            model,
            ratio: phi / model,
            r_stat: phi * gap * lnln,
            psi_inverse: pinv,
            incompat_ratio: phi / pinv,
            bound_c0_5: psi.inverse(0.5 / gap),
            bound_c1: pinv,
            bound_c2: psi.inverse(2.0 / gap),
            bound_c4: psi.inverse(4.0 / gap),
            asymptotic: n >= ASYMPTOTIC_FROM,
        });
    }
    Ok(rows)
}

/// Everything the lattice example is meant to show, for one `ε`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Section6Report {
    pub epsilon: f64,
    pub options: Section6Options,
    pub rows: Vec<IncompatibilityRow>,
    /// `ψ_{ε/2}` membership of the shadow weight.
    pub weight_half: WeightClassResult,
    /// `ψ_ε` membership of the shadow weight.
    pub weight_full: WeightClassResult,
    /// `(n_max, separation constant of the truncation)`.
    pub separation: Vec<(u32, f64)>,
    /// `(n, c)` with shadow half-width `c(1-|λ|)` equal to half the lattice step.
    pub c_touch: Vec<(u32, f64)>,
}

pub fn section6_report(epsilon: f64, ns: &[u32], opts: &Section6Options) -> Result<Section6Report> {
    if ns.is_empty() {
        return Err(invalid("n_range", "empty"));
    }
    let rows = pointeval_incompatibility(epsilon, ns, opts)?;
    let input = WeightClassInput::Section6Shadow { epsilon };
    let weight_half = weight_class_check(&input, &OrliczShape::psi(0.5 * epsilon)?)?;
    let weight_full = weight_class_check(&input, &OrliczShape::psi(epsilon)?)?;
    let mut separation = Vec::new();
    let mut c_touch = Vec::new();
    for &n in ns {
        let seq = gen_section6(epsilon, n)?;
        separation.push((n, separation_constant(&seq.points)));
        let top = &seq.points[seq.find(n, 0).expect("stage present")];
        c_touch.push((n, 0.5 * TAU * 2f64.powi(-(n as i32)) / top.gap()));
    }
    Ok(Section6Report { epsilon, options: *opts, rows, weight_half, weight_full, separation, c_touch })
}
