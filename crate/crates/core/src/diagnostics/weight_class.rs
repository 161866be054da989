use serde::{Deserialize, Serialize};

use super::Verdict;
use crate::error::{invalid, Result};
use crate::harmonic::ArcWeight;
use crate::numerics::det_par_sum;
use crate::orlicz::{modular, OrliczShape, ShapeSpec};

/// What to test for membership in `L^{ψ_δ}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightClassInput {
    /// A finite step weight; the modular is an exact finite sum.
    Explicit { weight: ArcWeight },
    /// Level-set model of the lattice shadow weight:
    /// `Σ_{k>=2} (ψ(k+1) - ψ(k)) / (k ln^{1+ε} k)`.
    Section6Shadow { epsilon: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightClassResult {
    /// Yes: member. No: the modular diverges.
    pub verdict: Verdict,
    /// Bracket on the modular (`+inf` upper when divergent).
    pub modular_lower: f64,
    pub modular_upper: f64,
    /// Exact partial sum up to `k_partial` (series input only).
    pub partial_sum: Option<f64>,
    pub k_partial: Option<u64>,
    /// `ln K` at which the partial sums provably exceed `DIVERGENCE_LEVEL`.
    pub divergence_ln_k: Option<f64>,
}

/// Terms summed exactly before the integral-test bracket.
pub const SERIES_PARTIAL: u64 = 1_000_000;
/// Partial-sum level that certifies divergence.
pub const DIVERGENCE_LEVEL: f64 = 10.0;

/// `∫_a^b u^p du`, `b` may be `+inf` when `p < -1`.
fn power_integral(p: f64, a: f64, b: f64) -> f64 {
    if (p + 1.0).abs() < 1e-15 {
        return (b / a).ln();
    }
    if b.is_infinite() {
        return -a.powf(p + 1.0) / (p + 1.0);
    }
    (b.powf(p + 1.0) - a.powf(p + 1.0)) / (p + 1.0)
}

/// `∫_a^b ψ_δ'(e^u) / u^{1+ε} du` with `ψ_δ'(x) = ln^δ x + δ ln^{δ-1} x`.
fn lower_integrand_integral(delta: f64, epsilon: f64, a: f64, b: f64) -> f64 {
    power_integral(delta - 1.0 - epsilon, a, b) + delta * power_integral(delta - 2.0 - epsilon, a, b)
}

/// Bracket on `Σ_{k>K} (ψ(k+1) - ψ(k)) / (k ln^{1+ε} k)` for `δ < ε`.
///
/// The terms decrease beyond `K`, so the sum lies between the integrals from
/// `K+1` and from `K`; `ψ(x+1) - ψ(x)` sits between `ψ'(x)` and `ψ'(x+1)`, and
/// `ψ'(x+1) <= ψ'(x)(1 + θ/x)` with `θ = δ(1 + |δ-1|/u)/u`.
pub fn series_tail_bracket(delta: f64, epsilon: f64, k: u64) -> Result<(f64, f64)> {
    if !(delta > 0.0 && epsilon > 0.0) {
        return Err(invalid("delta/epsilon", "must be positive"));
    }
    if delta >= epsilon {
        return Ok((f64::INFINITY, f64::INFINITY));
    }
    if k < 1000 {
        return Err(invalid("k", "bracket needs K >= 1000"));
    }
    let kf = k as f64;
    let u = kf.ln();
    let theta = delta * (1.0 + (delta - 1.0).abs() / u) / u;
    let lo = lower_integrand_integral(delta, epsilon, (kf + 1.0).ln(), f64::INFINITY);
    let hi = (1.0 + theta / kf) * lower_integrand_integral(delta, epsilon, u, f64::INFINITY);
    Ok((lo, hi))
}

fn psi_parameter(shape: &OrliczShape) -> Result<f64> {
    match shape.spec() {
        ShapeSpec::PsiEps { epsilon } => Ok(*epsilon),
        other => Err(invalid("shape", format!("series model needs psi:δ, got {other}"))),
    }
}

/// Decides `J_ψ(w) < ∞`.
pub fn weight_class_check(input: &WeightClassInput, shape: &OrliczShape) -> Result<WeightClassResult> {
    match input {
        WeightClassInput::Explicit { weight } => {
            let j = modular(shape, &weight.to_samples());
            Ok(WeightClassResult {
                verdict: if j.is_finite() { Verdict::Yes } else { Verdict::No },
                modular_lower: j,
                modular_upper: j,
                partial_sum: None,
                k_partial: None,
                divergence_ln_k: None,
            })
        }
        WeightClassInput::Section6Shadow { epsilon } => {
            let delta = psi_parameter(shape)?;
            let eps = *epsilon;
            if !(eps > 0.0) {
                return Err(invalid("epsilon", "must be positive"));
            }
            let k_max = SERIES_PARTIAL;
            let partial = det_par_sum((k_max - 1) as usize, |i| {
                let k = (i + 2) as f64;
                (shape.value(k + 1.0) - shape.value(k)) / (k * k.ln().powf(1.0 + eps))
            });
            if delta < eps {
                let (lo, hi) = series_tail_bracket(delta, eps, k_max)?;
                return Ok(WeightClassResult {
                    verdict: Verdict::Yes,
                    modular_lower: partial + lo,
                    modular_upper: partial + hi,
                    partial_sum: Some(partial),
                    k_partial: Some(k_max),
                    divergence_ln_k: None,
                });
            }
            // S_K >= S_{K0} + ∫_{ln(K0+1)}^{ln K} (lower integrand); solve for ln K
            let u0 = (k_max as f64 + 1.0).ln();
            let need = DIVERGENCE_LEVEL - partial;
            let ln_k = if need <= 0.0 {
                Some((k_max as f64).ln())
            } else {
                let reach = |u: f64| lower_integrand_integral(delta, eps, u0, u) >= need;
                if reach(1e300) {
                    let (_, hi) = crate::numerics::bisect_predicate_log(u0, 1e300, 1e-12, reach)?;
                    Some(hi)
                } else {
                    None
                }
            };
            Ok(WeightClassResult {
                verdict: if ln_k.is_some() { Verdict::No } else { Verdict::Undecided },
                modular_lower: partial,
                modular_upper: f64::INFINITY,
                partial_sum: Some(partial),
                k_partial: Some(k_max),
                divergence_ln_k: ln_k,
            })
        }
    }
}
