//! Deterministic reductions and small scalar solvers shared by the rest of the crate.
//!
//! Every floating-point sum in the library goes through [`pairwise_sum`] or
//! [`det_par_sum`]. Both depend only on the ordered input, never on the
//! number of worker threads, so serial and parallel runs agree bit-for-bit.

use rayon::prelude::*;

use crate::error::{LabError, Result};

/// Leaf size of the pairwise tree. Leaves are summed with Neumaier compensation.
const LEAF: usize = 32;

/// Chunk size used by [`det_par_sum`]. Fixed so chunk boundaries never depend on the pool.
pub const CHUNK: usize = 4096;

#[inline]
fn neumaier_leaf(values: &[f64]) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for &v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    if sum.is_finite() {
        sum + comp
    } else {
        // the compensation term is NaN once an infinity has been absorbed
        sum
    }
}

/// Pairwise (tree) summation with compensated leaves, in input order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= LEAF {
        return neumaier_leaf(values);
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Sum of `term(i)` for `i in 0..n`, evaluated in parallel over fixed chunks.
///
/// Chunk partials are combined with [`pairwise_sum`] in chunk order.
pub fn det_par_sum<F>(n: usize, term: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    if n <= CHUNK {
        let v: Vec<f64> = (0..n).map(&term).collect();
        return pairwise_sum(&v);
    }
    let chunks = n.div_ceil(CHUNK);
    let partials: Vec<f64> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(n);
            let v: Vec<f64> = (lo..hi).map(&term).collect();
            pairwise_sum(&v)
        })
        .collect();
    pairwise_sum(&partials)
}

/// Weighted sum `Σ w_i f(x_i)` with deterministic parallel reduction.
pub fn det_par_dot<F>(values: &[f64], weights: &[f64], f: F) -> f64
where
    F: Fn(f64) -> f64 + Sync,
{
    debug_assert_eq!(values.len(), weights.len());
    det_par_sum(values.len(), |i| weights[i] * f(values[i]))
}

/// 8-point Gauss-Legendre rule on [-1, 1]: (nodes, weights).
pub const GL8: ([f64; 8], [f64; 8]) = (
    [
        -0.960_289_856_497_536_2,
        -0.796_666_477_413_626_7,
        -0.525_532_409_916_329_0,
        -0.183_434_642_495_649_8,
        0.183_434_642_495_649_8,
        0.525_532_409_916_329_0,
        0.796_666_477_413_626_7,
        0.960_289_856_497_536_2,
    ],
    [
        0.101_228_536_290_376_3,
        0.222_381_034_453_374_5,
        0.313_706_645_877_887_3,
        0.362_683_783_378_362_0,
        0.362_683_783_378_362_0,
        0.313_706_645_877_887_3,
        0.222_381_034_453_374_5,
        0.101_228_536_290_376_3,
    ],
);

/// Maps the GL8 rule onto `[a, b]`, appending nodes and weights.
pub fn gl8_panel(a: f64, b: f64, nodes: &mut Vec<f64>, weights: &mut Vec<f64>) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    for i in 0..8 {
        nodes.push(mid + half * GL8.0[i]);
        weights.push(half * GL8.1[i]);
    }
}

/// Default iteration cap for every bisection in the crate.
pub const MAX_BISECTION: usize = 200;

/// Bisection for the boundary of a monotone predicate on `(lo, hi)`.
///
/// `pred(lo)` must be false and `pred(hi)` true. Returns the bracket
/// `(lo, hi)` once `hi - lo <= rel_tol * hi` (or the midpoint stops moving).
pub fn bisect_predicate<P>(mut lo: f64, mut hi: f64, rel_tol: f64, mut pred: P) -> Result<(f64, f64)>
where
    P: FnMut(f64) -> bool,
{
    for _ in 0..MAX_BISECTION {
        if hi - lo <= rel_tol * hi.abs() {
            return Ok((lo, hi));
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok((lo, hi));
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Err(LabError::NoConvergence { what: "bisection", iterations: MAX_BISECTION })
}

/// Same as [`bisect_predicate`] but bisects geometrically; `lo` must be positive.
pub fn bisect_predicate_log<P>(mut lo: f64, mut hi: f64, rel_tol: f64, mut pred: P) -> Result<(f64, f64)>
where
    P: FnMut(f64) -> bool,
{
    debug_assert!(lo > 0.0 && hi > lo);
    for _ in 0..MAX_BISECTION {
        if hi - lo <= rel_tol * hi {
            return Ok((lo, hi));
        }
        let mid = lo.sqrt() * hi.sqrt();
        if mid <= lo || mid >= hi {
            return Ok((lo, hi));
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Err(LabError::NoConvergence { what: "geometric bisection", iterations: MAX_BISECTION })
}

/// Golden-section maximisation of a unimodal function on `[a, b]`.
///
/// Returns `(argmax, max)` after `iters` shrink steps; the best value ever seen is kept.
pub fn golden_max<F>(mut a: f64, mut b: f64, iters: usize, mut f: F) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let (mut best_x, mut best_f) = if fc >= fd { (c, fc) } else { (d, fd) };
    for _ in 0..iters {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
            if fc > best_f {
                best_x = c;
                best_f = fc;
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
            if fd > best_f {
                best_x = d;
                best_f = fd;
            }
        }
    }
    (best_x, best_f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_exact_small_integers() {
        let v: Vec<f64> = (1..=1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 500_500.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    #[test]
    fn compensation_recovers_cancellation() {
        let v = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(pairwise_sum(&v), 2.0);
    }

    #[test]
    fn parallel_sum_independent_of_pool_size() {
        let term = |i: usize| ((i as f64) * 0.37).sin() / (1.0 + i as f64);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let eight = rayon::ThreadPoolBuilder::new().num_threads(8).build().unwrap();
        let a = one.install(|| det_par_sum(100_003, term));
        let b = eight.install(|| det_par_sum(100_003, term));
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn gl8_integrates_degree_15_exactly() {
        let (mut x, mut w) = (Vec::new(), Vec::new());
        gl8_panel(0.0, 2.0, &mut x, &mut w);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(15)).sum();
        assert!((s - 2f64.powi(16) / 16.0).abs() < 1e-9);
    }

    #[test]
    fn bisection_finds_sqrt2() {
        let (lo, hi) = bisect_predicate(1.0, 2.0, 1e-14, |x| x * x >= 2.0).unwrap();
        assert!((lo - 2f64.sqrt()).abs() < 1e-13 && hi >= lo);
    }

    #[test]
    fn golden_section_on_parabola() {
        let (x, fx) = golden_max(-3.0, 5.0, 80, |x| -(x - 1.25) * (x - 1.25));
        assert!((x - 1.25).abs() < 1e-7);
        assert!(fx <= 0.0);
    }
}
