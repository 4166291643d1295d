//! Extreme eigenvalues of symmetric operators.
//!
//! Lanczos with full reorthogonalization, started from the all-ones vector
//! plus a small index-dependent perturbation. The Krylov space after `k`
//! steps contains the `k`-th power iterate, so the extreme Ritz values are
//! never worse than the power-method Rayleigh quotients for the same work.
//! Ritz values of the tridiagonal are located by Sturm-sequence bisection.
//! When the recurrence breaks down (an invariant subspace was found) the
//! iteration continues from a fresh deterministic vector orthogonal to the
//! basis, so eigenvalues outside that subspace are still reached.

use crate::sparse::{dot, norm2};

/// Iteration limits for [`lanczos_extremes`].
#[derive(Debug, Clone, Copy)]
pub struct EigenOptions {
    pub max_steps: usize,
    /// Convergence threshold on the change of both extreme Ritz values,
    /// relative to the largest magnitude seen.
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremeEigenvalues {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
    pub converged: bool,
}

/// Consecutive steps the Ritz values must stay within `tol` before the
/// estimate is accepted.
const STABLE_STEPS: usize = 3;

/// Estimates the smallest and largest eigenvalue of the symmetric operator
/// `apply: x ↦ A x` on `Rⁿ`.
pub fn lanczos_extremes<F>(n: usize, mut apply: F, opts: EigenOptions) -> ExtremeEigenvalues
where
    F: FnMut(&[f64], &mut [f64]),
{
    if n == 0 {
        return ExtremeEigenvalues {
            min: 0.0,
            max: 0.0,
            steps: 0,
            converged: true,
        };
    }

    let mut v = start_vector(n);
    normalize(&mut v);

    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    let mut prev: Option<(f64, f64)> = None;
    let mut stable = 0usize;
    let mut scale = 0.0f64;
    let mut refills = 0u64;
    let max_steps = opts.max_steps.max(1);

    loop {
        apply(&v, &mut w);
        let alpha = dot(&v, &w);
        scale = scale.max(alpha.abs()).max(norm2(&w));
        basis.push(std::mem::take(&mut v));
        alphas.push(alpha);

        // Full reorthogonalization (two passes).
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &w);
                axpy(-c, q, &mut w);
            }
        }
        let beta = norm2(&w);

        let (lo, hi) = tridiagonal_extremes(&alphas, &betas);
        let k = alphas.len();
        if let Some((plo, phi)) = prev {
            let s = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
            if (lo - plo).abs() <= opts.tol * s && (hi - phi).abs() <= opts.tol * s {
                stable += 1;
            } else {
                stable = 0;
            }
        }
        prev = Some((lo, hi));

        if k >= n {
            return ExtremeEigenvalues {
                min: lo,
                max: hi,
                steps: k,
                converged: true,
            };
        }
        if stable >= STABLE_STEPS {
            return ExtremeEigenvalues {
                min: lo,
                max: hi,
                steps: k,
                converged: true,
            };
        }
        if k >= max_steps {
            return ExtremeEigenvalues {
                min: lo,
                max: hi,
                steps: k,
                converged: false,
            };
        }

        if beta > 1e-12 * scale.max(f64::MIN_POSITIVE) {
            betas.push(beta);
            w.iter_mut().for_each(|x| *x /= beta);
            v = w.clone();
        } else {
            // Invariant subspace: continue with a decoupled block.
            match refill(n, &basis, &mut refills) {
                Some(fresh) => {
                    betas.push(0.0);
                    v = fresh;
                }
                None => {
                    return ExtremeEigenvalues {
                        min: lo,
                        max: hi,
                        steps: k,
                        converged: true,
                    }
                }
            }
        }
    }
}

fn start_vector(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 1.0 + 1e-2 * (unit_hash(0, i as u64) * 0.5))
        .collect()
}

/// Deterministic value in [-1, 1) from a (stream, index) pair (SplitMix64).
fn unit_hash(stream: u64, index: u64) -> f64 {
    let mut z = stream
        .wrapping_mul(0xD1B5_4A32_D192_ED03)
        .wrapping_add(index)
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    (z >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
}

fn refill(n: usize, basis: &[Vec<f64>], counter: &mut u64) -> Option<Vec<f64>> {
    for _ in 0..4 {
        *counter += 1;
        let mut v: Vec<f64> = (0..n).map(|i| unit_hash(*counter, i as u64)).collect();
        normalize(&mut v);
        for _ in 0..2 {
            for q in basis {
                let c = dot(q, &v);
                axpy(-c, q, &mut v);
            }
        }
        let nv = norm2(&v);
        if nv > 1e-8 {
            v.iter_mut().for_each(|x| *x /= nv);
            return Some(v);
        }
    }
    None
}

#[inline]
fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

fn normalize(v: &mut [f64]) {
    let nv = norm2(v);
    if nv > 0.0 {
        v.iter_mut().for_each(|x| *x /= nv);
    }
}

/// Number of eigenvalues of the symmetric tridiagonal (diag `a`, off-diag
/// `b`) strictly below `x`.
fn sturm_count(a: &[f64], b: &[f64], x: f64, tiny: f64) -> usize {
    let mut count = 0;
    let mut q = a[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..a.len() {
        let denom = if q.abs() < tiny { tiny } else { q };
        q = a[i] - x - b[i - 1] * b[i - 1] / denom;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Smallest and largest eigenvalue of a symmetric tridiagonal matrix.
pub(crate) fn tridiagonal_extremes(a: &[f64], b: &[f64]) -> (f64, f64) {
    let k = a.len();
    debug_assert_eq!(b.len() + 1, k);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..k {
        let left = if i > 0 { b[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < k { b[i].abs() } else { 0.0 };
        lo = lo.min(a[i] - left - right);
        hi = hi.max(a[i] + left + right);
    }
    let span = (hi - lo).max(hi.abs().max(lo.abs())).max(f64::MIN_POSITIVE);
    let tiny = f64::EPSILON * span * 1e-3;
    let min = bisect(lo, hi, span, |x| sturm_count(a, b, x, tiny) >= 1);
    let max = bisect(lo, hi, span, |x| sturm_count(a, b, x, tiny) >= k);
    (min, max)
}

/// Smallest `x` in `[lo, hi]` (to rounding) with `pred(x)` true, where
/// `pred` is monotone.
fn bisect(mut lo: f64, mut hi: f64, span: f64, pred: impl Fn(f64) -> bool) -> f64 {
    // Widen so that the endpoints are strict.
    lo -= span * 1e-12 + f64::MIN_POSITIVE;
    hi += span * 1e-12 + f64::MIN_POSITIVE;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}
