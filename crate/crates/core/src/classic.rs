//! Baseline solvers: classical and weighted Jacobi, conjugate gradient and
//! diagonally preconditioned conjugate gradient.
//!
//! All of them share the stopping rule of the accelerated solver: the true
//! relative residual `‖b − Qx^t‖ / ‖b‖` is recomputed from `x^t` every
//! iteration, including for CG where the recursively updated residual would
//! be cheaper.

use crate::eigen::{lanczos_extremes, EigenOptions};
use crate::error::{Error, Result};
use crate::solver::{IterateView, Monitor, Observer, SolveReport, SolveStatus, SolverConfig, Verdict};
use crate::sparse::{dot, CsrMatrix};

const OMEGA_EIGEN_OPTIONS: EigenOptions = EigenOptions {
    max_steps: 500,
    tol: 1e-8,
};

/// Diagonal of `q`, rejecting nonpositive entries.
fn positive_diagonal(q: &CsrMatrix) -> Result<Vec<f64>> {
    let d = q.extract_diagonal();
    if let Some(row) = d.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::ZeroDiagonal { row });
    }
    Ok(d)
}

/// Classical Jacobi: `x^{t+1} = x^t + D⁻¹(b − Qx^t)`.
pub fn jacobi_solve(
    q: &CsrMatrix,
    b: &[f64],
    x0: &[f64],
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    jacobi_iterate(q, b, x0, 1.0, cfg)
}

/// Weighted Jacobi: `x^{t+1} = x^t + ωD⁻¹(b − Qx^t)`.
pub fn weighted_jacobi_solve(
    q: &CsrMatrix,
    b: &[f64],
    x0: &[f64],
    omega: f64,
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::InvalidArgument(format!("omega must be > 0, got {omega}")));
    }
    jacobi_iterate(q, b, x0, omega, cfg)
}

fn jacobi_iterate(
    q: &CsrMatrix,
    b: &[f64],
    x0: &[f64],
    omega: f64,
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    let d = positive_diagonal(q)?;
    let mut mon = Monitor::new(q, b, x0, *cfg)?;
    let mut x = x0.to_vec();

    match mon.evaluate(0, &x) {
        Verdict::Converged => return Ok(mon.finish(SolveStatus::Converged, 0, x, vec![])),
        Verdict::Diverged => return Ok(mon.finish(SolveStatus::Diverged, 0, x, vec![])),
        Verdict::Continue => {}
    }
    for t in 1..=cfg.maxiter {
        // mon.qx holds Q x^{t-1}.
        for k in 0..x.len() {
            x[k] += omega * ((b[k] - mon.qx[k]) / d[k]);
        }
        match mon.evaluate(t, &x) {
            Verdict::Converged => return Ok(mon.finish(SolveStatus::Converged, t, x, vec![])),
            Verdict::Diverged => return Ok(mon.finish(SolveStatus::Diverged, t, x, vec![])),
            Verdict::Continue => {}
        }
    }
    let n = cfg.maxiter;
    Ok(mon.finish(SolveStatus::MaxIterReached, n, x, vec![]))
}

/// `ω_opt = 2 / (λ_min(D⁻¹Q) + λ_max(D⁻¹Q))`, with the extreme eigenvalues
/// taken from the symmetric similar matrix `D^{-1/2} Q D^{-1/2}`.
pub fn optimal_weight(q: &CsrMatrix) -> Result<f64> {
    let d = positive_diagonal(q)?;
    let scale: Vec<f64> = d.iter().map(|v| 1.0 / v.sqrt()).collect();
    let n = q.n();
    let mut tmp = vec![0.0; n];
    let est = lanczos_extremes(
        n,
        |x, y| {
            for k in 0..n {
                tmp[k] = scale[k] * x[k];
            }
            q.matvec_into(&tmp, y).expect("square operator");
            for k in 0..n {
                y[k] *= scale[k];
            }
        },
        OMEGA_EIGEN_OPTIONS,
    );
    if !est.converged {
        return Err(Error::EigenNotConverged {
            steps: est.steps,
            lambda_min: est.min,
            lambda_max: est.max,
        });
    }
    Ok(2.0 / (est.min + est.max))
}

/// Unpreconditioned conjugate gradient.
pub fn cg_solve(
    q: &CsrMatrix,
    b: &[f64],
    x0: &[f64],
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    conjugate_gradient(q, b, x0, None, cfg, None)
}

/// [`cg_solve`] with a per-iteration observer.
pub fn cg_solve_observed(
    q: &CsrMatrix,
    b: &[f64],
    x0: &[f64],
    cfg: &SolverConfig,
    observer: Observer<'_>,
) -> Result<SolveReport> {
    conjugate_gradient(q, b, x0, None, cfg, Some(observer))
}

/// Conjugate gradient preconditioned by `M = diag(Q)`.
pub fn pcg_diag_solve(
    q: &CsrMatrix,
    b: &[f64],
    x0: &[f64],
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    let d = positive_diagonal(q)?;
    conjugate_gradient(q, b, x0, Some(&d), cfg, None)
}

fn conjugate_gradient(
    q: &CsrMatrix,
    b: &[f64],
    x0: &[f64],
    precond: Option<&[f64]>,
    cfg: &SolverConfig,
    mut observer: Option<Observer<'_>>,
) -> Result<SolveReport> {
    let mut mon = Monitor::new(q, b, x0, *cfg)?;
    let n = q.n();
    let mut x = x0.to_vec();

    match mon.evaluate(0, &x) {
        Verdict::Converged => return Ok(mon.finish(SolveStatus::Converged, 0, x, vec![])),
        Verdict::Diverged => return Ok(mon.finish(SolveStatus::Diverged, 0, x, vec![])),
        Verdict::Continue => {}
    }

    let mut r: Vec<f64> = b.iter().zip(&mon.qx).map(|(bi, qi)| bi - qi).collect();
    let apply_precond = |r: &[f64], z: &mut [f64]| match precond {
        Some(d) => {
            for k in 0..n {
                z[k] = r[k] / d[k];
            }
        }
        None => z.copy_from_slice(r),
    };
    let mut z = vec![0.0; n];
    apply_precond(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut qp = vec![0.0; n];
    let mut x_prev = x.clone();

    for t in 1..=cfg.maxiter {
        q.matvec_into(&p, &mut qp)?;
        let pqp = dot(&p, &qp);
        if !(pqp > 0.0) {
            return Err(Error::Indefinite {
                iteration: t,
                value: pqp,
            });
        }
        let step = rz / pqp;
        x_prev.copy_from_slice(&x);
        for k in 0..n {
            x[k] += step * p[k];
            r[k] -= step * qp[k];
        }
        let verdict = mon.evaluate(t, &x);
        if let Some(obs) = observer.as_mut() {
            obs(&IterateView {
                t,
                x: &x,
                x_prev: &x_prev,
                y: None,
                alpha: None,
                restarted: false,
            });
        }
        match verdict {
            Verdict::Converged => return Ok(mon.finish(SolveStatus::Converged, t, x, vec![])),
            Verdict::Diverged => return Ok(mon.finish(SolveStatus::Diverged, t, x, vec![])),
            Verdict::Continue => {}
        }
        apply_precond(&r, &mut z);
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        for k in 0..n {
            p[k] = z[k] + beta * p[k];
        }
        rz = rz_next;
    }
    Ok(mon.finish(SolveStatus::MaxIterReached, cfg.maxiter, x, vec![]))
}
