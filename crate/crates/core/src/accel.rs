//! Nesterov-accelerated Jacobi-type iteration with adaptive restarting.
//!
//! Each iteration takes the Jacobi-type step `x^t = y^t + J⁻¹(b − Qy^t)`,
//! which minimizes `f(x) + ½‖x − y^t‖²_S` for `S = J − Q`, then either
//! extrapolates
//!
//! ```text
//! α_{t+1} = (1 + √(1 + 4α_t²)) / 2
//! y^{t+1} = x^t + ((α_t − 1) / α_{t+1}) (x^t − x^{t−1})
//! ```
//!
//! or, when restarting is enabled, the prohibition period has elapsed
//! (`t > K_re + K_ℓ`) and `⟨Qy^t − b, x^t − x^{t−1}⟩ ≥ 0`, discards `x^t`
//! and restarts the momentum from `x^{t−1}` with `K_{ℓ+1} = 2K_ℓ`.
//!
//! The iteration starts from `x^0 = y^1`, `α_0 = 0`, `α_1 = 1`, `ℓ = 0`,
//! `K_re = 0`. Stopping is tested on `x^t` right after the step, before the
//! restart test; a discarded `x^t` still counts as an iteration.

use crate::error::{Error, Result};
use crate::parallel::BlockWorkspace;
use crate::proximal::{Partition, ProxMatrix};
use crate::solver::{IterateView, Monitor, Observer, SolveReport, SolveStatus, SolverConfig, Verdict};
use crate::sparse::{check_len, CsrMatrix};

/// Options specific to the accelerated solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AccelOptions {
    pub restart: bool,
    /// Initial prohibition length `K_0` (at least 2).
    pub k0: usize,
    /// Number of row blocks the update is split across.
    pub partitions: usize,
}

impl Default for AccelOptions {
    fn default() -> Self {
        Self {
            restart: true,
            k0: 2,
            partitions: 1,
        }
    }
}

/// Iteration state between two steps.
#[derive(Debug, Clone, PartialEq)]
pub struct AccelState {
    /// Index of the iteration about to run (starts at 1).
    pub t: usize,
    pub x: Vec<f64>,
    pub x_prev: Vec<f64>,
    pub y: Vec<f64>,
    /// `α_t`.
    pub alpha: f64,
    /// `α_{t+1}`.
    pub alpha_next: f64,
    pub restart_enabled: bool,
    /// Restarts performed so far (`ℓ`).
    pub ell: usize,
    /// Current prohibition length `K_ℓ = K_0 · 2^ℓ`.
    pub k_ell: usize,
    /// Iteration of the last restart.
    pub k_re: usize,
}

impl AccelState {
    pub fn new(x0: &[f64], restart_enabled: bool, k0: usize) -> Self {
        Self {
            t: 1,
            x: x0.to_vec(),
            x_prev: x0.to_vec(),
            y: x0.to_vec(),
            alpha: 1.0,
            alpha_next: alpha_next(1.0),
            restart_enabled,
            ell: 0,
            k_ell: k0,
            k_re: 0,
        }
    }

    /// Momentum reset at iteration `t`: the freshly computed `x^t` is
    /// replaced by `x^{t−1}`, which also becomes the next extrapolated point.
    pub fn apply_restart(&mut self) {
        self.k_re = self.t;
        self.k_ell *= 2;
        self.ell += 1;
        self.alpha = 0.0;
        self.alpha_next = 1.0;
        self.y.copy_from_slice(&self.x_prev);
        self.x.copy_from_slice(&self.x_prev);
    }

    /// Moves to iteration `t + 1`: `x^t` becomes the previous iterate and
    /// `α_{t+1}` the current weight.
    pub fn advance(&mut self) {
        self.x_prev.copy_from_slice(&self.x);
        self.alpha = self.alpha_next;
        self.t += 1;
    }
}

/// `(1 + √(1 + 4α²)) / 2`.
#[inline]
pub fn alpha_next(alpha: f64) -> f64 {
    0.5 * (1.0 + (1.0 + 4.0 * alpha * alpha).sqrt())
}

/// `x + ((α − 1) / α_next)(x − x_prev)`.
pub fn extrapolate(x: &[f64], x_prev: &[f64], alpha: f64, alpha_next: f64) -> Vec<f64> {
    let mut y = vec![0.0; x.len()];
    extrapolate_into(x, x_prev, alpha, alpha_next, &mut y);
    y
}

fn extrapolate_into(x: &[f64], x_prev: &[f64], alpha: f64, alpha_next: f64, y: &mut [f64]) {
    let momentum = (alpha - 1.0) / alpha_next;
    for ((yi, &xi), &pi) in y.iter_mut().zip(x).zip(x_prev) {
        *yi = xi + momentum * (xi - pi);
    }
}

/// Jacobi-type step `y + J⁻¹(b − Qy)`.
pub fn accel_step(q: &CsrMatrix, b: &[f64], j: &ProxMatrix, y: &[f64]) -> Result<Vec<f64>> {
    let ws = BlockWorkspace::natural(q, b, j)?;
    let mut x = vec![0.0; y.len()];
    let mut r = vec![0.0; y.len()];
    ws.step_into(y, &mut x, &mut r)?;
    Ok(x)
}

#[inline]
fn restart_due(t: usize, k_re: usize, k_ell: usize, grad_dot_step: f64) -> bool {
    t > k_re + k_ell && grad_dot_step >= 0.0
}

/// Restart test: `t > K_re + K_ℓ` and `⟨Qy − b, x − x_prev⟩ ≥ 0`.
#[allow(clippy::too_many_arguments)]
pub fn restart_check(
    q: &CsrMatrix,
    b: &[f64],
    y: &[f64],
    x: &[f64],
    x_prev: &[f64],
    t: usize,
    k_re: usize,
    k_ell: usize,
) -> Result<bool> {
    check_len(q.n(), b.len())?;
    check_len(q.n(), x.len())?;
    check_len(q.n(), x_prev.len())?;
    let qy = q.matvec(y)?;
    let g: f64 = qy
        .iter()
        .zip(b)
        .zip(x.iter().zip(x_prev))
        .map(|((qi, bi), (xi, pi))| (qi - bi) * (xi - pi))
        .sum();
    Ok(restart_due(t, k_re, k_ell, g))
}

/// Accelerated Jacobi-type solve.
pub fn acc_jacobi_solve(
    q: &CsrMatrix,
    b: &[f64],
    j: &ProxMatrix,
    x0: &[f64],
    cfg: &SolverConfig,
    opts: &AccelOptions,
) -> Result<SolveReport> {
    run(q, b, j, x0, cfg, opts, None)
}

/// [`acc_jacobi_solve`] with an observer called once per iteration, after
/// the restart decision and before the state is updated.
pub fn acc_jacobi_solve_observed(
    q: &CsrMatrix,
    b: &[f64],
    j: &ProxMatrix,
    x0: &[f64],
    cfg: &SolverConfig,
    opts: &AccelOptions,
    observer: Observer<'_>,
) -> Result<SolveReport> {
    run(q, b, j, x0, cfg, opts, Some(observer))
}

fn run(
    q: &CsrMatrix,
    b: &[f64],
    j: &ProxMatrix,
    x0: &[f64],
    cfg: &SolverConfig,
    opts: &AccelOptions,
    mut observer: Option<Observer<'_>>,
) -> Result<SolveReport> {
    if opts.k0 < 2 {
        return Err(Error::InvalidConfig(format!("K0 must be >= 2, got {}", opts.k0)));
    }
    check_len(q.n(), j.n())?;
    let mut mon = Monitor::new(q, b, x0, *cfg)?;
    let ws = if opts.partitions <= 1 {
        BlockWorkspace::natural(q, b, j)?
    } else {
        let p = Partition::balanced(q.n(), opts.partitions)?;
        BlockWorkspace::new(q, b, j, p)?
    };

    let n = q.n();
    let mut state = AccelState::new(x0, opts.restart, opts.k0);
    let mut restarts = Vec::new();
    let mut x_new = vec![0.0; n];
    let mut r_y = vec![0.0; n];

    match mon.evaluate(0, x0) {
        Verdict::Converged => return Ok(mon.finish(SolveStatus::Converged, 0, state.x, restarts)),
        Verdict::Diverged => return Ok(mon.finish(SolveStatus::Diverged, 0, state.x, restarts)),
        Verdict::Continue => {}
    }

    while state.t <= cfg.maxiter {
        let t = state.t;
        ws.step_into(&state.y, &mut x_new, &mut r_y)?;
        let verdict = mon.evaluate(t, &x_new);

        let restart = matches!(verdict, Verdict::Continue)
            && state.restart_enabled
            && {
                // ⟨Qy − b, x^t − x^{t−1}⟩ with r_y = b − Qy.
                let g: f64 = r_y
                    .iter()
                    .zip(x_new.iter().zip(&state.x_prev))
                    .map(|(ri, (xi, pi))| -ri * (xi - pi))
                    .sum();
                restart_due(t, state.k_re, state.k_ell, g)
            };

        if let Some(obs) = observer.as_mut() {
            obs(&IterateView {
                t,
                x: &x_new,
                x_prev: &state.x_prev,
                y: Some(&state.y),
                alpha: Some(state.alpha),
                restarted: restart,
            });
        }

        match verdict {
            Verdict::Converged => return Ok(mon.finish(SolveStatus::Converged, t, x_new, restarts)),
            Verdict::Diverged => return Ok(mon.finish(SolveStatus::Diverged, t, x_new, restarts)),
            Verdict::Continue => {}
        }

        if restart {
            state.x.copy_from_slice(&x_new);
            state.apply_restart();
            mon.mark_restart();
            restarts.push(t);
        } else {
            state.alpha_next = alpha_next(state.alpha);
            extrapolate_into(&x_new, &state.x_prev, state.alpha, state.alpha_next, &mut state.y);
            state.x.copy_from_slice(&x_new);
        }
        state.advance();
    }

    let iterations = cfg.maxiter;
    Ok(mon.finish(SolveStatus::MaxIterReached, iterations, state.x, restarts))
}

/// Lyapunov quantity `α_t²(f(x^t) − f*) + ½⟨w, S w⟩` with
/// `w = α_t x^t − (α_t − 1) x^{t−1} − x*`, which is nonincreasing along a
/// run without restarts.
pub fn lyapunov_energy(
    q: &CsrMatrix,
    b: &[f64],
    j: &ProxMatrix,
    x_star: &[f64],
    f_star: f64,
    view: &IterateView<'_>,
) -> Result<f64> {
    let alpha = view
        .alpha
        .ok_or_else(|| Error::InvalidArgument("iterate view carries no momentum weight".into()))?;
    let w: Vec<f64> = view
        .x
        .iter()
        .zip(view.x_prev)
        .zip(x_star)
        .map(|((xi, pi), si)| alpha * xi - (alpha - 1.0) * pi - si)
        .collect();
    let f = crate::sparse::objective(q, b, view.x)?;
    let sw = crate::proximal::s_inner(j, q, &w, &w)?;
    Ok(alpha * alpha * (f - f_star) + 0.5 * sw)
}
