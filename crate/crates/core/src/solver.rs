//! Configuration, reports and the per-iteration bookkeeping shared by every
//! solver.

use crate::error::{Error, Result};
use crate::sparse::{check_finite, check_len, norm2, objective_with, residual_norm, CsrMatrix};

/// Relative residual above which an iteration is declared divergent.
pub const DIVERGENCE_THRESHOLD: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Stop once `‖b − Qx‖ / ‖b‖ ≤ tol`.
    pub tol: f64,
    pub maxiter: usize,
    pub record_trace: bool,
    /// Store `f(x^t)` in each trace entry.
    pub record_objective: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-4,
            maxiter: 5000,
            record_trace: true,
            record_objective: true,
        }
    }
}

impl SolverConfig {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_maxiter(mut self, maxiter: usize) -> Self {
        self.maxiter = maxiter;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidConfig(format!("tol must be > 0, got {}", self.tol)));
        }
        if self.maxiter == 0 {
            return Err(Error::InvalidConfig("maxiter must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolveStatus {
    Converged,
    MaxIterReached,
    Diverged,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Converged => "Converged",
            Self::MaxIterReached => "MaxIterReached",
            Self::Diverged => "Diverged",
        }
    }
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    pub iter: usize,
    pub rel_residual: f64,
    pub objective: Option<f64>,
    /// A restart fired at this iteration (the recorded values are those of
    /// the iterate that was discarded).
    pub restart: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub iterations: usize,
    pub x: Vec<f64>,
    /// One entry per iteration including iteration 0, when recording.
    pub trace: Vec<TraceEntry>,
    /// Iterations at which a restart fired.
    pub restarts: Vec<usize>,
}

impl SolveReport {
    pub fn final_rel_residual(&self) -> Option<f64> {
        self.trace.last().map(|e| e.rel_residual)
    }
}

/// Read-only view of one iteration, handed to solve observers.
#[derive(Debug, Clone, Copy)]
pub struct IterateView<'a> {
    pub t: usize,
    /// `x^t` as computed this iteration (before any restart reset).
    pub x: &'a [f64],
    pub x_prev: &'a [f64],
    /// Extrapolated point `y^t` (accelerated solver only).
    pub y: Option<&'a [f64]>,
    /// `α_t` (accelerated solver only).
    pub alpha: Option<f64>,
    pub restarted: bool,
}

pub type Observer<'o> = &'o mut dyn FnMut(&IterateView<'_>);

pub(crate) enum Verdict {
    Continue,
    Converged,
    Diverged,
}

/// Evaluates iterates against the stopping rule and records the trace.
pub(crate) struct Monitor<'a> {
    q: &'a CsrMatrix,
    b: &'a [f64],
    bnorm: f64,
    cfg: SolverConfig,
    /// `Q x` of the last evaluated iterate.
    pub qx: Vec<f64>,
    pub trace: Vec<TraceEntry>,
}

impl<'a> Monitor<'a> {
    pub fn new(q: &'a CsrMatrix, b: &'a [f64], x0: &[f64], cfg: SolverConfig) -> Result<Self> {
        cfg.validate()?;
        check_len(q.n(), b.len())?;
        check_len(q.n(), x0.len())?;
        check_finite(b)?;
        check_finite(x0)?;
        let bnorm = norm2(b);
        if bnorm == 0.0 {
            return Err(Error::ZeroRhs);
        }
        Ok(Self {
            q,
            b,
            bnorm,
            cfg,
            qx: vec![0.0; q.n()],
            trace: Vec::new(),
        })
    }

    pub fn evaluate(&mut self, iter: usize, x: &[f64]) -> Verdict {
        self.q
            .matvec_into(x, &mut self.qx)
            .expect("dimensions validated at construction");
        let rel = residual_norm(self.b, &self.qx) / self.bnorm;
        if self.cfg.record_trace {
            let objective = self
                .cfg
                .record_objective
                .then(|| objective_with(self.b, x, &self.qx));
            self.trace.push(TraceEntry {
                iter,
                rel_residual: rel,
                objective,
                restart: false,
            });
        }
        if rel <= self.cfg.tol {
            Verdict::Converged
        } else if !rel.is_finite() || rel > DIVERGENCE_THRESHOLD {
            Verdict::Diverged
        } else {
            Verdict::Continue
        }
    }

    pub fn mark_restart(&mut self) {
        if let Some(last) = self.trace.last_mut() {
            last.restart = true;
        }
    }

    pub fn finish(
        self,
        status: SolveStatus,
        iterations: usize,
        x: Vec<f64>,
        restarts: Vec<usize>,
    ) -> SolveReport {
        SolveReport {
            status,
            iterations,
            x,
            trace: self.trace,
            restarts,
        }
    }
}
