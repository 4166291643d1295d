//! Row-block execution of the Jacobi-type update.
//!
//! Each block reads the shared snapshot `y` and writes only its own slice of
//! `x`, so the blocks run as an independent fork-join phase. Per-row
//! arithmetic is identical to the sequential path; with a diagonal `J` the
//! result is bitwise independent of the block count.

use std::ops::Range;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::proximal::{Partition, ProxKind, ProxMatrix};
use crate::sparse::{check_len, CsrMatrix};

/// Balanced contiguous row partition, earlier blocks one row larger when
/// `s` does not divide `n`.
pub fn partition_rows(n: usize, s: usize) -> Result<Partition> {
    Partition::balanced(n, s)
}

/// `s · max_i nnz(block i) / nnz(Q)`. An empty matrix is perfectly balanced.
pub fn load_imbalance(q: &CsrMatrix, p: &Partition) -> Result<f64> {
    check_len(q.n(), p.n())?;
    let total = q.nnz();
    if total == 0 {
        return Ok(1.0);
    }
    let rp = q.row_ptr();
    let max_block = (0..p.num_blocks())
        .map(|i| {
            let r = p.range(i);
            rp[r.end] - rp[r.start]
        })
        .max()
        .unwrap_or(0);
    Ok(p.num_blocks() as f64 * max_block as f64 / total as f64)
}

/// Computes rows `rows` of `x = y + J⁻¹(b − Qy)` into `x_out`, and the
/// residual `b − Qy` on the same rows into `r_out`.
pub(crate) fn step_rows(
    q: &CsrMatrix,
    b: &[f64],
    j: &ProxMatrix,
    y: &[f64],
    rows: Range<usize>,
    x_out: &mut [f64],
    r_out: &mut [f64],
) {
    for (local, i) in rows.clone().enumerate() {
        let r = b[i] - q.row_dot(i, y);
        r_out[local] = r;
        x_out[local] = r;
    }
    j.solve_rows_in_place(rows.clone(), x_out);
    for (local, i) in rows.enumerate() {
        x_out[local] += y[i];
    }
}

/// Borrowed problem data split into row blocks.
#[derive(Debug, Clone)]
pub struct BlockWorkspace<'a> {
    q: &'a CsrMatrix,
    b: &'a [f64],
    j: &'a ProxMatrix,
    partition: Partition,
}

impl<'a> BlockWorkspace<'a> {
    /// With a block-diagonal `J`, `partition` must be the partition `J` was
    /// built on.
    pub fn new(
        q: &'a CsrMatrix,
        b: &'a [f64],
        j: &'a ProxMatrix,
        partition: Partition,
    ) -> Result<Self> {
        check_len(q.n(), b.len())?;
        check_len(q.n(), j.n())?;
        check_len(q.n(), partition.n())?;
        if !j.compatible_with(&partition) {
            return Err(Error::InvalidPartition(
                "row partition does not match the blocks of J".into(),
            ));
        }
        Ok(Self { q, b, j, partition })
    }

    /// Workspace over `J`'s natural blocks: one block for diagonal `J`,
    /// `J`'s own partition otherwise.
    pub fn natural(q: &'a CsrMatrix, b: &'a [f64], j: &'a ProxMatrix) -> Result<Self> {
        let partition = match j {
            ProxMatrix::Diagonal(d) => Partition::balanced(d.len(), 1)?,
            ProxMatrix::BlockDiagonal { partition, .. } => partition.clone(),
        };
        Self::new(q, b, j, partition)
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    /// Runs the block phase: `x_out = y + J⁻¹(b − Qy)`, `r_out = b − Qy`.
    pub fn step_into(&self, y: &[f64], x_out: &mut [f64], r_out: &mut [f64]) -> Result<()> {
        let n = self.q.n();
        check_len(n, y.len())?;
        check_len(n, x_out.len())?;
        check_len(n, r_out.len())?;

        if self.partition.num_blocks() == 1 {
            step_rows(self.q, self.b, self.j, y, 0..n, x_out, r_out);
            return Ok(());
        }

        let mut tasks = Vec::with_capacity(self.partition.num_blocks());
        let mut x_rest = x_out;
        let mut r_rest = r_out;
        for i in 0..self.partition.num_blocks() {
            let rows = self.partition.range(i);
            let (xb, xr) = x_rest.split_at_mut(rows.len());
            let (rb, rr) = r_rest.split_at_mut(rows.len());
            tasks.push((rows, xb, rb));
            x_rest = xr;
            r_rest = rr;
        }
        tasks.into_par_iter().for_each(|(rows, xb, rb)| {
            step_rows(self.q, self.b, self.j, y, rows, xb, rb);
        });
        Ok(())
    }

    pub fn prox_kind(&self) -> ProxKind {
        self.j.kind()
    }
}

/// Block-parallel Jacobi-type update `x = y + J⁻¹(b − Qy)`.
pub fn parallel_accel_step(ws: &BlockWorkspace<'_>, y: &[f64]) -> Result<Vec<f64>> {
    let n = y.len();
    let mut x = vec![0.0; n];
    let mut r = vec![0.0; n];
    ws.step_into(y, &mut x, &mut r)?;
    Ok(x)
}
