//! The proximal matrix `J` and the metric `S = J − Q` it induces.
//!
//! `J` is chosen so that `S` is positive semidefinite while `J⁻¹` stays
//! cheap: either diagonal (row-wise absolute sums) or block diagonal over a
//! row partition (dense diagonal blocks of `Q` shifted by the spectral norms
//! of the off-diagonal blocks). `S` itself is never formed.

use std::ops::Range;

use crate::dense::{Cholesky, DenseMatrix};
use crate::eigen::{lanczos_extremes, EigenOptions};
use crate::error::{Error, Result};
use crate::sparse::{check_len, dot, CsrMatrix};

/// Multiplicative inflation applied to estimated block norms.
pub const NORM_SAFETY_FACTOR: f64 = 1.0 + 1e-6;

const NORM_EST_OPTIONS: EigenOptions = EigenOptions {
    max_steps: 200,
    tol: 1e-10,
};

/// Dimension up to which `check_s_psd` runs the Krylov iteration to
/// completion (an exact spectrum up to rounding).
const EXACT_PSD_DIM: usize = 64;

/// Contiguous row blocks `[offsets[i], offsets[i+1])`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    offsets: Vec<usize>,
}

impl Partition {
    pub fn new(offsets: Vec<usize>) -> Result<Self> {
        if offsets.len() < 2 {
            return Err(Error::InvalidPartition(
                "need at least one block (two offsets)".into(),
            ));
        }
        if offsets[0] != 0 {
            return Err(Error::InvalidPartition("offsets[0] must be 0".into()));
        }
        if let Some(w) = offsets.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::InvalidPartition(format!("block {w} is empty")));
        }
        Ok(Self { offsets })
    }

    /// Balanced contiguous split: sizes `⌈n/s⌉` then `⌊n/s⌋`, larger first.
    pub fn balanced(n: usize, s: usize) -> Result<Self> {
        if s == 0 || s > n {
            return Err(Error::InvalidPartition(format!(
                "cannot split {n} rows into {s} nonempty blocks"
            )));
        }
        let base = n / s;
        let extra = n % s;
        let mut offsets = Vec::with_capacity(s + 1);
        offsets.push(0);
        for i in 0..s {
            let size = base + usize::from(i < extra);
            offsets.push(offsets[i] + size);
        }
        Ok(Self { offsets })
    }

    pub fn num_blocks(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn n(&self) -> usize {
        *self.offsets.last().expect("partition has offsets")
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn range(&self, block: usize) -> Range<usize> {
        self.offsets[block]..self.offsets[block + 1]
    }

    /// Block containing row `row`.
    pub fn block_of(&self, row: usize) -> usize {
        match self.offsets.binary_search(&row) {
            Ok(i) => i,
            Err(i) => i - 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProxKind {
    Diagonal,
    BlockDiagonal,
}

/// One diagonal block of a block-diagonal `J`, stored dense together with
/// its Cholesky factor.
#[derive(Debug, Clone)]
pub struct ProxBlock {
    matrix: DenseMatrix,
    factor: Cholesky,
}

impl ProxBlock {
    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }
}

#[derive(Debug, Clone)]
pub enum ProxMatrix {
    Diagonal(Vec<f64>),
    BlockDiagonal {
        partition: Partition,
        blocks: Vec<ProxBlock>,
    },
}

impl ProxMatrix {
    /// Diagonal `J` from explicit entries, all of which must be positive.
    pub fn diagonal(diag: Vec<f64>) -> Result<Self> {
        if let Some(k) = diag.iter().position(|&d| !(d > 0.0) || !d.is_finite()) {
            return Err(Error::ZeroRow { row: k });
        }
        Ok(Self::Diagonal(diag))
    }

    /// Block-diagonal `J` from explicit dense blocks aligned to `partition`.
    pub fn block_diagonal(partition: Partition, matrices: Vec<DenseMatrix>) -> Result<Self> {
        if matrices.len() != partition.num_blocks() {
            return Err(Error::InvalidPartition(format!(
                "{} blocks supplied for a {}-block partition",
                matrices.len(),
                partition.num_blocks()
            )));
        }
        let mut blocks = Vec::with_capacity(matrices.len());
        for (i, matrix) in matrices.into_iter().enumerate() {
            let size = partition.range(i).len();
            if matrix.rows() != size || matrix.cols() != size {
                return Err(Error::DimensionMismatch {
                    expected: size,
                    got: matrix.rows(),
                });
            }
            let factor =
                Cholesky::factor(&matrix).ok_or(Error::BlockNotPositiveDefinite { block: i })?;
            blocks.push(ProxBlock { matrix, factor });
        }
        Ok(Self::BlockDiagonal { partition, blocks })
    }

    pub fn kind(&self) -> ProxKind {
        match self {
            Self::Diagonal(_) => ProxKind::Diagonal,
            Self::BlockDiagonal { .. } => ProxKind::BlockDiagonal,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Self::Diagonal(d) => d.len(),
            Self::BlockDiagonal { partition, .. } => partition.n(),
        }
    }

    /// `out = J v`.
    pub fn apply_into(&self, v: &[f64], out: &mut [f64]) -> Result<()> {
        check_len(self.n(), v.len())?;
        check_len(self.n(), out.len())?;
        match self {
            Self::Diagonal(d) => {
                for ((o, &vi), &di) in out.iter_mut().zip(v).zip(d) {
                    *o = di * vi;
                }
            }
            Self::BlockDiagonal { partition, blocks } => {
                for (i, block) in blocks.iter().enumerate() {
                    let r = partition.range(i);
                    block.matrix.matvec_into(&v[r.clone()], &mut out[r]);
                }
            }
        }
        Ok(())
    }

    /// Overwrites the slice `r` (rows `rows` of a residual) with
    /// `J⁻¹ r` restricted to those rows. For block-diagonal `J`, `rows` must
    /// be exactly one block of its partition.
    pub(crate) fn solve_rows_in_place(&self, rows: Range<usize>, r: &mut [f64]) {
        match self {
            Self::Diagonal(d) => {
                for (ri, &di) in r.iter_mut().zip(&d[rows]) {
                    *ri /= di;
                }
            }
            Self::BlockDiagonal { partition, blocks } => {
                let block = partition.block_of(rows.start);
                debug_assert_eq!(partition.range(block), rows);
                blocks[block].factor.solve_in_place(r);
            }
        }
    }

    /// Overwrites `r` with `J⁻¹ r`.
    pub fn solve_in_place(&self, r: &mut [f64]) -> Result<()> {
        check_len(self.n(), r.len())?;
        match self {
            Self::Diagonal(_) => self.solve_rows_in_place(0..r.len(), r),
            Self::BlockDiagonal { partition, .. } => {
                for i in 0..partition.num_blocks() {
                    let rows = partition.range(i);
                    self.solve_rows_in_place(rows.clone(), &mut r[rows]);
                }
            }
        }
        Ok(())
    }

    /// Whether a row partition lines up with this matrix's blocks, so that
    /// each row block can apply `J⁻¹` locally.
    pub fn compatible_with(&self, p: &Partition) -> bool {
        match self {
            Self::Diagonal(d) => p.n() == d.len(),
            Self::BlockDiagonal { partition, .. } => partition == p,
        }
    }

    /// Dense form, for tests and diagnostics on small problems.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.n();
        let mut out = vec![vec![0.0; n]; n];
        match self {
            Self::Diagonal(d) => {
                for (k, &v) in d.iter().enumerate() {
                    out[k][k] = v;
                }
            }
            Self::BlockDiagonal { partition, blocks } => {
                for (b, block) in blocks.iter().enumerate() {
                    let r = partition.range(b);
                    for (i, gi) in r.clone().enumerate() {
                        for (j, gj) in r.clone().enumerate() {
                            out[gi][gj] = block.matrix.get(i, j);
                        }
                    }
                }
            }
        }
        out
    }
}

/// Diagonal `J` with `J_kk = Q_kk + Σ_{j≠k} |Q_kj|`.
pub fn build_j_diag(q: &CsrMatrix) -> Result<ProxMatrix> {
    let mut diag = Vec::with_capacity(q.n());
    for k in 0..q.n() {
        let (cols, vals) = q.row(k);
        let mut off = 0.0;
        let mut d = 0.0;
        for (&c, &v) in cols.iter().zip(vals) {
            if c == k {
                d = v;
            } else {
                off += v.abs();
            }
        }
        let jkk = d + off;
        if jkk == 0.0 {
            return Err(Error::ZeroRow { row: k });
        }
        if !(jkk > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "row {k} gives J_kk = {jkk}; matrix is not positive semidefinite"
            )));
        }
        diag.push(jkk);
    }
    Ok(ProxMatrix::Diagonal(diag))
}

/// Block-diagonal `J` over `p` using estimated off-diagonal block norms,
/// inflated by [`NORM_SAFETY_FACTOR`].
pub fn build_j_block(q: &CsrMatrix, p: &Partition) -> Result<ProxMatrix> {
    build_j_block_with(q, p, |b| spectral_norm_est(b) * NORM_SAFETY_FACTOR)
}

/// Block-diagonal `J^{ii} = Q^{ii} + Σ_{j≠i} norm(Q^{ij}) I` with a
/// caller-supplied block norm.
pub fn build_j_block_with<F>(q: &CsrMatrix, p: &Partition, block_norm: F) -> Result<ProxMatrix>
where
    F: Fn(&DenseMatrix) -> f64,
{
    ProxMatrix::block_diagonal(p.clone(), j_block_matrices(q, p, block_norm)?)
}

/// The diagonal blocks `J^{ii}` without factoring them. On a singular `Q`
/// these may be singular too (one block gives `J = Q`); `J − Q` is still
/// positive semidefinite.
pub fn j_block_matrices<F>(q: &CsrMatrix, p: &Partition, block_norm: F) -> Result<Vec<DenseMatrix>>
where
    F: Fn(&DenseMatrix) -> f64,
{
    check_len(q.n(), p.n())?;
    let s = p.num_blocks();
    let mut matrices = Vec::with_capacity(s);
    for i in 0..s {
        let rows = p.range(i);
        let ni = rows.len();
        let mut diag_block = DenseMatrix::zeros(ni, ni);
        // Off-diagonal blocks are materialized only when they hold nonzeros.
        let mut off_blocks: Vec<Option<DenseMatrix>> = vec![None; s];
        for (li, gi) in rows.clone().enumerate() {
            let (cols, vals) = q.row(gi);
            for (&c, &v) in cols.iter().zip(vals) {
                let j = p.block_of(c);
                let lc = c - p.offsets()[j];
                if j == i {
                    diag_block.set(li, lc, v);
                } else if v != 0.0 {
                    off_blocks[j]
                        .get_or_insert_with(|| DenseMatrix::zeros(ni, p.range(j).len()))
                        .set(li, lc, v);
                }
            }
        }
        let shift: f64 = off_blocks.iter().flatten().map(&block_norm).sum();
        for k in 0..ni {
            diag_block.add(k, k, shift);
        }
        matrices.push(diag_block);
    }
    Ok(matrices)
}

/// Estimate of the largest singular value of `b`, from the Krylov
/// iteration on `BᵀB` (or `BBᵀ`, whichever is smaller).
pub fn spectral_norm_est(b: &DenseMatrix) -> f64 {
    if b.rows() == 0 || b.cols() == 0 || b.is_zero() {
        return 0.0;
    }
    let (inner, outer) = (b.cols(), b.rows());
    let lambda = if inner <= outer {
        let mut tmp = vec![0.0; outer];
        lanczos_extremes(
            inner,
            |x, y| {
                b.matvec_into(x, &mut tmp);
                b.transpose_matvec_into(&tmp, y);
            },
            NORM_EST_OPTIONS,
        )
        .max
    } else {
        let mut tmp = vec![0.0; inner];
        lanczos_extremes(
            outer,
            |x, y| {
                b.transpose_matvec_into(x, &mut tmp);
                b.matvec_into(&tmp, y);
            },
            NORM_EST_OPTIONS,
        )
        .max
    };
    lambda.max(0.0).sqrt()
}

/// `⟨u, S v⟩ = ⟨u, J v⟩ − ⟨u, Q v⟩` without forming `S`.
pub fn s_inner(j: &ProxMatrix, q: &CsrMatrix, u: &[f64], v: &[f64]) -> Result<f64> {
    check_len(q.n(), j.n())?;
    check_len(q.n(), u.len())?;
    let mut jv = vec![0.0; v.len()];
    j.apply_into(v, &mut jv)?;
    let qv = q.matvec(v)?;
    Ok(dot(u, &jv) - dot(u, &qv))
}

/// Estimate of `λ_min(J − Q)`. Exact up to rounding for `n ≤ 64`; a
/// Krylov estimate (an upper bound on the true minimum) beyond that.
pub fn check_s_psd(q: &CsrMatrix, j: &ProxMatrix) -> Result<f64> {
    let n = q.n();
    check_len(n, j.n())?;
    let opts = if n <= EXACT_PSD_DIM {
        EigenOptions {
            max_steps: n,
            tol: 0.0,
        }
    } else {
        EigenOptions {
            max_steps: 500,
            tol: 1e-10,
        }
    };
    let mut qx = vec![0.0; n];
    let est = lanczos_extremes(
        n,
        |x, y| {
            j.apply_into(x, y).expect("dimensions checked");
            q.matvec_into(x, &mut qx).expect("dimensions checked");
            for (yi, qi) in y.iter_mut().zip(&qx) {
                *yi -= qi;
            }
        },
        opts,
    );
    Ok(est.min)
}
