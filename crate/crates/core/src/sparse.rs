//! Compressed-sparse-row storage and the dense-vector kernels the solvers
//! are built on.
//!
//! Symmetric matrices are stored with both triangles present so that a row
//! block carries full rows. Every reduction (row products, dot products,
//! norms) accumulates left to right in index order, so results do not depend
//! on how many threads evaluate them.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Nonzero count above which `matvec` splits rows across the rayon pool.
const PAR_NNZ_THRESHOLD: usize = 1 << 15;

/// Square sparse matrix in canonical CSR form (column indices strictly
/// increasing within each row).
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds a matrix from raw CSR arrays, checking the canonical-form
    /// invariants.
    pub fn from_raw(
        n: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if row_ptr.len() != n + 1 {
            return Err(Error::MalformedCsr(format!(
                "row_ptr has length {}, expected {}",
                row_ptr.len(),
                n + 1
            )));
        }
        if row_ptr[0] != 0 {
            return Err(Error::MalformedCsr("row_ptr[0] must be 0".into()));
        }
        if col_idx.len() != values.len() || row_ptr[n] != col_idx.len() {
            return Err(Error::MalformedCsr(format!(
                "row_ptr[n] = {}, col_idx has {} entries, values has {}",
                row_ptr[n],
                col_idx.len(),
                values.len()
            )));
        }
        for i in 0..n {
            if row_ptr[i] > row_ptr[i + 1] {
                return Err(Error::MalformedCsr(format!(
                    "row_ptr decreases at row {i}"
                )));
            }
            let cols = &col_idx[row_ptr[i]..row_ptr[i + 1]];
            for (k, &c) in cols.iter().enumerate() {
                if c >= n {
                    return Err(Error::IndexOutOfBounds { row: i, col: c, n });
                }
                if k > 0 && cols[k - 1] >= c {
                    return Err(Error::MalformedCsr(format!(
                        "column indices not strictly increasing in row {i}"
                    )));
                }
            }
        }
        Ok(Self {
            n,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Assembles a matrix from `(row, col, value)` triplets. Duplicate
    /// coordinates are summed; explicit zeros are kept in the pattern.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut sorted = triplets.to_vec();
        for &(r, c, _) in &sorted {
            if r >= n || c >= n {
                return Err(Error::IndexOutOfBounds { row: r, col: c, n });
            }
        }
        sorted.sort_by_key(|t| (t.0, t.1));

        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx = Vec::with_capacity(sorted.len());
        let mut values: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in sorted {
            if last == Some((r, c)) {
                *values.last_mut().expect("duplicate follows an entry") += v;
                continue;
            }
            col_idx.push(c);
            values.push(v);
            row_ptr[r + 1] += 1;
            last = Some((r, c));
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(Self {
            n,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    /// Square matrix from dense rows; exact zeros are left out of the pattern.
    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut triplets = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NonSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    triplets.push((i, j, v));
                }
            }
        }
        Self::from_triplets(n, &triplets)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `i`.
    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[range.clone()], &self.values[range])
    }

    pub fn row_nnz(&self, i: usize) -> usize {
        self.row_ptr[i + 1] - self.row_ptr[i]
    }

    /// Stored value at `(i, j)`, or 0 when outside the pattern.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.n]; self.n];
        for (i, row) in out.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                row[c] = v;
            }
        }
        out
    }

    /// Checks that every stored `(i, j, v)` has a stored mirror `(j, i, v)`
    /// with a bitwise-equal value.
    pub fn check_symmetric(&self) -> Result<()> {
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                let (mcols, mvals) = self.row(j);
                match mcols.binary_search(&i) {
                    Ok(k) if mvals[k] == v => {}
                    Ok(k) => {
                        return Err(Error::NotSymmetric {
                            row: i,
                            col: j,
                            value: v,
                            mirror: mvals[k],
                        })
                    }
                    Err(_) => {
                        return Err(Error::NotSymmetric {
                            row: i,
                            col: j,
                            value: v,
                            mirror: 0.0,
                        })
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_symmetric(&self) -> bool {
        self.check_symmetric().is_ok()
    }

    /// Product of row `i` with `x`, accumulated in ascending column order.
    #[inline]
    pub fn row_dot(&self, i: usize, x: &[f64]) -> f64 {
        let (cols, vals) = self.row(i);
        let mut acc = 0.0;
        for (&c, &v) in cols.iter().zip(vals) {
            acc += v * x[c];
        }
        acc
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.n];
        self.matvec_into(x, &mut out)?;
        Ok(out)
    }

    /// `out = A x` without allocating. Parallel over rows for large
    /// matrices; each row is still summed sequentially, so the result is
    /// bitwise independent of the thread count.
    pub fn matvec_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        check_len(self.n, x.len())?;
        check_len(self.n, out.len())?;
        if self.nnz() >= PAR_NNZ_THRESHOLD {
            out.par_iter_mut()
                .enumerate()
                .for_each(|(i, o)| *o = self.row_dot(i, x));
        } else {
            for (i, o) in out.iter_mut().enumerate() {
                *o = self.row_dot(i, x);
            }
        }
        Ok(())
    }

    /// Diagonal of the matrix; entries absent from the pattern are 0.
    pub fn extract_diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }
}

#[inline]
pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

pub(crate) fn check_finite(v: &[f64]) -> Result<()> {
    match v.iter().position(|x| !x.is_finite()) {
        Some(i) => Err(Error::NonFinite(i)),
        None => Ok(()),
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

#[inline]
pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `‖b − Qx‖₂ / ‖b‖₂`.
pub fn rel_residual(q: &CsrMatrix, b: &[f64], x: &[f64]) -> Result<f64> {
    check_len(q.n(), b.len())?;
    let bnorm = norm2(b);
    if bnorm == 0.0 {
        return Err(Error::ZeroRhs);
    }
    let qx = q.matvec(x)?;
    Ok(residual_norm(b, &qx) / bnorm)
}

/// `‖b − qx‖₂` given a precomputed product.
pub(crate) fn residual_norm(b: &[f64], qx: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (bi, qi) in b.iter().zip(qx) {
        let r = bi - qi;
        acc += r * r;
    }
    acc.sqrt()
}

/// Quadratic objective `½⟨x, Qx⟩ − ⟨b, x⟩`.
pub fn objective(q: &CsrMatrix, b: &[f64], x: &[f64]) -> Result<f64> {
    check_len(q.n(), b.len())?;
    let qx = q.matvec(x)?;
    Ok(objective_with(b, x, &qx))
}

/// Objective from a precomputed `Qx`.
pub(crate) fn objective_with(b: &[f64], x: &[f64], qx: &[f64]) -> f64 {
    0.5 * dot(x, qx) - dot(b, x)
}
