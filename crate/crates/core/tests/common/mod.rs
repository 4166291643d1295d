#![allow(dead_code)]

use accel_jacobi::io::EdgeList;
use accel_jacobi::proximal::ProxMatrix;
use accel_jacobi::CsrMatrix;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn to_na(q: &CsrMatrix) -> DMatrix<f64> {
    DMatrix::from_fn(q.n(), q.n(), |i, j| q.get(i, j))
}

pub fn prox_to_na(j: &ProxMatrix) -> DMatrix<f64> {
    let rows = j.to_dense();
    DMatrix::from_fn(rows.len(), rows.len(), |i, k| rows[i][k])
}

pub fn na_vec(v: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(v)
}

pub fn min_eig(a: &DMatrix<f64>) -> f64 {
    a.clone().symmetric_eigen().eigenvalues.min()
}

pub fn max_eig(a: &DMatrix<f64>) -> f64 {
    a.clone().symmetric_eigen().eigenvalues.max()
}

pub fn dense_solve(q: &CsrMatrix, b: &[f64]) -> Vec<f64> {
    to_na(q)
        .cholesky()
        .expect("positive definite")
        .solve(&na_vec(b))
        .as_slice()
        .to_vec()
}

pub fn dense_objective(q: &DMatrix<f64>, b: &[f64], x: &[f64]) -> f64 {
    let x = na_vec(x);
    0.5 * x.dot(&(q * &x)) - na_vec(b).dot(&x)
}

/// Symmetric matrix of order `1..=max_n` with about 40% structural nonzeros.
pub fn symmetric_matrix(max_n: usize) -> impl Strategy<Value = CsrMatrix> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec((prop::bool::weighted(0.4), -10.0..10.0f64), n * (n + 1) / 2).prop_map(
            move |entries| {
                let mut rows = vec![vec![0.0; n]; n];
                let mut it = entries.into_iter();
                for i in 0..n {
                    for j in i..n {
                        let (keep, v) = it.next().unwrap();
                        if keep {
                            rows[i][j] = v;
                            rows[j][i] = v;
                        }
                    }
                }
                CsrMatrix::from_dense(&rows).unwrap()
            },
        )
    })
}

/// `MᵀM + μI` with sparse random `M`, from a seed.
pub fn random_spd(n: usize, seed: u64) -> CsrMatrix {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let p = (4.0 / n as f64).min(1.0);
    let m = DMatrix::from_fn(n, n, |_, _| {
        if r.random_bool(p) {
            r.random_range(-1.0..=1.0)
        } else {
            0.0
        }
    });
    let mu = r.random_range(0.05..=0.5);
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let mut v: f64 = (0..n).map(|k| m[(k, i)] * m[(k, j)]).sum();
            if i == j {
                v += mu;
            }
            rows[i][j] = v;
            rows[j][i] = v;
        }
    }
    CsrMatrix::from_dense(&rows).unwrap()
}

pub fn random_vec(n: usize, seed: u64) -> Vec<f64> {
    let mut r = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x5151));
    (0..n).map(|_| r.random_range(-1.0..=1.0)).collect()
}

/// Connected graph: random recursive tree plus `extra` random edges.
pub fn random_graph(n: usize, extra: usize, seed: u64) -> EdgeList {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(usize, usize)> = (1..n).map(|k| (r.random_range(0..k), k)).collect();
    for _ in 0..extra {
        let (i, j) = (r.random_range(0..n), r.random_range(0..n));
        if i != j {
            edges.push((i, j));
        }
    }
    EdgeList::new(n, edges).unwrap()
}

/// Random contiguous block offsets for `s` nonempty blocks of `0..n`.
pub fn random_offsets(n: usize, s: usize, seed: u64) -> Vec<usize> {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let mut cuts: Vec<usize> = (1..n).collect();
    for k in (1..cuts.len()).rev() {
        cuts.swap(k, r.random_range(0..=k));
    }
    let mut offsets: Vec<usize> = cuts.into_iter().take(s - 1).collect();
    offsets.extend([0, n]);
    offsets.sort_unstable();
    offsets
}
