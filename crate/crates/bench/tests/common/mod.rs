//! Seeded instance generators and dense reference computations.

#![allow(dead_code)]

use accel_jacobi::io::{laplacian_instance, EdgeList};
use accel_jacobi::proximal::ProxMatrix;
use accel_jacobi::{CsrMatrix, ProblemInstance};
use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `Q = MᵀM + μI` with a sparse random `M` (about four entries per row)
/// and `μ ∈ [0.05, 0.5]`.
pub fn random_spd(n: usize, seed: u64) -> CsrMatrix {
    let mut r = rng(seed);
    let m = random_sparse_factor(n, n, &mut r);
    let mu = r.random_range(0.05..=0.5);
    gram(&m, mu)
}

/// Rank-deficient `Q = MᵀM` with `M` of shape `(n/2) × n`; every column of
/// `M` is nonzero so `Q` has a positive diagonal.
pub fn random_spsd(n: usize, seed: u64) -> CsrMatrix {
    let mut r = rng(seed);
    let m = random_sparse_factor((n / 2).max(1), n, &mut r);
    gram(&m, 0.0)
}

fn random_sparse_factor(rows: usize, cols: usize, r: &mut ChaCha8Rng) -> DMatrix<f64> {
    let p = (4.0 / cols as f64).min(1.0);
    let mut m = DMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            if r.random_bool(p) {
                m[(i, j)] = r.random_range(-1.0..=1.0);
            }
        }
    }
    for j in 0..cols {
        let i = j % rows;
        if m[(i, j)] == 0.0 {
            m[(i, j)] = r.random_range(0.5..=1.0);
        }
    }
    m
}

/// `MᵀM + μI`, built from the upper triangle so it is exactly symmetric.
fn gram(m: &DMatrix<f64>, mu: f64) -> CsrMatrix {
    let n = m.ncols();
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let mut v: f64 = (0..m.nrows()).map(|k| m[(k, i)] * m[(k, j)]).sum();
            if i == j {
                v += mu;
            }
            rows[i][j] = v;
            rows[j][i] = v;
        }
    }
    CsrMatrix::from_dense(&rows).unwrap()
}

pub fn random_rhs(n: usize, seed: u64) -> Vec<f64> {
    let mut r = rng(seed ^ 0x9e37_79b9_7f4a_7c15);
    (0..n).map(|_| r.random_range(-1.0..=1.0)).collect()
}

/// Connected graph: a random recursive spanning tree plus `extra` random
/// edges.
pub fn random_connected_graph(n: usize, extra: usize, seed: u64) -> EdgeList {
    let mut r = rng(seed);
    let mut edges: Vec<(usize, usize)> = (1..n).map(|k| (r.random_range(0..k), k)).collect();
    while edges.len() < n - 1 + extra {
        let (i, j) = (r.random_range(0..n), r.random_range(0..n));
        if i != j {
            edges.push((i, j));
        }
    }
    EdgeList::new(n, edges).unwrap()
}

/// Connected bipartite graph: every edge joins the two node classes, so
/// `I − D⁻¹L` has the eigenvalue `−1` and classical Jacobi cannot settle.
pub fn random_bipartite_graph(n: usize, extra: usize, seed: u64) -> EdgeList {
    assert!(n >= 2);
    let mut r = rng(seed);
    let mut side = vec![false; n];
    side[1] = true;
    let mut members: [Vec<usize>; 2] = [vec![0], vec![1]];
    let mut edges = vec![(0, 1)];
    for k in 2..n {
        let s = r.random_bool(0.5);
        side[k] = s;
        let other = &members[usize::from(!s)];
        edges.push((other[r.random_range(0..other.len())], k));
        members[usize::from(s)].push(k);
    }
    let mut added = 0;
    while added < extra {
        let a = members[0][r.random_range(0..members[0].len())];
        let b = members[1][r.random_range(0..members[1].len())];
        edges.push((a, b));
        added += 1;
    }
    let g = EdgeList::new(n, edges).unwrap();
    debug_assert!(g.edges().iter().all(|&(i, j)| side[i] != side[j]));
    g
}

pub fn laplacian(g: &EdgeList, seed: u64) -> ProblemInstance {
    laplacian_instance(g, seed, format!("graph-{}-{seed}", g.n()))
}

/// Random contiguous partition of `0..n` into `s` nonempty blocks.
pub fn random_offsets(n: usize, s: usize, seed: u64) -> Vec<usize> {
    let mut r = rng(seed);
    let mut cuts: Vec<usize> = (1..n).collect();
    cuts.shuffle(&mut r);
    let mut offsets: Vec<usize> = cuts.into_iter().take(s - 1).collect();
    offsets.push(0);
    offsets.push(n);
    offsets.sort_unstable();
    offsets
}

pub fn to_na(q: &CsrMatrix) -> DMatrix<f64> {
    let n = q.n();
    DMatrix::from_fn(n, n, |i, j| q.get(i, j))
}

pub fn prox_to_na(j: &ProxMatrix) -> DMatrix<f64> {
    let rows = j.to_dense();
    let n = rows.len();
    DMatrix::from_fn(n, n, |i, k| rows[i][k])
}

pub fn direct_solve(q: &CsrMatrix, b: &[f64]) -> Vec<f64> {
    let chol = to_na(q).cholesky().expect("positive definite");
    chol.solve(&DVector::from_column_slice(b)).as_slice().to_vec()
}

pub fn min_eigenvalue(a: &DMatrix<f64>) -> f64 {
    a.clone().symmetric_eigen().eigenvalues.min()
}

pub fn max_eigenvalue(a: &DMatrix<f64>) -> f64 {
    a.clone().symmetric_eigen().eigenvalues.max()
}

/// `½ uᵀ A u`.
pub fn half_quad(a: &DMatrix<f64>, u: &[f64]) -> f64 {
    let v = DVector::from_column_slice(u);
    0.5 * v.dot(&(a * &v))
}

/// `½ xᵀQx − bᵀx`, evaluated densely.
pub fn dense_objective(q: &DMatrix<f64>, b: &[f64], x: &[f64]) -> f64 {
    half_quad(q, x) - DVector::from_column_slice(b).dot(&DVector::from_column_slice(x))
}

pub fn rel_error(x: &[f64], reference: &[f64]) -> f64 {
    let num: f64 = x.iter().zip(reference).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let den: f64 = reference.iter().map(|v| v * v).sum::<f64>().sqrt();
    num / den
}

/// Random SPD systems of the given sizes, `per_size` seeds each.
pub fn spd_suite(sizes: &[usize], per_size: usize, base_seed: u64) -> Vec<ProblemInstance> {
    let mut out = Vec::new();
    for &n in sizes {
        for k in 0..per_size {
            let seed = base_seed + 100 * n as u64 + k as u64;
            let q = random_spd(n, seed);
            let b = random_rhs(n, seed);
            let x_star = direct_solve(&q, &b);
            out.push(ProblemInstance {
                q,
                b,
                x_star: Some(x_star),
                label: format!("spd-{n}-{seed}"),
                warnings: Vec::new(),
            });
        }
    }
    out
}
