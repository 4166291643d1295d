//! Problem ingestion and generation.
//!
//! * Matrix Market coordinate files (`real`, `symmetric` or `general`).
//! * Edge lists (`n m` header, then `m` lines `i j`, 0-based, `#` comments)
//!   turned into graph Laplacians.
//! * The strictly diagonally dominant test family (`n` on the diagonal,
//!   `−1` elsewhere, `b = 1`).
//! * Consistent right-hand sides `b = Q x̄` with `x̄` uniform on `[−1, 1]`,
//!   drawn from ChaCha8 seeded via `seed_from_u64`, so the same seed gives
//!   the same `b` on every platform.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

/// A linear system `Qx = b`, optionally with a known solution.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub q: CsrMatrix,
    pub b: Vec<f64>,
    /// A solution of the system when known (not unique for singular `Q`).
    pub x_star: Option<Vec<f64>>,
    pub label: String,
    /// Non-fatal problems noticed while building the instance, e.g. isolated
    /// graph nodes whose zero diagonal rules out Jacobi-type solvers.
    pub warnings: Vec<String>,
}

/// Simple undirected graph with 0-based node ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeList {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl EdgeList {
    /// Normalizes each edge to `(min, max)` and drops duplicates.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut out = Vec::new();
        for (i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidArgument(format!(
                    "edge ({i}, {j}) out of range for {n} nodes"
                )));
            }
            if i == j {
                return Err(Error::InvalidArgument(format!("self-loop at node {i}")));
            }
            out.push((i.min(j), i.max(j)));
        }
        out.sort_unstable();
        out.dedup();
        Ok(Self { n, edges: out })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(i, j) in &self.edges {
            deg[i] += 1;
            deg[j] += 1;
        }
        deg
    }

    pub fn isolated_nodes(&self) -> Vec<usize> {
        self.degrees()
            .iter()
            .enumerate()
            .filter_map(|(k, &d)| (d == 0).then_some(k))
            .collect()
    }
}

/// Graph Laplacian: degree on the diagonal, `−1` per edge.
pub fn laplacian_from_edges(g: &EdgeList) -> CsrMatrix {
    let deg = g.degrees();
    let mut triplets = Vec::with_capacity(g.n + 2 * g.edges.len());
    for (k, &d) in deg.iter().enumerate() {
        triplets.push((k, k, d as f64));
    }
    for &(i, j) in &g.edges {
        triplets.push((i, j, -1.0));
        triplets.push((j, i, -1.0));
    }
    CsrMatrix::from_triplets(g.n, &triplets).expect("edge indices validated")
}

/// Laplacian instance of `g` with a consistent right-hand side.
pub fn laplacian_instance(g: &EdgeList, seed: u64, label: impl Into<String>) -> ProblemInstance {
    let mut inst = gen_consistent_rhs(laplacian_from_edges(g), seed);
    inst.label = label.into();
    let isolated = g.isolated_nodes();
    if !isolated.is_empty() {
        inst.warnings.push(format!(
            "{} isolated node(s) (first: {}); zero diagonal breaks Jacobi-type solvers",
            isolated.len(),
            isolated[0]
        ));
    }
    inst
}

/// Strictly diagonally dominant system: `Q_kk = n`, `Q_kj = −1`, `b = 1`,
/// solution `x* = 1`. Stored with the full dense pattern.
pub fn gen_sdd(n: usize) -> Result<ProblemInstance> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "diagonally dominant family needs n >= 2, got {n}"
        )));
    }
    let row_ptr: Vec<usize> = (0..=n).map(|i| i * n).collect();
    let mut col_idx = Vec::with_capacity(n * n);
    let mut values = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            col_idx.push(j);
            values.push(if i == j { n as f64 } else { -1.0 });
        }
    }
    let q = CsrMatrix::from_raw(n, row_ptr, col_idx, values)?;
    Ok(ProblemInstance {
        q,
        b: vec![1.0; n],
        x_star: Some(vec![1.0; n]),
        label: format!("sdd-{n}"),
        warnings: Vec::new(),
    })
}

/// Draws `x̄ ∈ [−1, 1]ⁿ` and sets `b = Q x̄`, so `b` lies in the range of `Q`.
pub fn gen_consistent_rhs(q: CsrMatrix, seed: u64) -> ProblemInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x_bar: Vec<f64> = (0..q.n()).map(|_| rng.random_range(-1.0..=1.0)).collect();
    let b = q.matvec(&x_bar).expect("vector sized to the matrix");
    ProblemInstance {
        q,
        b,
        x_star: Some(x_bar),
        label: format!("consistent-{seed}"),
        warnings: Vec::new(),
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads a square real Matrix Market coordinate file into canonical CSR.
/// `symmetric` files are mirrored; `general` files must be symmetric.
pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<CsrMatrix> {
    let path = path.as_ref();
    parse_matrix_market(open(path)?, path)
}

/// Parser behind [`read_matrix_market`]; `origin` only labels errors.
pub fn parse_matrix_market(reader: impl BufRead, origin: &Path) -> Result<CsrMatrix> {
    let perr = |line: usize, msg: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        msg,
    };
    let mut lines = reader.lines().enumerate().map(|(k, l)| (k + 1, l));

    let (hline, header) = match lines.next() {
        Some((k, l)) => (k, l.map_err(|e| perr(k, e.to_string()))?),
        None => return Err(perr(1, "empty file".into())),
    };
    let tokens: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(perr(hline, format!("bad header `{header}`")));
    }
    if tokens[2] != "coordinate" {
        return Err(Error::UnsupportedFormat(format!("`{}` storage", tokens[2])));
    }
    if tokens[3] != "real" {
        return Err(Error::UnsupportedField(tokens[3].clone()));
    }
    let symmetric = match tokens[4].as_str() {
        "symmetric" => true,
        "general" => false,
        other => return Err(Error::UnsupportedFormat(format!("`{other}` symmetry"))),
    };

    let mut size: Option<(usize, usize)> = None;
    let mut triplets = Vec::new();
    let mut read = 0usize;
    for (k, line) in lines {
        let line = line.map_err(|e| perr(k, e.to_string()))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        match size {
            None => {
                if fields.len() != 3 {
                    return Err(perr(k, format!("expected `rows cols nnz`, got `{trimmed}`")));
                }
                let nums: Vec<usize> = fields
                    .iter()
                    .map(|f| f.parse::<usize>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| perr(k, format!("bad size line: {e}")))?;
                if nums[0] != nums[1] {
                    return Err(Error::NonSquare {
                        rows: nums[0],
                        cols: nums[1],
                    });
                }
                size = Some((nums[0], nums[2]));
                triplets.reserve(if symmetric { 2 * nums[2] } else { nums[2] });
            }
            Some((n, nnz)) => {
                if fields.len() != 3 {
                    return Err(perr(k, format!("expected `i j value`, got `{trimmed}`")));
                }
                if read == nnz {
                    return Err(perr(k, format!("more than the declared {nnz} entries")));
                }
                let i: usize = fields[0]
                    .parse()
                    .map_err(|e| perr(k, format!("bad row index: {e}")))?;
                let j: usize = fields[1]
                    .parse()
                    .map_err(|e| perr(k, format!("bad column index: {e}")))?;
                let v: f64 = fields[2]
                    .parse()
                    .map_err(|e| perr(k, format!("bad value: {e}")))?;
                if i == 0 || j == 0 || i > n || j > n {
                    return Err(perr(k, format!("index ({i}, {j}) outside 1..={n}")));
                }
                triplets.push((i - 1, j - 1, v));
                if symmetric && i != j {
                    triplets.push((j - 1, i - 1, v));
                }
                read += 1;
            }
        }
    }
    let (n, nnz) = size.ok_or_else(|| perr(hline, "missing size line".into()))?;
    if read != nnz {
        return Err(perr(hline, format!("declared {nnz} entries, found {read}")));
    }
    let q = CsrMatrix::from_triplets(n, &triplets)?;
    if !symmetric {
        q.check_symmetric()?;
    }
    Ok(q)
}

/// Writes `q` as a Matrix Market coordinate file: `symmetric` with the
/// lower triangle when `q` is symmetric, `general` otherwise. Values use the
/// shortest representation that parses back to the same `f64`.
pub fn write_matrix_market(q: &CsrMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let symmetric = q.is_symmetric();
    let mut entries = Vec::new();
    for i in 0..q.n() {
        let (cols, vals) = q.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            if !symmetric || j <= i {
                entries.push((i, j, v));
            }
        }
    }
    let mut w = std::io::BufWriter::new(File::create(path).map_err(io_err)?);
    let kind = if symmetric { "symmetric" } else { "general" };
    (|| -> std::io::Result<()> {
        writeln!(w, "%%MatrixMarket matrix coordinate real {kind}")?;
        writeln!(w, "{} {} {}", q.n(), q.n(), entries.len())?;
        for (i, j, v) in entries {
            writeln!(w, "{} {} {:?}", i + 1, j + 1, v)?;
        }
        w.flush()
    })()
    .map_err(io_err)
}

/// Reads an edge list: first line `n m`, then `m` lines `i j` (0-based).
/// Lines starting with `#` are ignored.
pub fn read_edge_list(path: impl AsRef<Path>) -> Result<EdgeList> {
    let path = path.as_ref();
    parse_edge_list(open(path)?, path)
}

pub fn parse_edge_list(reader: impl BufRead, origin: &Path) -> Result<EdgeList> {
    let perr = |line: usize, msg: String| Error::Parse {
        path: PathBuf::from(origin),
        line,
        msg,
    };
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    let mut last_line = 0;
    for (k, line) in reader.lines().enumerate() {
        let k = k + 1;
        last_line = k;
        let line = line.map_err(|e| perr(k, e.to_string()))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let nums: Vec<usize> = trimmed
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| perr(k, format!("expected two integers: {e}")))?;
        if nums.len() != 2 {
            return Err(perr(k, format!("expected two integers, got `{trimmed}`")));
        }
        match header {
            None => header = Some((nums[0], nums[1])),
            Some((n, _)) => {
                if nums[0] >= n || nums[1] >= n {
                    return Err(perr(k, format!("node id out of range for {n} nodes")));
                }
                if nums[0] == nums[1] {
                    return Err(perr(k, format!("self-loop at node {}", nums[0])));
                }
                edges.push((nums[0], nums[1]));
            }
        }
    }
    let (n, m) = header.ok_or_else(|| perr(last_line.max(1), "missing `n m` header".into()))?;
    if edges.len() != m {
        return Err(perr(
            last_line.max(1),
            format!("header declares {m} edges, found {}", edges.len()),
        ));
    }
    EdgeList::new(n, edges)
}
