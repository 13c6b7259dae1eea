//! The sparse directed stochastic block model: parameters, label sampling,
//! edge-probability matrices and Bernoulli adjacency sampling.

use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::matrix::DenseMatrix;

/// Base connection probabilities between communities together with the
/// sparsity multiplier applied to all of them.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMatrix {
    k: usize,
    entries: Vec<f64>,
    gamma: f64,
}

impl BlockMatrix {
    /// Builds a `k x k` block matrix. Entries and `gamma` must lie in `[0, 1]`.
    ///
    /// Distinct rows are not enforced here (use [`BlockMatrix::has_distinct_rows`]);
    /// degenerate matrices are useful for testing separation quantities.
    pub fn new<R: AsRef<[f64]>>(rows: &[R], gamma: f64) -> Result<Self> {
        let k = rows.len();
        if k == 0 {
            return invalid("block matrix needs at least one community");
        }
        let mut entries = Vec::with_capacity(k * k);
        for (a, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != k {
                return invalid(format!("block row {a} has {} entries, expected {k}", row.len()));
            }
            for (b, &v) in row.iter().enumerate() {
                if !(0.0..=1.0).contains(&v) {
                    return invalid(format!("B[{a}][{b}] = {v} is outside [0, 1]"));
                }
            }
            entries.extend_from_slice(row);
        }
        if !(0.0..=1.0).contains(&gamma) {
            return invalid(format!("gamma = {gamma} is outside [0, 1]"));
        }
        Ok(Self { k, entries, gamma })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Unscaled entry `B[a][b]`.
    pub fn base(&self, a: usize, b: usize) -> f64 {
        self.entries[a * self.k + b]
    }

    pub fn base_row(&self, a: usize) -> &[f64] {
        &self.entries[a * self.k..(a + 1) * self.k]
    }

    /// Scaled entry `gamma * B[a][b]`.
    pub fn probability(&self, a: usize, b: usize) -> f64 {
        self.gamma * self.base(a, b)
    }

    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        let rows: Vec<&[f64]> = (0..self.k).map(|a| self.base_row(a)).collect();
        Self::new(&rows, gamma)
    }

    pub fn has_distinct_rows(&self) -> bool {
        (0..self.k).all(|a| (a + 1..self.k).all(|b| self.base_row(a) != self.base_row(b)))
    }
}

/// Community assignment probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct CommunityProbs {
    rho: Vec<f64>,
}

impl CommunityProbs {
    /// Entries must be nonnegative and sum to one within `1e-12`.
    pub fn new(rho: Vec<f64>) -> Result<Self> {
        if rho.is_empty() {
            return invalid("community probabilities must be nonempty");
        }
        if let Some(v) = rho.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return invalid(format!("community probability {v} is negative or not finite"));
        }
        let total: f64 = rho.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return invalid(format!("community probabilities sum to {total}, not 1"));
        }
        Ok(Self { rho })
    }

    pub fn uniform(k: usize) -> Result<Self> {
        if k == 0 {
            return invalid("need at least one community");
        }
        Ok(Self {
            rho: vec![1.0 / k as f64; k],
        })
    }

    pub fn k(&self) -> usize {
        self.rho.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.rho
    }

    pub fn rho_min(&self) -> f64 {
        self.rho.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Community labels `0..k` for each node.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LabelVector {
    labels: Vec<usize>,
    k: usize,
}

impl LabelVector {
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if let Some((i, l)) = labels.iter().enumerate().find(|(_, &l)| l >= k) {
            return invalid(format!("label {l} of node {i} is not below k = {k}"));
        }
        Ok(Self { labels, k })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.labels
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.labels
    }

    /// Community sizes `n_0, ..., n_{k-1}`.
    pub fn counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.k];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Smallest community size (communities are indexed, not nodes).
    pub fn n_min(&self) -> usize {
        self.counts().into_iter().min().unwrap_or(0)
    }
}

/// Edge probabilities `P_ij = gamma * B[pi(i)][pi(j)]`, diagonal included.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityMatrix {
    values: DenseMatrix,
}

impl ProbabilityMatrix {
    pub fn n(&self) -> usize {
        self.values.rows()
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values.get(i, j)
    }

    /// Wraps an arbitrary square matrix with entries in `[0, 1]`; used when a
    /// probability matrix does not come from a block model.
    pub fn from_matrix(values: DenseMatrix) -> Result<Self> {
        if values.rows() != values.cols() {
            return invalid("probability matrix must be square");
        }
        if let Some(v) = values.as_slice().iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return invalid(format!("probability {v} is outside [0, 1]"));
        }
        Ok(Self { values })
    }
}

/// Binary graph without self-loops, stored both as bit-packed rows and as
/// sorted out-neighbour lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjacencyMatrix {
    n: usize,
    directed: bool,
    words: usize,
    bits: Vec<u64>,
    out: Vec<Vec<u32>>,
}

impl AdjacencyMatrix {
    fn empty(n: usize, directed: bool) -> Self {
        let words = n.div_ceil(64);
        Self {
            n,
            directed,
            words,
            bits: vec![0; n * words],
            out: vec![Vec::new(); n],
        }
    }

    // Caller guarantees i != j and the edge is not already present in order.
    fn push_edge(&mut self, i: usize, j: usize) {
        self.bits[i * self.words + j / 64] |= 1 << (j % 64);
        self.out[i].push(j as u32);
    }

    /// Builds a graph from an edge list. For undirected graphs each edge is
    /// inserted in both directions. Duplicates are ignored.
    pub fn from_edges<I>(n: usize, directed: bool, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut a = Self::empty(n, directed);
        for (i, j) in edges {
            if i >= n || j >= n {
                return invalid(format!("edge ({i}, {j}) out of range for n = {n}"));
            }
            if i == j {
                return invalid(format!("self-loop at node {i}"));
            }
            a.bits[i * a.words + j / 64] |= 1 << (j % 64);
            if !directed {
                a.bits[j * a.words + i / 64] |= 1 << (i % 64);
            }
        }
        a.rebuild_lists();
        Ok(a)
    }

    /// Builds a graph from a dense 0/1 matrix.
    pub fn from_dense(rows: &[Vec<u8>], directed: bool) -> Result<Self> {
        let n = rows.len();
        let mut edges = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return invalid(format!("row {i} has length {}, expected {n}", row.len()));
            }
            for (j, &v) in row.iter().enumerate() {
                match v {
                    0 => {}
                    1 => edges.push((i, j)),
                    _ => return invalid(format!("entry ({i}, {j}) = {v} is not binary")),
                }
            }
        }
        let a = Self::from_edges(n, true, edges)?;
        if !directed && !a.is_symmetric() {
            return invalid("undirected adjacency matrix must be symmetric");
        }
        Ok(Self { directed, ..a })
    }

    fn rebuild_lists(&mut self) {
        for i in 0..self.n {
            let row = &self.bits[i * self.words..(i + 1) * self.words];
            self.out[i] = row
                .iter()
                .enumerate()
                .flat_map(|(w, &word)| {
                    let mut word = word;
                    std::iter::from_fn(move || {
                        if word == 0 {
                            return None;
                        }
                        let b = word.trailing_zeros() as usize;
                        word &= word - 1;
                        Some((w * 64 + b) as u32)
                    })
                })
                .collect();
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    /// Bit-packed row `i` (`ceil(n / 64)` words, bit `j % 64` of word `j / 64`).
    pub fn row_bits(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    /// Sorted out-neighbours of `i`.
    pub fn out_neighbors(&self, i: usize) -> &[u32] {
        &self.out[i]
    }

    pub fn out_degree(&self, i: usize) -> usize {
        self.out[i].len()
    }

    /// Number of stored ordered pairs `(i, j)` with `A_ij = 1`.
    pub fn nnz(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    /// In-neighbour lists (column supports), sorted.
    pub fn in_neighbors(&self) -> Vec<Vec<u32>> {
        let mut cols = vec![Vec::new(); self.n];
        for (i, row) in self.out.iter().enumerate() {
            for &j in row {
                cols[j as usize].push(i as u32);
            }
        }
        cols
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| self.out[i].iter().all(|&j| self.get(j as usize, i)))
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.n, self.n);
        for (i, row) in self.out.iter().enumerate() {
            for &j in row {
                m[(i, j as usize)] = 1.0;
            }
        }
        m
    }

    /// Plain-text edge list: a `# n=<n> directed=<0|1>` header followed by
    /// one `i j` pair per line (0-based). Undirected graphs list each edge
    /// once with `i < j`.
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("# n={} directed={}\n", self.n, u8::from(self.directed));
        for (i, row) in self.out.iter().enumerate() {
            for &j in row {
                if self.directed || i < j as usize {
                    writeln!(s, "{i} {j}").expect("write to string");
                }
            }
        }
        s
    }

    pub fn parse_edge_list(text: &str, origin: &Path) -> Result<Self> {
        let parse_err = |line: usize, message: String| Error::Parse {
            path: origin.to_path_buf(),
            line,
            message,
        };
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| parse_err(1, "empty edge list".into()))?;
        let mut n = None;
        let mut directed = None;
        for field in header
            .strip_prefix('#')
            .ok_or_else(|| parse_err(1, format!("expected header, found {header:?}")))?
            .split_whitespace()
        {
            match field.split_once('=') {
                Some(("n", v)) => n = v.parse::<usize>().ok(),
                Some(("directed", "0")) => directed = Some(false),
                Some(("directed", "1")) => directed = Some(true),
                _ => return Err(parse_err(1, format!("unrecognised header field {field:?}"))),
            }
        }
        let (n, directed) = match (n, directed) {
            (Some(n), Some(d)) => (n, d),
            _ => return Err(parse_err(1, "header must define n and directed".into())),
        };
        let mut edges = Vec::new();
        for (idx, line) in lines {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace().map(str::parse::<usize>);
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(i)), Some(Ok(j)), None) => edges.push((i, j)),
                _ => return Err(parse_err(idx + 1, format!("expected `i j`, found {line:?}"))),
            }
        }
        Self::from_edges(n, directed, edges).map_err(|e| parse_err(0, e.to_string()))
    }

    pub fn read_edge_list(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_edge_list(&text, path)
    }

    pub fn write_edge_list(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_edge_list()).map_err(|e| Error::io(path, e))
    }
}

/// Draws `n` i.i.d. labels from `Categorical(rho)`.
pub fn sample_labels<R: Rng + ?Sized>(
    probs: &CommunityProbs,
    n: usize,
    rng: &mut R,
) -> Result<LabelVector> {
    if n == 0 {
        return invalid("need at least one node");
    }
    let rho = probs.as_slice();
    let k = rho.len();
    let mut cumulative = Vec::with_capacity(k);
    let mut acc = 0.0;
    for &p in rho {
        acc += p;
        cumulative.push(acc);
    }
    // Rounding can leave the final cumulative slightly below 1.
    let last = rho.iter().rposition(|&p| p > 0.0).unwrap_or(k - 1);
    let labels = (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            cumulative
                .iter()
                .zip(rho)
                .position(|(&c, &p)| p > 0.0 && u < c)
                .unwrap_or(last)
        })
        .collect();
    LabelVector::new(labels, k)
}

pub fn build_probability_matrix(
    labels: &LabelVector,
    block: &BlockMatrix,
) -> Result<ProbabilityMatrix> {
    let k = block.k();
    if let Some((i, &l)) = labels.as_slice().iter().enumerate().find(|(_, &l)| l >= k) {
        return invalid(format!("label {l} of node {i} exceeds block size {k}"));
    }
    let n = labels.len();
    let mut values = DenseMatrix::zeros(n, n);
    for (i, &a) in labels.as_slice().iter().enumerate() {
        let row = values.row_mut(i);
        for (dst, &b) in row.iter_mut().zip(labels.as_slice()) {
            *dst = block.probability(a, b);
        }
    }
    Ok(ProbabilityMatrix { values })
}

/// Independent `Bernoulli(P_ij)` for every ordered pair `i != j`.
pub fn sample_directed<R: Rng + ?Sized>(p: &ProbabilityMatrix, rng: &mut R) -> AdjacencyMatrix {
    let n = p.n();
    let mut a = AdjacencyMatrix::empty(n, true);
    for i in 0..n {
        let row = p.matrix().row(i);
        for (j, &pij) in row.iter().enumerate() {
            if i != j && rng.random::<f64>() < pij {
                a.push_edge(i, j);
            }
        }
    }
    a
}

/// One `Bernoulli(P_ij)` per unordered pair `i < j`, mirrored to `(j, i)`.
pub fn sample_undirected<R: Rng + ?Sized>(p: &ProbabilityMatrix, rng: &mut R) -> AdjacencyMatrix {
    let n = p.n();
    let mut a = AdjacencyMatrix::empty(n, false);
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p.get(i, j) {
                a.bits[i * a.words + j / 64] |= 1 << (j % 64);
                a.bits[j * a.words + i / 64] |= 1 << (i % 64);
            }
        }
    }
    a.rebuild_lists();
    a
}

/// Minimum Euclidean distance between distinct rows of the unscaled block matrix.
pub fn block_row_separation(block: &BlockMatrix) -> Result<f64> {
    let k = block.k();
    if k < 2 {
        return invalid("row separation needs at least two communities");
    }
    let mut best = f64::INFINITY;
    for a in 0..k {
        for b in a + 1..k {
            let d2: f64 = block
                .base_row(a)
                .iter()
                .zip(block.base_row(b))
                .map(|(x, y)| (x - y) * (x - y))
                .sum();
            best = best.min(d2.sqrt());
        }
    }
    Ok(best)
}
