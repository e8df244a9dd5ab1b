//! Distance oracles for digraphs built on matrix power queries.
//!
//! All three oracles encode the graph as a random matrix `A` (see
//! [`crate::graphenc`]) and read hop distances as the first nonzero power of
//! an entry. Long distances are routed through a random hitting set `H`:
//! bounded-hop distances between `H`, `s` and `t` form a small auxiliary
//! graph on which Dijkstra finishes the job.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use rand::Rng;

use crate::error::{dim_err, Result};
use crate::field::Scalar;
use crate::frobenius::PowerOracle;
use crate::graphenc::Distance;
use crate::matrix::Matrix;

pub mod brute;
mod dso;
mod dynamic;
mod vertex;

pub use brute::{bfs_oracle, dijkstra_oracle};
pub use dso::{DsoFrontEnd, MultiFailureDso};
pub use dynamic::DynamicEdgeOracle;
pub use vertex::VertexUpdateOracle;

/// Default hitting-set oversampling constant.
pub const DEFAULT_GAMMA: f64 = 4.0;

/// Default exponent: phases of `ceil(n^(1-alpha))` updates, hop bound
/// `ceil(n^alpha)`.
pub const DEFAULT_ALPHA: f64 = 0.5;

/// Encodings are resampled this many times when the Frobenius form cannot be
/// built.
pub const ENCODING_ATTEMPTS: usize = 3;

/// A failed edge or vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Failure {
    Edge(usize, usize),
    Vertex(usize),
}

/// A random vertex sample meant to hit every shortest path of `h` or more
/// hops.
#[derive(Clone, Debug, PartialEq)]
pub struct HittingSet {
    pub h: usize,
    pub gamma: f64,
    /// Sorted, without duplicates.
    pub vertices: Vec<usize>,
}

/// `ceil(gamma * (n/h) * ln n)`, clamped to `n`.
pub fn hitting_set_size(n: usize, h: usize, gamma: f64) -> usize {
    if n <= 1 {
        return n;
    }
    let target = (gamma * (n as f64 / h.max(1) as f64) * (n as f64).ln()).ceil();
    if target >= n as f64 {
        n
    } else {
        target as usize
    }
}

/// Draws the target number of vertices uniformly with replacement and drops
/// repeats; takes all of `V` once the target reaches `n`.
pub fn sample_hitting_set<R: Rng + ?Sized>(n: usize, h: usize, gamma: f64, rng: &mut R) -> HittingSet {
    let size = hitting_set_size(n, h, gamma);
    let mut vertices: Vec<usize> = if size >= n {
        (0..n).collect()
    } else {
        (0..size).map(|_| rng.gen_range(0..n)).collect()
    };
    vertices.sort_unstable();
    vertices.dedup();
    HittingSet { h, gamma, vertices }
}

/// Shortest `s`-`t` distance in the graph whose weighted edges are
/// `h_edges[(x, y)]`.
pub fn bounded_graph_dijkstra(h_edges: &HashMap<(usize, usize), usize>, s: usize, t: usize) -> Distance {
    if s == t {
        return Distance::Finite(0);
    }
    let mut adj: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
    for (&(x, y), &d) in h_edges {
        adj.entry(x).or_default().push((y, d));
    }
    let mut dist: HashMap<usize, usize> = HashMap::from([(s, 0)]);
    let mut heap = BinaryHeap::from([Reverse((0usize, s))]);
    while let Some(Reverse((d, x))) = heap.pop() {
        if x == t {
            return Distance::Finite(d);
        }
        if dist.get(&x).is_some_and(|&best| d > best) {
            continue;
        }
        for &(y, w) in adj.get(&x).map(Vec::as_slice).unwrap_or(&[]) {
            let nd = d + w;
            if dist.get(&y).is_none_or(|&best| nd < best) {
                dist.insert(y, nd);
                heap.push(Reverse((nd, y)));
            }
        }
    }
    Distance::Unreachable
}

fn add_edge_min(edges: &mut HashMap<(usize, usize), usize>, x: usize, y: usize, d: usize) {
    if x == y {
        return;
    }
    let e = edges.entry((x, y)).or_insert(d);
    *e = (*e).min(d);
}

/// `(M^k)_{rows, cols}` for `k = 1..h`, addressed by vertex.
#[derive(Clone, Debug)]
pub struct PowerBlock {
    rows: Vec<usize>,
    cols: Vec<usize>,
    row_pos: HashMap<usize, usize>,
    col_pos: HashMap<usize, usize>,
    mats: Vec<Matrix>,
}

impl PowerBlock {
    pub fn new(rows: Vec<usize>, cols: Vec<usize>, mats: Vec<Matrix>) -> Result<Self> {
        if mats.iter().any(|m| m.rows() != rows.len() || m.cols() != cols.len()) {
            return Err(dim_err("power block shape"));
        }
        let mut row_pos = HashMap::new();
        for (i, &r) in rows.iter().enumerate() {
            row_pos.entry(r).or_insert(i);
        }
        let mut col_pos = HashMap::new();
        for (j, &c) in cols.iter().enumerate() {
            col_pos.entry(c).or_insert(j);
        }
        Ok(PowerBlock {
            rows,
            cols,
            row_pos,
            col_pos,
            mats,
        })
    }

    pub fn compute(oracle: &PowerOracle, rows: Vec<usize>, cols: Vec<usize>, h: usize) -> Result<Self> {
        let mats = oracle.query_submatrix_powers(&rows, &cols, h)?;
        PowerBlock::new(rows, cols, mats)
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn cols(&self) -> &[usize] {
        &self.cols
    }

    /// Power matrices, `k = 1..h`.
    pub fn mats(&self) -> &[Matrix] {
        &self.mats
    }

    pub fn h(&self) -> usize {
        self.mats.len()
    }

    fn position(&self, r: usize, c: usize) -> Option<(usize, usize)> {
        Some((*self.row_pos.get(&r)?, *self.col_pos.get(&c)?))
    }

    /// `(M^k)_{r,c}` for `k = 1..h`, if both indices are covered.
    pub fn entry(&self, r: usize, c: usize) -> Option<Vec<Scalar>> {
        let (i, j) = self.position(r, c)?;
        Some(self.mats.iter().map(|m| m.get(i, j)).collect())
    }

    /// Smallest `k` with `(M^k)_{r,c} != 0`.
    pub fn first_nonzero(&self, r: usize, c: usize) -> Option<usize> {
        let (i, j) = self.position(r, c)?;
        self.mats.iter().position(|m| !m.get(i, j).is_zero()).map(|k| k + 1)
    }
}

/// Reads submatrix power sequences from whichever block covers each entry.
pub(crate) fn extract_powers(blocks: &[&PowerBlock], rows: &[usize], cols: &[usize], h: usize) -> Result<Vec<Matrix>> {
    let mut out = vec![Matrix::zeros(rows.len(), cols.len()); h];
    for (i, &r) in rows.iter().enumerate() {
        for (j, &c) in cols.iter().enumerate() {
            let (block, (bi, bj)) = blocks
                .iter()
                .find_map(|b| b.position(r, c).map(|p| (b, p)))
                .ok_or_else(|| dim_err(format!("no stored powers for entry ({r}, {c})")))?;
            for (k, m) in out.iter_mut().enumerate() {
                m.set(i, j, block.mats[k].get(bi, bj));
            }
        }
    }
    Ok(out)
}

/// Bounded distances among `H` (from powers over `H x H`).
pub(crate) fn hitting_edges(block: &PowerBlock) -> HashMap<(usize, usize), usize> {
    let mut edges = HashMap::new();
    for &x in block.rows() {
        for &y in block.cols() {
            if let Some(k) = block.first_nonzero(x, y) {
                add_edge_min(&mut edges, x, y, k);
            }
        }
    }
    edges
}

/// Adds the `s` row and `t` column edges and runs Dijkstra.
pub(crate) fn route(
    mut edges: HashMap<(usize, usize), usize>,
    s_row: &PowerBlock,
    t_col: &PowerBlock,
    s: usize,
    t: usize,
) -> Distance {
    for &y in s_row.cols() {
        if let Some(k) = s_row.first_nonzero(s, y) {
            add_edge_min(&mut edges, s, y, k);
        }
    }
    for &x in t_col.rows() {
        if let Some(k) = t_col.first_nonzero(x, t) {
            add_edge_min(&mut edges, x, t, k);
        }
    }
    bounded_graph_dijkstra(&edges, s, t)
}

/// Sorted union without duplicates.
pub(crate) fn union_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut v: Vec<usize> = a.iter().chain(b).copied().collect();
    v.sort_unstable();
    v.dedup();
    v
}
