//! Digraphs, their random weighted adjacency encodings, and the two graph
//! reductions (weight expansion, vertex splitting).
//!
//! The encoding sets `A[u][v] = x_uv * y_v` on the diagonal and on every edge,
//! with all `x`, `y` drawn uniformly from the nonzero field elements. With
//! high probability the smallest `k` with `(A^k)[s][t] != 0` is the hop
//! distance from `s` to `t`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rand::Rng;

use crate::error::{check_index, Error, Result};
use crate::field::{PrimeField, Scalar};
use crate::matrix::Matrix;
use crate::updates::ElementChange;

/// Shortest-path distance, or no path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Distance {
    Finite(usize),
    Unreachable,
}

impl Distance {
    pub fn finite(self) -> Option<usize> {
        match self {
            Distance::Finite(d) => Some(d),
            Distance::Unreachable => None,
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(d) => write!(f, "{d}"),
            Distance::Unreachable => f.write_str("INF"),
        }
    }
}

/// A simple directed graph on vertices `0..n`, optionally edge-weighted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    edges: BTreeMap<(usize, usize), u32>,
    weighted: bool,
}

impl Digraph {
    pub fn new(n: usize) -> Self {
        Digraph {
            n,
            edges: BTreeMap::new(),
            weighted: false,
        }
    }

    /// An empty graph whose edges carry weights.
    pub fn new_weighted(n: usize) -> Self {
        Digraph {
            weighted: true,
            ..Digraph::new(n)
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Digraph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_weighted(&self) -> bool {
        self.weighted
    }

    pub fn max_weight(&self) -> u32 {
        self.edges.values().copied().max().unwrap_or(1)
    }

    fn check_pair(&self, u: usize, v: usize) -> Result<()> {
        check_index(u, self.n)?;
        check_index(v, self.n)?;
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        Ok(())
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        self.add_weighted_edge(u, v, 1)
    }

    pub fn add_weighted_edge(&mut self, u: usize, v: usize, w: u32) -> Result<()> {
        self.check_pair(u, v)?;
        if w == 0 || (!self.weighted && w != 1) {
            return Err(Error::WeightOutOfRange {
                weight: w,
                max: if self.weighted { u32::MAX } else { 1 },
            });
        }
        if self.edges.contains_key(&(u, v)) {
            return Err(Error::EdgeAlreadyPresent(u, v));
        }
        self.edges.insert((u, v), w);
        Ok(())
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) -> Result<u32> {
        self.edges.remove(&(u, v)).ok_or(Error::EdgeAbsent(u, v))
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains_key(&(u, v))
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<u32> {
        self.edges.get(&(u, v)).copied()
    }

    /// Edges `(u, v, w)` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        self.edges.iter().map(|(&(u, v), &w)| (u, v, w))
    }

    pub fn out_neighbors(&self, u: usize) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.edges.range((u, 0)..(u + 1, 0)).map(|(&(_, v), &w)| (v, w))
    }

    pub fn in_neighbors(&self, v: usize) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.edges
            .iter()
            .filter(move |(&(_, t), _)| t == v)
            .map(|(&(u, _), &w)| (u, w))
    }

    /// Adjacency lists `(target, weight)` indexed by source.
    pub fn adjacency(&self) -> Vec<Vec<(usize, u32)>> {
        let mut adj = vec![Vec::new(); self.n];
        for (u, v, w) in self.edges() {
            adj[u].push((v, w));
        }
        adj
    }

    /// Edge-list text: a header `n m` (or `n m W` for weighted graphs) and one
    /// `u v` (or `u v w`) line per edge, 1-based.
    pub fn to_edge_list(&self) -> String {
        let mut out = if self.weighted {
            format!("{} {} {}\n", self.n, self.edges.len(), self.max_weight())
        } else {
            format!("{} {}\n", self.n, self.edges.len())
        };
        for (u, v, w) in self.edges() {
            if self.weighted {
                out.push_str(&format!("{} {} {}\n", u + 1, v + 1, w));
            } else {
                out.push_str(&format!("{} {}\n", u + 1, v + 1));
            }
        }
        out
    }

    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "missing header".into(),
        })?;
        let nums = parse_numbers(hline, header)?;
        let (n, m, max_w) = match nums[..] {
            [n, m] => (n as usize, m as usize, None),
            [n, m, w] if w >= 1 && w <= u32::MAX as u64 => (n as usize, m as usize, Some(w as u32)),
            _ => {
                return Err(Error::Parse {
                    line: hline,
                    message: "header must be `n m` or `n m W` with W >= 1".into(),
                })
            }
        };
        let mut g = if max_w.is_some() {
            Digraph::new_weighted(n)
        } else {
            Digraph::new(n)
        };
        for (line, body) in lines.by_ref() {
            let nums = parse_numbers(line, body)?;
            let bad = |message: String| Error::Parse { line, message };
            let (u, v, w) = match (&nums[..], max_w) {
                (&[u, v], None) => (u, v, 1),
                (&[u, v, w], Some(max)) => {
                    if w == 0 || w > max as u64 {
                        return Err(bad(format!("weight {w} outside [1, {max}]")));
                    }
                    (u, v, w as u32)
                }
                _ => return Err(bad("wrong number of fields".into())),
            };
            if u == 0 || v == 0 || u as usize > n || v as usize > n {
                return Err(bad(format!("vertex out of range 1..{n}")));
            }
            g.add_weighted_edge(u as usize - 1, v as usize - 1, w)
                .map_err(|e| bad(e.to_string()))?;
        }
        if g.edge_count() != m {
            return Err(Error::Parse {
                line: hline,
                message: format!("header announces {m} edges, found {}", g.edge_count()),
            });
        }
        Ok(g)
    }
}

fn parse_numbers(line: usize, body: &str) -> Result<Vec<u64>> {
    body.split_whitespace()
        .map(|tok| {
            tok.parse::<u64>().map_err(|_| Error::Parse {
                line,
                message: format!("expected an integer, got `{tok}`"),
            })
        })
        .collect()
}

/// Insert or delete.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeOp {
    Insert,
    Delete,
}

/// A digraph with its random weighted adjacency matrix.
#[derive(Clone, Debug)]
pub struct GraphEncoding {
    graph: Digraph,
    fp: PrimeField,
    x: HashMap<(usize, usize), Scalar>,
    y: Vec<Scalar>,
    a: Matrix,
}

/// Samples `y_v` for every vertex, then `x_vv`, then `x_uv` per edge in
/// lexicographic order.
pub fn sample_encoding<R: Rng + ?Sized>(graph: &Digraph, fp: &PrimeField, rng: &mut R) -> Result<GraphEncoding> {
    if graph.is_weighted() {
        return Err(Error::Unsupported(
            "weighted graphs must be expanded before encoding".into(),
        ));
    }
    let n = graph.n();
    let y: Vec<Scalar> = (0..n).map(|_| fp.random_nonzero(rng)).collect();
    let mut x = HashMap::with_capacity(n + graph.edge_count());
    let mut a = Matrix::zeros(n, n);
    for v in 0..n {
        let xv = fp.random_nonzero(rng);
        x.insert((v, v), xv);
        a.set(v, v, fp.mul(xv, y[v]));
    }
    for (u, v, _) in graph.edges() {
        let xv = fp.random_nonzero(rng);
        x.insert((u, v), xv);
        a.set(u, v, fp.mul(xv, y[v]));
    }
    Ok(GraphEncoding {
        graph: graph.clone(),
        fp: *fp,
        x,
        y,
        a,
    })
}

impl GraphEncoding {
    pub fn graph(&self) -> &Digraph {
        &self.graph
    }

    pub fn field(&self) -> &PrimeField {
        &self.fp
    }

    pub fn matrix(&self) -> &Matrix {
        &self.a
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn x(&self, u: usize, v: usize) -> Option<Scalar> {
        self.x.get(&(u, v)).copied()
    }

    pub fn y(&self, v: usize) -> Scalar {
        self.y[v]
    }

    /// Inserts or deletes `uv`, keeping graph and matrix consistent. An
    /// insertion draws a fresh `x_uv`.
    pub fn apply_edge_change<R: Rng + ?Sized>(
        &mut self,
        u: usize,
        v: usize,
        op: EdgeOp,
        rng: &mut R,
    ) -> Result<ElementChange> {
        self.graph.check_pair(u, v)?;
        let old = self.a.get(u, v);
        let new = match op {
            EdgeOp::Insert => {
                self.graph.add_edge(u, v)?;
                let xv = self.fp.random_nonzero(rng);
                self.x.insert((u, v), xv);
                self.fp.mul(xv, self.y[v])
            }
            EdgeOp::Delete => {
                self.graph.remove_edge(u, v)?;
                self.x.remove(&(u, v));
                Scalar::ZERO
            }
        };
        self.a.set(u, v, new);
        Ok(ElementChange {
            row: u,
            col: v,
            old,
            new,
        })
    }
}

/// Index of the first nonzero value, counting from 1.
pub fn first_nonzero_power(values: &[Scalar]) -> Option<usize> {
    values.iter().position(|v| !v.is_zero()).map(|k| k + 1)
}

/// Correspondence between a weighted graph and its unit-weight expansion.
///
/// Copy `c` of vertex `v` (`1 <= c <= W`) is vertex `(c-1) n + v`; copy 1 is
/// `v` itself. Copies form a chain `v^W -> ... -> v^1` and an edge `uv` of
/// weight `c` becomes `u^1 -> v^c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WeightExpandMap {
    pub n: usize,
    pub max_weight: u32,
}

impl WeightExpandMap {
    pub fn copy(&self, v: usize, c: u32) -> usize {
        (c as usize - 1) * self.n + v
    }

    /// The vertex standing for `v` in the expansion.
    pub fn vertex(&self, v: usize) -> usize {
        v
    }

    /// Original vertex and copy number of an expanded vertex.
    pub fn inverse(&self, x: usize) -> (usize, u32) {
        (x % self.n, (x / self.n) as u32 + 1)
    }

    /// The expanded edge standing for `uv` of weight `w`.
    pub fn edge(&self, u: usize, v: usize, w: u32) -> (usize, usize) {
        (self.copy(u, 1), self.copy(v, w))
    }
}

pub fn expand_weights(graph: &Digraph, max_weight: u32) -> Result<(Digraph, WeightExpandMap)> {
    if max_weight == 0 {
        return Err(Error::WeightOutOfRange { weight: 0, max: 0 });
    }
    let n = graph.n();
    let map = WeightExpandMap { n, max_weight };
    let mut g = Digraph::new(n * max_weight as usize);
    for v in 0..n {
        for c in 2..=max_weight {
            g.add_edge(map.copy(v, c), map.copy(v, c - 1))?;
        }
    }
    for (u, v, w) in graph.edges() {
        if w == 0 || w > max_weight {
            return Err(Error::WeightOutOfRange {
                weight: w,
                max: max_weight,
            });
        }
        let (a, b) = map.edge(u, v, w);
        g.add_edge(a, b)?;
    }
    Ok((g, map))
}

/// Correspondence between a graph and its split graph: `v_in = v`,
/// `v_out = v + n`, with the edge `v_in -> v_out` for every `v` and
/// `u_out -> v_in` for every edge `uv`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VertexSplitMap {
    pub n: usize,
}

impl VertexSplitMap {
    pub fn v_in(&self, v: usize) -> usize {
        v
    }

    pub fn v_out(&self, v: usize) -> usize {
        v + self.n
    }

    pub fn inverse(&self, x: usize) -> usize {
        x % self.n
    }

    /// The split edge standing for edge `uv`.
    pub fn edge(&self, u: usize, v: usize) -> (usize, usize) {
        (self.v_out(u), self.v_in(v))
    }

    /// The split edge whose removal stands for removing vertex `v`.
    pub fn vertex_edge(&self, v: usize) -> (usize, usize) {
        (self.v_in(v), self.v_out(v))
    }

    /// `(d - 1) / 2` for a split-graph distance from `s_in` to `t_out`.
    pub fn back(&self, d: Distance) -> Distance {
        match d {
            Distance::Finite(d) if d >= 1 => Distance::Finite((d - 1) / 2),
            Distance::Finite(_) => Distance::Unreachable,
            Distance::Unreachable => Distance::Unreachable,
        }
    }
}

pub fn split_vertices(graph: &Digraph) -> (Digraph, VertexSplitMap) {
    let n = graph.n();
    let map = VertexSplitMap { n };
    let mut g = Digraph::new(2 * n);
    for v in 0..n {
        let (a, b) = map.vertex_edge(v);
        g.add_edge(a, b).expect("distinct split vertices");
    }
    for (u, v, _) in graph.edges() {
        let (a, b) = map.edge(u, v);
        g.add_edge(a, b).expect("distinct split vertices");
    }
    (g, map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn edge_list_round_trip() {
        let mut g = Digraph::new_weighted(3);
        g.add_weighted_edge(0, 2, 3).unwrap();
        g.add_weighted_edge(2, 1, 1).unwrap();
        let text = g.to_edge_list();
        assert_eq!(text, "3 2 3\n1 3 3\n3 2 1\n");
        assert_eq!(Digraph::parse_edge_list(&text).unwrap(), g);
        assert_eq!(Digraph::new(4).to_edge_list(), "4 0\n");
    }

    #[test]
    fn parse_errors_name_the_line() {
        let err = Digraph::parse_edge_list("3 2\n1 2\n2 2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = Digraph::parse_edge_list("3 1\n1 x\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn encoding_support_and_changes() {
        let fp = PrimeField::new(1_000_003).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let g = Digraph::from_edges(3, &[(0, 1)]).unwrap();
        let mut enc = sample_encoding(&g, &fp, &mut rng).unwrap();
        let a = enc.matrix();
        assert!(!a.get(0, 1).is_zero() && a.get(1, 0).is_zero() && !a.get(2, 2).is_zero());
        let ins = enc.apply_edge_change(1, 2, EdgeOp::Insert, &mut rng).unwrap();
        assert!(!ins.new.is_zero() && ins.old.is_zero());
        assert_eq!(
            enc.apply_edge_change(1, 2, EdgeOp::Insert, &mut rng),
            Err(Error::EdgeAlreadyPresent(1, 2))
        );
        enc.apply_edge_change(1, 2, EdgeOp::Delete, &mut rng).unwrap();
        assert!(enc.matrix().get(1, 2).is_zero());
        assert_eq!(enc.graph(), &g);
        assert_eq!(
            enc.apply_edge_change(1, 2, EdgeOp::Delete, &mut rng),
            Err(Error::EdgeAbsent(1, 2))
        );
    }

    #[test]
    fn reductions_shape() {
        let mut g = Digraph::new_weighted(2);
        g.add_weighted_edge(0, 1, 3).unwrap();
        let (e, map) = expand_weights(&g, 3).unwrap();
        assert_eq!(e.n(), 6);
        assert!(e.has_edge(0, map.copy(1, 3)));
        assert!(e.has_edge(map.copy(1, 3), map.copy(1, 2)));
        assert!(e.has_edge(map.copy(1, 2), 1));

        let (s, smap) = split_vertices(&Digraph::from_edges(2, &[(0, 1)]).unwrap());
        assert!(s.has_edge(smap.v_out(0), smap.v_in(1)));
        assert_eq!(smap.back(Distance::Finite(3)), Distance::Finite(1));
        assert_eq!(smap.back(Distance::Finite(1)), Distance::Finite(0));
    }
}
