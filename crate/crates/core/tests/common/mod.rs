//! Reference implementations used as test oracles.
//!
//! Everything here works on plain `u64` residues with `u128` arithmetic and
//! does not call into the library's arithmetic.

#![allow(dead_code)]

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use fnf_oracles::graphenc::{Digraph, Distance};
use fnf_oracles::{Matrix, PrimeField, Scalar};

pub type Dense = Vec<Vec<u64>>;

pub fn mulm(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn addm(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 + b as u128) % p as u128) as u64
}

pub fn subm(a: u64, b: u64, p: u64) -> u64 {
    addm(a, p - b % p, p)
}

pub fn powm(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulm(r, b, p);
        }
        b = mulm(b, b, p);
        e >>= 1;
    }
    r
}

pub fn invm(a: u64, p: u64) -> u64 {
    powm(a, p - 2, p)
}

pub fn dense(m: &Matrix) -> Dense {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|x| x.value()).collect())
        .collect()
}

pub fn values(v: &[Scalar]) -> Vec<u64> {
    v.iter().map(|x| x.value()).collect()
}

pub fn identity(n: usize) -> Dense {
    (0..n).map(|i| (0..n).map(|j| u64::from(i == j)).collect()).collect()
}

pub fn mat_mul(a: &Dense, b: &Dense, p: u64) -> Dense {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let s: u128 = (0..inner).map(|k| row[k] as u128 * b[k][j] as u128 % p as u128).sum();
                    (s % p as u128) as u64
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &Dense, v: &[u64], p: u64) -> Vec<u64> {
    a.iter()
        .map(|row| {
            let s: u128 = row
                .iter()
                .zip(v)
                .map(|(&x, &y)| x as u128 * y as u128 % p as u128)
                .sum();
            (s % p as u128) as u64
        })
        .collect()
}

/// `A^1, ..., A^h`.
pub fn powers(a: &Dense, h: usize, p: u64) -> Vec<Dense> {
    let mut out = Vec::with_capacity(h);
    let mut cur = a.clone();
    for _ in 0..h {
        out.push(cur.clone());
        cur = mat_mul(&cur, a, p);
    }
    out
}

pub fn sub_block(a: &Dense, rows: &[usize], cols: &[usize]) -> Dense {
    rows.iter().map(|&i| cols.iter().map(|&j| a[i][j]).collect()).collect()
}

/// `u, Au, ..., A^(m-1) u`.
pub fn iterates(a: &Dense, u: &[u64], m: usize, p: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::with_capacity(m);
    let mut cur = u.to_vec();
    for _ in 0..m {
        out.push(cur.clone());
        cur = mat_vec(a, &cur, p);
    }
    out
}

/// Rank by Gaussian elimination.
pub fn rank(mut m: Dense, p: u64) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..rows).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, piv);
        let inv = invm(m[r][c], p);
        for i in 0..rows {
            if i != r && m[i][c] != 0 {
                let f = mulm(m[i][c], inv, p);
                for j in c..cols {
                    let t = mulm(f, m[r][j], p);
                    m[i][j] = subm(m[i][j], t, p);
                }
            }
        }
        r += 1;
    }
    r
}

pub fn det(mut m: Dense, p: u64) -> u64 {
    let n = m.len();
    let mut d = 1u64;
    for c in 0..n {
        let Some(piv) = (c..n).find(|&i| m[i][c] != 0) else {
            return 0;
        };
        if piv != c {
            m.swap(c, piv);
            d = subm(0, d, p);
        }
        d = mulm(d, m[c][c], p);
        let inv = invm(m[c][c], p);
        for i in c + 1..n {
            let f = mulm(m[i][c], inv, p);
            for j in c..n {
                let t = mulm(f, m[c][j], p);
                m[i][j] = subm(m[i][j], t, p);
            }
        }
    }
    d
}

/// Coefficients `c_0..c_{n-1}` of the monic `det(xI - A)`, by evaluation at
/// `0..=n` and Lagrange interpolation.
pub fn charpoly(a: &Dense, p: u64) -> Vec<u64> {
    let n = a.len();
    let xs: Vec<u64> = (0..=n as u64).collect();
    let ys: Vec<u64> = xs
        .iter()
        .map(|&x| {
            let m: Dense = (0..n)
                .map(|i| (0..n).map(|j| subm(if i == j { x } else { 0 }, a[i][j], p)).collect())
                .collect();
            det(m, p)
        })
        .collect();
    let mut out = vec![0u64; n + 1];
    for (i, &xi) in xs.iter().enumerate() {
        // basis polynomial prod_{j != i} (x - x_j) / (x_i - x_j)
        let mut basis = vec![1u64];
        let mut denom = 1u64;
        for (j, &xj) in xs.iter().enumerate() {
            if i == j {
                continue;
            }
            let mut next = vec![0u64; basis.len() + 1];
            for (k, &b) in basis.iter().enumerate() {
                next[k + 1] = addm(next[k + 1], b, p);
                next[k] = subm(next[k], mulm(b, xj, p), p);
            }
            basis = next;
            denom = mulm(denom, subm(xi, xj, p), p);
        }
        let scale = mulm(ys[i], invm(denom, p), p);
        for (o, b) in out.iter_mut().zip(&basis) {
            *o = addm(*o, mulm(*b, scale, p), p);
        }
    }
    out.truncate(n);
    out
}

/// Minimal polynomial has full degree iff `I, A, ..., A^(n-1)` are independent.
pub fn is_generic(a: &Dense, p: u64) -> bool {
    let n = a.len();
    let mut rows = vec![identity(n).concat()];
    let mut cur = identity(n);
    for _ in 1..n {
        cur = mat_mul(&cur, a, p);
        rows.push(cur.concat());
    }
    rank(rows, p) == n
}

pub fn companion(c: &[u64], p: u64) -> Dense {
    let n = c.len();
    let mut m = vec![vec![0u64; n]; n];
    for i in 1..n {
        m[i][i - 1] = 1;
    }
    for i in 0..n {
        m[i][n - 1] = subm(0, c[i], p);
    }
    m
}

pub fn field(p: u64) -> PrimeField {
    PrimeField::new(p).unwrap()
}

pub fn to_matrix(fp: &PrimeField, a: &Dense) -> Matrix {
    Matrix::from_rows_u64(fp, a).unwrap()
}

fn removed(failed_edges: &[(usize, usize)], failed_vertices: &[usize], u: usize, v: usize) -> bool {
    failed_edges.contains(&(u, v)) || failed_vertices.contains(&u) || failed_vertices.contains(&v)
}

/// Weighted shortest path by Dijkstra (unit weights for unweighted graphs).
/// Failed endpoints are unreachable unless `s == t`.
pub fn shortest_path(
    g: &Digraph,
    failed_edges: &[(usize, usize)],
    failed_vertices: &[usize],
    s: usize,
    t: usize,
) -> Distance {
    if s == t {
        return Distance::Finite(0);
    }
    if failed_vertices.contains(&s) || failed_vertices.contains(&t) {
        return Distance::Unreachable;
    }
    let n = g.n();
    let mut adj = vec![Vec::new(); n];
    for (u, v, w) in g.edges() {
        if !removed(failed_edges, failed_vertices, u, v) {
            adj[u].push((v, w as usize));
        }
    }
    let mut dist = vec![usize::MAX; n];
    dist[s] = 0;
    let mut heap = BinaryHeap::from([Reverse((0usize, s))]);
    while let Some(Reverse((d, x))) = heap.pop() {
        if d > dist[x] {
            continue;
        }
        for &(y, w) in &adj[x] {
            if d + w < dist[y] {
                dist[y] = d + w;
                heap.push(Reverse((d + w, y)));
            }
        }
    }
    if dist[t] == usize::MAX {
        Distance::Unreachable
    } else {
        Distance::Finite(dist[t])
    }
}

/// All-pairs hop distances by BFS from every vertex.
pub fn bfs_all(g: &Digraph) -> Vec<Vec<Option<usize>>> {
    let n = g.n();
    let mut adj = vec![Vec::new(); n];
    for (u, v, _) in g.edges() {
        adj[u].push(v);
    }
    (0..n)
        .map(|s| {
            let mut d = vec![None; n];
            d[s] = Some(0);
            let mut q = VecDeque::from([s]);
            while let Some(x) = q.pop_front() {
                for &y in &adj[x] {
                    if d[y].is_none() {
                        d[y] = Some(d[x].unwrap() + 1);
                        q.push_back(y);
                    }
                }
            }
            d
        })
        .collect()
}

pub fn random_digraph<R: rand::Rng>(n: usize, density: f64, rng: &mut R) -> Digraph {
    let mut g = Digraph::new(n);
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.gen_bool(density.min(1.0)) {
                g.add_edge(u, v).unwrap();
            }
        }
    }
    g
}

pub fn random_weighted_digraph<R: rand::Rng>(n: usize, density: f64, w: u32, rng: &mut R) -> Digraph {
    let mut g = Digraph::new_weighted(n);
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.gen_bool(density.min(1.0)) {
                g.add_weighted_edge(u, v, rng.gen_range(1..=w)).unwrap();
            }
        }
    }
    g
}
