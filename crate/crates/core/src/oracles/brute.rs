//! Textbook shortest paths, used as references.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet, VecDeque};

use crate::graphenc::{Digraph, Distance};

use super::Failure;

fn failed_sets(failures: &[Failure]) -> (HashSet<(usize, usize)>, HashSet<usize>) {
    let mut edges = HashSet::new();
    let mut vertices = HashSet::new();
    for f in failures {
        match *f {
            Failure::Edge(u, v) => {
                edges.insert((u, v));
            }
            Failure::Vertex(v) => {
                vertices.insert(v);
            }
        }
    }
    (edges, vertices)
}

/// Hop distance from `s` to `t` in `G - F`. A failed endpoint makes the pair
/// unreachable unless `s == t`.
pub fn bfs_oracle(g: &Digraph, failures: &[Failure], s: usize, t: usize) -> Distance {
    if s == t {
        return Distance::Finite(0);
    }
    let (dead_edges, dead) = failed_sets(failures);
    if dead.contains(&s) || dead.contains(&t) {
        return Distance::Unreachable;
    }
    let mut dist = vec![usize::MAX; g.n()];
    let mut queue = VecDeque::from([s]);
    dist[s] = 0;
    while let Some(x) = queue.pop_front() {
        for (y, _) in g.out_neighbors(x) {
            if dist[y] != usize::MAX || dead.contains(&y) || dead_edges.contains(&(x, y)) {
                continue;
            }
            dist[y] = dist[x] + 1;
            if y == t {
                return Distance::Finite(dist[y]);
            }
            queue.push_back(y);
        }
    }
    Distance::Unreachable
}

/// Weighted distance from `s` to `t` in `G - F`.
pub fn dijkstra_oracle(g: &Digraph, failures: &[Failure], s: usize, t: usize) -> Distance {
    if s == t {
        return Distance::Finite(0);
    }
    let (dead_edges, dead) = failed_sets(failures);
    if dead.contains(&s) || dead.contains(&t) {
        return Distance::Unreachable;
    }
    let mut dist = vec![usize::MAX; g.n()];
    let mut heap = BinaryHeap::from([Reverse((0usize, s))]);
    dist[s] = 0;
    while let Some(Reverse((d, x))) = heap.pop() {
        if x == t {
            return Distance::Finite(d);
        }
        if d > dist[x] {
            continue;
        }
        for (y, w) in g.out_neighbors(x) {
            if dead.contains(&y) || dead_edges.contains(&(x, y)) {
                continue;
            }
            let nd = d + w as usize;
            if nd < dist[y] {
                dist[y] = nd;
                heap.push(Reverse((nd, y)));
            }
        }
    }
    Distance::Unreachable
}
