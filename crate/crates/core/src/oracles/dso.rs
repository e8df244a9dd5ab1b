use std::collections::{BTreeSet, HashMap};

use rand::Rng;

use crate::error::{check_index, Error, Result};
use crate::field::{sample_prime, PrimeField, Scalar};
use crate::frobenius::{compute_fnf, PowerOracle};
use crate::graphenc::{
    expand_weights, first_nonzero_power, sample_encoding, split_vertices, Digraph, Distance, GraphEncoding,
    VertexSplitMap, WeightExpandMap,
};
use crate::updates::{batch_preprocess, batch_query, change_endpoints, ElementChange, ElementUpdateBatch};

use super::{
    extract_powers, hitting_edges, route, sample_hitting_set, union_sorted, Failure, HittingSet, PowerBlock,
    ENCODING_ATTEMPTS,
};

/// Encodes `graph` and builds the power oracle, resampling the encoding when
/// the Frobenius form cannot be found.
pub(crate) fn encode_with_oracle<R: Rng + ?Sized>(
    graph: &Digraph,
    fp: &PrimeField,
    rng: &mut R,
) -> Result<(GraphEncoding, PowerOracle)> {
    let mut last = None;
    for _ in 0..ENCODING_ATTEMPTS {
        let enc = sample_encoding(graph, fp, rng)?;
        match compute_fnf(fp, enc.matrix(), rng, None) {
            Ok(form) => {
                let oracle = PowerOracle::new(fp, form)?;
                return Ok((enc, oracle));
            }
            Err(e @ Error::GenericityFailure { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

/// Distance oracle for an unweighted digraph under a batch of edge failures.
///
/// Each [`MultiFailureDso::update`] replaces the previous failure set; the
/// graph itself is fixed at preprocessing.
#[derive(Clone, Debug)]
pub struct MultiFailureDso {
    enc: GraphEncoding,
    oracle: PowerOracle,
    gamma: f64,
    state: Option<DsoState>,
}

#[derive(Clone, Debug)]
struct DsoState {
    failures: Vec<(usize, usize)>,
    h: usize,
    hitting: HittingSet,
    /// Powers of `A` over `K = S ∪ H`.
    k_block: PowerBlock,
    batch: ElementUpdateBatch,
    /// Powers of `B` over `H`.
    b_block: PowerBlock,
    h_edges: HashMap<(usize, usize), usize>,
}

impl MultiFailureDso {
    pub fn preprocess<R: Rng + ?Sized>(graph: &Digraph, fp: &PrimeField, gamma: f64, rng: &mut R) -> Result<Self> {
        let (enc, oracle) = encode_with_oracle(graph, fp, rng)?;
        Ok(MultiFailureDso {
            enc,
            oracle,
            gamma,
            state: None,
        })
    }

    pub fn encoding(&self) -> &GraphEncoding {
        &self.enc
    }

    pub fn power_oracle(&self) -> &PowerOracle {
        &self.oracle
    }

    pub fn n(&self) -> usize {
        self.enc.n()
    }

    /// Hop bound of the current update.
    pub fn hop_bound(&self) -> Option<usize> {
        self.state.as_ref().map(|s| s.h)
    }

    pub fn hitting_set(&self) -> Option<&HittingSet> {
        self.state.as_ref().map(|s| &s.hitting)
    }

    /// Powers `(B^k)_{H,H}` of the matrix with the current failures removed.
    pub fn hitting_powers(&self) -> Option<&[crate::matrix::Matrix]> {
        self.state.as_ref().map(|s| s.b_block.mats())
    }

    pub fn failures(&self) -> Option<&[(usize, usize)]> {
        self.state.as_ref().map(|s| s.failures.as_slice())
    }

    /// Prepares queries avoiding the failed edges `F` with hop bound
    /// `h = ceil(n / |F|)` (`h = n` when `F` is empty).
    pub fn update<R: Rng + ?Sized>(&mut self, failed: &[(usize, usize)], rng: &mut R) -> Result<()> {
        let n = self.n();
        let failures: Vec<(usize, usize)> = failed.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        let a = self.enc.matrix();
        let mut psi = Vec::with_capacity(failures.len());
        for &(u, v) in &failures {
            check_index(u, n)?;
            check_index(v, n)?;
            if !self.enc.graph().has_edge(u, v) {
                return Err(Error::EdgeAbsent(u, v));
            }
            psi.push(ElementChange {
                row: u,
                col: v,
                old: a.get(u, v),
                new: Scalar::ZERO,
            });
        }
        let h = if failures.is_empty() {
            n
        } else {
            n.div_ceil(failures.len())
        };
        let hitting = sample_hitting_set(n, h, self.gamma, rng);
        let (s, t) = change_endpoints(&psi);
        let hv = &hitting.vertices;
        let k = union_sorted(hv, &union_sorted(&s, &t));
        let k_block = PowerBlock::compute(&self.oracle, k.clone(), k, h)?;
        let blocks = [&k_block];
        let batch = batch_preprocess(self.enc.field(), &extract_powers(&blocks, &t, &s, h)?, &psi, h)?;
        let b_mats = batch_query(
            &batch,
            hv,
            hv,
            &extract_powers(&blocks, hv, &s, h)?,
            &extract_powers(&blocks, &t, hv, h)?,
            &extract_powers(&blocks, hv, hv, h)?,
        )?;
        let b_block = PowerBlock::new(hv.clone(), hv.clone(), b_mats)?;
        let h_edges = hitting_edges(&b_block);
        self.state = Some(DsoState {
            failures,
            h,
            hitting,
            k_block,
            batch,
            b_block,
            h_edges,
        });
        Ok(())
    }

    /// Distance from `s` to `t` avoiding the current failures.
    pub fn query(&self, s: usize, t: usize) -> Result<Distance> {
        let n = self.n();
        check_index(s, n)?;
        check_index(t, n)?;
        if s == t {
            return Ok(Distance::Finite(0));
        }
        let st = self
            .state
            .as_ref()
            .ok_or_else(|| Error::Unsupported("query before the first update".into()))?;
        let h = st.h;
        let hv = &st.hitting.vertices;
        let k = st.k_block.rows();
        let mut s_cols = k.to_vec();
        s_cols.push(t);
        let a_s = PowerBlock::compute(&self.oracle, vec![s], s_cols, h)?;
        let a_t = PowerBlock::compute(&self.oracle, k.to_vec(), vec![t], h)?;
        let blocks = [&st.k_block, &a_s, &a_t];
        let (bs, bt) = (st.batch.s(), st.batch.t());

        let mut y = hv.clone();
        y.push(t);
        let row = batch_query(
            &st.batch,
            &[s],
            &y,
            &extract_powers(&blocks, &[s], bs, h)?,
            &extract_powers(&blocks, bt, &y, h)?,
            &extract_powers(&blocks, &[s], &y, h)?,
        )?;
        let col = batch_query(
            &st.batch,
            hv,
            &[t],
            &extract_powers(&blocks, hv, bs, h)?,
            &extract_powers(&blocks, bt, &[t], h)?,
            &extract_powers(&blocks, hv, &[t], h)?,
        )?;
        let s_row = PowerBlock::new(vec![s], y, row)?;
        let t_col = PowerBlock::new(hv.clone(), vec![t], col)?;
        Ok(route(st.h_edges.clone(), &s_row, &t_col, s, t))
    }

    /// `min(dist_{G - uv}(s, t), h)` from the single-element batch removing
    /// edge `uv`. Independent of the current failure set.
    pub fn truncated_single_failure(&self, edge: (usize, usize), s: usize, t: usize, h: usize) -> Result<usize> {
        let (u, v) = edge;
        let n = self.n();
        check_index(s, n)?;
        check_index(t, n)?;
        if !self.enc.graph().has_edge(u, v) {
            return Err(Error::EdgeAbsent(u, v));
        }
        if s == t {
            return Ok(0);
        }
        let psi = [ElementChange {
            row: u,
            col: v,
            old: self.enc.matrix().get(u, v),
            new: Scalar::ZERO,
        }];
        let block = PowerBlock::compute(&self.oracle, vec![s, v], vec![u, t], h)?;
        let blocks = [&block];
        let batch = batch_preprocess(self.enc.field(), &extract_powers(&blocks, &[v], &[u], h)?, &psi, h)?;
        let out = batch_query(
            &batch,
            &[s],
            &[t],
            &extract_powers(&blocks, &[s], &[u], h)?,
            &extract_powers(&blocks, &[v], &[t], h)?,
            &extract_powers(&blocks, &[s], &[t], h)?,
        )?;
        let vals: Vec<Scalar> = out.iter().map(|m| m.get(0, 0)).collect();
        Ok(first_nonzero_power(&vals).unwrap_or(h))
    }
}

/// [`MultiFailureDso`] for weighted graphs and vertex failures.
///
/// Weighted graphs are expanded to unit weights; when vertex failures are
/// enabled every vertex is also split into an in/out pair so that a failed
/// vertex becomes a failed edge. Queries and failures are given in original
/// vertex numbering.
#[derive(Clone, Debug)]
pub struct DsoFrontEnd {
    graph: Digraph,
    weights: Option<WeightExpandMap>,
    split: Option<VertexSplitMap>,
    dso: MultiFailureDso,
}

impl DsoFrontEnd {
    /// Samples the field for the reduced graph size with exponent `c`, then
    /// preprocesses.
    pub fn new<R: Rng + ?Sized>(
        graph: &Digraph,
        vertex_failures: bool,
        c: u32,
        gamma: f64,
        rng: &mut R,
    ) -> Result<Self> {
        let (reduced, weights, split) = Self::reduce(graph, vertex_failures)?;
        let fp = sample_prime(reduced.n(), c, rng);
        Self::with_field(graph, reduced, weights, split, &fp, gamma, rng)
    }

    /// As [`DsoFrontEnd::new`] with a given field.
    pub fn new_in_field<R: Rng + ?Sized>(
        graph: &Digraph,
        vertex_failures: bool,
        fp: &PrimeField,
        gamma: f64,
        rng: &mut R,
    ) -> Result<Self> {
        let (reduced, weights, split) = Self::reduce(graph, vertex_failures)?;
        Self::with_field(graph, reduced, weights, split, fp, gamma, rng)
    }

    /// Size of the graph the oracle actually works on.
    pub fn reduced_size(graph: &Digraph, vertex_failures: bool) -> usize {
        let w = if graph.is_weighted() {
            graph.max_weight() as usize
        } else {
            1
        };
        graph.n() * w * if vertex_failures { 2 } else { 1 }
    }

    #[allow(clippy::type_complexity)]
    fn reduce(
        graph: &Digraph,
        vertex_failures: bool,
    ) -> Result<(Digraph, Option<WeightExpandMap>, Option<VertexSplitMap>)> {
        let (g, weights) = if graph.is_weighted() {
            let (g, map) = expand_weights(graph, graph.max_weight())?;
            (g, Some(map))
        } else {
            (graph.clone(), None)
        };
        Ok(if vertex_failures {
            let (g, map) = split_vertices(&g);
            (g, weights, Some(map))
        } else {
            (g, weights, None)
        })
    }

    fn with_field<R: Rng + ?Sized>(
        graph: &Digraph,
        reduced: Digraph,
        weights: Option<WeightExpandMap>,
        split: Option<VertexSplitMap>,
        fp: &PrimeField,
        gamma: f64,
        rng: &mut R,
    ) -> Result<Self> {
        let dso = MultiFailureDso::preprocess(&reduced, fp, gamma, rng)?;
        Ok(DsoFrontEnd {
            graph: graph.clone(),
            weights,
            split,
            dso,
        })
    }

    pub fn graph(&self) -> &Digraph {
        &self.graph
    }

    pub fn inner(&self) -> &MultiFailureDso {
        &self.dso
    }

    fn map_vertex(&self, v: usize) -> usize {
        self.weights.map_or(v, |m| m.vertex(v))
    }

    fn map_failure(&self, f: Failure) -> Result<(usize, usize)> {
        let n = self.graph.n();
        let (u, v) = match f {
            Failure::Edge(u, v) => {
                check_index(u, n)?;
                check_index(v, n)?;
                let w = self.graph.weight(u, v).ok_or(Error::EdgeAbsent(u, v))?;
                let (a, b) = self.weights.map_or((u, v), |m| m.edge(u, v, w));
                return Ok(self.split.map_or((a, b), |s| s.edge(a, b)));
            }
            Failure::Vertex(v) => {
                check_index(v, n)?;
                let split = self.split.ok_or_else(|| {
                    Error::Unsupported("vertex failures need a front end built with vertex splitting".into())
                })?;
                split.vertex_edge(self.map_vertex(v))
            }
        };
        Ok((u, v))
    }

    pub fn update<R: Rng + ?Sized>(&mut self, failures: &[Failure], rng: &mut R) -> Result<()> {
        let mapped = failures
            .iter()
            .map(|&f| self.map_failure(f))
            .collect::<Result<Vec<_>>>()?;
        self.dso.update(&mapped, rng)
    }

    pub fn query(&self, s: usize, t: usize) -> Result<Distance> {
        let n = self.graph.n();
        check_index(s, n)?;
        check_index(t, n)?;
        if s == t {
            return Ok(Distance::Finite(0));
        }
        let (s1, t1) = (self.map_vertex(s), self.map_vertex(t));
        Ok(match self.split {
            Some(split) => split.back(self.dso.query(split.v_in(s1), split.v_out(t1))?),
            None => self.dso.query(s1, t1)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn triangle_cycle_with_failure() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = Digraph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let fp = sample_prime(3, 1, &mut rng);
        let mut dso = MultiFailureDso::preprocess(&g, &fp, 4.0, &mut rng).unwrap();
        assert!(dso.query(0, 2).is_err());
        dso.update(&[], &mut rng).unwrap();
        assert_eq!(dso.query(0, 2).unwrap(), Distance::Finite(2));
        dso.update(&[(1, 2)], &mut rng).unwrap();
        assert_eq!(dso.query(0, 2).unwrap(), Distance::Unreachable);
        assert_eq!(dso.query(0, 1).unwrap(), Distance::Finite(1));
        assert_eq!(dso.query(2, 2).unwrap(), Distance::Finite(0));
        assert_eq!(dso.update(&[(0, 2)], &mut rng), Err(Error::EdgeAbsent(0, 2)));
        assert_eq!(dso.truncated_single_failure((1, 2), 0, 2, 3).unwrap(), 3);
        assert_eq!(dso.truncated_single_failure((2, 0), 0, 2, 3).unwrap(), 2);
    }
}
