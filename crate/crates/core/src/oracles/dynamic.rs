use std::collections::{BTreeMap, HashMap};

use rand::Rng;

use crate::error::{check_index, Result};
use crate::field::PrimeField;
use crate::frobenius::PowerOracle;
use crate::graphenc::{Digraph, Distance, EdgeOp, GraphEncoding};
use crate::matrix::Matrix;
use crate::updates::{batch_preprocess, batch_query, ElementChange, ElementUpdateBatch};

use super::dso::encode_with_oracle;
use super::{extract_powers, hitting_edges, route, sample_hitting_set, HittingSet, PowerBlock};

/// Fully dynamic distance oracle under edge insertions and deletions.
///
/// Work is organized in phases of `ceil(n^(1-alpha))` updates. A phase starts
/// from a snapshot `A` of the encoding with its power oracle, a hitting set
/// `H` for hop bound `h = ceil(n^alpha)` and powers of `A` over `H`. Within
/// the phase the current matrix `B` differs from `A` in the pending element
/// changes; powers of `B` over `H` are maintained by one single-element
/// update per edge change. Costs are amortized over a phase.
#[derive(Clone, Debug)]
pub struct DynamicEdgeOracle {
    enc: GraphEncoding,
    gamma: f64,
    alpha: f64,
    phase_len: usize,
    h: usize,
    snapshot: Matrix,
    oracle: PowerOracle,
    hitting: HittingSet,
    /// Powers of `A` over `K x K`, `K = H ∪ S`.
    stored: PowerBlock,
    /// Changes from `A` to `B`, keyed by position.
    pending: BTreeMap<(usize, usize), ElementChange>,
    batch: ElementUpdateBatch,
    /// Powers of `B` over `H x H`.
    maintained: PowerBlock,
    h_edges: HashMap<(usize, usize), usize>,
    in_phase: usize,
    rebuilds: usize,
}

impl DynamicEdgeOracle {
    pub fn new<R: Rng + ?Sized>(graph: &Digraph, fp: &PrimeField, gamma: f64, alpha: f64, rng: &mut R) -> Result<Self> {
        let n = graph.n();
        let phase_len = ((n as f64).powf(1.0 - alpha).ceil() as usize).max(1);
        let h = ((n as f64).powf(alpha).ceil() as usize).clamp(1, n.max(1));
        let (enc, oracle) = encode_with_oracle(graph, fp, rng)?;
        let (snapshot, hitting, stored, batch, maintained) = Self::phase_start(&enc, &oracle, h, gamma, rng)?;
        let h_edges = hitting_edges(&maintained);
        Ok(DynamicEdgeOracle {
            enc,
            gamma,
            alpha,
            phase_len,
            h,
            snapshot,
            oracle,
            hitting,
            stored,
            pending: BTreeMap::new(),
            batch,
            maintained,
            h_edges,
            in_phase: 0,
            rebuilds: 0,
        })
    }

    #[allow(clippy::type_complexity)]
    fn phase_start<R: Rng + ?Sized>(
        enc: &GraphEncoding,
        oracle: &PowerOracle,
        h: usize,
        gamma: f64,
        rng: &mut R,
    ) -> Result<(Matrix, HittingSet, PowerBlock, ElementUpdateBatch, PowerBlock)> {
        let hitting = sample_hitting_set(enc.n(), h, gamma, rng);
        let hv = hitting.vertices.clone();
        let stored = PowerBlock::compute(oracle, hv.clone(), hv, h)?;
        let batch = batch_preprocess(enc.field(), &vec![Matrix::zeros(0, 0); h], &[], h)?;
        let maintained = stored.clone();
        Ok((enc.matrix().clone(), hitting, stored, batch, maintained))
    }

    fn rebuild<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<()> {
        let graph = self.enc.graph().clone();
        let fp = *self.enc.field();
        // the current encoding is kept when its form can be built
        let (enc, oracle) = match crate::frobenius::compute_fnf(&fp, self.enc.matrix(), rng, None) {
            Ok(form) => (self.enc.clone(), PowerOracle::new(&fp, form)?),
            Err(_) => encode_with_oracle(&graph, &fp, rng)?,
        };
        let (snapshot, hitting, stored, batch, maintained) = Self::phase_start(&enc, &oracle, self.h, self.gamma, rng)?;
        self.enc = enc;
        self.oracle = oracle;
        self.snapshot = snapshot;
        self.hitting = hitting;
        self.stored = stored;
        self.batch = batch;
        self.h_edges = hitting_edges(&maintained);
        self.maintained = maintained;
        self.pending.clear();
        self.in_phase = 0;
        self.rebuilds += 1;
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.enc.n()
    }

    pub fn graph(&self) -> &Digraph {
        self.enc.graph()
    }

    pub fn phase_len(&self) -> usize {
        self.phase_len
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn hop_bound(&self) -> usize {
        self.h
    }

    /// Number of phase rebuilds so far.
    pub fn rebuilds(&self) -> usize {
        self.rebuilds
    }

    pub fn hitting_set(&self) -> &HittingSet {
        &self.hitting
    }

    /// The current matrix `B`.
    pub fn current_matrix(&self) -> &Matrix {
        self.enc.matrix()
    }

    /// Maintained powers `(B^k)_{H,H}`, `k = 1..h`.
    pub fn maintained_powers(&self) -> &[Matrix] {
        self.maintained.mats()
    }

    /// Adds vertices to `K`, extending the stored powers of `A`.
    fn grow_stored(&mut self, new: &[usize]) -> Result<()> {
        let old = self.stored.rows().to_vec();
        let fresh: Vec<usize> = new.iter().copied().filter(|v| !old.contains(v)).collect();
        if fresh.is_empty() {
            return Ok(());
        }
        let mut k = old.clone();
        k.extend(&fresh);
        let rows_new = PowerBlock::compute(&self.oracle, fresh.clone(), k.clone(), self.h)?;
        let cols_new = PowerBlock::compute(&self.oracle, old.clone(), fresh, self.h)?;
        let mats = extract_powers(&[&self.stored, &rows_new, &cols_new], &k, &k, self.h)?;
        self.stored = PowerBlock::new(k.clone(), k, mats)?;
        Ok(())
    }

    /// `(B^k)_{X,Y}` through the pending batch, reading powers of `A` from
    /// `blocks`.
    fn b_powers(&self, blocks: &[&PowerBlock], x: &[usize], y: &[usize]) -> Result<Vec<Matrix>> {
        let (bs, bt) = (self.batch.s(), self.batch.t());
        batch_query(
            &self.batch,
            x,
            y,
            &extract_powers(blocks, x, bs, self.h)?,
            &extract_powers(blocks, bt, y, self.h)?,
            &extract_powers(blocks, x, y, self.h)?,
        )
    }

    /// Inserts or deletes edge `uv`.
    pub fn update<R: Rng + ?Sized>(&mut self, u: usize, v: usize, op: EdgeOp, rng: &mut R) -> Result<()> {
        if self.in_phase + 1 >= self.phase_len {
            self.enc.apply_edge_change(u, v, op, rng)?;
            return self.rebuild(rng);
        }
        // validate before touching any state
        let mut probe = self.enc.graph().clone();
        match op {
            EdgeOp::Insert => probe.add_edge(u, v)?,
            EdgeOp::Delete => probe.remove_edge(u, v).map(|_| ())?,
        }
        self.grow_stored(&[u, v])?;
        let hv = self.hitting.vertices.clone();
        let blocks = [&self.stored];
        // bordered powers of the current B
        let mut y = hv.clone();
        y.push(u);
        let v_row = self.b_powers(&blocks, &[v], &y)?;
        let h_col = self.b_powers(&blocks, &hv, &[u])?;
        let v_row = PowerBlock::new(vec![v], y, v_row)?;
        let h_col = PowerBlock::new(hv.clone(), vec![u], h_col)?;

        let change = self.enc.apply_edge_change(u, v, op, rng)?;
        let fp = *self.enc.field();
        let single = batch_preprocess(&fp, &extract_powers(&[&v_row], &[v], &[u], self.h)?, &[change], self.h)?;
        let b_mats = batch_query(
            &single,
            &hv,
            &hv,
            &extract_powers(&[&h_col], &hv, &[u], self.h)?,
            &extract_powers(&[&v_row], &[v], &hv, self.h)?,
            self.maintained.mats(),
        )?;
        self.maintained = PowerBlock::new(hv.clone(), hv, b_mats)?;
        self.h_edges = hitting_edges(&self.maintained);

        let old = self.snapshot.get(u, v);
        if change.new == old {
            self.pending.remove(&(u, v));
        } else {
            self.pending.insert(
                (u, v),
                ElementChange {
                    row: u,
                    col: v,
                    old,
                    new: change.new,
                },
            );
        }
        let psi: Vec<ElementChange> = self.pending.values().copied().collect();
        let (s, t) = crate::updates::change_endpoints(&psi);
        self.batch = batch_preprocess(&fp, &extract_powers(&[&self.stored], &t, &s, self.h)?, &psi, self.h)?;
        self.in_phase += 1;
        Ok(())
    }

    /// Current distance from `s` to `t`.
    pub fn query(&self, s: usize, t: usize) -> Result<Distance> {
        let n = self.n();
        check_index(s, n)?;
        check_index(t, n)?;
        if s == t {
            return Ok(Distance::Finite(0));
        }
        let k = self.stored.rows().to_vec();
        let mut s_cols = k.clone();
        s_cols.push(t);
        let a_s = PowerBlock::compute(&self.oracle, vec![s], s_cols, self.h)?;
        let a_t = PowerBlock::compute(&self.oracle, k, vec![t], self.h)?;
        let blocks = [&self.stored, &a_s, &a_t];
        let hv = &self.hitting.vertices;
        let mut y = hv.clone();
        y.push(t);
        let s_row = PowerBlock::new(vec![s], y.clone(), self.b_powers(&blocks, &[s], &y)?)?;
        let t_col = PowerBlock::new(hv.clone(), vec![t], self.b_powers(&blocks, hv, &[t])?)?;
        Ok(route(self.h_edges.clone(), &s_row, &t_col, s, t))
    }
}
