use std::collections::BTreeSet;

use rand::Rng;

use crate::error::{check_index, Error, Result};
use crate::field::{PrimeField, Scalar};
use crate::frobenius::{compute_fnf, PowerOracle};
use crate::graphenc::{first_nonzero_power, Digraph, Distance, EdgeOp, GraphEncoding};
use crate::matrix::Matrix;
use crate::updates::rank1_update_fnf;

use super::dso::encode_with_oracle;

/// Distance oracle under vertex updates (replacing all edges at one vertex).
///
/// Keeps Frobenius forms of `A` and `A^T`. A vertex update changes one row
/// and one column of `A`, i.e. two rank-1 updates, each applied with
/// [`rank1_update_fnf`]. Queries read `(A^k)_{s,t}` for `k < n` directly.
#[derive(Clone, Debug)]
pub struct VertexUpdateOracle {
    enc: GraphEncoding,
    oracle_a: PowerOracle,
    oracle_at: PowerOracle,
    max_attempts: Option<usize>,
    fnf_invocations: usize,
    fallbacks: usize,
}

impl VertexUpdateOracle {
    pub fn new<R: Rng + ?Sized>(graph: &Digraph, fp: &PrimeField, rng: &mut R) -> Result<Self> {
        let (enc, oracle_a) = encode_with_oracle(graph, fp, rng)?;
        let form_t = compute_fnf(fp, &enc.matrix().transpose(), rng, None)?;
        let oracle_at = PowerOracle::new(fp, form_t)?;
        Ok(VertexUpdateOracle {
            enc,
            oracle_a,
            oracle_at,
            max_attempts: None,
            fnf_invocations: 2,
            fallbacks: 0,
        })
    }

    /// Retry budget of each rank-1 update (default: the Frobenius default).
    pub fn set_max_attempts(&mut self, attempts: Option<usize>) {
        self.max_attempts = attempts;
    }

    pub fn n(&self) -> usize {
        self.enc.n()
    }

    pub fn graph(&self) -> &Digraph {
        self.enc.graph()
    }

    pub fn matrix(&self) -> &Matrix {
        self.enc.matrix()
    }

    pub fn power_oracle(&self) -> &PowerOracle {
        &self.oracle_a
    }

    pub fn transpose_oracle(&self) -> &PowerOracle {
        &self.oracle_at
    }

    /// Full Frobenius form constructions so far, counting `A` and `A^T`
    /// separately.
    pub fn fnf_invocations(&self) -> usize {
        self.fnf_invocations
    }

    /// Rank-1 updates that fell back to a full construction.
    pub fn fallbacks(&self) -> usize {
        self.fallbacks
    }

    /// Replaces the out-neighbours of `v` by `new_out` and its in-neighbours
    /// by `new_in`. Edges kept by the update keep their random values.
    pub fn update<R: Rng + ?Sized>(
        &mut self,
        v: usize,
        new_out: &[usize],
        new_in: &[usize],
        rng: &mut R,
    ) -> Result<()> {
        let n = self.n();
        check_index(v, n)?;
        let outs: BTreeSet<usize> = new_out.iter().copied().collect();
        let ins: BTreeSet<usize> = new_in.iter().copied().collect();
        for &w in outs.iter().chain(&ins) {
            check_index(w, n)?;
            if w == v {
                return Err(Error::SelfLoop(v));
            }
        }
        let fp = *self.enc.field();

        // row v: A += e_v b^T
        let before = self.enc.matrix().clone();
        let old_out: Vec<usize> = self.enc.graph().out_neighbors(v).map(|(w, _)| w).collect();
        for &w in &old_out {
            if !outs.contains(&w) {
                self.enc.apply_edge_change(v, w, EdgeOp::Delete, rng)?;
            }
        }
        for &w in &outs {
            if !self.enc.graph().has_edge(v, w) {
                self.enc.apply_edge_change(v, w, EdgeOp::Insert, rng)?;
            }
        }
        let b: Vec<Scalar> = (0..n)
            .map(|j| fp.sub(self.enc.matrix().get(v, j), before.get(v, j)))
            .collect();
        let mut e_v = vec![Scalar::ZERO; n];
        e_v[v] = Scalar::ONE;
        self.rank1(&before, &e_v, &b, rng)?;

        // column v: A += a e_v^T
        let before = self.enc.matrix().clone();
        let old_in: Vec<usize> = self.enc.graph().in_neighbors(v).map(|(w, _)| w).collect();
        for &w in &old_in {
            if !ins.contains(&w) {
                self.enc.apply_edge_change(w, v, EdgeOp::Delete, rng)?;
            }
        }
        for &w in &ins {
            if !self.enc.graph().has_edge(w, v) {
                self.enc.apply_edge_change(w, v, EdgeOp::Insert, rng)?;
            }
        }
        let a: Vec<Scalar> = (0..n)
            .map(|i| fp.sub(self.enc.matrix().get(i, v), before.get(i, v)))
            .collect();
        self.rank1(&before, &a, &e_v, rng)
    }

    /// Moves both forms from `before` to `before + a b^T` (already stored in
    /// the encoding). Falls back to full constructions when the update
    /// cannot find generic vectors.
    fn rank1<R: Rng + ?Sized>(&mut self, before: &Matrix, a: &[Scalar], b: &[Scalar], rng: &mut R) -> Result<()> {
        if a.iter().all(|x| x.is_zero()) || b.iter().all(|x| x.is_zero()) {
            return Ok(());
        }
        let fp = *self.enc.field();
        let forms = rank1_update_fnf(
            &fp,
            before,
            &self.oracle_a,
            &self.oracle_at,
            a,
            b,
            rng,
            self.max_attempts,
        );
        let (form, form_t) = match forms {
            Ok(f) => f,
            Err(Error::GenericityFailure { .. }) => {
                self.fallbacks += 1;
                self.fnf_invocations += 2;
                let m = self.enc.matrix();
                (
                    compute_fnf(&fp, m, rng, None)?,
                    compute_fnf(&fp, &m.transpose(), rng, None)?,
                )
            }
            Err(e) => return Err(e),
        };
        self.oracle_a = PowerOracle::new(&fp, form)?;
        self.oracle_at = PowerOracle::new(&fp, form_t)?;
        Ok(())
    }

    pub fn query(&self, s: usize, t: usize) -> Result<Distance> {
        let n = self.n();
        check_index(s, n)?;
        check_index(t, n)?;
        if s == t {
            return Ok(Distance::Finite(0));
        }
        let vals = self.oracle_a.query_cell_powers(s, t, n - 1)?;
        Ok(first_nonzero_power(&vals).map_or(Distance::Unreachable, Distance::Finite))
    }
}
