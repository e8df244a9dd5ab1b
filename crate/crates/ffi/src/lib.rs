//! C ABI for `fnf-oracles`.
//!
//! Objects are opaque handles created by `*_new` functions and released with
//! the matching `*_free`. Every fallible function returns an [`FnfStatus`];
//! results come back through out-pointers. After a non-OK status,
//! [`fnf_last_error_message`] describes the failure on the calling thread.
//!
//! Vertices and matrix indices are 0-based. Field elements are passed as
//! `uint64_t` residues and reduced modulo the field prime on input.
//! Distances use [`FNF_UNREACHABLE`] for "no path".

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use fnf_oracles::field::sample_prime;
use fnf_oracles::frobenius::{compute_fnf, PowerOracle};
use fnf_oracles::graphenc::{Digraph, Distance, EdgeOp};
use fnf_oracles::oracles::{DsoFrontEnd, DynamicEdgeOracle, Failure, VertexUpdateOracle};
use fnf_oracles::{Error, Matrix, PrimeField, Scalar};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Distance value meaning "unreachable".
pub const FNF_UNREACHABLE: u64 = u64::MAX;

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FnfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    IndexOutOfRange = 4,
    GenericityFailure = 5,
    EdgeAlreadyPresent = 6,
    EdgeAbsent = 7,
    SelfLoop = 8,
    InvalidModulus = 9,
    Parse = 10,
    Unsupported = 11,
    Panic = 12,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> FnfStatus {
    match e {
        Error::DimensionMismatch(_) => FnfStatus::DimensionMismatch,
        Error::IndexOutOfRange { .. } => FnfStatus::IndexOutOfRange,
        Error::GenericityFailure { .. } => FnfStatus::GenericityFailure,
        Error::EdgeAlreadyPresent(..) => FnfStatus::EdgeAlreadyPresent,
        Error::EdgeAbsent(..) => FnfStatus::EdgeAbsent,
        Error::SelfLoop(_) => FnfStatus::SelfLoop,
        Error::InvalidModulus(_) => FnfStatus::InvalidModulus,
        Error::Parse { .. } => FnfStatus::Parse,
        Error::Unsupported(_) => FnfStatus::Unsupported,
        Error::DuplicatePosition(..)
        | Error::WeightOutOfRange { .. }
        | Error::ZeroInverse
        | Error::NotInvertibleSeries => FnfStatus::InvalidArgument,
    }
}

enum Fail {
    Status(FnfStatus, String),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn null(what: &str) -> Fail {
    Fail::Status(FnfStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Fail {
    Fail::Status(FnfStatus::InvalidArgument, msg.into())
}

/// Runs `f`, converting errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> FnfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            FnfStatus::Ok
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            FnfStatus::Panic
        }
    }
}

unsafe fn obj<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn obj_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn input<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        Ok(&[])
    } else if p.is_null() {
        Err(null(what))
    } else {
        Ok(slice::from_raw_parts(p, len))
    }
}

unsafe fn output<'a, T>(p: *mut T, len: usize, what: &str) -> Result<&'a mut [T], Fail> {
    if len == 0 {
        Ok(&mut [])
    } else if p.is_null() {
        Err(null(what))
    } else {
        Ok(slice::from_raw_parts_mut(p, len))
    }
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

unsafe fn free<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

fn encode(d: Distance) -> u64 {
    d.finite().map_or(FNF_UNREACHABLE, |d| d as u64)
}

fn field(modulus: u64, n: usize, c: u32, rng: &mut ChaCha8Rng) -> Result<PrimeField, Fail> {
    if modulus == 0 {
        if c == 0 {
            return Err(invalid("field exponent c must be at least 1"));
        }
        Ok(sample_prime(n, c, rng))
    } else {
        Ok(PrimeField::new(modulus)?)
    }
}

/// Copies the calling thread's last error message into `buf` (NUL
/// terminated, truncated to `len`). Returns the full message length, or 0
/// when the last call succeeded.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn fnf_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else {
            if !buf.is_null() && len > 0 {
                *buf = 0;
            }
            return 0;
        };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Opaque digraph on vertices `0..n`.
pub struct FnfGraph(Digraph);

/// Creates an empty graph; weighted graphs accept weights >= 1.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fnf_graph_new(n: usize, weighted: bool, out: *mut *mut FnfGraph) -> FnfStatus {
    guard(|| {
        let g = if weighted {
            Digraph::new_weighted(n)
        } else {
            Digraph::new(n)
        };
        put(out, boxed(FnfGraph(g)), "out")
    })
}

/// Parses the edge-list text format (1-based vertices in the text).
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fnf_graph_parse(text: *const c_char, out: *mut *mut FnfGraph) -> FnfStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        let s = CStr::from_ptr(text)
            .to_str()
            .map_err(|_| invalid("text is not UTF-8"))?;
        put(out, boxed(FnfGraph(Digraph::parse_edge_list(s)?)), "out")
    })
}

/// # Safety
/// `g` must be null or a handle from this library, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fnf_graph_free(g: *mut FnfGraph) {
    free(g)
}

/// # Safety
/// `g` must be a valid graph handle.
#[no_mangle]
pub unsafe extern "C" fn fnf_graph_add_edge(g: *mut FnfGraph, u: usize, v: usize, weight: u32) -> FnfStatus {
    guard(|| {
        let g = &mut obj_mut(g, "graph")?.0;
        if g.is_weighted() {
            g.add_weighted_edge(u, v, weight)?;
        } else if weight != 1 {
            return Err(invalid("unweighted graphs take weight 1"));
        } else {
            g.add_edge(u, v)?;
        }
        Ok(())
    })
}

/// # Safety
/// `g` must be a valid graph handle.
#[no_mangle]
pub unsafe extern "C" fn fnf_graph_remove_edge(g: *mut FnfGraph, u: usize, v: usize) -> FnfStatus {
    guard(|| {
        obj_mut(g, "graph")?.0.remove_edge(u, v)?;
        Ok(())
    })
}

/// Vertex count, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a valid graph handle.
#[no_mangle]
pub unsafe extern "C" fn fnf_graph_vertex_count(g: *const FnfGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.n())
}

/// Edge count, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a valid graph handle.
#[no_mangle]
pub unsafe extern "C" fn fnf_graph_edge_count(g: *const FnfGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.edge_count())
}

/// Frobenius form of a square matrix with its power oracle.
pub struct FnfPowerOracle {
    fp: PrimeField,
    oracle: PowerOracle,
}

/// Computes the Frobenius form of the row-major `n x n` matrix `entries`
/// over `Z/pZ` and builds its power oracle. `seed` drives the random
/// Krylov vectors.
///
/// # Safety
/// `entries` must point to `n * n` values and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fnf_power_oracle_new(
    modulus: u64,
    n: usize,
    entries: *const u64,
    seed: u64,
    out: *mut *mut FnfPowerOracle,
) -> FnfStatus {
    guard(|| {
        let fp = PrimeField::new(modulus)?;
        let len = n.checked_mul(n).ok_or_else(|| invalid("n * n overflows"))?;
        let data: Vec<Scalar> = input(entries, len, "entries")?.iter().map(|&x| fp.elem(x)).collect();
        let a = Matrix::from_vec(n, n, data)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let form = compute_fnf(&fp, &a, &mut rng, None)?;
        let oracle = PowerOracle::new(&fp, form)?;
        put(out, boxed(FnfPowerOracle { fp, oracle }), "out")
    })
}

/// # Safety
/// `o` must be null or a handle from this library, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fnf_power_oracle_free(o: *mut FnfPowerOracle) {
    free(o)
}

/// Order `n` of the matrix, or 0 for a null handle.
///
/// # Safety
/// `o` must be null or a valid handle.
#[no_mangle]
pub unsafe extern "C" fn fnf_power_oracle_order(o: *const FnfPowerOracle) -> usize {
    o.as_ref().map_or(0, |o| o.oracle.order())
}

/// Writes `c_0..c_{n-1}` of the monic characteristic polynomial
/// `x^n + c_{n-1} x^{n-1} + ... + c_0`.
///
/// # Safety
/// `o` must be valid and `out` must hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn fnf_power_oracle_charpoly(o: *const FnfPowerOracle, out: *mut u64, len: usize) -> FnfStatus {
    guard(|| {
        let c = obj(o, "oracle")?.oracle.form().charpoly_coeffs();
        if len != c.len() {
            return Err(invalid(format!("buffer holds {len} values, need {}", c.len())));
        }
        for (o, x) in output(out, len, "out")?.iter_mut().zip(c) {
            *o = x.value();
        }
        Ok(())
    })
}

/// Writes `(A^1)_{ij}, ..., (A^h)_{ij}` into `out[0..h]`, `1 <= h <= n`.
///
/// # Safety
/// `o` must be valid and `out` must hold `h` values.
#[no_mangle]
pub unsafe extern "C" fn fnf_power_oracle_cell_powers(
    o: *const FnfPowerOracle,
    i: usize,
    j: usize,
    h: usize,
    out: *mut u64,
) -> FnfStatus {
    guard(|| {
        let vals = obj(o, "oracle")?.oracle.query_cell_powers(i, j, h)?;
        for (o, x) in output(out, h, "out")?.iter_mut().zip(vals) {
            *o = x.value();
        }
        Ok(())
    })
}

/// Writes `(A^k)_{S,T}` for `k = 1..h` into `out`, laid out as `h` row-major
/// `|S| x |T|` blocks, `1 <= h <= n`.
///
/// # Safety
/// `rows`/`cols` must hold `n_rows`/`n_cols` indices and `out` must hold
/// `h * n_rows * n_cols` values.
#[no_mangle]
pub unsafe extern "C" fn fnf_power_oracle_submatrix_powers(
    o: *const FnfPowerOracle,
    rows: *const usize,
    n_rows: usize,
    cols: *const usize,
    n_cols: usize,
    h: usize,
    out: *mut u64,
) -> FnfStatus {
    guard(|| {
        let o = obj(o, "oracle")?;
        let s = input(rows, n_rows, "rows")?;
        let t = input(cols, n_cols, "cols")?;
        let total = h
            .checked_mul(n_rows)
            .and_then(|x| x.checked_mul(n_cols))
            .ok_or_else(|| invalid("output size overflows"))?;
        let out = output(out, total, "out")?;
        let mats = o.oracle.query_submatrix_powers(s, t, h)?;
        let flat = mats
            .iter()
            .flat_map(|m| (0..n_rows).flat_map(move |a| (0..n_cols).map(move |b| m.get(a, b))));
        for (o, x) in out.iter_mut().zip(flat) {
            *o = x.value();
        }
        Ok(())
    })
}

/// The field prime of the oracle, or 0 for a null handle.
///
/// # Safety
/// `o` must be null or a valid handle.
#[no_mangle]
pub unsafe extern "C" fn fnf_power_oracle_modulus(o: *const FnfPowerOracle) -> u64 {
    o.as_ref().map_or(0, |o| o.fp.modulus())
}

/// Distance oracle under batches of edge and vertex failures.
pub struct FnfDso {
    dso: DsoFrontEnd,
    rng: ChaCha8Rng,
}

/// Preprocesses `graph` (weighted graphs allowed). With `modulus == 0` the
/// prime is sampled with exponent `c`. `vertex_failures` enables vertex
/// entries in later updates. The oracle starts with an empty failure set.
///
/// # Safety
/// `graph` must be valid and `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fnf_dso_new(
    graph: *const FnfGraph,
    vertex_failures: bool,
    modulus: u64,
    c: u32,
    gamma: f64,
    seed: u64,
    out: *mut *mut FnfDso,
) -> FnfStatus {
    guard(|| {
        let g = &obj(graph, "graph")?.0;
        if gamma.is_nan() || gamma <= 0.0 {
            return Err(invalid("gamma must be positive"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fp = field(modulus, DsoFrontEnd::reduced_size(g, vertex_failures), c, &mut rng)?;
        let mut dso = DsoFrontEnd::new_in_field(g, vertex_failures, &fp, gamma, &mut rng)?;
        dso.update(&[], &mut rng)?;
        put(out, boxed(FnfDso { dso, rng }), "out")
    })
}

/// # Safety
/// `d` must be null or a handle from this library, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fnf_dso_free(d: *mut FnfDso) {
    free(d)
}

/// Replaces the failure set by the `n_edges` pairs in `edges`
/// (`u0, v0, u1, v1, ...`) and the `n_vertices` entries of `vertices`.
///
/// # Safety
/// `edges` must hold `2 * n_edges` values and `vertices` `n_vertices`.
#[no_mangle]
pub unsafe extern "C" fn fnf_dso_update(
    d: *mut FnfDso,
    edges: *const usize,
    n_edges: usize,
    vertices: *const usize,
    n_vertices: usize,
) -> FnfStatus {
    guard(|| {
        let d = obj_mut(d, "dso")?;
        let e = input(
            edges,
            n_edges.checked_mul(2).ok_or_else(|| invalid("too many edges"))?,
            "edges",
        )?;
        let v = input(vertices, n_vertices, "vertices")?;
        let failures: Vec<Failure> = e
            .chunks(2)
            .map(|p| Failure::Edge(p[0], p[1]))
            .chain(v.iter().map(|&x| Failure::Vertex(x)))
            .collect();
        d.dso.update(&failures, &mut d.rng)?;
        Ok(())
    })
}

/// # Safety
/// `d` must be valid and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fnf_dso_query(d: *const FnfDso, s: usize, t: usize, out: *mut u64) -> FnfStatus {
    guard(|| put(out, encode(obj(d, "dso")?.dso.query(s, t)?), "out"))
}

/// Fully dynamic oracle under edge insertions and deletions.
pub struct FnfDynamic {
    oracle: DynamicEdgeOracle,
    rng: ChaCha8Rng,
}

/// # Safety
/// `graph` must be valid (unweighted) and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fnf_dynamic_new(
    graph: *const FnfGraph,
    modulus: u64,
    c: u32,
    gamma: f64,
    alpha: f64,
    seed: u64,
    out: *mut *mut FnfDynamic,
) -> FnfStatus {
    guard(|| {
        let g = &obj(graph, "graph")?.0;
        if gamma.is_nan() || gamma <= 0.0 || alpha.is_nan() || alpha <= 0.0 || alpha > 1.0 {
            return Err(invalid("need gamma > 0 and 0 < alpha <= 1"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fp = field(modulus, g.n(), c, &mut rng)?;
        let oracle = DynamicEdgeOracle::new(g, &fp, gamma, alpha, &mut rng)?;
        put(out, boxed(FnfDynamic { oracle, rng }), "out")
    })
}

/// # Safety
/// `d` must be null or a handle from this library, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fnf_dynamic_free(d: *mut FnfDynamic) {
    free(d)
}

/// Inserts (`insert = true`) or deletes edge `uv`.
///
/// # Safety
/// `d` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fnf_dynamic_update(d: *mut FnfDynamic, u: usize, v: usize, insert: bool) -> FnfStatus {
    guard(|| {
        let d = obj_mut(d, "oracle")?;
        let op = if insert { EdgeOp::Insert } else { EdgeOp::Delete };
        d.oracle.update(u, v, op, &mut d.rng)?;
        Ok(())
    })
}

/// # Safety
/// `d` must be valid and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fnf_dynamic_query(d: *const FnfDynamic, s: usize, t: usize, out: *mut u64) -> FnfStatus {
    guard(|| put(out, encode(obj(d, "oracle")?.oracle.query(s, t)?), "out"))
}

/// Oracle under vertex updates.
pub struct FnfVertexOracle {
    oracle: VertexUpdateOracle,
    rng: ChaCha8Rng,
}

/// # Safety
/// `graph` must be valid (unweighted) and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fnf_vertex_oracle_new(
    graph: *const FnfGraph,
    modulus: u64,
    c: u32,
    seed: u64,
    out: *mut *mut FnfVertexOracle,
) -> FnfStatus {
    guard(|| {
        let g = &obj(graph, "graph")?.0;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fp = field(modulus, g.n(), c, &mut rng)?;
        let oracle = VertexUpdateOracle::new(g, &fp, &mut rng)?;
        put(out, boxed(FnfVertexOracle { oracle, rng }), "out")
    })
}

/// # Safety
/// `d` must be null or a handle from this library, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fnf_vertex_oracle_free(d: *mut FnfVertexOracle) {
    free(d)
}

/// Replaces all edges at `v`: out-neighbours `outs[0..n_out]`,
/// in-neighbours `ins[0..n_in]`.
///
/// # Safety
/// `outs` and `ins` must hold `n_out` and `n_in` values.
#[no_mangle]
pub unsafe extern "C" fn fnf_vertex_oracle_update(
    d: *mut FnfVertexOracle,
    v: usize,
    outs: *const usize,
    n_out: usize,
    ins: *const usize,
    n_in: usize,
) -> FnfStatus {
    guard(|| {
        let d = obj_mut(d, "oracle")?;
        let outs = input(outs, n_out, "outs")?;
        let ins = input(ins, n_in, "ins")?;
        d.oracle.update(v, outs, ins, &mut d.rng)?;
        Ok(())
    })
}

/// # Safety
/// `d` must be valid and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fnf_vertex_oracle_query(
    d: *const FnfVertexOracle,
    s: usize,
    t: usize,
    out: *mut u64,
) -> FnfStatus {
    guard(|| put(out, encode(obj(d, "oracle")?.oracle.query(s, t)?), "out"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statuses_cover_library_errors() {
        assert_eq!(status_of(&Error::EdgeAbsent(0, 1)), FnfStatus::EdgeAbsent);
        assert_eq!(
            status_of(&Error::GenericityFailure { attempts: 3 }),
            FnfStatus::GenericityFailure
        );
    }
}
