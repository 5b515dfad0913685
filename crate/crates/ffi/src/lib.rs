//! C ABI over graphprobe.
//!
//! Every fallible call returns a `GpStatus` code and writes its result
//! through an out pointer. The message of the last failure on the calling
//! thread is available from [`gp_last_error`]. Strings returned by the
//! library are owned by the caller and released with [`gp_string_free`];
//! graphs are released with [`gp_graph_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use graphprobe::graph::{Graph, GraphRecord, Permutation, RngStream};
use graphprobe::harness::extract_answer;
use graphprobe::serialize::{parse, render, EncodingSpec};
use graphprobe::spectral::{spectral_truth, SpectralTaskId};
use graphprobe::tasks::{self, check, ground_truth, Answer, CheckConfig, QueryParams, Verdict};

/// Result codes of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GpStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    /// Text or JSON input could not be parsed.
    Parse = 3,
    UnknownTask = 4,
    InvalidArgument = 5,
    /// The task has no answer on this graph.
    Solve = 6,
    Panic = 7,
}

/// Opaque graph handle.
pub struct GpGraph(Graph);

/// Verdict codes written by [`gp_check`].
pub const GP_VERDICT_CORRECT: i32 = 0;
pub const GP_VERDICT_INCORRECT: i32 = 1;
pub const GP_VERDICT_UNPARSED: i32 = 2;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(GpStatus, String);

fn fail(status: GpStatus, msg: impl ToString) -> Failure {
    Failure(status, msg.to_string())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> GpStatus {
    let (status, msg) = match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => (GpStatus::Ok, String::new()),
        Ok(Err(Failure(status, msg))) => (status, msg),
        Err(_) => (GpStatus::Panic, "internal panic".to_string()),
    };
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
    status
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(fail(GpStatus::NullArgument, "null string argument"));
    }
    CStr::from_ptr(p).to_str().map_err(|e| fail(GpStatus::InvalidUtf8, e))
}

unsafe fn graph<'a>(g: *const GpGraph) -> Result<&'a Graph, Failure> {
    g.as_ref().map(|g| &g.0).ok_or_else(|| fail(GpStatus::NullArgument, "null graph handle"))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(fail(GpStatus::NullArgument, "null out pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|e| fail(GpStatus::InvalidArgument, e))?;
    put(out, c.into_raw())
}

unsafe fn params(json: *const c_char) -> Result<QueryParams, Failure> {
    if json.is_null() {
        return Ok(QueryParams::default());
    }
    serde_json::from_str(text(json)?).map_err(|e| fail(GpStatus::Parse, e))
}

fn task(id: &str) -> Result<&'static tasks::TaskSpec, Failure> {
    tasks::lookup(id).ok_or_else(|| fail(GpStatus::UnknownTask, format!("unknown task {id:?}")))
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn gp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses a graph block in any supported encoding.
///
/// # Safety
/// `block` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gp_graph_parse(block: *const c_char, out: *mut *mut GpGraph) -> GpStatus {
    guard(|| {
        let parsed = parse(text(block)?).map_err(|e| fail(GpStatus::Parse, e))?;
        put(out, Box::into_raw(Box::new(GpGraph(parsed.graph))))
    })
}

/// Builds a graph from a JSON record `{"n": .., "directed": .., "edges": [[u, v(, w)], ..]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gp_graph_from_json(json: *const c_char, out: *mut *mut GpGraph) -> GpStatus {
    guard(|| {
        let record: GraphRecord = serde_json::from_str(text(json)?).map_err(|e| fail(GpStatus::Parse, e))?;
        let g = Graph::try_from(&record).map_err(|e| fail(GpStatus::InvalidArgument, e))?;
        put(out, Box::into_raw(Box::new(GpGraph(g))))
    })
}

/// Builds an unweighted graph on nodes `1..=n` from `m` endpoint pairs.
///
/// # Safety
/// `sources` and `targets` must each point to `m` readable values.
#[no_mangle]
pub unsafe extern "C" fn gp_graph_from_edges(
    n: u32,
    directed: bool,
    sources: *const u32,
    targets: *const u32,
    m: usize,
    out: *mut *mut GpGraph,
) -> GpStatus {
    guard(|| {
        if m > 0 && (sources.is_null() || targets.is_null()) {
            return Err(fail(GpStatus::NullArgument, "null edge array"));
        }
        let pairs: Vec<(u32, u32)> = (0..m).map(|i| (*sources.add(i), *targets.add(i))).collect();
        let g = Graph::from_pairs(n, directed, &pairs).map_err(|e| fail(GpStatus::InvalidArgument, e))?;
        put(out, Box::into_raw(Box::new(GpGraph(g))))
    })
}

/// # Safety
/// `g` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gp_graph_free(g: *mut GpGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn gp_graph_node_count(g: *const GpGraph) -> u32 {
    g.as_ref().map_or(0, |g| g.0.n())
}

/// # Safety
/// `g` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn gp_graph_edge_count(g: *const GpGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.m())
}

/// JSON record of the graph.
///
/// # Safety
/// `g` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gp_graph_to_json(g: *const GpGraph, out: *mut *mut c_char) -> GpStatus {
    guard(|| {
        let json = serde_json::to_string(&graph(g)?.record()).map_err(|e| fail(GpStatus::InvalidArgument, e))?;
        put_string(out, json)
    })
}

/// Applies a seeded uniform random relabeling and returns a new graph.
///
/// # Safety
/// `g` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gp_graph_relabel(g: *const GpGraph, seed: u64, out: *mut *mut GpGraph) -> GpStatus {
    guard(|| {
        let g = graph(g)?;
        let p =
            Permutation::random(g.n(), &mut RngStream::new(seed)).map_err(|e| fail(GpStatus::InvalidArgument, e))?;
        let relabeled = g.relabel(&p).map_err(|e| fail(GpStatus::InvalidArgument, e))?;
        put(out, Box::into_raw(Box::new(GpGraph(relabeled))))
    })
}

/// Renders the graph block for an encoding spec given as JSON; null means
/// the default plain edge-list encoding.
///
/// # Safety
/// `g` must be a live handle, `spec_json` null or a NUL-terminated string,
/// and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gp_render(g: *const GpGraph, spec_json: *const c_char, out: *mut *mut c_char) -> GpStatus {
    guard(|| {
        let spec = if spec_json.is_null() {
            EncodingSpec::erdos()
        } else {
            serde_json::from_str(text(spec_json)?).map_err(|e| fail(GpStatus::Parse, e))?
        };
        let block = render(graph(g)?, &spec).map_err(|e| fail(GpStatus::InvalidArgument, e))?;
        put_string(out, block.text)
    })
}

/// Reference answer of a task as JSON. `params_json` holds query nodes,
/// e.g. `{"source": 1, "target": 4}`, and may be null.
///
/// # Safety
/// `g` must be a live handle, strings NUL-terminated, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn gp_solve(
    g: *const GpGraph,
    task_id: *const c_char,
    params_json: *const c_char,
    out: *mut *mut c_char,
) -> GpStatus {
    guard(|| {
        let t = task(text(task_id)?)?;
        let answer = ground_truth(t, graph(g)?, &params(params_json)?).map_err(|e| fail(GpStatus::Solve, e))?;
        put_string(out, answer.to_json().to_string())
    })
}

/// Value of one spectral task.
///
/// # Safety
/// `g` must be a live handle, `task_id` NUL-terminated, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn gp_spectral(g: *const GpGraph, task_id: *const c_char, out: *mut f64) -> GpStatus {
    guard(|| {
        let name = text(task_id)?;
        let id = SpectralTaskId::from_name(name)
            .ok_or_else(|| fail(GpStatus::UnknownTask, format!("unknown spectral task {name:?}")))?;
        let value = spectral_truth(id, graph(g)?).map_err(|e| fail(GpStatus::Solve, e))?;
        put(out, value)
    })
}

/// Extracts the answer to `task_id` from a model completion and checks it
/// against the reference answer, writing one of the `GP_VERDICT_*` codes.
///
/// # Safety
/// `g` must be a live handle, strings NUL-terminated, `verdict` valid.
#[no_mangle]
pub unsafe extern "C" fn gp_check(
    g: *const GpGraph,
    task_id: *const c_char,
    params_json: *const c_char,
    completion: *const c_char,
    verdict: *mut i32,
) -> GpStatus {
    guard(|| {
        let g = graph(g)?;
        let t = task(text(task_id)?)?;
        let params = params(params_json)?;
        let truth: Answer = ground_truth(t, g, &params).map_err(|e| fail(GpStatus::Solve, e))?;
        let parsed = extract_answer(text(completion)?, t.answer_kind);
        let v = check(t, g, &params, parsed.as_ref(), Some(&truth), &CheckConfig::default())
            .map_err(|e| fail(GpStatus::Solve, e))?;
        put(
            verdict,
            match v {
                Verdict::Correct => GP_VERDICT_CORRECT,
                Verdict::Incorrect => GP_VERDICT_INCORRECT,
                Verdict::Unparsed => GP_VERDICT_UNPARSED,
            },
        )
    })
}

/// # Safety
/// `s` must be null or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
