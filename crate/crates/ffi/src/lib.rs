//! C ABI for the thermaloc toolkit.
//!
//! Exposes the closed-form bounds (critical temperature, correlation
//! length, clustering/locality/approximation envelopes), interaction-graph
//! construction with animal counting, and JSON (de)serialization behind
//! opaque handles with status-code error reporting. The header
//! `include/thermaloc.h` is generated by cbindgen at build time.
//!
//! Conventions: every fallible function returns a [`ThermalocStatus`] and
//! writes its result through an out pointer; pointers returned by this
//! library must be released with the matching `*_free` function.

use std::ffi::{c_char, CStr, CString};

use thermaloc::bounds;
use thermaloc::lattice::{growth_constant_bound, GrowthFamily, InteractionGraph};
use thermaloc::Error;

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThermalocStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidSize = 3,
    OutOfRegime = 4,
    BoundInapplicable = 5,
    DivergentLength = 6,
    ResourceLimit = 7,
    DistanceUndefined = 8,
    Utf8 = 9,
    Internal = 10,
}

fn status_of(e: &Error) -> ThermalocStatus {
    match e {
        Error::InvalidSize(_) => ThermalocStatus::InvalidSize,
        Error::InvalidArgument(_) | Error::Config(_) => ThermalocStatus::InvalidArgument,
        Error::OutOfRegime(_) => ThermalocStatus::OutOfRegime,
        Error::BoundInapplicable { .. } => ThermalocStatus::BoundInapplicable,
        Error::DivergentLength => ThermalocStatus::DivergentLength,
        Error::ResourceLimit(_) => ThermalocStatus::ResourceLimit,
        Error::DistanceUndefined => ThermalocStatus::DistanceUndefined,
        _ => ThermalocStatus::Internal,
    }
}

/// Opaque interaction-graph handle.
pub struct ThermalocGraph {
    inner: InteractionGraph,
}

fn write_out<T>(out: *mut T, value: T) -> ThermalocStatus {
    if out.is_null() {
        return ThermalocStatus::NullPointer;
    }
    unsafe { out.write(value) };
    ThermalocStatus::Ok
}

fn graph_result(
    r: Result<InteractionGraph, Error>,
    out: *mut *mut ThermalocGraph,
) -> ThermalocStatus {
    if out.is_null() {
        return ThermalocStatus::NullPointer;
    }
    match r {
        Ok(inner) => {
            let boxed = Box::new(ThermalocGraph { inner });
            unsafe { out.write(Box::into_raw(boxed)) };
            ThermalocStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Builds an open or periodic chain of `n` vertices.
#[no_mangle]
pub extern "C" fn thermaloc_graph_chain(
    n: usize,
    periodic: bool,
    out: *mut *mut ThermalocGraph,
) -> ThermalocStatus {
    graph_result(InteractionGraph::chain(n, periodic), out)
}

/// Builds a rows x cols square lattice with nearest-neighbor edges.
#[no_mangle]
pub extern "C" fn thermaloc_graph_square(
    rows: usize,
    cols: usize,
    periodic: bool,
    out: *mut *mut ThermalocGraph,
) -> ThermalocStatus {
    graph_result(InteractionGraph::square_lattice(rows, cols, periodic), out)
}

/// Parses the JSON document {"vertices":..,"edges":..,"local_dims":..}.
///
/// # Safety
/// `json` must be a valid NUL-terminated C string.
#[no_mangle]
pub unsafe extern "C" fn thermaloc_graph_from_json(
    json: *const c_char,
    out: *mut *mut ThermalocGraph,
) -> ThermalocStatus {
    if json.is_null() {
        return ThermalocStatus::NullPointer;
    }
    let s = match CStr::from_ptr(json).to_str() {
        Ok(s) => s,
        Err(_) => return ThermalocStatus::Utf8,
    };
    graph_result(InteractionGraph::from_json(s), out)
}

/// Serializes the graph to its JSON document; free with
/// `thermaloc_string_free`.
///
/// # Safety
/// `g` must be a live handle from one of the graph constructors.
#[no_mangle]
pub unsafe extern "C" fn thermaloc_graph_to_json(
    g: *const ThermalocGraph,
    out: *mut *mut c_char,
) -> ThermalocStatus {
    if g.is_null() {
        return ThermalocStatus::NullPointer;
    }
    let json = (*g).inner.to_json();
    match CString::new(json) {
        Ok(c) => write_out(out, c.into_raw()),
        Err(_) => ThermalocStatus::Internal,
    }
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn thermaloc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Releases a graph handle.
///
/// # Safety
/// `g` must come from a graph constructor and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn thermaloc_graph_free(g: *mut ThermalocGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Number of vertices.
///
/// # Safety
/// `g` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn thermaloc_graph_vertex_count(
    g: *const ThermalocGraph,
    out: *mut usize,
) -> ThermalocStatus {
    if g.is_null() {
        return ThermalocStatus::NullPointer;
    }
    write_out(out, (*g).inner.vertex_count())
}

/// Number of edges.
///
/// # Safety
/// `g` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn thermaloc_graph_edge_count(
    g: *const ThermalocGraph,
    out: *mut usize,
) -> ThermalocStatus {
    if g.is_null() {
        return ThermalocStatus::NullPointer;
    }
    write_out(out, (*g).inner.edge_count())
}

/// Number of connected edge subsets of size `m` containing `root_edge`
/// (the a_m contribution of that root).
///
/// # Safety
/// `g` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn thermaloc_graph_animal_count(
    g: *const ThermalocGraph,
    root_edge: usize,
    m: usize,
    out: *mut u64,
) -> ThermalocStatus {
    if g.is_null() {
        return ThermalocStatus::NullPointer;
    }
    match (*g).inner.animal_count(root_edge, m) {
        Ok(c) => write_out(out, c as u64),
        Err(e) => status_of(&e),
    }
}

/// Largest number of vertices within graph distance < l of a vertex.
///
/// # Safety
/// `g` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn thermaloc_graph_n_of_l(
    g: *const ThermalocGraph,
    l: usize,
    out: *mut u64,
) -> ThermalocStatus {
    if g.is_null() {
        return ThermalocStatus::NullPointer;
    }
    match bounds::n_of_l(&(*g).inner, l) {
        Ok(c) => write_out(out, c as u64),
        Err(e) => status_of(&e),
    }
}

/// Growth-constant bound 2 D e for the D-dimensional cubic lattice.
#[no_mangle]
pub extern "C" fn thermaloc_growth_constant_cubic(
    dimension: u32,
    out: *mut f64,
) -> ThermalocStatus {
    match growth_constant_bound(GrowthFamily::Cubic { dimension }) {
        Ok(v) => write_out(out, v),
        Err(e) => status_of(&e),
    }
}

/// Growth-constant bound ((2R+1)^D - 1) e for a spread-out graph of range R.
#[no_mangle]
pub extern "C" fn thermaloc_growth_constant_spread_out(
    dimension: u32,
    range: u32,
    out: *mut f64,
) -> ThermalocStatus {
    match growth_constant_bound(GrowthFamily::SpreadOut { dimension, range }) {
        Ok(v) => write_out(out, v),
        Err(e) => status_of(&e),
    }
}

/// alpha_y(x) = alpha e^{|x|} (e^{|x|} - 1).
#[no_mangle]
pub extern "C" fn thermaloc_alpha_y(x: f64, alpha: f64) -> f64 {
    bounds::alpha_y(x, alpha)
}

/// Universal inverse critical temperature beta*.
#[no_mangle]
pub extern "C" fn thermaloc_beta_star(alpha: f64, j: f64, out: *mut f64) -> ThermalocStatus {
    match bounds::beta_star(alpha, j) {
        Ok(v) => write_out(out, v),
        Err(e) => status_of(&e),
    }
}

/// Thermal correlation length xi(beta).
#[no_mangle]
pub extern "C" fn thermaloc_xi(beta: f64, alpha: f64, j: f64, out: *mut f64) -> ThermalocStatus {
    match bounds::xi(beta, alpha, j) {
        Ok(v) => write_out(out, v),
        Err(e) => status_of(&e),
    }
}

/// Minimum distance L0(beta, a) from which the clustering bound holds.
#[no_mangle]
pub extern "C" fn thermaloc_l_zero(
    beta: f64,
    a: f64,
    alpha: f64,
    j: f64,
    out: *mut f64,
) -> ThermalocStatus {
    match bounds::l_zero(beta, a, alpha, j) {
        Ok(v) => write_out(out, v),
        Err(e) => status_of(&e),
    }
}

/// Exponential clustering envelope for |cov^tau(A, B)|.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub extern "C" fn thermaloc_clustering_rhs(
    beta: f64,
    a: f64,
    dist: f64,
    norm_a: f64,
    norm_b: f64,
    alpha: f64,
    j: f64,
    out: *mut f64,
) -> ThermalocStatus {
    match bounds::clustering_rhs(beta, a, dist, norm_a, norm_b, alpha, j) {
        Ok(v) => write_out(out, v),
        Err(e) => status_of(&e),
    }
}

/// The tighter covariance envelope per unit operator norms.
#[no_mangle]
pub extern "C" fn thermaloc_clustering_rhs_tight(
    beta: f64,
    boundary_a: f64,
    dist: f64,
    alpha: f64,
    j: f64,
    out: *mut f64,
) -> ThermalocStatus {
    match bounds::clustering_rhs_tight(beta, boundary_a, dist, alpha, j) {
        Ok(v) => write_out(out, v),
        Err(e) => status_of(&e),
    }
}

/// Locality envelope for the reduced-state trace distance.
#[no_mangle]
pub extern "C" fn thermaloc_locality_rhs(
    beta: f64,
    boundary_s: f64,
    boundary_b: f64,
    dist: f64,
    alpha: f64,
    j: f64,
    out: *mut f64,
) -> ThermalocStatus {
    match bounds::locality_rhs(beta, boundary_s, boundary_b, dist, alpha, j) {
        Ok(v) => write_out(out, v),
        Err(e) => status_of(&e),
    }
}

/// Trace-norm error envelope of the cluster-expansion proxy state.
#[no_mangle]
pub extern "C" fn thermaloc_mpo_error_bound(
    edge_count: usize,
    l: f64,
    beta: f64,
    j: f64,
    alpha: f64,
    out: *mut f64,
) -> ThermalocStatus {
    match bounds::mpo_error_bound(edge_count, l, beta, j, alpha) {
        Ok(v) => write_out(out, v),
        Err(e) => status_of(&e),
    }
}

/// Tensor-size exponent bound of the cluster-expansion approximation.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub extern "C" fn thermaloc_tensor_size_bound(
    edge_count: usize,
    eps: f64,
    beta: f64,
    j: f64,
    alpha: f64,
    dimension: u32,
    m_const: f64,
    c_const: f64,
    out: *mut f64,
) -> ThermalocStatus {
    match bounds::tensor_size_bound(edge_count, eps, beta, j, alpha, dimension, m_const, c_const) {
        Ok(v) => write_out(out, v),
        Err(e) => status_of(&e),
    }
}
