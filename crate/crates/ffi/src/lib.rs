//! C ABI over `weyl-arc-sim`.
//!
//! Objects are handed out as opaque pointers created by `*_new` functions
//! and released with the matching `*_free`. Every fallible call returns a
//! [`WeylStatus`]; the message of the last failure on the calling thread is
//! available through [`weyl_last_error`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use weyl_arc_sim::cli::{self, Args};
use weyl_arc_sim::dynamics::Trajectory;
use weyl_arc_sim::lattice::{KPoint, ModelParams};
use weyl_arc_sim::scan::max_concurrence;
use weyl_arc_sim::scenario::HingePair;
use weyl_arc_sim::topology::{chern_reduced_with, classify_phase, find_weyl_points, PhaseLabel, WeylNode};
use weyl_arc_sim::Error;

/// Result of every fallible call. The numeric values of the
/// configuration, numerical and I/O classes match the exit codes of the
/// command-line tool.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeylStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Numerical = 3,
    Io = 4,
    Panic = 5,
    OutOfRange = 6,
}

/// Phase of the simplified model.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeylPhase {
    BandInsulator = 0,
    QuantumHall = 1,
    Wsm1 = 2,
    Wsm2 = 3,
}

/// Tight-binding parameters of the bath.
pub struct WeylModel {
    params: ModelParams,
}

/// Weyl nodes found for a model.
pub struct WeylNodes {
    nodes: Vec<WeylNode>,
}

/// One Weyl node.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct WeylNodeInfo {
    pub kx: f64,
    pub ky: f64,
    pub kz: f64,
    pub chirality: i32,
    pub frequency: f64,
}

/// Two emitters at the hinge of a braid box, with their evolved trajectory.
pub struct WeylHingePair {
    pair: HingePair,
    trajectory: Option<Trajectory>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> WeylStatus {
    match e.exit_code() {
        2 => WeylStatus::InvalidArgument,
        4 => WeylStatus::Io,
        _ => WeylStatus::Numerical,
    }
}

/// Run `f`, translating errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), (WeylStatus, String)>) -> WeylStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WeylStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            WeylStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (WeylStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (WeylStatus, String) {
    (WeylStatus::NullPointer, format!("{what} is null"))
}

/// # Safety
/// `p` must be null or a valid, NUL-terminated string.
unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (WeylStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (WeylStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn weyl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn weyl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Simplified model with nearest-neighbour amplitude `j`, next-nearest
/// amplitude `j_prime`, staggered mass `mass` and Peierls phase `phi`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn weyl_model_new(j: f64, j_prime: f64, mass: f64, phi: f64, out: *mut *mut WeylModel) -> WeylStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if ![j, j_prime, mass, phi].iter().all(|x| x.is_finite()) || j < 0.0 || j_prime < 0.0 {
            return Err((WeylStatus::InvalidArgument, "parameters must be finite with non-negative amplitudes".into()));
        }
        *out = Box::into_raw(Box::new(WeylModel { params: ModelParams::simplified(j, j_prime, mass, phi) }));
        Ok(())
    })
}

/// # Safety
/// `model` must be null or a pointer returned by [`weyl_model_new`] that
/// has not been freed.
#[no_mangle]
pub unsafe extern "C" fn weyl_model_free(model: *mut WeylModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Bulk band energies (ascending) at `(kx, ky, kz)` into `out[0..2]`.
///
/// # Safety
/// `model` must be a live model and `out` must point to two doubles.
#[no_mangle]
pub unsafe extern "C" fn weyl_model_bulk_energies(model: *const WeylModel, kx: f64, ky: f64, kz: f64, out: *mut f64) -> WeylStatus {
    guard(|| {
        let m = model.as_ref().ok_or_else(|| null("model"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let b = weyl_arc_sim::lattice::d_vector(&m.params, &KPoint::new(kx, ky, kz));
        let r = b.norm();
        *out = b.d0 - r;
        *out.add(1) = b.d0 + r;
        Ok(())
    })
}

/// Phase of the model.
///
/// # Safety
/// `model` must be a live model and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn weyl_model_phase(model: *const WeylModel, out: *mut WeylPhase) -> WeylStatus {
    guard(|| {
        let m = model.as_ref().ok_or_else(|| null("model"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = match classify_phase(&m.params).map_err(lib_err)? {
            PhaseLabel::BI => WeylPhase::BandInsulator,
            PhaseLabel::QHI => WeylPhase::QuantumHall,
            PhaseLabel::WSM1 => WeylPhase::Wsm1,
            PhaseLabel::WSM2 => WeylPhase::Wsm2,
        };
        Ok(())
    })
}

/// Lower-band Chern number of the fixed-`kz` plane on a `grid x grid`
/// lattice of the reciprocal cell.
///
/// # Safety
/// `model` must be a live model and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn weyl_model_chern(model: *const WeylModel, kz: f64, grid: usize, out: *mut i32) -> WeylStatus {
    guard(|| {
        let m = model.as_ref().ok_or_else(|| null("model"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = chern_reduced_with(&m.params, kz, grid).map_err(lib_err)?.0;
        Ok(())
    })
}

/// Weyl nodes of the model, refined until `|d| < tol J`.
///
/// # Safety
/// `model` must be a live model and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn weyl_nodes_find(model: *const WeylModel, tol: f64, out: *mut *mut WeylNodes) -> WeylStatus {
    guard(|| {
        let m = model.as_ref().ok_or_else(|| null("model"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        if !(tol > 0.0) {
            return Err((WeylStatus::InvalidArgument, format!("tolerance must be positive, got {tol}")));
        }
        let nodes = find_weyl_points(&m.params, tol).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(WeylNodes { nodes }));
        Ok(())
    })
}

/// Number of nodes; 0 for a null handle.
///
/// # Safety
/// `nodes` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn weyl_nodes_len(nodes: *const WeylNodes) -> usize {
    nodes.as_ref().map_or(0, |n| n.nodes.len())
}

/// Copy node `index` into `out`.
///
/// # Safety
/// `nodes` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn weyl_nodes_get(nodes: *const WeylNodes, index: usize, out: *mut WeylNodeInfo) -> WeylStatus {
    guard(|| {
        let n = nodes.as_ref().ok_or_else(|| null("nodes"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let node = n.nodes.get(index).ok_or_else(|| (WeylStatus::OutOfRange, format!("node {index} of {}", n.nodes.len())))?;
        *out = WeylNodeInfo { kx: node.k.x, ky: node.k.y, kz: node.k.z, chirality: node.chirality, frequency: node.frequency };
        Ok(())
    })
}

/// # Safety
/// `nodes` must be null or a handle from [`weyl_nodes_find`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn weyl_nodes_free(nodes: *mut WeylNodes) {
    if !nodes.is_null() {
        drop(Box::from_raw(nodes));
    }
}

/// Two emitters with coupling `g` at hinge distance `d` of a braid box of
/// `n_side x n_side x n_z` built on `model`. `absorber_gamma > 0` adds
/// absorbing layers on the far facets; `0` keeps the box closed.
///
/// # Safety
/// `model` must be a live model and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn weyl_hinge_pair_new(
    model: *const WeylModel,
    n_side: usize,
    n_z: usize,
    d: usize,
    g: f64,
    absorber_gamma: f64,
    absorber_layers: usize,
    out: *mut *mut WeylHingePair,
) -> WeylStatus {
    guard(|| {
        let m = model.as_ref().ok_or_else(|| null("model"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        if !(g >= 0.0) || !(absorber_gamma >= 0.0) || !g.is_finite() || !absorber_gamma.is_finite() {
            return Err((WeylStatus::InvalidArgument, "g and absorber_gamma must be finite and non-negative".into()));
        }
        let pair = HingePair { params: m.params.clone(), n_side, n_z, d, g, gamma: absorber_gamma, absorber_layers: absorber_layers.max(1) };
        pair.build().map_err(lib_err)?;
        *out = Box::into_raw(Box::new(WeylHingePair { pair, trajectory: None }));
        Ok(())
    })
}

/// Evolve from the first emitter excited up to `t_final`, recording
/// `n_samples` uniform samples (replacing any previous trajectory).
///
/// # Safety
/// `pair` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn weyl_hinge_pair_evolve(pair: *mut WeylHingePair, t_final: f64, n_samples: usize) -> WeylStatus {
    guard(|| {
        let p = pair.as_mut().ok_or_else(|| null("pair"))?;
        if !(t_final > 0.0) || !t_final.is_finite() || n_samples < 2 {
            return Err((WeylStatus::InvalidArgument, "need t_final > 0 and at least two samples".into()));
        }
        p.trajectory = Some(p.pair.trajectory(t_final, n_samples).map_err(lib_err)?);
        Ok(())
    })
}

/// Copy the sample times, both emitter populations and the concurrence of
/// the last trajectory into caller buffers of `len` doubles each (any may
/// be null). Fails with `OUT_OF_RANGE` when `len` is smaller than the
/// number of samples, which is written to `n_written` either way.
///
/// # Safety
/// Non-null buffers must hold `len` doubles; `n_written` must be valid or
/// null.
#[no_mangle]
pub unsafe extern "C" fn weyl_hinge_pair_series(
    pair: *const WeylHingePair,
    times: *mut f64,
    p1: *mut f64,
    p2: *mut f64,
    concurrence: *mut f64,
    len: usize,
    n_written: *mut usize,
) -> WeylStatus {
    guard(|| {
        let p = pair.as_ref().ok_or_else(|| null("pair"))?;
        let traj = p.trajectory.as_ref().ok_or_else(|| (WeylStatus::InvalidArgument, "no trajectory yet; call weyl_hinge_pair_evolve".into()))?;
        let n = traj.times.len();
        if !n_written.is_null() {
            *n_written = n;
        }
        if len < n {
            return Err((WeylStatus::OutOfRange, format!("buffers of {len} for {n} samples")));
        }
        let c = traj.concurrence().map_err(lib_err)?;
        let columns: [(*mut f64, Vec<f64>); 4] = [(times, traj.times.clone()), (p1, traj.emitter_population(0)), (p2, traj.emitter_population(1)), (concurrence, c)];
        for (buf, values) in columns {
            if !buf.is_null() {
                ptr::copy_nonoverlapping(values.as_ptr(), buf, n);
            }
        }
        Ok(())
    })
}

/// Maximum concurrence of the last trajectory and the time it occurs.
///
/// # Safety
/// `pair` must be a live handle; `c_max` and `t_peak` valid or null.
#[no_mangle]
pub unsafe extern "C" fn weyl_hinge_pair_max_concurrence(pair: *const WeylHingePair, c_max: *mut f64, t_peak: *mut f64) -> WeylStatus {
    guard(|| {
        let p = pair.as_ref().ok_or_else(|| null("pair"))?;
        let traj = p.trajectory.as_ref().ok_or_else(|| (WeylStatus::InvalidArgument, "no trajectory yet; call weyl_hinge_pair_evolve".into()))?;
        let (c, t) = max_concurrence(traj).map_err(lib_err)?;
        if !c_max.is_null() {
            *c_max = c;
        }
        if !t_peak.is_null() {
            *t_peak = t;
        }
        Ok(())
    })
}

/// # Safety
/// `pair` must be null or a handle from [`weyl_hinge_pair_new`] not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn weyl_hinge_pair_free(pair: *mut WeylHingePair) {
    if !pair.is_null() {
        drop(Box::from_raw(pair));
    }
}

/// Run a command of the command-line tool with the TOML configuration
/// `config_toml` (may be null for the preset), writing into `out_dir`.
///
/// # Safety
/// `command` and `out_dir` must be valid NUL-terminated strings;
/// `config_toml` must be one or null.
#[no_mangle]
pub unsafe extern "C" fn weyl_run(command: *const c_char, config_toml: *const c_char, out_dir: *const c_char) -> WeylStatus {
    guard(|| {
        let command = str_arg(command, "command")?.to_string();
        let out = PathBuf::from(str_arg(out_dir, "out_dir")?);
        let text = if config_toml.is_null() { "" } else { str_arg(config_toml, "config_toml")? };
        let args = Args { command, config: None, out: Some(out), threads: None, overrides: Vec::new() };
        cli::execute_text(&args, text).map(|_| ()).map_err(lib_err)
    })
}
