//! C ABI over the `deepwave` solvers.
//!
//! Every fallible function returns a [`DwStatus`]; on failure the message is
//! kept per thread and can be read with [`dw_last_error_message`]. Handles are
//! opaque and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use deepwave::envelope::{
    hamiltonian_envelope, impulse, perturbed_stokes, wave_action, CarrierParams, EnvelopeModel,
    EnvelopeSolver, EnvelopeState, Variant,
};
use deepwave::dno::DnoConfig;
use deepwave::euler3d::{FullSolver, FullSolverConfig, SurfaceState};
use deepwave::harness::{run, RunConfig};
use deepwave::normalform::{coeff_t1, denom_d123, WaveQuad, WaveTriple};
use deepwave::reconstruct::{classical_from_hamiltonian, reconstruct_classical, reconstruct_hamiltonian};
use deepwave::spectral::{Grid2D, RealField};
use deepwave::stability::{band_edge_mu0, bf_condition, growth_rate_eig, StabilityQuery};
use deepwave::Error;

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    BlowUp = 4,
    Io = 5,
    Format = 6,
    Panic = 7,
}

/// Envelope equations.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DwModel {
    HamiltonianDysthe = 0,
    ClassicalDysthe = 1,
    Nls = 2,
    ExactDispersion = 3,
}

impl From<DwModel> for Variant {
    fn from(m: DwModel) -> Self {
        match m {
            DwModel::HamiltonianDysthe => Variant::HamiltonianDysthe,
            DwModel::ClassicalDysthe => Variant::ClassicalDysthe,
            DwModel::Nls => Variant::Nls,
            DwModel::ExactDispersion => Variant::ExactDispersion,
        }
    }
}

/// Periodic grid of `nx * ny` points on `[0, lx) x [0, ly)`.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct DwGrid {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
}

/// Perturbed Stokes envelope `b0 (1 + perturbation cos(lambda x) cos(mu y))`
/// and its integration settings.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct DwEnvelopeParams {
    pub grid: DwGrid,
    pub model: DwModel,
    pub k0: f64,
    pub g: f64,
    pub dt: f64,
    pub b0: f64,
    pub lambda: f64,
    pub mu: f64,
    pub perturbation: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct DwStabilityQuery {
    pub b0: f64,
    pub k0: f64,
    pub g: f64,
    pub epsilon: f64,
    pub lambda: f64,
    pub mu: f64,
}

impl From<&DwStabilityQuery> for StabilityQuery {
    fn from(q: &DwStabilityQuery) -> Self {
        StabilityQuery::new(q.b0, q.k0, q.g, q.lambda, q.mu).with_epsilon(q.epsilon)
    }
}

/// Envelope solver and its current state.
pub struct DwEnvelope {
    solver: EnvelopeSolver,
    state: EnvelopeState,
}

/// Full-equation solver and its current state.
pub struct DwFull {
    solver: FullSolver,
    state: SurfaceState,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> DwStatus {
    match e {
        Error::BlowUp { .. } | Error::ShockFormation { .. } => DwStatus::BlowUp,
        Error::Config(_) => DwStatus::Config,
        Error::Io(_) => DwStatus::Io,
        Error::Format(_) => DwStatus::Format,
        Error::InvalidGrid(_)
        | Error::GridMismatch(_)
        | Error::InvalidOrder { .. }
        | Error::NonLattice { .. }
        | Error::OriginQuery
        | Error::InvalidArgument(_)
        | Error::SingularSymplecticWeight
        | Error::SingularKernel(_)
        | Error::ResonantQuad(_) => DwStatus::InvalidArgument,
    }
}

struct Fail(DwStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(DwStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> DwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            DwStatus::Ok
        }
        Ok(Err(Fail(s, msg))) => {
            set_error(msg);
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            DwStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn deref_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn out_slice<'a>(p: *mut f64, len: usize, need: usize, what: &str) -> Result<&'a mut [f64], Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    if len < need {
        return Err(Fail(
            DwStatus::InvalidArgument,
            format!("{what} holds {len} values, {need} needed"),
        ));
    }
    Ok(std::slice::from_raw_parts_mut(p, need))
}

unsafe fn in_slice<'a>(p: *const f64, len: usize, need: usize, what: &str) -> Result<&'a [f64], Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    if len != need {
        return Err(Fail(
            DwStatus::InvalidArgument,
            format!("{what} holds {len} values, {need} needed"),
        ));
    }
    Ok(std::slice::from_raw_parts(p, need))
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(DwStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

fn grid(g: &DwGrid) -> Result<Grid2D, Fail> {
    Ok(Grid2D::new(g.nx, g.ny, g.lx, g.ly)?)
}

/// Length in bytes of the calling thread's last error message.
#[no_mangle]
pub extern "C" fn dw_last_error_length() -> usize {
    LAST_ERROR.with(|e| e.borrow().len())
}

/// Copy the last error message, NUL terminated and truncated to fit, into
/// `buf`. Returns the full message length.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn dw_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Create an envelope solver holding the perturbed Stokes initial data. For
/// the classical model the data is converted to the surface amplitude.
///
/// # Safety
/// `params` must point to a valid struct and `out` to writable storage.
#[no_mangle]
pub unsafe extern "C" fn dw_envelope_new(params: *const DwEnvelopeParams, out: *mut *mut DwEnvelope) -> DwStatus {
    guard(|| {
        let p = deref(params, "params")?;
        let out = deref_mut(out, "out")?;
        let grid = grid(&p.grid)?;
        let carrier = CarrierParams::new(p.k0, p.g)?;
        carrier.lattice_index(&grid)?;
        let variant = Variant::from(p.model);
        let solver = EnvelopeSolver::new(&grid, EnvelopeModel::lab(variant), carrier, p.dt)?;
        let mut state = perturbed_stokes(p.b0, p.lambda, p.mu, p.perturbation, &grid, carrier)?;
        if variant == Variant::ClassicalDysthe {
            state = classical_from_hamiltonian(&state);
        }
        *out = Box::into_raw(Box::new(DwEnvelope { solver, state }));
        Ok(())
    })
}

/// # Safety
/// `h` must be null or a handle from [`dw_envelope_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dw_envelope_free(h: *mut DwEnvelope) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Advance `n` steps.
///
/// # Safety
/// `h` must be a live envelope handle.
#[no_mangle]
pub unsafe extern "C" fn dw_envelope_step(h: *mut DwEnvelope, n: usize) -> DwStatus {
    guard(|| {
        let h = deref_mut(h, "handle")?;
        h.state = h.solver.advance(&h.state, n, |_| Ok(()))?;
        Ok(())
    })
}

/// # Safety
/// `h` must be a live envelope handle and `t` writable.
#[no_mangle]
pub unsafe extern "C" fn dw_envelope_time(h: *const DwEnvelope, t: *mut f64) -> DwStatus {
    guard(|| {
        *deref_mut(t, "t")? = deref(h, "handle")?.state.t;
        Ok(())
    })
}

/// Write `[H, M, Ix, Iy]` of the current state to `out`.
///
/// # Safety
/// `h` must be a live envelope handle and `out` must hold 4 doubles.
#[no_mangle]
pub unsafe extern "C" fn dw_envelope_invariants(h: *const DwEnvelope, out: *mut f64) -> DwStatus {
    guard(|| {
        let s = &deref(h, "handle")?.state;
        let out = out_slice(out, 4, 4, "out")?;
        let i = impulse(s)?;
        out.copy_from_slice(&[hamiltonian_envelope(s)?, wave_action(s), i[0], i[1]]);
        Ok(())
    })
}

/// Copy the envelope, row-major `[ix][iy]`, into `re` and `im`.
///
/// # Safety
/// `re` and `im` must each hold `len >= nx * ny` doubles.
#[no_mangle]
pub unsafe extern "C" fn dw_envelope_get(h: *const DwEnvelope, re: *mut f64, im: *mut f64, len: usize) -> DwStatus {
    guard(|| {
        let u = deref(h, "handle")?.state.u.as_slice();
        let re = out_slice(re, len, u.len(), "re")?;
        let im = out_slice(im, len, u.len(), "im")?;
        for (i, z) in u.iter().enumerate() {
            re[i] = z.re;
            im[i] = z.im;
        }
        Ok(())
    })
}

fn reconstruct(h: &DwEnvelope) -> Result<SurfaceState, Fail> {
    Ok(if h.solver.model().variant == Variant::ClassicalDysthe {
        reconstruct_classical(&h.state)?
    } else {
        reconstruct_hamiltonian(&h.state)?
    })
}

/// Reconstructed surface elevation and potential trace of the current state.
///
/// # Safety
/// `eta` and `xi` must each hold `len >= nx * ny` doubles.
#[no_mangle]
pub unsafe extern "C" fn dw_envelope_surface(h: *const DwEnvelope, eta: *mut f64, xi: *mut f64, len: usize) -> DwStatus {
    guard(|| {
        let s = reconstruct(deref(h, "handle")?)?;
        out_slice(eta, len, s.eta.as_slice().len(), "eta")?.copy_from_slice(s.eta.as_slice());
        out_slice(xi, len, s.xi.as_slice().len(), "xi")?.copy_from_slice(s.xi.as_slice());
        Ok(())
    })
}

/// Create a full solver with a flat surface at rest.
///
/// # Safety
/// `grid` must point to a valid struct and `out` to writable storage.
#[no_mangle]
pub unsafe extern "C" fn dw_full_new(
    grid_desc: *const DwGrid,
    dno_order: usize,
    g: f64,
    dt: f64,
    out: *mut *mut DwFull,
) -> DwStatus {
    guard(|| {
        let grid = grid(deref(grid_desc, "grid")?)?;
        let out = deref_mut(out, "out")?;
        let cfg = FullSolverConfig {
            dno: DnoConfig::new(dno_order, g)?,
            dt,
            g,
        };
        let solver = FullSolver::new(&grid, cfg)?;
        *out = Box::into_raw(Box::new(DwFull {
            solver,
            state: SurfaceState::zeros(&grid),
        }));
        Ok(())
    })
}

/// # Safety
/// `h` must be null or a handle from [`dw_full_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dw_full_free(h: *mut DwFull) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Replace the state with `(eta, xi)` at time `t`.
///
/// # Safety
/// `eta` and `xi` must each hold exactly `len = nx * ny` doubles.
#[no_mangle]
pub unsafe extern "C" fn dw_full_set_state(h: *mut DwFull, eta: *const f64, xi: *const f64, len: usize, t: f64) -> DwStatus {
    guard(|| {
        let h = deref_mut(h, "handle")?;
        let grid = h.solver.grid().clone();
        let eta = in_slice(eta, len, grid.len(), "eta")?;
        let xi = in_slice(xi, len, grid.len(), "xi")?;
        h.state = SurfaceState::new(
            RealField::from_vec(&grid, eta.to_vec())?,
            RealField::from_vec(&grid, xi.to_vec())?,
            t,
        )?;
        Ok(())
    })
}

/// Initialize the state from the surface reconstructed from an envelope.
///
/// # Safety
/// Both handles must be live.
#[no_mangle]
pub unsafe extern "C" fn dw_full_set_from_envelope(h: *mut DwFull, env: *const DwEnvelope) -> DwStatus {
    guard(|| {
        let h = deref_mut(h, "handle")?;
        let s = reconstruct(deref(env, "envelope")?)?;
        h.solver.grid().check_same(s.grid())?;
        h.state = s;
        Ok(())
    })
}

/// # Safety
/// `h` must be a live full-solver handle.
#[no_mangle]
pub unsafe extern "C" fn dw_full_step(h: *mut DwFull, n: usize) -> DwStatus {
    guard(|| {
        let h = deref_mut(h, "handle")?;
        h.state = h.solver.advance(&h.state, n, |_| Ok(()))?;
        Ok(())
    })
}

/// # Safety
/// `h` must be a live full-solver handle and `t` writable.
#[no_mangle]
pub unsafe extern "C" fn dw_full_time(h: *const DwFull, t: *mut f64) -> DwStatus {
    guard(|| {
        *deref_mut(t, "t")? = deref(h, "handle")?.state.t;
        Ok(())
    })
}

/// # Safety
/// `h` must be a live full-solver handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dw_full_hamiltonian(h: *const DwFull, out: *mut f64) -> DwStatus {
    guard(|| {
        let h = deref(h, "handle")?;
        *deref_mut(out, "out")? = h.solver.hamiltonian(&h.state)?;
        Ok(())
    })
}

/// Copy the state, row-major `[ix][iy]`, into `eta` and `xi`.
///
/// # Safety
/// `eta` and `xi` must each hold `len >= nx * ny` doubles.
#[no_mangle]
pub unsafe extern "C" fn dw_full_get(h: *const DwFull, eta: *mut f64, xi: *mut f64, len: usize) -> DwStatus {
    guard(|| {
        let s = &deref(h, "handle")?.state;
        out_slice(eta, len, s.eta.as_slice().len(), "eta")?.copy_from_slice(s.eta.as_slice());
        out_slice(xi, len, s.xi.as_slice().len(), "xi")?.copy_from_slice(s.xi.as_slice());
        Ok(())
    })
}

/// Writes 1 to `out` when the perturbation is modulationally unstable, else 0.
///
/// # Safety
/// `q` must point to a valid query and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn dw_bf_condition(q: *const DwStabilityQuery, out: *mut i32) -> DwStatus {
    guard(|| {
        let q = StabilityQuery::from(deref(q, "query")?);
        *deref_mut(out, "out")? = bf_condition(&q)? as i32;
        Ok(())
    })
}

/// Largest real growth exponent of the linearized envelope model.
///
/// # Safety
/// `q` must point to a valid query and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn dw_growth_rate(q: *const DwStabilityQuery, model: DwModel, out: *mut f64) -> DwStatus {
    guard(|| {
        let q = StabilityQuery::from(deref(q, "query")?);
        *deref_mut(out, "out")? = growth_rate_eig(&q, model.into())?;
        Ok(())
    })
}

/// Upper edge of the unstable band along `mu = 0`.
///
/// # Safety
/// `q` must point to a valid query and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn dw_band_edge(q: *const DwStabilityQuery, out: *mut f64) -> DwStatus {
    guard(|| {
        let q = StabilityQuery::from(deref(q, "query")?);
        *deref_mut(out, "out")? = band_edge_mu0(&q)?;
        Ok(())
    })
}

/// `d123` for the wavevectors `k = [k1x, k1y, k2x, k2y, k3x, k3y]`.
///
/// # Safety
/// `k` must hold 6 doubles and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn dw_denom_d123(k: *const f64, g: f64, out: *mut f64) -> DwStatus {
    guard(|| {
        let k = in_slice(k, 6, 6, "k")?;
        let t = WaveTriple::new([k[0], k[1]], [k[2], k[3]], [k[4], k[5]], g);
        *deref_mut(out, "out")? = denom_d123(&t)?;
        Ok(())
    })
}

/// Quartic coefficient `T1` for `k = [k1x, k1y, ..., k4x, k4y]` with
/// `k1 + k2 + k3 + k4 = 0`.
///
/// # Safety
/// `k` must hold 8 doubles and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn dw_coeff_t1(k: *const f64, g: f64, out: *mut f64) -> DwStatus {
    guard(|| {
        let k = in_slice(k, 8, 8, "k")?;
        let q = WaveQuad::new([k[0], k[1]], [k[2], k[3]], [k[4], k[5]], [k[6], k[7]], g);
        *deref_mut(out, "out")? = coeff_t1(&q);
        Ok(())
    })
}

/// Run a JSON configuration, writing its outputs into `out_dir` (or the
/// configuration's own directory when `out_dir` is null).
///
/// # Safety
/// `json` must be a NUL-terminated string; `out_dir` null or NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn dw_run_json(json: *const c_char, out_dir: *const c_char) -> DwStatus {
    guard(|| {
        let cfg = RunConfig::from_json(c_str(json, "json")?)?;
        let dir = if out_dir.is_null() {
            None
        } else {
            Some(Path::new(c_str(out_dir, "out_dir")?))
        };
        run(&cfg, dir)?;
        Ok(())
    })
}
