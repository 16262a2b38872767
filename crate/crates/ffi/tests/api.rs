use std::ffi::{c_char, CStr, CString};
use std::ptr;

use deepwave_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 256];
    unsafe { dw_last_error_message(buf.as_mut_ptr(), buf.len()) };
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

fn small_grid() -> DwGrid {
    DwGrid {
        nx: 64,
        ny: 8,
        lx: 2.0 * std::f64::consts::PI,
        ly: 2.0 * std::f64::consts::PI,
    }
}

fn params(model: DwModel) -> DwEnvelopeParams {
    DwEnvelopeParams {
        grid: small_grid(),
        model,
        k0: 10.0,
        g: 1.0,
        dt: 0.01,
        b0: 0.003,
        lambda: 1.0,
        mu: 1.0,
        perturbation: 0.1,
    }
}

#[test]
fn envelope_handle_lifecycle() {
    let mut h = ptr::null_mut();
    let p = params(DwModel::HamiltonianDysthe);
    assert_eq!(unsafe { dw_envelope_new(&p, &mut h) }, DwStatus::Ok);
    let mut inv0 = [0.0; 4];
    assert_eq!(unsafe { dw_envelope_invariants(h, inv0.as_mut_ptr()) }, DwStatus::Ok);
    assert_eq!(unsafe { dw_envelope_step(h, 20) }, DwStatus::Ok);
    let mut t = 0.0;
    unsafe { dw_envelope_time(h, &mut t) };
    assert!((t - 0.2).abs() < 1e-12);
    let mut inv = [0.0; 4];
    unsafe { dw_envelope_invariants(h, inv.as_mut_ptr()) };
    assert!(((inv[1] - inv0[1]) / inv0[1]).abs() < 1e-10);
    assert!(((inv[0] - inv0[0]) / inv0[0]).abs() < 1e-8);

    let n = 64 * 8;
    let (mut re, mut im) = (vec![0.0; n], vec![0.0; n]);
    assert_eq!(unsafe { dw_envelope_get(h, re.as_mut_ptr(), im.as_mut_ptr(), n) }, DwStatus::Ok);
    let m: f64 = re.iter().zip(&im).map(|(a, b)| a * a + b * b).sum::<f64>() / n as f64
        * (4.0 * std::f64::consts::PI.powi(2));
    assert!((m - inv[1]).abs() < 1e-12 * m);

    let (mut eta, mut xi) = (vec![0.0; n], vec![0.0; n]);
    assert_eq!(unsafe { dw_envelope_surface(h, eta.as_mut_ptr(), xi.as_mut_ptr(), n) }, DwStatus::Ok);
    assert!(eta.iter().any(|v| *v != 0.0));

    assert_eq!(
        unsafe { dw_envelope_get(h, re.as_mut_ptr(), im.as_mut_ptr(), n - 1) },
        DwStatus::InvalidArgument
    );
    assert!(last_error().contains("needed"));
    unsafe { dw_envelope_free(h) };
    unsafe { dw_envelope_free(ptr::null_mut()) };
}

#[test]
fn full_solver_from_envelope_conserves_energy() {
    let mut env = ptr::null_mut();
    unsafe { dw_envelope_new(&params(DwModel::HamiltonianDysthe), &mut env) };
    let mut full = ptr::null_mut();
    let grid = small_grid();
    assert_eq!(unsafe { dw_full_new(&grid, 4, 1.0, 0.01, &mut full) }, DwStatus::Ok);
    assert_eq!(unsafe { dw_full_set_from_envelope(full, env) }, DwStatus::Ok);
    let (mut h0, mut h1) = (0.0, 0.0);
    unsafe { dw_full_hamiltonian(full, &mut h0) };
    assert_eq!(unsafe { dw_full_step(full, 10) }, DwStatus::Ok);
    unsafe { dw_full_hamiltonian(full, &mut h1) };
    assert!(h0 > 0.0 && ((h1 - h0) / h0).abs() < 1e-7);

    let n = 64 * 8;
    let (mut eta, mut xi) = (vec![0.0; n], vec![0.0; n]);
    assert_eq!(unsafe { dw_full_get(full, eta.as_mut_ptr(), xi.as_mut_ptr(), n) }, DwStatus::Ok);
    let zeros = vec![0.0; n];
    assert_eq!(unsafe { dw_full_set_state(full, zeros.as_ptr(), zeros.as_ptr(), n, 0.0) }, DwStatus::Ok);
    unsafe { dw_full_hamiltonian(full, &mut h1) };
    assert_eq!(h1, 0.0);
    unsafe {
        dw_full_free(full);
        dw_envelope_free(env);
    }
}

#[test]
fn invalid_inputs_report_codes() {
    let mut h = ptr::null_mut();
    let mut p = params(DwModel::Nls);
    p.k0 = 10.5;
    assert_eq!(unsafe { dw_envelope_new(&p, &mut h) }, DwStatus::InvalidArgument);
    assert!(h.is_null());
    assert!(dw_last_error_length() > 0);
    assert_eq!(unsafe { dw_envelope_new(ptr::null(), &mut h) }, DwStatus::NullPointer);
    assert_eq!(last_error(), "params is null");
    assert_eq!(unsafe { dw_envelope_step(ptr::null_mut(), 1) }, DwStatus::NullPointer);

    let mut full = ptr::null_mut();
    assert_eq!(
        unsafe { dw_full_new(&small_grid(), 9, 1.0, 0.01, &mut full) },
        DwStatus::InvalidArgument
    );
    let bad = DwGrid { nx: 100, ..small_grid() };
    assert_eq!(unsafe { dw_full_new(&bad, 4, 1.0, 0.01, &mut full) }, DwStatus::InvalidArgument);

    // a truncated message still reports the full length
    let mut tiny = [0 as c_char; 4];
    let len = unsafe { dw_last_error_message(tiny.as_mut_ptr(), tiny.len()) };
    assert!(len > 3);
    assert_eq!(tiny[3], 0);
}

#[test]
fn stability_entry_points() {
    let mut q = DwStabilityQuery {
        b0: 0.003,
        k0: 10.0,
        g: 1.0,
        epsilon: 1.0,
        lambda: 1.5,
        mu: 0.0,
    };
    let mut flag = -1;
    assert_eq!(unsafe { dw_bf_condition(&q, &mut flag) }, DwStatus::Ok);
    assert_eq!(flag, 1);
    let mut gr = 0.0;
    assert_eq!(unsafe { dw_growth_rate(&q, DwModel::HamiltonianDysthe, &mut gr) }, DwStatus::Ok);
    assert!(gr > 0.0);
    let mut edge = 0.0;
    unsafe { dw_band_edge(&q, &mut edge) };
    assert!((edge - 1.918364).abs() < 1e-5);
    q.lambda = 0.0;
    assert_eq!(unsafe { dw_bf_condition(&q, &mut flag) }, DwStatus::InvalidArgument);
}

#[test]
fn coefficient_entry_points() {
    let mut d = 0.0;
    let k = [1.0, 0.0, 1.0, 0.0, -2.0, 0.0];
    assert_eq!(unsafe { dw_denom_d123(k.as_ptr(), 1.0, &mut d) }, DwStatus::Ok);
    assert!((d + 4.0).abs() < 1e-12, "{d}");
    let degenerate = [0.0, 0.0, 1.0, 0.0, -1.0, 0.0];
    assert_eq!(unsafe { dw_denom_d123(degenerate.as_ptr(), 1.0, &mut d) }, DwStatus::InvalidArgument);
    let mut t = 0.0;
    let quad = [10.0, 0.0, 10.0, 0.0, -10.0, 0.0, -10.0, 0.0];
    assert_eq!(unsafe { dw_coeff_t1(quad.as_ptr(), 1.0, &mut t) }, DwStatus::Ok);
    assert!(t.is_finite());
}

#[test]
fn run_json_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let json = CString::new(
        r#"{"nx":64,"ny":8,"dt":0.01,"t_end":0.1,"snapshot_every":0.05,
            "model":"nls","k0":10,"b0":0.003,"lambda":1,"mu":1}"#,
    )
    .unwrap();
    let out = CString::new(dir.path().to_str().unwrap()).unwrap();
    assert_eq!(unsafe { dw_run_json(json.as_ptr(), out.as_ptr()) }, DwStatus::Ok);
    assert!(dir.path().join("diagnostics.csv").exists());
    let bad = CString::new(r#"{"nx":64,"extra":1}"#).unwrap();
    assert_eq!(unsafe { dw_run_json(bad.as_ptr(), out.as_ptr()) }, DwStatus::Config);
}

#[test]
fn version_is_a_c_string() {
    let v = unsafe { CStr::from_ptr(dw_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/deepwave.h")).unwrap();
    for name in [
        "dw_envelope_new",
        "dw_envelope_free",
        "dw_full_new",
        "dw_full_step",
        "dw_growth_rate",
        "dw_last_error_message",
        "DW_STATUS_BLOW_UP",
        "typedef struct DwEnvelope DwEnvelope",
    ] {
        assert!(header.contains(name), "{name}");
    }
    // compile a caller against the header when a C compiler is present
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        r#"#include "deepwave.h"
int main(void) {
    DwStabilityQuery q = {0.003, 10.0, 1.0, 1.0, 1.5, 0.0};
    double g = 0.0;
    DwStatus s = dw_growth_rate(&q, DW_MODEL_HAMILTONIAN_DYSTHE, &g);
    return s == DW_STATUS_OK ? 0 : 1;
}
"#,
    )
    .unwrap();
    let include = concat!(env!("CARGO_MANIFEST_DIR"), "/include");
    if let Ok(st) = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-I", include])
        .arg(&src)
        .status()
    {
        assert!(st.success());
    }
}
