use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use cuspidal_ffi::*;

fn model(json: &str) -> *mut CuspModel {
    let s = CString::new(json).unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { cusp_model_from_json(s.as_ptr(), &mut m) }, CuspStatus::Ok);
    assert!(!m.is_null());
    m
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(cusp_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn constants_and_gamma() {
    let (mut c0, mut c1) = (0.0, 0.0);
    assert_eq!(unsafe { cusp_constants(&mut c0, &mut c1) }, CuspStatus::Ok);
    assert!((c0 - 2.428_650_647_887_581_6).abs() < 1e-13);
    assert!((c1 + 1.493_668_400_444_373_6).abs() < 1e-13);
    let mut g = 0.0;
    assert_eq!(unsafe { cusp_gamma(0.5, &mut g) }, CuspStatus::Ok);
    assert!((g - std::f64::consts::PI.sqrt()).abs() < 1e-13);
    assert_eq!(unsafe { cusp_gamma(-2.0, &mut g) }, CuspStatus::Pole);
    assert!(last_error().contains("pole"));
    assert_eq!(unsafe { cusp_gamma(1.0, ptr::null_mut()) }, CuspStatus::NullPointer);
}

#[test]
fn model_lifecycle_and_errors() {
    let bad = CString::new("{\"kind\": \"torus\"}").unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { cusp_model_from_json(bad.as_ptr(), &mut m) }, CuspStatus::InvalidInput);
    assert!(m.is_null());
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { cusp_model_from_json(ptr::null(), &mut m) }, CuspStatus::NullPointer);
    let m = model(r#"{"kind":"cusp_local","density":{"terms":[{"c":1.0,"e":[0,0,0]}]}}"#);
    let mut v = 0.0;
    // On the cusp value there is no narrow torus.
    assert_eq!(unsafe { cusp_action(m, 0.0, 0.0, CuspStratum::Narrow, &mut v) }, CuspStatus::Domain);
    assert_eq!(unsafe { cusp_action(m, 0.0, -3.0, CuspStratum::Narrow, &mut v) }, CuspStatus::Ok);
    assert!(v > 0.0);
    assert_eq!(last_error(), "");
    unsafe {
        cusp_model_free(m);
        cusp_model_free(ptr::null_mut());
    }
}

#[test]
fn field_flow_and_lattice() {
    let m = model(r#"{"kind":"cusp_local","density":{"terms":[{"c":1.0,"e":[0,0,0]}]}}"#);
    let p = [1.0, 1.0, 0.0, 0.0];
    let mut v = [0.0; 4];
    assert_eq!(unsafe { cusp_hamiltonian_field(m, CuspGenerator::H, p.as_ptr(), v.as_mut_ptr()) }, CuspStatus::Ok);
    assert_eq!(v, [-3.0, 2.0, 0.0, 1.0]);
    let mut q = [0.2, 0.1, -0.3, 0.0];
    assert_eq!(unsafe { cusp_flow(m, CuspGenerator::F, 1.5, q.as_mut_ptr()) }, CuspStatus::Ok);
    assert!((q[3] - 1.5).abs() < 1e-12 && q[0] == 0.2);
    unsafe { cusp_model_free(m) };

    let c = model(r#"{"kind":"cusp_compact","density":{"terms":[{"c":1.0,"e":[0,0,0]}]}}"#);
    let mut basis = [0.0; 4];
    assert_eq!(unsafe { cusp_period_lattice(c, 0.05, 0.02, CuspStratum::Wide, basis.as_mut_ptr()) }, CuspStatus::Ok);
    assert!(basis[0].abs() < 1e-12 && (basis[1] - 2.0 * std::f64::consts::PI).abs() < 1e-12);
    assert!(basis[2] > 0.0);
    unsafe { cusp_model_free(c) };
}

#[test]
fn owned_strings() {
    let f = CString::new(r#"{"terms":[{"c":1.0,"e":[0,3,0]}]}"#).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { cusp_decompose(f.as_ptr(), &mut out) }, CuspStatus::Ok);
    let s = unsafe { CStr::from_ptr(out) }.to_str().unwrap().to_owned();
    unsafe { cusp_string_free(out) };
    assert_eq!(s, r#"{"alpha":[0.0,0.4],"beta":[0.0]}"#);

    let m = model(r#"{"kind":"cusp_local","density":{"terms":[{"c":1.0,"e":[0,0,0]}]}}"#);
    let mut csv = ptr::null_mut();
    assert_eq!(unsafe { cusp_action_chart_csv(m, 3, 2, &mut csv) }, CuspStatus::Ok);
    let text = unsafe { CStr::from_ptr(csv) }.to_str().unwrap().to_owned();
    unsafe { cusp_string_free(csv) };
    assert!(text.starts_with("H,lambda,stratum,Pi,Pi_circ,I,I_circ,I_mu\n"));
    assert_eq!(text.lines().count(), 7);
    assert_eq!(unsafe { cusp_action_chart_csv(m, 0, 2, &mut csv) }, CuspStatus::InvalidInput);
    unsafe { cusp_model_free(m) };
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/cuspidal.h");
    let text = std::fs::read_to_string(header).unwrap();
    for name in ["cusp_model_from_json", "cusp_model_free", "cusp_last_error", "CUSP_STATUS_OK"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let Ok(out) = Command::new("cc").args(["-fsyntax-only", "-xc", header]).output() else {
        eprintln!("no C compiler; syntax check skipped");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
