use std::ffi::{CStr, CString};
use std::ptr;

use weyl_arc_ffi::*;

fn last_error() -> String {
    let p = weyl_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn model(j: f64, jp: f64, m: f64, phi: f64) -> *mut WeylModel {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { weyl_model_new(j, jp, m, phi, &mut h) }, WeylStatus::Ok);
    assert!(!h.is_null());
    h
}

#[test]
fn weyl_nodes_of_the_minimal_model() {
    let m = model(1.0, 0.0, 0.0, 0.0);
    let mut nodes = ptr::null_mut();
    assert_eq!(unsafe { weyl_nodes_find(m, 1e-10, &mut nodes) }, WeylStatus::Ok);
    let n = unsafe { weyl_nodes_len(nodes) };
    assert_eq!(n, 4);
    let mut total = 0;
    for i in 0..n {
        let mut info = WeylNodeInfo::default();
        assert_eq!(unsafe { weyl_nodes_get(nodes, i, &mut info) }, WeylStatus::Ok);
        assert!((info.kx.abs() - std::f64::consts::FRAC_PI_4).abs() < 1e-6);
        total += info.chirality;
    }
    assert_eq!(total, 0);
    let mut info = WeylNodeInfo::default();
    assert_eq!(unsafe { weyl_nodes_get(nodes, n, &mut info) }, WeylStatus::OutOfRange);
    assert!(last_error().contains("node 4"));
    unsafe {
        weyl_nodes_free(nodes);
        weyl_model_free(m);
    }
}

#[test]
fn phase_chern_and_bands() {
    let m = model(1.0, 0.4, 0.0, 0.0);
    let mut phase = WeylPhase::BandInsulator;
    assert_eq!(unsafe { weyl_model_phase(m, &mut phase) }, WeylStatus::Ok);
    assert_eq!(phase, WeylPhase::Wsm2);
    let mut e = [0.0; 2];
    assert_eq!(unsafe { weyl_model_bulk_energies(m, 0.3, -0.2, 1.1, e.as_mut_ptr()) }, WeylStatus::Ok);
    assert!(e[0] <= e[1]);
    unsafe { weyl_model_free(m) };

    let qhi = model(1.0, 1.5, 0.0, 0.0);
    let mut c = 0;
    assert_eq!(unsafe { weyl_model_chern(qhi, 0.3, 41, &mut c) }, WeylStatus::Ok);
    assert_eq!(c.abs(), 1);
    unsafe { weyl_model_free(qhi) };
}

#[test]
fn null_and_invalid_arguments() {
    assert_eq!(unsafe { weyl_model_new(1.0, 0.0, 0.0, 0.0, ptr::null_mut()) }, WeylStatus::NullPointer);
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { weyl_model_new(f64::NAN, 0.0, 0.0, 0.0, &mut h) }, WeylStatus::InvalidArgument);
    assert!(h.is_null());
    let mut phase = WeylPhase::BandInsulator;
    assert_eq!(unsafe { weyl_model_phase(ptr::null(), &mut phase) }, WeylStatus::NullPointer);
    assert!(last_error().contains("model"));
    assert_eq!(unsafe { weyl_nodes_len(ptr::null()) }, 0);
    unsafe {
        weyl_model_free(ptr::null_mut());
        weyl_nodes_free(ptr::null_mut());
        weyl_hinge_pair_free(ptr::null_mut());
    }
    let v = unsafe { CStr::from_ptr(weyl_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn hinge_pair_round_trip() {
    let m = model(1.0, 0.4, 0.0, std::f64::consts::FRAC_PI_2);
    let mut pair = ptr::null_mut();
    assert_eq!(unsafe { weyl_hinge_pair_new(m, 4, 3, 9, 0.3, 1.0, 1, &mut pair) }, WeylStatus::InvalidArgument);
    assert_eq!(unsafe { weyl_hinge_pair_new(m, 4, 3, 2, 0.3, 1.0, 1, &mut pair) }, WeylStatus::Ok);
    let mut c_max = -1.0;
    assert_eq!(unsafe { weyl_hinge_pair_max_concurrence(pair, &mut c_max, ptr::null_mut()) }, WeylStatus::InvalidArgument);
    assert_eq!(unsafe { weyl_hinge_pair_evolve(pair, 5.0, 26) }, WeylStatus::Ok);
    let mut n = 0usize;
    let mut small = [0.0; 4];
    assert_eq!(
        unsafe { weyl_hinge_pair_series(pair, small.as_mut_ptr(), ptr::null_mut(), ptr::null_mut(), ptr::null_mut(), 4, &mut n) },
        WeylStatus::OutOfRange
    );
    assert_eq!(n, 26);
    let (mut t, mut p1, mut p2, mut c) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let status = unsafe { weyl_hinge_pair_series(pair, t.as_mut_ptr(), p1.as_mut_ptr(), p2.as_mut_ptr(), c.as_mut_ptr(), n, &mut n) };
    assert_eq!(status, WeylStatus::Ok);
    assert_eq!((t[0], p1[0], p2[0]), (0.0, 1.0, 0.0));
    assert!((t[n - 1] - 5.0).abs() < 1e-12);
    let mut t_peak = 0.0;
    assert_eq!(unsafe { weyl_hinge_pair_max_concurrence(pair, &mut c_max, &mut t_peak) }, WeylStatus::Ok);
    assert_eq!(c_max, c.iter().copied().fold(0.0, f64::max));
    assert!((0.0..=1.0).contains(&c_max));
    for i in 0..n {
        assert!(c[i] <= 2.0 * (p1[i] * p2[i]).sqrt() + 1e-12);
    }
    unsafe {
        weyl_hinge_pair_free(pair);
        weyl_model_free(m);
    }
}

#[test]
fn run_writes_a_manifest() {
    let dir = std::env::temp_dir().join(format!("weyl-ffi-run-{}", std::process::id()));
    let out = CString::new(dir.to_str().unwrap()).unwrap();
    let cmd = CString::new("weyl-points").unwrap();
    assert_eq!(unsafe { weyl_run(cmd.as_ptr(), ptr::null(), out.as_ptr()) }, WeylStatus::Ok);
    assert!(dir.join("manifest.csv").exists());
    let text = std::fs::read_to_string(dir.join("weyl_points.csv")).unwrap();
    assert!(text.contains("# n_nodes=4"));

    let bad = CString::new("[slab]\nN_s = 4\n").unwrap();
    let arcs = CString::new("fermi-arcs").unwrap();
    assert_eq!(unsafe { weyl_run(arcs.as_ptr(), bad.as_ptr(), out.as_ptr()) }, WeylStatus::InvalidArgument);
    assert!(last_error().contains("N_s must be odd"));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/weyl_arc.h");
    let text = std::fs::read_to_string(header).unwrap();
    for name in ["weyl_model_new", "weyl_nodes_get", "weyl_hinge_pair_series", "weyl_run", "WEYL_STATUS_OUT_OF_RANGE"] {
        assert!(text.contains(name), "{name} missing from the header");
    }
    let dir = std::env::temp_dir().join(format!("weyl-ffi-header-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("use.c");
    std::fs::write(
        &src,
        "#include \"weyl_arc.h\"\nint main(void) {\n  WeylModel *m = 0;\n  WeylNodeInfo info;\n  WeylStatus s = weyl_model_new(1.0, 0.0, 0.0, 0.0, &m);\n  (void)info;\n  return s == WEYL_STATUS_OK ? 0 : 1;\n}\n",
    )
    .unwrap();
    let status = std::process::Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I", concat!(env!("CARGO_MANIFEST_DIR"), "/include")])
        .arg(&src)
        .status()
        .expect("a C compiler is available");
    assert!(status.success());
    let _ = std::fs::remove_dir_all(&dir);
}
