use std::ffi::{CStr, CString};
use std::ptr;

use qtopo_ffi::*;

fn hexagon() -> Vec<f64> {
    (0..6)
        .flat_map(|k| {
            let t = std::f64::consts::PI * k as f64 / 3.0;
            [t.cos(), t.sin()]
        })
        .collect()
}

fn last_error() -> String {
    let p = qtopo_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn version_is_crate_version() {
    let v = unsafe { CStr::from_ptr(qtopo_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn matrix_round_trip_and_distortion() {
    let entries = [0.0, 1.0, 1.0, 0.0];
    let mut a = ptr::null_mut();
    let mut b = ptr::null_mut();
    unsafe {
        assert_eq!(
            qtopo_distance_matrix_new(2, entries.as_ptr(), &mut a),
            QtopoStatus::Ok
        );
        let doubled = [0.0, 2.0, 2.0, 0.0];
        assert_eq!(
            qtopo_distance_matrix_new(2, doubled.as_ptr(), &mut b),
            QtopoStatus::Ok
        );
        assert_eq!(qtopo_distance_matrix_len(a), 2);
        let mut buf = [0.0; 4];
        assert_eq!(
            qtopo_distance_matrix_entries(a, buf.as_mut_ptr(), 4),
            QtopoStatus::Ok
        );
        assert_eq!(buf, entries);
        assert_eq!(
            qtopo_distance_matrix_entries(a, buf.as_mut_ptr(), 3),
            QtopoStatus::InvalidArgument
        );
        let mut dis = f64::NAN;
        assert_eq!(qtopo_distortion(a, b, &mut dis), QtopoStatus::Ok);
        assert_eq!(dis, 1.0);
        let (mut w, mut res) = (f64::NAN, f64::NAN);
        assert_eq!(
            qtopo_optimal_weight(a, b, &mut w, &mut res),
            QtopoStatus::Ok
        );
        assert!((w - 0.5).abs() < 1e-12 && res.abs() < 1e-12);
        qtopo_distance_matrix_free(a);
        qtopo_distance_matrix_free(b);
    }
}

#[test]
fn invalid_inputs_report_status_and_message() {
    let asym = [0.0, 1.0, 2.0, 0.0];
    let mut m = ptr::null_mut();
    unsafe {
        assert_eq!(
            qtopo_distance_matrix_new(2, asym.as_ptr(), &mut m),
            QtopoStatus::InvalidData
        );
        assert!(m.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(
            qtopo_distance_matrix_new(2, ptr::null(), &mut m),
            QtopoStatus::NullPointer
        );
        let mut v = 0.0;
        assert_eq!(
            qtopo_distortion(ptr::null(), ptr::null(), &mut v),
            QtopoStatus::NullPointer
        );
        let pts = hexagon();
        let enc = CString::new("nonsense").unwrap();
        let met = CString::new("trace").unwrap();
        assert_eq!(
            qtopo_encoded_distances(pts.as_ptr(), 6, 2, enc.as_ptr(), met.as_ptr(), &mut m),
            QtopoStatus::Parse
        );
        qtopo_distance_matrix_free(ptr::null_mut());
        qtopo_diagrams_free(ptr::null_mut());
    }
}

#[test]
fn hexagon_persistence_through_handles() {
    let pts = hexagon();
    let mut d = ptr::null_mut();
    let mut dg = ptr::null_mut();
    unsafe {
        assert_eq!(
            qtopo_euclidean_distances(pts.as_ptr(), 6, 2, &mut d),
            QtopoStatus::Ok
        );
        assert_eq!(qtopo_rips_persistence(d, 1, 0, &mut dg), QtopoStatus::Ok);
        assert_eq!(qtopo_diagrams_degrees(dg), 2);
        let mut len = 0;
        assert_eq!(qtopo_diagram_len(dg, 1, &mut len), QtopoStatus::Ok);
        assert_eq!(len, 1);
        let (mut b, mut e) = ([0.0; 1], [0.0; 1]);
        assert_eq!(
            qtopo_diagram_intervals(dg, 1, b.as_mut_ptr(), e.as_mut_ptr(), 1),
            QtopoStatus::Ok
        );
        // side 1, short diagonal sqrt(3)
        assert!((b[0] - 1.0).abs() < 1e-12 && (e[0] - 3f64.sqrt()).abs() < 1e-12);
        assert_eq!(
            qtopo_diagram_len(dg, 3, &mut len),
            QtopoStatus::InvalidArgument
        );
        let mut v = f64::NAN;
        assert_eq!(qtopo_bottleneck(dg, dg, 1, &mut v), QtopoStatus::Ok);
        assert_eq!(v, 0.0);
        let mut capped = ptr::null_mut();
        assert_eq!(
            qtopo_rips_persistence(d, 1, 3, &mut capped),
            QtopoStatus::Numeric
        );
        qtopo_diagrams_free(dg);
        qtopo_distance_matrix_free(d);
    }
}

#[test]
fn utd_distances_are_scaled_euclidean() {
    let pts = hexagon();
    let enc = CString::new("utd").unwrap();
    let met = CString::new("hs").unwrap();
    let (mut x, mut y) = (ptr::null_mut(), ptr::null_mut());
    unsafe {
        assert_eq!(
            qtopo_euclidean_distances(pts.as_ptr(), 6, 2, &mut x),
            QtopoStatus::Ok
        );
        assert_eq!(
            qtopo_encoded_distances(pts.as_ptr(), 6, 2, enc.as_ptr(), met.as_ptr(), &mut y),
            QtopoStatus::Ok
        );
        let (mut w, mut res) = (0.0, 0.0);
        assert_eq!(
            qtopo_optimal_weight(x, y, &mut w, &mut res),
            QtopoStatus::Ok
        );
        // radius 1, m = 2
        assert!((w - 6f64.sqrt()).abs() < 1e-9, "{w}");
        assert!(res < 1e-9);
        qtopo_distance_matrix_free(x);
        qtopo_distance_matrix_free(y);
    }
}
