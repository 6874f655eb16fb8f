use std::ffi::{CStr, CString};
use std::ptr;

use ffc::*;

unsafe fn take_string(s: *mut std::ffi::c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_owned();
    ffc_string_free(s);
    out
}

unsafe fn last_error() -> String {
    CStr::from_ptr(ffc_last_error()).to_str().unwrap().to_owned()
}

#[test]
fn version_is_set() {
    let v = unsafe { CStr::from_ptr(ffc_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn convolution_round_trip() {
    unsafe {
        // (x-1)(x-2) and x^2
        let mut p = ptr::null_mut();
        let mut q = ptr::null_mut();
        assert_eq!(ffc_poly_from_i64([2, -3, 1].as_ptr(), 3, &mut p), FfcStatus::Ok);
        let j = CString::new(r#"{"coeffs": ["0", "0", "1"]}"#).unwrap();
        assert_eq!(ffc_poly_from_json(j.as_ptr(), &mut q), FfcStatus::Ok);

        // Convolving with x^d is the identity.
        let mut r = ptr::null_mut();
        assert_eq!(ffc_convolve(FfcKind::Sym, p, q, 2, &mut r), FfcStatus::Ok);
        let mut s = ptr::null_mut();
        assert_eq!(ffc_poly_to_json(r, &mut s), FfcStatus::Ok);
        let mut s2 = ptr::null_mut();
        assert_eq!(ffc_poly_to_json(p, &mut s2), FfcStatus::Ok);
        assert_eq!(take_string(s), take_string(s2));

        let mut deg = 0;
        assert_eq!(ffc_poly_degree(r, &mut deg), FfcStatus::Ok);
        assert_eq!(deg, 2);
        let mut rr = false;
        assert_eq!(ffc_is_real_rooted(r, &mut rr), FfcStatus::Ok);
        assert!(rr);

        let mut f = ptr::null_mut();
        assert_eq!(ffc_m_fold(FfcKind::Asym, p, 3, 2, &mut f), FfcStatus::Ok);
        assert_eq!(ffc_is_real_rooted(f, &mut rr), FfcStatus::Ok);
        assert!(rr);

        for h in [p, q, r, f] {
            ffc_poly_free(h);
        }
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut p = ptr::null_mut();
        let bad = CString::new("{\"coeffs\": [1,").unwrap();
        assert_eq!(ffc_poly_from_json(bad.as_ptr(), &mut p), FfcStatus::Parse);
        assert!(p.is_null());
        assert!(!last_error().is_empty());

        assert_eq!(ffc_poly_from_json(ptr::null(), &mut p), FfcStatus::InvalidArgument);
        assert_eq!(ffc_ramanujan_bound(1, ptr::null_mut(), ptr::null_mut()), FfcStatus::Parameter);

        let mut g = ptr::null_mut();
        assert_eq!(ffc_graph_sample(FfcMode::Bipartite, 0, 3, 1, &mut g), FfcStatus::Parameter);
        assert!(last_error().contains("invalid parameter"));
    }
}

#[test]
fn bound_strings() {
    unsafe {
        let mut s = ptr::null_mut();
        let mut x = 0.0;
        assert_eq!(ffc_ramanujan_bound(3, &mut s, &mut x), FfcStatus::Ok);
        assert_eq!(take_string(s), "2*sqrt(2)");
        assert!((x - 8f64.sqrt()).abs() < 1e-15);
    }
}

#[test]
fn graph_certificate_search() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(ffc_graph_sample(FfcMode::Bipartite, 4, 3, 7, &mut g), FfcStatus::Ok);
        let mut s = ptr::null_mut();
        assert_eq!(ffc_graph_to_json(g, &mut s), FfcStatus::Ok);
        let json = CString::new(take_string(s)).unwrap();
        let mut g2 = ptr::null_mut();
        assert_eq!(ffc_graph_from_json(json.as_ptr(), &mut g2), FfcStatus::Ok);

        let mut c = ptr::null_mut();
        assert_eq!(ffc_certify(g2, &mut c), FfcStatus::Ok);
        let mut ok = false;
        assert_eq!(ffc_certificate_reverify(c, &mut ok), FfcStatus::Ok);
        assert!(ok);
        assert_eq!(ffc_certificate_to_json(c, &mut s), FfcStatus::Ok);
        let cj = CString::new(take_string(s)).unwrap();
        let mut c2 = ptr::null_mut();
        assert_eq!(ffc_certificate_from_json(cj.as_ptr(), &mut c2), FfcStatus::Ok);
        let (mut v1, mut v2) = (FfcVerdict::NotRamanujan, FfcVerdict::StrictlyRamanujan);
        ffc_certificate_verdict(c, &mut v1);
        ffc_certificate_verdict(c2, &mut v2);
        assert_eq!(v1, v2);

        let mut found = ptr::null_mut();
        let mut trial = u64::MAX;
        let st = ffc_search(FfcMode::Bipartite, 5, 3, 1000, 1, false, &mut found, &mut trial);
        assert_eq!(st, FfcStatus::Ok);
        assert!(!found.is_null());
        assert!(trial < 1000);
        ffc_certificate_verdict(found, &mut v1);
        assert_eq!(v1, FfcVerdict::StrictlyRamanujan);

        ffc_graph_free(g);
        ffc_graph_free(g2);
        ffc_certificate_free(c);
        ffc_certificate_free(c2);
        ffc_certificate_free(found);
    }
}

#[test]
fn all_equal_matchings_fail() {
    unsafe {
        let j = CString::new(
            r#"{"version":1,"mode":"bipartite","d":2,"m":3,"perms":[[0,1],[0,1],[0,1]]}"#,
        )
        .unwrap();
        let mut g = ptr::null_mut();
        assert_eq!(ffc_graph_from_json(j.as_ptr(), &mut g), FfcStatus::Ok, "{}", last_error());
        let mut c = ptr::null_mut();
        assert_eq!(ffc_certify(g, &mut c), FfcStatus::Ok);
        let mut v = FfcVerdict::StrictlyRamanujan;
        ffc_certificate_verdict(c, &mut v);
        assert_eq!(v, FfcVerdict::NotRamanujan);
        ffc_certificate_free(c);
        ffc_graph_free(g);
    }
}
