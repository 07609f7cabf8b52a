use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::ptr;

use coxtoda_ffi::*;

fn take(s: *mut c_char) -> String {
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { cox_string_free(s) };
    out
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(cox_last_error()) }.to_str().unwrap().to_owned()
}

fn params(json: &str) -> *mut CoxParams {
    let j = CString::new(json).unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { cox_params_from_json(j.as_ptr(), &mut p) }, CoxStatus::Ok);
    p
}

#[test]
fn pair_lifecycle_and_errors() {
    unsafe {
        let mut pair = ptr::null_mut();
        assert_eq!(cox_pair_relativistic(4, &mut pair), CoxStatus::Ok);
        assert_eq!(cox_pair_n(pair), 4);
        let mut eps = [9u8; 4];
        assert_eq!(cox_pair_eps(pair, eps.as_mut_ptr(), 4), CoxStatus::Ok);
        assert_eq!(eps, [2, 1, 1, 0]);
        assert_eq!(cox_pair_eps(pair, eps.as_mut_ptr(), 2), CoxStatus::ArgumentError);
        let mut s = ptr::null_mut();
        assert_eq!(cox_pair_to_json(pair, &mut s), CoxStatus::Ok);
        let json = CString::new(take(s)).unwrap();
        let mut back = ptr::null_mut();
        assert_eq!(cox_pair_from_json(json.as_ptr(), &mut back), CoxStatus::Ok);
        assert_eq!(cox_pair_n(back), 4);
        cox_pair_free(back);
        cox_pair_free(pair);

        let (p, m) = ([1usize, 4], [1usize, 2]);
        let mut bad = ptr::null_mut();
        assert_eq!(cox_pair_new(4, p.as_ptr(), 2, m.as_ptr(), 2, &mut bad), CoxStatus::ArgumentError);
        assert!(bad.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(cox_pair_tridiagonal(3, ptr::null_mut()), CoxStatus::NullPointer);
        assert_eq!(cox_pair_from_json(ptr::null(), &mut bad), CoxStatus::NullPointer);
        let junk = CString::new("{").unwrap();
        assert_eq!(cox_pair_from_json(junk.as_ptr(), &mut bad), CoxStatus::ArgumentError);
        assert_eq!(cox_pair_n(ptr::null()), 0);
        cox_pair_free(ptr::null_mut());
        assert!(CStr::from_ptr(cox_version()).to_str().unwrap().starts_with(char::is_numeric));
    }
}

#[test]
fn inverse_problem_and_gbd_roundtrip() {
    unsafe {
        let mut tri = ptr::null_mut();
        let mut rel = ptr::null_mut();
        assert_eq!(cox_pair_tridiagonal(3, &mut tri), CoxStatus::Ok);
        assert_eq!(cox_pair_relativistic(3, &mut rel), CoxStatus::Ok);
        let p = params(r#"{"d": ["2", "-1/3", "5"], "c": ["1", "3/2"]}"#);

        let mut m = ptr::null_mut();
        assert_eq!(cox_moments_of(tri, p, &mut m), CoxStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(cox_restore_params(tri, m, &mut back), CoxStatus::Ok);
        let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
        cox_params_to_json(p, &mut a);
        cox_params_to_json(back, &mut b);
        assert_eq!(take(a), take(b));

        let mut s = ptr::null_mut();
        assert_eq!(cox_build_x(tri, p, &mut s), CoxStatus::Ok);
        let x = CString::new(take(s)).unwrap();
        let mut fromx = ptr::null_mut();
        assert_eq!(cox_params_from_x(tri, x.as_ptr(), &mut fromx), CoxStatus::Ok);

        let mut routes = Vec::new();
        for route in [CoxGbdRoute::Cluster, CoxGbdRoute::Table, CoxGbdRoute::Minors] {
            let mut q = ptr::null_mut();
            assert_eq!(cox_gbd(tri, rel, p, route, &mut q), CoxStatus::Ok, "{}", last_error());
            let mut j = ptr::null_mut();
            cox_params_to_json(q, &mut j);
            routes.push(take(j));
            let mut mq = ptr::null_mut();
            assert_eq!(cox_moments_of(rel, q, &mut mq), CoxStatus::Ok);
            let (mut s1, mut s2) = (ptr::null_mut(), ptr::null_mut());
            cox_moments_to_json(m, &mut s1);
            cox_moments_to_json(mq, &mut s2);
            assert_eq!(take(s1), take(s2));
            cox_moments_free(mq);
            cox_params_free(q);
        }
        assert!(routes.windows(2).all(|w| w[0] == w[1]));

        for h in [p, back, fromx] {
            cox_params_free(h);
        }
        cox_moments_free(m);
        cox_pair_free(tri);
        cox_pair_free(rel);
    }
}

#[test]
fn seeds_mutate_and_transport() {
    unsafe {
        let mut pair = ptr::null_mut();
        cox_pair_tridiagonal(3, &mut pair);
        let p = params(r#"{"d": ["1", "2", "3"], "c": ["1/2", "2"]}"#);
        let mut m = ptr::null_mut();
        cox_moments_of(pair, p, &mut m);
        let eps = [2u8, 0, 0];
        let mut seed = ptr::null_mut();
        assert_eq!(cox_seed_init(eps.as_ptr(), 3, m, &mut seed), CoxStatus::Ok, "{}", last_error());

        let mut once = ptr::null_mut();
        let mut twice = ptr::null_mut();
        assert_eq!(cox_seed_mutate(seed, 1, &mut once), CoxStatus::Ok);
        assert_eq!(cox_seed_mutate(once, 1, &mut twice), CoxStatus::Ok);
        let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
        cox_seed_to_json(seed, &mut a);
        cox_seed_to_json(twice, &mut b);
        let a = take(a);
        let (va, vb): (serde_json::Value, serde_json::Value) =
            (serde_json::from_str(&a).unwrap(), serde_json::from_str(&take(b)).unwrap());
        assert_eq!((&va["x"], &va["B"]), (&vb["x"], &vb["B"]));
        let mut junk = ptr::null_mut();
        assert_eq!(cox_seed_mutate(seed, 0, &mut junk), CoxStatus::ArgumentError);
        assert_eq!(cox_seed_mutate(seed, 99, &mut junk), CoxStatus::ArgumentError);

        let json = CString::new(a).unwrap();
        let mut parsed = ptr::null_mut();
        assert_eq!(cox_seed_from_json(json.as_ptr(), &mut parsed), CoxStatus::Ok);

        let target = [2u8, 1, 0];
        let mut moved = ptr::null_mut();
        assert_eq!(cox_seed_transport(seed, target.as_ptr(), 3, &mut moved), CoxStatus::Ok, "{}", last_error());
        let mut direct = ptr::null_mut();
        assert_eq!(cox_seed_init(target.as_ptr(), 3, m, &mut direct), CoxStatus::Ok);
        let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
        cox_seed_to_json(moved, &mut a);
        cox_seed_to_json(direct, &mut b);
        assert_eq!(take(a), take(b));

        for s in [seed, once, twice, parsed, moved, direct] {
            cox_seed_free(s);
        }
        cox_moments_free(m);
        cox_params_free(p);
        cox_pair_free(pair);
    }
}

#[test]
fn flows_agree_and_conserve() {
    unsafe {
        let mut pair = ptr::null_mut();
        cox_pair_relativistic(3, &mut pair);
        let (c, d) = ([0.4, 0.7], [1.1, 0.6, 1.3]);
        let (mut c1, mut d1) = ([0.0; 2], [0.0; 3]);
        let (mut c2, mut d2) = ([0.0; 2], [0.0; 3]);
        let st = cox_flow_rk4(pair, c.as_ptr(), d.as_ptr(), 1, 1.0, 1e-3, c1.as_mut_ptr(), d1.as_mut_ptr());
        assert_eq!(st, CoxStatus::Ok, "{}", last_error());
        let st = cox_flow_moment(pair, c.as_ptr(), d.as_ptr(), 1, 1.0, c2.as_mut_ptr(), d2.as_mut_ptr());
        assert_eq!(st, CoxStatus::Ok, "{}", last_error());
        for (x, y) in c1.iter().chain(&d1).zip(c2.iter().chain(&d2)) {
            assert!((x - y).abs() < 1e-6, "{x} vs {y}");
        }
        for k in 1..=3 {
            let (mut h0, mut h1) = (0.0, 0.0);
            assert_eq!(cox_hamiltonian(pair, c.as_ptr(), d.as_ptr(), k, &mut h0), CoxStatus::Ok);
            cox_hamiltonian(pair, c1.as_ptr(), d1.as_ptr(), k, &mut h1);
            assert!((h0 - h1).abs() < 1e-8 * h0.abs().max(1.0));
        }
        cox_pair_free(pair);
    }
}

#[test]
fn verify_reports_json() {
    unsafe {
        let suite = CString::new("integer-matrices").unwrap();
        let mut report = ptr::null_mut();
        let mut passed = 0;
        assert_eq!(cox_verify(suite.as_ptr(), 3, 0, 7, &mut report, &mut passed), CoxStatus::Ok);
        assert_eq!(passed, 1);
        let v: serde_json::Value = serde_json::from_str(&take(report)).unwrap();
        assert_eq!(v["suite"], "integer-matrices");
        assert_eq!(v["failures"], 0);
        let bogus = CString::new("nope").unwrap();
        assert_eq!(cox_verify(bogus.as_ptr(), 0, 0, 0, &mut report, &mut passed), CoxStatus::ArgumentError);
    }
}

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/coxtoda.h")).unwrap();
    for sym in ["cox_pair_new", "cox_gbd", "cox_verify", "cox_last_error", "typedef struct CoxPair CoxPair", "COX_STATUS_NON_GENERIC"] {
        assert!(h.contains(sym), "{sym} missing from header");
    }
}
