use std::ffi::{c_char, CStr, CString};
use std::ptr;

use fedosov_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(p: *mut c_char) -> String {
    let s = CStr::from_ptr(p).to_str().unwrap().to_string();
    fedosov_string_free(p);
    s
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(fedosov_last_error()).to_str().unwrap().to_string() }
}

unsafe fn open(text: &str, order: i32) -> *mut FedosovSession {
    let mut s = ptr::null_mut();
    assert_eq!(fedosov_session_new(c(text).as_ptr(), order, &mut s), FedosovStatus::Ok, "{}", last_error());
    s
}

#[test]
fn flat_star_round_trip() {
    unsafe {
        let s = open("[geometry]\nn = 1\n", 1);
        assert_eq!(fedosov_session_order(s), 1);
        let mut out = ptr::null_mut();
        let st = fedosov_star(s, c("x1").as_ptr(), c("x2").as_ptr(), &mut out);
        assert_eq!(st, FedosovStatus::Ok);
        assert_eq!(take(out), "lambda^0: x1*x2\nlambda^1: 1/2*i\n");
        assert_eq!(last_error(), "");

        let mut rep = ptr::null_mut();
        assert_eq!(fedosov_session_verify(s, &mut rep), FedosovStatus::Ok);
        assert!(take(rep).contains("PASS"));
        fedosov_session_free(s);
    }
}

#[test]
fn line_bundle_class_factor() {
    unsafe {
        let s = open("[geometry]\nn = 1\nconn[2] = [[\"i*x1\"]]\n[order]\nK = 2\n", -1);
        assert_eq!(fedosov_session_order(s), 2);
        let mut out = ptr::null_mut();
        assert_eq!(fedosov_class_factor(s, &mut out), FedosovStatus::Ok, "{}", last_error());
        assert_eq!(take(out), "-i");

        assert_eq!(fedosov_star_end(s, c("[[\"x1\"]]").as_ptr(), c("[[\"x2\"]]").as_ptr(), &mut out), FedosovStatus::Ok);
        assert!(take(out).starts_with("lambda^0"));
        assert_eq!(fedosov_act(s, c("[[1]]").as_ptr(), c("[\"x1\"]").as_ptr(), c("1").as_ptr(), &mut out), FedosovStatus::Ok);
        assert!(take(out).contains("x1"));
        assert_eq!(fedosov_taylor(s, c("x1").as_ptr(), &mut out), FedosovStatus::Ok);
        assert!(!take(out).is_empty());
        fedosov_session_free(s);
    }
}

#[test]
fn hermitian_metric() {
    unsafe {
        let s = open("[geometry]\nn = 1\nhermitian = true\nconn[2] = [[\"i*x1\"]]\n", 1);
        let mut out = ptr::null_mut();
        let st = fedosov_metric(s, c("[\"x1\"]").as_ptr(), c("[\"x2\"]").as_ptr(), &mut out);
        assert_eq!(st, FedosovStatus::Ok, "{}", last_error());
        assert!(take(out).starts_with("lambda^0: x1*x2"));
        fedosov_session_free(s);

        let s = open("[geometry]\nn = 1\n", 1);
        let st = fedosov_metric(s, c("[\"x1\"]").as_ptr(), c("[\"x2\"]").as_ptr(), &mut out);
        assert_eq!(st, FedosovStatus::InvalidInput);
        fedosov_session_free(s);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut s = ptr::null_mut();
        let st = fedosov_session_new(c("[geometry]\nn = 1\ngamma[1][1][1] = \"x1 +\"\n").as_ptr(), 1, &mut s);
        assert_eq!(st, FedosovStatus::InvalidInput);
        assert!(s.is_null());
        assert!(last_error().contains("line 3"), "{}", last_error());

        let text = "[geometry]\nn = 1\ngamma[1][1][2] = \"x1\"\ngamma[2][1][1] = \"x2\"\n";
        assert_eq!(fedosov_session_new(c(text).as_ptr(), 1, &mut s), FedosovStatus::CheckFailed);

        assert_eq!(fedosov_session_new(ptr::null(), 1, &mut s), FedosovStatus::NullPointer);
        assert_eq!(fedosov_session_new(c("[geometry]\n").as_ptr(), 1, ptr::null_mut()), FedosovStatus::NullPointer);
        let bad = [0xffu8, 0];
        assert_eq!(fedosov_session_new(bad.as_ptr().cast(), 1, &mut s), FedosovStatus::InvalidUtf8);

        let s = open("[geometry]\nn = 1\nrank = 2\n", 1);
        let mut out = ptr::null_mut();
        assert_eq!(fedosov_class_factor(s, &mut out), FedosovStatus::InvalidInput);
        assert_eq!(fedosov_star(s, c("lam^3").as_ptr(), c("1").as_ptr(), &mut out), FedosovStatus::InvalidInput);
        assert_eq!(fedosov_star(ptr::null(), c("1").as_ptr(), c("1").as_ptr(), &mut out), FedosovStatus::NullPointer);
        fedosov_session_free(s);
        fedosov_session_free(ptr::null_mut());
        fedosov_string_free(ptr::null_mut());
    }
}

#[test]
fn version_and_header() {
    let v = unsafe { CStr::from_ptr(fedosov_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/fedosov.h")).unwrap();
    for sym in [
        "fedosov_session_new",
        "fedosov_session_free",
        "fedosov_star",
        "fedosov_star_end",
        "fedosov_act",
        "fedosov_taylor",
        "fedosov_metric",
        "fedosov_class_factor",
        "fedosov_string_free",
        "fedosov_last_error",
        "FEDOSOV_STATUS_CHECK_FAILED = 1",
        "typedef struct FedosovSession FedosovSession;",
    ] {
        assert!(header.contains(sym), "header lacks {sym}");
    }
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/fedosov.h");
    match std::process::Command::new("cc").args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c", header]).output() {
        Ok(out) => assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr)),
        Err(_) => eprintln!("no C compiler, header syntax not checked"),
    }
}
