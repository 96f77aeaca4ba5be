use std::ffi::{c_char, CStr, CString};
use std::ptr;

use branchdiam_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 256];
    let n = unsafe { bd_last_error(buf.as_mut_ptr(), buf.len()) };
    assert!(n > 0);
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

fn group(spec: &str) -> *mut BdGroup {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { bd_group_new(c(spec).as_ptr(), &mut g) }, BdStatus::Ok);
    assert!(!g.is_null());
    g
}

#[test]
fn word_problem_through_handles() {
    let g = group("grigorchuk");
    let mut out = false;
    for (w, want) in [("bcd", true), ("adadadad", true), ("ab", false), ("[a,b]^4", false)] {
        let st = unsafe { bd_word_is_identity(g, c(w).as_ptr(), &mut out) };
        assert_eq!(st, BdStatus::Ok, "{w}: {}", last_error());
        assert_eq!(out, want, "{w}");
    }
    let st = unsafe { bd_word_is_identity(g, c("ax").as_ptr(), &mut out) };
    assert_eq!(st, BdStatus::InvalidWord);
    assert!(last_error().contains("invalid word"));
    unsafe { bd_group_free(g) };
}

#[test]
fn level_quotients() {
    let g = group("grigorchuk");
    let mut q = ptr::null_mut();
    assert_eq!(unsafe { bd_quotient_level(g, 3, 1 << 20, &mut q) }, BdStatus::Ok);
    let (mut order, mut diam) = (0u64, 0u64);
    assert_eq!(unsafe { bd_quotient_order(q, &mut order) }, BdStatus::Ok);
    assert_eq!(unsafe { bd_quotient_diameter(q, &mut diam) }, BdStatus::Ok);
    assert_eq!((order, diam), (128, 8));
    let mut img = 7u32;
    assert_eq!(unsafe { bd_quotient_image(q, c("bcd").as_ptr(), &mut img) }, BdStatus::Ok);
    assert_eq!(img, 0);
    unsafe { bd_quotient_free(q) };

    let mut q = ptr::null_mut();
    assert_eq!(unsafe { bd_quotient_level(g, 4, 100, &mut q) }, BdStatus::PartialEnumeration);
    assert!(q.is_null());
    unsafe { bd_group_free(g) };

    let g = group("gupta-sidki:p=3");
    let mut q = ptr::null_mut();
    assert_eq!(unsafe { bd_quotient_level(g, 2, 1 << 20, &mut q) }, BdStatus::Ok);
    let mut order = 0u64;
    unsafe { bd_quotient_order(q, &mut order) };
    assert_eq!(order, 27);
    unsafe {
        bd_quotient_free(q);
        bd_group_free(g);
    }
}

#[test]
fn bad_arguments_are_codes() {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { bd_group_new(c("gupta-sidki:p=4").as_ptr(), &mut g) }, BdStatus::InvalidGroup);
    assert!(g.is_null());
    assert_eq!(unsafe { bd_group_new(ptr::null(), &mut g) }, BdStatus::NullPointer);
    let mut order = 0u64;
    assert_eq!(unsafe { bd_quotient_order(ptr::null(), &mut order) }, BdStatus::NullPointer);
    unsafe {
        bd_group_free(ptr::null_mut());
        bd_quotient_free(ptr::null_mut());
        bd_string_free(ptr::null_mut());
    }
}

#[test]
fn cp_into_buffer() {
    let mut buf = vec![0 as c_char; 32];
    assert_eq!(unsafe { bd_cp(3, buf.as_mut_ptr(), buf.len()) }, BdStatus::Ok);
    assert_eq!(unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap(), "111");
    assert_eq!(unsafe { bd_cp(5, buf.as_mut_ptr(), 3) }, BdStatus::BufferTooSmall);
    assert_eq!(unsafe { bd_cp(4, buf.as_mut_ptr(), buf.len()) }, BdStatus::InvalidGroup);
}

#[test]
fn verify_returns_json() {
    let g = group("gupta-sidki:p=3");
    let mut out = ptr::null_mut();
    let mut failed = true;
    let st = unsafe { bd_verify(g, c("relations").as_ptr(), 1, &mut out, &mut failed) };
    assert_eq!(st, BdStatus::Ok);
    let json = unsafe { CStr::from_ptr(out) }.to_str().unwrap().to_owned();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["claims"].as_array().unwrap().len(), 2);
    assert!(!failed);
    unsafe { bd_string_free(out) };
    let st = unsafe { bd_verify(g, c("nope").as_ptr(), 1, &mut out, &mut failed) };
    assert_eq!(st, BdStatus::InvalidRequest);
    unsafe { bd_group_free(g) };
}

#[test]
fn header_lists_every_export() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/branchdiam.h")).unwrap();
    for name in [
        "bd_last_error",
        "bd_version",
        "bd_group_new",
        "bd_group_free",
        "bd_word_is_identity",
        "bd_quotient_level",
        "bd_quotient_free",
        "bd_quotient_order",
        "bd_quotient_diameter",
        "bd_quotient_image",
        "bd_verify",
        "bd_cp",
        "bd_string_free",
        "BD_STATUS_UNDECIDED",
        "typedef struct BdGroup BdGroup",
    ] {
        assert!(h.contains(name), "{name} missing from header");
    }
    let v = unsafe { CStr::from_ptr(bd_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_compiles_as_c() {
    let h = concat!(env!("CARGO_MANIFEST_DIR"), "/include/branchdiam.h");
    let Ok(out) = std::process::Command::new("cc").args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c", h]).output() else {
        eprintln!("no C compiler; skipped");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
