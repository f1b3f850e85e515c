use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use qdist::group::{Group, SpecParams};
use qdist_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(qd_last_error_message()) }.to_str().unwrap().to_owned()
}

fn new_group(json: &str) -> (QdStatus, *mut QdGroup) {
    let mut g = ptr::null_mut();
    let s = unsafe { qd_group_new(c(json).as_ptr(), &mut g) };
    (s, g)
}

#[test]
fn group_queries_match_library() {
    let (s, g) = new_group(r#"{"family":"sol-fin","n":5}"#);
    assert_eq!(s, QdStatus::Ok);
    let mut order = 0;
    assert_eq!(unsafe { qd_group_order(g, &mut order) }, QdStatus::Ok);
    assert_eq!(order, 250);
    let mut diam = 0;
    assert_eq!(unsafe { qd_group_diameter(g, &mut diam) }, QdStatus::Ok);
    let lib = Group::from_params(&serde_json::from_str::<SpecParams>(r#"{"family":"sol-fin","n":5}"#).unwrap()).unwrap();
    assert_eq!(diam, qdist::cayley::diameter(&lib, 1 << 20).unwrap().diameter);

    let (x, y) = ("v:(1,2)|t:3", "v:(4,0)|t:8");
    let mut prod = ptr::null_mut();
    assert_eq!(unsafe { qd_group_mul(g, c(x).as_ptr(), c(y).as_ptr(), &mut prod) }, QdStatus::Ok);
    let got = unsafe { CStr::from_ptr(prod) }.to_str().unwrap().to_owned();
    let want = lib.format(&lib.mul(&lib.parse(x).unwrap(), &lib.parse(y).unwrap()).unwrap());
    assert_eq!(got, want);
    unsafe {
        qd_string_free(prod);
        qd_group_free(g);
    }
}

#[test]
fn error_codes_and_messages() {
    let (s, g) = new_group(r#"{"family":"lamplighter-fin","m":2,"n":40}"#);
    assert_eq!(s, QdStatus::CapExceeded);
    assert!(g.is_null());
    assert!(last_error().contains("exceeds cap"), "{}", last_error());

    let (s, _) = new_group(r#"{"family":"lamplighter-fin","m":2,"n":4,"extra":1}"#);
    assert_eq!(s, QdStatus::Parse);

    let (s, _) = new_group(r#"{"family":"lamplighter-fin","n":4}"#);
    assert_eq!(s, QdStatus::BadParam);

    assert_eq!(unsafe { qd_group_new(ptr::null(), ptr::null_mut()) }, QdStatus::NullPointer);

    let (s, g) = new_group(r#"{"family":"sol-inf"}"#);
    assert_eq!(s, QdStatus::Ok);
    let mut order = 0;
    assert_eq!(unsafe { qd_group_order(g, &mut order) }, QdStatus::BadParam);
    let mut prod = ptr::null_mut();
    let st = unsafe { qd_group_mul(g, c("junk").as_ptr(), c("v:(0,0)|t:0").as_ptr(), &mut prod) };
    assert_ne!(st, QdStatus::Ok);
    assert!(prod.is_null());
    unsafe { qd_group_free(g) };

    // A success clears the message.
    let mut o = 0;
    assert_eq!(unsafe { qd_matrix_order(2, 1, 1, 1, 5, 1000, &mut o) }, QdStatus::Ok);
    assert_eq!(o, 10);
    assert!(last_error().is_empty());
}

#[test]
fn bundle_roundtrip_through_the_abi() {
    let (_, g) = new_group(r#"{"family":"lamplighter-fin","m":2,"n":4}"#);
    let mut b = ptr::null_mut();
    assert_eq!(unsafe { qd_bundle_new(g, 1.5, 0, &mut b) }, QdStatus::BadParam);
    assert_eq!(unsafe { qd_bundle_new(g, 2.0, 0, &mut b) }, QdStatus::Ok);

    let mut dist = 0.0;
    let mut bound = QdApriori::default();
    unsafe {
        assert_eq!(qd_bundle_distortion(b, 0, &mut dist), QdStatus::Ok);
        assert_eq!(qd_bundle_apriori(b, &mut bound), QdStatus::Ok);
    }
    assert!(dist >= 1.0 && dist <= bound.dist_bound + 1e-9);

    let mut norm = -1.0;
    assert_eq!(unsafe { qd_bundle_embed_norm(b, c("lamps:0000|pos:0").as_ptr(), &mut norm) }, QdStatus::Ok);
    assert_eq!(norm, 0.0);
    assert_eq!(unsafe { qd_bundle_embed_norm(b, c("lamps:0000|pos:1").as_ptr(), &mut norm) }, QdStatus::Ok);
    assert!(norm > 0.0);

    let mut json = ptr::null_mut();
    assert_eq!(unsafe { qd_bundle_manifest_json(b, 1, &mut json) }, QdStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(unsafe { CStr::from_ptr(json) }.to_str().unwrap()).unwrap();
    let reloaded = qdist::embed::EmbeddingBundle::from_json(&v).unwrap();
    let x = reloaded.group().parse("lamps:0000|pos:1").unwrap();
    assert_eq!(reloaded.embed_norm(&x).unwrap(), norm);
    unsafe {
        qd_string_free(json);
        qd_bundle_free(b);
        qd_group_free(g);
    }
}

#[test]
fn exact_c2_of_four_cycle() {
    let d = [0.0, 1.0, 2.0, 1.0, 1.0, 0.0, 1.0, 2.0, 2.0, 1.0, 0.0, 1.0, 1.0, 2.0, 1.0, 0.0];
    let mut c2 = 0.0;
    assert_eq!(unsafe { qd_exact_c2(d.as_ptr(), 4, 1e-4, &mut c2) }, QdStatus::Ok);
    assert!((c2 - 2f64.sqrt()).abs() < 1e-4);
    let asym = [0.0, 1.0, 2.0, 0.0];
    assert_eq!(unsafe { qd_exact_c2(asym.as_ptr(), 2, 1e-4, &mut c2) }, QdStatus::BadParam);
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/qdist.h")).unwrap();
    for name in [
        "qd_last_error_message",
        "qd_string_free",
        "qd_group_new",
        "qd_group_free",
        "qd_group_order",
        "qd_group_diameter",
        "qd_group_mul",
        "qd_bundle_new",
        "qd_bundle_free",
        "qd_bundle_embed_norm",
        "qd_bundle_distortion",
        "qd_bundle_apriori",
        "qd_bundle_manifest_json",
        "qd_exact_c2",
        "qd_matrix_order",
        "typedef struct QdGroup QdGroup",
        "QD_STATUS_CAP_EXCEEDED = 4",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

/// Compiles the C example against the generated header and the static
/// library built alongside this test.
#[test]
fn c_program_links_and_runs() {
    let deps = std::env::current_exe().unwrap().parent().unwrap().to_path_buf();
    let profile_dir = deps.parent().unwrap();
    let lib = profile_dir.join("libqdist_ffi.a");
    assert!(lib.exists(), "static library not found at {}", lib.display());
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = tempfile_path("qdist_smoke");
    let status = Command::new("cc")
        .arg(manifest.join("examples/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .status()
        .expect("a C compiler is available");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{text}{}", String::from_utf8_lossy(&out.stderr));
    assert!(text.contains("order=64"), "{text}");
    assert!(text.contains("cap_ok=1"), "{text}");
    let _ = std::fs::remove_file(exe);
}

fn tempfile_path(stem: &str) -> PathBuf {
    std::env::temp_dir().join(format!("{stem}_{}", std::process::id()))
}
