use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use calat_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take_string(p: *mut std::ffi::c_char) -> String {
    let s = CStr::from_ptr(p).to_str().unwrap().to_owned();
    calat_string_free(p);
    s
}

unsafe fn last_error() -> String {
    CStr::from_ptr(calat_last_error()).to_string_lossy().into_owned()
}

#[test]
fn example_handle_round_trip() {
    unsafe {
        let mut l = ptr::null_mut();
        assert_eq!(calat_example(cstr("example2").as_ptr(), &mut l), CalatStatus::Ok);
        let (mut a, mut b, mut c, mut d) = (0, 0, 0, 0);
        assert_eq!(calat_lattice_dims(l, &mut a, &mut b, &mut c, &mut d), CalatStatus::Ok);
        assert_eq!((a, b, c, d), (-1, 2, -1, 2));

        let mut xyz = [0.0; 3];
        assert_eq!(calat_lattice_point_f64(l, -1, 1, xyz.as_mut_ptr()), CalatStatus::Ok);
        assert_eq!(xyz, [1.0, 1.0, -5.0]);
        assert_eq!(calat_validate(l), CalatStatus::Ok);

        let mut json = ptr::null_mut();
        assert_eq!(calat_lattice_to_json(l, &mut json), CalatStatus::Ok);
        let text = take_string(json);
        let mut again = ptr::null_mut();
        let ctext = cstr(&text);
        assert_eq!(calat_lattice_from_json(ctext.as_ptr(), &mut again), CalatStatus::Ok);
        let mut json2 = ptr::null_mut();
        assert_eq!(calat_lattice_to_json(again, &mut json2), CalatStatus::Ok);
        assert_eq!(take_string(json2), text);

        let mut field = ptr::null_mut();
        assert_eq!(calat_extract(l, &mut field), CalatStatus::Ok);
        assert!(take_string(field).contains("\"alpha\": \"1/1\""));

        let mut obj = ptr::null_mut();
        assert_eq!(calat_export_obj(l, &mut obj), CalatStatus::Ok);
        let obj = take_string(obj);
        assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 16);
        assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 18);

        calat_lattice_free(l);
        calat_lattice_free(again);
    }
}

#[test]
fn error_codes_and_messages() {
    unsafe {
        let mut l = ptr::null_mut();
        assert_eq!(calat_example(cstr("example9").as_ptr(), &mut l), CalatStatus::InvalidArgument);
        assert!(l.is_null());
        assert!(last_error().contains("unknown example"));

        assert_eq!(calat_example(ptr::null(), &mut l), CalatStatus::NullPointer);
        assert_eq!(calat_lattice_from_json(cstr("{").as_ptr(), &mut l), CalatStatus::Parse);
        assert_eq!(
            calat_lattice_point_f64(ptr::null(), 0, 0, ptr::null_mut()),
            CalatStatus::NullPointer
        );

        let incompatible = cstr(r#"{"a":"3/4","b":"1/2","c":"1/2","alpha":"3/5","beta":0,"gamma":"1/2","delta":0}"#);
        assert_eq!(
            calat_synthesize(incompatible.as_ptr(), -1, 1, -1, 1, &mut l),
            CalatStatus::Validation
        );
        let singular = cstr(r#"{"a":"3/4","b":"1/2","c":"1/2","alpha":"1/2","beta":0,"gamma":"1/2","delta":0}"#);
        assert_eq!(calat_synthesize(singular.as_ptr(), 1, 0, 0, 1, &mut l), CalatStatus::InvalidArgument);

        calat_lattice_free(ptr::null_mut());
        calat_string_free(ptr::null_mut());
    }
}

#[test]
fn synthesize_from_json_set() {
    unsafe {
        let set = cstr(r#"{"a":-5,"b":-1,"c":-2,"alpha":-2,"beta":0,"gamma":-1,"delta":0}"#);
        let mut l = ptr::null_mut();
        assert_eq!(calat_synthesize(set.as_ptr(), -2, 2, -2, 2, &mut l), CalatStatus::Ok);
        let mut report = ptr::null_mut();
        assert_eq!(calat_analyze(l, &mut report), CalatStatus::Ok);
        assert!(take_string(report).contains("\"convex_everywhere\": true"));
        calat_lattice_free(l);
    }
}

#[test]
fn header_compiles_and_links_from_c() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|p| p.parent()).unwrap();
    let lib = profile_dir.join("libcalat_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let out = tempfile_path("calat_smoke");
    let status = Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let run = Command::new(&out).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let text = String::from_utf8(run.stdout).unwrap();
    assert_eq!(text, "-1 2 -1 2\n1 1 -5\nharmonic\n2 null\n");
    let _ = std::fs::remove_file(out);
}

fn tempfile_path(stem: &str) -> PathBuf {
    std::env::temp_dir().join(format!("{stem}_{}", std::process::id()))
}
