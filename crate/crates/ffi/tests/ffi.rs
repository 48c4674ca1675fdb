use std::ffi::{c_char, CStr, CString};
use std::ptr;

use grocery_memory_ffi::*;
use serde_json::Value;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn take(s: *mut c_char) -> Value {
    assert!(!s.is_null());
    let text = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { gm_string_free(s) };
    serde_json::from_str(&text).unwrap()
}

fn last_error() -> String {
    let p = gm_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn command(session: *mut GmSession, verb: &str, payload: Option<&str>) -> (GmStatus, Value) {
    let verb = c(verb);
    let payload = payload.map(c);
    let mut out = ptr::null_mut();
    let status = unsafe {
        gm_session_command(
            session,
            verb.as_ptr(),
            payload.as_ref().map_or(ptr::null(), |p| p.as_ptr()),
            &mut out,
        )
    };
    let value = if out.is_null() { Value::Null } else { take(out) };
    (status, value)
}

#[test]
fn session_lifecycle() {
    let mut session = ptr::null_mut();
    let status = unsafe { gm_session_new_bundled(c("experiment3").as_ptr(), true, &mut session) };
    assert_eq!(status, GmStatus::Ok);
    assert!(!session.is_null());

    let (status, v) = command(session, "visit", Some(r#"{"context": "kitchen", "day": 0}"#));
    assert_eq!(status, GmStatus::Ok);
    assert_eq!(v["context"], "kitchen");

    let (status, report) = command(session, "report", None);
    assert_eq!(status, GmStatus::Ok);
    assert_eq!(report["windowEndDay"], 2);

    let (status, state) = command(session, "state", None);
    assert_eq!(status, GmStatus::Ok);
    assert_eq!(state["windowStartDay"], 2);

    let dir = std::env::temp_dir().join(format!("gm-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("state.json");
    let cpath = c(path.to_str().unwrap());
    assert_eq!(unsafe { gm_session_save_state(session, cpath.as_ptr()) }, GmStatus::Ok);
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(saved["formatVersion"], 1);
    std::fs::remove_dir_all(&dir).unwrap();

    unsafe { gm_session_free(session) };
}

#[test]
fn command_errors_carry_codes_and_bodies() {
    let mut session = ptr::null_mut();
    assert_eq!(
        unsafe { gm_session_new_bundled(c("experiment1").as_ptr(), true, &mut session) },
        GmStatus::Ok
    );

    let (status, body) = command(session, "visit", Some(r#"{"context": "garage"}"#));
    assert_eq!(status, GmStatus::NotFound);
    assert_eq!(body["status"], 404);
    assert!(last_error().contains("garage"));

    let (status, _) = command(session, "fly", None);
    assert_eq!(status, GmStatus::BadRequest);
    assert!(last_error().contains("fly"));

    let (status, _) = command(session, "visit", Some("{oops"));
    assert_eq!(status, GmStatus::BadRequest);

    let (status, _) = command(
        session,
        "event",
        Some(r#"{"action": "replace", "instanceId": "milk#1", "targetContext": "kitchen"}"#),
    );
    assert_eq!(status, GmStatus::Conflict);

    let (status, _) = command(ptr::null_mut(), "state", None);
    assert_eq!(status, GmStatus::NullPointer);

    unsafe { gm_session_free(session) };
}

#[test]
fn constructor_failures() {
    let mut session = ptr::null_mut();
    assert_eq!(
        unsafe { gm_session_new_bundled(c("nope").as_ptr(), false, &mut session) },
        GmStatus::Scenario
    );
    assert!(session.is_null());
    assert_eq!(
        unsafe { gm_session_new(c("{}").as_ptr(), false, &mut session) },
        GmStatus::Scenario
    );
    assert_eq!(
        unsafe { gm_session_new(ptr::null(), false, &mut session) },
        GmStatus::NullPointer
    );
    assert_eq!(
        unsafe { gm_session_new(c("{}").as_ptr(), false, ptr::null_mut()) },
        GmStatus::NullPointer
    );
    let bad_utf8 = [0xffu8, 0xfe, 0];
    assert_eq!(
        unsafe { gm_session_new(bad_utf8.as_ptr().cast(), false, &mut session) },
        GmStatus::InvalidUtf8
    );
    unsafe { gm_session_free(ptr::null_mut()) };
    unsafe { gm_string_free(ptr::null_mut()) };
}

#[test]
fn run_scenario_is_deterministic() {
    let script = c(grocery_memory::scenarios::source("experiment2").unwrap());
    let run = |seed| {
        let mut out = ptr::null_mut();
        assert_eq!(
            unsafe { gm_run_scenario(script.as_ptr(), seed, true, &mut out) },
            GmStatus::Ok
        );
        take(out)
    };
    let a = run(3);
    assert_eq!(a["seed"], 3);
    assert_eq!(a, run(3));

    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { gm_run_scenario(script.as_ptr(), 0, false, &mut out) },
        GmStatus::Ok
    );
    assert_eq!(take(out)["seed"], 2023);
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(gm_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/grocery_memory.h")).unwrap();
    for symbol in [
        "gm_session_new",
        "gm_session_new_bundled",
        "gm_session_free",
        "gm_session_command",
        "gm_session_save_state",
        "gm_run_scenario",
        "gm_last_error",
        "gm_string_free",
        "gm_version",
        "typedef struct GmSession GmSession",
        "GM_STATUS_OK = 0",
        "GM_STATUS_PANIC = 9",
    ] {
        assert!(header.contains(symbol), "missing {symbol}");
    }
}
