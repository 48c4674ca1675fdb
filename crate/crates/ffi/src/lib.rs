//! C ABI over `grocery-memory`.
//!
//! Sessions are opaque handles. Every fallible call returns a [`GmStatus`];
//! strings handed back to the caller are owned by the caller and must be
//! released with [`gm_string_free`]. The message of the last failure on the
//! calling thread is available from [`gm_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use grocery_memory::api::{ApiError, ErrorKind, Session, Verb};
use grocery_memory::{run_script, save_state, scenarios, Error, ScenarioScript};

/// Result codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Malformed command, payload or JSON.
    BadRequest = 3,
    /// Unknown context or instance.
    NotFound = 4,
    /// Request valid but not applicable to the current state.
    Conflict = 5,
    /// Scenario failed validation.
    Scenario = 6,
    Io = 7,
    Internal = 8,
    Panic = 9,
}

/// Opaque handle to one live simulation session.
pub struct GmSession {
    inner: Session,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Failure {
    status: GmStatus,
    message: String,
    /// Error body to return through an out-string, when the call has one.
    body: Option<String>,
}

impl Failure {
    fn new(status: GmStatus, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
            body: None,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::InvalidScenario(_) | Error::InvalidVocabulary(_) | Error::Parse { .. } => GmStatus::Scenario,
            Error::Io { .. } => GmStatus::Io,
            Error::UnknownContext(_) | Error::UnknownInstance(_) => GmStatus::NotFound,
            _ => GmStatus::BadRequest,
        };
        Failure::new(status, e.to_string())
    }
}

impl From<ApiError> for Failure {
    fn from(e: ApiError) -> Self {
        let status = match e.kind {
            ErrorKind::BadRequest => GmStatus::BadRequest,
            ErrorKind::NotFound => GmStatus::NotFound,
            ErrorKind::Conflict => GmStatus::Conflict,
            ErrorKind::Internal => GmStatus::Internal,
        };
        Failure {
            status,
            message: e.message.clone(),
            body: Some(e.to_json().to_string()),
        }
    }
}

/// Runs `f`, converting failures and panics into a status code.
fn guarded<F>(out: *mut *mut c_char, f: F) -> GmStatus
where
    F: FnOnce() -> Result<Option<String>, Failure>,
{
    clear_last_error();
    let result = catch_unwind(AssertUnwindSafe(f))
        .unwrap_or_else(|_| Err(Failure::new(GmStatus::Panic, "panic in grocery-memory")));
    match result {
        Ok(text) => {
            if let Some(text) = text {
                write_out(out, text);
            }
            GmStatus::Ok
        }
        Err(failure) => {
            set_last_error(failure.message);
            if let Some(body) = failure.body {
                write_out(out, body);
            }
            failure.status
        }
    }
}

fn write_out(out: *mut *mut c_char, text: String) {
    if out.is_null() {
        return;
    }
    let c = CString::new(text.replace('\0', " ")).expect("interior nul removed");
    // SAFETY: caller passed a valid, writable out-pointer.
    unsafe { *out = c.into_raw() };
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::new(GmStatus::NullPointer, "null string argument"));
    }
    // SAFETY: caller guarantees a nul-terminated string that outlives this call.
    unsafe { CStr::from_ptr(p) }
        .to_str()
        .map_err(|_| Failure::new(GmStatus::InvalidUtf8, "argument is not valid UTF-8"))
}

fn new_session(script: &ScenarioScript, pretrain: bool, out: *mut *mut GmSession) -> Result<Option<String>, Failure> {
    let session = Session::from_script(script, pretrain)?;
    let handle = Box::into_raw(Box::new(GmSession { inner: session }));
    // SAFETY: out checked non-null by the caller of this helper.
    unsafe { *out = handle };
    Ok(None)
}

/// Creates a session from a scenario JSON document.
///
/// When `pretrain` is true every context is taught before the call returns.
///
/// # Safety
/// `scenario_json` must be a nul-terminated string; `out` must be a valid
/// pointer. On success `*out` holds a handle to release with [`gm_session_free`].
#[no_mangle]
pub unsafe extern "C" fn gm_session_new(
    scenario_json: *const c_char,
    pretrain: bool,
    out: *mut *mut GmSession,
) -> GmStatus {
    guarded(ptr::null_mut(), || {
        if out.is_null() {
            return Err(Failure::new(GmStatus::NullPointer, "null out pointer"));
        }
        let text = unsafe { read_str(scenario_json)? };
        let script = ScenarioScript::from_json(text)?;
        new_session(&script, pretrain, out)
    })
}

/// Creates a session from one of the bundled experiment scenarios.
///
/// # Safety
/// Same contract as [`gm_session_new`].
#[no_mangle]
pub unsafe extern "C" fn gm_session_new_bundled(
    name: *const c_char,
    pretrain: bool,
    out: *mut *mut GmSession,
) -> GmStatus {
    guarded(ptr::null_mut(), || {
        if out.is_null() {
            return Err(Failure::new(GmStatus::NullPointer, "null out pointer"));
        }
        let name = unsafe { read_str(name)? };
        let script = scenarios::load(name)?;
        new_session(&script, pretrain, out)
    })
}

/// # Safety
/// `session` must be null or a handle from `gm_session_new*` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gm_session_free(session: *mut GmSession) {
    if !session.is_null() {
        // SAFETY: handle was produced by Box::into_raw in new_session.
        drop(unsafe { Box::from_raw(session) });
    }
}

/// Executes one command (`teach`, `learn`, `visit`, `event`, `report`,
/// `grocery-diff`, `reset`, `state`). `payload_json` may be null for verbs
/// without a payload.
///
/// On success and on command errors `*out_json` receives a JSON document (the
/// response or an error object) to release with [`gm_string_free`].
///
/// # Safety
/// `session` must be a live handle; strings must be nul-terminated; `out_json`
/// must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn gm_session_command(
    session: *mut GmSession,
    verb: *const c_char,
    payload_json: *const c_char,
    out_json: *mut *mut c_char,
) -> GmStatus {
    guarded(out_json, || {
        if session.is_null() {
            return Err(Failure::new(GmStatus::NullPointer, "null session"));
        }
        // SAFETY: caller guarantees a live, exclusively used handle.
        let session = unsafe { &mut (*session).inner };
        let verb_str = unsafe { read_str(verb)? };
        let verb = Verb::parse(verb_str)
            .ok_or_else(|| Failure::from(ApiError::bad_request(format!("unknown verb `{verb_str}`"))))?;
        let payload = if payload_json.is_null() {
            serde_json::Value::Null
        } else {
            let text = unsafe { read_str(payload_json)? };
            serde_json::from_str(text)
                .map_err(|e| Failure::from(ApiError::bad_request(format!("invalid payload JSON: {e}"))))?
        };
        let value = session.execute(verb, &payload)?;
        Ok(Some(value.to_string()))
    })
}

/// Writes the session's memory snapshot to `path` atomically.
///
/// # Safety
/// `session` must be a live handle and `path` a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn gm_session_save_state(session: *const GmSession, path: *const c_char) -> GmStatus {
    guarded(ptr::null_mut(), || {
        if session.is_null() {
            return Err(Failure::new(GmStatus::NullPointer, "null session"));
        }
        let session = unsafe { &(*session).inner };
        let path = unsafe { read_str(path)? };
        save_state(&session.simulation().snapshot(), path)?;
        Ok(None)
    })
}

/// Runs a scenario end to end and returns the report JSON through `out_json`.
/// The scenario's own seed is used unless `use_seed` is true.
///
/// # Safety
/// `scenario_json` must be nul-terminated; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gm_run_scenario(
    scenario_json: *const c_char,
    seed: u64,
    use_seed: bool,
    out_json: *mut *mut c_char,
) -> GmStatus {
    guarded(out_json, || {
        if out_json.is_null() {
            return Err(Failure::new(GmStatus::NullPointer, "null out pointer"));
        }
        let text = unsafe { read_str(scenario_json)? };
        let script = ScenarioScript::from_json(text)?;
        let (outcome, _) = run_script(&script, use_seed.then_some(seed))?;
        let json = serde_json::to_string(&outcome).map_err(|e| Failure::new(GmStatus::Internal, e.to_string()))?;
        Ok(Some(json))
    })
}

/// Message describing the last failure on this thread, or null.
/// The pointer stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn gm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gm_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: s came from CString::into_raw in write_out.
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn gm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
