//! C ABI. Every constructor returns null on failure and every status-code
//! function returns nonzero; [`nlpl_last_error`] then describes the failure.
//! Objects returned here must be released with the matching `_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::ptr;

use crate::{BridgeBatch, BridgeError, PlanHandle, Session};

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl ToString) {
    let c = CString::new(message.to_string().replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

/// Message of the last failure on this thread, or null. Valid until the next
/// bridge call on the same thread.
#[no_mangle]
pub extern "C" fn nlpl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, BridgeError> {
    if p.is_null() {
        return Err(BridgeError::Malformed(format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| BridgeError::Malformed(format!("{name} is not UTF-8")))
}

unsafe fn opt_str_arg<'a>(p: *const c_char, name: &str) -> Result<Option<&'a str>, BridgeError> {
    if p.is_null() {
        Ok(None)
    } else {
        str_arg(p, name).map(Some)
    }
}

fn boxed<T>(r: Result<T, BridgeError>) -> *mut T {
    match r {
        Ok(v) => {
            clear_error();
            Box::into_raw(Box::new(v))
        }
        Err(e) => {
            set_error(e);
            ptr::null_mut()
        }
    }
}

fn status(r: Result<(), BridgeError>) -> i32 {
    match r {
        Ok(()) => {
            clear_error();
            0
        }
        Err(e) => {
            set_error(e);
            1
        }
    }
}

/// Opens a session on a vocabulary file. A null path gives a session without
/// a vocabulary, which can only score.
///
/// # Safety
/// `vocab_path` is null or a valid nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn nlpl_session_open(vocab_path: *const c_char) -> *mut Session {
    boxed(opt_str_arg(vocab_path, "vocab_path").and_then(|p| match p {
        Some(p) => Session::open(Path::new(p)),
        None => Ok(Session::empty()),
    }))
}

/// # Safety
/// `session` is null or came from [`nlpl_session_open`] and is not used again.
#[no_mangle]
pub unsafe extern "C" fn nlpl_session_free(session: *mut Session) {
    if !session.is_null() {
        drop(Box::from_raw(session));
    }
}

/// Encodes `text`; writes the ids to a new buffer at `*out_ids` and their
/// count to `*out_len`. Release the buffer with [`nlpl_ids_free`].
///
/// # Safety
/// `session` is a live session, `text` a valid nul-terminated string and the
/// out pointers are writable.
#[no_mangle]
pub unsafe extern "C" fn nlpl_encode(
    session: *const Session,
    text: *const c_char,
    out_ids: *mut *mut u32,
    out_len: *mut usize,
) -> i32 {
    status((|| {
        let session = session.as_ref().ok_or(BridgeError::NoVocab)?;
        let ids = session.encode(str_arg(text, "text")?)?.into_boxed_slice();
        *out_len = ids.len();
        *out_ids = Box::into_raw(ids) as *mut u32;
        Ok(())
    })())
}

/// # Safety
/// `ids` and `len` come from one [`nlpl_encode`] call.
#[no_mangle]
pub unsafe extern "C" fn nlpl_ids_free(ids: *mut u32, len: usize) {
    if !ids.is_null() {
        drop(Box::from_raw(ptr::slice_from_raw_parts_mut(ids, len)));
    }
}

/// Decodes `len` ids to a new string, or null on failure. Release it with
/// [`nlpl_string_free`].
///
/// # Safety
/// `session` is a live session and `ids` points to `len` readable ids.
#[no_mangle]
pub unsafe extern "C" fn nlpl_decode(session: *const Session, ids: *const u32, len: usize) -> *mut c_char {
    let r = (|| {
        let session = session.as_ref().ok_or(BridgeError::NoVocab)?;
        let ids = if len == 0 { &[][..] } else { std::slice::from_raw_parts(ids, len) };
        let text = session.decode(ids)?;
        CString::new(text).map_err(|_| BridgeError::Malformed("decoded text contains nul".into()))
    })();
    match r {
        Ok(c) => {
            clear_error();
            c.into_raw()
        }
        Err(e) => {
            set_error(e);
            ptr::null_mut()
        }
    }
}

/// # Safety
/// `s` is null or came from this library and is not used again.
#[no_mangle]
pub unsafe extern "C" fn nlpl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Opens the example stream for a pipeline config file. `plan_path` may be
/// null to compute the plan from the manifest; `expected_digest` may be null
/// to skip the plan check.
///
/// # Safety
/// `session` is a live session; the strings are null or nul-terminated.
#[no_mangle]
pub unsafe extern "C" fn nlpl_plan_open(
    session: *const Session,
    config_path: *const c_char,
    plan_path: *const c_char,
    expected_digest: *const c_char,
) -> *mut PlanHandle {
    boxed((|| {
        let session = session.as_ref().ok_or(BridgeError::NoVocab)?;
        let config = str_arg(config_path, "config_path")?;
        let plan = opt_str_arg(plan_path, "plan_path")?;
        let digest = opt_str_arg(expected_digest, "expected_digest")?;
        session.open_plan_files(Path::new(config), plan.map(Path::new), digest)
    })())
}

/// Hex SHA-256 of the open plan. Release with [`nlpl_string_free`].
///
/// # Safety
/// `handle` is a live plan handle.
#[no_mangle]
pub unsafe extern "C" fn nlpl_plan_digest(handle: *const PlanHandle) -> *mut c_char {
    match handle.as_ref() {
        Some(h) => CString::new(h.digest()).expect("hex").into_raw(),
        None => {
            set_error("null plan handle");
            ptr::null_mut()
        }
    }
}

/// # Safety
/// `handle` is null or came from [`nlpl_plan_open`] and is not used again.
#[no_mangle]
pub unsafe extern "C" fn nlpl_plan_free(handle: *mut PlanHandle) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Next batch of up to `batch_size` examples, or null when the stream is
/// exhausted or fails.
///
/// # Safety
/// `handle` is a live plan handle not used concurrently.
#[no_mangle]
pub unsafe extern "C" fn nlpl_next_batch(handle: *mut PlanHandle, batch_size: usize) -> *mut BridgeBatch {
    boxed(match handle.as_mut() {
        Some(h) => h.next_batch(batch_size),
        None => Err(BridgeError::Malformed("null plan handle".into())),
    })
}

/// Number of examples in `batch`.
///
/// # Safety
/// `batch` is a live batch.
#[no_mangle]
pub unsafe extern "C" fn nlpl_batch_len(batch: *const BridgeBatch) -> usize {
    batch.as_ref().map_or(0, BridgeBatch::len)
}

/// Flat id buffer; its length is written to `*out_len`. Borrowed from the
/// batch.
///
/// # Safety
/// `batch` is a live batch and `out_len` is writable.
#[no_mangle]
pub unsafe extern "C" fn nlpl_batch_ids(batch: *const BridgeBatch, out_len: *mut usize) -> *const u32 {
    let b = &*batch;
    *out_len = b.ids.len();
    b.ids.as_ptr()
}

/// Two lengths per example: input, then target.
///
/// # Safety
/// `batch` is a live batch and `out_len` is writable.
#[no_mangle]
pub unsafe extern "C" fn nlpl_batch_lengths(batch: *const BridgeBatch, out_len: *mut usize) -> *const u32 {
    let b = &*batch;
    *out_len = b.lengths.len();
    b.lengths.as_ptr()
}

/// One task tag per example: 0 span corruption, 1 translation.
///
/// # Safety
/// `batch` is a live batch; the result holds [`nlpl_batch_len`] tags.
#[no_mangle]
pub unsafe extern "C" fn nlpl_batch_tasks(batch: *const BridgeBatch) -> *const u8 {
    (*batch).tasks.as_ptr()
}

/// Stream index of each example.
///
/// # Safety
/// `batch` is a live batch; the result holds [`nlpl_batch_len`] indices.
#[no_mangle]
pub unsafe extern "C" fn nlpl_batch_indices(batch: *const BridgeBatch) -> *const u64 {
    (*batch).indices.as_ptr()
}

/// # Safety
/// `batch` is null or came from [`nlpl_next_batch`] and is not used again.
#[no_mangle]
pub unsafe extern "C" fn nlpl_batch_free(batch: *mut BridgeBatch) {
    if !batch.is_null() {
        drop(Box::from_raw(batch));
    }
}

/// Library version; equal to the core version. Static, do not free.
#[no_mangle]
pub extern "C" fn nlpl_version() -> *const c_char {
    static V: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    V.as_ptr() as *const c_char
}

/// Scores `hyp` against `reference` with the default metric settings and
/// returns the components as a JSON object, or null on failure. A component
/// that could not be computed is `null` and left out of the composite.
/// Release with [`nlpl_string_free`].
///
/// # Safety
/// `session` is a live session and the strings are nul-terminated.
#[no_mangle]
pub unsafe extern "C" fn nlpl_codebleu(session: *const Session, hyp: *const c_char, reference: *const c_char) -> *mut c_char {
    let r: Result<String, BridgeError> = (|| {
        let session = session.as_ref().ok_or(BridgeError::Malformed("null session".into()))?;
        let s = session.codebleu(str_arg(hyp, "hyp")?, str_arg(reference, "reference")?)?;
        Ok(crate::codebleu_json(&s))
    })();
    match r {
        Ok(json) => {
            clear_error();
            CString::new(json).expect("JSON has no nul").into_raw()
        }
        Err(e) => {
            set_error(e);
            ptr::null_mut()
        }
    }
}
