//! C ABI over the verification pipeline: verify a pair, stabilize an
//! artifact, export the rule catalog. Handles are opaque; every function
//! returns a status code and never unwinds across the boundary.

use canon::rules::{ProfileName, RuleProfile};
use canon::verify::{verify_pair, Verdict};
use libc::{c_char, size_t};
use std::ffi::CString;
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Status code returned by every fallible entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CanonStatus {
    CanonOk = 0,
    CanonInvalidArgument = 1,
    CanonParseError = 2,
    CanonWriteError = 3,
    CanonInternalError = 4,
}

/// Verification outcome of a pair.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CanonVerdictStatus {
    CanonReproducible = 0,
    CanonReproducibleAfterCanonicalization = 1,
    CanonUnreproducible = 2,
}

/// Built-in canonicalization profile.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CanonProfile {
    CanonProfileArchiveOnly = 0,
    CanonProfileDefault = 1,
    CanonProfileAggressive = 2,
}

/// Opaque verdict handle; free with [`canon_verdict_free`].
pub struct CanonVerdict {
    inner: Verdict,
}

fn profile_for(profile: CanonProfile, timestamp: i64) -> Result<RuleProfile, CanonStatus> {
    let name = match profile {
        CanonProfile::CanonProfileArchiveOnly => ProfileName::ArchiveOnly,
        CanonProfile::CanonProfileDefault => ProfileName::Default,
        CanonProfile::CanonProfileAggressive => ProfileName::Aggressive,
    };
    let profile = RuleProfile::named(name);
    if timestamp == 0 {
        return Ok(profile);
    }
    profile.with_timestamp(timestamp).map_err(|_| CanonStatus::CanonInvalidArgument)
}

unsafe fn slice_arg<'a>(ptr: *const u8, len: size_t) -> Result<&'a [u8], CanonStatus> {
    if ptr.is_null() && len != 0 {
        return Err(CanonStatus::CanonInvalidArgument);
    }
    if len == 0 {
        return Ok(&[]);
    }
    Ok(unsafe { std::slice::from_raw_parts(ptr, len) })
}

fn into_c_string(text: String) -> *mut c_char {
    // Interior NULs cannot appear in our JSON output, but never panic on
    // the boundary regardless.
    match CString::new(text) {
        Ok(s) => s.into_raw(),
        Err(_) => std::ptr::null_mut(),
    }
}

/// Verify a reference/rebuild pair under a built-in profile.
///
/// `timestamp` pins the canonical mtime (seconds since the epoch, at least
/// 315532800); pass 0 for the default 1980-01-01. On success `*out_verdict`
/// owns a verdict handle.
///
/// # Safety
/// `reference`/`rebuild` must point to `reference_len`/`rebuild_len`
/// readable bytes, and `out_verdict` must be a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn canon_verify(
    reference: *const u8,
    reference_len: size_t,
    rebuild: *const u8,
    rebuild_len: size_t,
    profile: CanonProfile,
    timestamp: i64,
    out_verdict: *mut *mut CanonVerdict,
) -> CanonStatus {
    if out_verdict.is_null() {
        return CanonStatus::CanonInvalidArgument;
    }
    let result = catch_unwind(AssertUnwindSafe(|| -> Result<Verdict, CanonStatus> {
        let reference = unsafe { slice_arg(reference, reference_len) }?;
        let rebuild = unsafe { slice_arg(rebuild, rebuild_len) }?;
        let profile = profile_for(profile, timestamp)?;
        Ok(verify_pair(reference, rebuild, &profile))
    }));
    match result {
        Ok(Ok(verdict)) => {
            unsafe { *out_verdict = Box::into_raw(Box::new(CanonVerdict { inner: verdict })) };
            CanonStatus::CanonOk
        }
        Ok(Err(status)) => status,
        Err(_) => CanonStatus::CanonInternalError,
    }
}

/// Status of a verdict handle.
///
/// # Safety
/// `verdict` must be a live handle from [`canon_verify`].
#[no_mangle]
pub unsafe extern "C" fn canon_verdict_status(verdict: *const CanonVerdict) -> CanonVerdictStatus {
    if verdict.is_null() {
        return CanonVerdictStatus::CanonUnreproducible;
    }
    match unsafe { &(*verdict).inner }.status {
        canon::VerdictStatus::Reproducible => CanonVerdictStatus::CanonReproducible,
        canon::VerdictStatus::ReproducibleAfterCanonicalization => {
            CanonVerdictStatus::CanonReproducibleAfterCanonicalization
        }
        canon::VerdictStatus::Unreproducible => CanonVerdictStatus::CanonUnreproducible,
    }
}

/// Render the verdict (raw and canonical reports, applied rules, notes) as
/// JSON. Free the string with [`canon_string_free`].
///
/// # Safety
/// `verdict` must be a live handle from [`canon_verify`].
#[no_mangle]
pub unsafe extern "C" fn canon_verdict_to_json(verdict: *const CanonVerdict) -> *mut c_char {
    if verdict.is_null() {
        return std::ptr::null_mut();
    }
    let result = catch_unwind(AssertUnwindSafe(|| {
        let verdict = unsafe { &(*verdict).inner };
        serde_json::to_string(&verdict.to_json()).unwrap_or_default()
    }));
    match result {
        Ok(json) => into_c_string(json),
        Err(_) => std::ptr::null_mut(),
    }
}

/// Release a verdict handle.
///
/// # Safety
/// `verdict` must have come from [`canon_verify`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn canon_verdict_free(verdict: *mut CanonVerdict) {
    if !verdict.is_null() {
        drop(unsafe { Box::from_raw(verdict) });
    }
}

/// Canonicalize one artifact. On success `*out`/`*out_len` hold a buffer
/// owned by the caller; release it with [`canon_bytes_free`].
///
/// # Safety
/// `input` must point to `input_len` readable bytes; `out` and `out_len`
/// must be valid writable pointers.
#[no_mangle]
pub unsafe extern "C" fn canon_stabilize(
    input: *const u8,
    input_len: size_t,
    profile: CanonProfile,
    timestamp: i64,
    out: *mut *mut u8,
    out_len: *mut size_t,
) -> CanonStatus {
    if out.is_null() || out_len.is_null() {
        return CanonStatus::CanonInvalidArgument;
    }
    let result = catch_unwind(AssertUnwindSafe(|| -> Result<Vec<u8>, CanonStatus> {
        let input = unsafe { slice_arg(input, input_len) }?;
        let profile = profile_for(profile, timestamp)?;
        let parsed = canon::parse_archive(input).map_err(|_| CanonStatus::CanonParseError)?;
        let stabilized = canon::stabilize::stabilize_archive(&parsed.archive, &profile);
        canon::write_archive(&stabilized.archive).map_err(|_| CanonStatus::CanonWriteError)
    }));
    match result {
        Ok(Ok(bytes)) => {
            let boxed = bytes.into_boxed_slice();
            let len = boxed.len();
            unsafe {
                *out = Box::into_raw(boxed) as *mut u8;
                *out_len = len;
            }
            CanonStatus::CanonOk
        }
        Ok(Err(status)) => status,
        Err(_) => CanonStatus::CanonInternalError,
    }
}

/// Release a buffer from [`canon_stabilize`].
///
/// # Safety
/// `bytes`/`len` must describe exactly one buffer previously returned by
/// this library.
#[no_mangle]
pub unsafe extern "C" fn canon_bytes_free(bytes: *mut u8, len: size_t) {
    if !bytes.is_null() {
        drop(unsafe { Box::from_raw(std::ptr::slice_from_raw_parts_mut(bytes, len)) });
    }
}

/// The rule catalog as JSON. Free with [`canon_string_free`].
#[no_mangle]
pub extern "C" fn canon_rules_json() -> *mut c_char {
    let result = catch_unwind(|| serde_json::to_string(&canon::list_rules()).unwrap_or_default());
    match result {
        Ok(json) => into_c_string(json),
        Err(_) => std::ptr::null_mut(),
    }
}

/// Release a string returned by this library.
///
/// # Safety
/// `text` must have come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn canon_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(unsafe { CString::from_raw(text) });
    }
}
