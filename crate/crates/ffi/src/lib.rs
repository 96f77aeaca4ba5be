//! C ABI over `branchdiam`.
//!
//! Objects cross the boundary as opaque handles owned by the caller and
//! released with the matching `*_free`. Every fallible call returns a
//! [`BdStatus`]; the message of the last error on the calling thread is
//! available from [`bd_last_error`]. Strings returned to C are
//! NUL-terminated and released with [`bd_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use branchdiam::quotient::{diameter, EnumerateOptions, FiniteGroup, FiniteQuotient, QuotientKind};
use branchdiam::report::{Recorder, Report, RunConfig};
use branchdiam::suite::{self, Suite, SuiteOptions};
use branchdiam::{Error, GeneratorWord, GroupSpec};

/// Result codes. Zero is success; each error variant of the library has its
/// own code.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidWord = 3,
    InvalidGroup = 4,
    Unsupported = 5,
    MemoryGuard = 6,
    Undecided = 7,
    PartialEnumeration = 8,
    NonGenerating = 9,
    Inconsistent = 10,
    Precondition = 11,
    Refused = 12,
    IterationCap = 13,
    InvalidRequest = 14,
    Io = 15,
    BufferTooSmall = 16,
    Panic = 17,
}

impl From<&Error> for BdStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidWord(_) => BdStatus::InvalidWord,
            Error::InvalidGroup(_) => BdStatus::InvalidGroup,
            Error::Unsupported(_) => BdStatus::Unsupported,
            Error::MemoryGuard { .. } => BdStatus::MemoryGuard,
            Error::Undecided { .. } | Error::UndecidedPair { .. } => BdStatus::Undecided,
            Error::PartialEnumeration { .. } => BdStatus::PartialEnumeration,
            Error::NonGenerating { .. } => BdStatus::NonGenerating,
            Error::Inconsistent(_) => BdStatus::Inconsistent,
            Error::Precondition(_) => BdStatus::Precondition,
            Error::Refused(_) => BdStatus::Refused,
            Error::IterationCap(_) => BdStatus::IterationCap,
            Error::InvalidRequest(_) => BdStatus::InvalidRequest,
            Error::Io(_) => BdStatus::Io,
        }
    }
}

/// Opaque group handle.
pub struct BdGroup {
    spec: GroupSpec,
}

/// Opaque handle to an enumerated finite quotient.
pub struct BdQuotient {
    q: FiniteQuotient,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(code: BdStatus, msg: impl Into<String>) -> BdStatus {
    set_error(msg.into());
    code
}

/// Runs `f`, turning library errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), BdStatus>) -> BdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BdStatus::Ok,
        Ok(Err(code)) => code,
        Err(_) => fail(BdStatus::Panic, "internal panic"),
    }
}

fn lib_err(e: Error) -> BdStatus {
    let code = BdStatus::from(&e);
    fail(code, e.to_string())
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, BdStatus> {
    if p.is_null() {
        return Err(fail(BdStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(BdStatus::InvalidUtf8, "argument is not UTF-8"))
}

unsafe fn out_arg<'a, T>(p: *mut T) -> Result<&'a mut T, BdStatus> {
    p.as_mut().ok_or_else(|| fail(BdStatus::NullPointer, "null output pointer"))
}

unsafe fn ref_arg<'a, T>(p: *const T) -> Result<&'a T, BdStatus> {
    p.as_ref().ok_or_else(|| fail(BdStatus::NullPointer, "null handle"))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

/// Copies the last error message of this thread into `buf` (at most `len`
/// bytes including the NUL). Returns the full message length, or 0 if
/// there is none.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn bd_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| match e.borrow().as_ref() {
        None => 0,
        Some(msg) => {
            let bytes = msg.as_bytes();
            if !buf.is_null() && len > 0 {
                let n = bytes.len().min(len - 1);
                ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
                *buf.add(n) = 0;
            }
            bytes.len()
        }
    })
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn bd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Parses a group spec such as `grigorchuk` or `gupta-sidki:p=3`.
///
/// # Safety
/// `spec` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bd_group_new(spec: *const c_char, out: *mut *mut BdGroup) -> BdStatus {
    guard(|| {
        let out = out_arg(out)?;
        *out = ptr::null_mut();
        let spec: GroupSpec = str_arg(spec)?.parse().map_err(lib_err)?;
        *out = Box::into_raw(Box::new(BdGroup { spec }));
        Ok(())
    })
}

/// # Safety
/// `g` must be null or a handle from [`bd_group_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bd_group_free(g: *mut BdGroup) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Decides whether `word` is trivial in the group.
///
/// # Safety
/// Pointers must be valid; `word` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn bd_word_is_identity(g: *const BdGroup, word: *const c_char, out: *mut bool) -> BdStatus {
    guard(|| {
        let g = ref_arg(g)?;
        let out = out_arg(out)?;
        let w = GeneratorWord::parse(g.spec, str_arg(word)?).map_err(lib_err)?;
        *out = branchdiam::is_identity(&w).map_err(lib_err)?;
        Ok(())
    })
}

/// Enumerates `G/Stab(level)` with the standard generators.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bd_quotient_level(
    g: *const BdGroup,
    level: u32,
    max_elements: usize,
    out: *mut *mut BdQuotient,
) -> BdStatus {
    guard(|| {
        let g = ref_arg(g)?;
        let out = out_arg(out)?;
        *out = ptr::null_mut();
        let opts = EnumerateOptions {
            max_elements,
            ..EnumerateOptions::default()
        };
        let q = FiniteQuotient::enumerate(g.spec, &[], QuotientKind::LevelStabilizer(level), &opts)
            .map_err(lib_err)?;
        *out = Box::into_raw(Box::new(BdQuotient { q }));
        Ok(())
    })
}

/// # Safety
/// `q` must be null or a live quotient handle.
#[no_mangle]
pub unsafe extern "C" fn bd_quotient_free(q: *mut BdQuotient) {
    if !q.is_null() {
        drop(Box::from_raw(q));
    }
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bd_quotient_order(q: *const BdQuotient, out: *mut u64) -> BdStatus {
    guard(|| {
        *out_arg(out)? = ref_arg(q)?.q.order() as u64;
        Ok(())
    })
}

/// Diameter for the generators the quotient was built with.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bd_quotient_diameter(q: *const BdQuotient, out: *mut u64) -> BdStatus {
    guard(|| {
        let q = &ref_arg(q)?.q;
        let out = out_arg(out)?;
        let r = diameter::diameter(q, q.generator_elements()).map_err(lib_err)?;
        *out = r.diameter as u64;
        Ok(())
    })
}

/// Image of `word` in the quotient, as an element number (0 is the
/// identity).
///
/// # Safety
/// Pointers must be valid; `word` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn bd_quotient_image(q: *const BdQuotient, word: *const c_char, out: *mut u32) -> BdStatus {
    guard(|| {
        let q = &ref_arg(q)?.q;
        let out = out_arg(out)?;
        let w = GeneratorWord::parse(q.group(), str_arg(word)?).map_err(lib_err)?;
        *out = q.image(&w).map_err(lib_err)?;
        Ok(())
    })
}

/// Runs a verification suite (`all`, `relations`, `orders`, ...) and
/// returns the JSON report through `out`. `failed` is set when any claim
/// failed; that is not an error.
///
/// # Safety
/// Pointers must be valid; `suite` NUL-terminated. Free `*out` with
/// [`bd_string_free`].
#[no_mangle]
pub unsafe extern "C" fn bd_verify(
    g: *const BdGroup,
    suite: *const c_char,
    seed: u64,
    out: *mut *mut c_char,
    failed: *mut bool,
) -> BdStatus {
    guard(|| {
        let g = ref_arg(g)?;
        let out = out_arg(out)?;
        *out = ptr::null_mut();
        let failed = out_arg(failed)?;
        let name = str_arg(suite)?;
        let which = Suite::parse(name).map_err(lib_err)?;
        let opts = SuiteOptions {
            seed,
            ..SuiteOptions::default()
        };
        let mut rec = Recorder::new(false);
        suite::run(g.spec, which, &opts, &mut rec).map_err(lib_err)?;
        let mut report = Report::new(RunConfig {
            command: "verify".into(),
            group: Some(g.spec.to_string()),
            level: None,
            depth: None,
            gens: vec![],
            max_elements: opts.enumerate.max_elements,
            max_leaves: opts.max_leaves,
            max_iterations: branchdiam::spectra::DEFAULT_ITERATION_CAP,
            seed,
            extra: vec![("suite".into(), name.into())],
        });
        report.claims = rec.claims;
        *failed = report.failed();
        *out = into_c_string(report.to_json());
        Ok(())
    })
}

/// Writes the decimal value of `C_p` into `buf`.
///
/// # Safety
/// `buf` must point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn bd_cp(p: u32, buf: *mut c_char, len: usize) -> BdStatus {
    guard(|| {
        if buf.is_null() {
            return Err(fail(BdStatus::NullPointer, "null buffer"));
        }
        let s = branchdiam::guptasidki::cp(p).map_err(lib_err)?.value.to_string();
        if s.len() + 1 > len {
            return Err(fail(BdStatus::BufferTooSmall, format!("need {} bytes", s.len() + 1)));
        }
        ptr::copy_nonoverlapping(s.as_ptr() as *const c_char, buf, s.len());
        *buf.add(s.len()) = 0;
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn bd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
