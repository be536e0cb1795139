//! C interface to the `fedosov` crate.
//!
//! A [`FedosovSession`] owns a solved geometry. Results come back as
//! NUL-terminated strings in the canonical text format; free them with
//! [`fedosov_string_free`]. On a non-`Ok` status the message is available
//! from [`fedosov_last_error`] until the next call on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fedosov::charclass::class_relation;
use fedosov::cli::scenario::{parse_scenario, Arg};
use fedosov::fedosov::FedosovSolution;
use fedosov::hermitian::deformed_h;
use fedosov::taylor_star::{act_left, act_right, star, star_prime, taylor};
use fedosov::weyl::serial::to_canonical_text;
use fedosov::Error;

/// Status codes. The first four agree with the exit codes of the
/// command-line tool.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FedosovStatus {
    Ok = 0,
    /// A checked identity or a geometric hypothesis failed.
    CheckFailed = 1,
    /// Malformed input or an unsupported request.
    InvalidInput = 2,
    /// Internal inconsistency; a bug.
    Internal = 3,
    NullPointer = 4,
    InvalidUtf8 = 5,
    Panic = 6,
}

/// Opaque handle: a geometry together with its solved abelian connections.
pub struct FedosovSession {
    sol: FedosovSolution,
    order: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> FedosovStatus {
    match fedosov::cli::exit_code(e) {
        1 => FedosovStatus::CheckFailed,
        2 => FedosovStatus::InvalidInput,
        _ => FedosovStatus::Internal,
    }
}

enum Failure {
    Status(FedosovStatus, String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> FedosovStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            FedosovStatus::Ok
        }
        Ok(Err(Failure::Status(s, msg))) => {
            set_error(&msg);
            s
        }
        Ok(Err(Failure::Core(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("panic inside the fedosov library");
            FedosovStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Status(FedosovStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Status(FedosovStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn handle<'a>(p: *const FedosovSession) -> Result<&'a FedosovSession, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure::Status(FedosovStatus::NullPointer, "session is null".into()))
}

unsafe fn emit(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Status(FedosovStatus::NullPointer, "output pointer is null".into()));
    }
    let c = CString::new(s).map_err(|_| Failure::Status(FedosovStatus::Internal, "interior NUL in output".into()))?;
    *out = c.into_raw();
    Ok(())
}

/// Parses a scenario and solves it to λ-order `order`, or to the order
/// in the scenario when `order` is negative.
///
/// # Safety
/// `scenario` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fedosov_session_new(
    scenario: *const c_char,
    order: i32,
    out: *mut *mut FedosovSession,
) -> FedosovStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Status(FedosovStatus::NullPointer, "output pointer is null".into()));
        }
        *out = ptr::null_mut();
        let sc = parse_scenario(text(scenario, "scenario")?)?;
        let order = usize::try_from(order).unwrap_or(sc.order);
        let sol = FedosovSolution::for_lambda_order(sc.geometry.build()?, order)?;
        *out = Box::into_raw(Box::new(FedosovSession { sol, order }));
        Ok(())
    })
}

/// # Safety
/// `session` must come from [`fedosov_session_new`] and not be used again.
#[no_mangle]
pub unsafe extern "C" fn fedosov_session_free(session: *mut FedosovSession) {
    if !session.is_null() {
        drop(Box::from_raw(session));
    }
}

/// λ-order of the session.
///
/// # Safety
/// `session` must be a live handle or null (which gives 0).
#[no_mangle]
pub unsafe extern "C" fn fedosov_session_order(session: *const FedosovSession) -> u32 {
    session.as_ref().map_or(0, |s| s.order as u32)
}

/// Runs the residual and flatness checks of the solution;
/// `CheckFailed` if any fails. `report` may be null.
///
/// # Safety
/// `session` must be a live handle; `report` null or a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fedosov_session_verify(session: *const FedosovSession, report: *mut *mut c_char) -> FedosovStatus {
    guard(|| {
        let s = handle(session)?;
        let rep = s.sol.verify();
        if !report.is_null() {
            emit(report, rep.to_string())?;
        }
        if rep.all_passed() {
            Ok(())
        } else {
            Err(Failure::Status(FedosovStatus::CheckFailed, "solution checks failed".into()))
        }
    })
}

/// `f ⋆ g` for function expressions such as `"x1*x2 + lam"`.
///
/// # Safety
/// `session` must be a live handle, `f`, `g` NUL-terminated, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn fedosov_star(
    session: *const FedosovSession,
    f: *const c_char,
    g: *const c_char,
    out: *mut *mut c_char,
) -> FedosovStatus {
    guard(|| {
        let s = handle(session)?;
        let n = s.sol.n();
        let f = Arg::inline("f", text(f, "f")?, false)?.function(n, s.order)?;
        let g = Arg::inline("g", text(g, "g")?, false)?.function(n, s.order)?;
        emit(out, star(&s.sol, &f, &g)?.to_string())
    })
}

/// `A ⋆′ B` for matrices given as JSON arrays of expressions.
///
/// # Safety
/// As for [`fedosov_star`].
#[no_mangle]
pub unsafe extern "C" fn fedosov_star_end(
    session: *const FedosovSession,
    a: *const c_char,
    b: *const c_char,
    out: *mut *mut c_char,
) -> FedosovStatus {
    guard(|| {
        let s = handle(session)?;
        let (n, rank) = (s.sol.n(), s.sol.rank());
        let a = Arg::inline("A", text(a, "A")?, true)?.endo(n, rank, s.order)?;
        let b = Arg::inline("B", text(b, "B")?, true)?.endo(n, rank, s.order)?;
        emit(out, star_prime(&s.sol, &a, &b)?.to_string())
    })
}

/// `A •′ s • f`; the section is a JSON array of expressions.
///
/// # Safety
/// As for [`fedosov_star`].
#[no_mangle]
pub unsafe extern "C" fn fedosov_act(
    session: *const FedosovSession,
    a: *const c_char,
    s_json: *const c_char,
    f: *const c_char,
    out: *mut *mut c_char,
) -> FedosovStatus {
    guard(|| {
        let s = handle(session)?;
        let (n, rank) = (s.sol.n(), s.sol.rank());
        let a = Arg::inline("A", text(a, "A")?, true)?.endo(n, rank, s.order)?;
        let sec = Arg::inline("s", text(s_json, "s")?, true)?.section(n, rank, s.order)?;
        let f = Arg::inline("f", text(f, "f")?, false)?.function(n, s.order)?;
        let left = act_left(&s.sol, &a, &sec)?;
        emit(out, act_right(&s.sol, &left, &f)?.to_string())
    })
}

/// The Fedosov–Taylor series `τ(f)` in canonical text.
///
/// # Safety
/// As for [`fedosov_star`].
#[no_mangle]
pub unsafe extern "C" fn fedosov_taylor(session: *const FedosovSession, f: *const c_char, out: *mut *mut c_char) -> FedosovStatus {
    guard(|| {
        let s = handle(session)?;
        let f = Arg::inline("f", text(f, "f")?, false)?.function(s.sol.n(), s.order)?;
        emit(out, to_canonical_text(&taylor(&s.sol, &f)?))
    })
}

/// The deformed metric `h(s, s′)`; needs a Hermitian scenario.
///
/// # Safety
/// As for [`fedosov_star`].
#[no_mangle]
pub unsafe extern "C" fn fedosov_metric(
    session: *const FedosovSession,
    s1: *const c_char,
    s2: *const c_char,
    out: *mut *mut c_char,
) -> FedosovStatus {
    guard(|| {
        let s = handle(session)?;
        let (n, rank) = (s.sol.n(), s.sol.rank());
        let a = Arg::inline("s", text(s1, "s")?, true)?.section(n, rank, s.order)?;
        let b = Arg::inline("s'", text(s2, "s'")?, true)?.section(n, rank, s.order)?;
        emit(out, deformed_h(&s.sol, &a, &b)?.to_string())
    })
}

/// The constant `c` with `W′ − W = c·λ·R^L` for a line bundle, e.g. `"-i"`.
/// `CheckFailed` when no single constant relates the two curvatures.
///
/// # Safety
/// `session` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn fedosov_class_factor(session: *const FedosovSession, out: *mut *mut c_char) -> FedosovStatus {
    guard(|| {
        let s = handle(session)?;
        match class_relation(&s.sol)?.factor {
            Some(c) => emit(out, c.to_string()),
            None => Err(Failure::Status(
                FedosovStatus::CheckFailed,
                "W′ − W is not a constant multiple of λR^L".into(),
            )),
        }
    })
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn fedosov_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failed call on this thread; empty after success.
/// Valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn fedosov_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn fedosov_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
