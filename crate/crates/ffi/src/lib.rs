//! C ABI over the `lrs` crate.
//!
//! Objects cross the boundary as opaque heap handles created by `lrs_*`
//! constructors and released by the matching `*_free`. Every fallible call
//! returns an [`LrsStatus`]; on failure a description is kept per thread and
//! can be read with [`lrs_last_error_message`]. Vectors are passed as
//! `const uint64_t *` of exactly the handle's dimension. Panics never unwind
//! into the caller.

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lrs::channel::MemoryChannel;
use lrs::encoding::{encode_with, EncodeMode, Encoding as CoreEncoding};
use lrs::field::{FieldMode, FieldParams, NonZeroVector};
use lrs::oracle::{LeakFreeOracle, OracleSample, ScriptedOracle};
use lrs::reconstruct::{check_reconstruction_constraints, reconstruct, CommonRandomness};
use lrs::refresh::{refresh_with, RefreshConfig, RefreshTrace, ViewL, ViewR};
use lrs::rng::SeededRng;
use lrs::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LrsStatus {
    Ok = 0,
    NullPointer = 1,
    /// Modulus not prime or out of range, zero dimension, p < 4n in
    /// standard mode, or handles over different fields.
    InvalidParams = 2,
    /// A value outside the field, a zero where nonzero is required, or an
    /// invalid oracle tuple.
    InvalidArgument = 3,
    /// Shares of different secrets, or no encoding exists for the secret.
    Precondition = 4,
    RestartCapExceeded = 5,
    Panic = 6,
}

/// A pair of shares `(L, R)`.
pub struct LrsEncoding {
    inner: CoreEncoding,
}

/// Result of one refresh run.
pub struct LrsRefreshTrace {
    inner: RefreshTrace,
}

/// Both party views, from a refresh or a reconstruction.
pub struct LrsViews {
    left: ViewL,
    right: ViewR,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(err: &Error) -> LrsStatus {
    match err {
        Error::NotPrime(_)
        | Error::ModulusOutOfRange(_)
        | Error::ZeroDimension
        | Error::FieldTooSmall { .. }
        | Error::ParamsMismatch(_) => LrsStatus::InvalidParams,
        Error::Precondition(_) | Error::EmptyConstraintSet { .. } | Error::Channel(_) => {
            LrsStatus::Precondition
        }
        Error::RestartCapExceeded { .. } => LrsStatus::RestartCapExceeded,
        _ => LrsStatus::InvalidArgument,
    }
}

/// Runs `f` with panics contained and errors recorded.
fn guard(f: impl FnOnce() -> Result<(), LrsStatus>) -> LrsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            LrsStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            LrsStatus::Panic
        }
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, LrsStatus>;
}

impl<T> OrStatus<T> for lrs::Result<T> {
    fn or_status(self) -> Result<T, LrsStatus> {
        self.map_err(|e| {
            set_error(e.to_string());
            status_of(&e)
        })
    }
}

fn null(what: &str) -> LrsStatus {
    set_error(format!("{what} is null"));
    LrsStatus::NullPointer
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, LrsStatus> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, LrsStatus> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn slice<'a>(p: *const u64, len: usize, what: &str) -> Result<&'a [u64], LrsStatus> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn params(p: u64, n: usize, relaxed: bool) -> Result<FieldParams, LrsStatus> {
    let mode = if relaxed {
        FieldMode::Relaxed
    } else {
        FieldMode::Standard
    };
    FieldParams::with_mode(p, n, mode).or_status()
}

/// Length in bytes of the calling thread's last error message, without the
/// terminating NUL. Zero after a successful call.
#[no_mangle]
pub extern "C" fn lrs_last_error_length() -> usize {
    LAST_ERROR.with(|e| e.borrow().len())
}

/// Copies the last error message into `buf` (at most `len - 1` bytes plus a
/// NUL) and returns the number of message bytes copied.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn lrs_last_error_message(buf: *mut c_char, len: usize) -> usize {
    if buf.is_null() || len == 0 {
        return 0;
    }
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let n = msg.len().min(len - 1);
        ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
        *buf.add(n) = 0;
        n
    })
}

/// Builds shares from explicit coordinates; both arrays hold `n` values.
///
/// # Safety
/// `left` and `right` must point to `n` readable values; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn lrs_encoding_new(
    p: u64,
    n: usize,
    relaxed: bool,
    left: *const u64,
    right: *const u64,
    out_encoding: *mut *mut LrsEncoding,
) -> LrsStatus {
    guard(|| {
        let out = out(out_encoding, "out_encoding")?;
        let k = params(p, n, relaxed)?;
        let l = slice(left, n, "left")?;
        let r = slice(right, n, "right")?;
        let inner = CoreEncoding::from_values(k, l, r).or_status()?;
        *out = Box::into_raw(Box::new(LrsEncoding { inner }));
        Ok(())
    })
}

/// Encodes `secret` with randomness derived from `seed`.
///
/// # Safety
/// `out_encoding` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lrs_encode(
    p: u64,
    n: usize,
    relaxed: bool,
    secret: u64,
    seed: u64,
    out_encoding: *mut *mut LrsEncoding,
) -> LrsStatus {
    guard(|| {
        let out = out(out_encoding, "out_encoding")?;
        let k = params(p, n, relaxed)?;
        let s = k.try_element(secret).or_status()?;
        let mut rng = SeededRng::new(seed, "ffi/encode");
        let inner = encode_with(s, k, EncodeMode::Constructive, &mut rng).or_status()?;
        *out = Box::into_raw(Box::new(LrsEncoding { inner }));
        Ok(())
    })
}

/// # Safety
/// `encoding` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lrs_encoding_free(encoding: *mut LrsEncoding) {
    if !encoding.is_null() {
        drop(Box::from_raw(encoding));
    }
}

/// # Safety
/// `encoding` must be a live handle; `out_*` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lrs_encoding_params(
    encoding: *const LrsEncoding,
    out_p: *mut u64,
    out_n: *mut usize,
) -> LrsStatus {
    guard(|| {
        let e = handle(encoding, "encoding")?;
        let k = e.inner.params();
        *out(out_p, "out_p")? = k.modulus();
        *out(out_n, "out_n")? = k.dimension();
        Ok(())
    })
}

/// `<L, R>`.
///
/// # Safety
/// `encoding` must be a live handle; `out_secret` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lrs_encoding_decode(
    encoding: *const LrsEncoding,
    out_secret: *mut u64,
) -> LrsStatus {
    guard(|| {
        let e = handle(encoding, "encoding")?;
        *out(out_secret, "out_secret")? = e.inner.decode().value();
        Ok(())
    })
}

unsafe fn copy_out(values: &[u64], buf: *mut u64, len: usize) -> Result<(), LrsStatus> {
    if buf.is_null() {
        return Err(null("buf"));
    }
    if len != values.len() {
        set_error(format!("buffer holds {len} values, vector has {}", values.len()));
        return Err(LrsStatus::InvalidArgument);
    }
    ptr::copy_nonoverlapping(values.as_ptr(), buf, len);
    Ok(())
}

/// Copies `L` into `buf`, which must hold exactly `n` values.
///
/// # Safety
/// `encoding` must be a live handle; `buf` must point to `len` writable values.
#[no_mangle]
pub unsafe extern "C" fn lrs_encoding_left(
    encoding: *const LrsEncoding,
    buf: *mut u64,
    len: usize,
) -> LrsStatus {
    guard(|| copy_out(&handle(encoding, "encoding")?.inner.left().values(), buf, len))
}

/// Copies `R` into `buf`, which must hold exactly `n` values.
///
/// # Safety
/// As for [`lrs_encoding_left`].
#[no_mangle]
pub unsafe extern "C" fn lrs_encoding_right(
    encoding: *const LrsEncoding,
    buf: *mut u64,
    len: usize,
) -> LrsStatus {
    guard(|| copy_out(&handle(encoding, "encoding")?.inner.right().values(), buf, len))
}

/// Refreshes with fresh oracle samples derived from `seed`.
///
/// # Safety
/// `encoding` must be a live handle; `out_trace` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lrs_refresh(
    encoding: *const LrsEncoding,
    seed: u64,
    restart_cap: u32,
    out_trace: *mut *mut LrsRefreshTrace,
) -> LrsStatus {
    guard(|| {
        let e = handle(encoding, "encoding")?;
        let out = out(out_trace, "out_trace")?;
        let mut rng = SeededRng::new(seed, "ffi/refresh");
        let inner = refresh_with(
            &e.inner,
            &mut LeakFreeOracle,
            &mut MemoryChannel::new(),
            &mut rng,
            RefreshConfig { restart_cap },
        )
        .or_status()?;
        *out = Box::into_raw(Box::new(LrsRefreshTrace { inner }));
        Ok(())
    })
}

/// Refreshes with one given oracle tuple. The tuple is validated; if the
/// attempt would restart the call fails with `RestartCapExceeded`.
///
/// # Safety
/// `encoding` must be a live handle; the four arrays must hold `n` values;
/// `out_trace` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lrs_refresh_forced(
    encoding: *const LrsEncoding,
    a: *const u64,
    a_tilde: *const u64,
    b: *const u64,
    b_tilde: *const u64,
    out_trace: *mut *mut LrsRefreshTrace,
) -> LrsStatus {
    guard(|| {
        let e = handle(encoding, "encoding")?;
        let out = out(out_trace, "out_trace")?;
        let k = e.inner.params();
        let n = k.dimension();
        let vec = |p: *const u64, what: &str| -> Result<_, LrsStatus> {
            k.vector(slice(p, n, what)?).or_status()
        };
        let sample = OracleSample::new(
            k,
            vec(a, "a")?,
            vec(a_tilde, "a_tilde")?,
            vec(b, "b")?,
            vec(b_tilde, "b_tilde")?,
        )
        .or_status()?;
        let mut rng = SeededRng::new(0, "ffi/refresh-forced");
        let inner = refresh_with(
            &e.inner,
            &mut ScriptedOracle::strict([sample]),
            &mut MemoryChannel::new(),
            &mut rng,
            RefreshConfig { restart_cap: 0 },
        )
        .or_status()?;
        *out = Box::into_raw(Box::new(LrsRefreshTrace { inner }));
        Ok(())
    })
}

/// # Safety
/// `trace` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lrs_trace_free(trace: *mut LrsRefreshTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}

/// New shares as a fresh handle, owned by the caller.
///
/// # Safety
/// `trace` must be a live handle; `out_encoding` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lrs_trace_output(
    trace: *const LrsRefreshTrace,
    out_encoding: *mut *mut LrsEncoding,
) -> LrsStatus {
    guard(|| {
        let t = handle(trace, "trace")?;
        *out(out_encoding, "out_encoding")? = Box::into_raw(Box::new(LrsEncoding {
            inner: t.inner.output.clone(),
        }));
        Ok(())
    })
}

/// # Safety
/// `trace` must be a live handle; `out_restarts` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lrs_trace_restarts(
    trace: *const LrsRefreshTrace,
    out_restarts: *mut u32,
) -> LrsStatus {
    guard(|| {
        *out(out_restarts, "out_restarts")? = handle(trace, "trace")?.inner.restarts;
        Ok(())
    })
}

/// Field operations of the accepting attempt.
///
/// # Safety
/// `trace` must be a live handle; the outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn lrs_trace_ops(
    trace: *const LrsRefreshTrace,
    out_adds: *mut u64,
    out_muls: *mut u64,
    out_invs: *mut u64,
) -> LrsStatus {
    guard(|| {
        let ops = handle(trace, "trace")?.inner.op_count;
        *out(out_adds, "out_adds")? = ops.adds;
        *out(out_muls, "out_muls")? = ops.muls;
        *out(out_invs, "out_invs")? = ops.invs;
        Ok(())
    })
}

/// Both views of the accepting attempt, as a new handle.
///
/// # Safety
/// `trace` must be a live handle; `out_views` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lrs_trace_views(
    trace: *const LrsRefreshTrace,
    out_views: *mut *mut LrsViews,
) -> LrsStatus {
    guard(|| {
        let t = handle(trace, "trace")?;
        *out(out_views, "out_views")? = Box::into_raw(Box::new(LrsViews {
            left: t.inner.view_l.clone(),
            right: t.inner.view_r.clone(),
        }));
        Ok(())
    })
}

/// Rebuilds both views from old shares, new shares and `(V, V~)`, which
/// hold `n` nonzero values each. Fails with `Precondition` when the two
/// share pairs store different secrets.
///
/// # Safety
/// Handles must be live; `v` and `v_tilde` must hold `n` values;
/// `out_views` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lrs_reconstruct(
    old_encoding: *const LrsEncoding,
    new_encoding: *const LrsEncoding,
    v: *const u64,
    v_tilde: *const u64,
    out_views: *mut *mut LrsViews,
) -> LrsStatus {
    guard(|| {
        let old = handle(old_encoding, "old_encoding")?;
        let new = handle(new_encoding, "new_encoding")?;
        let out = out(out_views, "out_views")?;
        let k = old.inner.params();
        let n = k.dimension();
        let nz = |p: *const u64, what: &str| -> Result<NonZeroVector, LrsStatus> {
            k.nonzero_vector(slice(p, n, what)?).or_status()
        };
        let cr = CommonRandomness {
            v: nz(v, "v")?,
            v_tilde: nz(v_tilde, "v_tilde")?,
        };
        let (left, right) = reconstruct(&old.inner, &new.inner, &cr).or_status()?;
        *out = Box::into_raw(Box::new(LrsViews { left, right }));
        Ok(())
    })
}

/// Whether the views satisfy every constraint a real run would.
///
/// # Safety
/// `views` must be a live handle; `out_ok` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lrs_views_check(views: *const LrsViews, out_ok: *mut bool) -> LrsStatus {
    guard(|| {
        let v = handle(views, "views")?;
        *out(out_ok, "out_ok")? = check_reconstruction_constraints(&v.left, &v.right);
        Ok(())
    })
}

/// # Safety
/// `a` and `b` must be live handles; `out_equal` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lrs_views_equal(
    a: *const LrsViews,
    b: *const LrsViews,
    out_equal: *mut bool,
) -> LrsStatus {
    guard(|| {
        let (a, b) = (handle(a, "a")?, handle(b, "b")?);
        *out(out_equal, "out_equal")? = a.left == b.left && a.right == b.right;
        Ok(())
    })
}

/// # Safety
/// `views` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lrs_views_free(views: *mut LrsViews) {
    if !views.is_null() {
        drop(Box::from_raw(views));
    }
}
