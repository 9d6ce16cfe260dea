//! C ABI over `oqc-core`.
//!
//! States and ensembles cross the boundary as JSON (the same documents the
//! CLI reads) and live behind opaque handles. Every fallible call returns an
//! [`OqcStatus`]; on failure the message is available from
//! [`oqc_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use oqc_core::chansim::{self, CqChannel, SimulationMode};
use oqc_core::hardens::{self, HardEnsembleParams};
use oqc_core::qcore::{self, DensityOperator, Ensemble};
use oqc_core::{codec, Error};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OqcStatus {
    Ok = 0,
    NullPointer = 1,
    /// Malformed UTF-8 or JSON syntax.
    Parse = 2,
    Dimension = 3,
    OutOfRange = 4,
    /// Any other validation or numerical failure.
    Invalid = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OqcSimulationMode {
    OneWay = 0,
    Rounds = 1,
    Interactive = 2,
}

/// Opaque density operator.
pub struct OqcDensity(DensityOperator);

/// Opaque ensemble of pure states.
pub struct OqcEnsemble(Ensemble);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> OqcStatus {
    match e {
        // Validation inside deserialization surfaces as a data error.
        Error::Json(j) if j.is_syntax() || j.is_eof() => OqcStatus::Parse,
        Error::DimensionMismatch(..) | Error::InvalidDim(_) | Error::UnknownRegister(_) => OqcStatus::Dimension,
        Error::OutOfRange { .. } => OqcStatus::OutOfRange,
        _ => OqcStatus::Invalid,
    }
}

struct Fail(OqcStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(OqcStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, recording any failure or panic in the thread's last error.
fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> OqcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => OqcStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            OqcStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| Fail(OqcStatus::Parse, format!("{what}: {e}")))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn oqc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn oqc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Frees a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from an `oqc_*_to_json` call and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn oqc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a density operator (or pure state) JSON document.
///
/// # Safety
/// `json` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oqc_density_from_json(json: *const c_char, out: *mut *mut OqcDensity) -> OqcStatus {
    guard(|| {
        let text = read_str(json, "json")?;
        let v: serde_json::Value = serde_json::from_str(text).map_err(Error::from)?;
        let rho = if v.get("vector").is_some() {
            serde_json::from_value::<qcore::PureState>(v).map_err(Error::from)?.density()
        } else {
            serde_json::from_value::<DensityOperator>(v).map_err(Error::from)?
        };
        write(out, Box::into_raw(Box::new(OqcDensity(rho))))
    })
}

/// # Safety
/// `rho` must be NULL or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn oqc_density_free(rho: *mut OqcDensity) {
    if !rho.is_null() {
        drop(Box::from_raw(rho));
    }
}

/// Total dimension, or 0 for NULL.
///
/// # Safety
/// `rho` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn oqc_density_dim(rho: *const OqcDensity) -> usize {
    rho.as_ref().map_or(0, |r| r.0.d())
}

/// # Safety
/// Handles must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn oqc_entropy(rho: *const OqcDensity, out: *mut f64) -> OqcStatus {
    guard(|| {
        let rho = deref(rho, "rho")?;
        write(out, qcore::von_neumann_entropy(&rho.0)?)
    })
}

/// # Safety
/// Handles must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn oqc_fidelity(rho: *const OqcDensity, sigma: *const OqcDensity, out: *mut f64) -> OqcStatus {
    guard(|| {
        let (rho, sigma) = (deref(rho, "rho")?, deref(sigma, "sigma")?);
        write(out, qcore::fidelity(&rho.0, &sigma.0)?)
    })
}

/// Max-relative entropy in bits; `+inf` when the support condition fails.
///
/// # Safety
/// Handles must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn oqc_dmax(rho: *const OqcDensity, sigma: *const OqcDensity, out: *mut f64) -> OqcStatus {
    guard(|| {
        let (rho, sigma) = (deref(rho, "rho")?, deref(sigma, "sigma")?);
        write(out, qcore::dmax(&rho.0, &sigma.0)?)
    })
}

/// # Safety
/// `json` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oqc_ensemble_from_json(json: *const c_char, out: *mut *mut OqcEnsemble) -> OqcStatus {
    guard(|| {
        let text = read_str(json, "json")?;
        let ens: Ensemble = serde_json::from_str(text).map_err(Error::from)?;
        write(out, Box::into_raw(Box::new(OqcEnsemble(ens))))
    })
}

/// Samples a hard ensemble, retrying up to `max_retries` batches until the
/// concentration checks pass.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oqc_hard_ensemble_build(
    d: usize,
    delta: f64,
    m: usize,
    eps: f64,
    seed: u64,
    max_retries: usize,
    out: *mut *mut OqcEnsemble,
) -> OqcStatus {
    guard(|| {
        let params = HardEnsembleParams::new(d, delta, m, eps, seed)?;
        let hard = hardens::build_hard_ensemble(&params, max_retries, false)?;
        write(out, Box::into_raw(Box::new(OqcEnsemble(hard.ensemble))))
    })
}

/// # Safety
/// `ens` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn oqc_ensemble_free(ens: *mut OqcEnsemble) {
    if !ens.is_null() {
        drop(Box::from_raw(ens));
    }
}

/// Number of states, or 0 for NULL.
///
/// # Safety
/// `ens` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn oqc_ensemble_len(ens: *const OqcEnsemble) -> usize {
    ens.as_ref().map_or(0, |e| e.0.len())
}

/// Serializes the ensemble; release the result with [`oqc_string_free`].
///
/// # Safety
/// `ens` must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn oqc_ensemble_to_json(ens: *const OqcEnsemble, out: *mut *mut c_char) -> OqcStatus {
    guard(|| {
        let ens = deref(ens, "ensemble")?;
        let text = serde_json::to_string(&ens.0).map_err(Error::from)?;
        let c = CString::new(text).map_err(|e| Fail(OqcStatus::Invalid, e.to_string()))?;
        write(out, c.into_raw())
    })
}

/// Holevo capacity of the classical-quantum channel `j ↦ |Ψ_j><Ψ_j|`.
///
/// # Safety
/// `ens` must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn oqc_cq_capacity(ens: *const OqcEnsemble, out: *mut f64) -> OqcStatus {
    guard(|| {
        let ens = deref(ens, "ensemble")?;
        let ch = CqChannel::from_ensemble(&ens.0)?;
        write(out, chansim::cq_capacity(&ch)?)
    })
}

/// Simulation-cost lower bound; fails with `Invalid` when `eta` is outside
/// the admissibility gate of the mode. `rounds` is read only for `Rounds`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oqc_simulation_cost_lower(
    d: f64,
    delta: f64,
    eta: f64,
    mode: OqcSimulationMode,
    rounds: u32,
    out: *mut f64,
) -> OqcStatus {
    guard(|| {
        let mode = match mode {
            OqcSimulationMode::OneWay => SimulationMode::OneWay,
            OqcSimulationMode::Rounds => SimulationMode::Rounds(rounds),
            OqcSimulationMode::Interactive => SimulationMode::Interactive,
        };
        write(out, chansim::simulation_cost_lower_checked(d, delta, eta, mode)?.value)
    })
}

/// Elias-delta codeword of `n ≥ 1`, packed MSB-first. `bit_len` receives the
/// codeword length; when `cap` bytes are too few nothing is written to `buf`
/// and `BufferTooSmall` is returned.
///
/// # Safety
/// `buf` must hold `cap` bytes (may be NULL when `cap` is 0); `bit_len` writable.
#[no_mangle]
pub unsafe extern "C" fn oqc_elias_encode(n: u64, buf: *mut u8, cap: usize, bit_len: *mut usize) -> OqcStatus {
    guard(|| {
        let bits = codec::elias_encode(n)?;
        write(bit_len, bits.len())?;
        let bytes = bits.to_bytes();
        if bytes.len() > cap {
            return Err(Fail(
                OqcStatus::BufferTooSmall,
                format!("need {} bytes, have {cap}", bytes.len()),
            ));
        }
        if buf.is_null() {
            return Err(null("buf"));
        }
        ptr::copy_nonoverlapping(bytes.as_ptr(), buf, bytes.len());
        Ok(())
    })
}

/// Decodes one Elias-delta codeword from the first `bit_len` bits of `buf`.
///
/// # Safety
/// `buf` must hold `ceil(bit_len / 8)` bytes; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn oqc_elias_decode(buf: *const u8, bit_len: usize, value: *mut u64, consumed: *mut usize) -> OqcStatus {
    guard(|| {
        if buf.is_null() {
            return Err(null("buf"));
        }
        let bytes = std::slice::from_raw_parts(buf, bit_len.div_ceil(8));
        let bits = codec::BitString::from_bytes(bytes, bit_len)?;
        let (n, used) = codec::elias_decode(bits.bits())?;
        write(value, n)?;
        write(consumed, used)
    })
}
