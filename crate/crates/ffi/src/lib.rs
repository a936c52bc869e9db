//! C ABI over the `shiftlattice` core.
//!
//! Handles (`SlSpec`, `SlSubspace`) are opaque and owned by the caller once
//! returned; release them with the matching `*_free`. Strings returned
//! through `char **` out-parameters are heap allocated and released with
//! `sl_string_free`. Every fallible call returns an `SlStatus`; on failure
//! `sl_last_error_message` describes the error on the calling thread.

use shiftlattice::asymptotics::cor44_check;
use shiftlattice::classify::{classify_joint, classify_parity_lattice, classify_t2, classify_t3, random_invariant};
use shiftlattice::invariants::{is_invariant, nilpotent_decompose};
use shiftlattice::shifts::{Direction, ShiftSpec};
use shiftlattice::weights::{delta_estimate, DeltaConfig, DeltaScope, DeltaStatus, WeightFamily};
use shiftlattice::{serial, Error, Subspace};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    DimensionMismatch = 4,
    NotInvariant = 5,
    ZeroVector = 6,
    ParameterOutOfRange = 7,
    TopIndexMismatch = 8,
    IndependenceFails = 9,
    NotNilpotent = 10,
    NonCoordinate = 11,
    UnrecognizedPattern = 12,
    InvalidWeights = 13,
    ZeroCoefficient = 14,
    SupportMismatch = 15,
    Unclassifiable = 16,
    UnreachableDimension = 17,
    Io = 18,
    Panic = 19,
}

/// Which classifier `sl_classify` runs.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlClassifier {
    Square = 0,
    Cube = 1,
    Joint = 2,
    CoordinateSquare = 3,
    CoordinateCube = 4,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlDeltaStatus {
    BoundedEvidence = 0,
    CertifiedDivergent = 1,
    Inconclusive = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlDeltaEstimate {
    pub lower_bound: f64,
    pub status: SlDeltaStatus,
    pub witness_m: usize,
    pub witness_n: usize,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SlCor44 {
    pub hypothesis_met: bool,
    pub unicellular: bool,
}

/// Weighted shift: weight family, truncation size and direction.
pub struct SlSpec {
    inner: ShiftSpec,
}

/// Subspace of the truncated space, stored in reduced form.
pub struct SlSubspace {
    inner: Subspace,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> SlStatus {
    match e {
        Error::DimensionMismatch { .. } => SlStatus::DimensionMismatch,
        Error::NotInvariant { .. } => SlStatus::NotInvariant,
        Error::ZeroVector => SlStatus::ZeroVector,
        Error::ParameterOutOfRange(_) => SlStatus::ParameterOutOfRange,
        Error::TopIndexMismatch { .. } => SlStatus::TopIndexMismatch,
        Error::IndependenceFails(_) => SlStatus::IndependenceFails,
        Error::NotNilpotent => SlStatus::NotNilpotent,
        Error::NonCoordinate => SlStatus::NonCoordinate,
        Error::UnrecognizedPattern => SlStatus::UnrecognizedPattern,
        Error::InvalidWeights(_) => SlStatus::InvalidWeights,
        Error::Parse(_) => SlStatus::ParseError,
        Error::ZeroCoefficient(_) => SlStatus::ZeroCoefficient,
        Error::SupportMismatch(_) => SlStatus::SupportMismatch,
        Error::Unclassifiable(_) => SlStatus::Unclassifiable,
        Error::UnreachableDimension(_) => SlStatus::UnreachableDimension,
        Error::Io(_) => SlStatus::Io,
    }
}

struct Fail(SlStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

/// Run `f`, translating errors and panics into a status code.
fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> SlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            SlStatus::Ok
        }
        Ok(Err(Fail(code, msg))) => {
            set_error(&msg);
            code
        }
        Err(_) => {
            set_error("internal panic");
            SlStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(SlStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(SlStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn read_ref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(v);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|_| Fail(SlStatus::ParseError, "string contains NUL".into()))?;
    write_out(out, c.into_raw())
}

fn parse_json(text: &str) -> Result<serde_json::Value, Fail> {
    serde_json::from_str(text).map_err(|e| Fail(SlStatus::ParseError, e.to_string()))
}

/// Message for the last failed call on this thread ("" after a success).
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn sl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, static string.
#[no_mangle]
pub extern "C" fn sl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Free a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn sl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Build a spec from a family string such as `"harmonic"` or
/// `"geometric:1/3"`.
///
/// # Safety
/// `family` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_spec_new(family: *const c_char, n: usize, forward: bool, out: *mut *mut SlSpec) -> SlStatus {
    guard(|| {
        let f = WeightFamily::parse(read_str(family, "family")?)?;
        let dir = if forward { Direction::Forward } else { Direction::Backward };
        let spec = ShiftSpec::new(f, n, dir)?;
        write_out(out, Box::into_raw(Box::new(SlSpec { inner: spec })))
    })
}

/// # Safety
/// `spec` must come from `sl_spec_new` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn sl_spec_free(spec: *mut SlSpec) {
    if !spec.is_null() {
        drop(Box::from_raw(spec));
    }
}

/// Truncation size of a spec (0 for null).
///
/// # Safety
/// `spec` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sl_spec_size(spec: *const SlSpec) -> usize {
    spec.as_ref().map_or(0, |s| s.inner.n())
}

/// Parse `{"ambient_dim": N, "basis": [["p/q", ...], ...]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_subspace_from_json(json: *const c_char, out: *mut *mut SlSubspace) -> SlStatus {
    guard(|| {
        let s = serial::subspace_from_json(&parse_json(read_str(json, "json")?)?)?;
        write_out(out, Box::into_raw(Box::new(SlSubspace { inner: s })))
    })
}

/// Reduced basis as JSON.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_subspace_to_json(s: *const SlSubspace, out: *mut *mut c_char) -> SlStatus {
    guard(|| {
        let s = read_ref(s, "subspace")?;
        write_string(out, serial::to_line(&serial::subspace_to_json(&s.inner)))
    })
}

/// Dimension of the subspace (0 for null).
///
/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sl_subspace_dim(s: *const SlSubspace) -> usize {
    s.as_ref().map_or(0, |s| s.inner.dim())
}

/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn sl_subspace_free(s: *mut SlSubspace) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Seeded random subspace of dimension `dim` invariant under the
/// `power`-th power of the backward shift.
///
/// # Safety
/// `spec` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_random_invariant(
    spec: *const SlSpec,
    power: usize,
    dim: usize,
    seed: u64,
    out: *mut *mut SlSubspace,
) -> SlStatus {
    guard(|| {
        let spec = read_ref(spec, "spec")?;
        let s = random_invariant(&spec.inner, power, dim, seed)?;
        write_out(out, Box::into_raw(Box::new(SlSubspace { inner: s })))
    })
}

/// Whether `s` is invariant under the `power`-th power of the spec's shift.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_is_invariant(s: *const SlSubspace, spec: *const SlSpec, power: usize, out: *mut bool) -> SlStatus {
    guard(|| {
        let (s, spec) = (read_ref(s, "subspace")?, read_ref(spec, "spec")?);
        let v = is_invariant(&s.inner, &spec.inner, power)?;
        write_out(out, v)
    })
}

/// Canonical form as JSON `{tag, params, generators}`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_classify(
    s: *const SlSubspace,
    spec: *const SlSpec,
    which: SlClassifier,
    out: *mut *mut c_char,
) -> SlStatus {
    guard(|| {
        let (s, spec) = (&read_ref(s, "subspace")?.inner, &read_ref(spec, "spec")?.inner);
        let form = match which {
            SlClassifier::Square => classify_t2(s, spec)?,
            SlClassifier::Cube => classify_t3(s, spec)?,
            SlClassifier::Joint => classify_joint(s, spec)?,
            SlClassifier::CoordinateSquare => classify_parity_lattice(s, spec, 2)?,
            SlClassifier::CoordinateCube => classify_parity_lattice(s, spec, 3)?,
        };
        write_string(out, serial::to_line(&serial::form_to_json(&form)))
    })
}

/// Cyclic decomposition under the `l`-th power as JSON
/// `{l, generators: [{vector, orbit_len}]}`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_decompose(s: *const SlSubspace, spec: *const SlSpec, l: usize, out: *mut *mut c_char) -> SlStatus {
    guard(|| {
        let (s, spec) = (read_ref(s, "subspace")?, read_ref(spec, "spec")?);
        let d = nilpotent_decompose(&s.inner, &spec.inner, l)?;
        write_string(out, serial::to_line(&serial::decomposition_to_json(&d)))
    })
}

/// Lower estimate of the weight supremum over `2 <= m <= n <= m_max` with
/// `k + 1` terms per cell; `diagonal` restricts to `m = n`.
///
/// # Safety
/// `family` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_delta_estimate(
    family: *const c_char,
    k: usize,
    m_max: usize,
    cap: f64,
    diagonal: bool,
    out: *mut SlDeltaEstimate,
) -> SlStatus {
    guard(|| {
        let f = WeightFamily::parse(read_str(family, "family")?)?;
        let mut cfg = DeltaConfig::new(k, m_max, cap);
        if diagonal {
            cfg.scope = DeltaScope::Diagonal;
        }
        let d = delta_estimate(&f, &cfg)?;
        let status = match d.status {
            DeltaStatus::BoundedEvidence => SlDeltaStatus::BoundedEvidence,
            DeltaStatus::CertifiedDivergent => SlDeltaStatus::CertifiedDivergent,
            DeltaStatus::Inconclusive => SlDeltaStatus::Inconclusive,
        };
        write_out(out, SlDeltaEstimate { lower_bound: d.lower_bound, status, witness_m: d.witness.0, witness_n: d.witness.1 })
    })
}

/// Unicellularity of `f(T*)` for `f` given as JSON `{"coeffs": ["a0", "a1", ...]}`.
///
/// # Safety
/// `coeffs_json` must be a NUL-terminated string; `spec` live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sl_cor44_check(coeffs_json: *const c_char, spec: *const SlSpec, out: *mut SlCor44) -> SlStatus {
    guard(|| {
        let f = serial::analytic_from_json(&parse_json(read_str(coeffs_json, "coeffs")?)?)?;
        let spec = read_ref(spec, "spec")?;
        let r = cor44_check(&f, &spec.inner)?;
        write_out(out, SlCor44 { hypothesis_met: r.hypothesis_met, unicellular: r.unicellular })
    })
}
