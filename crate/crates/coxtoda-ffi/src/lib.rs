//! C ABI over `coxtoda`.
//!
//! Objects cross the boundary as opaque handles created by `cox_*_new` or
//! `cox_*_from_json` and released by the matching `cox_*_free`. Every
//! fallible call returns a [`CoxStatus`]; on failure the message is kept per
//! thread and read with [`cox_last_error`]. Strings returned through `char**`
//! out-parameters are owned by the caller and released with
//! [`cox_string_free`]. Rationals travel as JSON strings `"num/den"`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use coxtoda::cluster::{mutate, seed_init, transport, ClusterSeed};
use coxtoda::config::Config;
use coxtoda::coxeter::{build_x, params_from_x, CoxeterPair, FactorParams};
use coxtoda::gbd::{sigma_cluster, sigma_minors, sigma_table_path, GbdRequest};
use coxtoda::io::{from_json, matrix_from_json, matrix_json, MomentsJson, PairJson, ParamsJson, SeedJson};
use coxtoda::toda::{hamiltonian_fk, moment_flow_state, rk4_flow, FlowState};
use coxtoda::verify::{report_json, run, VerifyOptions};
use coxtoda::weyl::{restore_params, HankelCache, MomentSeq};
use coxtoda::CoxError;

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoxStatus {
    Ok = 0,
    ArgumentError = 1,
    SingularMatrix = 2,
    NumericOverflow = 3,
    NotCoxeter = 4,
    InvalidParams = 5,
    NonGeneric = 6,
    RangeError = 7,
    InvalidMove = 8,
    FlowDiverged = 9,
    NullPointer = 10,
    InvalidUtf8 = 11,
    Panic = 12,
}

impl From<&CoxError> for CoxStatus {
    fn from(e: &CoxError) -> Self {
        match e {
            CoxError::Argument(_) => CoxStatus::ArgumentError,
            CoxError::SingularMatrix(_) => CoxStatus::SingularMatrix,
            CoxError::NumericOverflow(_) => CoxStatus::NumericOverflow,
            CoxError::NotCoxeter(_) => CoxStatus::NotCoxeter,
            CoxError::InvalidParams(_) => CoxStatus::InvalidParams,
            CoxError::NonGeneric(_) => CoxStatus::NonGeneric,
            CoxError::Range(_) => CoxStatus::RangeError,
            CoxError::InvalidMove(_) => CoxStatus::InvalidMove,
            CoxError::FlowDiverged(_) => CoxStatus::FlowDiverged,
        }
    }
}

/// Which route `cox_gbd` uses.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoxGbdRoute {
    Cluster = 0,
    Table = 1,
    Minors = 2,
}

/// A Coxeter pair `(u, v)`.
pub struct CoxPair(CoxeterPair);
/// Factorization parameters `d`, `c^+`, `c^-`.
pub struct CoxParams(FactorParams);
/// A two-sided moment sequence.
pub struct CoxMoments(MomentSeq);
/// A cluster seed: values and exchange matrix.
pub struct CoxSeed(ClusterSeed);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(CoxStatus, String);

impl From<CoxError> for Failure {
    fn from(e: CoxError) -> Self {
        Failure(CoxStatus::from(&e), e.to_string())
    }
}

type FfiResult<T> = Result<T, Failure>;

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

/// Runs `f`, records any error and converts panics into `Panic`.
fn guard(f: impl FnOnce() -> FfiResult<()>) -> CoxStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            CoxStatus::Ok
        }
        Ok(Err(Failure(code, msg))) => {
            set_error(&msg);
            code
        }
        Err(_) => {
            set_error("internal panic");
            CoxStatus::Panic
        }
    }
}

fn null() -> Failure {
    Failure(CoxStatus::NullPointer, "null pointer argument".into())
}

unsafe fn cstr<'a>(p: *const c_char) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(CoxStatus::InvalidUtf8, "string is not UTF-8".into()))
}

unsafe fn handle<'a, T>(p: *const T) -> FfiResult<&'a T> {
    p.as_ref().ok_or_else(null)
}

unsafe fn slice<'a, T>(p: *const T, len: usize) -> FfiResult<&'a [T]> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null());
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn put<T>(out: *mut *mut T, v: T) -> FfiResult<()> {
    if out.is_null() {
        return Err(null());
    }
    *out = Box::into_raw(Box::new(v));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> FfiResult<()> {
    if out.is_null() {
        return Err(null());
    }
    let c = CString::new(s).map_err(|_| Failure(CoxStatus::ArgumentError, "interior NUL in output".into()))?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn free<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("serializable")
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn cox_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cox_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from a `char**` out-parameter of this library, or be null.
#[no_mangle]
pub unsafe extern "C" fn cox_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Pair from its two index sets (both must contain 1 and n).
///
/// # Safety
/// The arrays must hold the given number of elements.
#[no_mangle]
pub unsafe extern "C" fn cox_pair_new(
    n: usize,
    iplus: *const usize,
    iplus_len: usize,
    iminus: *const usize,
    iminus_len: usize,
    out: *mut *mut CoxPair,
) -> CoxStatus {
    guard(|| {
        let (p, m) = (slice(iplus, iplus_len)?.to_vec(), slice(iminus, iminus_len)?.to_vec());
        put(out, CoxPair(CoxeterPair::from_sets(n, p, m)?))
    })
}

/// The pair with `ε = (2,0,…,0)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cox_pair_tridiagonal(n: usize, out: *mut *mut CoxPair) -> CoxStatus {
    guard(|| put(out, CoxPair(CoxeterPair::tridiagonal(n)?)))
}

/// The pair with `ε = (2,1,…,1,0)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cox_pair_relativistic(n: usize, out: *mut *mut CoxPair) -> CoxStatus {
    guard(|| put(out, CoxPair(CoxeterPair::relativistic(n)?)))
}

/// The pair keyed to a chart `ε`.
///
/// # Safety
/// `eps` must hold `n` bytes.
#[no_mangle]
pub unsafe extern "C" fn cox_pair_for_eps(eps: *const u8, n: usize, out: *mut *mut CoxPair) -> CoxStatus {
    guard(|| put(out, CoxPair(CoxeterPair::canonical_for_eps(slice(eps, n)?)?)))
}

/// Pair from `{"n": …, "Iplus": […], "Iminus": […]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn cox_pair_from_json(json: *const c_char, out: *mut *mut CoxPair) -> CoxStatus {
    guard(|| put(out, CoxPair(from_json::<PairJson>(cstr(json)?)?.to_pair()?)))
}

/// # Safety
/// `pair` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cox_pair_to_json(pair: *const CoxPair, out: *mut *mut c_char) -> CoxStatus {
    guard(|| put_string(out, to_json(&PairJson::from(&handle(pair)?.0))))
}

/// Size `n`, or 0 for a null handle.
///
/// # Safety
/// `pair` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn cox_pair_n(pair: *const CoxPair) -> usize {
    pair.as_ref().map_or(0, |p| p.0.n())
}

/// Copies `ε` into `buf`, which must have room for `n` bytes.
///
/// # Safety
/// `buf` must hold `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn cox_pair_eps(pair: *const CoxPair, buf: *mut u8, len: usize) -> CoxStatus {
    guard(|| {
        let eps = handle(pair)?.0.eps();
        if buf.is_null() || len < eps.len() {
            return Err(Failure(CoxStatus::ArgumentError, format!("buffer needs {} bytes", eps.len())));
        }
        ptr::copy_nonoverlapping(eps.as_ptr(), buf, eps.len());
        Ok(())
    })
}

/// # Safety
/// `pair` must come from this library, or be null.
#[no_mangle]
pub unsafe extern "C" fn cox_pair_free(pair: *mut CoxPair) {
    free(pair)
}

/// Parameters from `{"d": […], "cplus": […], "cminus": […]}` or the
/// reduced form `{"d": […], "c": […]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn cox_params_from_json(json: *const c_char, out: *mut *mut CoxParams) -> CoxStatus {
    guard(|| put(out, CoxParams(from_json::<ParamsJson>(cstr(json)?)?.to_params()?)))
}

/// # Safety
/// `params` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cox_params_to_json(params: *const CoxParams, out: *mut *mut c_char) -> CoxStatus {
    guard(|| put_string(out, to_json(&ParamsJson::from(&handle(params)?.0))))
}

/// Reduced parameters as doubles: `d` (n values) and `c = c^+ c^-`
/// (n−1 values).
///
/// # Safety
/// `d` must hold `n` doubles and `c` must hold `n−1`.
#[no_mangle]
pub unsafe extern "C" fn cox_params_values(params: *const CoxParams, d: *mut f64, c: *mut f64) -> CoxStatus {
    guard(|| {
        let p = &handle(params)?.0;
        if d.is_null() || c.is_null() {
            return Err(null());
        }
        for (i, v) in p.d.iter().enumerate() {
            *d.add(i) = coxtoda::linalg::Scalar::to_f64(v);
        }
        for (i, v) in p.c().iter().enumerate() {
            *c.add(i) = coxtoda::linalg::Scalar::to_f64(v);
        }
        Ok(())
    })
}

/// # Safety
/// `params` must come from this library, or be null.
#[no_mangle]
pub unsafe extern "C" fn cox_params_free(params: *mut CoxParams) {
    free(params)
}

/// `X` as a JSON array of rows of rational strings.
///
/// # Safety
/// Handles must be live.
#[no_mangle]
pub unsafe extern "C" fn cox_build_x(
    pair: *const CoxPair,
    params: *const CoxParams,
    out: *mut *mut c_char,
) -> CoxStatus {
    guard(|| put_string(out, to_json(&matrix_json(&build_x(&handle(pair)?.0, &handle(params)?.0)?))))
}

/// Factorization parameters of a matrix given as JSON rows.
///
/// # Safety
/// `matrix_json` must be a NUL-terminated string; `pair` must be live.
#[no_mangle]
pub unsafe extern "C" fn cox_params_from_x(
    pair: *const CoxPair,
    matrix_json: *const c_char,
    out: *mut *mut CoxParams,
) -> CoxStatus {
    guard(|| {
        let rows: Vec<Vec<String>> = from_json(cstr(matrix_json)?)?;
        put(out, CoxParams(params_from_x(&handle(pair)?.0, &matrix_from_json(&rows)?)?))
    })
}

/// Moments of `X(pair, params)` with `H_0 = 1`.
///
/// # Safety
/// Handles must be live.
#[no_mangle]
pub unsafe extern "C" fn cox_moments_of(
    pair: *const CoxPair,
    params: *const CoxParams,
    out: *mut *mut CoxMoments,
) -> CoxStatus {
    guard(|| put(out, CoxMoments(MomentSeq::of(&build_x(&handle(pair)?.0, &handle(params)?.0)?)?)))
}

/// Moments from `{"H": [H_0, …, H_{2n−1}]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn cox_moments_from_json(json: *const c_char, out: *mut *mut CoxMoments) -> CoxStatus {
    guard(|| put(out, CoxMoments(from_json::<MomentsJson>(cstr(json)?)?.to_seq()?)))
}

/// # Safety
/// `m` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cox_moments_to_json(m: *const CoxMoments, out: *mut *mut c_char) -> CoxStatus {
    guard(|| put_string(out, to_json(&MomentsJson::from_seq(&handle(m)?.0)?)))
}

/// # Safety
/// `m` must come from this library, or be null.
#[no_mangle]
pub unsafe extern "C" fn cox_moments_free(m: *mut CoxMoments) {
    free(m)
}

/// The inverse problem: parameters in the chart of `pair` with the given
/// moments.
///
/// # Safety
/// Handles must be live.
#[no_mangle]
pub unsafe extern "C" fn cox_restore_params(
    pair: *const CoxPair,
    m: *const CoxMoments,
    out: *mut *mut CoxParams,
) -> CoxStatus {
    guard(|| put(out, CoxParams(restore_params(&handle(pair)?.0, &handle(m)?.0)?)))
}

/// Initial seed of the chart `ε`.
///
/// # Safety
/// `eps` must hold `n` bytes; `m` must be live.
#[no_mangle]
pub unsafe extern "C" fn cox_seed_init(
    eps: *const u8,
    n: usize,
    m: *const CoxMoments,
    out: *mut *mut CoxSeed,
) -> CoxStatus {
    guard(|| {
        let mut cache = HankelCache::new(handle(m)?.0.clone());
        put(out, CoxSeed(seed_init(slice(eps, n)?, &mut cache)?))
    })
}

/// Mutation in 1-based direction `k ∈ [1, 2n−2]`; returns a new seed.
///
/// # Safety
/// `seed` must be live.
#[no_mangle]
pub unsafe extern "C" fn cox_seed_mutate(seed: *const CoxSeed, k: usize, out: *mut *mut CoxSeed) -> CoxStatus {
    guard(|| {
        if k == 0 {
            return Err(Failure(CoxStatus::ArgumentError, "directions are 1-based".into()));
        }
        put(out, CoxSeed(mutate(&handle(seed)?.0, k - 1)?))
    })
}

/// Moves a tagged seed to the chart `ε′`.
///
/// # Safety
/// `eps` must hold `n` bytes; `seed` must be live.
#[no_mangle]
pub unsafe extern "C" fn cox_seed_transport(
    seed: *const CoxSeed,
    eps: *const u8,
    n: usize,
    out: *mut *mut CoxSeed,
) -> CoxStatus {
    guard(|| put(out, CoxSeed(transport(&handle(seed)?.0, slice(eps, n)?)?)))
}

/// # Safety
/// `json` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn cox_seed_from_json(json: *const c_char, out: *mut *mut CoxSeed) -> CoxStatus {
    guard(|| put(out, CoxSeed(from_json::<SeedJson>(cstr(json)?)?.to_seed()?)))
}

/// # Safety
/// `seed` must be live.
#[no_mangle]
pub unsafe extern "C" fn cox_seed_to_json(seed: *const CoxSeed, out: *mut *mut c_char) -> CoxStatus {
    guard(|| put_string(out, to_json(&SeedJson::from(&handle(seed)?.0))))
}

/// # Safety
/// `seed` must come from this library, or be null.
#[no_mangle]
pub unsafe extern "C" fn cox_seed_free(seed: *mut CoxSeed) {
    free(seed)
}

/// Parameters of the point of `to`'s cell with the same Weyl function.
///
/// # Safety
/// Handles must be live.
#[no_mangle]
pub unsafe extern "C" fn cox_gbd(
    from: *const CoxPair,
    to: *const CoxPair,
    params: *const CoxParams,
    route: CoxGbdRoute,
    out: *mut *mut CoxParams,
) -> CoxStatus {
    guard(|| {
        let req = GbdRequest::new(handle(from)?.0.clone(), handle(to)?.0.clone(), handle(params)?.0.clone())?;
        let p = match route {
            CoxGbdRoute::Cluster => sigma_cluster(&req)?,
            CoxGbdRoute::Table => sigma_table_path(&req)?,
            CoxGbdRoute::Minors => sigma_minors(&req)?,
        };
        put(out, CoxParams(p))
    })
}

unsafe fn state(pair: &CoxeterPair, c: *const f64, d: *const f64) -> FfiResult<FlowState> {
    let n = pair.n();
    Ok(FlowState::new(pair, slice(c, n - 1)?.to_vec(), slice(d, n)?.to_vec())?)
}

unsafe fn write_state(s: &FlowState, c: *mut f64, d: *mut f64) -> FfiResult<()> {
    if c.is_null() || d.is_null() {
        return Err(null());
    }
    ptr::copy_nonoverlapping(s.c.as_ptr(), c, s.c.len());
    ptr::copy_nonoverlapping(s.d.as_ptr(), d, s.d.len());
    Ok(())
}

/// `F_k = tr(X^k)/k` at reduced coordinates `c` (n−1), `d` (n).
///
/// # Safety
/// Arrays must have the stated lengths; `pair` must be live.
#[no_mangle]
pub unsafe extern "C" fn cox_hamiltonian(
    pair: *const CoxPair,
    c: *const f64,
    d: *const f64,
    k: u32,
    out: *mut f64,
) -> CoxStatus {
    guard(|| {
        let pair = &handle(pair)?.0;
        let v = hamiltonian_fk(pair, &state(pair, c, d)?, k)?;
        out.as_mut().map(|o| *o = v).ok_or_else(null)
    })
}

/// RK4 on the `k`-th flow to `t_end`; writes the final state into
/// `c_out`, `d_out`.
///
/// # Safety
/// Arrays must have the stated lengths; `pair` must be live.
#[no_mangle]
pub unsafe extern "C" fn cox_flow_rk4(
    pair: *const CoxPair,
    c: *const f64,
    d: *const f64,
    k: u32,
    t_end: f64,
    dt: f64,
    c_out: *mut f64,
    d_out: *mut f64,
) -> CoxStatus {
    guard(|| {
        let pair = &handle(pair)?.0;
        let tr = rk4_flow(pair, &state(pair, c, d)?, k, t_end, dt)?;
        write_state(tr.states.last().expect("at least the start"), c_out, d_out)
    })
}

/// Explicit solution of the `k`-th flow at time `t`.
///
/// # Safety
/// Arrays must have the stated lengths; `pair` must be live.
#[no_mangle]
pub unsafe extern "C" fn cox_flow_moment(
    pair: *const CoxPair,
    c: *const f64,
    d: *const f64,
    k: u32,
    t: f64,
    c_out: *mut f64,
    d_out: *mut f64,
) -> CoxStatus {
    guard(|| {
        let pair = &handle(pair)?.0;
        write_state(&moment_flow_state(pair, &state(pair, c, d)?, k, t)?, c_out, d_out)
    })
}

/// Runs a verification suite (`"all"` for every suite). `n = 0` and
/// `trials = 0` select the defaults. `passed` receives 1 if every trial
/// passed.
///
/// # Safety
/// `suite` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn cox_verify(
    suite: *const c_char,
    n: usize,
    trials: usize,
    seed: u64,
    report: *mut *mut c_char,
    passed: *mut i32,
) -> CoxStatus {
    guard(|| {
        let config = Config { seed, ..Config::default() };
        let opts = VerifyOptions { n: (n > 0).then_some(n), trials: (trials > 0).then_some(trials), config };
        let reports = run(cstr(suite)?, &opts)?;
        if let Some(p) = passed.as_mut() {
            *p = i32::from(reports.iter().all(|r| r.passed()));
        }
        put_string(report, report_json(&reports).to_string())
    })
}
