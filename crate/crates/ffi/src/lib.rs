//! C ABI over `seqshare`.
//!
//! Every fallible function returns a [`SeqshareStatus`]; on failure the
//! message is available from [`seqshare_last_error`] on the same thread.
//! Strategies, channels and state families are passed as the integer
//! constants below.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use seqshare::analysis::solve_double_violation;
use seqshare::closedform::{gamma_sequence, witness_closed};
use seqshare::{run_protocol, ChannelKind, Error, NoisyChannel, Scenario, ScenarioClass, StateFamily, Strategy, StrategyTag};

pub const SEQSHARE_STATE_BELL: u32 = 0;
pub const SEQSHARE_STATE_GHZ: u32 = 1;
pub const SEQSHARE_STATE_W: u32 = 2;
pub const SEQSHARE_STATE_GHZ_PRIME: u32 = 3;
pub const SEQSHARE_STATE_W_PRIME: u32 = 4;

pub const SEQSHARE_MS1: u32 = 1;
pub const SEQSHARE_MS2: u32 = 2;
pub const SEQSHARE_MS3: u32 = 3;
pub const SEQSHARE_MS4: u32 = 4;
pub const SEQSHARE_MS5: u32 = 5;
pub const SEQSHARE_MS6: u32 = 6;

pub const SEQSHARE_CHANNEL_PHASE_FLIP: u32 = 0;
pub const SEQSHARE_CHANNEL_BIT_FLIP: u32 = 1;
pub const SEQSHARE_CHANNEL_DEPOLARIZING: u32 = 2;
pub const SEQSHARE_CHANNEL_NOISELESS: u32 = 3;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeqshareStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// No parameter value achieves the request.
    Infeasible = 3,
    BufferTooSmall = 4,
    Internal = 5,
}

/// Opaque protocol configuration.
pub struct SeqshareScenario {
    inner: Scenario,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SeqshareDoubleViolation {
    pub theta: f64,
    pub epsilon: f64,
    pub gamma1: f64,
    pub witness1: f64,
    pub witness2: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

fn fail(status: SeqshareStatus, msg: impl Into<String>) -> SeqshareStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> SeqshareStatus {
    let status = match e {
        Error::NoRoot { .. } => SeqshareStatus::Infeasible,
        _ => SeqshareStatus::InvalidArgument,
    };
    fail(status, e.to_string())
}

fn guard(f: impl FnOnce() -> Result<(), SeqshareStatus>) -> SeqshareStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            SeqshareStatus::Ok
        }
        Ok(Err(status)) => status,
        Err(_) => fail(SeqshareStatus::Internal, "internal panic"),
    }
}

fn state(code: u32) -> Result<StateFamily, SeqshareStatus> {
    StateFamily::ALL
        .get(code as usize)
        .copied()
        .ok_or_else(|| fail(SeqshareStatus::InvalidArgument, format!("unknown state family {code}")))
}

fn strategy(code: u32) -> Result<StrategyTag, SeqshareStatus> {
    (code as usize)
        .checked_sub(1)
        .and_then(|i| StrategyTag::ALL.get(i).copied())
        .ok_or_else(|| fail(SeqshareStatus::InvalidArgument, format!("unknown strategy {code}")))
}

fn channel(code: u32) -> Result<ChannelKind, SeqshareStatus> {
    ChannelKind::ALL
        .get(code as usize)
        .copied()
        .ok_or_else(|| fail(SeqshareStatus::InvalidArgument, format!("unknown channel {code}")))
}

fn class(strategy_code: u32, channel_code: u32) -> Result<ScenarioClass, SeqshareStatus> {
    Ok(ScenarioClass::new(strategy(strategy_code)?, channel(channel_code)?))
}

/// # Safety
/// `ptr` must be null only when `len` is 0, otherwise valid for `len` reads.
unsafe fn doubles<'a>(ptr: *const f64, len: usize) -> Result<&'a [f64], SeqshareStatus> {
    if len == 0 {
        Ok(&[])
    } else if ptr.is_null() {
        Err(fail(SeqshareStatus::NullPointer, "null array"))
    } else {
        Ok(slice::from_raw_parts(ptr, len))
    }
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), SeqshareStatus> {
    if p.is_null() {
        Err(fail(SeqshareStatus::NullPointer, format!("{what} is null")))
    } else {
        Ok(())
    }
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn seqshare_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn seqshare_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a scenario with `n_gammas` sequential observers.
///
/// # Safety
/// `gammas` must point to `n_gammas` doubles; `out` must be writable.
/// Release the handle with [`seqshare_scenario_free`].
#[no_mangle]
pub unsafe extern "C" fn seqshare_scenario_new(
    state_family: u32,
    strategy_tag: u32,
    channel_kind: u32,
    p: f64,
    theta: f64,
    gammas: *const f64,
    n_gammas: usize,
    out: *mut *mut SeqshareScenario,
) -> SeqshareStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = ptr::null_mut();
        let g = doubles(gammas, n_gammas)?.to_vec();
        let strategy = Strategy::new(strategy(strategy_tag)?, theta, g).map_err(from_error)?;
        let ch = NoisyChannel::new(channel(channel_kind)?, p).map_err(from_error)?;
        let inner = Scenario::new(state(state_family)?, strategy, ch, n_gammas).map_err(from_error)?;
        *out = Box::into_raw(Box::new(SeqshareScenario { inner }));
        Ok(())
    })
}

/// # Safety
/// `scenario` must come from [`seqshare_scenario_new`] and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn seqshare_scenario_free(scenario: *mut SeqshareScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Number of sequential observers, or 0 for a null handle.
///
/// # Safety
/// `scenario` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn seqshare_scenario_observers(scenario: *const SeqshareScenario) -> usize {
    scenario.as_ref().map_or(0, |s| s.inner.n_observers())
}

/// Runs the protocol and writes one witness per observer into `out`.
///
/// # Safety
/// `scenario` must be a live handle and `out` valid for `capacity` writes.
#[no_mangle]
pub unsafe extern "C" fn seqshare_scenario_run(
    scenario: *const SeqshareScenario,
    out: *mut f64,
    capacity: usize,
) -> SeqshareStatus {
    guard(|| {
        non_null(scenario, "scenario")?;
        non_null(out, "out")?;
        let sc = &(*scenario).inner;
        if capacity < sc.n_observers() {
            return Err(fail(SeqshareStatus::BufferTooSmall, format!("need {} slots, got {capacity}", sc.n_observers())));
        }
        let trace = run_protocol(sc).map_err(from_error)?;
        slice::from_raw_parts_mut(out, trace.values.len()).copy_from_slice(&trace.values);
        Ok(())
    })
}

/// Closed-form witness of observer `k` (1-based).
///
/// # Safety
/// `gammas` must point to `n_gammas` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn seqshare_witness_closed(
    strategy_tag: u32,
    channel_kind: u32,
    k: usize,
    theta: f64,
    gammas: *const f64,
    n_gammas: usize,
    p: f64,
    out: *mut f64,
) -> SeqshareStatus {
    guard(|| {
        non_null(out, "out")?;
        let g = doubles(gammas, n_gammas)?;
        *out = witness_closed(class(strategy_tag, channel_kind)?, k, theta, g, p).map_err(from_error)?;
        Ok(())
    })
}

/// Minimal sharpness sequence for margin `epsilon`. Entries past the feasible
/// prefix are written as `INFINITY`; `feasible` receives the prefix length.
///
/// # Safety
/// `out` must be valid for `n` writes and `feasible` writable.
#[no_mangle]
pub unsafe extern "C" fn seqshare_gamma_sequence(
    strategy_tag: u32,
    channel_kind: u32,
    theta: f64,
    epsilon: f64,
    p: f64,
    n: usize,
    out: *mut f64,
    feasible: *mut usize,
) -> SeqshareStatus {
    guard(|| {
        non_null(feasible, "feasible")?;
        if n > 0 {
            non_null(out, "out")?;
        }
        let seq = gamma_sequence(class(strategy_tag, channel_kind)?, theta, epsilon, p, n).map_err(from_error)?;
        let dst = if n == 0 { &mut [][..] } else { slice::from_raw_parts_mut(out, n) };
        for (d, e) in dst.iter_mut().zip(&seq.entries) {
            *d = e.finite().unwrap_or(f64::INFINITY);
        }
        *feasible = seq.feasible_len();
        Ok(())
    })
}

/// Margin that makes the second observer's required sharpness exactly 1.
/// Returns `Infeasible` when no margin works.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn seqshare_solve_double_violation(
    strategy_tag: u32,
    channel_kind: u32,
    theta: f64,
    p: f64,
    out: *mut SeqshareDoubleViolation,
) -> SeqshareStatus {
    guard(|| {
        non_null(out, "out")?;
        let s = solve_double_violation(class(strategy_tag, channel_kind)?, theta, p).map_err(from_error)?;
        *out = SeqshareDoubleViolation {
            theta: s.theta,
            epsilon: s.epsilon,
            gamma1: s.gamma1,
            witness1: s.witness1,
            witness2: s.witness2,
        };
        Ok(())
    })
}
