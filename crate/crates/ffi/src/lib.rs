//! C interface to the hemsim library.
//!
//! Handles are opaque pointers owned by the caller and released through the
//! matching `_free` function. Every fallible call returns a status code;
//! on failure, `hemsim_last_error` describes what went wrong. Money values
//! cross the boundary as integer ten-thousandths of a cent, resilience as
//! integer ten-thousandths of a percent, so no caller ever sees a rounded
//! float.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use hemsim::attack::AttackSpec;
use hemsim::builtin;
use hemsim::files::{household_from_str, tariff_from_str, FileErrorKind};
use hemsim::harness::{resilience_index, run_experiment, BillingMode, ExperimentError};
use hemsim::model::{HouseholdScenario, Season, TariffDay};
use hemsim::money::Money;
use hemsim::optim::{GaParams, HsaParams, OptimizeError, OptimizerSpec};

/// Result of every fallible call. Matches the command-line exit codes where
/// the cause is the same kind of problem.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HemsimStatus {
    /// The call succeeded.
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// Unparseable or invalid input: bad TOML, bad attack text, bad
    /// parameters, or an undefined resilience index.
    InvalidInput = 2,
    /// The input parsed but no feasible schedule satisfies it.
    Infeasible = 3,
    /// The library broke one of its own invariants; report this.
    Internal = 4,
    /// The exhaustive search space exceeds the given limit.
    TooLarge = 5,
}

/// Outcome of one optimizer run.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HemsimRunSummary {
    /// Scheduled day cost, in ten-thousandths of a cent.
    pub total_cost: i64,
    /// Schedules priced while searching.
    pub evaluations: u64,
    /// Seed the run used; zero for seedless optimizers.
    pub seed: u64,
}

/// Outcome of one clean-versus-attacked experiment pair.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HemsimAttackSummary {
    /// Billed cost of the clean leg, in ten-thousandths of a cent.
    pub clean_cost: i64,
    /// Billed cost of the attacked leg, in ten-thousandths of a cent.
    pub attacked_cost: i64,
    /// Resilience index, in ten-thousandths of a percent; 1000000 is full
    /// resilience.
    pub resilience: i64,
}

pub const HEMSIM_SEASON_SUMMER: u32 = 0;
pub const HEMSIM_SEASON_WINTER: u32 = 1;

pub const HEMSIM_OPTIMIZER_BASELINE: u32 = 0;
pub const HEMSIM_OPTIMIZER_GA: u32 = 1;
pub const HEMSIM_OPTIMIZER_HSA: u32 = 2;
pub const HEMSIM_OPTIMIZER_ORACLE: u32 = 3;

pub const HEMSIM_BILLING_TRUE_TARIFF: u32 = 0;
pub const HEMSIM_BILLING_FORGED_TARIFF: u32 = 1;

/// Owned household scenario handle.
pub struct HemsimScenario(HouseholdScenario);

/// Owned tariff handle.
pub struct HemsimTariff(TariffDay);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn fail(status: HemsimStatus, message: impl ToString) -> HemsimStatus {
    let text = message.to_string().replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(text).expect("interior NULs stripped");
    });
    status
}

/// Runs an FFI body with a panic barrier; a panic becomes `Internal` instead
/// of unwinding across the C boundary.
fn guarded(body: impl FnOnce() -> HemsimStatus) -> HemsimStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(panic) => {
            let text = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".to_string());
            fail(HemsimStatus::Internal, format!("panic: {text}"))
        }
    }
}

/// Null-checks and decodes a C string as UTF-8.
///
/// # Safety
/// `text` must be null or point to a NUL-terminated string.
unsafe fn read_str<'a>(text: *const c_char, what: &str) -> Result<&'a str, HemsimStatus> {
    if text.is_null() {
        return Err(fail(HemsimStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(text)
        .to_str()
        .map_err(|_| fail(HemsimStatus::InvalidInput, format!("{what} is not UTF-8")))
}

fn load_status(kind: FileErrorKind) -> HemsimStatus {
    match kind {
        FileErrorKind::Parse => HemsimStatus::InvalidInput,
        FileErrorKind::Infeasible => HemsimStatus::Infeasible,
    }
}

fn optimize_status(err: &OptimizeError) -> HemsimStatus {
    match err {
        OptimizeError::InvalidParams(_) => HemsimStatus::InvalidInput,
        OptimizeError::SearchSpaceTooLarge(_) => HemsimStatus::TooLarge,
        OptimizeError::Internal(_) => HemsimStatus::Internal,
    }
}

fn build_spec(optimizer: u32, seed: u64, oracle_limit: u64) -> Result<OptimizerSpec, HemsimStatus> {
    let spec = match optimizer {
        HEMSIM_OPTIMIZER_BASELINE => OptimizerSpec::Baseline,
        HEMSIM_OPTIMIZER_GA => OptimizerSpec::Ga(GaParams { seed, ..GaParams::default() }),
        HEMSIM_OPTIMIZER_HSA => OptimizerSpec::Hsa(HsaParams { seed, ..HsaParams::default() }),
        HEMSIM_OPTIMIZER_ORACLE => OptimizerSpec::Oracle { limit: oracle_limit },
        other => {
            return Err(fail(
                HemsimStatus::InvalidInput,
                format!("unknown optimizer code {other}"),
            ))
        }
    };
    Ok(spec)
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hemsim_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message for the most recent failure on this thread. Empty until a call
/// fails; the pointer stays valid until the next failing call on the same
/// thread.
#[no_mangle]
pub extern "C" fn hemsim_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Builds the bundled reference household.
///
/// # Safety
/// `out` must point to writable scenario-pointer storage.
#[no_mangle]
pub unsafe extern "C" fn hemsim_scenario_builtin(out: *mut *mut HemsimScenario) -> HemsimStatus {
    guarded(|| {
        if out.is_null() {
            return fail(HemsimStatus::NullPointer, "out is null");
        }
        *out = Box::into_raw(Box::new(HemsimScenario(builtin::household())));
        HemsimStatus::Ok
    })
}

/// Parses a household scenario from TOML text.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` must point to writable
/// scenario-pointer storage.
#[no_mangle]
pub unsafe extern "C" fn hemsim_scenario_from_toml(
    text: *const c_char,
    out: *mut *mut HemsimScenario,
) -> HemsimStatus {
    guarded(|| {
        if out.is_null() {
            return fail(HemsimStatus::NullPointer, "out is null");
        }
        let text = match read_str(text, "scenario text") {
            Ok(text) => text,
            Err(status) => return status,
        };
        match household_from_str(text) {
            Ok(scenario) => {
                *out = Box::into_raw(Box::new(HemsimScenario(scenario)));
                HemsimStatus::Ok
            }
            Err(err) => fail(load_status(err.kind), err),
        }
    })
}

/// Releases a scenario handle. Null is a no-op.
///
/// # Safety
/// `scenario` must be null or a pointer returned by a scenario constructor,
/// released at most once.
#[no_mangle]
pub unsafe extern "C" fn hemsim_scenario_free(scenario: *mut HemsimScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Builds a bundled seasonal tariff.
///
/// # Safety
/// `out` must point to writable tariff-pointer storage.
#[no_mangle]
pub unsafe extern "C" fn hemsim_tariff_builtin(
    season: u32,
    out: *mut *mut HemsimTariff,
) -> HemsimStatus {
    guarded(|| {
        if out.is_null() {
            return fail(HemsimStatus::NullPointer, "out is null");
        }
        let season = match season {
            HEMSIM_SEASON_SUMMER => Season::Summer,
            HEMSIM_SEASON_WINTER => Season::Winter,
            other => {
                return fail(
                    HemsimStatus::InvalidInput,
                    format!("unknown season code {other}"),
                )
            }
        };
        *out = Box::into_raw(Box::new(HemsimTariff(builtin::tariff(season))));
        HemsimStatus::Ok
    })
}

/// Parses a tariff day from TOML text.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` must point to writable
/// tariff-pointer storage.
#[no_mangle]
pub unsafe extern "C" fn hemsim_tariff_from_toml(
    text: *const c_char,
    out: *mut *mut HemsimTariff,
) -> HemsimStatus {
    guarded(|| {
        if out.is_null() {
            return fail(HemsimStatus::NullPointer, "out is null");
        }
        let text = match read_str(text, "tariff text") {
            Ok(text) => text,
            Err(status) => return status,
        };
        match tariff_from_str(text) {
            Ok(tariff) => {
                *out = Box::into_raw(Box::new(HemsimTariff(tariff)));
                HemsimStatus::Ok
            }
            Err(err) => fail(load_status(err.kind), err),
        }
    })
}

/// Releases a tariff handle. Null is a no-op.
///
/// # Safety
/// `tariff` must be null or a pointer returned by a tariff constructor,
/// released at most once.
#[no_mangle]
pub unsafe extern "C" fn hemsim_tariff_free(tariff: *mut HemsimTariff) {
    if !tariff.is_null() {
        drop(Box::from_raw(tariff));
    }
}

/// Runs one optimizer over the scenario and tariff. `seed` steers the
/// seeded optimizers and is ignored by the rest; `oracle_limit` caps the
/// exhaustive search and is ignored by the rest.
///
/// # Safety
/// `scenario` and `tariff` must be live handles from this library and `out`
/// must point to writable summary storage.
#[no_mangle]
pub unsafe extern "C" fn hemsim_optimize(
    scenario: *const HemsimScenario,
    tariff: *const HemsimTariff,
    optimizer: u32,
    seed: u64,
    oracle_limit: u64,
    out: *mut HemsimRunSummary,
) -> HemsimStatus {
    guarded(|| {
        if scenario.is_null() || tariff.is_null() || out.is_null() {
            return fail(HemsimStatus::NullPointer, "scenario, tariff and out are required");
        }
        let spec = match build_spec(optimizer, seed, oracle_limit) {
            Ok(spec) => spec,
            Err(status) => return status,
        };
        match spec.run(&(*scenario).0, &(*tariff).0) {
            Ok(result) => {
                *out = HemsimRunSummary {
                    total_cost: result.cost.total.0,
                    evaluations: result.evaluations,
                    seed: result.seed,
                };
                HemsimStatus::Ok
            }
            Err(err) => fail(optimize_status(&err), err),
        }
    })
}

/// Runs a clean leg and a leg on the forged tariff, then scores resilience.
/// `attacks` is one or more compact attack expressions separated by
/// semicolons, applied in order. Billing selects which tariff prices the
/// attacked schedule.
///
/// # Safety
/// `scenario` and `tariff` must be live handles from this library,
/// `attacks` must be a NUL-terminated string, and `out` must point to
/// writable summary storage.
#[no_mangle]
pub unsafe extern "C" fn hemsim_attack_experiment(
    scenario: *const HemsimScenario,
    tariff: *const HemsimTariff,
    attacks: *const c_char,
    optimizer: u32,
    seed: u64,
    oracle_limit: u64,
    billing: u32,
    out: *mut HemsimAttackSummary,
) -> HemsimStatus {
    guarded(|| {
        if scenario.is_null() || tariff.is_null() || out.is_null() {
            return fail(HemsimStatus::NullPointer, "scenario, tariff and out are required");
        }
        let text = match read_str(attacks, "attack text") {
            Ok(text) => text,
            Err(status) => return status,
        };
        let mut parsed: Vec<AttackSpec> = Vec::new();
        for part in text.split(';') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            match part.parse() {
                Ok(attack) => parsed.push(attack),
                Err(err) => return fail(HemsimStatus::InvalidInput, err),
            }
        }
        if parsed.is_empty() {
            return fail(HemsimStatus::InvalidInput, "attack text names no attacks");
        }
        let billing = match billing {
            HEMSIM_BILLING_TRUE_TARIFF => BillingMode::TrueTariff,
            HEMSIM_BILLING_FORGED_TARIFF => BillingMode::ForgedTariff,
            other => {
                return fail(
                    HemsimStatus::InvalidInput,
                    format!("unknown billing code {other}"),
                )
            }
        };
        let spec = match build_spec(optimizer, seed, oracle_limit) {
            Ok(spec) => spec,
            Err(status) => return status,
        };
        match run_experiment(&(*scenario).0, &(*tariff).0, &parsed, &spec, billing) {
            Ok(report) => {
                *out = HemsimAttackSummary {
                    clean_cost: report.clean_total().0,
                    attacked_cost: report.attacked_total().0,
                    resilience: report.ri_total.0,
                };
                HemsimStatus::Ok
            }
            Err(err) => {
                let status = match &err {
                    ExperimentError::Optimize(e) => optimize_status(e),
                    ExperimentError::Attack(_)
                    | ExperimentError::UndefinedRi(_)
                    | ExperimentError::NoSeeds => HemsimStatus::InvalidInput,
                };
                fail(status, err)
            }
        }
    })
}

/// Scores an attacked cost against a clean cost, both in ten-thousandths of
/// a cent, writing the index in ten-thousandths of a percent. Fails when the
/// clean cost is zero, where the index is undefined.
///
/// # Safety
/// `out` must point to writable storage.
#[no_mangle]
pub unsafe extern "C" fn hemsim_resilience_index(
    attacked_cost: i64,
    clean_cost: i64,
    out: *mut i64,
) -> HemsimStatus {
    guarded(|| {
        if out.is_null() {
            return fail(HemsimStatus::NullPointer, "out is null");
        }
        match resilience_index(Money(attacked_cost), Money(clean_cost)) {
            Ok(ri) => {
                *out = ri.0;
                HemsimStatus::Ok
            }
            Err(err) => fail(HemsimStatus::InvalidInput, err),
        }
    })
}
