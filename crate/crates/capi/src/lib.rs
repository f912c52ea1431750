//! C ABI over the audit5s core.
//!
//! Exposes the stable, allocation-light entry points other languages
//! need: reply parsing and scoring, grade-band classification, the
//! Landis-Koch lookup, Cohen's kappa over an opaque confusion-matrix
//! handle, and the audit cost model. Strings returned as `*mut c_char`
//! must be released with `audit5s_string_free`; matrix handles with
//! `audit5s_matrix_free`. All other returned pointers are static.

use std::ffi::{c_char, CStr, CString};

use audit5s::domain::{classify, interpret_kappa, Classification};
use audit5s::economics::{evaluate_scenario, EconomicScenario, Money};
use audit5s::engine::{aggregate, build_prompt, parse_response};
use audit5s::stats::{class_metrics, cohen_kappa, CiMethod, ConfusionMatrix, StatsError};

/// Call outcome. Anything other than `Ok` leaves out-parameters
/// untouched.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Audit5sStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// The statistic is undefined for this input (e.g. chance agreement
    /// is exactly 1).
    Degenerate = 3,
}

/// Final grade band.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Audit5sClass {
    J = 0,
    K = 1,
    L = 2,
}

impl Audit5sClass {
    fn from_domain(c: Classification) -> Audit5sClass {
        match c {
            Classification::J => Audit5sClass::J,
            Classification::K => Audit5sClass::K,
            Classification::L => Audit5sClass::L,
        }
    }
}

/// One parsed and aggregated evaluation. Sense order is Seiri, Seiton,
/// Seiso, Seiketsu, Shitsuke. `points[i] == 0` marks a score that could
/// not be extracted (`extracted[i]` is false).
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct Audit5sEvaluation {
    pub points: [u8; 5],
    pub extracted: [bool; 5],
    pub total_points: u8,
    pub final_percent: u8,
    pub classification: Audit5sClass,
    pub parse_complete: bool,
}

/// Cohen's kappa with its ingredients. `label` is a static string.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct Audit5sAgreement {
    pub p_observed: f64,
    pub p_expected: f64,
    pub kappa: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub label: *const c_char,
}

/// Cost-model inputs, all currency amounts in integer cents.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct Audit5sScenario {
    pub manual_cost_cents: i64,
    pub automated_cost_cents: i64,
    pub audits_per_month: u32,
    pub manual_minutes_per_audit: u32,
    pub automated_minutes_per_audit: u32,
    pub investment_cents: i64,
    pub hourly_rate_cents: i64,
}

/// Cost-model outputs. `roi_year1_percent` is NaN when the investment
/// is zero; `payback_months` is +infinity when savings are not positive.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct Audit5sEconomics {
    pub monthly_savings_cents: i64,
    pub annual_savings_cents: i64,
    pub roi_year1_percent: f64,
    pub payback_months: f64,
    pub cost_reduction_percent: f64,
    pub time_saved_hours_per_month: f64,
    pub freed_capacity_cents: i64,
}

/// Incrementally built 3x3 confusion matrix (system rows, human
/// columns). Opaque; create with `audit5s_matrix_new`, release with
/// `audit5s_matrix_free`.
pub struct Audit5sMatrix {
    counts: [[u64; 3]; 3],
}

const LABEL_C_STRINGS: [(&str, &[u8]); 6] = [
    ("Poor agreement", b"Poor agreement\0"),
    ("Slight agreement", b"Slight agreement\0"),
    ("Fair agreement", b"Fair agreement\0"),
    ("Moderate agreement", b"Moderate agreement\0"),
    ("Substantial agreement", b"Substantial agreement\0"),
    ("Almost perfect agreement", b"Almost perfect agreement\0"),
];

fn label_ptr(label: &str) -> *const c_char {
    LABEL_C_STRINGS
        .iter()
        .find(|(name, _)| *name == label)
        .map(|(_, bytes)| bytes.as_ptr() as *const c_char)
        .unwrap_or(std::ptr::null())
}

/// Crate version as a static string.
#[no_mangle]
pub extern "C" fn audit5s_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Map a final percentage (0..=100) to its grade band.
/// # Safety
/// `out_class` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn audit5s_classify(
    final_percent: u8,
    out_class: *mut Audit5sClass,
) -> Audit5sStatus {
    if out_class.is_null() {
        return Audit5sStatus::NullPointer;
    }
    match classify(final_percent) {
        Ok(class) => {
            unsafe { *out_class = Audit5sClass::from_domain(class) };
            Audit5sStatus::Ok
        }
        Err(_) => Audit5sStatus::InvalidArgument,
    }
}

/// Landis-Koch verbal band for a kappa in [-1, 1]. The returned label
/// is static; do not free it.
/// # Safety
/// `out_label` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn audit5s_interpret_kappa(
    kappa: f64,
    out_label: *mut *const c_char,
) -> Audit5sStatus {
    if out_label.is_null() {
        return Audit5sStatus::NullPointer;
    }
    match interpret_kappa(kappa) {
        Ok(band) => {
            unsafe { *out_label = label_ptr(band.label) };
            Audit5sStatus::Ok
        }
        Err(_) => Audit5sStatus::InvalidArgument,
    }
}

/// Render the default audit prompt. Free with `audit5s_string_free`.
#[no_mangle]
pub extern "C" fn audit5s_default_prompt() -> *mut c_char {
    CString::new(build_prompt())
        .expect("prompt has no interior NUL")
        .into_raw()
}

/// Release a string returned by this library.
/// # Safety
/// `text` must be NULL or a pointer previously returned by this library.
#[no_mangle]
pub unsafe extern "C" fn audit5s_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(unsafe { CString::from_raw(text) });
    }
}

/// Parse a model reply (NUL-terminated, UTF-8; invalid bytes are
/// replaced) and aggregate it into an evaluation. Total: any text
/// yields five scores, with unusable criteria defaulted to 0.
/// # Safety
/// `text` must be NULL or NUL-terminated; `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn audit5s_parse_response(
    text: *const c_char,
    out: *mut Audit5sEvaluation,
) -> Audit5sStatus {
    if text.is_null() || out.is_null() {
        return Audit5sStatus::NullPointer;
    }
    let reply = unsafe { CStr::from_ptr(text) }.to_string_lossy();
    let evaluation = aggregate(&parse_response(&reply));
    let result = Audit5sEvaluation {
        points: evaluation.scores.map(|s| s.points),
        extracted: evaluation.scores.map(|s| s.extracted),
        total_points: evaluation.total_points,
        final_percent: evaluation.final_percent,
        classification: Audit5sClass::from_domain(evaluation.classification),
        parse_complete: evaluation.parse_complete,
    };
    unsafe { *out = result };
    Audit5sStatus::Ok
}

/// New empty confusion matrix.
#[no_mangle]
pub extern "C" fn audit5s_matrix_new() -> *mut Audit5sMatrix {
    Box::into_raw(Box::new(Audit5sMatrix {
        counts: [[0; 3]; 3],
    }))
}

/// Build a matrix from nine row-major counts (system rows J,K,L by
/// human columns J,K,L). Returns NULL if counts is NULL.
/// # Safety
/// `counts` must be NULL or point to nine readable u64 values.
#[no_mangle]
pub unsafe extern "C" fn audit5s_matrix_from_counts(counts: *const u64) -> *mut Audit5sMatrix {
    if counts.is_null() {
        return std::ptr::null_mut();
    }
    let cells = unsafe { std::slice::from_raw_parts(counts, 9) };
    let mut matrix = [[0u64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            matrix[i][j] = cells[i * 3 + j];
        }
    }
    Box::into_raw(Box::new(Audit5sMatrix { counts: matrix }))
}

/// Add `count` paired observations to a cell.
/// # Safety
/// `matrix` must be NULL or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn audit5s_matrix_add(
    matrix: *mut Audit5sMatrix,
    system: Audit5sClass,
    human: Audit5sClass,
    count: u64,
) -> Audit5sStatus {
    let Some(matrix) = (unsafe { matrix.as_mut() }) else {
        return Audit5sStatus::NullPointer;
    };
    matrix.counts[system as usize][human as usize] += count;
    Audit5sStatus::Ok
}

/// Release a matrix handle.
/// # Safety
/// `matrix` must be NULL or a live handle from this library; the handle is consumed.
#[no_mangle]
pub unsafe extern "C" fn audit5s_matrix_free(matrix: *mut Audit5sMatrix) {
    if !matrix.is_null() {
        drop(unsafe { Box::from_raw(matrix) });
    }
}

/// Cohen's kappa with the asymptotic 95% interval. `Degenerate` when
/// the matrix is empty or chance agreement is exactly 1.
/// # Safety
/// `matrix` must be NULL or a live handle; `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn audit5s_matrix_kappa(
    matrix: *const Audit5sMatrix,
    out: *mut Audit5sAgreement,
) -> Audit5sStatus {
    let Some(matrix) = (unsafe { matrix.as_ref() }) else {
        return Audit5sStatus::NullPointer;
    };
    if out.is_null() {
        return Audit5sStatus::NullPointer;
    }
    let domain_matrix = match ConfusionMatrix::from_counts(matrix.counts) {
        Ok(m) => m,
        Err(_) => return Audit5sStatus::Degenerate,
    };
    match cohen_kappa(&domain_matrix, CiMethod::Asymptotic) {
        Ok(result) => {
            let agreement = Audit5sAgreement {
                p_observed: result.p_observed,
                p_expected: result.p_expected,
                kappa: result.kappa,
                ci_low: result.ci_low,
                ci_high: result.ci_high,
                label: label_ptr(result.interpretation.label),
            };
            unsafe { *out = agreement };
            Audit5sStatus::Ok
        }
        Err(StatsError::UndefinedKappa) => Audit5sStatus::Degenerate,
        Err(_) => Audit5sStatus::InvalidArgument,
    }
}

/// Overall accuracy (trace over total) of a matrix.
/// # Safety
/// `matrix` must be NULL or a live handle; `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn audit5s_matrix_accuracy(
    matrix: *const Audit5sMatrix,
    out: *mut f64,
) -> Audit5sStatus {
    let Some(matrix) = (unsafe { matrix.as_ref() }) else {
        return Audit5sStatus::NullPointer;
    };
    if out.is_null() {
        return Audit5sStatus::NullPointer;
    }
    let domain_matrix = match ConfusionMatrix::from_counts(matrix.counts) {
        Ok(m) => m,
        Err(_) => return Audit5sStatus::Degenerate,
    };
    match class_metrics(&domain_matrix) {
        Ok(metrics) => {
            unsafe { *out = metrics.overall_accuracy };
            Audit5sStatus::Ok
        }
        Err(_) => Audit5sStatus::Degenerate,
    }
}

/// Evaluate the audit cost model for one scenario.
/// # Safety
/// `scenario` and `out` must each be NULL or valid for reads/writes respectively.
#[no_mangle]
pub unsafe extern "C" fn audit5s_evaluate_scenario(
    scenario: *const Audit5sScenario,
    out: *mut Audit5sEconomics,
) -> Audit5sStatus {
    let Some(scenario) = (unsafe { scenario.as_ref() }) else {
        return Audit5sStatus::NullPointer;
    };
    if out.is_null() {
        return Audit5sStatus::NullPointer;
    }
    let domain_scenario = EconomicScenario {
        currency: String::new(),
        manual_cost_per_audit: Money::from_cents(scenario.manual_cost_cents),
        automated_cost_per_audit: Money::from_cents(scenario.automated_cost_cents),
        audits_per_month: scenario.audits_per_month,
        manual_minutes_per_audit: scenario.manual_minutes_per_audit,
        automated_minutes_per_audit: scenario.automated_minutes_per_audit,
        initial_investment: Money::from_cents(scenario.investment_cents),
        hourly_rate: Money::from_cents(scenario.hourly_rate_cents),
    };
    match evaluate_scenario(&domain_scenario, 1) {
        Ok(report) => {
            let economics = Audit5sEconomics {
                monthly_savings_cents: report.monthly_savings.cents,
                annual_savings_cents: report.annual_savings.cents,
                roi_year1_percent: report.roi_year1_percent.unwrap_or(f64::NAN),
                payback_months: report.payback_months.unwrap_or(f64::INFINITY),
                cost_reduction_percent: report.cost_reduction_percent,
                time_saved_hours_per_month: report.time_saved_hours_per_month,
                freed_capacity_cents: report.freed_capacity_value.cents,
            };
            unsafe { *out = economics };
            Audit5sStatus::Ok
        }
        Err(_) => Audit5sStatus::InvalidArgument,
    }
}
