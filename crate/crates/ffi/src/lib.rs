//! C ABI for `univtaylor`.
//!
//! Scenarios and series are opaque handles created by `ut_*` constructors and
//! released with the matching `*_free`. Every fallible call returns a
//! [`UtStatus`]; on failure [`ut_last_error`] describes the error of the most
//! recent failing call on the same thread. Strings returned through `char **`
//! out-parameters are owned by the caller and released with
//! [`ut_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use univtaylor::report::Report;
use univtaylor::scenario::{self, ScenarioFile};
use univtaylor::universal::{self, Scenario, UniversalSeries, WitnessStatus};
use univtaylor::verify::{verify_all, VerifyOptions};
use univtaylor::{artifact, Complex64, Error};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UtStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Invariant = 4,
    Inseparable = 5,
    BudgetExceeded = 6,
    Io = 7,
    FingerprintMismatch = 8,
    OutOfRange = 9,
    Other = 10,
    Panic = 11,
}

/// A parsed and validated scenario.
pub struct UtScenario {
    inner: Scenario,
}

/// A built or loaded series.
pub struct UtSeries {
    inner: UniversalSeries,
}

/// One witness row.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UtWitness {
    pub stage: usize,
    pub body: usize,
    pub target: usize,
    pub eps: f64,
    pub lambda: usize,
    pub degree: u32,
    pub cloud_err: f64,
    pub fine_err: f64,
    pub block_l: f64,
    pub met: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> UtStatus {
    match e {
        Error::Parse(_) => UtStatus::Parse,
        Error::Inseparable(_) => UtStatus::Inseparable,
        Error::BudgetExceeded { .. } => UtStatus::BudgetExceeded,
        Error::Io(_) => UtStatus::Io,
        Error::FingerprintMismatch { .. } => UtStatus::FingerprintMismatch,
        Error::IterationLimit(_) => UtStatus::Other,
        _ => UtStatus::Invariant,
    }
}

/// Runs `f`, turning errors and panics into a status and a stored message.
fn guard(f: impl FnOnce() -> Result<(), (UtStatus, String)>) -> UtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => UtStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            UtStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (UtStatus, String) {
    (status_of(&e), e.to_string())
}

fn null_err(what: &str) -> (UtStatus, String) {
    (UtStatus::NullArgument, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (UtStatus, String)> {
    if p.is_null() {
        return Err(null_err(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (UtStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), (UtStatus, String)> {
    let c = CString::new(s).map_err(|_| (UtStatus::Other, "string contains NUL".into()))?;
    *out = c.into_raw();
    Ok(())
}

/// Message of the last failing call on this thread; empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ut_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Static version string.
#[no_mangle]
pub extern "C" fn ut_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn ut_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses and validates a scenario given as JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ut_scenario_from_json(
    json: *const c_char,
    out: *mut *mut UtScenario,
) -> UtStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_err("out"));
        }
        let text = read_str(json, "json")?;
        let s = ScenarioFile::parse(text)
            .and_then(|f| f.to_scenario())
            .map_err(lib_err)?;
        s.validate().map_err(lib_err)?;
        *out = Box::into_raw(Box::new(UtScenario { inner: s }));
        Ok(())
    })
}

/// Reads, parses and validates a scenario file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ut_scenario_load(
    path: *const c_char,
    out: *mut *mut UtScenario,
) -> UtStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_err("out"));
        }
        let p = read_str(path, "path")?;
        let s = scenario::load(Path::new(p)).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(UtScenario { inner: s }));
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn ut_scenario_free(s: *mut UtScenario) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Stage count `T`, or 0 for a null handle.
///
/// # Safety
/// `s` must be null or a live scenario handle.
#[no_mangle]
pub unsafe extern "C" fn ut_scenario_stages(s: *const UtScenario) -> usize {
    s.as_ref().map_or(0, |s| s.inner.stages)
}

/// Builds all stages of the scenario.
///
/// # Safety
/// `s` must be a live scenario handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ut_series_build(
    s: *const UtScenario,
    out: *mut *mut UtSeries,
) -> UtStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null_err("scenario"))?;
        if out.is_null() {
            return Err(null_err("out"));
        }
        let series = universal::build_series(&s.inner).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(UtSeries { inner: series }));
        Ok(())
    })
}

/// Runs `extra` further stages in place. On failure the series is left
/// unchanged.
///
/// # Safety
/// `s` and `series` must be live handles.
#[no_mangle]
pub unsafe extern "C" fn ut_series_extend(
    s: *const UtScenario,
    series: *mut UtSeries,
    extra: usize,
) -> UtStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null_err("scenario"))?;
        let series = series.as_mut().ok_or_else(|| null_err("series"))?;
        let next =
            universal::extend_series(series.inner.clone(), &s.inner, extra).map_err(lib_err)?;
        series.inner = next;
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn ut_series_free(s: *mut UtSeries) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Number of stored coefficients, or 0 for a null handle.
///
/// # Safety
/// `s` must be null or a live series handle.
#[no_mangle]
pub unsafe extern "C" fn ut_series_coefficient_count(s: *const UtSeries) -> usize {
    s.as_ref().map_or(0, |s| s.inner.coefficients.len())
}

/// Coefficient at enumeration rank `rank`.
///
/// # Safety
/// `s` must be a live series handle; `re` and `im` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ut_series_coefficient(
    s: *const UtSeries,
    rank: usize,
    re: *mut f64,
    im: *mut f64,
) -> UtStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null_err("series"))?;
        if re.is_null() || im.is_null() {
            return Err(null_err("re/im"));
        }
        let c = s.inner.coefficients.get(rank).ok_or_else(|| {
            (
                UtStatus::OutOfRange,
                format!(
                    "rank {rank} beyond {} coefficients",
                    s.inner.coefficients.len()
                ),
            )
        })?;
        *re = c.re;
        *im = c.im;
        Ok(())
    })
}

/// Number of recorded stages, or 0 for a null handle.
///
/// # Safety
/// `s` must be null or a live series handle.
#[no_mangle]
pub unsafe extern "C" fn ut_series_witness_count(s: *const UtSeries) -> usize {
    s.as_ref().map_or(0, |s| s.inner.witnesses.len())
}

/// Witness of stage `index + 1`.
///
/// # Safety
/// `s` must be a live series handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ut_series_witness(
    s: *const UtSeries,
    index: usize,
    out: *mut UtWitness,
) -> UtStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null_err("series"))?;
        if out.is_null() {
            return Err(null_err("out"));
        }
        let w = s.inner.witnesses.get(index).ok_or_else(|| {
            (
                UtStatus::OutOfRange,
                format!("witness {index} beyond {}", s.inner.witnesses.len()),
            )
        })?;
        *out = UtWitness {
            stage: w.stage,
            body: w.body,
            target: w.target,
            eps: w.eps,
            lambda: w.lambda,
            degree: w.degree,
            cloud_err: w.cloud_err,
            fine_err: w.fine_err,
            block_l: w.block_l,
            met: w.status == WitnessStatus::Met,
        };
        Ok(())
    })
}

/// Partial sum through rank `lambda` (clamped to the stored prefix) at the
/// point `z`, given as `2n` reals `re₁, im₁, …`.
///
/// # Safety
/// `s` must be a live series handle, `z` must point to `len` doubles and
/// `re`, `im` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ut_series_eval(
    s: *const UtSeries,
    lambda: usize,
    z: *const f64,
    len: usize,
    re: *mut f64,
    im: *mut f64,
) -> UtStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null_err("series"))?;
        if z.is_null() || re.is_null() || im.is_null() {
            return Err(null_err("z/re/im"));
        }
        let n = s.inner.dim();
        if len != 2 * n {
            return Err((
                UtStatus::Invariant,
                format!("point needs {} reals, got {len}", 2 * n),
            ));
        }
        let flat = std::slice::from_raw_parts(z, len);
        let point: Vec<Complex64> = flat.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect();
        let p = s.inner.partial_sum(Some(lambda)).map_err(lib_err)?;
        let v = p.eval(&point);
        *re = v.re;
        *im = v.im;
        Ok(())
    })
}

/// The series artifact text.
///
/// # Safety
/// `s` must be a live series handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ut_series_to_text(s: *const UtSeries, out: *mut *mut c_char) -> UtStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null_err("series"))?;
        if out.is_null() {
            return Err(null_err("out"));
        }
        write_string(out, artifact::to_text(&s.inner))
    })
}

/// Parses series artifact text.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ut_series_from_text(
    text: *const c_char,
    out: *mut *mut UtSeries,
) -> UtStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_err("out"));
        }
        let t = read_str(text, "text")?;
        let series = artifact::from_text(t).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(UtSeries { inner: series }));
        Ok(())
    })
}

/// Verifies the series against the scenario with verification round
/// `round`. Stores the number of failed rows in `failures` and, when
/// `report_csv` is not null, the report CSV (write time 0).
///
/// # Safety
/// `s` and `series` must be live handles, `failures` a valid pointer and
/// `report_csv` null or a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ut_verify(
    s: *const UtScenario,
    series: *const UtSeries,
    round: u64,
    failures: *mut usize,
    report_csv: *mut *mut c_char,
) -> UtStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null_err("scenario"))?;
        let series = series.as_ref().ok_or_else(|| null_err("series"))?;
        if failures.is_null() {
            return Err(null_err("failures"));
        }
        let opts = VerifyOptions {
            grid_factor: s.inner.grid_factor,
            round,
        };
        let v = verify_all(&series.inner, &s.inner, &opts).map_err(lib_err)?;
        let report = Report::new(&s.inner.id, &series.inner.fingerprint, v);
        *failures = report.failures();
        if !report_csv.is_null() {
            write_string(report_csv, report.to_csv(0))?;
        }
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    const SCENARIO: &str = r#"{
        "version": 1,
        "id": "ffi",
        "domain": { "ball": { "center": [0, 0], "radius": 1 } },
        "center": [0, 0],
        "bodies": [ { "hull": [[2, 0], [3, 0]] } ],
        "targets": [ { "terms": [ { "exponents": [0], "re": 1 } ] } ],
        "stages": 2
    }"#;

    fn cstr(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    fn last_error() -> String {
        unsafe { CStr::from_ptr(ut_last_error()) }
            .to_str()
            .unwrap()
            .to_string()
    }

    #[test]
    fn build_inspect_verify() {
        unsafe {
            let mut sc = ptr::null_mut();
            assert_eq!(
                ut_scenario_from_json(cstr(SCENARIO).as_ptr(), &mut sc),
                UtStatus::Ok
            );
            assert_eq!(ut_scenario_stages(sc), 2);
            let mut series = ptr::null_mut();
            assert_eq!(ut_series_build(sc, &mut series), UtStatus::Ok);
            assert_eq!(ut_series_witness_count(series), 2);
            let mut w = std::mem::zeroed::<UtWitness>();
            assert_eq!(ut_series_witness(series, 1, &mut w), UtStatus::Ok);
            assert!(w.met);
            assert_eq!(w.stage, 2);
            assert_eq!(ut_series_coefficient_count(series), w.lambda + 1);

            let z = [2.5, 0.0];
            let (mut re, mut im) = (0.0, 0.0);
            assert_eq!(
                ut_series_eval(series, w.lambda, z.as_ptr(), 2, &mut re, &mut im),
                UtStatus::Ok
            );
            assert!((Complex64::new(re, im) - Complex64::new(1.0, 0.0)).norm() <= w.eps);
            assert_eq!(
                ut_series_eval(series, w.lambda, z.as_ptr(), 4, &mut re, &mut im),
                UtStatus::Invariant
            );

            let mut fails = usize::MAX;
            let mut csv = ptr::null_mut();
            assert_eq!(ut_verify(sc, series, 0, &mut fails, &mut csv), UtStatus::Ok);
            assert_eq!(fails, 0);
            let text = CStr::from_ptr(csv).to_str().unwrap().to_string();
            assert!(text.starts_with("# written at unix time 0"));
            ut_string_free(csv);

            ut_series_free(series);
            ut_scenario_free(sc);
        }
    }

    #[test]
    fn text_round_trip_and_extend() {
        unsafe {
            let mut sc = ptr::null_mut();
            assert_eq!(
                ut_scenario_from_json(cstr(SCENARIO).as_ptr(), &mut sc),
                UtStatus::Ok
            );
            let mut whole = ptr::null_mut();
            assert_eq!(ut_series_build(sc, &mut whole), UtStatus::Ok);

            let mut text = ptr::null_mut();
            assert_eq!(ut_series_to_text(whole, &mut text), UtStatus::Ok);
            let mut back = ptr::null_mut();
            assert_eq!(ut_series_from_text(text, &mut back), UtStatus::Ok);
            assert_eq!((*back).inner, (*whole).inner);
            ut_string_free(text);

            let one = CString::new(SCENARIO.replace("\"stages\": 2", "\"stages\": 1")).unwrap();
            let mut sc1 = ptr::null_mut();
            assert_eq!(ut_scenario_from_json(one.as_ptr(), &mut sc1), UtStatus::Ok);
            let mut part = ptr::null_mut();
            assert_eq!(ut_series_build(sc1, &mut part), UtStatus::Ok);
            assert_eq!(ut_series_extend(sc, part, 1), UtStatus::Ok);
            assert_eq!((*part).inner, (*whole).inner);

            for h in [whole, back, part] {
                ut_series_free(h);
            }
            ut_scenario_free(sc);
            ut_scenario_free(sc1);
        }
    }

    #[test]
    fn errors_carry_codes_and_messages() {
        unsafe {
            let mut sc = ptr::null_mut();
            assert_eq!(
                ut_scenario_from_json(cstr("{").as_ptr(), &mut sc),
                UtStatus::Parse
            );
            assert!(last_error().contains("scenario"));
            let inside = SCENARIO.replace("[[2, 0], [3, 0]]", "[[0.5, 0], [3, 0]]");
            assert_eq!(
                ut_scenario_from_json(cstr(&inside).as_ptr(), &mut sc),
                UtStatus::Invariant
            );
            assert!(last_error().contains("body 1"));
            assert_eq!(
                ut_scenario_from_json(ptr::null(), &mut sc),
                UtStatus::NullArgument
            );
            assert!(sc.is_null());
            let mut series = ptr::null_mut();
            assert_eq!(
                ut_series_from_text(cstr("version 9").as_ptr(), &mut series),
                UtStatus::Parse
            );
            let (mut re, mut im) = (0.0, 0.0);
            assert_eq!(
                ut_series_coefficient(ptr::null(), 0, &mut re, &mut im),
                UtStatus::NullArgument
            );
            let bad = [0xffu8, 0];
            assert_eq!(
                ut_scenario_load(bad.as_ptr().cast(), &mut sc),
                UtStatus::InvalidUtf8
            );
            assert_eq!(
                ut_scenario_load(cstr("/nonexistent/scenario.json").as_ptr(), &mut sc),
                UtStatus::Io
            );
            assert!(!CStr::from_ptr(ut_version()).to_bytes().is_empty());
        }
    }
}
