//! C ABI surface: opaque hypergraph handles, error codes, and flat structs
//! mirroring the library's verdict types. All functions are
//! `extern "C"`-safe; strings are UTF-8 and owned by whichever side
//! allocated them (`gs_string_free` releases strings returned here).

use gridstates::dps::{mu_upper, SolverConfig};
use gridstates::extremal::{build_witness, extremality_test, range_pair};
use gridstates::gridstate::{GridHypergraph, PptStatus};
use gridstates::optimize::seesaw;
use gridstates::report::bundled_hypergraph;
use gridstates::snprover::{certify_sn, ProverConfig};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

/// Result code for every fallible entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GsStatus {
    /// success
    GsOk = 0,
    /// a required pointer argument was null
    GsNullArgument = 1,
    /// a string argument was not valid UTF-8
    GsInvalidUtf8 = 2,
    /// malformed hypergraph JSON
    GsParseError = 3,
    /// the hypergraph could not be built into a state
    GsBuildError = 4,
    /// a numeric routine failed; see `gs_last_error`
    GsComputeError = 5,
    /// unknown built-in state name
    GsUnknownName = 6,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg).unwrap_or_else(|_| CString::new("invalid error text").unwrap());
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Message for the most recent error on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn gs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| {
        e.borrow()
            .as_ref()
            .map(|c| c.as_ptr())
            .unwrap_or(std::ptr::null())
    })
}

/// Opaque hypergraph handle.
pub struct GsHypergraph {
    inner: GridHypergraph,
}

unsafe fn parse_utf8<'a>(ptr: *const c_char) -> Result<&'a str, GsStatus> {
    if ptr.is_null() {
        return Err(GsStatus::GsNullArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("argument is not valid UTF-8".into());
        GsStatus::GsInvalidUtf8
    })
}

/// Parses a hypergraph from its canonical JSON form.
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gs_hypergraph_from_json(
    json: *const c_char,
    out: *mut *mut GsHypergraph,
) -> GsStatus {
    if out.is_null() {
        return GsStatus::GsNullArgument;
    }
    let text = match parse_utf8(json) {
        Ok(t) => t,
        Err(s) => return s,
    };
    match GridHypergraph::from_json(text) {
        Ok(h) => {
            *out = Box::into_raw(Box::new(GsHypergraph { inner: h }));
            GsStatus::GsOk
        }
        Err(e) => {
            set_error(e.to_string());
            GsStatus::GsParseError
        }
    }
}

/// Looks up a built-in state by name (crosshatch, rho_5_5, rho_2, rho_3,
/// rho_4_12, horodecki).
///
/// # Safety
/// `name` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gs_hypergraph_builtin(
    name: *const c_char,
    out: *mut *mut GsHypergraph,
) -> GsStatus {
    if out.is_null() {
        return GsStatus::GsNullArgument;
    }
    let name = match parse_utf8(name) {
        Ok(t) => t,
        Err(s) => return s,
    };
    match bundled_hypergraph(name) {
        Ok(h) => {
            *out = Box::into_raw(Box::new(GsHypergraph { inner: h }));
            GsStatus::GsOk
        }
        Err(e) => {
            set_error(e.to_string());
            GsStatus::GsUnknownName
        }
    }
}

/// Releases a hypergraph handle (null is ignored).
///
/// # Safety
/// `h` must have been returned by this library and not freed before.
#[no_mangle]
pub unsafe extern "C" fn gs_hypergraph_free(h: *mut GsHypergraph) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Serializes a hypergraph to its canonical JSON form.
///
/// # Safety
/// `h` must be a live handle and `out` a valid pointer; free the result with
/// `gs_string_free`.
#[no_mangle]
pub unsafe extern "C" fn gs_hypergraph_to_json(
    h: *const GsHypergraph,
    out: *mut *mut c_char,
) -> GsStatus {
    if h.is_null() || out.is_null() {
        return GsStatus::GsNullArgument;
    }
    let json = (*h).inner.to_json();
    *out = CString::new(json).expect("no interior NULs").into_raw();
    GsStatus::GsOk
}

/// Releases a string returned by this library (null is ignored).
///
/// # Safety
/// `s` must have been returned by this library and not freed before.
#[no_mangle]
pub unsafe extern "C" fn gs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// PPT verdict over the C ABI.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct GsPptVerdict {
    /// 0 = PPT (graphical), 1 = PPT (numeric), 2 = NPT, 3 = inconclusive
    pub status: i32,
    pub min_eigenvalue_pt: f64,
}

/// Runs the graphical PPT criterion with numeric fallback.
///
/// # Safety
/// `h` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gs_ppt_check(h: *const GsHypergraph, out: *mut GsPptVerdict) -> GsStatus {
    if h.is_null() || out.is_null() {
        return GsStatus::GsNullArgument;
    }
    let v = (*h).inner.graphical_ppt_check();
    (*out).status = match v.status {
        PptStatus::PptGraphical => 0,
        PptStatus::PptNumeric => 1,
        PptStatus::Npt => 2,
        PptStatus::InconclusiveGraphical => 3,
    };
    (*out).min_eigenvalue_pt = v.min_eigenvalue_pt;
    GsStatus::GsOk
}

/// Schmidt-number bounds over the C ABI.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct GsSnBounds {
    pub lower: usize,
    pub upper: usize,
    /// 1 when the lower bound carries a replayable proof tree
    pub proved: i32,
}

/// Certifies Schmidt-number bounds with the symbolic prover.
///
/// # Safety
/// `h` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gs_schmidt_bounds(
    h: *const GsHypergraph,
    node_budget: usize,
    out: *mut GsSnBounds,
) -> GsStatus {
    if h.is_null() || out.is_null() {
        return GsStatus::GsNullArgument;
    }
    let cfg = ProverConfig {
        node_budget,
        ..ProverConfig::default()
    };
    let b = certify_sn(&(*h).inner, &cfg);
    (*out).lower = b.lower;
    (*out).upper = b.upper;
    (*out).proved = i32::from(b.certificate.is_some());
    GsStatus::GsOk
}

/// Extremality verdict over the C ABI.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct GsExtremality {
    pub multiplicity_of_2: usize,
    pub second_eigenvalue_gap: f64,
    /// 1 when the state is extremal in the PPT set
    pub is_extremal: i32,
}

/// Tests PPT-extremality of the state built from `h`.
///
/// # Safety
/// `h` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gs_extremality(
    h: *const GsHypergraph,
    tol: f64,
    out: *mut GsExtremality,
) -> GsStatus {
    if h.is_null() || out.is_null() {
        return GsStatus::GsNullArgument;
    }
    let rho = match (*h).inner.build_state() {
        Ok(r) => r,
        Err(e) => {
            set_error(e.to_string());
            return GsStatus::GsBuildError;
        }
    };
    match extremality_test(&rho, tol) {
        Ok(v) => {
            (*out).multiplicity_of_2 = v.multiplicity_of_2;
            (*out).second_eigenvalue_gap = v.second_eigenvalue_gap;
            (*out).is_extremal = i32::from(v.is_extremal);
            GsStatus::GsOk
        }
        Err(e) => {
            set_error(e.to_string());
            GsStatus::GsComputeError
        }
    }
}

/// Lower-bounds the witness separable value by multi-start seesaw.
///
/// # Safety
/// `h` must be a live handle and `mu_l` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gs_mu_lower(
    h: *const GsHypergraph,
    starts: usize,
    seed: u64,
    mu_l: *mut f64,
) -> GsStatus {
    if h.is_null() || mu_l.is_null() {
        return GsStatus::GsNullArgument;
    }
    match witness_of(&(*h).inner) {
        Ok((w, dims)) => match seesaw(&w, dims, starts.max(1), seed, 1e-12) {
            Ok(r) => {
                *mu_l = r.mu_l;
                GsStatus::GsOk
            }
            Err(e) => {
                set_error(e.to_string());
                GsStatus::GsComputeError
            }
        },
        Err(s) => s,
    }
}

/// Upper-bounds the witness separable value by the level-n relaxation.
///
/// # Safety
/// `h` must be a live handle; `mu_u` and `converged` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn gs_mu_upper(
    h: *const GsHypergraph,
    level: usize,
    eps: f64,
    mu_u: *mut f64,
    converged: *mut i32,
) -> GsStatus {
    if h.is_null() || mu_u.is_null() || converged.is_null() {
        return GsStatus::GsNullArgument;
    }
    match witness_of(&(*h).inner) {
        Ok((w, dims)) => {
            let cfg = SolverConfig {
                eps,
                ..SolverConfig::default()
            };
            match mu_upper(&w, dims, level, &cfg) {
                Ok(sol) => {
                    *mu_u = sol.mu_u;
                    *converged = i32::from(sol.converged);
                    GsStatus::GsOk
                }
                Err(e) => {
                    set_error(e.to_string());
                    GsStatus::GsComputeError
                }
            }
        }
        Err(s) => s,
    }
}

fn witness_of(
    h: &GridHypergraph,
) -> Result<(gridstates::linalg::CMat, gridstates::linalg::Bipartition), GsStatus> {
    let rho = h.build_state().map_err(|e| {
        set_error(e.to_string());
        GsStatus::GsBuildError
    })?;
    let rp = range_pair(&rho, 1e-9).map_err(|e| {
        set_error(e.to_string());
        GsStatus::GsComputeError
    })?;
    Ok((build_witness(&rp), rho.dims))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;
    use std::ptr;

    fn builtin(name: &str) -> *mut GsHypergraph {
        let cname = CString::new(name).unwrap();
        let mut h: *mut GsHypergraph = ptr::null_mut();
        assert_eq!(
            unsafe { gs_hypergraph_builtin(cname.as_ptr(), &mut h) },
            GsStatus::GsOk
        );
        h
    }

    #[test]
    fn crosshatch_round_trip_and_verdicts() {
        let h = builtin("crosshatch");
        unsafe {
            let mut json: *mut c_char = ptr::null_mut();
            assert_eq!(gs_hypergraph_to_json(h, &mut json), GsStatus::GsOk);
            let text = CStr::from_ptr(json).to_str().unwrap().to_string();
            let mut h2: *mut GsHypergraph = ptr::null_mut();
            let cjson = CString::new(text).unwrap();
            assert_eq!(gs_hypergraph_from_json(cjson.as_ptr(), &mut h2), GsStatus::GsOk);
            gs_string_free(json);

            let mut ppt = GsPptVerdict {
                status: -1,
                min_eigenvalue_pt: f64::NAN,
            };
            assert_eq!(gs_ppt_check(h2, &mut ppt), GsStatus::GsOk);
            assert_eq!(ppt.status, 0);
            assert!(ppt.min_eigenvalue_pt > -1e-10);

            let mut sn = GsSnBounds {
                lower: 0,
                upper: 0,
                proved: 0,
            };
            assert_eq!(gs_schmidt_bounds(h2, 20_000, &mut sn), GsStatus::GsOk);
            assert_eq!((sn.lower, sn.upper, sn.proved), (2, 2, 1));

            let mut ext = GsExtremality {
                multiplicity_of_2: 0,
                second_eigenvalue_gap: 0.0,
                is_extremal: 0,
            };
            assert_eq!(gs_extremality(h2, 1e-9, &mut ext), GsStatus::GsOk);
            assert_eq!(ext.multiplicity_of_2, 1);
            assert_eq!(ext.is_extremal, 1);

            let mut mu_l = 0.0;
            assert_eq!(gs_mu_lower(h2, 200, 7, &mut mu_l), GsStatus::GsOk);
            assert!((mu_l - (1.0 + 3f64.sqrt() / 2.0)).abs() < 1e-6);

            let mut mu_u = 0.0;
            let mut conv = 0;
            assert_eq!(gs_mu_upper(h2, 1, 1e-7, &mut mu_u, &mut conv), GsStatus::GsOk);
            assert!((mu_u - 2.0).abs() < 1e-5);
            assert_eq!(conv, 1);

            gs_hypergraph_free(h);
            gs_hypergraph_free(h2);
        }
    }

    #[test]
    fn error_paths_set_codes_and_messages() {
        unsafe {
            let mut h: *mut GsHypergraph = ptr::null_mut();
            let bad = CString::new("nope").unwrap();
            assert_eq!(
                gs_hypergraph_builtin(bad.as_ptr(), &mut h),
                GsStatus::GsUnknownName
            );
            assert!(!gs_last_error().is_null());

            let garbage = CString::new("{not json").unwrap();
            assert_eq!(
                gs_hypergraph_from_json(garbage.as_ptr(), &mut h),
                GsStatus::GsParseError
            );

            assert_eq!(
                gs_hypergraph_from_json(std::ptr::null(), &mut h),
                GsStatus::GsNullArgument
            );
            let mut ppt = GsPptVerdict {
                status: -1,
                min_eigenvalue_pt: 0.0,
            };
            assert_eq!(gs_ppt_check(std::ptr::null(), &mut ppt), GsStatus::GsNullArgument);
        }
    }
}
