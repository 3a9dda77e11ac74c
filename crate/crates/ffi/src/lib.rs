//! C ABI for the comrel library.
//!
//! Conventions:
//! - Handles (`ComrelPresentation`, `ComrelQuotient`) are opaque pointers
//!   created and destroyed by this library.
//! - Every fallible call returns a [`ComrelStatus`] and writes its result
//!   through out-pointers, which are only written on `Ok`.
//! - Returned strings are NUL-terminated UTF-8 allocated here; release
//!   them with [`comrel_string_free`]. Structured results are JSON.
//! - After a non-`Ok` status, [`comrel_last_error_message`] returns a
//!   thread-local description valid until the next failing call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use comrel::error::Error;
use comrel::lcs;
use comrel::nq::{
    nilpotent_quotient, parse_presentation, Budget, NilpotentPresentation, Presentation,
};
use comrel::words::parse_word;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComrelStatus {
    Ok = 0,
    /// Invalid input or any error not covered below.
    Error = 1,
    /// Word or presentation text failed to parse.
    ParseError = 2,
    /// A resource budget was exceeded.
    BudgetExceeded = 3,
    /// A required pointer argument was NULL.
    NullArgument = 4,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 5,
    /// An internal invariant failed; this is a bug.
    InternalError = 70,
}

pub struct ComrelPresentation {
    inner: Presentation,
}

pub struct ComrelQuotient {
    inner: NilpotentPresentation,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> ComrelStatus {
    match err {
        Error::Parse { .. } | Error::UnknownGenerator { .. } => ComrelStatus::ParseError,
        Error::Budget(_) => ComrelStatus::BudgetExceeded,
        Error::Internal(_) => ComrelStatus::InternalError,
        _ => ComrelStatus::Error,
    }
}

fn fail(err: Error) -> ComrelStatus {
    set_error(&err.to_string());
    status_of(&err)
}

/// Runs a closure, translating errors and panics into status codes.
fn guarded(f: impl FnOnce() -> Result<ComrelStatus, Error>) -> ComrelStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => status,
        Ok(Err(err)) => fail(err),
        Err(_) => {
            set_error("panic inside the library");
            ComrelStatus::InternalError
        }
    }
}

/// # Safety
/// `ptr` must be non-NULL and point to a NUL-terminated string.
unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, ComrelStatus> {
    if ptr.is_null() {
        set_error("NULL string argument");
        return Err(ComrelStatus::NullArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        ComrelStatus::InvalidUtf8
    })
}

fn write_string(out: *mut *mut c_char, value: String) -> Result<ComrelStatus, Error> {
    let c = CString::new(value.replace('\0', " "))
        .map_err(|_| Error::Internal("string with interior NUL".into()))?;
    unsafe { *out = c.into_raw() };
    Ok(ComrelStatus::Ok)
}

/// Message from the most recent failing call on this thread. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn comrel_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Frees a string returned by this library. NULL is ignored.
///
/// # Safety
/// `ptr` must have been returned by a `comrel_*` call and not freed yet.
#[no_mangle]
pub unsafe extern "C" fn comrel_string_free(ptr: *mut c_char) {
    if !ptr.is_null() {
        drop(CString::from_raw(ptr));
    }
}

/// Parses the presentation file format (`gens:` and `rel:` lines).
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn comrel_presentation_parse(
    text: *const c_char,
    out: *mut *mut ComrelPresentation,
) -> ComrelStatus {
    if out.is_null() {
        set_error("NULL out pointer");
        return ComrelStatus::NullArgument;
    }
    let text = match read_str(text) {
        Ok(s) => s,
        Err(status) => return status,
    };
    guarded(|| {
        let inner = parse_presentation(text)?;
        *out = Box::into_raw(Box::new(ComrelPresentation { inner }));
        Ok(ComrelStatus::Ok)
    })
}

/// Loads a shipped fixture by name, e.g. `theorem7` or `hydra-k3`.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn comrel_presentation_fixture(
    name: *const c_char,
    out: *mut *mut ComrelPresentation,
) -> ComrelStatus {
    if out.is_null() {
        set_error("NULL out pointer");
        return ComrelStatus::NullArgument;
    }
    let name = match read_str(name) {
        Ok(s) => s,
        Err(status) => return status,
    };
    guarded(|| {
        let inner = comrel::fixtures::by_name(name)?;
        *out = Box::into_raw(Box::new(ComrelPresentation { inner }));
        Ok(ComrelStatus::Ok)
    })
}

/// Renders a presentation back into the file format.
///
/// # Safety
/// `presentation` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn comrel_presentation_text(
    presentation: *const ComrelPresentation,
    out: *mut *mut c_char,
) -> ComrelStatus {
    if presentation.is_null() || out.is_null() {
        set_error("NULL argument");
        return ComrelStatus::NullArgument;
    }
    let presentation = &*presentation;
    guarded(|| write_string(out, presentation.inner.to_text()))
}

/// # Safety
/// `presentation` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn comrel_presentation_free(presentation: *mut ComrelPresentation) {
    if !presentation.is_null() {
        drop(Box::from_raw(presentation));
    }
}

/// Computes the class-`class` nilpotent quotient. `max_pc_gens` of 0 keeps
/// the default generator budget.
///
/// # Safety
/// `presentation` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn comrel_quotient_compute(
    presentation: *const ComrelPresentation,
    class: u32,
    max_pc_gens: usize,
    out: *mut *mut ComrelQuotient,
) -> ComrelStatus {
    if presentation.is_null() || out.is_null() {
        set_error("NULL argument");
        return ComrelStatus::NullArgument;
    }
    let presentation = &*presentation;
    guarded(|| {
        let mut budget = Budget::default();
        if max_pc_gens > 0 {
            budget.max_pc_gens = max_pc_gens;
        }
        let inner = nilpotent_quotient(&presentation.inner, class as usize, &budget)?;
        *out = Box::into_raw(Box::new(ComrelQuotient { inner }));
        Ok(ComrelStatus::Ok)
    })
}

/// # Safety
/// `quotient` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn comrel_quotient_free(quotient: *mut ComrelQuotient) {
    if !quotient.is_null() {
        drop(Box::from_raw(quotient));
    }
}

/// Nilpotency class of a quotient; 0 for NULL.
///
/// # Safety
/// `quotient` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn comrel_quotient_class(quotient: *const ComrelQuotient) -> u32 {
    if quotient.is_null() {
        return 0;
    }
    (*quotient).inner.class() as u32
}

/// Number of pc generators; 0 for NULL.
///
/// # Safety
/// `quotient` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn comrel_quotient_num_generators(quotient: *const ComrelQuotient) -> usize {
    if quotient.is_null() {
        return 0;
    }
    (*quotient).inner.num_generators()
}

/// Weight of one pc generator.
///
/// # Safety
/// `quotient` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn comrel_quotient_generator_weight(
    quotient: *const ComrelQuotient,
    index: usize,
    out: *mut u32,
) -> ComrelStatus {
    if quotient.is_null() || out.is_null() {
        set_error("NULL argument");
        return ComrelStatus::NullArgument;
    }
    let quotient = &*quotient;
    if index >= quotient.inner.num_generators() {
        set_error("generator index out of range");
        return ComrelStatus::Error;
    }
    *out = quotient.inner.weight(index) as u32;
    ComrelStatus::Ok
}

/// Relative order of one pc generator as a decimal string, `"0"` meaning
/// infinite.
///
/// # Safety
/// `quotient` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn comrel_quotient_generator_order(
    quotient: *const ComrelQuotient,
    index: usize,
    out: *mut *mut c_char,
) -> ComrelStatus {
    if quotient.is_null() || out.is_null() {
        set_error("NULL argument");
        return ComrelStatus::NullArgument;
    }
    let quotient = &*quotient;
    if index >= quotient.inner.num_generators() {
        set_error("generator index out of range");
        return ComrelStatus::Error;
    }
    let text = match quotient.inner.order(index) {
        Some(m) => m.to_string(),
        None => "0".to_string(),
    };
    guarded(|| write_string(out, text))
}

/// Image of a word as a JSON object mapping generator names to exponents.
///
/// # Safety
/// `quotient` must be a live handle; `word` a NUL-terminated string;
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn comrel_quotient_image_json(
    quotient: *const ComrelQuotient,
    word: *const c_char,
    out: *mut *mut c_char,
) -> ComrelStatus {
    if quotient.is_null() || out.is_null() {
        set_error("NULL argument");
        return ComrelStatus::NullArgument;
    }
    let quotient = &*quotient;
    let word = match read_str(word) {
        Ok(s) => s,
        Err(status) => return status,
    };
    guarded(|| {
        let np = &quotient.inner;
        let parsed = parse_word(word, np.source().alphabet())?;
        let image = np.image(&parsed)?;
        let mut map = serde_json::Map::new();
        for (gen, coeff) in image.iter().enumerate() {
            if !num_traits::Zero::is_zero(coeff) {
                map.insert(
                    np.gen_name(gen),
                    serde_json::Value::String(coeff.to_string()),
                );
            }
        }
        write_string(out, serde_json::Value::Object(map).to_string())
    })
}

/// Exact order of a word's image. Writes `is_finite` and, when finite, the
/// decimal order (`"0"` is written for infinite order).
///
/// # Safety
/// `quotient` must be a live handle; `word` a NUL-terminated string;
/// `is_finite` and `out` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn comrel_quotient_element_order(
    quotient: *const ComrelQuotient,
    word: *const c_char,
    is_finite: *mut bool,
    out: *mut *mut c_char,
) -> ComrelStatus {
    if quotient.is_null() || is_finite.is_null() || out.is_null() {
        set_error("NULL argument");
        return ComrelStatus::NullArgument;
    }
    let quotient = &*quotient;
    let word = match read_str(word) {
        Ok(s) => s,
        Err(status) => return status,
    };
    guarded(|| {
        let np = &quotient.inner;
        let parsed = parse_word(word, np.source().alphabet())?;
        match lcs::element_order(np, &parsed)? {
            lcs::ElementOrder::Finite(n) => {
                *is_finite = true;
                write_string(out, n.to_string())
            }
            lcs::ElementOrder::Infinite => {
                *is_finite = false;
                write_string(out, "0".to_string())
            }
        }
    })
}

/// Lower-central factor structures as a JSON array of
/// `{"weight", "free_rank", "torsion"}` objects.
///
/// # Safety
/// `quotient` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn comrel_quotient_factors_json(
    quotient: *const ComrelQuotient,
    out: *mut *mut c_char,
) -> ComrelStatus {
    if quotient.is_null() || out.is_null() {
        set_error("NULL argument");
        return ComrelStatus::NullArgument;
    }
    let quotient = &*quotient;
    guarded(|| {
        let factors = lcs::factor_structures(&quotient.inner)?;
        let list: Vec<serde_json::Value> = factors
            .iter()
            .map(|f| {
                serde_json::json!({
                    "weight": f.weight,
                    "free_rank": f.free_rank,
                    "torsion": f.torsion.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
                })
            })
            .collect();
        write_string(out, serde_json::Value::Array(list).to_string())
    })
}

/// True iff two words have the same image in the quotient.
///
/// # Safety
/// `quotient` must be a live handle; `lhs`, `rhs` NUL-terminated strings;
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn comrel_quotient_verify(
    quotient: *const ComrelQuotient,
    lhs: *const c_char,
    rhs: *const c_char,
    out: *mut bool,
) -> ComrelStatus {
    if quotient.is_null() || out.is_null() {
        set_error("NULL argument");
        return ComrelStatus::NullArgument;
    }
    let quotient = &*quotient;
    let lhs = match read_str(lhs) {
        Ok(s) => s,
        Err(status) => return status,
    };
    let rhs = match read_str(rhs) {
        Ok(s) => s,
        Err(status) => return status,
    };
    guarded(|| {
        let np = &quotient.inner;
        let lhs = parse_word(lhs, np.source().alphabet())?;
        let rhs = parse_word(rhs, np.source().alphabet())?;
        *out = lcs::verify_identity_in(np, &lhs, &rhs)?;
        Ok(ComrelStatus::Ok)
    })
}

/// Witt rank of the weight-`n` graded piece for `q` generators, as a
/// decimal string.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn comrel_witt_number(
    q: usize,
    n: usize,
    out: *mut *mut c_char,
) -> ComrelStatus {
    if out.is_null() {
        set_error("NULL out pointer");
        return ComrelStatus::NullArgument;
    }
    guarded(|| {
        let value = comrel::basic::witt_number(q, n)?;
        write_string(out, value.to_string())
    })
}

/// Weight, coordinate gcd, and primitivity of a word's leading Lie
/// element, as JSON `{"weight", "gcd", "primitive"}`. `gens` is a
/// comma-separated generator list.
///
/// # Safety
/// `gens` and `word` must be NUL-terminated strings; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn comrel_labute_json(
    gens: *const c_char,
    word: *const c_char,
    cap: usize,
    out: *mut *mut c_char,
) -> ComrelStatus {
    if out.is_null() {
        set_error("NULL out pointer");
        return ComrelStatus::NullArgument;
    }
    let gens = match read_str(gens) {
        Ok(s) => s,
        Err(status) => return status,
    };
    let word = match read_str(word) {
        Ok(s) => s,
        Err(status) => return status,
    };
    guarded(|| {
        let alphabet =
            comrel::words::Alphabet::new(gens.split(',').map(str::trim).filter(|s| !s.is_empty()))?;
        let parsed = parse_word(word, &alphabet)?;
        let report = comrel::magnus::labute_hypothesis(&parsed, cap)?;
        let value = serde_json::json!({
            "weight": report.weight,
            "gcd": report.gcd.to_string(),
            "primitive": report.primitive,
        });
        write_string(out, value.to_string())
    })
}

/// Normal form in the k-th Hydra group as JSON
/// `{"h", "t_exponent", "trivial"}`.
///
/// # Safety
/// `word` must be a NUL-terminated string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn comrel_hydra_normal_form_json(
    k: usize,
    word: *const c_char,
    out: *mut *mut c_char,
) -> ComrelStatus {
    if out.is_null() {
        set_error("NULL out pointer");
        return ComrelStatus::NullArgument;
    }
    let word = match read_str(word) {
        Ok(s) => s,
        Err(status) => return status,
    };
    guarded(|| {
        let parsed = parse_word(word, &comrel::hydra::ambient_alphabet())?;
        let nf = comrel::hydra::hydra_normal_form(k, &parsed)?;
        let value = serde_json::json!({
            "h": nf.h.to_string(),
            "t_exponent": nf.t_exp,
            "trivial": nf.is_identity(),
        });
        write_string(out, value.to_string())
    })
}
