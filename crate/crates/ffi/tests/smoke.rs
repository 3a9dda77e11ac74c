//! Exercises the C surface from Rust the way a C caller would: through the
//! exported symbols, NUL-terminated strings, and out-pointers.

use std::ffi::{c_char, CStr, CString};
use std::ptr;

use comrel_ffi::*;

fn cstring(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take_string(ptr: *mut c_char) -> String {
    assert!(!ptr.is_null());
    let s = CStr::from_ptr(ptr).to_str().unwrap().to_string();
    comrel_string_free(ptr);
    s
}

#[test]
fn full_pipeline_through_the_c_surface() {
    unsafe {
        let text = cstring("gens: a, t\nrel: [a,t,t]\nrel: [a,t,a,a,a]\n");
        let mut presentation: *mut ComrelPresentation = ptr::null_mut();
        assert_eq!(
            comrel_presentation_parse(text.as_ptr(), &mut presentation),
            ComrelStatus::Ok
        );

        let mut rendered: *mut c_char = ptr::null_mut();
        assert_eq!(
            comrel_presentation_text(presentation, &mut rendered),
            ComrelStatus::Ok
        );
        assert!(take_string(rendered).starts_with("gens: a, t"));

        let mut quotient: *mut ComrelQuotient = ptr::null_mut();
        assert_eq!(
            comrel_quotient_compute(presentation, 6, 0, &mut quotient),
            ComrelStatus::Ok
        );
        assert_eq!(comrel_quotient_class(quotient), 6);
        assert_eq!(comrel_quotient_num_generators(quotient), 7);

        let mut weight = 0u32;
        assert_eq!(
            comrel_quotient_generator_weight(quotient, 6, &mut weight),
            ComrelStatus::Ok
        );
        assert_eq!(weight, 6);
        let mut order: *mut c_char = ptr::null_mut();
        assert_eq!(
            comrel_quotient_generator_order(quotient, 6, &mut order),
            ComrelStatus::Ok
        );
        assert_eq!(take_string(order), "2");

        // order of the torsion element
        let word = cstring("[a,t,a,a,t,a]");
        let mut finite = false;
        let mut order: *mut c_char = ptr::null_mut();
        assert_eq!(
            comrel_quotient_element_order(quotient, word.as_ptr(), &mut finite, &mut order),
            ComrelStatus::Ok
        );
        assert!(finite);
        assert_eq!(take_string(order), "2");

        // factors as JSON
        let mut factors: *mut c_char = ptr::null_mut();
        assert_eq!(
            comrel_quotient_factors_json(quotient, &mut factors),
            ComrelStatus::Ok
        );
        let parsed: serde_json::Value = serde_json::from_str(&take_string(factors)).unwrap();
        assert_eq!(parsed[5]["torsion"], serde_json::json!(["2"]));

        // image of the identity is empty
        let word = cstring("a * a^-1");
        let mut image: *mut c_char = ptr::null_mut();
        assert_eq!(
            comrel_quotient_image_json(quotient, word.as_ptr(), &mut image),
            ComrelStatus::Ok
        );
        assert_eq!(take_string(image), "{}");

        // verify an identity
        let lhs = cstring("[a,t,a,a,t,a]^(t^-1) * [[t,a],[a,t,a,a]]");
        let rhs = cstring("1");
        let mut equal = false;
        assert_eq!(
            comrel_quotient_verify(quotient, lhs.as_ptr(), rhs.as_ptr(), &mut equal),
            ComrelStatus::Ok
        );
        assert!(equal);

        comrel_quotient_free(quotient);
        comrel_presentation_free(presentation);
    }
}

#[test]
fn fixtures_and_helpers() {
    unsafe {
        let name = cstring("hydra-k3");
        let mut presentation: *mut ComrelPresentation = ptr::null_mut();
        assert_eq!(
            comrel_presentation_fixture(name.as_ptr(), &mut presentation),
            ComrelStatus::Ok
        );
        comrel_presentation_free(presentation);

        let mut out: *mut c_char = ptr::null_mut();
        assert_eq!(comrel_witt_number(2, 6, &mut out), ComrelStatus::Ok);
        assert_eq!(take_string(out), "9");

        let gens = cstring("x,y");
        let word = cstring("[x,y,y]");
        let mut out: *mut c_char = ptr::null_mut();
        assert_eq!(
            comrel_labute_json(gens.as_ptr(), word.as_ptr(), 4, &mut out),
            ComrelStatus::Ok
        );
        let parsed: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
        assert_eq!(parsed["weight"], 3);
        assert_eq!(parsed["primitive"], true);

        let word = cstring("[a,t,t,t]");
        let mut out: *mut c_char = ptr::null_mut();
        assert_eq!(
            comrel_hydra_normal_form_json(3, word.as_ptr(), &mut out),
            ComrelStatus::Ok
        );
        let parsed: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
        assert_eq!(parsed["trivial"], true);
    }
}

#[test]
fn error_paths_and_messages() {
    unsafe {
        let mut presentation: *mut ComrelPresentation = ptr::null_mut();
        // parse error carries position information in the message
        let bad = cstring("gens: a, t\nrel: [a,\n");
        assert_eq!(
            comrel_presentation_parse(bad.as_ptr(), &mut presentation),
            ComrelStatus::ParseError
        );
        let message = CStr::from_ptr(comrel_last_error_message())
            .to_str()
            .unwrap();
        assert!(message.contains("parse error"), "{message}");

        // NULL handling
        assert_eq!(
            comrel_presentation_parse(ptr::null(), &mut presentation),
            ComrelStatus::NullArgument
        );
        assert_eq!(comrel_quotient_class(ptr::null()), 0);
        comrel_quotient_free(ptr::null_mut());
        comrel_string_free(ptr::null_mut());

        // budget propagation
        let text = cstring("gens: a, t\n");
        assert_eq!(
            comrel_presentation_parse(text.as_ptr(), &mut presentation),
            ComrelStatus::Ok
        );
        let mut quotient: *mut ComrelQuotient = ptr::null_mut();
        assert_eq!(
            comrel_quotient_compute(presentation, 4, 3, &mut quotient),
            ComrelStatus::BudgetExceeded
        );
        // unknown fixture
        let name = cstring("no-such-fixture");
        let mut other: *mut ComrelPresentation = ptr::null_mut();
        assert_eq!(
            comrel_presentation_fixture(name.as_ptr(), &mut other),
            ComrelStatus::Error
        );
        comrel_presentation_free(presentation);
    }
}
