use algproof_ffi::*;
use std::ffi::{CStr, CString};
use std::ptr;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = algproof_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

unsafe fn parse(text: &str) -> *mut AlgCircuit {
    let t = cstr(text);
    let mut c = ptr::null_mut();
    assert_eq!(algproof_circuit_parse(t.as_ptr(), &mut c), AlgStatus::Ok);
    c
}

const SQUARE_PLUS_ONE: &str = "ring Z\ninput x\ng1 = mul x x\ng2 = const 1\ng3 = add g1 g2\noutput g3\n";
const EXPANDED: &str = "ring Z\ninput x\nc1 = const 1\nc2 = const -1\ng1 = add x c1\ng2 = add x c2\ng3 = mul g1 g2\ng4 = const 2\ng5 = add g3 g4\noutput g5\n";
const MINUS_X: &str = "ring Z\ninput x\ng1 = const -1\ng2 = mul x g1\noutput g2\n";

#[test]
fn parse_serialize_round_trip() {
    unsafe {
        let c = parse(SQUARE_PLUS_ONE);
        assert!(algproof_circuit_size(c) >= 3);
        let mut out = ptr::null_mut();
        assert_eq!(algproof_circuit_serialize(c, &mut out), AlgStatus::Ok);
        let text = CStr::from_ptr(out).to_str().unwrap().to_owned();
        algproof_string_free(out);
        let d = parse(&text);
        assert_eq!(algproof_pit_equal(c, d, AlgPitMode::Exact, 0), AlgStatus::Ok);
        algproof_circuit_free(c);
        algproof_circuit_free(d);
    }
}

#[test]
fn parse_error_sets_message() {
    unsafe {
        let t = cstr("ring Z\ninput x\ng1 = frob x\noutput g1\n");
        let mut c = ptr::null_mut();
        assert_eq!(algproof_circuit_parse(t.as_ptr(), &mut c), AlgStatus::ParseError);
        assert!(c.is_null());
        assert!(!last_error().is_empty());
    }
}

#[test]
fn null_pointers_are_reported() {
    unsafe {
        let mut c = ptr::null_mut();
        assert_eq!(algproof_circuit_parse(ptr::null(), &mut c), AlgStatus::NullPointer);
        let t = cstr(SQUARE_PLUS_ONE);
        assert_eq!(algproof_circuit_parse(t.as_ptr(), ptr::null_mut()), AlgStatus::NullPointer);
        assert_eq!(algproof_circuit_size(ptr::null()), 0);
        assert_eq!(algproof_conic_check(ptr::null(), ptr::null(), 0), AlgStatus::NullPointer);
        assert_eq!(algproof_verify_text(ptr::null(), AlgPitMode::Exact, 0), AlgStatus::NullPointer);
        algproof_circuit_free(ptr::null_mut());
        algproof_string_free(ptr::null_mut());
    }
}

#[test]
fn invalid_utf8_is_reported() {
    unsafe {
        let bytes = [0x66u8, 0xff, 0x00];
        let mut c = ptr::null_mut();
        let st = algproof_circuit_parse(bytes.as_ptr() as *const _, &mut c);
        assert_eq!(st, AlgStatus::InvalidUtf8);
    }
}

#[test]
fn pit_distinguishes_circuits() {
    unsafe {
        let a = parse(SQUARE_PLUS_ONE);
        let b = parse(EXPANDED);
        let m = parse(MINUS_X);
        for mode in [AlgPitMode::Exact, AlgPitMode::Randomized, AlgPitMode::Auto] {
            assert_eq!(algproof_pit_equal(a, b, mode, 7), AlgStatus::Ok);
            assert_eq!(algproof_pit_equal(a, m, mode, 7), AlgStatus::Rejected);
        }
        for c in [a, b, m] {
            algproof_circuit_free(c);
        }
    }
}

#[test]
fn conic_check_with_protected_names() {
    unsafe {
        let c = parse(MINUS_X);
        assert_eq!(algproof_conic_check(c, ptr::null(), 0), AlgStatus::Rejected);
        assert!(!last_error().is_empty());
        let sq = parse("ring Z\ninput x\ng1 = mul x x\noutput g1\n");
        assert_eq!(algproof_conic_check(sq, ptr::null(), 0), AlgStatus::Ok);
        let x = cstr("x");
        let names = [x.as_ptr()];
        let plain = parse("ring Z\ninput x\nc1 = const 1\ng1 = add x c1\noutput g1\n");
        assert_eq!(algproof_conic_check(plain, names.as_ptr(), 1), AlgStatus::Ok);
        assert_eq!(algproof_conic_check(plain, ptr::null(), 1), AlgStatus::NullPointer);
        for c in [c, sq, plain] {
            algproof_circuit_free(c);
        }
    }
}

#[test]
fn generated_bvp_proof_verifies() {
    unsafe {
        let m = cstr("3");
        let mut out = ptr::null_mut();
        assert_eq!(algproof_gen_bvp_cps(5, m.as_ptr(), &mut out), AlgStatus::Ok);
        assert_eq!(algproof_verify_text(out, AlgPitMode::Exact, 0), AlgStatus::Ok);
        assert_eq!(algproof_verify_text(out, AlgPitMode::Randomized, 11), AlgStatus::Ok);
        let text = CStr::from_ptr(out).to_str().unwrap().to_owned();
        algproof_string_free(out);

        // Tamper with the axiom constant; the stored proof no longer matches.
        let bad = text.replacen("const 3", "const 4", 1);
        assert_ne!(bad, text, "expected a `const 3` line in:\n{text}");
        let bad = cstr(&bad);
        assert_eq!(algproof_verify_text(bad.as_ptr(), AlgPitMode::Exact, 0), AlgStatus::Rejected);
    }
}

#[test]
fn bad_generator_arguments() {
    unsafe {
        let mut out = ptr::null_mut();
        let m = cstr("three");
        assert_eq!(algproof_gen_bvp_cps(4, m.as_ptr(), &mut out), AlgStatus::InvalidArgument);
        let z = cstr("0");
        assert_eq!(algproof_gen_bvp_cps(4, z.as_ptr(), &mut out), AlgStatus::InvalidArgument);
        assert!(out.is_null());
    }
}

#[test]
fn non_proof_documents_are_rejected() {
    unsafe {
        let t = cstr("system\nring Z\nvars x\n");
        assert_eq!(algproof_verify_text(t.as_ptr(), AlgPitMode::Exact, 0), AlgStatus::Rejected);
    }
}

#[test]
fn version_is_nonempty() {
    let v = unsafe { CStr::from_ptr(algproof_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
