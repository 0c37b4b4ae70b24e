//! C ABI over the exact rational backend.
//!
//! Lattices live behind an opaque `CalatLattice` handle. Every function returns a
//! `CalatStatus`; on failure `calat_last_error` gives a message for the calling
//! thread. Strings returned through out-parameters are owned by the caller and
//! released with `calat_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use calat::io;
use calat::{
    analyze, extract_field, generate_example, synthesize, validate_window, CoefficientInput, Error,
    ExampleName, Frame, LatticeWindow, Rational, Rect, Site, Tolerance,
};

/// Result codes of every `calat_*` call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CalatStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Validation = 4,
    Singular = 5,
    Panic = 6,
}

/// Opaque lattice window with exact rational coordinates.
pub struct CalatLattice {
    window: LatticeWindow<Rational>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> CalatStatus {
    match e {
        Error::Parse(_) | Error::Io(_) => CalatStatus::Parse,
        Error::InvalidWindow(_) => CalatStatus::InvalidArgument,
        Error::ZeroDenominator { .. }
        | Error::SingularTransition { .. }
        | Error::DegenerateFrame(_)
        | Error::NonFinite(_) => CalatStatus::Singular,
        Error::MissingStencil { .. }
        | Error::AssumptionViolated { .. }
        | Error::IncompatibleField { .. }
        | Error::CrossCheck(_) => CalatStatus::Validation,
    }
}

struct Fail(CalatStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> CalatStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CalatStatus::Ok,
        Ok(Err(Fail(code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("internal panic");
            CalatStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(CalatStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(CalatStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn lattice_arg<'a>(p: *const CalatLattice) -> Result<&'a CalatLattice, Fail> {
    p.as_ref()
        .ok_or_else(|| Fail(CalatStatus::NullPointer, "lattice handle is null".into()))
}

fn null_out(what: &str) -> Fail {
    Fail(CalatStatus::NullPointer, format!("{what} out-pointer is null"))
}

unsafe fn put_lattice(out: *mut *mut CalatLattice, window: LatticeWindow<Rational>) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null_out("lattice"));
    }
    *out = Box::into_raw(Box::new(CalatLattice { window }));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null_out("string"));
    }
    let c = CString::new(s).map_err(|_| Fail(CalatStatus::Panic, "interior NUL in output".into()))?;
    *out = c.into_raw();
    Ok(())
}

/// Message of the last failed call on this thread, or NULL. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn calat_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds a named example surface over its default window.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn calat_example(name: *const c_char, out: *mut *mut CalatLattice) -> CalatStatus {
    guard(|| {
        let name: ExampleName = str_arg(name, "name")?
            .parse()
            .map_err(|e: Error| Fail(CalatStatus::InvalidArgument, e.to_string()))?;
        let (_, w) = generate_example::<Rational>(name)?;
        put_lattice(out, w)
    })
}

/// Synthesizes a lattice over `[imin,imax] x [jmin,jmax]` from a coefficient set or
/// field given as JSON, starting from the canonical frame.
///
/// # Safety
/// `coefficients_json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn calat_synthesize(
    coefficients_json: *const c_char,
    imin: i64,
    imax: i64,
    jmin: i64,
    jmax: i64,
    out: *mut *mut CalatLattice,
) -> CalatStatus {
    guard(|| {
        let input: CoefficientInput<Rational> =
            io::coefficients_from_json(str_arg(coefficients_json, "coefficients_json")?)?;
        let rect = Rect::new(imin, imax, jmin, jmax)?;
        let w = synthesize(&input, rect, &Frame::canonical(), &Tolerance::default())?;
        put_lattice(out, w)
    })
}

/// Parses lattice JSON.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn calat_lattice_from_json(json: *const c_char, out: *mut *mut CalatLattice) -> CalatStatus {
    guard(|| {
        let w = io::lattice_from_json(str_arg(json, "json")?)?;
        put_lattice(out, w)
    })
}

/// Serializes a lattice as JSON with `"p/q"` coordinates.
///
/// # Safety
/// `lattice` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn calat_lattice_to_json(lattice: *const CalatLattice, out: *mut *mut c_char) -> CalatStatus {
    guard(|| {
        let l = lattice_arg(lattice)?;
        put_string(out, io::to_pretty(&io::lattice_to_json(&l.window)))
    })
}

/// Index rectangle of a lattice.
///
/// # Safety
/// `lattice` must be a live handle; all out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn calat_lattice_dims(
    lattice: *const CalatLattice,
    imin: *mut i64,
    imax: *mut i64,
    jmin: *mut i64,
    jmax: *mut i64,
) -> CalatStatus {
    guard(|| {
        let r = lattice_arg(lattice)?.window.rect();
        for (p, v) in [(imin, r.imin), (imax, r.imax), (jmin, r.jmin), (jmax, r.jmax)] {
            if p.is_null() {
                return Err(null_out("dimension"));
            }
            *p = v;
        }
        Ok(())
    })
}

/// Coordinates of `r(i,j)` rounded to double precision.
///
/// # Safety
/// `lattice` must be a live handle; `xyz` must point to 3 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn calat_lattice_point_f64(
    lattice: *const CalatLattice,
    i: i64,
    j: i64,
    xyz: *mut f64,
) -> CalatStatus {
    guard(|| {
        let l = lattice_arg(lattice)?;
        if xyz.is_null() {
            return Err(null_out("xyz"));
        }
        let p = l.window.get(Site::new(i, j)).ok_or_else(|| {
            Fail(
                CalatStatus::InvalidArgument,
                format!("({i},{j}) outside {}", l.window.rect()),
            )
        })?;
        let v = p.to_f64();
        std::slice::from_raw_parts_mut(xyz, 3).copy_from_slice(&v);
        Ok(())
    })
}

/// Checks the surface conditions; `CALAT_STATUS_VALIDATION` lists violations in the error message.
///
/// # Safety
/// `lattice` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn calat_validate(lattice: *const CalatLattice) -> CalatStatus {
    guard(|| {
        let l = lattice_arg(lattice)?;
        let rep = validate_window(&l.window, &Tolerance::default());
        if rep.is_valid() {
            return Ok(());
        }
        let lines: Vec<String> = rep
            .violations
            .iter()
            .map(|v| format!("{}: {} ({})", v.site, v.kind, v.determinant))
            .collect();
        Err(Fail(CalatStatus::Validation, lines.join("; ")))
    })
}

/// Coefficient field JSON of a lattice.
///
/// # Safety
/// `lattice` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn calat_extract(lattice: *const CalatLattice, out: *mut *mut c_char) -> CalatStatus {
    guard(|| {
        let l = lattice_arg(lattice)?;
        let ex = extract_field(&l.window, &Tolerance::default())?;
        put_string(out, io::to_pretty(&io::field_to_json(&ex.field, &ex.warnings)))
    })
}

/// Analysis report JSON of a lattice.
///
/// # Safety
/// `lattice` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn calat_analyze(lattice: *const CalatLattice, out: *mut *mut c_char) -> CalatStatus {
    guard(|| {
        let l = lattice_arg(lattice)?;
        let rep = analyze(&l.window, &Tolerance::default())?;
        put_string(out, io::to_pretty(&io::report_to_json(&rep)))
    })
}

/// OBJ mesh text of a lattice.
///
/// # Safety
/// `lattice` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn calat_export_obj(lattice: *const CalatLattice, out: *mut *mut c_char) -> CalatStatus {
    guard(|| {
        let l = lattice_arg(lattice)?;
        put_string(out, calat::export::to_obj(&l.window))
    })
}

/// Releases a lattice handle. NULL is ignored.
///
/// # Safety
/// `lattice` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn calat_lattice_free(lattice: *mut CalatLattice) {
    if !lattice.is_null() {
        drop(Box::from_raw(lattice));
    }
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn calat_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
