//! C ABI over the `febe` block-encoding compiler.
//!
//! Every fallible call returns a [`FebeStatus`] and writes its result through
//! an out-pointer. The message of the most recent call is kept per thread and
//! can be read with [`febe_last_error`]. Handles are opaque and must be released with the
//! matching `_free` function. Strings returned by the library are released
//! with [`febe_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use febe::blockenc::{self, BlockEncoding, Boundary, Class, EncodeOptions, LambdaChoice, Manifest};
use febe::circuit::{count_resources, export_text, lower, CostModel};
use febe::fock::{gen_synthetic, HamiltonianSpec, SyntheticModel};
use febe::resources::formula_select_swap;
use febe::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FebeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidUtf8 = 3,
    SizeCap = 4,
    Parse = 5,
    NotHermitian = 6,
    Io = 7,
    Internal = 99,
}

/// Gate-decomposition model used when counting T gates.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FebeCostModel {
    AndGadget4T = 0,
    Deterministic7T = 1,
}

impl From<FebeCostModel> for CostModel {
    fn from(m: FebeCostModel) -> Self {
        match m {
            FebeCostModel::AndGadget4T => CostModel::AndGadget4T,
            FebeCostModel::Deterministic7T => CostModel::Deterministic7T,
        }
    }
}

/// Encoder knobs. Zero in `lambda`, `eta` or `m` means "not set":
/// λ is then chosen by the cost model, and η or M must not be needed
/// by the class.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct FebeEncodeOptions {
    pub m_b: u32,
    pub lambda: u32,
    pub eta: u32,
    pub m: u32,
    /// Non-zero selects open boundaries for neighbor classes.
    pub open_boundary: u8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct FebeResources {
    pub t_count: u64,
    pub t_depth: u64,
    pub clifford_count: u64,
    pub toffoli_count: u64,
    pub qubit_count: u64,
    pub ancilla_high_water: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct FebeVerifyReport {
    pub max_abs_dev: f64,
    pub fro_dev: f64,
    pub alpha: f64,
    pub eps_bound: f64,
    pub columns_checked: u64,
    pub pass: u8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct FebeSelectSwapCost {
    pub qubits: f64,
    pub t_count: f64,
    pub t_depth: f64,
}

/// Opaque Hamiltonian specification.
pub struct FebeSpec(HamiltonianSpec);

/// Opaque compiled block encoding together with the spec it came from.
pub struct FebeEncoding {
    be: BlockEncoding,
    spec: HamiltonianSpec,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> FebeStatus {
    match e {
        Error::SizeCap { .. } => FebeStatus::SizeCap,
        Error::Parse { .. } | Error::Json(_) | Error::Csv(_) => FebeStatus::Parse,
        Error::NotHermitian(_) => FebeStatus::NotHermitian,
        Error::Io(_) => FebeStatus::Io,
        _ => FebeStatus::InvalidArgument,
    }
}

struct Fail(FebeStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(FebeStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, turning errors and panics into a status plus a stored message.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> FebeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            FebeStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            FebeStatus::Internal
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| Fail(FebeStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn write<T>(out: *mut T, v: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

fn to_c_string(s: String) -> Result<*mut c_char, Fail> {
    CString::new(s).map(CString::into_raw).map_err(|_| Fail(FebeStatus::Internal, "string contains NUL".into()))
}

/// Error message of the most recent call on this thread, empty when that
/// call succeeded. The pointer stays valid until the next call on the same
/// thread.
#[no_mangle]
pub extern "C" fn febe_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn febe_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn febe_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a Hamiltonian spec document.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn febe_spec_from_json(json: *const c_char, out: *mut *mut FebeSpec) -> FebeStatus {
    guard(|| {
        let h = HamiltonianSpec::from_json(read_str(json, "json")?)?;
        write(out, Box::into_raw(Box::new(FebeSpec(h))), "out")
    })
}

/// Generates a Hubbard chain with hopping `t` and on-site term `u` on `n` modes.
///
/// # Safety
/// `out` must be a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn febe_spec_hubbard(n: u32, t: f64, u: f64, out: *mut *mut FebeSpec) -> FebeStatus {
    guard(|| {
        let h = gen_synthetic(SyntheticModel::Hubbard { t, u }, n as usize, 0)?;
        write(out, Box::into_raw(Box::new(FebeSpec(h))), "out")
    })
}

/// Serializes a spec to its JSON document. Free the result with [`febe_string_free`].
///
/// # Safety
/// `spec` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn febe_spec_to_json(spec: *const FebeSpec, out: *mut *mut c_char) -> FebeStatus {
    guard(|| {
        let s = deref(spec, "spec")?;
        write(out, to_c_string(s.0.to_json())?, "out")
    })
}

/// # Safety
/// `spec` must be NULL or a handle from this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn febe_spec_free(spec: *mut FebeSpec) {
    if !spec.is_null() {
        drop(Box::from_raw(spec));
    }
}

/// Options with the library defaults: 5-bit words, automatic λ, torus boundary.
#[no_mangle]
pub extern "C" fn febe_encode_options_default() -> FebeEncodeOptions {
    FebeEncodeOptions { m_b: EncodeOptions::default().m_b as u32, lambda: 0, eta: 0, m: 0, open_boundary: 0 }
}

fn convert(o: &FebeEncodeOptions) -> EncodeOptions {
    let some = |v: u32| (v != 0).then_some(v as usize);
    EncodeOptions {
        m_b: o.m_b as usize,
        lambda: some(o.lambda).map_or(LambdaChoice::Auto, LambdaChoice::Fixed),
        eta: some(o.eta),
        m: some(o.m),
        boundary: if o.open_boundary != 0 { Boundary::Open } else { Boundary::Torus },
        tables: None,
    }
}

/// Compiles `spec` with the encoder named by `class_name` (for example
/// `"one-body"` or `"eta-number"`). `opts` may be NULL for defaults.
///
/// # Safety
/// `spec` must be a live handle, `class_name` a NUL-terminated string, `opts`
/// NULL or readable, and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn febe_encode(
    spec: *const FebeSpec,
    class_name: *const c_char,
    opts: *const FebeEncodeOptions,
    out: *mut *mut FebeEncoding,
) -> FebeStatus {
    guard(|| {
        let s = deref(spec, "spec")?;
        let class = Class::parse(read_str(class_name, "class_name")?)?;
        let opts = opts.as_ref().copied().unwrap_or_else(|| febe_encode_options_default());
        let be = blockenc::encode(&s.0, class, &convert(&opts))?;
        write(out, Box::into_raw(Box::new(FebeEncoding { be, spec: s.0.clone() })), "out")
    })
}

/// # Safety
/// `enc` must be NULL or a handle from this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn febe_encoding_free(enc: *mut FebeEncoding) {
    if !enc.is_null() {
        drop(Box::from_raw(enc));
    }
}

/// Subnormalization α of the encoding.
///
/// # Safety
/// `enc` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn febe_encoding_alpha(enc: *const FebeEncoding, out: *mut f64) -> FebeStatus {
    guard(|| write(out, deref(enc, "encoding")?.be.alpha, "out"))
}

/// Total and system qubit counts of the unlowered circuit.
///
/// # Safety
/// `enc` must be a live handle; each out-pointer must be writable.
#[no_mangle]
pub unsafe extern "C" fn febe_encoding_qubits(enc: *const FebeEncoding, total: *mut u32, system: *mut u32) -> FebeStatus {
    guard(|| {
        let e = deref(enc, "encoding")?;
        write(total, e.be.circuit.qubit_count as u32, "total")?;
        write(system, e.be.system_qubits.len() as u32, "system")
    })
}

/// Counts resources after lowering with `model`.
///
/// # Safety
/// `enc` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn febe_encoding_resources(
    enc: *const FebeEncoding,
    model: FebeCostModel,
    out: *mut FebeResources,
) -> FebeStatus {
    guard(|| {
        let r = count_resources(&deref(enc, "encoding")?.be.circuit, model.into());
        let res = FebeResources {
            t_count: r.t_count,
            t_depth: r.t_depth,
            clifford_count: r.clifford_count,
            toffoli_count: r.toffoli_count,
            qubit_count: r.qubit_count,
            ancilla_high_water: r.ancilla_high_water,
        };
        write(out, res, "out")
    })
}

/// Simulates the circuit and compares its block with the reference matrix.
/// A failed comparison still returns `Ok`; read `pass` in the report.
///
/// # Safety
/// `enc` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn febe_verify(enc: *const FebeEncoding, out: *mut FebeVerifyReport) -> FebeStatus {
    guard(|| {
        let e = deref(enc, "encoding")?;
        let r = blockenc::verify(&e.be, e.be.default_mode())?;
        let rep = FebeVerifyReport {
            max_abs_dev: r.max_abs_dev,
            fro_dev: r.fro_dev,
            alpha: r.alpha_used,
            eps_bound: r.eps_bound,
            columns_checked: r.columns_checked as u64,
            pass: r.pass as u8,
        };
        write(out, rep, "out")
    })
}

/// Writes the encoding manifest as JSON. Free the result with [`febe_string_free`].
///
/// # Safety
/// `enc` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn febe_encoding_manifest(
    enc: *const FebeEncoding,
    model: FebeCostModel,
    out: *mut *mut c_char,
) -> FebeStatus {
    guard(|| {
        let e = deref(enc, "encoding")?;
        let m = Manifest::new(&e.be, &e.spec, model.into())?;
        let json = serde_json::to_string_pretty(&m).map_err(Error::from)?;
        write(out, to_c_string(json)?, "out")
    })
}

/// Lowers the circuit with `model` and writes it as OpenQASM 2 text.
/// Free the result with [`febe_string_free`].
///
/// # Safety
/// `enc` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn febe_encoding_qasm(
    enc: *const FebeEncoding,
    model: FebeCostModel,
    out: *mut *mut c_char,
) -> FebeStatus {
    guard(|| {
        let e = deref(enc, "encoding")?;
        let text = export_text(&lower(&e.be.circuit, model.into()))?;
        write(out, to_c_string(text)?, "out")
    })
}

/// Closed-form SELECT-SWAP lookup cost for `l` entries of `m_b` bits with
/// `lambda` parallel copies.
///
/// # Safety
/// `out` must be a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn febe_select_swap_cost(l: u64, lambda: u64, m_b: u64, out: *mut FebeSelectSwapCost) -> FebeStatus {
    guard(|| {
        if l == 0 || lambda == 0 || m_b == 0 || !lambda.is_power_of_two() {
            return Err(Fail(FebeStatus::InvalidArgument, "need L, m_b > 0 and λ a power of two".into()));
        }
        let c = formula_select_swap(l as usize, lambda as usize, m_b as usize);
        write(out, FebeSelectSwapCost { qubits: c.qubits, t_count: c.t_count, t_depth: c.t_depth }, "out")
    })
}
