//! C ABI for `bellmono`.
//!
//! States and partitions cross the boundary as opaque handles. Constructors
//! write a new handle through an out-pointer; release it with the matching
//! `*_free`. Every fallible call returns a [`BmStatus`], and after a failure
//! [`bm_last_error`] describes it. Strings handed out through out-pointers
//! belong to the caller and must be released with [`bm_string_free`].

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use libc::c_char;

use bellmono::bell::{eq3_upper_bound, maximize_bell, Budget, Functional, Plane};
use bellmono::monogamy::{check_state, parse_scenario_spec, AnticommutingPartition, Sharing};
use bellmono::pauli::PauliString;
use bellmono::qstate::{QuantumState, StateVector};
use bellmono::scenarios;
use bellmono::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    CertificationFailed = 3,
    Io = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BmFunctional {
    General = 0,
    Mermin = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BmSharing {
    Settings = 0,
    Plane = 1,
}

/// Settings-search effort; see [`bm_budget_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BmBudget {
    pub grid_resolution: usize,
    pub refinement_passes: usize,
    pub restarts: usize,
    pub seed: u64,
    pub max_sweeps: usize,
}

/// Opaque pure state.
pub struct BmState {
    inner: StateVector,
}

/// Opaque anticommuting partition.
pub struct BmPartition {
    inner: AnticommutingPartition,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(BmStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Certification(_) | Error::NotAnticommuting { .. } => {
                BmStatus::CertificationFailed
            }
            Error::Io(_) => BmStatus::Io,
            _ => BmStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn set_last_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = text);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> BmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            BmStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_last_error(&message);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            BmStatus::Panic
        }
    }
}

fn null(name: &str) -> Failure {
    Failure(BmStatus::NullPointer, format!("{name} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(BmStatus::InvalidArgument, format!("{name} is not UTF-8")))
}

unsafe fn state_arg<'a>(p: *const BmState) -> Result<&'a StateVector, Failure> {
    p.as_ref().map(|s| &s.inner).ok_or_else(|| null("state"))
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, name: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(name));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn write_out<T>(out: *mut T, value: T, name: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, text: String) -> Result<(), Failure> {
    let c = CString::new(text)
        .map_err(|_| Failure(BmStatus::InvalidArgument, "interior NUL".into()))?;
    write_out(out, c.into_raw(), "out")
}

unsafe fn write_state(out: *mut *mut BmState, state: StateVector) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(Box::into_raw(Box::new(BmState { inner: state })));
    Ok(())
}

unsafe fn budget_arg(p: *const BmBudget) -> Budget {
    match p.as_ref() {
        None => Budget::default(),
        Some(b) => Budget {
            grid_resolution: b.grid_resolution,
            refinement_passes: b.refinement_passes,
            restarts: b.restarts,
            seed: b.seed,
            max_sweeps: b.max_sweeps,
        },
    }
}

impl From<BmFunctional> for Functional {
    fn from(f: BmFunctional) -> Self {
        match f {
            BmFunctional::General => Functional::General,
            BmFunctional::Mermin => Functional::Mermin,
        }
    }
}

impl From<BmSharing> for Sharing {
    fn from(s: BmSharing) -> Self {
        match s {
            BmSharing::Settings => Sharing::Settings,
            BmSharing::Plane => Sharing::Plane,
        }
    }
}

/// Message describing the last failure on this thread, or an empty string.
/// The pointer stays valid until the next call into this library on the
/// same thread.
#[no_mangle]
pub extern "C" fn bm_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn bm_budget_default() -> BmBudget {
    let b = Budget::default();
    BmBudget {
        grid_resolution: b.grid_resolution,
        refinement_passes: b.refinement_passes,
        restarts: b.restarts,
        seed: b.seed,
        max_sweeps: b.max_sweeps,
    }
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// `(|0..0> + e^{i phase}|1..1>)/sqrt 2` on `n` qubits.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn bm_state_ghz(n: usize, phase: f64, out: *mut *mut BmState) -> BmStatus {
    guard(|| write_state(out, scenarios::ghz(n, phase)?))
}

/// Star witness on `2m + 1` qubits.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn bm_state_psi_mono(
    m: usize,
    alpha: f64,
    out: *mut *mut BmState,
) -> BmStatus {
    guard(|| write_state(out, scenarios::psi_mono(m, alpha)?))
}

/// Equal superposition over the chosen root-to-leaf paths of a binary tree.
///
/// # Safety
/// `paths` must point to `n_paths` readable values; `out` must be valid for
/// a pointer write.
#[no_mangle]
pub unsafe extern "C" fn bm_state_tree(
    depth: usize,
    paths: *const usize,
    n_paths: usize,
    out: *mut *mut BmState,
) -> BmStatus {
    guard(|| {
        let paths = slice_arg(paths, n_paths, "paths")?;
        write_state(out, scenarios::tree_state(depth, paths)?)
    })
}

/// Builds a state from a spec such as `"ghz:n=3"` or `"file:state.json"`.
///
/// # Safety
/// `spec` must be a NUL-terminated string; `out` must be valid for a
/// pointer write.
#[no_mangle]
pub unsafe extern "C" fn bm_state_parse(spec: *const c_char, out: *mut *mut BmState) -> BmStatus {
    guard(|| write_state(out, scenarios::parse_state_spec(str_arg(spec, "spec")?)?))
}

/// # Safety
/// `json` must be a NUL-terminated string; `out` must be valid for a
/// pointer write.
#[no_mangle]
pub unsafe extern "C" fn bm_state_from_json(
    json: *const c_char,
    out: *mut *mut BmState,
) -> BmStatus {
    guard(|| write_state(out, StateVector::from_json(str_arg(json, "json")?)?))
}

/// # Safety
/// `state` must be valid; `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn bm_state_to_json(
    state: *const BmState,
    out: *mut *mut c_char,
) -> BmStatus {
    guard(|| write_string(out, state_arg(state)?.to_json()?))
}

/// # Safety
/// `state` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bm_state_free(state: *mut BmState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Qubit count, or 0 for a null handle.
///
/// # Safety
/// `state` must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn bm_state_n_qubits(state: *const BmState) -> usize {
    state.as_ref().map_or(0, |s| s.inner.n_qubits())
}

/// `<psi|P|psi>` for a Pauli label such as `"XYZ"`.
///
/// # Safety
/// `state` must be valid, `label` NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bm_expectation(
    state: *const BmState,
    label: *const c_char,
    out: *mut f64,
) -> BmStatus {
    guard(|| {
        let p: PauliString = str_arg(label, "label")?.parse()?;
        write_out(out, state_arg(state)?.expectation(&p)?, "out")
    })
}

/// Whether two Pauli labels of equal length anticommute.
///
/// # Safety
/// `a` and `b` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bm_anticommutes(
    a: *const c_char,
    b: *const c_char,
    out: *mut bool,
) -> BmStatus {
    guard(|| {
        let a: PauliString = str_arg(a, "a")?.parse()?;
        let b: PauliString = str_arg(b, "b")?.parse()?;
        write_out(out, a.anticommutes(&b)?, "out")
    })
}

/// Numerical quantum value of `functional` on the parties in `subset`.
/// A null `budget` selects the default.
///
/// # Safety
/// `subset` must point to `n` readable values, `budget` must be null or
/// valid, `state` valid and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bm_maximize_bell(
    state: *const BmState,
    subset: *const usize,
    n: usize,
    functional: BmFunctional,
    budget: *const BmBudget,
    out: *mut f64,
) -> BmStatus {
    guard(|| {
        let subset = slice_arg(subset, n, "subset")?;
        let report = maximize_bell(
            state_arg(state)?,
            subset,
            functional.into(),
            &budget_arg(budget),
        )?;
        write_out(out, report.value, "out")
    })
}

/// Upper bound on the general value from the correlations in each party's
/// plane. `planes` holds six numbers per party (two orthonormal vectors);
/// null means the `xy` plane for everyone.
///
/// # Safety
/// `subset` must point to `n` readable values, `planes` must be null or
/// point to `6 n` readable values, `state` valid and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bm_eq3_bound(
    state: *const BmState,
    subset: *const usize,
    n: usize,
    planes: *const f64,
    out: *mut f64,
) -> BmStatus {
    guard(|| {
        let subset = slice_arg(subset, n, "subset")?;
        let planes = if planes.is_null() {
            vec![Plane::XY; n]
        } else {
            slice_arg(planes, 6 * n, "planes")?
                .chunks_exact(6)
                .map(|c| Plane::new([c[0], c[1], c[2]], [c[3], c[4], c[5]]))
                .collect::<Result<Vec<_>, _>>()?
        };
        write_out(
            out,
            eq3_upper_bound(state_arg(state)?, subset, &planes)?,
            "out",
        )
    })
}

/// Built-in partition of a scenario spec (`"triangle"`, `"star:M=2"`, ...),
/// certified before it is returned.
///
/// # Safety
/// `spec` must be NUL-terminated; `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn bm_partition_for_scenario(
    spec: *const c_char,
    out: *mut *mut BmPartition,
) -> BmStatus {
    guard(|| {
        let (scenario, partition) = parse_scenario_spec(str_arg(spec, "spec")?)?;
        partition.certify_for(&scenario)?;
        write_out(
            out,
            Box::into_raw(Box::new(BmPartition { inner: partition })),
            "out",
        )
    })
}

/// Parses the text format: one set per line, labels separated by spaces.
///
/// # Safety
/// `text` must be NUL-terminated; `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn bm_partition_from_text(
    text: *const c_char,
    out: *mut *mut BmPartition,
) -> BmStatus {
    guard(|| {
        let partition = AnticommutingPartition::parse_text(str_arg(text, "text")?)?;
        write_out(
            out,
            Box::into_raw(Box::new(BmPartition { inner: partition })),
            "out",
        )
    })
}

/// # Safety
/// `partition` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bm_partition_free(partition: *mut BmPartition) {
    if !partition.is_null() {
        drop(Box::from_raw(partition));
    }
}

/// Number of sets (the monogamy bound), or 0 for a null handle.
///
/// # Safety
/// `partition` must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn bm_partition_set_count(partition: *const BmPartition) -> usize {
    partition.as_ref().map_or(0, |p| p.inner.bound())
}

/// # Safety
/// `partition` must be valid; `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn bm_partition_to_text(
    partition: *const BmPartition,
    out: *mut *mut c_char,
) -> BmStatus {
    guard(|| {
        let p = partition.as_ref().ok_or_else(|| null("partition"))?;
        write_string(out, p.inner.to_text())
    })
}

/// Checks `state` against the monogamy relation of a scenario spec using
/// its built-in partition, and writes the report as JSON.
///
/// # Safety
/// `scenario` must be NUL-terminated, `state` valid, `budget` null or
/// valid, and `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn bm_check_state(
    scenario: *const c_char,
    state: *const BmState,
    functional: BmFunctional,
    sharing: BmSharing,
    budget: *const BmBudget,
    out: *mut *mut c_char,
) -> BmStatus {
    guard(|| {
        let (scenario, partition) = parse_scenario_spec(str_arg(scenario, "scenario")?)?;
        let report = check_state(
            &scenario,
            state_arg(state)?,
            &partition,
            functional.into(),
            sharing.into(),
            &budget_arg(budget),
        )?;
        let json = serde_json::to_string(&report)
            .map_err(|e| Failure(BmStatus::InvalidArgument, e.to_string()))?;
        write_string(out, json)
    })
}
