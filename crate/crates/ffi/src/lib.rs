//! C ABI over the `mdlnet` toolkit.
//!
//! Objects cross the boundary as opaque handles ([`MdlnetNetwork`],
//! [`MdlnetDataset`]) that the caller releases with the matching `_free`
//! function. Every fallible function returns an [`MdlnetStatus`] and writes
//! its results through out-pointers; on failure a description is available
//! from [`mdlnet_last_error`] on the same thread. Strings returned by the
//! library must be released with [`mdlnet_string_free`]. Panics never
//! unwind into the caller; they surface as `MDLNET_STATUS_PANIC`.
//!
//! The header `include/mdlnet.h` is generated from this file at build time.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use mdlnet::bounds::{self, Problem};
use mdlnet::format;
use mdlnet::learn::{self, SubsampleOptions};
use mdlnet::{BayesNet, Dataset, Error, Penalty, Structure};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MdlnetStatus {
    Ok = 0,
    /// Malformed or out-of-domain input.
    Input = 1,
    /// A size limit was exceeded.
    Capacity = 2,
    /// A required pointer argument was null.
    NullPointer = 3,
    /// Internal panic; the library state is unaffected.
    Panic = 4,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 5,
}

/// Search strategy of [`mdlnet_learn`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MdlnetLearnMode {
    Exhaustive = 0,
    Greedy = 1,
    Subsampled = 2,
}

/// Opaque Bayesian network handle.
pub struct MdlnetNetwork(BayesNet);

/// Opaque dataset handle.
pub struct MdlnetDataset(Dataset);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

/// Message of the last failed call on this thread, or "" if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mdlnet_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

enum Failure {
    Status(MdlnetStatus, String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type FfiResult<T> = Result<T, Failure>;

fn guard(f: impl FnOnce() -> FfiResult<()>) -> MdlnetStatus {
    let outcome = catch_unwind(AssertUnwindSafe(f));
    let (status, msg) = match outcome {
        Ok(Ok(())) => return MdlnetStatus::Ok,
        Ok(Err(Failure::Status(s, m))) => (s, m),
        Ok(Err(Failure::Lib(e))) => {
            let s = if e.is_capacity() {
                MdlnetStatus::Capacity
            } else {
                MdlnetStatus::Input
            };
            (s, e.to_string())
        }
        Err(payload) => {
            let m = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            (MdlnetStatus::Panic, m)
        }
    };
    set_last_error(&msg);
    status
}

fn null(what: &str) -> Failure {
    Failure::Status(MdlnetStatus::NullPointer, format!("{what} is null"))
}

fn input(msg: impl Into<String>) -> Failure {
    Failure::Status(MdlnetStatus::Input, msg.into())
}

/// # Safety
/// `p` must be null or a valid NUL-terminated string.
unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Status(MdlnetStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

/// # Safety
/// `p` must be null or a live handle.
unsafe fn handle<'a, T>(p: *const T, what: &str) -> FfiResult<&'a T> {
    p.as_ref().ok_or_else(|| null(what))
}

/// # Safety
/// `out` must be null or valid for writes.
unsafe fn put<T>(out: *mut T, value: T, what: &str) -> FfiResult<()> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).expect("library text has no NUL").into_raw()
}

fn penalty(s: &str) -> FfiResult<Penalty> {
    Ok(s.parse::<Penalty>()?)
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a pointer obtained from this library and not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn mdlnet_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a network in the text format.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mdlnet_network_parse(
    text: *const c_char,
    out: *mut *mut MdlnetNetwork,
) -> MdlnetStatus {
    guard(|| {
        let text = str_arg(text, "text")?;
        let net = format::parse_network(text)?;
        put(out, Box::into_raw(Box::new(MdlnetNetwork(net))), "out")
    })
}

/// Releases a network handle. Null is ignored.
///
/// # Safety
/// `net` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn mdlnet_network_free(net: *mut MdlnetNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// Renders a network in the text format under the given name.
///
/// # Safety
/// `net` must be a live handle, `name` a NUL-terminated string, `out` valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn mdlnet_network_to_string(
    net: *const MdlnetNetwork,
    name: *const c_char,
    out: *mut *mut c_char,
) -> MdlnetStatus {
    guard(|| {
        let net = handle(net, "net")?;
        let name = str_arg(name, "name")?;
        if name.is_empty() || name.contains(char::is_whitespace) {
            return Err(input("network name must be one nonempty word"));
        }
        put(
            out,
            into_c_string(format::write_network(&net.0, name)),
            "out",
        )
    })
}

/// Number of variables of a network.
///
/// # Safety
/// `net` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mdlnet_network_num_vars(
    net: *const MdlnetNetwork,
    out: *mut usize,
) -> MdlnetStatus {
    guard(|| put(out, handle(net, "net")?.0.schema().len(), "out"))
}

/// Parameter count |G| of a network's structure.
///
/// # Safety
/// `net` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mdlnet_network_param_count(
    net: *const MdlnetNetwork,
    out: *mut u64,
) -> MdlnetStatus {
    guard(|| put(out, handle(net, "net")?.0.structure().param_count(), "out"))
}

/// Joint probability of a complete assignment of `len` value indices.
///
/// # Safety
/// `net` must be a live handle, `values` point to `len` readable entries,
/// `out` be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mdlnet_network_joint_prob(
    net: *const MdlnetNetwork,
    values: *const usize,
    len: usize,
    out: *mut f64,
) -> MdlnetStatus {
    guard(|| {
        let net = handle(net, "net")?;
        if values.is_null() {
            return Err(null("values"));
        }
        let assignment = std::slice::from_raw_parts(values, len);
        put(out, net.0.joint_prob(assignment)?, "out")
    })
}

/// Draws `rows` rows by ancestral sampling with the given seed.
///
/// # Safety
/// `net` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mdlnet_network_sample(
    net: *const MdlnetNetwork,
    rows: usize,
    seed: u64,
    out: *mut *mut MdlnetDataset,
) -> MdlnetStatus {
    guard(|| {
        let data = handle(net, "net")?.0.sample(rows, seed);
        put(out, Box::into_raw(Box::new(MdlnetDataset(data))), "out")
    })
}

/// Parses dataset CSV. When `schema` is non-null its variables fix the
/// column names and cardinalities; otherwise cardinalities are inferred.
///
/// # Safety
/// `text` must be a NUL-terminated string, `schema` null or a live handle,
/// `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mdlnet_dataset_parse_csv(
    text: *const c_char,
    schema: *const MdlnetNetwork,
    out: *mut *mut MdlnetDataset,
) -> MdlnetStatus {
    guard(|| {
        let text = str_arg(text, "text")?;
        let schema = schema.as_ref().map(|n| n.0.schema());
        let data = format::parse_dataset(text, schema)?;
        put(out, Box::into_raw(Box::new(MdlnetDataset(data))), "out")
    })
}

/// Releases a dataset handle. Null is ignored.
///
/// # Safety
/// `data` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn mdlnet_dataset_free(data: *mut MdlnetDataset) {
    if !data.is_null() {
        drop(Box::from_raw(data));
    }
}

/// # Safety
/// `data` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mdlnet_dataset_num_rows(
    data: *const MdlnetDataset,
    out: *mut usize,
) -> MdlnetStatus {
    guard(|| put(out, handle(data, "data")?.0.n_rows(), "out"))
}

/// Renders a dataset as CSV.
///
/// # Safety
/// `data` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mdlnet_dataset_to_csv(
    data: *const MdlnetDataset,
    out: *mut *mut c_char,
) -> MdlnetStatus {
    guard(|| {
        put(
            out,
            into_c_string(format::write_dataset(&handle(data, "data")?.0)),
            "out",
        )
    })
}

/// Scores the structure given as an edge list (`"X->Y Y->Z"`, empty for no
/// edges). Either out-pointer may be null.
///
/// # Safety
/// `data` must be a live handle, `structure` and `penalty` NUL-terminated
/// strings, each out-pointer null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mdlnet_score(
    data: *const MdlnetDataset,
    structure: *const c_char,
    penalty_token: *const c_char,
    out_score: *mut f64,
    out_log_likelihood: *mut f64,
) -> MdlnetStatus {
    guard(|| {
        let data = &handle(data, "data")?.0;
        let g =
            Structure::parse_edge_list(data.schema().clone(), str_arg(structure, "structure")?)?;
        let p = penalty(str_arg(penalty_token, "penalty")?)?;
        let report = mdlnet::score::score(&g, data, p)?;
        if !out_score.is_null() {
            out_score.write(report.score);
        }
        if !out_log_likelihood.is_null() {
            out_log_likelihood.write(report.log_likelihood);
        }
        Ok(())
    })
}

/// Learns a network. `restarts` applies to greedy search; `eps` and `delta`
/// to the subsampled mode; `seed` to both. `out_score` may be null.
///
/// # Safety
/// `data` must be a live handle, `penalty` a NUL-terminated string, `out`
/// valid for writes, `out_score` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mdlnet_learn(
    data: *const MdlnetDataset,
    penalty_token: *const c_char,
    mode: MdlnetLearnMode,
    restarts: usize,
    eps: f64,
    delta: f64,
    seed: u64,
    out: *mut *mut MdlnetNetwork,
    out_score: *mut f64,
) -> MdlnetStatus {
    guard(|| {
        let data = &handle(data, "data")?.0;
        let p = penalty(str_arg(penalty_token, "penalty")?)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let result = match mode {
            MdlnetLearnMode::Exhaustive => learn::learn_exhaustive(data, p)?,
            MdlnetLearnMode::Greedy => learn::learn_greedy(data, p, restarts, seed)?,
            MdlnetLearnMode::Subsampled => learn::learn_subsampled(
                data,
                p,
                &SubsampleOptions {
                    eps,
                    delta,
                    seed,
                    min_prob: None,
                },
            )?,
        };
        if !out_score.is_null() {
            out_score.write(result.report.score);
        }
        put(
            out,
            Box::into_raw(Box::new(MdlnetNetwork(result.net))),
            "out",
        )
    })
}

/// (N+1)^card_u · 2^(−N·eps). May be +inf.
#[no_mangle]
pub extern "C" fn mdlnet_sanov_bound(n_samples: u64, card_u: u64, eps: f64) -> f64 {
    bounds::sanov_bound(n_samples, card_u, eps)
}

/// (N+1)^card_u · 2^(−N·((1−m)m/4)²). May be +inf.
#[no_mangle]
pub extern "C" fn mdlnet_skew_bound(n_samples: u64, card_u: u64, m: f64) -> f64 {
    bounds::skew_bound(n_samples, card_u, m)
}

/// Minimal N with N/ψ(N) > g/eps.
///
/// # Safety
/// `penalty` must be a NUL-terminated string; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mdlnet_ideal_case_n(
    g: u64,
    eps: f64,
    penalty_token: *const c_char,
    out: *mut u64,
) -> MdlnetStatus {
    guard(|| {
        let p = penalty(str_arg(penalty_token, "penalty")?)?;
        put(out, bounds::ideal_case_n(g, eps, p)?, "out")
    })
}

/// The x ≥ 4 with x / log₂ x = y, for y ≥ 2.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mdlnet_f_inverse(y: f64, out: *mut f64) -> MdlnetStatus {
    guard(|| put(out, bounds::f_inverse(y)?, "out"))
}

/// Error function e(a, b, c, m). Writes 1 to `out_valid` and the value to
/// `out` inside its domain, 0 to `out_valid` otherwise.
///
/// # Safety
/// Both out-pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mdlnet_lemma37_e(
    a: f64,
    b: f64,
    c: f64,
    m: f64,
    out: *mut f64,
    out_valid: *mut i32,
) -> MdlnetStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        match bounds::lemma37_e(a, b, c, m) {
            Some(e) => {
                out.write(e);
                put(out_valid, 1, "out_valid")
            }
            None => put(out_valid, 0, "out_valid"),
        }
    })
}

/// Sub-sample size for estimating the entropy of a `card`-valued variable.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mdlnet_family_sample_size(
    card: usize,
    m: f64,
    eps: f64,
    delta: f64,
    out: *mut u64,
) -> MdlnetStatus {
    guard(|| put(out, learn::family_sample_size(card, m, eps, delta)?, "out"))
}

/// Minimal N meeting (eps, delta) for the given problem, with the default
/// search grid and cap. `out_feasible` receives 0 when no N below the cap
/// works, in which case the other outputs are untouched.
///
/// # Safety
/// `penalty` must be a NUL-terminated string; all out-pointers valid for
/// writes.
#[no_mangle]
pub unsafe extern "C" fn mdlnet_sample_complexity(
    eps: f64,
    delta: f64,
    n_vars: u32,
    card_u: u64,
    m: f64,
    g: u64,
    penalty_token: *const c_char,
    out_feasible: *mut i32,
    out_n: *mut u64,
    out_a: *mut f64,
    out_b: *mut f64,
) -> MdlnetStatus {
    guard(|| {
        let p = penalty(str_arg(penalty_token, "penalty")?)?;
        if out_n.is_null() || out_a.is_null() || out_b.is_null() {
            return Err(null("output"));
        }
        let prob = Problem::new(n_vars, card_u, m, g, p)?;
        match bounds::sample_complexity(eps, delta, &prob)? {
            Some(s) => {
                out_n.write(s.n_samples);
                out_a.write(s.a);
                out_b.write(s.b);
                put(out_feasible, 1, "out_feasible")
            }
            None => put(out_feasible, 0, "out_feasible"),
        }
    })
}
