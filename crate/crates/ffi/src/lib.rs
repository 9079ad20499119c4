//! C interface to `phasebin`.
//!
//! States, ensembles and distributions are opaque heap handles created by
//! `pb_*` constructors and released with the matching `pb_*_free`. Every
//! fallible call returns a [`PbStatus`]; on failure a message is kept per
//! thread and can be read with [`pb_last_error_message`]. Panics never cross
//! the boundary.
//!
//! Safety contract for every function: handle arguments are null or live
//! handles from this library, each freed at most once; output pointers are
//! null (reported as `NullPointer` where the output is required) or valid
//! for writes; buffers are valid for the stated length.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use phasebin::analytic::{self, SqueezedCoherentParams};
use phasebin::binning::{self, BinSpec};
use phasebin::diagnostics;
use phasebin::fock;
use phasebin::special;
use phasebin::{Error, GaussianWignerState, Method, NumberDistribution, PhaseAmplitude, TrajectoryEnsemble};

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PbStatus {
    Ok = 0,
    /// Argument outside the mathematical domain.
    Domain = 1,
    /// Not available for this state or distribution.
    Unsupported = 2,
    /// Quadrature, cutoff or trajectory-drift failure.
    Numerical = 3,
    /// Bad configuration or input file.
    Config = 4,
    Io = 5,
    NullPointer = 6,
    /// The output buffer is shorter than required.
    BufferTooSmall = 7,
    /// A Rust panic was caught.
    Panic = 8,
}

/// Estimator that produced a distribution.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PbMethod {
    Binned = 0,
    Analytic = 1,
    Quadrature = 2,
    WignerAverage = 3,
}

pub struct PbState(GaussianWignerState);
pub struct PbEnsemble(TrajectoryEnsemble);
pub struct PbDistribution(NumberDistribution);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(PbStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Domain(_) | Error::EmptyEnsemble | Error::InsufficientCoverage { .. } => PbStatus::Domain,
            Error::Unsupported(_) => PbStatus::Unsupported,
            Error::Quadrature { .. } | Error::Cutoff { .. } | Error::TrajectoryDrift { .. } => PbStatus::Numerical,
            Error::Config(_) | Error::Csv(_) | Error::Json(_) => PbStatus::Config,
            Error::Io { .. } => PbStatus::Io,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(PbStatus::NullPointer, format!("{what} is null"))
}

/// Run `f`, converting errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PbStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            PbStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_handle<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    write(out, Box::into_raw(Box::new(value)), "out")
}

unsafe fn copy_into(src: &[f64], out: *mut f64, len: usize) -> Result<(), Failure> {
    if len < src.len() {
        return Err(Failure(
            PbStatus::BufferTooSmall,
            format!("buffer holds {len} values, {} required", src.len()),
        ));
    }
    if out.is_null() {
        return Err(null("out"));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), out, src.len());
    Ok(())
}

fn amplitude(re: f64, im: f64) -> Result<PhaseAmplitude, Failure> {
    Ok(PhaseAmplitude::try_new(re, im)?)
}

/// Copy the calling thread's last error message into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length in bytes, or 0 when
/// there is none.
#[no_mangle]
pub unsafe extern "C" fn pb_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

// ---- states ----

#[no_mangle]
pub unsafe extern "C" fn pb_state_vacuum(out: *mut *mut PbState) -> PbStatus {
    guard(|| write_handle(out, PbState(GaussianWignerState::vacuum())))
}

#[no_mangle]
pub unsafe extern "C" fn pb_state_coherent(re: f64, im: f64, out: *mut *mut PbState) -> PbStatus {
    guard(|| write_handle(out, PbState(GaussianWignerState::coherent(amplitude(re, im)?)?)))
}

#[no_mangle]
pub unsafe extern "C" fn pb_state_thermal(nbar: f64, out: *mut *mut PbState) -> PbStatus {
    guard(|| write_handle(out, PbState(GaussianWignerState::thermal(nbar)?)))
}

/// Displacement `re + i·im`, squeezing `s ≥ 0` at angle `theta`.
#[no_mangle]
pub unsafe extern "C" fn pb_state_squeezed(re: f64, im: f64, s: f64, theta: f64, out: *mut *mut PbState) -> PbStatus {
    guard(|| {
        write_handle(
            out,
            PbState(GaussianWignerState::squeezed_coherent(amplitude(re, im)?, s, theta)?),
        )
    })
}

#[no_mangle]
pub unsafe extern "C" fn pb_state_free(state: *mut PbState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Wigner density `W(re + i·im)`.
#[no_mangle]
pub unsafe extern "C" fn pb_state_density(state: *const PbState, re: f64, im: f64, out: *mut f64) -> PbStatus {
    guard(|| {
        let st = deref(state, "state")?;
        write(out, st.0.density(amplitude(re, im)?)?, "out")
    })
}

/// Mean occupation `⟨n̂⟩`.
#[no_mangle]
pub unsafe extern "C" fn pb_state_mean_occupation(state: *const PbState, out: *mut f64) -> PbStatus {
    guard(|| write(out, deref(state, "state")?.0.mean_occupation(), "out"))
}

// ---- ensembles ----

/// Draw `count` samples; identical for identical `(state, count, seed)`.
#[no_mangle]
pub unsafe extern "C" fn pb_sample(
    state: *const PbState,
    count: usize,
    seed: u64,
    out: *mut *mut PbEnsemble,
) -> PbStatus {
    guard(|| {
        let st = deref(state, "state")?;
        write_handle(out, PbEnsemble(st.0.sample(count, seed)?))
    })
}

/// Build a one-mode ensemble from caller-supplied amplitudes.
#[no_mangle]
pub unsafe extern "C" fn pb_ensemble_from_samples(
    re: *const f64,
    im: *const f64,
    count: usize,
    out: *mut *mut PbEnsemble,
) -> PbStatus {
    guard(|| {
        if re.is_null() || im.is_null() {
            return Err(null("samples"));
        }
        let (re, im) = (
            std::slice::from_raw_parts(re, count),
            std::slice::from_raw_parts(im, count),
        );
        let samples = re
            .iter()
            .zip(im)
            .map(|(&x, &y)| amplitude(x, y))
            .collect::<Result<Vec<_>, _>>()?;
        write_handle(out, PbEnsemble(TrajectoryEnsemble::new(vec![samples], 0, 1)?))
    })
}

/// Samples per mode.
#[no_mangle]
pub unsafe extern "C" fn pb_ensemble_count(ens: *const PbEnsemble) -> usize {
    ens.as_ref().map_or(0, |e| e.0.count())
}

/// Copy mode `mode` into `re` and `im`, each of length `len ≥ count`.
#[no_mangle]
pub unsafe extern "C" fn pb_ensemble_copy_mode(
    ens: *const PbEnsemble,
    mode: usize,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> PbStatus {
    guard(|| {
        let samples = deref(ens, "ensemble")?.0.mode(mode)?;
        let xs: Vec<f64> = samples.iter().map(|a| a.re).collect();
        let ys: Vec<f64> = samples.iter().map(|a| a.im).collect();
        copy_into(&xs, re, len)?;
        copy_into(&ys, im, len)
    })
}

#[no_mangle]
pub unsafe extern "C" fn pb_ensemble_free(ens: *mut PbEnsemble) {
    if !ens.is_null() {
        drop(Box::from_raw(ens));
    }
}

// ---- special functions ----

/// `e^{-x/2} L_n(x)`; `ln_abs` receives `ln|·|`, which stays finite when
/// the value itself underflows. Either output may be null.
#[no_mangle]
pub unsafe extern "C" fn pb_laguerre_scaled(n: usize, x: f64, value: *mut f64, ln_abs: *mut f64) -> PbStatus {
    guard(|| {
        let v = special::laguerre_scaled(n, x)?;
        if !value.is_null() {
            value.write(v.value());
        }
        if !ln_abs.is_null() {
            ln_abs.write(v.ln_abs());
        }
        Ok(())
    })
}

/// Fock-state Wigner function `W_n(re + i·im)`.
#[no_mangle]
pub unsafe extern "C" fn pb_fock_wigner(n: usize, re: f64, im: f64, out: *mut f64) -> PbStatus {
    guard(|| write(out, fock::fock_wigner(n, amplitude(re, im)?)?, "out"))
}

// ---- number distributions ----

/// Bin `|α|²` of one mode into `n = 0..=n_max`.
#[no_mangle]
pub unsafe extern "C" fn pb_bin(
    ens: *const PbEnsemble,
    mode: usize,
    n_max: usize,
    out: *mut *mut PbDistribution,
) -> PbStatus {
    guard(|| {
        let e = deref(ens, "ensemble")?;
        write_handle(
            out,
            PbDistribution(binning::bin_ensemble(&e.0, mode, BinSpec::new(n_max))?),
        )
    })
}

/// Sample and bin in one pass without storing the ensemble.
#[no_mangle]
pub unsafe extern "C" fn pb_sample_and_bin(
    state: *const PbState,
    count: usize,
    seed: u64,
    n_max: usize,
    out: *mut *mut PbDistribution,
) -> PbStatus {
    guard(|| {
        let st = deref(state, "state")?;
        write_handle(
            out,
            PbDistribution(binning::sample_and_bin(&st.0, count, seed, BinSpec::new(n_max))?),
        )
    })
}

/// `P_n = π⟨W_n⟩` averaged over the samples of one mode.
#[no_mangle]
pub unsafe extern "C" fn pb_wigner_average(
    ens: *const PbEnsemble,
    mode: usize,
    n_max: usize,
    out: *mut *mut PbDistribution,
) -> PbStatus {
    guard(|| {
        let e = deref(ens, "ensemble")?;
        write_handle(out, PbDistribution(fock::pn_wigner_average(&e.0, mode, n_max)?))
    })
}

/// Exact `P_n` by phase-space quadrature.
#[no_mangle]
pub unsafe extern "C" fn pb_quadrature(state: *const PbState, n_max: usize, out: *mut *mut PbDistribution) -> PbStatus {
    guard(|| {
        let st = deref(state, "state")?;
        write_handle(out, PbDistribution(fock::pn_quadrature(&st.0, n_max)?))
    })
}

/// Binned `P̃_n` by quadrature over unit annuli.
#[no_mangle]
pub unsafe extern "C" fn pb_boxcar_quadrature(
    state: *const PbState,
    n_max: usize,
    out: *mut *mut PbDistribution,
) -> PbStatus {
    guard(|| {
        let st = deref(state, "state")?;
        write_handle(out, PbDistribution(binning::pn_boxcar_quadrature(&st.0, n_max)?))
    })
}

/// Geometric thermal distribution.
#[no_mangle]
pub unsafe extern "C" fn pb_thermal(nbar: f64, n_max: usize, out: *mut *mut PbDistribution) -> PbStatus {
    guard(|| write_handle(out, PbDistribution(analytic::pn_thermal(nbar, n_max)?)))
}

/// Closed-form squeezed coherent distribution. `n_max < 0` picks a cutoff
/// holding all but 1e-12 of the probability.
#[no_mangle]
pub unsafe extern "C" fn pb_squeezed_coherent(
    beta_mag: f64,
    varphi: f64,
    s: f64,
    theta: f64,
    n_max: i64,
    out: *mut *mut PbDistribution,
) -> PbStatus {
    guard(|| {
        let p = SqueezedCoherentParams::new(beta_mag, varphi, s, theta)?;
        let n_max = usize::try_from(n_max).ok();
        write_handle(out, PbDistribution(analytic::pn_squeezed_coherent(&p, n_max)?))
    })
}

/// Bhattacharyya distance and coefficient; either output may be null.
#[no_mangle]
pub unsafe extern "C" fn pb_bhattacharyya(
    p: *const PbDistribution,
    q: *const PbDistribution,
    distance: *mut f64,
    coefficient: *mut f64,
) -> PbStatus {
    guard(|| {
        let b = diagnostics::bhattacharyya(&deref(p, "p")?.0, &deref(q, "q")?.0);
        if !distance.is_null() {
            distance.write(b.distance);
        }
        if !coefficient.is_null() {
            coefficient.write(b.coefficient);
        }
        Ok(())
    })
}

/// Closed-form distance between thermal `P_n` and its binned estimate.
#[no_mangle]
pub unsafe extern "C" fn pb_db_thermal(nbar: f64, out: *mut f64) -> PbStatus {
    guard(|| write(out, analytic::db_thermal(nbar)?, "out"))
}

/// Number of entries, `n_max + 1`.
#[no_mangle]
pub unsafe extern "C" fn pb_distribution_len(d: *const PbDistribution) -> usize {
    d.as_ref().map_or(0, |d| d.0.len())
}

#[no_mangle]
pub unsafe extern "C" fn pb_distribution_method(d: *const PbDistribution, out: *mut PbMethod) -> PbStatus {
    guard(|| {
        let m = match deref(d, "distribution")?.0.method() {
            Method::Binned => PbMethod::Binned,
            Method::Analytic => PbMethod::Analytic,
            Method::Quadrature => PbMethod::Quadrature,
            Method::WignerAverage => PbMethod::WignerAverage,
        };
        write(out, m, "out")
    })
}

/// Copy the probabilities into `out[0..len]`.
#[no_mangle]
pub unsafe extern "C" fn pb_distribution_probs(d: *const PbDistribution, out: *mut f64, len: usize) -> PbStatus {
    guard(|| copy_into(deref(d, "distribution")?.0.probs(), out, len))
}

/// Copy the standard errors; `Unsupported` for exact distributions.
#[no_mangle]
pub unsafe extern "C" fn pb_distribution_stderr(d: *const PbDistribution, out: *mut f64, len: usize) -> PbStatus {
    guard(|| {
        let se = deref(d, "distribution")?.0.stderr().ok_or_else(|| {
            Failure(
                PbStatus::Unsupported,
                "exact distributions carry no standard errors".into(),
            )
        })?;
        copy_into(se, out, len)
    })
}

#[no_mangle]
pub unsafe extern "C" fn pb_distribution_free(d: *mut PbDistribution) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}
