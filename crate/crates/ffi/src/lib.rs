//! C ABI over the `crosstalk` engines.
//!
//! Every function returns a status code and writes results through out
//! pointers. A `CtSystem` is an opaque handle owned by the caller and
//! released with `ct_system_free`. Detailed messages for the most recent
//! failure on the calling thread are available from `ct_last_error`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use crosstalk::analytic;
use crosstalk::spectra::{self, Axis, Engine, ScanSpec, SusceptibilityPoint};
use crosstalk::timedomain::IntegrationConfig;
use crosstalk::{Error, SystemParams};
use num_complex::Complex64;

pub const CT_OK: i32 = 0;
pub const CT_NULL_POINTER: i32 = 1;
pub const CT_INVALID_PARAMETER: i32 = 2;
pub const CT_ENGINE_ERROR: i32 = 3;
pub const CT_BUFFER_TOO_SMALL: i32 = 5;
pub const CT_PANIC: i32 = 6;

pub const CT_ENGINE_ANALYTIC: i32 = 0;
pub const CT_ENGINE_BLOCH: i32 = 1;
pub const CT_ENGINE_TIMEDOMAIN: i32 = 2;
pub const CT_ENGINE_LAMBDA: i32 = 3;

pub const CT_AXIS_PROBE: i32 = 0;
pub const CT_AXIS_CONTROL: i32 = 1;
pub const CT_AXIS_RABI: i32 = 2;
pub const CT_AXIS_LOCKED: i32 = 3;

/// Opaque parameter set.
pub struct CtSystem {
    params: SystemParams,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CtComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for CtComplex {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

/// Model inputs in units of the excited-state decay rate.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CtParams {
    pub b_excited: f64,
    pub b_ground: f64,
    pub control_detuning: f64,
    pub probe_detuning: f64,
    pub control_rabi: CtComplex,
    pub gamma1: f64,
    pub gamma2: f64,
}

impl From<SystemParams> for CtParams {
    fn from(p: SystemParams) -> Self {
        Self {
            b_excited: p.b_excited,
            b_ground: p.b_ground,
            control_detuning: p.control_detuning,
            probe_detuning: p.probe_detuning,
            control_rabi: p.control_rabi.into(),
            gamma1: p.gamma1,
            gamma2: p.gamma2,
        }
    }
}

impl From<CtParams> for SystemParams {
    fn from(p: CtParams) -> Self {
        Self {
            b_excited: p.b_excited,
            b_ground: p.b_ground,
            control_detuning: p.control_detuning,
            probe_detuning: p.probe_detuning,
            control_rabi: Complex64::new(p.control_rabi.re, p.control_rabi.im),
            gamma1: p.gamma1,
            gamma2: p.gamma2,
        }
    }
}

/// First-order response at one parameter point.
///
/// `has_chi_plus` is 0 for the Lambda engine and `has_terms` is 0 for the
/// timedomain engine; the corresponding fields are then zero.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CtResponse {
    pub coordinate: f64,
    pub chi_minus: CtComplex,
    pub chi_plus: CtComplex,
    pub has_chi_plus: i32,
    pub has_terms: i32,
    pub term_coh_pp: CtComplex,
    pub term_coh_mm: CtComplex,
    pub term_pop: CtComplex,
    /// Zeroth-order populations of e+, e-, g+, g-.
    pub populations: [f64; 4],
}

impl From<&SusceptibilityPoint> for CtResponse {
    fn from(p: &SusceptibilityPoint) -> Self {
        let terms = p.terms.unwrap_or_default();
        Self {
            coordinate: p.coordinate,
            chi_minus: p.chi_minus.into(),
            chi_plus: p.chi_plus.unwrap_or_default().into(),
            has_chi_plus: p.chi_plus.is_some() as i32,
            has_terms: p.terms.is_some() as i32,
            term_coh_pp: terms.coh_pp.into(),
            term_coh_mm: terms.coh_mm.into(),
            term_pop: terms.pop.into(),
            populations: p.populations,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

struct Failure(i32, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_validation() { CT_INVALID_PARAMETER } else { CT_ENGINE_ERROR };
        Failure(code, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(CT_NULL_POINTER, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> i32 {
    let (code, msg) = match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => (CT_OK, String::new()),
        Ok(Err(Failure(code, msg))) => (code, msg),
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            (CT_PANIC, msg)
        }
    };
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
    code
}

unsafe fn handle<'a>(sys: *const CtSystem) -> Result<&'a CtSystem, Failure> {
    sys.as_ref().ok_or_else(|| null("system"))
}

unsafe fn out<'a, T>(ptr: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    ptr.as_mut().ok_or_else(|| null(what))
}

fn engine(code: i32) -> Result<Engine, Failure> {
    match code {
        CT_ENGINE_ANALYTIC => Ok(Engine::Analytic),
        CT_ENGINE_BLOCH => Ok(Engine::Bloch),
        CT_ENGINE_TIMEDOMAIN => Ok(Engine::TimeDomain(IntegrationConfig::default())),
        CT_ENGINE_LAMBDA => Ok(Engine::Lambda),
        _ => Err(Failure(CT_INVALID_PARAMETER, format!("unknown engine {code}"))),
    }
}

fn axis(code: i32) -> Result<Axis, Failure> {
    match code {
        CT_AXIS_PROBE => Ok(Axis::Probe),
        CT_AXIS_CONTROL => Ok(Axis::Control),
        CT_AXIS_RABI => Ok(Axis::Rabi),
        CT_AXIS_LOCKED => Ok(Axis::Locked),
        _ => Err(Failure(CT_INVALID_PARAMETER, format!("unknown axis {code}"))),
    }
}

/// Fill `out_params` with the reference parameter set.
///
/// # Safety
/// `out_params` must be null or point to writable memory for one `CtParams`.
#[no_mangle]
pub unsafe extern "C" fn ct_params_default(out_params: *mut CtParams) -> i32 {
    guard(|| {
        *out(out_params, "out_params")? = SystemParams::potassium_reference().into();
        Ok(())
    })
}

/// Validate `params` and allocate a handle in `*out_system`.
///
/// # Safety
/// `params` must be null or valid; `out_system` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn ct_system_new(params: *const CtParams, out_system: *mut *mut CtSystem) -> i32 {
    guard(|| {
        let slot = out(out_system, "out_system")?;
        let p: SystemParams = (*params.as_ref().ok_or_else(|| null("params"))?).into();
        p.validate()?;
        *slot = Box::into_raw(Box::new(CtSystem { params: p }));
        Ok(())
    })
}

/// Release a handle. Null is ignored.
///
/// # Safety
/// `system` must be null or a handle from `ct_system_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ct_system_free(system: *mut CtSystem) {
    if !system.is_null() {
        drop(Box::from_raw(system));
    }
}

/// Replace both detunings; the handle is unchanged on failure.
///
/// # Safety
/// `system` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ct_system_set_detunings(system: *mut CtSystem, probe: f64, control: f64) -> i32 {
    guard(|| {
        let sys = system.as_mut().ok_or_else(|| null("system"))?;
        let p = sys.params.with_detunings(probe, control);
        p.validate()?;
        sys.params = p;
        Ok(())
    })
}

/// # Safety
/// `system` must be null or a live handle; `out_params` null or writable.
#[no_mangle]
pub unsafe extern "C" fn ct_system_params(system: *const CtSystem, out_params: *mut CtParams) -> i32 {
    guard(|| {
        let sys = handle(system)?;
        *out(out_params, "out_params")? = sys.params.into();
        Ok(())
    })
}

/// Susceptibilities at the handle's parameters using `engine`
/// (one of the `CT_ENGINE_*` constants).
///
/// # Safety
/// `system` must be null or a live handle; `out_response` null or writable.
#[no_mangle]
pub unsafe extern "C" fn ct_chi(system: *const CtSystem, engine_code: i32, out_response: *mut CtResponse) -> i32 {
    guard(|| {
        let sys = handle(system)?;
        let slot = out(out_response, "out_response")?;
        let e = engine(engine_code)?;
        let p = &sys.params;
        if e != Engine::Lambda && p.omega12().abs() < crosstalk::bloch::RESONANT_OMEGA12 {
            return Err(Error::ResonantDegeneracy { omega12: p.omega12() }.into());
        }
        *slot = (&spectra::evaluate(&e, p, p.probe_detuning)?).into();
        Ok(())
    })
}

/// Zeroth-order populations of e+, e-, g+, g- written to `out_populations[0..4]`.
///
/// # Safety
/// `system` must be null or a live handle; `out_populations` null or
/// writable for four doubles.
#[no_mangle]
pub unsafe extern "C" fn ct_zeroth_populations(system: *const CtSystem, out_populations: *mut f64) -> i32 {
    guard(|| {
        let sys = handle(system)?;
        if out_populations.is_null() {
            return Err(null("out_populations"));
        }
        let pops = analytic::zeroth_order(&sys.params)?.populations();
        std::slice::from_raw_parts_mut(out_populations, 4).copy_from_slice(&pops);
        Ok(())
    })
}

/// Zero of the dispersion on the `delta = Delta` line.
///
/// # Safety
/// `system` must be null or a live handle; `out_value` null or writable.
#[no_mangle]
pub unsafe extern "C" fn ct_delta_zero(system: *const CtSystem, out_value: *mut f64) -> i32 {
    guard(|| {
        let sys = handle(system)?;
        *out(out_value, "out_value")? = analytic::delta_zero(&sys.params)?;
        Ok(())
    })
}

/// The three roots of the dispersion-zero cubic, as offsets `delta - Delta`.
///
/// # Safety
/// `system` must be null or a live handle; `out_roots` null or writable
/// for three `CtComplex`.
#[no_mangle]
pub unsafe extern "C" fn ct_cardano_roots(system: *const CtSystem, out_roots: *mut CtComplex) -> i32 {
    guard(|| {
        let sys = handle(system)?;
        if out_roots.is_null() {
            return Err(null("out_roots"));
        }
        let roots = analytic::cardano_roots(&sys.params)?.roots;
        let dst = std::slice::from_raw_parts_mut(out_roots, 3);
        for (d, r) in dst.iter_mut().zip(roots) {
            *d = r.into();
        }
        Ok(())
    })
}

/// Sweep `axis` over `points` evenly spaced values in `[lo, hi]`.
///
/// Evaluated points are written to `buffer` in grid order and their count
/// to `*out_written`. Points the engine cannot evaluate are skipped. If
/// `capacity < points` nothing is computed, `*out_written` receives
/// `points` and `CT_BUFFER_TOO_SMALL` is returned.
///
/// # Safety
/// `system` must be null or a live handle; `buffer` must be writable for
/// `capacity` elements; `out_written` null or writable.
#[no_mangle]
pub unsafe extern "C" fn ct_scan(
    system: *const CtSystem,
    axis_code: i32,
    lo: f64,
    hi: f64,
    points: usize,
    engine_code: i32,
    buffer: *mut CtResponse,
    capacity: usize,
    out_written: *mut usize,
) -> i32 {
    guard(|| {
        let sys = handle(system)?;
        let written = out(out_written, "out_written")?;
        let spec = ScanSpec::new(axis(axis_code)?, lo, hi, points, sys.params, engine(engine_code)?);
        spec.validate()?;
        if capacity < points {
            *written = points;
            return Err(Failure(CT_BUFFER_TOO_SMALL, format!("need room for {points} points, got {capacity}")));
        }
        if buffer.is_null() {
            return Err(null("buffer"));
        }
        let result = spectra::scan(&spec)?;
        let dst = std::slice::from_raw_parts_mut(buffer, capacity);
        for (d, p) in dst.iter_mut().zip(&result.points) {
            *d = p.into();
        }
        *written = result.points.len();
        Ok(())
    })
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn ct_status_string(status: i32) -> *const c_char {
    let s: &'static CStr = match status {
        CT_OK => c"ok",
        CT_NULL_POINTER => c"null pointer argument",
        CT_INVALID_PARAMETER => c"invalid parameter",
        CT_ENGINE_ERROR => c"engine error",
        CT_BUFFER_TOO_SMALL => c"buffer too small",
        CT_PANIC => c"internal panic",
        _ => c"unknown status",
    };
    s.as_ptr()
}

/// Copy the calling thread's last failure message into `buffer`
/// (NUL-terminated, truncated to `capacity`). Returns the full message
/// length excluding the terminator.
///
/// # Safety
/// `buffer` must be null or writable for `capacity` bytes.
#[no_mangle]
pub unsafe extern "C" fn ct_last_error(buffer: *mut c_char, capacity: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buffer.is_null() && capacity > 0 {
            let n = msg.len().min(capacity - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buffer, n);
            *buffer.add(n) = 0;
        }
        msg.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ct_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
