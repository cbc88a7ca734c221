//! C ABI over `lbm_quartic`.
//!
//! Every fallible call returns an [`LqStatus`]; on failure the message is kept
//! per thread and read with [`lq_last_error`]. Handles are opaque and owned by
//! the caller, who releases them with the matching `_free` call.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use lbm_quartic::bench::{sphere_state, SphereConfig};
use lbm_quartic::mrt::LatticeState;
use lbm_quartic::params::{quartic_set, trt_isotropic_preset, usual_preset, QuarticInputs, RateGroup, SchemeParameters};
use lbm_quartic::spectral::{max_amplification, predicted_multiplier, Branch};
use lbm_quartic::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LqStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// A denominator of the quartic closed forms vanished.
    SingularParameters = 3,
    /// A relaxation rate left (0, 2) or a viscosity went negative.
    UnstableParameters = 4,
    NotConverged = 5,
    BufferTooSmall = 6,
    Internal = 7,
}

/// Relaxation parameters of one scheme.
pub struct LqParams(SchemeParameters);

/// Populations on a grid, with its boundary setup.
pub struct LqLattice(LatticeState);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct LqTransport {
    pub mu: f64,
    pub zeta: f64,
    pub gamma: f64,
    pub nu: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct LqEquilibrium {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub beta: f64,
    pub xi: f64,
}

/// Hydrodynamic branch selector for [`lq_spectral_multiplier`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LqBranch {
    Shear1 = 0,
    Shear2 = 1,
    AcousticPlus = 2,
    AcousticMinus = 3,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> LqStatus {
    match e {
        Error::SingularCombination(_) => LqStatus::SingularParameters,
        Error::StabilityViolation { .. } | Error::NegativeViscosity { .. } => LqStatus::UnstableParameters,
        Error::EigenNonConvergence { .. } | Error::BranchAmbiguity { .. } => LqStatus::NotConverged,
        Error::InvalidParameter { .. } | Error::Mask(_) | Error::Experiment(_) => LqStatus::InvalidArgument,
        _ => LqStatus::Internal,
    }
}

fn fail(status: LqStatus, msg: impl Into<String>) -> LqStatus {
    set_error(msg.into());
    status
}

/// Runs `f`, clearing the last error on success and turning panics into `Internal`.
fn guard(f: impl FnOnce() -> Result<(), LqStatus>) -> LqStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            LqStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(LqStatus::Internal, format!("internal error: {msg}"))
        }
    }
}

fn lib<T>(r: lbm_quartic::Result<T>) -> Result<T, LqStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

unsafe fn out<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, LqStatus> {
    p.as_mut().ok_or_else(|| fail(LqStatus::NullPointer, format!("{name} is null")))
}

unsafe fn get<'a, T>(p: *const T, name: &str) -> Result<&'a T, LqStatus> {
    p.as_ref().ok_or_else(|| fail(LqStatus::NullPointer, format!("{name} is null")))
}

unsafe fn slice_mut<'a>(p: *mut f64, len: usize, need: usize, name: &str) -> Result<&'a mut [f64], LqStatus> {
    if p.is_null() {
        return Err(fail(LqStatus::NullPointer, format!("{name} is null")));
    }
    if len < need {
        return Err(fail(LqStatus::BufferTooSmall, format!("{name} holds {len} values, need {need}")));
    }
    Ok(std::slice::from_raw_parts_mut(p, need))
}

unsafe fn slice<'a>(p: *const f64, len: usize, need: usize, name: &str) -> Result<&'a [f64], LqStatus> {
    if p.is_null() {
        return Err(fail(LqStatus::NullPointer, format!("{name} is null")));
    }
    if len < need {
        return Err(fail(LqStatus::BufferTooSmall, format!("{name} holds {len} values, need {need}")));
    }
    Ok(std::slice::from_raw_parts(p, need))
}

fn boxed<T>(slot: &mut *mut T, value: T) {
    *slot = Box::into_raw(Box::new(value));
}

/// Copies the last error of this thread into `buf` as a NUL-terminated string,
/// truncating to `len`. Returns the full length without the terminator, or 0
/// when the last call succeeded.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn lq_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn lq_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Quartic parameter set for `(c0, sigma_e, sigma_x)` with the free rates
/// `s_psi`, `s_xi` and equilibrium coefficient `xi`.
///
/// # Safety
/// `params` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn lq_params_quartic(
    c0: f64,
    sigma_e: f64,
    sigma_x: f64,
    s_psi: f64,
    s_xi: f64,
    xi: f64,
    params: *mut *mut LqParams,
) -> LqStatus {
    guard(|| {
        let slot = out(params, "params")?;
        let inputs = QuarticInputs { c0, sigma_e, sigma_x, s_psi, s_xi, xi };
        let p = lib(quartic_set(&inputs).and_then(|s| s.to_scheme()))?;
        boxed(slot, LqParams(p));
        Ok(())
    })
}

/// Quartic set at the default operating point.
///
/// # Safety
/// `params` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn lq_params_quartic_default(params: *mut *mut LqParams) -> LqStatus {
    let d = QuarticInputs::default();
    lq_params_quartic(d.c0, d.sigma_e, d.sigma_x, d.s_psi, d.s_xi, d.xi, params)
}

/// Isotropic two-relaxation-time set with `c0^2 = 1/3`.
///
/// # Safety
/// `params` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn lq_params_trt(sigma_x: f64, params: *mut *mut LqParams) -> LqStatus {
    guard(|| {
        let slot = out(params, "params")?;
        let p = lib(trt_isotropic_preset(sigma_x).and_then(|s| s.to_scheme()))?;
        boxed(slot, LqParams(p));
        Ok(())
    })
}

/// Second-order reference set: every group relaxes with `sigma_x`.
///
/// # Safety
/// `params` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn lq_params_usual(sigma_x: f64, params: *mut *mut LqParams) -> LqStatus {
    guard(|| {
        let slot = out(params, "params")?;
        let p = lib(usual_preset(sigma_x).and_then(|s| s.to_scheme()))?;
        boxed(slot, LqParams(p));
        Ok(())
    })
}

/// # Safety
/// `params` must be null or a handle from an `lq_params_*` constructor, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lq_params_free(params: *mut LqParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// The ten group rates in the order e, x, phi, psi, epsilon, xi, gamma, chi, tau, omega.
///
/// # Safety
/// `params` must be a live handle and `rates` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn lq_params_rates(params: *const LqParams, rates: *mut f64, len: usize) -> LqStatus {
    guard(|| {
        let p = get(params, "params")?;
        let dst = slice_mut(rates, len, RateGroup::ALL.len(), "rates")?;
        for (d, g) in dst.iter_mut().zip(RateGroup::ALL) {
            *d = p.0.rates.get(g);
        }
        Ok(())
    })
}

/// # Safety
/// `params` must be a live handle and `eq` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lq_params_equilibrium(params: *const LqParams, eq: *mut LqEquilibrium) -> LqStatus {
    guard(|| {
        let p = &get(params, "params")?.0.equilibrium;
        *out(eq, "eq")? = LqEquilibrium { c0: p.c0, c1: p.c1, c2: p.c2, c3: p.c3, beta: p.beta, xi: p.xi };
        Ok(())
    })
}

/// Shear and bulk viscosity, sound attenuation and kinematic viscosity in lattice units.
///
/// # Safety
/// `params` must be a live handle and `transport` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lq_params_transport(params: *const LqParams, transport: *mut LqTransport) -> LqStatus {
    guard(|| {
        let p = get(params, "params")?;
        let t = lib(p.0.transport())?;
        *out(transport, "transport")? = LqTransport { mu: t.mu, zeta: t.zeta, gamma: t.gamma, nu: t.nu };
        Ok(())
    })
}

/// Largest eigenvalue modulus of the linear update over an `n^3` sample of
/// `[0, pi]^3`. `k` receives the wavevector where it occurs and may be null.
///
/// # Safety
/// `params` must be a live handle, `radius` valid, `k` null or 3 doubles.
#[no_mangle]
pub unsafe extern "C" fn lq_params_max_amplification(
    params: *const LqParams,
    n: usize,
    radius: *mut f64,
    k: *mut f64,
) -> LqStatus {
    guard(|| {
        let p = get(params, "params")?;
        let r = out(radius, "radius")?;
        let (max, at) = lib(max_amplification(&p.0, n))?;
        *r = max;
        if !k.is_null() {
            std::slice::from_raw_parts_mut(k, 3).copy_from_slice(&at);
        }
        Ok(())
    })
}

/// Per-step multiplier `z = exp(-Gamma)` of a hydrodynamic branch at
/// wavenumber `kmag` along `direction`.
///
/// # Safety
/// `params` must be a live handle, `direction` 3 doubles, `re` and `im` valid.
#[no_mangle]
pub unsafe extern "C" fn lq_spectral_multiplier(
    params: *const LqParams,
    direction: *const f64,
    kmag: f64,
    branch: LqBranch,
    re: *mut f64,
    im: *mut f64,
) -> LqStatus {
    guard(|| {
        let p = get(params, "params")?;
        let d = slice(direction, 3, 3, "direction")?;
        let (re, im) = (out(re, "re")?, out(im, "im")?);
        if !(kmag.is_finite() && kmag >= 0.0) {
            return Err(fail(LqStatus::InvalidArgument, format!("kmag = {kmag} must be finite and non-negative")));
        }
        let b = match branch {
            LqBranch::Shear1 => Branch::Shear1,
            LqBranch::Shear2 => Branch::Shear2,
            LqBranch::AcousticPlus => Branch::AcousticPlus,
            LqBranch::AcousticMinus => Branch::AcousticMinus,
        };
        let z = lib(predicted_multiplier(&p.0, [d[0], d[1], d[2]], kmag, b))?;
        *re = z.re;
        *im = z.im;
        Ok(())
    })
}

/// Periodic grid at rest about density `background`.
///
/// # Safety
/// `params` must be a live handle and `lattice` a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn lq_lattice_periodic(
    params: *const LqParams,
    nx: usize,
    ny: usize,
    nz: usize,
    background: f64,
    lattice: *mut *mut LqLattice,
) -> LqStatus {
    guard(|| {
        let p = get(params, "params")?;
        let slot = out(lattice, "lattice")?;
        let st = lib(LatticeState::periodic_about([nx, ny, nz], &p.0, background))?;
        boxed(slot, LqLattice(st));
        Ok(())
    })
}

/// `n^3` box with a sphere of `radius` whose wall density is
/// `1 + amplitude sin(2 pi t / period)`.
///
/// # Safety
/// `params` must be a live handle and `lattice` a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn lq_lattice_sphere(
    params: *const LqParams,
    n: usize,
    radius: f64,
    amplitude: f64,
    period: f64,
    lattice: *mut *mut LqLattice,
) -> LqStatus {
    guard(|| {
        let p = get(params, "params")?;
        let slot = out(lattice, "lattice")?;
        let cfg = SphereConfig { n, radius, amplitude, period, ..Default::default() };
        let st = lib(sphere_state(&cfg, &p.0))?;
        boxed(slot, LqLattice(st));
        Ok(())
    })
}

/// # Safety
/// `lattice` must be null or a handle from an `lq_lattice_*` constructor, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lq_lattice_free(lattice: *mut LqLattice) {
    if !lattice.is_null() {
        drop(Box::from_raw(lattice));
    }
}

/// Grid shape into `shape[0..3]`.
///
/// # Safety
/// `lattice` must be a live handle and `shape` must hold 3 values.
#[no_mangle]
pub unsafe extern "C" fn lq_lattice_shape(lattice: *const LqLattice, shape: *mut usize) -> LqStatus {
    guard(|| {
        let l = get(lattice, "lattice")?;
        if shape.is_null() {
            return Err(fail(LqStatus::NullPointer, "shape is null"));
        }
        std::slice::from_raw_parts_mut(shape, 3).copy_from_slice(&l.0.shape());
        Ok(())
    })
}

/// Steps taken so far.
///
/// # Safety
/// `lattice` must be a live handle and `time` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lq_lattice_time(lattice: *const LqLattice, time: *mut u64) -> LqStatus {
    guard(|| {
        *out(time, "time")? = get(lattice, "lattice")?.0.time();
        Ok(())
    })
}

/// Sets every fluid site to equilibrium. Arrays are in site order with `x`
/// fastest: `drho` holds density deviations from the background, one per site,
/// and `q` holds momentum as `qx, qy, qz` triples. `q` may be null for rest.
///
/// # Safety
/// `lattice` must be a live handle; `drho` must hold `sites` doubles and `q`
/// (when not null) `3 * sites`.
#[no_mangle]
pub unsafe extern "C" fn lq_lattice_set_equilibrium(
    lattice: *mut LqLattice,
    drho: *const f64,
    q: *const f64,
    sites: usize,
) -> LqStatus {
    guard(|| {
        let l = &mut out(lattice, "lattice")?.0;
        let n = l.domain().sites();
        let drho = slice(drho, sites, n, "drho")?;
        let q = if q.is_null() { None } else { Some(slice(q, sites * 3, n * 3, "q")?) };
        let domain = l.domain().clone();
        l.set_deviation(|x| {
            let s = domain.site(x);
            let m = q.map_or([0.0; 3], |q| [q[3 * s], q[3 * s + 1], q[3 * s + 2]]);
            (drho[s], m)
        });
        Ok(())
    })
}

/// Advances `steps` collide-stream-boundary cycles.
///
/// # Safety
/// `lattice` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn lq_lattice_run(lattice: *mut LqLattice, steps: u64) -> LqStatus {
    guard(|| {
        out(lattice, "lattice")?.0.run(steps);
        Ok(())
    })
}

/// Density (background included) and momentum of every site, in the layout of
/// [`lq_lattice_set_equilibrium`]. Solid sites report the background and zero
/// momentum. Either output may be null.
///
/// # Safety
/// `lattice` must be a live handle; `rho` null or `sites` doubles, `q` null or `3 * sites`.
#[no_mangle]
pub unsafe extern "C" fn lq_lattice_moments(
    lattice: *const LqLattice,
    rho: *mut f64,
    q: *mut f64,
    sites: usize,
) -> LqStatus {
    guard(|| {
        let l = &get(lattice, "lattice")?.0;
        let n = l.domain().sites();
        let mut rho = if rho.is_null() { None } else { Some(slice_mut(rho, sites, n, "rho")?) };
        let mut q = if q.is_null() { None } else { Some(slice_mut(q, sites * 3, n * 3, "q")?) };
        for s in 0..n {
            let (r, m) = if l.domain().is_solid(s) { (l.background(), [0.0; 3]) } else { l.site_moments(s) };
            if let Some(rho) = rho.as_deref_mut() {
                rho[s] = r;
            }
            if let Some(q) = q.as_deref_mut() {
                q[3 * s..3 * s + 3].copy_from_slice(&m);
            }
        }
        Ok(())
    })
}

/// Sum of density deviations over fluid sites.
///
/// # Safety
/// `lattice` must be a live handle and `mass` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lq_lattice_mass_deviation(lattice: *const LqLattice, mass: *mut f64) -> LqStatus {
    guard(|| {
        *out(mass, "mass")? = get(lattice, "lattice")?.0.mass_deviation();
        Ok(())
    })
}
