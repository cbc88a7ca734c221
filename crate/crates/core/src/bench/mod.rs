//! End-to-end experiments on the simulator: periodic shear decay, periodic
//! plane acoustic wave and the pulsating sphere.

mod sphere;

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use sphere::{run_sphere, sphere_state, RadialBin, SphereConfig, SphereReport};

use crate::error::{Error, Result};
use crate::exact::fmt_f64_digits;
use crate::mrt::{FieldSnapshot, LatticeState};
use crate::params::{SchemeParameters, RHO_0};
use crate::spectral::{predicted_multiplier, Branch, ReferenceCoefficients};

type C64 = Complex64;

pub const DEFAULT_AMPLITUDE: f64 = 1e-4;

/// Wavevector `2 pi n_a / N_a` of integer mode numbers on a periodic box.
pub fn wavevector(shape: [usize; 3], wave: [i64; 3]) -> [f64; 3] {
    std::array::from_fn(|a| 2.0 * PI * wave[a] as f64 / shape[a] as f64)
}

fn check_periodic_setup(shape: [usize; 3], wave: [i64; 3], amplitude: f64, steps: usize, skip: usize) -> Result<()> {
    if shape.contains(&0) {
        return Err(Error::InvalidParameter { name: "shape", reason: "every axis needs at least one site".into() });
    }
    if wave.iter().all(|&w| w == 0) {
        return Err(Error::InvalidParameter { name: "wave", reason: "mode numbers must not all vanish".into() });
    }
    if !(amplitude > 0.0 && amplitude.is_finite()) {
        return Err(Error::InvalidParameter { name: "amplitude", reason: format!("{amplitude} must be positive") });
    }
    if steps < skip + 4 {
        return Err(Error::InvalidParameter {
            name: "steps",
            reason: format!("{steps} steps leave fewer than 4 samples after skipping {skip}"),
        });
    }
    Ok(())
}

/// Projection `sum_x field(x) exp(-i k.x) / N`, summed in site order.
fn mode_projection(state: &LatticeState, k: [f64; 3], field: impl Fn(f64, [f64; 3]) -> f64) -> C64 {
    let d = state.domain();
    let mut acc = C64::new(0.0, 0.0);
    for site in 0..d.sites() {
        let x = d.coords(site);
        let (drho, q) = state.site_deviation(site);
        let phase = -(k[0] * x[0] as f64 + k[1] * x[1] as f64 + k[2] * x[2] as f64);
        acc += C64::from_polar(field(drho, q), phase);
    }
    acc / d.sites() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ShearDecayConfig {
    pub shape: [usize; 3],
    pub wave: [i64; 3],
    /// Axis of the transverse momentum; must be orthogonal to the wave.
    pub polarization: usize,
    pub amplitude: f64,
    pub steps: usize,
    /// Leading steps left out of the fit while kinetic modes relax. The
    /// quartic set needs about 15 steps before the amplitude decays
    /// monotonically and about 200 before the fitted rate settles to 1e-10.
    pub skip: usize,
}

impl Default for ShearDecayConfig {
    fn default() -> Self {
        Self { shape: [64, 4, 4], wave: [1, 0, 0], polarization: 1, amplitude: DEFAULT_AMPLITUDE, steps: 400, skip: 200 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlaneWaveConfig {
    pub shape: [usize; 3],
    pub wave: [i64; 3],
    pub amplitude: f64,
    pub steps: usize,
    pub skip: usize,
}

impl Default for PlaneWaveConfig {
    fn default() -> Self {
        Self { shape: [128, 4, 4], wave: [1, 0, 0], amplitude: DEFAULT_AMPLITUDE, steps: 400, skip: 10 }
    }
}

/// Complex mode amplitude against time.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSeries {
    pub time: Vec<u64>,
    pub value: Vec<C64>,
}

impl MeasurementSeries {
    pub fn write_csv<W: Write>(&self, out: W, digits: Option<usize>) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "re", "im", "abs"])?;
        for (t, v) in self.time.iter().zip(&self.value) {
            w.write_record([t.to_string(), fmt_f64_digits(v.re, digits), fmt_f64_digits(v.im, digits), fmt_f64_digits(v.norm(), digits)])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        ((a - b) / b).abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShearDecaySummary {
    pub kmag: f64,
    pub rate: f64,
    /// `nu |k|^2`.
    pub reference: f64,
    /// `Re Gamma` of the shear eigenvalue of the amplification matrix.
    pub spectral: f64,
    pub rel_error_reference: f64,
    pub rel_error_spectral: f64,
    pub fit_residual: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShearDecayReport {
    pub series: MeasurementSeries,
    pub summary: ShearDecaySummary,
    /// Final density and momentum.
    pub fields: FieldSnapshot,
}

/// Transverse wave `q_p = a cos(k.x)` at rest density; measures its decay rate.
pub fn run_shear_decay(cfg: &ShearDecayConfig, params: &SchemeParameters) -> Result<ShearDecayReport> {
    check_periodic_setup(cfg.shape, cfg.wave, cfg.amplitude, cfg.steps, cfg.skip)?;
    let p = cfg.polarization;
    if p > 2 || cfg.wave[p] != 0 {
        return Err(Error::InvalidParameter {
            name: "polarization",
            reason: format!("axis {p} is not orthogonal to the wave {:?}", cfg.wave),
        });
    }
    let k = wavevector(cfg.shape, cfg.wave);
    let mut state = LatticeState::periodic_about(cfg.shape, params, RHO_0)?;
    let a = cfg.amplitude;
    state.set_deviation(|x| {
        let phase = k[0] * x[0] as f64 + k[1] * x[1] as f64 + k[2] * x[2] as f64;
        let mut q = [0.0; 3];
        q[p] = a * phase.cos();
        (0.0, q)
    });
    let mut series = MeasurementSeries { time: vec![], value: vec![] };
    for t in 0..=cfg.steps {
        if t > 0 {
            state.step();
        }
        series.time.push(t as u64);
        series.value.push(mode_projection(&state, k, |_, q| q[p]));
    }
    let amps: Vec<f64> = series.value.iter().map(|v| v.norm()).collect();
    for t in cfg.skip + 1..amps.len() {
        if !(amps[t] <= amps[t - 1]) {
            return Err(Error::NonMonotoneDecay { step: t });
        }
    }
    let (slope, _, residual) = line_fit(
        &series.time[cfg.skip..].iter().map(|&t| t as f64).collect::<Vec<_>>(),
        &amps[cfg.skip..].iter().map(|v| v.ln()).collect::<Vec<_>>(),
    );
    let rate = -slope;
    let kmag = k.iter().map(|v| v * v).sum::<f64>().sqrt();
    let refs = ReferenceCoefficients::from_params(params)?;
    let reference = refs.nu * kmag * kmag;
    let z = predicted_multiplier(params, k, kmag, Branch::Shear1)?;
    let spectral = -z.norm().ln();
    let summary = ShearDecaySummary {
        kmag,
        rate,
        reference,
        spectral,
        rel_error_reference: rel(rate, reference),
        rel_error_spectral: rel(rate, spectral),
        fit_residual: residual,
        samples: amps.len() - cfg.skip,
    };
    Ok(ShearDecayReport { series, summary, fields: FieldSnapshot::capture(&state) })
}

/// `(slope, intercept, rms residual)` of a least-squares line.
fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let res = (x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum::<f64>() / n).sqrt();
    (slope, intercept, res)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlaneWaveSummary {
    pub kmag: f64,
    pub omega: f64,
    pub rate: f64,
    /// `c0 |k| (1 - gamma^2 |k|^2 / (2 c0^2))`.
    pub omega_reference: f64,
    /// `gamma |k|^2`.
    pub rate_reference: f64,
    pub omega_spectral: f64,
    pub rate_spectral: f64,
    pub rel_error_omega_reference: f64,
    pub rel_error_rate_reference: f64,
    pub rel_error_omega_spectral: f64,
    pub rel_error_rate_spectral: f64,
    /// RMS of the recurrence residual relative to the RMS signal.
    pub fit_residual: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlaneWaveReport {
    pub series: MeasurementSeries,
    pub summary: PlaneWaveSummary,
    pub fields: FieldSnapshot,
}

/// Residuals of the decaying-sinusoid fit above this abort the run.
pub const PLANE_WAVE_MAX_RESIDUAL: f64 = 1e-6;

/// Density wave `rho = rho0 + a cos(k.x)` at rest; measures frequency and
/// attenuation of the acoustic pair.
pub fn run_plane_wave(cfg: &PlaneWaveConfig, params: &SchemeParameters) -> Result<PlaneWaveReport> {
    check_periodic_setup(cfg.shape, cfg.wave, cfg.amplitude, cfg.steps, cfg.skip)?;
    let k = wavevector(cfg.shape, cfg.wave);
    let mut state = LatticeState::periodic_about(cfg.shape, params, RHO_0)?;
    let a = cfg.amplitude;
    state.set_deviation(|x| {
        let phase = k[0] * x[0] as f64 + k[1] * x[1] as f64 + k[2] * x[2] as f64;
        (a * phase.cos(), [0.0; 3])
    });
    let mut series = MeasurementSeries { time: vec![], value: vec![] };
    for t in 0..=cfg.steps {
        if t > 0 {
            state.step();
        }
        series.time.push(t as u64);
        series.value.push(mode_projection(&state, k, |drho, _| drho));
    }
    let (z, residual) = damped_oscillation(&series.value[cfg.skip..])?;
    if residual > PLANE_WAVE_MAX_RESIDUAL {
        return Err(Error::Fit(format!("decaying-sinusoid residual {residual:e} exceeds {PLANE_WAVE_MAX_RESIDUAL:e}")));
    }
    let omega = z.arg().abs();
    let rate = -z.norm().ln();
    let kmag = k.iter().map(|v| v * v).sum::<f64>().sqrt();
    let refs = ReferenceCoefficients::from_params(params)?;
    let target = refs.target(Branch::AcousticPlus, kmag);
    let zs = predicted_multiplier(params, k, kmag, Branch::AcousticPlus)?;
    let (omega_spectral, rate_spectral) = (zs.arg().abs(), -zs.norm().ln());
    let summary = PlaneWaveSummary {
        kmag,
        omega,
        rate,
        omega_reference: target.im,
        rate_reference: target.re,
        omega_spectral,
        rate_spectral,
        rel_error_omega_reference: rel(omega, target.im),
        rel_error_rate_reference: rel(rate, target.re),
        rel_error_omega_spectral: rel(omega, omega_spectral),
        rel_error_rate_spectral: rel(rate, rate_spectral),
        fit_residual: residual,
        samples: series.value.len() - cfg.skip,
    };
    Ok(PlaneWaveReport { series, summary, fields: FieldSnapshot::capture(&state) })
}

/// Fits `s(t+1) = p s(t) - q s(t-1)` with real `p, q` and returns the root
/// `z = p/2 + i sqrt(q - p^2/4)` with the relative residual.
fn damped_oscillation(s: &[C64]) -> Result<(C64, f64)> {
    if s.len() < 4 {
        return Err(Error::Fit("at least 4 samples are needed".into()));
    }
    // Regress the second difference on s(t) and the first difference, which
    // are far less collinear than s(t) and s(t-1):
    //   s(t+1) - 2 s(t) + s(t-1) = a s(t) + b (s(t) - s(t-1))
    // with p = 2 + a + b and q = 1 + b.
    let (mut a11, mut a12, mut a22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for t in 1..s.len() - 1 {
        let x1 = s[t];
        let x2 = s[t] - s[t - 1];
        let y = s[t + 1] - 2.0 * s[t] + s[t - 1];
        a11 += x1.norm_sqr();
        a12 += (x1.conj() * x2).re;
        a22 += x2.norm_sqr();
        b1 += (x1.conj() * y).re;
        b2 += (x2.conj() * y).re;
    }
    let det = a11 * a22 - a12 * a12;
    if det == 0.0 || !det.is_finite() {
        return Err(Error::Fit("signal does not determine a two-term recurrence".into()));
    }
    let a = (b1 * a22 - a12 * b2) / det;
    let b = (a11 * b2 - a12 * b1) / det;
    // q - p^2/4 without the cancellation between 1 and p^2/4
    let disc = -a - (a + b) * (a + b) / 4.0;
    if disc <= 0.0 {
        return Err(Error::Fit(format!("recurrence roots are real (a = {a}, b = {b}); no oscillation")));
    }
    let (mut num, mut den) = (0.0, 0.0);
    for t in 1..s.len() - 1 {
        let y = s[t + 1] - 2.0 * s[t] + s[t - 1];
        num += (y - a * s[t] - b * (s[t] - s[t - 1])).norm_sqr();
        den += s[t + 1].norm_sqr();
    }
    Ok((C64::new(1.0 + (a + b) / 2.0, disc.sqrt()), (num / den).sqrt()))
}

/// Mass and momentum totals compared with a reference state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConservationReport {
    pub step: u64,
    pub mass: f64,
    pub momentum: [f64; 3],
    pub mass_drift: f64,
    /// Absolute momentum drift per component.
    pub momentum_drift: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservationAudit {
    mass: f64,
    momentum: [f64; 3],
}

fn totals(state: &LatticeState) -> (f64, [f64; 3]) {
    let d = state.domain();
    let mut mass = 0.0;
    let mut q = [0.0; 3];
    for site in (0..d.sites()).filter(|&s| !d.is_solid(s)) {
        let (r, m) = state.site_moments(site);
        mass += r;
        for a in 0..3 {
            q[a] += m[a];
        }
    }
    (mass, q)
}

impl ConservationAudit {
    pub fn start(state: &LatticeState) -> Self {
        let (mass, momentum) = totals(state);
        Self { mass, momentum }
    }

    /// Drift of `state` relative to the snapshot; mass drift is relative.
    pub fn check(&self, state: &LatticeState) -> ConservationReport {
        let (mass, momentum) = totals(state);
        ConservationReport {
            step: state.time(),
            mass,
            momentum,
            mass_drift: rel(mass, self.mass),
            momentum_drift: std::array::from_fn(|a| (momentum[a] - self.momentum[a]).abs()),
        }
    }
}

pub fn conservation_audit(state: &LatticeState) -> ConservationReport {
    ConservationAudit::start(state).check(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{quartic_set, trt_isotropic_preset, QuarticInputs};

    fn quartic() -> SchemeParameters {
        quartic_set(&QuarticInputs::default()).unwrap().to_scheme().unwrap()
    }

    #[test]
    fn recurrence_recovers_a_damped_sinusoid() {
        let z = C64::from_polar(0.999, 0.03);
        let s: Vec<C64> = (0..200).map(|t| 0.7 * z.powi(t) + 0.7 * z.conj().powi(t)).collect();
        let (got, res) = damped_oscillation(&s).unwrap();
        assert!((got - z).norm() < 1e-13, "{got} vs {z}");
        assert!(res < 1e-12);
    }

    #[test]
    fn shear_decay_small_box() {
        let cfg = ShearDecayConfig { shape: [16, 1, 1], steps: 300, ..Default::default() };
        let r = run_shear_decay(&cfg, &quartic()).unwrap();
        assert!(r.summary.rel_error_spectral < 1e-8, "{:?}", r.summary);
        assert_eq!(r.series.time.len(), 301);
        let early = ShearDecayConfig { skip: 10, ..cfg };
        assert!(matches!(run_shear_decay(&early, &quartic()), Err(Error::NonMonotoneDecay { .. })));
    }

    #[test]
    fn shear_decay_is_linear_in_amplitude() {
        let cfg = ShearDecayConfig { shape: [16, 2, 1], steps: 80, skip: 30, ..Default::default() };
        let a = run_shear_decay(&cfg, &quartic()).unwrap().summary.rate;
        let half = ShearDecayConfig { amplitude: cfg.amplitude / 2.0, ..cfg };
        let b = run_shear_decay(&half, &quartic()).unwrap().summary.rate;
        assert!(rel(a, b) <= 1e-10);
    }

    #[test]
    fn polarization_must_be_transverse() {
        let cfg = ShearDecayConfig { polarization: 0, ..Default::default() };
        assert!(matches!(run_shear_decay(&cfg, &quartic()), Err(Error::InvalidParameter { name: "polarization", .. })));
    }

    #[test]
    fn trt_attenuates_sound_less() {
        let cfg = PlaneWaveConfig { shape: [32, 1, 1], steps: 150, skip: 20, ..Default::default() };
        let q = run_plane_wave(&cfg, &quartic()).unwrap().summary;
        let t = run_plane_wave(&cfg, &trt_isotropic_preset(0.006).unwrap().to_scheme().unwrap()).unwrap().summary;
        assert!(t.rate < q.rate);
        let ratio = t.rate / q.rate;
        assert!((ratio / (0.002 / 0.0546913) - 1.0).abs() < 0.2, "ratio {ratio}");
    }

    #[test]
    fn audit_on_periodic_box() {
        let mut st = LatticeState::periodic([6, 5, 4], &quartic()).unwrap();
        st.set_equilibrium(|x| (1.0 + 0.01 * x[0] as f64, [0.001 * x[1] as f64, 0.0, -0.002]));
        let audit = ConservationAudit::start(&st);
        st.run(20);
        let r = audit.check(&st);
        assert!(r.mass_drift < 1e-14);
        assert!(r.momentum_drift.iter().all(|d| *d < 1e-13 * 120.0));
    }
}
