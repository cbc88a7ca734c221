use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::fmt_f64_digits;
use crate::mrt::{BoundaryDensity, Domain, FieldSnapshot, LatticeState};
use crate::params::{SchemeParameters, RHO_0};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SphereConfig {
    /// Sites per edge of the cubic box.
    pub n: usize,
    pub radius: f64,
    pub period: f64,
    pub amplitude: f64,
    pub steps: usize,
    /// Bins whose mean deviation is below this fraction of the largest one
    /// are left out of the isotropy metric.
    pub min_bin_fraction: f64,
}

impl Default for SphereConfig {
    fn default() -> Self {
        Self { n: 48, radius: 23.0, period: 10.0, amplitude: 1e-4, steps: 40, min_bin_fraction: 0.1 }
    }
}

impl SphereConfig {
    /// The full-size setup: 95^3 box, radius 46.08, 82 steps.
    pub fn full_scale() -> Self {
        Self { n: 95, radius: 46.08, steps: 82, ..Self::default() }
    }
}

/// Density statistics of fluid sites with `lo <= r < lo + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialBin {
    pub lo: f64,
    pub count: usize,
    pub mean: f64,
    pub std: f64,
    /// Inside the region the wavefront has swept.
    pub traversed: bool,
    /// Counted in the isotropy metric.
    pub used: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphereReport {
    pub steps: u64,
    pub fluid_sites: usize,
    pub boundary_links: usize,
    /// `(r, rho)` for every fluid site, in site order.
    #[serde(skip)]
    pub scatter: Vec<(f64, f64)>,
    pub bins: Vec<RadialBin>,
    /// Max over used bins of `std / |mean - rho0|`.
    pub isotropy: f64,
    pub wavefront_radius: f64,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub fields: FieldSnapshot,
}

impl SphereReport {
    pub fn write_scatter_csv<W: Write>(&self, out: W, digits: Option<usize>) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["r", "rho"])?;
        for (r, rho) in &self.scatter {
            w.write_record([fmt_f64_digits(*r, digits), fmt_f64_digits(*rho, digits)])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn sphere_state(cfg: &SphereConfig, params: &SchemeParameters) -> Result<LatticeState> {
    if !(cfg.radius > 0.0) || cfg.n < 3 {
        return Err(Error::InvalidParameter { name: "radius", reason: "sphere needs a positive radius and n >= 3".into() });
    }
    if !(cfg.period > 0.0) {
        return Err(Error::InvalidParameter { name: "period", reason: format!("{} must be positive", cfg.period) });
    }
    if !(cfg.amplitude >= 0.0 && cfg.amplitude.is_finite()) {
        return Err(Error::InvalidParameter { name: "amplitude", reason: format!("{} must be non-negative", cfg.amplitude) });
    }
    let domain = Domain::sphere(cfg.n, cfg.radius)?;
    let boundary = BoundaryDensity::Sinusoidal { rho0: RHO_0, amplitude: cfg.amplitude, period: cfg.period };
    let mut st = LatticeState::new(domain, params, RHO_0, boundary)?;
    st.set_equilibrium(|_| (RHO_0, [0.0; 3]));
    Ok(st)
}

/// Pulsating sphere: wall density `rho0 + a sin(2 pi t / T)`, fluid at rest inside.
pub fn run_sphere(cfg: &SphereConfig, params: &SchemeParameters) -> Result<SphereReport> {
    let mut st = sphere_state(cfg, params)?;
    st.run(cfg.steps as u64);
    let c = (cfg.n as f64 - 1.0) / 2.0;
    let d = st.domain();
    let mut scatter = Vec::with_capacity(d.fluid_sites());
    for site in (0..d.sites()).filter(|&s| !d.is_solid(s)) {
        let x = d.coords(site);
        let r = x.iter().map(|&v| (v as f64 - c).powi(2)).sum::<f64>().sqrt();
        scatter.push((r, st.density(site)));
    }

    let wavefront = cfg.radius - params.equilibrium.c0 * cfg.steps as f64;
    let mut warnings = Vec::new();
    if wavefront <= 0.0 {
        warnings.push(format!(
            "wavefront reaches the center after {:.1} steps; reflections contaminate the interior",
            cfg.radius / params.equilibrium.c0
        ));
    }
    let nbins = cfg.radius.ceil() as usize;
    let mut sums = vec![(0usize, 0.0f64, 0.0f64); nbins];
    for &(r, rho) in &scatter {
        let b = (r.floor() as usize).min(nbins - 1);
        sums[b].0 += 1;
        sums[b].1 += rho - RHO_0;
    }
    let means: Vec<f64> = sums.iter().map(|s| if s.0 > 0 { s.1 / s.0 as f64 } else { 0.0 }).collect();
    for &(r, rho) in &scatter {
        let b = (r.floor() as usize).min(nbins - 1);
        sums[b].2 += (rho - RHO_0 - means[b]).powi(2);
    }
    let mut bins: Vec<RadialBin> = (0..nbins)
        .filter(|&b| sums[b].0 > 0)
        .map(|b| RadialBin {
            lo: b as f64,
            count: sums[b].0,
            mean: RHO_0 + means[b],
            std: (sums[b].2 / sums[b].0 as f64).sqrt(),
            traversed: (b + 1) as f64 > wavefront,
            used: false,
        })
        .collect();
    let peak = bins.iter().filter(|b| b.traversed).map(|b| (b.mean - RHO_0).abs()).fold(0.0, f64::max);
    let mut isotropy: f64 = 0.0;
    for b in bins.iter_mut().filter(|b| b.traversed) {
        let dev = (b.mean - RHO_0).abs();
        if dev > 0.0 && dev >= cfg.min_bin_fraction * peak {
            b.used = true;
            isotropy = isotropy.max(b.std / dev);
        }
    }
    Ok(SphereReport {
        steps: st.time(),
        fluid_sites: d.fluid_sites(),
        boundary_links: st.boundary_links(),
        scatter,
        bins,
        isotropy,
        wavefront_radius: wavefront.max(0.0),
        warnings,
        fields: FieldSnapshot::capture(&st),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{quartic_set, QuarticInputs};

    fn quartic() -> SchemeParameters {
        quartic_set(&QuarticInputs::default()).unwrap().to_scheme().unwrap()
    }

    #[test]
    fn zero_amplitude_stays_at_rest() {
        let cfg = SphereConfig { n: 16, radius: 7.0, amplitude: 0.0, steps: 10, ..Default::default() };
        let r = run_sphere(&cfg, &quartic()).unwrap();
        assert!(r.scatter.iter().all(|&(_, rho)| rho == RHO_0));
        assert_eq!(r.isotropy, 0.0);
    }

    #[test]
    fn response_is_linear_in_amplitude() {
        let cfg = SphereConfig { n: 14, radius: 6.0, steps: 8, ..Default::default() };
        let a = run_sphere(&cfg, &quartic()).unwrap();
        let b = run_sphere(&SphereConfig { amplitude: cfg.amplitude * 2.0, ..cfg }, &quartic()).unwrap();
        for (x, y) in a.scatter.iter().zip(&b.scatter) {
            let (da, db) = (x.1 - RHO_0, y.1 - RHO_0);
            assert!((db - 2.0 * da).abs() <= 1e-12 * cfg.amplitude + 1e-15, "{da} {db}");
        }
    }

    #[test]
    fn reaching_the_center_warns() {
        let cfg = SphereConfig { n: 12, radius: 5.0, steps: 12, ..Default::default() };
        assert_eq!(run_sphere(&cfg, &quartic()).unwrap().warnings.len(), 1);
    }
}
