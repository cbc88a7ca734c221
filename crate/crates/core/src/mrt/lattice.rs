use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::CollisionKernel;
use crate::error::{Error, Result};
use crate::params::SchemeParameters;
use crate::stencil::{build_velocities, Q};

/// Density imposed on solid walls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundaryDensity {
    Constant { rho: f64 },
    /// `rho0 + amplitude sin(2 pi t / period)`.
    Sinusoidal { rho0: f64, amplitude: f64, period: f64 },
}

impl BoundaryDensity {
    pub fn at(&self, t: u64) -> f64 {
        match *self {
            BoundaryDensity::Constant { rho } => rho,
            BoundaryDensity::Sinusoidal { rho0, amplitude, period } => {
                rho0 + amplitude * (2.0 * std::f64::consts::PI * t as f64 / period).sin()
            }
        }
    }
}

/// Grid shape, solid sites and per-axis wraparound.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    shape: [usize; 3],
    solid: Vec<bool>,
    periodic: [bool; 3],
}

impl Domain {
    pub fn periodic(shape: [usize; 3]) -> Result<Self> {
        Self::masked(shape, vec![false; checked_len(shape)?], [true; 3])
    }

    /// Rejects fluid sites that would stream across a non-periodic edge.
    pub fn masked(shape: [usize; 3], solid: Vec<bool>, periodic: [bool; 3]) -> Result<Self> {
        let n = checked_len(shape)?;
        if solid.len() != n {
            return Err(Error::Mask(format!("mask has {} entries, grid has {n}", solid.len())));
        }
        let d = Self { shape, solid, periodic };
        for site in 0..n {
            if d.solid[site] {
                continue;
            }
            let x = d.coords(site);
            for a in 0..3 {
                if !periodic[a] && (x[a] == 0 || x[a] + 1 == shape[a]) {
                    return Err(Error::Mask(format!(
                        "fluid site ({}, {}, {}) lies on the non-periodic {} edge",
                        x[0],
                        x[1],
                        x[2],
                        ["x", "y", "z"][a]
                    )));
                }
            }
        }
        Ok(d)
    }

    /// Fluid strictly inside the sphere of `radius` about the grid center; solid
    /// elsewhere. No axis wraps.
    pub fn sphere(n: usize, radius: f64) -> Result<Self> {
        let shape = [n; 3];
        let c = (n as f64 - 1.0) / 2.0;
        let solid = (0..checked_len(shape)?)
            .map(|site| {
                let x = coords_of(shape, site);
                let r2: f64 = x.iter().map(|&v| (v as f64 - c).powi(2)).sum();
                r2.sqrt() >= radius
            })
            .collect();
        Self::masked(shape, solid, [false; 3])
    }

    pub fn shape(&self) -> [usize; 3] {
        self.shape
    }

    pub fn sites(&self) -> usize {
        self.solid.len()
    }

    pub fn is_solid(&self, site: usize) -> bool {
        self.solid[site]
    }

    pub fn fluid_sites(&self) -> usize {
        self.solid.iter().filter(|s| !**s).count()
    }

    pub fn periodic_axes(&self) -> [bool; 3] {
        self.periodic
    }

    pub fn coords(&self, site: usize) -> [usize; 3] {
        coords_of(self.shape, site)
    }

    pub fn site(&self, x: [usize; 3]) -> usize {
        x[0] + self.shape[0] * (x[1] + self.shape[1] * x[2])
    }

    /// Site at `x + v`, or `None` when it leaves a non-periodic axis.
    pub fn neighbor(&self, x: [usize; 3], v: [i32; 3]) -> Option<usize> {
        let mut y = [0usize; 3];
        for a in 0..3 {
            let n = self.shape[a] as i64;
            let mut c = x[a] as i64 + v[a] as i64;
            if c < 0 || c >= n {
                if !self.periodic[a] {
                    return None;
                }
                c = c.rem_euclid(n);
            }
            y[a] = c as usize;
        }
        Some(self.site(y))
    }
}

fn checked_len(shape: [usize; 3]) -> Result<usize> {
    if shape.contains(&0) {
        return Err(Error::Mask(format!("grid shape {shape:?} has an empty axis")));
    }
    Ok(shape.iter().product())
}

fn coords_of(shape: [usize; 3], site: usize) -> [usize; 3] {
    [site % shape[0], (site / shape[0]) % shape[1], site / (shape[0] * shape[1])]
}

/// Populations on a grid, stored as deviations from the rest equilibrium at
/// `background` density. The scheme is linear, so this is the same dynamics
/// with less rounding around a uniform state.
#[derive(Debug, Clone)]
pub struct LatticeState {
    domain: Domain,
    kernel: CollisionKernel,
    background: f64,
    boundary: BoundaryDensity,
    f: Vec<f64>,
    next: Vec<f64>,
    /// Source site for every `(site, j)`; `None` marks a wall link.
    sources: Vec<Option<u32>>,
    time: u64,
}

impl LatticeState {
    pub fn new(domain: Domain, params: &SchemeParameters, background: f64, boundary: BoundaryDensity) -> Result<Self> {
        params.validate()?;
        let n = domain.sites();
        if n > u32::MAX as usize {
            return Err(Error::Mask(format!("{n} sites exceed the supported grid size")));
        }
        let vs = build_velocities();
        let mut sources = vec![None; n * Q];
        for site in 0..n {
            if domain.is_solid(site) {
                continue;
            }
            let x = domain.coords(site);
            for j in 0..Q {
                let v = vs.velocity(j);
                // pull from x - v_j
                let src = domain.neighbor(x, [-v[0], -v[1], -v[2]]);
                sources[site * Q + j] = src.filter(|&s| !domain.is_solid(s)).map(|s| s as u32);
            }
        }
        Ok(Self {
            kernel: CollisionKernel::new(params),
            background,
            boundary,
            f: vec![0.0; n * Q],
            next: vec![0.0; n * Q],
            sources,
            domain,
            time: 0,
        })
    }

    /// Fully periodic grid with zero background.
    pub fn periodic(shape: [usize; 3], params: &SchemeParameters) -> Result<Self> {
        Self::periodic_about(shape, params, 0.0)
    }

    /// Fully periodic grid storing deviations from a rest state of density `background`.
    pub fn periodic_about(shape: [usize; 3], params: &SchemeParameters, background: f64) -> Result<Self> {
        Self::new(Domain::periodic(shape)?, params, background, BoundaryDensity::Constant { rho: background })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn kernel(&self) -> &CollisionKernel {
        &self.kernel
    }

    pub fn shape(&self) -> [usize; 3] {
        self.domain.shape
    }

    pub fn time(&self) -> u64 {
        self.time
    }

    pub fn background(&self) -> f64 {
        self.background
    }

    pub fn boundary(&self) -> &BoundaryDensity {
        &self.boundary
    }

    /// Which of the two buffers is current.
    pub fn parity(&self) -> u8 {
        (self.time % 2) as u8
    }

    /// Number of wall links handled by anti-bounce-back.
    pub fn boundary_links(&self) -> usize {
        (0..self.domain.sites())
            .filter(|&s| !self.domain.is_solid(s))
            .map(|s| self.sources[s * Q..(s + 1) * Q].iter().filter(|l| l.is_none()).count())
            .sum()
    }

    /// Deviation populations, `Q` per site.
    pub fn populations(&self) -> &[f64] {
        &self.f
    }

    pub fn populations_mut(&mut self) -> &mut [f64] {
        &mut self.f
    }

    /// Sets every fluid site to `f_eq(rho, q)` from `init(x, y, z)`.
    pub fn set_equilibrium<F>(&mut self, init: F)
    where
        F: Fn([usize; 3]) -> (f64, [f64; 3]) + Sync,
    {
        let bg = self.background;
        self.set_deviation(|x| {
            let (rho, q) = init(x);
            (rho - bg, q)
        });
    }

    /// Like [`Self::set_equilibrium`] with the density given relative to the
    /// background, so small perturbations keep their full precision.
    pub fn set_deviation<F>(&mut self, init: F)
    where
        F: Fn([usize; 3]) -> (f64, [f64; 3]) + Sync,
    {
        let domain = &self.domain;
        let kernel = &self.kernel;
        self.f.par_chunks_mut(Q).enumerate().for_each(|(site, fs)| {
            if domain.is_solid(site) {
                fs.fill(0.0);
            } else {
                let (drho, q) = init(domain.coords(site));
                fs.copy_from_slice(&kernel.equilibrium_populations(drho, q));
            }
        });
    }

    /// Density and momentum at a site, background included.
    pub fn site_moments(&self, site: usize) -> (f64, [f64; 3]) {
        let (drho, q) = self.site_deviation(site);
        (drho + self.background, q)
    }

    /// Density relative to the background, and momentum.
    pub fn site_deviation(&self, site: usize) -> (f64, [f64; 3]) {
        let fs: &[f64; Q] = self.f[site * Q..(site + 1) * Q].try_into().expect("Q populations");
        self.kernel.conserved(fs)
    }

    pub fn density(&self, site: usize) -> f64 {
        self.site_moments(site).0
    }

    /// Densities of all sites in site order; solid sites report the background.
    pub fn densities(&self) -> Vec<f64> {
        (0..self.domain.sites()).into_par_iter().map(|s| self.density(s)).collect()
    }

    /// Sum of density deviations over fluid sites, in site order.
    pub fn mass_deviation(&self) -> f64 {
        let mut total = 0.0;
        for site in 0..self.domain.sites() {
            if !self.domain.is_solid(site) {
                total += self.f[site * Q..(site + 1) * Q].iter().sum::<f64>();
            }
        }
        total
    }

    /// Total mass including the background.
    pub fn total_mass(&self) -> f64 {
        self.mass_deviation() + self.background * self.domain.fluid_sites() as f64
    }

    pub fn collide(&mut self) {
        let domain = &self.domain;
        let kernel = &self.kernel;
        self.f.par_chunks_mut(Q).enumerate().for_each(|(site, fs)| {
            if !domain.is_solid(site) {
                let fs: &mut [f64; Q] = fs.try_into().expect("Q populations");
                kernel.collide(fs);
            }
        });
    }

    /// Pull streaming into the spare buffer. Wall links are left at zero for
    /// [`apply_boundaries`](Self::apply_boundaries).
    pub fn stream(&mut self) {
        let f = &self.f;
        let sources = &self.sources;
        self.next.par_chunks_mut(Q).enumerate().for_each(|(site, out)| {
            for j in 0..Q {
                out[j] = match sources[site * Q + j] {
                    Some(src) => f[src as usize * Q + j],
                    None => 0.0,
                };
            }
        });
    }

    /// Anti-bounce-back on wall links: `f_j(x) = -f*_jbar(x) + 2 f_eq_j(rho_b, 0)`
    /// where `jbar` is the link leaving `x` towards the wall. `f` must still hold
    /// the post-collision populations and `next` the streamed ones.
    pub fn apply_boundaries(&mut self, t: u64) {
        let rho_b = self.boundary.at(t) - self.background;
        let f_wall = self.kernel.equilibrium_populations(rho_b, [0.0; 3]);
        let f = &self.f;
        let sources = &self.sources;
        let domain = &self.domain;
        self.next.par_chunks_mut(Q).enumerate().for_each(|(site, out)| {
            if domain.is_solid(site) {
                return;
            }
            for j in 0..Q {
                if sources[site * Q + j].is_none() {
                    out[j] = -f[site * Q + (Q - 1 - j)] + 2.0 * f_wall[j];
                }
            }
        });
    }

    /// Collide, stream, wall links, then advance the clock.
    pub fn step(&mut self) {
        self.collide();
        self.stream();
        self.apply_boundaries(self.time);
        std::mem::swap(&mut self.f, &mut self.next);
        self.time += 1;
    }

    pub fn run(&mut self, steps: u64) {
        for _ in 0..steps {
            self.step();
        }
    }
}
