//! Command-line flag groups and the JSON config file that mirrors them.
//!
//! Every flag `--some-name` has a config-file key `"some-name"` of the same
//! type. Flags given on the command line win over the file.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use clap::{ArgAction, Args, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::bench::{PlaneWaveConfig, ShearDecayConfig, SphereConfig};
use crate::mrt::FieldFormat;
use crate::output::OutputFormat;
use crate::params::{ParameterSource, QuarticInputs, SchemeParameters, TRT_DEFAULT_SIGMA_X, USUAL_DEFAULT_SIGMA_X};
use crate::spectral::{DEFAULT_K_POINTS, DEFAULT_K_WINDOW};
use crate::stencil::MatrixPart;

/// Invalid configuration; `field` is the flag or key at fault.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self { field: field.into(), message: message.into() }
    }
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

type Checked<T> = std::result::Result<T, ConfigError>;

macro_rules! overlay {
    ($flags:ident, $file:ident; $($f:ident),* $(,)?) => {
        $( if $flags.$f.is_none() { $flags.$f = $file.$f; } )*
    };
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct CommonArgs {
    /// JSON file with default values for any of these flags.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Destination file; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Significant digits for floating-point output; shortest round trip when absent.
    #[arg(long)]
    pub digits: Option<usize>,
    /// Worker threads; all hardware threads when absent.
    #[arg(long)]
    pub threads: Option<usize>,
}

impl CommonArgs {
    fn overlay(mut self, file: Self) -> Self {
        overlay!(self, file; format, output, digits, threads);
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct SourceArgs {
    /// Quartic parameter set (the default).
    #[arg(long, action = ArgAction::SetTrue)]
    pub quartic: bool,
    /// Isotropic two-rate preset.
    #[arg(long, action = ArgAction::SetTrue)]
    pub trt: bool,
    /// Second-order reference preset.
    #[arg(long, action = ArgAction::SetTrue)]
    pub usual: bool,
    /// JSON file holding every equilibrium coefficient and rate.
    #[arg(long)]
    pub custom: Option<PathBuf>,
    #[arg(long)]
    pub c0: Option<f64>,
    #[arg(long)]
    pub sigma_e: Option<f64>,
    #[arg(long)]
    pub sigma_x: Option<f64>,
    #[arg(long)]
    pub s_psi: Option<f64>,
    #[arg(long)]
    pub s_xi: Option<f64>,
    #[arg(long)]
    pub xi: Option<f64>,
}

impl SourceArgs {
    fn has_kind(&self) -> bool {
        self.quartic || self.trt || self.usual || self.custom.is_some()
    }

    fn overlay(mut self, file: Self) -> Self {
        if !self.has_kind() {
            self.quartic = file.quartic;
            self.trt = file.trt;
            self.usual = file.usual;
            self.custom = file.custom;
        }
        overlay!(self, file; c0, sigma_e, sigma_x, s_psi, s_xi, xi);
        self
    }

    /// Exactly one source; quartic when none is named.
    pub fn source(&self) -> Checked<ParameterSource> {
        let named = [self.quartic, self.trt, self.usual, self.custom.is_some()].iter().filter(|b| **b).count();
        if named > 1 {
            return Err(ConfigError::new("quartic/trt/usual/custom", "choose exactly one parameter-set source"));
        }
        let quartic_only = [
            ("c0", self.c0),
            ("sigma-e", self.sigma_e),
            ("s-psi", self.s_psi),
            ("s-xi", self.s_xi),
            ("xi", self.xi),
        ];
        let reject_quartic_inputs = |kind: &str| -> Checked<()> {
            match quartic_only.iter().find(|(_, v)| v.is_some()) {
                Some((name, _)) => Err(ConfigError::new(*name, format!("only applies to the quartic set, not {kind}"))),
                None => Ok(()),
            }
        };
        if self.trt {
            reject_quartic_inputs("trt")?;
            return Ok(ParameterSource::Trt { sigma_x: self.sigma_x.unwrap_or(TRT_DEFAULT_SIGMA_X) });
        }
        if self.usual {
            reject_quartic_inputs("usual")?;
            return Ok(ParameterSource::Usual { sigma_x: self.sigma_x.unwrap_or(USUAL_DEFAULT_SIGMA_X) });
        }
        if let Some(path) = &self.custom {
            reject_quartic_inputs("custom")?;
            if self.sigma_x.is_some() {
                return Err(ConfigError::new("sigma-x", "custom sets carry their own rates"));
            }
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError::new("custom", format!("cannot read {}: {e}", path.display())))?;
            let p: SchemeParameters =
                serde_json::from_str(&text).map_err(|e| ConfigError::new("custom", format!("{}: {e}", path.display())))?;
            return Ok(ParameterSource::Custom(p));
        }
        let d = QuarticInputs::default();
        Ok(ParameterSource::Quartic(QuarticInputs {
            c0: self.c0.unwrap_or(d.c0),
            sigma_e: self.sigma_e.unwrap_or(d.sigma_e),
            sigma_x: self.sigma_x.unwrap_or(d.sigma_x),
            s_psi: self.s_psi.unwrap_or(d.s_psi),
            s_xi: self.s_xi.unwrap_or(d.s_xi),
            xi: self.xi.unwrap_or(d.xi),
        }))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct MatrixArgs {
    /// Which matrix to print: rows of M, squared row norms, or M^-1.
    #[arg(long, value_enum)]
    pub part: Option<MatrixPart>,
}

impl MatrixArgs {
    fn overlay(mut self, file: Self) -> Self {
        overlay!(self, file; part);
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct ScanArgs {
    #[arg(long)]
    pub kmin: Option<f64>,
    #[arg(long)]
    pub kmax: Option<f64>,
    /// Log-spaced wavenumbers between kmin and kmax.
    #[arg(long)]
    pub points: Option<usize>,
    /// Propagation direction, e.g. `1,0,0`.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub direction: Option<Vec<f64>>,
}

/// Resolved dispersion scan.
#[derive(Debug, Clone, PartialEq)]
pub struct Scan {
    pub kmin: f64,
    pub kmax: f64,
    pub points: usize,
    pub direction: [f64; 3],
}

impl ScanArgs {
    fn overlay(mut self, file: Self) -> Self {
        overlay!(self, file; kmin, kmax, points, direction);
        self
    }

    pub fn scan(&self) -> Checked<Scan> {
        let kmin = self.kmin.unwrap_or(DEFAULT_K_WINDOW.0);
        let kmax = self.kmax.unwrap_or(DEFAULT_K_WINDOW.1);
        let points = self.points.unwrap_or(DEFAULT_K_POINTS);
        if !(kmin > 0.0 && kmin.is_finite()) {
            return Err(ConfigError::new("kmin", format!("{kmin} must be positive")));
        }
        if !(kmax >= kmin && kmax.is_finite()) {
            return Err(ConfigError::new("kmax", format!("{kmax} must be at least kmin = {kmin}")));
        }
        if points == 0 || (points == 1 && kmax != kmin) {
            return Err(ConfigError::new("points", "need at least two points for a range"));
        }
        let direction = triple("direction", self.direction.as_deref().unwrap_or(&[1.0, 0.0, 0.0]))?;
        if direction.iter().all(|v| *v == 0.0) || direction.iter().any(|v| !v.is_finite()) {
            return Err(ConfigError::new("direction", "must be a finite nonzero vector"));
        }
        Ok(Scan { kmin, kmax, points, direction })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct FitArgs {
    /// Dispersion table written by `spectra`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Lower end of the fit window; smallest wavenumber in the table when absent.
    #[arg(long)]
    pub kmin: Option<f64>,
    /// Upper end of the fit window; largest wavenumber in the table when absent.
    #[arg(long)]
    pub kmax: Option<f64>,
}

impl FitArgs {
    fn overlay(mut self, file: Self) -> Self {
        overlay!(self, file; input, kmin, kmax);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    /// Transverse wave decay on a periodic box.
    Shear,
    /// Longitudinal acoustic wave on a periodic box.
    Wave,
    /// Pulsating sphere with an imposed wall density.
    Sphere,
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct RunArgs {
    #[arg(value_enum)]
    pub experiment: Option<ExperimentKind>,
    /// Periodic box, e.g. `64,4,4`.
    #[arg(long, value_delimiter = ',')]
    pub shape: Option<Vec<usize>>,
    /// Integer wave numbers per axis.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub wave: Option<Vec<i64>>,
    /// Momentum axis of the shear wave (0, 1 or 2).
    #[arg(long)]
    pub polarization: Option<usize>,
    #[arg(long)]
    pub amplitude: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// Leading steps excluded from the fit.
    #[arg(long)]
    pub skip: Option<usize>,
    /// Sphere box edge.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub radius: Option<f64>,
    /// Wall oscillation period in time steps.
    #[arg(long)]
    pub period: Option<f64>,
    #[arg(long)]
    pub min_bin_fraction: Option<f64>,
    /// Start from the 95^3 / R = 46.08 / 82-step sphere setup.
    #[arg(long, action = ArgAction::SetTrue)]
    pub full_scale: bool,
    /// CSV file for the time series (or the sphere scatter).
    #[arg(long)]
    pub series: Option<PathBuf>,
    /// File for the final density and momentum fields.
    #[arg(long)]
    pub fields: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub field_format: Option<FieldFormat>,
}

/// Resolved experiment.
#[derive(Debug, Clone, PartialEq)]
pub enum Experiment {
    Shear(ShearDecayConfig),
    Wave(PlaneWaveConfig),
    Sphere(SphereConfig),
}

impl RunArgs {
    fn overlay(mut self, file: Self) -> Self {
        overlay!(
            self, file;
            experiment, shape, wave, polarization, amplitude, steps, skip, n, radius, period,
            min_bin_fraction, series, fields, field_format,
        );
        self.full_scale |= file.full_scale;
        self
    }

    pub fn experiment(&self) -> Checked<Experiment> {
        let kind = self.experiment.ok_or_else(|| ConfigError::new("experiment", "name one of shear, wave, sphere"))?;
        let periodic_only = [
            ("shape", self.shape.is_some()),
            ("wave", self.wave.is_some()),
            ("skip", self.skip.is_some()),
        ];
        let sphere_only = [
            ("n", self.n.is_some()),
            ("radius", self.radius.is_some()),
            ("period", self.period.is_some()),
            ("min-bin-fraction", self.min_bin_fraction.is_some()),
            ("full-scale", self.full_scale),
        ];
        let reject = |names: &[(&str, bool)], kind: &str| -> Checked<()> {
            match names.iter().find(|(_, set)| *set) {
                Some((name, _)) => Err(ConfigError::new(*name, format!("does not apply to the {kind} experiment"))),
                None => Ok(()),
            }
        };
        let positive = |name: &str, v: Option<f64>| -> Checked<()> {
            match v {
                Some(x) if !(x > 0.0 && x.is_finite()) => Err(ConfigError::new(name, format!("{x} must be positive"))),
                _ => Ok(()),
            }
        };
        positive("amplitude", self.amplitude)?;
        match kind {
            ExperimentKind::Shear | ExperimentKind::Wave => {
                reject(&sphere_only, if kind == ExperimentKind::Shear { "shear" } else { "wave" })?;
                let shape = match &self.shape {
                    Some(s) => {
                        let s = triple("shape", s)?;
                        if s.contains(&0) {
                            return Err(ConfigError::new("shape", "every extent must be at least 1"));
                        }
                        Some(s)
                    }
                    None => None,
                };
                let wave = self.wave.as_deref().map(|w| triple("wave", w)).transpose()?;
                if kind == ExperimentKind::Shear {
                    let d = ShearDecayConfig::default();
                    let cfg = ShearDecayConfig {
                        shape: shape.unwrap_or(d.shape),
                        wave: wave.unwrap_or(d.wave),
                        polarization: self.polarization.unwrap_or(d.polarization),
                        amplitude: self.amplitude.unwrap_or(d.amplitude),
                        steps: self.steps.unwrap_or(d.steps),
                        skip: self.skip.unwrap_or(d.skip),
                    };
                    if cfg.polarization > 2 {
                        return Err(ConfigError::new("polarization", format!("{} is not an axis", cfg.polarization)));
                    }
                    Ok(Experiment::Shear(cfg))
                } else {
                    if self.polarization.is_some() {
                        return Err(ConfigError::new("polarization", "does not apply to the wave experiment"));
                    }
                    let d = PlaneWaveConfig::default();
                    Ok(Experiment::Wave(PlaneWaveConfig {
                        shape: shape.unwrap_or(d.shape),
                        wave: wave.unwrap_or(d.wave),
                        amplitude: self.amplitude.unwrap_or(d.amplitude),
                        steps: self.steps.unwrap_or(d.steps),
                        skip: self.skip.unwrap_or(d.skip),
                    }))
                }
            }
            ExperimentKind::Sphere => {
                reject(&periodic_only, "sphere")?;
                if self.polarization.is_some() {
                    return Err(ConfigError::new("polarization", "does not apply to the sphere experiment"));
                }
                positive("radius", self.radius)?;
                positive("period", self.period)?;
                let d = if self.full_scale { SphereConfig::full_scale() } else { SphereConfig::default() };
                let cfg = SphereConfig {
                    n: self.n.unwrap_or(d.n),
                    radius: self.radius.unwrap_or(d.radius),
                    period: self.period.unwrap_or(d.period),
                    amplitude: self.amplitude.unwrap_or(d.amplitude),
                    steps: self.steps.unwrap_or(d.steps),
                    min_bin_fraction: self.min_bin_fraction.unwrap_or(d.min_bin_fraction),
                };
                if cfg.n < 3 {
                    return Err(ConfigError::new("n", "the box needs at least 3 sites per edge"));
                }
                if 2.0 * cfg.radius > (cfg.n - 1) as f64 {
                    return Err(ConfigError::new("radius", format!("{} does not fit in a box of {} sites", cfg.radius, cfg.n)));
                }
                if !(0.0..=1.0).contains(&cfg.min_bin_fraction) {
                    return Err(ConfigError::new("min-bin-fraction", "must lie in [0, 1]"));
                }
                Ok(Experiment::Sphere(cfg))
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct VerifyArgs {
    /// Criteria to run, e.g. `1,3,9`; all when absent.
    #[arg(long, value_delimiter = ',')]
    pub only: Option<Vec<u8>>,
}

impl VerifyArgs {
    fn overlay(mut self, file: Self) -> Self {
        overlay!(self, file; only);
        self
    }

    pub fn criteria(&self) -> Checked<Vec<u8>> {
        let only = self.only.clone().unwrap_or_default();
        if let Some(bad) = only.iter().find(|id| !(1..=9).contains(*id)) {
            return Err(ConfigError::new("only", format!("no criterion {bad}; ids run from 1 to 9")));
        }
        Ok(only)
    }
}

fn triple<T: Copy>(field: &str, v: &[T]) -> Checked<[T; 3]> {
    v.try_into().map_err(|_| ConfigError::new(field, format!("expected 3 comma-separated values, got {}", v.len())))
}

/// Config-file key of every argument in a flag group.
pub fn keys_of<A: Args>() -> Vec<String> {
    A::augment_args(clap::Command::new("keys"))
        .get_arguments()
        .map(|a| a.get_long().map(str::to_string).unwrap_or_else(|| a.get_id().to_string()))
        .filter(|k| k != "config")
        .collect()
}

/// Parsed config file: a flat JSON object keyed by flag name.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    entries: Map<String, Value>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Checked<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("config", format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Checked<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| ConfigError::new("config", format!("invalid JSON: {e}")))?;
        let Value::Object(entries) = v else {
            return Err(ConfigError::new("config", "top level must be an object"));
        };
        let known = all_keys();
        if let Some(k) = entries.keys().find(|k| !known.contains(*k)) {
            return Err(ConfigError::new(k.clone(), "unknown config key"));
        }
        Ok(Self { entries })
    }

    /// The entries belonging to group `A`, each type-checked on its own so the
    /// error names the key.
    pub fn group<A: Args + DeserializeOwned + Default>(&self) -> Checked<A> {
        let mut sub = Map::new();
        for k in keys_of::<A>() {
            if let Some(v) = self.entries.get(&k) {
                let mut one = Map::new();
                one.insert(k.clone(), v.clone());
                serde_json::from_value::<A>(Value::Object(one)).map_err(|e| ConfigError::new(k.clone(), e.to_string()))?;
                sub.insert(k, v.clone());
            }
        }
        serde_json::from_value(Value::Object(sub)).map_err(|e| ConfigError::new("config", e.to_string()))
    }
}

/// Every config key; `kmin` and `kmax` are shared by the scan and the fit.
pub fn all_keys() -> BTreeSet<String> {
    let mut keys = BTreeSet::new();
    keys.extend(keys_of::<CommonArgs>());
    keys.extend(keys_of::<SourceArgs>());
    keys.extend(keys_of::<MatrixArgs>());
    keys.extend(keys_of::<ScanArgs>());
    keys.extend(keys_of::<FitArgs>());
    keys.extend(keys_of::<RunArgs>());
    keys.extend(keys_of::<VerifyArgs>());
    keys
}

/// Applies the file named by `--config` beneath the command-line values.
pub trait Layered: Sized {
    fn layer(self, file: &ConfigFile) -> Checked<Self>;
}

macro_rules! layered {
    ($($t:ty),*) => {
        $( impl Layered for $t {
            fn layer(self, file: &ConfigFile) -> Checked<Self> {
                Ok(self.overlay(file.group::<$t>()?))
            }
        } )*
    };
}

layered!(CommonArgs, SourceArgs, MatrixArgs, ScanArgs, FitArgs, RunArgs, VerifyArgs);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_are_the_long_flags() {
        let keys = keys_of::<SourceArgs>();
        for k in ["quartic", "trt", "usual", "custom", "c0", "sigma-e", "sigma-x", "s-psi", "s-xi", "xi"] {
            assert!(keys.contains(&k.to_string()), "{k} in {keys:?}");
        }
        assert!(keys_of::<RunArgs>().contains(&"experiment".to_string()));
        assert!(!keys_of::<CommonArgs>().contains(&"config".to_string()));
        assert!(all_keys().contains("field-format"));
    }

    #[test]
    fn file_values_sit_under_flags() {
        let file = ConfigFile::parse(r#"{"sigma-x": 0.04, "c0": 0.6, "digits": 5, "trt": true}"#).unwrap();
        let flags = SourceArgs { quartic: true, sigma_x: Some(0.039), ..Default::default() };
        let merged = flags.layer(&file).unwrap();
        assert!(merged.quartic && !merged.trt);
        assert_eq!(merged.sigma_x, Some(0.039));
        assert_eq!(merged.c0, Some(0.6));
        let common = CommonArgs::default().layer(&file).unwrap();
        assert_eq!(common.digits, Some(5));
    }

    #[test]
    fn errors_name_the_key() {
        assert_eq!(ConfigFile::parse(r#"{"sigma_x": 1}"#).unwrap_err().field, "sigma_x");
        let file = ConfigFile::parse(r#"{"sigma-x": "big"}"#).unwrap();
        assert_eq!(SourceArgs::default().layer(&file).unwrap_err().field, "sigma-x");
        let file = ConfigFile::parse(r#"{"direction": [1, 0]}"#).unwrap();
        let scan = ScanArgs::default().layer(&file).unwrap();
        assert_eq!(scan.scan().unwrap_err().field, "direction");
        assert_eq!(ConfigFile::parse("[1]").unwrap_err().field, "config");
    }

    #[test]
    fn one_source_only() {
        let s = SourceArgs { trt: true, usual: true, ..Default::default() };
        assert_eq!(s.source().unwrap_err().field, "quartic/trt/usual/custom");
        let s = SourceArgs { trt: true, c0: Some(0.5), ..Default::default() };
        assert_eq!(s.source().unwrap_err().field, "c0");
        assert!(matches!(SourceArgs::default().source().unwrap(), ParameterSource::Quartic(_)));
        let s = SourceArgs { usual: true, ..Default::default() };
        assert_eq!(s.source().unwrap(), ParameterSource::Usual { sigma_x: USUAL_DEFAULT_SIGMA_X });
    }

    #[test]
    fn experiment_flags_are_checked() {
        let r = RunArgs { experiment: Some(ExperimentKind::Sphere), shape: Some(vec![4, 4, 4]), ..Default::default() };
        assert_eq!(r.experiment().unwrap_err().field, "shape");
        let r = RunArgs { experiment: Some(ExperimentKind::Shear), radius: Some(3.0), ..Default::default() };
        assert_eq!(r.experiment().unwrap_err().field, "radius");
        let r = RunArgs { experiment: Some(ExperimentKind::Sphere), full_scale: true, ..Default::default() };
        assert_eq!(r.experiment().unwrap(), Experiment::Sphere(SphereConfig::full_scale()));
        let r = RunArgs { experiment: Some(ExperimentKind::Wave), amplitude: Some(-1.0), ..Default::default() };
        assert_eq!(r.experiment().unwrap_err().field, "amplitude");
        assert_eq!(RunArgs::default().experiment().unwrap_err().field, "experiment");
    }
}
