use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Which denominator of the quartic closed forms vanished.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Singularity {
    /// `sigma_x == sigma_e`; the quartic set cannot be of BGK/TRT type.
    ShearEqualsBulk,
    ShearZero,
    /// `12 sigma_x^2 == 1` in the denominator of `sigma_gamma`.
    GammaPole,
    /// `84 sigma_x^2 == 1` in the denominator of `sigma_chi`.
    ChiPole,
    EpsilonDenominator,
    TauDenominator,
    OmegaDenominator,
}

impl std::fmt::Display for Singularity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Singularity::ShearEqualsBulk => "(sigma_x - sigma_e) = 0",
            Singularity::ShearZero => "sigma_x = 0",
            Singularity::GammaPole => "(12 sigma_x^2 - 1) = 0",
            Singularity::ChiPole => "(84 sigma_x^2 - 1) = 0",
            Singularity::EpsilonDenominator => "denominator of sigma_epsilon = 0",
            Singularity::TauDenominator => "denominator of sigma_tau = 0",
            Singularity::OmegaDenominator => "denominator of sigma_omega = 0",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("velocity set is not the D3Q27 tensor-product set: {0}")]
    NotD3Q27(String),

    #[error("moment matrix row {row} ({name}) has a non-integer entry {value} at column {col}")]
    NonIntegerMoment {
        row: usize,
        name: &'static str,
        col: usize,
        value: String,
    },

    #[error("moment row {row} ({name}) vanished during orthogonalization")]
    DependentMoment { row: usize, name: &'static str },

    #[error("conserved rows {0} and {1} are not orthogonal")]
    ConservedRowsNotOrthogonal(usize, usize),

    #[error("singular parameter combination: {0}")]
    SingularCombination(Singularity),

    #[error("relaxation rate {name} = {value} lies outside (0, 2)")]
    StabilityViolation { name: &'static str, value: f64 },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("negative transport coefficient {name} = {value}")]
    NegativeViscosity { name: &'static str, value: f64 },

    #[error("lattice mask error: {0}")]
    Mask(String),

    #[error("eigenvalue iteration did not converge within {iterations} sweeps (n = {n})")]
    EigenNonConvergence { n: usize, iterations: usize },

    #[error("hydrodynamic branch tracking is ambiguous at |k| = {kmag}: {detail}")]
    BranchAmbiguity { kmag: f64, detail: String },

    #[error("order fit: {0}")]
    Fit(String),

    #[error("amplitude is not monotonically decaying at step {step}")]
    NonMonotoneDecay { step: usize },

    #[error("experiment configuration: {0}")]
    Experiment(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
