use crate::symmetry::CoeffTable;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("cutoff {cutoff} too small: need at least {required}")]
    CutoffTooSmall { cutoff: usize, required: usize },

    #[error("operator dimensions do not match ({left} vs {right})")]
    DimensionMismatch { left: usize, right: usize },

    #[error("operator leaks between parity sectors (max cross-sector element {max_leak:e})")]
    SectorViolation { max_leak: f64 },

    #[error("transformed-frame work requires omega = 1, got {0}")]
    NonUnitOmega(f64),

    #[error("bias epsilon = {epsilon} is not 2*N*beta for N = {n_bias} (beta = {beta})")]
    BiasMismatch { n_bias: u32, epsilon: f64, beta: f64 },

    #[error("closed forms are only tabulated for N <= 3, got N = {0}")]
    UnsupportedBias(u32),

    #[error("recurrence system has no solution (residual {residual:e})")]
    NoSolution { residual: f64 },

    #[error("solution space has {extra_dims} extra dimension(s) after normalization")]
    GaugeAmbiguity {
        extra_dims: usize,
        representative: Box<CoeffTable>,
    },

    #[error("no symmetry operator at this bias (smallest relative singular value {smallest:e})")]
    EmptyNullspace { smallest: f64 },

    #[error("polynomial fit ill-conditioned (condition number {condition:e})")]
    IllConditioned { condition: f64 },

    #[error("J^2 polynomial is non-positive ({value:e}) at E = {energy}")]
    NonPositivePoly { energy: f64, value: f64 },

    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("only {converged} of {requested} levels converged at g = {g}")]
    Unconverged {
        g: f64,
        converged: usize,
        requested: usize,
    },

    #[error("crossing classification needs parity labels but the scan is unlabeled")]
    UnlabeledScan,

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short stable name used in structured diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParams(_) => "InvalidParams",
            Error::CutoffTooSmall { .. } => "CutoffTooSmall",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::SectorViolation { .. } => "SectorViolation",
            Error::NonUnitOmega(_) => "NonUnitOmega",
            Error::BiasMismatch { .. } => "BiasMismatch",
            Error::UnsupportedBias(_) => "UnsupportedBias",
            Error::NoSolution { .. } => "NoSolution",
            Error::GaugeAmbiguity { .. } => "GaugeAmbiguity",
            Error::EmptyNullspace { .. } => "EmptyNullspace",
            Error::IllConditioned { .. } => "IllConditioned",
            Error::NonPositivePoly { .. } => "NonPositivePoly",
            Error::NotSymmetric { .. } => "NotSymmetric",
            Error::Eigensolver(_) => "Eigensolver",
            Error::Unconverged { .. } => "Unconverged",
            Error::UnlabeledScan => "UnlabeledScan",
            Error::Config(_) => "Config",
            Error::Io(_) => "Io",
            Error::Json(_) => "Json",
        }
    }
}
