use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("measure has zero total mass")]
    ZeroMeasure,
    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("point lies on the branch cut (|theta| = pi)")]
    OnBranchCut,
    #[error("denominator symbol vanishes (|Phi_eps| < 1e-300)")]
    DivisionByZero,
    #[error("both tail masses vanish")]
    IndeterminateRatio,
    #[error("tail-ratio sequence did not settle: last {last}, previous {previous}")]
    ConvergenceFailure { last: f64, previous: f64 },
    #[error("model violates the thermodynamic restriction")]
    NotAdmissible,
    #[error("point (x = {x}, t = {t}) is not strictly inside the cone |x| < {c} t")]
    OutsideCone { x: f64, t: f64, c: f64 },
    #[error("classical model with a branch segment; use the classical Hankel integral")]
    ClassicalModelBranch,
    #[error("model is not one of the classical models")]
    NotClassical,
    #[error("exceptional model: kernel integral refused")]
    ExceptionalModel,
    #[error("Bromwich integral did not decay by y = {y:e}")]
    TruncationFailure { y: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
