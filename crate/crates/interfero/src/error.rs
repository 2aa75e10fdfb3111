use thiserror::Error;

/// Errors surfaced by grid construction, operator application, solvers,
/// and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid error: {0}")]
    Grid(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("grid extent too small for mode n={n}: truncated tail energy {tail:.3e} exceeds 1e-6")]
    ExtentTooSmall { n: usize, tail: f64 },

    #[error(
        "singular frFT order: |sin({alpha})| = {sin_abs:.3e} < 1e-3; \
             perturb alpha or use the diagonal representation"
    )]
    SingularOrder { alpha: f64, sin_abs: f64 },

    #[error(
        "chirp aliasing: grid spacing {dx:.3e} too coarse for Fresnel distance {distance:.3e}"
    )]
    ChirpAliasing { dx: f64, distance: f64 },

    #[error("incompatible operator representation: {0}")]
    IncompatibleRepr(String),

    #[error("solver did not converge within {iterations} iterations")]
    MaxIter { iterations: usize },

    #[error("infeasible problem: {0}")]
    Infeasible(String),

    #[error("rank deficient system: numerical rank {rank} < {cols} columns")]
    RankDeficient { rank: usize, cols: usize },

    #[error("combinatorial blowup: C({k}, {s}) exceeds 1e6 supports")]
    CombinatorialBlowup { k: usize, s: usize },

    #[error("matrix too large for exhaustive RIP check: {cols} columns > 16")]
    SizeTooLarge { cols: usize },

    #[error("schedule mismatch: {0}")]
    ScheduleMismatch(String),

    #[error("zero-norm ground truth vector")]
    ZeroNorm,

    #[error("inconsistent coefficients: |c_{n}| < 1e-12 but measurement energy present")]
    InconsistentCoefficient { n: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error at {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
