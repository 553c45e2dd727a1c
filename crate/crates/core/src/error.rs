use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("sausage embedding degenerates on the ideal boundary (r = {r})")]
    DegenerateEmbedding { r: f64 },

    #[error("offset of length {norm} lies outside the covering ball of radius 1/3")]
    OutsideCoveringBall { norm: f64 },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("fit window contains no nonzero samples")]
    DegenerateFit,

    #[error("Krylov solve stalled after {iterations} iterations (relative residual {residual:e})")]
    SolverDiverged { iterations: usize, residual: f64 },

    #[error("field is not spacelike: max q = {max_q} exceeds 1 - {margin}")]
    NonSpacelikeField { max_q: f64, margin: f64 },

    #[error("Newton iteration {iteration}: damping floor {damping:e} reached while the step would leave the spacelike margin")]
    NonSpacelikeStep { iteration: usize, damping: f64 },

    #[error("Newton did not converge in {iterations} iterations (residual {residual:e})")]
    MaxIterations { iterations: usize, residual: f64 },

    #[error("hyperplane is not spacelike: A^2 + B^2 + C^2 = {norm_sq} >= 1")]
    NotSpacelikeHyperplane { norm_sq: f64 },

    #[error("continuation failed at amplitude fraction {lambda} (last converged {reached}): {source}")]
    Continuation {
        lambda: f64,
        reached: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
