use thiserror::Error;

use crate::spectral::Representation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("expected a field in {expected:?} representation, got {found:?}")]
    RepresentationMismatch {
        expected: Representation,
        found: Representation,
    },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("time {t} is outside the window [{t0}, {t1}]")]
    OutsideWindow { t: f64, t0: f64, t1: f64 },

    #[error("time {t} does not coincide with a sample node of the window")]
    OffGrid { t: f64 },

    #[error("non-finite values in the field at step {step} (t = {t}); solution blew up or the scheme is unstable")]
    BlowUp { step: usize, t: f64 },

    #[error("Picard iteration diverged: distances increased for 3 consecutive iterations (last at iteration {iteration}, d = {distance:e})")]
    PicardDiverged { iteration: usize, distance: f64 },

    #[error("rescaled data leaves the box: {0}")]
    SupportEscapes(String),

    #[error("probe rejected: {0}")]
    ProbeRejected(String),

    #[error("quadrature did not converge: {0}")]
    QuadratureNonConvergence(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("malformed snapshot: {0}")]
    Snapshot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
