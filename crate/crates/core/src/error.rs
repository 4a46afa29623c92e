use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields live on different grids")]
    GridMismatch,

    /// A mode whose multiplier would exceed the exponential band limit carries content.
    #[error("band limit exceeded: mode {mode} (k = {wavenumber}) has k*h = {kh} > {limit}")]
    BandLimit {
        mode: usize,
        wavenumber: f64,
        kh: f64,
        limit: f64,
    },

    #[error("resonant velocity constraint: B*h = {bh} is within tolerance of {multiple}*pi")]
    ResonantVelocity { bh: f64, multiple: u64 },

    #[error("resonant recursion denominator at order k = {order} (value {denominator:e})")]
    ResonantDenominator { order: usize, denominator: f64 },

    #[error("no smooth matching amplitude: {0}")]
    NoSmoothMatching(String),

    #[error("series evaluation failed at X = {x}: {detail}")]
    Evaluation { x: f64, detail: String },

    #[error("time step violates stability guard: dt*lipschitz = {cfl} > {limit}")]
    StabilityGuard { cfl: f64, limit: f64 },

    #[error("non-finite values after step {step} (t = {time}); last good time {last_good_time}")]
    BlowUp {
        step: usize,
        time: f64,
        last_good_time: f64,
    },
}
