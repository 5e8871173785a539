use thiserror::Error;

/// Error type shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter lies outside its admissible range.
    #[error("domain error: {0}")]
    Domain(String),

    /// An operator that divides by |k| was applied at k = 0.
    #[error("operation undefined at zero x-frequency (k = 0)")]
    ZeroFrequency,

    /// The adaptive integrator drove the step size below representable size.
    #[error("stiffness failure: step underflow at t = {t} (k = {k}, eta = {eta})")]
    StepUnderflow { t: f64, k: f64, eta: f64 },

    /// Lattice construction or lookup failed.
    #[error("grid error: {0}")]
    Grid(String),

    /// Initial-data recipe cannot be represented on the configured lattice.
    #[error("initial data error: {0}")]
    InitialData(String),

    /// A time step violated the advective CFL bound.
    #[error("CFL violation at t = {t}: dt = {dt} exceeds bound {bound}")]
    Cfl { t: f64, dt: f64, bound: f64 },

    /// Non-finite value detected during time stepping.
    #[error("non-finite value at t = {t}, mode (ik = {ik}, ieta = {ieta})")]
    NonFinite { t: f64, ik: usize, ieta: usize },

    /// Energy above the dealiasing cutoff exceeded the configured fraction.
    #[error("aliasing guard tripped at t = {t}: outer-band fraction {fraction:.3e} > {limit:.3e}")]
    AliasGuard { t: f64, fraction: f64, limit: f64 },

    /// Rate fit could not be performed on the given window.
    #[error("fit error: {0}")]
    Fit(String),

    /// Configuration file or override could not be parsed.
    #[error("config error at line {line}: {msg}")]
    Config { line: usize, msg: String },

    /// A required configuration key is missing or has the wrong type.
    #[error("config error: {0}")]
    ConfigKey(String),

    /// Snapshot payload is malformed or fails its checksum.
    #[error("snapshot error: {0}")]
    Snapshot(String),

    /// Resume was attempted with incompatible grid or parameters.
    #[error("resume mismatch: {0}")]
    Mismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
