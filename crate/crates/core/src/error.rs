use thiserror::Error;

/// Errors produced by the simulator, its oracles and the run front end.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid pulse: {0}")]
    InvalidPulse(String),

    #[error("invalid delay schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid dispersion parameters: {0}")]
    InvalidMedium(String),

    #[error("invalid time step {0} s; must be positive and finite")]
    InvalidStep(f64),

    #[error("time step {dt} s exceeds the bound {max} s (minimum delay / 20)")]
    StepTooLarge { dt: f64, max: f64 },

    #[error("horizon {horizon} s is too short; the pulse needs at least {required} s to clear the last stage")]
    HorizonTooShort { horizon: f64, required: f64 },

    #[error("grid too coarse: estimated derivative error {estimate:.3e} exceeds tolerance {tolerance:.1e}")]
    GridTooCoarse { estimate: f64, tolerance: f64 },

    #[error("envelope is not band-limited below the carrier: content at {frequency} rad/s, carrier {carrier} rad/s")]
    NotBandLimited { frequency: f64, carrier: f64 },

    #[error("carrier {carrier} rad/s does not fall on the frequency grid (spacing {spacing} rad/s)")]
    CarrierOffGrid { carrier: f64, spacing: f64 },

    #[error("spectral propagation needs a constant, uniform delay; the schedule varies in time or across stages")]
    NotTimeInvariant,

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("no e^-1 crossing found: {0}")]
    NoCrossing(String),

    #[error("pulse straddles a chain end at t = {t} s")]
    PulseAtChainEnd { t: f64 },

    #[error("flat or empty spectrum")]
    FlatSpectrum,

    #[error("unknown scenario `{name}`; known presets: {known}")]
    UnknownScenario { name: String, known: String },

    #[error("config error at {location}: {message}")]
    Config { location: String, message: String },

    #[error("waveform parse error at line {line}: {message}")]
    Waveform { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
