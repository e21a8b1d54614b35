//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by layout construction, propagator builders, the
/// schedule compiler and the device calculators.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid layout: need n_systems >= 1 and fock_cutoff >= 1, got n_systems={n_systems}, fock_cutoff={fock_cutoff}")]
    InvalidLayout {
        n_systems: usize,
        fock_cutoff: usize,
    },

    #[error("level {0} outside {{0, 1, 2}}")]
    LevelOutOfRange(u8),

    #[error("expected {expected} level labels, got {got}")]
    WrongLevelCount { expected: usize, got: usize },

    #[error("photon number {photons} exceeds Fock cutoff {max}")]
    PhotonOverflow { photons: usize, max: usize },

    #[error("system index {system} out of range for {n_systems} systems")]
    SystemOutOfRange { system: usize, n_systems: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("layouts differ between operands")]
    LayoutMismatch,

    #[error("dispersive validity violated: |detuning|/g = {ratio:.3} < {min}")]
    DispersiveGuard { ratio: f64, min: f64 },

    #[error("invalid pulse spec: {0}")]
    InvalidSpec(String),

    #[error("gate angle out of range: {0}")]
    InvalidAngle(String),

    #[error("coupling table incomplete: {0}")]
    IncompleteCouplings(String),

    #[error("negative angle requires detuning sign flips, which this coupling table forbids: {0}")]
    DetuningSignFixed(String),

    #[error("qubit count {0} below minimum {1}")]
    TooFewQubits(usize, usize),

    #[error("dipole approximation invalid: separation^2 = {separation_sq:.3e} m^2 < 10 * max loop area {max_area:.3e} m^2")]
    NearFieldViolation { separation_sq: f64, max_area: f64 },

    #[error("schedule parse error at line {line}: {message}")]
    ScheduleParse { line: usize, message: String },

    #[error("device file error: {0}")]
    DeviceFile(String),

    #[error("invalid range: {0}")]
    InvalidRange(String),
}

pub type Result<T> = std::result::Result<T, Error>;
