//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("grid size {0} is invalid: n_points must be a power of two and at least 8")]
    InvalidGridSize(usize),

    #[error("box length {0} is invalid: must be positive and finite")]
    InvalidBoxLength(f64),

    #[error("array length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("parameter `{name}` = {value} is out of range: {rule}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        rule: &'static str,
    },

    #[error(
        "packet with sigma {sigma} does not fit: envelope at the box edge is {edge_fraction:.3e} \
         of peak (must be below 1e-12); enlarge the box or re-center"
    )]
    PacketTooWide { sigma: f64, edge_fraction: f64 },

    #[error("tabulated potential has {got} entries but the grid has {expected} points")]
    TabulatedLengthMismatch { expected: usize, got: usize },

    #[error("tabulated potentials have no off-grid gradient; classical trajectories need an analytic potential")]
    NonDifferentiablePotential,

    #[error(
        "time step {dt} violates the kinetic stability guard: hbar*k_max^2*dt/(2m) = {phase:.4} >= pi"
    )]
    UnstableTimeStep { dt: f64, phase: f64 },

    #[error("state became non-finite at step {step} (blow-up)")]
    Blowup { step: usize },

    #[error("time series is invalid: {0}")]
    InvalidTimeSeries(&'static str),

    #[error(
        "coherent-state truncation guard violated: |z|^2 = {n_mean} with n_max = {n_max} leaves a \
         Poisson tail of {tail:.3e} (must be below 1e-14); raise n_max or lower |z|"
    )]
    TruncationGuard {
        n_mean: f64,
        n_max: usize,
        tail: f64,
    },

    #[error("requested Fock occupation {n} exceeds the space truncation n_max = {n_max}")]
    OccupationTooLarge { n: usize, n_max: usize },

    #[error("mode amplitudes are not normalized: sum |phi_k|^2 = {0}")]
    UnnormalizedAmplitudes(f64),

    #[error("one-body operator is {got}x{got} but the space has {expected} modes")]
    OperatorSizeMismatch { expected: usize, got: usize },

    #[error("{0}")]
    InvalidConfig(String),
}

impl Error {
    /// True for failures of the numerics themselves, as opposed to rejected input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Blowup { .. })
    }
}
