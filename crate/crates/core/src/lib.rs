//! Desk-scale laboratory for charged condensate wave packets: a split-step
//! spectral solver for the 1-D mean-field (Gross-Pitaevskii) equation,
//! Larmor-type radiated-energy accumulation under four models, a truncated
//! Fock-space oracle for the coherent-state algebra behind the two-term
//! condensate formula, and canned experiments probing how radiation scales
//! with packet length.

pub mod error;
pub mod experiments;
pub mod fock;
pub mod grid;
pub mod propagator;
pub mod radiation;
pub mod state;

pub use error::{Error, Result};
pub use experiments::{
    HarmonicBenchmark, HarmonicBenchmarkReport, ScalingSweepConfig, ScalingSweepResult,
};
pub use grid::Grid;
pub use propagator::{evolve_and_record, step, EvolutionConfig};
pub use radiation::{classical_trajectory, integrate_radiation, RadiationResult, TimeSeries};
pub use state::{GaussianPacket, Observables, PhysicalParams, Potential, WaveFunction};
