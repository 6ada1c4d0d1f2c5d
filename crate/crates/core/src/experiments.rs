//! Canned experiment drivers: the harmonic closed-form benchmark and the
//! packet-length scaling study (a long drifting packet crossing a localized
//! barrier, probing how the squared-mean-acceleration integral falls off with
//! packet length while the incoherent integral stays put).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::propagator::{evolve_and_record, EvolutionConfig};
use crate::radiation::{integrate_radiation, RadiationResult};
use crate::state::{GaussianPacket, PhysicalParams, Potential};

/// Coherent-width packet in a harmonic trap, compared against closed forms:
/// over whole periods, integral of <a>^2 is omega^4 x0^2 T / 2 and integral
/// of <a^2> adds the constant width term omega^4 sigma^2 T.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HarmonicBenchmark {
    pub omega: f64,
    pub x0: f64,
    pub periods: usize,
    pub steps_per_period: usize,
    pub sample_stride: usize,
    /// Overrides for the auto-sized grid.
    pub n_points: Option<usize>,
    pub box_length: Option<f64>,
}

impl Default for HarmonicBenchmark {
    fn default() -> Self {
        HarmonicBenchmark {
            omega: 1.0,
            x0: 1.0,
            periods: 1,
            steps_per_period: 3200,
            sample_stride: 4,
            n_points: None,
            box_length: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarmonicBenchmarkReport {
    pub omega: f64,
    pub x0: f64,
    pub periods: usize,
    pub sigma: f64,
    pub box_length: f64,
    pub n_points: usize,
    pub dt: f64,
    pub sample_stride: usize,
    pub duration: f64,
    pub i_hydro: f64,
    pub i_hydro_expected: f64,
    pub i_hydro_rel_err: Option<f64>,
    pub i_incoherent: f64,
    pub i_incoherent_expected: f64,
    pub i_incoherent_rel_err: Option<f64>,
    pub norm_drift: f64,
    pub ehrenfest_residual: f64,
    pub radiation: RadiationResult,
}

impl HarmonicBenchmark {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0) || !self.omega.is_finite() {
            return Err(Error::InvalidParameter {
                name: "omega",
                value: self.omega,
                rule: "must be positive and finite",
            });
        }
        if self.periods == 0 || self.steps_per_period == 0 || self.sample_stride == 0 {
            return Err(Error::InvalidParameter {
                name: "periods/steps_per_period/sample_stride",
                value: 0.0,
                rule: "must be at least 1",
            });
        }
        if !self.x0.is_finite() {
            return Err(Error::InvalidParameter {
                name: "x0",
                value: self.x0,
                rule: "must be finite",
            });
        }
        Ok(())
    }

    pub fn run(&self, params: &PhysicalParams) -> Result<HarmonicBenchmarkReport> {
        self.validate()?;
        params.validate()?;
        let sigma = (params.hbar / (2.0 * params.mass * self.omega)).sqrt();
        let box_length = self
            .box_length
            .unwrap_or_else(|| 4.0 * (self.x0.abs() + 11.0 * sigma));
        let n_points = self.n_points.unwrap_or_else(|| {
            // Spectral content: drift wavenumber at peak speed plus packet width.
            let k_need = params.mass * self.omega * self.x0.abs() / params.hbar + 5.0 / sigma;
            (((2.0 * k_need * box_length / std::f64::consts::PI).ceil() as usize).max(128))
                .next_power_of_two()
        });
        let grid = Arc::new(Grid::new(n_points, box_length)?);

        let period = 2.0 * std::f64::consts::PI / self.omega;
        let mut steps_per_period = self.steps_per_period;
        let mut dt = period / steps_per_period as f64;
        // Halve dt until the kinetic stability guard holds.
        while params.hbar * grid.k_max().powi(2) * dt / (2.0 * params.mass)
            >= std::f64::consts::PI
        {
            steps_per_period *= 2;
            dt = period / steps_per_period as f64;
        }
        let n_steps = self.periods * steps_per_period;
        let cfg = EvolutionConfig { dt, n_steps, sample_stride: self.sample_stride };

        let packet = GaussianPacket { center: self.x0, sigma, momentum: 0.0 };
        let psi = packet.realize(grid.clone(), params)?;
        let potential = Potential::Harmonic { omega: self.omega };
        let series = evolve_and_record(&psi, &potential, params, &cfg)?;
        let radiation = integrate_radiation(&series, params)?;

        let duration = n_steps as f64 * dt;
        let w4 = self.omega.powi(4);
        let i_hydro_expected = 0.5 * w4 * self.x0 * self.x0 * duration;
        let i_incoherent_expected = i_hydro_expected + w4 * sigma * sigma * duration;
        let rel = |measured: f64, expected: f64| {
            (expected != 0.0).then(|| (measured - expected).abs() / expected)
        };
        Ok(HarmonicBenchmarkReport {
            omega: self.omega,
            x0: self.x0,
            periods: self.periods,
            sigma,
            box_length,
            n_points,
            dt,
            sample_stride: self.sample_stride,
            duration,
            i_hydro: radiation.i_hydro,
            i_hydro_expected,
            i_hydro_rel_err: rel(radiation.i_hydro, i_hydro_expected),
            i_incoherent: radiation.i_incoherent,
            i_incoherent_expected,
            i_incoherent_rel_err: rel(radiation.i_incoherent, i_incoherent_expected),
            norm_drift: series.max_norm_drift(),
            ehrenfest_residual: series.max_ehrenfest_residual(),
            radiation,
        })
    }
}

/// The packet starts this many sigma before the barrier and the run ends the
/// same distance past it, so the force is fully traversed with room to spare.
pub const TRANSIT_PADDING_SIGMAS: f64 = 4.0;

/// Fraction of the drift momentum the impulse may reach before a record is
/// flagged as outside the perturbative regime.
pub const PERTURBATIVE_IMPULSE_FRACTION: f64 = 0.05;

/// Packet-length sweep across a fixed weak barrier. Defaults are the tuned
/// configuration used by the acceptance checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScalingSweepConfig {
    pub sigma_list: Vec<f64>,
    pub barrier_width: f64,
    pub barrier_height: f64,
    pub drift_velocity: f64,
    pub margin_factor: f64,
    pub dx_target: f64,
    pub dt: f64,
    pub sample_stride: usize,
    /// When set, each record is rerun with this mean-field coupling and the
    /// integrals reported in a secondary column.
    pub coupling_variant: Option<f64>,
}

impl Default for ScalingSweepConfig {
    fn default() -> Self {
        ScalingSweepConfig {
            sigma_list: vec![8.0, 8.0 * std::f64::consts::SQRT_2, 16.0, 16.0 * std::f64::consts::SQRT_2, 32.0],
            barrier_width: 0.2,
            barrier_height: 0.49,
            drift_velocity: 1.5,
            margin_factor: 24.0,
            dx_target: 0.1,
            dt: 2e-3,
            sample_stride: 32,
            coupling_variant: None,
        }
    }
}

impl ScalingSweepConfig {
    /// Hard validation plus the soft regime warnings that the sweep records
    /// rather than rejects.
    pub fn validate(&self) -> Result<Vec<String>> {
        if self.sigma_list.is_empty() {
            return Err(Error::InvalidConfig("sigma_list must not be empty".into()));
        }
        if self.sigma_list.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
            return Err(Error::InvalidConfig("sigma_list entries must be positive".into()));
        }
        if self.sigma_list.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidConfig("sigma_list must be strictly increasing".into()));
        }
        for (name, value, rule) in [
            ("barrier_width", self.barrier_width, "must be positive"),
            ("drift_velocity", self.drift_velocity, "must be positive"),
            ("dx_target", self.dx_target, "must be positive"),
            ("dt", self.dt, "must be positive"),
        ] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::InvalidParameter { name, value, rule });
            }
        }
        if !(self.margin_factor >= 6.0) {
            return Err(Error::InvalidParameter {
                name: "margin_factor",
                value: self.margin_factor,
                rule: "must be at least 6",
            });
        }
        if self.sample_stride == 0 {
            return Err(Error::InvalidParameter {
                name: "sample_stride",
                value: 0.0,
                rule: "must be at least 1",
            });
        }
        let mut warnings = Vec::new();
        let min_sigma = self.sigma_list[0];
        if self.barrier_width > 0.05 * min_sigma {
            warnings.push(format!(
                "barrier_width {} exceeds 0.05 * min(sigma) = {}; the narrow-barrier \
                 regime does not hold",
                self.barrier_width,
                0.05 * min_sigma
            ));
        }
        Ok(warnings)
    }
}

/// Integrals of one record rerun with a nonzero mean-field coupling.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoupledIntegrals {
    pub gpe_coupling: f64,
    pub i_hydro: f64,
    pub i_incoherent: f64,
    pub e_condensate: f64,
    pub impulse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub sigma: f64,
    pub box_length: f64,
    pub n_points: usize,
    pub n_steps: usize,
    pub i_hydro: f64,
    pub i_incoherent: f64,
    pub e_condensate: f64,
    pub impulse: f64,
    pub norm_drift: f64,
    pub violations: Vec<String>,
    pub coupled: Option<CoupledIntegrals>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingSweepResult {
    pub records: Vec<SweepRecord>,
    pub fitted_exponent: f64,
    pub fit_log_prefactor: f64,
    pub incoherent_spread: f64,
    pub impulse_spread: f64,
    pub n_mean: f64,
    /// Packet length at which the coherent term stops dominating,
    /// n^2 i_hydro(sigma*) = n i_incoherent; reported for n_mean >= 100.
    pub crossover_sigma: Option<f64>,
    pub warnings: Vec<String>,
}

/// Least-squares slope and intercept of ln(y) against ln(x).
pub fn log_log_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

fn run_record(
    cfg: &ScalingSweepConfig,
    params: &PhysicalParams,
    sigma: f64,
) -> Result<SweepRecord> {
    let travel = 2.0 * TRANSIT_PADDING_SIGMAS * sigma;
    let box_length = cfg.margin_factor * sigma + travel;
    let n_points = ((box_length / cfg.dx_target).ceil() as usize)
        .max(8)
        .next_power_of_two();
    let grid = Arc::new(Grid::new(n_points, box_length)?);

    let duration = travel / cfg.drift_velocity;
    let n_steps = (duration / cfg.dt).ceil() as usize;
    let evolution = EvolutionConfig {
        dt: cfg.dt,
        n_steps,
        sample_stride: cfg.sample_stride,
    };
    evolution.validate(&grid, params)?;

    let barrier = Potential::GaussianBarrier {
        height: cfg.barrier_height,
        width: cfg.barrier_width,
        center: 0.0,
    };
    let packet = GaussianPacket {
        center: -TRANSIT_PADDING_SIGMAS * sigma,
        sigma,
        momentum: params.mass * cfg.drift_velocity,
    };

    let run = |coupling: f64| -> Result<(RadiationResult, f64, f64)> {
        let run_params = PhysicalParams { gpe_coupling: coupling, ..params.clone() };
        let psi = packet.realize(grid.clone(), &run_params)?;
        let series = evolve_and_record(&psi, &barrier, &run_params, &evolution)?;
        let radiation = integrate_radiation(&series, &run_params)?;
        Ok((radiation, series.impulse(&run_params), series.max_norm_drift()))
    };

    let (radiation, impulse, norm_drift) = run(0.0)?;

    let mut violations = Vec::new();
    if cfg.barrier_width > 0.05 * sigma {
        violations.push(format!(
            "barrier_width {} exceeds 0.05 * sigma = {}",
            cfg.barrier_width,
            0.05 * sigma
        ));
    }
    let drift_momentum = params.mass * cfg.drift_velocity;
    if impulse.abs() > PERTURBATIVE_IMPULSE_FRACTION * drift_momentum {
        violations.push(format!(
            "impulse {} exceeds {}% of the drift momentum {}",
            impulse,
            PERTURBATIVE_IMPULSE_FRACTION * 100.0,
            drift_momentum
        ));
    }
    if norm_drift > 1e-8 {
        violations.push(format!("norm drift {norm_drift} exceeds 1e-8"));
    }

    let coupled = match cfg.coupling_variant {
        Some(g) if g != 0.0 => {
            let (r, imp, _) = run(g)?;
            Some(CoupledIntegrals {
                gpe_coupling: g,
                i_hydro: r.i_hydro,
                i_incoherent: r.i_incoherent,
                e_condensate: r.e_condensate,
                impulse: imp,
            })
        }
        _ => None,
    };

    Ok(SweepRecord {
        sigma,
        box_length,
        n_points,
        n_steps,
        i_hydro: radiation.i_hydro,
        i_incoherent: radiation.i_incoherent,
        e_condensate: radiation.e_condensate,
        impulse,
        norm_drift,
        violations,
        coupled,
    })
}

/// Run every sigma of the sweep (in parallel; aggregation stays in sigma
/// order) and fit the packet-length exponent of the i_hydro integral.
pub fn run_scaling_sweep(
    cfg: &ScalingSweepConfig,
    params: &PhysicalParams,
) -> Result<ScalingSweepResult> {
    let warnings = cfg.validate()?;
    params.validate()?;

    let records: Vec<SweepRecord> = cfg
        .sigma_list
        .par_iter()
        .map(|&sigma| run_record(cfg, params, sigma))
        .collect::<Result<Vec<_>>>()?;

    let sigmas: Vec<f64> = records.iter().map(|r| r.sigma).collect();
    let hydro: Vec<f64> = records.iter().map(|r| r.i_hydro).collect();
    let (fitted_exponent, fit_log_prefactor) = if records.len() >= 2 {
        log_log_fit(&sigmas, &hydro)
    } else {
        (f64::NAN, f64::NAN)
    };

    let spread = |values: &[f64]| -> f64 {
        let max = values.iter().cloned().fold(f64::MIN, f64::max);
        let min = values.iter().cloned().fold(f64::MAX, f64::min);
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        if mean == 0.0 {
            0.0
        } else {
            (max - min) / mean.abs()
        }
    };
    let incoherent: Vec<f64> = records.iter().map(|r| r.i_incoherent).collect();
    let impulses: Vec<f64> = records.iter().map(|r| r.impulse).collect();
    let incoherent_spread = spread(&incoherent);
    let impulse_spread = spread(&impulses);

    let crossover_sigma = (params.n_mean >= 100.0 && records.len() >= 2).then(|| {
        let i_inc_mean = incoherent.iter().sum::<f64>() / incoherent.len() as f64;
        ((i_inc_mean / params.n_mean).ln() - fit_log_prefactor) / fitted_exponent
    })
    .map(f64::exp);

    Ok(ScalingSweepResult {
        records,
        fitted_exponent,
        fit_log_prefactor,
        incoherent_spread,
        impulse_spread,
        n_mean: params.n_mean,
        crossover_sigma,
        warnings,
    })
}
