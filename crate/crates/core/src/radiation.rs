//! Radiated-energy accumulation over observable time series.
//!
//! Four models are reported from the same raw integrals:
//!   i_hydro      = integral of <a>^2 dt
//!   i_incoherent = integral of <a^2> dt
//! with the Larmor-type prefactor (2/3) q^2 / c^3:
//!   e_classical  = prefactor * i_incoherent   (point particle; a^2 column is
//!                  exactly a(t)^2 for trajectories from `classical_trajectory`)
//!   e_hydro      = prefactor * i_hydro        (charged-fluid form, no n factors)
//!   e_single     = prefactor * i_incoherent   (independent-particle form)
//!   e_condensate = prefactor * (n^2 * i_hydro + n * i_incoherent)

use serde::Serialize;

use crate::error::{Error, Result};
use crate::state::{Observables, PhysicalParams, Potential};
use crate::propagator::EvolutionConfig;

/// Sampled observables over a run. Columns share one strictly increasing time
/// axis.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub norm2: Vec<f64>,
    pub x_mean: Vec<f64>,
    pub v_mean: Vec<f64>,
    pub a_mean: Vec<f64>,
    pub a2_mean: Vec<f64>,
}

impl TimeSeries {
    pub fn with_capacity(n: usize) -> Self {
        TimeSeries {
            times: Vec::with_capacity(n),
            norm2: Vec::with_capacity(n),
            x_mean: Vec::with_capacity(n),
            v_mean: Vec::with_capacity(n),
            a_mean: Vec::with_capacity(n),
            a2_mean: Vec::with_capacity(n),
        }
    }

    pub fn push(&mut self, t: f64, obs: Observables) {
        self.times.push(t);
        self.norm2.push(obs.norm2);
        self.x_mean.push(obs.x_mean);
        self.v_mean.push(obs.v_mean);
        self.a_mean.push(obs.a_mean);
        self.a2_mean.push(obs.a2_mean);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.times.len();
        if n < 2 {
            return Err(Error::InvalidTimeSeries("need at least two samples"));
        }
        for column in [&self.norm2, &self.x_mean, &self.v_mean, &self.a_mean, &self.a2_mean] {
            if column.len() != n {
                return Err(Error::LengthMismatch { expected: n, got: column.len() });
            }
        }
        if self.times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidTimeSeries("times must be strictly increasing"));
        }
        if self
            .a_mean
            .iter()
            .zip(&self.a2_mean)
            .any(|(a, a2)| *a2 < a * a - 1e-10)
        {
            return Err(Error::InvalidTimeSeries(
                "a2_mean falls below a_mean^2 (Cauchy-Schwarz violated)",
            ));
        }
        Ok(())
    }

    pub fn max_norm_drift(&self) -> f64 {
        self.norm2.iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Max |d<v>/dt - <a>| over interior samples, with a three-point
    /// derivative that tolerates the irregular final interval.
    pub fn max_ehrenfest_residual(&self) -> f64 {
        let t = &self.times;
        let v = &self.v_mean;
        let mut max = 0.0f64;
        for i in 1..t.len().saturating_sub(1) {
            let (t0, t1, t2) = (t[i - 1], t[i], t[i + 1]);
            let dvdt = v[i - 1] * (t1 - t2) / ((t0 - t1) * (t0 - t2))
                + v[i] * (2.0 * t1 - t0 - t2) / ((t1 - t0) * (t1 - t2))
                + v[i + 1] * (t1 - t0) / ((t2 - t0) * (t2 - t1));
            max = max.max((dvdt - self.a_mean[i]).abs());
        }
        max
    }

    /// Momentum transferred over the run, m * (<v>_final - <v>_initial).
    pub fn impulse(&self, params: &PhysicalParams) -> f64 {
        match (self.v_mean.first(), self.v_mean.last()) {
            (Some(first), Some(last)) => params.mass * (last - first),
            _ => 0.0,
        }
    }
}

fn trapezoid(times: &[f64], values: impl Iterator<Item = f64> + Clone) -> f64 {
    let shifted = values.clone().skip(1);
    times
        .windows(2)
        .zip(values.zip(shifted))
        .map(|(w, (f0, f1))| 0.5 * (f0 + f1) * (w[1] - w[0]))
        .sum()
}

/// The four radiated-energy models and their raw time integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadiationResult {
    pub i_hydro: f64,
    pub i_incoherent: f64,
    pub e_classical: f64,
    pub e_hydro: f64,
    pub e_single: f64,
    pub e_condensate: f64,
    pub prefactor: f64,
}

/// Trapezoid-rule radiated energies over the full span of `series`.
pub fn integrate_radiation(series: &TimeSeries, params: &PhysicalParams) -> Result<RadiationResult> {
    series.validate()?;
    params.validate()?;
    let i_hydro = trapezoid(&series.times, series.a_mean.iter().map(|a| a * a));
    let i_incoherent = trapezoid(&series.times, series.a2_mean.iter().copied());
    let prefactor = 2.0 / 3.0 * params.charge.powi(2) / params.light_speed.powi(3);
    let n = params.n_mean;
    Ok(RadiationResult {
        i_hydro,
        i_incoherent,
        e_classical: prefactor * i_incoherent,
        e_hydro: prefactor * i_hydro,
        e_single: prefactor * i_incoherent,
        e_condensate: prefactor * (n * n * i_hydro + n * i_incoherent),
        prefactor,
    })
}

/// Point-particle reference: fourth-order Runge-Kutta on m x'' = -dV/dx.
/// The `a2_mean` column is a(t)^2 exactly (no spread), and the coupling g
/// plays no role. Requires an analytic potential kind.
pub fn classical_trajectory(
    x0: f64,
    v0: f64,
    potential: &Potential,
    params: &PhysicalParams,
    cfg: &EvolutionConfig,
) -> Result<TimeSeries> {
    cfg.validate_basic()?;
    params.validate()?;
    let accel = |x: f64| -> Result<f64> {
        let grad = potential
            .gradient_at(x, params.mass)
            .ok_or(Error::NonDifferentiablePotential)?;
        Ok(-grad / params.mass)
    };

    let mut series = TimeSeries::with_capacity(cfg.n_steps / cfg.sample_stride + 2);
    let record = |series: &mut TimeSeries, t: f64, x: f64, v: f64| -> Result<()> {
        let a = accel(x)?;
        series.push(
            t,
            Observables { norm2: 1.0, x_mean: x, v_mean: v, a_mean: a, a2_mean: a * a },
        );
        Ok(())
    };

    let (mut x, mut v) = (x0, v0);
    record(&mut series, 0.0, x, v)?;
    let dt = cfg.dt;
    for i in 1..=cfg.n_steps {
        let k1x = v;
        let k1v = accel(x)?;
        let k2x = v + 0.5 * dt * k1v;
        let k2v = accel(x + 0.5 * dt * k1x)?;
        let k3x = v + 0.5 * dt * k2v;
        let k3v = accel(x + 0.5 * dt * k2x)?;
        let k4x = v + dt * k3v;
        let k4v = accel(x + dt * k3x)?;
        x += dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        if !x.is_finite() || !v.is_finite() {
            return Err(Error::Blowup { step: i });
        }
        if i % cfg.sample_stride == 0 || i == cfg.n_steps {
            record(&mut series, i as f64 * dt, x, v)?;
        }
    }
    Ok(series)
}
