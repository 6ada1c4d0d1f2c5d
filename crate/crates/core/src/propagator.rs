//! Second-order split-step spectral evolution of the mean-field equation
//! i hbar dpsi/dt = [p^2/2m + V + g|psi|^2] psi.
//!
//! Strang ordering: half-step potential+nonlinear phase, full kinetic step in
//! Fourier space, half-step potential+nonlinear phase recomputed from the
//! updated density. Every sub-step is a pure phase in its diagonal basis, so
//! the norm is preserved to rounding per step; drift is left uncorrected as a
//! diagnostic.

use serde::{Deserialize, Serialize};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::radiation::TimeSeries;
use crate::state::{PhysicalParams, Potential, WaveFunction};

/// Time-stepping parameters. `sample_stride` is the observable sampling
/// period in steps; the first and last steps are always sampled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolutionConfig {
    pub dt: f64,
    pub n_steps: usize,
    pub sample_stride: usize,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig { dt: 1e-3, n_steps: 1000, sample_stride: 10 }
    }
}

impl EvolutionConfig {
    pub fn validate_basic(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidParameter {
                name: "dt",
                value: self.dt,
                rule: "must be positive and finite",
            });
        }
        if self.n_steps == 0 {
            return Err(Error::InvalidParameter {
                name: "n_steps",
                value: 0.0,
                rule: "must be at least 1",
            });
        }
        if self.sample_stride == 0 {
            return Err(Error::InvalidParameter {
                name: "sample_stride",
                value: 0.0,
                rule: "must be at least 1",
            });
        }
        Ok(())
    }

    /// Basic checks plus the kinetic stability guard
    /// hbar * k_max^2 * dt / (2m) < pi.
    pub fn validate(&self, grid: &Grid, params: &PhysicalParams) -> Result<()> {
        self.validate_basic()?;
        let phase = params.hbar * grid.k_max().powi(2) * self.dt / (2.0 * params.mass);
        if phase >= std::f64::consts::PI {
            return Err(Error::UnstableTimeStep { dt: self.dt, phase });
        }
        Ok(())
    }
}

/// Precomputed per-step machinery for one (grid, potential, params, dt)
/// combination.
pub struct Stepper {
    v_vals: Vec<f64>,
    kinetic_phase: Vec<Complex64>,
    half_angle_v: Vec<f64>,
    g_half_dt_over_hbar: f64,
    scratch: Vec<Complex64>,
}

impl Stepper {
    pub fn new(
        grid: &Grid,
        potential: &Potential,
        params: &PhysicalParams,
        dt: f64,
    ) -> Result<Self> {
        params.validate()?;
        let v_vals = potential.values_on(grid, params.mass)?;
        let kin = params.hbar * dt / (2.0 * params.mass);
        let kinetic_phase = grid
            .wavenumbers()
            .iter()
            .map(|&k| Complex64::new(0.0, -kin * k * k).exp())
            .collect();
        let half_dt_over_hbar = 0.5 * dt / params.hbar;
        let half_angle_v = v_vals.iter().map(|&v| v * half_dt_over_hbar).collect();
        Ok(Stepper {
            v_vals,
            kinetic_phase,
            half_angle_v,
            g_half_dt_over_hbar: params.gpe_coupling * half_dt_over_hbar,
            scratch: Vec::new(),
        })
    }

    pub fn potential_values(&self) -> &[f64] {
        &self.v_vals
    }

    fn half_potential_phase(&self, values: &mut [Complex64]) {
        if self.g_half_dt_over_hbar == 0.0 {
            for (v, &angle) in values.iter_mut().zip(&self.half_angle_v) {
                *v *= Complex64::new(0.0, -angle).exp();
            }
        } else {
            for (v, &angle) in values.iter_mut().zip(&self.half_angle_v) {
                let full = angle + self.g_half_dt_over_hbar * v.norm_sqr();
                *v *= Complex64::new(0.0, -full).exp();
            }
        }
    }

    /// One Strang step in place. The caller owns finiteness checking.
    pub fn advance(&mut self, grid: &Grid, values: &mut [Complex64]) {
        self.half_potential_phase(values);
        grid.fft_in_place(values, &mut self.scratch);
        for (v, phase) in values.iter_mut().zip(&self.kinetic_phase) {
            *v *= phase;
        }
        grid.ifft_in_place(values, &mut self.scratch);
        self.half_potential_phase(values);
    }
}

fn check_finite(values: &[Complex64], step: usize) -> Result<()> {
    if values.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::Blowup { step });
    }
    Ok(())
}

/// Advance one step of size `dt`, returning the evolved state.
pub fn step(
    psi: WaveFunction,
    potential: &Potential,
    params: &PhysicalParams,
    dt: f64,
) -> Result<WaveFunction> {
    let cfg = EvolutionConfig { dt: dt.abs(), n_steps: 1, sample_stride: 1 };
    cfg.validate(psi.grid(), params)?;
    let mut stepper = Stepper::new(psi.grid(), potential, params, dt)?;
    let grid = psi.grid().clone();
    let mut psi = psi;
    let t = psi.time();
    stepper.advance(&grid, psi.values_mut());
    check_finite(psi.values(), 1)?;
    psi.set_time(t + dt);
    Ok(psi)
}

/// Evolve `cfg.n_steps` steps, recording observables every
/// `cfg.sample_stride` steps (plus the initial and final states).
pub fn evolve_and_record(
    psi0: &WaveFunction,
    potential: &Potential,
    params: &PhysicalParams,
    cfg: &EvolutionConfig,
) -> Result<TimeSeries> {
    cfg.validate(psi0.grid(), params)?;
    let mut stepper = Stepper::new(psi0.grid(), potential, params, cfg.dt)?;
    let grid = psi0.grid().clone();
    let t0 = psi0.time();

    let mut psi = psi0.clone();
    let mut series = TimeSeries::with_capacity(cfg.n_steps / cfg.sample_stride + 2);
    series.push(t0, psi.observables(potential, params)?);

    for i in 1..=cfg.n_steps {
        stepper.advance(&grid, psi.values_mut());
        check_finite(psi.values(), i)?;
        let t = t0 + i as f64 * cfg.dt;
        psi.set_time(t);
        if i % cfg.sample_stride == 0 || i == cfg.n_steps {
            series.push(t, psi.observables(potential, params)?);
        }
    }
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::state::GaussianPacket;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn grid(n: usize, l: f64) -> Arc<Grid> {
        Arc::new(Grid::new(n, l).unwrap())
    }

    fn coherent_packet(g: &Arc<Grid>, x0: f64, omega: f64) -> WaveFunction {
        let params = PhysicalParams::default();
        let sigma = (params.hbar / (2.0 * params.mass * omega)).sqrt();
        GaussianPacket { center: x0, sigma, momentum: 0.0 }
            .realize(g.clone(), &params)
            .unwrap()
    }

    #[test]
    fn stability_guard_rejects_large_dt() {
        let cfg = EvolutionConfig { dt: 1.0, n_steps: 10, sample_stride: 1 };
        let g = grid(256, 20.0);
        let err = cfg.validate(&g, &PhysicalParams::default()).unwrap_err();
        assert!(matches!(err, Error::UnstableTimeStep { .. }), "{err}");
    }

    #[test]
    fn zero_steps_is_rejected_and_one_step_yields_two_samples() {
        let g = grid(128, 40.0);
        let params = PhysicalParams::default();
        let psi = GaussianPacket { center: 0.0, sigma: 1.0, momentum: 0.0 }
            .realize(g, &params)
            .unwrap();
        let bad = EvolutionConfig { dt: 1e-3, n_steps: 0, sample_stride: 1 };
        assert!(evolve_and_record(&psi, &Potential::Zero, &params, &bad).is_err());

        let cfg = EvolutionConfig { dt: 1e-3, n_steps: 1, sample_stride: 1 };
        let series = evolve_and_record(&psi, &Potential::Zero, &params, &cfg).unwrap();
        assert_eq!(series.len(), 2);
        assert_eq!(series.times[0], 0.0);
        assert_abs_diff_eq!(series.times[1], 1e-3, epsilon = 1e-18);
    }

    #[test]
    fn single_step_preserves_norm_to_rounding() {
        let g = grid(256, 40.0);
        let params = PhysicalParams { gpe_coupling: 1.0, ..Default::default() };
        let psi = GaussianPacket { center: 0.0, sigma: 1.0, momentum: 1.0 }
            .realize(g, &params)
            .unwrap();
        let pot = Potential::Harmonic { omega: 1.0 };
        let stepped = step(psi, &pot, &params, 1e-3).unwrap();
        assert!((stepped.norm_squared() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn free_packet_drifts_at_constant_velocity() {
        let g = grid(512, 80.0);
        let params = PhysicalParams::default();
        let psi = GaussianPacket { center: -8.0, sigma: 1.0, momentum: 1.5 }
            .realize(g, &params)
            .unwrap();
        let cfg = EvolutionConfig { dt: 2e-3, n_steps: 5000, sample_stride: 500 };
        let series = evolve_and_record(&psi, &Potential::Zero, &params, &cfg).unwrap();
        let t_final = 5000.0 * 2e-3;
        let expected = -8.0 + 1.5 * t_final;
        assert_abs_diff_eq!(*series.x_mean.last().unwrap(), expected, epsilon = 1e-6);
        // No force anywhere along the run.
        assert!(series.a_mean.iter().all(|a| a.abs() < 1e-10));
    }

    #[test]
    fn harmonic_coherent_state_returns_after_one_period() {
        let g = grid(256, 40.0);
        let params = PhysicalParams::default();
        let omega = 1.0;
        let pot = Potential::Harmonic { omega };
        let psi0 = coherent_packet(&g, 1.0, omega);
        let n_steps = 4096;
        let dt = 2.0 * PI / omega / n_steps as f64;

        let mut psi = psi0.clone();
        let mut stepper = Stepper::new(&g, &pot, &params, dt).unwrap();
        for _ in 0..n_steps {
            stepper.advance(&g, psi.values_mut());
        }
        assert_abs_diff_eq!(psi.mean_position(), 1.0, epsilon = 1e-5);

        let width = |w: &WaveFunction| {
            let m = w.mean_position();
            (w.grid()
                .positions()
                .iter()
                .zip(w.values())
                .map(|(&x, c)| (x - m).powi(2) * c.norm_sqr())
                .sum::<f64>()
                * w.grid().dx())
            .sqrt()
        };
        assert_abs_diff_eq!(width(&psi), width(&psi0), epsilon = 1e-6);
    }

    #[test]
    fn norm_drift_stays_below_1e8_over_ten_thousand_steps() {
        let g = grid(256, 40.0);
        let params = PhysicalParams { gpe_coupling: 0.5, ..Default::default() };
        let psi = GaussianPacket { center: 1.0, sigma: 1.0, momentum: 0.0 }
            .realize(g, &params)
            .unwrap();
        let pot = Potential::Harmonic { omega: 1.0 };
        let cfg = EvolutionConfig { dt: 1e-3, n_steps: 10_000, sample_stride: 1000 };
        let series = evolve_and_record(&psi, &pot, &params, &cfg).unwrap();
        let drift = series.norm2.iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max);
        assert!(drift < 1e-8, "drift = {drift}");
    }

    #[test]
    fn evolution_is_time_reversible_for_linear_dynamics() {
        let g = grid(256, 40.0);
        let params = PhysicalParams::default();
        let pot = Potential::Harmonic { omega: 1.0 };
        let psi0 = GaussianPacket { center: 1.0, sigma: 0.9, momentum: 0.5 }
            .realize(g.clone(), &params)
            .unwrap();
        let dt = 1e-3;
        let n = 2000;

        let mut psi = psi0.clone();
        let mut forward = Stepper::new(&g, &pot, &params, dt).unwrap();
        for _ in 0..n {
            forward.advance(&g, psi.values_mut());
        }
        let mut backward = Stepper::new(&g, &pot, &params, -dt).unwrap();
        for _ in 0..n {
            backward.advance(&g, psi.values_mut());
        }
        let max = psi0
            .values()
            .iter()
            .zip(psi.values())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(max < 1e-8, "round trip residual {max}");
    }

    #[test]
    fn boost_shifts_trajectory_without_touching_width() {
        let g = grid(512, 120.0);
        let params = PhysicalParams::default();
        let dt = 2e-3;
        let n = 2500;
        let width_history = |momentum: f64| {
            let mut psi = GaussianPacket { center: -10.0, sigma: 1.0, momentum }
                .realize(g.clone(), &params)
                .unwrap();
            let mut stepper = Stepper::new(&g, &Potential::Zero, &params, dt).unwrap();
            let mut widths = Vec::new();
            let mut centers = Vec::new();
            for i in 0..n {
                if i % 250 == 0 {
                    let m = psi.mean_position();
                    let var = psi
                        .grid()
                        .positions()
                        .iter()
                        .zip(psi.values())
                        .map(|(&x, c)| (x - m).powi(2) * c.norm_sqr())
                        .sum::<f64>()
                        * psi.grid().dx();
                    widths.push(var);
                    centers.push(m);
                }
                stepper.advance(&g, psi.values_mut());
            }
            (widths, centers)
        };
        let (w_rest, c_rest) = width_history(0.0);
        let (w_boost, c_boost) = width_history(2.0);
        for (i, (wr, wb)) in w_rest.iter().zip(&w_boost).enumerate() {
            assert_abs_diff_eq!(wr, wb, epsilon = 1e-8);
            let t = (i * 250) as f64 * dt;
            assert_abs_diff_eq!(c_boost[i] - c_rest[i], 2.0 * t, epsilon = 1e-8);
        }
    }

    #[test]
    fn ehrenfest_holds_pointwise_on_the_sampled_series() {
        let g = grid(256, 40.0);
        let params = PhysicalParams::default();
        let pot = Potential::Harmonic { omega: 1.0 };
        let psi = coherent_packet(&g, 1.0, 1.0);
        let dt = 2e-3;
        let cfg = EvolutionConfig { dt, n_steps: 3000, sample_stride: 1 };
        let series = evolve_and_record(&psi, &pot, &params, &cfg).unwrap();
        let tol = (3.0 * dt * dt).max(1e-4);
        let resid = series.max_ehrenfest_residual();
        assert!(resid < tol, "residual {resid} vs tol {tol}");
    }

    #[test]
    fn second_order_convergence_of_mean_position() {
        // Measured at 3/4 period: at a full period the Strang phase error
        // cancels to higher order for this observable, hiding the dt^2 law.
        let g = grid(128, 40.0);
        let params = PhysicalParams::default();
        let pot = Potential::Harmonic { omega: 1.0 };
        let t_final = 1.5 * PI;
        let x_exact = t_final.cos();

        let errors: Vec<f64> = (0..4)
            .map(|level| {
                let n_steps = 512usize << level;
                let dt = t_final / n_steps as f64;
                let mut psi = coherent_packet(&g, 1.0, 1.0);
                let mut stepper = Stepper::new(&g, &pot, &params, dt).unwrap();
                for _ in 0..n_steps {
                    stepper.advance(&g, psi.values_mut());
                }
                (psi.mean_position() - x_exact).abs()
            })
            .collect();
        for pair in errors.windows(2) {
            let ratio = pair[0] / pair[1];
            assert!(
                (8.0 / 3.0..=6.0).contains(&ratio),
                "halving dt gave error ratio {ratio}, errors {errors:?}"
            );
        }
    }

    #[test]
    fn non_finite_state_is_reported_with_step_index() {
        let g = grid(64, 40.0);
        let params = PhysicalParams::default();
        let mut values = vec![Complex64::new(0.1, 0.0); 64];
        values[3] = Complex64::new(f64::NAN, 0.0);
        let psi = WaveFunction::from_values(g, values, 0.0).unwrap();
        let err = step(psi, &Potential::Zero, &params, 1e-3).unwrap_err();
        assert_eq!(err, Error::Blowup { step: 1 });
        assert!(err.is_numerical());
    }
}
