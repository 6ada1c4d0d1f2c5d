//! Wave-packet construction and the observables <x>, <v>, <a>, <a^2>.
//!
//! The acceleration is the local field a(x) = (-dV/dx - g*d|psi|^2/dx)/m, the
//! electric/gradient part of the force law with no magnetic terms (all runs
//! take A_E = 0, B = 0). Potential gradients are analytic for the closed-form
//! kinds and spectral for tabulated ones; the density gradient is always
//! spectral.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Physical constants of a run. `gpe_coupling` is the mean-field
/// self-interaction strength; `n_mean` the mean particle number |z|^2 of the
/// condensate, which enters only the radiated-energy combination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhysicalParams {
    pub hbar: f64,
    pub mass: f64,
    pub charge: f64,
    pub light_speed: f64,
    pub gpe_coupling: f64,
    pub n_mean: f64,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        PhysicalParams {
            hbar: 1.0,
            mass: 1.0,
            charge: 1.0,
            light_speed: 1.0,
            gpe_coupling: 0.0,
            n_mean: 1.0,
        }
    }
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        let positive: [(&'static str, f64); 3] = [
            ("hbar", self.hbar),
            ("mass", self.mass),
            ("light_speed", self.light_speed),
        ];
        for (name, value) in positive {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    rule: "must be positive and finite",
                });
            }
        }
        if !(self.n_mean >= 0.0) || !self.n_mean.is_finite() {
            return Err(Error::InvalidParameter {
                name: "n_mean",
                value: self.n_mean,
                rule: "must be non-negative and finite",
            });
        }
        if !self.gpe_coupling.is_finite() || !self.charge.is_finite() {
            return Err(Error::InvalidParameter {
                name: "gpe_coupling/charge",
                value: if self.gpe_coupling.is_finite() {
                    self.charge
                } else {
                    self.gpe_coupling
                },
                rule: "must be finite",
            });
        }
        Ok(())
    }
}

/// External potential V(x).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Potential {
    Zero,
    Harmonic { omega: f64 },
    GaussianBarrier { height: f64, width: f64, center: f64 },
    Tabulated { values: Vec<f64> },
}

impl Potential {
    pub fn validate(&self, grid: &Grid) -> Result<()> {
        match self {
            Potential::Zero => Ok(()),
            Potential::Harmonic { omega } => {
                if !(*omega > 0.0) || !omega.is_finite() {
                    return Err(Error::InvalidParameter {
                        name: "omega",
                        value: *omega,
                        rule: "must be positive and finite",
                    });
                }
                Ok(())
            }
            Potential::GaussianBarrier { height, width, center } => {
                if !(*width > 0.0) || !width.is_finite() {
                    return Err(Error::InvalidParameter {
                        name: "width",
                        value: *width,
                        rule: "must be positive and finite",
                    });
                }
                if !height.is_finite() || !center.is_finite() {
                    return Err(Error::InvalidParameter {
                        name: "height/center",
                        value: if height.is_finite() { *center } else { *height },
                        rule: "must be finite",
                    });
                }
                Ok(())
            }
            Potential::Tabulated { values } => {
                if values.len() != grid.n_points() {
                    return Err(Error::TabulatedLengthMismatch {
                        expected: grid.n_points(),
                        got: values.len(),
                    });
                }
                if let Some(&bad) = values.iter().find(|v| !v.is_finite()) {
                    return Err(Error::InvalidParameter {
                        name: "values",
                        value: bad,
                        rule: "tabulated entries must be finite",
                    });
                }
                Ok(())
            }
        }
    }

    /// V evaluated at an arbitrary point; `None` for tabulated data.
    pub fn value_at(&self, x: f64, mass: f64) -> Option<f64> {
        match self {
            Potential::Zero => Some(0.0),
            Potential::Harmonic { omega } => Some(0.5 * mass * omega * omega * x * x),
            Potential::GaussianBarrier { height, width, center } => {
                let u = x - center;
                Some(height * (-u * u / (2.0 * width * width)).exp())
            }
            Potential::Tabulated { .. } => None,
        }
    }

    /// dV/dx at an arbitrary point; `None` for tabulated data.
    pub fn gradient_at(&self, x: f64, mass: f64) -> Option<f64> {
        match self {
            Potential::Zero => Some(0.0),
            Potential::Harmonic { omega } => Some(mass * omega * omega * x),
            Potential::GaussianBarrier { height, width, center } => {
                let u = x - center;
                let w2 = width * width;
                Some(-height * u / w2 * (-u * u / (2.0 * w2)).exp())
            }
            Potential::Tabulated { .. } => None,
        }
    }

    pub fn values_on(&self, grid: &Grid, mass: f64) -> Result<Vec<f64>> {
        self.validate(grid)?;
        match self {
            Potential::Tabulated { values } => Ok(values.clone()),
            _ => Ok(grid
                .positions()
                .iter()
                .map(|&x| self.value_at(x, mass).unwrap())
                .collect()),
        }
    }

    /// dV/dx on the grid: analytic where a closed form exists, spectral for
    /// tabulated samples (which must then be periodic-smooth).
    pub fn gradient_on(&self, grid: &Grid, mass: f64) -> Result<Vec<f64>> {
        self.validate(grid)?;
        match self {
            Potential::Tabulated { values } => grid.spectral_derivative_real(values),
            _ => Ok(grid
                .positions()
                .iter()
                .map(|&x| self.gradient_at(x, mass).unwrap())
                .collect()),
        }
    }
}

/// Complex amplitudes psi(x) on a shared grid, tagged with the current time.
#[derive(Debug, Clone)]
pub struct WaveFunction {
    grid: Arc<Grid>,
    values: Vec<Complex64>,
    time: f64,
}

/// Gaussian packet spec: |psi| ~ exp(-(x-center)^2/(4 sigma^2)) with drift
/// phase exp(i*momentum*x/hbar), so the position variance is sigma^2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GaussianPacket {
    pub center: f64,
    pub sigma: f64,
    pub momentum: f64,
}

impl Default for GaussianPacket {
    fn default() -> Self {
        GaussianPacket { center: 0.0, sigma: 5.0, momentum: 0.0 }
    }
}

/// Envelope fraction at the nearer box edge must stay below this for a packet
/// to be accepted; 1e-12 of peak keeps wrap-around artifacts under the
/// tightest observable tolerances.
pub const PACKET_TAIL_LIMIT: f64 = 1e-12;

impl GaussianPacket {
    pub fn realize(&self, grid: Arc<Grid>, params: &PhysicalParams) -> Result<WaveFunction> {
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            return Err(Error::InvalidParameter {
                name: "sigma",
                value: self.sigma,
                rule: "must be positive and finite",
            });
        }
        let half = 0.5 * grid.box_length();
        if self.center <= -half || self.center >= half {
            return Err(Error::InvalidParameter {
                name: "center",
                value: self.center,
                rule: "must lie inside the box (-L/2, L/2)",
            });
        }
        let edge_distance = (self.center + half).min(half - self.center);
        let edge_fraction = (-edge_distance * edge_distance / (4.0 * self.sigma * self.sigma)).exp();
        if edge_fraction > PACKET_TAIL_LIMIT {
            return Err(Error::PacketTooWide { sigma: self.sigma, edge_fraction });
        }

        let k0 = self.momentum / params.hbar;
        let values = grid
            .positions()
            .iter()
            .map(|&x| {
                let u = x - self.center;
                let envelope = (-u * u / (4.0 * self.sigma * self.sigma)).exp();
                envelope * Complex64::new(0.0, k0 * x).exp()
            })
            .collect();
        let mut psi = WaveFunction { grid, values, time: 0.0 };
        psi.normalize();
        Ok(psi)
    }
}

impl WaveFunction {
    /// Wrap raw samples; the caller is responsible for normalization.
    pub fn from_values(grid: Arc<Grid>, values: Vec<Complex64>, time: f64) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::LengthMismatch {
                expected: grid.n_points(),
                got: values.len(),
            });
        }
        Ok(WaveFunction { grid, values, time })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub(crate) fn set_time(&mut self, t: f64) {
        self.time = t;
    }

    /// Rescale to unit norm; returns the norm that was divided out.
    pub fn normalize(&mut self) -> f64 {
        let norm = self.norm_squared().sqrt();
        if norm > 0.0 {
            let inv = 1.0 / norm;
            for v in &mut self.values {
                *v *= inv;
            }
        }
        norm
    }

    pub fn norm_squared(&self) -> f64 {
        self.values.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.grid.dx()
    }

    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|c| c.norm_sqr()).collect()
    }

    pub fn mean_position(&self) -> f64 {
        self.grid
            .positions()
            .iter()
            .zip(&self.values)
            .map(|(&x, c)| x * c.norm_sqr())
            .sum::<f64>()
            * self.grid.dx()
    }

    /// <v> from the probability-current form (hbar/m) Im<psi|d psi/dx>, which
    /// is real by construction.
    pub fn mean_velocity(&self, params: &PhysicalParams) -> f64 {
        let d = self
            .grid
            .spectral_derivative(&self.values)
            .expect("state length matches its own grid");
        let ip = self
            .grid
            .inner_product(&self.values, &d)
            .expect("state length matches its own grid");
        params.hbar / params.mass * ip.im
    }

    /// Pointwise a(x) = (-dV/dx - g d|psi|^2/dx)/m.
    pub fn acceleration_field(
        &self,
        potential: &Potential,
        params: &PhysicalParams,
    ) -> Result<Vec<f64>> {
        let grad_v = potential.gradient_on(&self.grid, params.mass)?;
        let inv_m = 1.0 / params.mass;
        if params.gpe_coupling == 0.0 {
            return Ok(grad_v.iter().map(|&gv| -gv * inv_m).collect());
        }
        let grad_rho = self.grid.spectral_derivative_real(&self.density())?;
        Ok(grad_v
            .iter()
            .zip(&grad_rho)
            .map(|(&gv, &gr)| -(gv + params.gpe_coupling * gr) * inv_m)
            .collect())
    }

    pub fn mean_acceleration(&self, potential: &Potential, params: &PhysicalParams) -> Result<f64> {
        let a = self.acceleration_field(potential, params)?;
        Ok(self.density_average(&a))
    }

    pub fn mean_acceleration_squared(
        &self,
        potential: &Potential,
        params: &PhysicalParams,
    ) -> Result<f64> {
        let a = self.acceleration_field(potential, params)?;
        Ok(self
            .density()
            .iter()
            .zip(&a)
            .map(|(rho, aj)| rho * aj * aj)
            .sum::<f64>()
            * self.grid.dx())
    }

    fn density_average(&self, field: &[f64]) -> f64 {
        self.values
            .iter()
            .zip(field)
            .map(|(c, f)| c.norm_sqr() * f)
            .sum::<f64>()
            * self.grid.dx()
    }

    /// All recorded observables in one pass, sharing the acceleration field.
    pub fn observables(&self, potential: &Potential, params: &PhysicalParams) -> Result<Observables> {
        let a = self.acceleration_field(potential, params)?;
        let dx = self.grid.dx();
        let mut norm2 = 0.0;
        let mut x_mean = 0.0;
        let mut a_mean = 0.0;
        let mut a2_mean = 0.0;
        for ((c, &x), &aj) in self.values.iter().zip(self.grid.positions()).zip(&a) {
            let rho = c.norm_sqr();
            norm2 += rho;
            x_mean += rho * x;
            a_mean += rho * aj;
            a2_mean += rho * aj * aj;
        }
        Ok(Observables {
            norm2: norm2 * dx,
            x_mean: x_mean * dx,
            v_mean: self.mean_velocity(params),
            a_mean: a_mean * dx,
            a2_mean: a2_mean * dx,
        })
    }
}

/// One sampled row of the recorded observables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observables {
    pub norm2: f64,
    pub x_mean: f64,
    pub v_mean: f64,
    pub a_mean: f64,
    pub a2_mean: f64,
}
