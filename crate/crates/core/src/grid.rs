//! Periodic 1-D spatial grid with spectral differentiation and inner products.
//!
//! The grid spans `[-L/2, L/2)` with uniform spacing `dx = L/n` and carries the
//! angular wavenumbers `k_j = 2*pi*j/L` in FFT ordering (non-negative
//! frequencies first, then negative; the Nyquist mode `j = n/2` is assigned the
//! positive sign `+pi*n/L`). Quadrature is the uniform weight `dx`, exact for
//! band-limited integrands on a periodic box.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

#[derive(Clone)]
pub struct Grid {
    n_points: usize,
    box_length: f64,
    dx: f64,
    wavenumbers: Vec<f64>,
    positions: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("n_points", &self.n_points)
            .field("box_length", &self.box_length)
            .field("dx", &self.dx)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.n_points == other.n_points && self.box_length == other.box_length
    }
}

impl Grid {
    pub fn new(n_points: usize, box_length: f64) -> Result<Self> {
        if n_points < 8 || !n_points.is_power_of_two() {
            return Err(Error::InvalidGridSize(n_points));
        }
        if !(box_length > 0.0) || !box_length.is_finite() {
            return Err(Error::InvalidBoxLength(box_length));
        }
        let n = n_points;
        let dx = box_length / n as f64;
        let two_pi = 2.0 * std::f64::consts::PI;
        let wavenumbers = (0..n)
            .map(|j| {
                // FFT ordering; Nyquist (j = n/2) takes the positive sign.
                let jj = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
                two_pi * jj / box_length
            })
            .collect();
        let positions = (0..n).map(|j| -0.5 * box_length + j as f64 * dx).collect();
        let mut planner = FftPlanner::new();
        Ok(Grid {
            n_points: n,
            box_length,
            dx,
            wavenumbers,
            positions,
            fft: planner.plan_fft_forward(n),
            ifft: planner.plan_fft_inverse(n),
        })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    #[inline]
    pub fn position(&self, j: usize) -> f64 {
        self.positions[j]
    }

    /// Largest |k| on the grid (the Nyquist wavenumber pi*n/L).
    pub fn k_max(&self) -> f64 {
        std::f64::consts::PI * self.n_points as f64 / self.box_length
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n_points {
            return Err(Error::LengthMismatch {
                expected: self.n_points,
                got: len,
            });
        }
        Ok(())
    }

    /// Unnormalized forward transform, in place.
    pub fn fft_in_place(&self, data: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        scratch.resize(self.fft.get_inplace_scratch_len(), Complex64::default());
        self.fft.process_with_scratch(data, scratch);
    }

    /// Inverse transform, in place, including the 1/n normalization.
    pub fn ifft_in_place(&self, data: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        scratch.resize(self.ifft.get_inplace_scratch_len(), Complex64::default());
        self.ifft.process_with_scratch(data, scratch);
        let inv_n = 1.0 / self.n_points as f64;
        for v in data.iter_mut() {
            *v *= inv_n;
        }
    }

    /// First spatial derivative via forward transform, multiply by i*k,
    /// inverse transform. The Nyquist coefficient is zeroed so real inputs
    /// keep real derivatives.
    pub fn spectral_derivative(&self, f: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(f.len())?;
        let mut buf = f.to_vec();
        let mut scratch = Vec::new();
        self.fft_in_place(&mut buf, &mut scratch);
        let nyquist = self.n_points / 2;
        for (j, v) in buf.iter_mut().enumerate() {
            if j == nyquist {
                *v = Complex64::default();
            } else {
                *v *= Complex64::new(0.0, self.wavenumbers[j]);
            }
        }
        self.ifft_in_place(&mut buf, &mut scratch);
        Ok(buf)
    }

    /// Derivative of a real-valued sample array; imaginary residue is dropped.
    pub fn spectral_derivative_real(&self, f: &[f64]) -> Result<Vec<f64>> {
        let complex: Vec<Complex64> = f.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        Ok(self.spectral_derivative(&complex)?.iter().map(|c| c.re).collect())
    }

    /// Discrete realization of the L2 product: dx * sum conj(f)*g.
    pub fn inner_product(&self, f: &[Complex64], g: &[Complex64]) -> Result<Complex64> {
        self.check_len(f.len())?;
        self.check_len(g.len())?;
        let sum: Complex64 = f.iter().zip(g).map(|(a, b)| a.conj() * b).sum();
        Ok(sum * self.dx)
    }
}
