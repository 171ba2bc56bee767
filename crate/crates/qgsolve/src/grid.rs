//! Square periodic grid and its Fourier lattice.
//!
//! Fields live on `[0, period)^2` sampled at `n x n` points, `x_ij = (i,j) * period / n`,
//! stored row-major with the first index along x1. The Fourier lattice carries integer
//! modes `m` in `[-n/2, n/2)` per axis and physical wavenumbers `k = 2*pi*m / period`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    n: usize,
    period: f64,
    dealias_fraction: f64,
}

impl Grid2D {
    /// Classical 2/3 rule: quadratic products of retained modes are alias-free.
    pub const DEFAULT_DEALIAS: f64 = 2.0 / 3.0;

    pub fn new(n: usize, period: f64, dealias_fraction: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n must be a power of two >= 8, got {n}"
            )));
        }
        if !period.is_finite() || period <= 0.0 {
            return Err(Error::InvalidGrid(format!("period must be positive, got {period}")));
        }
        if !dealias_fraction.is_finite() || dealias_fraction <= 0.0 || dealias_fraction > 1.0 {
            return Err(Error::InvalidGrid(format!(
                "dealias fraction must lie in (0, 1], got {dealias_fraction}"
            )));
        }
        Ok(Self { n, period, dealias_fraction })
    }

    /// `2*pi`-periodic grid with the default dealias fraction.
    pub fn square(n: usize) -> Result<Self> {
        Self::new(n, std::f64::consts::TAU, Self::DEFAULT_DEALIAS)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn dealias_fraction(&self) -> f64 {
        self.dealias_fraction
    }

    /// Number of samples (and of spectral coefficients).
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.period / self.n as f64
    }

    /// Quadrature weight of one sample in the integral convention.
    pub fn quad_weight(&self) -> f64 {
        let h = self.spacing();
        h * h
    }

    /// Sample coordinates of the `(i, j)` grid point.
    pub fn point(&self, i: usize, j: usize) -> (f64, f64) {
        let h = self.spacing();
        (i as f64 * h, j as f64 * h)
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n + j
    }

    /// Integer mode for an FFT index, wrapped to `[-n/2, n/2)`.
    pub fn mode(&self, idx: usize) -> i64 {
        debug_assert!(idx < self.n);
        if idx < self.n / 2 {
            idx as i64
        } else {
            idx as i64 - self.n as i64
        }
    }

    /// Physical wavenumber `2*pi*m / period` for an FFT index.
    pub fn wavenumber(&self, idx: usize) -> f64 {
        std::f64::consts::TAU * self.mode(idx) as f64 / self.period
    }

    /// Wavenumber used by odd multipliers (derivatives, Riesz transforms).
    ///
    /// The Nyquist line `m = -n/2` has no conjugate partner, so an imaginary
    /// multiplier there would break Hermitian symmetry; it is mapped to zero.
    pub fn wavenumber_deriv(&self, idx: usize) -> f64 {
        if idx == self.n / 2 {
            0.0
        } else {
            self.wavenumber(idx)
        }
    }

    /// Smallest nonzero wavenumber magnitude on the lattice.
    pub fn k_min(&self) -> f64 {
        std::f64::consts::TAU / self.period
    }

    /// Largest wavenumber magnitude on the lattice (corner of the mode square).
    pub fn k_max(&self) -> f64 {
        let half = self.n as f64 / 2.0;
        std::f64::consts::TAU / self.period * half * std::f64::consts::SQRT_2
    }

    /// Whether the integer mode pair survives the dealias mask
    /// (`|m_j| <= dealias_fraction * n/2` on both axes).
    pub fn dealias_keeps(&self, m1: i64, m2: i64) -> bool {
        let cutoff = self.dealias_fraction * self.n as f64 / 2.0;
        (m1.abs() as f64) <= cutoff && (m2.abs() as f64) <= cutoff
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid2D::new(7, 1.0, 0.5).is_err());
        assert!(Grid2D::new(12, 1.0, 0.5).is_err());
        assert!(Grid2D::new(4, 1.0, 0.5).is_err());
        assert!(Grid2D::new(16, 0.0, 0.5).is_err());
        assert!(Grid2D::new(16, -1.0, 0.5).is_err());
        assert!(Grid2D::new(16, 1.0, 0.0).is_err());
        assert!(Grid2D::new(16, 1.0, 1.5).is_err());
        assert!(Grid2D::new(16, 1.0, 1.0).is_ok());
    }

    #[test]
    fn mode_wrapping_covers_half_open_range() {
        let g = Grid2D::square(16).unwrap();
        let modes: Vec<i64> = (0..16).map(|i| g.mode(i)).collect();
        assert_eq!(modes[0], 0);
        assert_eq!(modes[7], 7);
        assert_eq!(modes[8], -8);
        assert_eq!(modes[15], -1);
        let min = *modes.iter().min().unwrap();
        let max = *modes.iter().max().unwrap();
        assert_eq!((min, max), (-8, 7));
    }

    #[test]
    fn wavenumbers_scale_with_period() {
        let g = Grid2D::new(16, std::f64::consts::TAU, 0.5).unwrap();
        assert!((g.wavenumber(1) - 1.0).abs() < 1e-15);
        assert!((g.wavenumber(15) + 1.0).abs() < 1e-15);
        let g2 = Grid2D::new(16, std::f64::consts::PI, 0.5).unwrap();
        assert!((g2.wavenumber(1) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn nyquist_deriv_wavenumber_is_zero() {
        let g = Grid2D::square(16).unwrap();
        assert_eq!(g.wavenumber_deriv(8), 0.0);
        assert_eq!(g.wavenumber_deriv(3), g.wavenumber(3));
    }

    #[test]
    fn dealias_two_thirds_cutoff() {
        let g = Grid2D::square(128).unwrap();
        // 2/3 * 64 = 42.67: modes up to 42 survive, 43 and the Nyquist do not.
        assert!(g.dealias_keeps(42, 0));
        assert!(!g.dealias_keeps(43, 0));
        assert!(!g.dealias_keeps(0, -64));
        assert!(g.dealias_keeps(-42, 42));
    }
}
