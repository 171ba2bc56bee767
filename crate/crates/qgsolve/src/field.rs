//! Real-space and spectral fields plus the transform pair between them.
//!
//! Fourier coefficients follow the integral convention on the torus:
//! `F(f)(k) = integral of f(x) exp(-i k.x) dx`, approximated by the DFT times
//! the quadrature weight `(period/n)^2`. The constant field 1 therefore has
//! coefficient `period^2` at mode `(0,0)` and zero elsewhere, and the inverse
//! transform divides by `period^2`.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::Grid2D;

/// Conjugate-symmetry gate for [`transform_inverse`]: coefficient sets whose
/// absolute Hermitian defect exceeds this are rejected as having no real
/// preimage. The tolerance is in integral-convention coefficient units and is
/// sized for the order-unity fields this crate works with (roundoff dust from
/// chained transforms stays far below it, while a genuinely asymmetric
/// multiplier shows up at full field scale).
pub const HERMITIAN_TOL: f64 = 1e-10;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft(n, direction))
}

fn transpose_square(data: &mut [Complex<f64>], n: usize) {
    for i in 0..n {
        for j in 0..i {
            data.swap(i * n + j, j * n + i);
        }
    }
}

/// Unnormalized 2D FFT, rows then columns, in place.
fn fft2_inplace(data: &mut [Complex<f64>], n: usize, direction: FftDirection) {
    let fft = plan(n, direction);
    let mut scratch = vec![Complex::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for row in data.chunks_exact_mut(n) {
        fft.process_with_scratch(row, &mut scratch);
    }
    transpose_square(data, n);
    for row in data.chunks_exact_mut(n) {
        fft.process_with_scratch(row, &mut scratch);
    }
    transpose_square(data, n);
}

/// Real scalar field sampled on a [`Grid2D`], row-major, first index along x1.
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: Grid2D,
    samples: Vec<f64>,
}

impl RealField {
    pub fn zeros(grid: Grid2D) -> Self {
        Self { grid, samples: vec![0.0; grid.len()] }
    }

    pub fn from_samples(grid: Grid2D, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} samples, got {}",
                grid.len(),
                samples.len()
            )));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::NonFinite(format!("sample {i} is {}", samples[i])));
        }
        Ok(Self { grid, samples })
    }

    /// Sample a closure at the grid points.
    pub fn from_fn(grid: Grid2D, f: impl Fn(f64, f64) -> f64) -> Self {
        let n = grid.n();
        let mut samples = Vec::with_capacity(grid.len());
        for i in 0..n {
            for j in 0..n {
                let (x1, x2) = grid.point(i, j);
                samples.push(f(x1, x2));
            }
        }
        assert!(
            samples.iter().all(|s| s.is_finite()),
            "sampled closure produced a non-finite value"
        );
        Self { grid, samples }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [f64] {
        &mut self.samples
    }

    pub fn linf(&self) -> f64 {
        self.samples.iter().fold(0.0, |acc, s| acc.max(s.abs()))
    }

    pub fn l2(&self) -> f64 {
        let sum: f64 = self.samples.iter().map(|s| s * s).sum();
        (sum * self.grid.quad_weight()).sqrt()
    }

    /// `L^r` norm in the integral convention; `r` may be `f64::INFINITY`.
    pub fn lp(&self, r: f64) -> Result<f64> {
        if r.is_nan() || r < 1.0 {
            return Err(Error::InvalidParameter(format!(
                "Lebesgue exponent must satisfy r >= 1, got {r}"
            )));
        }
        if r.is_infinite() {
            return Ok(self.linf());
        }
        if r == 2.0 {
            return Ok(self.l2());
        }
        let sum: f64 = self.samples.iter().map(|s| s.abs().powf(r)).sum();
        Ok((sum * self.grid.quad_weight()).powf(1.0 / r))
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid,
            samples: self.samples.iter().map(|s| c * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .samples
            .iter()
            .zip(&other.samples)
            .fold(0.0, |acc, (a, b)| acc.max((a - b).abs())))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            grid: self.grid,
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        })
    }
}

/// Fourier coefficients of a (nominally real) field, same row-major layout as
/// the sample array, index `(i, j)` holding mode `(m1, m2) = (wrap(i), wrap(j))`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid2D,
    coeffs: Vec<Complex<f64>>,
}

impl SpectralField {
    pub fn zeros(grid: Grid2D) -> Self {
        Self { grid, coeffs: vec![Complex::new(0.0, 0.0); grid.len()] }
    }

    pub fn from_coeffs(grid: Grid2D, coeffs: Vec<Complex<f64>>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} coefficients, got {}",
                grid.len(),
                coeffs.len()
            )));
        }
        if let Some(i) = coeffs.iter().position(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite(format!("coefficient {i} is {}", coeffs[i])));
        }
        Ok(Self { grid, coeffs })
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex<f64>] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex<f64>] {
        &mut self.coeffs
    }

    /// Coefficient of the `(0,0)` mode; `/ period^2` gives the field mean.
    pub fn zero_mode(&self) -> Complex<f64> {
        self.coeffs[0]
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |acc, c| acc.max(c.norm()))
    }

    /// Largest absolute deviation from conjugate symmetry
    /// `c(-m) = conj(c(m))`, in coefficient (integral-convention) units.
    ///
    /// The measure is deliberately not normalized by the field's own size:
    /// operators like dyadic ring filters or `div(R_perp(.))` legitimately
    /// produce coefficient sets that are pure transform roundoff, and those
    /// are asymmetric at their own (tiny) scale while being perfectly valid
    /// results.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.grid.n();
        let mut max_def: f64 = 0.0;
        for i in 0..n {
            let ip = (n - i) % n;
            for j in 0..n {
                let jp = (n - j) % n;
                let c = self.coeffs[i * n + j];
                let cp = self.coeffs[ip * n + jp];
                max_def = max_def.max((c - cp.conj()).norm());
            }
        }
        max_def
    }

    /// Apply a mode-indexed multiplier, producing a new coefficient set.
    pub fn map_modes(&self, f: impl Fn(i64, i64, Complex<f64>) -> Complex<f64>) -> Self {
        let n = self.grid.n();
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for i in 0..n {
            let m1 = self.grid.mode(i);
            for j in 0..n {
                let m2 = self.grid.mode(j);
                coeffs.push(f(m1, m2, self.coeffs[i * n + j]));
            }
        }
        Self { grid: self.grid, coeffs }
    }

    /// Zero every mode outside the grid's dealias mask.
    pub fn dealias_in_place(&mut self) {
        let n = self.grid.n();
        for i in 0..n {
            let m1 = self.grid.mode(i);
            for j in 0..n {
                let m2 = self.grid.mode(j);
                if !self.grid.dealias_keeps(m1, m2) {
                    self.coeffs[i * n + j] = Complex::new(0.0, 0.0);
                }
            }
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid,
            coeffs: self.coeffs.iter().map(|z| z * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            grid: self.grid,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            grid: self.grid,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        })
    }
}

/// Forward transform: samples to integral-convention Fourier coefficients.
pub fn transform_forward(f: &RealField) -> Result<SpectralField> {
    if let Some(i) = f.samples().iter().position(|s| !s.is_finite()) {
        return Err(Error::NonFinite(format!(
            "sample {i} is {} in forward transform",
            f.samples()[i]
        )));
    }
    let n = f.grid().n();
    let mut buf: Vec<Complex<f64>> =
        f.samples().iter().map(|&s| Complex::new(s, 0.0)).collect();
    fft2_inplace(&mut buf, n, FftDirection::Forward);
    let w = f.grid().quad_weight();
    for c in &mut buf {
        *c *= w;
    }
    Ok(SpectralField { grid: *f.grid(), coeffs: buf })
}

/// Inverse transform back to real samples.
///
/// Rejects coefficient sets whose Hermitian defect exceeds [`HERMITIAN_TOL`];
/// within that gate the imaginary residue is negligible and is discarded.
pub fn transform_inverse(f: &SpectralField) -> Result<RealField> {
    let defect = f.hermitian_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::HermitianViolation { defect });
    }
    let n = f.grid().n();
    let mut buf = f.coeffs().to_vec();
    fft2_inplace(&mut buf, n, FftDirection::Inverse);
    let scale = 1.0 / (f.grid().period() * f.grid().period());
    let samples: Vec<f64> = buf.iter().map(|c| c.re * scale).collect();
    if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
        return Err(Error::NonFinite(format!("inverse transform sample {i}")));
    }
    Ok(RealField { grid: *f.grid(), samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::random_bandlimited;

    const TAU: f64 = std::f64::consts::TAU;

    #[test]
    fn constant_field_transforms_to_single_coefficient() {
        let grid = Grid2D::square(32).unwrap();
        let one = RealField::from_fn(grid, |_, _| 1.0);
        let hat = transform_forward(&one).unwrap();
        let l2 = TAU * TAU;
        assert!((hat.zero_mode().re - l2).abs() < 1e-10 * l2, "mode (0,0) = period^2");
        assert!(hat.zero_mode().im.abs() < 1e-10 * l2);
        let rest = hat
            .coeffs()
            .iter()
            .skip(1)
            .fold(0.0f64, |acc, c| acc.max(c.norm()));
        assert!(rest < 1e-12 * l2, "all other modes vanish, max {rest:e}");
    }

    #[test]
    fn cosine_transforms_to_conjugate_pair() {
        let grid = Grid2D::square(32).unwrap();
        let f = RealField::from_fn(grid, |x1, _| x1.cos());
        let hat = transform_forward(&f).unwrap();
        let expect = TAU * TAU / 2.0;
        let n = grid.n();
        // mode (1, 0) sits at index (1, 0); mode (-1, 0) at (n-1, 0).
        let plus = hat.coeffs()[n];
        let minus = hat.coeffs()[(n - 1) * n];
        assert!((plus.re - expect).abs() < 1e-10 * expect);
        assert!(plus.im.abs() < 1e-10 * expect);
        assert!((minus.re - expect).abs() < 1e-10 * expect);
    }

    #[test]
    fn roundtrip_is_identity_on_random_fields() {
        let grid = Grid2D::square(64).unwrap();
        for seed in [1u64, 2, 3] {
            let f = random_bandlimited(grid, seed, 1, 20, 1.0).unwrap();
            let back = transform_inverse(&transform_forward(&f).unwrap()).unwrap();
            let err = f.max_abs_diff(&back).unwrap();
            assert!(err < 1e-12 * f.linf(), "roundtrip defect {err:e}");
        }
    }

    #[test]
    fn inverse_rejects_asymmetric_coefficients() {
        let grid = Grid2D::square(16).unwrap();
        let mut hat = SpectralField::zeros(grid);
        // A lone mode at (1, 0) with no conjugate partner is not a real field.
        hat.coeffs_mut()[16] = Complex::new(1.0, 0.5);
        match transform_inverse(&hat) {
            Err(Error::HermitianViolation { defect }) => assert!(defect > 1e-10),
            other => panic!("expected Hermitian rejection, got {other:?}"),
        }
    }

    #[test]
    fn forward_rejects_non_finite_samples() {
        let grid = Grid2D::square(16).unwrap();
        let mut f = RealField::zeros(grid);
        f.samples_mut()[5] = f64::NAN;
        assert!(matches!(transform_forward(&f), Err(Error::NonFinite(_))));
        assert!(matches!(
            RealField::from_samples(grid, vec![f64::INFINITY; grid.len()]),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn lp_norms_match_closed_forms() {
        let grid = Grid2D::square(64).unwrap();
        let f = RealField::from_fn(grid, |x1, _| x1.cos());
        // ||cos x1||_L2 over [0, 2pi)^2 = pi * sqrt(2).
        let expect = std::f64::consts::PI * std::f64::consts::SQRT_2;
        assert!((f.l2() - expect).abs() < 1e-12 * expect);
        assert!((f.lp(2.0).unwrap() - expect).abs() < 1e-12 * expect);
        assert!((f.linf() - 1.0).abs() < 1e-12);
        assert!((f.lp(f64::INFINITY).unwrap() - 1.0).abs() < 1e-12);
        // ||cos||_L1 = 4 * 2pi (per axis: integral of |cos| = 4).
        let l1 = f.lp(1.0).unwrap();
        assert!((l1 - 4.0 * TAU).abs() < 1e-3 * l1);
        assert!(f.lp(0.5).is_err());
    }

    #[test]
    fn mean_matches_zero_mode() {
        let grid = Grid2D::square(32).unwrap();
        let f = RealField::from_fn(grid, |x1, x2| 0.25 + x1.cos() * x2.sin());
        let hat = transform_forward(&f).unwrap();
        let mean_from_mode = hat.zero_mode().re / (TAU * TAU);
        assert!((f.mean() - 0.25).abs() < 1e-12);
        assert!((mean_from_mode - 0.25).abs() < 1e-12);
    }

    #[test]
    fn forward_of_real_field_is_hermitian() {
        let grid = Grid2D::square(64).unwrap();
        let f = random_bandlimited(grid, 9, 1, 25, 1.0).unwrap();
        let hat = transform_forward(&f).unwrap();
        assert!(hat.hermitian_defect() < 1e-13);
    }
}
