//! Fourier-multiplier operators: fractional dissipation, its semigroup, Riesz
//! transforms, divergence, the dealiased transport nonlinearity, and sampled
//! norms of the fractional heat kernel.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::field::{transform_forward, transform_inverse, RealField, SpectralField};
use crate::grid::Grid2D;

fn check_alpha(alpha: f64) -> Result<()> {
    if !alpha.is_finite() || alpha <= 0.0 || alpha > 1.0 {
        return Err(Error::InvalidParameter(format!(
            "dissipation order alpha must lie in (0, 1], got {alpha}"
        )));
    }
    Ok(())
}

/// `(-Lap)^alpha`: multiplier `|k|^(2 alpha)`, zero on the mean mode.
pub fn fractional_laplacian(f: &SpectralField, alpha: f64) -> Result<SpectralField> {
    check_alpha(alpha)?;
    let grid = *f.grid();
    let n = grid.n();
    let mut out = f.clone();
    for i in 0..n {
        let k1 = grid.wavenumber(i);
        for j in 0..n {
            let k2 = grid.wavenumber(j);
            let ksq = k1 * k1 + k2 * k2;
            out.coeffs_mut()[i * n + j] *= ksq.powf(alpha);
        }
    }
    Ok(out)
}

/// Semigroup `exp(-t (-Lap)^alpha)`; `t = 0` is the identity and the mean
/// mode is always preserved exactly.
pub fn semigroup_apply(f: &SpectralField, alpha: f64, t: f64) -> Result<SpectralField> {
    check_alpha(alpha)?;
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "semigroup time must satisfy t >= 0, got {t}"
        )));
    }
    let grid = *f.grid();
    let n = grid.n();
    let mut out = f.clone();
    for i in 0..n {
        let k1 = grid.wavenumber(i);
        for j in 0..n {
            let k2 = grid.wavenumber(j);
            let ksq = k1 * k1 + k2 * k2;
            out.coeffs_mut()[i * n + j] *= (-t * ksq.powf(alpha)).exp();
        }
    }
    Ok(out)
}

/// Riesz transforms `(R1 f, R2 f)` with multiplier `-i k_j / |k|`.
///
/// The mean mode maps to zero by convention, and the numerator uses the
/// derivative wavenumber so odd multipliers vanish on the Nyquist line.
pub fn riesz_transforms(f: &SpectralField) -> (SpectralField, SpectralField) {
    let grid = *f.grid();
    let n = grid.n();
    let mut r1 = f.clone();
    let mut r2 = f.clone();
    for i in 0..n {
        let k1 = grid.wavenumber(i);
        let kd1 = grid.wavenumber_deriv(i);
        for j in 0..n {
            let k2 = grid.wavenumber(j);
            let kd2 = grid.wavenumber_deriv(j);
            let idx = i * n + j;
            let norm = (k1 * k1 + k2 * k2).sqrt();
            if norm == 0.0 {
                r1.coeffs_mut()[idx] = Complex::new(0.0, 0.0);
                r2.coeffs_mut()[idx] = Complex::new(0.0, 0.0);
            } else {
                r1.coeffs_mut()[idx] *= Complex::new(0.0, -kd1 / norm);
                r2.coeffs_mut()[idx] *= Complex::new(0.0, -kd2 / norm);
            }
        }
    }
    (r1, r2)
}

/// Perpendicular Riesz velocity `u = (-R2 theta, R1 theta)`.
pub fn riesz_perp(f: &SpectralField) -> (SpectralField, SpectralField) {
    let (r1, r2) = riesz_transforms(f);
    (r2.scaled(-1.0), r1)
}

/// Real-space components of `R_perp(f)`.
pub fn riesz_perp_fields(f: &RealField) -> Result<(RealField, RealField)> {
    let hat = transform_forward(f)?;
    let (u1, u2) = riesz_perp(&hat);
    Ok((transform_inverse(&u1)?, transform_inverse(&u2)?))
}

/// Sup norm of `R_perp(f)` with the component-sum convention used throughout:
/// `||u1||_inf + ||u2||_inf`.
pub fn riesz_linf_sum(f: &RealField) -> Result<f64> {
    let (u1, u2) = riesz_perp_fields(f)?;
    Ok(u1.linf() + u2.linf())
}

/// Spectral divergence `i k1 fx + i k2 fy` (derivative wavenumbers).
pub fn divergence(fx: &SpectralField, fy: &SpectralField) -> Result<SpectralField> {
    if fx.grid() != fy.grid() {
        return Err(Error::GridMismatch);
    }
    let grid = *fx.grid();
    let n = grid.n();
    let mut out = SpectralField::zeros(grid);
    for i in 0..n {
        let kd1 = grid.wavenumber_deriv(i);
        for j in 0..n {
            let kd2 = grid.wavenumber_deriv(j);
            let idx = i * n + j;
            out.coeffs_mut()[idx] = Complex::new(0.0, kd1) * fx.coeffs()[idx]
                + Complex::new(0.0, kd2) * fy.coeffs()[idx];
        }
    }
    Ok(out)
}

/// Dealiased spectral flux `theta1 * R_perp(theta2)` evaluated pseudo-spectrally.
pub(crate) fn transport_flux(
    theta1_hat: &SpectralField,
    theta2_hat: &SpectralField,
) -> Result<(SpectralField, SpectralField)> {
    if theta1_hat.grid() != theta2_hat.grid() {
        return Err(Error::GridMismatch);
    }
    let theta1 = transform_inverse(theta1_hat)?;
    let (u1_hat, u2_hat) = riesz_perp(theta2_hat);
    let u1 = transform_inverse(&u1_hat)?;
    let u2 = transform_inverse(&u2_hat)?;
    let mut f1 = transform_forward(&theta1.mul(&u1)?)?;
    let mut f2 = transform_forward(&theta1.mul(&u2)?)?;
    f1.dealias_in_place();
    f2.dealias_in_place();
    Ok((f1, f2))
}

/// Transport nonlinearity `div(theta * R_perp(theta))`, dealiased.
pub fn nonlinear_term(theta: &RealField) -> Result<RealField> {
    let hat = transform_forward(theta)?;
    let (f1, f2) = transport_flux(&hat, &hat)?;
    let div = divergence(&f1, &f2)?;
    transform_inverse(&div)
}

/// Sampled fractional heat kernel `K_t` on the torus: the inverse transform of
/// the multiplier `exp(-t |k|^(2 alpha))` in the integral convention.
///
/// Resolution contract for quantitative use: the period should satisfy
/// `period >= 16 t^(1/(2 alpha))` so the kernel core is well separated from its
/// periodic images, and `n` should be large enough that
/// `exp(-t (pi n / period)^(2 alpha)) < 1e-12` so the spectrum is resolved.
pub fn kernel_field(alpha: f64, t: f64, grid: &Grid2D) -> Result<RealField> {
    check_alpha(alpha)?;
    if !t.is_finite() || t <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "kernel time must satisfy t > 0, got {t}"
        )));
    }
    let n = grid.n();
    let mut hat = SpectralField::zeros(*grid);
    for i in 0..n {
        let k1 = grid.wavenumber(i);
        for j in 0..n {
            let k2 = grid.wavenumber(j);
            let ksq = k1 * k1 + k2 * k2;
            hat.coeffs_mut()[i * n + j] = Complex::new((-t * ksq.powf(alpha)).exp(), 0.0);
        }
    }
    transform_inverse(&hat)
}

/// `L^r` norm of the sampled kernel; `r` in `[1, inf]`.
pub fn kernel_norm(alpha: f64, t: f64, r: f64, grid: &Grid2D) -> Result<f64> {
    kernel_field(alpha, t, grid)?.lp(r)
}

/// Smallest grid satisfying the kernel resolution contract for all times in
/// `[t_min, t_max]` (used by the scaling probes).
pub fn kernel_resolution_grid(alpha: f64, t_min: f64, t_max: f64) -> Result<Grid2D> {
    check_alpha(alpha)?;
    if !(t_min > 0.0 && t_max >= t_min) {
        return Err(Error::InvalidParameter(
            "kernel time window must satisfy 0 < t_min <= t_max".into(),
        ));
    }
    let period = (16.0 * t_max.powf(1.0 / (2.0 * alpha))).max(8.0);
    let mut n = 64usize;
    while (-t_min * (std::f64::consts::PI * n as f64 / period).powf(2.0 * alpha)).exp() >= 1e-12 {
        n *= 2;
        if n > 1 << 14 {
            return Err(Error::InvalidParameter(format!(
                "kernel window [{t_min}, {t_max}] needs n > 16384 to resolve"
            )));
        }
    }
    Grid2D::new(n, period, Grid2D::DEFAULT_DEALIAS)
}
