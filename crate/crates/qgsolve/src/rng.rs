//! Deterministic counter-based random numbers and seeded test fields.
//!
//! Reproducibility across runs, platforms and reimplementations matters more
//! here than statistical sophistication, so the generator is fully specified:
//!
//! * `raw(seed, ctr)` = splitmix64 finalizer applied to
//!   `seed + (ctr + 1) * 0x9E37_79B9_7F4A_7C15` (wrapping u64 arithmetic);
//!   the finalizer is `z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27;
//!   z *= 0x94D049BB133111EB; z ^= z >> 31`.
//! * `uniform` maps the top 53 bits to `[0, 1)`: `(raw >> 11) * 2^-53`.
//!
//! Random fields are synthesized in spectral space with counters keyed to the
//! integer mode pair (not the lattice index), so a seed describes the same
//! band-limited function at every resolution that contains the band.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::field::{transform_inverse, RealField, SpectralField};
use crate::grid::Grid2D;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Stateless counter-based generator; every draw is addressed by an index.
#[derive(Debug, Clone, Copy)]
pub struct CounterRng {
    seed: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn raw(&self, counter: u64) -> u64 {
        let mut z = self
            .seed
            .wrapping_add(counter.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw in `[0, 1)` addressed by `counter`.
    pub fn uniform(&self, counter: u64) -> f64 {
        (self.raw(counter) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw in `[-1, 1)`.
    pub fn symmetric(&self, counter: u64) -> f64 {
        2.0 * self.uniform(counter) - 1.0
    }
}

/// Counter assigned to an integer mode pair, valid for `|m| <= 2047`.
fn mode_counter(m1: i64, m2: i64) -> u64 {
    debug_assert!(m1.abs() <= 2047 && m2.abs() <= 2047);
    ((m1 + 2048) as u64) * 4096 + (m2 + 2048) as u64
}

/// Spectral synthesis shared by the random-field constructors.
///
/// `profile` maps the mode magnitude `|m|` to a coefficient amplitude. The
/// raw coefficients are Hermitian-symmetrized so the inverse transform is a
/// real, mean-free field; the result is then rescaled to the requested
/// sup-norm `amplitude` (measured on the grid).
fn synthesize(
    grid: Grid2D,
    seed: u64,
    k_min: usize,
    k_max: usize,
    amplitude: f64,
    profile: impl Fn(f64) -> f64,
) -> Result<RealField> {
    if k_min < 1 || k_min > k_max {
        return Err(Error::InvalidParameter(format!(
            "mode band [{k_min}, {k_max}] must satisfy 1 <= k_min <= k_max"
        )));
    }
    if k_max as f64 >= grid.n() as f64 / 2.0 {
        return Err(Error::InvalidParameter(format!(
            "k_max = {k_max} does not fit below the Nyquist mode of n = {}",
            grid.n()
        )));
    }
    if !amplitude.is_finite() || amplitude < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "amplitude must be finite and >= 0, got {amplitude}"
        )));
    }

    let rng = CounterRng::new(seed);
    let n = grid.n();
    let mut hat = SpectralField::zeros(grid);
    let lo = k_min as f64;
    let hi = k_max as f64;
    for i in 0..n {
        let m1 = grid.mode(i);
        for j in 0..n {
            let m2 = grid.mode(j);
            let mag = ((m1 * m1 + m2 * m2) as f64).sqrt();
            if mag < lo || mag > hi {
                continue;
            }
            let ctr = 2 * mode_counter(m1, m2);
            let c = Complex::new(rng.symmetric(ctr), rng.symmetric(ctr + 1));
            hat.coeffs_mut()[i * n + j] = c * profile(mag);
        }
    }

    // Hermitian projection: average each mode with the conjugate of its partner.
    let raw = hat.coeffs().to_vec();
    for i in 0..n {
        let ip = (n - i) % n;
        for j in 0..n {
            let jp = (n - j) % n;
            hat.coeffs_mut()[i * n + j] = 0.5 * (raw[i * n + j] + raw[ip * n + jp].conj());
        }
    }

    let field = transform_inverse(&hat)?;
    let sup = field.linf();
    if sup == 0.0 || amplitude == 0.0 {
        return Ok(RealField::zeros(grid));
    }
    Ok(field.scaled(amplitude / sup))
}

/// Real mean-free field with random coefficients of uniform magnitude on the
/// mode band `k_min <= |m| <= k_max`, normalized so the sup norm equals
/// `amplitude` exactly.
pub fn random_bandlimited(
    grid: Grid2D,
    seed: u64,
    k_min: usize,
    k_max: usize,
    amplitude: f64,
) -> Result<RealField> {
    synthesize(grid, seed, k_min, k_max, amplitude, |_| 1.0)
}

/// Band-limited field with a power-law coefficient profile `|m|^-gamma`,
/// used to emulate rough data with a prescribed dyadic-block slope.
pub fn random_power_law(
    grid: Grid2D,
    seed: u64,
    k_min: usize,
    k_max: usize,
    gamma: f64,
    amplitude: f64,
) -> Result<RealField> {
    if !gamma.is_finite() {
        return Err(Error::InvalidParameter("power-law exponent must be finite".into()));
    }
    synthesize(grid, seed, k_min, k_max, amplitude, |mag| mag.powf(-gamma))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::transform_forward;

    #[test]
    fn raw_stream_is_frozen() {
        // First values of the documented stream for seed 42; these pin the
        // generator so any refactor that changes output is caught.
        let rng = CounterRng::new(42);
        let expect: [u64; 4] = [
            rng.raw(0), rng.raw(1), rng.raw(2), rng.raw(3),
        ];
        // Recompute by hand from the definition.
        fn splitmix(mut z: u64) -> u64 {
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
            z ^ (z >> 31)
        }
        for (i, e) in expect.iter().enumerate() {
            let state = 42u64.wrapping_add(((i as u64) + 1).wrapping_mul(super::GOLDEN_GAMMA));
            assert_eq!(*e, splitmix(state));
        }
        // And determinism across instances.
        let rng2 = CounterRng::new(42);
        assert_eq!(rng.raw(17), rng2.raw(17));
        assert!(rng.uniform(5) < 1.0 && rng.uniform(5) >= 0.0);
    }

    #[test]
    fn bandlimited_field_has_requested_support_and_amplitude() {
        let grid = Grid2D::square(64).unwrap();
        let f = random_bandlimited(grid, 7, 3, 9, 0.5).unwrap();
        assert!((f.linf() - 0.5).abs() < 1e-14);
        assert!(f.mean().abs() < 1e-14);
        let hat = transform_forward(&f).unwrap();
        let n = grid.n();
        let scale = hat.max_abs();
        for i in 0..n {
            for j in 0..n {
                let (m1, m2) = (grid.mode(i), grid.mode(j));
                let mag = ((m1 * m1 + m2 * m2) as f64).sqrt();
                if !(3.0..=9.0).contains(&mag) {
                    assert!(
                        hat.coeffs()[i * n + j].norm() < 1e-12 * scale,
                        "mode ({m1},{m2}) outside band is nonzero"
                    );
                }
            }
        }
    }

    #[test]
    fn same_seed_same_spectrum_across_resolutions() {
        // Counters are keyed to modes, so the unnormalized spectra agree
        // between n = 64 and n = 128; only the sup-norm rescaling differs.
        let g64 = Grid2D::square(64).unwrap();
        let g128 = Grid2D::square(128).unwrap();
        let f64_ = random_bandlimited(g64, 11, 2, 10, 1.0).unwrap();
        let f128 = random_bandlimited(g128, 11, 2, 10, 1.0).unwrap();
        let h64 = transform_forward(&f64_).unwrap();
        let h128 = transform_forward(&f128).unwrap();
        // Compare a few modes after undoing the per-grid normalization.
        let probe = [(2i64, 1i64), (0, 5), (-3, 4), (7, -6)];
        let r = h64.coeffs()[g64.index(2, 1)].re / h128.coeffs()[g128.index(2, 1)].re;
        for (m1, m2) in probe {
            let i64_ = (m1.rem_euclid(64)) as usize;
            let j64 = (m2.rem_euclid(64)) as usize;
            let i128 = (m1.rem_euclid(128)) as usize;
            let j128 = (m2.rem_euclid(128)) as usize;
            let a = h64.coeffs()[g64.index(i64_, j64)];
            let b = h128.coeffs()[g128.index(i128, j128)];
            let d = (a - b * r).norm();
            assert!(d < 1e-10 * a.norm().max(1e-30), "mode ({m1},{m2}) differs: {d:e}");
        }
    }

    #[test]
    fn band_validation() {
        let grid = Grid2D::square(32).unwrap();
        assert!(random_bandlimited(grid, 1, 0, 4, 1.0).is_err());
        assert!(random_bandlimited(grid, 1, 5, 4, 1.0).is_err());
        assert!(random_bandlimited(grid, 1, 2, 16, 1.0).is_err());
        assert!(random_bandlimited(grid, 1, 2, 15, 1.0).is_ok());
        assert!(random_bandlimited(grid, 1, 2, 6, -1.0).is_err());
    }
}
