//! Littlewood-Paley decomposition and Besov-type norms on the torus.
//!
//! The dyadic cutoff is built from `h(r) = 1` for `r <= 1`, `0` for `r >= 2`
//! and `h(r) = w(2-r) / (w(2-r) + w(r-1))` in between, with `w(x) = exp(-1/x)`.
//! The ring multiplier is `psi(xi) = h(|xi|) - h(2|xi|)`, supported on
//! `1/2 <= |xi| <= 2`, and the low-pass is `phi(xi) = h(2|xi|)`. Block `j`
//! applies `psi(xi / 2^j)`; by telescoping,
//! `phi(xi) + sum_{j >= 0} psi(xi / 2^j) = 1` exactly at every lattice mode,
//! and the homogeneous sum over the resolved range of `j` is exactly 1 at
//! every nonzero mode.

use crate::error::{Error, Result};
use crate::field::{transform_forward, transform_inverse, RealField, SpectralField};
use crate::grid::Grid2D;
use crate::ops::{riesz_perp, semigroup_apply};
use crate::params::SolverConfig;

/// The smooth dyadic cutoff `h`: identically 1 below 1, identically 0 above 2.
pub fn smooth_cutoff(r: f64) -> f64 {
    if r <= 1.0 {
        1.0
    } else if r >= 2.0 {
        0.0
    } else {
        let wa = bump(2.0 - r);
        let wb = bump(r - 1.0);
        wa / (wa + wb)
    }
}

fn bump(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// Precomputed ring and low-pass multipliers for one grid.
#[derive(Debug, Clone)]
pub struct FilterBank {
    grid: Grid2D,
    j_min: i32,
    j_max: i32,
    /// `psi[(j - j_min) as usize]` holds the ring multiplier of block `j`.
    psi: Vec<Vec<f64>>,
    phi: Vec<f64>,
}

impl FilterBank {
    /// Resolve every lattice annulus: `j_min = floor(log2 k_min)` down-adjusted
    /// and `j_max = ceil(log2 k_max)` up-adjusted until the telescoping sum is
    /// exactly one on all nonzero modes.
    pub fn new(grid: &Grid2D) -> Self {
        let k_min = grid.k_min();
        let k_max = grid.k_max();
        let mut j_min = k_min.log2().floor() as i32;
        while (j_min as f64).exp2() > k_min {
            j_min -= 1;
        }
        let mut j_max = k_max.log2().ceil() as i32;
        while k_max / (j_max as f64).exp2() > 1.0 {
            j_max += 1;
        }

        let n = grid.n();
        let mut mags = vec![0.0f64; grid.len()];
        for i in 0..n {
            let k1 = grid.wavenumber(i);
            for j in 0..n {
                let k2 = grid.wavenumber(j);
                mags[i * n + j] = (k1 * k1 + k2 * k2).sqrt();
            }
        }

        let psi = (j_min..=j_max)
            .map(|jj| {
                let scale = (jj as f64).exp2();
                let prev = ((jj - 1) as f64).exp2();
                mags.iter()
                    .map(|&m| smooth_cutoff(m / scale) - smooth_cutoff(m / prev))
                    .collect()
            })
            .collect();
        let phi = mags.iter().map(|&m| smooth_cutoff(2.0 * m)).collect();

        Self { grid: *grid, j_min, j_max, psi, phi }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn j_min(&self) -> i32 {
        self.j_min
    }

    pub fn j_max(&self) -> i32 {
        self.j_max
    }

    pub fn psi_multiplier(&self, j: i32) -> Result<&[f64]> {
        if j < self.j_min || j > self.j_max {
            return Err(Error::InvalidParameter(format!(
                "block index {j} outside resolved range [{}, {}]",
                self.j_min, self.j_max
            )));
        }
        Ok(&self.psi[(j - self.j_min) as usize])
    }

    pub fn phi_multiplier(&self) -> &[f64] {
        &self.phi
    }

    /// Largest deviation of `phi + sum_{j >= 0} psi_j` from 1 over all modes.
    pub fn partition_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for idx in 0..self.grid.len() {
            let mut s = self.phi[idx];
            for j in 0.max(self.j_min)..=self.j_max {
                s += self.psi[(j - self.j_min) as usize][idx];
            }
            worst = worst.max((s - 1.0).abs());
        }
        worst
    }

    /// Largest deviation of the homogeneous sum from 1 over nonzero modes
    /// (index 0 is the zero mode in row-major layout).
    pub fn homogeneous_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for idx in 1..self.grid.len() {
            let s: f64 = self.psi.iter().map(|b| b[idx]).sum();
            worst = worst.max((s - 1.0).abs());
        }
        worst
    }

    fn apply_multiplier(&self, hat: &SpectralField, mult: &[f64]) -> SpectralField {
        let mut out = hat.clone();
        for (c, &m) in out.coeffs_mut().iter_mut().zip(mult) {
            *c *= m;
        }
        out
    }

    pub(crate) fn block_spectral(&self, hat: &SpectralField, j: i32) -> Result<SpectralField> {
        Ok(self.apply_multiplier(hat, self.psi_multiplier(j)?))
    }

    pub(crate) fn low_pass_spectral(&self, hat: &SpectralField) -> SpectralField {
        self.apply_multiplier(hat, &self.phi)
    }
}

/// Dyadic block `Delta_j f` in real space.
pub fn lp_block(f: &RealField, bank: &FilterBank, j: i32) -> Result<RealField> {
    if f.grid() != bank.grid() {
        return Err(Error::GridMismatch);
    }
    let hat = transform_forward(f)?;
    transform_inverse(&bank.block_spectral(&hat, j)?)
}

/// Low-pass part `S_0 f` in real space.
pub fn low_pass(f: &RealField, bank: &FilterBank) -> Result<RealField> {
    if f.grid() != bank.grid() {
        return Err(Error::GridMismatch);
    }
    let hat = transform_forward(f)?;
    transform_inverse(&bank.low_pass_spectral(&hat))
}

/// A Besov norm request `B_p^{s,q}`, homogeneous or inhomogeneous.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesovSpec {
    pub s: f64,
    pub p: f64,
    pub q: f64,
    pub homogeneous: bool,
}

impl BesovSpec {
    pub fn new(s: f64, p: f64, q: f64, homogeneous: bool) -> Result<Self> {
        if !s.is_finite() {
            return Err(Error::InvalidParameter("Besov smoothness must be finite".into()));
        }
        for (name, v) in [("p", p), ("q", q)] {
            if v.is_nan() || v < 1.0 {
                return Err(Error::InvalidParameter(format!(
                    "Besov exponent {name} must satisfy {name} >= 1, got {v}"
                )));
            }
        }
        Ok(Self { s, p, q, homogeneous })
    }

    pub fn label(&self) -> String {
        let fmt = |v: f64| {
            if v.is_infinite() {
                "inf".to_string()
            } else {
                format!("{v}")
            }
        };
        format!(
            "{}B[s={},p={},q={}]",
            if self.homogeneous { "hom-" } else { "" },
            self.s,
            fmt(self.p),
            fmt(self.q)
        )
    }
}

fn lq_sum(terms: impl Iterator<Item = f64>, q: f64) -> f64 {
    if q.is_infinite() {
        terms.fold(0.0, f64::max)
    } else {
        terms.map(|t| t.powf(q)).sum::<f64>().powf(1.0 / q)
    }
}

fn besov_norm_spectral(hat: &SpectralField, spec: &BesovSpec, bank: &FilterBank) -> Result<f64> {
    let weighted = |j: i32| -> Result<f64> {
        let block = transform_inverse(&bank.block_spectral(hat, j)?)?;
        Ok((spec.s * j as f64).exp2() * block.lp(spec.p)?)
    };
    if spec.homogeneous {
        let mut terms = Vec::new();
        for j in bank.j_min()..=bank.j_max() {
            terms.push(weighted(j)?);
        }
        Ok(lq_sum(terms.into_iter(), spec.q))
    } else {
        // Low-pass plus the dyadic sum over j >= 0, which together resolve
        // every mode: phi + sum_{j >= 0} psi_j = 1.
        let s0 = transform_inverse(&bank.low_pass_spectral(hat))?.lp(spec.p)?;
        let mut terms = Vec::new();
        for j in 0.max(bank.j_min())..=bank.j_max() {
            terms.push(weighted(j)?);
        }
        Ok(s0 + lq_sum(terms.into_iter(), spec.q))
    }
}

/// Besov norm of a field via the filter bank.
pub fn besov_norm(f: &RealField, spec: &BesovSpec, bank: &FilterBank) -> Result<f64> {
    BesovSpec::new(spec.s, spec.p, spec.q, spec.homogeneous)?;
    if f.grid() != bank.grid() {
        return Err(Error::GridMismatch);
    }
    besov_norm_spectral(&transform_forward(f)?, spec, bank)
}

/// The adapted norm `||f||_{B_inf^{1-2alpha, inf}} + ||R_perp f||` with the
/// Riesz part summed over components, all inhomogeneous.
pub fn btilde_norm(f: &RealField, cfg: &SolverConfig, bank: &FilterBank) -> Result<f64> {
    if f.grid() != bank.grid() {
        return Err(Error::GridMismatch);
    }
    let spec = BesovSpec::new(1.0 - 2.0 * cfg.alpha(), f64::INFINITY, f64::INFINITY, false)?;
    let hat = transform_forward(f)?;
    let (u1, u2) = riesz_perp(&hat);
    Ok(besov_norm_spectral(&hat, &spec, bank)?
        + besov_norm_spectral(&u1, &spec, bank)?
        + besov_norm_spectral(&u2, &spec, bank)?)
}

/// Semigroup characterization of negative-regularity Besov norms:
/// `sup_t t^(-s/(2 alpha)) ||exp(-t(-Lap)^alpha) f||_p` over the given times.
/// Returns the sup and the full `(t, value)` series.
pub fn semigroup_characterization(
    f: &RealField,
    s: f64,
    p: f64,
    cfg: &SolverConfig,
    t_nodes: &[f64],
) -> Result<(f64, Vec<(f64, f64)>)> {
    if s >= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "semigroup characterization requires s < 0, got {s}"
        )));
    }
    if t_nodes.is_empty() {
        return Err(Error::InvalidParameter("characterization needs at least one time".into()));
    }
    if t_nodes.iter().any(|&t| !t.is_finite() || t <= 0.0) {
        return Err(Error::InvalidParameter("characterization times must be positive".into()));
    }
    let hat = transform_forward(f)?;
    let expo = -s / (2.0 * cfg.alpha());
    let mut series = Vec::with_capacity(t_nodes.len());
    let mut sup = 0.0f64;
    for &t in t_nodes {
        let evolved = transform_inverse(&semigroup_apply(&hat, cfg.alpha(), t)?)?;
        let v = t.powf(expo) * evolved.lp(p)?;
        sup = sup.max(v);
        series.push((t, v));
    }
    Ok((sup, series))
}
