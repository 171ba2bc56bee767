//! Dissipation parameters and quantities derived from them.

use crate::error::{Error, Result};

/// Parameters of the dissipative equation
/// `d_t theta + (-Lap)^alpha theta + div(theta * u) = 0`, `u = R_perp(theta)`,
/// in the subcritical range `alpha` in `(1/2, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    alpha: f64,
    nu: f64,
    p_c: f64,
    s_c: f64,
}

impl SolverConfig {
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.5 || alpha >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in (1/2, 1), got {alpha}"
            )));
        }
        Ok(Self {
            alpha,
            nu: 1.0 - 1.0 / (2.0 * alpha),
            p_c: 2.0 / (2.0 * alpha - 1.0),
            s_c: 2.0 - 2.0 * alpha,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Time weight `nu = 1 - 1/(2 alpha)` of the mild-solution norm.
    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// Scaling-critical Lebesgue exponent `p_c = 2 / (2 alpha - 1)`.
    pub fn critical_p(&self) -> f64 {
        self.p_c
    }

    /// Critical Sobolev smoothness `s_c = 2 - 2 alpha`.
    pub fn critical_s(&self) -> f64 {
        self.s_c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_exponents_at_three_quarters() {
        let cfg = SolverConfig::new(0.75).unwrap();
        assert!((cfg.nu() - 1.0 / 3.0).abs() < 1e-15);
        assert!((cfg.critical_p() - 4.0).abs() < 1e-15);
        assert!((cfg.critical_s() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_out_of_range_alpha() {
        assert!(SolverConfig::new(0.5).is_err());
        assert!(SolverConfig::new(1.0).is_err());
        assert!(SolverConfig::new(0.3).is_err());
        assert!(SolverConfig::new(f64::NAN).is_err());
        assert!(SolverConfig::new(0.51).is_ok());
        assert!(SolverConfig::new(0.99).is_ok());
    }
}
