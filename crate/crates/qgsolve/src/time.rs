//! Time grids, solution trajectories, and time-weighted norms.

use crate::error::{Error, Result};
use crate::field::{transform_forward, transform_inverse, RealField};
use crate::grid::Grid2D;
use crate::ops::{riesz_linf_sum, semigroup_apply};
use crate::params::SolverConfig;

/// Nodes `t_m = T (m/M)^gamma`, `m = 0..=M`. `gamma > 1` clusters nodes near
/// `t = 0`, where mild-solution integrands are least regular.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    horizon: f64,
    gamma: f64,
    nodes: Vec<f64>,
}

impl TimeGrid {
    pub fn graded(horizon: f64, m: usize, gamma: f64) -> Result<Self> {
        if !horizon.is_finite() || horizon <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "horizon must be positive, got {horizon}"
            )));
        }
        if m < 1 {
            return Err(Error::InvalidParameter("time grid needs at least one step".into()));
        }
        if !gamma.is_finite() || gamma < 1.0 {
            return Err(Error::InvalidParameter(format!(
                "grading exponent must satisfy gamma >= 1, got {gamma}"
            )));
        }
        let nodes = (0..=m)
            .map(|i| {
                if gamma == 1.0 {
                    horizon * i as f64 / m as f64
                } else {
                    horizon * (i as f64 / m as f64).powf(gamma)
                }
            })
            .collect();
        Ok(Self { horizon, gamma, nodes })
    }

    pub fn uniform(horizon: f64, m: usize) -> Result<Self> {
        Self::graded(horizon, m, 1.0)
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// A field-valued function of time: strictly increasing times starting at
/// `t >= 0`, one field per node, all on a shared grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    times: Vec<f64>,
    fields: Vec<RealField>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, fields: Vec<RealField>) -> Result<Self> {
        if times.is_empty() || times.len() != fields.len() {
            return Err(Error::TimeMismatch(format!(
                "{} times vs {} fields",
                times.len(),
                fields.len()
            )));
        }
        if times[0] < 0.0 || times.iter().any(|t| !t.is_finite()) {
            return Err(Error::TimeMismatch("times must be finite and start at t >= 0".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::TimeMismatch("times must be strictly increasing".into()));
        }
        let grid = *fields[0].grid();
        if fields.iter().any(|f| *f.grid() != grid) {
            return Err(Error::GridMismatch);
        }
        Ok(Self { times, fields })
    }

    /// Free (semigroup) evolution of `theta0` sampled at the given times.
    pub fn semigroup(theta0: &RealField, alpha: f64, times: &[f64]) -> Result<Self> {
        let hat = transform_forward(theta0)?;
        let mut fields = Vec::with_capacity(times.len());
        for &t in times {
            fields.push(transform_inverse(&semigroup_apply(&hat, alpha, t)?)?);
        }
        Self::new(times.to_vec(), fields)
    }

    pub fn zero(grid: Grid2D, times: &[f64]) -> Result<Self> {
        Self::new(times.to_vec(), times.iter().map(|_| RealField::zeros(grid)).collect())
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn fields(&self) -> &[RealField] {
        &self.fields
    }

    pub fn field(&self, m: usize) -> &RealField {
        &self.fields[m]
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn grid(&self) -> &Grid2D {
        self.fields[0].grid()
    }

    pub fn last_time(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn last_field(&self) -> &RealField {
        self.fields.last().unwrap()
    }

    /// Node-wise sum of two trajectories on identical time grids.
    pub fn zip_add(&self, other: &Trajectory) -> Result<Trajectory> {
        self.zip_with(other, RealField::add)
    }

    /// Node-wise difference of two trajectories on identical time grids.
    pub fn zip_sub(&self, other: &Trajectory) -> Result<Trajectory> {
        self.zip_with(other, RealField::sub)
    }

    fn zip_with(
        &self,
        other: &Trajectory,
        op: fn(&RealField, &RealField) -> Result<RealField>,
    ) -> Result<Trajectory> {
        if self.times.len() != other.times.len() {
            return Err(Error::TimeMismatch(format!(
                "{} vs {} nodes",
                self.times.len(),
                other.times.len()
            )));
        }
        let tol = 1e-12 * self.last_time().max(1.0);
        for (a, b) in self.times.iter().zip(&other.times) {
            if (a - b).abs() > tol {
                return Err(Error::TimeMismatch(format!("node times differ: {a} vs {b}")));
            }
        }
        let fields = self
            .fields
            .iter()
            .zip(&other.fields)
            .map(|(a, b)| op(a, b))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.times.clone(), fields)
    }

    /// Whether the node times agree with `tg` to within a relative slack.
    pub fn matches_grid(&self, tg: &TimeGrid) -> bool {
        if self.times.len() != tg.len() {
            return false;
        }
        let tol = 1e-12 * tg.horizon().max(1.0);
        self.times
            .iter()
            .zip(tg.nodes())
            .all(|(a, b)| (a - b).abs() <= tol)
    }
}

/// Base spatial norm entering a time-weighted trajectory norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaseNorm {
    /// Plain `L^p` norm of the field.
    Lp(f64),
    /// `L^p` norm of the field plus both components of its Riesz velocity.
    LpRiesz(f64),
}

impl BaseNorm {
    fn eval(&self, f: &RealField) -> Result<f64> {
        match self {
            BaseNorm::Lp(p) => f.lp(*p),
            BaseNorm::LpRiesz(p) => {
                if p.is_infinite() {
                    Ok(f.linf() + riesz_linf_sum(f)?)
                } else {
                    let (u1, u2) = crate::ops::riesz_perp_fields(f)?;
                    Ok(f.lp(*p)? + u1.lp(*p)? + u2.lp(*p)?)
                }
            }
        }
    }
}

/// Recipe for `sup_{0 < t <= horizon} t^mu * base(f(t))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedNormSpec {
    pub mu: f64,
    pub horizon: f64,
    pub base: BaseNorm,
}

/// Discrete weighted sup norm over the trajectory nodes; the node `t = 0`
/// (where the weight vanishes or blows up) is excluded.
pub fn weighted_sup_norm(traj: &Trajectory, spec: &WeightedNormSpec) -> Result<f64> {
    if !spec.mu.is_finite() || !spec.horizon.is_finite() || spec.horizon <= 0.0 {
        return Err(Error::InvalidParameter("weighted norm needs finite mu and positive horizon".into()));
    }
    let tol = 1e-12 * spec.horizon.max(1.0);
    if traj.last_time() > spec.horizon + tol {
        return Err(Error::TimeMismatch(format!(
            "trajectory extends to t = {} beyond horizon {}",
            traj.last_time(),
            spec.horizon
        )));
    }
    let mut sup = 0.0f64;
    for (t, f) in traj.times().iter().zip(traj.fields()) {
        if *t <= 0.0 {
            continue;
        }
        sup = sup.max(t.powf(spec.mu) * spec.base.eval(f)?);
    }
    Ok(sup)
}

/// The mild-solution norm `sup_t t^nu (||v||_inf + ||R_perp v||_inf)` over the
/// trajectory's own time span.
pub fn etnu_norm(traj: &Trajectory, cfg: &SolverConfig) -> Result<f64> {
    let spec = WeightedNormSpec {
        mu: cfg.nu(),
        horizon: traj.last_time().max(f64::MIN_POSITIVE),
        base: BaseNorm::LpRiesz(f64::INFINITY),
    };
    weighted_sup_norm(traj, &spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_nodes_cluster_at_origin() {
        let tg = TimeGrid::graded(1.0, 4, 2.0).unwrap();
        assert_eq!(tg.nodes()[0], 0.0);
        assert_eq!(tg.nodes()[4], 1.0);
        assert!((tg.nodes()[1] - 1.0 / 16.0).abs() < 1e-15);
        assert!((tg.nodes()[2] - 0.25).abs() < 1e-15);
        assert!(tg.nodes().windows(2).all(|w| w[1] > w[0]));

        let uni = TimeGrid::uniform(2.0, 4).unwrap();
        assert_eq!(uni.nodes(), &[0.0, 0.5, 1.0, 1.5, 2.0]);
    }

    #[test]
    fn time_grid_validation() {
        assert!(TimeGrid::graded(0.0, 4, 2.0).is_err());
        assert!(TimeGrid::graded(1.0, 0, 2.0).is_err());
        assert!(TimeGrid::graded(1.0, 4, 0.5).is_err());
        assert!(TimeGrid::graded(-1.0, 4, 1.0).is_err());
    }

    #[test]
    fn trajectory_validation() {
        let grid = Grid2D::square(16).unwrap();
        let f = RealField::zeros(grid);
        assert!(Trajectory::new(vec![0.0, 1.0], vec![f.clone(), f.clone()]).is_ok());
        assert!(Trajectory::new(vec![0.0, 0.0], vec![f.clone(), f.clone()]).is_err());
        assert!(Trajectory::new(vec![1.0, 0.5], vec![f.clone(), f.clone()]).is_err());
        assert!(Trajectory::new(vec![-0.1, 0.5], vec![f.clone(), f.clone()]).is_err());
        assert!(Trajectory::new(vec![0.0], vec![]).is_err());
        let g2 = Grid2D::square(32).unwrap();
        assert!(Trajectory::new(vec![0.0, 1.0], vec![f, RealField::zeros(g2)]).is_err());
    }

    #[test]
    fn weighted_norm_of_constant_unit_field() {
        let grid = Grid2D::square(16).unwrap();
        let one = RealField::from_fn(grid, |_, _| 1.0);
        let times: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let fields = times.iter().map(|_| one.clone()).collect();
        let traj = Trajectory::new(times, fields).unwrap();
        // Riesz of a constant vanishes, so the base norm is 1 at each node
        // and the sup of t^mu over (0, 1] is 1 for mu > 0.
        let cfg = SolverConfig::new(0.75).unwrap();
        let v = etnu_norm(&traj, &cfg).unwrap();
        assert!((v - 1.0).abs() < 1e-14);

        // mu = 0 gives the plain sup in time.
        let spec = WeightedNormSpec { mu: 0.0, horizon: 1.0, base: BaseNorm::Lp(f64::INFINITY) };
        assert!((weighted_sup_norm(&traj, &spec).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn weight_cancels_prescribed_blowup() {
        let grid = Grid2D::square(16).unwrap();
        let base = RealField::from_fn(grid, |x1, _| x1.cos());
        let cfg = SolverConfig::new(0.75).unwrap();
        let nu = cfg.nu();
        let times: Vec<f64> = (1..=8).map(|i| i as f64 / 8.0).collect();
        let fields: Vec<RealField> = times.iter().map(|t| base.scaled(t.powf(-nu))).collect();
        let traj = Trajectory::new(times, fields).unwrap();
        // Fields grow like t^-nu; the weight exactly cancels the growth, and
        // cos contributes 1 + 1 through its Riesz velocity (0, sin).
        let v = etnu_norm(&traj, &cfg).unwrap();
        assert!((v - 2.0).abs() < 1e-12, "got {v}");
    }

    #[test]
    fn etnu_of_semigroup_cosine_matches_closed_form() {
        let grid = Grid2D::square(32).unwrap();
        let cfg = SolverConfig::new(0.75).unwrap();
        let f = RealField::from_fn(grid, |x1, _| x1.cos());
        let tg = TimeGrid::graded(1.0, 32, 2.0).unwrap();
        let traj = Trajectory::semigroup(&f, cfg.alpha(), tg.nodes()).unwrap();
        // Per node the value is t^(1/3) e^{-t} (1 + 1); compare directly.
        for (t, field) in traj.times().iter().zip(traj.fields()).skip(1) {
            let expect = (-t).exp();
            assert!((field.linf() - expect).abs() < 1e-12);
        }
        let v = etnu_norm(&traj, &cfg).unwrap();
        let peak = 2.0 * (1.0f64 / 3.0).powf(1.0 / 3.0) * (-1.0f64 / 3.0).exp();
        assert!(v < 2.0, "sup of 2 t^(1/3) e^-t stays below 2, got {v}");
        assert!(v <= peak + 1e-12 && v > 0.9 * peak, "got {v}, peak {peak}");
    }

    #[test]
    fn zero_trajectory_has_zero_norm() {
        let grid = Grid2D::square(16).unwrap();
        let traj = Trajectory::zero(grid, &[0.0, 0.5, 1.0]).unwrap();
        let cfg = SolverConfig::new(0.75).unwrap();
        assert_eq!(etnu_norm(&traj, &cfg).unwrap(), 0.0);
    }

    #[test]
    fn horizon_mismatch_is_rejected() {
        let grid = Grid2D::square(16).unwrap();
        let traj = Trajectory::zero(grid, &[0.0, 2.0]).unwrap();
        let spec = WeightedNormSpec { mu: 0.5, horizon: 1.0, base: BaseNorm::Lp(2.0) };
        assert!(weighted_sup_norm(&traj, &spec).is_err());
    }
}
