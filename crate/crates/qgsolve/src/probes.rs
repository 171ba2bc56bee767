//! Empirical probes for the quantitative estimates: maximum principle, Riesz
//! growth, singular Gronwall bounds, blow-up scaling, bilinear-operator
//! exponents, norm persistence, and fluctuation regularity.
//!
//! Probes measure; they do not silently repair. Each returns a [`ProbeReport`]
//! carrying the measured value, the expectation (when one exists), and a
//! pass flag, so callers can aggregate or dump them as CSV.

use crate::besov::{besov_norm, lp_block, BesovSpec, FilterBank};
use crate::error::{Error, Result};
use crate::field::{transform_forward, transform_inverse, RealField};
use crate::mild::bilinear_b;
use crate::ops::{kernel_resolution_grid, riesz_linf_sum, semigroup_apply};
use crate::params::SolverConfig;
use crate::time::{TimeGrid, Trajectory};

/// Outcome of one probe: a measured quantity, the expectation it was checked
/// against (when the probe has pass/fail semantics), and a configuration echo
/// so reruns are reproducible from the report alone.
#[derive(Debug, Clone)]
pub struct ProbeReport {
    pub name: String,
    /// Expected value, for probes that verify a specific number.
    pub expected: Option<f64>,
    pub measured: f64,
    /// Relative tolerance on the deviation, when `expected` is set.
    pub tolerance: Option<f64>,
    /// Relative deviation from `expected`, when set.
    pub deviation: Option<f64>,
    pub pass: bool,
    pub config: String,
    pub notes: String,
}

impl ProbeReport {
    pub fn summary_line(&self) -> String {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        let mut line = format!("{verdict} {}: measured {:.6e}", self.name, self.measured);
        if let Some(e) = self.expected {
            line.push_str(&format!(", expected {e:.6e}"));
        }
        if let (Some(d), Some(t)) = (self.deviation, self.tolerance) {
            line.push_str(&format!(" (deviation {:.2}% of tolerance {:.2}%)", d * 100.0, t * 100.0));
        }
        if !self.notes.is_empty() {
            line.push_str(" — ");
            line.push_str(&self.notes);
        }
        line
    }

    pub fn csv_header() -> &'static str {
        "name,expected,measured,tolerance,deviation,pass,config,notes"
    }

    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.12e}")).unwrap_or_default();
        format!(
            "{},{},{:.12e},{},{},{},{},{}",
            csv_quote(&self.name),
            opt(self.expected),
            self.measured,
            opt(self.tolerance),
            opt(self.deviation),
            self.pass,
            csv_quote(&self.config),
            csv_quote(&self.notes),
        )
    }
}

pub(crate) fn csv_quote(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Least-squares fit of `ln y` against `ln x`; returns `(slope, intercept)`.
pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::Probe("log-log fit needs at least two points".into()));
    }
    if xs.iter().chain(ys).any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::Probe("log-log fit needs positive finite data".into()));
    }
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Probe("log-log fit needs distinct abscissae".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Discrete maximum principle: the sup norm along the trajectory must never
/// exceed its initial value (slack `1e-6` overall) nor grow across a single
/// step by more than `1e-8` of the initial sup.
pub fn max_principle_report(traj: &Trajectory) -> ProbeReport {
    let sups: Vec<f64> = traj.fields().iter().map(RealField::linf).collect();
    let sup0 = sups[0];
    let global_ok = sups.iter().all(|&s| s <= sup0 * (1.0 + 1e-6));
    let step_slack = 1e-8 * sup0;
    let worst_step = sups
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    let step_ok = worst_step <= step_slack;
    ProbeReport {
        name: "max-principle".into(),
        expected: None,
        measured: worst_step,
        tolerance: None,
        deviation: None,
        pass: global_ok && step_ok,
        config: format!(
            "n={} T={:.4} nodes={}",
            traj.grid().n(),
            traj.last_time(),
            traj.len()
        ),
        notes: format!(
            "sup0={:.6e} sup_final={:.6e} worst step increase={:.3e} (slack {:.3e})",
            sup0,
            sups.last().unwrap(),
            worst_step,
            step_slack
        ),
    }
}

/// Exponential envelope of the Riesz-velocity sup norm: the smallest rate
/// `eta >= 0` with `r(t_m) <= 2 r(0) exp(eta t_m)` for all nodes. The bound is
/// existential, so the probe records the rate and only requires finiteness.
pub fn riesz_growth_report(traj: &Trajectory) -> Result<ProbeReport> {
    let mut rates = Vec::new();
    let r0 = riesz_linf_sum(traj.field(0))?;
    let config = format!("n={} T={:.4}", traj.grid().n(), traj.last_time());
    if r0 == 0.0 {
        return Ok(ProbeReport {
            name: "riesz-growth".into(),
            expected: None,
            measured: 0.0,
            tolerance: None,
            deviation: None,
            pass: true,
            config,
            notes: "skipped: initial Riesz velocity vanishes".into(),
        });
    }
    let mut r_final = r0;
    for (t, f) in traj.times().iter().zip(traj.fields()).skip(1) {
        let r = riesz_linf_sum(f)?;
        r_final = r;
        if *t > 0.0 {
            rates.push(((r / (2.0 * r0)).ln() / t).max(0.0));
        }
    }
    let eta = rates.iter().copied().fold(0.0f64, f64::max);
    Ok(ProbeReport {
        name: "riesz-growth".into(),
        expected: None,
        measured: eta,
        tolerance: None,
        deviation: None,
        pass: eta.is_finite(),
        config,
        notes: format!("r0={r0:.6e} r_final={r_final:.6e} fitted rate {eta:.6e}"),
    })
}

/// Check a sampled function against the singular Gronwall lemma: if it
/// satisfies the integral inequality (hypothesis, with quadrature slack) it
/// must also satisfy the closed bound `2 c1 exp(rho t)`. The probe fails only
/// on a counterexample to the implication.
pub fn gronwall_bound_report(
    params: &crate::gronwall::GronwallParams,
    times: &[f64],
    f_vals: &[f64],
) -> Result<ProbeReport> {
    if times.len() != f_vals.len() || times.len() < 2 {
        return Err(Error::Probe("Gronwall probe needs matching samples".into()));
    }
    let scale = f_vals.iter().fold(params.c1(), |a, &b| a.max(b.abs()));
    let slack = 1e-6 * scale;
    let mut hypothesis_ok = true;
    for m in 1..times.len() {
        let integral =
            crate::gronwall::weakly_singular_integral(f_vals, times, m, params.kappa())?;
        if f_vals[m] > params.c1() + params.c2() * integral + slack {
            hypothesis_ok = false;
            break;
        }
    }
    let mut worst_ratio = 0.0f64;
    for (t, v) in times.iter().zip(f_vals) {
        worst_ratio = worst_ratio.max(v / params.bound(*t));
    }
    let conclusion_ok = worst_ratio <= 1.0 + 1e-9;
    let pass = !hypothesis_ok || conclusion_ok;
    let notes = if hypothesis_ok {
        format!("hypothesis holds; worst f/bound ratio {worst_ratio:.6e}")
    } else {
        format!("hypothesis not satisfied; conclusion not asserted (worst ratio {worst_ratio:.6e})")
    };
    Ok(ProbeReport {
        name: "gronwall-bound".into(),
        expected: Some(1.0),
        measured: worst_ratio,
        tolerance: Some(1e-9),
        deviation: Some((worst_ratio - 1.0).max(0.0)),
        pass,
        config: format!(
            "c1={} c2={} kappa={} rho={:.6}",
            params.c1(),
            params.c2(),
            params.kappa(),
            params.rho()
        ),
        notes,
    })
}

/// Record `inf_m (Tstar - t_m)^nu (||theta||_inf + ||R_perp theta||_inf)` for a
/// hypothetical blow-up time beyond the trajectory. Solutions that actually
/// blow up at `Tstar` keep this bounded away from zero; smooth decaying runs
/// drive it toward zero. Record-only.
pub fn blowup_lower_bound_probe(
    traj: &Trajectory,
    cfg: &SolverConfig,
    t_star: f64,
) -> Result<ProbeReport> {
    if t_star <= traj.last_time() {
        return Err(Error::Probe(format!(
            "hypothetical blow-up time {t_star} must exceed the last node {}",
            traj.last_time()
        )));
    }
    let nu = cfg.nu();
    let mut inf = f64::INFINITY;
    let mut arg = 0.0;
    for (t, f) in traj.times().iter().zip(traj.fields()) {
        let v = (t_star - t).powf(nu) * (f.linf() + riesz_linf_sum(f)?);
        if v < inf {
            inf = v;
            arg = *t;
        }
    }
    Ok(ProbeReport {
        name: "blowup-lower-bound".into(),
        expected: None,
        measured: inf,
        tolerance: None,
        deviation: None,
        pass: inf.is_finite(),
        config: format!("Tstar={t_star} nu={nu:.6} n={}", traj.grid().n()),
        notes: format!("infimum attained at t={arg:.6}"),
    })
}

/// Scaling study of the bilinear operator on time-constant data: the measured
/// slope and per-horizon ratios for both exponent laws.
#[derive(Debug, Clone)]
pub struct BilinearScalingProbe {
    /// Slope check of `sup_t ||B[u,v]||_p / (||u||_p ||v||_p)` against
    /// `(1/alpha)(1/p_c - 1/p)`.
    pub sup_report: ProbeReport,
    /// Slope check of `sup_t ||B[u,v]||_{p_c}` against `1 - 1/(2 alpha)`,
    /// normalized by the bounded-density / critical-velocity norms.
    pub critical_report: ProbeReport,
    pub horizons: Vec<f64>,
    pub sup_ratios: Vec<f64>,
    pub critical_ratios: Vec<f64>,
}

/// Measure how the bilinear operator's size scales with the horizon `T` for
/// time-constant inputs, and compare the fitted slopes with the smoothing
/// exponents. `u0` sits in the transported-density slot, `v0` in the velocity
/// slot.
///
/// The T-slope that the ratio actually exhibits depends on the spectral
/// roughness of the inputs: the exponent laws are envelopes, attained when
/// the flux spectrum is a power law spanning the transition scales of every
/// horizon probed. Callers aiming for the sharp slopes should pass power-law
/// data (see `random_power_law`) and keep `T` inside the resolved window.
pub fn bilinear_estimate_probe(
    u0: &RealField,
    v0: &RealField,
    cfg: &SolverConfig,
    p: f64,
    horizons: &[f64],
    nodes_per_horizon: usize,
) -> Result<BilinearScalingProbe> {
    if p <= cfg.critical_p() {
        return Err(Error::InvalidParameter(format!(
            "probe exponent must exceed the critical one ({}), got {p}",
            cfg.critical_p()
        )));
    }
    if horizons.len() < 2 || horizons.windows(2).any(|w| w[1] <= w[0]) || horizons[0] <= 0.0 {
        return Err(Error::Probe("horizon list must be increasing and positive".into()));
    }
    if u0.grid() != v0.grid() {
        return Err(Error::GridMismatch);
    }
    let p_c = cfg.critical_p();
    let u_p = u0.lp(p)?;
    let v_p = v0.lp(p)?;
    let u_bounded = u0.linf() + riesz_linf_sum(u0)?;
    let v_pc = v0.lp(p_c)?;

    let mut sup_ratios = Vec::with_capacity(horizons.len());
    let mut critical_ratios = Vec::with_capacity(horizons.len());
    for &t_max in horizons {
        let tg = TimeGrid::uniform(t_max, nodes_per_horizon.max(1))?;
        let cu = Trajectory::new(tg.nodes().to_vec(), vec![u0.clone(); tg.len()])?;
        let cv = Trajectory::new(tg.nodes().to_vec(), vec![v0.clone(); tg.len()])?;
        let b = bilinear_b(&cu, &cv, cfg, &tg)?;
        let mut sup_p = 0.0f64;
        let mut sup_pc = 0.0f64;
        for f in b.fields().iter().skip(1) {
            sup_p = sup_p.max(f.lp(p)?);
            sup_pc = sup_pc.max(f.lp(p_c)?);
        }
        let denom = u_p * v_p;
        sup_ratios.push(if denom > 0.0 { sup_p / denom } else { 0.0 });
        let denom3 = u_bounded * v_pc;
        critical_ratios.push(if denom3 > 0.0 { sup_pc / denom3 } else { 0.0 });
    }

    let sigma = (1.0 / cfg.alpha()) * (1.0 / p_c - 1.0 / p);
    let sigma3 = 1.0 - 1.0 / (2.0 * cfg.alpha());
    let config = format!(
        "n={} p={} p_c={} T=[{:.6},{:.6}] nodes={}",
        u0.grid().n(),
        p,
        p_c,
        horizons[0],
        horizons[horizons.len() - 1],
        nodes_per_horizon
    );
    let make = |name: &str, expected: f64, ratios: &[f64]| -> Result<ProbeReport> {
        if ratios.iter().all(|&r| r == 0.0) {
            return Ok(ProbeReport {
                name: name.into(),
                expected: Some(expected),
                measured: 0.0,
                tolerance: Some(0.15),
                deviation: None,
                pass: true,
                config: config.clone(),
                notes: "operator output vanishes; slope undefined".into(),
            });
        }
        let (slope, _) = fit_loglog(horizons, ratios)?;
        let deviation = (slope - expected).abs() / expected.abs();
        Ok(ProbeReport {
            name: name.into(),
            expected: Some(expected),
            measured: slope,
            tolerance: Some(0.15),
            deviation: Some(deviation),
            pass: deviation <= 0.15,
            config: config.clone(),
            notes: format!("ratios {:?}", ratios.iter().map(|r| format!("{r:.4e}")).collect::<Vec<_>>()),
        })
    };
    Ok(BilinearScalingProbe {
        sup_report: make("bilinear-sup-exponent", sigma, &sup_ratios)?,
        critical_report: make("bilinear-critical-exponent", sigma3, &critical_ratios)?,
        horizons: horizons.to_vec(),
        sup_ratios,
        critical_ratios,
    })
}

/// A spatial norm tracked along a trajectory by [`persistence_tracker`].
#[derive(Debug, Clone, PartialEq)]
pub enum TrackedNorm {
    Lp(f64),
    Besov(BesovSpec),
    BTilde,
}

impl TrackedNorm {
    pub fn label(&self) -> String {
        match self {
            TrackedNorm::Lp(p) if p.is_infinite() => "Linf".into(),
            TrackedNorm::Lp(p) => format!("L{p}"),
            TrackedNorm::Besov(spec) => spec.label(),
            TrackedNorm::BTilde => "Btilde".into(),
        }
    }

    fn eval(&self, f: &RealField, cfg: &SolverConfig, bank: &FilterBank) -> Result<f64> {
        match self {
            TrackedNorm::Lp(p) => f.lp(*p),
            TrackedNorm::Besov(spec) => besov_norm(f, spec, bank),
            TrackedNorm::BTilde => crate::besov::btilde_norm(f, cfg, bank),
        }
    }
}

#[derive(Debug, Clone)]
pub struct NormSeries {
    pub label: String,
    pub values: Vec<f64>,
}

/// Output of [`persistence_tracker`]: the per-node norm series plus the
/// boundedness verdict.
#[derive(Debug, Clone)]
pub struct PersistenceReport {
    pub times: Vec<f64>,
    pub series: Vec<NormSeries>,
    pub ratio_ceiling: f64,
    /// Worst max-to-initial ratio across the tracked norms.
    pub max_ratio: f64,
    pub report: ProbeReport,
}

/// Track the requested norms along the trajectory and assert each stays
/// within `ratio_ceiling` times its initial value.
pub fn persistence_tracker(
    traj: &Trajectory,
    cfg: &SolverConfig,
    norms: &[TrackedNorm],
    bank: &FilterBank,
    ratio_ceiling: f64,
) -> Result<PersistenceReport> {
    if norms.is_empty() {
        return Err(Error::Probe("persistence tracker needs at least one norm".into()));
    }
    if bank.grid() != traj.grid() {
        return Err(Error::GridMismatch);
    }
    if !(ratio_ceiling >= 1.0) {
        return Err(Error::InvalidParameter("ratio ceiling must be at least 1".into()));
    }
    let mut series = Vec::with_capacity(norms.len());
    for norm in norms {
        let mut values = Vec::with_capacity(traj.len());
        for f in traj.fields() {
            values.push(norm.eval(f, cfg, bank)?);
        }
        series.push(NormSeries { label: norm.label(), values });
    }
    let mut max_ratio = 0.0f64;
    let mut details = Vec::new();
    for s in &series {
        let initial = s.values[0];
        let peak = s.values.iter().copied().fold(0.0, f64::max);
        let ratio = if initial > 0.0 {
            peak / initial
        } else if peak == 0.0 {
            1.0
        } else {
            f64::INFINITY
        };
        max_ratio = max_ratio.max(ratio);
        details.push(format!("{}:{:.4}", s.label, ratio));
    }
    let pass = max_ratio <= ratio_ceiling;
    Ok(PersistenceReport {
        times: traj.times().to_vec(),
        report: ProbeReport {
            name: "persistence".into(),
            expected: None,
            measured: max_ratio,
            tolerance: None,
            deviation: None,
            pass,
            config: format!(
                "n={} T={:.4} ceiling={}",
                traj.grid().n(),
                traj.last_time(),
                ratio_ceiling
            ),
            notes: format!("max/initial ratios: {}", details.join(" ")),
        },
        series,
        ratio_ceiling,
        max_ratio,
    })
}

/// Compare the dyadic-block decay of the fluctuation
/// `w(t) = theta(t) - e^{-t A} theta_0` against the free evolution itself.
/// The fluctuation is smoother, so over the blocks where dissipation has not
/// yet flattened everything (`t 4^(alpha j) <= 2`) its block norms must decay
/// at least as fast (fitted slope no larger than the tendency's plus slack).
pub fn fluctuation_regularity_probe(
    theta0: &RealField,
    traj: &Trajectory,
    cfg: &SolverConfig,
    bank: &FilterBank,
    p: f64,
    node: usize,
) -> Result<ProbeReport> {
    if node >= traj.len() || traj.times()[node] <= 0.0 {
        return Err(Error::Probe("fluctuation probe needs a node with t > 0".into()));
    }
    if theta0.grid() != traj.grid() || bank.grid() != traj.grid() {
        return Err(Error::GridMismatch);
    }
    let t = traj.times()[node];
    let tendency =
        transform_inverse(&semigroup_apply(&transform_forward(theta0)?, cfg.alpha(), t)?)?;
    let w = traj.field(node).sub(&tendency)?;
    let spec = BesovSpec::new(0.0, p, 1.0, true)?;
    let w_norm = besov_norm(&w, &spec, bank)?;
    let tendency_norm = besov_norm(&tendency, &spec, bank)?;
    let config = format!("n={} t={t:.4} p={p}", traj.grid().n());

    if w_norm <= 1e-12 * tendency_norm.max(1e-300) {
        return Ok(ProbeReport {
            name: "fluctuation-regularity".into(),
            expected: None,
            measured: 0.0,
            tolerance: None,
            deviation: None,
            pass: true,
            config,
            notes: format!("fluctuation vanishes to roundoff (block-sum norm {w_norm:.3e})"),
        });
    }

    // Per-block norms over the window where the initial spectrum, not the
    // dissipative cutoff, sets the decay.
    let mut xs = Vec::new();
    let mut bw = Vec::new();
    let mut bf = Vec::new();
    let floor_w = 1e-13 * w_norm;
    let floor_f = 1e-13 * tendency_norm;
    for j in 0.max(bank.j_min())..=bank.j_max() {
        if t * 4.0f64.powf(cfg.alpha() * j as f64) > 2.0 {
            break;
        }
        let wj = lp_block(&w, bank, j)?.lp(p)?;
        let fj = lp_block(&tendency, bank, j)?.lp(p)?;
        if wj > floor_w && fj > floor_f {
            xs.push((j as f64).exp2());
            bw.push(wj);
            bf.push(fj);
        }
    }
    if xs.len() < 3 {
        return Ok(ProbeReport {
            name: "fluctuation-regularity".into(),
            expected: None,
            measured: 0.0,
            tolerance: None,
            deviation: None,
            pass: true,
            config,
            notes: format!(
                "only {} usable blocks in the undissipated window; slope comparison skipped",
                xs.len()
            ),
        });
    }
    let (slope_w, _) = fit_loglog(&xs, &bw)?;
    let (slope_f, _) = fit_loglog(&xs, &bf)?;
    let excess = slope_w - slope_f;
    Ok(ProbeReport {
        name: "fluctuation-regularity".into(),
        expected: None,
        measured: excess,
        tolerance: None,
        deviation: None,
        pass: excess <= 0.25,
        config,
        notes: format!(
            "fluctuation block slope {slope_w:.3} vs tendency {slope_f:.3} over {} blocks; \
             block-sum norm {w_norm:.6e}",
            xs.len()
        ),
    })
}

/// Check a fixed-point iteration transcript against the abstract convergence
/// lemma: the difference recursion, summability of the differences, and the
/// exponential bound on the running sup of iterate norms.
///
/// `diffs[n] = ||x_{n+1} - x_n||`, `iterate_norms[n] = ||x_n||`, and
/// `sigma[n]` is the summable forcing sequence of the hypothesis
/// `diffs[n] <= sigma[n] (||x_n|| + ||x_{n-1}||) + lambda diffs[n-1]`.
pub fn convergence_diagnostic(
    diffs: &[f64],
    iterate_norms: &[f64],
    lambda: f64,
    sigma: &[f64],
) -> Result<ProbeReport> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(Error::InvalidParameter(format!(
            "contraction factor must lie in [0, 1), got {lambda}"
        )));
    }
    if diffs.is_empty() || iterate_norms.len() < diffs.len() || sigma.len() < diffs.len() {
        return Err(Error::Probe(
            "diagnostic needs diffs plus at least as many norms and sigmas".into(),
        ));
    }
    let scale = diffs
        .iter()
        .chain(iterate_norms)
        .fold(0.0f64, |a, &b| a.max(b));
    let slack = 1e-9 * scale;
    let mut hypothesis_ok = true;
    for n in 1..diffs.len() {
        let rhs = sigma[n] * (iterate_norms[n] + iterate_norms[n - 1]) + lambda * diffs[n - 1];
        if diffs[n] > rhs + slack {
            hypothesis_ok = false;
            break;
        }
    }

    let total: f64 = diffs.iter().sum();
    let stabilized = total == 0.0 || *diffs.last().unwrap() <= 1e-6 * total.max(diffs[0]);

    // pi_n = 2 sum_{j<=n} sigma_{n-j} lambda^j; the running sup of iterate
    // norms must stay below M_0 exp(sum pi).
    let mut bound_ok = true;
    let mut worst_ratio = 0.0f64;
    let m0 = iterate_norms[0];
    let mut pi_sum = 0.0;
    let mut running_max = m0;
    for n in 0..diffs.len() {
        let mut pi = 0.0;
        for j in 0..=n {
            pi += sigma[n - j] * lambda.powi(j as i32);
        }
        pi_sum += 2.0 * pi;
        running_max = running_max.max(iterate_norms[(n + 1).min(iterate_norms.len() - 1)]);
        let cap = m0 * pi_sum.exp();
        let ratio = if cap > 0.0 {
            running_max / cap
        } else if running_max == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        worst_ratio = worst_ratio.max(ratio);
        if ratio > 1.0 + 1e-9 {
            bound_ok = false;
        }
    }

    let pass = hypothesis_ok && stabilized && bound_ok;
    Ok(ProbeReport {
        name: "convergence-diagnostic".into(),
        expected: Some(1.0),
        measured: worst_ratio,
        tolerance: Some(1e-9),
        deviation: Some((worst_ratio - 1.0).max(0.0)),
        pass,
        config: format!("lambda={lambda} iterations={}", diffs.len()),
        notes: format!(
            "hypothesis={} partial sums stabilized={} exp-bound={} (sum diffs {:.6e})",
            hypothesis_ok, stabilized, bound_ok, total
        ),
    })
}

/// Fit the time-scaling of the sampled kernel's `L^r` norms for
/// `r in {1, 2, inf}` on a grid satisfying the resolution contract, and check
/// the kernel mass. Returns one report per exponent plus the mass report.
pub fn kernel_scaling_report(cfg: &SolverConfig, t_list: &[f64]) -> Result<Vec<ProbeReport>> {
    if t_list.len() < 2 || t_list.windows(2).any(|w| w[1] <= w[0]) || t_list[0] <= 0.0 {
        return Err(Error::Probe("kernel probe needs increasing positive times".into()));
    }
    let alpha = cfg.alpha();
    let grid = kernel_resolution_grid(alpha, t_list[0], *t_list.last().unwrap())?;
    let config = format!(
        "alpha={alpha} n={} period={:.3} t=[{},{}]",
        grid.n(),
        grid.period(),
        t_list[0],
        t_list[t_list.len() - 1]
    );
    // One kernel field per time, shared across the three exponents.
    let mut norms_by_r = [Vec::new(), Vec::new(), Vec::new()];
    for &t in t_list {
        let k = crate::ops::kernel_field(alpha, t, &grid)?;
        for (col, &r) in [1.0, 2.0, f64::INFINITY].iter().enumerate() {
            norms_by_r[col].push(k.lp(r)?);
        }
    }
    let mut reports = Vec::new();
    let masses = norms_by_r[0].clone();
    for (col, &r) in [1.0, 2.0, f64::INFINITY].iter().enumerate() {
        let (slope, _) = fit_loglog(t_list, &norms_by_r[col])?;
        let expected = (1.0 / alpha) * (1.0 / r - 1.0);
        // Relative deviation, except near the zero exponent where it is
        // absolute.
        let deviation = (slope - expected).abs() / expected.abs().max(1.0);
        let label = if r.is_infinite() { "inf".into() } else { format!("{r}") };
        reports.push(ProbeReport {
            name: format!("kernel-slope-r{label}"),
            expected: Some(expected),
            measured: slope,
            tolerance: Some(0.05),
            deviation: Some(deviation),
            pass: deviation <= 0.05,
            config: config.clone(),
            notes: String::new(),
        });
    }
    let worst_mass = masses
        .iter()
        .map(|m| (m - 1.0).abs())
        .fold(0.0f64, f64::max);
    reports.push(ProbeReport {
        name: "kernel-mass".into(),
        expected: Some(1.0),
        measured: masses.iter().copied().fold(0.0, f64::max),
        tolerance: Some(1e-3),
        deviation: Some(worst_mass),
        pass: worst_mass <= 1e-3,
        config,
        notes: "L1 norm at each probed time".into(),
    });
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid2D;
    use crate::mild::evolve_etd;

    fn decaying_cosine(n: usize, horizon: f64, m: usize) -> Trajectory {
        let grid = Grid2D::square(n).unwrap();
        let f = RealField::from_fn(grid, |x1, _| x1.cos());
        let times: Vec<f64> = (0..=m).map(|i| horizon * i as f64 / m as f64).collect();
        Trajectory::semigroup(&f, 0.75, &times).unwrap()
    }

    #[test]
    fn loglog_fit_recovers_power_laws() {
        let xs: [f64; 4] = [0.5, 1.0, 2.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|&x| 3.0 * x.powf(1.5)).collect();
        let (slope, intercept) = fit_loglog(&xs, &ys).unwrap();
        assert!((slope - 1.5).abs() < 1e-12);
        assert!((intercept - 3.0f64.ln()).abs() < 1e-12);
        assert!(fit_loglog(&[1.0], &[1.0]).is_err());
        assert!(fit_loglog(&[1.0, 2.0], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn max_principle_on_decaying_solution() {
        let traj = decaying_cosine(16, 1.0, 8);
        let rep = max_principle_report(&traj);
        assert!(rep.pass, "{}", rep.summary_line());
        assert!(rep.measured < 0.0, "sup should strictly decrease");
    }

    #[test]
    fn max_principle_on_zero_data() {
        let grid = Grid2D::square(16).unwrap();
        let traj = Trajectory::zero(grid, &[0.0, 0.5, 1.0]).unwrap();
        let rep = max_principle_report(&traj);
        assert!(rep.pass);
    }

    #[test]
    fn riesz_growth_pure_decay_has_zero_rate() {
        let traj = decaying_cosine(16, 1.0, 8);
        let rep = riesz_growth_report(&traj).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.measured, 0.0, "decaying run must not need growth");
    }

    #[test]
    fn riesz_growth_skips_on_zero_velocity() {
        let grid = Grid2D::square(16).unwrap();
        let one = RealField::from_fn(grid, |_, _| 2.0);
        let traj = Trajectory::new(vec![0.0, 1.0], vec![one.clone(), one]).unwrap();
        let rep = riesz_growth_report(&traj).unwrap();
        assert!(rep.pass && rep.notes.contains("skipped"));
    }

    #[test]
    fn gronwall_probe_constant_function() {
        let p = crate::gronwall::GronwallParams::new(1.0, 1.0, 0.5).unwrap();
        let times: Vec<f64> = (0..=20).map(|i| i as f64 * 0.05).collect();
        let f = vec![1.0; times.len()];
        let rep = gronwall_bound_report(&p, &times, &f).unwrap();
        assert!(rep.pass, "{}", rep.summary_line());
        assert!(rep.notes.contains("hypothesis holds"));
        // f = c1 sits at half the bound at t = 0 and far below later.
        assert!(rep.measured <= 0.5 + 1e-12);
    }

    #[test]
    fn gronwall_probe_flags_unverified_hypothesis() {
        let p = crate::gronwall::GronwallParams::new(1.0, 1.0, 0.5).unwrap();
        let times = vec![0.0, 0.5, 1.0];
        // Wildly growing samples violate the hypothesis; the probe must not
        // claim a counterexample.
        let f = vec![1.0, 1e9, 1e18];
        let rep = gronwall_bound_report(&p, &times, &f).unwrap();
        assert!(rep.pass);
        assert!(rep.notes.contains("hypothesis not satisfied"));
    }

    #[test]
    fn blowup_probe_records_decay() {
        let traj = decaying_cosine(16, 2.0, 10);
        let cfg = SolverConfig::new(0.75).unwrap();
        let rep = blowup_lower_bound_probe(&traj, &cfg, 2.5).unwrap();
        assert!(rep.pass);
        assert!(rep.measured > 0.0 && rep.measured < 2.0);
        assert!(blowup_lower_bound_probe(&traj, &cfg, 1.0).is_err());
    }

    #[test]
    fn blowup_probe_zero_data() {
        let grid = Grid2D::square(16).unwrap();
        let traj = Trajectory::zero(grid, &[0.0, 1.0]).unwrap();
        let cfg = SolverConfig::new(0.75).unwrap();
        let rep = blowup_lower_bound_probe(&traj, &cfg, 1.5).unwrap();
        assert_eq!(rep.measured, 0.0);
    }

    #[test]
    fn bilinear_probe_zero_input() {
        let grid = Grid2D::square(32).unwrap();
        let cfg = SolverConfig::new(0.75).unwrap();
        let zero = RealField::zeros(grid);
        let cosine = RealField::from_fn(grid, |x1, _| x1.cos());
        let probe =
            bilinear_estimate_probe(&zero, &cosine, &cfg, 8.0, &[0.25, 0.5], 2).unwrap();
        assert!(probe.sup_report.pass && probe.critical_report.pass);
        assert!(probe.sup_ratios.iter().all(|&r| r == 0.0));
    }

    #[test]
    fn bilinear_probe_runs_on_generic_data() {
        let grid = Grid2D::square(32).unwrap();
        let cfg = SolverConfig::new(0.75).unwrap();
        let u = crate::rng::random_bandlimited(grid, 2, 1, 6, 1.0).unwrap();
        let v = RealField::from_fn(grid, |x1, _| x1.cos());
        let probe =
            bilinear_estimate_probe(&u, &v, &cfg, 8.0, &[0.125, 0.25, 0.5], 4).unwrap();
        // Band-limited data does not saturate the envelope; just check the
        // measurement machinery: positive ratios, increasing in T, finite slope.
        assert!(probe.sup_ratios.iter().all(|&r| r > 0.0));
        assert!(probe.sup_ratios.windows(2).all(|w| w[1] >= w[0]));
        assert!(probe.sup_report.measured.is_finite());
        assert!(bilinear_estimate_probe(&u, &v, &cfg, 3.0, &[0.1, 0.2], 2).is_err());
    }

    #[test]
    fn persistence_of_decaying_solution() {
        let traj = decaying_cosine(32, 1.0, 6);
        let cfg = SolverConfig::new(0.75).unwrap();
        let bank = FilterBank::new(traj.grid());
        let norms = [
            TrackedNorm::Lp(2.0),
            TrackedNorm::Lp(f64::INFINITY),
            TrackedNorm::Besov(BesovSpec::new(0.5, 2.0, 2.0, true).unwrap()),
            TrackedNorm::BTilde,
        ];
        let rep = persistence_tracker(&traj, &cfg, &norms, &bank, 10.0).unwrap();
        assert!(rep.report.pass, "{}", rep.report.summary_line());
        assert!(rep.max_ratio <= 1.0 + 1e-12, "decay means ratio 1");
        for s in &rep.series {
            assert!(
                s.values.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)),
                "{} not nonincreasing",
                s.label
            );
        }
    }

    #[test]
    fn persistence_of_zero_field() {
        let grid = Grid2D::square(32).unwrap();
        let traj = Trajectory::zero(grid, &[0.0, 0.5, 1.0]).unwrap();
        let cfg = SolverConfig::new(0.75).unwrap();
        let bank = FilterBank::new(&grid);
        let rep =
            persistence_tracker(&traj, &cfg, &[TrackedNorm::Lp(2.0)], &bank, 10.0).unwrap();
        assert!(rep.report.pass);
        assert!(rep.series[0].values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn fluctuation_vanishes_for_one_dimensional_data() {
        // Data depending on x1 alone has velocity parallel to its level sets:
        // the nonlinearity vanishes and the solution is the free evolution.
        let grid = Grid2D::square(32).unwrap();
        let cfg = SolverConfig::new(0.75).unwrap();
        let theta0 = RealField::from_fn(grid, |x1, _| x1.cos() + 0.3 * (2.0 * x1).sin());
        let traj = evolve_etd(&theta0, &cfg, 1e-2, 20, 5).unwrap();
        let bank = FilterBank::new(&grid);
        let rep =
            fluctuation_regularity_probe(&theta0, &traj, &cfg, &bank, 4.0, traj.len() - 1)
                .unwrap();
        assert!(rep.pass, "{}", rep.summary_line());
        assert!(rep.notes.contains("vanishes"), "{}", rep.notes);
    }

    #[test]
    fn fluctuation_probe_rejects_t_zero() {
        let grid = Grid2D::square(32).unwrap();
        let cfg = SolverConfig::new(0.75).unwrap();
        let theta0 = RealField::zeros(grid);
        let traj = Trajectory::zero(grid, &[0.0, 0.5]).unwrap();
        let bank = FilterBank::new(&grid);
        assert!(fluctuation_regularity_probe(&theta0, &traj, &cfg, &bank, 4.0, 0).is_err());
    }

    #[test]
    fn convergence_diagnostic_geometric_sequence() {
        let n = 30usize;
        let diffs: Vec<f64> = (0..n).map(|i| 0.5f64.powi(i as i32)).collect();
        let norms = vec![1.0; n + 1];
        let sigma = vec![0.0; n];
        let rep = convergence_diagnostic(&diffs, &norms, 0.5, &sigma).unwrap();
        assert!(rep.pass, "{}", rep.summary_line());
        let total: f64 = diffs.iter().sum();
        assert!((total - 2.0 * diffs[0]).abs() < 1e-8);
    }

    #[test]
    fn convergence_diagnostic_summable_forcing_bound() {
        // sigma_n = 2^-n with lambda = 0 gives pi_n = 2 sigma_n and the
        // classic exp(4) cap on the norm growth.
        let n = 24;
        let sigma: Vec<f64> = (0..n).map(|i| 0.5f64.powi(i)).collect();
        let diffs: Vec<f64> = sigma.iter().map(|s| 2.0 * s).collect();
        // Norms growing exactly at the certified rate stay inside the bound.
        let mut norms = vec![1.0];
        let mut pi_sum = 0.0;
        for s in &sigma {
            pi_sum += 2.0 * s;
            norms.push(pi_sum.exp());
        }
        let rep = convergence_diagnostic(&diffs, &norms, 0.0, &sigma).unwrap();
        assert!(rep.notes.contains("exp-bound=true"), "{}", rep.notes);
        assert!((rep.measured - 1.0).abs() < 1e-9, "bound is tight: {}", rep.measured);

        // Norms jumping past exp(4) x M_0 (the full certified budget) must be
        // caught by the exponential bound.
        let mut bad = vec![1.0; (n + 1) as usize];
        for v in bad.iter_mut().skip(1) {
            *v = 60.0;
        }
        let rep = convergence_diagnostic(&diffs, &bad, 0.0, &sigma).unwrap();
        assert!(!rep.pass);
        assert!(rep.notes.contains("exp-bound=false"), "{}", rep.notes);
    }

    #[test]
    fn convergence_diagnostic_zero_diffs_and_bad_lambda() {
        let diffs = vec![0.0, 0.0, 0.0];
        let norms = vec![2.0; 4];
        let sigma = vec![0.0; 3];
        let rep = convergence_diagnostic(&diffs, &norms, 0.0, &sigma).unwrap();
        assert!(rep.pass);
        assert!(convergence_diagnostic(&diffs, &norms, 1.0, &sigma).is_err());
    }

    #[test]
    fn kernel_scaling_probe_small_window() {
        let cfg = SolverConfig::new(0.75).unwrap();
        let reports = kernel_scaling_report(&cfg, &[0.5, 1.0, 2.0]).unwrap();
        assert_eq!(reports.len(), 4);
        for rep in &reports {
            assert!(rep.pass, "{}", rep.summary_line());
        }
        // Slope identities at alpha = 3/4.
        assert!((reports[0].expected.unwrap() - 0.0).abs() < 1e-15);
        assert!((reports[1].expected.unwrap() + 2.0 / 3.0).abs() < 1e-15);
        assert!((reports[2].expected.unwrap() + 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn csv_rows_are_well_formed() {
        let rep = ProbeReport {
            name: "demo".into(),
            expected: Some(1.0),
            measured: 0.5,
            tolerance: Some(0.1),
            deviation: Some(0.5),
            pass: false,
            config: "n=16, mode=test".into(),
            notes: "contains \"quotes\"".into(),
        };
        let row = rep.csv_row();
        assert!(row.starts_with("demo,"));
        assert!(row.contains("\"n=16, mode=test\""));
        assert!(row.contains("\"contains \"\"quotes\"\"\""));
        assert_eq!(ProbeReport::csv_header().split(',').count(), 8);
    }
}
