//! Workflow driver tying configuration to the solver, probes and battery.
//!
//! Every workflow is deterministic: the same config produces byte-identical
//! CSV output on rerun. Norm histories go to `manifest.csv` (always the same
//! four columns) and `norms.csv` (the configured extra norms), probe results
//! to `probes.csv`, battery verdicts to `verify.csv`, and fields to
//! `snapshot_*.qgf`. Nothing is written unless an output directory is set;
//! the returned [`RunSummary`] carries the human-readable lines either way.

use std::fmt::Write as _;
use std::path::PathBuf;

use crate::battery::{bilinear_battery_reports, run_battery};
use crate::besov::FilterBank;
use crate::config::{InitSpec, RunConfig, KNOWN_PROBES};
use crate::error::{Error, Result};
use crate::field::RealField;
use crate::gronwall::{volterra_solve, GronwallParams};
use crate::mild::{calibrate_mu0, evolve_etd, picard_iterate, CalibrationRecord, CalibrationSetup};
use crate::ops::riesz_linf_sum;
use crate::probes::{
    blowup_lower_bound_probe, convergence_diagnostic, fluctuation_regularity_probe,
    gronwall_bound_report, kernel_scaling_report, max_principle_report, persistence_tracker,
    riesz_growth_report, ProbeReport, TrackedNorm,
};
use crate::snapshot::write_real;
use crate::time::Trajectory;

/// What to do with a [`RunConfig`].
#[derive(Debug, Clone, PartialEq)]
pub enum Workflow {
    /// Exponential time marching; writes the norm manifest and snapshots.
    Simulate,
    /// Fixed-point construction of the mild solution on the graded grid.
    Picard,
    /// A single named probe (see [`KNOWN_PROBES`]).
    Probe(String),
    /// The full acceptance battery.
    Verify,
    /// Amplitude calibration for the smallness threshold.
    CalibrateMu0,
}

impl Workflow {
    fn name(&self) -> String {
        match self {
            Workflow::Simulate => "simulate".into(),
            Workflow::Picard => "picard".into(),
            Workflow::Probe(p) => format!("probe {p}"),
            Workflow::Verify => "verify".into(),
            Workflow::CalibrateMu0 => "calibrate-mu0".into(),
        }
    }
}

/// Everything a front end needs to report a finished run.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub workflow: String,
    /// Human-readable result lines, one per printed row.
    pub lines: Vec<String>,
    /// Files written, in creation order (empty without an output directory).
    pub files: Vec<PathBuf>,
    /// False when a probe or battery criterion failed; simulation workflows
    /// that complete are always true.
    pub all_pass: bool,
}

fn stage<T>(name: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        already @ Error::Stage { .. } => already,
        other => Error::Stage { stage: name, source: Box::new(other) },
    })
}

/// Execute `workflow` under `cfg`.
pub fn run(cfg: &RunConfig, workflow: &Workflow) -> Result<RunSummary> {
    let mut out = Output::create(cfg)?;
    let mut summary = RunSummary {
        workflow: workflow.name(),
        lines: Vec::new(),
        files: Vec::new(),
        all_pass: true,
    };
    out.write("config.echo", &stage("config", cfg.echo())?, &mut summary)?;

    match workflow {
        Workflow::Simulate => simulate(cfg, &mut out, &mut summary)?,
        Workflow::Picard => picard(cfg, &mut out, &mut summary)?,
        Workflow::Probe(name) => probe(cfg, name, &mut out, &mut summary)?,
        Workflow::Verify => verify(&mut out, &mut summary)?,
        Workflow::CalibrateMu0 => calibrate(cfg, &mut out, &mut summary)?,
    }
    Ok(summary)
}

/// Lazily created output directory.
struct Output {
    dir: Option<PathBuf>,
}

impl Output {
    fn create(cfg: &RunConfig) -> Result<Self> {
        if let Some(dir) = &cfg.out_dir {
            std::fs::create_dir_all(dir)?;
        }
        Ok(Self { dir: cfg.out_dir.clone() })
    }

    fn write(&mut self, name: &str, contents: &str, summary: &mut RunSummary) -> Result<()> {
        if let Some(dir) = &self.dir {
            let path = dir.join(name);
            stage("output", std::fs::write(&path, contents).map_err(Error::from))?;
            summary.files.push(path);
        }
        Ok(())
    }

    fn write_snapshot(
        &mut self,
        step: usize,
        field: &RealField,
        summary: &mut RunSummary,
    ) -> Result<()> {
        if let Some(dir) = &self.dir {
            let path = dir.join(format!("snapshot_{step:06}.qgf"));
            stage("output", write_real(&path, field))?;
            summary.files.push(path);
        }
        Ok(())
    }
}

fn fmt(x: f64) -> String {
    format!("{x:.12e}")
}

/// The fixed norm columns tracked for every trajectory.
fn manifest_csv(traj: &Trajectory, step_of: impl Fn(usize) -> usize) -> Result<String> {
    let mut csv = String::from("step,time,linf,l2,riesz_linf,mean\n");
    for (idx, (t, f)) in traj.times().iter().zip(traj.fields()).enumerate() {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            step_of(idx),
            fmt(*t),
            fmt(f.linf()),
            fmt(f.l2()),
            fmt(riesz_linf_sum(f)?),
            fmt(f.mean()),
        );
    }
    Ok(csv)
}

/// The configured extra norms, one labelled column each.
fn norms_csv(traj: &Trajectory, cfg: &RunConfig, step_of: impl Fn(usize) -> usize) -> Result<String> {
    let bank = FilterBank::new(traj.grid());
    let solver = cfg.solver()?;
    let labels: Vec<String> = cfg.norms.iter().map(TrackedNorm::label).collect();
    let mut csv = format!("step,time,{}\n", labels.join(","));
    let series = persistence_tracker(traj, &solver, &cfg.norms, &bank, f64::INFINITY)?;
    for idx in 0..traj.len() {
        let values: Vec<String> =
            series.series.iter().map(|s| fmt(s.values[idx])).collect();
        let _ = writeln!(csv, "{},{},{}", step_of(idx), fmt(traj.times()[idx]), values.join(","));
    }
    Ok(csv)
}

fn reports_csv(reports: &[ProbeReport]) -> String {
    let mut csv = format!("{}\n", ProbeReport::csv_header());
    for r in reports {
        let _ = writeln!(csv, "{}", r.csv_row());
    }
    csv
}

/// Step count and the exact step size used by `simulate`; the two always
/// multiply back to the horizon so the final node lands on it.
fn stepping(cfg: &RunConfig) -> Result<(usize, f64)> {
    let steps = cfg.step_count()?;
    Ok((steps, cfg.horizon / steps as f64))
}

fn run_simulation(cfg: &RunConfig) -> Result<(Trajectory, usize)> {
    let theta0 = stage("init", cfg.initial_field())?;
    let solver = stage("config", cfg.solver())?;
    let (steps, dt) = stage("config", stepping(cfg))?;
    // Keep roughly 200 rows unless snapshots dictate their own cadence.
    let store = if cfg.snapshot_every > 0 {
        cfg.snapshot_every
    } else {
        (steps / 200).max(1)
    };
    let traj = stage("time-stepping", evolve_etd(&theta0, &solver, dt, steps, store))?;
    Ok((traj, store))
}

fn simulate(cfg: &RunConfig, out: &mut Output, summary: &mut RunSummary) -> Result<()> {
    let (traj, store) = run_simulation(cfg)?;
    let steps = cfg.step_count()?;
    let step_of = |idx: usize| (idx * store).min(steps);
    out.write("manifest.csv", &manifest_csv(&traj, step_of)?, summary)?;
    if !cfg.norms.is_empty() {
        out.write("norms.csv", &norms_csv(&traj, cfg, step_of)?, summary)?;
    }
    if cfg.snapshot_every > 0 {
        for (idx, f) in traj.fields().iter().enumerate() {
            out.write_snapshot(step_of(idx), f, summary)?;
        }
    }
    let last = traj.last_field();
    summary.lines.push(format!(
        "simulated {} steps to t = {}: |theta|_inf = {:.6e}, |theta|_2 = {:.6e}, mean = {:+.3e}",
        steps,
        fmt_time(traj.last_time()),
        last.linf(),
        last.l2(),
        last.mean(),
    ));
    Ok(())
}

fn fmt_time(t: f64) -> String {
    // Times in summaries are short and human-facing.
    format!("{t:.6}")
}

fn calibration_for(cfg: &RunConfig) -> Option<CalibrationRecord> {
    let reference = CalibrationRecord::reference();
    (cfg.alpha == reference.alpha).then_some(reference)
}

fn picard(cfg: &RunConfig, out: &mut Output, summary: &mut RunSummary) -> Result<()> {
    let theta0 = stage("init", cfg.initial_field())?;
    let solver = stage("config", cfg.solver())?;
    let tg = stage("config", cfg.time_grid())?;
    let calibration = calibration_for(cfg);
    let result = stage(
        "picard",
        picard_iterate(
            &theta0,
            &solver,
            &tg,
            cfg.picard_max_iter,
            cfg.picard_tol,
            calibration.as_ref(),
        ),
    )?;

    let mut csv = String::from("iteration,diff_norm,ratio\n");
    let ratios = result.contraction_ratios();
    for (i, d) in result.diff_norms.iter().enumerate() {
        let ratio = if i == 0 { String::new() } else { fmt(ratios[i - 1]) };
        let _ = writeln!(csv, "{},{},{ratio}", i + 1, fmt(*d));
    }
    out.write("picard.csv", &csv, summary)?;
    out.write("manifest.csv", &manifest_csv(&result.limit, |idx| idx)?, summary)?;
    if !cfg.norms.is_empty() {
        out.write("norms.csv", &norms_csv(&result.limit, cfg, |idx| idx)?, summary)?;
    }

    summary.all_pass = result.converged && !result.diverged;
    summary.lines.push(format!(
        "Picard {} after {} iterations; |phi0| = {:.6e}{}",
        if result.converged { "converged" } else { "did not converge" },
        result.iterations,
        result.phi0_norm,
        match result.mu0_margin {
            Some(m) => format!(", margin to calibrated threshold {m:+.6e}"),
            None => String::new(),
        },
    ));
    if let Some(last) = ratios.last() {
        summary.lines.push(format!("final contraction ratio {last:.4}"));
    }
    Ok(())
}

fn probe(cfg: &RunConfig, name: &str, out: &mut Output, summary: &mut RunSummary) -> Result<()> {
    if !KNOWN_PROBES.contains(&name) {
        return Err(Error::InvalidParameter(format!(
            "unknown probe '{name}'; expected one of {}",
            KNOWN_PROBES.join(", ")
        )));
    }
    let solver = stage("config", cfg.solver())?;
    let reports: Vec<ProbeReport> = match name {
        "kernel" => {
            let times: Vec<f64> = (0..7).map(|i| (-8.0 + i as f64).exp2()).collect();
            stage("probe", kernel_scaling_report(&solver, &times))?
        }
        "max-principle" => {
            let (traj, _) = run_simulation(cfg)?;
            vec![max_principle_report(&traj)]
        }
        "riesz-growth" => {
            let (traj, _) = run_simulation(cfg)?;
            vec![stage("probe", riesz_growth_report(&traj))?]
        }
        "gronwall" => {
            let params = stage("probe", GronwallParams::new(1.0, 1.0, 0.5))?;
            let tg = stage("config", cfg.time_grid())?;
            let f = stage("probe", volterra_solve(&params, tg.nodes()))?;
            vec![stage("probe", gronwall_bound_report(&params, tg.nodes(), &f))?]
        }
        "blowup" => {
            let (traj, _) = run_simulation(cfg)?;
            let t_star = cfg.probe_t_star.unwrap_or(2.0 * cfg.horizon);
            vec![stage("probe", blowup_lower_bound_probe(&traj, &solver, t_star))?]
        }
        "bilinear" => {
            let (sup, crit) = stage("probe", bilinear_battery_reports())?;
            vec![sup, crit]
        }
        "persistence" => {
            let (traj, _) = run_simulation(cfg)?;
            let bank = FilterBank::new(traj.grid());
            let rep = stage(
                "probe",
                persistence_tracker(&traj, &solver, &cfg.norms, &bank, cfg.probe_ceiling),
            )?;
            let mut csv = format!(
                "time,{}\n",
                rep.series.iter().map(|s| s.label.clone()).collect::<Vec<_>>().join(",")
            );
            for idx in 0..rep.times.len() {
                let values: Vec<String> =
                    rep.series.iter().map(|s| fmt(s.values[idx])).collect();
                let _ = writeln!(csv, "{},{}", fmt(rep.times[idx]), values.join(","));
            }
            out.write("persistence.csv", &csv, summary)?;
            vec![rep.report]
        }
        "fluctuation" => {
            let theta0 = stage("init", cfg.initial_field())?;
            let (traj, _) = run_simulation(cfg)?;
            let bank = FilterBank::new(traj.grid());
            // Probe the fluctuation mid-trajectory, away from both endpoints.
            let node = traj.len() / 2;
            vec![stage(
                "probe",
                fluctuation_regularity_probe(&theta0, &traj, &solver, &bank, cfg.probe_p, node),
            )?]
        }
        "convergence" => {
            let theta0 = stage("init", cfg.initial_field())?;
            let tg = stage("config", cfg.time_grid())?;
            let result = stage(
                "picard",
                picard_iterate(
                    &theta0,
                    &solver,
                    &tg,
                    cfg.picard_max_iter,
                    cfg.picard_tol,
                    calibration_for(cfg).as_ref(),
                ),
            )?;
            vec![stage(
                "probe",
                convergence_diagnostic(
                    &result.diff_norms,
                    &result.iterate_norms,
                    0.5,
                    &result.diff_norms,
                ),
            )?]
        }
        _ => unreachable!("validated above"),
    };

    out.write("probes.csv", &reports_csv(&reports), summary)?;
    summary.all_pass = reports.iter().all(|r| r.pass);
    for r in &reports {
        summary.lines.push(r.summary_line());
    }
    Ok(())
}

fn verify(out: &mut Output, summary: &mut RunSummary) -> Result<()> {
    let battery = run_battery();
    let mut csv = String::from("criterion,name,pass,summary\n");
    for c in &battery.criteria {
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            c.index,
            crate::probes::csv_quote(&c.name),
            c.pass,
            crate::probes::csv_quote(&c.summary),
        );
    }
    out.write("verify.csv", &csv, summary)?;
    summary.all_pass = battery.all_pass();
    summary.lines = battery.lines();
    summary
        .lines
        .push(format!("battery: {}", if battery.all_pass() { "all criteria pass" } else { "FAILURES present" }));
    Ok(())
}

fn calibrate(cfg: &RunConfig, out: &mut Output, summary: &mut RunSummary) -> Result<()> {
    let solver = stage("config", cfg.solver())?;
    let setup = match &cfg.init {
        InitSpec::RandomBandlimited { seed, k_min, k_max, .. } => CalibrationSetup {
            grid: stage("config", cfg.grid())?,
            tg: stage("config", cfg.time_grid())?,
            seeds: (0..5).map(|i| seed + i).collect(),
            k_min: *k_min,
            k_max: *k_max,
            ..CalibrationSetup::reference()?
        },
        _ => CalibrationSetup::reference()?,
    };
    let record = stage("calibration", calibrate_mu0(&solver, &setup))?;

    let mut csv = String::from(
        "alpha,mu0_empirical,amplitude,boundary_amplitude,grid_n,period,horizon,nodes,gamma,k_min,k_max,seeds\n",
    );
    let _ = writeln!(
        csv,
        "{},{},{},{},{},{},{},{},{},{},{},{}",
        fmt(record.alpha),
        fmt(record.mu0_empirical),
        fmt(record.amplitude),
        fmt(record.boundary_amplitude),
        record.grid_n,
        fmt(record.period),
        fmt(record.horizon),
        record.nodes,
        fmt(record.gamma),
        record.k_min,
        record.k_max,
        crate::probes::csv_quote(&record.seeds.iter().map(u64::to_string).collect::<Vec<_>>().join(";")),
    );
    out.write("calibration.csv", &csv, summary)?;

    summary.lines.push(format!(
        "contraction boundary at amplitude {:.6}; working amplitude {:.6}; mu0 = {:.6}",
        record.boundary_amplitude, record.amplitude, record.mu0_empirical,
    ));
    let reference = CalibrationRecord::reference();
    if record.alpha == reference.alpha && record.grid_n == reference.grid_n {
        summary.lines.push(format!(
            "shipped reference mu0 = {:.6} (drift {:+.2}%)",
            reference.mu0_empirical,
            100.0 * (record.mu0_empirical - reference.mu0_empirical) / reference.mu0_empirical,
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RunConfig;

    fn config_with(text: &str, dir: Option<&std::path::Path>) -> RunConfig {
        let mut cfg = RunConfig::parse_str(text).unwrap();
        cfg.out_dir = dir.map(|d| d.to_path_buf());
        cfg
    }

    #[test]
    fn zero_preset_simulates_to_zero() {
        let tmp = tempfile::tempdir().unwrap();
        let cfg = config_with(
            "grid.n = 32\ntime.horizon = 0.1\ntime.steps = 10\ninit.preset = zero\n",
            Some(tmp.path()),
        );
        let summary = run(&cfg, &Workflow::Simulate).unwrap();
        assert!(summary.all_pass);
        let manifest = std::fs::read_to_string(tmp.path().join("manifest.csv")).unwrap();
        for line in manifest.lines().skip(1) {
            let cols: Vec<&str> = line.split(',').collect();
            for v in &cols[2..] {
                assert_eq!(v.parse::<f64>().unwrap(), 0.0, "nonzero norm in {line}");
            }
        }
        // config echo written and parseable
        let echo = std::fs::read_to_string(tmp.path().join("config.echo")).unwrap();
        RunConfig::parse_str(&echo).unwrap();
    }

    #[test]
    fn cosine_preset_decays_at_unit_rate() {
        let cfg = config_with(
            "grid.n = 32\ntime.horizon = 1.0\ntime.dt = 1e-3\ninit.preset = cosx\n",
            None,
        );
        let summary = run(&cfg, &Workflow::Simulate).unwrap();
        let line = &summary.lines[0];
        // |theta(1)|_inf should be e^-1 to well under 1e-6.
        let inf: f64 = line
            .split("|theta|_inf = ")
            .nth(1)
            .unwrap()
            .split(',')
            .next()
            .unwrap()
            .trim()
            .parse()
            .unwrap();
        assert!((inf - (-1.0f64).exp()).abs() < 1e-6, "{line}");
    }

    #[test]
    fn manifest_is_byte_identical_across_reruns() {
        let run_once = || {
            let tmp = tempfile::tempdir().unwrap();
            let cfg = config_with(
                "grid.n = 32\ntime.horizon = 0.05\ntime.steps = 20\n\
                 init.preset = random-bandlimited\ninit.seed = 9\ninit.k_min = 1\n\
                 init.k_max = 5\ninit.amplitude = 0.5\noutput.snapshot_every = 10\n",
                Some(tmp.path()),
            );
            run(&cfg, &Workflow::Simulate).unwrap();
            let manifest = std::fs::read(tmp.path().join("manifest.csv")).unwrap();
            let snap = std::fs::read(tmp.path().join("snapshot_000010.qgf")).unwrap();
            (manifest, snap)
        };
        assert_eq!(run_once(), run_once());
    }

    #[test]
    fn divergent_run_names_the_stage() {
        let cfg = config_with(
            "grid.n = 32\ntime.horizon = 1.0\ntime.steps = 4\n\
             init.preset = random-bandlimited\ninit.seed = 1\ninit.k_min = 1\n\
             init.k_max = 10\ninit.amplitude = 1e12\n",
            None,
        );
        let err = run(&cfg, &Workflow::Simulate).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("time-stepping stage"), "got: {msg}");
    }

    #[test]
    fn picard_workflow_reports_contraction() {
        let tmp = tempfile::tempdir().unwrap();
        let cfg = config_with(
            "grid.n = 32\ntime.horizon = 0.5\ntime.nodes = 12\n\
             init.preset = random-bandlimited\ninit.seed = 3\ninit.k_min = 1\n\
             init.k_max = 4\ninit.amplitude = 0.4\n",
            Some(tmp.path()),
        );
        let summary = run(&cfg, &Workflow::Picard).unwrap();
        assert!(summary.all_pass, "{:?}", summary.lines);
        let picard = std::fs::read_to_string(tmp.path().join("picard.csv")).unwrap();
        assert!(picard.lines().count() > 2);
    }

    #[test]
    fn probe_workflow_rejects_unknown_names() {
        let cfg = config_with("grid.n = 32\n", None);
        let err = run(&cfg, &Workflow::Probe("does-not-exist".into())).unwrap_err();
        assert!(err.to_string().contains("unknown probe"));
    }

    #[test]
    fn gronwall_probe_workflow_passes() {
        let tmp = tempfile::tempdir().unwrap();
        let cfg = config_with("time.horizon = 1.0\ntime.nodes = 200\n", Some(tmp.path()));
        let summary = run(&cfg, &Workflow::Probe("gronwall".into())).unwrap();
        assert!(summary.all_pass, "{:?}", summary.lines);
        let probes = std::fs::read_to_string(tmp.path().join("probes.csv")).unwrap();
        assert!(probes.starts_with(ProbeReport::csv_header()));
    }

    #[test]
    fn max_principle_probe_on_short_run() {
        let cfg = config_with(
            "grid.n = 32\ntime.horizon = 0.1\ntime.steps = 40\n\
             init.preset = random-bandlimited\ninit.seed = 5\ninit.k_min = 1\n\
             init.k_max = 6\ninit.amplitude = 1.0\n",
            None,
        );
        let summary = run(&cfg, &Workflow::Probe("max-principle".into())).unwrap();
        assert!(summary.all_pass, "{:?}", summary.lines);
    }
}
