//! Run configuration: a flat `key = value` text format with dotted section
//! prefixes (`grid.n = 256`), chosen over a structured format so configs stay
//! diff-friendly and echoable without extra dependencies.
//!
//! `#` starts a comment, blank lines are skipped, keys are case-sensitive.
//! Unknown keys are rejected with a line diagnostic, except the `derived.*`
//! namespace, which is accepted and ignored so an echoed config (which
//! records the derived exponents) can be fed straight back in.

use std::path::{Path, PathBuf};

use crate::besov::BesovSpec;
use crate::error::{Error, Result};
use crate::field::RealField;
use crate::grid::Grid2D;
use crate::params::SolverConfig;
use crate::probes::TrackedNorm;
use crate::rng::random_bandlimited;
use crate::snapshot;
use crate::time::TimeGrid;

/// Probe names accepted by `probes = ...` and the `probe <name>` subcommand.
pub const KNOWN_PROBES: &[&str] = &[
    "max-principle",
    "riesz-growth",
    "gronwall",
    "blowup",
    "bilinear",
    "persistence",
    "fluctuation",
    "convergence",
    "kernel",
];

/// Initial-data selection.
#[derive(Debug, Clone, PartialEq)]
pub enum InitSpec {
    Zero,
    /// `cos(x1)`, the single-mode data with closed-form linear evolution.
    CosX,
    RandomBandlimited { seed: u64, k_min: usize, k_max: usize, amplitude: f64 },
    File(PathBuf),
}

/// Fully resolved run configuration with defaults for every field.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub alpha: f64,
    pub grid_n: usize,
    pub grid_period: f64,
    pub grid_dealias: f64,
    /// Trajectory horizon `T` for mild-formulation workflows.
    pub horizon: f64,
    /// Number of time intervals `M` on the graded trajectory grid.
    pub nodes: usize,
    /// Grading exponent of the trajectory grid (1 = uniform).
    pub gamma: f64,
    /// Stepper time step.
    pub dt: f64,
    /// Stepper step count; if absent, `round(horizon / dt)`.
    pub steps: Option<usize>,
    pub init: InitSpec,
    pub norms: Vec<TrackedNorm>,
    pub probes: Vec<String>,
    pub out_dir: Option<PathBuf>,
    /// Write a field snapshot every this many steps (0 = final state only).
    pub snapshot_every: usize,
    pub deterministic: bool,
    /// Lebesgue exponent used by the bilinear and fluctuation probes.
    pub probe_p: f64,
    /// Hypothetical blow-up time for the blow-up probe (defaults past `horizon`).
    pub probe_t_star: Option<f64>,
    /// Max-to-initial norm ratio allowed by the persistence probe.
    pub probe_ceiling: f64,
    pub picard_max_iter: usize,
    pub picard_tol: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            alpha: 0.75,
            grid_n: 128,
            grid_period: std::f64::consts::TAU,
            grid_dealias: Grid2D::DEFAULT_DEALIAS,
            horizon: 1.0,
            nodes: 32,
            gamma: 2.0,
            dt: 1e-3,
            steps: None,
            init: InitSpec::Zero,
            norms: vec![TrackedNorm::Lp(2.0), TrackedNorm::Lp(f64::INFINITY)],
            probes: vec!["max-principle".into()],
            out_dir: None,
            snapshot_every: 0,
            deterministic: true,
            probe_p: 8.0,
            probe_t_star: None,
            probe_ceiling: 10.0,
            picard_max_iter: 12,
            picard_tol: 1e-9,
        }
    }
}

fn bad(line: usize, msg: impl Into<String>) -> Error {
    Error::Config { line, msg: msg.into() }
}

fn parse_f64(v: &str, key: &str, line: usize) -> Result<f64> {
    let x = if v == "inf" {
        f64::INFINITY
    } else {
        v.parse::<f64>()
            .map_err(|_| bad(line, format!("{key}: expected a number, got '{v}'")))?
    };
    if x.is_nan() {
        return Err(bad(line, format!("{key}: NaN is not a value")));
    }
    Ok(x)
}

fn parse_usize(v: &str, key: &str, line: usize) -> Result<usize> {
    v.parse::<usize>()
        .map_err(|_| bad(line, format!("{key}: expected a nonnegative integer, got '{v}'")))
}

fn parse_bool(v: &str, key: &str, line: usize) -> Result<bool> {
    match v {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(bad(line, format!("{key}: expected true/false, got '{v}'"))),
    }
}

fn parse_norm(item: &str, line: usize) -> Result<TrackedNorm> {
    let parts: Vec<&str> = item.split(':').collect();
    match parts[0] {
        "l2" if parts.len() == 1 => Ok(TrackedNorm::Lp(2.0)),
        "linf" if parts.len() == 1 => Ok(TrackedNorm::Lp(f64::INFINITY)),
        "btilde" if parts.len() == 1 => Ok(TrackedNorm::BTilde),
        "lp" if parts.len() == 2 => Ok(TrackedNorm::Lp(parse_f64(parts[1], "norms", line)?)),
        spec @ ("besov" | "besov-hom") if parts.len() == 4 => {
            let s = parse_f64(parts[1], "norms", line)?;
            let p = parse_f64(parts[2], "norms", line)?;
            let q = parse_f64(parts[3], "norms", line)?;
            let b = BesovSpec::new(s, p, q, spec == "besov-hom")
                .map_err(|e| bad(line, format!("norms: {e}")))?;
            Ok(TrackedNorm::Besov(b))
        }
        _ => Err(bad(
            line,
            format!(
                "norms: unrecognized entry '{item}' \
                 (expected l2, linf, lp:<p>, besov[-hom]:<s>:<p>:<q>, btilde)"
            ),
        )),
    }
}

fn norm_key(norm: &TrackedNorm) -> String {
    match norm {
        TrackedNorm::Lp(p) if *p == 2.0 => "l2".into(),
        TrackedNorm::Lp(p) if p.is_infinite() => "linf".into(),
        TrackedNorm::Lp(p) => format!("lp:{p}"),
        TrackedNorm::Besov(b) => {
            let f = |v: f64| if v.is_infinite() { "inf".to_string() } else { format!("{v}") };
            format!(
                "{}:{}:{}:{}",
                if b.homogeneous { "besov-hom" } else { "besov" },
                b.s,
                f(b.p),
                f(b.q)
            )
        }
        TrackedNorm::BTilde => "btilde".into(),
    }
}

impl RunConfig {
    /// Parse config text on top of the defaults. Lines are `key = value`,
    /// `#` comments; errors carry the 1-based line number.
    pub fn parse_str(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let stripped = raw.split('#').next().unwrap_or("").trim();
            if stripped.is_empty() {
                continue;
            }
            let (key, value) = stripped
                .split_once('=')
                .ok_or_else(|| bad(line, format!("expected 'key = value', got '{stripped}'")))?;
            cfg.set_key(key.trim(), value.trim(), line)?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse_str(&std::fs::read_to_string(path)?)
    }

    /// Apply `KEY=VALUE` overrides (command-line `--set`); diagnostics cite the
    /// override position instead of a file line.
    pub fn apply_overrides(&mut self, pairs: &[(String, String)]) -> Result<()> {
        for (i, (k, v)) in pairs.iter().enumerate() {
            self.set_key(k.trim(), v.trim(), i + 1)?;
        }
        Ok(())
    }

    fn set_key(&mut self, key: &str, value: &str, line: usize) -> Result<()> {
        match key {
            "alpha" => self.alpha = parse_f64(value, key, line)?,
            "grid.n" => self.grid_n = parse_usize(value, key, line)?,
            "grid.period" => self.grid_period = parse_f64(value, key, line)?,
            "grid.dealias" => self.grid_dealias = parse_f64(value, key, line)?,
            "time.horizon" => self.horizon = parse_f64(value, key, line)?,
            "time.nodes" => self.nodes = parse_usize(value, key, line)?,
            "time.gamma" => self.gamma = parse_f64(value, key, line)?,
            "time.dt" => self.dt = parse_f64(value, key, line)?,
            "time.steps" => self.steps = Some(parse_usize(value, key, line)?),
            "init.preset" => {
                self.init = match value {
                    "zero" => InitSpec::Zero,
                    "cosx" => InitSpec::CosX,
                    "random-bandlimited" => InitSpec::RandomBandlimited {
                        seed: 0,
                        k_min: 1,
                        k_max: 8,
                        amplitude: 0.1,
                    },
                    "file" => InitSpec::File(PathBuf::new()),
                    _ => {
                        return Err(bad(
                            line,
                            format!(
                                "init.preset: unknown preset '{value}' \
                                 (zero | cosx | random-bandlimited | file)"
                            ),
                        ))
                    }
                }
            }
            "init.seed" => match &mut self.init {
                InitSpec::RandomBandlimited { seed, .. } => {
                    *seed = value
                        .parse::<u64>()
                        .map_err(|_| bad(line, format!("init.seed: bad integer '{value}'")))?
                }
                _ => return Err(bad(line, "init.seed only applies to random-bandlimited")),
            },
            "init.k_min" => match &mut self.init {
                InitSpec::RandomBandlimited { k_min, .. } => {
                    *k_min = parse_usize(value, key, line)?
                }
                _ => return Err(bad(line, "init.k_min only applies to random-bandlimited")),
            },
            "init.k_max" => match &mut self.init {
                InitSpec::RandomBandlimited { k_max, .. } => {
                    *k_max = parse_usize(value, key, line)?
                }
                _ => return Err(bad(line, "init.k_max only applies to random-bandlimited")),
            },
            "init.amplitude" => match &mut self.init {
                InitSpec::RandomBandlimited { amplitude, .. } => {
                    *amplitude = parse_f64(value, key, line)?
                }
                _ => return Err(bad(line, "init.amplitude only applies to random-bandlimited")),
            },
            "init.path" => match &mut self.init {
                InitSpec::File(path) => *path = PathBuf::from(value),
                _ => return Err(bad(line, "init.path only applies to the file preset")),
            },
            "norms" => {
                let mut norms = Vec::new();
                for item in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    norms.push(parse_norm(item, line)?);
                }
                self.norms = norms;
            }
            "probes" => {
                let mut probes = Vec::new();
                for item in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    if !KNOWN_PROBES.contains(&item) {
                        return Err(bad(
                            line,
                            format!("probes: unknown probe '{item}' (known: {})", KNOWN_PROBES.join(", ")),
                        ));
                    }
                    probes.push(item.to_string());
                }
                self.probes = probes;
            }
            "output.dir" => self.out_dir = Some(PathBuf::from(value)),
            "output.snapshot_every" => self.snapshot_every = parse_usize(value, key, line)?,
            "deterministic" => self.deterministic = parse_bool(value, key, line)?,
            "probe.p" => self.probe_p = parse_f64(value, key, line)?,
            "probe.t_star" => self.probe_t_star = Some(parse_f64(value, key, line)?),
            "probe.ceiling" => self.probe_ceiling = parse_f64(value, key, line)?,
            "picard.max_iter" => self.picard_max_iter = parse_usize(value, key, line)?,
            "picard.tol" => self.picard_tol = parse_f64(value, key, line)?,
            _ if key.starts_with("derived.") => {}
            _ => return Err(bad(line, format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    pub fn solver(&self) -> Result<SolverConfig> {
        SolverConfig::new(self.alpha)
    }

    pub fn grid(&self) -> Result<Grid2D> {
        Grid2D::new(self.grid_n, self.grid_period, self.grid_dealias)
    }

    pub fn time_grid(&self) -> Result<TimeGrid> {
        TimeGrid::graded(self.horizon, self.nodes, self.gamma)
    }

    /// Stepper step count: explicit `time.steps`, else `round(horizon / dt)`.
    pub fn step_count(&self) -> Result<usize> {
        if let Some(s) = self.steps {
            if s == 0 {
                return Err(Error::InvalidParameter("time.steps must be positive".into()));
            }
            return Ok(s);
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "time.dt must be positive and finite, got {}",
                self.dt
            )));
        }
        let s = (self.horizon / self.dt).round();
        if !(s >= 1.0) {
            return Err(Error::InvalidParameter(
                "time.horizon / time.dt must round to at least one step".into(),
            ));
        }
        Ok(s as usize)
    }

    pub fn initial_field(&self) -> Result<RealField> {
        let grid = self.grid()?;
        match &self.init {
            InitSpec::Zero => Ok(RealField::zeros(grid)),
            InitSpec::CosX => Ok(RealField::from_fn(grid, |x1, _| x1.cos())),
            InitSpec::RandomBandlimited { seed, k_min, k_max, amplitude } => {
                random_bandlimited(grid, *seed, *k_min, *k_max, *amplitude)
            }
            InitSpec::File(path) => {
                let f = snapshot::read_real(path)?;
                if f.grid() != &grid {
                    return Err(Error::Snapshot(format!(
                        "snapshot grid (n = {}, L = {}) does not match the configured grid \
                         (n = {}, L = {})",
                        f.grid().n(),
                        f.grid().period(),
                        grid.n(),
                        grid.period()
                    )));
                }
                Ok(f)
            }
        }
    }

    /// Render the fully resolved configuration, including the derived
    /// exponents, as parseable config text.
    pub fn echo(&self) -> Result<String> {
        let solver = self.solver()?;
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            s.push_str(k);
            s.push_str(" = ");
            s.push_str(&v);
            s.push('\n');
        };
        kv("alpha", format!("{}", self.alpha));
        kv("derived.nu", format!("{}", solver.nu()));
        kv("derived.p_c", format!("{}", solver.critical_p()));
        kv("derived.s_c", format!("{}", solver.critical_s()));
        kv("grid.n", format!("{}", self.grid_n));
        kv("grid.period", format!("{}", self.grid_period));
        kv("grid.dealias", format!("{}", self.grid_dealias));
        kv("time.horizon", format!("{}", self.horizon));
        kv("time.nodes", format!("{}", self.nodes));
        kv("time.gamma", format!("{}", self.gamma));
        kv("time.dt", format!("{}", self.dt));
        if let Some(steps) = self.steps {
            kv("time.steps", format!("{steps}"));
        }
        match &self.init {
            InitSpec::Zero => kv("init.preset", "zero".into()),
            InitSpec::CosX => kv("init.preset", "cosx".into()),
            InitSpec::RandomBandlimited { seed, k_min, k_max, amplitude } => {
                kv("init.preset", "random-bandlimited".into());
                kv("init.seed", format!("{seed}"));
                kv("init.k_min", format!("{k_min}"));
                kv("init.k_max", format!("{k_max}"));
                kv("init.amplitude", format!("{amplitude}"));
            }
            InitSpec::File(path) => {
                kv("init.preset", "file".into());
                kv("init.path", path.display().to_string());
            }
        }
        kv(
            "norms",
            self.norms.iter().map(norm_key).collect::<Vec<_>>().join(", "),
        );
        kv("probes", self.probes.join(", "));
        if let Some(dir) = &self.out_dir {
            kv("output.dir", dir.display().to_string());
        }
        kv("output.snapshot_every", format!("{}", self.snapshot_every));
        kv("deterministic", format!("{}", self.deterministic));
        kv("probe.p", format!("{}", self.probe_p));
        if let Some(t) = self.probe_t_star {
            kv("probe.t_star", format!("{t}"));
        }
        kv("probe.ceiling", format!("{}", self.probe_ceiling));
        kv("picard.max_iter", format!("{}", self.picard_max_iter));
        kv("picard.tol", format!("{}", self.picard_tol));
        Ok(s)
    }
}
