//! Run specifications and the `key = value` config format.

use std::path::PathBuf;

use crate::error::{MhdError, Result};
use crate::limiters::{Indicator, LimiterConfig};
use crate::problems;
use crate::riemann::{FluxKind, VertexSolver};

/// A complete, deterministic description of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub problem: String,
    pub degree: usize,
    pub nx: usize,
    pub ny: usize,
    pub flux: FluxKind,
    pub vertex_solver: VertexSolver,
    pub limiter: LimiterConfig,
    /// `None` means 0.95 / (2k + 1).
    pub cfl: Option<f64>,
    /// `None` means the problem's final time.
    pub t_final: Option<f64>,
    pub outdir: PathBuf,
    /// Diagnostics and cell-average snapshots every this many steps.
    pub output_every: usize,
    /// Force outflow boundaries (the rotor is periodic otherwise).
    pub outflow: bool,
    pub max_steps: Option<usize>,
}

pub const DEFAULT_CELLS: usize = 64;

impl RunSpec {
    /// Defaults for `problem` at degree `k`: a 64-cell grid (64 x 4 for the
    /// Brio-Wu strip), HLL flux and the problem's recommended limiter.
    pub fn new(problem: &str, degree: usize) -> Self {
        let p = problems::make(problem).ok();
        RunSpec {
            problem: problem.to_string(),
            degree,
            nx: DEFAULT_CELLS,
            ny: p.as_ref().and_then(|p| p.strip_rows).unwrap_or(DEFAULT_CELLS),
            flux: FluxKind::Hll,
            vertex_solver: VertexSolver::Consistent,
            limiter: p.map(|p| p.recommended).unwrap_or_default(),
            cfl: None,
            t_final: None,
            outdir: PathBuf::from("output"),
            output_every: 10,
            outflow: false,
            max_steps: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        problems::make(&self.problem)?;
        if self.degree > 3 {
            return Err(MhdError::Config(format!("degree must be 0, 1, 2 or 3, got {}", self.degree)));
        }
        if self.nx < 2 || self.ny < 2 {
            return Err(MhdError::Config(format!(
                "grid needs at least 2 cells per direction, got {} x {}",
                self.nx, self.ny
            )));
        }
        if let Some(c) = self.cfl {
            if !(c > 0.0 && c.is_finite()) {
                return Err(MhdError::Config(format!("cfl must be positive, got {c}")));
            }
        }
        if let Some(t) = self.t_final {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(MhdError::Config(format!("tfinal must be non-negative, got {t}")));
            }
        }
        if self.output_every == 0 {
            return Err(MhdError::Config("output_every must be at least 1".into()));
        }
        self.limiter.validate()
    }

    /// Serialize every field in the config format; parsing the result gives
    /// back an identical spec.
    pub fn to_config_string(&self) -> String {
        let l = &self.limiter;
        let mut s = String::new();
        let mut kv = |k: &str, v: String| s.push_str(&format!("{k} = {v}\n"));
        kv("problem", self.problem.clone());
        kv("degree", self.degree.to_string());
        kv("nx", self.nx.to_string());
        kv("ny", self.ny.to_string());
        kv("flux", self.flux.to_string());
        kv("vertex_solver", self.vertex_solver.to_string());
        kv("limiter", if l.enabled { "tvd" } else { "none" }.to_string());
        kv("indicator", l.indicator.to_string());
        kv("beta", format!("{:?}", l.beta));
        kv("tvb_mx", format!("{:?}", l.m_x));
        kv("tvb_my", format!("{:?}", l.m_y));
        kv("positivity", if l.positivity { "yes" } else { "no" }.to_string());
        kv("pressure_floor", format!("{:?}", l.pressure_floor));
        if let Some(c) = self.cfl {
            kv("cfl", format!("{c:?}"));
        }
        if let Some(t) = self.t_final {
            kv("tfinal", format!("{t:?}"));
        }
        kv("outdir", self.outdir.display().to_string());
        kv("output_every", self.output_every.to_string());
        kv("outflow", if self.outflow { "yes" } else { "no" }.to_string());
        if let Some(m) = self.max_steps {
            kv("max_steps", m.to_string());
        }
        s
    }
}

/// Settings gathered from a config file or the command line before
/// defaults are filled in. Each entry remembers its config line (0 for the
/// command line).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub problem: Option<String>,
    pub degree: Option<usize>,
    pub nx: Option<usize>,
    pub ny: Option<usize>,
    pub flux: Option<FluxKind>,
    pub vertex_solver: Option<VertexSolver>,
    pub limiter: Option<bool>,
    pub indicator: Option<Indicator>,
    pub beta: Option<f64>,
    pub tvb_mx: Option<f64>,
    pub tvb_my: Option<f64>,
    pub positivity: Option<bool>,
    pub pressure_floor: Option<f64>,
    pub cfl: Option<f64>,
    pub t_final: Option<f64>,
    pub outdir: Option<PathBuf>,
    pub output_every: Option<usize>,
    pub outflow: Option<bool>,
    pub max_steps: Option<usize>,
}

impl Overrides {
    /// Fields set in `other` replace those in `self`.
    pub fn merge(mut self, other: Overrides) -> Overrides {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(
            problem, degree, nx, ny, flux, vertex_solver, limiter, indicator, beta, tvb_mx, tvb_my, positivity,
            pressure_floor, cfl, t_final, outdir, output_every, outflow, max_steps
        );
        self
    }

    /// Fill in defaults. The problem and the degree have none.
    pub fn resolve(self) -> Result<RunSpec> {
        let problem = self
            .problem
            .ok_or_else(|| MhdError::Config("missing required key `problem`".into()))?;
        let degree = self
            .degree
            .ok_or_else(|| MhdError::Config("missing required key `degree`".into()))?;
        let mut s = RunSpec::new(&problem, degree);
        problems::make(&problem)?;
        if let Some(v) = self.nx {
            s.nx = v;
            if self.ny.is_none() && problems::make(&problem)?.strip_rows.is_none() {
                s.ny = v;
            }
        }
        macro_rules! set {
            ($($f:ident => $g:ident),*) => { $( if let Some(v) = self.$f { s.$g = v; } )* };
        }
        set!(ny => ny, flux => flux, vertex_solver => vertex_solver, outdir => outdir,
             output_every => output_every, outflow => outflow);
        if let Some(v) = self.limiter {
            s.limiter.enabled = v;
        }
        if let Some(v) = self.indicator {
            s.limiter.indicator = v;
        }
        if let Some(v) = self.beta {
            s.limiter.beta = v;
        }
        if let Some(v) = self.tvb_mx {
            s.limiter.m_x = v;
        }
        if let Some(v) = self.tvb_my {
            s.limiter.m_y = v;
        }
        if let Some(v) = self.positivity {
            s.limiter.positivity = v;
        }
        if let Some(v) = self.pressure_floor {
            s.limiter.pressure_floor = v;
        }
        s.cfl = self.cfl;
        s.t_final = self.t_final;
        s.max_steps = self.max_steps;
        s.validate()?;
        Ok(s)
    }
}

pub fn parse_bool(v: &str) -> std::result::Result<bool, String> {
    match v {
        "yes" | "true" | "on" | "1" => Ok(true),
        "no" | "false" | "off" | "0" => Ok(false),
        other => Err(format!("expected yes or no, got `{other}`")),
    }
}

pub fn parse_limiter(v: &str) -> std::result::Result<bool, String> {
    match v {
        "tvd" => Ok(true),
        "none" => Ok(false),
        other => Err(format!("unknown limiter `{other}` (valid: none, tvd)")),
    }
}

fn num<T: std::str::FromStr>(v: &str) -> std::result::Result<T, String> {
    v.parse::<T>().map_err(|_| format!("invalid number `{v}`"))
}

/// Parse config text into overrides. Blank lines and `#` comments are
/// skipped; unknown keys, repeated keys and bad values are errors carrying
/// the line number.
pub fn parse_config_overrides(text: &str) -> Result<Overrides> {
    let mut o = Overrides::default();
    let mut seen = std::collections::HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |message: String| MhdError::ConfigLine { line, message };
        let Some((key, value)) = content.split_once('=') else {
            return Err(err(format!("expected `key = value`, got `{content}`")));
        };
        let (key, value) = (key.trim(), value.trim());
        if value.is_empty() {
            return Err(err(format!("key `{key}` has no value")));
        }
        if !seen.insert(key.to_string()) {
            return Err(err(format!("key `{key}` given twice")));
        }
        let r: std::result::Result<(), String> = (|| {
            match key {
                "problem" => o.problem = Some(value.to_string()),
                "degree" => o.degree = Some(num(value)?),
                "nx" => o.nx = Some(num(value)?),
                "ny" => o.ny = Some(num(value)?),
                "flux" => o.flux = Some(value.parse::<FluxKind>().map_err(|e| e.to_string())?),
                "vertex_solver" => o.vertex_solver = Some(value.parse::<VertexSolver>().map_err(|e| e.to_string())?),
                "limiter" => o.limiter = Some(parse_limiter(value)?),
                "indicator" => o.indicator = Some(value.parse::<Indicator>().map_err(|e| e.to_string())?),
                "beta" => o.beta = Some(num(value)?),
                "tvb_mx" => o.tvb_mx = Some(num(value)?),
                "tvb_my" => o.tvb_my = Some(num(value)?),
                "positivity" => o.positivity = Some(parse_bool(value)?),
                "pressure_floor" => o.pressure_floor = Some(num(value)?),
                "cfl" => o.cfl = Some(num(value)?),
                "tfinal" => o.t_final = Some(num(value)?),
                "outdir" => o.outdir = Some(PathBuf::from(value)),
                "output_every" => o.output_every = Some(num(value)?),
                "outflow" => o.outflow = Some(parse_bool(value)?),
                "max_steps" => o.max_steps = Some(num(value)?),
                other => return Err(format!("unknown key `{other}`")),
            }
            Ok(())
        })();
        r.map_err(err)?;
    }
    Ok(o)
}

/// Parse a complete config, with command-line overrides applied on top.
pub fn parse(text: &str, cli: Overrides) -> Result<RunSpec> {
    parse_config_overrides(text)?.merge(cli).resolve()
}
