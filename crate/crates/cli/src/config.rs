//! TOML run configuration.
//!
//! See `docs/config.md` at the repository root for the schema.

use std::path::Path;

use pcw::{
    numerics, Breakpoints, Closure, IteratedFunctionSystem, MapDescriptor, PiecewiseContraction, Rational,
    Scalar,
};
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    Syntax(String),
    #[error("{field}: {message}")]
    Field { field: String, message: String },
}

fn field_err(field: impl Into<String>, message: impl ToString) -> ConfigError {
    ConfigError::Field { field: field.into(), message: message.to_string() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Backend {
    #[default]
    Exact,
    Float,
}

impl std::str::FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exact" => Ok(Backend::Exact),
            "float" => Ok(Backend::Float),
            other => Err(format!("unknown backend {other:?} (expected exact or float)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tolerances {
    pub eps_cmp: f64,
    pub eps_orbit: f64,
    pub eps_fp: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eps_cmp: numerics::DEFAULT_EPS_CMP,
            eps_orbit: pcw::pcmap::DEFAULT_EPS_ORBIT,
            eps_fp: pcw::maps::DEFAULT_EPS_FP,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Caps {
    pub max_iter: usize,
    pub q_depth: usize,
    pub q_size: usize,
    pub compositions: usize,
    pub max_period: usize,
    pub generic_depth: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_iter: pcw::pcmap::DEFAULT_ORBIT_MAX_ITER,
            q_depth: pcw::quasipartition::DEFAULT_Q_DEPTH_CAP,
            q_size: pcw::quasipartition::DEFAULT_Q_SIZE_CAP,
            compositions: pcw::ifs::DEFAULT_COMPOSITION_CAP,
            max_period: pcw::pcmap::DEFAULT_MAX_PERIOD,
            generic_depth: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurveyParams {
    pub samples: usize,
    pub n: usize,
    pub kappa_max: f64,
    pub margin: Rational,
    pub grid: usize,
}

impl Default for SurveyParams {
    fn default() -> Self {
        SurveyParams { samples: 200, n: 3, kappa_max: 0.45, margin: Rational::from_ratio(1, 64), grid: 64 }
    }
}

/// A map as written in the config, kept as text until a backend is chosen.
#[derive(Clone, Debug, PartialEq)]
pub enum MapSpec {
    Affine { slope: String, intercept: String },
    Quadratic { a: String, b: String, c: String },
    Constant { value: String },
    Clamped { inner: Box<MapSpec>, lo: String, hi: String },
    Composed { chain: Vec<MapSpec> },
}

impl MapSpec {
    pub fn build<S: Scalar>(&self) -> pcw::Result<MapDescriptor<S>> {
        match self {
            MapSpec::Affine { slope, intercept } => MapDescriptor::affine(S::parse(slope)?, S::parse(intercept)?),
            MapSpec::Quadratic { a, b, c } => MapDescriptor::quadratic(S::parse(a)?, S::parse(b)?, S::parse(c)?),
            MapSpec::Constant { value } => MapDescriptor::constant(S::parse(value)?),
            MapSpec::Clamped { inner, lo, hi } => MapDescriptor::clamped(inner.build()?, S::parse(lo)?, S::parse(hi)?),
            MapSpec::Composed { chain } => MapDescriptor::composed(chain.iter().map(|m| m.build()).collect::<pcw::Result<_>>()?),
        }
    }

    /// `affine a b`, `quadratic a b c`, `constant v` or `clamped lo hi <map>`.
    pub fn parse_text(text: &str) -> Result<MapSpec, String> {
        let words: Vec<&str> = text.split_whitespace().collect();
        let arity = |k: usize| {
            if words.len() == k + 1 {
                Ok(())
            } else {
                Err(format!("{:?} expects {k} coefficients, got {}", words[0], words.len() - 1))
            }
        };
        match words.first().copied() {
            Some("affine") => {
                arity(2)?;
                Ok(MapSpec::Affine { slope: words[1].into(), intercept: words[2].into() })
            }
            Some("quadratic") => {
                arity(3)?;
                Ok(MapSpec::Quadratic { a: words[1].into(), b: words[2].into(), c: words[3].into() })
            }
            Some("constant") => {
                arity(1)?;
                Ok(MapSpec::Constant { value: words[1].into() })
            }
            Some("clamped") if words.len() >= 4 => Ok(MapSpec::Clamped {
                lo: words[1].into(),
                hi: words[2].into(),
                inner: Box::new(MapSpec::parse_text(&words[3..].join(" "))?),
            }),
            Some("clamped") => Err("clamped expects lo, hi and an inner map".into()),
            Some(other) => Err(format!("unknown map kind {other:?}")),
            None => Err("empty map description".into()),
        }
    }

    fn from_value(v: &toml::Value) -> Result<MapSpec, String> {
        match v {
            toml::Value::String(s) => MapSpec::parse_text(s),
            toml::Value::Table(t) => {
                let get = |key: &str| -> Result<String, String> {
                    t.get(key).map(scalar_text).transpose()?.ok_or_else(|| format!("missing key {key:?}"))
                };
                let kind = t.get("kind").and_then(|k| k.as_str()).ok_or("missing string key \"kind\"")?;
                match kind {
                    "affine" => Ok(MapSpec::Affine { slope: get("slope")?, intercept: get("intercept")? }),
                    "quadratic" => Ok(MapSpec::Quadratic { a: get("a")?, b: get("b")?, c: get("c")? }),
                    "constant" => Ok(MapSpec::Constant { value: get("value")? }),
                    "clamped" => Ok(MapSpec::Clamped {
                        lo: get("lo")?,
                        hi: get("hi")?,
                        inner: Box::new(MapSpec::from_value(t.get("inner").ok_or("missing key \"inner\"")?)?),
                    }),
                    "composed" => {
                        let chain = t.get("chain").and_then(|c| c.as_array()).ok_or("missing array \"chain\"")?;
                        Ok(MapSpec::Composed { chain: chain.iter().map(MapSpec::from_value).collect::<Result<_, _>>()? })
                    }
                    other => Err(format!("unknown map kind {other:?}")),
                }
            }
            other => Err(format!("expected a string or table, got {}", other.type_str())),
        }
    }
}

/// Numbers are kept as text so decimals stay exact; TOML floats go through
/// their shortest round-trip rendering.
fn scalar_text(v: &toml::Value) -> Result<String, String> {
    match v {
        toml::Value::String(s) => Ok(s.trim().to_string()),
        toml::Value::Integer(i) => Ok(i.to_string()),
        toml::Value::Float(f) => Ok(f.to_string()),
        other => Err(format!("expected a number, got {}", other.type_str())),
    }
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    backend: Option<String>,
    seed: Option<u64>,
    maps: Option<Vec<toml::Value>>,
    breakpoints: Option<toml::Value>,
    closures: Option<Vec<String>>,
    tolerances: Option<RawTolerances>,
    caps: Option<RawCaps>,
    aks: Option<RawAks>,
    orbit: Option<RawOrbit>,
    power: Option<RawPower>,
    survey: Option<RawSurvey>,
    partition: Option<RawPartition>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTolerances {
    eps_cmp: Option<f64>,
    eps_orbit: Option<f64>,
    eps_fp: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCaps {
    max_iter: Option<usize>,
    q_depth: Option<usize>,
    q_size: Option<usize>,
    compositions: Option<usize>,
    max_period: Option<usize>,
    generic_depth: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAks {
    k_max: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOrbit {
    x0: toml::Value,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPower {
    k: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPartition {
    grid: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSurvey {
    samples: Option<usize>,
    n: Option<usize>,
    kappa_max: Option<f64>,
    margin: Option<toml::Value>,
    grid: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub backend: Backend,
    pub seed: u64,
    pub maps: Vec<MapSpec>,
    pub breakpoints: Vec<String>,
    pub closures: Option<Vec<Closure>>,
    pub tolerances: Tolerances,
    pub caps: Caps,
    pub k_max: Option<usize>,
    pub x0: Option<String>,
    pub power_k: Option<usize>,
    pub partition_grid: usize,
    pub survey: SurveyParams,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            backend: Backend::Exact,
            seed: 0,
            maps: Vec::new(),
            breakpoints: Vec::new(),
            closures: None,
            tolerances: Tolerances::default(),
            caps: Caps::default(),
            k_max: None,
            x0: None,
            power_k: None,
            partition_grid: 256,
            survey: SurveyParams::default(),
        }
    }
}

pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::Io { path: path.display().to_string(), message: e.to_string() })?;
    parse_config(&text)
}

/// Parses and validates a TOML document.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    let mut cfg = RunConfig::default();

    if let Some(b) = raw.backend {
        cfg.backend = b.parse().map_err(|e| field_err("backend", e))?;
    }
    cfg.seed = raw.seed.unwrap_or(0);

    for (i, v) in raw.maps.unwrap_or_default().iter().enumerate() {
        let field = format!("maps[{i}]");
        let spec = MapSpec::from_value(v).map_err(|e| field_err(&field, e))?;
        spec.build::<Rational>().map_err(|e| field_err(&field, e))?;
        cfg.maps.push(spec);
    }
    if !cfg.maps.is_empty() {
        let maps: Vec<MapDescriptor<Rational>> = cfg.maps.iter().map(|m| m.build().unwrap()).collect();
        IteratedFunctionSystem::new(maps).map_err(|e| field_err("maps", e))?;
    }

    if let Some(v) = raw.breakpoints {
        cfg.breakpoints = match &v {
            toml::Value::String(s) => s.split_whitespace().map(str::to_string).collect(),
            toml::Value::Array(items) => items
                .iter()
                .enumerate()
                .map(|(i, x)| scalar_text(x).map_err(|e| field_err(format!("breakpoints[{i}]"), e)))
                .collect::<Result<_, _>>()?,
            other => vec![scalar_text(other).map_err(|e| field_err("breakpoints", e))?],
        };
        let parsed = cfg
            .breakpoints
            .iter()
            .enumerate()
            .map(|(i, s)| Rational::parse(s).map_err(|e| field_err(format!("breakpoints[{i}]"), e)))
            .collect::<Result<Vec<_>, _>>()?;
        Breakpoints::new(parsed).map_err(|e| field_err("breakpoints", e))?;
        if !cfg.maps.is_empty() && cfg.breakpoints.len() + 1 != cfg.maps.len() {
            return Err(field_err(
                "breakpoints",
                format!("{} maps need {} breakpoints, got {}", cfg.maps.len(), cfg.maps.len() - 1, cfg.breakpoints.len()),
            ));
        }
    }

    if let Some(cl) = raw.closures {
        let parsed = cl
            .iter()
            .enumerate()
            .map(|(i, c)| match c.as_str() {
                "right" => Ok(Closure::Right),
                "left" => Ok(Closure::Left),
                other => Err(field_err(format!("closures[{i}]"), format!("expected left or right, got {other:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if parsed.len() != cfg.breakpoints.len() {
            return Err(field_err("closures", "need one entry per breakpoint"));
        }
        cfg.closures = Some(parsed);
    }

    if let Some(t) = raw.tolerances {
        let check = |name: &str, v: Option<f64>, default: f64| match v {
            Some(x) if !(x.is_finite() && x > 0.0) => Err(field_err(format!("tolerances.{name}"), "must be positive")),
            Some(x) => Ok(x),
            None => Ok(default),
        };
        let d = Tolerances::default();
        cfg.tolerances = Tolerances {
            eps_cmp: check("eps_cmp", t.eps_cmp, d.eps_cmp)?,
            eps_orbit: check("eps_orbit", t.eps_orbit, d.eps_orbit)?,
            eps_fp: check("eps_fp", t.eps_fp, d.eps_fp)?,
        };
    }

    if let Some(c) = raw.caps {
        let d = Caps::default();
        cfg.caps = Caps {
            max_iter: c.max_iter.unwrap_or(d.max_iter),
            q_depth: c.q_depth.unwrap_or(d.q_depth),
            q_size: c.q_size.unwrap_or(d.q_size),
            compositions: c.compositions.unwrap_or(d.compositions),
            max_period: c.max_period.unwrap_or(d.max_period),
            generic_depth: c.generic_depth.unwrap_or(d.generic_depth),
        };
        if cfg.caps.generic_depth == 0 {
            return Err(field_err("caps.generic_depth", "must be at least 1"));
        }
    }

    cfg.k_max = raw.aks.map(|a| a.k_max);
    if let Some(o) = raw.orbit {
        let x0 = scalar_text(&o.x0).map_err(|e| field_err("orbit.x0", e))?;
        Rational::parse(&x0).map_err(|e| field_err("orbit.x0", e))?;
        cfg.x0 = Some(x0);
    }
    if let Some(p) = raw.power {
        if p.k == 0 {
            return Err(field_err("power.k", "must be at least 1"));
        }
        cfg.power_k = Some(p.k);
    }
    if let Some(p) = raw.partition {
        if p.grid == 0 {
            return Err(field_err("partition.grid", "must be at least 1"));
        }
        cfg.partition_grid = p.grid;
    }
    if let Some(s) = raw.survey {
        let d = SurveyParams::default();
        let margin = match s.margin {
            Some(v) => {
                let text = scalar_text(&v).map_err(|e| field_err("survey.margin", e))?;
                Rational::parse(&text).map_err(|e| field_err("survey.margin", e))?
            }
            None => d.margin.clone(),
        };
        if !(margin > Rational::zero() && margin < Rational::from_ratio(1, 4)) {
            return Err(field_err("survey.margin", "must lie in (0, 1/4)"));
        }
        let kappa_max = s.kappa_max.unwrap_or(d.kappa_max);
        if !(kappa_max > 0.0 && kappa_max < 1.0 - 2.0 * margin.to_f64()) {
            return Err(field_err("survey.kappa_max", "must lie in (0, 1 − 2·margin)"));
        }
        let n = s.n.unwrap_or(d.n);
        if n < 2 {
            return Err(field_err("survey.n", "must be at least 2"));
        }
        cfg.survey = SurveyParams {
            samples: s.samples.unwrap_or(d.samples),
            n,
            kappa_max,
            margin,
            grid: s.grid.unwrap_or(d.grid).max(1),
        };
    }
    Ok(cfg)
}

impl RunConfig {
    pub fn ifs<S: Scalar>(&self) -> Result<IteratedFunctionSystem<S>, ConfigError> {
        if self.maps.is_empty() {
            return Err(field_err("maps", "required by this command"));
        }
        let maps = self
            .maps
            .iter()
            .enumerate()
            .map(|(i, m)| m.build().map_err(|e| field_err(format!("maps[{i}]"), e)))
            .collect::<Result<Vec<_>, _>>()?;
        IteratedFunctionSystem::new(maps).map_err(|e| field_err("maps", e))
    }

    pub fn breakpoints<S: Scalar>(&self) -> Result<Breakpoints<S>, ConfigError> {
        if self.breakpoints.is_empty() {
            return Err(field_err("breakpoints", "required by this command"));
        }
        let pts = self.breakpoints.iter().map(|s| S::parse(s)).collect::<pcw::Result<Vec<_>>>();
        pts.and_then(Breakpoints::new).map_err(|e| field_err("breakpoints", e))
    }

    pub fn pc<S: Scalar>(&self) -> Result<PiecewiseContraction<S>, ConfigError> {
        let pc = PiecewiseContraction::new(self.ifs()?, self.breakpoints()?).map_err(|e| field_err("breakpoints", e))?;
        match &self.closures {
            Some(c) => pc.with_closures(c.clone()).map_err(|e| field_err("closures", e)),
            None => Ok(pc),
        }
    }

    /// Installs the float comparison tolerance when the float backend is in use.
    pub fn apply_tolerance(&self) -> Result<(), ConfigError> {
        if self.backend == Backend::Float {
            numerics::set_float_tolerance(self.tolerances.eps_cmp).map_err(|e| field_err("tolerances.eps_cmp", e))?;
        }
        Ok(())
    }

    pub fn orbit_options(&self) -> pcw::OrbitOptions {
        pcw::OrbitOptions {
            max_iter: self.caps.max_iter,
            eps_orbit: self.tolerances.eps_orbit,
            max_period: self.caps.max_period,
            require_generic: false,
            fixed_point: pcw::FixedPointOptions { eps_fp: self.tolerances.eps_fp, ..Default::default() },
        }
    }
}
