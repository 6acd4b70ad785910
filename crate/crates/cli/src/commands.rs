//! Subcommands. Each produces CSV text and a status; configuration problems
//! surface as [`ConfigError`] (exit code 2).

use pcw::{
    analyze, compute_q, omega_limit, Error, Float, InconclusiveReason, OrbitOutcome, QStatus, Rational, Scalar,
};

use crate::config::{Backend, ConfigError, RunConfig};
use crate::emit::{join, Report};
use crate::suites::{self, SuiteName, SuiteParams};
use crate::survey;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Success,
    Inconclusive,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Success => 0,
            Status::Inconclusive => 1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Output {
    pub csv: String,
    pub status: Status,
}

impl Output {
    fn ok(csv: String) -> Self {
        Output { csv, status: Status::Success }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Aks,
    Orbit,
    Partition,
    Power,
    Cap,
    Survey,
    Suite(SuiteName),
}

pub const EXIT_CONFIG: i32 = 2;

fn cmd_err(cmd: &str, e: impl ToString) -> ConfigError {
    ConfigError::Field { field: cmd.to_string(), message: e.to_string() }
}

/// Errors that describe a degenerate instance rather than bad input.
fn is_inconclusive(e: &Error) -> bool {
    matches!(
        e,
        Error::IterationCap(_)
            | Error::CapExceeded { .. }
            | Error::NonDiscretePreimage(_)
            | Error::InexactPreimage(_)
            | Error::IncompleteQ
            | Error::PartitionInvarianceViolation(_)
            | Error::PowerMapDiscontinuity(_)
            | Error::BoundViolation(_)
            | Error::Inconsistent(_)
    )
}

/// Appends an `[inconclusive]` block, or turns the error into a config error.
fn inconclusive(cmd: &str, mut report: Report, e: Error) -> Result<Output, ConfigError> {
    if !is_inconclusive(&e) {
        return Err(cmd_err(cmd, e));
    }
    report.section("inconclusive", &["reason"]);
    report.row([e.to_string()]);
    Ok(Output { csv: report.finish(), status: Status::Inconclusive })
}

pub fn run(cmd: Command, cfg: &RunConfig, jobs: usize) -> Result<Output, ConfigError> {
    cfg.apply_tolerance()?;
    match (cmd, cfg.backend) {
        (Command::Aks, Backend::Exact) => aks::<Rational>(cfg),
        (Command::Aks, Backend::Float) => aks::<Float>(cfg),
        (Command::Orbit, Backend::Exact) => orbit::<Rational>(cfg),
        (Command::Orbit, Backend::Float) => orbit::<Float>(cfg),
        (Command::Cap, Backend::Exact) => cap::<Rational>(cfg),
        (Command::Cap, Backend::Float) => cap::<Float>(cfg),
        (Command::Partition, Backend::Exact) => partition(cfg),
        (Command::Power, Backend::Exact) => power(cfg),
        (Command::Survey, Backend::Exact) => {
            let report = survey::run_survey(&cfg.survey, &cfg.caps, cfg.seed, jobs);
            let status = if report.exit_code() == 0 { Status::Success } else { Status::Inconclusive };
            Ok(Output { csv: report.to_csv(), status })
        }
        (Command::Suite(name), Backend::Exact) => {
            let report = suites::run(name, &SuiteParams::defaults(name), cfg.seed, jobs);
            let status = if report.failures == 0 { Status::Success } else { Status::Inconclusive };
            Ok(Output { csv: report.csv, status })
        }
        (cmd, Backend::Float) => Err(cmd_err("backend", format!("{cmd:?} requires the exact backend").to_lowercase())),
    }
}

fn aks<S: Scalar>(cfg: &RunConfig) -> Result<Output, ConfigError> {
    let ifs = cfg.ifs::<S>()?;
    let k_max = cfg.k_max.ok_or_else(|| cmd_err("aks.k_max", "required"))?;
    let mut out = Report::new();
    out.section("aks", &["k", "component_index", "lo", "hi", "measure_total"]);
    for (k, set) in ifs.ak_sequence(k_max).iter().enumerate() {
        let measure = set.measure().to_string();
        for (i, c) in set.components().iter().enumerate() {
            out.row([k.to_string(), i.to_string(), c.lo().to_string(), c.hi().to_string(), measure.clone()]);
        }
    }
    Ok(Output::ok(out.finish()))
}

fn orbit<S: Scalar>(cfg: &RunConfig) -> Result<Output, ConfigError> {
    let f = cfg.pc::<S>()?;
    let x0 = cfg.x0.as_deref().ok_or_else(|| cmd_err("orbit.x0", "required"))?;
    let x0 = S::parse(x0).map_err(|e| cmd_err("orbit.x0", e))?;
    let rec = f.orbit(&x0, &cfg.orbit_options()).map_err(|e| cmd_err("orbit.x0", e))?;
    let mut out = Report::new();
    out.section("steps", &["step", "x", "digit"]);
    for (t, x) in rec.points.iter().enumerate() {
        let d = rec.itinerary.digits.get(t).map(ToString::to_string).unwrap_or_default();
        out.row([t.to_string(), x.to_string(), d]);
    }
    out.section("summary", &["outcome", "preperiod", "period", "orbit_points", "word", "reason"]);
    let status = match &rec.outcome {
        OrbitOutcome::Converged(o) => {
            out.row([
                "converged".to_string(),
                rec.itinerary.preperiod.to_string(),
                o.period.to_string(),
                join(&o.points),
                join(&o.word),
                String::new(),
            ]);
            Status::Success
        }
        OrbitOutcome::Inconclusive(reason) => {
            let why = match reason {
                InconclusiveReason::IterationCap => "iteration cap".to_string(),
                InconclusiveReason::HitBreakpointExactly { step, breakpoint } => {
                    format!("hit breakpoint x_{breakpoint} at step {step}")
                }
            };
            out.row(["inconclusive".to_string(), String::new(), String::new(), String::new(), String::new(), why]);
            Status::Inconclusive
        }
    };
    Ok(Output { csv: out.finish(), status })
}

fn partition(cfg: &RunConfig) -> Result<Output, ConfigError> {
    let f = cfg.pc::<Rational>()?;
    let generic = match f.check_generic(cfg.caps.generic_depth, cfg.caps.compositions) {
        Ok(g) => g.to_string(),
        Err(_) => "unknown".to_string(),
    };
    let mut out = Report::new();
    let q = match compute_q(&f, cfg.caps.q_depth, cfg.caps.q_size) {
        Ok(q) => q,
        Err(e) => return inconclusive("partition", out, e),
    };
    out.section("q_points", &["point", "source", "depth"]);
    for p in &q.points {
        out.row([p.value.to_string(), p.source.to_string(), p.depth.to_string()]);
    }
    let status = match q.status {
        QStatus::Complete => "complete",
        QStatus::Truncated => "truncated",
    };
    out.section("q_summary", &["generic", "status", "depth_reached", "size"]);
    out.row([generic, status.to_string(), q.depth_reached.to_string(), q.len().to_string()]);

    let a = match analyze(&f, cfg.caps.q_depth, cfg.caps.q_size) {
        Ok(a) => a,
        Err(e) => return inconclusive("partition", out, e),
    };
    let p = &a.partition;
    out.section("intervals", &["l", "lo", "hi", "tau", "eta"]);
    for l in 0..p.len() {
        let (lo, hi) = p.interval(l);
        out.row([(l + 1).to_string(), lo.to_string(), hi.to_string(), (p.tau()[l] + 1).to_string(), p.eta()[l].to_string()]);
    }
    out.section("orbits", &["orbit_id", "period", "points", "word"]);
    for (i, o) in a.orbits.iter().enumerate() {
        out.row([(i + 1).to_string(), o.period.to_string(), join(&o.points), join(&o.word)]);
    }
    out.section("classes", &["class_id", "members", "orbit_id"]);
    for (c, members) in a.classes.classes.iter().enumerate() {
        let ids: Vec<usize> = members.iter().map(|l| l + 1).collect();
        let orbit = a.classes.orbit_class.iter().position(|&k| k == c).map(|o| (o + 1).to_string()).unwrap_or_default();
        out.row([(c + 1).to_string(), join(&ids), orbit]);
    }
    out.section("omega", &["grid", "converged", "orbit_counts"]);
    let mut hits = vec![0usize; a.orbits.len()];
    let mut converged = 0;
    for j in 0..cfg.partition_grid {
        let x = Rational::from_ratio(j as i64, cfg.partition_grid as i64);
        if let Ok(w) = omega_limit(&f, &x, p, &a.orbits, cfg.caps.max_iter) {
            converged += 1;
            if let Some(k) = a.orbits.iter().position(|o| o.same_points(&w)) {
                hits[k] += 1;
            }
        }
    }
    out.row([cfg.partition_grid.to_string(), converged.to_string(), join(&hits)]);
    Ok(Output::ok(out.finish()))
}

fn power(cfg: &RunConfig) -> Result<Output, ConfigError> {
    let f = cfg.pc::<Rational>()?;
    let k = cfg.power_k.ok_or_else(|| cmd_err("power.k", "required"))?;
    let out = Report::new();
    let pm = match f.power(k, cfg.caps.compositions) {
        Ok(pm) => pm,
        Err(e) => return inconclusive("power", out, e),
    };
    let mut out = out;
    out.section("breakpoints", &["j", "y", "closure"]);
    for (j, (y, c)) in pm.pc.breakpoints().points().iter().zip(pm.pc.closures()).enumerate() {
        let side = match c {
            pcw::Closure::Right => "right",
            pcw::Closure::Left => "left",
        };
        out.row([(j + 1).to_string(), y.to_string(), side.to_string()]);
    }
    out.section("branches", &["j", "word", "map"]);
    for (j, (w, m)) in pm.words.iter().zip(pm.pc.ifs().maps()).enumerate() {
        out.row([(j + 1).to_string(), join(w), m.to_string()]);
    }
    Ok(Output::ok(out.finish()))
}

fn cap<S: Scalar>(cfg: &RunConfig) -> Result<Output, ConfigError> {
    let ifs = cfg.ifs::<S>()?;
    let bp = cfg.breakpoints::<S>()?;
    let plan = ifs.cap(&bp).map_err(|e| cmd_err("cap", e))?;
    let kappa = ifs.maps().iter().map(|m| m.lipschitz_bound().value().clone()).reduce(|a, b| a.max_of(&b)).expect("n ≥ 2");
    let mut out = Report::new();
    out.section("capping", &["delta", "rho", "kappa"]);
    out.row([plan.delta.to_string(), plan.rho.to_string(), kappa.to_string()]);
    out.section("maps", &["i", "lo", "hi", "map"]);
    for (i, m) in plan.capped.maps().iter().enumerate() {
        let (lo, hi) = match m.kind() {
            pcw::MapKind::Clamped { lo, hi, .. } => (lo.to_string(), hi.to_string()),
            _ => (String::new(), String::new()),
        };
        out.row([(i + 1).to_string(), lo, hi, m.to_string()]);
    }
    Ok(Output::ok(out.finish()))
}
