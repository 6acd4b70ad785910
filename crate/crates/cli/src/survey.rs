//! Monte Carlo check of asymptotic periodicity and the orbit-count bound on
//! random affine piecewise contractions.

use std::collections::BTreeMap;

use pcw::{analyze, omega_limit, Error, IteratedFunctionSystem, PiecewiseContraction, QStatus, Rational, Scalar};
use rayon::prelude::*;

use crate::config::{Caps, SurveyParams};
use crate::emit::{join, Report};
use crate::sampling::{draw_affine, draw_breakpoints, sample_rng, DYADIC_BITS};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// Generic, complete `Q`, bounds hold, every grid point has a periodic ω-limit.
    Conclusive,
    NonGeneric,
    Inconclusive,
    Violation,
}

impl Verdict {
    fn as_str(self) -> &'static str {
        match self {
            Verdict::Conclusive => "conclusive",
            Verdict::NonGeneric => "non_generic",
            Verdict::Inconclusive => "inconclusive",
            Verdict::Violation => "violation",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SampleRecord {
    pub index: usize,
    pub f: PiecewiseContraction<Rational>,
    pub generic: bool,
    pub q_status: Option<QStatus>,
    pub m: Option<usize>,
    pub orbits: Option<usize>,
    pub classes: Option<usize>,
    pub grid_converged: Option<bool>,
    pub verdict: Verdict,
    pub reason: String,
}

#[derive(Clone, Debug)]
pub struct SurveyReport {
    pub n: usize,
    pub records: Vec<SampleRecord>,
}

pub fn draw_sample(params: &SurveyParams, seed: u64, index: usize) -> PiecewiseContraction<Rational> {
    let mut rng = sample_rng(seed, index);
    let margin = params.margin.to_f64();
    let bp = draw_breakpoints(&mut rng, params.n, margin, DYADIC_BITS);
    let maps = (0..params.n).map(|_| draw_affine(&mut rng, params.kappa_max, margin, DYADIC_BITS)).collect();
    PiecewiseContraction::new(IteratedFunctionSystem::new(maps).expect("n ≥ 2"), bp).expect("matching sizes")
}

/// Runs the full pipeline on one instance.
pub fn evaluate(index: usize, f: PiecewiseContraction<Rational>, caps: &Caps, grid: usize) -> SampleRecord {
    let mut rec = SampleRecord {
        index,
        generic: false,
        q_status: None,
        m: None,
        orbits: None,
        classes: None,
        grid_converged: None,
        verdict: Verdict::Inconclusive,
        reason: String::new(),
        f,
    };
    let f = &rec.f;
    match f.check_generic(caps.generic_depth, caps.compositions) {
        Ok(true) => rec.generic = true,
        Ok(false) => {
            rec.verdict = Verdict::NonGeneric;
            rec.reason = "non-generic".into();
            return rec;
        }
        Err(e) => {
            rec.reason = e.to_string();
            return rec;
        }
    }
    let a = match analyze(f, caps.q_depth, caps.q_size) {
        Ok(a) => a,
        Err(Error::BoundViolation(msg)) => {
            rec.verdict = Verdict::Violation;
            rec.reason = msg;
            return rec;
        }
        Err(e) => {
            rec.q_status = Some(if matches!(e, Error::IncompleteQ) { QStatus::Truncated } else { QStatus::Complete });
            rec.reason = reason_label(&e);
            return rec;
        }
    };
    let n = f.n();
    rec.q_status = Some(a.q.status);
    rec.m = Some(a.partition.len());
    rec.orbits = Some(a.orbits.len());
    rec.classes = Some(a.classes.count());
    let converged = (0..grid).all(|j| {
        let x = Rational::from_ratio(j as i64, grid as i64);
        omega_limit(f, &x, &a.partition, &a.orbits, caps.max_iter).is_ok()
    });
    rec.grid_converged = Some(converged);
    let bounds = (1..=n).contains(&a.orbits.len()) && a.orbits.len() <= a.classes.count() && a.classes.count() <= n;
    if converged && bounds {
        rec.verdict = Verdict::Conclusive;
    } else {
        rec.verdict = Verdict::Violation;
        rec.reason = if bounds { "omega limit failed".into() } else { "orbit count out of bounds".into() };
    }
    rec
}

fn reason_label(e: &Error) -> String {
    match e {
        Error::IncompleteQ => "Q truncated".into(),
        Error::NonDiscretePreimage(_) => "plateau preimage".into(),
        Error::InexactPreimage(_) => "inexact preimage".into(),
        Error::PartitionInvarianceViolation(_) => "partition not invariant".into(),
        other => other.to_string(),
    }
}

pub fn run_survey(params: &SurveyParams, caps: &Caps, seed: u64, jobs: usize) -> SurveyReport {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build().expect("thread pool");
    let records = pool.install(|| {
        (0..params.samples)
            .into_par_iter()
            .map(|i| evaluate(i, draw_sample(params, seed, i), caps, params.grid))
            .collect()
    });
    SurveyReport { n: params.n, records }
}

impl SurveyReport {
    pub fn count(&self, v: Verdict) -> usize {
        self.records.iter().filter(|r| r.verdict == v).count()
    }

    /// Samples that are not conclusive, including non-generic ones.
    pub fn inconclusive_rate(&self) -> f64 {
        if self.records.is_empty() {
            return 0.0;
        }
        1.0 - self.count(Verdict::Conclusive) as f64 / self.records.len() as f64
    }

    pub fn histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for r in self.records.iter().filter(|r| r.verdict == Verdict::Conclusive) {
            *h.entry(r.orbits.unwrap_or(0)).or_insert(0) += 1;
        }
        h
    }

    pub fn exit_code(&self) -> i32 {
        if self.count(Verdict::Violation) > 0 {
            1
        } else {
            0
        }
    }

    pub fn to_csv(&self) -> String {
        let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
        let mut out = Report::new();
        out.section(
            "samples",
            &[
                "index", "breakpoints", "maps", "generic", "q_status", "m", "orbits", "classes", "grid_converged", "verdict",
                "reason",
            ],
        );
        for r in &self.records {
            let maps: Vec<String> = r.f.ifs().maps().iter().map(ToString::to_string).collect();
            out.row([
                r.index.to_string(),
                join(r.f.breakpoints().points()),
                maps.join("; "),
                r.generic.to_string(),
                match r.q_status {
                    Some(QStatus::Complete) => "complete".into(),
                    Some(QStatus::Truncated) => "truncated".into(),
                    None => String::new(),
                },
                opt(r.m),
                opt(r.orbits),
                opt(r.classes),
                r.grid_converged.map(|b| b.to_string()).unwrap_or_default(),
                r.verdict.as_str().into(),
                r.reason.clone(),
            ]);
        }
        let conclusive = self.count(Verdict::Conclusive);
        let periodic = self.records.iter().filter(|r| r.verdict == Verdict::Conclusive && r.grid_converged == Some(true)).count();
        out.section(
            "aggregate",
            &["samples", "generic", "conclusive", "asymptotically_periodic_fraction", "violations", "inconclusive"],
        );
        let fraction = if conclusive == 0 { String::new() } else { format!("{:.6}", periodic as f64 / conclusive as f64) };
        out.row([
            self.records.len().to_string(),
            self.records.iter().filter(|r| r.generic).count().to_string(),
            conclusive.to_string(),
            fraction,
            self.count(Verdict::Violation).to_string(),
            (self.records.len() - conclusive).to_string(),
        ]);
        out.section("histogram", &["orbits", "count"]);
        for (k, c) in self.histogram() {
            out.row([k.to_string(), c.to_string()]);
        }
        out.section("inconclusive", &["reason", "count"]);
        let mut reasons: BTreeMap<&str, usize> = BTreeMap::new();
        for r in self.records.iter().filter(|r| matches!(r.verdict, Verdict::Inconclusive | Verdict::NonGeneric)) {
            *reasons.entry(r.reason.as_str()).or_insert(0) += 1;
        }
        for (reason, c) in reasons {
            out.row([reason.to_string(), c.to_string()]);
        }
        out.finish()
    }
}
